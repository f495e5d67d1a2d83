use std::fmt;

use num_complex::Complex64;

/// Grid node identification carried by node-local errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub p: usize,
    pub q: usize,
    pub u: f64,
    pub v: f64,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node ({}, {}) at (u, v) = ({}, {})",
            self.p, self.q, self.u, self.v
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("inverse of zero quaternion")]
    ZeroInverse,
    #[error("Möbius image is not imaginary: scalar part {scalar:e} vs magnitude {magnitude:e}")]
    NotImaginary { scalar: f64, magnitude: f64 },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("pole at z = {z}")]
    Pole { z: Complex64 },
    #[error("pole at {node}")]
    PoleAtNode { node: Node },
    #[error("degenerate immersion at {node}")]
    DegenerateNode { node: Node },
    #[error("degenerate metric at {node}")]
    DegenerateMetric { node: Node },
    #[error("Möbius image hits infinity at {node}")]
    PoleOnGrid { node: Node },
    #[error("solution escapes to infinity at {node}")]
    SolutionEscape { node: Node },
    #[error("coincident points at {node}")]
    Coincidence { node: Node },
    #[error("singular data (transformed value meets original) at {node}")]
    SingularData { node: Node },
    #[error("singular frame at {node}")]
    SingularFrame { node: Node },
    #[error("integrating factor out of range at {node}")]
    Scaling { node: Node },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch between fields")]
    GridMismatch,
    #[error("config error at '{pointer}': {message}")]
    Config { pointer: String, message: String },
    #[error("invalid config: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
