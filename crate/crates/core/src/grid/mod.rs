//! Discrete calculus on rectangular conformal-coordinate grids.
//!
//! Node `(p, q)` sits at `(u0 + p du, v0 + q dv)` and carries the complex
//! label `z = u + i v`. Storage is row-major with `u` varying fastest.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Node, Result};
use crate::expr::Expr;
use crate::quat::{ImPoint, Quaternion};
use crate::report::{ResidualClass, ResidualReport};

pub mod path;
pub mod shape;

pub use path::{edge_midpoint, integrate_along_paths, rk4_step, Edge, PathOrder, Stage};
pub use shape::{shape_analysis, ShapeData, ShapeNode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalGrid {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl ConformalGrid {
    pub fn new(u0: f64, v0: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self> {
        let mut problems = Vec::new();
        if !(du > 0.0 && du.is_finite()) {
            problems.push(format!("du must be positive, got {du}"));
        }
        if !(dv > 0.0 && dv.is_finite()) {
            problems.push(format!("dv must be positive, got {dv}"));
        }
        if nu < 3 {
            problems.push(format!("nu must be at least 3, got {nu}"));
        }
        if nv < 3 {
            problems.push(format!("nv must be at least 3, got {nv}"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self {
            u0,
            v0,
            du,
            dv,
            nu,
            nv,
        })
    }

    /// Square patch `[u0, u1] × [v0, v1]` with `intervals` cells per side.
    pub fn square(u0: f64, u1: f64, v0: f64, v1: f64, intervals: usize) -> Result<Self> {
        Self::new(
            u0,
            v0,
            (u1 - u0) / intervals as f64,
            (v1 - v0) / intervals as f64,
            intervals + 1,
            intervals + 1,
        )
    }

    /// Same domain at half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            du: self.du / 2.0,
            dv: self.dv / 2.0,
            nu: 2 * self.nu - 1,
            nv: 2 * self.nv - 1,
            ..*self
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, p: usize, q: usize) -> usize {
        q * self.nu + p
    }

    pub fn position(&self, index: usize) -> (usize, usize) {
        (index % self.nu, index / self.nu)
    }

    pub fn u(&self, p: usize) -> f64 {
        self.u0 + p as f64 * self.du
    }

    pub fn v(&self, q: usize) -> f64 {
        self.v0 + q as f64 * self.dv
    }

    pub fn z(&self, p: usize, q: usize) -> Complex64 {
        Complex64::new(self.u(p), self.v(q))
    }

    pub fn node(&self, p: usize, q: usize) -> Node {
        Node {
            p,
            q,
            u: self.u(p),
            v: self.v(q),
        }
    }

    pub fn node_at(&self, index: usize) -> Node {
        let (p, q) = self.position(index);
        self.node(p, q)
    }

    pub fn spacing(&self) -> f64 {
        self.du.max(self.dv)
    }

    pub fn step(&self, axis: Axis) -> f64 {
        match axis {
            Axis::U => self.du,
            Axis::V => self.dv,
        }
    }

    pub fn count(&self, axis: Axis) -> usize {
        match axis {
            Axis::U => self.nu,
            Axis::V => self.nv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

/// Node payloads that support the linear operations of the difference and
/// quadrature stencils.
pub trait Payload:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl Payload for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Payload for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Payload for ImPoint {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Payload for Quaternion {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Per-node values over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    pub grid: ConformalGrid,
    pub values: Vec<T>,
}

impl<T: Clone + Send + Sync> SampledField<T> {
    pub fn new(grid: ConformalGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: ConformalGrid, value: T) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Node-parallel construction from `(p, q)`.
    pub fn from_fn<F>(grid: ConformalGrid, f: F) -> Self
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (p, q) = grid.position(i);
                f(p, q)
            })
            .collect();
        Self { grid, values }
    }

    pub fn try_from_fn<F>(grid: ConformalGrid, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<T> + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (p, q) = grid.position(i);
                f(p, q)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(Self { grid, values })
    }

    pub fn at(&self, p: usize, q: usize) -> &T {
        &self.values[self.grid.index(p, q)]
    }

    pub fn map<S: Clone + Send + Sync, F>(&self, f: F) -> SampledField<S>
    where
        F: Fn(&T) -> S + Sync,
    {
        SampledField {
            grid: self.grid,
            values: self.values.par_iter().map(&f).collect(),
        }
    }

    pub fn try_map<S: Clone + Send + Sync, F>(&self, f: F) -> Result<SampledField<S>>
    where
        F: Fn(usize, &T) -> Result<S> + Sync,
    {
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| f(i, v))
            .collect::<Result<Vec<S>>>()?;
        Ok(SampledField {
            grid: self.grid,
            values,
        })
    }

    pub fn zip_map<S: Clone + Send + Sync, R: Clone + Send + Sync, F>(
        &self,
        other: &SampledField<S>,
        f: F,
    ) -> Result<SampledField<R>>
    where
        F: Fn(&T, &S) -> R + Sync,
    {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(SampledField {
            grid: self.grid,
            values,
        })
    }
}

impl<T: Payload> SampledField<T> {
    pub fn max_magnitude(&self) -> f64 {
        self.values
            .iter()
            .map(Payload::magnitude)
            .fold(0.0, f64::max)
    }
}

pub fn ensure_same_grid(a: &ConformalGrid, b: &ConformalGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Samples an expression at every node label `z = u + i v`.
pub fn sample(expr: &Expr, grid: ConformalGrid) -> Result<SampledField<Complex64>> {
    SampledField::try_from_fn(grid, |p, q| {
        expr.eval(grid.z(p, q)).map_err(|_| Error::PoleAtNode {
            node: grid.node(p, q),
        })
    })
}

/// Samples a closed-form map of `(u, v)`.
pub fn sample_map<T, F>(grid: ConformalGrid, f: F) -> SampledField<T>
where
    T: Clone + Send + Sync,
    F: Fn(f64, f64) -> T + Sync,
{
    SampledField::from_fn(grid, |p, q| f(grid.u(p), grid.v(q)))
}

fn line_value<T: Payload>(field: &SampledField<T>, axis: Axis, p: usize, q: usize, k: usize) -> T {
    match axis {
        Axis::U => *field.at(k, q),
        Axis::V => *field.at(p, k),
    }
}

/// First derivative: central differences inside, second-order one-sided
/// stencils on the boundary.
pub fn partial<T: Payload>(field: &SampledField<T>, axis: Axis) -> SampledField<T> {
    let grid = field.grid;
    let h = grid.step(axis);
    let n = grid.count(axis);
    SampledField::from_fn(grid, |p, q| {
        let k = match axis {
            Axis::U => p,
            Axis::V => q,
        };
        let at = |j: usize| line_value(field, axis, p, q, j);
        if k == 0 {
            (at(1) * 4.0 - at(0) * 3.0 - at(2)) * (1.0 / (2.0 * h))
        } else if k == n - 1 {
            (at(k) * 3.0 - at(k - 1) * 4.0 + at(k - 2)) * (1.0 / (2.0 * h))
        } else {
            (at(k + 1) - at(k - 1)) * (1.0 / (2.0 * h))
        }
    })
}

/// Pure second derivative along one axis; second-order one-sided on the
/// boundary when at least four nodes are available.
pub fn second_partial<T: Payload>(field: &SampledField<T>, axis: Axis) -> SampledField<T> {
    let grid = field.grid;
    let h2 = grid.step(axis).powi(2);
    let n = grid.count(axis);
    SampledField::from_fn(grid, |p, q| {
        let k = match axis {
            Axis::U => p,
            Axis::V => q,
        };
        let at = |j: usize| line_value(field, axis, p, q, j);
        if k == 0 {
            if n >= 4 {
                (at(0) * 2.0 - at(1) * 5.0 + at(2) * 4.0 - at(3)) * (1.0 / h2)
            } else {
                (at(0) - at(1) * 2.0 + at(2)) * (1.0 / h2)
            }
        } else if k == n - 1 {
            if n >= 4 {
                (at(k) * 2.0 - at(k - 1) * 5.0 + at(k - 2) * 4.0 - at(k - 3)) * (1.0 / h2)
            } else {
                (at(k) - at(k - 1) * 2.0 + at(k - 2)) * (1.0 / h2)
            }
        } else {
            (at(k + 1) - at(k) * 2.0 + at(k - 1)) * (1.0 / h2)
        }
    })
}

/// `α = α_u du + α_v dv` sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm<T> {
    pub du: SampledField<T>,
    pub dv: SampledField<T>,
}

impl<T: Payload> OneForm<T> {
    pub fn new(du: SampledField<T>, dv: SampledField<T>) -> Result<Self> {
        ensure_same_grid(&du.grid, &dv.grid)?;
        Ok(Self { du, dv })
    }

    pub fn grid(&self) -> ConformalGrid {
        self.du.grid
    }

    /// The exact form `d field`, by finite differences.
    pub fn differential(field: &SampledField<T>) -> Self {
        Self {
            du: partial(field, Axis::U),
            dv: partial(field, Axis::V),
        }
    }

    pub fn component(&self, axis: Axis) -> &SampledField<T> {
        match axis {
            Axis::U => &self.du,
            Axis::V => &self.dv,
        }
    }

    /// `|∮α| / (du dv)` per cell with trapezoidal edge averages.
    pub fn closedness(&self) -> ResidualReport {
        let g = self.grid();
        let cells = (0..(g.nu - 1) * (g.nv - 1)).into_par_iter().map(|c| {
            let p = c % (g.nu - 1);
            let q = c / (g.nu - 1);
            let bottom = (*self.du.at(p, q) + *self.du.at(p + 1, q)) * (0.5 * g.du);
            let right = (*self.dv.at(p + 1, q) + *self.dv.at(p + 1, q + 1)) * (0.5 * g.dv);
            let top = (*self.du.at(p, q + 1) + *self.du.at(p + 1, q + 1)) * (0.5 * g.du);
            let left = (*self.dv.at(p, q) + *self.dv.at(p, q + 1)) * (0.5 * g.dv);
            (bottom + right - top - left).magnitude() / (g.du * g.dv)
        });
        ResidualReport::from_values(
            "closedness",
            ResidualClass::Fd,
            g.spacing(),
            cells.collect::<Vec<_>>(),
        )
    }
}

/// Result of integrating a closed one-form.
#[derive(Debug, Clone)]
pub struct Integrated<T> {
    pub field: SampledField<T>,
    pub closedness: ResidualReport,
    pub path_dependence: ResidualReport,
}

fn trapezoid_paths<T: Payload>(form: &OneForm<T>, base: T, order: PathOrder) -> Vec<T> {
    let g = form.grid();
    integrate_along_paths(g, base, order, |edge: Edge, y: T| {
        let h = g.step(edge.axis);
        let (p1, q1) = edge.end();
        let a = form.component(edge.axis);
        Ok(y + (*a.at(edge.p, edge.q) + *a.at(p1, q1)) * (0.5 * h))
    })
    .expect("trapezoid steps are infallible")
}

/// Trapezoid path integration anchored at node `(0, 0)`: the first column
/// bottom to top, then every row left to right. The path-dependence report
/// compares against the transposed order (first row, then columns).
pub fn integrate_one_form<T: Payload>(form: &OneForm<T>, base: T) -> Integrated<T> {
    let g = form.grid();
    let rows_first = trapezoid_paths(form, base, PathOrder::RowsFirst);
    let cols_first = trapezoid_paths(form, base, PathOrder::ColumnsFirst);
    let path_dependence = ResidualReport::from_values(
        "path dependence",
        ResidualClass::Fd,
        g.spacing(),
        rows_first
            .iter()
            .zip(&cols_first)
            .map(|(a, b)| (*a - *b).magnitude())
            .collect::<Vec<_>>(),
    );
    Integrated {
        field: SampledField {
            grid: g,
            values: rows_first,
        },
        closedness: form.closedness(),
        path_dependence,
    }
}

/// Path integration with Simpson's rule on every edge, the midpoint value
/// coming from cubic interpolation along the grid line. Same paths and
/// reports as [`integrate_one_form`], with `O(h⁴)` quadrature error.
pub fn integrate_one_form_cubic<T: Payload>(form: &OneForm<T>, base: T) -> Integrated<T> {
    let g = form.grid();
    let run = |order| {
        integrate_along_paths(g, base, order, |edge: Edge, y: T| {
            let h = g.step(edge.axis);
            let (p1, q1) = edge.end();
            let a = form.component(edge.axis);
            let mid = edge_midpoint(a, edge);
            Ok(y + (*a.at(edge.p, edge.q) + mid * 4.0 + *a.at(p1, q1)) * (h / 6.0))
        })
        .expect("quadrature steps are infallible")
    };
    let rows_first = run(PathOrder::RowsFirst);
    let cols_first = run(PathOrder::ColumnsFirst);
    let path_dependence = ResidualReport::from_values(
        "path dependence",
        ResidualClass::Fd,
        g.spacing(),
        rows_first
            .iter()
            .zip(&cols_first)
            .map(|(a, b)| (*a - *b).magnitude())
            .collect::<Vec<_>>(),
    );
    Integrated {
        field: SampledField {
            grid: g,
            values: rows_first,
        },
        closedness: form.closedness(),
        path_dependence,
    }
}
