use std::fmt;

use serde::Serialize;

/// How a residual is expected to behave under grid refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualClass {
    /// Finite-difference or trapezoid limited, `O(h²)`.
    Fd,
    /// Runge–Kutta limited, `O(h⁴)`.
    Ode,
    /// Exact up to rounding.
    Algebraic,
}

impl ResidualClass {
    pub fn name(self) -> &'static str {
        match self {
            ResidualClass::Fd => "fd",
            ResidualClass::Ode => "ode",
            ResidualClass::Algebraic => "algebraic",
        }
    }

    /// Minimum acceptable order estimate, if the class has one.
    pub fn required_order(self) -> Option<f64> {
        match self {
            ResidualClass::Fd => Some(1.8),
            ResidualClass::Ode => Some(3.5),
            ResidualClass::Algebraic => None,
        }
    }
}

/// A named max/mean diagnostic over grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub class: ResidualClass,
    pub max: f64,
    pub mean: f64,
    pub spacing: f64,
    pub order_estimate: Option<f64>,
}

impl ResidualReport {
    /// Builds a report from per-node magnitudes. NaN entries poison `max`.
    pub fn from_values<I>(
        name: impl Into<String>,
        class: ResidualClass,
        spacing: f64,
        values: I,
    ) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for v in values {
            let v = v.abs();
            if v.is_nan() || v > max {
                max = if v.is_nan() { f64::NAN } else { v };
            }
            sum += v;
            count += 1;
        }
        let mean = if count == 0 { 0.0 } else { sum / count as f64 };
        Self {
            name: name.into(),
            class,
            max,
            mean,
            spacing,
            order_estimate: None,
        }
    }

    pub fn single(name: impl Into<String>, class: ResidualClass, spacing: f64, value: f64) -> Self {
        Self::from_values(name, class, spacing, [value])
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Worst of two reports under a combined name.
    pub fn combine(name: impl Into<String>, a: &ResidualReport, b: &ResidualReport) -> Self {
        Self {
            name: name.into(),
            class: a.class,
            max: a.max.max(b.max),
            mean: 0.5 * (a.mean + b.mean),
            spacing: a.spacing,
            order_estimate: None,
        }
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] max={:.3e} mean={:.3e} h={}",
            self.name,
            self.class.name(),
            self.max,
            self.mean,
            self.spacing
        )?;
        if let Some(order) = self.order_estimate {
            write!(f, " order={order:.2}")?;
        }
        Ok(())
    }
}

/// Empirical order `log2(e_h / e_{h/2})`.
pub fn order_estimate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Fills `order_estimate` of each coarse report from the same-named report
/// of a half-spacing rerun.
pub fn attach_orders(coarse: &mut [ResidualReport], fine: &[ResidualReport]) {
    for report in coarse.iter_mut() {
        if let Some(f) = fine.iter().find(|f| f.name == report.name) {
            report.order_estimate = Some(order_estimate(report.max, f.max));
        }
    }
}
