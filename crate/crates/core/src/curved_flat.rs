//! Curved flats from minimal Darboux pairs: integrating factors, the
//! frame `Φ`, the system residual and export of the Gauss map pair.

use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    edge_midpoint, integrate_along_paths, partial, rk4_step, Axis, ConformalGrid, Edge, PathOrder,
    Payload, SampledField, Stage,
};
use crate::quat::ImPoint;
use crate::report::{ResidualClass, ResidualReport};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Integrating factors must stay within `[1/SCALING_BOUND, SCALING_BOUND]`.
pub const SCALING_BOUND: f64 = 1e12;

/// Complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    pub fn matmul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|x| x * s)))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(&o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x += *y;
            }
        }
        Mat2(out)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl Payload for Mat2 {
    /// Frobenius norm.
    fn magnitude(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Sampled data of a minimal Darboux pair on the plane of `z`.
#[derive(Debug, Clone)]
pub struct PairData {
    pub g: SampledField<Complex64>,
    pub g_hat: SampledField<Complex64>,
    /// `w` in `ω = w dz`.
    pub w: SampledField<Complex64>,
    /// `ŵ` in `ω̂ = ŵ dz`.
    pub w_hat: SampledField<Complex64>,
    pub t: f64,
}

impl PairData {
    pub fn new(
        g: SampledField<Complex64>,
        g_hat: SampledField<Complex64>,
        w: SampledField<Complex64>,
        w_hat: SampledField<Complex64>,
        t: f64,
    ) -> Result<Self> {
        crate::grid::ensure_same_grid(&g.grid, &g_hat.grid)?;
        crate::grid::ensure_same_grid(&g.grid, &w.grid)?;
        crate::grid::ensure_same_grid(&g.grid, &w_hat.grid)?;
        if t == 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spectral parameter must be finite and nonzero, got {t}"
            )));
        }
        Ok(Self {
            g,
            g_hat,
            w,
            w_hat,
            t,
        })
    }

    pub fn grid(&self) -> ConformalGrid {
        self.g.grid
    }
}

/// Integrating factors `a`, `â` with diagnostics.
#[derive(Debug, Clone)]
pub struct Factors {
    pub a: SampledField<Complex64>,
    pub a_hat: SampledField<Complex64>,
    pub reports: Vec<ResidualReport>,
}

/// Solves `y' = c y` along grid paths, `c = coeff` in the `u` direction
/// and `i coeff` in the `v` direction, with cubic midpoint coefficients.
fn linear_paths(
    coeff: &SampledField<Complex64>,
    seed: Complex64,
    order: PathOrder,
) -> Result<Vec<Complex64>> {
    let grid = coeff.grid;
    integrate_along_paths(grid, seed, order, |edge: Edge, y: Complex64| {
        let (p1, q1) = edge.end();
        let dir = match edge.axis {
            Axis::U => Complex64::new(1.0, 0.0),
            Axis::V => I,
        };
        let mid = edge_midpoint(coeff, edge);
        let next = rk4_step(y, grid.step(edge.axis), |stage, y| {
            let c = match stage {
                Stage::Start => *coeff.at(edge.p, edge.q),
                Stage::Mid => mid,
                Stage::End => *coeff.at(p1, q1),
            };
            dir * c * y
        });
        let m = next.norm();
        if !(m < SCALING_BOUND && m > 1.0 / SCALING_BOUND) {
            return Err(Error::Scaling {
                node: grid.node(p1, q1),
            });
        }
        Ok(next)
    })
}

fn solve_factor(
    name: &str,
    coeff: &SampledField<Complex64>,
    seed: Complex64,
) -> Result<(SampledField<Complex64>, ResidualReport)> {
    let m = seed.norm();
    if !(m < SCALING_BOUND && m > 1.0 / SCALING_BOUND) {
        return Err(Error::Scaling {
            node: coeff.grid.node(0, 0),
        });
    }
    let rows = linear_paths(coeff, seed, PathOrder::RowsFirst)?;
    let cols = linear_paths(coeff, seed, PathOrder::ColumnsFirst)?;
    let report = ResidualReport::from_values(
        format!("{name} path independence"),
        ResidualClass::Ode,
        coeff.grid.spacing(),
        rows.iter()
            .zip(&cols)
            .map(|(x, y)| (x - y).norm())
            .collect::<Vec<_>>(),
    );
    Ok((SampledField::new(coeff.grid, rows)?, report))
}

/// Solves `dâ + 2t ω (ĝ - g) â = 0` and `da + 2t ω̂ (g - ĝ) a = 0` from the
/// values at node `(0, 0)`.
pub fn integrating_factors(data: &PairData, a0: Complex64, a_hat0: Complex64) -> Result<Factors> {
    let t = data.t;
    let c_hat = SampledField::from_fn(data.grid(), |p, q| {
        -2.0 * t * *data.w.at(p, q) * (*data.g_hat.at(p, q) - *data.g.at(p, q))
    });
    let c = SampledField::from_fn(data.grid(), |p, q| {
        -2.0 * t * *data.w_hat.at(p, q) * (*data.g.at(p, q) - *data.g_hat.at(p, q))
    });
    let (a_hat, r_hat) = solve_factor("a_hat", &c_hat, a_hat0)?;
    let (a, r) = solve_factor("a", &c, a0)?;
    Ok(Factors {
        a,
        a_hat,
        reports: vec![r, r_hat],
    })
}

/// `Φ = [[g a, ĝ â], [a, â]]`, rejecting nodes where `det Φ = a â (g - ĝ)`
/// vanishes relative to the entries.
pub fn frame(data: &PairData, factors: &Factors) -> Result<SampledField<Mat2>> {
    let grid = data.grid();
    SampledField::try_from_fn(grid, |p, q| {
        let (g, gh) = (*data.g.at(p, q), *data.g_hat.at(p, q));
        let (a, ah) = (*factors.a.at(p, q), *factors.a_hat.at(p, q));
        let phi = Mat2([[g * a, gh * ah], [a, ah]]);
        let scale = (g * a).norm() * ah.norm() + (gh * ah).norm() * a.norm();
        if !(phi.det().norm() > 1e-14 * scale) {
            return Err(Error::SingularFrame {
                node: grid.node(p, q),
            });
        }
        Ok(phi)
    })
}

/// `N` along `axis`: off-diagonal `a⁻¹ ω (ĝ - g) â` and `â⁻¹ ω̂ (g - ĝ) a`.
fn connection(data: &PairData, factors: &Factors, i: usize, axis: Axis) -> Mat2 {
    let dir = match axis {
        Axis::U => Complex64::new(1.0, 0.0),
        Axis::V => I,
    };
    let (g, gh) = (data.g.values[i], data.g_hat.values[i]);
    let (a, ah) = (factors.a.values[i], factors.a_hat.values[i]);
    let zero = Complex64::new(0.0, 0.0);
    Mat2([
        [zero, dir * data.w.values[i] * (gh - g) * ah / a],
        [dir * data.w_hat.values[i] * (g - gh) * a / ah, zero],
    ])
}

/// Residuals of `dΦ + 2t Φ N = 0` ("curved flat") and of the diagonal of
/// `Φ⁻¹ dΦ` ("connection diagonal"), with `dΦ` from central differences.
pub fn curved_flat_residual(
    data: &PairData,
    factors: &Factors,
    phi: &SampledField<Mat2>,
) -> Result<Vec<ResidualReport>> {
    let grid = data.grid();
    crate::grid::ensure_same_grid(&grid, &phi.grid)?;
    let t = data.t;
    let (du, dv) = (partial(phi, Axis::U), partial(phi, Axis::V));
    let mut system = Vec::with_capacity(grid.len());
    let mut diagonal = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let inv = phi.values[i].inverse().ok_or(Error::SingularFrame {
            node: grid.node_at(i),
        })?;
        let mut worst = 0.0f64;
        let mut diag = 0.0f64;
        for (axis, d) in [(Axis::U, &du), (Axis::V, &dv)] {
            let n = connection(data, factors, i, axis);
            let r = d.values[i] + phi.values[i].matmul(&n) * (2.0 * t);
            worst = worst.max(r.magnitude());
            let m = inv.matmul(&d.values[i]);
            diag = diag.max(m.0[0][0].norm()).max(m.0[1][1].norm());
        }
        system.push(worst);
        diagonal.push(diag);
    }
    Ok(vec![
        ResidualReport::from_values("curved flat", ResidualClass::Fd, grid.spacing(), system),
        ResidualReport::from_values(
            "connection diagonal",
            ResidualClass::Fd,
            grid.spacing(),
            diagonal,
        ),
    ])
}

/// One row of an exported Gauss map pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRow {
    pub u: f64,
    pub v: f64,
    pub n: ImPoint,
    pub n_hat: ImPoint,
}

pub const PAIR_CSV_HEADER: &str = "u,v,nx,ny,nz,nhx,nhy,nhz";

/// Writes `(n, n̂)` per node as CSV with shortest round-trip float
/// formatting, so re-import is bit exact.
pub fn write_pair_csv<W: Write>(
    mut out: W,
    n: &SampledField<ImPoint>,
    n_hat: &SampledField<ImPoint>,
) -> Result<()> {
    crate::grid::ensure_same_grid(&n.grid, &n_hat.grid)?;
    let grid = n.grid;
    writeln!(out, "{PAIR_CSV_HEADER}")?;
    for i in 0..grid.len() {
        let (p, q) = grid.position(i);
        let (a, b) = (n.values[i], n_hat.values[i]);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            grid.u(p),
            grid.v(q),
            a.x1,
            a.x2,
            a.x3,
            b.x1,
            b.x2,
            b.x3
        )?;
    }
    Ok(())
}

pub fn read_pair_csv<R: BufRead>(input: R) -> Result<Vec<PairRow>> {
    let bad =
        |line: usize, msg: &str| Error::InvalidParameter(format!("pair csv line {line}: {msg}"));
    let mut rows = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if k == 0 {
            if line.trim() != PAIR_CSV_HEADER {
                return Err(bad(1, "unexpected header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let x = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(k + 1, &e.to_string()))?;
        if x.len() != 8 {
            return Err(bad(k + 1, "expected 8 fields"));
        }
        rows.push(PairRow {
            u: x[0],
            v: x[1],
            n: ImPoint::new(x[2], x[3], x[4]),
            n_hat: ImPoint::new(x[5], x[6], x[7]),
        });
    }
    Ok(rows)
}

/// OBJ with the two Gauss map images as polylines along every grid line.
pub fn write_pair_obj<W: Write>(
    mut out: W,
    n: &SampledField<ImPoint>,
    n_hat: &SampledField<ImPoint>,
) -> Result<()> {
    crate::grid::ensure_same_grid(&n.grid, &n_hat.grid)?;
    let grid = n.grid;
    for field in [n, n_hat] {
        for x in &field.values {
            writeln!(out, "v {:.16e} {:.16e} {:.16e}", x.x1, x.x2, x.x3)?;
        }
    }
    for offset in [0, grid.len()] {
        for q in 0..grid.nv {
            let line: Vec<String> = (0..grid.nu)
                .map(|p| (offset + grid.index(p, q) + 1).to_string())
                .collect();
            writeln!(out, "l {}", line.join(" "))?;
        }
        for p in 0..grid.nu {
            let line: Vec<String> = (0..grid.nv)
                .map(|q| (offset + grid.index(p, q) + 1).to_string())
                .collect();
            writeln!(out, "l {}", line.join(" "))?;
        }
    }
    Ok(())
}
