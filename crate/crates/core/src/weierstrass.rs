//! Minimal surfaces from Weierstrass data `(g, h)` and their Darboux
//! transforms via the holomorphic Riccati equation.
//!
//! With `ω = h'/2 dz = w dz` the surface is `df = Re` of the imaginary
//! valued form built from `(g, ω)` and the Gauss map is the stereographic
//! image of `g`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{catalog, Expr};
use crate::grid::{
    integrate_along_paths, integrate_one_form_cubic, rk4_step, shape_analysis, Axis, ConformalGrid,
    Edge, OneForm, PathOrder, SampledField, Stage,
};
use crate::permutability::{lemma_residual, translation_constancy};
use crate::quat::{complex_times_j, j_times_complex, ImPoint};
use crate::report::{ResidualClass, ResidualReport};
use crate::surface::Patch;
use crate::transforms::{prefixed, riccati_defect, ESCAPE_BOUND};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gauss map of the Weierstrass data at a point with value `g`.
pub fn gauss_map(g: Complex64) -> ImPoint {
    let r2 = g.norm_sqr();
    ImPoint::new(1.0 - r2, -2.0 * g.re, 2.0 * g.im) / (1.0 + r2)
}

/// `(f_u, f_v)` for Gauss map value `g` and `ω = w dz`.
pub fn weierstrass_form(g: Complex64, w: Complex64) -> (ImPoint, ImPoint) {
    let gw = g * w;
    let a = (1.0 - g * g) * w;
    let b = (1.0 + g * g) * w;
    (
        ImPoint::new(2.0 * gw.re, a.re, b.im),
        ImPoint::new(-2.0 * gw.im, -a.im, b.re),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    pub g: Expr,
    pub h: Expr,
    pub dg: Expr,
    pub dh: Expr,
}

impl WeierstrassData {
    pub fn new(g: Expr, h: Expr) -> Self {
        let (dg, dh) = (g.derivative(), h.derivative());
        Self { g, h, dg, dh }
    }

    pub fn parse(g: &str, h: &str) -> Result<Self> {
        Ok(Self::new(Expr::parse(g)?, Expr::parse(h)?))
    }

    pub fn catalog(name: &str) -> Option<Self> {
        let (g, h) = catalog::weierstrass(name)?;
        Self::parse(g, h).ok()
    }

    /// `w` in `ω = w dz`.
    pub fn w(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.dh.eval(z)? * 0.5)
    }

    /// `q = h' g'`, the coefficient of the holomorphic quadratic differential.
    pub fn q(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.dh.eval(z)? * self.dg.eval(z)?)
    }

    pub fn form(&self, z: Complex64) -> Result<(ImPoint, ImPoint)> {
        Ok(weierstrass_form(self.g.eval(z)?, self.w(z)?))
    }
}

fn at_node<T>(grid: ConformalGrid, p: usize, q: usize, r: Result<T>) -> Result<T> {
    r.map_err(|_| Error::PoleAtNode {
        node: grid.node(p, q),
    })
}

fn edge_z(grid: ConformalGrid, edge: Edge, stage: Stage) -> Complex64 {
    let z = grid.z(edge.p, edge.q);
    let s = match stage {
        Stage::Start => 0.0,
        Stage::Mid => 0.5,
        Stage::End => 1.0,
    };
    match edge.axis {
        Axis::U => z + s * grid.du,
        Axis::V => z + I * (s * grid.dv),
    }
}

/// Minimal surface of the data anchored at `base`, integrated along grid
/// paths with Simpson's rule on the analytic form. Positions carry the
/// exact tangent form.
///
/// Reports the closedness of the sampled form, the path dependence, and the
/// mean curvature of the sampled surface.
pub fn weierstrass_surface(
    data: &WeierstrassData,
    grid: ConformalGrid,
    base: ImPoint,
) -> Result<(Patch, Vec<ResidualReport>)> {
    let forms =
        SampledField::try_from_fn(grid, |p, q| at_node(grid, p, q, data.form(grid.z(p, q))))?;
    let d = OneForm::new(forms.map(|f| f.0), forms.map(|f| f.1))?;
    let run = |order| {
        integrate_along_paths(grid, base, order, |edge: Edge, y: ImPoint| {
            let h = grid.step(edge.axis);
            let pick = |stage| -> Result<ImPoint> {
                let (fu, fv) = data.form(edge_z(grid, edge, stage))?;
                Ok(match edge.axis {
                    Axis::U => fu,
                    Axis::V => fv,
                })
            };
            let values = [pick(Stage::Start), pick(Stage::Mid), pick(Stage::End)];
            let [a, m, b] = match values {
                [Ok(a), Ok(m), Ok(b)] => [a, m, b],
                _ => {
                    return Err(Error::PoleAtNode {
                        node: grid.node(edge.p, edge.q),
                    })
                }
            };
            Ok(y + (a + m * 4.0 + b) * (h / 6.0))
        })
    };
    let rows = run(PathOrder::RowsFirst)?;
    let cols = run(PathOrder::ColumnsFirst)?;
    let mut reports = vec![
        d.closedness(),
        ResidualReport::from_values(
            "path dependence",
            ResidualClass::Fd,
            grid.spacing(),
            rows.iter()
                .zip(&cols)
                .map(|(a, b)| (*a - *b).norm())
                .collect::<Vec<_>>(),
        ),
    ];
    let pos = SampledField::new(grid, rows)?;
    let shape = shape_analysis(&pos)?;
    reports.push(ResidualReport::from_values(
        "mean curvature",
        ResidualClass::Fd,
        grid.spacing(),
        shape.nodes.values.iter().map(|s| s.mean),
    ));
    Ok((Patch::new(pos, d)?, reports))
}

/// Surface from sampled Gauss map and `ω` coefficients, integrated with
/// the cubic path quadrature.
pub fn weierstrass_from_fields(
    g: &SampledField<Complex64>,
    w: &SampledField<Complex64>,
    base: ImPoint,
) -> Result<(Patch, Vec<ResidualReport>)> {
    let forms = g.zip_map(w, |g, w| weierstrass_form(*g, *w))?;
    let d = OneForm::new(forms.map(|f| f.0), forms.map(|f| f.1))?;
    let out = integrate_one_form_cubic(&d, base);
    Ok((
        Patch::new(out.field, d)?,
        vec![out.closedness, out.path_dependence],
    ))
}

/// Holomorphic Riccati solution `ĝ` with diagnostics.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub g_hat: SampledField<Complex64>,
    pub reports: Vec<ResidualReport>,
}

fn riccati_paths(
    data: &WeierstrassData,
    grid: ConformalGrid,
    t: f64,
    seed: Complex64,
    order: PathOrder,
) -> Result<Vec<Complex64>> {
    integrate_along_paths(grid, seed, order, |edge: Edge, y: Complex64| {
        let coeff = |stage| -> Result<(Complex64, Complex64)> {
            let z = edge_z(grid, edge, stage);
            Ok((data.g.eval(z)?, data.w(z)?))
        };
        let stages = [coeff(Stage::Start), coeff(Stage::Mid), coeff(Stage::End)];
        let [s, m, e] = match stages {
            [Ok(s), Ok(m), Ok(e)] => [s, m, e],
            _ => {
                return Err(Error::PoleAtNode {
                    node: grid.node(edge.p, edge.q),
                })
            }
        };
        // along v the derivative picks up a factor i from dz = i dv
        let dir = match edge.axis {
            Axis::U => Complex64::new(1.0, 0.0),
            Axis::V => I,
        };
        let next = rk4_step(y, grid.step(edge.axis), |stage, y| {
            let (g, w) = match stage {
                Stage::Start => s,
                Stage::Mid => m,
                Stage::End => e,
            };
            dir * 2.0 * t * (y - g) * (y - g) * w
        });
        let end = edge.end();
        if !next.is_finite() || next.norm() > ESCAPE_BOUND {
            return Err(Error::SolutionEscape {
                node: grid.node(end.0, end.1),
            });
        }
        Ok(next)
    })
}

/// Solves `dĝ = 2t (ĝ - g)² ω` from `ĝ(z_0) = seed` with RK4 on every edge.
///
/// Reports the rows-first versus columns-first disagreement and the defect
/// of `dg dĝ = t (ĝ - g)² q` with `dĝ` from the equation itself.
pub fn holomorphic_riccati(
    data: &WeierstrassData,
    grid: ConformalGrid,
    t: f64,
    seed: Complex64,
) -> Result<RiccatiSolution> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spectral parameter must be finite and nonzero, got {t}"
        )));
    }
    let rows = riccati_paths(data, grid, t, seed, PathOrder::RowsFirst)?;
    let cols = riccati_paths(data, grid, t, seed, PathOrder::ColumnsFirst)?;
    let inconsistency = ResidualReport::from_values(
        "path independence",
        ResidualClass::Ode,
        grid.spacing(),
        rows.iter()
            .zip(&cols)
            .map(|(a, b)| (a - b).norm())
            .collect::<Vec<_>>(),
    );
    let g_hat = SampledField::new(grid, rows)?;
    let defect = SampledField::try_from_fn(grid, |p, q| {
        let z = grid.z(p, q);
        let y = *g_hat.at(p, q);
        let (g, w, dg, qq) = at_node(
            grid,
            p,
            q,
            (|| Ok((data.g.eval(z)?, data.w(z)?, data.dg.eval(z)?, data.q(z)?)))(),
        )?;
        let dg_hat = 2.0 * t * (y - g) * (y - g) * w;
        let rhs = t * (y - g) * (y - g) * qq;
        Ok((dg * dg_hat - rhs).norm() / (1.0 + rhs.norm()))
    })?;
    let defect = ResidualReport::from_values(
        "holomorphic riccati defect",
        ResidualClass::Algebraic,
        grid.spacing(),
        defect.values,
    );
    Ok(RiccatiSolution {
        g_hat,
        reports: vec![inconsistency, defect],
    })
}

/// Transformed data `(ĝ, ω̂)` with `ω̂ = dg / (2t (ĝ - g)²)`.
#[derive(Debug, Clone)]
pub struct DualData {
    pub g_hat: SampledField<Complex64>,
    /// `ŵ` in `ω̂ = ŵ dz`.
    pub w_hat: SampledField<Complex64>,
    /// Relative deviation of `q̂ = 2 ω̂ dĝ` from `q`.
    pub report: ResidualReport,
}

/// Relative threshold on `|ĝ - g|`.
pub const SINGULAR_EPS: f64 = 1e-8;

pub fn dual_data(
    data: &WeierstrassData,
    g_hat: &SampledField<Complex64>,
    t: f64,
) -> Result<DualData> {
    let grid = g_hat.grid;
    let parts = SampledField::try_from_fn(grid, |p, q| {
        let z = grid.z(p, q);
        let y = *g_hat.at(p, q);
        let (g, w, dg, qq) = at_node(
            grid,
            p,
            q,
            (|| Ok((data.g.eval(z)?, data.w(z)?, data.dg.eval(z)?, data.q(z)?)))(),
        )?;
        let diff = y - g;
        if !(diff.norm() > SINGULAR_EPS * (1.0 + g.norm())) {
            return Err(Error::SingularData {
                node: grid.node(p, q),
            });
        }
        let w_hat = dg / (2.0 * t * diff * diff);
        let dg_hat = 2.0 * t * diff * diff * w;
        let q_hat = 2.0 * w_hat * dg_hat;
        let rel = (q_hat - qq).norm() / qq.norm().max(f64::MIN_POSITIVE);
        Ok((w_hat, rel))
    })?;
    let report = ResidualReport::from_values(
        "q invariance",
        ResidualClass::Algebraic,
        grid.spacing(),
        parts.values.iter().map(|x| x.1).collect::<Vec<_>>(),
    );
    Ok(DualData {
        g_hat: g_hat.clone(),
        w_hat: parts.map(|x| x.0),
        report,
    })
}

/// A minimal surface and its Darboux transform through the Gauss maps.
#[derive(Debug, Clone)]
pub struct MinimalPair {
    pub t: f64,
    pub f: Patch,
    /// `f̂ = f + (1/t)(n̂ - n)⁻¹`.
    pub f_hat: SampledField<ImPoint>,
    pub n: SampledField<ImPoint>,
    pub n_hat: SampledField<ImPoint>,
    pub g_hat: SampledField<Complex64>,
    pub w_hat: SampledField<Complex64>,
    pub reports: Vec<ResidualReport>,
}

/// Builds the minimal Darboux pair from data `(g, h)`, spectral parameter
/// `t` and `ĝ(z_0) = g_hat_seed`.
///
/// Besides the Riccati and data diagnostics it reports the Riccati defect
/// of `f̂` with dual `n`, the residual of `⟨f̂ - f, n⟩ = H*/(2t)` with `H*`
/// the mean curvature of the Gauss map, the translation deviation of the
/// surface rebuilt from `(ĝ, ω̂)`, and the general lemma residual.
pub fn minimal_darboux_pair(
    data: &WeierstrassData,
    grid: ConformalGrid,
    t: f64,
    g_hat_seed: Complex64,
    base: ImPoint,
) -> Result<MinimalPair> {
    let (f, surface_reports) = weierstrass_surface(data, grid, base)?;
    let mut reports: Vec<_> = surface_reports
        .into_iter()
        .map(|r| prefixed("surface", r))
        .collect();
    let riccati = holomorphic_riccati(data, grid, t, g_hat_seed)?;
    reports.extend(riccati.reports);
    let dual = dual_data(data, &riccati.g_hat, t)?;
    reports.push(dual.report.clone());

    let g = SampledField::try_from_fn(grid, |p, q| at_node(grid, p, q, data.g.eval(grid.z(p, q))))?;
    let n = g.map(|g| gauss_map(*g));
    let n_hat = dual.g_hat.map(|g| gauss_map(*g));
    let f_hat = SampledField::try_from_fn(grid, |p, q| {
        let d = *n_hat.at(p, q) - *n.at(p, q);
        if !(d.norm() > SINGULAR_EPS) {
            return Err(Error::SingularData {
                node: grid.node(p, q),
            });
        }
        Ok(*f.pos.at(p, q) + d.inverse()? * (1.0 / t))
    })?;

    reports.push(
        riccati_defect(&f_hat, &f.pos, &OneForm::differential(&n), t)?
            .renamed("gauss map riccati defect"),
    );

    let sphere = shape_analysis(&n)?;
    let offsets = (0..grid.len()).map(|i| {
        let normal = n.values[i];
        let s = &sphere.nodes.values[i];
        let h_star = if s.normal.dot(normal) <= 0.0 {
            s.mean
        } else {
            -s.mean
        };
        (f_hat.values[i] - f.pos.values[i]).dot(normal) - h_star / (2.0 * t)
    });
    reports.push(ResidualReport::from_values(
        "normal offset",
        ResidualClass::Fd,
        grid.spacing(),
        offsets.collect::<Vec<_>>(),
    ));

    let (rebuilt, _) = weierstrass_from_fields(&dual.g_hat, &dual.w_hat, ImPoint::ZERO)?;
    let (_, deviation) = translation_constancy(&f_hat, &rebuilt.pos)?;
    let diff = f_hat.zip_map(&rebuilt.pos, |a, b| *a - *b)?;
    let mean = diff.values.iter().fold(ImPoint::ZERO, |acc, d| acc + *d) / diff.values.len() as f64;
    let rebuilt_report = ResidualReport::from_values(
        "rebuilt transform",
        ResidualClass::Fd,
        grid.spacing(),
        diff.values
            .iter()
            .map(|d| (*d - mean).norm())
            .collect::<Vec<_>>(),
    );
    debug_assert_eq!(rebuilt_report.max, deviation);
    reports.push(rebuilt_report);

    reports.push(lemma_residual(&f.pos, &n, &f_hat, t)?);

    Ok(MinimalPair {
        t,
        f,
        f_hat,
        n,
        n_hat,
        g_hat: dual.g_hat,
        w_hat: dual.w_hat,
        reports,
    })
}

/// Checks the planar Christoffel pair `(h j, -j g)`: its quadratic
/// differential products against `q = h' g'`, relative to `|q|`.
pub fn degenerate_pair_residual(
    data: &WeierstrassData,
    grid: ConformalGrid,
) -> Result<ResidualReport> {
    let hj = SampledField::try_from_fn(grid, |p, q| {
        Ok(complex_times_j(at_node(
            grid,
            p,
            q,
            data.h.eval(grid.z(p, q)),
        )?))
    })?;
    let jg = SampledField::try_from_fn(grid, |p, q| {
        Ok(-j_times_complex(at_node(
            grid,
            p,
            q,
            data.g.eval(grid.z(p, q)),
        )?))
    })?;
    let (a, b) = (OneForm::differential(&hj), OneForm::differential(&jg));
    let values = SampledField::try_from_fn(grid, |p, q| {
        let i = grid.index(p, q);
        let qq = at_node(grid, p, q, data.q(grid.z(p, q)))?;
        let q4 = crate::quat::Quaternion::from_complex(qq);
        let (au, av, bu, bv) = (
            a.du.values[i].quat(),
            a.dv.values[i].quat(),
            b.du.values[i].quat(),
            b.dv.values[i].quat(),
        );
        let uu = (au * bu - q4).norm();
        let vv = (av * bv + q4).norm();
        let mixed =
            (au * bv + av * bu - crate::quat::Quaternion::from_complex(2.0 * I * qq)).norm();
        Ok(uu.max(vv).max(mixed) / qq.norm().max(f64::MIN_POSITIVE))
    })?;
    Ok(ResidualReport::from_values(
        "degenerate pair",
        ResidualClass::Fd,
        grid.spacing(),
        values.values,
    ))
}
