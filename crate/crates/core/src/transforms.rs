//! Christoffel, Goursat and Darboux transformations of sampled isothermic
//! patches.

use crate::error::{Error, Result};
use crate::grid::{
    edge_midpoint, integrate_along_paths, integrate_one_form_cubic, partial, rk4_step,
    shape_analysis, Axis, Edge, OneForm, PathOrder, SampledField, Stage,
};
use crate::quat::{ImPoint, MobiusMap};
use crate::report::{ResidualClass, ResidualReport};
use crate::surface::Patch;

/// Relative threshold on the conformal factor `E` against its grid median.
pub const METRIC_EPS: f64 = 1e-12;
/// Magnitude beyond which a Riccati solution counts as escaped.
pub const ESCAPE_BOUND: f64 = 1e8;
/// Relative threshold for `|f̂ - f|` against the patch scale.
pub const COINCIDENCE_EPS: f64 = 1e-10;

/// A transformed patch together with its diagnostics.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub patch: Patch,
    pub reports: Vec<ResidualReport>,
}

impl Transformed {
    pub fn report(&self, name: &str) -> Option<&ResidualReport> {
        self.reports.iter().find(|r| r.name == name)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// `df* = -(1/E)(f_u du - f_v dv)` with `E = (|f_u|² + |f_v|²) / 2`.
pub fn christoffel_form(f: &Patch) -> Result<OneForm<ImPoint>> {
    let grid = f.grid();
    let metric: Vec<f64> =
        f.d.du
            .values
            .iter()
            .zip(&f.d.dv.values)
            .map(|(a, b)| 0.5 * (a.norm_sq() + b.norm_sq()))
            .collect();
    let floor = METRIC_EPS * median(metric.clone());
    if let Some(i) = metric.iter().position(|e| !(*e > floor) || !e.is_finite()) {
        return Err(Error::DegenerateMetric {
            node: grid.node_at(i),
        });
    }
    let du = f.d.du.try_map(|i, a| Ok(*a * (-1.0 / metric[i])))?;
    let dv = f.d.dv.try_map(|i, b| Ok(*b * (1.0 / metric[i])))?;
    OneForm::new(du, dv)
}

/// Christoffel dual anchored at `base` on node `(0, 0)`.
///
/// Reports the closedness of the dual form, the path dependence of its
/// integration, and conformality and curvature-line defects of the input.
pub fn christoffel_dual(f: &Patch, base: ImPoint) -> Result<Transformed> {
    let form = christoffel_form(f)?;
    let integrated = integrate_one_form_cubic(&form, base);
    let mut reports = vec![integrated.closedness, integrated.path_dependence];
    if let Ok(shape) = shape_analysis(&f.pos) {
        reports.push(shape.conformality_report());
        reports.push(shape.curvature_line_report());
    }
    Ok(Transformed {
        patch: Patch::new(integrated.field, form)?,
        reports,
    })
}

/// Residuals of the Christoffel pairing identities for `f` and a dual
/// `f*` scaled by `scale`, from central differences of both samples:
/// `f_u f*_u = scale`, `f_v f*_v = -scale`, `f_u f*_v + f_v f*_u = 2 scale n`.
pub fn christoffel_pairing(
    f: &SampledField<ImPoint>,
    f_star: &SampledField<ImPoint>,
    scale: f64,
) -> Result<ResidualReport> {
    crate::grid::ensure_same_grid(&f.grid, &f_star.grid)?;
    let grid = f.grid;
    let (fu, fv) = (partial(f, Axis::U), partial(f, Axis::V));
    let (su, sv) = (partial(f_star, Axis::U), partial(f_star, Axis::V));
    let values = SampledField::try_from_fn(grid, |p, q| {
        let i = grid.index(p, q);
        let (a, b, c, d) = (fu.values[i], fv.values[i], su.values[i], sv.values[i]);
        let cross = a.cross(b);
        if cross.norm() == 0.0 {
            return Err(Error::DegenerateNode {
                node: grid.node(p, q),
            });
        }
        let n = cross / cross.norm();
        let uu = a.quat() * c.quat();
        let vv = b.quat() * d.quat();
        let mixed = a.quat() * d.quat() + b.quat() * c.quat();
        let defect = (uu.scalar() - scale)
            .abs()
            .max((vv.scalar() + scale).abs())
            .max(uu.vector().norm())
            .max(vv.vector().norm())
            .max((mixed - (n * (2.0 * scale)).quat()).norm());
        Ok(defect)
    })?;
    Ok(ResidualReport::from_values(
        "christoffel pairing",
        ResidualClass::Fd,
        grid.spacing(),
        values.values,
    ))
}

/// `scalar(f_u f*_u)` at node `(0, 0)`, the constant relating `f*` to the
/// normalized dual.
pub fn pairing_scale(f: &Patch, f_star: &Patch) -> f64 {
    (f.d.du.values[0].quat() * f_star.d.du.values[0].quat()).scalar()
}

/// Goursat transform `(μ ∘ f*)*` of `f`; the intermediate dual is anchored
/// at `dual_base`, the result at `base`.
pub fn goursat(
    f: &Patch,
    mu: &MobiusMap,
    dual_base: ImPoint,
    base: ImPoint,
) -> Result<Transformed> {
    let dual = christoffel_dual(f, dual_base)?;
    let mut out = goursat_from_dual(&dual.patch, mu, base)?;
    let mut reports: Vec<_> = dual
        .reports
        .into_iter()
        .map(|r| prefixed("dual", r))
        .collect();
    reports.append(&mut out.reports);
    out.reports = reports;
    Ok(out)
}

/// `(μ ∘ f*)*` for an already computed dual.
pub fn goursat_from_dual(f_star: &Patch, mu: &MobiusMap, base: ImPoint) -> Result<Transformed> {
    let image = f_star.mobius(mu)?;
    let out = christoffel_dual(&image, base)?;
    let reports = out
        .reports
        .into_iter()
        .map(|r| prefixed("goursat", r))
        .collect();
    Ok(Transformed {
        patch: out.patch,
        reports,
    })
}

pub(crate) fn prefixed(prefix: &str, r: ResidualReport) -> ResidualReport {
    let name = format!("{prefix}: {}", r.name);
    r.renamed(name)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxParams {
    pub t: f64,
    /// Value of `f̂` at node `(0, 0)`.
    pub seed: ImPoint,
}

impl DarbouxParams {
    pub fn new(t: f64, seed: ImPoint) -> Result<Self> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spectral parameter must be finite and nonzero, got {t}"
            )));
        }
        if !seed.is_finite() {
            return Err(Error::InvalidParameter("seed must be finite".into()));
        }
        Ok(Self { t, seed })
    }
}

fn riccati_rhs(t: f64, y: ImPoint, f: ImPoint, w: ImPoint) -> ImPoint {
    let a = y - f;
    ImPoint::sandwich(a, w, a) * t
}

fn darboux_paths(
    f: &Patch,
    dual: &OneForm<ImPoint>,
    p: DarbouxParams,
    order: PathOrder,
) -> Result<Vec<ImPoint>> {
    let grid = f.grid();
    integrate_along_paths(grid, p.seed, order, |edge: Edge, y: ImPoint| {
        let (p1, q1) = edge.end();
        let w = dual.component(edge.axis);
        let at = |stage| match stage {
            Stage::Start => (*f.pos.at(edge.p, edge.q), *w.at(edge.p, edge.q)),
            Stage::Mid => (edge_midpoint(&f.pos, edge), edge_midpoint(w, edge)),
            Stage::End => (*f.pos.at(p1, q1), *w.at(p1, q1)),
        };
        let next = rk4_step(y, grid.step(edge.axis), |stage, y| {
            let (fx, wx) = at(stage);
            riccati_rhs(p.t, y, fx, wx)
        });
        if !next.is_finite() || next.norm() > ESCAPE_BOUND {
            return Err(Error::SolutionEscape {
                node: grid.node(p1, q1),
            });
        }
        Ok(next)
    })
}

/// Darboux transform `f̂` of `f` with respect to the dual form `df*`:
/// `df̂ = t (f̂ - f) df* (f̂ - f)`, integrated edge by edge with RK4.
///
/// Reports the rows-first versus columns-first disagreement ("plaquette
/// inconsistency") and the Riccati defect of the sampled solution.
pub fn darboux_transform(
    f: &Patch,
    dual: &OneForm<ImPoint>,
    params: DarbouxParams,
) -> Result<Transformed> {
    let grid = f.grid();
    crate::grid::ensure_same_grid(&grid, &dual.grid())?;
    let rows = darboux_paths(f, dual, params, PathOrder::RowsFirst)?;
    let cols = darboux_paths(f, dual, params, PathOrder::ColumnsFirst)?;
    let inconsistency = ResidualReport::from_values(
        "plaquette inconsistency",
        ResidualClass::Ode,
        grid.spacing(),
        rows.iter()
            .zip(&cols)
            .map(|(a, b)| (*a - *b).norm())
            .collect::<Vec<_>>(),
    );
    let pos = SampledField::new(grid, rows)?;
    let tangent = |axis: Axis| {
        let w = dual.component(axis);
        SampledField::from_fn(grid, |p, q| {
            riccati_rhs(params.t, *pos.at(p, q), *f.pos.at(p, q), *w.at(p, q))
        })
    };
    let d = OneForm::new(tangent(Axis::U), tangent(Axis::V))?;
    let defect = riccati_defect(&pos, &f.pos, dual, params.t)?;
    Ok(Transformed {
        patch: Patch::new(pos, d)?,
        reports: vec![inconsistency, defect],
    })
}

/// `|∂f̂ - t (f̂ - f) f*_∂ (f̂ - f)|` over both directions, with `∂f̂` from
/// central differences.
pub fn riccati_defect(
    f_hat: &SampledField<ImPoint>,
    f: &SampledField<ImPoint>,
    dual: &OneForm<ImPoint>,
    t: f64,
) -> Result<ResidualReport> {
    crate::grid::ensure_same_grid(&f_hat.grid, &f.grid)?;
    let grid = f.grid;
    let (du, dv) = (partial(f_hat, Axis::U), partial(f_hat, Axis::V));
    let values = (0..grid.len()).map(|i| {
        let y = f_hat.values[i];
        let x = f.values[i];
        let eu = du.values[i] - riccati_rhs(t, y, x, dual.du.values[i]);
        let ev = dv.values[i] - riccati_rhs(t, y, x, dual.dv.values[i]);
        eu.norm().max(ev.norm())
    });
    Ok(ResidualReport::from_values(
        "riccati defect",
        ResidualClass::Fd,
        grid.spacing(),
        values.collect::<Vec<_>>(),
    ))
}

/// Largest position magnitude, floored at one.
pub(crate) fn patch_scale(f: &SampledField<ImPoint>) -> f64 {
    f.values.iter().map(|x| x.norm()).fold(1.0, f64::max)
}

/// Dual of a Darboux transform from the Bianchi permutability formula
/// `f̂* = f* + (1/t)(f̂ - f)⁻¹`, with its tangent form by the chain rule.
pub fn bianchi_dual(f: &Patch, f_star: &Patch, f_hat: &Patch, t: f64) -> Result<Patch> {
    let grid = f.grid();
    crate::grid::ensure_same_grid(&grid, &f_star.grid())?;
    crate::grid::ensure_same_grid(&grid, &f_hat.grid())?;
    if t == 0.0 {
        return Err(Error::InvalidParameter(
            "spectral parameter must be nonzero".into(),
        ));
    }
    let eps = COINCIDENCE_EPS * patch_scale(&f.pos);
    let inv = SampledField::try_from_fn(grid, |p, q| {
        let a = *f_hat.pos.at(p, q) - *f.pos.at(p, q);
        if !(a.norm() > eps) {
            return Err(Error::Coincidence {
                node: grid.node(p, q),
            });
        }
        a.inverse()
    })?;
    let pos = SampledField::from_fn(grid, |p, q| {
        *f_star.pos.at(p, q) + *inv.at(p, q) * (1.0 / t)
    });
    let tangent = |axis: Axis| {
        let (ds, dh, df) = (
            f_star.d.component(axis),
            f_hat.d.component(axis),
            f.d.component(axis),
        );
        SampledField::from_fn(grid, |p, q| {
            let b = *inv.at(p, q);
            *ds.at(p, q) - ImPoint::sandwich(b, *dh.at(p, q) - *df.at(p, q), b) * (1.0 / t)
        })
    };
    Patch::new(
        pos.clone(),
        OneForm::new(tangent(Axis::U), tangent(Axis::V))?,
    )
}
