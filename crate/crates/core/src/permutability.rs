//! Numerical verification of the Bianchi permutability diagram, the
//! Goursat–Darboux permutability and the mean-curvature lemma for Darboux
//! pairs.

use crate::error::{Error, Result};
use crate::grid::{shape_analysis, ConformalGrid, SampledField};
use crate::quat::{ImPoint, MobiusMap};
use crate::report::{ResidualClass, ResidualReport};
use crate::surface::Patch;
use crate::transforms::{
    bianchi_dual, christoffel_dual, christoffel_pairing, darboux_transform, pairing_scale,
    patch_scale, prefixed, riccati_defect, DarbouxParams, COINCIDENCE_EPS,
};

/// Mean of `a - b` and the largest deviation of `a - b` from that mean.
pub fn translation_constancy(
    a: &SampledField<ImPoint>,
    b: &SampledField<ImPoint>,
) -> Result<(ImPoint, f64)> {
    let r = translation_report("translation", a, b)?;
    Ok((r.1, r.0.max))
}

fn translation_report(
    name: &str,
    a: &SampledField<ImPoint>,
    b: &SampledField<ImPoint>,
) -> Result<(ResidualReport, ImPoint)> {
    let diff = a.zip_map(b, |x, y| *x - *y)?;
    let n = diff.values.len() as f64;
    let mean = diff.values.iter().fold(ImPoint::ZERO, |acc, d| acc + *d) / n;
    let report = ResidualReport::from_values(
        name,
        ResidualClass::Fd,
        a.grid.spacing(),
        diff.values
            .iter()
            .map(|d| (*d - mean).norm())
            .collect::<Vec<_>>(),
    );
    Ok((report, mean))
}

/// Arrow residuals of a commuting diagram and its closing translation.
#[derive(Debug, Clone)]
pub struct DiagramReport {
    pub arrows: Vec<ResidualReport>,
    /// Mean offset between the two constructions of the closing corner.
    pub translation: ImPoint,
    /// Largest deviation from a pure translation across the closing corner.
    pub deviation: f64,
    /// Intermediate surfaces by name.
    pub surfaces: Vec<(String, SampledField<ImPoint>)>,
}

impl DiagramReport {
    pub fn arrow(&self, name: &str) -> Option<&ResidualReport> {
        self.arrows.iter().find(|r| r.name == name)
    }
}

/// Builds `f̂ = D_t f` from `seed` and checks the Bianchi permutability
/// diagram: `f̂* = f* + (1/t)(f̂ - f)⁻¹` must be a dual of `f̂`
/// ("pairing"), a Darboux transform of `f*` ("dual riccati defect"), and a
/// translate of the integrated dual of `f̂` ("diagram deviation").
///
/// Without `f_star` the normalized dual anchored at the origin is used;
/// otherwise the scale of the given dual is read off at node `(0, 0)`.
pub fn verify_bianchi(
    f: &Patch,
    f_star: Option<&Patch>,
    t: f64,
    seed: ImPoint,
) -> Result<DiagramReport> {
    let params = DarbouxParams::new(t, seed)?;
    let f_star = match f_star {
        Some(d) => d.clone(),
        None => christoffel_dual(f, ImPoint::ZERO)?.patch,
    };
    let scale = pairing_scale(f, &f_star);
    let f_hat = darboux_transform(f, &f_star.d, params)?;
    let mut arrows: Vec<_> = f_hat
        .reports
        .iter()
        .cloned()
        .map(|r| prefixed("darboux", r))
        .collect();
    let f_hat_star = bianchi_dual(f, &f_star, &f_hat.patch, t)?;

    arrows.push(christoffel_pairing(&f_hat.patch.pos, &f_hat_star.pos, scale)?.renamed("pairing"));
    arrows.push(
        riccati_defect(&f_hat_star.pos, &f_star.pos, &f.d, t)?.renamed("dual riccati defect"),
    );

    let dual_hat = christoffel_dual(&f_hat.patch, ImPoint::ZERO)?;
    arrows.extend(
        dual_hat
            .reports
            .into_iter()
            .map(|r| prefixed("dual of darboux", r)),
    );
    let dual_hat = dual_hat.patch.scaled(scale);
    let (deviation, translation) =
        translation_report("diagram deviation", &f_hat_star.pos, &dual_hat.pos)?;

    // D_t f̂ with respect to f̂* returns to f
    let back = darboux_transform(
        &f_hat.patch,
        &f_hat_star.d,
        DarbouxParams::new(t, f.origin())?,
    )?;
    arrows.push(ResidualReport::from_values(
        "involution",
        ResidualClass::Ode,
        f.grid().spacing(),
        back.patch
            .pos
            .values
            .iter()
            .zip(&f.pos.values)
            .map(|(a, b)| (*a - *b).norm())
            .collect::<Vec<_>>(),
    ));

    let max = deviation.max;
    arrows.push(deviation);
    let surfaces = vec![
        ("dual".to_string(), f_star.pos),
        ("darboux".to_string(), f_hat.patch.pos),
        ("bianchi dual".to_string(), f_hat_star.pos),
    ];
    Ok(DiagramReport {
        arrows,
        translation,
        deviation: max,
        surfaces,
    })
}

/// `gd = G_μ f + (1/t)(μ∘f̂* - μ∘f*)⁻¹`, the Darboux transform of the
/// Goursat transform predicted by permutability.
pub fn gd_transform(
    goursat: &SampledField<ImPoint>,
    mu_f_star: &SampledField<ImPoint>,
    mu_f_hat_star: &SampledField<ImPoint>,
    t: f64,
) -> Result<SampledField<ImPoint>> {
    crate::grid::ensure_same_grid(&goursat.grid, &mu_f_star.grid)?;
    crate::grid::ensure_same_grid(&goursat.grid, &mu_f_hat_star.grid)?;
    if t == 0.0 {
        return Err(Error::InvalidParameter(
            "spectral parameter must be nonzero".into(),
        ));
    }
    let grid = goursat.grid;
    let eps = COINCIDENCE_EPS * patch_scale(mu_f_star);
    SampledField::try_from_fn(grid, |p, q| {
        let a = *mu_f_hat_star.at(p, q) - *mu_f_star.at(p, q);
        if !(a.norm() > eps) {
            return Err(Error::Coincidence {
                node: grid.node(p, q),
            });
        }
        Ok(*goursat.at(p, q) + a.inverse()? * (1.0 / t))
    })
}

fn distance_report(
    name: &str,
    class: ResidualClass,
    a: &SampledField<ImPoint>,
    b: &SampledField<ImPoint>,
) -> ResidualReport {
    ResidualReport::from_values(
        name,
        class,
        a.grid.spacing(),
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (*x - *y).norm())
            .collect::<Vec<_>>(),
    )
}

/// Checks that Goursat and Darboux transformations permute.
///
/// With `f* = C f` anchored at `dual_base`, `f̂ = D_t f` from `seed` and
/// `f̂*` from the Bianchi formula, `gd_transform` is compared with
/// `D_t(G_μ f)` ("gd vs darboux of goursat") and with `(μ∘f̂*)*`
/// ("gd vs goursat of darboux"), both up to translation. The arrow
/// "mobius invariance" compares `D_t(μ∘f*)` with `μ∘D_t(f*)`.
pub fn verify_main_theorem(
    f: &Patch,
    mu: &MobiusMap,
    t: f64,
    seed: ImPoint,
    dual_base: ImPoint,
) -> Result<DiagramReport> {
    let params = DarbouxParams::new(t, seed)?;
    let f_star = christoffel_dual(f, dual_base)?;
    let mut arrows: Vec<_> = f_star
        .reports
        .iter()
        .cloned()
        .map(|r| prefixed("dual", r))
        .collect();
    let f_star = f_star.patch;
    let mu_f_star = f_star.mobius(mu)?;
    let goursat = christoffel_dual(&mu_f_star, ImPoint::ZERO)?;
    arrows.extend(
        goursat
            .reports
            .iter()
            .cloned()
            .map(|r| prefixed("goursat", r)),
    );
    let goursat = goursat.patch;

    let f_hat = darboux_transform(f, &f_star.d, params)?;
    arrows.extend(
        f_hat
            .reports
            .iter()
            .cloned()
            .map(|r| prefixed("darboux", r)),
    );
    let f_hat = f_hat.patch;
    let f_hat_star = bianchi_dual(f, &f_star, &f_hat, t)?;
    let mu_f_hat_star = f_hat_star.mobius(mu)?;

    // Möbius invariance of the Darboux transformation, applied to f*
    let direct = darboux_transform(&f_star, &f.d, DarbouxParams::new(t, f_hat_star.origin())?)?;
    let pushed = direct.patch.mobius(mu)?;
    let after = darboux_transform(
        &mu_f_star,
        &goursat.d,
        DarbouxParams::new(t, pushed.origin())?,
    )?;
    arrows.push(distance_report(
        "mobius invariance",
        ResidualClass::Ode,
        &after.patch.pos,
        &pushed.pos,
    ));

    let gd = gd_transform(&goursat.pos, &mu_f_star.pos, &mu_f_hat_star.pos, t)?;
    let dg = darboux_transform(&goursat, &mu_f_star.d, DarbouxParams::new(t, *gd.at(0, 0))?)?;
    arrows.extend(
        dg.reports
            .iter()
            .cloned()
            .map(|r| prefixed("darboux of goursat", r)),
    );
    let (first, _) = translation_report("gd vs darboux of goursat", &gd, &dg.patch.pos)?;

    let gd_dual = christoffel_dual(&mu_f_hat_star, ImPoint::ZERO)?;
    arrows.extend(
        gd_dual
            .reports
            .iter()
            .cloned()
            .map(|r| prefixed("goursat of darboux", r)),
    );
    let (second, translation) =
        translation_report("gd vs goursat of darboux", &gd, &gd_dual.patch.pos)?;

    let deviation = first.max.max(second.max);
    arrows.push(first);
    arrows.push(second);
    let surfaces = vec![
        ("dual".to_string(), f_star.pos),
        ("goursat".to_string(), goursat.pos),
        ("darboux".to_string(), f_hat.pos),
        ("gd".to_string(), gd),
    ];
    Ok(DiagramReport {
        arrows,
        translation,
        deviation,
        surfaces,
    })
}

/// Residual of `Ĥ |f̂ - f|² - 2 ⟨f̂ - f, n⟩ + H*/t = 0` for a Darboux pair
/// `(f, f̂)` with dual `f*`.
///
/// Curvatures come from shape analysis of the samples. The mean curvature
/// of `f*` is taken with respect to `-n`, that of `f̂` with respect to
/// `n̂ = -(f̂ - f)⁻¹ n (f̂ - f)`; a node whose coordinate normal points the
/// other way contributes the negated value.
pub fn lemma_residual(
    f: &SampledField<ImPoint>,
    f_star: &SampledField<ImPoint>,
    f_hat: &SampledField<ImPoint>,
    t: f64,
) -> Result<ResidualReport> {
    let shape = shape_analysis(f)?;
    let dual = shape_analysis(f_star)?;
    let hat = shape_analysis(f_hat)?;
    let grid: ConformalGrid = f.grid;
    let values = (0..grid.len()).map(|i| {
        let n = shape.nodes.values[i].normal;
        let a = f_hat.values[i] - f.values[i];
        let n_hat = n - a * (2.0 * a.dot(n) / a.norm_sq());
        let d = &dual.nodes.values[i];
        let h_star = if d.normal.dot(n) <= 0.0 {
            d.mean
        } else {
            -d.mean
        };
        let s = &hat.nodes.values[i];
        let h_hat = if s.normal.dot(n_hat) >= 0.0 {
            s.mean
        } else {
            -s.mean
        };
        h_hat * a.norm_sq() - 2.0 * a.dot(n) + h_star / t
    });
    Ok(ResidualReport::from_values(
        "lemma",
        ResidualClass::Fd,
        grid.spacing(),
        values.collect::<Vec<_>>(),
    ))
}
