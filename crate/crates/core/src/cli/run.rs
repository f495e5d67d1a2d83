//! Pipeline orchestration: one configured transform over one or more grid
//! levels, judged against tolerances and written to disk.

use std::path::Path;

use num_complex::Complex64;

use super::config::{complex, point, RunConfig, SurfaceSource, TransformSpec};
use super::export::{export_obj, write_report_csv, Judged};
use crate::curved_flat::{
    curved_flat_residual, frame, integrating_factors, write_pair_csv, write_pair_obj, PairData,
};
use crate::error::Result;
use crate::grid::{sample, ConformalGrid, SampledField};
use crate::permutability::{
    translation_constancy, verify_bianchi, verify_main_theorem, DiagramReport,
};
use crate::quat::ImPoint;
use crate::report::{attach_orders, ResidualClass, ResidualReport};
use crate::surface::Patch;
use crate::transforms::{
    christoffel_dual, christoffel_pairing, darboux_transform, goursat, prefixed, DarbouxParams,
};
use crate::weierstrass::{minimal_darboux_pair, weierstrass_surface, WeierstrassData};

/// Everything a pipeline produced on one grid.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub surfaces: Vec<(String, SampledField<ImPoint>)>,
    pub fields: Vec<(String, SampledField<Complex64>)>,
    /// Gauss maps `(n, n̂)` of a minimal pair.
    pub gauss_pair: Option<(SampledField<ImPoint>, SampledField<ImPoint>)>,
    pub reports: Vec<ResidualReport>,
}

impl Outcome {
    pub fn surface(&self, name: &str) -> Option<&SampledField<ImPoint>> {
        self.surfaces.iter().find(|s| s.0 == name).map(|s| &s.1)
    }

    pub fn field(&self, name: &str) -> Option<&SampledField<Complex64>> {
        self.fields.iter().find(|s| s.0 == name).map(|s| &s.1)
    }

    fn add_diagram(&mut self, d: DiagramReport) {
        self.reports.extend(d.arrows);
        self.surfaces.extend(d.surfaces);
    }
}

fn source(
    config: &RunConfig,
    grid: ConformalGrid,
) -> Result<(Patch, Vec<ResidualReport>, Option<WeierstrassData>)> {
    match config.surface.resolve()? {
        SurfaceSource::Catalog(s) => Ok((s.sample(grid), Vec::new(), None)),
        SurfaceSource::Weierstrass(data) => {
            let (patch, reports) = weierstrass_surface(&data, grid, ImPoint::ZERO)?;
            Ok((patch, reports, Some(data)))
        }
    }
}

/// Runs the configured pipeline on `grid`.
pub fn execute(config: &RunConfig, grid: ConformalGrid) -> Result<Outcome> {
    let (f, surface_reports, data) = source(config, grid)?;
    let mut out = Outcome {
        reports: surface_reports
            .into_iter()
            .map(|r| prefixed("surface", r))
            .collect(),
        ..Outcome::default()
    };
    out.surfaces.push(("surface".into(), f.pos.clone()));
    match &config.transform {
        TransformSpec::Christoffel => {
            let dual = christoffel_dual(&f, ImPoint::ZERO)?;
            out.reports
                .extend(dual.reports.iter().cloned().map(|r| prefixed("dual", r)));
            out.reports
                .push(christoffel_pairing(&f.pos, &dual.patch.pos, 1.0)?);
            let back = christoffel_dual(&dual.patch, ImPoint::ZERO)?;
            let (_, deviation) = translation_constancy(&back.patch.pos, &f.pos)?;
            out.reports.push(ResidualReport::single(
                "involution",
                ResidualClass::Fd,
                grid.spacing(),
                deviation,
            ));
            out.surfaces.push(("dual".into(), dual.patch.pos));
        }
        TransformSpec::Goursat(spec) => {
            let g = goursat(
                &f,
                &spec.mobius.map()?,
                point(spec.dual_base),
                ImPoint::ZERO,
            )?;
            out.reports.extend(g.reports);
            out.surfaces.push(("goursat".into(), g.patch.pos));
        }
        TransformSpec::Darboux(spec) => {
            let dual = christoffel_dual(&f, ImPoint::ZERO)?;
            out.reports
                .extend(dual.reports.iter().cloned().map(|r| prefixed("dual", r)));
            let d = darboux_transform(
                &f,
                &dual.patch.d,
                DarbouxParams::new(spec.t, point(spec.seed))?,
            )?;
            out.reports
                .extend(d.reports.into_iter().map(|r| prefixed("darboux", r)));
            out.surfaces.push(("dual".into(), dual.patch.pos));
            out.surfaces.push(("darboux".into(), d.patch.pos));
        }
        TransformSpec::MinimalDarboux(spec) => {
            let data = data.expect("validated: Weierstrass surface");
            let pair =
                minimal_darboux_pair(&data, grid, spec.t, complex(spec.g_hat_seed), ImPoint::ZERO)?;
            out.reports = pair.reports;
            out.surfaces.push(("darboux".into(), pair.f_hat));
            out.fields.push(("g_hat".into(), pair.g_hat));
            out.fields.push(("w_hat".into(), pair.w_hat));
            out.gauss_pair = Some((pair.n, pair.n_hat));
        }
        TransformSpec::VerifyBianchi(spec) => {
            out.add_diagram(verify_bianchi(&f, None, spec.t, point(spec.seed))?);
        }
        TransformSpec::VerifyMain(spec) => {
            let mu = spec.mobius.map()?;
            out.add_diagram(verify_main_theorem(
                &f,
                &mu,
                spec.t,
                point(spec.seed),
                point(spec.dual_base),
            )?);
        }
        TransformSpec::CurvedFlat(spec) => {
            let data = data.expect("validated: Weierstrass surface");
            let pair =
                minimal_darboux_pair(&data, grid, spec.t, complex(spec.g_hat_seed), ImPoint::ZERO)?;
            let g = sample(&data.g, grid)?;
            let w = sample(&data.dh, grid)?.map(|x| *x * 0.5);
            let pair_data = PairData::new(g, pair.g_hat.clone(), w, pair.w_hat.clone(), spec.t)?;
            let factors = integrating_factors(&pair_data, complex(spec.a0), complex(spec.a_hat0))?;
            let phi = frame(&pair_data, &factors)?;
            out.reports = pair
                .reports
                .into_iter()
                .map(|r| prefixed("pair", r))
                .collect();
            out.reports.extend(factors.reports.iter().cloned());
            out.reports
                .extend(curved_flat_residual(&pair_data, &factors, &phi)?);
            out.surfaces.push(("darboux".into(), pair.f_hat));
            out.fields.push(("g_hat".into(), pair.g_hat));
            out.fields.push(("a".into(), factors.a));
            out.fields.push(("a_hat".into(), factors.a_hat));
            out.gauss_pair = Some((pair.n, pair.n_hat));
        }
    }
    Ok(out)
}

/// Results of a run: the base-level outcome and its judged reports.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub rows: Vec<Judged>,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Judged::pass)
    }
}

/// Runs `execute` on the configured grid and `refine - 1` successive
/// halvings of its spacing; orders are estimated between the first two
/// levels. Extra `reports` computed by the caller from each level's outcome
/// take part in the same refinement.
pub fn run_levels<F>(config: &RunConfig, extra: F) -> Result<RunResult>
where
    F: Fn(&Outcome, ConformalGrid) -> Result<Vec<ResidualReport>>,
{
    let mut grid = config.grid.grid()?;
    let mut levels: Vec<(Outcome, Vec<ResidualReport>)> = Vec::new();
    for _ in 0..config.numeric.refine.max(1) {
        let outcome = execute(config, grid)?;
        let mut reports = outcome.reports.clone();
        reports.extend(extra(&outcome, grid)?);
        levels.push((outcome, reports));
        grid = grid.refined();
    }
    let mut levels = levels.into_iter();
    let (outcome, mut reports) = levels.next().expect("at least one level");
    if let Some((_, fine)) = levels.next() {
        attach_orders(&mut reports, &fine);
    }
    let tol = &config.numeric.tolerances;
    let rows = reports
        .into_iter()
        .map(|report| {
            let tolerance = tol.for_report(&report.name, report.class);
            Judged { report, tolerance }
        })
        .collect();
    Ok(RunResult { outcome, rows })
}

pub fn run(config: &RunConfig) -> Result<RunResult> {
    run_levels(config, |_, _| Ok(Vec::new()))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Writes OBJ meshes, the Gauss pair exports and the report CSV requested
/// by the output section of the config.
pub fn write_outputs(config: &RunConfig, result: &RunResult) -> Result<()> {
    if let Some(dir) = &config.output.obj_dir {
        std::fs::create_dir_all(dir)?;
        for (name, field) in &result.outcome.surfaces {
            export_obj(field, &dir.join(format!("{}.obj", file_stem(name))))?;
        }
        if let Some((n, n_hat)) = &result.outcome.gauss_pair {
            let mut csv = Vec::new();
            write_pair_csv(&mut csv, n, n_hat)?;
            std::fs::write(dir.join("gauss_pair.csv"), csv)?;
            let mut obj = Vec::new();
            write_pair_obj(&mut obj, n, n_hat)?;
            std::fs::write(dir.join("gauss_pair.obj"), obj)?;
        }
    }
    if let Some(path) = &config.output.csv {
        write_csv_file(path, &result.rows)?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[Judged]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut buf = Vec::new();
    write_report_csv(&mut buf, rows)?;
    std::fs::write(path, buf)?;
    Ok(())
}
