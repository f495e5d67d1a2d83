//! Acceptance criteria, one PASS/FAIL line each on stderr.

use isolab::cli::export::write_obj;
use isolab::cli::run::RunResult;
use isolab::cli::scenarios::{self, SCENARIOS};
use isolab::curved_flat::{curved_flat_residual, frame, integrating_factors, PairData};
use isolab::grid::{sample_map, SampledField};
use isolab::permutability::{translation_constancy, verify_bianchi, verify_main_theorem};
use isolab::transforms::christoffel_dual;
use isolab::weierstrass::{
    holomorphic_riccati, minimal_darboux_pair, weierstrass_surface, WeierstrassData,
};
use isolab::{
    CatalogSurface, ConformalGrid, ImPoint, MobiusMap, Patch, Quaternion, ResidualClass,
    ResidualReport,
};
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type ClosedForm = fn(f64, f64) -> ImPoint;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lift<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn sphere_grid(intervals: usize) -> ConformalGrid {
    ConformalGrid::square(0.2, 1.2, 0.2, 1.2, intervals).unwrap()
}

fn sphere_seed(offset: [f64; 3]) -> ImPoint {
    let (u, v) = (0.2f64, 0.2f64);
    ImPoint::new(u.cos() / v.cosh(), u.sin() / v.cosh(), v.tanh()) + ImPoint::from_array(offset)
}

fn catenoid(u: f64, v: f64) -> ImPoint {
    ImPoint::new(-v.cosh() * u.cos(), -v.cosh() * u.sin(), v)
}

fn enneper(z: Complex64) -> ImPoint {
    let z2 = z * z;
    let z3 = z2 * z;
    ImPoint::new(z2.re, (z - z3 / 3.0).re, (z + z3 / 3.0).im)
}

/// Stereographic Gauss map of the Weierstrass data.
fn stereo(g: Complex64) -> ImPoint {
    let r = g.norm_sqr();
    ImPoint::new(1.0 - r, -2.0 * g.re, 2.0 * g.im) / (1.0 + r)
}

fn tanh_g_hat(z: Complex64) -> Complex64 {
    z - (z + 1.0).tanh()
}

fn tanh_grid(intervals: usize) -> ConformalGrid {
    ConformalGrid::square(0.0, 1.0, 0.0, 1.0, intervals).unwrap()
}

fn dual_deviation(f: &Patch, exact: &SampledField<ImPoint>) -> Result<f64, String> {
    let dual = lift(christoffel_dual(f, ImPoint::ZERO))?;
    Ok(lift(translation_constancy(&dual.patch.pos, exact))?.1)
}

fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    let cases: [(&str, CatalogSurface, ClosedForm); 2] = [
        ("sphere/catenoid", CatalogSurface::MercatorSphere, catenoid),
        ("cylinder/reflected", CatalogSurface::Cylinder, |u, v| {
            ImPoint::new(-u.cos(), -u.sin(), v)
        }),
    ];
    for (label, surface, exact) in cases {
        let mut devs = Vec::new();
        for n in [20, 40] {
            let grid = sphere_grid(n);
            devs.push(dual_deviation(
                &surface.sample(grid),
                &sample_map(grid, exact),
            )?);
        }
        let p = order(devs[0], devs[1]);
        ensure!(
            devs[0] <= 5e-3 && p >= 1.8,
            "{label}: deviation {:.3e}, order {p:.2}",
            devs[0]
        );
        lines.push(format!("{label} {:.2e} (order {p:.2})", devs[0]));
    }
    Ok(lines.join(", "))
}

fn involution_deviation(f: &Patch) -> Result<f64, String> {
    let once = lift(christoffel_dual(f, ImPoint::ZERO))?;
    let twice = lift(christoffel_dual(&once.patch, ImPoint::ZERO))?;
    Ok(lift(translation_constancy(&twice.patch.pos, &f.pos))?.1)
}

fn criterion_2() -> Outcome {
    let grid = sphere_grid(20);
    let sphere = involution_deviation(&CatalogSurface::MercatorSphere.sample(grid))?;
    let cylinder = involution_deviation(&CatalogSurface::Cylinder.sample(grid))?;
    let data = WeierstrassData::parse("z", "2*z").unwrap();
    let (enn, _) = lift(weierstrass_surface(
        &data,
        ConformalGrid::square(-1.0, 1.0, -1.0, 1.0, 40).unwrap(),
        ImPoint::ZERO,
    ))?;
    let enneper = involution_deviation(&enn)?;
    for (label, d) in [
        ("sphere", sphere),
        ("cylinder", cylinder),
        ("enneper", enneper),
    ] {
        ensure!(d <= 5e-3, "{label}: deviation {d:.3e}");
    }
    Ok(format!(
        "sphere {sphere:.2e}, cylinder {cylinder:.2e}, enneper {enneper:.2e}"
    ))
}

fn criterion_3() -> Outcome {
    let data = WeierstrassData::parse("z", "2*z").unwrap();
    let mut match_dev = Vec::new();
    let mut mean_curv = Vec::new();
    for n in [40, 80] {
        let grid = ConformalGrid::square(-1.0, 1.0, -1.0, 1.0, n).unwrap();
        let (f, reports) = lift(weierstrass_surface(&data, grid, ImPoint::ZERO))?;
        let exact = SampledField::from_fn(grid, |p, q| enneper(grid.z(p, q)));
        match_dev.push(lift(translation_constancy(&f.pos, &exact))?.1);
        mean_curv.push(
            reports
                .iter()
                .find(|r| r.name == "mean curvature")
                .ok_or("no mean curvature report")?
                .max,
        );
    }
    let p = order(mean_curv[0], mean_curv[1]);
    ensure!(
        match_dev[0] <= 1e-4,
        "closed form deviation {:.3e}",
        match_dev[0]
    );
    ensure!(
        mean_curv[0] <= 5e-3 && p >= 1.8,
        "|H| {:.3e}, order {p:.2}",
        mean_curv[0]
    );
    Ok(format!(
        "closed form {:.2e}, |H| {:.2e} (order {p:.2})",
        match_dev[0], mean_curv[0]
    ))
}

fn criterion_4() -> Outcome {
    let t = 0.5;
    let grid = tanh_grid(100);
    let data = WeierstrassData::parse("z", "2*z").unwrap();
    let seed = Complex64::new(-(1f64.tanh()), 0.0);
    let sol = lift(holomorphic_riccati(&data, grid, t, seed))?;
    let pair = lift(minimal_darboux_pair(&data, grid, t, seed, ImPoint::ZERO))?;
    let mut closed = 0f64;
    let mut defect = 0f64;
    let mut q_rel = 0f64;
    for i in 0..grid.len() {
        let (p, q) = grid.position(i);
        let z = grid.z(p, q);
        let g_hat = sol.g_hat.values[i];
        closed = closed.max((g_hat - tanh_g_hat(z)).norm());
        // g = z, h = 2z: g' = 1 and q = h' g' = 2; ĝ' = tanh²(z + 1) exactly
        let th = (z + 1.0).tanh();
        defect = defect.max((th * th - t * (g_hat - z) * (g_hat - z) * 2.0).norm());
        let q_hat = 2.0 * pair.w_hat.values[i] * 2.0 * t * (g_hat - z) * (g_hat - z);
        q_rel = q_rel.max((q_hat - 2.0).norm() / 2.0);
    }
    let lib_defect = sol
        .reports
        .iter()
        .map(|r| {
            if r.class == ResidualClass::Algebraic {
                r.max
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    ensure!(closed <= 1e-6, "ĝ deviation {closed:.3e}");
    ensure!(
        defect.max(lib_defect) <= 1e-8,
        "riccati defect {defect:.3e} / {lib_defect:.3e}"
    );
    ensure!(q_rel <= 1e-10, "q invariance {q_rel:.3e}");
    Ok(format!(
        "ĝ {closed:.2e}, defect {:.2e}, q {q_rel:.2e}",
        defect.max(lib_defect)
    ))
}

fn criterion_5() -> Outcome {
    let t = 0.5;
    let data = WeierstrassData::parse("z", "2*z").unwrap();
    let seed = Complex64::new(-(1f64.tanh()), 0.0);
    let mut levels = Vec::new();
    for n in [100, 200] {
        let grid = tanh_grid(n);
        levels.push((
            grid,
            lift(minimal_darboux_pair(&data, grid, t, seed, ImPoint::ZERO))?,
        ));
    }
    let report = |k: usize, name: &str| -> Result<f64, String> {
        Ok(levels[k]
            .1
            .reports
            .iter()
            .find(|r| r.name == name)
            .ok_or(format!("no report {name}"))?
            .max)
    };
    let riccati = report(0, "gauss map riccati defect")?;
    let p = order(riccati, report(1, "gauss map riccati defect")?);
    let offset = report(0, "normal offset")?;
    let rebuilt = report(0, "rebuilt transform")?;
    // f̂ = f + (1/t)(n̂ - n)⁻¹ from the closed forms of f, g and ĝ
    let (grid, pair) = &levels[0];
    let mut closed = 0f64;
    for i in 0..grid.len() {
        let (p, q) = grid.position(i);
        let z = grid.z(p, q);
        let d = stereo(tanh_g_hat(z)) - stereo(z);
        let exact = enneper(z) + d.inverse().unwrap() * (1.0 / t);
        closed = closed.max((pair.f_hat.values[i] - exact).norm());
    }
    ensure!(
        riccati <= 5e-3 && p >= 1.8,
        "riccati defect {riccati:.3e}, order {p:.2}"
    );
    ensure!(offset <= 5e-3, "normal offset {offset:.3e}");
    ensure!(rebuilt <= 5e-3, "rebuilt deviation {rebuilt:.3e}");
    ensure!(
        closed <= 5e-3,
        "closed-form transform deviation {closed:.3e}"
    );
    Ok(format!("riccati {riccati:.2e} (order {p:.2}), offset {offset:.2e}, rebuilt {rebuilt:.2e}, closed form {closed:.2e}"))
}

/// FD arrows need the order only above the rounding floor.
const NOISE_FLOOR: f64 = 1e-10;

fn orders_ok(
    coarse: &[ResidualReport],
    fine: &[ResidualReport],
    min_fd: f64,
    min_ode: f64,
) -> Result<(), String> {
    for (c, f) in coarse.iter().zip(fine) {
        let need = match c.class {
            ResidualClass::Fd => min_fd,
            ResidualClass::Ode => min_ode,
            ResidualClass::Algebraic => continue,
        };
        if c.max <= NOISE_FLOOR {
            continue;
        }
        let p = order(c.max, f.max);
        ensure!(p >= need, "{}: order {p:.2} < {need}", c.name);
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let seed = sphere_seed([-0.5, -1.5, 0.0]);
    let coarse = lift(verify_bianchi(
        &CatalogSurface::MercatorSphere.sample(sphere_grid(20)),
        None,
        0.3,
        seed,
    ))?;
    let fine = lift(verify_bianchi(
        &CatalogSurface::MercatorSphere.sample(sphere_grid(40)),
        None,
        0.3,
        seed,
    ))?;
    let worst = coarse
        .arrows
        .iter()
        .filter(|a| a.class != ResidualClass::Ode)
        .fold(0f64, |m, a| m.max(a.max));
    ensure!(worst <= 5e-3, "largest arrow {worst:.3e}");
    ensure!(
        coarse.deviation <= 5e-3,
        "diagram deviation {:.3e}",
        coarse.deviation
    );
    for a in coarse
        .arrows
        .iter()
        .filter(|a| a.class == ResidualClass::Ode)
    {
        ensure!(a.max <= 1e-6, "{}: {:.3e}", a.name, a.max);
    }
    orders_ok(&coarse.arrows, &fine.arrows, 1.8, 1.8)?;
    Ok(format!(
        "largest arrow {worst:.2e}, deviation {:.2e} (order {:.2})",
        coarse.deviation,
        order(coarse.deviation, fine.deviation)
    ))
}

fn criterion_7() -> Outcome {
    let mu = MobiusMap::inversion(ImPoint::new(3.0, 0.0, 0.0));
    let seed = sphere_seed([-0.79, -0.93, -0.32]);
    let run = |n| {
        verify_main_theorem(
            &CatalogSurface::MercatorSphere.sample(sphere_grid(n)),
            &mu,
            0.4,
            seed,
            ImPoint::ZERO,
        )
    };
    let coarse = lift(run(20))?;
    let fine = lift(run(40))?;
    let mut parts = Vec::new();
    for name in ["gd vs darboux of goursat", "gd vs goursat of darboux"] {
        let (c, f) = (
            coarse.arrow(name).ok_or(name)?.max,
            fine.arrow(name).ok_or(name)?.max,
        );
        let p = order(c, f);
        ensure!(c <= 1e-2 && p >= 1.8, "{name}: {c:.3e}, order {p:.2}");
        parts.push(format!("{name} {c:.2e} (order {p:.2})"));
    }
    let inv = coarse
        .arrow("mobius invariance")
        .ok_or("no invariance arrow")?
        .max;
    ensure!(inv <= 1e-6, "mobius invariance {inv:.3e}");
    parts.push(format!("invariance {inv:.2e}"));
    Ok(parts.join(", "))
}

fn curved_flat_level(
    intervals: usize,
) -> Result<
    (
        ConformalGrid,
        isolab::curved_flat::Factors,
        Vec<ResidualReport>,
    ),
    String,
> {
    let t = 0.5;
    let grid = tanh_grid(intervals);
    let data = WeierstrassData::parse("z", "2*z").unwrap();
    let pair = lift(minimal_darboux_pair(
        &data,
        grid,
        t,
        Complex64::new(-(1f64.tanh()), 0.0),
        ImPoint::ZERO,
    ))?;
    let g = SampledField::from_fn(grid, |p, q| grid.z(p, q));
    let w = SampledField::constant(grid, Complex64::new(1.0, 0.0));
    let pd = lift(PairData::new(g, pair.g_hat, w, pair.w_hat, t))?;
    let one = Complex64::new(1.0, 0.0);
    let factors = lift(integrating_factors(&pd, one, one))?;
    let phi = lift(frame(&pd, &factors))?;
    let reports = lift(curved_flat_residual(&pd, &factors, &phi))?;
    Ok((grid, factors, reports))
}

fn criterion_8() -> Outcome {
    let (grid, factors, coarse) = curved_flat_level(100)?;
    let (_, _, fine) = curved_flat_level(200)?;
    let one = Complex64::new(1.0, 0.0);
    let mut a_err = 0f64;
    let mut a_hat_err = 0f64;
    for i in 0..grid.len() {
        let (p, q) = grid.position(i);
        let z = grid.z(p, q);
        a_hat_err = a_hat_err.max((factors.a_hat.values[i] - (z + 1.0).cosh() / one.cosh()).norm());
        a_err = a_err.max((factors.a.values[i] - one.sinh() / (z + 1.0).sinh()).norm());
    }
    ensure!(
        a_hat_err <= 1e-6 && a_err <= 1e-6,
        "factor deviations â {a_hat_err:.3e}, a {a_err:.3e}"
    );
    let get = |rs: &[ResidualReport], name: &str| {
        rs.iter()
            .find(|r| r.name == name)
            .map(|r| r.max)
            .ok_or(format!("no {name}"))
    };
    let flat = get(&coarse, "curved flat")?;
    let p = order(flat, get(&fine, "curved flat")?);
    let diag = get(&coarse, "connection diagonal")?;
    ensure!(
        flat <= 5e-3 && p >= 1.8,
        "curved flat {flat:.3e}, order {p:.2}"
    );
    ensure!(diag <= 5e-3, "connection diagonal {diag:.3e}");
    Ok(format!("â {a_hat_err:.2e}, a {a_err:.2e}, curved flat {flat:.2e} (order {p:.2}), diagonal {diag:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut quat = |s: f64| {
        Quaternion::new(
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
        )
    };
    let mut worst = [0f64; 5];
    let iota = MobiusMap::iota();
    let minus_i = ImPoint::new(-1.0, 0.0, 0.0);
    let mut samples = 0;
    while samples < 1000 {
        let (p, q) = (quat(2.0), quat(2.0));
        worst[0] = worst[0].max(((p * q).norm() - p.norm() * q.norm()).abs());
        let (x, y) = (p.vector(), q.vector());
        let xy = x.quat() * y.quat();
        let split = (xy.scalar() + (x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3)).abs()
            + (xy.vector()
                - ImPoint::new(
                    x.x2 * y.x3 - x.x3 * y.x2,
                    x.x3 * y.x1 - x.x1 * y.x3,
                    x.x1 * y.x2 - x.x2 * y.x1,
                ))
            .norm();
        worst[1] = worst[1].max(split);

        let r = quat(1.5).vector();
        let image = iota.apply_point(r).ok().flatten();
        if (r - minus_i).norm() < 0.1 || image.is_none_or(|y| (y - minus_i).norm() < 0.1) {
            continue;
        }
        let back = lift(iota.apply_point(image.unwrap()))?.ok_or("ι hit infinity")?;
        worst[2] = worst[2].max((back - r).norm());

        let theta = p.scalar() * std::f64::consts::PI;
        let e = ImPoint::new(0.0, theta.cos(), theta.sin());
        worst[3] = worst[3].max((lift(iota.apply_point(e))?.ok_or("ι hit infinity")? - e).norm());

        let (m, n) = (
            lift(MobiusMap::new(quat(1.0), quat(1.0), quat(1.0), quat(1.0)))?,
            lift(MobiusMap::new(quat(1.0), quat(1.0), quat(1.0), quat(1.0)))?,
        );
        let x = quat(1.0).vector().quat();
        let composed = m.compose(&n).apply_quat(x);
        let direct = n.apply_quat(x).and_then(|y| m.apply_quat(y));
        let (Some(c), Some(d)) = (composed, direct) else {
            continue;
        };
        if c.norm() > 1e4 {
            continue;
        }
        worst[4] = worst[4].max((c - d).norm() / (1.0 + c.norm()));
        samples += 1;
    }
    let labels = ["norm", "dot/cross", "ι∘ι", "equator", "composition"];
    for (label, w) in labels.iter().zip(worst) {
        ensure!(w <= 1e-10, "{label}: {w:.3e}");
    }
    Ok(labels
        .iter()
        .zip(worst)
        .map(|(l, w)| format!("{l} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", "))
}

fn artifacts(result: &RunResult) -> Vec<u8> {
    let mut buf = Vec::new();
    isolab::cli::export::write_report_csv(&mut buf, &result.rows).unwrap();
    for (_, field) in &result.outcome.surfaces {
        write_obj(&mut buf, field).unwrap();
    }
    buf
}

fn criterion_10() -> Outcome {
    let mut waived = 0;
    let mut checked = 0;
    for scenario in SCENARIOS {
        let a = lift(scenario.run(2))?;
        let b = lift(scenario.run(2))?;
        ensure!(
            artifacts(&a) == artifacts(&b),
            "{}: repeated runs differ",
            scenario.name
        );
        for row in &a.rows {
            let r = &row.report;
            let need = match r.class.required_order() {
                Some(p) => p,
                None => continue,
            };
            if r.max <= NOISE_FLOOR {
                waived += 1;
                continue;
            }
            checked += 1;
            let p = r.order_estimate.unwrap_or(f64::NAN);
            ensure!(
                p >= need,
                "{}: {} order {p:.2} < {need}",
                scenario.name,
                r.name
            );
        }
    }
    ensure!(scenarios::find("main-sphere").is_some(), "missing scenario");
    Ok(format!(
        "{} scenarios deterministic, {checked} orders checked, {waived} at rounding floor",
        SCENARIOS.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 10] = [
        ("Christoffel closed forms", criterion_1),
        ("duality involution", criterion_2),
        ("Weierstrass oracle", criterion_3),
        ("holomorphic Riccati oracle", criterion_4),
        ("minimal Darboux pair", criterion_5),
        ("Bianchi diagram", criterion_6),
        ("Goursat/Darboux permutability", criterion_7),
        ("curved flat", criterion_8),
        ("algebra suite", criterion_9),
        ("determinism and convergence", criterion_10),
    ];
    // written past the test harness capture so the table always shows
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => writeln!(err, "criterion {:>2} PASS {name}: {detail}", k + 1).unwrap(),
            Err(why) => {
                writeln!(err, "criterion {:>2} FAIL {name}: {why}", k + 1).unwrap();
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
