//! Built-in verification runs with closed-form oracles.
//!
//! Each scenario is an ordinary run configuration plus extra reports that
//! compare the outcome against a known answer.

use num_complex::Complex64;

use super::config::{parse_config, RunConfig};
use super::run::{run_levels, Outcome, RunResult};
use crate::error::{Error, Result};
use crate::grid::{ConformalGrid, SampledField};
use crate::permutability::translation_constancy;
use crate::quat::ImPoint;
use crate::report::{ResidualClass, ResidualReport};
use crate::surface::CatalogSurface;

type Oracle = fn(&Outcome, ConformalGrid) -> Result<Vec<ResidualReport>>;

pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    config: &'static str,
    oracle: Oracle,
}

impl Scenario {
    pub fn config(&self) -> RunConfig {
        parse_config(self.config).expect("built-in scenario config is valid")
    }

    pub fn config_text(&self) -> &'static str {
        self.config
    }

    /// Runs over `refine` levels with the oracle reports included.
    pub fn run(&self, refine: usize) -> Result<RunResult> {
        let mut config = self.config();
        config.numeric.refine = refine;
        run_levels(&config, self.oracle)
    }
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "christoffel-sphere",
        summary: "dual of the Mercator sphere against the catenoid",
        config: include_str!("../../configs/christoffel-sphere.json"),
        oracle: |out, grid| {
            Ok(vec![closed_form_match(
                "catenoid match",
                named(out, "dual")?,
                CatalogSurface::Catenoid,
                grid,
            )?])
        },
    },
    Scenario {
        name: "christoffel-cylinder",
        summary: "dual of the cylinder against the reflected cylinder",
        config: include_str!("../../configs/christoffel-cylinder.json"),
        oracle: |out, grid| {
            Ok(vec![closed_form_match(
                "reflected cylinder match",
                named(out, "dual")?,
                CatalogSurface::ReflectedCylinder,
                grid,
            )?])
        },
    },
    Scenario {
        name: "enneper",
        summary: "Weierstrass integration of Enneper's surface and its dual",
        config: include_str!("../../configs/enneper.json"),
        oracle: |out, grid| {
            let exact = SampledField::from_fn(grid, |p, q| enneper(grid.z(p, q)));
            Ok(vec![translation_report(
                "closed form match",
                named(out, "surface")?,
                &exact,
            )?])
        },
    },
    Scenario {
        name: "tanh-darboux",
        summary: "Darboux transform of Enneper's surface with ĝ = z - tanh(z + 1)",
        config: include_str!("../../configs/tanh-darboux.json"),
        oracle: |out, grid| {
            let g_hat = field(out, "g_hat")?;
            Ok(vec![complex_match("closed form g_hat", g_hat, grid, |z| {
                z - (z + 1.0).tanh()
            })])
        },
    },
    Scenario {
        name: "bianchi-sphere",
        summary: "Bianchi permutability diagram on the Mercator sphere",
        config: include_str!("../../configs/bianchi-sphere.json"),
        oracle: |_, _| Ok(Vec::new()),
    },
    Scenario {
        name: "main-sphere",
        summary: "Goursat and Darboux transforms permute on the Mercator sphere",
        config: include_str!("../../configs/main-sphere.json"),
        oracle: |_, _| Ok(Vec::new()),
    },
    Scenario {
        name: "curved-flat-tanh",
        summary: "curved flat of the tanh Darboux pair with closed-form factors",
        config: include_str!("../../configs/curved-flat-tanh.json"),
        oracle: |out, grid| {
            let one = Complex64::new(1.0, 0.0);
            let c1 = one.cosh();
            let s1 = one.sinh();
            Ok(vec![
                complex_match("a closed form", field(out, "a")?, grid, |z| {
                    s1 / (z + 1.0).sinh()
                }),
                complex_match("a_hat closed form", field(out, "a_hat")?, grid, |z| {
                    (z + 1.0).cosh() / c1
                }),
            ])
        },
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("scenario outcome has no '{what}'"))
}

fn named<'a>(out: &'a Outcome, name: &str) -> Result<&'a SampledField<ImPoint>> {
    out.surface(name).ok_or_else(|| missing(name))
}

fn field<'a>(out: &'a Outcome, name: &str) -> Result<&'a SampledField<Complex64>> {
    out.field(name).ok_or_else(|| missing(name))
}

/// `(Re z², Re(z - z³/3), Im(z + z³/3))`.
pub fn enneper(z: Complex64) -> ImPoint {
    let z2 = z * z;
    let z3 = z2 * z;
    ImPoint::new(z2.re, (z - z3 / 3.0).re, (z + z3 / 3.0).im)
}

fn translation_report(
    name: &str,
    a: &SampledField<ImPoint>,
    b: &SampledField<ImPoint>,
) -> Result<ResidualReport> {
    let (_, deviation) = translation_constancy(a, b)?;
    Ok(ResidualReport::single(
        name,
        ResidualClass::Fd,
        a.grid.spacing(),
        deviation,
    ))
}

fn closed_form_match(
    name: &str,
    a: &SampledField<ImPoint>,
    exact: CatalogSurface,
    grid: ConformalGrid,
) -> Result<ResidualReport> {
    translation_report(name, a, &exact.sample(grid).pos)
}

fn complex_match(
    name: &str,
    a: &SampledField<Complex64>,
    grid: ConformalGrid,
    exact: impl Fn(Complex64) -> Complex64,
) -> ResidualReport {
    ResidualReport::from_values(
        name,
        ResidualClass::Ode,
        grid.spacing(),
        (0..grid.len()).map(|i| {
            let (p, q) = grid.position(i);
            (a.values[i] - exact(grid.z(p, q))).norm()
        }),
    )
}
