//! Strict JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{catalog, Expr};
use crate::grid::ConformalGrid;
use crate::quat::{ImPoint, MobiusMap, Quaternion};
use crate::report::ResidualClass;
use crate::surface::CatalogSurface;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub grid: GridSpec,
    pub transform: TransformSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub numeric: NumericSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceSpec {
    /// A closed-form surface or a named Weierstrass data set.
    Catalog(String),
    Weierstrass {
        g: String,
        h: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<ConformalGrid> {
        ConformalGrid::new(self.u0, self.v0, self.du, self.dv, self.nu, self.nv)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobiusSpec {
    Iota,
    /// `x ↦ (x - c)⁻¹` for the centre `c`.
    Inversion([f64; 3]),
    /// `[a, b, c, d]`, each `[w, x, y, z]`.
    Coefficients([[f64; 4]; 4]),
}

impl MobiusSpec {
    pub fn map(&self) -> Result<MobiusMap> {
        match self {
            MobiusSpec::Iota => Ok(MobiusMap::iota()),
            MobiusSpec::Inversion(c) => Ok(MobiusMap::inversion(ImPoint::from_array(*c))),
            MobiusSpec::Coefficients(q) => MobiusMap::new(
                Quaternion::from_array(q[0]),
                Quaternion::from_array(q[1]),
                Quaternion::from_array(q[2]),
                Quaternion::from_array(q[3]),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoursatSpec {
    pub mobius: MobiusSpec,
    #[serde(default)]
    pub dual_base: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarbouxSpec {
    pub t: f64,
    /// Value of the transform at node `(0, 0)`.
    pub seed: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalDarbouxSpec {
    pub t: f64,
    pub g_hat_seed: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MainTheoremSpec {
    pub mobius: MobiusSpec,
    pub t: f64,
    pub seed: [f64; 3],
    #[serde(default)]
    pub dual_base: [f64; 3],
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvedFlatSpec {
    pub t: f64,
    pub g_hat_seed: [f64; 2],
    #[serde(default = "one")]
    pub a0: [f64; 2],
    #[serde(default = "one")]
    pub a_hat0: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformSpec {
    Christoffel,
    Goursat(GoursatSpec),
    Darboux(DarbouxSpec),
    MinimalDarboux(MinimalDarbouxSpec),
    VerifyBianchi(DarbouxSpec),
    VerifyMain(MainTheoremSpec),
    CurvedFlat(CurvedFlatSpec),
}

impl TransformSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TransformSpec::Christoffel => "christoffel",
            TransformSpec::Goursat(_) => "goursat",
            TransformSpec::Darboux(_) => "darboux",
            TransformSpec::MinimalDarboux(_) => "minimal-darboux",
            TransformSpec::VerifyBianchi(_) => "verify-bianchi",
            TransformSpec::VerifyMain(_) => "verify-main",
            TransformSpec::CurvedFlat(_) => "curved-flat",
        }
    }

    fn spectral(&self) -> Option<f64> {
        match self {
            TransformSpec::Christoffel | TransformSpec::Goursat(_) => None,
            TransformSpec::Darboux(s) | TransformSpec::VerifyBianchi(s) => Some(s.t),
            TransformSpec::MinimalDarboux(s) => Some(s.t),
            TransformSpec::VerifyMain(s) => Some(s.t),
            TransformSpec::CurvedFlat(s) => Some(s.t),
        }
    }

    fn needs_weierstrass(&self) -> bool {
        matches!(
            self,
            TransformSpec::MinimalDarboux(_) | TransformSpec::CurvedFlat(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory receiving one OBJ mesh per produced surface.
    pub obj_dir: Option<PathBuf>,
    /// Residual report table.
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "Tolerances::default_fd")]
    pub fd: f64,
    #[serde(default = "Tolerances::default_ode")]
    pub ode: f64,
    #[serde(default = "Tolerances::default_algebraic")]
    pub algebraic: f64,
    /// Per-report overrides keyed by report name.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    fn default_fd() -> f64 {
        1e-2
    }
    fn default_ode() -> f64 {
        1e-6
    }
    fn default_algebraic() -> f64 {
        1e-10
    }

    pub fn for_report(&self, name: &str, class: ResidualClass) -> f64 {
        if let Some(t) = self.overrides.get(name) {
            return *t;
        }
        match class {
            ResidualClass::Fd => self.fd,
            ResidualClass::Ode => self.ode,
            ResidualClass::Algebraic => self.algebraic,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fd: Self::default_fd(),
            ode: Self::default_ode(),
            algebraic: Self::default_algebraic(),
            overrides: BTreeMap::new(),
        }
    }
}

fn default_refine() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    /// Number of grid levels; every extra level halves the spacing.
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for NumericSpec {
    fn default() -> Self {
        Self {
            refine: default_refine(),
            tolerances: Tolerances::default(),
        }
    }
}

/// The resolved input surface.
#[derive(Debug, Clone)]
pub enum SurfaceSource {
    Catalog(CatalogSurface),
    Weierstrass(crate::weierstrass::WeierstrassData),
}

impl SurfaceSpec {
    pub fn resolve(&self) -> Result<SurfaceSource> {
        match self {
            SurfaceSpec::Catalog(name) => {
                if let Some(s) = CatalogSurface::from_name(name) {
                    return Ok(SurfaceSource::Catalog(s));
                }
                crate::weierstrass::WeierstrassData::catalog(name)
                    .map(SurfaceSource::Weierstrass)
                    .ok_or_else(|| {
                        let known: Vec<&str> = CatalogSurface::ALL
                            .iter()
                            .map(|s| s.name())
                            .chain(catalog::NAMES.iter().copied())
                            .collect();
                        Error::Validation(vec![format!(
                            "surface.catalog: unknown surface '{name}', expected one of {}",
                            known.join(", ")
                        )])
                    })
            }
            SurfaceSpec::Weierstrass { g, h } => Ok(SurfaceSource::Weierstrass(
                crate::weierstrass::WeierstrassData::parse(g, h)?,
            )),
        }
    }
}

pub fn point(a: [f64; 3]) -> ImPoint {
    ImPoint::from_array(a)
}

pub fn complex(a: [f64; 2]) -> Complex64 {
    Complex64::new(a[0], a[1])
}

impl RunConfig {
    /// Checks the invariants not expressible in the schema, collecting
    /// every violation.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(Error::Validation(v)) = self.grid.grid() {
            problems.extend(v.into_iter().map(|p| format!("grid: {p}")));
        }
        match &self.surface {
            SurfaceSpec::Catalog(_) => {
                if let Err(Error::Validation(v)) = self.surface.resolve() {
                    problems.extend(v);
                }
            }
            SurfaceSpec::Weierstrass { g, h } => {
                for (key, text) in [("g", g), ("h", h)] {
                    if let Err(e) = Expr::parse(text) {
                        problems.push(format!("surface.weierstrass.{key}: {e}"));
                    }
                }
            }
        }
        if self.transform.needs_weierstrass()
            && !matches!(self.surface.resolve(), Ok(SurfaceSource::Weierstrass(_)))
        {
            problems.push(format!(
                "transform.{}: requires Weierstrass surface data",
                self.transform.name()
            ));
        }
        if let Some(t) = self.transform.spectral() {
            if t == 0.0 || !t.is_finite() {
                problems.push(format!(
                    "transform.{}.t: spectral parameter must be finite and nonzero, got {t}",
                    self.transform.name()
                ));
            }
        }
        let mobius = match &self.transform {
            TransformSpec::Goursat(s) => Some(&s.mobius),
            TransformSpec::VerifyMain(s) => Some(&s.mobius),
            _ => None,
        };
        if let Some(Err(e)) = mobius.map(MobiusSpec::map) {
            problems.push(format!("transform.{}.mobius: {e}", self.transform.name()));
        }
        if self.numeric.refine == 0 {
            problems.push("numeric.refine: must be at least 1".into());
        }
        let tol = &self.numeric.tolerances;
        for (key, value) in [
            ("fd", tol.fd),
            ("ode", tol.ode),
            ("algebraic", tol.algebraic),
        ]
        .into_iter()
        .chain(tol.overrides.iter().map(|(k, v)| (k.as_str(), *v)))
        {
            if !(value > 0.0) {
                problems.push(format!(
                    "numeric.tolerances.{key}: must be positive, got {value}"
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        pointer: pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
