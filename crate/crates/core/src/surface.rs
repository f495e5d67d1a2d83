//! Sampled surface patches together with their tangent forms, and the
//! closed-form catalog used as oracles.

use crate::error::{Error, Result};
use crate::grid::{ConformalGrid, OneForm, SampledField};
use crate::quat::{ImPoint, MobiusMap};

/// Positions plus the tangent form `df = f_u du + f_v dv`.
///
/// The tangent form is exact for catalog surfaces and is carried through
/// the transformations by the chain rule or the governing Riccati equation;
/// for raw samples it comes from finite differences.
#[derive(Debug, Clone)]
pub struct Patch {
    pub pos: SampledField<ImPoint>,
    pub d: OneForm<ImPoint>,
}

impl Patch {
    pub fn new(pos: SampledField<ImPoint>, d: OneForm<ImPoint>) -> Result<Self> {
        crate::grid::ensure_same_grid(&pos.grid, &d.grid())?;
        Ok(Self { pos, d })
    }

    pub fn from_positions(pos: SampledField<ImPoint>) -> Self {
        let d = OneForm::differential(&pos);
        Self { pos, d }
    }

    pub fn grid(&self) -> ConformalGrid {
        self.pos.grid
    }

    pub fn origin(&self) -> ImPoint {
        *self.pos.at(0, 0)
    }

    pub fn translated(&self, by: ImPoint) -> Self {
        Self {
            pos: self.pos.map(|x| *x + by),
            d: self.d.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            pos: self.pos.map(|x| *x * s),
            d: OneForm {
                du: self.d.du.map(|x| *x * s),
                dv: self.d.dv.map(|x| *x * s),
            },
        }
    }

    /// `μ ∘ f` with the tangent form pushed forward by `dμ`.
    pub fn mobius(&self, mu: &MobiusMap) -> Result<Self> {
        let grid = self.grid();
        let image = |i: usize, x: &ImPoint| -> Result<ImPoint> {
            mu.apply_point(*x)?.ok_or(Error::PoleOnGrid {
                node: grid.node_at(i),
            })
        };
        let pos = self.pos.try_map(image)?;
        let push = |tangent: &SampledField<ImPoint>| {
            tangent.try_map(|i, v| {
                mu.differential(self.pos.values[i], *v)
                    .ok_or(Error::PoleOnGrid {
                        node: grid.node_at(i),
                    })
            })
        };
        let d = OneForm {
            du: push(&self.d.du)?,
            dv: push(&self.d.dv)?,
        };
        Ok(Self { pos, d })
    }
}

/// Closed-form conformal curvature-line parametrizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogSurface {
    /// `(u, v, 0)`.
    Plane,
    /// `z j = u j + v k`, the planar surface `h j` for `h = z`.
    PlaneJ,
    /// `(cos u, sin u, v)`.
    Cylinder,
    /// `(sech v cos u, sech v sin u, tanh v)`.
    MercatorSphere,
    /// `(-cosh v cos u, -cosh v sin u, v)`, dual to the Mercator sphere.
    Catenoid,
    /// `(-cos u, -sin u, v)`, dual to the cylinder.
    ReflectedCylinder,
}

impl CatalogSurface {
    pub const ALL: [CatalogSurface; 6] = [
        CatalogSurface::Plane,
        CatalogSurface::PlaneJ,
        CatalogSurface::Cylinder,
        CatalogSurface::MercatorSphere,
        CatalogSurface::Catenoid,
        CatalogSurface::ReflectedCylinder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogSurface::Plane => "plane",
            CatalogSurface::PlaneJ => "plane-j",
            CatalogSurface::Cylinder => "cylinder",
            CatalogSurface::MercatorSphere => "mercator-sphere",
            CatalogSurface::Catenoid => "catenoid",
            CatalogSurface::ReflectedCylinder => "reflected-cylinder",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// `(f, f_u, f_v)` at `(u, v)`.
    pub fn eval(self, u: f64, v: f64) -> (ImPoint, ImPoint, ImPoint) {
        let (su, cu) = u.sin_cos();
        match self {
            CatalogSurface::Plane => (
                ImPoint::new(u, v, 0.0),
                ImPoint::new(1.0, 0.0, 0.0),
                ImPoint::new(0.0, 1.0, 0.0),
            ),
            CatalogSurface::PlaneJ => (
                ImPoint::new(0.0, u, v),
                ImPoint::new(0.0, 1.0, 0.0),
                ImPoint::new(0.0, 0.0, 1.0),
            ),
            CatalogSurface::Cylinder => (
                ImPoint::new(cu, su, v),
                ImPoint::new(-su, cu, 0.0),
                ImPoint::new(0.0, 0.0, 1.0),
            ),
            CatalogSurface::ReflectedCylinder => (
                ImPoint::new(-cu, -su, v),
                ImPoint::new(su, -cu, 0.0),
                ImPoint::new(0.0, 0.0, 1.0),
            ),
            CatalogSurface::MercatorSphere => {
                let sech = 1.0 / v.cosh();
                let th = v.tanh();
                (
                    ImPoint::new(sech * cu, sech * su, th),
                    ImPoint::new(-sech * su, sech * cu, 0.0),
                    ImPoint::new(-sech * th * cu, -sech * th * su, sech * sech),
                )
            }
            CatalogSurface::Catenoid => {
                let (ch, sh) = (v.cosh(), v.sinh());
                (
                    ImPoint::new(-ch * cu, -ch * su, v),
                    ImPoint::new(ch * su, -ch * cu, 0.0),
                    ImPoint::new(-sh * cu, -sh * su, 1.0),
                )
            }
        }
    }

    pub fn position(self, u: f64, v: f64) -> ImPoint {
        self.eval(u, v).0
    }

    pub fn sample(self, grid: ConformalGrid) -> Patch {
        let values = SampledField::from_fn(grid, |p, q| self.eval(grid.u(p), grid.v(q)));
        Patch {
            pos: values.map(|e| e.0),
            d: OneForm {
                du: values.map(|e| e.1),
                dv: values.map(|e| e.2),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{partial, Axis};

    #[test]
    fn catalog_derivatives_match_differences() {
        let grid = ConformalGrid::square(0.2, 1.2, 0.2, 1.2, 40).unwrap();
        for s in CatalogSurface::ALL {
            let patch = s.sample(grid);
            let fu = partial(&patch.pos, Axis::U);
            let fv = partial(&patch.pos, Axis::V);
            for i in 0..grid.len() {
                assert!(
                    (fu.values[i] - patch.d.du.values[i]).norm() < 5e-3,
                    "{}",
                    s.name()
                );
                assert!(
                    (fv.values[i] - patch.d.dv.values[i]).norm() < 5e-3,
                    "{}",
                    s.name()
                );
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for s in CatalogSurface::ALL {
            assert_eq!(CatalogSurface::from_name(s.name()), Some(s));
        }
        assert_eq!(CatalogSurface::from_name("torus"), None);
    }

    #[test]
    fn mobius_pushes_tangents() {
        let grid = ConformalGrid::square(0.2, 1.2, 0.2, 1.2, 40).unwrap();
        let mu = MobiusMap::inversion(ImPoint::new(3.0, 0.0, 0.0));
        let image = CatalogSurface::Catenoid.sample(grid).mobius(&mu).unwrap();
        let fu = partial(&image.pos, Axis::U);
        for i in 0..grid.len() {
            assert!((fu.values[i] - image.d.du.values[i]).norm() < 1e-3);
        }
    }

    #[test]
    fn mobius_pole_reported() {
        let grid = ConformalGrid::new(0.0, 0.0, 0.5, 0.5, 3, 3).unwrap();
        let plane = CatalogSurface::Plane.sample(grid);
        let mu = MobiusMap::inversion(ImPoint::new(0.5, 0.5, 0.0));
        match plane.mobius(&mu) {
            Err(Error::PoleOnGrid { node }) => assert_eq!((node.p, node.q), (1, 1)),
            other => panic!("{other:?}"),
        }
    }
}
