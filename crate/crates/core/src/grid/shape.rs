//! Fundamental forms, Gauss map and curvatures of a sampled immersion.

use super::{partial, second_partial, Axis, SampledField};
use crate::error::{Error, Result};
use crate::quat::ImPoint;
use crate::report::{ResidualClass, ResidualReport};

/// Relative immersion threshold against the grid-median `|f_u||f_v|`.
pub const IMMERSION_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShapeNode {
    pub metric_e: f64,
    pub metric_f: f64,
    pub metric_g: f64,
    pub second_e: f64,
    pub second_f: f64,
    pub second_g: f64,
    /// `f_u × f_v / |f_u × f_v|`.
    pub normal: ImPoint,
    pub mean: f64,
    pub gauss: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `max(|E - G|, |F|) / E`.
    pub conformality: f64,
    /// `|f| / sqrt(E G)`, the off-diagonal shape operator entry in an
    /// orthonormal coordinate frame.
    pub curvature_line: f64,
}

#[derive(Debug, Clone)]
pub struct ShapeData {
    pub nodes: SampledField<ShapeNode>,
}

impl ShapeData {
    pub fn normals(&self) -> SampledField<ImPoint> {
        self.nodes.map(|s| s.normal)
    }

    pub fn mean_curvature(&self) -> SampledField<f64> {
        self.nodes.map(|s| s.mean)
    }

    pub fn metric(&self) -> SampledField<f64> {
        self.nodes.map(|s| s.metric_e)
    }

    pub fn conformality_report(&self) -> ResidualReport {
        ResidualReport::from_values(
            "conformality",
            ResidualClass::Fd,
            self.nodes.grid.spacing(),
            self.nodes.values.iter().map(|s| s.conformality),
        )
    }

    pub fn curvature_line_report(&self) -> ResidualReport {
        ResidualReport::from_values(
            "curvature lines",
            ResidualClass::Fd,
            self.nodes.grid.spacing(),
            self.nodes.values.iter().map(|s| s.curvature_line),
        )
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Shape analysis by finite differences of the sampled positions.
pub fn shape_analysis(f: &SampledField<ImPoint>) -> Result<ShapeData> {
    let grid = f.grid;
    let fu = partial(f, Axis::U);
    let fv = partial(f, Axis::V);
    let fuu = second_partial(f, Axis::U);
    let fvv = second_partial(f, Axis::V);
    let fuv = partial(&fu, Axis::V);
    let eps = IMMERSION_EPS
        * median(
            fu.values
                .iter()
                .zip(&fv.values)
                .map(|(a, b)| a.norm() * b.norm())
                .collect(),
        );
    let nodes = SampledField::try_from_fn(grid, |p, q| {
        let i = grid.index(p, q);
        let (a, b) = (fu.values[i], fv.values[i]);
        let cross = a.cross(b);
        let area = cross.norm();
        if !(area > eps) {
            return Err(Error::DegenerateNode {
                node: grid.node(p, q),
            });
        }
        let n = cross / area;
        let (ee, ff, gg) = (a.dot(a), a.dot(b), b.dot(b));
        let (e, fm, g) = (
            fuu.values[i].dot(n),
            fuv.values[i].dot(n),
            fvv.values[i].dot(n),
        );
        let det = ee * gg - ff * ff;
        let mean = (e * gg - 2.0 * fm * ff + g * ee) / (2.0 * det);
        // near umbilics rounding can push K above H²; clamp onto H² = K
        let gauss = ((e * g - fm * fm) / det).min(mean * mean);
        let split = (mean * mean - gauss).sqrt();
        Ok(ShapeNode {
            metric_e: ee,
            metric_f: ff,
            metric_g: gg,
            second_e: e,
            second_f: fm,
            second_g: g,
            normal: n,
            mean,
            gauss,
            kappa1: mean + split,
            kappa2: mean - split,
            conformality: (ee - gg).abs().max(ff.abs()) / ee,
            curvature_line: fm.abs() / (ee * gg).sqrt(),
        })
    })?;
    Ok(ShapeData { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_map, ConformalGrid};

    #[test]
    fn plane() {
        let g = ConformalGrid::new(0.0, 0.0, 0.1, 0.1, 5, 5).unwrap();
        let s = shape_analysis(&sample_map(g, |u, v| ImPoint::new(u, v, 0.0))).unwrap();
        for n in &s.nodes.values {
            assert!(n.mean.abs() < 1e-12 && n.gauss.abs() < 1e-12);
            assert!((n.normal - ImPoint::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_node_reported() {
        let g = ConformalGrid::new(0.0, 0.0, 0.1, 0.1, 5, 5).unwrap();
        let line = sample_map(g, |u, _| ImPoint::new(u, 0.0, 0.0));
        assert!(matches!(
            shape_analysis(&line),
            Err(Error::DegenerateNode { .. })
        ));
    }

    fn cylinder_error(n: usize) -> f64 {
        let g = ConformalGrid::square(0.2, 1.2, 0.2, 1.2, n).unwrap();
        let s = shape_analysis(&sample_map(g, |u, v| ImPoint::new(u.cos(), u.sin(), v))).unwrap();
        s.nodes
            .values
            .iter()
            .map(|n| {
                (n.kappa1 - 0.0)
                    .abs()
                    .max((n.kappa2 + 1.0).abs())
                    .max((n.mean + 0.5).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn cylinder_curvatures() {
        let g = ConformalGrid::square(0.2, 1.2, 0.2, 1.2, 20).unwrap();
        let s = shape_analysis(&sample_map(g, |u, v| ImPoint::new(u.cos(), u.sin(), v))).unwrap();
        let n = s.nodes.at(3, 4);
        let u = g.u(3);
        assert!((n.normal - ImPoint::new(u.cos(), u.sin(), 0.0)).norm() < 1e-2);
        assert!(n.gauss.abs() < 1e-2);
        let e1 = cylinder_error(20);
        assert!(e1 < 1e-2);
        assert!(e1 / cylinder_error(40) > 3.5);
    }

    #[test]
    fn mercator_sphere() {
        let g = ConformalGrid::square(0.2, 1.2, 0.2, 1.2, 20).unwrap();
        let f = sample_map(g, |u, v| {
            let s = 1.0 / v.cosh();
            ImPoint::new(s * u.cos(), s * u.sin(), v.tanh())
        });
        let s = shape_analysis(&f).unwrap();
        for n in &s.nodes.values {
            assert!((n.gauss - 1.0).abs() < 1e-2);
            assert!((n.mean.abs() - 1.0).abs() < 1e-2);
            assert!(n.conformality < 1e-2);
            let h = n.mean;
            assert!(h * h >= n.gauss - 1e-12);
            assert!((n.kappa1 * n.kappa2 - n.gauss).abs() < 1e-8);
            assert!((n.kappa1 + n.kappa2 - 2.0 * h).abs() < 1e-8);
        }
    }
}
