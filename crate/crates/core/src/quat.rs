//! Quaternion arithmetic, the imaginary-quaternion model of R³ and
//! quaternionic Möbius transformations.
//!
//! Points of Euclidean space are imaginary quaternions `x1 i + x2 j + x3 k`.
//! For two such points the Hamiltonian product splits as
//! `xy = -<x, y> + x × y`, which is what makes the transformation formulas
//! of isothermic surfaces expressible as plain quaternion products.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for rejecting a Möbius image that should be imaginary.
pub const IMAGINARY_TOL: f64 = 1e-8;
/// Relative threshold on `|cx + d|` below which the image is ∞.
pub const INFINITY_TOL: f64 = 1e-14;

/// Quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds `a + b i` into the subalgebra spanned by `1` and `i`.
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn scalar(self) -> f64 {
        self.w
    }

    pub fn vector(self) -> ImPoint {
        ImPoint::new(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `conj(p) / |p|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.conj() / n2)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Drops the scalar part, failing if it is not negligible.
    pub fn to_im_point(self) -> Result<ImPoint> {
        let magnitude = self.norm();
        if self.w.abs() > IMAGINARY_TOL * magnitude {
            return Err(Error::NotImaginary {
                scalar: self.w,
                magnitude,
            });
        }
        Ok(self.vector())
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Hamiltonian product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// A point `x1 i + x2 j + x3 k` of R³ = Im H.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl ImPoint {
    pub const ZERO: ImPoint = ImPoint::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn quat(self) -> Quaternion {
        Quaternion::new(0.0, self.x1, self.x2, self.x3)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.x2 * o.x3 - self.x3 * o.x2,
            self.x3 * o.x1 - self.x1 * o.x3,
            self.x1 * o.x2 - self.x2 * o.x1,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Quaternionic inverse `-x / |x|²`, again imaginary.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroInverse);
        }
        Ok(self * (-1.0 / n2))
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// The vector part of `a x b` for imaginary `a, x, b`; for the sandwich
    /// products used throughout (`a x a`) the scalar part vanishes identically.
    pub fn sandwich(a: Self, x: Self, b: Self) -> Self {
        (a.quat() * x.quat() * b.quat()).vector()
    }
}

impl Add for ImPoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for ImPoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for ImPoint {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }
}

impl AddAssign for ImPoint {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for ImPoint {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul<f64> for ImPoint {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<ImPoint> for f64 {
    type Output = ImPoint;
    fn mul(self, p: ImPoint) -> ImPoint {
        p * self
    }
}

impl Div<f64> for ImPoint {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x1 / s, self.x2 / s, self.x3 / s)
    }
}

impl fmt::Display for ImPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

/// A point of R³ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(ImPoint),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<ImPoint> {
        match self {
            ExtPoint::Finite(p) => Some(p),
            ExtPoint::Infinity => None,
        }
    }
}

impl From<ImPoint> for ExtPoint {
    fn from(p: ImPoint) -> Self {
        ExtPoint::Finite(p)
    }
}

/// `x ↦ (a x + b)(c x + d)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl MobiusMap {
    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Result<Self> {
        if [a, b, c, d].iter().all(|q| q.norm_sq() == 0.0) {
            return Err(Error::InvalidParameter(
                "Möbius coefficients all zero".into(),
            ));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: Quaternion::ONE,
            b: Quaternion::ZERO,
            c: Quaternion::ZERO,
            d: Quaternion::ONE,
        }
    }

    /// Inversion `x ↦ (x - c₀)⁻¹` centred at `c₀`.
    pub fn inversion(center: ImPoint) -> Self {
        Self {
            a: Quaternion::ZERO,
            b: Quaternion::ONE,
            c: Quaternion::ONE,
            d: -center.quat(),
        }
    }

    pub fn translation(by: ImPoint) -> Self {
        Self {
            a: Quaternion::ONE,
            b: by.quat(),
            c: Quaternion::ZERO,
            d: Quaternion::ONE,
        }
    }

    pub fn scaling(s: f64) -> Self {
        Self {
            a: Quaternion::real(s),
            b: Quaternion::ZERO,
            c: Quaternion::ZERO,
            d: Quaternion::ONE,
        }
    }

    /// `ι(x) = -i - 2(i + x)⁻¹`: stereographic projection on the unit sphere,
    /// its inverse on the plane `{i}⊥`.
    pub fn iota() -> Self {
        Self {
            a: -Quaternion::I,
            b: -Quaternion::ONE,
            c: Quaternion::ONE,
            d: Quaternion::I,
        }
    }

    pub fn coefficients(&self) -> [Quaternion; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Action on a full quaternion; `None` is ∞.
    pub fn apply_quat(&self, x: Quaternion) -> Option<Quaternion> {
        let num = self.a * x + self.b;
        let den = self.c * x + self.d;
        let scale = self.c.norm() * x.norm() + self.d.norm();
        if den.norm() <= INFINITY_TOL * scale || den.norm_sq() == 0.0 {
            return None;
        }
        Some(num * den.inverse().ok()?)
    }

    pub fn apply(&self, x: ExtPoint) -> Result<ExtPoint> {
        let image = match x {
            ExtPoint::Finite(p) => self.apply_quat(p.quat()),
            ExtPoint::Infinity => {
                if self.c.norm() <= INFINITY_TOL * (self.a.norm() + self.c.norm()) {
                    None
                } else {
                    Some(self.a * self.c.inverse()?)
                }
            }
        };
        match image {
            None => Ok(ExtPoint::Infinity),
            Some(q) => Ok(ExtPoint::Finite(q.to_im_point()?)),
        }
    }

    /// Finite image of a finite point, `None` for ∞.
    pub fn apply_point(&self, x: ImPoint) -> Result<Option<ImPoint>> {
        Ok(self.apply(ExtPoint::Finite(x))?.finite())
    }

    /// Push-forward of a tangent vector: `dμ_x(v) = (a - μ(x) c) v (c x + d)⁻¹`.
    pub fn differential(&self, x: ImPoint, v: ImPoint) -> Option<ImPoint> {
        let xq = x.quat();
        let image = self.apply_quat(xq)?;
        let den = (self.c * xq + self.d).inverse().ok()?;
        Some(((self.a - image * self.c) * v.quat() * den).vector())
    }

    /// `self ∘ inner`, i.e. the product of coefficient matrices.
    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    /// Projective equality: the quadruples agree up to a common real factor
    /// once the largest-magnitude coefficient of `self` is scaled to one.
    pub fn projectively_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        let mine = self.coefficients();
        let theirs = other.coefficients();
        let (k, _) = mine.iter().enumerate().fold((0, 0.0), |acc, (i, q)| {
            if q.norm() > acc.1 {
                (i, q.norm())
            } else {
                acc
            }
        });
        let Ok(pivot) = mine[k].inverse() else {
            return false;
        };
        let ratio = theirs[k] * pivot;
        if ratio.vector().norm() > tol * ratio.norm() || ratio.w == 0.0 {
            return false;
        }
        let lambda = ratio.w;
        mine.iter()
            .zip(theirs.iter())
            .all(|(m, o)| (*o * (1.0 / lambda) - *m).norm() <= tol * mine[k].norm())
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, inner: MobiusMap) -> MobiusMap {
        self.compose(&inner)
    }
}

/// Complex number `a + b i` mapped into the plane `C j = span{j, k}` as
/// the imaginary quaternion `(a + b i) j = a j + b k`.
pub fn complex_times_j(c: Complex64) -> ImPoint {
    ImPoint::new(0.0, c.re, c.im)
}

/// `j c = (a + b i)̄ j`, i.e. `a j - b k`.
pub fn j_times_complex(c: Complex64) -> ImPoint {
    ImPoint::new(0.0, c.re, -c.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Left-multiplication matrix of `p` acting on coefficient 4-vectors.
    fn left_matrix(p: Quaternion) -> [[f64; 4]; 4] {
        [
            [p.w, -p.x, -p.y, -p.z],
            [p.x, p.w, -p.z, p.y],
            [p.y, p.z, p.w, -p.x],
            [p.z, -p.y, p.x, p.w],
        ]
    }

    fn matrix_product(p: Quaternion, q: Quaternion) -> Quaternion {
        let m = left_matrix(p);
        let v = q.to_array();
        let mut out = [0.0; 4];
        for r in 0..4 {
            out[r] = (0..4).map(|c| m[r][c] * v[c]).sum();
        }
        Quaternion::from_array(out)
    }

    #[test]
    fn unit_relations() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
    }

    #[test]
    fn product_matches_matrix_representation() {
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, -1.0, 0.0, 0.0);
        assert_eq!(p * q, Quaternion::real(2.0));
        assert_eq!(matrix_product(p, q), Quaternion::real(2.0));
        let a = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        let b = Quaternion::new(-0.9, 0.4, 1.1, -2.0);
        let d = a * b - matrix_product(a, b);
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(
            Quaternion::real(2.0).inverse().unwrap(),
            Quaternion::real(0.5)
        );
        let ij = Quaternion::I + Quaternion::J;
        assert_eq!(ij.inverse().unwrap(), -ij * 0.5);
        assert!(matches!(
            Quaternion::ZERO.inverse(),
            Err(Error::ZeroInverse)
        ));
        assert!(ImPoint::ZERO.inverse().is_err());
    }

    #[test]
    fn mobius_examples() {
        let j = ExtPoint::Finite(ImPoint::new(0.0, 1.0, 0.0));
        assert_eq!(MobiusMap::identity().apply(j).unwrap(), j);
        let inv = MobiusMap::new(
            Quaternion::ZERO,
            Quaternion::ONE,
            Quaternion::ONE,
            Quaternion::ZERO,
        )
        .unwrap();
        let i = ExtPoint::Finite(ImPoint::new(1.0, 0.0, 0.0));
        assert_eq!(
            inv.apply(i).unwrap(),
            ExtPoint::Finite(ImPoint::new(-1.0, 0.0, 0.0))
        );
        let minus_i = ExtPoint::Finite(ImPoint::new(-1.0, 0.0, 0.0));
        assert_eq!(
            MobiusMap::iota().apply(minus_i).unwrap(),
            ExtPoint::Infinity
        );
        assert_eq!(
            inv.apply(ExtPoint::Infinity).unwrap(),
            ExtPoint::Finite(ImPoint::ZERO)
        );
        assert_eq!(
            MobiusMap::identity().apply(ExtPoint::Infinity).unwrap(),
            ExtPoint::Infinity
        );
    }

    #[test]
    fn iota_values() {
        let iota = MobiusMap::iota();
        let at = |p: ImPoint| iota.apply_point(p).unwrap().unwrap();
        let close = |a: ImPoint, b: ImPoint| (a - b).norm() < 1e-15;
        assert!(close(at(ImPoint::ZERO), ImPoint::new(1.0, 0.0, 0.0)));
        assert!(close(
            at(ImPoint::new(0.0, 1.0, 0.0)),
            ImPoint::new(0.0, 1.0, 0.0)
        ));
        assert!(close(at(ImPoint::new(1.0, 0.0, 0.0)), ImPoint::ZERO));
    }

    #[test]
    fn composition_examples() {
        let m = MobiusMap::inversion(ImPoint::new(0.2, -1.0, 3.0));
        assert!(m.compose(&MobiusMap::identity()).projectively_eq(&m, 1e-14));
        let inv = MobiusMap::inversion(ImPoint::ZERO);
        assert!((inv * inv).projectively_eq(&MobiusMap::identity(), 1e-14));
        let iota = MobiusMap::iota();
        assert!((iota * iota).projectively_eq(&MobiusMap::identity(), 1e-14));
        assert!(!inv.projectively_eq(&MobiusMap::identity(), 1e-6));
    }

    #[test]
    fn not_imaginary_rejected() {
        // x ↦ x + 1 leaves Im H
        let m = MobiusMap::translation(ImPoint::ZERO);
        let shifted = MobiusMap {
            b: Quaternion::ONE,
            ..m
        };
        let err = shifted.apply(ExtPoint::Finite(ImPoint::new(1.0, 0.0, 0.0)));
        assert!(matches!(err, Err(Error::NotImaginary { .. })));
    }

    #[test]
    fn differential_matches_difference_quotient() {
        let m = MobiusMap::iota().compose(&MobiusMap::inversion(ImPoint::new(0.0, 0.0, 3.0)));
        let x = ImPoint::new(0.4, -0.3, 1.1);
        let v = ImPoint::new(0.2, 0.7, -0.5);
        let h = 1e-5;
        let fwd = m.apply_point(x + v * h).unwrap().unwrap();
        let bwd = m.apply_point(x - v * h).unwrap().unwrap();
        let fd = (fwd - bwd) / (2.0 * h);
        let exact = m.differential(x, v).unwrap();
        assert!((fd - exact).norm() < 1e-8, "{fd} vs {exact}");
    }

    #[test]
    fn complex_plane_embedding() {
        let c = Complex64::new(2.0, 3.0);
        let hj = Quaternion::from_complex(c) * Quaternion::J;
        assert_eq!(hj.vector(), complex_times_j(c));
        let jg = Quaternion::J * Quaternion::from_complex(c);
        assert_eq!(jg.vector(), j_times_complex(c));
    }
}
