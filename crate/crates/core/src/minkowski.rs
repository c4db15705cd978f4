//! Lorentzian linear algebra in Minkowski 3-space with signature (−,+,+).
//!
//! Coordinate `c0` is the time-like axis; `c1` and `c2` are space-like.
//! Everything here is exact arithmetic on plain values, so all functions are
//! safe to call from any thread.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default null tolerance on the quadratic form `⟨v,v⟩` for unit-scale vectors.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("vector is light-like (|<v,v>| = {0:e})")]
    NullVector(f64),
    #[error("angle argument is light-like")]
    NullArgument,
    #[error("angle between two space-like vectors is undefined")]
    BothSpaceLike,
}

/// A vector of E³₁.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVector3 {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    SpaceLike,
    TimeLike,
    LightLike,
}

impl MinkVector3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const E0: Self = Self::new(1.0, 0.0, 0.0);
    pub const E1: Self = Self::new(0.0, 1.0, 0.0);
    pub const E2: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c0, self.c1, self.c2]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn inner(self, other: Self) -> f64 {
        lorentz_inner(self, other)
    }

    pub fn cross(self, other: Self) -> Self {
        lorentz_cross(self, other)
    }

    /// `⟨v,v⟩`.
    pub fn quad(self) -> f64 {
        lorentz_inner(self, self)
    }

    /// `√|⟨v,v⟩|`.
    pub fn lorentz_norm(self) -> f64 {
        self.quad().abs().sqrt()
    }

    /// Euclidean length of the coordinate triple; used for residual sizes only.
    pub fn euclid_norm(self) -> f64 {
        (self.c0 * self.c0 + self.c1 * self.c1 + self.c2 * self.c2).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.c0.is_finite() && self.c1.is_finite() && self.c2.is_finite()
    }
}

impl Add for MinkVector3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)
    }
}

impl AddAssign for MinkVector3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for MinkVector3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c0 - o.c0, self.c1 - o.c1, self.c2 - o.c2)
    }
}

impl SubAssign for MinkVector3 {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for MinkVector3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c0, -self.c1, -self.c2)
    }
}

impl Mul<f64> for MinkVector3 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.c0 * k, self.c1 * k, self.c2 * k)
    }
}

impl Mul<MinkVector3> for f64 {
    type Output = MinkVector3;
    fn mul(self, v: MinkVector3) -> MinkVector3 {
        v * self
    }
}

impl Div<f64> for MinkVector3 {
    type Output = Self;
    fn div(self, k: f64) -> Self {
        Self::new(self.c0 / k, self.c1 / k, self.c2 / k)
    }
}

/// `⟨v,w⟩ = −v₀w₀ + v₁w₁ + v₂w₂`.
pub fn lorentz_inner(v: MinkVector3, w: MinkVector3) -> f64 {
    -v.c0 * w.c0 + v.c1 * w.c1 + v.c2 * w.c2
}

/// Determinant of the matrix whose columns are `a`, `b`, `c` in standard coordinates.
pub fn det3(a: MinkVector3, b: MinkVector3, c: MinkVector3) -> f64 {
    a.c0 * (b.c1 * c.c2 - b.c2 * c.c1) - b.c0 * (a.c1 * c.c2 - a.c2 * c.c1) + c.c0 * (a.c1 * b.c2 - a.c2 * b.c1)
}

/// Classifies `v` by the sign of `⟨v,v⟩` with a symmetric dead band of width `null_tol`.
pub fn causal_character(v: MinkVector3, null_tol: f64) -> CausalCharacter {
    let q = v.quad();
    if q > null_tol {
        CausalCharacter::SpaceLike
    } else if q < -null_tol {
        CausalCharacter::TimeLike
    } else {
        CausalCharacter::LightLike
    }
}

/// The Lorentzian cross product: the unique `u` with `⟨u, z⟩ = det(v, w, z)` for all `z`.
///
/// Expanding the determinant along its last column gives the Euclidean cross
/// product components; the time component picks up a minus sign from the metric.
pub fn lorentz_cross(v: MinkVector3, w: MinkVector3) -> MinkVector3 {
    MinkVector3::new(-(v.c1 * w.c2 - v.c2 * w.c1), v.c2 * w.c0 - v.c0 * w.c2, v.c0 * w.c1 - v.c1 * w.c0)
}

/// Hyperbolic angle between two non-null vectors.
///
/// Two time-like vectors give `|⟨v,w⟩| = ‖v‖‖w‖ cosh θ`; a space-like and a
/// time-like vector give `|⟨v,w⟩| = ‖v‖‖w‖ sinh θ`. Time orientation is not
/// enforced; the absolute value absorbs mixed orientations.
pub fn lorentz_angle(v: MinkVector3, w: MinkVector3) -> Result<f64, MinkowskiError> {
    lorentz_angle_with_tol(v, w, DEFAULT_NULL_TOL)
}

pub fn lorentz_angle_with_tol(v: MinkVector3, w: MinkVector3, null_tol: f64) -> Result<f64, MinkowskiError> {
    use CausalCharacter::*;
    let cv = causal_character(v, null_tol);
    let cw = causal_character(w, null_tol);
    if cv == LightLike || cw == LightLike {
        return Err(MinkowskiError::NullArgument);
    }
    let ratio = lorentz_inner(v, w).abs() / (v.lorentz_norm() * w.lorentz_norm());
    match (cv, cw) {
        (TimeLike, TimeLike) => Ok(ratio.max(1.0).acosh()),
        (SpaceLike, SpaceLike) => Err(MinkowskiError::BothSpaceLike),
        _ => Ok(ratio.asinh()),
    }
}

/// Scales `v` to unit Lorentzian length, keeping the sign of `⟨v,v⟩`.
pub fn normalize(v: MinkVector3) -> Result<MinkVector3, MinkowskiError> {
    normalize_with_tol(v, DEFAULT_NULL_TOL)
}

pub fn normalize_with_tol(v: MinkVector3, null_tol: f64) -> Result<MinkVector3, MinkowskiError> {
    let q = v.quad();
    if q.abs() <= null_tol {
        return Err(MinkowskiError::NullVector(q.abs()));
    }
    Ok(v / q.abs().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(a: f64, b: f64, c: f64) -> MinkVector3 {
        MinkVector3::new(a, b, c)
    }

    #[test]
    fn inner_examples() {
        assert_eq!(lorentz_inner(v(1., 0., 0.), v(1., 0., 0.)), -1.0);
        assert_eq!(lorentz_inner(v(0., 1., 0.), v(0., 0., 1.)), 0.0);
        assert_eq!(lorentz_inner(v(2., 1., 0.), v(2., 1., 0.)), -3.0);
    }

    #[test]
    fn causal_examples() {
        let tol = DEFAULT_NULL_TOL;
        assert_eq!(causal_character(v(1., 0., 0.), tol), CausalCharacter::TimeLike);
        assert_eq!(causal_character(v(0., 1., 0.), tol), CausalCharacter::SpaceLike);
        assert_eq!(causal_character(v(1., 1., 0.), tol), CausalCharacter::LightLike);
        // inside the dead band
        assert_eq!(causal_character(v(1., 1. + 1e-12, 0.), tol), CausalCharacter::LightLike);
    }

    /// Solve `⟨u, z⟩ = det(v, w, z)` for `u` by probing with the basis vectors.
    fn cross_oracle(a: MinkVector3, b: MinkVector3) -> MinkVector3 {
        // ⟨u, E0⟩ = -u0, ⟨u, E1⟩ = u1, ⟨u, E2⟩ = u2
        v(-det3(a, b, MinkVector3::E0), det3(a, b, MinkVector3::E1), det3(a, b, MinkVector3::E2))
    }

    #[test]
    fn cross_examples() {
        let e1 = v(1., 0., 0.);
        let e2 = v(0., 1., 0.);
        let e3 = v(0., 0., 1.);
        assert_eq!(cross_oracle(e1, e2), v(0., 0., 1.));
        assert_eq!(cross_oracle(e2, e3), v(-1., 0., 0.));
        assert_eq!(lorentz_cross(e1, e2), v(0., 0., 1.));
        assert_eq!(lorentz_cross(e2, e3), v(-1., 0., 0.));
        let a = v(0.3, -1.2, 2.0);
        assert_eq!(lorentz_cross(a, a), MinkVector3::ZERO);
    }

    #[test]
    fn angle_examples() {
        let a: f64 = 0.8;
        let got = lorentz_angle(v(1., 0., 0.), v(a.cosh(), a.sinh(), 0.)).unwrap();
        assert!((got - a).abs() < 1e-14);
        assert_eq!(lorentz_angle(v(0., 1., 0.), v(1., 0., 0.)).unwrap(), 0.0);
        let got = lorentz_angle(v(1f64.sinh(), 1f64.cosh(), 0.), v(1., 0., 0.)).unwrap();
        assert!((got - 1.0).abs() < 1e-14);
    }

    #[test]
    fn angle_errors() {
        assert_eq!(lorentz_angle(v(1., 1., 0.), v(1., 0., 0.)), Err(MinkowskiError::NullArgument));
        assert_eq!(lorentz_angle(v(0., 1., 0.), v(0., 0., 1.)), Err(MinkowskiError::BothSpaceLike));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(v(0., 3., 4.)).unwrap();
        assert!((n - v(0., 0.6, 0.8)).euclid_norm() < 1e-15);
        assert_eq!(normalize(v(2., 0., 0.)).unwrap(), v(1., 0., 0.));
        assert!(matches!(normalize(v(1., 1., 0.)), Err(MinkowskiError::NullVector(_))));
    }

    fn unit_vec() -> impl Strategy<Value = MinkVector3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b, c)| v(a, b, c))
    }

    proptest! {
        #[test]
        fn cross_matches_determinant(a in unit_vec(), b in unit_vec(), c in unit_vec()) {
            let lhs = lorentz_inner(lorentz_cross(a, b), c);
            prop_assert!((lhs - det3(a, b, c)).abs() < 16.0 * f64::EPSILON * 8.0);
        }

        #[test]
        fn cross_is_orthogonal(a in unit_vec(), b in unit_vec()) {
            let u = lorentz_cross(a, b);
            prop_assert!(lorentz_inner(u, a).abs() < 1e-12);
            prop_assert!(lorentz_inner(u, b).abs() < 1e-12);
        }

        #[test]
        fn cross_bilinear_antisymmetric(a in unit_vec(), b in unit_vec(), c in unit_vec(), k in -3.0..3.0f64) {
            let lhs = lorentz_cross(a * k + c, b);
            let rhs = lorentz_cross(a, b) * k + lorentz_cross(c, b);
            prop_assert!((lhs - rhs).euclid_norm() < 1e-14);
            prop_assert!((lorentz_cross(a, b) + lorentz_cross(b, a)).euclid_norm() == 0.0);
        }

        #[test]
        fn angle_symmetric_and_scale_invariant(
            a in 0.0..2.0f64, b in -2.0..2.0f64, phi in 0.0..std::f64::consts::TAU,
            ka in 0.1..10.0f64, kb in 0.1..10.0f64,
        ) {
            // time-like unit vectors on the future sheet
            let tv = v(a.cosh(), a.sinh() * phi.cos(), a.sinh() * phi.sin());
            let tw = v(b.cosh(), b.sinh(), 0.0);
            let sw = v(b.sinh(), b.cosh(), 0.0);
            for w in [tw, sw] {
                let t1 = lorentz_angle(tv, w).unwrap();
                let t2 = lorentz_angle(w, tv).unwrap();
                let t3 = lorentz_angle(tv * ka, w * kb).unwrap();
                prop_assert!((t1 - t2).abs() < 1e-12);
                prop_assert!((t1 - t3).abs() < 1e-9);
            }
        }
    }
}
