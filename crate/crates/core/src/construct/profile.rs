use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ConstructError;
use crate::spline::CubicSpline;
use crate::Interval;

/// The radial function `u(s)` of a GCR surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileU {
    /// `u = a ln s + b`; constant angle since `s u′ = a`.
    PowerLog { a: f64, b: f64 },
    /// `u = c1 − arccosh(c2 / s)` on `0 < s < c2`: the flat time-like-cone family.
    #[serde(rename = "flat-case1")]
    FlatCaseI { c1: f64, c2: f64 },
    /// Cubic interpolation of `(s, u)` samples.
    Tabulated(TabulatedProfile),
}

/// Tabulated profile; derivatives come from the interpolant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TabulatedRaw", into = "TabulatedRaw")]
pub struct TabulatedProfile {
    s: Vec<f64>,
    u: Vec<f64>,
    spline: Arc<CubicSpline>,
}

impl PartialEq for TabulatedProfile {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.u == other.u
    }
}

#[derive(Serialize, Deserialize)]
struct TabulatedRaw {
    s: Vec<f64>,
    u: Vec<f64>,
}

impl TryFrom<TabulatedRaw> for TabulatedProfile {
    type Error = String;
    fn try_from(raw: TabulatedRaw) -> Result<Self, String> {
        TabulatedProfile::new(raw.s, raw.u).map_err(|e| e.to_string())
    }
}

impl From<TabulatedProfile> for TabulatedRaw {
    fn from(p: TabulatedProfile) -> Self {
        TabulatedRaw { s: p.s, u: p.u }
    }
}

impl TabulatedProfile {
    pub fn new(s: Vec<f64>, u: Vec<f64>) -> Result<Self, ConstructError> {
        let spline = CubicSpline::new(&s, &u).map_err(|e| ConstructError::InvalidParameter(e.to_string()))?;
        Ok(Self { s, u, spline: Arc::new(spline) })
    }

    /// Samples `f` at `n` evenly spaced points of `[lo, hi]`.
    pub fn sample(f: impl Fn(f64) -> f64, range: Interval, n: usize) -> Result<Self, ConstructError> {
        let s = range.linspace(n);
        let u = s.iter().map(|&x| f(x)).collect();
        Self::new(s, u)
    }
}

impl ProfileU {
    /// Interval on which the profile is defined. `FlatCaseI` is open at both ends.
    pub fn validity(&self) -> Interval {
        match self {
            Self::PowerLog { .. } => Interval::new(0.0, f64::INFINITY),
            Self::FlatCaseI { c2, .. } => Interval::new(0.0, *c2),
            Self::Tabulated(t) => {
                let (lo, hi) = t.spline.domain();
                Interval::new(lo, hi)
            }
        }
    }

    /// Whether `[lo, hi]` lies inside the validity interval (strictly where it is open).
    pub fn covers(&self, range: Interval) -> bool {
        let v = self.validity();
        match self {
            Self::Tabulated(_) => range.lo >= v.lo && range.hi <= v.hi,
            _ => range.lo > v.lo && range.hi < v.hi,
        }
    }

    fn evaluable(&self, s: f64) -> bool {
        let v = self.validity();
        match self {
            // a little extrapolation so FD stencils can straddle the table ends
            Self::Tabulated(_) => {
                let m = 1e-3 * v.width();
                s >= v.lo - m && s <= v.hi + m
            }
            _ => s > v.lo && s < v.hi,
        }
    }

    /// `[u(s), u′(s), u″(s)]`.
    pub fn eval(&self, s: f64) -> Result<[f64; 3], ConstructError> {
        if !self.evaluable(s) {
            let v = self.validity();
            return Err(ConstructError::OutOfDomain { what: "s", value: s, lo: v.lo, hi: v.hi });
        }
        Ok(match self {
            Self::PowerLog { a, b } => [a * s.ln() + b, a / s, -a / (s * s)],
            Self::FlatCaseI { c1, c2 } => {
                let r = (c2 * c2 - s * s).sqrt();
                let u = c1 - (c2 / s).acosh();
                let du = c2 / (s * r);
                let d2u = c2 * (2.0 * s * s - c2 * c2) / (s * s * r * r * r);
                [u, du, d2u]
            }
            Self::Tabulated(t) => {
                let [u, du, d2u, _] = t.spline.eval_all(s);
                [u, du, d2u]
            }
        })
    }

    pub fn u(&self, s: f64) -> Result<f64, ConstructError> {
        Ok(self.eval(s)?[0])
    }

    pub fn du(&self, s: f64) -> Result<f64, ConstructError> {
        Ok(self.eval(s)?[1])
    }
}

/// The flat GCR profile of the time-like cone, `u(s) = c1 − arccosh(c2/s)`.
pub fn flat_profile_case1(c1: f64, c2: f64) -> Result<ProfileU, ConstructError> {
    if !(c2 > 0.0) || !c1.is_finite() || !c2.is_finite() {
        return Err(ConstructError::InvalidParameter(format!("flat profile needs c2 > 0, got c2 = {c2}")));
    }
    Ok(ProfileU::FlatCaseI { c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &ProfileU, s: f64) {
        let h = 1e-5;
        let [_, du, d2u] = p.eval(s).unwrap();
        let fd1 = (p.u(s + h).unwrap() - p.u(s - h).unwrap()) / (2.0 * h);
        let fd2 = (p.du(s + h).unwrap() - p.du(s - h).unwrap()) / (2.0 * h);
        assert!((du - fd1).abs() < 1e-7 * (1.0 + du.abs()), "u' {du} vs {fd1}");
        assert!((d2u - fd2).abs() < 1e-6 * (1.0 + d2u.abs()), "u'' {d2u} vs {fd2}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        fd_check(&ProfileU::PowerLog { a: 2.0, b: 0.3 }, 0.7);
        let flat = flat_profile_case1(0.3, 2.0).unwrap();
        for s in [0.5, 1.0, 1.41, 1.8] {
            fd_check(&flat, s);
        }
    }

    #[test]
    fn flat_profile_examples() {
        let p = flat_profile_case1(0.0, 2.0).unwrap();
        assert!((p.u(1.0).unwrap() + 2f64.acosh()).abs() < 1e-15);
        assert!((p.u(1.0).unwrap() + 1.316958).abs() < 1e-6);
        assert!(matches!(p.eval(2.0), Err(ConstructError::OutOfDomain { .. })));
        assert!(matches!(p.eval(0.0), Err(ConstructError::OutOfDomain { .. })));
        assert!(matches!(flat_profile_case1(0.0, 0.0), Err(ConstructError::InvalidParameter(_))));
        assert!(matches!(flat_profile_case1(0.0, -1.0), Err(ConstructError::InvalidParameter(_))));
    }

    #[test]
    fn tabulated_tracks_source() {
        let exact = ProfileU::PowerLog { a: 2.0, b: 0.0 };
        let tab =
            ProfileU::Tabulated(TabulatedProfile::sample(|s| 2.0 * s.ln(), Interval::new(0.4, 2.1), 401).unwrap());
        for s in [0.5, 1.0, 1.7, 2.0] {
            let a = exact.eval(s).unwrap();
            let b = tab.eval(s).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-9);
            assert!((a[1] - b[1]).abs() < 1e-6);
            assert!((a[2] - b[2]).abs() < 1e-3);
        }
        assert!(tab.covers(Interval::new(0.5, 2.0)));
        assert!(!tab.covers(Interval::new(0.3, 2.0)));
    }

    #[test]
    fn serde_shape() {
        let p: ProfileU = serde_json::from_str(r#"{"kind":"power-log","a":2,"b":0}"#).unwrap();
        assert_eq!(p, ProfileU::PowerLog { a: 2.0, b: 0.0 });
        let p: ProfileU = serde_json::from_str(r#"{"kind":"flat-case1","c1":0.3,"c2":2}"#).unwrap();
        assert_eq!(p, ProfileU::FlatCaseI { c1: 0.3, c2: 2.0 });
        let p: ProfileU = serde_json::from_str(r#"{"kind":"tabulated","s":[1,2,3,4],"u":[0,1,0,1]}"#).unwrap();
        assert!(matches!(p, ProfileU::Tabulated(_)));
        assert!(serde_json::from_str::<ProfileU>(r#"{"kind":"tabulated","s":[1,2],"u":[0,1]}"#).is_err());
    }
}
