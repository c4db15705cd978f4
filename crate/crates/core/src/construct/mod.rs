//! The classified GCR surfaces `x(s,t) = s (cosh u(s) φ(t) + sinh u(s) φ∧φ′(t))`.
//!
//! In the time-like cone `φ` runs on H²(−1) and the angle solves
//! `coth θ = s u′`; in the space-like cone `φ` runs on S²₁(1) and
//! `tanh θ = s u′`. Throughout, `μ = s > 0`.

mod profile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use profile::{flat_profile_case1, ProfileU, TabulatedProfile};

use crate::curves::{validate_curve, CurveError, PseudoSphereCurve, PseudoSphereKind};
use crate::geometry::{Mat2, SurfaceJet, SurfaceMap};
use crate::minkowski::{lorentz_cross, MinkVector3};
use crate::Interval;

const PROBE_S: usize = 65;
const PROBE_T: usize = 33;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("angle equation unsolvable at s = {s}: s*u'(s) = {su} but the {cone} needs {need}")]
    AngleUnsolvable { s: f64, su: f64, cone: Cone, need: &'static str },
    #[error("{cone} requires a curve on the {expected:?}, got {got:?}")]
    KindMismatch { cone: Cone, expected: PseudoSphereKind, got: PseudoSphereKind },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} = {value} outside the valid range [{lo}, {hi}]")]
    OutOfDomain { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("curve does not pass validation: {0}")]
    CurveInvalid(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cone {
    /// `⟨x,x⟩ < 0`.
    #[serde(rename = "timelike-cone")]
    TimeLikeCone,
    /// `⟨x,x⟩ > 0`.
    #[serde(rename = "spacelike-cone")]
    SpaceLikeCone,
}

impl std::fmt::Display for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cone::TimeLikeCone => "time-like cone",
            Cone::SpaceLikeCone => "space-like cone",
        })
    }
}

impl Cone {
    pub fn curve_kind(self) -> PseudoSphereKind {
        match self {
            Cone::TimeLikeCone => PseudoSphereKind::Hyperboloid,
            Cone::SpaceLikeCone => PseudoSphereKind::DeSitter,
        }
    }

    /// Sign of `⟨x,x⟩` in this cone.
    pub fn sign(self) -> f64 {
        match self {
            Cone::TimeLikeCone => -1.0,
            Cone::SpaceLikeCone => 1.0,
        }
    }
}

/// A classified GCR surface.
#[derive(Debug, Clone)]
pub struct GCRSurface {
    cone: Cone,
    profile: ProfileU,
    curve: PseudoSphereCurve,
    s_domain: Interval,
    t_domain: Interval,
}

/// `x = μ sinh θ e₁ + μ cosh θ N` (time-like cone) or `x = μ cosh θ e₁ + μ sinh θ N`
/// (space-like cone), with the module's normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedDecomposition {
    pub mu: f64,
    pub theta: f64,
    pub e1: MinkVector3,
    pub normal: MinkVector3,
}

/// Validates the inputs on a probe grid and returns the surface.
pub fn build_surface(
    cone: Cone,
    profile: ProfileU,
    curve: PseudoSphereCurve,
    s_domain: Interval,
    t_domain: Interval,
) -> Result<GCRSurface, ConstructError> {
    if curve.kind() != cone.curve_kind() {
        return Err(ConstructError::KindMismatch { cone, expected: cone.curve_kind(), got: curve.kind() });
    }
    if !(s_domain.lo > 0.0 && s_domain.hi > s_domain.lo) || !s_domain.hi.is_finite() {
        return Err(ConstructError::InvalidParameter(format!(
            "s range must satisfy 0 < lo < hi, got [{}, {}]",
            s_domain.lo, s_domain.hi
        )));
    }
    if !(t_domain.hi > t_domain.lo) || !t_domain.lo.is_finite() || !t_domain.hi.is_finite() {
        return Err(ConstructError::InvalidParameter(format!(
            "t range must satisfy lo < hi, got [{}, {}]",
            t_domain.lo, t_domain.hi
        )));
    }
    if !profile.covers(s_domain) {
        let v = profile.validity();
        let bad = if s_domain.hi >= v.hi { s_domain.hi } else { s_domain.lo };
        return Err(ConstructError::OutOfDomain { what: "s", value: bad, lo: v.lo, hi: v.hi });
    }
    let cd = curve.domain();
    if !(cd.contains(t_domain.lo) && cd.contains(t_domain.hi)) {
        let bad = if cd.contains(t_domain.lo) { t_domain.hi } else { t_domain.lo };
        return Err(ConstructError::OutOfDomain { what: "t", value: bad, lo: cd.lo, hi: cd.hi });
    }
    let surface = GCRSurface { cone, profile, curve, s_domain, t_domain };
    for s in s_domain.linspace(PROBE_S) {
        surface.theta_of_s(s)?;
    }
    let check = validate_curve(&surface.curve, &t_domain.linspace(PROBE_T))?;
    if !check.pass {
        return Err(ConstructError::CurveInvalid(format!(
            "constraint residual {:e}, arclength residual {:e}, tolerance {:e}",
            check.max_constraint_residual, check.max_arclength_residual, check.tolerance
        )));
    }
    Ok(surface)
}

impl GCRSurface {
    pub fn cone(&self) -> Cone {
        self.cone
    }

    pub fn profile(&self) -> &ProfileU {
        &self.profile
    }

    pub fn curve(&self) -> &PseudoSphereCurve {
        &self.curve
    }

    pub fn s_domain(&self) -> Interval {
        self.s_domain
    }

    pub fn t_domain(&self) -> Interval {
        self.t_domain
    }

    fn check_domain(&self, s: f64, t: f64) -> Result<(), ConstructError> {
        if !self.s_domain.contains(s) {
            return Err(ConstructError::OutOfDomain {
                what: "s",
                value: s,
                lo: self.s_domain.lo,
                hi: self.s_domain.hi,
            });
        }
        if !self.t_domain.contains(t) {
            return Err(ConstructError::OutOfDomain {
                what: "t",
                value: t,
                lo: self.t_domain.lo,
                hi: self.t_domain.hi,
            });
        }
        Ok(())
    }

    fn frame(&self, t: f64) -> (MinkVector3, MinkVector3) {
        let p = self.curve.eval_unchecked(t, 0);
        (p, lorentz_cross(p, self.curve.eval_unchecked(t, 1)))
    }

    fn angle(&self, s: f64, su: f64) -> Result<f64, ConstructError> {
        match self.cone {
            // arccoth keeps the sign of s u′, so sinh θ and s u′ agree
            Cone::TimeLikeCone if su.abs() > 1.0 => Ok(0.5 * ((su + 1.0) / (su - 1.0)).ln()),
            Cone::SpaceLikeCone if su.abs() < 1.0 => Ok(su.atanh()),
            cone => Err(ConstructError::AngleUnsolvable {
                s,
                su,
                cone,
                need: if cone == Cone::TimeLikeCone { "|s*u'| > 1" } else { "|s*u'| < 1" },
            }),
        }
    }

    /// `θ(s)` from `coth θ = s u′` or `tanh θ = s u′`.
    pub fn theta_of_s(&self, s: f64) -> Result<f64, ConstructError> {
        let su = s * self.profile.du(s)?;
        self.angle(s, su)
    }

    /// Position vector; `⟨x,x⟩ = ∓s²` by construction.
    pub fn eval_surface(&self, s: f64, t: f64) -> Result<MinkVector3, ConstructError> {
        self.check_domain(s, t)?;
        let u = self.profile.u(s)?;
        let (p, psi) = self.frame(t);
        Ok((p * u.cosh() + psi * u.sinh()) * s)
    }

    /// Unit normal. Time-like cone: `cosh(θ+u) φ + sinh(θ+u) ψ`, which is future-pointing.
    /// Space-like cone: `−(sinh(θ+u) φ + cosh(θ+u) ψ)`, the orientation for which
    /// `x = s (cosh θ e₁ + sinh θ N)` holds; it is future-pointing when `ψ` is past-pointing.
    pub fn analytic_normal(&self, s: f64, t: f64) -> Result<MinkVector3, ConstructError> {
        self.check_domain(s, t)?;
        let theta = self.theta_of_s(s)?;
        let w = theta + self.profile.u(s)?;
        let (p, psi) = self.frame(t);
        Ok(match self.cone {
            Cone::TimeLikeCone => p * w.cosh() + psi * w.sinh(),
            Cone::SpaceLikeCone => -(p * w.sinh() + psi * w.cosh()),
        })
    }

    pub fn predicted_decomposition(&self, s: f64, t: f64) -> Result<PredictedDecomposition, ConstructError> {
        let x = self.eval_surface(s, t)?;
        let normal = self.analytic_normal(s, t)?;
        let theta = self.theta_of_s(s)?;
        let mu = s;
        let e1 = match self.cone {
            Cone::TimeLikeCone => (x - normal * (mu * theta.cosh())) / (mu * theta.sinh()),
            Cone::SpaceLikeCone => (x - normal * (mu * theta.sinh())) / (mu * theta.cosh()),
        };
        Ok(PredictedDecomposition { mu, theta, e1, normal })
    }

    /// `diag(1/sinh²θ, m²)` or `diag(1/cosh²θ, m²)` with `m = s cosh u + C(t) s sinh u`.
    pub fn predicted_metric(&self, s: f64, t: f64) -> Result<Mat2, ConstructError> {
        self.check_domain(s, t)?;
        let theta = self.theta_of_s(s)?;
        let u = self.profile.u(s)?;
        let c = self.curve.geodesic_coefficient(t)?.value;
        let m = s * u.cosh() + c * s * u.sinh();
        let g_ss = match self.cone {
            Cone::TimeLikeCone => 1.0 / theta.sinh().powi(2),
            Cone::SpaceLikeCone => 1.0 / theta.cosh().powi(2),
        };
        Ok(Mat2::diag(g_ss, m * m))
    }

    /// Closed-form jet; needs the curve's derivatives through order 3 to be meaningful
    /// (lower-order curves fall back to FD inside the curve).
    pub fn jet(&self, s: f64, t: f64) -> Result<SurfaceJet, ConstructError> {
        self.check_domain(s, t)?;
        self.jet_unchecked(s, t)
    }

    fn jet_unchecked(&self, s: f64, t: f64) -> Result<SurfaceJet, ConstructError> {
        let [u, du, d2u] = self.profile.eval(s)?;
        let c = &self.curve;
        let p = c.eval_unchecked(t, 0);
        let p1 = c.eval_unchecked(t, 1);
        let p2 = c.eval_unchecked(t, 2);
        let p3 = c.eval_unchecked(t, 3);
        let psi = lorentz_cross(p, p1);
        let psi1 = lorentz_cross(p, p2);
        let psi2 = lorentz_cross(p1, p2) + lorentz_cross(p, p3);
        let (ch, sh) = (u.cosh(), u.sinh());
        let a = ch + s * du * sh;
        let b = sh + s * du * ch;
        let k = 2.0 * du + s * d2u;
        let a_s = k * sh + s * du * du * ch;
        let b_s = k * ch + s * du * du * sh;
        Ok(SurfaceJet {
            x: (p * ch + psi * sh) * s,
            x_s: p * a + psi * b,
            x_t: (p1 * ch + psi1 * sh) * s,
            x_ss: p * a_s + psi * b_s,
            x_st: p1 * a + psi1 * b,
            x_tt: (p2 * ch + psi2 * sh) * s,
        })
    }

    fn evaluable(&self, s: f64, t: f64) -> bool {
        if !(s > 0.0) || self.profile.eval(s).is_err() {
            return false;
        }
        let d = self.curve.domain();
        let margin = if self.curve.is_sampled() { 1e-3 * d.width() } else { 0.0 };
        t >= d.lo - margin && t <= d.hi + margin
    }
}

#[derive(Serialize)]
struct Descriptor<'a> {
    cone: Cone,
    profile: &'a ProfileU,
    curve: &'a str,
    s_range: [f64; 2],
    t_range: [f64; 2],
}

impl SurfaceMap for GCRSurface {
    fn eval(&self, s: f64, t: f64) -> Option<MinkVector3> {
        if !self.evaluable(s, t) {
            return None;
        }
        let u = self.profile.u(s).ok()?;
        let (p, psi) = self.frame(t);
        Some((p * u.cosh() + psi * u.sinh()) * s)
    }

    fn analytic_jet(&self, s: f64, t: f64) -> Option<SurfaceJet> {
        if self.curve.analytic_order() < 3 || !self.evaluable(s, t) {
            return None;
        }
        self.jet_unchecked(s, t).ok()
    }

    fn descriptor(&self) -> String {
        serde_json::to_string(&Descriptor {
            cone: self.cone,
            profile: &self.profile,
            curve: self.curve.label(),
            s_range: [self.s_domain.lo, self.s_domain.hi],
            t_range: [self.t_domain.lo, self.t_domain.hi],
        })
        .unwrap_or_default()
    }

    fn gcr(&self) -> Option<&GCRSurface> {
        Some(self)
    }
}
