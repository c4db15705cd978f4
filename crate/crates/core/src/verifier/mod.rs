//! Pointwise checks of the GCR relations on a parametrized surface.
//!
//! At a point with `x = x^T + x^⊥`, `μ = |⟨x,x⟩|^{1/2}` and `e₁ = x^T/|x^T|`:
//!
//! * time-like cone: `x = μ sinh θ e₁ + μ cosh θ N`, `k₁ = e₁(θ) − cosh θ/μ`,
//!   `∇_{e₂}e₁ = (1 + μ k₂ cosh θ)/(μ sinh θ) e₂`;
//! * space-like cone: `x = μ cosh θ e₁ + μ sinh θ N`, `k₁ = e₁(θ) + sinh θ/μ`,
//!   `∇_{e₂}e₁ = (1 + μ k₂ sinh θ)/(μ cosh θ) e₂`;
//!
//! and in both `∇_{e₁}e₁ = 0`, `e₂(θ) = 0`, `e₁(k₂) = (k₁ − k₂) · coeff`.

mod flatness;
mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use flatness::{check_flatness, flatness_from_report, FlatnessReport, K1Candidates};
pub use report::{
    full_report, CheckAggregate, CheckName, FlagCounts, Grid, Outcome, PointRecord, PointStatus, Tolerances,
    VerificationReport, VerifyOptions, DEFAULT_FIELD_STEP,
};

use crate::construct::Cone;
use crate::geometry::{Christoffels, GeometryError, ShapeData, SurfaceJet};
use crate::minkowski::{lorentz_inner, MinkVector3};

/// `|x^T| / μ` below this marks the frame as undefined.
pub const TAU_TANGENTIAL: f64 = 1e-6;
/// Slack on `cosh θ ≥ 1` in the time-like cone.
pub const TAU_ANGLE: f64 = 1e-8;
const TAU_NULL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("position vector is light-like (<x,x> = {quad:e})")]
    NullPosition { quad: f64 },
    #[error("time-like cone angle needs -<x,N>/mu >= 1, got {value}")]
    InconsistentAngle { value: f64 },
    #[error("tangential part of the position vector vanishes (|x^T|/mu = {ratio:e})")]
    DegenerateTangential { ratio: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The cone decomposition of the position vector at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionData {
    pub mu: f64,
    pub theta: f64,
    pub cone: Cone,
    /// Coordinate components of `e₁`, g-unit.
    pub e1_coords: [f64; 2],
    /// g-unit, g-orthogonal to `e₁`.
    pub e2_coords: [f64; 2],
    pub e1: MinkVector3,
    pub normal: MinkVector3,
    /// `|x^T|`.
    pub tangential_norm: f64,
}

impl DecompositionData {
    /// `x` rebuilt from `(μ, θ, e₁, N)`.
    pub fn reconstruct(&self) -> MinkVector3 {
        let (ch, sh) = (self.theta.cosh(), self.theta.sinh());
        match self.cone {
            Cone::TimeLikeCone => self.e1 * (self.mu * sh) + self.normal * (self.mu * ch),
            Cone::SpaceLikeCone => self.e1 * (self.mu * ch) + self.normal * (self.mu * sh),
        }
    }

    /// `k₁` predicted from `e₁(θ)`.
    pub fn k1_from_theta(&self, e1_theta: f64) -> f64 {
        match self.cone {
            Cone::TimeLikeCone => e1_theta - self.theta.cosh() / self.mu,
            Cone::SpaceLikeCone => e1_theta + self.theta.sinh() / self.mu,
        }
    }

    /// The factor `c` in `∇_{e₂}e₁ = c e₂`.
    pub fn connection_coefficient(&self, k2: f64) -> f64 {
        let (mu, ch, sh) = (self.mu, self.theta.cosh(), self.theta.sinh());
        match self.cone {
            Cone::TimeLikeCone => (1.0 + mu * k2 * ch) / (mu * sh),
            Cone::SpaceLikeCone => (1.0 + mu * k2 * sh) / (mu * ch),
        }
    }
}

/// Splits `x` into tangential and normal parts and reads off `μ`, `θ`, `e₁`, `e₂`.
pub fn decompose_position(j: &SurfaceJet, normal: MinkVector3) -> Result<DecompositionData, VerifyError> {
    let x = j.x;
    let quad = x.quad();
    if !(quad.abs() > TAU_NULL * x.euclid_norm().powi(2)) {
        return Err(VerifyError::NullPosition { quad });
    }
    let cone = if quad < 0.0 { Cone::TimeLikeCone } else { Cone::SpaceLikeCone };
    let mu = quad.abs().sqrt();
    let xn = -lorentz_inner(x, normal);

    let g = j.metric();
    let ginv = g.inverse().ok_or(GeometryError::DegenerateMetric { s: f64::NAN, t: f64::NAN, det: g.det() })?;
    let a = ginv.apply([lorentz_inner(x, j.x_s), lorentz_inner(x, j.x_t)]);
    let tangential_norm = g.norm(a);
    let ratio = tangential_norm / mu;

    let theta = match cone {
        Cone::TimeLikeCone => {
            let c = xn / mu;
            if c < 1.0 - TAU_ANGLE {
                return Err(VerifyError::InconsistentAngle { value: c });
            }
            // ln(cosh θ + sinh θ), well conditioned near θ = 0
            (c.max(1.0) + ratio).ln()
        }
        Cone::SpaceLikeCone => (xn / mu).asinh(),
    };
    if ratio < TAU_TANGENTIAL {
        return Err(VerifyError::DegenerateTangential { ratio });
    }
    let e1_coords = [a[0] / tangential_norm, a[1] / tangential_norm];
    let e2_coords = g.rotate(e1_coords);
    Ok(DecompositionData {
        mu,
        theta,
        cone,
        e1_coords,
        e2_coords,
        e1: j.push_forward(e1_coords),
        normal,
        tangential_norm,
    })
}

/// `‖S e₁ − λ e₁‖_g` with `λ = g(S e₁, e₁)`.
pub fn check_principal_direction(sd: &ShapeData, d: &DecompositionData) -> f64 {
    let a = d.e1_coords;
    let sa = sd.shape.apply(a);
    let lambda = sd.g.form(sa, a);
    sd.g.norm([sa[0] - lambda * a[0], sa[1] - lambda * a[1]])
}

/// The principal curvature along `e₁` and the other one: the eigenvalue whose
/// eigenvector is g-closest to `e₁` comes first.
pub fn principal_pair_along(sd: &ShapeData, d: &DecompositionData) -> (f64, f64) {
    if sd.umbilic {
        return (sd.k1, sd.k2);
    }
    let c1 = sd.g.form(sd.dir1, d.e1_coords).abs();
    let c2 = sd.g.form(sd.dir2, d.e1_coords).abs();
    if c1 >= c2 {
        (sd.k1, sd.k2)
    } else {
        (sd.k2, sd.k1)
    }
}

/// Central differences of a scalar field on the 5-point stencil `(s ± h, t)`, `(s, t ± h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarStencil {
    pub center: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub h: f64,
}

impl ScalarStencil {
    pub fn grad(&self) -> [f64; 2] {
        [(self.s_plus - self.s_minus) / (2.0 * self.h), (self.t_plus - self.t_minus) / (2.0 * self.h)]
    }

    /// Directional derivative along the coordinate vector `v`.
    pub fn along(&self, v: [f64; 2]) -> f64 {
        let g = self.grad();
        g[0] * v[0] + g[1] * v[1]
    }
}

/// `|e₂(θ)|`.
pub fn check_theta_transversal(theta: &ScalarStencil, d: &DecompositionData) -> f64 {
    theta.along(d.e2_coords).abs()
}

/// `|k_{e₁} − (e₁(θ) ∓ …)|` per cone.
pub fn check_k1_relation(k_e1: f64, d: &DecompositionData, theta: &ScalarStencil) -> f64 {
    (k_e1 - d.k1_from_theta(theta.along(d.e1_coords))).abs()
}

/// `(‖∇_{e₁}e₁‖_g, ‖∇_{e₂}e₁ − c e₂‖_g)` from the Christoffel symbols and the
/// `e₁` coordinate field on the stencil (`e1_field[k]` is component `k`).
pub fn check_connection_relation(
    chr: &Christoffels,
    g: &crate::geometry::Mat2,
    d: &DecompositionData,
    k2: f64,
    e1_field: &[ScalarStencil; 2],
) -> (f64, f64) {
    let g0 = e1_field[0].grad();
    let g1 = e1_field[1].grad();
    // dy[i][k] = ∂_i e1^k
    let dy = [[g0[0], g1[0]], [g0[1], g1[1]]];
    let n11 = chr.covariant(d.e1_coords, d.e1_coords, dy);
    let n21 = chr.covariant(d.e2_coords, d.e1_coords, dy);
    let c = d.connection_coefficient(k2);
    let r2 = [n21[0] - c * d.e2_coords[0], n21[1] - c * d.e2_coords[1]];
    (g.norm(n11), g.norm(r2))
}

/// `|e₁(k₂) − (k₁ − k₂) c|` with `k₁` from the `θ` relation.
pub fn check_codazzi_ode(d: &DecompositionData, k2: &ScalarStencil, theta: &ScalarStencil) -> f64 {
    let e1_k2 = k2.along(d.e1_coords);
    let k1 = d.k1_from_theta(theta.along(d.e1_coords));
    let rhs = (k1 - k2.center) * d.connection_coefficient(k2.center);
    (e1_k2 - rhs).abs()
}
