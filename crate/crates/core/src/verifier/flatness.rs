use serde::Serialize;

use super::report::{full_report, hash_json, Grid, Outcome, PointStatus, VerificationReport, VerifyOptions};
use crate::construct::{Cone, ProfileU};
use crate::geometry::SurfaceMap;
use crate::io::json::to_sci_string;

/// Which reading of `k₁ = θ′ + u′` holds on a constructed surface: the `s`-derivative
/// or the `e₁`-derivative of `θ + u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct K1Candidates {
    /// `max |k_{e₁} − d(θ+u)/ds|`.
    pub s_derivative: f64,
    /// `max |k_{e₁} − e₁(θ+u)|`.
    pub e1_derivative: f64,
    /// `"e1-derivative"`, `"s-derivative"`, `"both"` or `"neither"` at the k₁ tolerance.
    pub holds: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub descriptor: String,
    pub config_hash: String,
    pub cone: Option<Cone>,
    pub count: usize,
    pub tolerance: f64,
    pub max_abs_k_ext: f64,
    pub min_abs_k_ext: f64,
    pub max_abs_k_e1: f64,
    /// Space-like cone: `max |e₁(θ) + sinh θ/μ|`, which vanishes exactly when `k₁ = 0`.
    pub flat_condition: Option<f64>,
    /// Space-like cone: `max |e₁(θ) − sinh θ/μ|`, the condition with the opposite sign.
    pub opposite_sign_condition: Option<f64>,
    /// Flat time-like-cone profiles: `max |θ + u − c₁|`.
    pub theta_plus_u: Option<f64>,
    pub k1_candidates: Option<K1Candidates>,
    pub flat: bool,
    pub outcome: Outcome,
}

impl FlatnessReport {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        to_sci_string(&serde_json::to_value(self).expect("flatness report serializes"))
    }
}

/// Runs the checks on `grid` and summarizes flatness.
pub fn check_flatness(map: &dyn SurfaceMap, grid: &Grid, opts: &VerifyOptions) -> FlatnessReport {
    flatness_from_report(map, &full_report(map, grid, opts), opts.field_step)
}

fn max_of(it: impl Iterator<Item = f64>) -> Option<f64> {
    it.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| if v.is_nan() || v > m { v } else { m })))
}

/// Flatness summary from an existing report on `map`.
pub fn flatness_from_report(map: &dyn SurfaceMap, report: &VerificationReport, field_step: f64) -> FlatnessReport {
    let tol = report.tolerances.flat;
    let pts: Vec<_> = report.points.iter().filter(|p| p.status != PointStatus::Error).collect();
    let k_ext: Vec<f64> = pts.iter().filter_map(|p| p.k_ext.map(f64::abs)).collect();
    let max_abs_k_ext = max_of(k_ext.iter().copied()).unwrap_or(0.0);
    let min_abs_k_ext = k_ext.iter().copied().fold(f64::INFINITY, f64::min);
    let max_abs_k_e1 = max_of(pts.iter().filter_map(|p| p.k_e1.map(f64::abs))).unwrap_or(0.0);

    let gcr = map.gcr();
    let cone = gcr.map(|g| g.cone()).or_else(|| {
        let x = pts.iter().find_map(|p| map.eval(p.s, p.t))?;
        Some(if x.quad() < 0.0 { Cone::TimeLikeCone } else { Cone::SpaceLikeCone })
    });

    let (flat_condition, opposite_sign_condition) = if cone == Some(Cone::SpaceLikeCone) {
        let terms: Vec<(f64, f64)> = pts.iter().filter_map(|p| Some((p.e1_theta?, p.theta?.sinh() / p.mu?))).collect();
        (max_of(terms.iter().map(|(e, s)| (e + s).abs())), max_of(terms.iter().map(|(e, s)| (e - s).abs())))
    } else {
        (None, None)
    };

    let mut theta_plus_u = None;
    let mut k1_candidates = None;
    if let Some(surface) = gcr {
        let profile = surface.profile();
        if let ProfileU::FlatCaseI { c1, .. } = profile {
            theta_plus_u = max_of(pts.iter().filter_map(|p| {
                let theta = p.theta? * f64::from(p.theta_sign?);
                Some((theta + profile.u(p.s).ok()? - c1).abs())
            }));
        }
        let h = field_step;
        let pairs: Vec<(f64, f64)> = pts
            .iter()
            .filter_map(|p| {
                let k = p.k_e1?;
                let sign = f64::from(p.theta_sign?);
                let du = profile.du(p.s).ok()?;
                let dtheta = (surface.theta_of_s(p.s + h).ok()? - surface.theta_of_s(p.s - h).ok()?) / (2.0 * h);
                let e1 = sign * p.e1_theta? + p.e1_coords?[0] * du;
                Some(((k - (dtheta + du)).abs(), (k - e1).abs()))
            })
            .collect();
        if let (Some(ds), Some(de)) = (max_of(pairs.iter().map(|p| p.0)), max_of(pairs.iter().map(|p| p.1))) {
            let ktol = report.tolerances.k1_relation;
            let holds = match (ds < ktol, de < ktol) {
                (true, true) => "both",
                (false, true) => "e1-derivative",
                (true, false) => "s-derivative",
                (false, false) => "neither",
            };
            k1_candidates = Some(K1Candidates { s_derivative: ds, e1_derivative: de, holds: holds.into() });
        }
    }

    let flat = max_abs_k_ext < tol
        && max_abs_k_e1 < tol
        && flat_condition.is_none_or(|v| v < report.tolerances.k1_relation)
        && theta_plus_u.is_none_or(|v| v < tol);
    let outcome = if report.outcome == Outcome::Degenerate {
        Outcome::Degenerate
    } else if flat {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    FlatnessReport {
        descriptor: report.descriptor.clone(),
        config_hash: hash_json(&(&report.config_hash, "flatness")),
        cone,
        count: pts.len(),
        tolerance: tol,
        max_abs_k_ext,
        min_abs_k_ext: if min_abs_k_ext.is_finite() { min_abs_k_ext } else { 0.0 },
        max_abs_k_e1,
        flat_condition,
        opposite_sign_condition,
        theta_plus_u,
        k1_candidates,
        flat,
        outcome,
    }
}
