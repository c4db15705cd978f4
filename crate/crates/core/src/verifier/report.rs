use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    check_codazzi_ode, check_connection_relation, check_k1_relation, check_principal_direction,
    check_theta_transversal, decompose_position, principal_pair_along, DecompositionData, ScalarStencil, VerifyError,
};
use crate::construct::GCRSurface;
use crate::geometry::{
    brioschi_intrinsic_k, gaussian_curvature, shape_at, Christoffels, GeometryError, JetConfig, JetSource, Mat2,
    SurfaceJet, SurfaceMap,
};
use crate::io::json::to_sci_string;
use crate::par::{map_indices, Execution};
use crate::Interval;

pub const DEFAULT_FIELD_STEP: f64 = 1e-3;

/// The checks, in the order used to pick the leading violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    PrincipalDirection,
    ThetaTransversal,
    K1Relation,
    ConnectionGeodesic,
    ConnectionE2,
    Codazzi,
    Gauss,
    Decomposition,
    ThetaAngle,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::PrincipalDirection,
        CheckName::ThetaTransversal,
        CheckName::K1Relation,
        CheckName::ConnectionGeodesic,
        CheckName::ConnectionE2,
        CheckName::Codazzi,
        CheckName::Gauss,
        CheckName::Decomposition,
        CheckName::ThetaAngle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::PrincipalDirection => "principal_direction",
            CheckName::ThetaTransversal => "theta_transversal",
            CheckName::K1Relation => "k1_relation",
            CheckName::ConnectionGeodesic => "connection_geodesic",
            CheckName::ConnectionE2 => "connection_e2",
            CheckName::Codazzi => "codazzi",
            CheckName::Gauss => "gauss",
            CheckName::Decomposition => "decomposition",
            CheckName::ThetaAngle => "theta_angle",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pass thresholds: a check passes when its maximum residual is below its entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub principal_direction: f64,
    pub theta_transversal: f64,
    pub k1_relation: f64,
    pub connection_geodesic: f64,
    pub connection_e2: f64,
    pub codazzi: f64,
    pub gauss: f64,
    pub decomposition: f64,
    pub theta_angle: f64,
    pub flat: f64,
}

impl Tolerances {
    /// Thresholds for closed-form jets.
    pub fn analytic() -> Self {
        Self {
            principal_direction: 1e-8,
            theta_transversal: 1e-4,
            k1_relation: 1e-3,
            connection_geodesic: 1e-3,
            connection_e2: 1e-3,
            codazzi: 1e-3,
            gauss: 1e-3,
            decomposition: 1e-10,
            theta_angle: 1e-8,
            flat: 1e-6,
        }
    }

    /// Thresholds for finite-difference jets.
    pub fn finite_difference() -> Self {
        Self { principal_direction: 1e-4, decomposition: 1e-6, theta_angle: 1e-6, flat: 1e-4, ..Self::analytic() }
    }

    pub fn get(&self, check: CheckName) -> f64 {
        match check {
            CheckName::PrincipalDirection => self.principal_direction,
            CheckName::ThetaTransversal => self.theta_transversal,
            CheckName::K1Relation => self.k1_relation,
            CheckName::ConnectionGeodesic => self.connection_geodesic,
            CheckName::ConnectionE2 => self.connection_e2,
            CheckName::Codazzi => self.codazzi,
            CheckName::Gauss => self.gauss,
            CheckName::Decomposition => self.decomposition,
            CheckName::ThetaAngle => self.theta_angle,
        }
    }

    /// Sets one threshold by name; `connection` sets both connection checks.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance {name} must be positive, got {value}"));
        }
        let slot = match name {
            "principal_direction" => &mut self.principal_direction,
            "theta_transversal" => &mut self.theta_transversal,
            "k1_relation" | "k1" => &mut self.k1_relation,
            "connection_geodesic" => &mut self.connection_geodesic,
            "connection_e2" => &mut self.connection_e2,
            "connection" => {
                self.connection_geodesic = value;
                &mut self.connection_e2
            }
            "codazzi" => &mut self.codazzi,
            "gauss" => &mut self.gauss,
            "decomposition" => &mut self.decomposition,
            "theta_angle" => &mut self.theta_angle,
            "flat" => &mut self.flat,
            _ => return Err(format!("unknown tolerance name {name:?}")),
        };
        *slot = value;
        Ok(())
    }
}

/// Rectangular parameter grid; point `k` is `(s_i, t_j)` with `k = i·nt + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub s_range: Interval,
    pub t_range: Interval,
    pub ns: usize,
    pub nt: usize,
}

impl Grid {
    pub fn new(s_range: Interval, t_range: Interval, ns: usize, nt: usize) -> Self {
        Self { s_range, t_range, ns, nt }
    }

    pub fn for_surface(surface: &GCRSurface, ns: usize, nt: usize) -> Self {
        Self::new(surface.s_domain(), surface.t_domain(), ns, nt)
    }

    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let ss = self.s_range.linspace(self.ns);
        let ts = self.t_range.linspace(self.nt);
        ss.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub jet: JetConfig,
    /// Step for derivatives of the derived fields (θ, k₂, e₁, g).
    pub field_step: f64,
    /// `None` picks analytic or finite-difference thresholds from the jets in use.
    pub tolerances: Option<Tolerances>,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            jet: JetConfig::default(),
            field_step: DEFAULT_FIELD_STEP,
            tolerances: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    /// Principal curvatures coincide; the frame is arbitrary.
    Umbilic,
    /// `x^T ≈ 0`.
    TangentialDegenerate,
    /// A stencil neighbour has `x^T ≈ 0`.
    StencilDegenerate,
    /// Geometric failure (not space-like, degenerate metric, light-like position, ...).
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub s: f64,
    pub t: f64,
    pub status: PointStatus,
    pub error: Option<String>,
    pub mu: Option<f64>,
    /// Recovered angle (frame sign).
    pub theta: Option<f64>,
    pub e1_coords: Option<[f64; 2]>,
    pub e1_theta: Option<f64>,
    pub k_e1: Option<f64>,
    pub k_other: Option<f64>,
    pub k_ext: Option<f64>,
    pub brioschi: Option<f64>,
    /// Sign relating the recovered `e₁` to the construction's.
    pub e1_sign: Option<i8>,
    /// Sign relating the recovered `θ` to the construction's.
    pub theta_sign: Option<i8>,
    pub residuals: BTreeMap<CheckName, f64>,
}

impl PointRecord {
    fn new(s: f64, t: f64) -> Self {
        Self {
            s,
            t,
            status: PointStatus::Ok,
            error: None,
            mu: None,
            theta: None,
            e1_coords: None,
            e1_theta: None,
            k_e1: None,
            k_other: None,
            k_ext: None,
            brioschi: None,
            e1_sign: None,
            theta_sign: None,
            residuals: BTreeMap::new(),
        }
    }

    fn fail(mut self, e: impl fmt::Display) -> Self {
        self.status = PointStatus::Error;
        self.error = Some(e.to_string());
        self
    }

    pub fn residual(&self, check: CheckName) -> Option<f64> {
        self.residuals.get(&check).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckAggregate {
    pub check: CheckName,
    pub tolerance: f64,
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    /// `(s, t)` of the largest residual.
    pub argmax: Option<[f64; 2]>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub umbilic: usize,
    pub tangential_degenerate: usize,
    pub stencil_degenerate: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Degenerate,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Degenerate => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub descriptor: String,
    pub config_hash: String,
    pub grid: Grid,
    pub jet: JetConfig,
    pub analytic_jets: bool,
    pub field_step: f64,
    pub tolerances: Tolerances,
    pub outcome: Outcome,
    pub leading_violation: Option<CheckName>,
    pub flags: FlagCounts,
    pub checks: Vec<CheckAggregate>,
    pub points: Vec<PointRecord>,
}

#[derive(Serialize)]
struct HashPayload<'a> {
    descriptor: &'a str,
    grid: &'a Grid,
    jet: &'a JetConfig,
    analytic_jets: bool,
    field_step: f64,
    tolerances: &'a Tolerances,
}

impl VerificationReport {
    pub fn check(&self, name: CheckName) -> Option<&CheckAggregate> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn max_residual(&self, name: CheckName) -> f64 {
        self.check(name).map_or(0.0, |c| c.max)
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    /// Pretty JSON, floats in 17-significant-digit scientific notation.
    pub fn to_json(&self) -> String {
        to_sci_string(&serde_json::to_value(self).expect("report serializes"))
    }

    /// One line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<20} {} max {:.3e} mean {:.3e} tol {:.1e} over {} points",
                    c.check.as_str(),
                    if c.pass { "PASS" } else { "FAIL" },
                    c.max,
                    c.mean,
                    c.tolerance,
                    c.count
                )
            })
            .collect()
    }
}

/// Hex SHA-256 of the canonical JSON of `value`.
pub(crate) fn hash_json(value: &impl Serialize) -> String {
    let text = to_sci_string(&serde_json::to_value(value).expect("hash payload serializes"));
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct Ctx<'a> {
    map: &'a dyn SurfaceMap,
    gcr: Option<&'a GCRSurface>,
    jet: JetConfig,
    h: f64,
}

/// Jet, shape data and decomposition at one point.
struct FrameSample {
    jet: SurfaceJet,
    dec: DecompositionData,
    k_other: f64,
}

enum SampleError {
    Tangential,
    Other(String),
}

impl Ctx<'_> {
    fn sample(&self, s: f64, t: f64) -> Result<FrameSample, SampleError> {
        let (jet, sd) = shape_at(self.map, s, t, self.jet, None).map_err(|e| SampleError::Other(e.to_string()))?;
        let dec = decompose_position(&jet, sd.normal).map_err(|e| match e {
            VerifyError::DegenerateTangential { .. } => SampleError::Tangential,
            e => SampleError::Other(located(e, s, t)),
        })?;
        let (_, k_other) = principal_pair_along(&sd, &dec);
        Ok(FrameSample { jet, dec, k_other })
    }

    fn evaluate(&self, s: f64, t: f64) -> PointRecord {
        let mut rec = PointRecord::new(s, t);
        let (jet, sd) = match shape_at(self.map, s, t, self.jet, None) {
            Ok(v) => v,
            Err(e) => return rec.fail(e),
        };
        let (k_ext, _) = gaussian_curvature(&sd);
        rec.k_ext = Some(k_ext);
        match brioschi_intrinsic_k(self.map, s, t, self.h, self.jet) {
            Ok(k) => {
                rec.brioschi = Some(k);
                rec.residuals.insert(CheckName::Gauss, (k + k_ext).abs());
            }
            Err(e) => return rec.fail(e),
        }

        let dec = match decompose_position(&jet, sd.normal) {
            Ok(d) => d,
            Err(VerifyError::DegenerateTangential { .. }) => {
                rec.status = PointStatus::TangentialDegenerate;
                return rec;
            }
            Err(e) => return rec.fail(located(e, s, t)),
        };
        rec.mu = Some(dec.mu);
        rec.theta = Some(dec.theta);
        rec.e1_coords = Some(dec.e1_coords);
        let (k_e1, k_other) = principal_pair_along(&sd, &dec);
        rec.k_e1 = Some(k_e1);
        rec.k_other = Some(k_other);
        self.construction_checks(&mut rec, &jet, &dec);

        if sd.umbilic {
            rec.status = PointStatus::Umbilic;
            return rec;
        }

        let h = self.h;
        let offsets = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)];
        let mut nb = Vec::with_capacity(4);
        for (ds, dt) in offsets {
            match self.sample(s + ds, t + dt) {
                Ok(v) => nb.push(v),
                Err(SampleError::Tangential) => {
                    rec.status = PointStatus::StencilDegenerate;
                    return rec;
                }
                Err(SampleError::Other(e)) => return rec.fail(e),
            }
        }
        let stencil = |center: f64, f: &dyn Fn(&FrameSample) -> f64| ScalarStencil {
            center,
            s_plus: f(&nb[0]),
            s_minus: f(&nb[1]),
            t_plus: f(&nb[2]),
            t_minus: f(&nb[3]),
            h,
        };
        let theta = stencil(dec.theta, &|n| n.dec.theta);
        let k2 = stencil(k_other, &|n| n.k_other);
        let e1_field =
            [stencil(dec.e1_coords[0], &|n| n.dec.e1_coords[0]), stencil(dec.e1_coords[1], &|n| n.dec.e1_coords[1])];
        let scale = |a: &Mat2, b: &Mat2| {
            let d = a.sub(b);
            Mat2::new(d.0[0][0] / (2.0 * h), d.0[0][1] / (2.0 * h), d.0[1][0] / (2.0 * h), d.0[1][1] / (2.0 * h))
        };
        let metric = |n: &FrameSample| n.jet.metric();
        let dg = [scale(&metric(&nb[0]), &metric(&nb[1])), scale(&metric(&nb[2]), &metric(&nb[3]))];
        let Some(chr) = Christoffels::from_metric(&sd.g, dg) else {
            return rec.fail(GeometryError::DegenerateMetric { s, t, det: sd.g.det() });
        };
        rec.e1_theta = Some(theta.along(dec.e1_coords));
        let r = &mut rec.residuals;
        r.insert(CheckName::PrincipalDirection, check_principal_direction(&sd, &dec));
        r.insert(CheckName::ThetaTransversal, check_theta_transversal(&theta, &dec));
        r.insert(CheckName::K1Relation, check_k1_relation(k_e1, &dec, &theta));
        let (c1, c2) = check_connection_relation(&chr, &sd.g, &dec, k_other, &e1_field);
        r.insert(CheckName::ConnectionGeodesic, c1);
        r.insert(CheckName::ConnectionE2, c2);
        r.insert(CheckName::Codazzi, check_codazzi_ode(&dec, &k2, &theta));
        rec
    }

    /// Reconstruction residual, and comparisons with the construction when present.
    fn construction_checks(&self, rec: &mut PointRecord, jet: &SurfaceJet, dec: &DecompositionData) {
        let mut decomposition = (dec.reconstruct() - jet.x).euclid_norm();
        if let Some(surface) = self.gcr {
            if let Ok(pred) = surface.predicted_decomposition(rec.s, rec.t) {
                let plus = (dec.e1 - pred.e1).euclid_norm();
                let minus = (dec.e1 + pred.e1).euclid_norm();
                rec.e1_sign = Some(if plus <= minus { 1 } else { -1 });
                decomposition = decomposition.max(plus.min(minus));
                let plus = (dec.theta - pred.theta).abs();
                let minus = (dec.theta + pred.theta).abs();
                rec.theta_sign = Some(if plus <= minus { 1 } else { -1 });
                rec.residuals.insert(CheckName::ThetaAngle, plus.min(minus));
            }
        }
        rec.residuals.insert(CheckName::Decomposition, decomposition);
    }
}

fn located(e: VerifyError, s: f64, t: f64) -> String {
    format!("{e} at (s, t) = ({s}, {t})")
}

/// Runs every check at every grid point and aggregates.
pub fn full_report(map: &dyn SurfaceMap, grid: &Grid, opts: &VerifyOptions) -> VerificationReport {
    let points = grid.points();
    let analytic_jets = opts.jet.source == JetSource::Analytic
        && points.first().is_some_and(|&(s, t)| map.analytic_jet(s, t).is_some());
    let tolerances = opts.tolerances.unwrap_or_else(|| {
        if analytic_jets {
            Tolerances::analytic()
        } else {
            Tolerances::finite_difference()
        }
    });
    let ctx = Ctx { map, gcr: map.gcr(), jet: opts.jet, h: opts.field_step };
    let records = map_indices(points.len(), opts.execution, |k| ctx.evaluate(points[k].0, points[k].1));
    let descriptor = map.descriptor();
    let config_hash = hash_json(&HashPayload {
        descriptor: &descriptor,
        grid,
        jet: &opts.jet,
        analytic_jets,
        field_step: opts.field_step,
        tolerances: &tolerances,
    });
    assemble(descriptor, config_hash, *grid, opts, analytic_jets, tolerances, records)
}

fn assemble(
    descriptor: String,
    config_hash: String,
    grid: Grid,
    opts: &VerifyOptions,
    analytic_jets: bool,
    tolerances: Tolerances,
    points: Vec<PointRecord>,
) -> VerificationReport {
    let mut flags = FlagCounts::default();
    for p in &points {
        match p.status {
            PointStatus::Ok => {}
            PointStatus::Umbilic => flags.umbilic += 1,
            PointStatus::TangentialDegenerate => flags.tangential_degenerate += 1,
            PointStatus::StencilDegenerate => flags.stencil_degenerate += 1,
            PointStatus::Error => flags.error += 1,
        }
    }
    let checks: Vec<CheckAggregate> = CheckName::ALL
        .iter()
        .map(|&check| {
            let tolerance = tolerances.get(check);
            let (mut count, mut sum, mut max, mut argmax) = (0usize, 0.0, 0.0f64, None);
            for p in &points {
                if let Some(r) = p.residual(check) {
                    count += 1;
                    sum += r;
                    // a NaN residual sticks as the maximum and fails the check
                    if argmax.is_none() || (!max.is_nan() && (r.is_nan() || r > max)) {
                        max = r;
                        argmax = Some([p.s, p.t]);
                    }
                }
            }
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            CheckAggregate { check, tolerance, count, max, mean, argmax, pass: count == 0 || max < tolerance }
        })
        .collect();
    let leading_violation = checks.iter().find(|c| !c.pass).map(|c| c.check);
    let outcome = if flags.error > 0 {
        Outcome::Degenerate
    } else if leading_violation.is_some() {
        Outcome::Fail
    } else {
        Outcome::Pass
    };
    VerificationReport {
        descriptor,
        config_hash,
        grid,
        jet: opts.jet,
        analytic_jets,
        field_step: opts.field_step,
        tolerances,
        outcome,
        leading_violation,
        flags,
        checks,
        points,
    }
}
