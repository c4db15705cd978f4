//! Unit-speed curves on the hyperboloid H²(−1) and the de Sitter sphere S²₁(1).
//!
//! A curve is either analytic (closures for the position and, optionally, its
//! derivatives) or sampled. Sampled curves are interpolated with not-a-knot
//! cubic splines in ambient coordinates and projected radially back onto the
//! pseudo-sphere. Missing derivatives come from central finite differences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minkowski::{lorentz_cross, lorentz_inner, MinkVector3};
use crate::spline::{CubicSpline, SplineError};
use crate::Interval;

/// Constraint and arclength tolerance for analytic curves.
pub const TAU_ANALYTIC: f64 = 1e-8;
/// Constraint and arclength tolerance for resampled curves.
pub const TAU_RESAMPLED: f64 = 1e-5;
/// Tolerance on frame identities (orthogonality, `φ∧φ″ ∥ φ′`).
pub const TAU_FRAME: f64 = 1e-6;
/// Default central-difference step for derivatives that are not supplied.
pub const DEFAULT_CURVE_FD_STEP: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("parameter t = {t} outside curve domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("derivative order {0} not supported (0..=3)")]
    BadOrder(usize),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PseudoSphereKind {
    /// Future sheet of `⟨φ,φ⟩ = −1`.
    Hyperboloid,
    /// `⟨φ,φ⟩ = +1`.
    DeSitter,
}

impl PseudoSphereKind {
    pub fn constraint(self) -> f64 {
        match self {
            Self::Hyperboloid => -1.0,
            Self::DeSitter => 1.0,
        }
    }

    /// Expected `⟨ψ,ψ⟩` for the binormal `ψ = φ∧φ′` of a unit-speed curve.
    pub fn binormal_sign(self) -> f64 {
        -self.constraint()
    }

    fn from_quad(q: f64) -> Option<Self> {
        if q < -0.5 {
            Some(Self::Hyperboloid)
        } else if q > 0.5 {
            Some(Self::DeSitter)
        } else {
            None
        }
    }
}

pub type VecFn = Arc<dyn Fn(f64) -> MinkVector3 + Send + Sync>;

/// Closures for the position and its first few derivatives.
#[derive(Clone)]
pub struct AnalyticCurve {
    /// `derivs[k]` is the k-th derivative; `derivs[0]` is the position.
    derivs: Vec<VecFn>,
}

impl AnalyticCurve {
    pub fn new(position: VecFn) -> Self {
        Self { derivs: vec![position] }
    }

    /// Appends the next derivative closure.
    pub fn with_derivative(mut self, d: VecFn) -> Self {
        if self.derivs.len() < 4 {
            self.derivs.push(d);
        }
        self
    }

    /// Highest derivative order supplied in closed form.
    pub fn analytic_order(&self) -> usize {
        self.derivs.len() - 1
    }
}

/// One curve sample `(t, φ(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CurveSample {
    pub fn new(t: f64, p: MinkVector3) -> Self {
        Self { t, c0: p.c0, c1: p.c1, c2: p.c2 }
    }

    pub fn point(&self) -> MinkVector3 {
        MinkVector3::new(self.c0, self.c1, self.c2)
    }
}

/// Spline through samples plus an optional arclength reparametrization.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    kind: PseudoSphereKind,
    comps: [CubicSpline; 3],
    arclength: Option<ArclengthMap>,
}

/// Cumulative Lorentzian arclength at the spline knots.
#[derive(Debug, Clone)]
struct ArclengthMap {
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] =
    [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

impl SampledCurve {
    fn new(kind: PseudoSphereKind, samples: &[CurveSample]) -> Result<Self, CurveError> {
        let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
        let col = |f: fn(&CurveSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
        let comps = [
            CubicSpline::new(&t, &col(|s| s.c0))?,
            CubicSpline::new(&t, &col(|s| s.c1))?,
            CubicSpline::new(&t, &col(|s| s.c2))?,
        ];
        Ok(Self { kind, comps, arclength: None })
    }

    /// Raw spline value and first derivative in the sample parameter.
    fn raw(&self, tau: f64) -> (MinkVector3, MinkVector3) {
        let [a, b, c] = [self.comps[0].eval_all(tau), self.comps[1].eval_all(tau), self.comps[2].eval_all(tau)];
        (MinkVector3::new(a[0], b[0], c[0]), MinkVector3::new(a[1], b[1], c[1]))
    }

    /// Radial projection of the spline onto the pseudo-sphere.
    fn project(&self, p: MinkVector3) -> MinkVector3 {
        let n = (self.kind.constraint() * p.quad()).abs().sqrt();
        p / n
    }

    /// Lorentzian speed of the projected spline in the sample parameter.
    fn projected_speed(&self, tau: f64) -> f64 {
        self.projected_derivative(tau).quad().max(0.0).sqrt()
    }

    /// Derivative of the projected spline in the sample parameter.
    fn projected_derivative(&self, tau: f64) -> MinkVector3 {
        let (p, dp) = self.raw(tau);
        let eps = self.kind.constraint();
        let n2 = eps * p.quad();
        let n = n2.abs().sqrt();
        dp / n - p * (eps * lorentz_inner(p, dp) / (n * n2))
    }

    fn segment_length(&self, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * self.projected_speed(mid + half * x)).sum::<f64>() * half
    }

    fn build_arclength(&mut self, subdivisions: usize) {
        let knots = self.comps[0].knots().to_vec();
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = knots[0];
        cumulative.push(acc);
        for w in knots.windows(2) {
            let h = (w[1] - w[0]) / subdivisions as f64;
            for k in 0..subdivisions {
                let a = w[0] + h * k as f64;
                acc += self.segment_length(a, a + h);
            }
            cumulative.push(acc);
        }
        self.arclength = Some(ArclengthMap { knots, cumulative });
    }

    /// Sample parameter at arclength `sigma` (Newton on the cumulative length).
    fn param_at(&self, sigma: f64) -> f64 {
        let Some(map) = &self.arclength else { return sigma };
        let n = map.knots.len();
        let i = match map.cumulative.partition_point(|&c| c <= sigma) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (t0, t1) = (map.knots[i], map.knots[i + 1]);
        let (l0, l1) = (map.cumulative[i], map.cumulative[i + 1]);
        let mut tau = t0 + (sigma - l0) * (t1 - t0) / (l1 - l0);
        for _ in 0..40 {
            let f = l0 + self.segment_length_fine(t0, tau) - sigma;
            let step = f / self.projected_speed(tau);
            tau -= step;
            if step.abs() <= 1e-15 * (1.0 + tau.abs()) {
                break;
            }
        }
        tau
    }

    fn segment_length_fine(&self, a: f64, b: f64) -> f64 {
        // two GL panels keep the partial-interval integral at the accuracy of the table
        let m = 0.5 * (a + b);
        self.segment_length(a, m) + self.segment_length(m, b)
    }

    fn position(&self, t: f64) -> MinkVector3 {
        let tau = self.param_at(t);
        self.project(self.raw(tau).0)
    }

    /// Tangent from the spline derivative; unit speed once the arclength map is built.
    fn tangent(&self, t: f64) -> MinkVector3 {
        let d = self.projected_derivative(self.param_at(t));
        match self.arclength {
            Some(_) => d / d.quad().max(0.0).sqrt(),
            None => d,
        }
    }

    fn domain(&self) -> Interval {
        match &self.arclength {
            Some(map) => Interval::new(map.cumulative[0], *map.cumulative.last().unwrap()),
            None => {
                let (lo, hi) = self.comps[0].domain();
                Interval::new(lo, hi)
            }
        }
    }
}

#[derive(Clone)]
enum CurveSource {
    Analytic(AnalyticCurve),
    Sampled(Arc<SampledCurve>),
}

/// A curve on H²(−1) or S²₁(1).
#[derive(Clone)]
pub struct PseudoSphereCurve {
    kind: PseudoSphereKind,
    source: CurveSource,
    domain: Interval,
    fd_step: f64,
    label: String,
}

impl fmt::Debug for PseudoSphereCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PseudoSphereCurve")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl PseudoSphereCurve {
    pub fn analytic(kind: PseudoSphereKind, curve: AnalyticCurve, domain: Interval) -> Self {
        Self {
            kind,
            source: CurveSource::Analytic(curve),
            domain,
            fd_step: DEFAULT_CURVE_FD_STEP,
            label: "analytic".into(),
        }
    }

    /// Interpolates samples without reparametrizing them.
    pub fn from_samples(kind: PseudoSphereKind, samples: &[CurveSample]) -> Result<Self, CurveError> {
        let sc = SampledCurve::new(kind, samples)?;
        let domain = sc.domain();
        Ok(Self {
            kind,
            source: CurveSource::Sampled(Arc::new(sc)),
            domain,
            fd_step: DEFAULT_CURVE_FD_STEP,
            label: "sampled".into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn kind(&self) -> PseudoSphereKind {
        self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.source, CurveSource::Sampled(_))
    }

    /// Highest derivative order available in closed form (0 for sampled curves).
    pub fn analytic_order(&self) -> usize {
        match &self.source {
            CurveSource::Analytic(a) => a.analytic_order(),
            CurveSource::Sampled(_) => 0,
        }
    }

    /// Constraint / arclength tolerance appropriate to the curve source.
    pub fn tolerance(&self) -> f64 {
        if self.is_sampled() {
            TAU_RESAMPLED
        } else {
            TAU_ANALYTIC
        }
    }

    /// `φ(t)`, `φ′(t)`, `φ″(t)` or `φ‴(t)`.
    pub fn eval(&self, t: f64, order: usize) -> Result<MinkVector3, CurveError> {
        if order > 3 {
            return Err(CurveError::BadOrder(order));
        }
        if !self.domain.contains(t) {
            return Err(CurveError::OutOfDomain { t, lo: self.domain.lo, hi: self.domain.hi });
        }
        Ok(self.eval_unchecked(t, order))
    }

    /// Evaluation without the domain check; FD stencils may step slightly outside.
    pub(crate) fn eval_unchecked(&self, t: f64, order: usize) -> MinkVector3 {
        match &self.source {
            CurveSource::Analytic(a) => {
                let top = a.analytic_order().min(order);
                let f = &a.derivs[top];
                central_difference(|x| f(x), t, order - top, self.fd_step)
            }
            CurveSource::Sampled(sc) if order == 0 => sc.position(t),
            // differencing the tangent rather than the position keeps φ″ and φ‴ one order less noisy
            CurveSource::Sampled(sc) => central_difference(|x| sc.tangent(x), t, order - 1, self.fd_step),
        }
    }

    /// `ψ = φ∧φ′`.
    pub fn binormal(&self, t: f64) -> Result<MinkVector3, CurveError> {
        Ok(lorentz_cross(self.eval(t, 0)?, self.eval(t, 1)?))
    }

    /// The coefficient `C(t)` in `φ∧φ″ = C(t) φ′` with the residual of that identity.
    pub fn geodesic_coefficient(&self, t: f64) -> Result<GeodesicCoefficient, CurveError> {
        let p = self.eval(t, 0)?;
        let d1 = self.eval(t, 1)?;
        let d2 = self.eval(t, 2)?;
        let w = lorentz_cross(p, d2);
        let value = lorentz_inner(w, d1) / lorentz_inner(d1, d1);
        Ok(GeodesicCoefficient { value, residual: (w - d1 * value).euclid_norm() })
    }
}

fn central_difference(f: impl Fn(f64) -> MinkVector3, t: f64, order: usize, h: f64) -> MinkVector3 {
    match order {
        0 => f(t),
        1 => (f(t + h) - f(t - h)) / (2.0 * h),
        2 => (f(t + h) - f(t) * 2.0 + f(t - h)) / (h * h),
        _ => (f(t + 2.0 * h) - f(t + h) * 2.0 + f(t - h) * 2.0 - f(t - 2.0 * h)) / (2.0 * h * h * h),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicCoefficient {
    pub value: f64,
    pub residual: f64,
}

/// Residual summary of `validate_curve`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveValidation {
    pub max_constraint_residual: f64,
    pub max_arclength_residual: f64,
    pub max_orthogonality_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `⟨φ,φ⟩ = ∓1` and `⟨φ′,φ′⟩ = 1` over `grid` at the curve's own tolerance.
pub fn validate_curve(c: &PseudoSphereCurve, grid: &[f64]) -> Result<CurveValidation, CurveError> {
    validate_curve_with_tol(c, grid, c.tolerance())
}

pub fn validate_curve_with_tol(
    c: &PseudoSphereCurve,
    grid: &[f64],
    tolerance: f64,
) -> Result<CurveValidation, CurveError> {
    if grid.is_empty() {
        return Err(CurveError::DegenerateSample("empty validation grid".into()));
    }
    let target = c.kind.constraint();
    let mut out = CurveValidation {
        max_constraint_residual: 0.0,
        max_arclength_residual: 0.0,
        max_orthogonality_residual: 0.0,
        tolerance,
        pass: true,
    };
    for &t in grid {
        let p = c.eval(t, 0)?;
        let d = c.eval(t, 1)?;
        let rc = (p.quad() - target).abs();
        let ra = (d.quad() - 1.0).abs();
        out.max_constraint_residual = out.max_constraint_residual.max(rc);
        out.max_arclength_residual = out.max_arclength_residual.max(ra);
        out.max_orthogonality_residual = out.max_orthogonality_residual.max(lorentz_inner(p, d).abs());
        if !(rc < tolerance && ra < tolerance) {
            out.pass = false;
        }
    }
    Ok(out)
}

/// Reparametrizes sampled points by cumulative Lorentzian arclength.
///
/// The kind is inferred from the sign of `⟨φ,φ⟩` at the first sample. The new
/// parameter starts at the first sample's `t`, so unit-speed input keeps its
/// parametrization.
pub fn resample_to_arclength(samples: &[CurveSample]) -> Result<PseudoSphereCurve, CurveError> {
    if samples.len() < 4 {
        return Err(CurveError::DegenerateSample(format!("need at least 4 samples, got {}", samples.len())));
    }
    let first = samples[0].point();
    let kind = PseudoSphereKind::from_quad(first.quad()).ok_or_else(|| {
        CurveError::DegenerateSample(format!("first sample is not on a pseudo-sphere (<p,p> = {})", first.quad()))
    })?;
    if kind == PseudoSphereKind::Hyperboloid && first.c0 <= 0.0 {
        return Err(CurveError::DegenerateSample("hyperboloid samples must lie on the future sheet".into()));
    }
    for (i, w) in samples.windows(2).enumerate() {
        let chord = w[1].point() - w[0].point();
        if !(chord.quad() > 0.0) {
            return Err(CurveError::DegenerateSample(format!(
                "chord {i} is causal or zero (<d,d> = {:e})",
                chord.quad()
            )));
        }
    }
    let mut sc = SampledCurve::new(kind, samples)?;
    sc.build_arclength(4);
    let domain = sc.domain();
    Ok(PseudoSphereCurve {
        kind,
        source: CurveSource::Sampled(Arc::new(sc)),
        domain,
        fd_step: DEFAULT_CURVE_FD_STEP,
        label: "resampled".into(),
    })
}

/// Built-in analytic curves, each unit-speed with derivatives through order 3.
pub mod builtin {
    use super::*;

    fn curve(kind: PseudoSphereKind, fs: [VecFn; 4], label: &str) -> PseudoSphereCurve {
        let [p, d1, d2, d3] = fs;
        let a = AnalyticCurve::new(p).with_derivative(d1).with_derivative(d2).with_derivative(d3);
        PseudoSphereCurve::analytic(kind, a, Interval::REAL).with_label(label)
    }

    /// `(cosh t, sinh t, 0)`: a geodesic of H²(−1).
    pub fn hyperbola() -> PseudoSphereCurve {
        curve(
            PseudoSphereKind::Hyperboloid,
            [
                Arc::new(|t: f64| MinkVector3::new(t.cosh(), t.sinh(), 0.0)),
                Arc::new(|t: f64| MinkVector3::new(t.sinh(), t.cosh(), 0.0)),
                Arc::new(|t: f64| MinkVector3::new(t.cosh(), t.sinh(), 0.0)),
                Arc::new(|t: f64| MinkVector3::new(t.sinh(), t.cosh(), 0.0)),
            ],
            "hyperbola",
        )
    }

    /// `(0, cos t, sin t)`: a geodesic of S²₁(1).
    pub fn circle() -> PseudoSphereCurve {
        curve(
            PseudoSphereKind::DeSitter,
            [
                Arc::new(|t: f64| MinkVector3::new(0.0, t.cos(), t.sin())),
                Arc::new(|t: f64| MinkVector3::new(0.0, -t.sin(), t.cos())),
                Arc::new(|t: f64| MinkVector3::new(0.0, -t.cos(), -t.sin())),
                Arc::new(|t: f64| MinkVector3::new(0.0, t.sin(), -t.cos())),
            ],
            "circle",
        )
    }

    /// Geodesic circle of radius `r` about `(1,0,0)` on H²(−1), unit speed. Not a geodesic.
    pub fn hyperbolic_circle(r: f64) -> PseudoSphereCurve {
        let (c, a) = (r.cosh(), r.sinh());
        curve(
            PseudoSphereKind::Hyperboloid,
            [
                Arc::new(move |t: f64| MinkVector3::new(c, a * (t / a).cos(), a * (t / a).sin())),
                Arc::new(move |t: f64| MinkVector3::new(0.0, -(t / a).sin(), (t / a).cos())),
                Arc::new(move |t: f64| MinkVector3::new(0.0, -(t / a).cos() / a, -(t / a).sin() / a)),
                Arc::new(move |t: f64| MinkVector3::new(0.0, (t / a).sin() / (a * a), -(t / a).cos() / (a * a))),
            ],
            "hyperbolic-circle",
        )
    }

    /// Parallel circle at height `sinh r` on S²₁(1), unit speed. Not a geodesic unless `r = 0`.
    pub fn de_sitter_parallel(r: f64) -> PseudoSphereCurve {
        let (h, b) = (r.sinh(), r.cosh());
        curve(
            PseudoSphereKind::DeSitter,
            [
                Arc::new(move |t: f64| MinkVector3::new(h, b * (t / b).cos(), b * (t / b).sin())),
                Arc::new(move |t: f64| MinkVector3::new(0.0, -(t / b).sin(), (t / b).cos())),
                Arc::new(move |t: f64| MinkVector3::new(0.0, -(t / b).cos() / b, -(t / b).sin() / b)),
                Arc::new(move |t: f64| MinkVector3::new(0.0, (t / b).sin() / (b * b), -(t / b).cos() / (b * b))),
            ],
            "de-sitter-parallel",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        Interval::new(a, b).linspace(n)
    }

    fn close(a: MinkVector3, b: MinkVector3, tol: f64) -> bool {
        (a - b).euclid_norm() < tol
    }

    fn speed2_hyperbola() -> PseudoSphereCurve {
        let a = AnalyticCurve::new(Arc::new(|t: f64| MinkVector3::new((2.0 * t).cosh(), (2.0 * t).sinh(), 0.0)));
        PseudoSphereCurve::analytic(PseudoSphereKind::Hyperboloid, a, Interval::REAL)
    }

    #[test]
    fn eval_examples() {
        let h = builtin::hyperbola();
        assert_eq!(h.eval(0.0, 0).unwrap(), MinkVector3::new(1.0, 0.0, 0.0));
        assert_eq!(h.eval(0.0, 1).unwrap(), MinkVector3::new(0.0, 1.0, 0.0));
        let c = builtin::circle();
        assert!(close(c.eval(std::f64::consts::FRAC_PI_2, 1).unwrap(), MinkVector3::new(0.0, -1.0, 0.0), 1e-15));
    }

    #[test]
    fn out_of_domain() {
        let c = builtin::circle().with_domain(Interval::new(0.0, 1.0));
        assert!(matches!(c.eval(1.5, 0), Err(CurveError::OutOfDomain { .. })));
        assert!(matches!(c.binormal(-0.1), Err(CurveError::OutOfDomain { .. })));
    }

    #[test]
    fn validate_examples() {
        let grid = linspace(-1.0, 1.0, 101);
        let v = validate_curve(&builtin::hyperbola(), &grid).unwrap();
        assert!(v.pass && v.max_constraint_residual < 1e-14 && v.max_arclength_residual < 1e-14);
        assert!(validate_curve(&builtin::circle(), &grid).unwrap().pass);
        let v = validate_curve(&speed2_hyperbola(), &grid).unwrap();
        assert!(!v.pass);
        // ⟨φ′,φ′⟩ = 4, up to the FD error of the derivative
        assert!((v.max_arclength_residual - 3.0).abs() < 1e-6, "{}", v.max_arclength_residual);
    }

    #[test]
    fn binormal_examples() {
        for t in [-0.7, 0.0, 1.3] {
            let psi = builtin::hyperbola().binormal(t).unwrap();
            assert!(close(psi, MinkVector3::new(0.0, 0.0, 1.0), 1e-14));
            assert!((psi.quad() - 1.0).abs() < 1e-14);
            let psi = builtin::circle().binormal(t).unwrap();
            assert!(close(psi, MinkVector3::new(-1.0, 0.0, 0.0), 1e-14));
            assert!((psi.quad() + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn frame_invariants_on_builtins() {
        let curves = [
            builtin::hyperbola(),
            builtin::circle(),
            builtin::hyperbolic_circle(0.7),
            builtin::de_sitter_parallel(0.4),
        ];
        for c in &curves {
            let v = validate_curve(c, &linspace(-2.0, 2.0, 41)).unwrap();
            assert!(v.pass, "{}: {v:?}", c.label());
            assert!(v.max_orthogonality_residual < TAU_FRAME);
            for t in linspace(-2.0, 2.0, 9) {
                let p = c.eval(t, 0).unwrap();
                let d = c.eval(t, 1).unwrap();
                let psi = c.binormal(t).unwrap();
                assert!((psi.quad() - c.kind().binormal_sign()).abs() < TAU_FRAME);
                assert!(lorentz_inner(psi, p).abs() < TAU_FRAME);
                assert!(lorentz_inner(psi, d).abs() < TAU_FRAME);
            }
        }
    }

    #[test]
    fn geodesic_coefficients() {
        for t in [-1.0, 0.0, 0.5] {
            let g = builtin::hyperbola().geodesic_coefficient(t).unwrap();
            assert!(g.value.abs() < 1e-14 && g.residual < 1e-14);
            let g = builtin::circle().geodesic_coefficient(t).unwrap();
            assert!(g.value.abs() < 1e-14 && g.residual < 1e-14);
        }
    }

    /// Brute-force oracle: FD derivatives of the raw map, then the identity directly.
    fn brute_force_c(f: impl Fn(f64) -> MinkVector3, t: f64) -> f64 {
        let h = 1e-4;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - f(t) * 2.0 + f(t - h)) / (h * h);
        lorentz_inner(lorentz_cross(f(t), d2), d1) / d1.quad()
    }

    #[test]
    fn non_geodesic_coefficient_on_resampled_curve() {
        // (cosh 1, sinh 1 cos w, sinh 1 sin w), speed sinh 1 in w
        let raw = |w: f64| MinkVector3::new(1f64.cosh(), 1f64.sinh() * w.cos(), 1f64.sinh() * w.sin());
        let samples: Vec<_> = linspace(0.0, 3.0, 2001).into_iter().map(|w| CurveSample::new(w, raw(w))).collect();
        let c = resample_to_arclength(&samples).unwrap();
        let unit = |sigma: f64| raw(sigma / 1f64.sinh());
        let expected = brute_force_c(unit, 1.0);
        assert!((expected + 1f64.cosh() / 1f64.sinh()).abs() < 1e-6);
        let dom = c.domain();
        for sigma in linspace(dom.lo + 0.2, dom.hi - 0.2, 7) {
            let g = c.geodesic_coefficient(sigma).unwrap();
            assert!((g.value - expected).abs() < 1e-4, "C = {} vs {expected}", g.value);
            assert!(g.residual < TAU_FRAME, "residual {}", g.residual);
        }
        let g = builtin::hyperbolic_circle(1.0).geodesic_coefficient(0.3).unwrap();
        assert!((g.value - expected).abs() < 1e-6);
    }

    #[test]
    fn resample_speed_two_hyperbola() {
        let samples: Vec<_> = linspace(-1.0, 1.0, 201)
            .into_iter()
            .map(|t| CurveSample::new(t, MinkVector3::new((2.0 * t).cosh(), (2.0 * t).sinh(), 0.0)))
            .collect();
        let c = resample_to_arclength(&samples).unwrap();
        let dom = c.domain();
        // arclength of the speed-2 curve over [-1, 1] is 4
        assert!((dom.hi - dom.lo - 4.0).abs() < 1e-8, "{dom:?}");
        let v = validate_curve_with_tol(&c, &linspace(dom.lo, dom.hi, 101), 10.0 * TAU_RESAMPLED).unwrap();
        assert!(v.pass, "{v:?}");
        // and it is the unit-speed hyperbola shifted to start at -1
        let p = c.eval(dom.lo + 2.0, 0).unwrap();
        assert!(close(p, MinkVector3::new(1.0, 0.0, 0.0), 1e-8), "{p:?}");
        // derivatives track the unit-speed hyperbola (sinh σ, cosh σ, 0), φ″ = φ
        for sigma in [-1.3, -0.4, 0.0, 0.7, 1.5] {
            let t = dom.lo + 2.0 + sigma;
            let d1 = c.eval(t, 1).unwrap();
            let d2 = c.eval(t, 2).unwrap();
            assert!((d1.quad() - 1.0).abs() < 1e-12, "{}", d1.quad());
            assert!(close(d1, MinkVector3::new(sigma.sinh(), sigma.cosh(), 0.0), 1e-7), "{d1:?}");
            assert!(close(d2, MinkVector3::new(sigma.cosh(), sigma.sinh(), 0.0), 1e-5), "{d2:?}");
        }
    }

    #[test]
    fn resample_is_identity_on_unit_speed_circle() {
        let ts = linspace(0.0, std::f64::consts::TAU, 1001);
        let samples: Vec<_> =
            ts.iter().map(|&t| CurveSample::new(t, MinkVector3::new(0.0, t.cos(), t.sin()))).collect();
        let c = resample_to_arclength(&samples).unwrap();
        for &t in ts.iter().step_by(50) {
            let p = c.eval(t.min(c.domain().hi), 0).unwrap();
            assert!(close(p, MinkVector3::new(0.0, t.cos(), t.sin()), 1e-9), "t={t}");
        }
        assert!((c.domain().hi - std::f64::consts::TAU).abs() < 1e-9);
    }

    #[test]
    fn resample_idempotent() {
        let raw = |w: f64| MinkVector3::new(0.5f64.sinh(), 0.5f64.cosh() * w.cos(), 0.5f64.cosh() * w.sin());
        let samples: Vec<_> =
            linspace(0.0, 2.0, 401).into_iter().map(|w| CurveSample::new(w * w + w, raw(w))).collect();
        let once = resample_to_arclength(&samples).unwrap();
        let dom = once.domain();
        let again_samples: Vec<_> =
            linspace(dom.lo, dom.hi, 401).into_iter().map(|s| CurveSample::new(s, once.eval(s, 0).unwrap())).collect();
        let twice = resample_to_arclength(&again_samples).unwrap();
        assert!((twice.domain().hi - dom.hi).abs() < 10.0 * TAU_RESAMPLED);
        for s in linspace(dom.lo, dom.hi, 23) {
            let a = once.eval(s, 0).unwrap();
            let b = twice.eval(s.min(twice.domain().hi), 0).unwrap();
            assert!(close(a, b, 10.0 * TAU_RESAMPLED));
        }
    }

    #[test]
    fn resample_rejects_degenerate_input() {
        let three: Vec<_> = linspace(0.0, 1.0, 3)
            .into_iter()
            .map(|t| CurveSample::new(t, MinkVector3::new(0.0, t.cos(), t.sin())))
            .collect();
        assert!(matches!(resample_to_arclength(&three), Err(CurveError::DegenerateSample(_))));
        let mut repeated: Vec<_> = linspace(0.0, 1.0, 6)
            .into_iter()
            .map(|t| CurveSample::new(t, MinkVector3::new(0.0, t.cos(), t.sin())))
            .collect();
        repeated[3] = CurveSample::new(repeated[3].t, repeated[2].point());
        assert!(matches!(resample_to_arclength(&repeated), Err(CurveError::DegenerateSample(_))));
    }

    #[test]
    fn fd_derivatives_converge_at_second_order() {
        // position-only closures force the FD path; compare to the builtin analytic derivatives
        for exact in [builtin::hyperbolic_circle(0.6), builtin::de_sitter_parallel(0.3)] {
            let e2 = exact.clone();
            let pos: VecFn = Arc::new(move |t| e2.eval_unchecked(t, 0));
            let t0 = 0.4;
            let errs: Vec<f64> = [0.04, 0.02, 0.01, 0.005]
                .iter()
                .map(|&h| {
                    let fd = PseudoSphereCurve::analytic(exact.kind(), AnalyticCurve::new(pos.clone()), Interval::REAL)
                        .with_fd_step(h);
                    (1..=2)
                        .map(|k| (fd.eval(t0, k).unwrap() - exact.eval(t0, k).unwrap()).euclid_norm())
                        .fold(0.0, f64::max)
                })
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({errs:?})");
            }
        }
    }
}
