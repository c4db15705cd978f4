//! Numerical differential geometry of parametrized surfaces in E³₁.
//!
//! Conventions: `g_ij = ⟨x_i, x_j⟩`, `b_ij = ⟨x_ij, N⟩` with the future-pointing
//! unit normal (`⟨N,N⟩ = −1`, `N.c0 > 0`), and shape operator `S = g⁻¹ b`, so
//! that `⟨S X, Y⟩ = b(X, Y)`. Index 0 is `s`, index 1 is `t`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::GCRSurface;
use crate::minkowski::{lorentz_cross, lorentz_inner, MinkVector3};
use crate::Interval;

pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const TAU_EIG: f64 = 1e-10;
pub const TAU_UMBILIC: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("finite-difference stencil leaves the map domain near (s, t) = ({s}, {t})")]
    StencilOutOfDomain { s: f64, t: f64 },
    #[error("tangent vectors are linearly dependent at (s, t) = ({s}, {t})")]
    DegenerateTangentPlane { s: f64, t: f64 },
    #[error("surface is not space-like at (s, t) = ({s}, {t}): <n,n> = {quad:e}")]
    NotSpaceLike { s: f64, t: f64, quad: f64 },
    #[error("degenerate first fundamental form at (s, t) = ({s}, {t}): det g = {det:e}")]
    DegenerateMetric { s: f64, t: f64, det: f64 },
}

/// A parametrized surface `(s, t) ↦ x(s, t)`.
pub trait SurfaceMap: Send + Sync {
    /// `None` when `(s, t)` is outside the region where the map is defined.
    fn eval(&self, s: f64, t: f64) -> Option<MinkVector3>;

    /// Closed-form partials, when the map can provide them.
    fn analytic_jet(&self, _s: f64, _t: f64) -> Option<SurfaceJet> {
        None
    }

    /// Stable text identifying the map, fed into report hashes.
    fn descriptor(&self) -> String {
        "raw-map".into()
    }

    /// Construction metadata, present for surfaces built by [`crate::build_surface`].
    fn gcr(&self) -> Option<&GCRSurface> {
        None
    }
}

/// A closure-backed [`SurfaceMap`].
pub struct FnMap<F> {
    f: F,
    s_domain: Interval,
    t_domain: Interval,
    label: String,
}

impl<F> FnMap<F>
where
    F: Fn(f64, f64) -> MinkVector3 + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { f, s_domain: Interval::REAL, t_domain: Interval::REAL, label: label.into() }
    }

    /// Restricts the region where the map may be evaluated.
    pub fn with_domain(mut self, s_domain: Interval, t_domain: Interval) -> Self {
        self.s_domain = s_domain;
        self.t_domain = t_domain;
        self
    }
}

impl<F> SurfaceMap for FnMap<F>
where
    F: Fn(f64, f64) -> MinkVector3 + Send + Sync,
{
    fn eval(&self, s: f64, t: f64) -> Option<MinkVector3> {
        if self.s_domain.contains(s) && self.t_domain.contains(t) {
            Some((self.f)(s, t)).filter(|x| x.is_finite())
        } else {
            None
        }
    }

    fn descriptor(&self) -> String {
        self.label.clone()
    }
}

impl<M: SurfaceMap + ?Sized> SurfaceMap for &M {
    fn eval(&self, s: f64, t: f64) -> Option<MinkVector3> {
        (**self).eval(s, t)
    }
    fn analytic_jet(&self, s: f64, t: f64) -> Option<SurfaceJet> {
        (**self).analytic_jet(s, t)
    }
    fn descriptor(&self) -> String {
        (**self).descriptor()
    }
    fn gcr(&self) -> Option<&GCRSurface> {
        (**self).gcr()
    }
}

/// Where the partial derivatives of a jet come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetSource {
    /// Closed-form partials when the map supplies them, finite differences otherwise.
    Analytic,
    /// Always finite differences.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetConfig {
    pub source: JetSource,
    pub step: f64,
}

impl Default for JetConfig {
    fn default() -> Self {
        Self { source: JetSource::Analytic, step: DEFAULT_FD_STEP }
    }
}

impl JetConfig {
    pub fn analytic() -> Self {
        Self::default()
    }

    pub fn fd(step: f64) -> Self {
        Self { source: JetSource::FiniteDifference, step }
    }
}

/// Position and partials up to second order at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub x: MinkVector3,
    pub x_s: MinkVector3,
    pub x_t: MinkVector3,
    pub x_ss: MinkVector3,
    pub x_st: MinkVector3,
    pub x_tt: MinkVector3,
}

impl SurfaceJet {
    pub fn is_finite(&self) -> bool {
        [self.x, self.x_s, self.x_t, self.x_ss, self.x_st, self.x_tt].iter().all(|v| v.is_finite())
    }

    /// Largest Euclidean difference over the six entries.
    pub fn max_diff(&self, other: &Self) -> f64 {
        [
            self.x - other.x,
            self.x_s - other.x_s,
            self.x_t - other.x_t,
            self.x_ss - other.x_ss,
            self.x_st - other.x_st,
            self.x_tt - other.x_tt,
        ]
        .iter()
        .map(|d| d.euclid_norm())
        .fold(0.0, f64::max)
    }

    pub fn metric(&self) -> Mat2 {
        let e = self.x_s.quad();
        let f = lorentz_inner(self.x_s, self.x_t);
        let g = self.x_t.quad();
        Mat2::new(e, f, f, g)
    }

    /// Tangent vector with coordinate components `a = (a_s, a_t)`.
    pub fn push_forward(&self, a: [f64; 2]) -> MinkVector3 {
        self.x_s * a[0] + self.x_t * a[1]
    }
}

/// Jet of `map` at `(s, t)`.
pub fn jet(map: &dyn SurfaceMap, s: f64, t: f64, cfg: JetConfig) -> Result<SurfaceJet, GeometryError> {
    if cfg.source == JetSource::Analytic {
        if let Some(j) = map.analytic_jet(s, t) {
            return Ok(j);
        }
    }
    fd_jet(map, s, t, cfg.step)
}

fn fd_jet(map: &dyn SurfaceMap, s: f64, t: f64, h: f64) -> Result<SurfaceJet, GeometryError> {
    let at = |ds: f64, dt: f64| map.eval(s + ds, t + dt).ok_or(GeometryError::StencilOutOfDomain { s, t });
    let x = at(0.0, 0.0)?;
    let sp = at(h, 0.0)?;
    let sm = at(-h, 0.0)?;
    let tp = at(0.0, h)?;
    let tm = at(0.0, -h)?;
    let pp = at(h, h)?;
    let pm = at(h, -h)?;
    let mp = at(-h, h)?;
    let mm = at(-h, -h)?;
    Ok(SurfaceJet {
        x,
        x_s: (sp - sm) / (2.0 * h),
        x_t: (tp - tm) / (2.0 * h),
        x_ss: (sp - x * 2.0 + sm) / (h * h),
        x_tt: (tp - x * 2.0 + tm) / (h * h),
        x_st: (pp - pm - mp + mm) / (4.0 * h * h),
    })
}

/// Future-pointing unit normal `N ∝ x_s ∧ x_t`.
pub fn unit_normal(j: &SurfaceJet) -> Result<MinkVector3, GeometryError> {
    unit_normal_at(j, f64::NAN, f64::NAN)
}

fn unit_normal_at(j: &SurfaceJet, s: f64, t: f64) -> Result<MinkVector3, GeometryError> {
    let n = lorentz_cross(j.x_s, j.x_t);
    let scale = j.x_s.euclid_norm() * j.x_t.euclid_norm();
    if !(n.euclid_norm() > 1e-12 * scale) {
        return Err(GeometryError::DegenerateTangentPlane { s, t });
    }
    let quad = n.quad();
    if !(quad < -1e-10 * scale * scale) {
        return Err(GeometryError::NotSpaceLike { s, t, quad });
    }
    let n = n / (-quad).sqrt();
    Ok(if n.c0 < 0.0 { -n } else { n })
}

/// 2×2 matrix, row-major.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Self::new(a, 0.0, 0.0, d)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Self::new(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Bilinear form `uᵀ M v`.
    pub fn form(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let mv = self.apply(v);
        u[0] * mv[0] + u[1] * mv[1]
    }

    /// g-length of a coordinate vector, for `self` a metric.
    pub fn norm(&self, v: [f64; 2]) -> f64 {
        self.form(v, v).max(0.0).sqrt()
    }

    /// Rotates `a` by a right angle in this metric, preserving its g-length.
    pub fn rotate(&self, a: [f64; 2]) -> [f64; 2] {
        let w = self.apply(a);
        let r = self.det().sqrt();
        [-w[1] / r, w[0] / r]
    }
}

/// First and second fundamental forms with principal data at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeData {
    pub g: Mat2,
    pub b: Mat2,
    pub shape: Mat2,
    pub k1: f64,
    pub k2: f64,
    /// Coordinate components of the principal directions, g-normalized.
    pub dir1: [f64; 2],
    pub dir2: [f64; 2],
    pub normal: MinkVector3,
    pub umbilic: bool,
}

impl ShapeData {
    /// `‖S v − k v‖_g` for a g-unit coordinate vector `v`.
    pub fn eigen_residual(&self, v: [f64; 2], k: f64) -> f64 {
        let sv = self.shape.apply(v);
        self.g.norm([sv[0] - k * v[0], sv[1] - k * v[1]])
    }
}

pub fn shape_data(j: &SurfaceJet) -> Result<ShapeData, GeometryError> {
    shape_data_with_hint(j, None)
}

/// Shape data with principal pairs sorted by `|k|`; near-ties put the direction
/// closest (in g-angle) to `hint` first.
pub fn shape_data_with_hint(j: &SurfaceJet, hint: Option<[f64; 2]>) -> Result<ShapeData, GeometryError> {
    shape_data_at(j, hint, f64::NAN, f64::NAN)
}

fn shape_data_at(j: &SurfaceJet, hint: Option<[f64; 2]>, s: f64, t: f64) -> Result<ShapeData, GeometryError> {
    let normal = unit_normal_at(j, s, t)?;
    let g = j.metric();
    let det = g.det();
    if !(det > 0.0 && g.0[0][0] > 0.0) {
        return Err(GeometryError::DegenerateMetric { s, t, det });
    }
    let b = Mat2::new(
        lorentz_inner(j.x_ss, normal),
        lorentz_inner(j.x_st, normal),
        lorentz_inner(j.x_st, normal),
        lorentz_inner(j.x_tt, normal),
    );
    let ginv = g.inverse().ok_or(GeometryError::DegenerateMetric { s, t, det })?;
    let shape = ginv.mul(&b);

    let half_tr = 0.5 * shape.trace();
    let disc = (half_tr * half_tr - shape.det()).max(0.0).sqrt();
    let (lp, lm) = (half_tr + disc, half_tr - disc);
    let umbilic = lp - lm < TAU_UMBILIC;

    let unit = |v: [f64; 2]| {
        let n = g.norm(v);
        [v[0] / n, v[1] / n]
    };
    let (mut k1, mut k2, mut dir1) = if umbilic {
        (half_tr, half_tr, unit(hint.unwrap_or([1.0, 0.0])))
    } else {
        (lp, lm, unit(eigenvector(&shape, lp)))
    };
    let mut dir2 = g.rotate(dir1);

    let swap = if umbilic {
        false
    } else if (k1.abs() - k2.abs()).abs() < TAU_UMBILIC {
        match hint {
            Some(h) => g.form(dir2, h).abs() > g.form(dir1, h).abs(),
            None => false,
        }
    } else {
        k2.abs() > k1.abs()
    };
    if swap {
        std::mem::swap(&mut k1, &mut k2);
        std::mem::swap(&mut dir1, &mut dir2);
    }
    Ok(ShapeData { g, b, shape, k1, k2, dir1, dir2, normal, umbilic })
}

fn eigenvector(m: &Mat2, lambda: f64) -> [f64; 2] {
    let a = &m.0;
    let v1 = [a[0][1], lambda - a[0][0]];
    let v2 = [lambda - a[1][1], a[1][0]];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    if n1 >= n2 {
        v1
    } else {
        v2
    }
}

/// `(K_ext, K_int)` with `K_ext = k1 k2 = det S` and `K_int = −K_ext` (time-like normal).
pub fn gaussian_curvature(sd: &ShapeData) -> (f64, f64) {
    let k = sd.shape.det();
    (k, -k)
}

/// First fundamental form at `(s, t)`.
pub fn metric_at(map: &dyn SurfaceMap, s: f64, t: f64, cfg: JetConfig) -> Result<Mat2, GeometryError> {
    if cfg.source == JetSource::Analytic {
        if let Some(j) = map.analytic_jet(s, t) {
            return Ok(j.metric());
        }
    }
    let h = cfg.step;
    let at = |ds: f64, dt: f64| map.eval(s + ds, t + dt).ok_or(GeometryError::StencilOutOfDomain { s, t });
    let x_s = (at(h, 0.0)? - at(-h, 0.0)?) / (2.0 * h);
    let x_t = (at(0.0, h)? - at(0.0, -h)?) / (2.0 * h);
    let e = x_s.quad();
    let f = lorentz_inner(x_s, x_t);
    Ok(Mat2::new(e, f, f, x_t.quad()))
}

/// `Γ^k_ij`, stored as `gamma[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Christoffels {
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl Christoffels {
    /// Levi-Civita symbols from the metric and its coordinate derivatives.
    pub fn from_metric(g: &Mat2, dg: [Mat2; 2]) -> Option<Self> {
        let ginv = g.inverse()?;
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for (k, gk) in gamma.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    gk[i][j] =
                        (0..2).map(|l| 0.5 * ginv.0[k][l] * (dg[i].0[j][l] + dg[j].0[i][l] - dg[l].0[i][j])).sum();
                }
            }
        }
        Some(Self { gamma })
    }

    /// Coordinate components of `∇_X Y` given `Y` and its partials `dy[i] = ∂_i Y`.
    #[allow(clippy::needless_range_loop)]
    pub fn covariant(&self, x: [f64; 2], y: [f64; 2], dy: [[f64; 2]; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..2 {
                let mut term = dy[i][k];
                for j in 0..2 {
                    term += self.gamma[k][i][j] * y[j];
                }
                *o += x[i] * term;
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        (0..2).map(|k| (self.gamma[k][0][1] - self.gamma[k][1][0]).abs()).fold(0.0, f64::max)
    }
}

/// Christoffel symbols from central differences of the metric field with step `field_step`.
pub fn christoffels(
    map: &dyn SurfaceMap,
    s: f64,
    t: f64,
    field_step: f64,
    cfg: JetConfig,
) -> Result<Christoffels, GeometryError> {
    let h = field_step;
    let g = metric_at(map, s, t, cfg)?;
    let d_s = metric_at(map, s + h, t, cfg)?.sub(&metric_at(map, s - h, t, cfg)?);
    let d_t = metric_at(map, s, t + h, cfg)?.sub(&metric_at(map, s, t - h, cfg)?);
    let scale =
        |m: Mat2| Mat2::new(m.0[0][0] / (2.0 * h), m.0[0][1] / (2.0 * h), m.0[1][0] / (2.0 * h), m.0[1][1] / (2.0 * h));
    Christoffels::from_metric(&g, [scale(d_s), scale(d_t)]).ok_or(GeometryError::DegenerateMetric {
        s,
        t,
        det: g.det(),
    })
}

/// Intrinsic Gaussian curvature from the metric alone (Brioschi formula).
pub fn brioschi_intrinsic_k(
    map: &dyn SurfaceMap,
    s: f64,
    t: f64,
    field_step: f64,
    cfg: JetConfig,
) -> Result<f64, GeometryError> {
    let h = field_step;
    let m = |ds: f64, dt: f64| metric_at(map, s + ds, t + dt, cfg);
    let c = m(0.0, 0.0)?;
    let (sp, sm, tp, tm) = (m(h, 0.0)?, m(-h, 0.0)?, m(0.0, h)?, m(0.0, -h)?);
    let (pp, pm, mp, mm) = (m(h, h)?, m(h, -h)?, m(-h, h)?, m(-h, -h)?);
    let e = |g: &Mat2| g.0[0][0];
    let f = |g: &Mat2| g.0[0][1];
    let gg = |g: &Mat2| g.0[1][1];
    let d1 = |p: f64, q: f64| (p - q) / (2.0 * h);
    let (e0, f0, g0) = (e(&c), f(&c), gg(&c));
    let (e_s, e_t) = (d1(e(&sp), e(&sm)), d1(e(&tp), e(&tm)));
    let (f_s, f_t) = (d1(f(&sp), f(&sm)), d1(f(&tp), f(&tm)));
    let (g_s, g_t) = (d1(gg(&sp), gg(&sm)), d1(gg(&tp), gg(&tm)));
    let e_tt = (e(&tp) - 2.0 * e0 + e(&tm)) / (h * h);
    let g_ss = (gg(&sp) - 2.0 * g0 + gg(&sm)) / (h * h);
    let f_st = (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h);

    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let m1 =
        [[-0.5 * e_tt + f_st - 0.5 * g_ss, 0.5 * e_s, f_s - 0.5 * e_t], [f_t - 0.5 * g_s, e0, f0], [0.5 * g_t, f0, g0]];
    let m2 = [[0.0, 0.5 * e_t, 0.5 * g_s], [0.5 * e_t, e0, f0], [0.5 * g_s, f0, g0]];
    let w = e0 * g0 - f0 * f0;
    if !(w > 0.0) {
        return Err(GeometryError::DegenerateMetric { s, t, det: w });
    }
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// Jet plus shape data at one point, with `(s, t)` carried into errors.
pub fn shape_at(
    map: &dyn SurfaceMap,
    s: f64,
    t: f64,
    cfg: JetConfig,
    hint: Option<[f64; 2]>,
) -> Result<(SurfaceJet, ShapeData), GeometryError> {
    let j = jet(map, s, t, cfg)?;
    if !j.is_finite() {
        return Err(GeometryError::StencilOutOfDomain { s, t });
    }
    let sd = shape_data_at(&j, hint, s, t)?;
    Ok((j, sd))
}
