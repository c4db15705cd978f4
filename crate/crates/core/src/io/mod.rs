//! Surface configs, curve CSV input, and OBJ / CSV / JSON output.

pub mod json;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{build_surface, Cone, ConstructError, GCRSurface, ProfileU};
use crate::curves::{builtin, resample_to_arclength, CurveError, CurveSample, PseudoSphereCurve, PseudoSphereKind};
use crate::geometry::{FnMap, SurfaceMap};
use crate::minkowski::MinkVector3;
use crate::verifier::{Grid, PointRecord, VerificationReport};
use crate::Interval;
use json::{fmt_sci, to_sci_string};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid curve CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinCurve {
    Hyperbola,
    Circle,
    HyperbolicCircle,
    DeSitterParallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CurveConfig {
    Builtin {
        builtin: BuiltinCurve,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    /// Samples with header `t,c0,c1,c2`, always resampled to arclength.
    Csv {
        csv: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kind: Option<PseudoSphereKind>,
    },
}

/// Surfaces given directly as maps rather than through the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RawMap {
    /// `(0, s, t)`.
    Plane,
    /// `(s, t, 0)`, not space-like.
    TimelikePlane,
    /// `(√(1+s²+t²), s, t)`, totally umbilic.
    HyperbolicSheet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    /// Adds `ε (0, 0, s t)` to the surface.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<Cone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileU>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_map: Option<RawMap>,
    pub s_range: [f64; 2],
    pub t_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

/// A constructed surface plus `ε (0, 0, s t)`; no longer GCR for `ε ≠ 0`.
pub struct Perturbed {
    pub base: GCRSurface,
    pub epsilon: f64,
}

impl SurfaceMap for Perturbed {
    fn eval(&self, s: f64, t: f64) -> Option<MinkVector3> {
        Some(self.base.eval(s, t)? + MinkVector3::new(0.0, 0.0, self.epsilon * s * t))
    }

    fn descriptor(&self) -> String {
        format!("{{\"perturbed\":{},\"epsilon\":{}}}", self.base.descriptor(), fmt_sci(self.epsilon))
    }
}

/// The surface a config resolves to.
pub struct ResolvedSurface {
    pub map: Box<dyn SurfaceMap>,
    pub s_range: Interval,
    pub t_range: Interval,
    /// The config with relative paths made absolute.
    pub config: SurfaceConfig,
}

impl ResolvedSurface {
    pub fn grid(&self, ns: usize, nt: usize) -> Grid {
        Grid::new(self.s_range, self.t_range, ns, nt)
    }
}

fn interval(r: [f64; 2], what: &str) -> Result<Interval, ConfigError> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
        return Err(ConfigError::Invalid(format!("{what} must be [lo, hi] with lo < hi, got {r:?}")));
    }
    Ok(Interval::new(r[0], r[1]))
}

impl SurfaceConfig {
    /// Parses a config, or the `config` entry of a manifest written by [`Manifest`].
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let inner = match v.get("config") {
            Some(c) if v.get("s_range").is_none() => c.clone(),
            _ => v,
        };
        Ok(serde_json::from_value(inner)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(CurveConfig::Csv { csv, .. }) = &mut cfg.curve {
            if csv.is_relative() {
                *csv = path.parent().unwrap_or(Path::new(".")).join(&*csv);
            }
        }
        Ok(cfg)
    }

    /// Builds the map; relative CSV paths resolve against the working directory.
    pub fn resolve(&self) -> Result<ResolvedSurface, ConfigError> {
        let s_range = interval(self.s_range, "s_range")?;
        let t_range = interval(self.t_range, "t_range")?;
        let mut config = self.clone();
        let map: Box<dyn SurfaceMap> = if let Some(raw) = self.raw_map {
            if self.case.is_some() || self.profile.is_some() || self.curve.is_some() || self.perturbation.is_some() {
                return Err(ConfigError::Invalid("raw_map excludes case, profile, curve and perturbation".into()));
            }
            let f: fn(f64, f64) -> MinkVector3 = match raw {
                RawMap::Plane => |s, t| MinkVector3::new(0.0, s, t),
                RawMap::TimelikePlane => |s, t| MinkVector3::new(s, t, 0.0),
                RawMap::HyperbolicSheet => |s, t| MinkVector3::new((1.0 + s * s + t * t).sqrt(), s, t),
            };
            let label = serde_json::to_string(&raw).unwrap_or_default();
            Box::new(FnMap::new(format!("{{\"raw_map\":{label}}}"), f))
        } else {
            let missing = |what: &str| ConfigError::Invalid(format!("missing \"{what}\""));
            let cone = self.case.ok_or_else(|| missing("case"))?;
            let profile = self.profile.clone().ok_or_else(|| missing("profile"))?;
            let curve_cfg = self.curve.as_ref().ok_or_else(|| missing("curve"))?;
            let curve = load_curve(curve_cfg)?;
            if let Some(CurveConfig::Csv { csv, .. }) = &mut config.curve {
                if let Ok(abs) = csv.canonicalize() {
                    *csv = abs;
                }
            }
            let surface = build_surface(cone, profile, curve, s_range, t_range)?;
            match self.perturbation {
                Some(p) if p.epsilon != 0.0 => Box::new(Perturbed { base: surface, epsilon: p.epsilon }),
                _ => Box::new(surface),
            }
        };
        Ok(ResolvedSurface { map, s_range, t_range, config })
    }
}

fn load_curve(cfg: &CurveConfig) -> Result<PseudoSphereCurve, ConfigError> {
    match cfg {
        CurveConfig::Builtin { builtin: b, radius } => {
            let r = radius.unwrap_or(1.0);
            match b {
                BuiltinCurve::Hyperbola | BuiltinCurve::Circle if radius.is_some() => {
                    Err(ConfigError::Invalid("radius applies only to hyperbolic-circle and de-sitter-parallel".into()))
                }
                BuiltinCurve::Hyperbola => Ok(builtin::hyperbola()),
                BuiltinCurve::Circle => Ok(builtin::circle()),
                _ if !(r > 0.0 && r.is_finite()) => {
                    Err(ConfigError::Invalid(format!("radius must be positive, got {r}")))
                }
                BuiltinCurve::HyperbolicCircle => Ok(builtin::hyperbolic_circle(r)),
                BuiltinCurve::DeSitterParallel => Ok(builtin::de_sitter_parallel(r)),
            }
        }
        CurveConfig::Csv { csv, kind } => {
            let file = fs::File::open(csv).map_err(|source| ConfigError::Read { path: csv.clone(), source })?;
            let samples = read_curve_csv(file)?;
            let curve = resample_to_arclength(&samples)?;
            if let Some(k) = kind {
                if *k != curve.kind() {
                    return Err(ConfigError::Invalid(format!(
                        "curve CSV declares {k:?} but its samples lie on the {:?}",
                        curve.kind()
                    )));
                }
            }
            Ok(curve.with_label(format!("csv:{}", csv.display())))
        }
    }
}

/// Reads curve samples from CSV with header `t,c0,c1,c2`.
pub fn read_curve_csv(reader: impl std::io::Read) -> Result<Vec<CurveSample>, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "c0", "c1", "c2"] {
        return Err(ConfigError::Invalid(format!("curve CSV header must be t,c0,c1,c2, got {:?}", headers)));
    }
    Ok(rdr.deserialize().collect::<Result<Vec<CurveSample>, _>>()?)
}

/// OBJ text: one vertex per grid point (in grid order) and quads between neighbours.
pub fn obj_string(vertices: &[MinkVector3], ns: usize, nt: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {ns} x {nt} grid, coordinates (x0, x1, x2)");
    for v in vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_sci(v.c0), fmt_sci(v.c1), fmt_sci(v.c2));
    }
    for i in 0..ns.saturating_sub(1) {
        for j in 0..nt.saturating_sub(1) {
            let k = |a: usize, b: usize| a * nt + b + 1;
            let _ = writeln!(out, "f {} {} {} {}", k(i, j), k(i + 1, j), k(i + 1, j + 1), k(i, j + 1));
        }
    }
    out
}

/// Per-vertex scalars keyed by vertex index (0-based, grid order).
pub fn scalars_csv(points: &[PointRecord]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_sci).unwrap_or_default();
    let mut out = String::from("index,s,t,theta,k1,k2,K_ext,principal_residual\n");
    for (i, p) in points.iter().enumerate() {
        let theta = p.theta.map(|th| th * f64::from(p.theta_sign.unwrap_or(1)));
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            fmt_sci(p.s),
            fmt_sci(p.t),
            opt(theta),
            opt(p.k_e1),
            opt(p.k_other),
            opt(p.k_ext),
            opt(p.residual(crate::verifier::CheckName::PrincipalDirection)),
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRange {
    pub min: f64,
    pub max: f64,
}

/// Sidecar describing a generated mesh; its `config` entry can be fed back in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config: SurfaceConfig,
    pub descriptor: String,
    pub config_hash: String,
    pub grid: Grid,
    pub vertex_count: usize,
    pub face_count: usize,
    pub theta: Option<ThetaRange>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(resolved: &ResolvedSurface, report: &VerificationReport, files: Vec<String>) -> Self {
        let grid = report.grid;
        let theta = resolved.map.gcr().and_then(|g| {
            let vals: Vec<f64> = grid.s_range.linspace(grid.ns).iter().filter_map(|&s| g.theta_of_s(s).ok()).collect();
            (!vals.is_empty()).then(|| ThetaRange {
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        });
        Self {
            config: resolved.config.clone(),
            descriptor: report.descriptor.clone(),
            config_hash: report.config_hash.clone(),
            grid,
            vertex_count: grid.len(),
            face_count: grid.ns.saturating_sub(1) * grid.nt.saturating_sub(1),
            theta,
            files,
        }
    }

    pub fn to_json(&self) -> String {
        to_sci_string(&serde_json::to_value(self).expect("manifest serializes"))
    }
}
