//! Construction and numerical verification of space-like generalized constant
//! ratio (GCR) surfaces in Minkowski 3-space E³₁.
//!
//! A surface is GCR when the tangential part of its position vector is a
//! principal direction. [`construct`] builds the classified families in the
//! time-like and space-like cones; [`verifier`] checks the defining property
//! and the frame relations it implies on any parametrized surface.

pub mod construct;
pub mod curves;
pub mod geometry;
pub mod io;
pub mod minkowski;
pub mod par;
pub mod spline;
pub mod verifier;

pub use construct::{build_surface, Cone, GCRSurface, ProfileU};
pub use curves::{PseudoSphereCurve, PseudoSphereKind};
pub use geometry::{FnMap, JetSource, ShapeData, SurfaceJet, SurfaceMap};
pub use minkowski::{lorentz_cross, lorentz_inner, CausalCharacter, MinkVector3};
pub use par::Execution;
pub use verifier::{full_report, VerificationReport, VerifyOptions};

use serde::{Deserialize, Serialize};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Self = Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` evenly spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => (0..n)
                .map(|i| if i + 1 == n { self.hi } else { self.lo + self.width() * i as f64 / (n - 1) as f64 })
                .collect(),
        }
    }
}
