use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use super::space::{AlexandrovSpace, MINIMIZER_SLACK};
use crate::error::{invalid, Result};

/// The flat cone of total angle `Θ` about its apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeSpace {
    theta: f64,
    sample_radius: f64,
}

/// A cone point in polar coordinates, `phi ∈ [0, Θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConePoint {
    pub r: f64,
    pub phi: f64,
}

/// A minimal geodesic of the cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConePath {
    /// Straight in the unfolding: from `(r0, phi0)` to the point at radius
    /// `r1` and signed angular offset `delta`, `|delta| < π`.
    Straight { r0: f64, phi0: f64, r1: f64, delta: f64 },
    /// Through the apex.
    ViaApex { r0: f64, phi0: f64, r1: f64, phi1: f64 },
}

impl ConeSpace {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(invalid(format!("cone angle must be positive, got {theta}")));
        }
        Ok(ConeSpace { theta, sample_radius: 1.0 })
    }

    /// Sets the radius of the disc used by [`AlexandrovSpace::sample_point`].
    pub fn with_sample_radius(mut self, r: f64) -> Self {
        self.sample_radius = r;
        self
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn point(&self, r: f64, phi: f64) -> Result<ConePoint> {
        if !(r >= 0.0) || !r.is_finite() || !phi.is_finite() {
            return Err(invalid(format!("bad cone point ({r}, {phi})")));
        }
        Ok(ConePoint { r, phi: if r == 0.0 { 0.0 } else { phi.rem_euclid(self.theta) } })
    }

    pub fn apex(&self) -> ConePoint {
        ConePoint { r: 0.0, phi: 0.0 }
    }

    /// Signed angular offset from `a` to `b` reduced to `(−Θ/2, Θ/2]`.
    pub fn gap(&self, a: f64, b: f64) -> f64 {
        let d = (b - a).rem_euclid(self.theta);
        if d > 0.5 * self.theta {
            d - self.theta
        } else {
            d
        }
    }

    fn straight_len(r0: f64, r1: f64, delta: f64) -> f64 {
        let h = (0.5 * delta).sin();
        ((r0 - r1) * (r0 - r1) + 4.0 * r0 * r1 * h * h).sqrt()
    }
}

impl AlexandrovSpace for ConeSpace {
    type Point = ConePoint;
    type Path = ConePath;

    fn minimizers(&self, x: &ConePoint, y: &ConePoint) -> Result<(f64, Vec<(f64, ConePath)>)> {
        let (r0, r1) = (x.r, y.r);
        if r0 == 0.0 || r1 == 0.0 {
            let path = ConePath::ViaApex { r0, phi0: x.phi, r1, phi1: y.phi };
            return Ok((r0 + r1, vec![(r0 + r1, path)]));
        }
        let base = self.gap(x.phi, y.phi);
        let mut cands: Vec<(f64, ConePath)> = Vec::new();
        for m in -2i32..=2 {
            let delta = base + m as f64 * self.theta;
            if delta.abs() < PI {
                let len = Self::straight_len(r0, r1, delta);
                cands.push((len, ConePath::Straight { r0, phi0: x.phi, r1, delta }));
            }
        }
        let apex_len = r0 + r1;
        let best_straight = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        if apex_len <= best_straight + MINIMIZER_SLACK {
            cands.push((apex_len, ConePath::ViaApex { r0, phi0: x.phi, r1, phi1: y.phi }));
        }
        let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        cands.retain(|c| c.0 <= best + MINIMIZER_SLACK);
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok((best, cands))
    }

    fn distance(&self, x: &ConePoint, y: &ConePoint) -> Result<f64> {
        if x.r == 0.0 || y.r == 0.0 {
            return Ok(x.r + y.r);
        }
        let delta = self.gap(x.phi, y.phi);
        if delta.abs() <= PI {
            Ok(Self::straight_len(x.r, y.r, delta))
        } else {
            Ok(x.r + y.r)
        }
    }

    fn path_point(&self, path: &ConePath, t: f64) -> ConePoint {
        match *path {
            ConePath::ViaApex { r0, phi0, r1, phi1 } => {
                if t <= r0 {
                    ConePoint { r: r0 - t, phi: if t == r0 { 0.0 } else { phi0 } }
                } else {
                    ConePoint { r: (t - r0).min(r1), phi: phi1 }
                }
            }
            ConePath::Straight { r0, phi0, r1, delta } => {
                let (ex, ey) = (r1 * delta.cos() - r0, r1 * delta.sin());
                let len = ex.hypot(ey);
                if len == 0.0 {
                    return ConePoint { r: r0, phi: phi0 };
                }
                let (x, y) = (r0 + t * ex / len, t * ey / len);
                let r = x.hypot(y);
                let phi = if r == 0.0 { 0.0 } else { (phi0 + y.atan2(x)).rem_euclid(self.theta) };
                ConePoint { r, phi }
            }
        }
    }

    fn singular_scale(&self, x: &ConePoint) -> f64 {
        if (self.theta - TAU).abs() < 1e-15 {
            f64::INFINITY
        } else {
            x.r
        }
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ConePoint {
        // uniform by area on the disc of radius `sample_radius`
        let r = self.sample_radius * rng.gen::<f64>().sqrt();
        ConePoint { r, phi: rng.gen::<f64>() * self.theta }
    }

    fn nonnegatively_curved(&self) -> bool {
        self.theta <= TAU
    }

    fn name(&self) -> String {
        format!("cone:theta={}", self.theta)
    }
}
