use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureSign {
    Negative,
    Zero,
    Positive,
}

/// A finite constant curvature `k` in units of 1/length².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(invalid(format!("curvature must be finite, got {k}")));
        }
        Ok(Curvature(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn sign(self) -> CurvatureSign {
        if self.0 > 0.0 {
            CurvatureSign::Positive
        } else if self.0 < 0.0 {
            CurvatureSign::Negative
        } else {
            CurvatureSign::Zero
        }
    }

    /// `√|k|`; zero for the flat plane.
    pub fn sqrt_abs(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Length unit of the quadric model, `1/√|k|` (one for `k = 0`).
    pub fn scale(self) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            1.0 / self.sqrt_abs()
        }
    }

    /// `π/√k` for `k > 0`, infinity otherwise.
    pub fn diameter_bound(self) -> f64 {
        if self.0 > 0.0 {
            PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `2π/√k` for `k > 0`, infinity otherwise.
    pub fn perimeter_bound(self) -> f64 {
        2.0 * self.diameter_bound()
    }
}

impl TryFrom<f64> for Curvature {
    type Error = crate::GeomError;
    fn try_from(k: f64) -> Result<Self> {
        Curvature::new(k)
    }
}

impl From<Curvature> for f64 {
    fn from(k: Curvature) -> f64 {
        k.0
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}", self.0)
    }
}
