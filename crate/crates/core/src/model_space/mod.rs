//! The simply connected constant-curvature plane `M²ₖ`.
//!
//! Points live in canonical quadric coordinates: the unit sphere for `k > 0`,
//! the plane `z = 0` for `k = 0` and the upper sheet of the unit hyperboloid
//! `x² + y² − z² = −1` for `k < 0`. The physical scale `1/√|k|` is applied when
//! lengths are measured, so every lengths-in/lengths-out function below works
//! in physical units.

mod curvature;
mod curve;
mod lemmas;
mod point;
mod polygon;
mod trig;

pub use curvature::{Curvature, CurvatureSign};
pub use curve::ModelCurve;
pub use lemmas::{
    alexandrov_lemma, convex_polygon_perimeter_check, sum_dist_monotone_check, AlexandrovBranch,
    AlexandrovReport, AlexandrovSides, MonotoneReport, PerimeterReport,
};
pub use point::{
    dist_k, exp_map, geodesic_point, place_sas, reference_tangent, signed_turn, tangent_toward, turn_left, ModelPoint,
    ModelSegment, ModelTriangle, Orientation, Tangent,
};
pub use polygon::{polygon_convexity, ConvexityReport};
pub use trig::{angle_from_sss, rho_k, side_from_sas, sn_k};

/// Slack within which inverse-trig arguments are silently clamped.
pub const CLAMP_SLACK: f64 = 1e-12;

/// Pairs closer than this to distance `π/√k` are treated as antipodal.
pub const ANTIPODAL_SLACK: f64 = 1e-9;
