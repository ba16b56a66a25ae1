//! Numerical comparison geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`model_space`]: the simply connected constant-curvature plane `M²ₖ`
//!   (distances, geodesics, triangle solvers, the model-plane lemmas).
//! * [`development`]: developments of distance profiles into `M²ₖ` and the
//!   associated convexity and support tests.
//! * [`surface`]: 2D Riemannian charts, geodesics, distances, geodesic
//!   curvature, Jacobi fields and index forms.
//! * [`comparison`]: theorem-level verifiers (Schur, Toponogov and their
//!   curve-comparison generalisation) with hypothesis bookkeeping.
//! * [`alexandrov`]: cones and doubled convex polygons with exact unfolding
//!   geodesics, and the triangle-refinement engine.
//! * [`harness`]: configuration, curated suites and report emission used by
//!   the `cmpgeom` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity, clippy::too_many_arguments, clippy::should_implement_trait)]

pub mod alexandrov;
pub mod comparison;
pub mod development;
pub mod error;
pub mod harness;
pub mod model_space;
pub mod surface;

pub use error::{GeomError, Result};
