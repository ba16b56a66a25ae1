//! Two-dimensional Riemannian charts: metrics, curvature, geodesics,
//! distances, geodesic curvature of curves, Jacobi fields and index forms.

mod chart;
mod curve;
mod distance;
mod geodesic;
mod jacobi;

pub use chart::{
    gauss_curvature, hyperbolic_point, sphere_point, stereographic_to_sphere, Christoffel, Mat2, Profile,
    SurfaceChart, SurfacePoint, SurfaceVector,
};
pub use distance::{
    curve_shorten, local_direction, sphere_distance, surface_distance, surface_distance_from_guess, SurfaceDistance,
    MULTIPLICITY_TOL,
};
pub use geodesic::{integrate_geodesic, GeodesicPath, State};
pub use curve::{geodesic_curvature, signed_geodesic_curvature, CurveSample, SampledCurve};
pub use jacobi::{
    index_comparison_check, index_form, jacobi_integrate, second_variation_check, IndexComparisonReport, JacobiData,
    JacobiState, SecondVariationReport, FIRST_VARIATION_TOL, SECOND_VARIATION_TOL,
};
