use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::sampling::{distances_along, DistSample};
use crate::development::{develop, is_convex_development, DevelopmentConvexity, DistanceProfile};
use crate::error::{invalid, Result};
use crate::model_space::{Curvature, ModelPoint};
use crate::surface::{local_direction, SampledCurve, SurfaceChart, SurfacePoint, SurfaceVector};

/// Outcome of [`convex_to_p_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ConvexToPReport {
    /// Acceleration makes an angle of at most `π/2` with some `↑ᵖ`, or the
    /// angle-splitting identity holds at polyline vertices.
    pub cond_2_1_1: bool,
    /// The development closed by its two radial segments is convex.
    pub cond_2_1_2: bool,
    /// Samples failing the pointwise condition.
    pub pointwise_failures: Vec<usize>,
    /// Largest excess over the pointwise bound, in radians.
    pub worst_excess: f64,
    /// Samples with several minimal geodesics to `p`; every one was tried.
    pub ambiguous_samples: Vec<usize>,
    pub development: Option<DevelopmentConvexity>,
    pub distances: Vec<f64>,
    pub notes: Vec<String>,
}

impl ConvexToPReport {
    pub fn pass(&self) -> bool {
        self.cond_2_1_1 && self.cond_2_1_2
    }
}

fn angle_between(chart: &SurfaceChart, x: SurfacePoint, a: SurfaceVector, b: SurfaceVector) -> f64 {
    let (_, ja) = chart.rotate_quarter(x, a);
    chart.inner(x, ja, b).abs().atan2(chart.inner(x, a, b))
}

/// Tests whether `curve` is convex to `p` with respect to the model plane of
/// curvature `k`. In dimension two the coplanarity requirement is automatic.
pub fn convex_to_p_check(
    chart: &SurfaceChart,
    p: SurfacePoint,
    curve: &SampledCurve,
    k: Curvature,
    angle_tol: f64,
) -> Result<ConvexToPReport> {
    chart.check(p)?;
    let pts: Vec<SurfacePoint> = curve.samples.iter().map(|c| c.point).collect();
    let samples: Vec<DistSample> = distances_along(chart, p, &pts, 8)?;
    let d: Vec<f64> = samples.iter().map(|x| x.d).collect();
    if k.value() > 0.0 {
        if let Some(i) = d.iter().position(|&x| x >= k.diameter_bound()) {
            return Err(invalid(format!("|pγ(s)| reaches π/√k at sample {i}")));
        }
    }
    let n = pts.len();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let ambiguous_samples: Vec<usize> = (0..n).filter(|&i| samples[i].arrival.len() > 1).collect();
    for i in 0..n {
        let x = pts[i];
        if samples[i].d <= 1e-12 {
            continue;
        }
        let excess = if curve.polyline {
            if i == 0 || i + 1 == n {
                continue;
            }
            let minus = local_direction(chart, x, pts[i - 1]);
            let plus = local_direction(chart, x, pts[i + 1]);
            let whole = angle_between(chart, x, minus, plus);
            samples[i]
                .arrival
                .iter()
                .map(|up| angle_between(chart, x, minus, *up) + angle_between(chart, x, plus, *up) - whole)
                .fold(f64::INFINITY, f64::min)
        } else {
            let Some(acc) = curve.samples[i].acceleration else {
                continue;
            };
            if chart.norm(x, acc) <= 1e-10 {
                continue;
            }
            samples[i]
                .arrival
                .iter()
                .map(|up| angle_between(chart, x, acc, *up) - FRAC_PI_2)
                .fold(f64::INFINITY, f64::min)
        };
        if excess > angle_tol {
            failures.push(i);
        }
        worst = worst.max(excess);
    }
    let mut notes = vec!["coplanarity of (γ̇, D γ̇, ↑ᵖ) holds trivially in dimension two".to_string()];
    // numerical distances may exceed the Lipschitz bound by round-off
    let s0 = curve.samples[0].s;
    let s: Vec<f64> = curve.samples.iter().map(|c| c.s - s0).collect();
    let mut dl = d.clone();
    let mut clamp: f64 = 0.0;
    for i in 1..n {
        let ds = s[i] - s[i - 1];
        let step = dl[i] - dl[i - 1];
        if step.abs() > ds {
            clamp = clamp.max(step.abs() - ds);
            dl[i] = dl[i - 1] + ds.copysign(step);
        }
    }
    if clamp > 1e-8 {
        notes.push(format!("distance profile exceeded the Lipschitz bound by {clamp:.3e}"));
    }
    let development = match DistanceProfile::new(k, s, dl).and_then(|pr| develop(&pr, &ModelPoint::origin(k))) {
        Ok(dc) => Some(is_convex_development(&dc)?),
        Err(e) => {
            notes.push(format!("development failed: {e}"));
            None
        }
    };
    Ok(ConvexToPReport {
        cond_2_1_1: failures.is_empty(),
        cond_2_1_2: development.as_ref().is_some_and(|c| c.convex),
        pointwise_failures: failures,
        worst_excess: worst,
        ambiguous_samples,
        development,
        distances: d,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{integrate_geodesic, sphere_point};
    use std::f64::consts::TAU;

    #[test]
    fn minimal_geodesic_is_convex_to_any_point() {
        let c = SurfaceChart::sphere(1.0).unwrap();
        let g = integrate_geodesic(&c, sphere_point(0.5, 0.2), SurfaceVector::new(1.0, 0.5), 1.5, 1e-3).unwrap();
        let curve = SampledCurve::from_geodesic(&g, 30).unwrap();
        let r = convex_to_p_check(&c, sphere_point(1.0, 2.5), &curve, Curvature::new(1.0).unwrap(), 1e-8).unwrap();
        assert!(r.pass(), "{r:?}");
        let f = convex_to_p_check(&c, sphere_point(1.0, 2.5), &curve, Curvature::FLAT, 1e-8).unwrap();
        assert!(f.pass());
    }

    #[test]
    fn circle_about_p_and_circle_bending_away() {
        let c = SurfaceChart::plane();
        let circle = SampledCurve::from_fn(&c, 2.0, 100, |s| (s.cos(), s.sin())).unwrap();
        let r = convex_to_p_check(&c, SurfacePoint::new(0.0, 0.0), &circle, Curvature::FLAT, 1e-8).unwrap();
        assert!(r.pass(), "{r:?}");
        let away = convex_to_p_check(&c, SurfacePoint::new(3.0, 0.0), &circle, Curvature::FLAT, 1e-8).unwrap();
        assert!(!away.cond_2_1_1);
        let s: Vec<f64> = (0..=60).map(|i| TAU * 0.3 * i as f64 / 60.0).collect();
        let pts: Vec<SurfacePoint> = s.iter().map(|&t| SurfacePoint::new(t.cos(), t.sin())).collect();
        let poly = SampledCurve::from_points(&c, &s, &pts).unwrap();
        let rp = convex_to_p_check(&c, SurfacePoint::new(0.0, 0.0), &poly, Curvature::FLAT, 1e-8).unwrap();
        assert!(rp.cond_2_1_1);
        let rq = convex_to_p_check(&c, SurfacePoint::new(3.0, 0.0), &poly, Curvature::FLAT, 1e-8).unwrap();
        assert!(!rq.cond_2_1_1);
    }
}
