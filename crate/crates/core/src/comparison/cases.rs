use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{chart_to_model, ComparisonCase, Side, Subject};
use crate::error::Result;
use crate::model_space::{
    angle_from_sss, reference_tangent, tangent_toward, turn_left, Curvature, ModelCurve, ModelPoint, Tangent,
};
use crate::surface::{integrate_geodesic, surface_distance, SampledCurve, SurfaceChart, SurfacePoint};

/// Planar circular arc (or segment when `kappa = 0`) of curvature `kappa`
/// and length `length` on the plane chart, starting at the origin along the
/// first axis and bending left.
pub fn planar_arc(kappa: f64, length: f64, intervals: usize) -> Result<SampledCurve> {
    SampledCurve::from_fn(&SurfaceChart::plane(), length, intervals, move |s| {
        if kappa == 0.0 {
            (s, 0.0)
        } else {
            ((kappa * s).sin() / kappa, (1.0 - (kappa * s).cos()) / kappa)
        }
    })
}

/// Constant-curvature model curve in `M²ₖ` from the origin along the
/// reference direction.
pub fn planar_arc_model(k: Curvature, kappa: f64, length: f64, intervals: usize) -> Result<ModelCurve> {
    let o = ModelPoint::origin(k);
    ModelCurve::integrate(o, reference_tangent(&o), length, intervals, move |_| kappa)
}

/// A subject curve on a constant-curvature model chart together with its
/// congruent copy in `M²ₖ`, sharing the base point `p`.
pub fn model_copy_case(
    id: &str,
    chart: &SurfaceChart,
    k: Curvature,
    side: Side,
    curve: SampledCurve,
    p: SurfacePoint,
) -> Result<ComparisonCase> {
    let pts: Vec<ModelPoint> = curve.samples.iter().map(|c| chart_to_model(chart, k, c.point)).collect::<Result<_>>()?;
    let m0 = pts[0];
    let t0 = curve.samples[0].tangent.unwrap_or_else(|| crate::surface::SurfaceVector::new(1.0, 0.0));
    // model tangent at γ̃(0) with the chart bearing of the subject's tangent
    let bearing = chart.bearing(curve.samples[0].point, t0);
    let e = chart_frame_direction(chart, k, curve.samples[0].point, &m0)?;
    let dir: Tangent = turn_left(&m0, e, bearing);
    let kappa: Vec<f64> = (0..curve.samples.len())
        .map(|i| crate::surface::signed_geodesic_curvature(chart, &curve, i).unwrap_or(0.0))
        .collect();
    let s: Vec<f64> = curve.samples.iter().map(|c| c.s).collect();
    let len = s[s.len() - 1] - s[0];
    let n = s.len() - 1;
    let model = if curve.polyline {
        ModelCurve::polyline(pts)?
    } else {
        // interpolate the sampled curvature linearly between samples
        let s0 = s[0];
        ModelCurve::integrate(m0, dir, len, n, move |t| {
            let x = ((t - 0.0) / len * n as f64).clamp(0.0, n as f64);
            let i = (x.floor() as usize).min(n - 1);
            let f = x - i as f64;
            let _ = s0;
            kappa[i] * (1.0 - f) + kappa[i + 1] * f
        })?
    };
    ComparisonCase::new(id, side, k, Subject::Surface { chart: chart.clone(), curve }, model)?
        .with_base(p, chart_to_model(chart, k, p)?)
}

/// The model tangent at `m` corresponding to the chart direction of bearing
/// zero at `x` (the first frame vector), found from a nearby chart point.
fn chart_frame_direction(chart: &SurfaceChart, k: Curvature, x: SurfacePoint, m: &ModelPoint) -> Result<Tangent> {
    let (e1, _) = chart.frame(x);
    let h = 1e-7;
    let y = SurfacePoint::new(x.u + h * e1.du, x.v + h * e1.dv);
    let my = chart_to_model(chart, k, y)?;
    crate::model_space::tangent_toward(m, &my)
}

/// Geodesic hinge at `x = exp_p(d0 · e(bearing))`: the subject is the
/// geodesic from `x` leaving at `angle` from `↑ᵖ_x`, the model the model
/// geodesic with the same initial data. Used with the matched-angle form.
#[allow(clippy::too_many_arguments)]
pub fn geodesic_hinge_case(
    id: &str,
    chart: &SurfaceChart,
    k: Curvature,
    side: Side,
    p: SurfacePoint,
    bearing: f64,
    d0: f64,
    angle: f64,
    length: f64,
) -> Result<ComparisonCase> {
    let step = 1e-3;
    let leg = integrate_geodesic(chart, p, chart.direction(p, bearing), d0, step)?;
    if let Some(e) = &leg.exit {
        return Err(crate::error::invalid(format!("case {id}: {e}")));
    }
    let x = leg.end();
    let up = leg.end_velocity().scale(-1.0);
    let (_, jup) = chart.rotate_quarter(x, up);
    let dir = up.scale(angle.cos()).add(jup.scale(angle.sin()));
    // a step count divisible by the sampling stride
    let n = 10 * ((length / (10.0 * step)).ceil() as usize).max(1);
    let geo = integrate_geodesic(chart, x, dir, length, length / (n as f64 - 0.25))?;
    if let Some(e) = &geo.exit {
        return Err(crate::error::invalid(format!("case {id}: {e}")));
    }
    let curve = SampledCurve::from_geodesic(&geo, 10)?;
    let pm = ModelPoint::origin(k);
    let x0 = ModelPoint::from_polar(k, d0, 0.0)?;
    let t = turn_left(&x0, tangent_toward(&x0, &pm)?, angle);
    let n = curve.samples.len() - 1;
    let model = ModelCurve::integrate(x0, t, length, n, |_| 0.0)?;
    ComparisonCase::new(id, side, k, Subject::Surface { chart: chart.clone(), curve }, model)?.with_base(p, pm)
}

/// The same geodesic subject as [`geodesic_hinge_case`], compared with the
/// model geodesic that matches both endpoint distances (the comparison
/// triangle of `p, γ(0), γ(L)`). Used with the matched-endpoint form.
#[allow(clippy::too_many_arguments)]
pub fn geodesic_triangle_case(
    id: &str,
    chart: &SurfaceChart,
    k: Curvature,
    side: Side,
    p: SurfacePoint,
    bearing: f64,
    d0: f64,
    angle: f64,
    length: f64,
) -> Result<ComparisonCase> {
    let hinge = geodesic_hinge_case(id, chart, k, side, p, bearing, d0, angle, length)?;
    let Subject::Surface { curve, .. } = &hinge.subject else { unreachable!() };
    let end = curve.end();
    let d_end = surface_distance(chart, p, end)?.distance;
    let d_start = surface_distance(chart, p, curve.start())?.distance;
    let theta = angle_from_sss(k, d_start, d_end, length)?;
    let a = ModelPoint::from_polar(k, d_start, 0.0)?;
    let b = ModelPoint::from_polar(k, d_end, theta)?;
    let n = curve.samples.len() - 1;
    let model = ModelCurve::geodesic(a, b, n)?;
    let pm = ModelPoint::origin(k);
    ComparisonCase::new(id, side, k, hinge.subject, model)?.with_base(p, pm)
}

/// The flat cylinder of circumference `2π` with a horizontal geodesic `γ`
/// that crosses the cut locus of `p`: with matched endpoint distances the
/// model comparison (sec ≤ 0 side) fails, and the cut-locus hypothesis
/// flags the failure as not a counterexample to the theorem.
pub fn cylinder_counterexample() -> Result<ComparisonCase> {
    let chart = SurfaceChart::cylinder(TAU)?;
    let a = 0.5;
    let len = PI;
    let n = 200;
    let curve = SampledCurve::from_fn(&chart, len, n, move |s| (FRAC_PI_2 + s, a))?;
    let k = Curvature::FLAT;
    // the model: the straight segment seen from the point opposite p
    let start = ModelPoint::planar(-FRAC_PI_2, 0.0);
    let model = ModelCurve::integrate(start, reference_tangent(&start), len, n, |_| 0.0)?;
    let pm = ModelPoint::planar(0.0, -a);
    ComparisonCase::new("cylinder_cut_locus", Side::SecAtMostK, k, Subject::Surface { chart, curve }, model)?
        .with_base(SurfacePoint::new(0.0, 0.0), pm)
}
