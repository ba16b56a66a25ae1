use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{HypothesisCheck, Side, Subject};
use crate::error::Result;
use crate::model_space::{Curvature, ModelCurve};
use crate::surface::{
    gauss_curvature, geodesic_curvature, integrate_geodesic, surface_distance, surface_distance_from_guess,
    SurfaceChart, SurfaceDistance, SurfacePoint, SurfaceVector, MULTIPLICITY_TOL,
};

/// `|b x|` at one sample, with the arrival directions `↑ᵇₓ` of the minimal
/// geodesics found.
#[derive(Debug, Clone, Serialize)]
pub struct DistSample {
    pub d: f64,
    pub bearing: f64,
    pub arrival: Vec<SurfaceVector>,
    pub ambiguous: bool,
    /// Computed by a full bearing scan rather than by continuation.
    pub full: bool,
    /// The minimal geodesic jumps between the previous sample and this one,
    /// i.e. the curve crosses the cut locus of the base point.
    pub cut_crossing: bool,
}

fn to_sample(chart: &SurfaceChart, base: SurfacePoint, sd: &SurfaceDistance, full: bool) -> Result<DistSample> {
    let mut arrival = Vec::new();
    if sd.distance > 0.0 {
        arrival.push(sd.geodesic.end_velocity().scale(-1.0));
        for &(b, l) in sd.candidates.iter().skip(1) {
            if l - sd.distance <= MULTIPLICITY_TOL {
                let g = integrate_geodesic(chart, base, chart.direction(base, b), l, 1e-3)?;
                arrival.push(g.end_velocity().scale(-1.0));
            }
        }
    }
    Ok(DistSample {
        d: sd.distance,
        bearing: sd.bearing,
        arrival,
        ambiguous: sd.multiplicity_flag,
        full,
        cut_crossing: false,
    })
}

fn ang(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Distances from `base` to every point of `pts`, by full scans every
/// `stride` samples and continuation in between. A jump of the minimising
/// bearing between full scans triggers a full recomputation of the skipped
/// samples and is reported as a cut-locus crossing.
pub fn distances_along(chart: &SurfaceChart, base: SurfacePoint, pts: &[SurfacePoint], stride: usize) -> Result<Vec<DistSample>> {
    let stride = stride.max(1);
    let n = pts.len();
    let full = |i: usize| -> Result<DistSample> { to_sample(chart, base, &surface_distance(chart, base, pts[i])?, true) };
    let jump = |a: &DistSample, b: &DistSample, i: usize| -> bool {
        if a.d <= 1e-9 || b.d <= 1e-9 {
            return false;
        }
        let d = chart.wrap([pts[i].u - pts[i - 1].u, pts[i].v - pts[i - 1].v]);
        let step = chart.norm(pts[i], SurfaceVector::new(d[0], d[1]));
        ang(a.bearing, b.bearing) > (0.3f64).max(10.0 * step / a.d.min(b.d)).min(PI - 1e-6)
    };
    let mut out: Vec<DistSample> = Vec::with_capacity(n);
    for i in 0..n {
        let use_full = i == 0 || i % stride == 0 || i + 1 == n || out[i - 1].d <= 1e-9;
        let sample = if use_full {
            full(i)?
        } else {
            let prev = &out[i - 1];
            to_sample(chart, base, &surface_distance_from_guess(chart, base, pts[i], prev.bearing, prev.d)?, false)?
        };
        out.push(sample);
        if i > 0 && out[i].full && jump(&out[i - 1], &out[i], i) {
            let mut j = i - 1;
            while j > 0 && !out[j].full {
                out[j] = full(j)?;
                j -= 1;
            }
        }
    }
    for i in 1..n {
        if jump(&out[i - 1], &out[i], i) || out[i].ambiguous {
            out[i].cut_crossing = true;
        }
    }
    Ok(out)
}

/// Absolute curvature of the subject at each sample, where defined.
pub(crate) fn subject_curvatures(subject: &Subject) -> Vec<Option<f64>> {
    match subject {
        Subject::Surface { chart, curve } => {
            (0..curve.samples.len()).map(|i| geodesic_curvature(chart, curve, i).ok()).collect()
        }
        Subject::Flat { s, points } => {
            let n = points.len();
            (0..n)
                .map(|i| {
                    if i == 0 || i + 1 == n {
                        return None;
                    }
                    let a: Vec<f64> = (0..3).map(|j| points[i][j] - points[i - 1][j]).collect();
                    let b: Vec<f64> = (0..3).map(|j| points[i + 1][j] - points[i][j]).collect();
                    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
                    let cr = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                    let turn = (cr.iter().map(|x| x * x).sum::<f64>().sqrt()).atan2(dot);
                    Some(turn / (0.5 * (s[i + 1] - s[i - 1])))
                })
                .collect()
        }
    }
}

/// `κ ≤ κ̃` (resp. `≥`) wherever both are defined, with relative slack
/// `1e−6`.
pub(crate) fn curvature_comparison(subject: &Subject, model: &ModelCurve, side: Side) -> HypothesisCheck {
    let kap = subject_curvatures(subject);
    let mut worst: Option<(usize, f64)> = None;
    let mut checked = 0;
    for (i, k) in kap.iter().enumerate() {
        let Some(k) = *k else { continue };
        checked += 1;
        let kt = model.abs_curvature(i);
        let excess = match side {
            Side::SecAtMostK => k - kt,
            Side::SecAtLeastK => kt - k,
        } - 1e-6 * (1.0 + kt);
        if excess > 0.0 && worst.is_none_or(|(_, w)| excess > w) {
            worst = Some((i, excess));
        }
    }
    let rel = match side {
        Side::SecAtMostK => "κ ≤ κ̃",
        Side::SecAtLeastK => "κ ≥ κ̃",
    };
    match worst {
        None => HypothesisCheck::new("curvature_comparison", checked > 0, format!("{rel} at {checked} samples")),
        Some((i, e)) => HypothesisCheck::new("curvature_comparison", false, format!("{rel} fails at sample {i} by {e:.3e}")),
    }
}

/// `K ≤ k` (resp. `≥`) at the given points of the chart.
pub(crate) fn curvature_bound(chart: &SurfaceChart, k: Curvature, side: Side, pts: &[SurfacePoint]) -> HypothesisCheck {
    let slack = 1e-7 * (1.0 + k.value().abs());
    let mut worst = (0.0f64, None);
    for p in pts {
        let Ok(kk) = gauss_curvature(chart, *p) else { continue };
        let excess = match side {
            Side::SecAtMostK => kk - k.value(),
            Side::SecAtLeastK => k.value() - kk,
        };
        if excess > worst.0 {
            worst = (excess, Some(*p));
        }
    }
    let rel = if side == Side::SecAtMostK { "K ≤ k" } else { "K ≥ k" };
    match worst {
        (e, Some(p)) if e > slack => HypothesisCheck::new(
            "curvature_bound",
            false,
            format!("{rel} fails at ({:.6}, {:.6}) by {e:.3e}", p.u, p.v),
        ),
        _ => HypothesisCheck::new("curvature_bound", true, format!("{rel} at {} sampled points", pts.len())),
    }
}

/// Points of the chart where the curvature bound is sampled: the given
/// points plus a grid over their bounding box.
pub(crate) fn bound_samples(chart: &SurfaceChart, pts: &[SurfacePoint]) -> Vec<SurfacePoint> {
    let mut out: Vec<SurfacePoint> = pts.to_vec();
    if pts.is_empty() {
        return out;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        lo = [lo[0].min(p.u), lo[1].min(p.v)];
        hi = [hi[0].max(p.u), hi[1].max(p.v)];
    }
    let m = 12;
    for i in 0..=m {
        for j in 0..=m {
            let u = lo[0] + (hi[0] - lo[0]) * i as f64 / m as f64;
            let v = lo[1] + (hi[1] - lo[1]) * j as f64 / m as f64;
            if chart.contains(u, v) {
                out.push(SurfacePoint::new(u, v));
            }
        }
    }
    out
}
