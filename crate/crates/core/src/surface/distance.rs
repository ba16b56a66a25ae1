use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::chart::{SurfaceChart, SurfacePoint, SurfaceVector};
use super::geodesic::{geodesic_rhs, integrate_geodesic, rk4, shoot, GeodesicPath, State};
use crate::error::{invalid, GeomError, Result};

const BEARINGS: usize = 720;
const COARSE_STEPS: usize = 48;
const FINE_STEP: f64 = 1e-3;
const COARSE_STEP: f64 = 2e-2;
/// Lengths within this are treated as ties between distinct minimisers.
pub const MULTIPLICITY_TOL: f64 = 1e-5;

/// A shortest geodesic found by shooting.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceDistance {
    pub distance: f64,
    pub bearing: f64,
    pub geodesic: GeodesicPath,
    /// Another geodesic with a different initial bearing has length within
    /// [`MULTIPLICITY_TOL`].
    pub multiplicity_flag: bool,
    /// Every converged `(bearing, length)` pair, shortest first.
    pub candidates: Vec<(f64, f64)>,
}

fn residual(chart: &SurfaceChart, y: &State, q: SurfacePoint) -> [f64; 2] {
    chart.wrap([y[0] - q.u, y[1] - q.v])
}

/// Upper bound for `|pq|`: the length of the chart-straight segment,
/// shortest over wrapped representatives.
fn chart_segment_length(chart: &SurfaceChart, p: SurfacePoint, q: SurfacePoint) -> f64 {
    let d = chart.wrap([q.u - p.u, q.v - p.v]);
    let n = 64;
    let mut total = 0.0;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let x = SurfacePoint::new(p.u + t * d[0], p.v + t * d[1]);
        if !chart.contains(x.u, x.v) {
            return f64::INFINITY;
        }
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        total += w * chart.norm(x, SurfaceVector::new(d[0], d[1]));
    }
    total / (3.0 * n as f64)
}

fn start_state(chart: &SurfaceChart, p: SurfacePoint, alpha: f64) -> State {
    let d = chart.direction(p, alpha);
    [p.u, p.v, d.du, d.dv]
}

/// Coarse closest approach of the ray at bearing `alpha` to `q`.
fn closest_approach(chart: &SurfaceChart, p: SurfacePoint, q: SurfacePoint, alpha: f64, reach: f64) -> (f64, f64) {
    let h = reach / COARSE_STEPS as f64;
    let gq = chart.metric(q.u, q.v);
    let dist = |r: [f64; 2]| {
        (gq[0][0] * r[0] * r[0] + 2.0 * gq[0][1] * r[0] * r[1] + gq[1][1] * r[1] * r[1]).max(0.0).sqrt()
    };
    let mut y = start_state(chart, p, alpha);
    let mut prev = residual(chart, &y, q);
    let mut best = (dist(prev), 0.0);
    for i in 1..=COARSE_STEPS {
        y = rk4(&|y| geodesic_rhs(chart, y), &y, h);
        if !chart.contains(y[0], y[1]) {
            break;
        }
        let r = residual(chart, &y, q);
        // closest point of the chord between consecutive samples
        let e = [r[0] - prev[0], r[1] - prev[1]];
        let ee = e[0] * e[0] + e[1] * e[1];
        let t = if ee > 0.0 && (r[0] - prev[0]).abs() < 0.5 * chart.periods()[0].unwrap_or(f64::INFINITY) {
            (-(prev[0] * e[0] + prev[1] * e[1]) / ee).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let m = [prev[0] + t * e[0], prev[1] + t * e[1]];
        let d = dist(m);
        if d < best.0 {
            best = (d, (i as f64 - 1.0 + t) * h);
        }
        prev = r;
    }
    best
}

/// Newton on `(bearing, length)` so that the geodesic lands on `q`: a coarse
/// phase with RK4 step `COARSE_STEP`, then polishing at `FINE_STEP`.
fn newton(chart: &SurfaceChart, p: SurfacePoint, q: SurfacePoint, alpha: f64, len: f64) -> Option<(f64, f64)> {
    let (alpha, len) = newton_phase(chart, p, q, alpha, len, COARSE_STEP, 1e-8, 30)?;
    newton_phase(chart, p, q, alpha, len, FINE_STEP, 1e-13, 8)
}

fn newton_phase(
    chart: &SurfaceChart,
    p: SurfacePoint,
    q: SurfacePoint,
    mut alpha: f64,
    mut len: f64,
    base_step: f64,
    rel_tol: f64,
    iters: usize,
) -> Option<(f64, f64)> {
    let step = |l: f64| base_step.min(l.max(1e-9) / 16.0);
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        if !(len > 0.0) {
            return None;
        }
        let tol = rel_tol * (1.0 + len);
        let y = shoot(chart, start_state(chart, p, alpha), len, step(len))?;
        let r = residual(chart, &y, q);
        let rn = chart.norm(q, SurfaceVector::new(r[0], r[1]));
        // stop once converged, or when round-off stalls progress near the target
        if rn < tol || (rn < 1e3 * tol && rn >= 0.5 * last) {
            return Some((alpha.rem_euclid(TAU), len));
        }
        last = rn;
        let da = 1e-7;
        let yp = shoot(chart, start_state(chart, p, alpha + da), len, step(len))?;
        let ja = [(yp[0] - y[0]) / da, (yp[1] - y[1]) / da];
        let jl = [y[2], y[3]];
        let det = ja[0] * jl[1] - ja[1] * jl[0];
        if det.abs() < 1e-300 {
            return None;
        }
        let mut d_a = (r[0] * jl[1] - r[1] * jl[0]) / det;
        let mut d_l = (ja[0] * r[1] - ja[1] * r[0]) / det;
        let s = (0.3 / d_a.abs()).min(0.5 * len / d_l.abs()).min(1.0);
        d_a *= s;
        d_l *= s;
        alpha -= d_a;
        len -= d_l;
    }
    None
}

fn finish(chart: &SurfaceChart, p: SurfacePoint, found: Vec<(f64, f64)>) -> Result<SurfaceDistance> {
    let mut found = found;
    found.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut distinct: Vec<(f64, f64)> = Vec::new();
    for c in found {
        let same = distinct.iter().any(|d| {
            let da = (c.0 - d.0).rem_euclid(TAU);
            da.min(TAU - da) < 1e-6 && (c.1 - d.1).abs() < 1e-7
        });
        if !same {
            distinct.push(c);
        }
    }
    let (bearing, distance) = distinct[0];
    let multiplicity_flag = distinct.iter().skip(1).any(|c| {
        let da = (c.0 - bearing).rem_euclid(TAU);
        da.min(TAU - da) > 1e-4 && c.1 - distance <= MULTIPLICITY_TOL
    });
    let geodesic = integrate_geodesic(chart, p, chart.direction(p, bearing), distance, FINE_STEP)?;
    Ok(SurfaceDistance { distance, bearing, geodesic, multiplicity_flag, candidates: distinct })
}

/// `|pq|` and a shortest geodesic, by a bearing scan and Newton shooting,
/// with a curve-shortening fallback.
pub fn surface_distance(chart: &SurfaceChart, p: SurfacePoint, q: SurfacePoint) -> Result<SurfaceDistance> {
    chart.check(p)?;
    chart.check(q)?;
    let d = chart.wrap([q.u - p.u, q.v - p.v]);
    if d[0] == 0.0 && d[1] == 0.0 {
        let geodesic = integrate_geodesic(chart, p, chart.direction(p, 0.0), 0.0, FINE_STEP)?;
        return Ok(SurfaceDistance { distance: 0.0, bearing: 0.0, geodesic, multiplicity_flag: false, candidates: vec![(0.0, 0.0)] });
    }
    let ub = chart_segment_length(chart, p, q);
    let reach = if ub.is_finite() { 1.05 * ub + 1e-9 } else { 10.0 };
    let scan: Vec<(f64, f64)> = (0..BEARINGS)
        .map(|i| closest_approach(chart, p, q, TAU * i as f64 / BEARINGS as f64, reach))
        .collect();
    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..BEARINGS {
        let (a, b, c) = (scan[(i + BEARINGS - 1) % BEARINGS].0, scan[i].0, scan[(i + 1) % BEARINGS].0);
        if b <= a && b <= c {
            seeds.push((b, TAU * i as f64 / BEARINGS as f64, scan[i].1));
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut found = Vec::new();
    for &(_, alpha, len) in seeds.iter().take(8) {
        if let Some(sol) = newton(chart, p, q, alpha, len.max(1e-6)) {
            if sol.1 <= reach * 1.5 {
                found.push(sol);
            }
        }
    }
    if found.is_empty() {
        if let Ok(pts) = curve_shorten(chart, &straight(chart, p, q, 32), 60) {
            let v = local_direction(chart, pts[0], pts[1]);
            let len: f64 = pts.windows(2).map(|w| chart.norm(w[0], local_direction(chart, w[0], w[1]))).sum();
            if let Some(sol) = newton(chart, p, q, chart.bearing(p, v), len) {
                found.push(sol);
            }
        }
    }
    if found.is_empty() {
        return Err(GeomError::SearchFailure(format!(
            "no geodesic from ({}, {}) to ({}, {}) found on `{}`",
            p.u,
            p.v,
            q.u,
            q.v,
            chart.name()
        )));
    }
    finish(chart, p, found)
}

/// Shooting from a known `(bearing, length)` guess, for continuation along
/// a curve. No multiplicity detection.
pub fn surface_distance_from_guess(
    chart: &SurfaceChart,
    p: SurfacePoint,
    q: SurfacePoint,
    bearing: f64,
    length: f64,
) -> Result<SurfaceDistance> {
    chart.check(p)?;
    chart.check(q)?;
    match newton(chart, p, q, bearing, length) {
        Some(sol) => finish(chart, p, vec![sol]),
        None => surface_distance(chart, p, q),
    }
}

/// Initial velocity of the short geodesic from `x` to `y`, to second order:
/// `v ≈ Δ + ½ Γ(Δ, Δ)`.
pub fn local_direction(chart: &SurfaceChart, x: SurfacePoint, y: SurfacePoint) -> SurfaceVector {
    let d = chart.wrap([y.u - x.u, y.v - x.v]);
    let g = chart.christoffel(x.u, x.v);
    let corr = |k: usize| 0.5 * (g[k][0][0] * d[0] * d[0] + 2.0 * g[k][0][1] * d[0] * d[1] + g[k][1][1] * d[1] * d[1]);
    SurfaceVector::new(d[0] + corr(0), d[1] + corr(1))
}

fn straight(chart: &SurfaceChart, p: SurfacePoint, q: SurfacePoint, n: usize) -> Vec<SurfacePoint> {
    let d = chart.wrap([q.u - p.u, q.v - p.v]);
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            SurfacePoint::new(p.u + t * d[0], p.v + t * d[1])
        })
        .collect()
}

/// Midpoint of the short geodesic between `a` and `b`.
fn geodesic_midpoint(chart: &SurfaceChart, a: SurfacePoint, b: SurfacePoint) -> Result<SurfacePoint> {
    let v = local_direction(chart, a, b);
    let len = chart.norm(a, v);
    let (alpha, len) = newton(chart, a, b, chart.bearing(a, v), len)
        .ok_or_else(|| GeomError::SearchFailure("short geodesic did not converge".into()))?;
    let y = shoot(chart, start_state(chart, a, alpha), 0.5 * len, FINE_STEP.min(len / 16.0).max(1e-9))
        .ok_or_else(|| GeomError::SearchFailure("midpoint left the chart".into()))?;
    Ok(SurfacePoint::new(y[0], y[1]))
}

/// Birkhoff curve shortening: endpoints fixed, each interior point is
/// replaced by the midpoint of the geodesic joining its neighbours,
/// alternating odd and even indices.
pub fn curve_shorten(chart: &SurfaceChart, points: &[SurfacePoint], iters: usize) -> Result<Vec<SurfacePoint>> {
    if points.len() < 3 {
        return Err(invalid("curve shortening needs at least three points"));
    }
    for p in points {
        chart.check(*p)?;
    }
    let mut pts = points.to_vec();
    for _ in 0..iters {
        let mut moved: f64 = 0.0;
        for parity in [1, 0] {
            for i in (1..pts.len() - 1).filter(|i| i % 2 == parity) {
                let m = geodesic_midpoint(chart, pts[i - 1], pts[i + 1])?;
                let d = chart.wrap([m.u - pts[i].u, m.v - pts[i].v]);
                moved = moved.max(d[0].hypot(d[1]));
                pts[i] = m;
            }
        }
        if moved < 1e-12 {
            break;
        }
    }
    Ok(pts)
}

/// Antipodal check helper for spheres: `π R` when exactly opposite.
pub fn sphere_distance(r: f64, a: SurfacePoint, b: SurfacePoint) -> f64 {
    let x = super::chart::stereographic_to_sphere(r, a);
    let y = super::chart::stereographic_to_sphere(r, b);
    let d: f64 = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    2.0 * r * (0.5 * d / r).min(1.0).asin().min(PI)
}
