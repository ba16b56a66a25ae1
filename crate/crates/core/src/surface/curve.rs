use serde::Serialize;

use super::chart::{SurfaceChart, SurfacePoint, SurfaceVector};
use super::distance::local_direction;
use super::geodesic::GeodesicPath;
use crate::error::{invalid, Result};

/// One sample of a curve on a chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub point: SurfacePoint,
    /// Unit tangent, when the sampling provides one.
    pub tangent: Option<SurfaceVector>,
    /// Covariant acceleration `∇_γ̇ γ̇`, for smooth samplings.
    pub acceleration: Option<SurfaceVector>,
}

/// An arclength-parametrised curve on a chart, either sampled from a smooth
/// closure (derivatives by finite differences) or given as a polyline.
#[derive(Debug, Clone, Serialize)]
pub struct SampledCurve {
    pub samples: Vec<CurveSample>,
    pub polyline: bool,
}

const UNIT_SPEED_TOL: f64 = 1e-8;

fn covariant(chart: &SurfaceChart, x: SurfacePoint, d: SurfaceVector, dd: SurfaceVector) -> SurfaceVector {
    let g = chart.christoffel(x.u, x.v);
    let q = |k: usize| g[k][0][0] * d.du * d.du + 2.0 * g[k][0][1] * d.du * d.dv + g[k][1][1] * d.dv * d.dv;
    SurfaceVector::new(dd.du + q(0), dd.dv + q(1))
}

impl SampledCurve {
    /// Samples `f` on `intervals + 1` equally spaced arclength values in
    /// `[0, length]`. Derivatives use five-point stencils of step `1e−3`;
    /// samples whose stencil leaves the chart get no derivatives.
    pub fn from_fn(
        chart: &SurfaceChart,
        length: f64,
        intervals: usize,
        f: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self> {
        if !(length > 0.0) || intervals == 0 {
            return Err(invalid("curve needs positive length and at least one interval"));
        }
        let h = 1e-3f64.min(0.1 * length);
        let at = |s: f64| {
            let (u, v) = f(s);
            SurfacePoint::new(u, v)
        };
        let mut samples = Vec::with_capacity(intervals + 1);
        for i in 0..=intervals {
            let s = length * i as f64 / intervals as f64;
            let point = at(s);
            chart.check(point)?;
            let st: Vec<SurfacePoint> = [-2.0, -1.0, 1.0, 2.0].iter().map(|k| at(s + k * h)).collect();
            let (tangent, acceleration) = if st.iter().all(|p| chart.contains(p.u, p.v)) {
                let w = |c: fn(&SurfacePoint) -> f64| [c(&st[0]), c(&st[1]), c(&point), c(&st[2]), c(&st[3])];
                let (u, v) = (w(|p| p.u), w(|p| p.v));
                let wrap2 = |a: [f64; 5], b: [f64; 5]| {
                    let mut out = (a, b);
                    for j in 0..5 {
                        let d = chart.wrap([a[j] - a[2], b[j] - b[2]]);
                        out.0[j] = d[0];
                        out.1[j] = d[1];
                    }
                    out
                };
                let (u, v) = wrap2(u, v);
                let d1 = |x: [f64; 5]| (x[0] - 8.0 * x[1] + 8.0 * x[3] - x[4]) / (12.0 * h);
                let d2 = |x: [f64; 5]| (-x[0] + 16.0 * x[1] - 30.0 * x[2] + 16.0 * x[3] - x[4]) / (12.0 * h * h);
                let d = SurfaceVector::new(d1(u), d1(v));
                let speed = chart.norm(point, d);
                if (speed - 1.0).abs() > UNIT_SPEED_TOL {
                    return Err(invalid(format!("curve is not unit speed at s = {s} (|γ̇| = {speed})")));
                }
                let dd = SurfaceVector::new(d2(u), d2(v));
                (Some(d), Some(covariant(chart, point, d, dd)))
            } else {
                (None, None)
            };
            samples.push(CurveSample { s, point, tangent, acceleration });
        }
        Ok(SampledCurve { samples, polyline: false })
    }

    /// Every `stride`-th node of an integrated geodesic, as a smooth sampling
    /// with zero acceleration.
    pub fn from_geodesic(geod: &GeodesicPath, stride: usize) -> Result<Self> {
        if stride == 0 || geod.s.len() < 2 {
            return Err(invalid("need a non-degenerate geodesic and a positive stride"));
        }
        let n = geod.s.len() - 1;
        if !n.is_multiple_of(stride) {
            return Err(invalid(format!("stride {stride} does not divide the {n} geodesic steps")));
        }
        let samples = (0..=n)
            .step_by(stride)
            .map(|i| CurveSample {
                s: geod.s[i],
                point: geod.point(i),
                tangent: Some(geod.velocity(i)),
                acceleration: Some(SurfaceVector::new(0.0, 0.0)),
            })
            .collect();
        Ok(SampledCurve { samples, polyline: false })
    }

    /// A polyline through `points` at arclength values `s` (increasing).
    pub fn from_points(chart: &SurfaceChart, s: &[f64], points: &[SurfacePoint]) -> Result<Self> {
        if s.len() != points.len() || s.len() < 2 {
            return Err(invalid("polyline needs matching s and point lists of length ≥ 2"));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("arclength values must increase"));
        }
        for p in points {
            chart.check(*p)?;
        }
        let n = points.len();
        let samples = (0..n)
            .map(|i| {
                let t = if i + 1 < n {
                    local_direction(chart, points[i], points[i + 1])
                } else {
                    local_direction(chart, points[i], points[i - 1]).scale(-1.0)
                };
                CurveSample { s: s[i], point: points[i], tangent: Some(t.scale(1.0 / chart.norm(points[i], t))), acceleration: None }
            })
            .collect();
        Ok(SampledCurve { samples, polyline: true })
    }

    /// Parses a polyline from CSV with header `s,u,v`.
    pub fn from_csv(chart: &SurfaceChart, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim().replace(' ', "") == "s,u,v" => {}
            other => return Err(invalid(format!("expected header `s,u,v`, got {other:?}"))),
        }
        let (mut s, mut pts) = (Vec::new(), Vec::new());
        for (n, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid(format!("line {}: {e}", n + 2)))?;
            if vals.len() != 3 {
                return Err(invalid(format!("line {}: expected 3 fields", n + 2)));
            }
            s.push(vals[0]);
            pts.push(SurfacePoint::new(vals[1], vals[2]));
        }
        Self::from_points(chart, &s, &pts)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,u,v\n");
        for c in &self.samples {
            out.push_str(&format!("{},{},{}\n", c.s, c.point.u, c.point.v));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |c| c.s - self.samples[0].s)
    }

    pub fn start(&self) -> SurfacePoint {
        self.samples[0].point
    }

    pub fn end(&self) -> SurfacePoint {
        self.samples[self.samples.len() - 1].point
    }
}

/// Signed geodesic curvature at sample `i` (positive when turning left).
/// Polylines use the turning angle over the mean adjacent step.
pub fn signed_geodesic_curvature(chart: &SurfaceChart, curve: &SampledCurve, i: usize) -> Result<f64> {
    let n = curve.samples.len();
    if i >= n {
        return Err(invalid(format!("sample index {i} out of range")));
    }
    let c = &curve.samples[i];
    if curve.polyline {
        if i == 0 || i + 1 == n {
            return Err(invalid("turning angle is undefined at a polyline endpoint"));
        }
        let x = c.point;
        let a = local_direction(chart, x, curve.samples[i - 1].point).scale(-1.0);
        let b = local_direction(chart, x, curve.samples[i + 1].point);
        let (_, ja) = chart.rotate_quarter(x, a);
        let turn = chart.inner(x, ja, b).atan2(chart.inner(x, a, b));
        let ds = 0.5 * (curve.samples[i + 1].s - curve.samples[i - 1].s);
        return Ok(turn / ds);
    }
    match (c.tangent, c.acceleration) {
        (Some(t), Some(a)) => {
            let (_, n) = chart.rotate_quarter(c.point, t);
            Ok(chart.inner(c.point, a, n))
        }
        _ => Err(invalid(format!("no derivative stencil at sample {i}"))),
    }
}

/// `|κ_g|` at sample `i`.
pub fn geodesic_curvature(chart: &SurfaceChart, curve: &SampledCurve, i: usize) -> Result<f64> {
    signed_geodesic_curvature(chart, curve, i).map(f64::abs)
}
