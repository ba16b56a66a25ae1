use serde::Serialize;

use super::point::{perp_tangent, renormalize_frame, signed_turn, tangent_toward};
use super::{dist_k, geodesic_point, Curvature, CurvatureSign, ModelPoint, Tangent};
use crate::error::{invalid, Result};

/// An arc-length sampled curve in `M²ₖ` with its signed geodesic curvature
/// (positive when the curve bends to the left).
#[derive(Debug, Clone, Serialize)]
pub struct ModelCurve {
    #[serde(skip)]
    pub k: Curvature,
    pub s: Vec<f64>,
    pub points: Vec<ModelPoint>,
    #[serde(skip)]
    pub tangents: Vec<Tangent>,
    pub curvature: Vec<f64>,
}

impl ModelCurve {
    /// Integrates the Frenet system of `M²ₖ` for a prescribed signed
    /// curvature `kappa(s)`, returning `intervals + 1` equally spaced samples.
    pub fn integrate(
        start: ModelPoint,
        dir: Tangent,
        length: f64,
        intervals: usize,
        kappa: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if intervals == 0 || !(length > 0.0) || !length.is_finite() {
            return Err(invalid("curve needs a positive length and at least one interval"));
        }
        let k = start.curvature();
        let h = length / intervals as f64;
        let sub = ((h / 1e-3).ceil() as usize).max(1);
        let dt = h / sub as f64;
        let (eps, r) = match k.sign() {
            CurvatureSign::Positive => (-1.0, k.scale()),
            CurvatureSign::Negative => (1.0, k.scale()),
            CurvatureSign::Zero => (0.0, 1.0),
        };
        // state: x, t, n stacked
        let rhs = |s: f64, y: &[f64; 9]| -> [f64; 9] {
            let kap = kappa(s);
            let mut d = [0.0; 9];
            for i in 0..3 {
                let (x, t, n) = (y[i], y[3 + i], y[6 + i]);
                d[i] = t / r;
                d[3 + i] = eps * x / r + kap * n;
                d[6 + i] = -kap * t;
            }
            d
        };
        let mut y = [0.0; 9];
        let n0 = perp_tangent(&start, dir);
        y[..3].copy_from_slice(&start.coords());
        y[3..6].copy_from_slice(&dir.coords());
        y[6..].copy_from_slice(&n0.coords());
        let mut s_out = vec![0.0];
        let mut pts = vec![start];
        let mut tans = vec![dir];
        let mut kap = vec![kappa(0.0)];
        let mut s = 0.0;
        for i in 1..=intervals {
            for _ in 0..sub {
                let k1 = rhs(s, &y);
                let k2 = rhs(s + 0.5 * dt, &add9(&y, &k1, 0.5 * dt));
                let k3 = rhs(s + 0.5 * dt, &add9(&y, &k2, 0.5 * dt));
                let k4 = rhs(s + dt, &add9(&y, &k3, dt));
                for j in 0..9 {
                    y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
                s += dt;
            }
            let (p, t, n) = renormalize_frame(k, [y[0], y[1], y[2]], [y[3], y[4], y[5]]);
            y[..3].copy_from_slice(&p.coords());
            y[3..6].copy_from_slice(&t.coords());
            y[6..].copy_from_slice(&n);
            let si = length * i as f64 / intervals as f64;
            s = si;
            s_out.push(si);
            pts.push(p);
            tans.push(t);
            kap.push(kappa(si));
        }
        Ok(ModelCurve { k, s: s_out, points: pts, tangents: tans, curvature: kap })
    }

    /// The geodesic `[ab]` sampled at `intervals + 1` points.
    pub fn geodesic(a: ModelPoint, b: ModelPoint, intervals: usize) -> Result<Self> {
        let k = a.curvature();
        let len = dist_k(k, &a, &b)?;
        if intervals == 0 || len == 0.0 {
            return Err(invalid("degenerate geodesic"));
        }
        let mut s = Vec::new();
        let mut points = Vec::new();
        let mut tangents = Vec::new();
        for i in 0..=intervals {
            let t = len * i as f64 / intervals as f64;
            let p = geodesic_point(k, &a, &b, t)?;
            let tan = if i < intervals {
                tangent_toward(&p, &b)?
            } else {
                tangent_toward(&p, &a)?.neg()
            };
            s.push(t);
            points.push(p);
            tangents.push(tan);
        }
        Ok(ModelCurve { k, s, curvature: vec![0.0; intervals + 1], points, tangents })
    }

    /// A piecewise-geodesic curve through `points`; the curvature at interior
    /// vertices is the signed turning angle over the mean adjacent step and
    /// zero at the ends.
    pub fn polyline(points: Vec<ModelPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a polyline needs two points"));
        }
        let k = points[0].curvature();
        let n = points.len();
        let mut s = vec![0.0];
        for w in points.windows(2) {
            let d = dist_k(k, &w[0], &w[1])?;
            if d == 0.0 {
                return Err(invalid("repeated polyline vertex"));
            }
            s.push(s.last().unwrap() + d);
        }
        let mut tangents = Vec::with_capacity(n);
        let mut curvature = vec![0.0; n];
        for i in 0..n {
            if i + 1 < n {
                tangents.push(tangent_toward(&points[i], &points[i + 1])?);
            } else {
                tangents.push(tangent_toward(&points[i], &points[i - 1])?.neg());
            }
            if i > 0 && i + 1 < n {
                let incoming = tangent_toward(&points[i], &points[i - 1])?.neg();
                let turn = signed_turn(&points[i], incoming, tangents[i]);
                curvature[i] = turn / (0.5 * (s[i + 1] - s[i - 1]));
            }
        }
        Ok(ModelCurve { k, s, points, tangents, curvature })
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn chord(&self) -> f64 {
        dist_k(self.k, &self.points[0], self.points.last().unwrap()).unwrap_or(f64::NAN)
    }

    pub fn abs_curvature(&self, i: usize) -> f64 {
        self.curvature[i].abs()
    }
}

fn add9(y: &[f64; 9], d: &[f64; 9], h: f64) -> [f64; 9] {
    let mut o = *y;
    for i in 0..9 {
        o[i] += h * d[i];
    }
    o
}
