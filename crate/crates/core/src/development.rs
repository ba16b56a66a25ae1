//! Developments of a distance profile `s ↦ |pγ(s)|` into `M²ₖ`.
//!
//! A development is a piecewise-geodesic curve `γ̄` in the model plane with a
//! pole `p̄` such that `|p̄γ̄(s)| = |pγ(s)|` at every sample and consecutive
//! chords have the arclength step as length. Successive points are placed
//! clockwise about the pole, i.e. with decreasing polar angle.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, GeomError, Result};
use crate::model_space::{
    angle_from_sss, dist_k, exp_map, polygon_convexity, reference_tangent, rho_k, signed_turn,
    tangent_toward, turn_left, ConvexityReport, Curvature, ModelPoint, Orientation,
};

/// Lipschitz slack allowed between consecutive samples.
const LIPSCHITZ_SLACK: f64 = 1e-12;
/// Turning-sign slack of the convexity tests.
const TURN_SLACK: f64 = 1e-9;

/// Samples `(s_i, d_i)` of the distance from a fixed point along a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    #[serde(skip)]
    pub k: Curvature,
    pub s: Vec<f64>,
    pub d: Vec<f64>,
}

impl DistanceProfile {
    pub fn new(k: Curvature, s: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if s.len() != d.len() {
            return Err(invalid("s and d have different lengths"));
        }
        if s.len() < 2 {
            return Err(invalid("a profile needs at least two samples"));
        }
        if s[0] != 0.0 {
            return Err(invalid("profile must start at s = 0"));
        }
        for i in 0..s.len() {
            if !s[i].is_finite() || !d[i].is_finite() || d[i] < 0.0 {
                return Err(invalid(format!("bad sample {i}: ({}, {})", s[i], d[i])));
            }
            if k.value() > 0.0 && d[i] >= k.diameter_bound() {
                return Err(invalid(format!("d[{i}] = {} reaches π/√k", d[i])));
            }
            if i > 0 {
                let ds = s[i] - s[i - 1];
                if !(ds > 0.0) {
                    return Err(invalid(format!("arclength not increasing at sample {i}")));
                }
                if (d[i] - d[i - 1]).abs() > ds + LIPSCHITZ_SLACK {
                    return Err(invalid(format!("profile is not 1-Lipschitz at sample {i}")));
                }
            }
        }
        Ok(DistanceProfile { k, s, d })
    }

    /// Samples `f` on a uniform grid with `intervals` steps over `[0, length]`.
    pub fn from_fn(k: Curvature, length: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if intervals == 0 {
            return Err(invalid("need at least one interval"));
        }
        let s: Vec<f64> = (0..=intervals).map(|i| length * i as f64 / intervals as f64).collect();
        let d = s.iter().map(|&t| f(t)).collect();
        Self::new(k, s, d)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,d\n");
        for (s, d) in self.s.iter().zip(&self.d) {
            let _ = writeln!(out, "{s},{d}");
        }
        out
    }

    pub fn from_csv(k: Curvature, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("s,d") => {}
            other => return Err(invalid(format!("expected header `s,d`, got {other:?}"))),
        }
        let (mut s, mut d) = (Vec::new(), Vec::new());
        for (n, line) in lines.enumerate() {
            let mut it = line.split(',').map(str::trim);
            let parse = |x: Option<&str>| -> Result<f64> {
                x.ok_or_else(|| invalid(format!("row {} has too few fields", n + 1)))?
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("row {}: {e}", n + 1)))
            };
            s.push(parse(it.next())?);
            d.push(parse(it.next())?);
            if it.next().is_some() {
                return Err(invalid(format!("row {} has too many fields", n + 1)));
            }
        }
        Self::new(k, s, d)
    }
}

/// A development of a distance profile.
#[derive(Debug, Clone, Serialize)]
pub struct DevelopedCurve {
    pub pole: ModelPoint,
    pub s: Vec<f64>,
    pub points: Vec<ModelPoint>,
    /// Polar angle of each point about the pole (non-increasing).
    pub pole_angles: Vec<f64>,
    /// Signed turning angle at each interior vertex of the developed polyline.
    pub turning: Vec<f64>,
}

impl DevelopedCurve {
    pub fn curvature(&self) -> Curvature {
        self.pole.curvature()
    }

    /// Total polar angle swept about the pole.
    pub fn pole_angle(&self) -> f64 {
        self.pole_angles[0] - self.pole_angles.last().unwrap()
    }
}

/// Develops `profile` about `pole`. The first point lies on the pole's
/// reference direction.
///
/// When the curve passes through the pole (`d_i = 0` at an interior sample)
/// the polar angle advances by π so that the development continues straight
/// through the pole.
pub fn develop(profile: &DistanceProfile, pole: &ModelPoint) -> Result<DevelopedCurve> {
    let k = profile.k;
    if pole.curvature() != k {
        return Err(invalid(format!("pole carries {} but the profile {}", pole.curvature(), k)));
    }
    // re-validate in case the fields were edited after construction
    let profile = DistanceProfile::new(k, profile.s.clone(), profile.d.clone())?;
    let n = profile.len();
    let (s, d) = (&profile.s, &profile.d);
    let zero = |x: f64| x <= 1e-15;
    let mut phi = vec![0.0; n];
    for i in 0..n - 1 {
        let ds = s[i + 1] - s[i];
        let inc = if zero(d[i + 1]) {
            0.0
        } else if zero(d[i]) {
            if i == 0 || zero(d[i - 1]) {
                0.0
            } else {
                // `phi[i]` was carried over from the previous sample
                PI
            }
        } else if ds - (d[i + 1] - d[i]).abs() <= LIPSCHITZ_SLACK {
            // radial step; the half-angle form would return √ε noise here
            0.0
        } else if d[i] + d[i + 1] - ds <= LIPSCHITZ_SLACK {
            PI
        } else {
            angle_from_sss(k, d[i], d[i + 1], ds).map_err(|e| GeomError::NumericalInfeasibility {
                index: i,
                detail: format!("triangle ({}, {}, {ds}) is not realizable: {e}", d[i], d[i + 1]),
            })?
        };
        phi[i + 1] = phi[i] - inc;
    }
    let e = reference_tangent(pole);
    let points: Vec<ModelPoint> =
        (0..n).map(|i| exp_map(pole, turn_left(pole, e, phi[i]), d[i])).collect();
    let mut turning = Vec::with_capacity(n.saturating_sub(2));
    for i in 1..n - 1 {
        let t = match (tangent_toward(&points[i], &points[i - 1]), tangent_toward(&points[i], &points[i + 1])) {
            (Ok(a), Ok(b)) => signed_turn(&points[i], a.neg(), b),
            _ => 0.0,
        };
        turning.push(t);
    }
    Ok(DevelopedCurve { pole: *pole, s: profile.s.clone(), points, pole_angles: phi, turning })
}

/// Outcome of [`is_convex_development`].
#[derive(Debug, Clone, Serialize)]
pub struct DevelopmentConvexity {
    pub convex: bool,
    /// The closing conditions hold: the pole angle is at most π and the turns
    /// at the pole and at the two junction vertices have the convex sign.
    pub endpoint_condition: bool,
    /// Offending vertices in curve indexing; the pole is reported as `None`.
    pub violations: Vec<Option<usize>>,
    pub pole_angle: f64,
    /// The pole lies on the curve (`d = 0` somewhere), where the test at the
    /// pole degenerates.
    pub pole_on_curve: bool,
    pub polygon: ConvexityReport,
}

fn closed_convexity(dc: &DevelopedCurve, lo: usize, hi: usize) -> Result<DevelopmentConvexity> {
    let k = dc.curvature();
    let mut poly = Vec::with_capacity(hi - lo + 2);
    poly.push(dc.pole);
    poly.extend_from_slice(&dc.points[lo..=hi]);
    let rep = polygon_convexity(&poly, Some(Orientation::Right), TURN_SLACK)?;
    let pole_angle = dc.pole_angles[lo] - dc.pole_angles[hi];
    let pole_on_curve = dc.points[lo..=hi].iter().any(|p| dist_k(k, &dc.pole, p).map_or(true, |d| d <= 1e-12));
    let pole_ok = pole_angle <= PI + TURN_SLACK;
    let violations: Vec<Option<usize>> =
        rep.violations.iter().map(|&j| if j == 0 { None } else { Some(j - 1 + lo) }).collect();
    let junction_bad = violations.iter().any(|v| v.is_none() || *v == Some(lo) || *v == Some(hi));
    let endpoint_condition = pole_ok && !junction_bad;
    let mut violations = violations;
    if !pole_ok && !violations.contains(&None) {
        violations.insert(0, None);
    }
    Ok(DevelopmentConvexity {
        convex: rep.convex && pole_ok && violations.is_empty(),
        endpoint_condition,
        violations,
        pole_angle,
        pole_on_curve,
        polygon: rep,
    })
}

/// Tests convexity of the development closed up by the two radial segments
/// from the pole to its endpoints.
pub fn is_convex_development(dc: &DevelopedCurve) -> Result<DevelopmentConvexity> {
    closed_convexity(dc, 0, dc.points.len() - 1)
}

/// Convexity of the development restricted to the arclength window
/// `[s_i − δ, s_i + δ]`, clipped to the curve, and closed by radial segments.
pub fn local_convexity_check(dc: &DevelopedCurve, i: usize, delta: f64) -> Result<bool> {
    if i >= dc.s.len() {
        return Err(invalid(format!("sample {i} out of range")));
    }
    if !(delta > 0.0) {
        return Err(invalid("window must have positive width"));
    }
    let (a, b) = (dc.s[i] - delta - 1e-12, dc.s[i] + delta + 1e-12);
    let lo = dc.s.iter().position(|&t| t >= a).unwrap_or(i).min(i);
    let hi = dc.s.iter().rposition(|&t| t <= b).unwrap_or(i).max(i);
    if hi == lo {
        return Ok(true);
    }
    Ok(closed_convexity(dc, lo, hi)?.convex)
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    /// Largest `D²f_i − (1 − k f_i)` over interior samples.
    pub max_excess: f64,
    pub argmax: usize,
    pub slack: f64,
    pub pass: bool,
}

/// Discrete test of `f'' ≤ 1 − k f` for `f = ρₖ(d)` by second differences.
///
/// The allowed excess is `tol / h²` with `tol = 1e−6` and `h` the largest
/// step, accounting for rounding amplified by the difference quotient.
pub fn support_inequality_check(profile: &DistanceProfile) -> Result<SupportReport> {
    const TOL: f64 = 1e-6;
    let n = profile.len();
    if n < 3 {
        return Err(invalid("need at least three samples"));
    }
    let k = profile.k;
    let f = profile.d.iter().map(|&d| rho_k(k, d)).collect::<Result<Vec<f64>>>()?;
    let s = &profile.s;
    let h = s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let slack = TOL / (h * h);
    let mut max_excess = f64::NEG_INFINITY;
    let mut argmax = 1;
    for i in 1..n - 1 {
        let (h0, h1) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        let d2 = 2.0 * (h0 * f[i + 1] - (h0 + h1) * f[i] + h1 * f[i - 1]) / (h0 * h1 * (h0 + h1));
        let excess = d2 - (1.0 - k.value() * f[i]);
        if excess > max_excess {
            max_excess = excess;
            argmax = i;
        }
    }
    Ok(SupportReport { max_excess, argmax, slack, pass: max_excess <= slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn flat() -> Curvature {
        Curvature::FLAT
    }

    fn check_invariants(p: &DistanceProfile, dc: &DevelopedCurve) {
        let k = p.k;
        for i in 0..p.len() {
            assert_abs_diff_eq!(dist_k(k, &dc.pole, &dc.points[i]).unwrap(), p.d[i], epsilon = 1e-9);
            if i > 0 {
                let chord = dist_k(k, &dc.points[i - 1], &dc.points[i]).unwrap();
                assert_abs_diff_eq!(chord, p.s[i] - p.s[i - 1], epsilon = 1e-9);
                assert!(dc.pole_angles[i] <= dc.pole_angles[i - 1]);
            }
        }
    }

    #[test]
    fn radial_profile_is_collinear() {
        let p = DistanceProfile::from_fn(flat(), 2.0, 20, |s| 0.5 + s).unwrap();
        let dc = develop(&p, &ModelPoint::planar(0.0, 0.0)).unwrap();
        check_invariants(&p, &dc);
        for q in &dc.points {
            assert_abs_diff_eq!(q.coords()[1], 0.0, epsilon = 1e-12);
        }
        assert!(is_convex_development(&dc).unwrap().convex);
    }

    #[test]
    fn constant_profile_lies_on_circle() {
        let r = 1.3;
        let p = DistanceProfile::from_fn(flat(), 2.0, 16, |_| r).unwrap();
        let dc = develop(&p, &ModelPoint::planar(0.0, 0.0)).unwrap();
        check_invariants(&p, &dc);
        let step = 2.0 * (0.125 / (2.0 * r)).asin();
        for w in dc.pole_angles.windows(2) {
            assert_abs_diff_eq!(w[0] - w[1], step, epsilon = 1e-12);
        }
        let rep = is_convex_development(&dc).unwrap();
        assert!(rep.convex && rep.endpoint_condition, "{rep:?}");
    }

    #[test]
    fn development_of_planar_curve_is_congruent() {
        // a convex arc y = -x²/4 + 1 seen from the origin
        let pts: Vec<(f64, f64)> = (0..=200).map(|i| {
            let x = -1.0 + 2.0 * i as f64 / 200.0;
            (x, 1.0 - 0.25 * x * x)
        }).collect();
        let mut s = vec![0.0];
        for w in pts.windows(2) {
            s.push(s.last().unwrap() + ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt());
        }
        let d = pts.iter().map(|(x, y)| x.hypot(*y)).collect();
        let p = DistanceProfile::new(flat(), s, d).unwrap();
        let dc = develop(&p, &ModelPoint::planar(0.0, 0.0)).unwrap();
        check_invariants(&p, &dc);
        // pairwise distances reproduce the original polyline
        let k = flat();
        for (i, j) in [(0, 200), (10, 150), (50, 51)] {
            let orig = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            assert_abs_diff_eq!(dist_k(k, &dc.points[i], &dc.points[j]).unwrap(), orig, epsilon = 1e-9);
        }
        assert!(is_convex_development(&dc).unwrap().convex);
    }

    #[test]
    fn wiggle_profile_is_not_convex() {
        let pts: Vec<(f64, f64)> = (0..=400).map(|i| {
            let x = -1.5 + 3.0 * i as f64 / 400.0;
            (x, 1.0 + 0.2 * (3.0 * x).sin())
        }).collect();
        let mut s = vec![0.0];
        for w in pts.windows(2) {
            s.push(s.last().unwrap() + ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt());
        }
        let d = pts.iter().map(|(x, y)| x.hypot(*y)).collect();
        let p = DistanceProfile::new(flat(), s, d).unwrap();
        let dc = develop(&p, &ModelPoint::planar(0.0, 0.0)).unwrap();
        let rep = is_convex_development(&dc).unwrap();
        assert!(!rep.convex);
        assert!(rep.violations.iter().any(|v| v.is_some()));
        // at the convex crest x = π/6 the window is convex, near the trough it is not
        let crest = pts.iter().position(|(x, _)| *x >= PI / 6.0).unwrap();
        let trough = pts.iter().position(|(x, _)| *x >= -PI / 6.0).unwrap();
        assert!(local_convexity_check(&dc, crest, 0.1).unwrap());
        assert!(!local_convexity_check(&dc, trough, 0.1).unwrap());
        assert!(local_convexity_check(&dc, 5, 1e-4).unwrap());
        assert!(local_convexity_check(&dc, 5, 0.0).is_err());
    }

    #[test]
    fn line_through_pole() {
        let p = DistanceProfile::from_fn(flat(), 2.0, 20, |s| (1.0 - s).abs()).unwrap();
        let dc = develop(&p, &ModelPoint::planar(0.0, 0.0)).unwrap();
        check_invariants(&p, &dc);
        assert_abs_diff_eq!(dist_k(flat(), &dc.points[0], &dc.points[20]).unwrap(), 2.0, epsilon = 1e-12);
        let rep = is_convex_development(&dc).unwrap();
        assert!(rep.convex && rep.pole_on_curve, "{rep:?}");
    }

    #[test]
    fn rejects_lipschitz_violation() {
        let r = DistanceProfile::new(flat(), vec![0.0, 0.1], vec![1.0, 1.2]);
        assert!(matches!(r, Err(GeomError::InvalidInput(_))));
    }

    #[test]
    fn reports_unrealizable_index() {
        // legal for the Lipschitz check but Δs > d_i + d_{i+1} on the sphere perimeter
        let k = Curvature::new(1.0).unwrap();
        let p = DistanceProfile { k, s: vec![0.0, 0.1, 3.1], d: vec![3.0, 3.05, 3.1] };
        match develop(&p, &ModelPoint::origin(k)) {
            Err(GeomError::NumericalInfeasibility { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    fn line_profile(k: Curvature, a: f64, len: f64, n: usize) -> DistanceProfile {
        // distance from a point at distance `a` from the midpoint foot of a geodesic
        let kv = k.value();
        DistanceProfile::from_fn(k, len, n, |s| {
            let t = s - 0.5 * len;
            if kv > 0.0 {
                (a.cos() * t.cos()).acos()
            } else if kv < 0.0 {
                (a.cosh() * t.cosh()).acosh()
            } else {
                a.hypot(t)
            }
        })
        .unwrap()
    }

    #[test]
    fn support_equality_in_model() {
        for kv in [-1.0, 0.0, 1.0] {
            let k = Curvature::new(kv).unwrap();
            let p = line_profile(k, 0.7, 2.0, 200);
            let r = support_inequality_check(&p).unwrap();
            assert!(r.max_excess.abs() < 1e-4, "k={kv}: {r:?}");
            assert!(r.pass);
        }
    }

    #[test]
    fn support_strict_on_sphere_and_violated_on_hyperbolic_plane() {
        let sphere = line_profile(Curvature::new(1.0).unwrap(), 0.7, 2.0, 200);
        let as_flat = DistanceProfile { k: flat(), ..sphere };
        let r = support_inequality_check(&as_flat).unwrap();
        assert!(r.pass && r.max_excess < -1e-3);
        let hyp = line_profile(Curvature::new(-1.0).unwrap(), 0.7, 2.0, 200);
        let as_flat = DistanceProfile { k: flat(), ..hyp };
        let r = support_inequality_check(&as_flat).unwrap();
        assert!(!r.pass && r.max_excess > 1e-2);
    }

    #[test]
    fn csv_round_trip() {
        let p = line_profile(flat(), 0.5, 1.0, 7);
        let q = DistanceProfile::from_csv(flat(), &p.to_csv()).unwrap();
        assert_eq!(p, q);
        assert!(DistanceProfile::from_csv(flat(), "x,y\n0,1\n").is_err());
    }
}
