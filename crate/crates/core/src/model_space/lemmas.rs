//! Model-plane facts used by the comparison arguments: the perimeter bound
//! for convex spherical polygons, monotonicity of the distance sum from the
//! ends of a segment, and Alexandrov's gluing lemma.

use std::f64::consts::PI;

use serde::Serialize;

use super::point::tangent_toward;
use super::{
    angle_from_sss, dist_k, exp_map, polygon_convexity, Curvature, ModelPoint, ModelSegment,
};
use crate::error::{invalid, GeomError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerimeterReport {
    pub perimeter: f64,
    pub bound: f64,
    pub bound_satisfied: bool,
    pub equality_flag: bool,
}

/// Checks `perimeter ≤ 2π/√k` for a closed convex geodesic polygon in `M²ₖ`,
/// `k > 0`. Equality is flagged within 1e−9 of the bound.
pub fn convex_polygon_perimeter_check(k: Curvature, polygon: &[ModelPoint]) -> Result<PerimeterReport> {
    if k.value() <= 0.0 {
        return Err(invalid("the perimeter bound needs k > 0"));
    }
    if polygon.len() < 2 {
        return Err(invalid("a polygon needs at least two vertices"));
    }
    let conv = polygon_convexity(polygon, None, 1e-9)?;
    if let Some(i) = conv.first_violation() {
        return Err(invalid(format!("polygon is not convex at vertex {i}")));
    }
    let n = polygon.len();
    let mut perimeter = 0.0;
    for i in 0..n {
        perimeter += dist_k(k, &polygon[i], &polygon[(i + 1) % n])?;
    }
    let bound = k.perimeter_bound();
    Ok(PerimeterReport {
        perimeter,
        bound,
        bound_satisfied: perimeter <= bound + 1e-9,
        equality_flag: (perimeter - bound).abs() <= 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    /// `(t, |p1 c(t)| + |p2 c(t)|)` on a uniform grid.
    pub samples: Vec<(f64, f64)>,
    pub monotone: bool,
}

/// Samples `t ↦ |p1 c(t)| + |p2 c(t)|` along the geodesic `ray` leaving an
/// interior point `q` of `[p1 p2]` and reports whether it strictly increases.
pub fn sum_dist_monotone_check(
    k: Curvature,
    p1: &ModelPoint,
    p2: &ModelPoint,
    q: &ModelPoint,
    ray: &ModelSegment,
    samples: usize,
) -> Result<MonotoneReport> {
    if samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let d12 = dist_k(k, p1, p2)?;
    let d1 = dist_k(k, p1, q)?;
    let d2 = dist_k(k, q, p2)?;
    if d1 <= 1e-12 || d2 <= 1e-12 || (d1 + d2 - d12).abs() > 1e-9 {
        return Err(invalid("q is not an interior point of [p1 p2]"));
    }
    if k.value() > 0.0 && (d12 >= k.diameter_bound() || ray.length > k.diameter_bound()) {
        return Err(invalid("segment or ray too long for k > 0"));
    }
    if dist_k(k, &ray.a, q)? > 1e-9 {
        return Err(invalid("ray does not start at q"));
    }
    let u = tangent_toward(&ray.a, &ray.b)?;
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = ray.length * i as f64 / (samples - 1) as f64;
        let c = exp_map(&ray.a, u, t);
        out.push((t, dist_k(k, p1, &c)? + dist_k(k, p2, &c)?));
    }
    let monotone = out.windows(2).enumerate().all(|(i, w)| {
        let step = w[1].1 - w[0].1;
        if i == 0 {
            step > -1e-10
        } else {
            step > 0.0
        }
    });
    Ok(MonotoneReport { samples: out, monotone })
}

/// Side lengths of two triangles `pqr`, `pqs` glued along `[pq]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct AlexandrovSides {
    pub pq: f64,
    pub pr: f64,
    pub ps: f64,
    pub qr: f64,
    pub qs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlexandrovBranch {
    SumBelowPi,
    Straight,
    SumAbovePi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlexandrovReport {
    pub angle_sum_at_q: f64,
    pub angle_prq: f64,
    pub angle_psq: f64,
    /// Angles `∠abc`, `∠acb` of the comparison triangle with `|bc| = |qr| + |qs|`.
    pub comparison_angles: (f64, f64),
    pub branch: AlexandrovBranch,
    /// Both directions of the equivalence hold at the given tolerance.
    pub verdict: bool,
}

/// Evaluates Alexandrov's lemma for `pqr`, `pqs` glued exteriorly along
/// `[pq]`: the angle sum at `q` is at most π exactly when both angles at
/// `r`, `s` dominate the corresponding angles of the straightened triangle,
/// and at least π exactly when both are dominated.
pub fn alexandrov_lemma(k: Curvature, sides: AlexandrovSides, tol: f64) -> Result<AlexandrovReport> {
    let AlexandrovSides { pq, pr, ps, qr, qs } = sides;
    let bc = qr + qs;
    let unrealizable = |e: GeomError| invalid(format!("unrealizable configuration: {e}"));
    if k.value() > 0.0 && pr + ps + bc >= k.perimeter_bound() {
        return Err(invalid("comparison triangle perimeter reaches 2π/√k"));
    }
    let a = |x: f64, y: f64, z: f64| angle_from_sss(k, x, y, z).map_err(unrealizable);
    let pqr = a(pq, qr, pr)?;
    let pqs = a(pq, qs, ps)?;
    let prq = a(pr, qr, pq)?;
    let psq = a(ps, qs, pq)?;
    let abc = a(pr, bc, ps)?;
    let acb = a(ps, bc, pr)?;
    let sum = pqr + pqs;

    let branch = if sum < PI - tol {
        AlexandrovBranch::SumBelowPi
    } else if sum > PI + tol {
        AlexandrovBranch::SumAbovePi
    } else {
        AlexandrovBranch::Straight
    };
    let dr = prq - abc;
    let ds = psq - acb;
    let both_above = dr > tol && ds > tol;
    let both_below = dr < -tol && ds < -tol;
    let mixed = (dr > tol && ds < -tol) || (dr < -tol && ds > tol);
    let forward = match branch {
        AlexandrovBranch::SumBelowPi => dr >= -tol && ds >= -tol,
        AlexandrovBranch::SumAbovePi => dr <= tol && ds <= tol,
        AlexandrovBranch::Straight => true,
    };
    let backward = !mixed && (!both_above || sum <= PI + tol) && (!both_below || sum >= PI - tol);
    Ok(AlexandrovReport {
        angle_sum_at_q: sum,
        angle_prq: prq,
        angle_psq: psq,
        comparison_angles: (abc, acb),
        branch,
        verdict: forward && backward,
    })
}
