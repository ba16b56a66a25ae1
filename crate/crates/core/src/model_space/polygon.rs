use std::f64::consts::PI;

use serde::Serialize;

use super::point::{side_measure, signed_turn, tangent_toward};
use super::{dist_k, ModelPoint, Orientation};
use crate::error::{invalid, Result};

/// Outcome of a convexity test on a closed piecewise-geodesic curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Turning sense of the curve; `None` when every vertex is straight.
    pub orientation: Option<Orientation>,
    /// Signed turning angle at each input vertex (zero at dropped duplicates).
    pub turns: Vec<f64>,
    pub total_turning: f64,
    /// Input indices of offending vertices, in order of discovery.
    pub violations: Vec<usize>,
}

impl ConvexityReport {
    pub fn first_violation(&self) -> Option<usize> {
        self.violations.first().copied()
    }
}

/// Tests whether the closed polygon through `vertices` is convex.
///
/// Every vertex turn must have one sign (within `tol`), and every vertex must
/// lie weakly on the inner side of every edge. Coincident consecutive
/// vertices are merged, and full reversals (turn of ±π) count as neutral so
/// that degenerate, doubled-back polygons are accepted. When `required` is
/// given the turning sense must match it.
pub fn polygon_convexity(
    vertices: &[ModelPoint],
    required: Option<Orientation>,
    tol: f64,
) -> Result<ConvexityReport> {
    let Some(first) = vertices.first() else {
        return Err(invalid("empty polygon"));
    };
    let k = first.curvature();
    let mut keep: Vec<usize> = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if let Some(&last) = keep.last() {
            if dist_k(k, &vertices[last], v)? <= 1e-12 {
                continue;
            }
        }
        keep.push(i);
    }
    while keep.len() > 1 && dist_k(k, &vertices[keep[0]], &vertices[*keep.last().unwrap()])? <= 1e-12 {
        keep.pop();
    }
    let mut turns = vec![0.0; vertices.len()];
    let m = keep.len();
    if m < 3 {
        return Ok(ConvexityReport {
            convex: true,
            orientation: None,
            turns,
            total_turning: 0.0,
            violations: Vec::new(),
        });
    }
    let mut total = 0.0;
    for j in 0..m {
        let prev = &vertices[keep[(j + m - 1) % m]];
        let cur = &vertices[keep[j]];
        let next = &vertices[keep[(j + 1) % m]];
        let incoming = tangent_toward(cur, prev)?.neg();
        let outgoing = tangent_toward(cur, next)?;
        let t = signed_turn(cur, incoming, outgoing);
        turns[keep[j]] = t;
        total += t;
    }
    let neutral = |t: f64| t.abs() <= tol || t.abs() >= PI - tol;
    let signed_sum: f64 = keep.iter().map(|&i| turns[i]).filter(|t| !neutral(*t)).sum();
    let orientation = match required {
        Some(o) => Some(o),
        None if signed_sum > 0.0 => Some(Orientation::Left),
        None if signed_sum < 0.0 => Some(Orientation::Right),
        None => None,
    };
    let mut violations = Vec::new();
    if let Some(o) = orientation {
        let sgn = if o == Orientation::Left { 1.0 } else { -1.0 };
        for &i in &keep {
            let t = turns[i];
            if !neutral(t) && sgn * t < 0.0 {
                violations.push(i);
            }
        }
        if violations.is_empty() {
            'edges: for j in 0..m {
                let a = &vertices[keep[j]];
                let b = &vertices[keep[(j + 1) % m]];
                for (l, &i) in keep.iter().enumerate() {
                    if l == j || l == (j + 1) % m {
                        continue;
                    }
                    if sgn * side_measure(a, b, &vertices[i]) < -tol {
                        violations.push(i);
                        break 'edges;
                    }
                }
            }
        }
    }
    Ok(ConvexityReport {
        convex: violations.is_empty(),
        orientation,
        turns,
        total_turning: total,
        violations,
    })
}
