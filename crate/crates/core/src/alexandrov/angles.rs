use serde::Serialize;

use super::space::{geodesic, AlexandrovSpace, Segment};
use crate::error::{invalid, Result};
use crate::model_space::{angle_from_sss, Curvature};

/// Comparison angle `∠̃pqr` at `q` in `M²ₖ`, opposite `|pr|`.
pub fn comparison_angle<S: AlexandrovSpace>(space: &S, q: &S::Point, p: &S::Point, r: &S::Point, k: Curvature) -> Result<f64> {
    let qp = space.distance(q, p)?;
    let qr = space.distance(q, r)?;
    let pr = space.distance(p, r)?;
    angle_from_sss(k, qp, qr, pr)
}

/// Angle between two geodesics leaving a common point: the limit of the
/// flat comparison angles `∠̃(q; a(t), b(t))` as `t → 0`, extrapolated from
/// `t ∈ {h, h/2, h/4}`.
///
/// `h` is kept inside the flat ball about `q` when `q` is a smooth point, so
/// on flat pieces the extrapolation is exact up to rounding.
pub fn space_angle<S: AlexandrovSpace>(space: &S, a: &Segment<S::Path>, b: &Segment<S::Path>) -> Result<f64> {
    let q = a.start(space);
    let (la, lb) = (a.length(), b.length());
    if la == 0.0 || lb == 0.0 {
        return Err(invalid("a hinge needs two non-degenerate geodesics"));
    }
    let scale = space.singular_scale(&q);
    let mut h = 0.25 * la.min(lb);
    if scale > 0.0 {
        h = h.min(0.5 * scale);
    }
    let flat = Curvature::FLAT;
    let at = |t: f64| -> Result<f64> {
        let x = a.point_at(space, t);
        let y = b.point_at(space, t);
        angle_from_sss(flat, t, t, space.distance(&x, &y)?.min(2.0 * t))
    };
    let (a1, a2, a4) = (at(h)?, at(0.5 * h)?, at(0.25 * h)?);
    Ok(((8.0 * a4 - 6.0 * a2 + a1) / 3.0).clamp(0.0, std::f64::consts::PI))
}

/// The angle `∠pqr` between chosen minimal geodesics `[qp]`, `[qr]`.
pub fn vertex_angle<S: AlexandrovSpace>(space: &S, q: &S::Point, p: &S::Point, r: &S::Point) -> Result<f64> {
    space_angle(space, &geodesic(space, q, p)?, &geodesic(space, q, r)?)
}

/// At an interior point `x` of `seg`, the two angles between the halves of
/// `seg` and the geodesic from `x` to `r`. Their sum is π in an Alexandrov
/// space.
pub fn split_angles<S: AlexandrovSpace>(space: &S, seg: &Segment<S::Path>, t: f64, r: &S::Point) -> Result<(f64, f64)> {
    let len = seg.length();
    if !(t > 0.0 && t < len) {
        return Err(invalid("split point must be interior"));
    }
    let back = seg.sub(0.0, t).reversed();
    let fwd = seg.sub(t, len);
    let x = fwd.start(space);
    let g = geodesic(space, &x, r)?;
    Ok((space_angle(space, &back, &g)?, space_angle(space, &fwd, &g)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma33Report {
    /// `(|qᵢrᵢ| − |qᵢpᵢ| + |pᵢrᵢ| cos∠qᵢpᵢrᵢ) / |pᵢrᵢ|` per sample.
    pub ratios: Vec<f64>,
    /// Maximum over the last third of the sequence.
    pub limsup: f64,
    pub pass: bool,
}

/// Tests the first-order estimate `|qr| ≤ |qp| − |pr| cos∠qpr + o(|pr|)`
/// along a sequence of triples `(pᵢ, qᵢ, rᵢ)` with `|pᵢrᵢ| → 0`, using the
/// threshold 1e−3 on the estimated limsup of the normalised remainder.
pub fn lemma33_limit_check<S: AlexandrovSpace>(space: &S, seq: &[(S::Point, S::Point, S::Point)]) -> Result<Lemma33Report> {
    if seq.len() < 3 {
        return Err(invalid("need at least three triples"));
    }
    let mut ratios = Vec::with_capacity(seq.len());
    for (p, q, r) in seq {
        let pq = space.distance(p, q)?;
        let pr = space.distance(p, r)?;
        if pq <= 0.0 || pr <= 0.0 {
            return Err(invalid("degenerate triple"));
        }
        let ang = vertex_angle(space, p, q, r)?;
        ratios.push((space.distance(q, r)? - pq + pr * ang.cos()) / pr);
    }
    let tail = &ratios[ratios.len() - ratios.len().div_ceil(3)..];
    let limsup = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Lemma33Report { ratios, limsup, pass: limsup <= 1e-3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alexandrov::{ConeSpace, DoubledPolygon, Sheet};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_hinge_in_a_doubled_square() {
        let d = DoubledPolygon::unit_square();
        let q = d.point(Sheet::Top, 0.5, 0.5).unwrap();
        let p = d.point(Sheet::Top, 0.9, 0.5).unwrap();
        let r = d.point(Sheet::Top, 0.7, 0.9).unwrap();
        let a = vertex_angle(&d, &q, &p, &r).unwrap();
        assert_abs_diff_eq!(a, 2.0f64.atan2(1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(comparison_angle(&d, &q, &p, &r, Curvature::FLAT).unwrap(), a, epsilon = 1e-9);
    }

    #[test]
    fn generators_at_the_apex() {
        for theta in [1.5 * PI, 2.5 * PI] {
            let c = ConeSpace::new(theta).unwrap();
            let o = c.apex();
            let p = c.point(1.0, 0.3).unwrap();
            let r = c.point(2.0, 1.5).unwrap();
            assert_abs_diff_eq!(vertex_angle(&c, &o, &p, &r).unwrap(), 1.2, epsilon = 1e-12);
        }
        let c = ConeSpace::new(2.5 * PI).unwrap();
        let (p, r) = (c.point(1.0, 0.0).unwrap(), c.point(1.0, 1.1 * PI).unwrap());
        assert_abs_diff_eq!(vertex_angle(&c, &c.apex(), &p, &r).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_and_collinear() {
        let d = DoubledPolygon::unit_square();
        let q = d.point(Sheet::Top, 0.2, 0.2).unwrap();
        let p = d.point(Sheet::Top, 0.7, 0.2).unwrap();
        let r = d.point(Sheet::Top, 0.45, 0.2 + 0.25 * 3f64.sqrt()).unwrap();
        assert_abs_diff_eq!(comparison_angle(&d, &q, &p, &r, Curvature::FLAT).unwrap(), PI / 3.0, epsilon = 1e-12);
        let m = d.point(Sheet::Top, 0.45, 0.2).unwrap();
        assert_abs_diff_eq!(comparison_angle(&d, &m, &q, &p, Curvature::FLAT).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn split_angles_sum_to_pi() {
        let c = ConeSpace::new(1.5 * PI).unwrap();
        let a = c.point(1.0, 0.0).unwrap();
        let b = c.point(1.2, 2.0).unwrap();
        let seg = geodesic(&c, &a, &b).unwrap();
        let r = c.point(0.8, 3.5).unwrap();
        let (x, y) = split_angles(&c, &seg, 0.4 * seg.length(), &r).unwrap();
        assert_abs_diff_eq!(x + y, PI, epsilon = 1e-6);
    }

    #[test]
    fn lemma33_flat_and_saddle() {
        let c = ConeSpace::new(1.5 * PI).unwrap();
        let p = c.point(1.0, 0.0).unwrap();
        let q = c.point(1.5, 1.5).unwrap();
        let seq: Vec<_> = (1..=12)
            .map(|i| {
                let e = 0.5f64.powi(i);
                // along a straight ray from p in the upper half plane
                let x = 1.0 + 0.6 * e;
                let y = 0.8 * e;
                (p, q, c.point(x.hypot(y), y.atan2(x)).unwrap())
            })
            .collect();
        let rep = lemma33_limit_check(&c, &seq).unwrap();
        assert!(rep.pass && rep.limsup.abs() < 1e-3, "{rep:?}");

        let c = ConeSpace::new(2.5 * PI).unwrap();
        let beta = PI / 3.0;
        let q = c.point(1.0, PI).unwrap();
        let seq: Vec<_> = (1..=12)
            .map(|i| {
                let e = 0.5f64.powi(i);
                let p = c.point(e, 0.0).unwrap();
                let r = c.point(2.0 * e * (0.5 * beta).sin(), -(PI - beta) / 2.0).unwrap();
                (p, q, r)
            })
            .collect();
        let rep = lemma33_limit_check(&c, &seq).unwrap();
        let expected = 2.0 * (0.5 * beta).sin() * (1.0 - (0.5 * beta).sin());
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.limsup, expected, epsilon = 1e-6);
    }
}
