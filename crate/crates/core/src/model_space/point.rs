use std::f64::consts::PI;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::{angle_from_sss, Curvature, CurvatureSign, ANTIPODAL_SLACK};
use crate::error::{invalid, GeomError, Result};

pub(crate) type V3 = [f64; 3];

fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn scale(s: f64, a: V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
pub(crate) fn det3(a: V3, b: V3, c: V3) -> f64 {
    dot(a, cross(b, c))
}
fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Ambient bilinear form: Euclidean for `k ≥ 0`, Minkowski `(+,+,−)` for `k < 0`.
fn ip(k: Curvature, a: V3, b: V3) -> f64 {
    if k.value() < 0.0 {
        a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
    } else {
        dot(a, b)
    }
}

/// A point of `M²ₖ` in canonical quadric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    k: Curvature,
    c: V3,
}

/// A unit tangent vector, expressed in ambient quadric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent(pub(crate) V3);

impl Tangent {
    pub fn coords(&self) -> [f64; 3] {
        self.0
    }
    pub fn neg(self) -> Tangent {
        Tangent(scale(-1.0, self.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Left,
    Right,
}

impl ModelPoint {
    /// The base point: the north pole of the sphere, the origin of the plane,
    /// or the vertex of the hyperboloid.
    pub fn origin(k: Curvature) -> Self {
        let c = match k.sign() {
            CurvatureSign::Zero => [0.0; 3],
            _ => [0.0, 0.0, 1.0],
        };
        ModelPoint { k, c }
    }

    pub fn planar(x: f64, y: f64) -> Self {
        ModelPoint { k: Curvature::FLAT, c: [x, y, 0.0] }
    }

    /// Geodesic polar coordinates about [`ModelPoint::origin`], with `r` a
    /// physical distance.
    pub fn from_polar(k: Curvature, r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 || !phi.is_finite() {
            return Err(invalid(format!("bad polar coordinates ({r}, {phi})")));
        }
        let (cp, sp) = (phi.cos(), phi.sin());
        let c = match k.sign() {
            CurvatureSign::Zero => [r * cp, r * sp, 0.0],
            CurvatureSign::Positive => {
                if r > k.diameter_bound() * (1.0 + 1e-12) {
                    return Err(invalid(format!("radius {r} exceeds π/√k")));
                }
                let t = r * k.sqrt_abs();
                [t.sin() * cp, t.sin() * sp, t.cos()]
            }
            CurvatureSign::Negative => {
                let t = r * k.sqrt_abs();
                [t.sinh() * cp, t.sinh() * sp, t.cosh()]
            }
        };
        Ok(ModelPoint { k, c })
    }

    /// Builds a point from raw quadric coordinates, checking the embedding
    /// constraint to 1e−9 and re-projecting onto the quadric.
    pub fn from_embedding(k: Curvature, c: [f64; 3]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite coordinates"));
        }
        match k.sign() {
            CurvatureSign::Zero => {
                if c[2].abs() > 1e-9 {
                    return Err(invalid("planar points need z = 0"));
                }
                Ok(ModelPoint { k, c: [c[0], c[1], 0.0] })
            }
            CurvatureSign::Positive => {
                let q = dot(c, c);
                if (q - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("point not on the unit sphere (|x|² = {q})")));
                }
                Ok(ModelPoint { k, c: scale(1.0 / q.sqrt(), c) })
            }
            CurvatureSign::Negative => {
                let q = ip(k, c, c);
                if (q + 1.0).abs() > 1e-9 || c[2] <= 0.0 {
                    return Err(invalid(format!("point not on the upper hyperboloid (⟨x,x⟩ = {q})")));
                }
                Ok(ModelPoint { k, c: scale(1.0 / (-q).sqrt(), c) })
            }
        }
    }

    pub fn curvature(&self) -> Curvature {
        self.k
    }

    pub fn coords(&self) -> [f64; 3] {
        self.c
    }

    /// Inverse of [`ModelPoint::from_polar`].
    pub fn to_polar(&self) -> (f64, f64) {
        let phi = self.c[1].atan2(self.c[0]);
        let r = dist_unchecked(self.k, &ModelPoint::origin(self.k), self);
        (r, phi)
    }

    /// Deviation of the coordinates from the quadric constraint.
    pub fn constraint_residual(&self) -> f64 {
        match self.k.sign() {
            CurvatureSign::Zero => self.c[2].abs(),
            CurvatureSign::Positive => (dot(self.c, self.c) - 1.0).abs(),
            CurvatureSign::Negative => (ip(self.k, self.c, self.c) + 1.0).abs(),
        }
    }

    fn normal(&self) -> V3 {
        match self.k.sign() {
            CurvatureSign::Zero => [0.0, 0.0, 1.0],
            _ => self.c,
        }
    }

    fn reproject(k: Curvature, c: V3) -> ModelPoint {
        let c = match k.sign() {
            CurvatureSign::Zero => [c[0], c[1], 0.0],
            CurvatureSign::Positive => scale(1.0 / norm(c), c),
            CurvatureSign::Negative => scale(1.0 / (-ip(k, c, c)).sqrt(), c),
        };
        ModelPoint { k, c }
    }
}

impl Serialize for ModelPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        for x in self.c {
            seq.serialize_element(&x)?;
        }
        seq.end()
    }
}

fn same_k(k: Curvature, pts: &[&ModelPoint]) -> Result<()> {
    for p in pts {
        if p.k != k {
            return Err(invalid(format!("point carries {} but {} was requested", p.k, k)));
        }
    }
    Ok(())
}

fn dist_unchecked(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> f64 {
    match k.sign() {
        CurvatureSign::Zero => norm(sub(q.c, p.c)),
        CurvatureSign::Positive => {
            let theta = norm(cross(p.c, q.c)).atan2(dot(p.c, q.c));
            theta * k.scale()
        }
        CurvatureSign::Negative => {
            let d = sub(q.c, p.c);
            let chord = ip(k, d, d).max(0.0).sqrt();
            2.0 * (0.5 * chord).asinh() * k.scale()
        }
    }
}

/// Geodesic distance in `M²ₖ`.
pub fn dist_k(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    same_k(k, &[p, q])?;
    Ok(dist_unchecked(k, p, q))
}

/// Unit tangent at `p` of the geodesic towards `q`.
pub fn tangent_toward(p: &ModelPoint, q: &ModelPoint) -> Result<Tangent> {
    let k = p.k;
    same_k(k, &[q])?;
    let d = dist_unchecked(k, p, q);
    if d == 0.0 {
        return Err(invalid("direction to a coincident point is undefined"));
    }
    if k.value() > 0.0 && d > k.diameter_bound() - ANTIPODAL_SLACK {
        return Err(GeomError::AmbiguousGeodesic(format!("antipodal pair at distance {d}")));
    }
    let w = match k.sign() {
        CurvatureSign::Zero => sub(q.c, p.c),
        _ => sub(q.c, scale(ip(k, p.c, q.c) / ip(k, p.c, p.c), p.c)),
    };
    let n2 = ip(k, w, w);
    if n2 <= 0.0 {
        return Err(invalid("degenerate tangent direction"));
    }
    Ok(Tangent(scale(1.0 / n2.sqrt(), w)))
}

/// A fixed unit tangent at `p`, used as the zero direction of polar angles
/// about `p`. At the canonical origin it is the `x` axis.
pub fn reference_tangent(p: &ModelPoint) -> Tangent {
    let k = p.k;
    for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
        let w = match k.sign() {
            CurvatureSign::Zero => e,
            _ => sub(e, scale(ip(k, p.c, e) / ip(k, p.c, p.c), p.c)),
        };
        let n2 = ip(k, w, w);
        if n2 > 1e-6 {
            return Tangent(scale(1.0 / n2.sqrt(), w));
        }
    }
    unreachable!("one of the coordinate axes is transverse to the normal")
}

/// Tangent at `p` obtained by rotating `u` counter-clockwise by `alpha`.
pub fn turn_left(p: &ModelPoint, u: Tangent, alpha: f64) -> Tangent {
    let w = perp(p, u);
    Tangent(add(scale(alpha.cos(), u.0), scale(alpha.sin(), w)))
}

fn perp(p: &ModelPoint, u: Tangent) -> V3 {
    let k = p.k;
    let w = match k.sign() {
        CurvatureSign::Negative => {
            let c = cross(p.c, u.0);
            [c[0], c[1], -c[2]]
        }
        _ => cross(p.normal(), u.0),
    };
    let n = ip(k, w, w).sqrt();
    let w = scale(1.0 / n, w);
    if det3(p.normal(), u.0, w) < 0.0 {
        scale(-1.0, w)
    } else {
        w
    }
}

/// Left unit normal to `u` at `p`.
pub(crate) fn perp_tangent(p: &ModelPoint, u: Tangent) -> Tangent {
    Tangent(perp(p, u))
}

/// Projects an integrated frame back onto the quadric: `x` onto `M²ₖ`, `t` onto
/// the unit tangent circle at `x`, and returns the matching left normal.
pub(crate) fn renormalize_frame(k: Curvature, x: V3, t: V3) -> (ModelPoint, Tangent, V3) {
    let p = ModelPoint::reproject(k, x);
    let t = match k.sign() {
        CurvatureSign::Zero => [t[0], t[1], 0.0],
        _ => sub(t, scale(ip(k, p.c, t) / ip(k, p.c, p.c), p.c)),
    };
    let t = Tangent(scale(1.0 / ip(k, t, t).sqrt(), t));
    let n = perp(&p, t);
    (p, t, n)
}

/// Signed angle from `u` to `v` in the tangent plane at `p`, in `(−π, π]`;
/// positive is counter-clockwise.
pub fn signed_turn(p: &ModelPoint, u: Tangent, v: Tangent) -> f64 {
    let k = p.k;
    let w = perp(p, u);
    ip(k, v.0, w).atan2(ip(k, v.0, u.0))
}

/// Point at distance `t` along the geodesic leaving `p` with unit tangent `u`.
pub fn exp_map(p: &ModelPoint, u: Tangent, t: f64) -> ModelPoint {
    let k = p.k;
    let c = match k.sign() {
        CurvatureSign::Zero => add(p.c, scale(t, u.0)),
        CurvatureSign::Positive => {
            let a = t * k.sqrt_abs();
            add(scale(a.cos(), p.c), scale(a.sin(), u.0))
        }
        CurvatureSign::Negative => {
            let a = t * k.sqrt_abs();
            add(scale(a.cosh(), p.c), scale(a.sinh(), u.0))
        }
    };
    ModelPoint::reproject(k, c)
}

/// Arc-length parameterised point of the geodesic `[pq]`.
pub fn geodesic_point(k: Curvature, p: &ModelPoint, q: &ModelPoint, t: f64) -> Result<ModelPoint> {
    same_k(k, &[p, q])?;
    let d = dist_unchecked(k, p, q);
    if !(t >= -1e-12 && t <= d + 1e-12) {
        return Err(invalid(format!("t={t} outside [0, {d}]")));
    }
    if t <= 0.0 {
        return Ok(*p);
    }
    if d == 0.0 {
        return Ok(*p);
    }
    let u = tangent_toward(p, q)?;
    if t >= d {
        return Ok(*q);
    }
    Ok(exp_map(p, u, t))
}

/// Places `x` with `|foot x| = radial_dist` and angle `angle_at_foot` between
/// `[foot pole]` and `[foot x]`, on the given side of the oriented geodesic
/// from `pole` through `foot`.
pub fn place_sas(
    k: Curvature,
    pole: &ModelPoint,
    foot: &ModelPoint,
    radial_dist: f64,
    angle_at_foot: f64,
    side: Orientation,
) -> Result<ModelPoint> {
    same_k(k, &[pole, foot])?;
    if dist_unchecked(k, pole, foot) == 0.0 {
        return Err(invalid("pole and foot coincide"));
    }
    if !radial_dist.is_finite() || radial_dist < 0.0 || radial_dist > k.diameter_bound() {
        return Err(invalid(format!("radial distance {radial_dist} invalid for {k}")));
    }
    if !(0.0..=PI + 1e-12).contains(&angle_at_foot) {
        return Err(invalid(format!("angle {angle_at_foot} outside [0, π]")));
    }
    let u = tangent_toward(foot, pole)?;
    let alpha = match side {
        Orientation::Left => -angle_at_foot,
        Orientation::Right => angle_at_foot,
    };
    Ok(exp_map(foot, turn_left(foot, u, alpha), radial_dist))
}

/// Which side of the oriented geodesic `a → b` the point `x` lies on;
/// `None` when it is on the geodesic (to 1e−12).
#[cfg(test)]
pub(crate) fn side_of(a: &ModelPoint, b: &ModelPoint, x: &ModelPoint) -> Option<Orientation> {
    let s = side_measure(a, b, x);
    if s > 1e-12 {
        Some(Orientation::Left)
    } else if s < -1e-12 {
        Some(Orientation::Right)
    } else {
        None
    }
}

/// Signed, scale-free measure of how far `x` is to the left of `a → b`.
pub(crate) fn side_measure(a: &ModelPoint, b: &ModelPoint, x: &ModelPoint) -> f64 {
    match a.k.sign() {
        CurvatureSign::Zero => {
            let e = sub(b.c, a.c);
            let f = sub(x.c, a.c);
            let n = norm(e) * norm(f);
            if n == 0.0 {
                0.0
            } else {
                (e[0] * f[1] - e[1] * f[0]) / n
            }
        }
        _ => {
            let n = norm(cross(a.c, b.c));
            if n == 0.0 {
                0.0
            } else {
                det3(a.c, b.c, x.c) / n
            }
        }
    }
}

/// A geodesic segment of `M²ₖ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelSegment {
    pub a: ModelPoint,
    pub b: ModelPoint,
    pub length: f64,
}

impl ModelSegment {
    pub fn new(k: Curvature, a: ModelPoint, b: ModelPoint) -> Result<Self> {
        let length = dist_k(k, &a, &b)?;
        Ok(ModelSegment { a, b, length })
    }

    /// Segment of the given length leaving `a` with unit tangent `u`.
    pub fn from_direction(a: ModelPoint, u: Tangent, length: f64) -> Result<Self> {
        let k = a.curvature();
        if !length.is_finite() || length < 0.0 || length > k.diameter_bound() {
            return Err(invalid(format!("segment length {length} invalid for {k}")));
        }
        let b = exp_map(&a, u, length);
        Ok(ModelSegment { a, b, length })
    }
}

/// A triangle of `M²ₖ`; `sides[i]` is opposite `vertices[i]` and `angles[i]`
/// is the interior angle at `vertices[i]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelTriangle {
    pub vertices: [ModelPoint; 3],
    pub sides: [f64; 3],
    pub angles: [f64; 3],
}

impl ModelTriangle {
    /// Realises the triangle with the given side lengths, first vertex at the
    /// origin, second on the positive first axis, third on the left.
    pub fn from_sides(k: Curvature, sides: [f64; 3]) -> Result<Self> {
        let [a, b, c] = sides;
        let angles = [
            angle_from_sss(k, b, c, a)?,
            angle_from_sss(k, c, a, b)?,
            angle_from_sss(k, a, b, c)?,
        ];
        let v0 = ModelPoint::origin(k);
        let v1 = ModelPoint::from_polar(k, c, 0.0)?;
        let v2 = ModelPoint::from_polar(k, b, angles[0])?;
        Ok(ModelTriangle { vertices: [v0, v1, v2], sides, angles })
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }
}
