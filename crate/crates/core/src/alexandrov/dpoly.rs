use rand::Rng;
use serde::Serialize;

use super::space::{AlexandrovSpace, MINIMIZER_SLACK};
use crate::error::{invalid, GeomError, Result};

/// Maximum number of edge crossings explored by the unfolding search.
pub const MAX_UNFOLD_DEPTH: usize = 8;

type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

/// Planar affine map `x ↦ m x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Affine {
    m: [[f64; 2]; 2],
    t: P2,
}

impl Affine {
    const ID: Affine = Affine { m: [[1.0, 0.0], [0.0, 1.0]], t: [0.0, 0.0] };

    fn apply(&self, x: P2) -> P2 {
        [
            self.m[0][0] * x[0] + self.m[0][1] * x[1] + self.t[0],
            self.m[1][0] * x[0] + self.m[1][1] * x[1] + self.t[1],
        ]
    }

    /// `self ∘ other`.
    fn compose(&self, o: &Affine) -> Affine {
        let m = &self.m;
        let n = &o.m;
        Affine {
            m: [
                [m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]],
                [m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]],
            ],
            t: self.apply(o.t),
        }
    }

    /// Reflection across the line through `a` and `b`.
    fn reflection(a: P2, b: P2) -> Affine {
        let d = sub(b, a);
        let l = norm(d);
        let (c, s) = (d[0] / l, d[1] / l);
        let m = [[c * c - s * s, 2.0 * c * s], [2.0 * c * s, s * s - c * c]];
        let ma = [m[0][0] * a[0] + m[0][1] * a[1], m[1][0] * a[0] + m[1][1] * a[1]];
        Affine { m, t: sub(a, ma) }
    }

    /// Inverse of an isometry (orthogonal linear part).
    fn inverse(&self) -> Affine {
        let m = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let mt = [m[0][0] * self.t[0] + m[0][1] * self.t[1], m[1][0] * self.t[0] + m[1][1] * self.t[1]];
        Affine { m, t: [-mt[0], -mt[1]] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Top,
    Bottom,
}

impl Sheet {
    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Top => Sheet::Bottom,
            Sheet::Bottom => Sheet::Top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DPolyPoint {
    pub sheet: Sheet,
    pub x: f64,
    pub y: f64,
}

/// Two copies of a convex polygon glued along their boundaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubledPolygon {
    vertices: Vec<P2>,
}

/// A minimal geodesic of a doubled polygon, straight in an unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct DPolyPath {
    start: P2,
    sheet: Sheet,
    dir: P2,
    /// Arclength at which each edge is crossed, with the map folding the
    /// unfolded copy entered there back onto the polygon.
    crossings: Vec<(f64, Affine)>,
}

struct Search<'a> {
    poly: &'a DoubledPolygon,
    x: P2,
    y: P2,
    need_odd: bool,
    best: f64,
    found: Vec<(f64, P2, Vec<(P2, P2)>, Vec<Affine>)>,
}

impl DoubledPolygon {
    /// Builds the doubling of the convex polygon with the given vertices,
    /// listed in either orientation.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(invalid("a polygon needs at least three vertices"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite polygon vertex"));
        }
        let area: f64 = (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum();
        if area < 0.0 {
            vertices.reverse();
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if cross(sub(b, a), sub(c, b)) <= 1e-12 {
                return Err(invalid(format!("polygon is not strictly convex at vertex {}", (i + 1) % n)));
            }
        }
        Ok(DoubledPolygon { vertices })
    }

    pub fn unit_square() -> Self {
        DoubledPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> (P2, P2) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    /// Signed distance inside the polygon (positive inside).
    fn inset(&self, p: P2) -> f64 {
        (0..self.vertices.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                cross(sub(b, a), sub(p, a)) / norm(sub(b, a))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point(&self, sheet: Sheet, x: f64, y: f64) -> Result<DPolyPoint> {
        if !x.is_finite() || !y.is_finite() {
            return Err(invalid("non-finite point"));
        }
        if self.inset([x, y]) < -1e-12 {
            return Err(invalid(format!("({x}, {y}) lies outside the polygon")));
        }
        Ok(DPolyPoint { sheet, x, y })
    }

    fn on_boundary(&self, p: P2) -> bool {
        self.inset(p) <= 1e-12
    }

    fn unfold(&self, x: P2, y: P2, need_odd: bool) -> Vec<(f64, P2, Vec<(P2, P2)>, Vec<Affine>)> {
        let mut s = Search { poly: self, x, y, need_odd, best: f64::INFINITY, found: Vec::new() };
        if !need_odd {
            s.best = norm(sub(y, x));
            s.found.push((s.best, y, Vec::new(), Vec::new()));
        }
        s.descend(Affine::ID, None, None, 0, &mut Vec::new(), &mut Vec::new());
        let best = s.best;
        s.found.retain(|f| f.0 <= best + MINIMIZER_SLACK);
        s.found.sort_by(|a, b| a.0.total_cmp(&b.0));
        s.found
    }
}

impl Search<'_> {
    fn descend(
        &mut self,
        t: Affine,
        entered: Option<usize>,
        window: Option<(P2, P2)>,
        depth: usize,
        windows: &mut Vec<(P2, P2)>,
        maps: &mut Vec<Affine>,
    ) {
        if depth == MAX_UNFOLD_DEPTH {
            return;
        }
        let n = self.poly.vertices.len();
        for e in 0..n {
            if Some(e) == entered {
                continue;
            }
            let (a0, b0) = self.poly.edge(e);
            let (a, b) = (t.apply(a0), t.apply(b0));
            let Some(w) = clip_to_sector(self.x, window, a, b) else { continue };
            if seg_dist(self.x, w) >= self.best + MINIMIZER_SLACK {
                continue;
            }
            let t2 = t.compose(&Affine::reflection(a0, b0));
            windows.push(w);
            maps.push(t2);
            let odd = (depth + 1) % 2 == 1;
            if odd == self.need_odd {
                let img = t2.apply(self.y);
                if windows.iter().all(|&(w0, w1)| through_window(self.x, img, w0, w1)) {
                    let len = norm(sub(img, self.x));
                    if len <= self.best + MINIMIZER_SLACK {
                        self.best = self.best.min(len);
                        self.found.push((len, img, windows.clone(), maps.clone()));
                    }
                }
            }
            self.descend(t2, Some(e), Some(w), depth + 1, windows, maps);
            windows.pop();
            maps.pop();
        }
    }
}

/// Part of segment `ab` visible from `x` through `window` (all of it when
/// there is no window yet). Degenerate sectors are rejected.
fn clip_to_sector(x: P2, window: Option<(P2, P2)>, a: P2, b: P2) -> Option<(P2, P2)> {
    let (w0, w1) = window.unwrap_or((a, b));
    let (d0, d1) = (sub(w0, x), sub(w1, x));
    let s = cross(d0, d1);
    if s.abs() <= 1e-14 * norm(d0).max(1.0) * norm(d1).max(1.0) {
        return None;
    }
    let sg = s.signum();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let ab = sub(b, a);
    // constraints sg·cross(d0, a + u ab − x) ≥ 0 and sg·cross(a + u ab − x, d1) ≥ 0
    for (c0, c1) in [
        (sg * cross(d0, sub(a, x)), sg * cross(d0, ab)),
        (sg * cross(sub(a, x), d1), sg * cross(ab, d1)),
    ] {
        if c1.abs() < 1e-300 {
            if c0 < -1e-14 {
                return None;
            }
        } else if c1 > 0.0 {
            lo = lo.max(-c0 / c1);
        } else {
            hi = hi.min(-c0 / c1);
        }
    }
    if hi - lo <= 1e-14 {
        return None;
    }
    let p = |u: f64| [a[0] + u * ab[0], a[1] + u * ab[1]];
    Some((p(lo), p(hi)))
}

fn seg_dist(x: P2, (a, b): (P2, P2)) -> f64 {
    let ab = sub(b, a);
    let u = (dot(sub(x, a), ab) / dot(ab, ab)).clamp(0.0, 1.0);
    norm(sub(x, [a[0] + u * ab[0], a[1] + u * ab[1]]))
}

/// Whether the segment `x → y` passes through the segment `w0 w1`.
fn through_window(x: P2, y: P2, w0: P2, w1: P2) -> bool {
    let d = sub(y, x);
    let e = sub(w1, w0);
    let den = cross(d, e);
    if den.abs() < 1e-300 {
        return false;
    }
    let t = cross(sub(w0, x), e) / den;
    let u = cross(sub(w0, x), d) / den;
    let tol = 1e-12;
    (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u)
}

fn line_param(x: P2, d: P2, w0: P2, w1: P2) -> f64 {
    let e = sub(w1, w0);
    cross(sub(w0, x), e) / cross(d, e)
}

impl AlexandrovSpace for DoubledPolygon {
    type Point = DPolyPoint;
    type Path = DPolyPath;

    fn minimizers(&self, x: &DPolyPoint, y: &DPolyPoint) -> Result<(f64, Vec<(f64, DPolyPath)>)> {
        let (px, py) = ([x.x, x.y], [y.x, y.y]);
        let xs: Vec<Sheet> = if self.on_boundary(px) { vec![x.sheet, x.sheet.flip()] } else { vec![x.sheet] };
        let ys: Vec<Sheet> = if self.on_boundary(py) { vec![y.sheet, y.sheet.flip()] } else { vec![y.sheet] };
        let mut all: Vec<(f64, DPolyPath)> = Vec::new();
        for &sx in &xs {
            for &sy in &ys {
                for (len, img, windows, maps) in self.unfold(px, py, sx != sy) {
                    let d = sub(img, px);
                    let dir = if len > 0.0 { [d[0] / len, d[1] / len] } else { [1.0, 0.0] };
                    let crossings = windows
                        .iter()
                        .zip(&maps)
                        .map(|(&(w0, w1), m)| (line_param(px, dir, w0, w1).clamp(0.0, len), m.inverse()))
                        .collect();
                    all.push((len, DPolyPath { start: px, sheet: sx, dir, crossings }));
                }
            }
        }
        if all.is_empty() {
            return Err(GeomError::SearchFailure(format!(
                "no unfolding within {MAX_UNFOLD_DEPTH} edge crossings joins the points"
            )));
        }
        let best = all.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        all.retain(|a| a.0 <= best + MINIMIZER_SLACK);
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok((best, all))
    }

    fn path_point(&self, path: &DPolyPath, t: f64) -> DPolyPoint {
        let z = [path.start[0] + t * path.dir[0], path.start[1] + t * path.dir[1]];
        let mut sheet = path.sheet;
        let mut fold = Affine::ID;
        for (tc, inv) in &path.crossings {
            if t > *tc {
                sheet = sheet.flip();
                fold = *inv;
            }
        }
        let p = fold.apply(z);
        DPolyPoint { sheet, x: p[0], y: p[1] }
    }

    fn singular_scale(&self, x: &DPolyPoint) -> f64 {
        self.vertices.iter().map(|v| norm(sub(*v, [x.x, x.y]))).fold(f64::INFINITY, f64::min)
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DPolyPoint {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in &self.vertices {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        loop {
            let p = [lo[0] + (hi[0] - lo[0]) * rng.gen::<f64>(), lo[1] + (hi[1] - lo[1]) * rng.gen::<f64>()];
            let sheet = if rng.gen::<bool>() { Sheet::Top } else { Sheet::Bottom };
            if self.inset(p) > 0.0 {
                return DPolyPoint { sheet, x: p[0], y: p[1] };
            }
        }
    }

    fn nonnegatively_curved(&self) -> bool {
        true
    }

    fn name(&self) -> String {
        let v: Vec<String> = self.vertices.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
        format!("dpoly:{}", v.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn same_sheet_is_planar() {
        let d = DoubledPolygon::unit_square();
        let a = d.point(Sheet::Top, 0.2, 0.3).unwrap();
        let b = d.point(Sheet::Top, 0.9, 0.7).unwrap();
        assert_abs_diff_eq!(d.distance(&a, &b).unwrap(), (0.49f64 + 0.16).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn opposite_sheets_reflect_across_nearest_route() {
        let d = DoubledPolygon::unit_square();
        let a = d.point(Sheet::Top, 0.5, 0.1).unwrap();
        let b = d.point(Sheet::Bottom, 0.5, 0.2).unwrap();
        // across the bottom edge: reflect b to (0.5, -0.2)
        assert_abs_diff_eq!(d.distance(&a, &b).unwrap(), 0.3, epsilon = 1e-14);
        let a = d.point(Sheet::Top, 0.3, 0.4).unwrap();
        let b = d.point(Sheet::Bottom, 0.6, 0.5).unwrap();
        let oracle = [(0.3f64 - 0.6).hypot(0.4 + 0.5), (0.3f64 + 0.6).hypot(0.4 - 0.5), (0.3f64 - 1.4).hypot(0.4 - 0.5), (0.3f64 - 0.6).hypot(0.4 - 1.5)]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(d.distance(&a, &b).unwrap(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn boundary_points_are_shared() {
        let d = DoubledPolygon::unit_square();
        let a = d.point(Sheet::Top, 1.0, 0.5).unwrap();
        let a2 = d.point(Sheet::Bottom, 1.0, 0.5).unwrap();
        assert_eq!(d.distance(&a, &a2).unwrap(), 0.0);
        let b = d.point(Sheet::Bottom, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(d.distance(&a, &b).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn path_points_lie_on_geodesic() {
        let d = DoubledPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [1.0, 2.0], [-0.3, 1.2]]).unwrap();
        let a = d.point(Sheet::Top, 0.3, 0.3).unwrap();
        let b = d.point(Sheet::Bottom, 1.6, 1.2).unwrap();
        let (len, paths) = d.minimizers(&a, &b).unwrap();
        let p = &paths[0].1;
        let end = d.path_point(p, len);
        assert_eq!(end.sheet, Sheet::Bottom);
        assert_abs_diff_eq!(end.x, 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 1.2, epsilon = 1e-12);
        for f in [0.2, 0.5, 0.8] {
            let m = d.path_point(p, f * len);
            let s = d.distance(&a, &m).unwrap() + d.distance(&m, &b).unwrap();
            assert_abs_diff_eq!(s, len, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_nonconvex() {
        assert!(DoubledPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 2.0]]).is_err());
    }
}
