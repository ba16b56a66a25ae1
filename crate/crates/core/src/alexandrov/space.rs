use std::fmt::Debug;

use rand::Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};

/// Minimizers within this much of the optimum are reported as equally short.
pub const MINIMIZER_SLACK: f64 = 1e-9;

/// A length space with computable minimal geodesics.
pub trait AlexandrovSpace: Sync {
    type Point: Copy + Debug + PartialEq + Serialize + Send + Sync;
    /// A parameterised minimal geodesic, evaluated by arclength.
    type Path: Clone + Debug + Send + Sync;

    /// The distance together with every minimal geodesic of length within
    /// [`MINIMIZER_SLACK`] of it.
    fn minimizers(&self, x: &Self::Point, y: &Self::Point) -> Result<(f64, Vec<(f64, Self::Path)>)>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        Ok(self.minimizers(x, y)?.0)
    }

    /// Point at arclength `t` along `path`.
    fn path_point(&self, path: &Self::Path, t: f64) -> Self::Point;

    /// Radius of a flat, embedded ball about `x`; zero at singular points.
    fn singular_scale(&self, x: &Self::Point) -> f64;

    /// A random point from the space's default sampling region.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;

    /// Whether the space has curvature ≥ 0 in the comparison sense.
    fn nonnegatively_curved(&self) -> bool;

    fn name(&self) -> String;
}

/// A minimal geodesic restricted to a parameter range of its path.
/// `from > to` denotes the reversed orientation.
#[derive(Debug, Clone)]
pub struct Segment<G> {
    pub path: G,
    pub from: f64,
    pub to: f64,
}

impl<G: Clone> Segment<G> {
    pub fn full(path: G, length: f64) -> Self {
        Segment { path, from: 0.0, to: length }
    }

    pub fn length(&self) -> f64 {
        (self.to - self.from).abs()
    }

    pub fn reversed(&self) -> Self {
        Segment { path: self.path.clone(), from: self.to, to: self.from }
    }

    /// The piece between arclengths `a ≤ b` measured from this segment's start.
    pub fn sub(&self, a: f64, b: f64) -> Self {
        let dir = if self.to >= self.from { 1.0 } else { -1.0 };
        Segment { path: self.path.clone(), from: self.from + dir * a, to: self.from + dir * b }
    }

    pub fn point_at<S: AlexandrovSpace<Path = G>>(&self, space: &S, s: f64) -> S::Point {
        let dir = if self.to >= self.from { 1.0 } else { -1.0 };
        let t = (self.from + dir * s.clamp(0.0, self.length())).clamp(self.from.min(self.to), self.from.max(self.to));
        space.path_point(&self.path, t)
    }

    pub fn start<S: AlexandrovSpace<Path = G>>(&self, space: &S) -> S::Point {
        space.path_point(&self.path, self.from)
    }

    pub fn end<S: AlexandrovSpace<Path = G>>(&self, space: &S) -> S::Point {
        space.path_point(&self.path, self.to)
    }
}

/// Result of [`space_distance`].
#[derive(Debug, Clone)]
pub struct SpaceDistance<G> {
    pub distance: f64,
    pub geodesic: Segment<G>,
    pub all_minimizers: Vec<Segment<G>>,
}

/// The distance between `x` and `y`, a minimal geodesic from `x` to `y` and
/// all other minimizers found.
pub fn space_distance<S: AlexandrovSpace>(space: &S, x: &S::Point, y: &S::Point) -> Result<SpaceDistance<S::Path>> {
    let (d, paths) = space.minimizers(x, y)?;
    let all: Vec<Segment<S::Path>> = paths.into_iter().map(|(len, p)| Segment::full(p, len)).collect();
    let Some(first) = all.first().cloned() else {
        return Err(GeomError::SearchFailure("no minimal geodesic found".into()));
    };
    Ok(SpaceDistance { distance: d, geodesic: first, all_minimizers: all })
}

/// A minimal geodesic from `x` to `y`.
pub fn geodesic<S: AlexandrovSpace>(space: &S, x: &S::Point, y: &S::Point) -> Result<Segment<S::Path>> {
    Ok(space_distance(space, x, y)?.geodesic)
}
