use serde::Serialize;

use super::chart::{SurfaceChart, SurfacePoint, SurfaceVector};
use crate::error::{invalid, Result};

/// `(u, v, u̇, v̇)`.
pub type State = [f64; 4];

pub(crate) fn geodesic_rhs(chart: &SurfaceChart, y: &State) -> State {
    let g = chart.christoffel(y[0], y[1]);
    let (a, b) = (y[2], y[3]);
    let acc = |k: usize| -(g[k][0][0] * a * a + 2.0 * g[k][0][1] * a * b + g[k][1][1] * b * b);
    [a, b, acc(0), acc(1)]
}

pub(crate) fn rk4<const N: usize>(f: &impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, 0.5 * h));
    let k3 = f(&add(y, &k2, 0.5 * h));
    let k4 = f(&add(y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// A unit-speed geodesic sampled on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicPath {
    pub start: SurfacePoint,
    pub direction: SurfaceVector,
    pub step: f64,
    pub s: Vec<f64>,
    pub states: Vec<State>,
    /// Set when integration stopped because the path left the chart.
    pub exit: Option<String>,
}

impl GeodesicPath {
    pub fn length(&self) -> f64 {
        *self.s.last().unwrap_or(&0.0)
    }

    pub fn end(&self) -> SurfacePoint {
        let y = self.states.last().expect("non-empty path");
        SurfacePoint::new(y[0], y[1])
    }

    pub fn end_velocity(&self) -> SurfaceVector {
        let y = self.states.last().expect("non-empty path");
        SurfaceVector::new(y[2], y[3])
    }

    pub fn point(&self, i: usize) -> SurfacePoint {
        SurfacePoint::new(self.states[i][0], self.states[i][1])
    }

    pub fn velocity(&self, i: usize) -> SurfaceVector {
        SurfaceVector::new(self.states[i][2], self.states[i][3])
    }

    /// State at arclength `t`, by an RK4 sub-step from the nearest node below.
    pub fn state_at(&self, chart: &SurfaceChart, t: f64) -> State {
        let n = self.s.len();
        let i = ((t / self.step).floor().max(0.0) as usize).min(n - 1);
        let dt = t - self.s[i];
        if dt.abs() < 1e-15 {
            return self.states[i];
        }
        rk4(&|y| geodesic_rhs(chart, y), &self.states[i], dt)
    }

    /// Largest deviation of `|ċ|` from 1 on the grid.
    pub fn speed_drift(&self, chart: &SurfaceChart) -> f64 {
        (0..self.s.len()).map(|i| (chart.norm(self.point(i), self.velocity(i)) - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Integrates the geodesic from `start` in direction `dir` (normalised) for
/// arclength `length`, with RK4 steps of at most `step`.
pub fn integrate_geodesic(
    chart: &SurfaceChart,
    start: SurfacePoint,
    dir: SurfaceVector,
    length: f64,
    step: f64,
) -> Result<GeodesicPath> {
    chart.check(start)?;
    if !(length >= 0.0 && length.is_finite()) {
        return Err(invalid(format!("geodesic length must be finite and non-negative, got {length}")));
    }
    if !(step > 0.0) {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    let speed = chart.norm(start, dir);
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(invalid("geodesic direction must be a non-zero vector"));
    }
    let dir = dir.scale(1.0 / speed);
    let n = ((length / step).ceil() as usize).max(1);
    let h = length / n as f64;
    let mut y = [start.u, start.v, dir.du, dir.dv];
    let mut s = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    s.push(0.0);
    states.push(y);
    let mut exit = None;
    if length > 0.0 {
        for i in 1..=n {
            y = rk4(&|y| geodesic_rhs(chart, y), &y, h);
            if !chart.contains(y[0], y[1]) {
                exit = Some(format!("left the chart at s = {}", i as f64 * h));
                break;
            }
            s.push(i as f64 * h);
            states.push(y);
        }
    }
    Ok(GeodesicPath { start, direction: dir, step: h, s, states, exit })
}

/// End state of the geodesic without storing samples; `None` on chart exit.
pub(crate) fn shoot(chart: &SurfaceChart, y0: State, length: f64, step: f64) -> Option<State> {
    let n = ((length / step).ceil() as usize).max(1);
    let h = length / n as f64;
    let mut y = y0;
    for _ in 0..n {
        y = rk4(&|y| geodesic_rhs(chart, y), &y, h);
        if !chart.contains(y[0], y[1]) {
            return None;
        }
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::chart::{sphere_point, stereographic_to_sphere};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn plane_geodesics_are_lines() {
        let c = SurfaceChart::plane();
        let g = integrate_geodesic(&c, SurfacePoint::new(1.0, 2.0), SurfaceVector::new(3.0, 4.0), 5.0, 1e-2).unwrap();
        assert_abs_diff_eq!(g.end().u, 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g.end().v, 6.0, epsilon = 1e-13);
    }

    #[test]
    fn sphere_geodesic_is_great_circle() {
        let c = SurfaceChart::sphere(1.0).unwrap();
        let p = sphere_point(0.4, 0.3);
        let g = integrate_geodesic(&c, p, SurfaceVector::new(0.2, 1.0), 2.0, 1e-3).unwrap();
        assert!(g.speed_drift(&c) < 1e-8 * 2.0);
        let a = stereographic_to_sphere(1.0, p);
        let b = stereographic_to_sphere(1.0, g.end());
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        assert_abs_diff_eq!(dot.acos(), 2.0, epsilon = 1e-9);
        // equator traversal from the origin: half a turn reaches the antipodal pole side
        let e = integrate_geodesic(&c, SurfacePoint::new(0.0, 0.0), SurfaceVector::new(1.0, 0.0), PI / 2.0, 1e-3).unwrap();
        assert_abs_diff_eq!(e.end().u, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn leaves_disc_reports_exit() {
        let c = SurfaceChart::hyperbolic(1.0).unwrap();
        let g = integrate_geodesic(&c, SurfacePoint::new(0.0, 0.0), SurfaceVector::new(1.0, 0.0), 100.0, 1e-2).unwrap();
        assert!(g.exit.is_some());
        assert!(integrate_geodesic(&c, SurfacePoint::new(0.0, 0.0), SurfaceVector::new(0.0, 0.0), 1.0, 1e-2).is_err());
    }

    #[test]
    fn state_at_interpolates() {
        let c = SurfaceChart::paraboloid();
        let g = integrate_geodesic(&c, SurfacePoint::new(0.1, 0.2), SurfaceVector::new(1.0, 0.3), 1.0, 1e-3).unwrap();
        let h = integrate_geodesic(&c, SurfacePoint::new(0.1, 0.2), SurfaceVector::new(1.0, 0.3), 0.5004, 1e-3).unwrap();
        let y = g.state_at(&c, 0.5004);
        assert_abs_diff_eq!(y[0], h.end().u, epsilon = 1e-11);
        assert_abs_diff_eq!(y[1], h.end().v, epsilon = 1e-11);
    }
}
