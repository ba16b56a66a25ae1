use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Mat2 = [[f64; 2]; 2];

/// Chart coordinates `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
}

/// Tangent components `(u̇, v̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceVector {
    pub du: f64,
    pub dv: f64,
}

impl SurfacePoint {
    pub fn new(u: f64, v: f64) -> Self {
        SurfacePoint { u, v }
    }
}

impl SurfaceVector {
    pub fn new(du: f64, dv: f64) -> Self {
        SurfaceVector { du, dv }
    }
    pub fn scale(self, s: f64) -> Self {
        SurfaceVector { du: s * self.du, dv: s * self.dv }
    }
    pub fn add(self, o: SurfaceVector) -> Self {
        SurfaceVector { du: self.du + o.du, dv: self.dv + o.dv }
    }
}

/// Meridian profile `ρ(t)` of a surface of revolution, `t` the meridian arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// `ρ = R sin(t/R)`, the round sphere.
    Sphere { radius: f64 },
    /// `ρ = √(c² + t²)`, the catenoid.
    Catenoid { c: f64 },
    /// `ρ = R + a cos(t/a)`, the torus.
    Torus { major: f64, minor: f64 },
}

impl Profile {
    /// `(ρ, ρ', ρ'')`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            Profile::Sphere { radius: r } => {
                let (s, c) = (t / r).sin_cos();
                (r * s, c, -s / r)
            }
            Profile::Catenoid { c } => {
                let rho = c.hypot(t);
                (rho, t / rho, c * c / (rho * rho * rho))
            }
            Profile::Torus { major, minor: a } => {
                let (s, c) = (t / a).sin_cos();
                (major + a * c, -s, -c / a)
            }
        }
    }

    fn t_range(&self) -> (f64, f64) {
        match *self {
            Profile::Sphere { radius } => (0.0, PI * radius),
            Profile::Catenoid { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Profile::Torus { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

type MetricFn = Arc<dyn Fn(f64, f64) -> Mat2 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Plane,
    /// Stereographic chart of the sphere of radius `r` from the south pole:
    /// `g = 4r²/(1 + u² + v²)² I`, north pole at the origin.
    Sphere { r: f64 },
    /// Poincaré disc of curvature `−1/r²`.
    Hyperbolic { r: f64 },
    Revolution(Profile),
    /// Graph of `z = (u² + v²)/2`.
    Paraboloid,
    /// Flat cylinder, `u` periodic.
    Cylinder,
    Custom { metric: MetricFn, scale: f64 },
}

/// A 2D Riemannian metric in a single chart.
#[derive(Clone)]
pub struct SurfaceChart {
    name: String,
    kind: Kind,
    /// `[u_min, u_max, v_min, v_max]`.
    domain: [f64; 4],
    periods: [Option<f64>; 2],
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

/// Christoffel symbols `Γ[k][i][j] = Γᵏᵢⱼ`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

const BIG: f64 = 1e9;

impl SurfaceChart {
    pub fn plane() -> Self {
        SurfaceChart { name: "plane".into(), kind: Kind::Plane, domain: [-BIG, BIG, -BIG, BIG], periods: [None, None] }
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(SurfaceChart {
            name: format!("sphere(R={radius})"),
            kind: Kind::Sphere { r: radius },
            domain: [-1e3, 1e3, -1e3, 1e3],
            periods: [None, None],
        })
    }

    pub fn hyperbolic(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(SurfaceChart {
            name: format!("hyperbolic(R={radius})"),
            kind: Kind::Hyperbolic { r: radius },
            domain: [-1.0, 1.0, -1.0, 1.0],
            periods: [None, None],
        })
    }

    pub fn revolution(profile: Profile) -> Result<Self> {
        let (lo, hi) = profile.t_range();
        match profile {
            Profile::Sphere { radius } => positive("radius", radius)?,
            Profile::Catenoid { c } => positive("c", c)?,
            Profile::Torus { major, minor } => {
                positive("minor", minor)?;
                if !(major > minor) {
                    return Err(invalid("torus needs major > minor radius"));
                }
            }
        }
        Ok(SurfaceChart {
            name: format!("revolution({profile:?})"),
            kind: Kind::Revolution(profile),
            domain: [lo.max(-BIG), hi.min(BIG), -BIG, BIG],
            periods: [if let Profile::Torus { minor, .. } = profile { Some(TAU * minor) } else { None }, Some(TAU)],
        })
    }

    pub fn paraboloid() -> Self {
        SurfaceChart { name: "paraboloid".into(), kind: Kind::Paraboloid, domain: [-1e3, 1e3, -1e3, 1e3], periods: [None, None] }
    }

    pub fn cylinder(circumference: f64) -> Result<Self> {
        positive("circumference", circumference)?;
        Ok(SurfaceChart {
            name: format!("cylinder(C={circumference})"),
            kind: Kind::Cylinder,
            domain: [-BIG, BIG, -BIG, BIG],
            periods: [Some(circumference), None],
        })
    }

    /// A user-supplied metric on a box; derivatives are taken numerically
    /// with step `1e−4 · scale`.
    pub fn custom(
        name: &str,
        domain: [f64; 4],
        scale: f64,
        metric: impl Fn(f64, f64) -> Mat2 + Send + Sync + 'static,
    ) -> Result<Self> {
        positive("scale", scale)?;
        let chart = SurfaceChart {
            name: name.into(),
            kind: Kind::Custom { metric: Arc::new(metric), scale },
            domain,
            periods: [None, None],
        };
        chart.validate(16)?;
        Ok(chart)
    }

    /// Looks a chart up by registry name: `plane`, `sphere`, `hyperbolic`,
    /// `paraboloid`, `cylinder`, `catenoid`, `torus`, `revolution_sphere`,
    /// with positional parameters.
    pub fn by_name(name: &str, params: &[f64]) -> Result<Self> {
        let p = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        match name {
            "plane" => Ok(Self::plane()),
            "sphere" => Self::sphere(p(0, 1.0)),
            "hyperbolic" => Self::hyperbolic(p(0, 1.0)),
            "paraboloid" => Ok(Self::paraboloid()),
            "cylinder" => Self::cylinder(p(0, TAU)),
            "catenoid" => Self::revolution(Profile::Catenoid { c: p(0, 1.0) }),
            "torus" => Self::revolution(Profile::Torus { major: p(0, 2.0), minor: p(1, 1.0) }),
            "revolution_sphere" => Self::revolution(Profile::Sphere { radius: p(0, 1.0) }),
            other => Err(invalid(format!("unknown chart `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn periods(&self) -> [Option<f64>; 2] {
        self.periods
    }

    /// Checks positive definiteness on an `n × n` grid of the domain box
    /// (clipped to ±10).
    pub fn validate(&self, n: usize) -> Result<()> {
        let [a, b, c, d] = self.domain.map(|x| x.clamp(-10.0, 10.0));
        for i in 0..n {
            for j in 0..n {
                let u = a + (b - a) * (i as f64 + 0.5) / n as f64;
                let v = c + (d - c) * (j as f64 + 0.5) / n as f64;
                if !self.contains(u, v) {
                    continue;
                }
                let g = self.metric(u, v);
                let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
                if !(g[0][0] > 0.0 && det > 0.0) || (g[0][1] - g[1][0]).abs() > 1e-12 * g[0][0].abs() {
                    return Err(invalid(format!("metric of `{}` is not positive definite at ({u}, {v})", self.name)));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let [a, b, c, d] = self.domain;
        if !(u.is_finite() && v.is_finite()) {
            return false;
        }
        let inbox = (self.periods[0].is_some() || (u > a && u < b)) && (self.periods[1].is_some() || (v > c && v < d));
        inbox
            && match &self.kind {
                Kind::Hyperbolic { .. } => u * u + v * v < 1.0 - 1e-12,
                _ => true,
            }
    }

    pub fn check(&self, p: SurfacePoint) -> Result<()> {
        if self.contains(p.u, p.v) {
            Ok(())
        } else {
            Err(invalid(format!("({}, {}) lies outside the domain of `{}`", p.u, p.v, self.name)))
        }
    }

    /// Wraps a coordinate difference into the fundamental period.
    pub fn wrap(&self, mut d: [f64; 2]) -> [f64; 2] {
        for (x, per) in d.iter_mut().zip(self.periods) {
            if let Some(p) = per {
                *x -= p * (*x / p).round();
            }
        }
        d
    }

    pub fn metric(&self, u: f64, v: f64) -> Mat2 {
        match &self.kind {
            Kind::Plane | Kind::Cylinder => [[1.0, 0.0], [0.0, 1.0]],
            Kind::Sphere { r } => {
                let l = 4.0 * r * r / (1.0 + u * u + v * v).powi(2);
                [[l, 0.0], [0.0, l]]
            }
            Kind::Hyperbolic { r } => {
                let l = 4.0 * r * r / (1.0 - u * u - v * v).powi(2);
                [[l, 0.0], [0.0, l]]
            }
            Kind::Revolution(p) => {
                let (rho, _, _) = p.eval(u);
                [[1.0, 0.0], [0.0, rho * rho]]
            }
            Kind::Paraboloid => [[1.0 + u * u, u * v], [u * v, 1.0 + v * v]],
            Kind::Custom { metric, .. } => metric(u, v),
        }
    }

    /// `(g, ∂g/∂u, ∂g/∂v)`.
    pub fn metric_derivs(&self, u: f64, v: f64) -> (Mat2, Mat2, Mat2) {
        let z = [[0.0; 2]; 2];
        let g = self.metric(u, v);
        match &self.kind {
            Kind::Plane | Kind::Cylinder => (g, z, z),
            Kind::Sphere { r } => {
                let q = 1.0 + u * u + v * v;
                let c = -16.0 * r * r / (q * q * q);
                (g, [[c * u, 0.0], [0.0, c * u]], [[c * v, 0.0], [0.0, c * v]])
            }
            Kind::Hyperbolic { r } => {
                let q = 1.0 - u * u - v * v;
                let c = 16.0 * r * r / (q * q * q);
                (g, [[c * u, 0.0], [0.0, c * u]], [[c * v, 0.0], [0.0, c * v]])
            }
            Kind::Revolution(p) => {
                let (rho, d, _) = p.eval(u);
                (g, [[0.0, 0.0], [0.0, 2.0 * rho * d]], z)
            }
            Kind::Paraboloid => (g, [[2.0 * u, v], [v, 0.0]], [[0.0, u], [u, 2.0 * v]]),
            Kind::Custom { scale, .. } => {
                let h = 1e-4 * scale;
                let d5 = |f: &dyn Fn(f64) -> Mat2| -> Mat2 {
                    let (a, b, c, d) = (f(-2.0 * h), f(-h), f(h), f(2.0 * h));
                    let mut o = [[0.0; 2]; 2];
                    for i in 0..2 {
                        for j in 0..2 {
                            o[i][j] = (a[i][j] - 8.0 * b[i][j] + 8.0 * c[i][j] - d[i][j]) / (12.0 * h);
                        }
                    }
                    o
                };
                (g, d5(&|t| self.metric(u + t, v)), d5(&|t| self.metric(u, v + t)))
            }
        }
    }

    pub fn christoffel(&self, u: f64, v: f64) -> Christoffel {
        // conformal metrics g = λ² I: Γ from ∂ log λ
        let conformal = |a: f64, b: f64| [[[a, b], [b, -a]], [[-b, a], [a, b]]];
        match &self.kind {
            Kind::Plane | Kind::Cylinder => return [[[0.0; 2]; 2]; 2],
            Kind::Sphere { .. } => {
                let c = -2.0 / (1.0 + u * u + v * v);
                return conformal(c * u, c * v);
            }
            Kind::Hyperbolic { .. } => {
                let c = 2.0 / (1.0 - u * u - v * v);
                return conformal(c * u, c * v);
            }
            Kind::Revolution(p) => {
                let (rho, d, _) = p.eval(u);
                return [[[0.0, 0.0], [0.0, -rho * d]], [[0.0, d / rho], [d / rho, 0.0]]];
            }
            _ => {}
        }
        self.christoffel_from_metric(u, v)
    }

    /// Christoffel symbols assembled from `g` and its first derivatives.
    pub fn christoffel_from_metric(&self, u: f64, v: f64) -> Christoffel {
        let (g, gu, gv) = self.metric_derivs(u, v);
        let dg = [gu, gv];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let mut out = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += inv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                    out[k][i][j] = 0.5 * s;
                }
            }
        }
        out
    }

    /// Closed-form Gaussian curvature, when the chart has one.
    pub fn analytic_curvature(&self, u: f64, v: f64) -> Option<f64> {
        match &self.kind {
            Kind::Plane | Kind::Cylinder => Some(0.0),
            Kind::Sphere { r } => Some(1.0 / (r * r)),
            Kind::Hyperbolic { r } => Some(-1.0 / (r * r)),
            Kind::Revolution(p) => {
                let (rho, _, dd) = p.eval(u);
                Some(-dd / rho)
            }
            Kind::Paraboloid => Some(1.0 / (1.0 + u * u + v * v).powi(2)),
            Kind::Custom { .. } => None,
        }
    }

    /// For the constant-curvature model charts (plane, sphere, Poincaré disc),
    /// the curvature and the unit-quadric coordinates of `p` used by the
    /// model plane.
    pub fn model_embedding(&self, p: SurfacePoint) -> Option<(f64, [f64; 3])> {
        match &self.kind {
            Kind::Plane => Some((0.0, [p.u, p.v, 0.0])),
            Kind::Sphere { r } => {
                let q = 1.0 + p.u * p.u + p.v * p.v;
                Some((1.0 / (r * r), [2.0 * p.u / q, 2.0 * p.v / q, (2.0 - q) / q]))
            }
            Kind::Hyperbolic { r } => {
                let q = 1.0 - p.u * p.u - p.v * p.v;
                Some((-1.0 / (r * r), [2.0 * p.u / q, 2.0 * p.v / q, (2.0 - q) / q]))
            }
            _ => None,
        }
    }

    fn scale(&self) -> f64 {
        match &self.kind {
            Kind::Custom { scale, .. } => *scale,
            _ => 1.0,
        }
    }

    pub fn inner(&self, p: SurfacePoint, a: SurfaceVector, b: SurfaceVector) -> f64 {
        let g = self.metric(p.u, p.v);
        g[0][0] * a.du * b.du + g[0][1] * (a.du * b.dv + a.dv * b.du) + g[1][1] * a.dv * b.dv
    }

    pub fn norm(&self, p: SurfacePoint, a: SurfaceVector) -> f64 {
        self.inner(p, a, a).max(0.0).sqrt()
    }

    /// Orthonormal frame at `p`: `e1 ∥ ∂u`, `e2` its positive rotation.
    pub fn frame(&self, p: SurfacePoint) -> (SurfaceVector, SurfaceVector) {
        let e1 = SurfaceVector::new(1.0, 0.0);
        let e1 = e1.scale(1.0 / self.norm(p, e1));
        self.rotate_quarter(p, e1)
    }

    /// `(a, J a)` with `J` the positive quarter turn at `p`.
    pub fn rotate_quarter(&self, p: SurfacePoint, a: SurfaceVector) -> (SurfaceVector, SurfaceVector) {
        let g = self.metric(p.u, p.v);
        let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).sqrt();
        // J a = g⁻¹ ε a √det g, with ε the standard area form
        let (x, y) = (g[0][0] * a.du + g[0][1] * a.dv, g[1][0] * a.du + g[1][1] * a.dv);
        let ja = SurfaceVector::new(-y / det, x / det);
        (a, ja)
    }

    /// Unit vector at bearing `alpha` in the frame of [`Self::frame`].
    pub fn direction(&self, p: SurfacePoint, alpha: f64) -> SurfaceVector {
        let (e1, e2) = self.frame(p);
        e1.scale(alpha.cos()).add(e2.scale(alpha.sin()))
    }

    /// Bearing of `a` in the frame of [`Self::frame`].
    pub fn bearing(&self, p: SurfacePoint, a: SurfaceVector) -> f64 {
        let (e1, e2) = self.frame(p);
        self.inner(p, a, e2).atan2(self.inner(p, a, e1))
    }

    /// Brioschi's formula with central differences of step `1e−4 · scale`.
    pub fn brioschi_curvature(&self, u: f64, v: f64) -> f64 {
        let h = 1e-4 * self.scale();
        let g = |du: f64, dv: f64| self.metric(u + du, v + dv);
        let g0 = g(0.0, 0.0);
        let (e, f, gg) = (g0[0][0], g0[0][1], g0[1][1]);
        let (gup, gum, gvp, gvm) = (g(h, 0.0), g(-h, 0.0), g(0.0, h), g(0.0, -h));
        let d = |a: Mat2, b: Mat2, i: usize, j: usize| (a[i][j] - b[i][j]) / (2.0 * h);
        let (e_u, e_v) = (d(gup, gum, 0, 0), d(gvp, gvm, 0, 0));
        let (f_u, f_v) = (d(gup, gum, 0, 1), d(gvp, gvm, 0, 1));
        let (g_u, g_v) = (d(gup, gum, 1, 1), d(gvp, gvm, 1, 1));
        let e_vv = (gvp[0][0] - 2.0 * e + gvm[0][0]) / (h * h);
        let g_uu = (gup[1][1] - 2.0 * gg + gum[1][1]) / (h * h);
        let f_uv = (g(h, h)[0][1] - g(h, -h)[0][1] - g(-h, h)[0][1] + g(-h, -h)[0][1]) / (4.0 * h * h);
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let a = [
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e, f],
            [0.5 * g_v, f, gg],
        ];
        let b = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, gg]];
        let w = e * gg - f * f;
        (det3(a) - det3(b)) / (w * w)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

/// Gaussian curvature at `p`: closed form when known, Brioschi otherwise.
pub fn gauss_curvature(chart: &SurfaceChart, p: SurfacePoint) -> Result<f64> {
    chart.check(p)?;
    Ok(chart.analytic_curvature(p.u, p.v).unwrap_or_else(|| chart.brioschi_curvature(p.u, p.v)))
}

/// Embedding of a stereographic sphere-chart point into `ℝ³`, radius `r`.
pub fn stereographic_to_sphere(r: f64, p: SurfacePoint) -> [f64; 3] {
    let q = 1.0 + p.u * p.u + p.v * p.v;
    [2.0 * r * p.u / q, 2.0 * r * p.v / q, r * (2.0 - q) / q]
}

/// Chart point of the sphere at colatitude `theta` (from the origin's pole)
/// and longitude `phi`.
pub fn sphere_point(theta: f64, phi: f64) -> SurfacePoint {
    let rr = (0.5 * theta).tan();
    SurfacePoint::new(rr * phi.cos(), rr * phi.sin())
}

/// Chart point of the Poincaré disc at hyperbolic distance `d` (unit
/// curvature radius) from the origin in direction `phi`.
pub fn hyperbolic_point(d: f64, phi: f64) -> SurfacePoint {
    let rr = (0.5 * d).tanh();
    SurfacePoint::new(rr * phi.cos(), rr * phi.sin())
}
