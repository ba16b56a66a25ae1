use serde::Serialize;

use super::chart::{gauss_curvature, SurfaceChart, SurfacePoint};
use super::curve::SampledCurve;
use super::distance::{surface_distance, surface_distance_from_guess};
use super::geodesic::{geodesic_rhs, rk4, GeodesicPath};
use crate::error::{invalid, GeomError, Result};

/// `(u, v, u̇, v̇, j, j')` along a geodesic with a normal Jacobi field
/// `J = j n`.
pub type JacobiState = [f64; 6];

fn curvature_at(chart: &SurfaceChart, u: f64, v: f64) -> f64 {
    chart.analytic_curvature(u, v).unwrap_or_else(|| chart.brioschi_curvature(u, v))
}

fn rhs(chart: &SurfaceChart, y: &JacobiState) -> JacobiState {
    let g = geodesic_rhs(chart, &[y[0], y[1], y[2], y[3]]);
    let k = curvature_at(chart, y[0], y[1]);
    [g[0], g[1], g[2], g[3], y[5], -k * y[4]]
}

/// A scalar normal Jacobi field `j'' + K j = 0` along a geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct JacobiData {
    pub step: f64,
    pub t: Vec<f64>,
    pub states: Vec<JacobiState>,
    pub curvature: Vec<f64>,
}

/// Integrates the normal Jacobi equation jointly with the geodesic on its
/// grid.
pub fn jacobi_integrate(chart: &SurfaceChart, geod: &GeodesicPath, j0: f64, j0dot: f64) -> Result<JacobiData> {
    if geod.exit.is_some() {
        return Err(invalid("geodesic left the chart"));
    }
    gauss_curvature(chart, geod.start)?;
    let h = geod.step;
    let n = geod.s.len() - 1;
    let y0 = geod.states[0];
    let mut y = [y0[0], y0[1], y0[2], y0[3], j0, j0dot];
    let mut t = vec![0.0];
    let mut states = vec![y];
    let mut curvature = vec![curvature_at(chart, y[0], y[1])];
    for i in 1..=n {
        y = rk4(&|y| rhs(chart, y), &y, h);
        if !chart.contains(y[0], y[1]) {
            return Err(invalid("geodesic left the chart"));
        }
        t.push(i as f64 * h);
        states.push(y);
        curvature.push(curvature_at(chart, y[0], y[1]));
    }
    Ok(JacobiData { step: h, t, states, curvature })
}

impl JacobiData {
    pub fn length(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    pub fn end(&self) -> JacobiState {
        *self.states.last().expect("non-empty")
    }

    pub fn j(&self) -> Vec<f64> {
        self.states.iter().map(|y| y[4]).collect()
    }

    /// State at `t`, by an RK4 sub-step from the nearest node below.
    pub fn state_at(&self, chart: &SurfaceChart, t: f64) -> JacobiState {
        let i = ((t / self.step).floor().max(0.0) as usize).min(self.states.len() - 1);
        let dt = t - self.t[i];
        if dt.abs() < 1e-15 {
            return self.states[i];
        }
        rk4(&|y| rhs(chart, y), &self.states[i], dt)
    }

    /// Largest `|j'' + K j|` on the grid, `j''` by the five-point stencil.
    pub fn ode_residual(&self) -> f64 {
        let j = self.j();
        let h2 = self.step * self.step;
        (2..j.len().saturating_sub(2))
            .map(|i| {
                let d2 = (-j[i - 2] + 16.0 * j[i - 1] - 30.0 * j[i] + 16.0 * j[i + 1] - j[i + 2]) / (12.0 * h2);
                (d2 + self.curvature[i] * j[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `I_a^b(J, J) = ∫ (j'² − K j²) dt`, by three-point Gauss–Legendre on
/// each grid cell.
pub fn index_form(chart: &SurfaceChart, jd: &JacobiData, a: f64, b: f64) -> Result<f64> {
    let len = jd.length();
    if !(0.0 <= a && a <= b && b <= len * (1.0 + 1e-12)) {
        return Err(invalid(format!("index form interval [{a}, {b}] not inside [0, {len}]")));
    }
    let b = b.min(len);
    let nodes = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    let f = |t: f64| {
        let y = jd.state_at(chart, t);
        y[5] * y[5] - curvature_at(chart, y[0], y[1]) * y[4] * y[4]
    };
    let mut total = 0.0;
    let mut lo = a;
    while lo < b {
        let cell = ((lo / jd.step).floor() + 1.0) * jd.step;
        let hi = if cell <= lo + 1e-15 { lo + jd.step } else { cell }.min(b);
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += nodes.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r;
        lo = hi;
    }
    Ok(total)
}

/// Finite-difference and second-variation derivatives of `s ↦ |p γ(s)|`.
#[derive(Debug, Clone, Serialize)]
pub struct SecondVariationReport {
    pub distance: f64,
    pub first_fd: f64,
    /// `⟨γ̇, ċ(ℓ)⟩`, i.e. `−cos ∠(γ̇, ↑ₚ)`.
    pub first_formula: f64,
    pub second_fd: f64,
    /// `⟨∇γ̇ γ̇, ċ(ℓ)⟩ + I(U⊥, U⊥)`.
    pub second_formula: f64,
    pub first_ok: bool,
    pub second_ok: bool,
}

pub const FIRST_VARIATION_TOL: f64 = 1e-6;
pub const SECOND_VARIATION_TOL: f64 = 1e-4;

/// Compares finite differences of `|p γ(s)|` at interior sample `i` of a
/// smooth curve (using samples `i ± 1`) with the first and second variation
/// formulas.
pub fn second_variation_check(
    chart: &SurfaceChart,
    p: SurfacePoint,
    curve: &SampledCurve,
    i: usize,
) -> Result<SecondVariationReport> {
    let n = curve.samples.len();
    if curve.polyline {
        return Err(invalid("second variation needs a smooth curve sampling"));
    }
    if i == 0 || i + 1 >= n {
        return Err(invalid("second variation needs an interior sample"));
    }
    let (sm, s0, sp) = (&curve.samples[i - 1], &curve.samples[i], &curve.samples[i + 1]);
    let h = sp.s - s0.s;
    if ((s0.s - sm.s) - h).abs() > 1e-9 * h {
        return Err(invalid("second variation needs uniform sample spacing"));
    }
    let (Some(tan), Some(acc)) = (s0.tangent, s0.acceleration) else {
        return Err(invalid(format!("no derivative stencil at sample {i}")));
    };
    let d0 = surface_distance(chart, p, s0.point)?;
    if d0.multiplicity_flag {
        return Err(GeomError::AmbiguousGeodesic(format!("|pγ(s)| has several minimisers at sample {i}")));
    }
    let dp = surface_distance_from_guess(chart, p, sp.point, d0.bearing, d0.distance)?;
    let dm = surface_distance_from_guess(chart, p, sm.point, d0.bearing, d0.distance)?;
    let (l, x) = (d0.distance, s0.point);
    let cdot = d0.geodesic.end_velocity();
    let (_, nrm) = chart.rotate_quarter(x, cdot);
    let first_formula = chart.inner(x, tan, cdot);
    let normal = chart.inner(x, tan, nrm);
    let jd = jacobi_integrate(chart, &d0.geodesic, 0.0, 1.0)?;
    let j_end = jd.end()[4];
    if j_end.abs() < 1e-9 {
        return Err(GeomError::HypothesisViolation("endpoint is conjugate to p along the geodesic".into()));
    }
    let index = normal * normal * index_form(chart, &jd, 0.0, l)? / (j_end * j_end);
    let second_formula = chart.inner(x, acc, cdot) + index;
    let first_fd = (dp.distance - dm.distance) / (2.0 * h);
    let second_fd = (dp.distance - 2.0 * l + dm.distance) / (h * h);
    Ok(SecondVariationReport {
        distance: l,
        first_fd,
        first_formula,
        second_fd,
        second_formula,
        first_ok: (first_fd - first_formula).abs() <= FIRST_VARIATION_TOL,
        second_ok: (second_fd - second_formula).abs() <= SECOND_VARIATION_TOL,
    })
}

/// Index forms of normal Jacobi fields with `J(0) = 0` and `|J(ℓ)| = norm`
/// along two geodesics of equal length.
#[derive(Debug, Clone, Serialize)]
pub struct IndexComparisonReport {
    pub index_m: f64,
    pub index_n: f64,
    pub curvature_gap: f64,
    pub pass: bool,
}

/// Checks `I_M ≥ I_N` when `K_M(c(t)) ≤ K_N(c̃(t))` for all `t`; errors with
/// a hypothesis violation otherwise.
pub fn index_comparison_check(
    chart_m: &SurfaceChart,
    geod_m: &GeodesicPath,
    chart_n: &SurfaceChart,
    geod_n: &GeodesicPath,
    norm: f64,
) -> Result<IndexComparisonReport> {
    let l = geod_m.length();
    if (l - geod_n.length()).abs() > 1e-9 * l.max(1.0) || !(l > 0.0) {
        return Err(invalid("geodesics must have equal positive length"));
    }
    let jm = jacobi_integrate(chart_m, geod_m, 0.0, 1.0)?;
    let jn = jacobi_integrate(chart_n, geod_n, 0.0, 1.0)?;
    let samples = 200;
    let mut gap = f64::INFINITY;
    for i in 0..=samples {
        let t = l * i as f64 / samples as f64;
        let (a, b) = (jm.state_at(chart_m, t), jn.state_at(chart_n, t));
        gap = gap.min(curvature_at(chart_n, b[0], b[1]) - curvature_at(chart_m, a[0], a[1]));
    }
    if gap < -1e-12 {
        return Err(GeomError::HypothesisViolation(format!("curvature of M exceeds that of N by {}", -gap)));
    }
    let scale = |jd: &JacobiData| {
        let e = jd.end()[4];
        norm * norm / (e * e)
    };
    if jm.end()[4].abs() < 1e-12 || jn.end()[4].abs() < 1e-12 {
        return Err(GeomError::HypothesisViolation("endpoint is conjugate to the start".into()));
    }
    let index_m = scale(&jm) * index_form(chart_m, &jm, 0.0, l)?;
    let index_n = scale(&jn) * index_form(chart_n, &jn, 0.0, l)?;
    Ok(IndexComparisonReport { index_m, index_n, curvature_gap: gap, pass: index_m >= index_n - 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::chart::SurfaceVector;
    use crate::surface::geodesic::integrate_geodesic;
    use crate::surface::chart::sphere_point;
    use approx::assert_abs_diff_eq;

    fn geo(c: &SurfaceChart, l: f64) -> GeodesicPath {
        integrate_geodesic(c, SurfacePoint::new(0.0, 0.0), SurfaceVector::new(1.0, 0.0), l, 1e-3).unwrap()
    }

    #[test]
    fn sphere_jacobi_field_is_sine() {
        let c = SurfaceChart::sphere(1.0).unwrap();
        let jd = jacobi_integrate(&c, &geo(&c, 2.0), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(jd.end()[4], 2.0f64.sin(), epsilon = 1e-10);
        assert!(jd.ode_residual() < 1e-7);
        let i = index_form(&c, &jd, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(i, 1.0f64.sin() * 1.0f64.cos(), epsilon = 1e-10);
        assert!(index_form(&c, &jd, 0.0, 3.0).is_err());
    }

    #[test]
    fn index_comparison_flat_vs_sphere() {
        let (f, s) = (SurfaceChart::plane(), SurfaceChart::sphere(1.0).unwrap());
        let r = index_comparison_check(&f, &geo(&f, 1.0), &s, &geo(&s, 1.0), 1.0f64.sin()).unwrap();
        assert_abs_diff_eq!(r.index_m, 1.0f64.sin().powi(2), epsilon = 1e-10);
        assert_abs_diff_eq!(r.index_n, 1.0f64.sin() * 1.0f64.cos(), epsilon = 1e-10);
        assert!(r.pass);
        assert!(matches!(
            index_comparison_check(&s, &geo(&s, 1.0), &f, &geo(&f, 1.0), 1.0),
            Err(GeomError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn second_variation_on_sphere_circle() {
        let c = SurfaceChart::sphere(1.0).unwrap();
        let th: f64 = 1.1;
        let r = (0.5 * th).tan();
        let curve = SampledCurve::from_fn(&c, 1.0, 1000, |s| {
            let a = s / th.sin();
            (r * a.cos(), r * a.sin())
        })
        .unwrap();
        let p = sphere_point(0.5, 2.0);
        let rep = second_variation_check(&c, p, &curve, 400).unwrap();
        assert!(rep.first_ok && rep.second_ok, "{rep:?}");
    }
}
