//! Theorem-level verifiers: Schur's chord comparison, Toponogov's triangle
//! comparison and the curve comparison that generalises both, each with
//! explicit bookkeeping of which hypotheses were checked and how they fared.
//!
//! A failed hypothesis never aborts a verification: the raw inequality is
//! still evaluated and reported so that counterexamples can be exhibited.

mod cases;
mod convex;
mod sampling;
mod schur;
mod theorem_a;
mod toponogov;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model_space::{Curvature, ModelCurve, ModelPoint};
use crate::surface::{SampledCurve, SurfaceChart, SurfacePoint};

pub use cases::{
    cylinder_counterexample, geodesic_hinge_case, geodesic_triangle_case, model_copy_case, planar_arc, planar_arc_model,
};
pub use convex::{convex_to_p_check, ConvexToPReport};
pub use sampling::{distances_along, DistSample};
pub use schur::verify_schur;
pub use theorem_a::{verify_a2_angle, verify_a2_endpoint};
pub use toponogov::verify_toponogov_riemannian;

/// Margins within this of zero count as equality samples.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Which curvature bound the ambient space is assumed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `sec ≤ k`.
    SecAtMostK,
    /// `sec ≥ k`.
    SecAtLeastK,
}

/// Tolerance budget: distance margins and angle/premise matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub distance: f64,
    pub angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { distance: 1e-5, angle: 1e-8 }
    }
}

/// The curve under test.
#[derive(Debug, Clone)]
pub enum Subject {
    Surface { chart: SurfaceChart, curve: SampledCurve },
    /// A polyline in Euclidean 2- or 3-space (use `z = 0` for the plane) at
    /// the given arclength values; curvature is the turning angle over the
    /// mean adjacent step.
    Flat { s: Vec<f64>, points: Vec<[f64; 3]> },
}

impl Subject {
    pub fn s(&self) -> Vec<f64> {
        match self {
            Subject::Surface { curve, .. } => curve.samples.iter().map(|c| c.s).collect(),
            Subject::Flat { s, .. } => s.clone(),
        }
    }
}

/// A subject curve paired with a model curve in `M²ₖ` on the same arclength
/// grid; base points are needed by the base-point comparisons only.
#[derive(Debug, Clone)]
pub struct ComparisonCase {
    pub id: String,
    pub side: Side,
    pub k: Curvature,
    pub subject: Subject,
    pub model: ModelCurve,
    pub base: Option<(SurfacePoint, ModelPoint)>,
    pub tol: Tolerances,
}

impl ComparisonCase {
    pub fn new(id: &str, side: Side, k: Curvature, subject: Subject, model: ModelCurve) -> Result<Self> {
        if model.k != k {
            return Err(invalid(format!("model curve lives in {} but the case declares {}", model.k, k)));
        }
        let s = subject.s();
        if let Subject::Flat { points, .. } = &subject {
            if points.len() != s.len() {
                return Err(invalid("flat subject needs one arclength value per point"));
            }
        }
        if s.len() != model.s.len() {
            return Err(invalid(format!("subject has {} samples but the model {}", s.len(), model.s.len())));
        }
        let scale = model.length().max(1.0);
        for (i, (a, b)) in s.iter().zip(&model.s).enumerate() {
            if (a - s[0] - b).abs() > 1e-6 * scale {
                return Err(invalid(format!("arclength grids differ at sample {i}: {a} vs {b}")));
            }
        }
        Ok(ComparisonCase { id: id.into(), side, k, subject, model, base: None, tol: Tolerances::default() })
    }

    pub fn with_base(mut self, p: SurfacePoint, p_model: ModelPoint) -> Result<Self> {
        if p_model.curvature() != self.k {
            return Err(invalid("model base point lives in a different model plane"));
        }
        self.base = Some((p, p_model));
        Ok(self)
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }
}

/// One hypothesis of a theorem, as checked on the inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl HypothesisCheck {
    pub(crate) fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        HypothesisCheck { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Every hypothesis holds and some margin is below `−tol`.
    TheoremViolated,
    /// Some hypothesis fails; the inequality is reported informationally.
    HypothesisViolated,
}

/// Outcome of a verifier. Margins are oriented so that the asserted
/// inequality reads `margin ≥ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub case_id: String,
    pub inequality: String,
    pub s: Vec<f64>,
    pub margins: Vec<f64>,
    pub worst_margin: f64,
    pub hypotheses: Vec<HypothesisCheck>,
    pub equality_samples: Vec<usize>,
    pub raw_inequality_holds: bool,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerdictReport {
    pub(crate) fn conclude(
        case_id: &str,
        inequality: &str,
        s: Vec<f64>,
        margins: Vec<f64>,
        hypotheses: Vec<HypothesisCheck>,
        tol: &Tolerances,
        notes: Vec<String>,
    ) -> Self {
        let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let equality_samples =
            (0..margins.len()).filter(|&i| s[i] > s[0] && margins[i].abs() <= EQUALITY_TOL).collect();
        let raw_inequality_holds = !(worst_margin < -tol.distance);
        let verdict = if hypotheses.iter().any(|h| !h.pass) {
            Verdict::HypothesisViolated
        } else if raw_inequality_holds {
            Verdict::Pass
        } else {
            Verdict::TheoremViolated
        };
        VerdictReport {
            case_id: case_id.into(),
            inequality: inequality.into(),
            s,
            margins,
            worst_margin,
            hypotheses,
            equality_samples,
            raw_inequality_holds,
            verdict,
            notes,
        }
    }

    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypotheses.iter().filter(|h| !h.pass).map(|h| h.name.as_str()).collect()
    }

    /// `s,margin` rows.
    pub fn margin_csv(&self) -> String {
        let mut out = String::from("s,margin\n");
        for (s, m) in self.s.iter().zip(&self.margins) {
            out.push_str(&format!("{s},{m}\n"));
        }
        out
    }
}

/// Maps a point of a constant-curvature model chart into `M²ₖ`.
pub fn chart_to_model(chart: &SurfaceChart, k: Curvature, p: SurfacePoint) -> Result<ModelPoint> {
    let (kc, c) = chart
        .model_embedding(p)
        .ok_or_else(|| invalid(format!("`{}` is not a model chart", chart.name())))?;
    if (kc - k.value()).abs() > 1e-12 {
        return Err(invalid(format!("`{}` has curvature {kc}, not {}", chart.name(), k.value())));
    }
    ModelPoint::from_embedding(k, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_space::{reference_tangent, turn_left};
    use crate::surface::{hyperbolic_point, integrate_geodesic, sphere_point, SurfaceVector};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn flat() -> Curvature {
        Curvature::FLAT
    }

    fn arc_case(kappa: f64, kt: f64, len: f64) -> ComparisonCase {
        let subject = Subject::Surface { chart: SurfaceChart::plane(), curve: planar_arc(kappa, len, 100).unwrap() };
        let model = planar_arc_model(flat(), kt, len, 100).unwrap();
        ComparisonCase::new("arc", Side::SecAtMostK, flat(), subject, model).unwrap()
    }

    #[test]
    fn schur_planar_arcs() {
        let r = verify_schur(&arc_case(1.0, 2.0, PI / 2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let sub = 2.0 * (PI / 4.0f64).sin();
        assert_abs_diff_eq!(r.margins.last().unwrap() + 1.0, sub, epsilon = 1e-9);
        let eq = verify_schur(&arc_case(1.5, 1.5, 2.0)).unwrap();
        assert_eq!(eq.verdict, Verdict::Pass);
        assert!(eq.margins.iter().all(|m| m.abs() < 1e-9));
        assert!(eq.notes.iter().any(|n| n.contains("rigidity")));
        // κ > κ̃ breaks the curvature hypothesis
        let bad = verify_schur(&arc_case(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(bad.verdict, Verdict::HypothesisViolated);
        assert!(!bad.raw_inequality_holds);
    }

    #[test]
    fn schur_helix_in_space() {
        let (a, b) = (1.0f64, 0.5);
        let c = (a * a + b * b).sqrt();
        let kappa = a / (c * c);
        let n = 2000;
        let len = 4.0;
        let s: Vec<f64> = (0..=n).map(|i| len * i as f64 / n as f64).collect();
        let points: Vec<[f64; 3]> =
            s.iter().map(|&t| [a * (t / c).cos(), a * (t / c).sin(), b * t / c]).collect();
        let model = ModelCurve::polyline(
            s.iter()
                .map(|&t| ModelPoint::planar((kappa * t).sin() / kappa, (1.0 - (kappa * t).cos()) / kappa))
                .collect(),
        )
        .unwrap();
        let case = ComparisonCase::new("helix", Side::SecAtMostK, flat(), Subject::Flat { s, points }, model).unwrap();
        let r = verify_schur(&case).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.hypotheses);
        assert!(*r.margins.last().unwrap() > 0.1);
    }

    #[test]
    fn model_on_model_is_equality() {
        let chart = SurfaceChart::sphere(1.0).unwrap();
        let k = Curvature::new(1.0).unwrap();
        let th: f64 = 0.9;
        let r = (0.5 * th).tan();
        let curve = SampledCurve::from_fn(&chart, 1.5, 150, |s| {
            let a = s / th.sin();
            (r * a.cos(), r * a.sin())
        })
        .unwrap();
        let p = SurfacePoint::new(0.0, 0.0);
        for side in [Side::SecAtMostK, Side::SecAtLeastK] {
            let case = model_copy_case("copy", &chart, k, side, curve.clone(), p).unwrap();
            for rep in [verify_schur(&case).unwrap(), verify_a2_endpoint(&case).unwrap(), verify_a2_angle(&case).unwrap()] {
                assert!(rep.margins.iter().all(|m| m.abs() < 1e-8), "{}: {}", rep.inequality, rep.worst_margin);
                assert_ne!(rep.verdict, Verdict::TheoremViolated);
            }
        }
    }

    #[test]
    fn cylinder_counterexample_is_flagged() {
        let case = cylinder_counterexample().unwrap();
        let r = verify_a2_endpoint(&case).unwrap();
        assert!(!r.raw_inequality_holds);
        assert_eq!(r.verdict, Verdict::HypothesisViolated);
        assert_eq!(r.failed_hypotheses(), vec!["cut_locus_avoidance"]);
    }

    fn hinge_case(chart: &SurfaceChart, side: Side, angle: f64, len: f64, d0: f64) -> ComparisonCase {
        // γ a geodesic leaving x = γ(0) at `angle` from ↑ᵖ, p at the origin
        let p = SurfacePoint::new(0.0, 0.0);
        let g = integrate_geodesic(chart, p, SurfaceVector::new(1.0, 0.0), d0, 1e-3).unwrap();
        let x = g.end();
        let up = g.end_velocity().scale(-1.0);
        let (_, jup) = chart.rotate_quarter(x, up);
        let dir = up.scale(angle.cos()).add(jup.scale(angle.sin()));
        let geo = integrate_geodesic(chart, x, dir, len, 1e-3).unwrap();
        let curve = SampledCurve::from_geodesic(&geo, 10).unwrap();
        let k = flat();
        let pm = ModelPoint::planar(0.0, 0.0);
        let x0 = ModelPoint::planar(d0, 0.0);
        let t = turn_left(&x0, reference_tangent(&x0), PI - angle);
        let n = curve.samples.len() - 1;
        let model = ModelCurve::integrate(x0, t, len, n, |_| 0.0).unwrap();
        ComparisonCase::new("hinge", side, k, Subject::Surface { chart: chart.clone(), curve }, model)
            .unwrap()
            .with_base(p, pm)
            .unwrap()
    }

    #[test]
    fn hinges_on_sphere_and_disc() {
        let sphere = SurfaceChart::sphere(1.0).unwrap();
        let r = verify_a2_angle(&hinge_case(&sphere, Side::SecAtLeastK, 2.0, 1.2, 0.8)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.hypotheses);
        assert!(r.margins[1..].iter().all(|m| *m > 0.0));
        let disc = SurfaceChart::hyperbolic(1.0).unwrap();
        let h = verify_a2_angle(&hinge_case(&disc, Side::SecAtMostK, 2.0, 1.2, 0.8)).unwrap();
        assert_eq!(h.verdict, Verdict::Pass, "{:?}", h.hypotheses);
        assert!(h.margins[1..].iter().all(|m| *m > 0.0));
    }

    #[test]
    fn toponogov_sphere_and_disc() {
        let tol = Tolerances::default();
        let sphere = SurfaceChart::sphere(1.0).unwrap();
        let tri = [sphere_point(0.4, 0.0), sphere_point(1.3, 1.0), sphere_point(1.1, 2.6)];
        let r = verify_toponogov_riemannian(&sphere, tri, flat(), Side::SecAtLeastK, 20, &tol, "s").unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.hypotheses);
        assert_abs_diff_eq!(r.margins[0], 0.0, epsilon = 1e-9);
        let same = verify_toponogov_riemannian(&sphere, tri, Curvature::new(1.0).unwrap(), Side::SecAtLeastK, 20, &tol, "e")
            .unwrap();
        assert!(same.margins.iter().all(|m| m.abs() < 1e-8));
        let disc = SurfaceChart::hyperbolic(1.0).unwrap();
        let tri = [hyperbolic_point(0.3, 0.0), hyperbolic_point(1.2, 2.0), hyperbolic_point(1.0, 4.0)];
        let h = verify_toponogov_riemannian(&disc, tri, flat(), Side::SecAtMostK, 20, &tol, "h").unwrap();
        assert_eq!(h.verdict, Verdict::Pass, "{:?}", h.hypotheses);
        // the wrong curvature bound is caught
        let w = verify_toponogov_riemannian(&disc, tri, flat(), Side::SecAtLeastK, 20, &tol, "w").unwrap();
        assert_eq!(w.verdict, Verdict::HypothesisViolated);
        let _ = TAU;
    }
}
