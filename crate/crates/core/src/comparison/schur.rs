use super::convex::convex_to_p_check;
use super::sampling::{bound_samples, curvature_bound, curvature_comparison, distances_along};
use super::{ComparisonCase, HypothesisCheck, Side, Subject, VerdictReport};
use crate::error::{invalid, Result};
use crate::model_space::{dist_k, polygon_convexity, CurvatureSign};
use crate::surface::SurfacePoint;

/// Number of distance samples along the curve.
pub(crate) const MAX_SAMPLES: usize = 128;

pub(crate) fn sample_indices(n: usize) -> Vec<usize> {
    if n <= MAX_SAMPLES + 1 {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..=MAX_SAMPLES).map(|j| j * (n - 1) / MAX_SAMPLES).collect();
    idx.dedup();
    idx
}

pub(crate) fn model_convexity(case: &ComparisonCase, with_base: bool) -> Result<HypothesisCheck> {
    let mut poly = Vec::with_capacity(case.model.points.len() + 1);
    if with_base {
        let (_, pm) = case.base.as_ref().ok_or_else(|| invalid("case has no base points"))?;
        poly.push(*pm);
    }
    poly.extend_from_slice(&case.model.points);
    let rep = polygon_convexity(&poly, None, 1e-9)?;
    let what = if with_base { "[p̃γ̃(0)] ∪ γ̃ ∪ [p̃γ̃(L)]" } else { "γ̃ ∪ [γ̃(0)γ̃(L)]" };
    Ok(HypothesisCheck::new(
        "model_convexity",
        rep.convex,
        match rep.first_violation() {
            None => format!("{what} is convex"),
            Some(i) => format!("{what} is not convex at vertex {i}"),
        },
    ))
}

/// Chord comparison `|γ(0)γ(s)| ≥ |γ̃(0)γ̃(s)|` (resp. `≤`), asserted at
/// every sampled `s` since the hypotheses pass to sub-arcs.
pub fn verify_schur(case: &ComparisonCase) -> Result<VerdictReport> {
    let k = case.k;
    let side = case.side;
    let n = case.model.points.len();
    let idx = sample_indices(n);
    let mut hyps = vec![curvature_comparison(&case.subject, &case.model, side), model_convexity(case, false)?];
    let mut notes = Vec::new();
    let subject_d: Vec<f64> = match &case.subject {
        Subject::Flat { points, .. } => {
            let flat_ok = match side {
                Side::SecAtMostK => k.value() >= 0.0,
                Side::SecAtLeastK => return Err(invalid("flat-ambient subjects support the sec ≤ k side only")),
            };
            hyps.push(HypothesisCheck::new("curvature_bound", flat_ok, format!("sec ≡ 0 against k = {}", k.value())));
            idx.iter()
                .map(|&i| (0..3).map(|j| (points[i][j] - points[0][j]).powi(2)).sum::<f64>().sqrt())
                .collect()
        }
        Subject::Surface { chart, curve } => {
            let all: Vec<SurfacePoint> = curve.samples.iter().map(|c| c.point).collect();
            let pts: Vec<SurfacePoint> = idx.iter().map(|&i| all[i]).collect();
            hyps.push(curvature_bound(chart, k, side, &bound_samples(chart, &all)));
            let ds = distances_along(chart, pts[0], &pts, 8)?;
            match side {
                Side::SecAtMostK => {
                    let cut: Vec<usize> = (0..ds.len()).filter(|&j| ds[j].cut_crossing).map(|j| idx[j]).collect();
                    hyps.push(HypothesisCheck::new(
                        "cut_locus_avoidance",
                        cut.is_empty(),
                        if cut.is_empty() {
                            "no cut-locus crossing of γ(0) detected".to_string()
                        } else {
                            format!("γ crosses the cut locus of γ(0) near samples {cut:?}")
                        },
                    ));
                }
                Side::SecAtLeastK => {
                    let r = convex_to_p_check(chart, pts[0], curve, k, case.tol.angle)?;
                    hyps.push(HypothesisCheck::new(
                        "convex_to_p",
                        r.pass(),
                        format!("acceleration toward p {} / development convex {}", r.cond_2_1_1, r.cond_2_1_2),
                    ));
                }
            }
            ds.iter().map(|x| x.d).collect()
        }
    };
    let model_d: Vec<f64> =
        idx.iter().map(|&i| dist_k(k, &case.model.points[0], &case.model.points[i])).collect::<Result<_>>()?;
    let margins: Vec<f64> = subject_d
        .iter()
        .zip(&model_d)
        .map(|(a, b)| match side {
            Side::SecAtMostK => a - b,
            Side::SecAtLeastK => b - a,
        })
        .collect();
    let s: Vec<f64> = idx.iter().map(|&i| case.model.s[i]).collect();
    let last = *margins.last().unwrap();
    if last.abs() <= super::EQUALITY_TOL {
        let l = case.model.length();
        let chord = *subject_d.last().unwrap();
        if k.sign() != CurvatureSign::Positive || chord + l < k.perimeter_bound() {
            notes.push("equality of chords: rigidity case detected (not constructed)".into());
        } else {
            notes.push("equality of chords, but |γ(0)γ(L)| + L ≥ 2π/√k so rigidity is not asserted".into());
        }
    }
    let rel = match side {
        Side::SecAtMostK => "|γ(0)γ(s)| ≥ |γ̃(0)γ̃(s)|",
        Side::SecAtLeastK => "|γ(0)γ(s)| ≤ |γ̃(0)γ̃(s)|",
    };
    Ok(VerdictReport::conclude(&case.id, rel, s, margins, hyps, &case.tol, notes))
}
