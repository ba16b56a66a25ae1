use super::sampling::{bound_samples, curvature_bound, distances_along};
use super::{HypothesisCheck, Side, Tolerances, VerdictReport};
use crate::error::{GeomError, Result};
use crate::model_space::{angle_from_sss, dist_k, Curvature, CurvatureSign, ModelPoint};
use crate::surface::{surface_distance, SurfaceChart, SurfacePoint};

/// Toponogov's comparison with matched `|pr|`: for `s` on `[qr]` and `s̃` on
/// `[q̃r̃]` with `|qs| = |q̃s̃|`, `|ps| ≥ |p̃s̃|` when `sec ≥ k` (and the reverse
/// when `sec ≤ k`, which also needs `[qr]` clear of the cut locus of `p`).
pub fn verify_toponogov_riemannian(
    chart: &SurfaceChart,
    tri: [SurfacePoint; 3],
    k: Curvature,
    side: Side,
    samples: usize,
    tol: &Tolerances,
    case_id: &str,
) -> Result<VerdictReport> {
    let [p, q, r] = tri;
    let wrap = |e: GeomError| match e {
        GeomError::SearchFailure(m) => GeomError::SearchFailure(format!("case {case_id}: {m}")),
        other => other,
    };
    let pq = surface_distance(chart, p, q).map_err(wrap)?;
    let pr = surface_distance(chart, p, r).map_err(wrap)?;
    let qr = surface_distance(chart, q, r).map_err(wrap)?;
    let (a, b, c) = (pq.distance, qr.distance, pr.distance);
    let mut hyps = Vec::new();
    let mut notes = Vec::new();
    if k.sign() == CurvatureSign::Positive {
        let total = a + b + c;
        let ok = total < k.perimeter_bound();
        hyps.push(HypothesisCheck::new(
            "perimeter_bound",
            ok,
            format!("perimeter {total} against 2π/√k = {}", k.perimeter_bound()),
        ));
        if !ok {
            notes.push("no comparison triangle exists; no margins computed".into());
            return Ok(VerdictReport::conclude(case_id, "|ps| vs |p̃s̃|", Vec::new(), Vec::new(), hyps, tol, notes));
        }
    }
    if qr.multiplicity_flag {
        notes.push("[qr] is not unique; the first minimiser found is used".into());
    }
    let n = samples.max(1);
    let geod = &qr.geodesic;
    let pts: Vec<SurfacePoint> = (0..=n)
        .map(|j| {
            let y = geod.state_at(chart, b * j as f64 / n as f64);
            SurfacePoint::new(y[0], y[1])
        })
        .collect();
    let mut bound_pts: Vec<SurfacePoint> = pts.clone();
    for g in [&pq.geodesic, &pr.geodesic] {
        bound_pts.extend((0..g.s.len()).step_by(50).map(|i| g.point(i)));
    }
    hyps.push(curvature_bound(chart, k, side, &bound_samples(chart, &bound_pts)));
    let ds = distances_along(chart, p, &pts, 10).map_err(wrap)?;
    if side == Side::SecAtMostK {
        let cut: Vec<usize> = (0..ds.len()).filter(|&j| ds[j].cut_crossing).collect();
        hyps.push(HypothesisCheck::new(
            "cut_locus_avoidance",
            cut.is_empty(),
            if cut.is_empty() { "[qr] avoids the cut locus of p".to_string() } else { format!("cut crossing near {cut:?}") },
        ));
    }
    let theta = angle_from_sss(k, a, b, c).map_err(|e| GeomError::SearchFailure(format!("case {case_id}: {e}")))?;
    let pm = ModelPoint::from_polar(k, a, theta)?;
    let s: Vec<f64> = (0..=n).map(|j| b * j as f64 / n as f64).collect();
    let margins: Vec<f64> = s
        .iter()
        .zip(&ds)
        .map(|(&t, x)| {
            let sm = ModelPoint::from_polar(k, t, 0.0)?;
            let dm = dist_k(k, &pm, &sm)?;
            Ok(match side {
                Side::SecAtLeastK => x.d - dm,
                Side::SecAtMostK => dm - x.d,
            })
        })
        .collect::<Result<_>>()?;
    let rel = match side {
        Side::SecAtLeastK => "|ps| ≥ |p̃s̃|",
        Side::SecAtMostK => "|ps| ≤ |p̃s̃|",
    };
    Ok(VerdictReport::conclude(case_id, rel, s, margins, hyps, tol, notes))
}
