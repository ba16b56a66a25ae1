use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::engine::SpaceTriangle;
use super::space::AlexandrovSpace;
use crate::error::Result;
use crate::model_space::Curvature;

#[derive(Debug, Clone, Serialize)]
pub struct SamplingReport {
    pub triangles: usize,
    pub samples_per_triangle: usize,
    /// Triangles skipped by the perimeter filter or as degenerate.
    pub skipped: usize,
    pub worst_margin: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Samples random triangles and checks `|ps| ≥ |p̃s̃|` at `n_samples`
/// equally spaced points of `[qr]`, including both endpoints.
pub fn verify_theorem_b_sampling<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    n_triangles: usize,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SamplingReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[S::Point; 3]> = (0..n_triangles)
        .map(|_| [space.sample_point(&mut rng), space.sample_point(&mut rng), space.sample_point(&mut rng)])
        .collect();
    let n = n_samples.max(2);
    let results: Vec<Option<f64>> = triples
        .par_iter()
        .map(|[p, q, r]| -> Result<Option<f64>> {
            let t = SpaceTriangle::new(space, *p, *q, *r)?;
            let [a, b, _] = t.sides();
            if a < 1e-9 || b < 1e-9 || (k.value() > 0.0 && t.perimeter() >= k.perimeter_bound()) {
                return Ok(None);
            }
            let cmp = t.comparison_angle(k)?;
            let mut worst = f64::INFINITY;
            for i in 0..n {
                let x = b * i as f64 / (n - 1) as f64;
                worst = worst.min(t.margin(space, k, cmp, x)?);
            }
            Ok(Some(worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let margins: Vec<f64> = results.into_iter().flatten().collect();
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = margins.iter().filter(|&&m| m < -tol).count();
    Ok(SamplingReport {
        triangles: n_triangles,
        samples_per_triangle: n,
        skipped,
        worst_margin,
        violations,
        pass: violations == 0,
    })
}
