//! The triangle-refinement engine: from a triangle violating the comparison
//! `|ps| ≥ |p̃s̃|`, find a vertex with an angle defect, then shrink the
//! triangle step by step while keeping a defect.
//!
//! Each step either keeps the cosine defect `cos∠ − cos∠̃` from decreasing
//! ([`Branch::DefectGrowth`]) or cuts the perimeter by at least half the
//! minimal side, with perimeter below 4.5 minimal sides whenever the
//! minimal side shrinks ([`Branch::PerimeterDrop`]).

use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::angles::space_angle;
use super::space::{geodesic, AlexandrovSpace, Segment};
use crate::error::{invalid, GeomError, Result};
use crate::model_space::{angle_from_sss, side_from_sas, Curvature};

/// An angle defect is certified when `cos∠ − cos∠̃` exceeds this.
pub const DEFECT_CERT: f64 = 1e-7;
/// Perimeters must drop by more than this.
pub const PERI_DECREASE: f64 = 1e-10;
/// Allowed loss of cosine defect on a defect-growth step.
pub const DEFECT_SLACK: f64 = 1e-9;

const SCAN: usize = 400;

/// A triangle `pqr` with chosen sides; the angle of interest is at `q`.
#[derive(Debug, Clone)]
pub struct SpaceTriangle<P, G> {
    pub p: P,
    pub q: P,
    pub r: P,
    /// `[qp]`, leaving `q`.
    pub qp: Segment<G>,
    /// `[qr]`, leaving `q`.
    pub qr: Segment<G>,
    /// `[pr]`, leaving `p`.
    pub pr: Segment<G>,
}

impl<P: Copy, G: Clone> SpaceTriangle<P, G> {
    pub fn new<S: AlexandrovSpace<Point = P, Path = G>>(space: &S, p: P, q: P, r: P) -> Result<Self> {
        Ok(SpaceTriangle {
            p,
            q,
            r,
            qp: geodesic(space, &q, &p)?,
            qr: geodesic(space, &q, &r)?,
            pr: geodesic(space, &p, &r)?,
        })
    }

    /// `[|qp|, |qr|, |pr|]`.
    pub fn sides(&self) -> [f64; 3] {
        [self.qp.length(), self.qr.length(), self.pr.length()]
    }

    pub fn perimeter(&self) -> f64 {
        self.sides().iter().sum()
    }

    pub fn min_side(&self) -> f64 {
        self.sides().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Relabels `p ↔ r`, keeping `q`.
    pub fn swapped(&self) -> Self {
        SpaceTriangle {
            p: self.r,
            q: self.q,
            r: self.p,
            qp: self.qr.clone(),
            qr: self.qp.clone(),
            pr: self.pr.reversed(),
        }
    }

    pub fn comparison_angle(&self, k: Curvature) -> Result<f64> {
        let [a, b, c] = self.sides();
        angle_from_sss(k, a, b, c)
    }

    pub fn angle<S: AlexandrovSpace<Point = P, Path = G>>(&self, space: &S) -> Result<f64> {
        space_angle(space, &self.qp, &self.qr)
    }

    /// `|ps| − |p̃s̃|` for `s` at distance `x` from `q` along `[qr]`.
    pub fn margin<S: AlexandrovSpace<Point = P, Path = G>>(&self, space: &S, k: Curvature, cmp: f64, x: f64) -> Result<f64> {
        let s = self.qr.point_at(space, x);
        let model = side_from_sas(k, self.qp.length(), x, cmp)?;
        Ok(space.distance(&self.p, &s)? - model)
    }
}

/// Angles at `q` of a triangle and its comparison triangle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Defect {
    pub angle: f64,
    pub comparison: f64,
    pub cos_defect: f64,
}

impl Defect {
    pub fn certified(&self) -> bool {
        self.cos_defect > DEFECT_CERT
    }
}

fn defect_of<S: AlexandrovSpace>(space: &S, k: Curvature, t: &SpaceTriangle<S::Point, S::Path>, angle: Option<f64>) -> Result<Defect> {
    let angle = match angle {
        Some(a) => a,
        None => t.angle(space)?,
    };
    let comparison = t.comparison_angle(k)?;
    Ok(Defect { angle, comparison, cos_defect: angle.cos() - comparison.cos() })
}

fn check_perimeter(k: Curvature, peri: f64) -> Result<()> {
    if k.value() > 0.0 && peri >= k.perimeter_bound() {
        return Err(invalid(format!("perimeter {peri} is not below 2π/√k")));
    }
    Ok(())
}

/// Outcome of the search for a point of maximal comparison violation.
#[derive(Debug, Clone)]
pub struct BadPoint<P, G> {
    pub r_prime: P,
    /// `|q r′|`.
    pub at: f64,
    pub margin: f64,
    /// Defect of the angle `∠p r′ q`.
    pub toward_q: Defect,
    /// Defect of the angle `∠p r′ r`.
    pub toward_r: Defect,
    /// The defective triangle with its defect at `r′`, or `None` when neither
    /// defect is certified (inconclusive).
    pub seed: Option<SpaceTriangle<P, G>>,
}

/// Minimises `s ↦ |ps| − |p̃s̃|` over `[qr]` and, if it is below `−tol`,
/// evaluates the two angle defects at the minimiser.
pub fn step1_find_bad_point<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    tri: &SpaceTriangle<S::Point, S::Path>,
    tol: f64,
) -> Result<Option<BadPoint<S::Point, S::Path>>> {
    check_perimeter(k, tri.perimeter())?;
    let len = tri.qr.length();
    if len == 0.0 || tri.qp.length() == 0.0 {
        return Err(invalid("degenerate triangle"));
    }
    let cmp = tri.comparison_angle(k)?;
    let m = |x: f64| tri.margin(space, k, cmp, x);
    let xs: Vec<f64> = (0..=SCAN).map(|i| len * i as f64 / SCAN as f64).collect();
    let vals = xs.iter().map(|&x| m(x)).collect::<Result<Vec<_>>>()?;
    let (j, _) = vals.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    // golden-section refinement on the bracketing cell pair
    let (mut a, mut b) = (xs[j.saturating_sub(1)], xs[(j + 1).min(SCAN)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (m(c)?, m(d)?);
    while b - a > 1e-12 * len.max(1.0) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = m(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = m(d)?;
        }
    }
    let (mut x, mut margin) = if fc < fd { (c, fc) } else { (d, fd) };
    if vals[j] < margin {
        x = xs[j];
        margin = vals[j];
    }
    if margin >= -tol {
        return Ok(None);
    }
    let r_prime = tri.qr.point_at(space, x);
    let rp_p = geodesic(space, &r_prime, &tri.p)?;
    let to_q = SpaceTriangle {
        p: tri.p,
        q: r_prime,
        r: tri.q,
        qp: rp_p.clone(),
        qr: tri.qr.sub(0.0, x).reversed(),
        pr: tri.qp.reversed(),
    };
    let to_r = SpaceTriangle {
        p: tri.p,
        q: r_prime,
        r: tri.r,
        qp: rp_p,
        qr: tri.qr.sub(x, len),
        pr: tri.pr.clone(),
    };
    let toward_q = defect_of(space, k, &to_q, None)?;
    let toward_r = defect_of(space, k, &to_r, None)?;
    let seed = match (toward_q.certified(), toward_r.certified()) {
        (false, false) => None,
        (true, false) => Some(to_q),
        (false, true) => Some(to_r),
        (true, true) => Some(if toward_q.cos_defect >= toward_r.cos_defect { to_q } else { to_r }),
    };
    Ok(Some(BadPoint { r_prime, at: x, margin, toward_q, toward_r, seed }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Seed,
    /// The cosine defect does not decrease.
    DefectGrowth,
    /// The perimeter drops by half the minimal side, with the 4.5 bound.
    PerimeterDrop,
}

/// Which construction produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Cut at the first return of the margin to zero.
    FirstZero,
    /// `(p, q, s)`: the defect stays at `q`.
    KeepVertex,
    /// `(p, s, q)`: the defect moves to `s` facing `q`.
    TurnAtS,
    /// `(p, s, r)`: the defect moves to `s` facing `r`.
    FarSide,
}

#[derive(Debug, Clone)]
pub struct StepOutcome<P, G> {
    pub triangle: SpaceTriangle<P, G>,
    pub defect: Defect,
    pub branch: Branch,
    pub kind: StepKind,
    /// The minimal side was adjacent to `q` (first construction) or opposite.
    pub minimal_adjacent: bool,
    /// The designated candidate failed its predicate and a later one was used.
    pub fallback: bool,
}

/// Predicate of the recorded branch between consecutive steps.
pub fn branch_holds(branch: Branch, prev: (f64, f64, f64), next: (f64, f64, f64)) -> bool {
    let (peri1, min1, def1) = prev;
    let (peri2, min2, def2) = next;
    let common = peri2 < peri1 - PERI_DECREASE && def2 > 0.0;
    common
        && match branch {
            Branch::Seed => false,
            Branch::DefectGrowth => def2 >= def1 - DEFECT_SLACK,
            Branch::PerimeterDrop => peri2 < peri1 - 0.5 * min1 && (min2 >= min1 || peri2 < 4.5 * min1),
        }
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// One refinement step from a triangle with a certified defect at `q`.
pub fn step2_refine<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    t1: &SpaceTriangle<S::Point, S::Path>,
) -> Result<StepOutcome<S::Point, S::Path>> {
    let d1 = defect_of(space, k, t1, None)?;
    if !d1.certified() {
        return Err(GeomError::RefinementStall(format!(
            "angle defect not certified: angle {}, comparison {}, cos defect {:e}",
            d1.angle, d1.comparison, d1.cos_defect
        )));
    }
    let [a, b, c] = t1.sides();
    let minimal_adjacent = a.min(b) <= c;
    // orient so that |p1q1| ≤ |q1r1|
    let t = if a > b { t1.swapped() } else { t1.clone() };
    let [a, l, c] = t.sides();
    let (peri1, min1) = (t.perimeter(), t.min_side());
    let prev = (peri1, min1, d1.cos_defect);
    let cmp = d1.comparison;
    let m = |x: f64| t.margin(space, k, cmp, x);

    let mut tried: Vec<String> = Vec::new();
    let accept = |cand: SpaceTriangle<S::Point, S::Path>, angle: Option<f64>, branch: Branch, kind: StepKind, fallback: bool, tried: &mut Vec<String>| -> Result<Option<StepOutcome<S::Point, S::Path>>> {
        let d = defect_of(space, k, &cand, angle)?;
        let next = (cand.perimeter(), cand.min_side(), d.cos_defect);
        if d.certified() && branch_holds(branch, prev, next) {
            return Ok(Some(StepOutcome { triangle: cand, defect: d, branch, kind, minimal_adjacent, fallback }));
        }
        tried.push(format!(
            "{kind:?}/{branch:?}: peri {:.6e} min {:.6e} angle {:.12} cmp {:.12} cos defect {:e}",
            next.0, next.1, d.angle, d.comparison, d.cos_defect
        ));
        Ok(None)
    };

    // first return of the margin to zero along [q1 r1]
    let xs: Vec<f64> = (0..=SCAN).map(|i| l * i as f64 / SCAN as f64).collect();
    let mut prev_v = 0.0;
    for i in 1..SCAN {
        let v = m(xs[i])?;
        if v > 0.0 && prev_v < 0.0 {
            let x = bisect(m, xs[i - 1], xs[i], prev_v)?;
            let tp = t.qr.point_at(space, x);
            let cand = SpaceTriangle { p: t.p, q: t.q, r: tp, qp: t.qp.clone(), qr: t.qr.sub(0.0, x), pr: geodesic(space, &t.p, &tp)? };
            if let Some(o) = accept(cand, Some(d1.angle), Branch::DefectGrowth, StepKind::FirstZero, false, &mut tried)? {
                return Ok(o);
            }
            break;
        }
        prev_v = v;
    }

    // the dividing point s, given by its distance from q1
    let xs_dist = if minimal_adjacent {
        Some(l - 0.5 * a)
    } else {
        let x_a = l - c;
        let s = t.qr.point_at(space, x_a);
        let ps = space.distance(&t.p, &s)?;
        if ps >= c && ps < SQRT_2 * c {
            Some(x_a)
        } else {
            // |p1 s| = |p1 r1| with |s r1| > |p1 r1|
            let f = |x: f64| -> Result<f64> { Ok(space.distance(&t.p, &t.qr.point_at(space, x))? - c) };
            let n = SCAN;
            let mut found = None;
            let mut fprev = f(0.0)?;
            for i in 1..=n {
                let x = x_a * i as f64 / n as f64;
                let fx = f(x)?;
                if (fx <= 0.0) != (fprev <= 0.0) {
                    found = Some(bisect(f, x_a * (i - 1) as f64 / n as f64, x, fprev)?);
                    break;
                }
                fprev = fx;
            }
            found
        }
    };
    let Some(xs_dist) = xs_dist.filter(|x| *x > 0.0 && *x < l) else {
        return Err(GeomError::RefinementStall(format!(
            "no dividing point on [q1 r1]: sides ({a}, {l}, {c}), cos defect {:e}; tried {tried:?}",
            d1.cos_defect
        )));
    };
    let s = t.qr.point_at(space, xs_dist);
    let sp = geodesic(space, &s, &t.p)?;
    let keep = SpaceTriangle { p: t.p, q: t.q, r: s, qp: t.qp.clone(), qr: t.qr.sub(0.0, xs_dist), pr: sp.reversed() };
    let turn = SpaceTriangle { p: t.p, q: s, r: t.q, qp: sp.clone(), qr: t.qr.sub(0.0, xs_dist).reversed(), pr: t.qp.reversed() };
    let far = SpaceTriangle { p: t.p, q: s, r: t.r, qp: sp, qr: t.qr.sub(xs_dist, l), pr: t.pr.clone() };
    let keep_d = defect_of(space, k, &keep, Some(d1.angle))?;
    let turn_d = defect_of(space, k, &turn, None)?;
    let mut order: Vec<(SpaceTriangle<S::Point, S::Path>, Option<f64>, Branch, StepKind)> = vec![
        (keep, Some(d1.angle), Branch::PerimeterDrop, StepKind::KeepVertex),
        (turn, Some(turn_d.angle), Branch::PerimeterDrop, StepKind::TurnAtS),
        (far, None, Branch::DefectGrowth, StepKind::FarSide),
    ];
    let designated = if keep_d.cos_defect > 0.0 {
        0
    } else if turn_d.cos_defect > 0.0 {
        1
    } else {
        2
    };
    let first = order.remove(designated);
    order.insert(0, first);
    for (i, (cand, ang, branch, kind)) in order.into_iter().enumerate() {
        if let Some(o) = accept(cand, ang, branch, kind, i > 0, &mut tried)? {
            return Ok(o);
        }
    }
    Err(GeomError::RefinementStall(format!(
        "no candidate satisfies its predicate from peri {peri1:e}, min side {min1:e}, cos defect {:e}; tried {tried:?}",
        d1.cos_defect
    )))
}

/// Stopping rule of [`refine_loop`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RefineStop {
    pub max_iters: usize,
    /// Stop once the perimeter is below this (absolute) value.
    pub peri_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum TraceStatus {
    /// The perimeter reached the floor while keeping a certified defect.
    LocalContradictionReached,
    MaxIters,
    Stalled(String),
}

/// One triangle of a refinement trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep<P> {
    pub iter: usize,
    pub vertices: [P; 3],
    /// `[|qp|, |qr|, |pr|]`.
    pub sides: [f64; 3],
    pub angle: f64,
    pub comparison_angle: f64,
    pub cos_defect: f64,
    pub branch: Branch,
    pub kind: Option<StepKind>,
    pub fallback: bool,
    pub peri: f64,
    pub min_side: f64,
    /// Largest distance of this triangle's vertices from the seed's vertex set.
    pub d1j: f64,
    /// Distance of this triangle's vertices from the previous vertex set.
    pub step_displacement: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementTrace<P> {
    pub space: String,
    pub k: f64,
    pub steps: Vec<TraceStep<P>>,
    pub status: TraceStatus,
    /// Running minimum of `(peri drop) / (step displacement)`.
    pub min_ratio: Option<f64>,
}

impl<P: Serialize> RefinementTrace<P> {
    pub fn perimeters(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.peri).collect()
    }

    pub fn max_d1j(&self) -> f64 {
        self.steps.iter().map(|s| s.d1j).fold(0.0, f64::max)
    }

    /// Re-checks every recorded branch predicate from the stored numbers.
    pub fn verify(&self) -> Vec<bool> {
        self.steps
            .windows(2)
            .map(|w| {
                branch_holds(w[1].branch, (w[0].peri, w[0].min_side, w[0].cos_defect), (w[1].peri, w[1].min_side, w[1].cos_defect))
                    && w[1].cos_defect > DEFECT_CERT
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    /// `iter,peri,min_side,cos_defect` rows.
    pub fn peri_csv(&self) -> String {
        let mut out = String::from("iter,peri,min_side,cos_defect\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}\n", s.iter, s.peri, s.min_side, s.cos_defect));
        }
        out
    }

    /// `iter,cos_defect,angle,comparison_angle,branch` rows.
    pub fn defect_csv(&self) -> String {
        let mut out = String::from("iter,cos_defect,angle,comparison_angle,branch\n");
        for s in &self.steps {
            let b = serde_json::to_value(s.branch).unwrap();
            out.push_str(&format!("{},{},{},{},{}\n", s.iter, s.cos_defect, s.angle, s.comparison_angle, b.as_str().unwrap()));
        }
        out
    }
}

fn set_distance<S: AlexandrovSpace>(space: &S, from: &[S::Point; 3], to: &[S::Point; 3]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in from {
        let mut best = f64::INFINITY;
        for u in to {
            best = best.min(space.distance(v, u)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Iterates [`step2_refine`] from a seed with a certified defect at `q`.
pub fn refine_loop<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    seed: &SpaceTriangle<S::Point, S::Path>,
    stop: RefineStop,
) -> Result<RefinementTrace<S::Point>> {
    check_perimeter(k, seed.perimeter())?;
    let d0 = defect_of(space, k, seed, None)?;
    if !d0.certified() {
        return Err(invalid(format!("seed has no certified angle defect (cos defect {:e})", d0.cos_defect)));
    }
    let seed_vs = [seed.p, seed.q, seed.r];
    let record = |iter: usize, t: &SpaceTriangle<S::Point, S::Path>, d: &Defect, branch, kind, fallback, prev: Option<&[S::Point; 3]>| -> Result<TraceStep<S::Point>> {
        let vs = [t.p, t.q, t.r];
        Ok(TraceStep {
            iter,
            vertices: vs,
            sides: t.sides(),
            angle: d.angle,
            comparison_angle: d.comparison,
            cos_defect: d.cos_defect,
            branch,
            kind,
            fallback,
            peri: t.perimeter(),
            min_side: t.min_side(),
            d1j: set_distance(space, &vs, &seed_vs)?,
            step_displacement: match prev {
                Some(p) => set_distance(space, &vs, p)?,
                None => 0.0,
            },
        })
    };
    let mut steps = vec![record(0, seed, &d0, Branch::Seed, None, false, None)?];
    let mut cur = seed.clone();
    let mut min_ratio: Option<f64> = None;
    let status = loop {
        if cur.perimeter() < stop.peri_floor {
            break TraceStatus::LocalContradictionReached;
        }
        if steps.len() > stop.max_iters {
            break TraceStatus::MaxIters;
        }
        match step2_refine(space, k, &cur) {
            Ok(o) => {
                let prev_vs = [cur.p, cur.q, cur.r];
                let st = record(steps.len(), &o.triangle, &o.defect, o.branch, Some(o.kind), o.fallback, Some(&prev_vs))?;
                let drop = steps.last().unwrap().peri - st.peri;
                if st.step_displacement > 0.0 {
                    let r = drop / st.step_displacement;
                    min_ratio = Some(min_ratio.map_or(r, |m: f64| m.min(r)));
                }
                steps.push(st);
                cur = o.triangle;
            }
            Err(GeomError::RefinementStall(msg)) => break TraceStatus::Stalled(msg),
            Err(e) => return Err(e),
        }
    };
    Ok(RefinementTrace { space: space.name(), k: k.value(), steps, status, min_ratio })
}
