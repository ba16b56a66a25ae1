use std::f64::consts::{PI, TAU};

use cmpgeom::alexandrov::*;
use cmpgeom::model_space::Curvature;
use proptest::prelude::*;

fn flat() -> Curvature {
    Curvature::FLAT
}

fn symmetric_triangle(c: &ConeSpace) -> SpaceTriangle<ConePoint, ConePath> {
    let th = c.theta();
    let p = c.point(1.0, 0.0).unwrap();
    let q = c.point(1.0, th / 3.0).unwrap();
    let r = c.point(1.0, 2.0 * th / 3.0).unwrap();
    SpaceTriangle::new(c, p, q, r).unwrap()
}

#[test]
fn refinement_on_wide_cone_shrinks_with_certified_defect() {
    let c = ConeSpace::new(2.5 * PI).unwrap();
    let t = symmetric_triangle(&c);
    let bad = step1_find_bad_point(&c, flat(), &t, 1e-9).unwrap().expect("wide cone violates the comparison");
    assert!(bad.margin < -1e-3);
    let seed = bad.seed.expect("a certified defect");
    let stop = RefineStop { max_iters: 200, peri_floor: 1e-3 * seed.perimeter() };
    let tr = refine_loop(&c, flat(), &seed, stop).unwrap();
    assert_eq!(tr.status, TraceStatus::LocalContradictionReached);
    let peri = tr.perimeters();
    assert!(peri.windows(2).all(|w| w[1] < w[0]));
    assert!(tr.verify().iter().all(|&b| b));
    assert!(tr.steps.iter().all(|s| s.cos_defect > DEFECT_CERT));
    // the CSV export matches the stored steps
    let csv = tr.peri_csv();
    assert_eq!(csv.lines().count(), tr.steps.len() + 1);
    assert!(csv.starts_with("iter,peri,min_side,cos_defect\n"));
}

#[test]
fn step1_finds_nothing_on_nonnegatively_curved_cones() {
    for theta in [PI, 1.5 * PI, 1.9 * PI, TAU] {
        let c = ConeSpace::new(theta).unwrap();
        assert!(c.nonnegatively_curved());
        let t = symmetric_triangle(&c);
        assert!(step1_find_bad_point(&c, flat(), &t, 1e-9).unwrap().is_none(), "theta = {theta}");
    }
}

#[test]
fn sampling_finds_no_violation_on_curvature_nonnegative_spaces() {
    let cone = ConeSpace::new(1.5 * PI).unwrap();
    let r = verify_theorem_b_sampling(&cone, flat(), 200, 50, 1, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.violations, 0);
    let sq = DoubledPolygon::unit_square();
    let r = verify_theorem_b_sampling(&sq, flat(), 200, 50, 2, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    // negative model curvature is a weaker bound and also holds
    let r = verify_theorem_b_sampling(&sq, Curvature::new(-1.0).unwrap(), 50, 20, 3, 1e-6).unwrap();
    assert!(r.pass);
}

#[test]
fn sampling_detects_the_wide_cone() {
    let c = ConeSpace::new(2.5 * PI).unwrap();
    let r = verify_theorem_b_sampling(&c, flat(), 200, 50, 4, 1e-6).unwrap();
    assert!(!r.pass && r.violations > 0, "{r:?}");
}

fn square_point() -> impl Strategy<Value = (bool, f64, f64)> {
    (any::<bool>(), 0.0..=1.0f64, 0.0..=1.0f64)
}

fn dpoint(sq: &DoubledPolygon, (top, x, y): (bool, f64, f64)) -> DPolyPoint {
    sq.point(if top { Sheet::Top } else { Sheet::Bottom }, x, y).unwrap()
}

fn cone_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0..2.0f64, 0.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubled_square_distance_is_a_metric(a in square_point(), b in square_point(), c in square_point()) {
        let sq = DoubledPolygon::unit_square();
        let (a, b, c) = (dpoint(&sq, a), dpoint(&sq, b), dpoint(&sq, c));
        let ab = sq.distance(&a, &b).unwrap();
        prop_assert!((ab - sq.distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= sq.distance(&a, &c).unwrap() + sq.distance(&c, &b).unwrap() + 1e-12);
        // never shorter than the planar projection, never longer than a detour
        // through the boundary
        let planar = (a.x - b.x).hypot(a.y - b.y);
        prop_assert!(ab >= planar - 1e-12);
        if a.sheet == b.sheet {
            prop_assert!((ab - planar).abs() < 1e-12);
        }
        let detour = [(a.x, 0.0), (a.x, 1.0), (0.0, a.y), (1.0, a.y)]
            .iter()
            .map(|&(x, y)| (a.x - x).hypot(a.y - y) + (x - b.x).hypot(y - b.y))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(ab <= detour + 1e-12);
    }

    #[test]
    fn geodesic_points_split_the_distance(a in square_point(), b in square_point(), t in 0.0..=1.0f64) {
        let sq = DoubledPolygon::unit_square();
        let (a, b) = (dpoint(&sq, a), dpoint(&sq, b));
        let seg = geodesic(&sq, &a, &b).unwrap();
        let d = seg.length();
        let m = seg.point_at(&sq, t * d);
        prop_assert!((sq.distance(&a, &m).unwrap() - t * d).abs() < 1e-9);
        prop_assert!((sq.distance(&m, &b).unwrap() - (1.0 - t) * d).abs() < 1e-9);
    }

    #[test]
    fn cone_distance_is_a_metric(theta in 0.5..3.0 * PI, a in cone_point(), b in cone_point(), c in cone_point()) {
        let cone = ConeSpace::new(theta).unwrap();
        let pt = |(r, f): (f64, f64)| cone.point(r, f * theta).unwrap();
        let (a, b, c) = (pt(a), pt(b), pt(c));
        let ab = cone.distance(&a, &b).unwrap();
        prop_assert!((ab - cone.distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= cone.distance(&a, &c).unwrap() + cone.distance(&c, &b).unwrap() + 1e-12);
        // through the apex is always admissible, and |r_a − r_b| is a lower bound
        prop_assert!(ab <= a.r + b.r + 1e-12);
        prop_assert!(ab >= (a.r - b.r).abs() - 1e-12);
    }

    #[test]
    fn comparison_holds_on_nonnegative_cones(theta in 0.5..TAU, a in cone_point(), b in cone_point(), c in cone_point()) {
        let cone = ConeSpace::new(theta).unwrap();
        let pt = |(r, f): (f64, f64)| cone.point(0.1 + r, f * theta).unwrap();
        let Ok(t) = SpaceTriangle::new(&cone, pt(a), pt(b), pt(c)) else { return Ok(()) };
        prop_assume!(t.min_side() > 1e-3);
        prop_assert!(step1_find_bad_point(&cone, flat(), &t, 1e-7).unwrap().is_none());
    }
}
