//! End-to-end acceptance checks. Each check prints one `PASS`/`FAIL` line
//! (written straight to stderr so it survives output capture) and the test
//! fails if any check fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use cmpgeom::alexandrov::*;
use cmpgeom::comparison::{cylinder_counterexample, verify_a2_endpoint, verify_schur, Tolerances, Verdict};
use cmpgeom::harness::{parse_config, plot_data, run_config, schur_arc_case, CaseStatus, Overrides};
use cmpgeom::model_space::*;
use cmpgeom::surface::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(checks: &[Check]) -> bool {
    let mut err = std::io::stderr().lock();
    for c in checks {
        let _ = writeln!(err, "acceptance {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.pass)
}

fn curv(v: f64) -> Curvature {
    Curvature::new(v).unwrap()
}

fn trig_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let n = 100_000;
    for i in 0..n {
        let k = curv([-1.0, 0.0, 1.0][i % 3]);
        let a = rng.gen_range(0.01..1.5);
        let b = rng.gen_range(0.01..1.5);
        let g = rng.gen_range(1e-3..PI - 1e-3);
        let c = side_from_sas(k, a, b, g).unwrap();
        worst = worst.max((angle_from_sss(k, a, b, c).unwrap() - g).abs());
    }
    let secs = t.elapsed().as_secs_f64();
    Check {
        name: "trig round trip",
        pass: worst <= 1e-9 && secs < 5.0,
        detail: format!("{n} instances, max error {worst:.2e}, {secs:.2} s"),
    }
}

fn model_hessian() -> Check {
    let hs = [1e-2, 5e-3, 2.5e-3];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut min_order = f64::INFINITY;
    let mut flat_residual: f64 = 0.0;
    for trial in 0..30 {
        let k = curv([-1.0, 0.0, 1.0][trial % 3]);
        let pole = ModelPoint::origin(k);
        let a = ModelPoint::from_polar(k, rng.gen_range(0.3..1.2), rng.gen_range(0.0..TAU)).unwrap();
        let u = turn_left(&a, reference_tangent(&a), rng.gen_range(0.0..TAU));
        let f = |t: f64| rho_k(k, dist_k(k, &pole, &exp_map(&a, u, t)).unwrap()).unwrap();
        let t0 = rng.gen_range(0.2..0.8);
        let res: Vec<f64> = hs
            .iter()
            .map(|&h| ((f(t0 + h) - 2.0 * f(t0) + f(t0 - h)) / (h * h) - (1.0 - k.value() * f(t0))).abs())
            .collect();
        if k.value() == 0.0 {
            // f is an exact quadratic in t: the residual is pure rounding
            flat_residual = flat_residual.max(res.iter().copied().fold(0.0, f64::max));
        } else {
            for w in res.windows(2) {
                min_order = min_order.min((w[0] / w[1]).log2());
            }
        }
    }
    Check {
        name: "model Hessian identity",
        pass: min_order >= 1.9 && flat_residual < 1e-8,
        detail: format!("observed order ≥ {min_order:.3} for k = ±1; flat residual {flat_residual:.1e}"),
    }
}

fn perimeter_bound() -> Check {
    let k = curv(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut accepted, mut worst) = (0, 0.0f64);
    let mut ok = true;
    while accepted < 1000 {
        let c = ModelPoint::from_polar(k, rng.gen_range(0.0..PI), rng.gen_range(0.0..TAU)).unwrap();
        let rho = rng.gen_range(0.05..FRAC_PI_2);
        let n = rng.gen_range(3..13);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let e = reference_tangent(&c);
        let poly: Vec<ModelPoint> = angles
            .iter()
            .map(|&a| exp_map(&c, turn_left(&c, e, a), rho * (1.0 - 0.2 * rng.gen::<f64>())))
            .collect();
        let Ok(r) = convex_polygon_perimeter_check(k, &poly) else { continue };
        accepted += 1;
        worst = worst.max(r.perimeter);
        ok &= r.bound_satisfied && r.perimeter <= TAU + 1e-9;
    }
    let lunes = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [-1.0, 0.0, 0.0]]
        .map(|p| ModelPoint::from_embedding(k, p).unwrap());
    let eq = convex_polygon_perimeter_check(k, &lunes).unwrap();
    Check {
        name: "convex perimeter bound",
        pass: ok && eq.equality_flag,
        detail: format!("1000 convex polygons, max perimeter {worst:.6}; two half great circles: equality {}", eq.equality_flag),
    }
}

fn chord(kappa: f64, len: f64) -> f64 {
    if kappa == 0.0 {
        len
    } else {
        2.0 / kappa * (0.5 * kappa * len).sin()
    }
}

fn schur_grid() -> Check {
    let tol = Tolerances::default();
    let (mut worst_margin, mut worst_oracle, mut worst_diag) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut verdicts_ok = true;
    for i in 0..20 {
        for j in 0..20 {
            let kt = 0.25 + 2.75 * i as f64 / 19.0;
            let len = (0.05 + 0.9 * j as f64 / 19.0) * TAU / kt;
            for f in [0.0, 0.5, 1.0] {
                let kappa = f * kt;
                let r = verify_schur(&schur_arc_case("arc", kappa, kt, len, tol).unwrap()).unwrap();
                let m = *r.margins.last().unwrap();
                worst_margin = worst_margin.min(m);
                worst_oracle = worst_oracle.max((m - (chord(kappa, len) - chord(kt, len))).abs());
                verdicts_ok &= r.verdict == Verdict::Pass;
                if f == 1.0 {
                    worst_diag = worst_diag.max(r.margins.iter().map(|x| x.abs()).fold(0.0, f64::max));
                    verdicts_ok &= r.notes.iter().any(|n| n.contains("rigidity"));
                }
            }
        }
    }
    Check {
        name: "Schur planar arcs",
        pass: worst_margin >= -1e-6 && worst_oracle <= 1e-9 && worst_diag <= 1e-9 && verdicts_ok,
        detail: format!(
            "20×20 grid × 3 ratios: min chord margin {worst_margin:.2e}, closed-form error {worst_oracle:.1e}, diagonal |margin| ≤ {worst_diag:.1e}"
        ),
    }
}

fn second_variation() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut run = |name: &str, chart: SurfaceChart, p: SurfacePoint, curve: SampledCurve, idx: &[usize]| {
        let (mut e1, mut e2) = (0.0f64, 0.0f64);
        for &i in idx {
            let r = second_variation_check(&chart, p, &curve, i).unwrap();
            e1 = e1.max((r.first_fd - r.first_formula).abs());
            e2 = e2.max((r.second_fd - r.second_formula).abs());
        }
        ok &= e1 <= 1e-6 && e2 <= 1e-4;
        lines.push(format!("{name} {e1:.1e}/{e2:.1e}"));
    };
    let sphere = SurfaceChart::sphere(1.0).unwrap();
    let th: f64 = 1.1;
    let rr = (0.5 * th).tan();
    let lat = SampledCurve::from_fn(&sphere, 1.0, 1000, |s| {
        let a = s / th.sin();
        (rr * a.cos(), rr * a.sin())
    })
    .unwrap();
    run("sphere latitude", sphere, sphere_point(0.5, 2.0), lat, &[200, 500, 800]);
    let plane = SurfaceChart::plane();
    let circle = SampledCurve::from_fn(&plane, 2.0, 1000, |s| (1.5 * (s / 1.5).cos(), 1.5 * (s / 1.5).sin())).unwrap();
    run("planar circle", plane, SurfacePoint::new(0.4, -0.3), circle, &[200, 500, 800]);
    let cat = SurfaceChart::by_name("catenoid", &[1.0]).unwrap();
    let t0: f64 = 0.6;
    let rho = (1.0 + t0 * t0).sqrt();
    let par = SampledCurve::from_fn(&cat, 1.0, 1000, move |s| (t0, s / rho)).unwrap();
    run("catenoid parallel", cat, SurfacePoint::new(-0.3, 0.4), par, &[200, 500, 800]);
    Check {
        name: "second variation",
        pass: ok,
        detail: format!("first/second variation errors: {}", lines.join(", ")),
    }
}

fn index_comparison() -> Check {
    let (f, s) = (SurfaceChart::plane(), SurfaceChart::sphere(1.0).unwrap());
    let geo = |c: &SurfaceChart, l: f64| {
        integrate_geodesic(c, SurfacePoint::new(0.0, 0.0), SurfaceVector::new(1.0, 0.0), l, 1e-3).unwrap()
    };
    let (mut worst, mut ok) = (0.0f64, true);
    for i in 1..=15 {
        let l = FRAC_PI_2 * i as f64 / 16.0;
        let r = index_comparison_check(&f, &geo(&f, l), &s, &geo(&s, l), l.sin()).unwrap();
        worst = worst.max((r.index_m - l.sin().powi(2) / l).abs()).max((r.index_n - l.sin() * l.cos()).abs());
        ok &= r.pass && r.index_m >= r.index_n;
    }
    Check {
        name: "index comparison",
        pass: ok && worst <= 1e-7,
        detail: format!("15 lengths in (0, π/2): max error against sin²ℓ/ℓ and sinℓ·cosℓ {worst:.1e}"),
    }
}

fn toponogov() -> Check {
    let cfg = parse_config(
        "[[suite]]\nname = \"toponogov\"\nid = \"sphere\"\nseed = 7\nchart = \"sphere\"\nside = \"sec_at_least_k\"\n\
         [[suite]]\nname = \"toponogov\"\nid = \"disc\"\nseed = 8\nchart = \"hyperbolic\"\nside = \"sec_at_most_k\"\n",
    )
    .unwrap();
    let b = run_config(&cfg, &Overrides::default(), Path::new(".")).unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for s in &b.suites {
        let mut worst = f64::INFINITY;
        for c in &s.cases {
            let m = c.report["worst_margin"].as_f64().unwrap();
            worst = worst.min(m);
            ok &= c.status == CaseStatus::Pass && m >= -1e-5 && c.report["margins"].as_array().unwrap().len() == 51;
        }
        ok &= s.cases.len() == 100;
        parts.push(format!("{}: {} triangles, worst margin {worst:.2e}", s.id, s.cases.len()));
    }
    Check { name: "Toponogov on sphere and disc", pass: ok, detail: parts.join("; ") }
}

fn counterexample() -> Check {
    let r = verify_a2_endpoint(&cylinder_counterexample().unwrap()).unwrap();
    let cfg = parse_config(
        "[[suite]]\nname = \"theoremA\"\nchart = \"cylinder\"\nside = \"sec_at_most_k\"\ncases = 2\ncounterexample = true\n",
    )
    .unwrap();
    let b = run_config(&cfg, &Overrides::default(), Path::new(".")).unwrap();
    let last = b.suites[0].cases.last().unwrap();
    let pass = !r.raw_inequality_holds
        && r.verdict == Verdict::HypothesisViolated
        && r.failed_hypotheses() == vec!["cut_locus_avoidance"]
        && last.status == CaseStatus::HypothesisViolated
        && b.exit_code() == 0;
    Check {
        name: "cylinder counterexample",
        pass,
        detail: format!(
            "worst margin {:.3}, verdict {:?}, failed {:?}, exit status {}",
            r.worst_margin,
            r.verdict,
            r.failed_hypotheses(),
            b.exit_code()
        ),
    }
}

fn theorem_b_sampling() -> Check {
    let cone = ConeSpace::new(1.5 * PI).unwrap();
    let a = verify_theorem_b_sampling(&cone, Curvature::FLAT, 200, 50, 9, 1e-6).unwrap();
    let sq = DoubledPolygon::unit_square();
    let b = verify_theorem_b_sampling(&sq, Curvature::FLAT, 200, 50, 10, 1e-6).unwrap();
    Check {
        name: "comparison sampling on cone and doubled square",
        pass: a.violations == 0 && b.violations == 0 && a.pass && b.pass,
        detail: format!(
            "cone 3π/2: {} violations (worst {:.1e}); doubled square: {} violations (worst {:.1e})",
            a.violations, a.worst_margin, b.violations, b.worst_margin
        ),
    }
}

fn refinement() -> Check {
    let c = ConeSpace::new(2.5 * PI).unwrap();
    let th = c.theta();
    let [p, q, r] = [0.0, th / 3.0, 2.0 * th / 3.0].map(|phi| c.point(1.0, phi).unwrap());
    let t = SpaceTriangle::new(&c, p, q, r).unwrap();
    let Some(bad) = step1_find_bad_point(&c, Curvature::FLAT, &t, 1e-9).unwrap() else {
        return Check { name: "triangle refinement", pass: false, detail: "no violating point found".into() };
    };
    let seed = bad.seed.unwrap();
    let p0 = seed.perimeter();
    let tr = refine_loop(&c, Curvature::FLAT, &seed, RefineStop { max_iters: 200, peri_floor: 1e-3 * p0 }).unwrap();
    let peri = tr.perimeters();
    let decreasing = peri.windows(2).all(|w| w[1] < w[0]);
    let reached = *peri.last().unwrap() < 1e-3 * p0 && tr.steps.len() <= 201;
    let verified = tr.verify().iter().all(|&b| b);
    let bounded = tr.max_d1j() <= 10.0 * p0;
    let fallbacks = tr.steps.iter().filter(|s| s.fallback).count();
    Check {
        name: "triangle refinement",
        pass: decreasing && reached && verified && bounded && tr.status == TraceStatus::LocalContradictionReached,
        detail: format!(
            "margin {:.3e}; {} steps ({fallbacks} fallback), perimeter {:.3e} → {:.3e}, branches re-verified {verified}, max d1j {:.3} ≤ {:.3}",
            bad.margin,
            tr.steps.len() - 1,
            p0,
            peri.last().unwrap(),
            tr.max_d1j(),
            10.0 * p0
        ),
    }
}

/// Angle at `b` of the triangle with sides `ab`, `bc` and opposite side `ac`,
/// by the law of cosines.
fn law_of_cosines(k: f64, ab: f64, bc: f64, ac: f64) -> f64 {
    let c = if k > 0.0 {
        (ac.cos() - ab.cos() * bc.cos()) / (ab.sin() * bc.sin())
    } else if k < 0.0 {
        (ab.cosh() * bc.cosh() - ac.cosh()) / (ab.sinh() * bc.sinh())
    } else {
        (ab * ab + bc * bc - ac * ac) / (2.0 * ab * bc)
    };
    c.clamp(-1.0, 1.0).acos()
}

fn alexandrov_lemma_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut worst, mut fails, mut count) = (0.0f64, 0, 0);
    for kv in [-1.0, 0.0, 1.0] {
        let k = curv(kv);
        let mut done = 0;
        while done < 1000 {
            let q = ModelPoint::origin(k);
            let (pq, qr, qs) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
            let (alpha, beta) = (rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.05..PI - 0.05));
            let p = ModelPoint::from_polar(k, pq, 0.0).unwrap();
            let r = ModelPoint::from_polar(k, qr, alpha).unwrap();
            let s = ModelPoint::from_polar(k, qs, -beta).unwrap();
            let d = |a: &ModelPoint, b: &ModelPoint| dist_k(k, a, b).unwrap();
            let sides = AlexandrovSides { pq, pr: d(&p, &r), ps: d(&p, &s), qr, qs };
            let bc = qr + qs;
            if kv > 0.0 && sides.pr + sides.ps + bc >= TAU - 1e-3 {
                continue;
            }
            // skip nearly degenerate comparison triangles, where acos is ill conditioned
            let tri = [sides.pr, sides.ps, bc];
            if tri[0] + tri[1] - tri[2] < 1e-3 || tri[0] + tri[2] - tri[1] < 1e-3 || tri[1] + tri[2] - tri[0] < 1e-3 {
                continue;
            }
            let Ok(rep) = alexandrov_lemma(k, sides, 1e-9) else { continue };
            done += 1;
            count += 1;
            let angle = |at: &ModelPoint, a: &ModelPoint, b: &ModelPoint| {
                signed_turn(at, tangent_toward(at, a).unwrap(), tangent_toward(at, b).unwrap()).abs()
            };
            let (prq, psq) = (angle(&r, &p, &q), angle(&s, &p, &q));
            let (abc, acb) = (law_of_cosines(kv, sides.pr, bc, sides.ps), law_of_cosines(kv, sides.ps, bc, sides.pr));
            let sum = alpha + beta;
            worst = worst
                .max((rep.angle_sum_at_q - sum).abs())
                .max((rep.angle_prq - prq).abs())
                .max((rep.angle_psq - psq).abs())
                .max((rep.comparison_angles.0 - abc).abs())
                .max((rep.comparison_angles.1 - acb).abs());
            let (dr, ds) = (prq - abc, psq - acb);
            let gap = 1e-6;
            let forward = if sum < PI - gap {
                dr >= -1e-9 && ds >= -1e-9
            } else if sum > PI + gap {
                dr <= 1e-9 && ds <= 1e-9
            } else {
                true
            };
            let backward = (!(dr > gap && ds > gap) || sum <= PI + 1e-9) && (!(dr < -gap && ds < -gap) || sum >= PI - 1e-9);
            if !(forward && backward && rep.verdict) {
                fails += 1;
            }
        }
    }
    Check {
        name: "Alexandrov lemma",
        pass: fails == 0 && worst <= 1e-9,
        detail: format!("{count} configurations over k ∈ {{-1, 0, 1}}: {fails} failures, max deviation from direct trigonometry {worst:.1e}"),
    }
}

fn determinism() -> Check {
    let text = "seed = 21\n\
        [[suite]]\nname = \"schur\"\ngrid = 4\n\
        [[suite]]\nname = \"toponogov\"\nchart = \"hyperbolic\"\ncases = 6\nsamples = 10\n\
        [[suite]]\nname = \"theoremA\"\nchart = \"sphere\"\ncases = 3\ncounterexample = true\n\
        [[suite]]\nname = \"develop\"\nk = 1.0\ncases = 5\n\
        [[suite]]\nname = \"alexandrov\"\nspace = \"cone:theta=4.71238898038469\"\ncases = 30\n\
        [[suite]]\nname = \"refine\"\nspace = \"cone:theta=7.853981633974483\"\n";
    let cfg = parse_config(text).unwrap();
    let run = || {
        let b = run_config(&cfg, &Overrides::default(), Path::new(".")).unwrap();
        let json = b.to_json();
        let plots = plot_data(&serde_json::from_str(&json).unwrap()).unwrap();
        (json, plots)
    };
    let (a, pa) = run();
    let (b, pb) = run();
    Check {
        name: "determinism",
        pass: a == b && pa == pb,
        detail: format!("six suites run twice: report.json {} bytes identical {}, CSVs identical {}", a.len(), a == b, pa == pb),
    }
}

#[test]
fn acceptance() {
    let checks = vec![
        trig_round_trip(),
        model_hessian(),
        perimeter_bound(),
        schur_grid(),
        second_variation(),
        index_comparison(),
        toponogov(),
        counterexample(),
        theorem_b_sampling(),
        refinement(),
        alexandrov_lemma_check(),
        determinism(),
    ];
    assert!(report(&checks), "some acceptance checks failed");
}
