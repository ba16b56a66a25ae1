//! Declarative experiment suites for the `cmpgeom` binary.
//!
//! A config file lists `[[suite]]` tables; each names one of the suite kinds
//! `schur`, `toponogov`, `theoremA`, `develop`, `alexandrov` or `refine`.
//! Cases are generated from one seeded generator per suite, evaluated in
//! parallel and collected in case-id order, so a fixed config and seed give
//! byte-identical `report.json`, `margin.csv`, `peri.csv` and `defect.csv`.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::alexandrov::{
    refine_loop, step1_find_bad_point, verify_theorem_b_sampling, AlexandrovSpace, ConeSpace, PolyhedralSpace,
    RefineStop, SpaceTriangle,
};
use crate::comparison::{
    cylinder_counterexample, geodesic_hinge_case, geodesic_triangle_case, planar_arc_model, verify_a2_angle,
    verify_a2_endpoint, verify_schur, verify_toponogov_riemannian, ComparisonCase, Side, Subject, Tolerances,
    Verdict, VerdictReport,
};
use crate::development::{develop, is_convex_development, support_inequality_check, DistanceProfile};
use crate::error::GeomError;
use crate::model_space::{dist_k, exp_map, reference_tangent, turn_left, Curvature, ModelPoint};
use crate::surface::{hyperbolic_point, sphere_distance, sphere_point, SurfaceChart, SurfacePoint};

/// Version of the `report.json` layout.
pub const SCHEMA: u32 = 1;

pub const SUITE_KINDS: [&str; 6] = ["schur", "toponogov", "theoremA", "develop", "alexandrov", "refine"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver failure in case {case}: {source}")]
    Solver { case: String, source: GeomError },
    #[error("bundle error: {0}")]
    Bundle(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Bundle(_) | HarnessError::Io(_) => 2,
            HarnessError::Solver { .. } => 3,
        }
    }
}

fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn bundle(msg: impl Into<String>) -> HarnessError {
    HarnessError::Bundle(msg.into())
}

fn solver(case: &str) -> impl Fn(GeomError) -> HarnessError + '_ {
    move |source| HarnessError::Solver { case: case.to_string(), source }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolConfig {
    pub distance: Option<f64>,
    pub angle: Option<f64>,
}

/// Top-level experiment file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Default seed for suites that set none.
    pub seed: Option<u64>,
    /// Output directory, relative to the working directory.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: TolConfig,
    #[serde(default)]
    pub suite: Vec<SuiteConfig>,
}

/// One `[[suite]]` table. Which keys are meaningful depends on `name`;
/// keys that a suite does not use are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    pub id: Option<String>,
    pub seed: Option<u64>,
    pub chart: Option<String>,
    pub params: Option<Vec<f64>>,
    pub space: Option<String>,
    pub k: Option<f64>,
    pub side: Option<Side>,
    pub cases: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub profile: Option<PathBuf>,
    pub counterexample: Option<bool>,
    pub max_iters: Option<usize>,
    pub peri_ratio: Option<f64>,
    pub tolerances: Option<TolConfig>,
}

impl SuiteConfig {
    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut add = |name: &'static str, set: bool| {
            if set {
                v.push(name)
            }
        };
        add("chart", self.chart.is_some());
        add("params", self.params.is_some());
        add("space", self.space.is_some());
        add("k", self.k.is_some());
        add("side", self.side.is_some());
        add("cases", self.cases.is_some());
        add("samples", self.samples.is_some());
        add("grid", self.grid.is_some());
        add("profile", self.profile.is_some());
        add("counterexample", self.counterexample.is_some());
        add("max_iters", self.max_iters.is_some());
        add("peri_ratio", self.peri_ratio.is_some());
        v
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self.name.as_str() {
            "schur" => &["grid"],
            "toponogov" => &["chart", "params", "k", "side", "cases", "samples"],
            "theoremA" => &["chart", "params", "k", "side", "cases", "counterexample"],
            "develop" => &["k", "cases", "samples", "profile"],
            "alexandrov" => &["space", "k", "cases", "samples"],
            "refine" => &["space", "k", "cases", "max_iters", "peri_ratio"],
            _ => &[],
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol_distance: Option<f64>,
    pub tol_angle: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    TheoremViolated,
    HypothesisViolated,
    /// A reported phenomenon that asserts nothing, such as a refinement
    /// trace on a space outside the theorem's hypotheses.
    Finding,
}

impl From<Verdict> for CaseStatus {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => CaseStatus::Pass,
            Verdict::TheoremViolated => CaseStatus::TheoremViolated,
            Verdict::HypothesisViolated => CaseStatus::HypothesisViolated,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub status: CaseStatus,
    pub report: Value,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub pass: usize,
    pub theorem_violated: usize,
    pub hypothesis_violated: usize,
    pub finding: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub id: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// The suite table as resolved (defaults filled in).
    pub config: Value,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bundle {
    pub schema: u32,
    pub suites: Vec<SuiteResult>,
}

impl Bundle {
    /// `0` iff no hypothesis-passing case reports a theorem violation.
    pub fn exit_code(&self) -> i32 {
        let bad = self.suites.iter().flat_map(|s| &s.cases).any(|c| c.status == CaseStatus::TheoremViolated);
        i32::from(bad)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serialises");
        s.push('\n');
        s
    }
}

/// Parses a config file, reporting TOML errors with line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        HarnessError::Config(m) => config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn validate(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    if cfg.suite.is_empty() {
        return Err(config("no suite named: add at least one [[suite]] table with a `name`"));
    }
    let mut ids = Vec::new();
    for (i, s) in cfg.suite.iter().enumerate() {
        let at = format!("suite[{i}]");
        if !SUITE_KINDS.contains(&s.name.as_str()) {
            return Err(config(format!("{at}: no suite named `{}` (expected one of {})", s.name, SUITE_KINDS.join(", "))));
        }
        let allowed = s.allowed();
        for f in s.present() {
            if !allowed.contains(&f) {
                return Err(config(format!("{at}.{f}: not used by suite `{}`", s.name)));
            }
        }
        let id = s.id.clone().unwrap_or_else(|| s.name.clone());
        if ids.contains(&id) {
            return Err(config(format!("{at}.id: duplicate suite id `{id}`")));
        }
        ids.push(id);
        if matches!(s.name.as_str(), "alexandrov" | "refine") && s.space.is_none() {
            return Err(config(format!("{at}.space: required by suite `{}`", s.name)));
        }
        if s.name == "develop" && s.profile.is_some() && s.cases.is_some() {
            return Err(config(format!("{at}.cases: not used together with `profile`")));
        }
        for (f, v) in [("cases", s.cases), ("samples", s.samples), ("grid", s.grid), ("max_iters", s.max_iters)] {
            if v == Some(0) {
                return Err(config(format!("{at}.{f}: must be positive")));
            }
        }
        if s.grid == Some(1) {
            return Err(config(format!("{at}.grid: must be at least 2")));
        }
        if let Some(r) = s.peri_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(config(format!("{at}.peri_ratio: must lie in (0, 1), got {r}")));
            }
        }
        if let Some(k) = s.k {
            Curvature::new(k).map_err(|e| config(format!("{at}.k: {e}")))?;
        }
        for t in [s.tolerances, Some(cfg.tolerances)].into_iter().flatten() {
            for (f, v) in [("distance", t.distance), ("angle", t.angle)] {
                if let Some(v) = v {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(config(format!("{at}.tolerances.{f}: must be finite and non-negative")));
                    }
                }
            }
        }
    }
    Ok(())
}

struct Ctx<'a> {
    suite: &'a SuiteConfig,
    id: String,
    seed: u64,
    tol: Tolerances,
    base_dir: PathBuf,
}

impl Ctx<'_> {
    fn case_id(&self, i: usize) -> String {
        format!("{}-{i:03}", self.id)
    }

    fn k(&self) -> Result<Curvature, HarnessError> {
        Curvature::new(self.suite.k.unwrap_or(0.0)).map_err(|e| config(format!("{}.k: {e}", self.id)))
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn chart(&self) -> Result<(SurfaceChart, String), HarnessError> {
        let name = self.suite.chart.clone().unwrap_or_else(|| "sphere".into());
        let params = self.suite.params.clone().unwrap_or_default();
        let chart = SurfaceChart::by_name(&name, &params).map_err(|e| config(format!("{}.chart: {e}", self.id)))?;
        Ok((chart, name))
    }

    fn space(&self) -> Result<PolyhedralSpace, HarnessError> {
        let desc = self.suite.space.as_deref().unwrap_or_default();
        PolyhedralSpace::parse(desc).map_err(|e| config(format!("{}.space: {e}", self.id)))
    }
}

/// Runs every suite of `cfg` and returns the collected bundle.
pub fn run_config(cfg: &ExperimentConfig, ov: &Overrides, base_dir: &Path) -> Result<Bundle, HarnessError> {
    validate(cfg)?;
    for (f, v) in [("--tol-distance", ov.tol_distance), ("--tol-angle", ov.tol_angle)] {
        if let Some(v) = v {
            if !(v.is_finite() && v >= 0.0) {
                return Err(config(format!("{f}: must be finite and non-negative, got {v}")));
            }
        }
    }
    let mut suites = Vec::new();
    for s in &cfg.suite {
        let file_tol = s.tolerances.unwrap_or_default();
        let pick = |o: Option<f64>, a: Option<f64>, b: Option<f64>, d: f64| o.or(a).or(b).unwrap_or(d);
        let def = Tolerances::default();
        let tol = Tolerances {
            distance: pick(ov.tol_distance, file_tol.distance, cfg.tolerances.distance, def.distance),
            angle: pick(ov.tol_angle, file_tol.angle, cfg.tolerances.angle, def.angle),
        };
        let ctx = Ctx {
            suite: s,
            id: s.id.clone().unwrap_or_else(|| s.name.clone()),
            seed: ov.seed.or(s.seed).or(cfg.seed).unwrap_or(0),
            tol,
            base_dir: base_dir.to_path_buf(),
        };
        let (config_value, cases) = match s.name.as_str() {
            "schur" => run_schur(&ctx)?,
            "toponogov" => run_toponogov(&ctx)?,
            "theoremA" => run_theorem_a(&ctx)?,
            "develop" => run_develop(&ctx)?,
            "alexandrov" => run_alexandrov(&ctx)?,
            "refine" => run_refine(&ctx)?,
            other => return Err(config(format!("no suite named `{other}`"))),
        };
        let mut summary = Summary { cases: cases.len(), ..Summary::default() };
        for c in &cases {
            match c.status {
                CaseStatus::Pass => summary.pass += 1,
                CaseStatus::TheoremViolated => summary.theorem_violated += 1,
                CaseStatus::HypothesisViolated => summary.hypothesis_violated += 1,
                CaseStatus::Finding => summary.finding += 1,
            }
        }
        suites.push(SuiteResult {
            name: s.name.clone(),
            id: ctx.id.clone(),
            seed: ctx.seed,
            tolerances: tol,
            config: config_value,
            cases,
            summary,
        });
    }
    Ok(Bundle { schema: SCHEMA, suites })
}

fn verdict_case(r: VerdictReport) -> CaseResult {
    CaseResult { id: r.case_id.clone(), status: r.verdict.into(), report: serde_json::to_value(&r).expect("report") }
}

// schur: planar arcs against planar model arcs of larger curvature.
fn run_schur(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let n = ctx.suite.grid.unwrap_or(20);
    let mut rng = ctx.rng();
    let mut jobs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let kt = 0.25 + 2.75 * i as f64 / (n - 1) as f64;
            let len = (0.05 + 0.9 * j as f64 / (n - 1) as f64) * TAU / kt;
            let ratio: f64 = rng.gen();
            let kappa = if i == j { kt } else { kt * ratio };
            jobs.push((ctx.case_id(i * n + j), kappa, kt, len));
        }
    }
    let cases = jobs
        .par_iter()
        .map(|(id, kappa, kt, len)| -> Result<CaseResult, HarnessError> {
            let case = schur_arc_case(id, *kappa, *kt, *len, ctx.tol).map_err(solver(id))?;
            let r = verify_schur(&case).map_err(solver(id))?;
            Ok(verdict_case(r))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((json!({ "grid": n }), cases))
}

/// A planar arc of curvature `kappa` as a Euclidean polyline, against the
/// model arc of curvature `kt`, both of length `len`.
pub fn schur_arc_case(id: &str, kappa: f64, kt: f64, len: f64, tol: Tolerances) -> crate::Result<ComparisonCase> {
    let intervals = 100;
    let s: Vec<f64> = (0..=intervals).map(|i| len * i as f64 / intervals as f64).collect();
    let points = s
        .iter()
        .map(|&t| if kappa == 0.0 { [t, 0.0, 0.0] } else { [(kappa * t).sin() / kappa, (1.0 - (kappa * t).cos()) / kappa, 0.0] })
        .collect();
    let model = planar_arc_model(Curvature::FLAT, kt, len, intervals)?;
    Ok(ComparisonCase::new(id, Side::SecAtMostK, Curvature::FLAT, Subject::Flat { s, points }, model)?.with_tolerances(tol))
}

fn default_side(chart: &str) -> Side {
    match chart {
        "hyperbolic" | "catenoid" => Side::SecAtMostK,
        _ => Side::SecAtLeastK,
    }
}

fn chart_scale(chart: &str, params: &[f64]) -> f64 {
    match chart {
        "sphere" | "hyperbolic" => params.first().copied().unwrap_or(1.0),
        _ => 1.0,
    }
}

fn random_triangle(rng: &mut ChaCha8Rng, chart: &SurfaceChart, name: &str, scale: f64) -> [SurfacePoint; 3] {
    loop {
        let tri: [SurfacePoint; 3] = match name {
            // an open hemisphere is convex, so minimal geodesics stay inside
            // the stereographic chart
            "sphere" => std::array::from_fn(|_| {
                let c: f64 = rng.gen_range((1.5f64).cos()..1.0);
                sphere_point(c.acos(), rng.gen_range(0.0..TAU))
            }),
            "hyperbolic" => std::array::from_fn(|_| hyperbolic_point(rng.gen_range(0.0..1.5), rng.gen_range(0.0..TAU))),
            _ => std::array::from_fn(|_| SurfacePoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        };
        if !tri.iter().all(|p| chart.contains(p.u, p.v)) {
            continue;
        }
        let d = |a: SurfacePoint, b: SurfacePoint| {
            if name == "sphere" {
                sphere_distance(scale, a, b)
            } else {
                ((a.u - b.u).powi(2) + (a.v - b.v).powi(2)).sqrt()
            }
        };
        let sides = [d(tri[0], tri[1]), d(tri[1], tri[2]), d(tri[0], tri[2])];
        if sides.iter().any(|&x| x < 0.1 * scale) {
            continue;
        }
        if name == "sphere" && (sides.iter().sum::<f64>() > 0.9 * TAU * scale || sides.iter().any(|&x| x > (PI - 0.3) * scale)) {
            continue;
        }
        return tri;
    }
}

fn run_toponogov(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let (chart, name) = ctx.chart()?;
    let params = ctx.suite.params.clone().unwrap_or_default();
    let k = ctx.k()?;
    let side = ctx.suite.side.unwrap_or_else(|| default_side(&name));
    let n = ctx.suite.cases.unwrap_or(100);
    let samples = ctx.suite.samples.unwrap_or(50);
    let mut rng = ctx.rng();
    let scale = chart_scale(&name, &params);
    let tris: Vec<[SurfacePoint; 3]> = (0..n).map(|_| random_triangle(&mut rng, &chart, &name, scale)).collect();
    let cases = tris
        .par_iter()
        .enumerate()
        .map(|(i, tri)| -> Result<CaseResult, HarnessError> {
            let id = ctx.case_id(i);
            let r = verify_toponogov_riemannian(&chart, *tri, k, side, samples, &ctx.tol, &id).map_err(solver(&id))?;
            let mut c = verdict_case(r);
            c.report["vertices"] = json!(tri);
            Ok(c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = json!({ "chart": name, "params": params, "k": k.value(), "side": side, "cases": n, "samples": samples });
    Ok((cfg, cases))
}

fn run_theorem_a(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let (chart, name) = ctx.chart()?;
    let params = ctx.suite.params.clone().unwrap_or_default();
    let k = ctx.k()?;
    let side = ctx.suite.side.unwrap_or_else(|| default_side(&name));
    let n = ctx.suite.cases.unwrap_or(20);
    let with_counter = ctx.suite.counterexample.unwrap_or(false);
    let scale = chart_scale(&name, &params);
    let mut rng = ctx.rng();
    let draws: Vec<[f64; 4]> = (0..n)
        .map(|_| {
            [
                rng.gen_range(0.0..TAU),
                rng.gen_range(0.3..0.9) * scale,
                rng.gen_range(0.4..PI - 0.4),
                rng.gen_range(0.3..1.0) * scale,
            ]
        })
        .collect();
    let p = SurfacePoint::new(0.0, 0.0);
    let mut cases: Vec<CaseResult> = draws
        .par_iter()
        .enumerate()
        .map(|(i, &[bearing, d0, angle, len])| -> Result<Vec<CaseResult>, HarnessError> {
            let base = ctx.case_id(i);
            let ia = format!("{base}-angle");
            let ie = format!("{base}-endpoint");
            let hinge = geodesic_hinge_case(&ia, &chart, k, side, p, bearing, d0, angle, len)
                .map_err(solver(&ia))?
                .with_tolerances(ctx.tol);
            let tri = geodesic_triangle_case(&ie, &chart, k, side, p, bearing, d0, angle, len)
                .map_err(solver(&ie))?
                .with_tolerances(ctx.tol);
            Ok(vec![
                verdict_case(verify_a2_angle(&hinge).map_err(solver(&ia))?),
                verdict_case(verify_a2_endpoint(&tri).map_err(solver(&ie))?),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    if with_counter {
        let id = format!("{}-cylinder", ctx.id);
        let mut case = cylinder_counterexample().map_err(solver(&id))?.with_tolerances(ctx.tol);
        case.id = id.clone();
        cases.push(verdict_case(verify_a2_endpoint(&case).map_err(solver(&id))?));
    }
    let cfg = json!({
        "chart": name, "params": params, "k": k.value(), "side": side, "cases": n, "counterexample": with_counter,
    });
    Ok((cfg, cases))
}

fn develop_case(id: &str, profile: &DistanceProfile, asserted: bool) -> crate::Result<CaseResult> {
    let pole = ModelPoint::origin(profile.k);
    let dc = develop(profile, &pole)?;
    let conv = is_convex_development(&dc)?;
    let support = support_inequality_check(profile)?;
    let ok = conv.convex && support.pass;
    let status = match (ok, asserted) {
        (true, _) => CaseStatus::Pass,
        (false, true) => CaseStatus::TheoremViolated,
        (false, false) => CaseStatus::Finding,
    };
    let report = json!({
        "case_id": id,
        "length": profile.length(),
        "convexity": conv,
        "support": support,
        "s": profile.s,
        "d": profile.d,
    });
    Ok(CaseResult { id: id.into(), status, report })
}

// develop: distance profiles of model geodesics, which must develop convexly
// and satisfy the support inequality with equality; or one profile from CSV.
fn run_develop(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let k = ctx.k()?;
    let intervals = ctx.suite.samples.unwrap_or(200);
    if let Some(path) = &ctx.suite.profile {
        let full = ctx.base_dir.join(path);
        let text = fs::read_to_string(&full).map_err(|e| config(format!("{}.profile: {}: {e}", ctx.id, full.display())))?;
        let id = ctx.case_id(0);
        let profile = DistanceProfile::from_csv(k, &text).map_err(|e| config(format!("{}.profile: {e}", ctx.id)))?;
        let c = develop_case(&id, &profile, false).map_err(solver(&id))?;
        return Ok((json!({ "k": k.value(), "profile": path }), vec![c]));
    }
    let n = ctx.suite.cases.unwrap_or(50);
    let sc = k.scale();
    let mut rng = ctx.rng();
    let draws: Vec<[f64; 4]> = (0..n)
        .map(|_| [rng.gen_range(0.2..1.2) * sc, rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.3..1.5) * sc])
        .collect();
    let cases = draws
        .par_iter()
        .enumerate()
        .map(|(i, &[r0, phi, beta, len])| -> Result<CaseResult, HarnessError> {
            let id = ctx.case_id(i);
            let run = || -> crate::Result<CaseResult> {
                let pole = ModelPoint::origin(k);
                let a = ModelPoint::from_polar(k, r0, phi)?;
                let dir = turn_left(&a, reference_tangent(&a), beta);
                let profile = DistanceProfile::from_fn(k, len, intervals, |s| {
                    dist_k(k, &pole, &exp_map(&a, dir, s)).unwrap_or(f64::NAN)
                })?;
                develop_case(&id, &profile, true)
            };
            run().map_err(solver(&id))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((json!({ "k": k.value(), "cases": n, "samples": intervals }), cases))
}

fn curvature_hypothesis(space: &PolyhedralSpace, k: Curvature) -> (bool, String) {
    let nonneg = match space {
        PolyhedralSpace::Cone(c) => c.nonnegatively_curved(),
        PolyhedralSpace::Doubled(d) => d.nonnegatively_curved(),
    };
    let holds = nonneg && k.value() <= 0.0;
    (holds, format!("curvature ≥ 0: {nonneg}; k = {}", k.value()))
}

fn run_alexandrov(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let space = ctx.space()?;
    let k = ctx.k()?;
    let n = ctx.suite.cases.unwrap_or(200);
    let samples = ctx.suite.samples.unwrap_or(50);
    let id = ctx.case_id(0);
    let report = match &space {
        PolyhedralSpace::Cone(c) => verify_theorem_b_sampling(c, k, n, samples, ctx.seed, ctx.tol.distance),
        PolyhedralSpace::Doubled(d) => verify_theorem_b_sampling(d, k, n, samples, ctx.seed, ctx.tol.distance),
    }
    .map_err(solver(&id))?;
    let (holds, detail) = curvature_hypothesis(&space, k);
    let status = match (holds, report.pass) {
        (false, _) => CaseStatus::HypothesisViolated,
        (true, true) => CaseStatus::Pass,
        (true, false) => CaseStatus::TheoremViolated,
    };
    let value = json!({
        "case_id": id,
        "space": space.name(),
        "hypotheses": [{ "name": "curvature_bound", "pass": holds, "detail": detail }],
        "sampling": report,
    });
    let cfg = json!({ "space": space.name(), "k": k.value(), "cases": n, "samples": samples });
    Ok((cfg, vec![CaseResult { id, status, report: value }]))
}

fn refine_in<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    tries: Vec<[S::Point; 3]>,
    stop: (usize, f64),
    tol: f64,
) -> crate::Result<Value> {
    for (t, [p, q, r]) in tries.into_iter().enumerate() {
        let Ok(tri) = SpaceTriangle::new(space, p, q, r) else { continue };
        if tri.min_side() < 1e-6 || (k.value() > 0.0 && tri.perimeter() >= k.perimeter_bound()) {
            continue;
        }
        let Some(bad) = step1_find_bad_point(space, k, &tri, tol)? else { continue };
        let Some(seed) = bad.seed else { continue };
        let trace = refine_loop(space, k, &seed, RefineStop { max_iters: stop.0, peri_floor: stop.1 * seed.perimeter() })?;
        let peri = trace.perimeters();
        let decreasing = peri.windows(2).all(|w| w[1] < w[0]);
        let verified = trace.verify().iter().all(|&b| b);
        return Ok(json!({
            "triangle_try": t,
            "violating_triangle": [p, q, r],
            "bad_point": { "at": bad.at, "margin": bad.margin },
            "peri_strictly_decreasing": decreasing,
            "branches_verified": verified,
            "trace": trace,
        }));
    }
    Ok(Value::Null)
}

fn run_refine(ctx: &Ctx) -> Result<(Value, Vec<CaseResult>), HarnessError> {
    let space = ctx.space()?;
    let k = ctx.k()?;
    let tries = ctx.suite.cases.unwrap_or(200);
    let max_iters = ctx.suite.max_iters.unwrap_or(200);
    let ratio = ctx.suite.peri_ratio.unwrap_or(1e-3);
    let id = ctx.case_id(0);
    let mut rng = ctx.rng();
    let stop = (max_iters, ratio);
    let found = match &space {
        PolyhedralSpace::Cone(c) => {
            let mut ts = vec![symmetric_cone_triangle(c).map_err(solver(&id))?];
            ts.extend((0..tries).map(|_| [c.sample_point(&mut rng), c.sample_point(&mut rng), c.sample_point(&mut rng)]));
            refine_in(c, k, ts, stop, ctx.tol.distance)
        }
        PolyhedralSpace::Doubled(d) => {
            let ts = (0..tries).map(|_| [d.sample_point(&mut rng), d.sample_point(&mut rng), d.sample_point(&mut rng)]).collect();
            refine_in(d, k, ts, stop, ctx.tol.distance)
        }
    }
    .map_err(solver(&id))?;
    let (holds, detail) = curvature_hypothesis(&space, k);
    let status = match (found.is_null(), holds) {
        (true, _) => CaseStatus::Pass,
        (false, false) => CaseStatus::Finding,
        (false, true) => CaseStatus::TheoremViolated,
    };
    let value = json!({
        "case_id": id,
        "space": space.name(),
        "hypotheses": [{ "name": "curvature_bound", "pass": holds, "detail": detail }],
        "refinement": found,
    });
    let cfg = json!({ "space": space.name(), "k": k.value(), "cases": tries, "max_iters": max_iters, "peri_ratio": ratio });
    Ok((cfg, vec![CaseResult { id, status, report: value }]))
}

/// Three points at unit distance from the apex, evenly spread in angle.
fn symmetric_cone_triangle(c: &ConeSpace) -> crate::Result<[crate::alexandrov::ConePoint; 3]> {
    let th = c.theta();
    Ok([c.point(1.0, 0.0)?, c.point(1.0, th / 3.0)?, c.point(1.0, 2.0 * th / 3.0)?])
}

/// The three plot files derived from a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotData {
    /// `s,margin` rows of every verdict case, in bundle order.
    pub margin: String,
    /// `iter,peri,min_side,cos_defect` rows of every refinement trace.
    pub peri: String,
    /// `iter,cos_defect,angle,comparison_angle,branch` rows.
    pub defect: String,
}

fn num(v: &Value, what: &str) -> Result<f64, HarnessError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bundle(format!("malformed bundle: `{what}` is not a number"))),
        Value::Null => Ok(f64::NAN),
        _ => Err(bundle(format!("malformed bundle: `{what}` is not a number"))),
    }
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, HarnessError> {
    v.as_array().ok_or_else(|| bundle(format!("malformed bundle: `{what}` is not an array")))
}

/// Extracts the plot CSVs from a parsed `report.json`.
pub fn plot_data(doc: &Value) -> Result<PlotData, HarnessError> {
    match doc.get("schema").and_then(Value::as_u64) {
        Some(1) => {}
        Some(v) => return Err(bundle(format!("unsupported bundle schema {v}"))),
        None => return Err(bundle("malformed bundle: missing `schema`")),
    }
    let mut margin = String::from("s,margin\n");
    let mut peri = String::from("iter,peri,min_side,cos_defect\n");
    let mut defect = String::from("iter,cos_defect,angle,comparison_angle,branch\n");
    let suites = arr(doc.get("suites").unwrap_or(&Value::Null), "suites")?;
    for suite in suites {
        for case in arr(suite.get("cases").unwrap_or(&Value::Null), "cases")? {
            let report = case.get("report").ok_or_else(|| bundle("malformed bundle: case without `report`"))?;
            if let (Some(s), Some(m)) = (report.get("s"), report.get("margins")) {
                for (s, m) in arr(s, "s")?.iter().zip(arr(m, "margins")?) {
                    margin.push_str(&format!("{},{}\n", num(s, "s")?, num(m, "margin")?));
                }
            }
            let Some(trace) = report.get("refinement").and_then(|r| r.get("trace")) else { continue };
            for st in arr(trace.get("steps").unwrap_or(&Value::Null), "steps")? {
                let f = |key: &str| num(st.get(key).unwrap_or(&Value::Null), key);
                let iter = st.get("iter").and_then(Value::as_u64).ok_or_else(|| bundle("malformed bundle: step `iter`"))?;
                peri.push_str(&format!("{iter},{},{},{}\n", f("peri")?, f("min_side")?, f("cos_defect")?));
                let branch = st.get("branch").and_then(Value::as_str).unwrap_or("");
                defect.push_str(&format!("{iter},{},{},{},{branch}\n", f("cos_defect")?, f("angle")?, f("comparison_angle")?));
            }
        }
    }
    Ok(PlotData { margin, peri, defect })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), HarnessError> {
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", p.display())))
}

/// Writes `margin.csv`, `peri.csv` and `defect.csv` into `out`.
pub fn emit_plot_data(doc: &Value, out: &Path) -> Result<PlotData, HarnessError> {
    let data = plot_data(doc)?;
    fs::create_dir_all(out).map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", out.display())))?;
    write(out, "margin.csv", &data.margin)?;
    write(out, "peri.csv", &data.peri)?;
    write(out, "defect.csv", &data.defect)?;
    Ok(data)
}

/// Reads a bundle file and emits its plot data.
pub fn plot_bundle(path: &Path, out: &Path) -> Result<PlotData, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| bundle(format!("cannot read bundle {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| bundle(format!("malformed bundle {}: {e}", path.display())))?;
    emit_plot_data(&v, out)
}

/// Runs a config file, writing `report.json` and the plot CSVs into the
/// output directory. Returns the bundle and the output directory used.
pub fn run_file(path: &Path, ov: &Overrides) -> Result<(Bundle, PathBuf), HarnessError> {
    let cfg = load_config(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let out = ov.out.clone().or_else(|| cfg.out.as_ref().map(|o| base.join(o))).unwrap_or_else(|| PathBuf::from("cmpgeom-out"));
    let bundle = run_config(&cfg, ov, &base)?;
    fs::create_dir_all(&out).map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", out.display())))?;
    let text = bundle.to_json();
    write(&out, "report.json", &text)?;
    let v: Value = serde_json::from_str(&text).expect("bundle round-trips");
    emit_plot_data(&v, &out)?;
    Ok((bundle, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys_with_location() {
        let e = parse_config("[[suite]]\nname = \"schur\"\ncolour = 3\n").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("colour") && m.contains("line 3"), "{m}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_empty_and_unknown_suites() {
        let e = parse_config("seed = 1\n").unwrap_err();
        assert!(e.to_string().contains("no suite named"));
        let e = parse_config("[[suite]]\nname = \"bogus\"\n").unwrap_err();
        assert!(e.to_string().contains("no suite named `bogus`"));
        let e = parse_config("[[suite]]\nname = \"schur\"\nspace = \"cone:theta=1\"\n").unwrap_err();
        assert!(e.to_string().contains("suite[0].space"));
        let e = parse_config("[[suite]]\nname = \"refine\"\n").unwrap_err();
        assert!(e.to_string().contains("required"));
    }

    #[test]
    fn empty_bundle_gives_header_only_csvs() {
        let d = plot_data(&json!({ "schema": 1, "suites": [] })).unwrap();
        assert_eq!(d.margin, "s,margin\n");
        assert_eq!(d.peri, "iter,peri,min_side,cos_defect\n");
        assert_eq!(d.defect, "iter,cos_defect,angle,comparison_angle,branch\n");
        assert!(plot_data(&json!({ "suites": [] })).is_err());
        assert!(plot_data(&json!({ "schema": 2, "suites": [] })).is_err());
    }

    #[test]
    fn exit_code_counts_only_theorem_violations() {
        let case = |status| CaseResult { id: "c".into(), status, report: Value::Null };
        let suite = |cases| SuiteResult {
            name: "schur".into(),
            id: "schur".into(),
            seed: 0,
            tolerances: Tolerances::default(),
            config: Value::Null,
            cases,
            summary: Summary::default(),
        };
        let ok = Bundle {
            schema: SCHEMA,
            suites: vec![suite(vec![case(CaseStatus::Pass), case(CaseStatus::HypothesisViolated), case(CaseStatus::Finding)])],
        };
        assert_eq!(ok.exit_code(), 0);
        let bad = Bundle { schema: SCHEMA, suites: vec![suite(vec![case(CaseStatus::Pass), case(CaseStatus::TheoremViolated)])] };
        assert_eq!(bad.exit_code(), 1);
    }

    #[test]
    fn small_schur_grid_passes() {
        let cfg = parse_config("[[suite]]\nname = \"schur\"\ngrid = 3\nseed = 2\n").unwrap();
        let b = run_config(&cfg, &Overrides::default(), Path::new(".")).unwrap();
        assert_eq!(b.suites[0].summary.cases, 9);
        assert_eq!(b.suites[0].summary.pass, 9);
        assert_eq!(b.exit_code(), 0);
    }
}
