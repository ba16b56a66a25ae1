//! C ABI for `cmpgeom`.
//!
//! Every entry point returns a [`CgStatus`] and writes results through out
//! pointers. Spaces and refinement traces are opaque handles that the caller
//! releases with the matching `*_free` function. On failure the message of
//! the most recent error on the calling thread is available from
//! [`cg_last_error_message`]. Panics never cross the boundary: they are
//! caught and reported as [`CgStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cmpgeom::alexandrov::{
    refine_loop, step1_find_bad_point, AlexandrovSpace, ConeSpace, DoubledPolygon, PolyhedralSpace, RefineStop,
    Sheet, SpaceTriangle, TraceStatus,
};
use cmpgeom::model_space::{angle_from_sss, rho_k, side_from_sas, Curvature};
use cmpgeom::GeomError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every `cg_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    AmbiguousGeodesic = 3,
    NumericalInfeasibility = 4,
    SearchFailure = 5,
    HypothesisViolation = 6,
    RefinementStall = 7,
    /// The search finished without finding what was asked for.
    NotFound = 8,
    Panic = 9,
}

/// Why a refinement trace ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgTraceStatus {
    LocalContradictionReached = 0,
    MaxIters = 1,
    Stalled = 2,
}

/// A point of a space. On a cone `a` is the apex distance and `b` the angle
/// in `[0, θ)`; on a doubled polygon `(a, b)` are planar coordinates and
/// `sheet` is 0 (top) or 1 (bottom).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgPoint {
    pub a: f64,
    pub b: f64,
    pub sheet: i32,
}

/// Opaque polyhedral space.
pub struct CgSpace(PolyhedralSpace);

struct Step {
    peri: f64,
    min_side: f64,
    cos_defect: f64,
    d1j: f64,
}

/// Opaque refinement trace.
pub struct CgTrace {
    steps: Vec<Step>,
    status: CgTraceStatus,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(CgStatus, String);

impl From<GeomError> for Fail {
    fn from(e: GeomError) -> Self {
        let code = match &e {
            GeomError::InvalidInput(_) => CgStatus::InvalidInput,
            GeomError::AmbiguousGeodesic(_) => CgStatus::AmbiguousGeodesic,
            GeomError::NumericalInfeasibility { .. } => CgStatus::NumericalInfeasibility,
            GeomError::SearchFailure(_) => CgStatus::SearchFailure,
            GeomError::HypothesisViolation(_) => CgStatus::HypothesisViolation,
            GeomError::RefinementStall(_) => CgStatus::RefinementStall,
        };
        Fail(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CgStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CgStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            CgStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn curvature(k: f64) -> Result<Curvature, Fail> {
    Ok(Curvature::new(k)?)
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next `cg_*` call on the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Side opposite `gamma` in the model hinge with legs `a`, `b`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_side_from_sas(k: f64, a: f64, b: f64, gamma: f64, out: *mut f64) -> CgStatus {
    guard(|| write(out, side_from_sas(curvature(k)?, a, b, gamma)?, "out"))
}

/// Model angle opposite side `c`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_angle_from_sss(k: f64, a: f64, b: f64, c: f64, out: *mut f64) -> CgStatus {
    guard(|| write(out, angle_from_sss(curvature(k)?, a, b, c)?, "out"))
}

/// The modified distance function `ρₖ(x)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_rho_k(k: f64, x: f64, out: *mut f64) -> CgStatus {
    guard(|| write(out, rho_k(curvature(k)?, x)?, "out"))
}

/// Euclidean cone of total angle `theta`.
///
/// # Safety
/// `out` must be null or valid for writes. The handle must be released with
/// [`cg_space_free`].
#[no_mangle]
pub unsafe extern "C" fn cg_space_new_cone(theta: f64, out: *mut *mut CgSpace) -> CgStatus {
    guard(|| {
        let s = Box::new(CgSpace(PolyhedralSpace::Cone(ConeSpace::new(theta)?)));
        write(out, Box::into_raw(s), "out")
    })
}

/// Doubled convex polygon with `n` vertices given as `xy[2i], xy[2i+1]`.
///
/// # Safety
/// `xy` must point to `2n` readable doubles and `out` must be null or valid
/// for writes. The handle must be released with [`cg_space_free`].
#[no_mangle]
pub unsafe extern "C" fn cg_space_new_dpoly(xy: *const f64, n: usize, out: *mut *mut CgSpace) -> CgStatus {
    guard(|| {
        if xy.is_null() {
            return Err(null("xy"));
        }
        let flat = std::slice::from_raw_parts(xy, 2 * n);
        let verts = flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let s = Box::new(CgSpace(PolyhedralSpace::Doubled(DoubledPolygon::new(verts)?)));
        write(out, Box::into_raw(s), "out")
    })
}

/// Releases a space. Null is ignored.
///
/// # Safety
/// `space` must be null or a handle from `cg_space_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_space_free(space: *mut CgSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

fn dpoly_point(d: &DoubledPolygon, p: &CgPoint) -> Result<cmpgeom::alexandrov::DPolyPoint, Fail> {
    let sheet = match p.sheet {
        0 => Sheet::Top,
        1 => Sheet::Bottom,
        s => return Err(Fail(CgStatus::InvalidInput, format!("sheet must be 0 or 1, got {s}"))),
    };
    Ok(d.point(sheet, p.a, p.b)?)
}

/// Intrinsic distance between two points of `space`.
///
/// # Safety
/// `space` must be a live handle; `x`, `y` and `out` must each be null or
/// valid.
#[no_mangle]
pub unsafe extern "C" fn cg_space_distance(
    space: *const CgSpace,
    x: *const CgPoint,
    y: *const CgPoint,
    out: *mut f64,
) -> CgStatus {
    guard(|| {
        let space = space.as_ref().ok_or_else(|| null("space"))?;
        let (x, y) = (x.as_ref().ok_or_else(|| null("x"))?, y.as_ref().ok_or_else(|| null("y"))?);
        let d = match &space.0 {
            PolyhedralSpace::Cone(c) => c.distance(&c.point(x.a, x.b)?, &c.point(y.a, y.b)?)?,
            PolyhedralSpace::Doubled(d) => d.distance(&dpoly_point(d, x)?, &dpoly_point(d, y)?)?,
        };
        write(out, d, "out")
    })
}

fn refine_from<S: AlexandrovSpace>(
    space: &S,
    k: Curvature,
    tries: Vec<[S::Point; 3]>,
    stop: (usize, f64),
) -> Result<Option<CgTrace>, Fail> {
    for [p, q, r] in tries {
        let Ok(tri) = SpaceTriangle::new(space, p, q, r) else { continue };
        if tri.min_side() < 1e-6 || (k.value() > 0.0 && tri.perimeter() >= k.perimeter_bound()) {
            continue;
        }
        let Some(bad) = step1_find_bad_point(space, k, &tri, 1e-6)? else { continue };
        let Some(seed) = bad.seed else { continue };
        let t = refine_loop(space, k, &seed, RefineStop { max_iters: stop.0, peri_floor: stop.1 * seed.perimeter() })?;
        let status = match t.status {
            TraceStatus::LocalContradictionReached => CgTraceStatus::LocalContradictionReached,
            TraceStatus::MaxIters => CgTraceStatus::MaxIters,
            TraceStatus::Stalled(_) => CgTraceStatus::Stalled,
        };
        let steps = t
            .steps
            .iter()
            .map(|s| Step { peri: s.peri, min_side: s.min_side, cos_defect: s.cos_defect, d1j: s.d1j })
            .collect();
        let json = CString::new(t.to_json()).map_err(|e| Fail(CgStatus::InvalidInput, e.to_string()))?;
        return Ok(Some(CgTrace { steps, status, json }));
    }
    Ok(None)
}

/// Searches for a triangle with a comparison-angle violation and refines it.
///
/// On a cone the symmetric triangle at unit apex distance is tried first,
/// followed by `tries` random triangles drawn from `seed`. The loop stops
/// after `max_iters` steps or once the perimeter falls below
/// `peri_ratio × seed perimeter`. Returns [`CgStatus::NotFound`] and writes
/// null when no triangle violates the comparison.
///
/// # Safety
/// `space` must be a live handle and `out` null or valid for writes. A
/// returned trace must be released with [`cg_trace_free`].
#[no_mangle]
pub unsafe extern "C" fn cg_refine_run(
    space: *const CgSpace,
    k: f64,
    max_iters: usize,
    peri_ratio: f64,
    seed: u64,
    tries: usize,
    out: *mut *mut CgTrace,
) -> CgStatus {
    guard(|| {
        let space = space.as_ref().ok_or_else(|| null("space"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if !(peri_ratio > 0.0 && peri_ratio < 1.0) {
            return Err(Fail(CgStatus::InvalidInput, format!("peri_ratio must lie in (0, 1), got {peri_ratio}")));
        }
        let k = curvature(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stop = (max_iters, peri_ratio);
        let found = match &space.0 {
            PolyhedralSpace::Cone(c) => {
                let th = c.theta();
                let mut ts = vec![[c.point(1.0, 0.0)?, c.point(1.0, th / 3.0)?, c.point(1.0, 2.0 * th / 3.0)?]];
                ts.extend((0..tries).map(|_| [c.sample_point(&mut rng), c.sample_point(&mut rng), c.sample_point(&mut rng)]));
                refine_from(c, k, ts, stop)?
            }
            PolyhedralSpace::Doubled(d) => {
                let ts = (0..tries).map(|_| [d.sample_point(&mut rng), d.sample_point(&mut rng), d.sample_point(&mut rng)]).collect();
                refine_from(d, k, ts, stop)?
            }
        };
        match found {
            Some(t) => {
                out.write(Box::into_raw(Box::new(t)));
                Ok(())
            }
            None => Err(Fail(CgStatus::NotFound, "no triangle violates the comparison".into())),
        }
    })
}

/// Number of triangles in the trace, the seed included; 0 for null.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_len(trace: *const CgTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.steps.len())
}

/// Why the trace ended.
///
/// # Safety
/// `trace` must be a live handle and `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_status(trace: *const CgTrace, out: *mut CgTraceStatus) -> CgStatus {
    guard(|| write(out, trace.as_ref().ok_or_else(|| null("trace"))?.status, "out"))
}

unsafe fn step_field(trace: *const CgTrace, i: usize, out: *mut f64, f: fn(&Step) -> f64) -> CgStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let s = t
            .steps
            .get(i)
            .ok_or_else(|| Fail(CgStatus::InvalidInput, format!("step {i} out of range (len {})", t.steps.len())))?;
        write(out, f(s), "out")
    })
}

/// Perimeter of triangle `i`.
///
/// # Safety
/// `trace` must be a live handle and `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_peri(trace: *const CgTrace, i: usize, out: *mut f64) -> CgStatus {
    step_field(trace, i, out, |s| s.peri)
}

/// Shortest side of triangle `i`.
///
/// # Safety
/// `trace` must be a live handle and `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_min_side(trace: *const CgTrace, i: usize, out: *mut f64) -> CgStatus {
    step_field(trace, i, out, |s| s.min_side)
}

/// Cosine angle defect of triangle `i`.
///
/// # Safety
/// `trace` must be a live handle and `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_cos_defect(trace: *const CgTrace, i: usize, out: *mut f64) -> CgStatus {
    step_field(trace, i, out, |s| s.cos_defect)
}

/// Distance of triangle `i`'s vertices from the seed's vertex set.
///
/// # Safety
/// `trace` must be a live handle and `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_d1j(trace: *const CgTrace, i: usize, out: *mut f64) -> CgStatus {
    step_field(trace, i, out, |s| s.d1j)
}

/// The full trace as JSON, owned by the trace; null for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle. The string dies with the trace.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_json(trace: *const CgTrace) -> *const c_char {
    trace.as_ref().map_or(ptr::null(), |t| t.json.as_ptr())
}

/// Releases a trace. Null is ignored.
///
/// # Safety
/// `trace` must be null or a handle from [`cg_refine_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_trace_free(trace: *mut CgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
