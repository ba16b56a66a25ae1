use std::ffi::CStr;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cmpgeom_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cg_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn trig_round_trip_and_errors() {
    let mut c = 0.0;
    let mut g = 0.0;
    unsafe {
        assert_eq!(cg_side_from_sas(0.0, 3.0, 4.0, PI / 2.0, &mut c), CgStatus::Ok);
        assert!((c - 5.0).abs() < 1e-14);
        assert_eq!(cg_side_from_sas(1.0, 0.7, 1.1, 1.3, &mut c), CgStatus::Ok);
        assert_eq!(cg_angle_from_sss(1.0, 0.7, 1.1, c, &mut g), CgStatus::Ok);
        assert!((g - 1.3).abs() < 1e-12);
        assert_eq!(cg_rho_k(0.0, 2.0, &mut g), CgStatus::Ok);
        assert_eq!(g, 2.0);
        assert_eq!(cg_angle_from_sss(0.0, 1.0, 1.0, 2.5, &mut g), CgStatus::InvalidInput);
        assert!(last_error().contains("triangle inequality"), "{}", last_error());
        assert_eq!(cg_side_from_sas(0.0, 1.0, 1.0, 1.0, ptr::null_mut()), CgStatus::NullPointer);
        assert_eq!(cg_rho_k(f64::NAN, 1.0, &mut g), CgStatus::InvalidInput);
        assert_eq!(cg_rho_k(0.0, 1.0, &mut g), CgStatus::Ok);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn cone_and_square_distances() {
    unsafe {
        let mut cone = ptr::null_mut();
        assert_eq!(cg_space_new_cone(1.5 * PI, &mut cone), CgStatus::Ok);
        let (x, y) = (CgPoint { a: 1.0, b: 0.0, sheet: 0 }, CgPoint { a: 1.0, b: 0.5 * PI, sheet: 0 });
        let mut d = 0.0;
        assert_eq!(cg_space_distance(cone, &x, &y, &mut d), CgStatus::Ok);
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        // the short way round is 0.3π
        let z = CgPoint { a: 2.0, b: 1.2 * PI, sheet: 0 };
        assert_eq!(cg_space_distance(cone, &x, &z, &mut d), CgStatus::Ok);
        assert!((d - (5.0 - 4.0 * (0.3 * PI).cos()).sqrt()).abs() < 1e-12);
        cg_space_free(cone);
        // on a cone wider than 2π a gap beyond π sends the path through the apex
        let mut wide = ptr::null_mut();
        assert_eq!(cg_space_new_cone(2.5 * PI, &mut wide), CgStatus::Ok);
        let w = CgPoint { a: 2.0, b: 1.25 * PI, sheet: 0 };
        assert_eq!(cg_space_distance(wide, &x, &w, &mut d), CgStatus::Ok);
        assert!((d - 3.0).abs() < 1e-12);
        cg_space_free(wide);

        let mut bad = ptr::null_mut();
        assert_eq!(cg_space_new_cone(-1.0, &mut bad), CgStatus::InvalidInput);
        assert!(bad.is_null());

        let sq = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let mut sp = ptr::null_mut();
        assert_eq!(cg_space_new_dpoly(sq.as_ptr(), 4, &mut sp), CgStatus::Ok);
        let (p, q) = (CgPoint { a: 0.5, b: 0.5, sheet: 0 }, CgPoint { a: 0.5, b: 0.5, sheet: 1 });
        assert_eq!(cg_space_distance(sp, &p, &q, &mut d), CgStatus::Ok);
        assert!((d - 1.0).abs() < 1e-12);
        let off = CgPoint { a: 0.5, b: 0.5, sheet: 2 };
        assert_eq!(cg_space_distance(sp, &p, &off, &mut d), CgStatus::InvalidInput);
        assert_eq!(cg_space_distance(ptr::null(), &p, &q, &mut d), CgStatus::NullPointer);
        cg_space_free(sp);
        cg_space_free(ptr::null_mut());
    }
}

#[test]
fn refinement_on_wide_cone() {
    unsafe {
        let mut cone = ptr::null_mut();
        assert_eq!(cg_space_new_cone(2.5 * PI, &mut cone), CgStatus::Ok);
        let mut tr = ptr::null_mut();
        assert_eq!(cg_refine_run(cone, 0.0, 200, 1e-3, 1, 10, &mut tr), CgStatus::Ok);
        let n = cg_trace_len(tr);
        assert!(n > 2);
        let mut st = CgTraceStatus::Stalled;
        assert_eq!(cg_trace_status(tr, &mut st), CgStatus::Ok);
        assert_eq!(st, CgTraceStatus::LocalContradictionReached);
        let peri: Vec<f64> = (0..n)
            .map(|i| {
                let mut p = 0.0;
                assert_eq!(cg_trace_peri(tr, i, &mut p), CgStatus::Ok);
                p
            })
            .collect();
        assert!(peri.windows(2).all(|w| w[1] < w[0]));
        assert!(peri[n - 1] < 1e-3 * peri[0]);
        let mut v = 0.0;
        assert_eq!(cg_trace_cos_defect(tr, n - 1, &mut v), CgStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(cg_trace_d1j(tr, n - 1, &mut v), CgStatus::Ok);
        assert!(v <= 10.0 * peri[0]);
        assert_eq!(cg_trace_min_side(tr, n, &mut v), CgStatus::InvalidInput);
        let json = CStr::from_ptr(cg_trace_json(tr)).to_str().unwrap();
        assert!(json.contains("local_contradiction_reached"));
        cg_trace_free(tr);
        cg_space_free(cone);
    }
}

#[test]
fn refinement_not_found_on_nonnegative_space() {
    unsafe {
        let mut cone = ptr::null_mut();
        assert_eq!(cg_space_new_cone(1.5 * PI, &mut cone), CgStatus::Ok);
        let mut tr = ptr::null_mut();
        assert_eq!(cg_refine_run(cone, 0.0, 50, 1e-3, 3, 20, &mut tr), CgStatus::NotFound);
        assert!(tr.is_null());
        assert_eq!(cg_trace_len(tr), 0);
        assert_eq!(cg_refine_run(cone, 0.0, 50, 2.0, 3, 20, &mut tr), CgStatus::InvalidInput);
        cg_space_free(cone);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libcmpgeom_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "cmpgeom.h"
int main(void) {
    double c = 0.0;
    if (cg_side_from_sas(0.0, 3.0, 4.0, M_PI / 2, &c) != CG_STATUS_OK || fabs(c - 5.0) > 1e-12) return 1;
    if (cg_angle_from_sss(0.0, 1.0, 1.0, 3.0, &c) != CG_STATUS_INVALID_INPUT) return 2;
    if (cg_last_error_message()[0] == '\0') return 3;
    CgSpace *s = NULL;
    if (cg_space_new_cone(2.5 * M_PI, &s) != CG_STATUS_OK) return 4;
    CgTrace *t = NULL;
    if (cg_refine_run(s, 0.0, 200, 1e-3, 1, 10, &t) != CG_STATUS_OK) return 5;
    double p0 = 0.0, p1 = 0.0;
    cg_trace_peri(t, 0, &p0);
    cg_trace_peri(t, cg_trace_len(t) - 1, &p1);
    printf("%zu %g %g\n", cg_trace_len(t), p0, p1);
    cg_trace_free(t);
    cg_space_free(s);
    return p1 < 1e-3 * p0 ? 0 : 6;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stdout));
    std::fs::remove_dir_all(&dir).ok();
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("cmpgeom-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
