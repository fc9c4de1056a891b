use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use covdesign_ffi::*;

fn last_error() -> String {
    let p = cov_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(cov_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generate_and_inspect() {
    let mut ps = ptr::null_mut();
    let st = unsafe { cov_generate(COV_METHOD_LHS, 16, 3, 7, &mut ps) };
    assert_eq!(st, CovStatus::Ok);
    unsafe {
        assert_eq!((cov_pointset_n(ps), cov_pointset_d(ps)), (16, 3));
        let coords = std::slice::from_raw_parts(cov_pointset_coords(ps), 48);
        assert!(coords.iter().all(|c| (0.0..=1.0).contains(c)));
        let mut md = 0.0;
        assert_eq!(cov_min_distance(ps, &mut md), CovStatus::Ok);
        assert!(md > 0.0);
        cov_pointset_free(ps);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut ps = ptr::null_mut();
    assert_eq!(
        unsafe { cov_generate(COV_METHOD_SOBOL, 16, 12, 0, &mut ps) },
        CovStatus::InvalidArgument
    );
    assert!(ps.is_null());
    assert!(last_error().contains("dimension 12"));
    assert_eq!(
        unsafe { cov_generate(99, 16, 2, 0, &mut ps) },
        CovStatus::InvalidArgument
    );
    assert!(last_error().contains("method code 99"));
    assert_eq!(
        unsafe { cov_generate(COV_METHOD_LHS, 16, 2, 0, ptr::null_mut()) },
        CovStatus::InvalidArgument
    );
    let coords = [0.0, 0.0, 0.5, 0.5];
    let mut two = ptr::null_mut();
    assert_eq!(
        unsafe { cov_pointset_new(coords.as_ptr(), 2, 2, &mut two) },
        CovStatus::Ok
    );
    let mut md = 0.0;
    assert_eq!(unsafe { cov_min_distance(two, &mut md) }, CovStatus::Ok);
    assert!((md - 0.5f64.sqrt()).abs() < 1e-15);
    unsafe { cov_pointset_free(two) };
    assert_eq!(
        unsafe { cov_pointset_new(coords.as_ptr(), 2, 0, &mut two) },
        CovStatus::InvalidArgument
    );
    assert_eq!(unsafe { cov_pointset_n(ptr::null()) }, 0);
    assert!(unsafe { cov_report_rho(ptr::null()) }.is_nan());
    unsafe {
        cov_pointset_free(ptr::null_mut());
        cov_report_free(ptr::null_mut());
    }
}

#[test]
fn search_psd_and_synthesize() {
    let p0 = [1.3];
    let mut report = ptr::null_mut();
    let st = unsafe { cov_design_search(100, 2, COV_FAMILY_PROPOSED, p0.as_ptr(), 1, &mut report) };
    assert_eq!(st, CovStatus::Ok, "{}", last_error());
    let rho = unsafe { cov_report_rho(report) };
    assert!(rho > 1.2, "rho = {rho}");
    let mut params = CovPcfParams {
        family: 0,
        r_min: 0.0,
        r_1: 0.0,
        p0: 0.0,
        a: 0.0,
        b: 0.0,
        c: 0.0,
        phase: 0.0,
    };
    assert_eq!(
        unsafe { cov_report_params(report, &mut params) },
        CovStatus::Ok
    );
    assert_eq!((params.family, params.p0), (COV_FAMILY_PROPOSED, 1.3));

    let mut psd = vec![0.0; 50];
    let st = unsafe { cov_pcf_to_psd(&params, 100, 2, 1.0, 200.0, psd.len(), psd.as_mut_ptr()) };
    assert_eq!(st, CovStatus::Ok);
    assert!(
        psd.iter().all(|p| *p >= -1e-6),
        "boundary design is realizable"
    );

    let mut ps = ptr::null_mut();
    let mut obj = f64::NAN;
    let st = unsafe { cov_synthesize(report, 3, 20, COV_SCHEDULE_ALR, &mut ps, &mut obj) };
    assert_eq!(st, CovStatus::Ok, "{}", last_error());
    assert!(obj.is_finite());
    assert_eq!(unsafe { cov_pointset_n(ps) }, 100);
    unsafe {
        cov_pointset_free(ps);
        cov_report_free(report);
    }
}

#[test]
fn out_of_range_inputs() {
    let mut report = ptr::null_mut();
    let p0 = [3.0];
    let st = unsafe { cov_design_search(100, 2, COV_FAMILY_SFSD, p0.as_ptr(), 1, &mut report) };
    assert_eq!(
        st,
        CovStatus::InvalidArgument,
        "p0 outside the admissible range"
    );
    let bad = CovPcfParams {
        family: COV_FAMILY_PDS,
        r_min: -1.0,
        r_1: -1.0,
        p0: 1.0,
        a: 0.0,
        b: 0.0,
        c: 0.0,
        phase: 0.0,
    };
    let mut out = [0.0; 4];
    assert_eq!(
        unsafe { cov_pcf_to_psd(&bad, 10, 2, 1.0, 2.0, 4, out.as_mut_ptr()) },
        CovStatus::InvalidArgument
    );
}

#[test]
fn blind_eval_runs() {
    let (mut mean, mut std) = (0.0, 0.0);
    let st = unsafe {
        cov_blind_eval(
            COV_METHOD_RANDOM,
            COV_FUNCTION_ACKLEY,
            20,
            2,
            3,
            0,
            &mut mean,
            &mut std,
        )
    };
    assert_eq!(st, CovStatus::Ok);
    assert!(mean > 0.0 && std >= 0.0);
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent()
        .and_then(|deps| deps.parent())
        .unwrap()
        .to_path_buf()
}

/// `cargo test` links tests against the rlib only, so the archive is built
/// here with the profile whose output directory this test runs from.
fn build_static_lib(target: &Path) -> PathBuf {
    let cargo = std::env::var_os("CARGO").unwrap_or_else(|| "cargo".into());
    let profile = match target.file_name().and_then(|n| n.to_str()) {
        Some("release") => "release",
        _ => "test",
    };
    let status = Command::new(cargo)
        .args(["build", "-p", "covdesign-ffi", "--lib", "--profile", profile])
        .status()
        .expect("cargo is available");
    assert!(status.success(), "building the static library failed");
    target.join("libcovdesign_ffi.a")
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = build_static_lib(&target_dir());
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include "covdesign.h"
#include <stdio.h>
int main(void) {
    CovPointSet *ps = NULL;
    if (cov_generate(COV_METHOD_SOBOL, 8, 2, 0, &ps) != COV_STATUS_OK) return 1;
    const double *x = cov_pointset_coords(ps);
    if (cov_pointset_n(ps) != 8 || x[0] != 0.5 || x[1] != 0.5) return 2;
    cov_pointset_free(ps);
    if (cov_generate(COV_METHOD_LHS, 4, 9, 0, &ps) != COV_STATUS_INVALID_ARGUMENT) return 3;
    if (cov_last_error() == NULL) return 4;
    printf("%s\n", cov_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success(), "C smoke test failed to build");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C smoke test exited with {:?}",
        out.status.code()
    );
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        env!("CARGO_PKG_VERSION")
    );
}
