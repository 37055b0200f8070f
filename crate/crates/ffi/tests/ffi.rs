use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use pdla::{AdviceVector, CoveringSdpInstance, LpSolver, SdpSolver, SolverParams, SparseRow, SymMatrix};
use pdla_ffi::*;

fn last_error() -> String {
    let p = pdla_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn new_lp(c: &[f64], boxed: bool, advice: Option<&[f64]>, lambda: f64) -> (PdlaStatus, *mut PdlaLpSolver) {
    let mut h = ptr::null_mut();
    let adv = advice.map_or(ptr::null(), |a| a.as_ptr());
    let st = unsafe { pdla_lp_new(c.as_ptr(), c.len(), boxed, adv, lambda, &mut h) };
    (st, h)
}

#[test]
fn lp_handle_matches_core_solver_bitwise() {
    let c = [0.7, 2.0, 1.3];
    let advice = [0.0, 0.9, 0.4];
    let rows: Vec<Vec<(usize, f64)>> =
        vec![vec![(0, 1.0), (1, 0.5)], vec![(1, 2.0), (2, 0.3)], vec![(0, 0.2), (2, 1.5)], vec![(2, 0.1)]];
    let (st, h) = new_lp(&c, false, Some(&advice), 0.6);
    assert_eq!(st, PdlaStatus::Ok);
    let adv = AdviceVector { x_prime: advice.to_vec(), lambda: 0.6 };
    let mut core = LpSolver::online(c.to_vec(), false, &adv, SolverParams::default()).unwrap();
    for row in &rows {
        let cols: Vec<usize> = row.iter().map(|e| e.0).collect();
        let vals: Vec<f64> = row.iter().map(|e| e.1).collect();
        let mut rep = PdlaStepReport::default();
        let st = unsafe { pdla_lp_process_row(h, cols.as_ptr(), vals.as_ptr(), cols.len(), &mut rep) };
        assert_eq!(st, PdlaStatus::Ok);
        let expect = core.process_row(&SparseRow::new(row.clone())).unwrap();
        assert_eq!(rep.round, expect.round);
        assert_eq!(rep.iterations, expect.iterations);
        assert_eq!(rep.final_value, expect.final_row_value);
    }
    let mut x = [0.0; 3];
    let mut cost = 0.0;
    unsafe {
        assert_eq!(pdla_lp_solution(h, x.as_mut_ptr(), 3), PdlaStatus::Ok);
        assert_eq!(pdla_lp_cost(h, &mut cost), PdlaStatus::Ok);
        assert_eq!(pdla_lp_phases(h), core.phases());
        assert_eq!(pdla_lp_num_vars(h), 3);
        pdla_lp_free(h);
    }
    assert_eq!(x.to_vec(), core.current_solution());
    assert_eq!(cost, core.cost());
}

#[test]
fn lp_errors_map_to_status_codes() {
    let (st, h) = new_lp(&[1.0, -1.0], false, None, 1.0);
    assert_eq!(st, PdlaStatus::BadInput);
    assert!(h.is_null());
    assert!(last_error().contains("c[1]"));

    let (st, _) = new_lp(&[1.0], false, Some(&[0.5]), 1.5);
    assert_eq!(st, PdlaStatus::BadInput);
    assert!(last_error().contains("lambda"));

    let (st, h) = new_lp(&[1.0, 1.0], true, None, 1.0);
    assert_eq!(st, PdlaStatus::Ok);
    unsafe {
        // a boxed row whose total is below 1 cannot be covered under x <= 1
        let (cols, vals) = ([0usize, 1], [0.3, 0.3]);
        assert_eq!(pdla_lp_process_row(h, cols.as_ptr(), vals.as_ptr(), 2, ptr::null_mut()), PdlaStatus::Infeasible);
        let (cols, vals) = ([5usize], [1.0]);
        assert_eq!(pdla_lp_process_row(h, cols.as_ptr(), vals.as_ptr(), 1, ptr::null_mut()), PdlaStatus::BadInput);
        assert!(last_error().contains("out of range"));
        let mut x = [0.0; 1];
        assert_eq!(pdla_lp_solution(h, x.as_mut_ptr(), 1), PdlaStatus::InvalidArgument);
        assert_eq!(pdla_lp_cost(h, ptr::null_mut()), PdlaStatus::InvalidArgument);
        pdla_lp_free(h);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(pdla_lp_new(ptr::null(), 2, false, ptr::null(), 1.0, &mut h), PdlaStatus::InvalidArgument);
        assert_eq!(pdla_lp_new([1.0].as_ptr(), 1, false, ptr::null(), 1.0, ptr::null_mut()), PdlaStatus::InvalidArgument);
        assert_eq!(pdla_lp_process_row(ptr::null_mut(), ptr::null(), ptr::null(), 0, ptr::null_mut()), PdlaStatus::InvalidArgument);
        assert_eq!(last_error(), "solver handle is null");
        assert_eq!(pdla_lp_num_vars(ptr::null()), 0);
        pdla_lp_free(ptr::null_mut());
        pdla_sdp_free(ptr::null_mut());
        pdla_string_free(ptr::null_mut());
        let mut s = ptr::null_mut();
        assert_eq!(pdla_lp_solve_json(ptr::null(), ptr::null(), &mut s), PdlaStatus::InvalidArgument);
    }
}

#[test]
fn json_solve_round_trips() {
    let inst = CString::new(r#"{"n": 2, "c": [1.0, 2.0], "rows": [[[0, 1.0], [1, 1.0]]]}"#).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { pdla_lp_solve_json(inst.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(st, PdlaStatus::Ok, "{}", last_error());
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { pdla_string_free(out) };
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let x: Vec<f64> = doc["x"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(x[0] + x[1] >= 1.0 - 1e-7);
    assert_eq!(doc["cost"].as_f64().unwrap(), x[0] + 2.0 * x[1]);

    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { pdla_lp_solve_json(bad.as_ptr(), ptr::null(), &mut out) }, PdlaStatus::BadInput);
}

#[test]
fn sdp_handle_matches_core_solver() {
    let c = [1.0, 3.0];
    let a = [[2.0, 0.5, 0.5, 1.0], [1.0, 0.0, 0.0, 3.0]];
    let bs = [[1.0, 0.0, 0.0, 0.0], [1.2, 0.2, 0.2, 1.0], [2.0, 0.2, 0.2, 2.0]];
    let flat: Vec<f64> = a.iter().flatten().copied().collect();
    let mut h = ptr::null_mut();
    let st = unsafe { pdla_sdp_new(c.as_ptr(), 2, flat.as_ptr(), 2, false, ptr::null(), 1.0, &mut h) };
    assert_eq!(st, PdlaStatus::Ok, "{}", last_error());
    let mats: Vec<SymMatrix> = a.iter().map(|m| SymMatrix::new(2, m.to_vec()).unwrap()).collect();
    let inst = CoveringSdpInstance::new(c.to_vec(), mats, vec![], false).unwrap();
    let mut core = SdpSolver::new(&inst, &AdviceVector::zeros(2, 1.0), SolverParams::default()).unwrap();
    for b in &bs {
        let mut rep = PdlaStepReport::default();
        assert_eq!(unsafe { pdla_sdp_process_matrix(h, b.as_ptr(), &mut rep) }, PdlaStatus::Ok, "{}", last_error());
        let expect = core.process_matrix(&SymMatrix::new(2, b.to_vec()).unwrap()).unwrap();
        assert_eq!(rep.final_value, expect.final_gap);
        assert!(rep.final_value >= -1e-6);
    }
    let mut x = [0.0; 2];
    let mut cost = 0.0;
    unsafe {
        assert_eq!(pdla_sdp_solution(h, x.as_mut_ptr(), 2), PdlaStatus::Ok);
        assert_eq!(pdla_sdp_cost(h, &mut cost), PdlaStatus::Ok);
        assert_eq!(pdla_sdp_phases(h), core.phases());
        // shrinking B violates monotone arrival
        let smaller = [0.5, 0.0, 0.0, 0.5];
        assert_eq!(pdla_sdp_process_matrix(h, smaller.as_ptr(), ptr::null_mut()), PdlaStatus::BadInput);
        pdla_sdp_free(h);
    }
    assert_eq!(x.to_vec(), core.current_solution());
    assert_eq!(cost, core.cost());
}

#[test]
fn sdp_rejects_asymmetric_constraint() {
    let a = [1.0, 1.0, 0.0, 1.0];
    let mut h = ptr::null_mut();
    let st = unsafe { pdla_sdp_new([1.0].as_ptr(), 1, a.as_ptr(), 2, false, ptr::null(), 1.0, &mut h) };
    assert_eq!(st, PdlaStatus::BadInput);
    assert!(last_error().contains("symmetric"));
    let st = unsafe { pdla_sdp_new([1.0].as_ptr(), 1, a.as_ptr(), 0, false, ptr::null(), 1.0, &mut h) };
    assert_eq!(st, PdlaStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pdla.h")).unwrap();
    for name in [
        "pdla_last_error_message",
        "pdla_version",
        "pdla_lp_new",
        "pdla_lp_process_row",
        "pdla_lp_num_vars",
        "pdla_lp_solution",
        "pdla_lp_cost",
        "pdla_lp_phases",
        "pdla_lp_free",
        "pdla_lp_solve_json",
        "pdla_string_free",
        "pdla_sdp_new",
        "pdla_sdp_process_matrix",
        "pdla_sdp_solution",
        "pdla_sdp_cost",
        "pdla_sdp_phases",
        "pdla_sdp_free",
        "typedef struct PdlaLpSolver PdlaLpSolver;",
        "PDLA_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
    let v = unsafe { CStr::from_ptr(pdla_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; skipping");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = target_dir();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "-p", "pdla-ffi", "--lib", "--manifest-path"]).arg(manifest.join("Cargo.toml"));
    if profile_dir.file_name().unwrap() == "release" {
        build.arg("--release");
    }
    build.env("CARGO_TARGET_DIR", profile_dir.parent().unwrap());
    assert!(build.status().unwrap().success());

    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(profile_dir.join("libpdla_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();

    let mut core = LpSolver::online(vec![1.0, 2.0], false, &AdviceVector::zeros(2, 1.0), SolverParams::default()).unwrap();
    core.process_row(&SparseRow::new(vec![(0, 1.0), (1, 1.0)])).unwrap();
    let x = core.current_solution();
    let fields: Vec<f64> = lines[0].split_whitespace().skip(1).map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields, vec![x[0], x[1], core.cost(), 1.0]);
    assert_eq!(lines[1], "bad 4 msg");
    assert!(lines[2].starts_with("sdp "));
    let x_sdp: f64 = lines[2].split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(x_sdp >= 1.0 - 1e-6, "{x_sdp}");
}
