//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, opaque handles.

use oplambda_ffi::*;

fn new_problem(kind: OplProblemKind, n: u64, k: u64) -> *mut OplProblem {
    let mut handle: *mut OplProblem = std::ptr::null_mut();
    let status = unsafe { opl_problem_new(kind, n, k, &mut handle) };
    assert_eq!(status, OplStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn default_config() -> OplRunConfig {
    let mut cfg = std::mem::MaybeUninit::<OplRunConfig>::uninit();
    let status = unsafe { opl_run_config_default(cfg.as_mut_ptr()) };
    assert_eq!(status, OplStatus::Ok);
    unsafe { cfg.assume_init() }
}

#[test]
fn version_is_a_c_string() {
    let ptr = opl_version();
    assert!(!ptr.is_null());
    let version = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
    assert!(!version.is_empty());
}

#[test]
fn problem_lifecycle_and_metadata() {
    let problem = new_problem(OplProblemKind::Plateau, 100, 3);
    unsafe {
        assert_eq!(opl_problem_dimension(problem), 100);
        assert_eq!(opl_problem_optimum(problem), 34);
        opl_problem_free(problem);
        // Null handles are tolerated.
        opl_problem_free(std::ptr::null_mut());
        assert_eq!(opl_problem_dimension(std::ptr::null()), 0);
    }
}

#[test]
fn evaluate_checks_arguments() {
    let problem = new_problem(OplProblemKind::OneMax, 8, 0);
    let bits = [1u8, 0, 1, 1, 0, 0, 1, 1];
    let mut fitness = 0u64;
    unsafe {
        assert_eq!(
            opl_problem_evaluate(problem, bits.as_ptr(), bits.len(), &mut fitness),
            OplStatus::Ok
        );
        assert_eq!(fitness, 5);
        // Wrong length.
        assert_eq!(
            opl_problem_evaluate(problem, bits.as_ptr(), 4, &mut fitness),
            OplStatus::InvalidArgument
        );
        // Non-binary payload.
        let bad = [2u8; 8];
        assert_eq!(
            opl_problem_evaluate(problem, bad.as_ptr(), bad.len(), &mut fitness),
            OplStatus::InvalidArgument
        );
        // Null pointers.
        assert_eq!(
            opl_problem_evaluate(std::ptr::null(), bits.as_ptr(), 8, &mut fitness),
            OplStatus::NullPointer
        );
        assert_eq!(
            opl_problem_evaluate(problem, std::ptr::null(), 8, &mut fitness),
            OplStatus::NullPointer
        );
        opl_problem_free(problem);
    }
}

#[test]
fn invalid_problem_parameters_are_rejected() {
    let mut handle: *mut OplProblem = std::ptr::null_mut();
    unsafe {
        // Zero dimension.
        assert_eq!(
            opl_problem_new(OplProblemKind::OneMax, 0, 0, &mut handle),
            OplStatus::InvalidArgument
        );
        // Even neutrality block.
        assert_eq!(
            opl_problem_new(OplProblemKind::Neutrality, 12, 2, &mut handle),
            OplStatus::InvalidArgument
        );
        assert_eq!(
            opl_problem_new(OplProblemKind::OneMax, 4, 0, std::ptr::null_mut()),
            OplStatus::NullPointer
        );
    }
}

#[test]
fn runs_are_deterministic_across_calls() {
    let problem = new_problem(OplProblemKind::OneMax, 200, 0);
    let mut cfg = default_config();
    cfg.p_min = 1.0 / 200.0;
    cfg.lambda = 4;
    cfg.seed = 99;
    let mut first = OplRunResult::default();
    let mut second = OplRunResult::default();
    unsafe {
        assert_eq!(
            opl_run(problem, OplAlgorithm::HybridQLearning, &cfg, &mut first),
            OplStatus::Ok
        );
        assert_eq!(
            opl_run(problem, OplAlgorithm::HybridQLearning, &cfg, &mut second),
            OplStatus::Ok
        );
        opl_problem_free(problem);
    }
    assert_eq!(first.generations, second.generations);
    assert_eq!(first.hit_optimum, 1);
    assert_eq!(first.final_fitness, 200);
    assert_eq!(first.evaluations, 1 + 4 * first.generations);
}

#[test]
fn run_matches_the_rust_api() {
    let problem = new_problem(OplProblemKind::LeadingOnes, 64, 0);
    let mut cfg = default_config();
    cfg.p_min = 1.0 / 64.0;
    cfg.lambda = 2;
    cfg.seed = 7;
    let mut via_c = OplRunResult::default();
    unsafe {
        assert_eq!(
            opl_run(problem, OplAlgorithm::OneFifth, &cfg, &mut via_c),
            OplStatus::Ok
        );
        opl_problem_free(problem);
    }
    let rust_problem = oplambda::Problem::leading_ones(64).unwrap();
    let rust_cfg = oplambda::RunConfig {
        algorithm: oplambda::Algorithm::OneFifth,
        lambda: 2,
        p_min: 1.0 / 64.0,
        rule: oplambda::controllers::UpdateRule::Strict,
        up: 2.0,
        down: 0.5,
        alpha: 0.8,
        gamma: 0.2,
        seed: 7,
        budget: None,
        trace: false,
    };
    let via_rust = oplambda::run_to_optimum(&rust_problem, &rust_cfg).unwrap();
    assert_eq!(via_c.generations, via_rust.generations);
    assert_eq!(via_c.evaluations, via_rust.evaluations);
    assert_eq!(via_c.final_fitness, via_rust.final_fitness);
}

#[test]
fn invalid_run_config_is_rejected() {
    let problem = new_problem(OplProblemKind::OneMax, 16, 0);
    let mut out = OplRunResult::default();
    let mut cfg = default_config();
    // p_min left at 0: must be rejected.
    unsafe {
        assert_eq!(
            opl_run(problem, OplAlgorithm::Static, &cfg, &mut out),
            OplStatus::InvalidArgument
        );
    }
    cfg.p_min = 1.0 / 16.0;
    cfg.lambda = 0;
    unsafe {
        assert_eq!(
            opl_run(problem, OplAlgorithm::Static, &cfg, &mut out),
            OplStatus::InvalidArgument
        );
        assert_eq!(
            opl_run(problem, OplAlgorithm::Static, std::ptr::null(), &mut out),
            OplStatus::NullPointer
        );
        opl_problem_free(problem);
    }
}

#[test]
fn generated_header_exists_and_names_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/oplambda.h"
    ))
    .expect("cbindgen header generated at build time");
    for symbol in [
        "opl_version",
        "opl_problem_new",
        "opl_problem_free",
        "opl_problem_evaluate",
        "opl_run_config_default",
        "opl_run",
        "OplRunResult",
        "OplStatus",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
