//! C ABI for the benchmark harness: opaque problem handles, plain-struct
//! run configuration, and status codes, so other languages can create
//! problem instances, evaluate points, and execute seeded runs.
//!
//! Every function is deterministic for identical arguments; results match
//! the Rust API and the `oplambda` CLI bit for bit.

use std::panic::{catch_unwind, AssertUnwindSafe};

use oplambda::controllers::UpdateRule;
use oplambda::engine::{run_to_optimum, Algorithm, RunConfig};
use oplambda::problems::Problem;
use oplambda::BitString;

/// Status codes returned by every fallible entry point.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OplStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = -1,
    /// An argument failed validation (dimension, probability, bit value...).
    InvalidArgument = -2,
    /// Unexpected internal failure.
    Internal = -3,
}

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OplProblemKind {
    OneMax = 0,
    /// Classic variant: all-ones target, identity index order.
    LeadingOnes = 1,
    /// Block-majority transform; `k` must be odd.
    Neutrality = 2,
    /// Plateau transform with plateau size `k`.
    Plateau = 3,
    /// Adjacent-level swap transform adding local optima.
    Ruggedness = 4,
}

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OplAlgorithm {
    Static = 0,
    OneFifth = 1,
    TwoRate = 2,
    QLearning = 3,
    HybridQLearning = 4,
}

impl From<OplAlgorithm> for Algorithm {
    fn from(a: OplAlgorithm) -> Algorithm {
        match a {
            OplAlgorithm::Static => Algorithm::Static,
            OplAlgorithm::OneFifth => Algorithm::OneFifth,
            OplAlgorithm::TwoRate => Algorithm::TwoRate,
            OplAlgorithm::QLearning => Algorithm::QLearning,
            OplAlgorithm::HybridQLearning => Algorithm::HybridQLearning,
        }
    }
}

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OplUpdateRule {
    Strict = 0,
    NonStrict = 1,
}

/// Run parameters. Obtain defaults with `opl_run_config_default`, then set
/// at least `p_min` (e.g. `1.0 / n`) and the fields you want to vary.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct OplRunConfig {
    /// Offspring population size; must be at least 1.
    pub lambda: u64,
    /// Lower mutation-rate bound in (0, 1/2]; the upper bound is 1/2.
    pub p_min: f64,
    pub rule: OplUpdateRule,
    /// Multiplicative rate increase factor (> 1).
    pub up: f64,
    /// Multiplicative rate decrease factor (in (0, 1)).
    pub down: f64,
    /// Q-learning learning rate.
    pub alpha: f64,
    /// Q-learning discount factor.
    pub gamma: f64,
    pub seed: u64,
    /// Generation cap; 0 selects the scaled default `10^6 * n / lambda`.
    pub budget: u64,
}

/// Outcome of one run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct OplRunResult {
    /// Generations until an optimum was first evaluated (or the cap).
    pub generations: u64,
    /// Fitness evaluations: `1 + generations * lambda`.
    pub evaluations: u64,
    pub final_fitness: u64,
    /// 1 when an optimal point was evaluated within the budget.
    pub hit_optimum: u8,
}

/// Opaque problem instance; create with `opl_problem_new` or
/// `opl_problem_new_leading_ones_instance`, release with `opl_problem_free`.
pub struct OplProblem {
    inner: Problem,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn opl_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const std::os::raw::c_char
}

/// Creates a problem instance. `k` is the block/plateau size and is ignored
/// by onemax, leadingones and ruggedness. Returns a handle through `out`.
///
/// # Safety
/// `out` must be a valid pointer. The returned handle must be released with
/// `opl_problem_free` exactly once.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_new(
    kind: OplProblemKind,
    n: u64,
    k: u64,
    out: *mut *mut OplProblem,
) -> OplStatus {
    if out.is_null() {
        return OplStatus::NullPointer;
    }
    let built = match kind {
        OplProblemKind::OneMax => Problem::one_max(n as usize),
        OplProblemKind::LeadingOnes => Problem::leading_ones(n as usize),
        OplProblemKind::Neutrality => Problem::neutrality(n as usize, k),
        OplProblemKind::Plateau => Problem::plateau(n as usize, k),
        OplProblemKind::Ruggedness => Problem::ruggedness(n as usize),
    };
    match built {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(OplProblem { inner }));
            OplStatus::Ok
        }
        Err(_) => OplStatus::InvalidArgument,
    }
}

/// Creates a LeadingOnes instance whose target string and index order are
/// drawn deterministically from `instance_seed`.
///
/// # Safety
/// Same contract as `opl_problem_new`.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_new_leading_ones_instance(
    n: u64,
    instance_seed: u64,
    out: *mut *mut OplProblem,
) -> OplStatus {
    if out.is_null() {
        return OplStatus::NullPointer;
    }
    match Problem::leading_ones_random_instance(n as usize, instance_seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(OplProblem { inner }));
            OplStatus::Ok
        }
        Err(_) => OplStatus::InvalidArgument,
    }
}

/// Releases a problem handle; a null pointer is a no-op.
///
/// # Safety
/// `problem` must have been returned by a constructor of this library and
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_free(problem: *mut OplProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Problem dimension `n`; 0 when the handle is null.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_dimension(problem: *const OplProblem) -> u64 {
    problem.as_ref().map_or(0, |p| p.inner.dimension() as u64)
}

/// Largest attainable fitness value; 0 when the handle is null.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_optimum(problem: *const OplProblem) -> u64 {
    problem.as_ref().map_or(0, |p| p.inner.optimum())
}

/// Evaluates a point given as `len` bytes each 0 or 1; `len` must equal the
/// problem dimension.
///
/// # Safety
/// `problem` must be a live handle; `bits` must point to `len` readable
/// bytes; `out_fitness` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opl_problem_evaluate(
    problem: *const OplProblem,
    bits: *const u8,
    len: usize,
    out_fitness: *mut u64,
) -> OplStatus {
    let Some(problem) = problem.as_ref() else {
        return OplStatus::NullPointer;
    };
    if bits.is_null() || out_fitness.is_null() {
        return OplStatus::NullPointer;
    }
    if len != problem.inner.dimension() {
        return OplStatus::InvalidArgument;
    }
    let slice = std::slice::from_raw_parts(bits, len);
    let Ok(point) = BitString::from_bits(slice) else {
        return OplStatus::InvalidArgument;
    };
    match catch_unwind(AssertUnwindSafe(|| problem.inner.evaluate(&point))) {
        Ok(fitness) => {
            *out_fitness = fitness;
            OplStatus::Ok
        }
        Err(_) => OplStatus::Internal,
    }
}

/// Fills `out` with the standard defaults: lambda 1, strict rule, factors
/// 2 and 1/2, learning rate 0.8, discount 0.2, seed 0, default budget.
/// `p_min` is set to 0 and MUST be overwritten by the caller.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opl_run_config_default(out: *mut OplRunConfig) -> OplStatus {
    if out.is_null() {
        return OplStatus::NullPointer;
    }
    *out = OplRunConfig {
        lambda: 1,
        p_min: 0.0,
        rule: OplUpdateRule::Strict,
        up: 2.0,
        down: 0.5,
        alpha: 0.8,
        gamma: 0.2,
        seed: 0,
        budget: 0,
    };
    OplStatus::Ok
}

/// Runs the chosen algorithm on `problem` until an optimal point is first
/// evaluated or the generation budget is exhausted, and fills `out`.
///
/// # Safety
/// `problem`, `cfg` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn opl_run(
    problem: *const OplProblem,
    algorithm: OplAlgorithm,
    cfg: *const OplRunConfig,
    out: *mut OplRunResult,
) -> OplStatus {
    let Some(problem) = problem.as_ref() else {
        return OplStatus::NullPointer;
    };
    if cfg.is_null() || out.is_null() {
        return OplStatus::NullPointer;
    }
    let cfg = *cfg;
    let run_config = RunConfig {
        algorithm: algorithm.into(),
        lambda: cfg.lambda,
        p_min: cfg.p_min,
        rule: match cfg.rule {
            OplUpdateRule::Strict => UpdateRule::Strict,
            OplUpdateRule::NonStrict => UpdateRule::NonStrict,
        },
        up: cfg.up,
        down: cfg.down,
        alpha: cfg.alpha,
        gamma: cfg.gamma,
        seed: cfg.seed,
        budget: (cfg.budget > 0).then_some(cfg.budget),
        trace: false,
    };
    match catch_unwind(AssertUnwindSafe(|| {
        run_to_optimum(&problem.inner, &run_config)
    })) {
        Ok(Ok(result)) => {
            *out = OplRunResult {
                generations: result.generations,
                evaluations: result.evaluations,
                final_fitness: result.final_fitness,
                hit_optimum: result.hit_optimum as u8,
            };
            OplStatus::Ok
        }
        Ok(Err(_)) => OplStatus::InvalidArgument,
        Err(_) => OplStatus::Internal,
    }
}
