//! Benchmark harness for (1+lambda) evolutionary algorithms with dynamic
//! mutation-rate control on pseudo-Boolean problems.
//!
//! Five algorithms share one generation loop and differ only in how the
//! mutation rate evolves: a static rate, a multiplicative success rule, a
//! two-rate scheme, tabular Q-learning, and a hybrid that falls back from
//! Q-learning to the success rule whenever the learned values are tied.
//! Benchmarks cover OneMax, LeadingOnes and three transforms layered on
//! OneMax (block-majority neutrality, plateaus, ruggedness).
//!
//! The `experiments` module runs seeded, reproducible sweeps over offspring
//! population sizes and reports summary statistics plus rank-sum
//! significance tests; the `oplambda` binary exposes the same machinery on
//! the command line.

pub mod bitstring;
pub mod cli;
pub mod controllers;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod mutation;
pub mod problems;
pub mod qlearning;
pub mod rng;

pub use bitstring::BitString;
pub use engine::{run_to_optimum, Algorithm, RunConfig, RunResult};
pub use error::{Error, Result};
pub use experiments::{run_experiment, ExperimentPlan, PMin, RunTable};
pub use problems::{Fitness, Problem, ProblemKind};
pub use rng::RandomSource;
