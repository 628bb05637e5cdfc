//! The experimental protocol: lambda-grid sweeps with independent
//! repetitions, summary statistics per cell, pairwise significance tests,
//! and the flat-file formats the CLI emits.
//!
//! Runs are embarrassingly parallel; every run's seed is derived from
//! (master seed, cell index, run index) alone, so the table is byte-stable
//! under any worker count.

pub mod stats;

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::controllers::UpdateRule;
use crate::engine::{self, Algorithm, RunConfig};
use crate::error::{Error, Result};
use crate::problems::{Problem, ProblemDescriptor, ProblemKind};
use crate::rng::child_seed;

pub use stats::{summarize_values, wilcoxon_rank_sum, SummaryStats};

/// Lower mutation-rate bound, kept symbolic so output files group by the
/// configured bound rather than a printed float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PMin {
    /// `1/n` for the problem dimension `n`.
    InvN,
    /// `1/n^2`.
    InvN2,
    /// An explicit positive value.
    Value(f64),
}

impl PMin {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            PMin::InvN => 1.0 / n as f64,
            PMin::InvN2 => 1.0 / (n as f64 * n as f64),
            PMin::Value(v) => v,
        }
    }

    pub fn label(self) -> String {
        match self {
            PMin::InvN => "inv-n".into(),
            PMin::InvN2 => "inv-n2".into(),
            PMin::Value(v) => format!("{v}"),
        }
    }
}

impl std::fmt::Display for PMin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for PMin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inv-n" => Ok(PMin::InvN),
            "inv-n2" => Ok(PMin::InvN2),
            other => {
                let v: f64 = other.parse().map_err(|_| {
                    Error::InvalidConfig(format!(
                        "p_min must be 'inv-n', 'inv-n2' or a positive real, got '{other}'"
                    ))
                })?;
                if !(v > 0.0 && v <= 0.5) {
                    return Err(Error::InvalidConfig(format!(
                        "p_min must lie in (0, 1/2], got {v}"
                    )));
                }
                Ok(PMin::Value(v))
            }
        }
    }
}

impl Serialize for PMin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PMin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Full cross-product sweep description.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub problem: Problem,
    pub lambdas: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    pub p_mins: Vec<PMin>,
    pub rules: Vec<UpdateRule>,
    pub runs_per_cell: u32,
    pub master_seed: u64,
    /// Per-run generation cap override.
    pub budget: Option<u64>,
    pub up: f64,
    pub down: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Worker threads; 0 picks the available parallelism.
    pub workers: usize,
}

impl ExperimentPlan {
    /// One-problem plan with the standard defaults: 100 runs per cell,
    /// factors 2 and 1/2, learning rate 0.8, discount 0.2, strict rule.
    pub fn new(problem: Problem, master_seed: u64) -> Self {
        ExperimentPlan {
            problem,
            lambdas: vec![1],
            algorithms: vec![Algorithm::Static],
            p_mins: vec![PMin::InvN],
            rules: vec![UpdateRule::Strict],
            runs_per_cell: 100,
            master_seed,
            budget: None,
            up: 2.0,
            down: 0.5,
            alpha: 0.8,
            gamma: 0.2,
            workers: 0,
        }
    }

    /// Cells in their fixed enumeration order (lambda, then algorithm, then
    /// p_min, then rule); the cell index doubles as the seed-derivation id.
    fn cells(&self) -> Vec<CellSpec> {
        let mut cells = Vec::new();
        for &lambda in &self.lambdas {
            for &algorithm in &self.algorithms {
                for &p_min in &self.p_mins {
                    for &rule in &self.rules {
                        cells.push(CellSpec {
                            lambda,
                            algorithm,
                            p_min,
                            rule,
                        });
                    }
                }
            }
        }
        cells
    }

    fn run_config(&self, cell: &CellSpec, seed: u64) -> RunConfig {
        RunConfig {
            algorithm: cell.algorithm,
            lambda: cell.lambda,
            p_min: cell.p_min.resolve(self.problem.dimension()),
            rule: cell.rule,
            up: self.up,
            down: self.down,
            alpha: self.alpha,
            gamma: self.gamma,
            seed,
            budget: self.budget,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct CellSpec {
    lambda: u64,
    algorithm: Algorithm,
    p_min: PMin,
    rule: UpdateRule,
}

/// One row of the flat result table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: ProblemKind,
    pub n: u64,
    pub lambda: u64,
    pub algorithm: Algorithm,
    pub p_min: PMin,
    pub rule: UpdateRule,
    pub run_index: u32,
    pub seed: u64,
    pub generations: u64,
    pub evaluations: u64,
    pub hit_optimum: bool,
}

/// Flat collection of all runs of a sweep plus the reconstruction metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTable {
    pub problem: ProblemDescriptor,
    pub master_seed: u64,
    pub runs_per_cell: u32,
    pub runs: Vec<RunRecord>,
}

/// Executes the full cross product; any invalid cell aborts before any run
/// starts. Results are ordered by (cell, run index) regardless of workers.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<RunTable> {
    if plan.runs_per_cell == 0 {
        return Err(Error::InvalidConfig("runs per cell must be at least 1".into()));
    }
    if plan.lambdas.is_empty()
        || plan.algorithms.is_empty()
        || plan.p_mins.is_empty()
        || plan.rules.is_empty()
    {
        return Err(Error::InvalidConfig(
            "lambda grid, algorithm set, p_min set and rule set must be non-empty".into(),
        ));
    }
    let cells = plan.cells();
    for cell in &cells {
        engine::validate_config(&plan.problem, &plan.run_config(cell, 0))?;
    }

    struct Job {
        cell: CellSpec,
        run_index: u32,
        seed: u64,
    }
    let mut jobs = Vec::with_capacity(cells.len() * plan.runs_per_cell as usize);
    for (cell_id, cell) in cells.iter().enumerate() {
        let cell_seed = child_seed(plan.master_seed, cell_id as u64);
        for run_index in 0..plan.runs_per_cell {
            jobs.push(Job {
                cell: *cell,
                run_index,
                seed: child_seed(cell_seed, run_index as u64),
            });
        }
    }

    let workers = if plan.workers == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        plan.workers
    }
    .min(jobs.len())
    .max(1);

    let next_job = AtomicUsize::new(0);
    let problem = &plan.problem;
    let n = problem.dimension() as u64;
    let kind = problem.kind();
    let jobs = &jobs;

    let mut indexed: Vec<(usize, RunRecord)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let index = next_job.fetch_add(1, Ordering::Relaxed);
                        let Some(job) = jobs.get(index) else { break };
                        let cfg = plan.run_config(&job.cell, job.seed);
                        let result = engine::run_to_optimum(problem, &cfg)
                            .expect("cell configs validated before launch");
                        local.push((
                            index,
                            RunRecord {
                                problem: kind,
                                n,
                                lambda: job.cell.lambda,
                                algorithm: job.cell.algorithm,
                                p_min: job.cell.p_min,
                                rule: job.cell.rule,
                                run_index: job.run_index,
                                seed: job.seed,
                                generations: result.generations,
                                evaluations: result.evaluations,
                                hit_optimum: result.hit_optimum,
                            },
                        ));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    indexed.sort_by_key(|(index, _)| *index);

    Ok(RunTable {
        problem: plan.problem.descriptor(),
        master_seed: plan.master_seed,
        runs_per_cell: plan.runs_per_cell,
        runs: indexed.into_iter().map(|(_, record)| record).collect(),
    })
}

/// Summary of one cell; `stats` is `None` when every run was capped (the
/// capped count itself is always known).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub problem: ProblemKind,
    pub n: u64,
    pub lambda: u64,
    pub algorithm: Algorithm,
    pub p_min: PMin,
    pub rule: UpdateRule,
    pub capped_count: usize,
    pub stats: Option<SummaryStats>,
}

/// Per-cell summaries over generations of uncapped runs, cells in
/// first-appearance order.
pub fn summarize_table(table: &RunTable) -> Vec<CellSummary> {
    type GroupKey = (u64, Algorithm, String, UpdateRule);
    type CellMeta = (ProblemKind, u64, u64, Algorithm, String, UpdateRule, PMin);
    let mut order: Vec<CellMeta> = Vec::new();
    let mut groups: HashMap<GroupKey, (Vec<f64>, usize)> = HashMap::new();
    for record in &table.runs {
        let key = (
            record.lambda,
            record.algorithm,
            record.p_min.label(),
            record.rule,
        );
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push((
                record.problem,
                record.n,
                record.lambda,
                record.algorithm,
                record.p_min.label(),
                record.rule,
                record.p_min,
            ));
            (Vec::new(), 0)
        });
        if record.hit_optimum {
            entry.0.push(record.generations as f64);
        } else {
            entry.1 += 1;
        }
    }
    order
        .into_iter()
        .map(|(problem, n, lambda, algorithm, label, rule, p_min)| {
            let (values, capped) = &groups[&(lambda, algorithm, label, rule)];
            CellSummary {
                problem,
                n,
                lambda,
                algorithm,
                p_min,
                rule,
                capped_count: *capped,
                stats: summarize_values(values, *capped),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The baseline's median runtime is significantly lower.
    Better,
    /// The baseline's median runtime is significantly higher.
    Worse,
    Indistinguishable,
}

/// Pairwise test of the baseline against one algorithm in one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lambda: u64,
    pub p_min: PMin,
    pub rule: UpdateRule,
    pub algorithm: Algorithm,
    pub baseline_median: f64,
    pub algorithm_median: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    pub baseline_count: usize,
    pub algorithm_count: usize,
}

/// A cell/algorithm pair that could not be compared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsentComparison {
    pub lambda: u64,
    pub p_min: PMin,
    pub rule: UpdateRule,
    pub algorithm: Algorithm,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub problem: ProblemDescriptor,
    pub baseline: Algorithm,
    pub significance: f64,
    pub comparisons: Vec<Comparison>,
    pub absent: Vec<AbsentComparison>,
}

/// Compares the baseline against every other algorithm per cell: verdict by
/// median direction, gated on the rank-sum p-value being below
/// `significance`. Capped runs are excluded; absent pairings are reported,
/// not failed.
pub fn compare_algorithms(
    table: &RunTable,
    baseline: Algorithm,
    significance: f64,
) -> Result<ComparisonReport> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "significance level must be in (0, 1), got {significance}"
        )));
    }
    // Group: cell -> per-algorithm uncapped generation counts.
    type CellId = (u64, String, UpdateRule);
    let mut cell_order: Vec<(CellId, PMin)> = Vec::new();
    let mut cells: HashMap<CellId, Vec<(Algorithm, Vec<f64>)>> = HashMap::new();
    for record in &table.runs {
        let id: CellId = (record.lambda, record.p_min.label(), record.rule);
        let algorithms = cells.entry(id.clone()).or_insert_with(|| {
            cell_order.push((id.clone(), record.p_min));
            Vec::new()
        });
        let slot = match algorithms.iter_mut().find(|(a, _)| *a == record.algorithm) {
            Some((_, values)) => values,
            None => {
                algorithms.push((record.algorithm, Vec::new()));
                &mut algorithms.last_mut().expect("just pushed").1
            }
        };
        if record.hit_optimum {
            slot.push(record.generations as f64);
        }
    }

    let mut comparisons = Vec::new();
    let mut absent = Vec::new();
    for ((lambda, _label, rule), p_min) in cell_order {
        let algorithms = &cells[&(lambda, p_min.label(), rule)];
        let baseline_values = algorithms
            .iter()
            .find(|(a, _)| *a == baseline)
            .map(|(_, v)| v);
        for (algorithm, values) in algorithms {
            if *algorithm == baseline {
                continue;
            }
            let Some(baseline_values) = baseline_values else {
                absent.push(AbsentComparison {
                    lambda,
                    p_min,
                    rule,
                    algorithm: *algorithm,
                    reason: format!("baseline {baseline} missing from cell"),
                });
                continue;
            };
            if baseline_values.is_empty() || values.is_empty() {
                absent.push(AbsentComparison {
                    lambda,
                    p_min,
                    rule,
                    algorithm: *algorithm,
                    reason: "no successful runs on one side".into(),
                });
                continue;
            }
            let p_value = wilcoxon_rank_sum(baseline_values, values)?;
            let baseline_median = summarize_values(baseline_values, 0)
                .expect("non-empty")
                .median;
            let algorithm_median = summarize_values(values, 0).expect("non-empty").median;
            let verdict = if p_value < significance && baseline_median < algorithm_median {
                Verdict::Better
            } else if p_value < significance && baseline_median > algorithm_median {
                Verdict::Worse
            } else {
                Verdict::Indistinguishable
            };
            comparisons.push(Comparison {
                lambda,
                p_min,
                rule,
                algorithm: *algorithm,
                baseline_median,
                algorithm_median,
                p_value,
                verdict,
                baseline_count: baseline_values.len(),
                algorithm_count: values.len(),
            });
        }
    }
    Ok(ComparisonReport {
        problem: table.problem.clone(),
        baseline,
        significance,
        comparisons,
        absent,
    })
}

pub const TABLE_CSV_HEADER: &str =
    "problem,n,lambda,algorithm,p_min,rule,run_index,seed,generations,evaluations,hit_optimum";

pub fn write_table_csv<W: Write + ?Sized>(table: &RunTable, out: &mut W) -> io::Result<()> {
    writeln!(out, "{TABLE_CSV_HEADER}")?;
    for r in &table.runs {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.n,
            r.lambda,
            r.algorithm,
            r.p_min,
            r.rule,
            r.run_index,
            r.seed,
            r.generations,
            r.evaluations,
            r.hit_optimum
        )?;
    }
    Ok(())
}

pub fn read_table_csv<R: BufRead>(input: R) -> Result<RunTable> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty table file".into()))?
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    if header.trim() != TABLE_CSV_HEADER {
        return Err(Error::InvalidInput(format!(
            "unexpected table header '{header}'"
        )));
    }
    let mut runs = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::InvalidInput(format!(
                "line {}: expected 11 fields, got {}",
                line_no + 2,
                fields.len()
            )));
        }
        let parse_err = |what: &str| Error::InvalidInput(format!("line {}: bad {what}", line_no + 2));
        runs.push(RunRecord {
            problem: fields[0].parse().map_err(|_| parse_err("problem"))?,
            n: fields[1].parse().map_err(|_| parse_err("n"))?,
            lambda: fields[2].parse().map_err(|_| parse_err("lambda"))?,
            algorithm: fields[3].parse().map_err(|_| parse_err("algorithm"))?,
            p_min: fields[4].parse().map_err(|_| parse_err("p_min"))?,
            rule: fields[5].parse().map_err(|_| parse_err("rule"))?,
            run_index: fields[6].parse().map_err(|_| parse_err("run_index"))?,
            seed: fields[7].parse().map_err(|_| parse_err("seed"))?,
            generations: fields[8].parse().map_err(|_| parse_err("generations"))?,
            evaluations: fields[9].parse().map_err(|_| parse_err("evaluations"))?,
            hit_optimum: fields[10].parse().map_err(|_| parse_err("hit_optimum"))?,
        });
    }
    let (kind, n) = runs
        .first()
        .map(|r| (r.problem, r.n))
        .ok_or_else(|| Error::InvalidInput("table has no runs".into()))?;
    // CSV is flat: only kind and dimension are recoverable here. The JSON
    // format preserves the full problem descriptor.
    Ok(RunTable {
        problem: ProblemDescriptor {
            kind,
            n: n as usize,
            k: None,
            permutation: None,
            target: None,
            instance_seed: None,
        },
        master_seed: 0,
        runs_per_cell: 0,
        runs,
    })
}

pub const SUMMARY_CSV_HEADER: &str =
    "problem,n,lambda,algorithm,p_min,rule,mean,std,median,q1,q3,count,capped_count";

pub fn write_summary_csv<W: Write + ?Sized>(summaries: &[CellSummary], out: &mut W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_CSV_HEADER}")?;
    for s in summaries {
        match &s.stats {
            Some(st) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.problem,
                s.n,
                s.lambda,
                s.algorithm,
                s.p_min,
                s.rule,
                st.mean,
                st.std,
                st.median,
                st.q1,
                st.q3,
                st.count,
                st.capped_count
            )?,
            None => writeln!(
                out,
                "{},{},{},{},{},{},,,,,,0,{}",
                s.problem, s.n, s.lambda, s.algorithm, s.p_min, s.rule, s.capped_count
            )?,
        }
    }
    Ok(())
}

pub fn read_summary_csv<R: BufRead>(input: R) -> Result<Vec<CellSummary>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty summary file".into()))?
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    if header.trim() != SUMMARY_CSV_HEADER {
        return Err(Error::InvalidInput(format!(
            "unexpected summary header '{header}'"
        )));
    }
    let mut summaries = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::InvalidInput(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::InvalidInput(format!(
                "line {}: expected 13 fields, got {}",
                line_no + 2,
                fields.len()
            )));
        }
        let parse_err = |what: &str| Error::InvalidInput(format!("line {}: bad {what}", line_no + 2));
        let capped_count: usize = fields[12].parse().map_err(|_| parse_err("capped_count"))?;
        let stats = if fields[6].is_empty() {
            None
        } else {
            Some(SummaryStats {
                mean: fields[6].parse().map_err(|_| parse_err("mean"))?,
                std: fields[7].parse().map_err(|_| parse_err("std"))?,
                median: fields[8].parse().map_err(|_| parse_err("median"))?,
                q1: fields[9].parse().map_err(|_| parse_err("q1"))?,
                q3: fields[10].parse().map_err(|_| parse_err("q3"))?,
                count: fields[11].parse().map_err(|_| parse_err("count"))?,
                capped_count,
            })
        };
        summaries.push(CellSummary {
            problem: fields[0].parse().map_err(|_| parse_err("problem"))?,
            n: fields[1].parse().map_err(|_| parse_err("n"))?,
            lambda: fields[2].parse().map_err(|_| parse_err("lambda"))?,
            algorithm: fields[3].parse().map_err(|_| parse_err("algorithm"))?,
            p_min: fields[4].parse().map_err(|_| parse_err("p_min"))?,
            rule: fields[5].parse().map_err(|_| parse_err("rule"))?,
            capped_count,
            stats,
        });
    }
    Ok(summaries)
}
