//! Command-line interface: single runs, lambda-grid sweeps, pairwise
//! comparison reports, and plot-data emission.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure. The
//! `OPLAMBDA_WORKERS` environment variable sets the default worker count
//! for sweeps (overridden by `--workers`).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::controllers::UpdateRule;
use crate::engine::{run_to_optimum, Algorithm, RunConfig, RunResult, ALL_ALGORITHMS};
use crate::error::Error;
use crate::experiments::{
    compare_algorithms, read_summary_csv, read_table_csv, run_experiment, summarize_table,
    write_summary_csv, write_table_csv, CellSummary, ExperimentPlan, PMin, RunRecord, RunTable,
};
use crate::problems::{Problem, ProblemKind};

pub const WORKERS_ENV: &str = "OPLAMBDA_WORKERS";

#[derive(Parser, Debug, PartialEq)]
#[command(
    name = "oplambda",
    version,
    about = "Runtime experiments for (1+lambda) EAs with dynamic mutation-rate control"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, PartialEq)]
pub enum Command {
    /// Execute a single seeded run and print its result row.
    Run(RunArgs),
    /// Execute a full cross-product sweep with repeated seeded runs.
    Sweep(SweepArgs),
    /// Rank-sum comparison of a baseline algorithm against the others.
    Compare(CompareArgs),
    /// Turn a summary table into plot-ready series data.
    #[command(name = "plot-data")]
    PlotData(PlotDataArgs),
}

#[derive(Args, Clone, Debug, PartialEq)]
pub struct ProblemArgs {
    /// Benchmark problem: onemax | leadingones | neutrality | plateau | ruggedness.
    #[arg(long)]
    pub problem: ProblemKind,
    /// Problem dimension.
    #[arg(long)]
    pub n: usize,
    /// Block size (required for neutrality and plateau).
    #[arg(long)]
    pub k: Option<u64>,
    /// Draw a random LeadingOnes instance (target and index order) from this seed.
    #[arg(long)]
    pub lo_instance_seed: Option<u64>,
}

impl ProblemArgs {
    pub fn build(&self) -> crate::Result<Problem> {
        match self.problem {
            ProblemKind::OneMax => Problem::one_max(self.n),
            ProblemKind::LeadingOnes => match self.lo_instance_seed {
                Some(seed) => Problem::leading_ones_random_instance(self.n, seed),
                None => Problem::leading_ones(self.n),
            },
            ProblemKind::Neutrality => {
                let k = self.k.ok_or_else(|| {
                    Error::InvalidConfig("neutrality requires --k (commonly 3)".into())
                })?;
                Problem::neutrality(self.n, k)
            }
            ProblemKind::Plateau => {
                let k = self.k.ok_or_else(|| {
                    Error::InvalidConfig("plateau requires --k (commonly 2 or 3)".into())
                })?;
                Problem::plateau(self.n, k)
            }
            ProblemKind::Ruggedness => Problem::ruggedness(self.n),
        }
    }

    fn to_argv(&self) -> Vec<String> {
        let mut argv = vec![
            "--problem".into(),
            self.problem.to_string(),
            "--n".into(),
            self.n.to_string(),
        ];
        if let Some(k) = self.k {
            argv.extend(["--k".into(), k.to_string()]);
        }
        if let Some(seed) = self.lo_instance_seed {
            argv.extend(["--lo-instance-seed".into(), seed.to_string()]);
        }
        argv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Args, Debug, PartialEq)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// static | one-fifth | two-rate | qea | hqea.
    #[arg(long)]
    pub algorithm: Algorithm,
    /// Offspring population size.
    #[arg(long, default_value_t = 1)]
    pub lambda: u64,
    /// Lower mutation-rate bound: inv-n | inv-n2 | a positive real.
    #[arg(long, default_value = "inv-n")]
    pub pmin: PMin,
    /// strict | nonstrict.
    #[arg(long, default_value = "strict")]
    pub rule: UpdateRule,
    /// Q-learning learning rate.
    #[arg(long, default_value_t = 0.8)]
    pub alpha: f64,
    /// Q-learning discount factor.
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    /// Multiplicative rate increase factor.
    #[arg(long = "A", default_value_t = 2.0)]
    pub up: f64,
    /// Multiplicative rate decrease factor.
    #[arg(long = "b", default_value_t = 0.5)]
    pub down: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Generation cap (default: 10^6 * n / lambda).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write a per-generation trace CSV to this path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

impl RunArgs {
    pub fn to_argv(&self) -> Vec<String> {
        let mut argv = vec!["run".to_string()];
        argv.extend(self.problem.to_argv());
        argv.extend(["--algorithm".into(), self.algorithm.to_string()]);
        argv.extend(["--lambda".into(), self.lambda.to_string()]);
        argv.extend(["--pmin".into(), self.pmin.to_string()]);
        argv.extend(["--rule".into(), self.rule.to_string()]);
        argv.extend(["--alpha".into(), self.alpha.to_string()]);
        argv.extend(["--gamma".into(), self.gamma.to_string()]);
        argv.extend(["--A".into(), self.up.to_string()]);
        argv.extend(["--b".into(), self.down.to_string()]);
        argv.extend(["--seed".into(), self.seed.to_string()]);
        if let Some(budget) = self.budget {
            argv.extend(["--budget".into(), budget.to_string()]);
        }
        if let Some(trace) = &self.trace {
            argv.extend(["--trace".into(), trace.display().to_string()]);
        }
        if let Some(out) = &self.out {
            argv.extend(["--out".into(), out.display().to_string()]);
        }
        argv.extend(["--format".into(), self.format.name().to_string()]);
        argv
    }
}

#[derive(Args, Debug, PartialEq)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Algorithms to sweep (comma-separated); defaults to all five.
    #[arg(long, value_delimiter = ',', default_values_t = ALL_ALGORITHMS)]
    pub algorithm: Vec<Algorithm>,
    /// Lower bounds to sweep (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "inv-n")]
    pub pmin: Vec<PMin>,
    /// Update rules to sweep (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "strict")]
    pub rule: Vec<UpdateRule>,
    /// Inclusive exponent range t_min..t_max; lambda takes the values 2^t.
    #[arg(long, conflicts_with = "lambda_list")]
    pub lambda_exponents: Option<String>,
    /// Explicit lambda values (comma-separated), for grids beyond powers of two.
    #[arg(long, value_delimiter = ',')]
    pub lambda_list: Option<Vec<u64>>,
    /// Independent runs per cell.
    #[arg(long, default_value_t = 100)]
    pub runs: u32,
    /// Master seed; per-run seeds derive from (seed, cell, run index).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: OPLAMBDA_WORKERS or the available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Generation cap per run (default: 10^6 * n / lambda).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Q-learning learning rate.
    #[arg(long, default_value_t = 0.8)]
    pub alpha: f64,
    /// Q-learning discount factor.
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    /// Multiplicative rate increase factor.
    #[arg(long = "A", default_value_t = 2.0)]
    pub up: f64,
    /// Multiplicative rate decrease factor.
    #[arg(long = "b", default_value_t = 0.5)]
    pub down: f64,
    /// Run-table output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the per-cell summary CSV to this path.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

impl SweepArgs {
    pub fn to_argv(&self) -> Vec<String> {
        let join = |items: Vec<String>| items.join(",");
        let mut argv = vec!["sweep".to_string()];
        argv.extend(self.problem.to_argv());
        argv.extend([
            "--algorithm".into(),
            join(self.algorithm.iter().map(|a| a.to_string()).collect()),
        ]);
        argv.extend([
            "--pmin".into(),
            join(self.pmin.iter().map(|p| p.to_string()).collect()),
        ]);
        argv.extend([
            "--rule".into(),
            join(self.rule.iter().map(|r| r.to_string()).collect()),
        ]);
        if let Some(range) = &self.lambda_exponents {
            argv.extend(["--lambda-exponents".into(), range.clone()]);
        }
        if let Some(list) = &self.lambda_list {
            argv.extend([
                "--lambda-list".into(),
                join(list.iter().map(|l| l.to_string()).collect()),
            ]);
        }
        argv.extend(["--runs".into(), self.runs.to_string()]);
        argv.extend(["--seed".into(), self.seed.to_string()]);
        if let Some(workers) = self.workers {
            argv.extend(["--workers".into(), workers.to_string()]);
        }
        if let Some(budget) = self.budget {
            argv.extend(["--budget".into(), budget.to_string()]);
        }
        argv.extend(["--alpha".into(), self.alpha.to_string()]);
        argv.extend(["--gamma".into(), self.gamma.to_string()]);
        argv.extend(["--A".into(), self.up.to_string()]);
        argv.extend(["--b".into(), self.down.to_string()]);
        if let Some(out) = &self.out {
            argv.extend(["--out".into(), out.display().to_string()]);
        }
        if let Some(summary) = &self.summary_out {
            argv.extend(["--summary-out".into(), summary.display().to_string()]);
        }
        argv.extend(["--format".into(), self.format.name().to_string()]);
        argv
    }

    /// Resolves the argument set into a validated experiment plan.
    pub fn build_plan(&self) -> crate::Result<ExperimentPlan> {
        let problem = self.problem.build()?;
        let lambdas = match (&self.lambda_exponents, &self.lambda_list) {
            (Some(range), None) => {
                let (lo, hi) = parse_exponent_range(range)?;
                (lo..=hi).map(|t| 1u64 << t).collect()
            }
            (None, Some(list)) => {
                if list.is_empty() || list.contains(&0) {
                    return Err(Error::InvalidConfig(
                        "--lambda-list values must be positive".into(),
                    ));
                }
                list.clone()
            }
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "one of --lambda-exponents or --lambda-list is required".into(),
                ))
            }
            (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
        };
        let workers = match self.workers {
            Some(w) => w,
            None => match std::env::var(WORKERS_ENV) {
                Ok(value) => value.parse().map_err(|_| {
                    Error::InvalidConfig(format!(
                        "{WORKERS_ENV} must be a non-negative integer, got '{value}'"
                    ))
                })?,
                Err(_) => 0,
            },
        };
        let mut plan = ExperimentPlan::new(problem, self.seed);
        plan.lambdas = lambdas;
        plan.algorithms = self.algorithm.clone();
        plan.p_mins = self.pmin.clone();
        plan.rules = self.rule.clone();
        plan.runs_per_cell = self.runs;
        plan.budget = self.budget;
        plan.up = self.up;
        plan.down = self.down;
        plan.alpha = self.alpha;
        plan.gamma = self.gamma;
        plan.workers = workers;
        Ok(plan)
    }
}

/// Parses the inclusive `t_min..t_max` exponent syntax.
fn parse_exponent_range(input: &str) -> crate::Result<(u32, u32)> {
    let err = || {
        Error::InvalidConfig(format!(
            "--lambda-exponents expects t_min..t_max with 0 <= t <= 62, got '{input}'"
        ))
    };
    let (lo, hi) = input.split_once("..").ok_or_else(err)?;
    let lo: u32 = lo.trim().parse().map_err(|_| err())?;
    let hi: u32 = hi.trim().parse().map_err(|_| err())?;
    if lo > hi || hi > 62 {
        return Err(err());
    }
    Ok((lo, hi))
}

#[derive(Args, Debug, PartialEq)]
pub struct CompareArgs {
    /// Run table produced by `sweep` (.csv or .json).
    #[arg(long)]
    pub table: PathBuf,
    /// Baseline algorithm compared against every other one.
    #[arg(long, default_value = "hqea")]
    pub baseline: Algorithm,
    /// Significance level for the rank-sum test.
    #[arg(long, default_value_t = 0.01)]
    pub significance: f64,
    /// Report output path (stdout when omitted); always JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotStyle {
    /// Center the band on the mean, half-width one standard deviation.
    MeanStd,
    /// Center on the median, band from the first to the third quartile.
    MedianIqr,
}

#[derive(Args, Debug, PartialEq)]
pub struct PlotDataArgs {
    /// Summary CSV produced by `sweep --summary-out`.
    #[arg(long)]
    pub summary: PathBuf,
    #[arg(long, value_enum)]
    pub style: PlotStyle,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const PLOT_CSV_HEADER: &str = "series,lambda,center,lo,hi";

/// One plottable point: a series identifier, the x value, and a band.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub series: String,
    pub lambda: u64,
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Builds one series per (algorithm, p_min, rule); cells with no successful
/// runs are skipped.
pub fn plot_rows(summaries: &[CellSummary], style: PlotStyle) -> Vec<PlotRow> {
    summaries
        .iter()
        .filter_map(|s| {
            let stats = s.stats.as_ref()?;
            let (center, lo, hi) = match style {
                PlotStyle::MeanStd => (stats.mean, stats.mean - stats.std, stats.mean + stats.std),
                PlotStyle::MedianIqr => (stats.median, stats.q1, stats.q3),
            };
            Some(PlotRow {
                series: format!("{}:{}:{}", s.algorithm, s.p_min, s.rule),
                lambda: s.lambda,
                center,
                lo,
                hi,
            })
        })
        .collect()
}

pub fn write_plot_csv<W: Write + ?Sized>(rows: &[PlotRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{PLOT_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.series, row.lambda, row.center, row.lo, row.hi
        )?;
    }
    Ok(())
}

/// CLI failure split by exit code: usage errors exit 1, runtime failures 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptySample(_) | Error::MissingFeedback(_) | Error::InvalidState(_) => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn io_runtime(context: &str, e: io::Error) -> CliError {
    CliError::Runtime(format!("{context}: {e}"))
}

fn with_output<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| io_runtime(&format!("cannot create {}", path.display()), e))?;
            let mut out = BufWriter::new(file);
            write(&mut out).map_err(|e| io_runtime(&format!("writing {}", path.display()), e))?;
            out.flush()
                .map_err(|e| io_runtime(&format!("writing {}", path.display()), e))
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out).map_err(|e| io_runtime("writing to stdout", e))
        }
    }
}

fn single_run_table(problem: &Problem, cfg: &RunConfig, result: &RunResult) -> RunTable {
    RunTable {
        problem: problem.descriptor(),
        master_seed: cfg.seed,
        runs_per_cell: 1,
        runs: vec![RunRecord {
            problem: problem.kind(),
            n: problem.dimension() as u64,
            lambda: cfg.lambda,
            algorithm: cfg.algorithm,
            p_min: PMin::Value(cfg.p_min),
            rule: cfg.rule,
            run_index: 0,
            seed: cfg.seed,
            generations: result.generations,
            evaluations: result.evaluations,
            hit_optimum: result.hit_optimum,
        }],
    }
}

pub const TRACE_CSV_HEADER: &str =
    "generation,parent_fitness,p,state,action,reward,q_mult,q_divide";

fn write_trace_csv<W: Write + ?Sized>(result: &RunResult, out: &mut W) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for record in result.trace.as_deref().unwrap_or_default() {
        match &record.q {
            Some(q) => writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                record.generation,
                record.parent_fitness,
                record.rate,
                q.state,
                q.action.symbol(),
                q.reward,
                q.q_row[0],
                q.q_row[1]
            )?,
            None => writeln!(
                out,
                "{},{},{},,,,,",
                record.generation, record.parent_fitness, record.rate
            )?,
        }
    }
    Ok(())
}

fn execute_run(args: &RunArgs) -> Result<(), CliError> {
    let problem = args.problem.build()?;
    let cfg = RunConfig {
        algorithm: args.algorithm,
        lambda: args.lambda,
        p_min: args.pmin.resolve(problem.dimension()),
        rule: args.rule,
        up: args.up,
        down: args.down,
        alpha: args.alpha,
        gamma: args.gamma,
        seed: args.seed,
        budget: args.budget,
        trace: args.trace.is_some(),
    };
    let result = run_to_optimum(&problem, &cfg)?;
    if let Some(trace_path) = &args.trace {
        with_output(Some(trace_path), |out| write_trace_csv(&result, &mut *out))?;
    }
    let table = single_run_table(&problem, &cfg, &result);
    match args.format {
        OutputFormat::Csv => with_output(args.out.as_deref(), |out| write_table_csv(&table, &mut *out)),
        OutputFormat::Json => with_output(args.out.as_deref(), |out| {
            serde_json::to_writer_pretty(&mut *out, &table)?;
            writeln!(out)
        }),
    }
}

fn execute_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let plan = args.build_plan()?;
    let cells = plan.lambdas.len() * plan.algorithms.len() * plan.p_mins.len() * plan.rules.len();
    eprintln!(
        "sweep: {} cells x {} runs on {} (n={})",
        cells,
        plan.runs_per_cell,
        plan.problem.kind(),
        plan.problem.dimension()
    );
    let table = run_experiment(&plan)?;
    match args.format {
        OutputFormat::Csv => {
            with_output(args.out.as_deref(), |out| write_table_csv(&table, &mut *out))?
        }
        OutputFormat::Json => with_output(args.out.as_deref(), |out| {
            serde_json::to_writer_pretty(&mut *out, &table)?;
            writeln!(out)
        })?,
    }
    if let Some(summary_path) = &args.summary_out {
        let summaries = summarize_table(&table);
        with_output(Some(summary_path), |out| write_summary_csv(&summaries, &mut *out))?;
    }
    Ok(())
}

fn execute_compare(args: &CompareArgs) -> Result<(), CliError> {
    let file = File::open(&args.table)
        .map_err(|e| io_runtime(&format!("cannot open {}", args.table.display()), e))?;
    let reader = BufReader::new(file);
    let table: RunTable = if args.table.extension().is_some_and(|ext| ext == "json") {
        serde_json::from_reader(reader)
            .map_err(|e| CliError::Runtime(format!("parsing {}: {e}", args.table.display())))?
    } else {
        read_table_csv(reader).map_err(|e| CliError::Runtime(e.to_string()))?
    };
    let report = compare_algorithms(&table, args.baseline, args.significance)?;
    with_output(args.out.as_deref(), |out| {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)
    })
}

fn execute_plot_data(args: &PlotDataArgs) -> Result<(), CliError> {
    let file = File::open(&args.summary)
        .map_err(|e| io_runtime(&format!("cannot open {}", args.summary.display()), e))?;
    let summaries =
        read_summary_csv(BufReader::new(file)).map_err(|e| CliError::Runtime(e.to_string()))?;
    let rows = plot_rows(&summaries, args.style);
    with_output(args.out.as_deref(), |out| write_plot_csv(&rows, &mut *out))
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => execute_run(args),
        Command::Sweep(args) => execute_sweep(args),
        Command::Compare(args) => execute_compare(args),
        Command::PlotData(args) => execute_plot_data(args),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SummaryStats;

    fn parse(argv: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("oplambda").chain(argv.iter().copied())).unwrap()
    }

    #[test]
    fn sweep_example_resolves_to_thirteen_cells() {
        let cli = parse(&[
            "sweep",
            "--problem",
            "onemax",
            "--n",
            "10000",
            "--algorithm",
            "hqea",
            "--pmin",
            "inv-n",
            "--lambda-exponents",
            "0..12",
        ]);
        let Command::Sweep(args) = &cli.command else {
            panic!("expected sweep");
        };
        assert_eq!(args.runs, 100);
        assert_eq!(args.rule, vec![UpdateRule::Strict]);
        let plan = args.build_plan().unwrap();
        assert_eq!(plan.lambdas.len(), 13);
        assert_eq!(plan.lambdas[0], 1);
        assert_eq!(plan.lambdas[12], 4096);
        assert_eq!(plan.algorithms, vec![Algorithm::HybridQLearning]);
        assert_eq!(plan.runs_per_cell, 100);
    }

    #[test]
    fn standard_defaults_are_filled() {
        let cli = parse(&[
            "run",
            "--problem",
            "onemax",
            "--n",
            "100",
            "--algorithm",
            "qea",
        ]);
        let Command::Run(args) = &cli.command else {
            panic!("expected run");
        };
        assert_eq!(args.alpha, 0.8);
        assert_eq!(args.gamma, 0.2);
        assert_eq!(args.up, 2.0);
        assert_eq!(args.down, 0.5);
        assert_eq!(args.rule, UpdateRule::Strict);
        assert_eq!(args.lambda, 1);
    }

    #[test]
    fn zero_pmin_is_a_usage_error() {
        let result = Cli::try_parse_from([
            "oplambda",
            "run",
            "--problem",
            "onemax",
            "--n",
            "10",
            "--algorithm",
            "static",
            "--pmin",
            "0",
        ]);
        assert!(result.is_err());
    }

    #[test]
    fn unknown_algorithm_and_problem_are_rejected() {
        assert!(Cli::try_parse_from([
            "oplambda", "run", "--problem", "onemax", "--n", "10", "--algorithm", "cmaes",
        ])
        .is_err());
        assert!(Cli::try_parse_from([
            "oplambda", "run", "--problem", "sphere", "--n", "10", "--algorithm", "static",
        ])
        .is_err());
        // Missing --n.
        assert!(Cli::try_parse_from([
            "oplambda",
            "run",
            "--problem",
            "onemax",
            "--algorithm",
            "qea"
        ])
        .is_err());
    }

    #[test]
    fn exponent_range_parsing() {
        assert_eq!(parse_exponent_range("0..12").unwrap(), (0, 12));
        assert_eq!(parse_exponent_range("3..3").unwrap(), (3, 3));
        assert!(parse_exponent_range("5..2").is_err());
        assert!(parse_exponent_range("..4").is_err());
        assert!(parse_exponent_range("0..63").is_err());
        assert!(parse_exponent_range("1-4").is_err());
    }

    #[test]
    fn lambda_grid_is_required_for_sweeps() {
        let cli = parse(&["sweep", "--problem", "onemax", "--n", "50"]);
        let Command::Sweep(args) = &cli.command else {
            panic!("expected sweep");
        };
        assert!(args.build_plan().is_err());
        // And the two grid flags conflict.
        assert!(Cli::try_parse_from([
            "oplambda",
            "sweep",
            "--problem",
            "onemax",
            "--n",
            "50",
            "--lambda-exponents",
            "0..2",
            "--lambda-list",
            "3",
        ])
        .is_err());
    }

    #[test]
    fn run_arguments_round_trip_through_rendering() {
        let cli = parse(&[
            "run",
            "--problem",
            "plateau",
            "--n",
            "100",
            "--k",
            "3",
            "--algorithm",
            "hqea",
            "--lambda",
            "8",
            "--pmin",
            "inv-n2",
            "--rule",
            "nonstrict",
            "--seed",
            "77",
            "--budget",
            "5000",
            "--format",
            "json",
        ]);
        let Command::Run(args) = &cli.command else {
            panic!("expected run");
        };
        let rendered = args.to_argv();
        let reparsed = parse(&rendered.iter().map(String::as_str).collect::<Vec<_>>());
        let Command::Run(reparsed_args) = &reparsed.command else {
            panic!("expected run");
        };
        assert_eq!(reparsed_args, args);
    }

    #[test]
    fn sweep_arguments_round_trip_through_rendering() {
        let cli = parse(&[
            "sweep",
            "--problem",
            "leadingones",
            "--n",
            "250",
            "--algorithm",
            "static,two-rate",
            "--pmin",
            "inv-n,0.001",
            "--rule",
            "strict,nonstrict",
            "--lambda-list",
            "4,32",
            "--runs",
            "10",
            "--seed",
            "5",
            "--workers",
            "2",
        ]);
        let Command::Sweep(args) = &cli.command else {
            panic!("expected sweep");
        };
        assert_eq!(args.algorithm, vec![Algorithm::Static, Algorithm::TwoRate]);
        assert_eq!(args.pmin, vec![PMin::InvN, PMin::Value(0.001)]);
        let rendered = args.to_argv();
        let reparsed = parse(&rendered.iter().map(String::as_str).collect::<Vec<_>>());
        let Command::Sweep(reparsed_args) = &reparsed.command else {
            panic!("expected sweep");
        };
        assert_eq!(reparsed_args, args);
    }

    fn summary(algorithm: Algorithm, p_min: PMin, lambda: u64, mean: f64) -> CellSummary {
        CellSummary {
            problem: ProblemKind::OneMax,
            n: 100,
            lambda,
            algorithm,
            p_min,
            rule: UpdateRule::Strict,
            capped_count: 0,
            stats: Some(SummaryStats {
                mean,
                std: 2.0,
                median: mean + 1.0,
                q1: mean - 3.0,
                q3: mean + 4.0,
                count: 100,
                capped_count: 0,
            }),
        }
    }

    #[test]
    fn plot_styles_define_the_band() {
        let cells = vec![summary(Algorithm::Static, PMin::InvN, 4, 50.0)];
        let mean_std = plot_rows(&cells, PlotStyle::MeanStd);
        assert_eq!(mean_std[0].center, 50.0);
        assert_eq!(mean_std[0].lo, 48.0);
        assert_eq!(mean_std[0].hi, 52.0);
        let median_iqr = plot_rows(&cells, PlotStyle::MedianIqr);
        assert_eq!(median_iqr[0].center, 51.0);
        assert_eq!(median_iqr[0].lo, 47.0);
        assert_eq!(median_iqr[0].hi, 54.0);
    }

    #[test]
    fn one_series_per_algorithm_and_pmin() {
        let mut cells = Vec::new();
        for &algorithm in &ALL_ALGORITHMS {
            for p_min in [PMin::InvN, PMin::InvN2] {
                for lambda in [1, 2, 4] {
                    cells.push(summary(algorithm, p_min, lambda, 40.0));
                }
            }
        }
        let rows = plot_rows(&cells, PlotStyle::MeanStd);
        assert_eq!(rows.len(), 30);
        for p_min_label in ["inv-n", "inv-n2"] {
            let series: std::collections::HashSet<&str> = rows
                .iter()
                .filter(|r| r.series.contains(&format!(":{p_min_label}:")))
                .map(|r| r.series.as_str())
                .collect();
            assert_eq!(series.len(), 5, "five algorithm series per panel");
        }
        // Empty cells are skipped.
        let mut empty = summary(Algorithm::Static, PMin::InvN, 8, 1.0);
        empty.stats = None;
        let rows = plot_rows(&[empty], PlotStyle::MeanStd);
        assert!(rows.is_empty());
    }

    #[test]
    fn single_cell_plot_has_one_row() {
        let cells = vec![summary(Algorithm::QLearning, PMin::InvN2, 16, 9.0)];
        let rows = plot_rows(&cells, PlotStyle::MedianIqr);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].series, "qea:inv-n2:strict");
        assert_eq!(rows[0].lambda, 16);
    }
}
