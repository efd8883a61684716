//! Command-line front end for the `trcore` solver.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trcore::engine::{solve, SolverConfig, Verdict};
use trcore::lift::lift_core;
use trcore::ltl::{parse_ltl, print_ltl, Formula};
use trcore::oracle::{check_sat, DEFAULT_MAX_ATOMS};
use trcore::snf::{parse_snf, print_snf, translate, SnfProblem};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "trcore",
    version,
    about = "LTL satisfiability by temporal resolution, with unsatisfiable cores"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide satisfiability with temporal resolution.
    Solve(SolveArgs),
    /// Decide satisfiability by explicit-state search (small inputs only).
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ltl,
    Snf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file.
    pub file: PathBuf,
    /// Input format; inferred from a `.ltl` or `.snf` extension if omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Print the unsatisfiable core in clause format.
    #[arg(long)]
    pub core: bool,
    /// Print the unsatisfiable core lifted to the input formula (LTL input only).
    #[arg(long)]
    pub core_ltl: bool,
    /// Write the resolution graph in dot format.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Write the resolution graph as one `from rule to` line per edge.
    #[arg(long, value_name = "PATH")]
    pub edges: Option<PathBuf>,
    /// Write run statistics as JSON.
    #[arg(long, value_name = "PATH")]
    pub stats: Option<PathBuf>,
    /// Do not record the resolution graph. Rules out core extraction.
    #[arg(long)]
    pub no_graph: bool,
    /// Keep tautological conclusions.
    #[arg(long)]
    pub no_taut_del: bool,
    /// Disable forward and backward subsumption.
    #[arg(long)]
    pub no_subsumption: bool,
    /// Resolve on any complementary pair instead of maximal literals only.
    #[arg(long)]
    pub no_ordering: bool,
    /// Give up after this many generated conclusions.
    #[arg(long, value_name = "N")]
    pub step_limit: Option<u64>,
    /// Give up after this many seconds.
    #[arg(long, value_name = "SECS")]
    pub time_limit: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Largest number of state bits the oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_MAX_ATOMS)]
    pub max_atoms: usize,
}

/// Statistics of one solver run, serialized with `--stats`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub verdict: String,
    /// Syntax-tree nodes for formula input, clauses for clause input.
    pub input_size: usize,
    /// Size of the core in the same unit as `input_size`.
    pub core_size: Option<usize>,
    pub rule_counts: BTreeMap<String, u64>,
    pub loop_searches: usize,
    pub loop_iterations: Vec<usize>,
    pub wall_ms: f64,
    pub peak_clauses: usize,
}

/// What a command prints and the status it exits with.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: impl std::fmt::Display) -> Outcome {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("trcore: {message}\n"),
        }
    }
}

enum Input {
    Ltl(Formula, SnfProblem),
    Snf(SnfProblem),
}

impl Input {
    fn problem(&self) -> &SnfProblem {
        match self {
            Input::Ltl(_, p) | Input::Snf(p) => p,
        }
    }
}

fn load(args: &InputArgs) -> Result<Input, Outcome> {
    let format = match args.format {
        Some(f) => f,
        None => match args.file.extension().and_then(|e| e.to_str()) {
            Some("ltl") => Format::Ltl,
            Some("snf") => Format::Snf,
            _ => {
                return Err(Outcome::error(
                    EXIT_USAGE,
                    format!("cannot infer the format of {}; pass --format", args.file.display()),
                ))
            }
        },
    };
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| Outcome::error(EXIT_INPUT, format!("{}: {e}", args.file.display())))?;
    let located = |e: &dyn std::fmt::Display| Outcome::error(EXIT_INPUT, format!("{}: {e}", args.file.display()));
    match format {
        Format::Ltl => {
            let f = parse_ltl(&text).map_err(|e| located(&e))?;
            let p = translate(&f);
            Ok(Input::Ltl(f, p))
        }
        Format::Snf => Ok(Input::Snf(parse_snf(&text).map_err(|e| located(&e))?)),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Sat => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
        Verdict::ResourceLimit => EXIT_LIMIT,
    }
}

fn verdict_line(v: Verdict) -> &'static str {
    match v {
        Verdict::Sat => "sat",
        Verdict::Unsat => "unsat",
        Verdict::ResourceLimit => "unknown",
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Outcome> {
    std::fs::write(path, contents).map_err(|e| Outcome::error(EXIT_INPUT, format!("{}: {e}", path.display())))
}

pub fn cmd_solve(args: &SolveArgs) -> Outcome {
    if args.no_graph && (args.core || args.core_ltl || args.graph.is_some() || args.edges.is_some()) {
        return Outcome::error(EXIT_USAGE, "--no-graph cannot be combined with core or graph output");
    }
    if args.time_limit.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return Outcome::error(EXIT_USAGE, "--time-limit must be a non-negative number of seconds");
    }
    let input = match load(&args.input) {
        Ok(i) => i,
        Err(o) => return o,
    };
    if args.core_ltl && matches!(input, Input::Snf(_)) {
        return Outcome::error(EXIT_USAGE, "--core-ltl needs formula input");
    }
    let config = SolverConfig {
        tautology_deletion: !args.no_taut_del,
        subsumption: !args.no_subsumption,
        ordered: !args.no_ordering,
        record_graph: !args.no_graph,
        step_limit: args.step_limit,
        time_limit: args.time_limit.map(Duration::from_secs_f64),
    };
    match run_solve(&input, &config, args) {
        Ok(o) | Err(o) => o,
    }
}

fn run_solve(input: &Input, config: &SolverConfig, args: &SolveArgs) -> Result<Outcome, Outcome> {
    let start = Instant::now();
    let problem = input.problem();
    let result = solve(problem, config);
    let core = result.core();
    let lifted = match (input, &core) {
        (Input::Ltl(f, p), Some(core)) => Some(lift_core(f, p, core).expect("core indices come from the problem")),
        _ => None,
    };
    let wall = start.elapsed();

    let mut out = Outcome {
        code: verdict_code(result.verdict),
        ..Outcome::default()
    };
    writeln!(out.stdout, "{}", verdict_line(result.verdict)).unwrap();
    if let Some(core) = &core {
        if args.core {
            writeln!(
                out.stdout,
                "# core: {} of {} clauses",
                core.len(),
                problem.clauses.len()
            )
            .unwrap();
            out.stdout.push_str(&print_snf(&problem.subproblem(core)));
        }
        if let (true, Some(l)) = (args.core_ltl, &lifted) {
            writeln!(out.stdout, "# core formula").unwrap();
            writeln!(out.stdout, "{}", print_ltl(&l.formula)).unwrap();
        }
    }
    if let Some(g) = &result.graph {
        if let Some(path) = &args.graph {
            write_file(path, &g.to_dot(&result.atoms))?;
        }
        if let Some(path) = &args.edges {
            write_file(path, &g.edge_list())?;
        }
    }
    if let Some(path) = &args.stats {
        let (input_size, core_size) = match input {
            Input::Ltl(f, _) => (f.tree_size(), lifted.as_ref().map(|l| l.formula.tree_size())),
            Input::Snf(p) => (p.clauses.len(), core.as_ref().map(|c| c.len())),
        };
        let report = RunReport {
            verdict: verdict_line(result.verdict).to_string(),
            input_size,
            core_size,
            rule_counts: result
                .stats
                .rule_counts
                .iter()
                .map(|(r, &n)| (r.name().to_string(), n))
                .collect(),
            loop_searches: result.stats.loop_searches,
            loop_iterations: result.stats.loop_iterations.clone(),
            wall_ms: wall.as_secs_f64() * 1000.0,
            peak_clauses: result.stats.peak_clauses,
        };
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
    }
    if result.verdict == Verdict::ResourceLimit {
        out.stderr.push_str("trcore: resource limit reached\n");
    }
    Ok(out)
}

pub fn cmd_oracle(args: &OracleArgs) -> Outcome {
    let input = match load(&args.input) {
        Ok(i) => i,
        Err(o) => return o,
    };
    match check_sat(input.problem(), args.max_atoms) {
        Ok(v) => Outcome {
            code: verdict_code(v),
            stdout: format!("{}\n", verdict_line(v)),
            stderr: String::new(),
        },
        Err(e) => Outcome::error(EXIT_LIMIT, e),
    }
}

/// Parse `argv` (program name first) and run the selected command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(run(["trcore"]).code, EXIT_USAGE);
        assert_eq!(run(["trcore", "solve", "f.ltl", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(run(["trcore", "solve", "f.ltl", "--time-limit", "-1"]).code, EXIT_USAGE);
        assert_eq!(run(["trcore", "solve", "f"]).code, EXIT_USAGE);
    }

    #[test]
    fn help_is_not_an_error() {
        let o = run(["trcore", "--help"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("solve"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let o = run(["trcore", "solve", "/nonexistent/x.snf"]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.starts_with("trcore: "));
    }

    #[test]
    fn verdicts_map_to_exit_codes() {
        assert_eq!(verdict_code(Verdict::Sat), 10);
        assert_eq!(verdict_code(Verdict::Unsat), 20);
        assert_eq!(verdict_code(Verdict::ResourceLimit), 2);
        assert_eq!(verdict_line(Verdict::ResourceLimit), "unknown");
    }
}
