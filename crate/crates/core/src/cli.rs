//! Command-line front end.
//!
//! Exit codes: 0 success, 1 oracle found violations, 2 bad input, 3 solver
//! failure, 4 invalid or improper policy, 5 instance over the oracle cap.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::files;
use crate::mdp::TransitionSystem;
use crate::momdp::{
    evaluate_policy, pareto_front, sample_weights, Momdp, SolverOptions, WeightScheme, WeightVector,
};
use crate::oracle::{check_theorem1, class_order, enumerate_solutions, OracleCap};
use crate::order::{PartialOrder, DEFAULT_EPSILON};
use crate::product::build_product;
use crate::report::{compare_rows, SolutionReport};
use crate::scenarios::{build_garden, preset, GardenConfig};

/// Largest tolerated `|V - R·p|` on reported solutions.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "prefplan", version, about = "Preference-based planning in terminating labeled MDPs")]
pub struct Cli {
    /// Worker threads for the parallel loops.
    #[arg(long, global = true, env = "PREFPLAN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the product of an MDP file and a preference automaton file.
    Build(BuildArgs),
    /// Solve scalarized problems for a set of weights and write a CSV report.
    Solve(SolveArgs),
    /// Evaluate a policy file on a product.
    Evaluate(EvaluateArgs),
    /// Pairwise dominance between the rows of a CSV report.
    Compare(CompareArgs),
    /// Write the model files of a garden scenario.
    Scenario(ScenarioArgs),
    /// Enumerate all deterministic policies and check Pareto against
    /// weak-stochastic dominance.
    Oracle(OracleArgs),
}

#[derive(Debug, clap::Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub mdp: PathBuf,
    #[arg(long)]
    pub pdfa: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Dirichlet,
    Uniform,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub product: PathBuf,
    /// Text file with one weight vector per line, comma or space separated.
    #[arg(long, conflicts_with_all = ["num_weights", "seed", "scheme"])]
    pub weights: Option<PathBuf>,
    /// Rescale weight-file rows to sum to one.
    #[arg(long, requires = "weights")]
    pub normalize: bool,
    #[arg(long, default_value_t = 100)]
    pub num_weights: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Dirichlet)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: usize,
    /// Tolerance for deduplication and dominance checks.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub eps: f64,
    /// CSV report; printed to stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Directory receiving one policy file per distinct solution.
    #[arg(long)]
    pub policies: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub product: PathBuf,
    #[arg(long)]
    pub policy: PathBuf,
    /// JSON file receiving the evaluated vectors.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CompareArgs {
    pub report: PathBuf,
    /// Product file supplying the class order.
    #[arg(long, conflicts_with = "pdfa")]
    pub product: Option<PathBuf>,
    /// Preference automaton file supplying the class order.
    #[arg(long)]
    pub pdfa: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub eps: f64,
}

#[derive(Debug, clap::Args)]
pub struct ScenarioArgs {
    /// Named preset: 3x3, 4x4, full, full-stochastic.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// JSON garden configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the battery horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Output directory for mdp.json and pdfa.json.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub product: PathBuf,
    #[arg(long, default_value_t = OracleCap::default().max_states)]
    pub max_states: usize,
    #[arg(long, default_value_t = OracleCap::default().max_actions)]
    pub max_actions: usize,
    /// JSON file receiving the counts.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::Singular(_) | Error::IdentityGap { .. } => 3,
        Error::InvalidPolicy(_) | Error::ImproperPolicy { .. } => 4,
        Error::OverCap(_) => 5,
        _ => 2,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    match run(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Build(a) => cmd_build(a, out).map(|_| 0),
        Command::Solve(a) => cmd_solve(a, out).map(|_| 0),
        Command::Evaluate(a) => cmd_evaluate(a, out).map(|_| 0),
        Command::Compare(a) => cmd_compare(a, out).map(|_| 0),
        Command::Scenario(a) => cmd_scenario(a, out).map(|_| 0),
        Command::Oracle(a) => cmd_oracle(a, out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub mdp_states: usize,
    pub mdp_transitions: usize,
    pub product_states: usize,
    pub product_transitions: usize,
    pub terminal_states: usize,
    pub class_sizes: Vec<usize>,
}

pub fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> Result<BuildStats> {
    let t = Instant::now();
    let mdp = files::read_mdp(&a.mdp)?;
    let pdfa = files::read_pdfa(&a.pdfa)?;
    let parse = t.elapsed();
    let report = mdp.validate();
    for w in &report.warnings {
        log::warn!("{}: {w}", a.mdp.display());
    }
    report.into_result().map_err(|e| Error::Parse {
        path: a.mdp.display().to_string(),
        message: e.to_string(),
    })?;
    for w in pdfa.warnings() {
        log::warn!("{}: {w}", a.pdfa.display());
    }
    let t = Instant::now();
    let product = build_product(&mdp, &pdfa)?;
    let build = t.elapsed();
    files::write_product(&a.out, &product)?;
    let stats = BuildStats {
        mdp_states: mdp.num_states(),
        mdp_transitions: mdp.num_transitions(),
        product_states: product.num_states(),
        product_transitions: product.num_transitions(),
        terminal_states: product.num_terminal(),
        class_sizes: product.classes().iter().map(|c| c.states.len()).collect(),
    };
    writeln!(out, "mdp: {} states, {} transitions", stats.mdp_states, stats.mdp_transitions)?;
    writeln!(
        out,
        "product: {} states, {} transitions, {} terminal",
        stats.product_states, stats.product_transitions, stats.terminal_states
    )?;
    for c in product.classes() {
        writeln!(out, "  class {}: {} terminal states", c.name, c.states.len())?;
    }
    writeln!(out, "time: parse {:.3}s, build {:.3}s", parse.as_secs_f64(), build.as_secs_f64())?;
    Ok(stats)
}

/// Reads weight vectors, one per non-empty line; `#` starts a comment.
pub fn read_weights(path: &Path, normalize: bool) -> Result<Vec<WeightVector>> {
    let text = fs::read_to_string(path)?;
    let bad = |message: String| Error::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut w = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| bad(format!("line {}: not a number: `{s}`", k + 1))))
            .collect::<Result<Vec<_>>>()?;
        if normalize {
            let s: f64 = w.iter().sum();
            if s > 0.0 {
                w.iter_mut().for_each(|x| *x /= s);
            }
        }
        out.push(WeightVector::new(w).map_err(|e| bad(format!("line {}: {e}", k + 1)))?);
    }
    if out.is_empty() {
        return Err(bad("no weight vectors".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveMetadata {
    pub product: String,
    pub weights: usize,
    pub distinct_solutions: usize,
    pub seed: Option<u64>,
    pub scheme: Option<String>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub eps: f64,
    pub max_sweeps: usize,
    pub max_identity_gap: f64,
    pub mutually_nondominated: bool,
    pub parse_seconds: f64,
    pub solve_seconds: f64,
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<SolutionReport> {
    let t = Instant::now();
    let product = files::read_product(&a.product)?;
    let momdp = Momdp::new(product);
    let n = momdp.num_objectives();
    let weights = match &a.weights {
        Some(path) => {
            let w = read_weights(path, a.normalize)?;
            if let Some(bad) = w.iter().find(|w| w.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bad.len(),
                });
            }
            w
        }
        None => {
            let scheme = match a.scheme {
                SchemeArg::Dirichlet => WeightScheme::Dirichlet,
                SchemeArg::Uniform => WeightScheme::Uniform,
            };
            sample_weights(a.num_weights, n, a.seed, scheme)
        }
    };
    let parse = t.elapsed();

    let t = Instant::now();
    let opts = SolverOptions {
        tolerance: a.tol,
        max_iterations: a.max_iters,
    };
    let front = pareto_front(&momdp, &weights, &opts, a.eps)?;
    let solve = t.elapsed();

    let r = momdp.reachability_matrix();
    let gap = front
        .solutions
        .iter()
        .map(|s| s.identity_gap(&r))
        .fold(0.0, f64::max);
    if gap > IDENTITY_TOLERANCE {
        return Err(Error::IdentityGap { gap });
    }

    let classes: Vec<String> = momdp.product().classes().iter().map(|c| c.name.clone()).collect();
    let report = SolutionReport::from_front(classes, &front);
    match &a.out {
        Some(path) => {
            report.write_csv(fs::File::create(path)?)?;
            let meta = SolveMetadata {
                product: a.product.display().to_string(),
                weights: weights.len(),
                distinct_solutions: front.solutions.len(),
                seed: a.weights.is_none().then_some(a.seed),
                scheme: a.weights.is_none().then(|| format!("{:?}", a.scheme).to_lowercase()),
                tolerance: a.tol,
                max_iterations: a.max_iters,
                eps: a.eps,
                max_sweeps: front.solutions.iter().map(|s| s.stats.iterations).max().unwrap_or(0),
                max_identity_gap: gap,
                mutually_nondominated: front.is_mutually_nondominated(),
                parse_seconds: parse.as_secs_f64(),
                solve_seconds: solve.as_secs_f64(),
            };
            files::write_json(&sidecar(path), &meta)?;
        }
        None => report.write_csv(&mut *out)?,
    }
    if let Some(dir) = &a.policies {
        fs::create_dir_all(dir)?;
        for k in 0..front.weights.len() {
            if front.duplicate_of(k).is_none() {
                let path = dir.join(format!("policy-{}.json", k + 1));
                files::write_policy(&path, momdp.product(), &front.for_weight(k).policy)?;
            }
        }
    }
    writeln!(
        out,
        "{} weights, {} distinct value vectors, max |V - R p| = {gap:.1e}",
        weights.len(),
        front.solutions.len()
    )?;
    if front.is_mutually_nondominated() {
        writeln!(out, "mutually nondominated: yes")?;
    } else {
        writeln!(out, "mutually nondominated: NO ({} dominated pairs)", front.dominated_pairs.len())?;
    }
    writeln!(out, "time: parse {:.3}s, solve {:.3}s", parse.as_secs_f64(), solve.as_secs_f64())?;
    Ok(report)
}

/// `report.csv` → `report.csv.meta.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub classes: Vec<String>,
    pub value: Vec<f64>,
    pub outcome_probs: Vec<f64>,
    pub identity_gap: f64,
}

pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<Evaluation> {
    let product = files::read_product(&a.product)?;
    let pi = files::read_policy(&a.policy, &product)?;
    let momdp = Momdp::new(product);
    let sol = evaluate_policy(&momdp, &pi)?;
    let gap = sol.identity_gap(&momdp.reachability_matrix());
    if gap > IDENTITY_TOLERANCE {
        return Err(Error::IdentityGap { gap });
    }
    let eval = Evaluation {
        classes: momdp.product().classes().iter().map(|c| c.name.clone()).collect(),
        value: sol.value.0,
        outcome_probs: sol.outcome_probs,
        identity_gap: gap,
    };
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    writeln!(out, "classes:  [{}]", eval.classes.join(", "))?;
    writeln!(out, "value:    [{}]", fmt(&eval.value))?;
    writeln!(out, "outcomes: [{}]", fmt(&eval.outcome_probs))?;
    if let Some(path) = &a.out {
        files::write_json(path, &eval)?;
    }
    Ok(eval)
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<crate::report::ComparisonReport> {
    let report = SolutionReport::read_path(&a.report)?;
    let order: Option<PartialOrder> = if let Some(p) = &a.product {
        Some(class_order(&Momdp::new(files::read_product(p)?))?)
    } else if let Some(p) = &a.pdfa {
        Some(files::read_pdfa(p)?.induced_order())
    } else {
        None
    };
    let c = compare_rows(&report, order.as_ref(), a.eps)?;
    writeln!(out, "{c}")?;
    Ok(c)
}

pub fn cmd_scenario(a: &ScenarioArgs, out: &mut dyn Write) -> Result<BuildStats> {
    let mut cfg: GardenConfig = match (&a.preset, &a.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?
        }
        (None, None) => return Err(Error::InvalidConfig("give --preset or --config".into())),
    };
    if let Some(h) = a.horizon {
        cfg.horizon = h;
    }
    let t = Instant::now();
    let (mdp, pdfa) = build_garden(&cfg)?;
    let elapsed = t.elapsed();
    fs::create_dir_all(&a.out)?;
    files::write_mdp(&a.out.join("mdp.json"), &mdp)?;
    files::write_pdfa(&a.out.join("pdfa.json"), &pdfa)?;
    let product = build_product(&mdp, &pdfa)?;
    let stats = BuildStats {
        mdp_states: mdp.num_states(),
        mdp_transitions: mdp.num_transitions(),
        product_states: product.num_states(),
        product_transitions: product.num_transitions(),
        terminal_states: product.num_terminal(),
        class_sizes: product.classes().iter().map(|c| c.states.len()).collect(),
    };
    writeln!(out, "mdp: {} states, {} transitions", stats.mdp_states, stats.mdp_transitions)?;
    writeln!(out, "product: {} states, {} transitions", stats.product_states, stats.product_transitions)?;
    writeln!(out, "time: {:.3}s", elapsed.as_secs_f64())?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(stats)
}

pub fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let momdp = Momdp::new(files::read_product(&a.product)?);
    let cap = OracleCap {
        max_states: a.max_states,
        max_actions: a.max_actions,
    };
    let t = Instant::now();
    let e = enumerate_solutions(&momdp, cap)?;
    let report = check_theorem1(&momdp, &e)?;
    writeln!(out, "{report}")?;
    writeln!(out, "time: {:.3}s", t.elapsed().as_secs_f64())?;
    if let Some(path) = &a.report {
        files::write_json(path, &report)?;
    }
    Ok(if report.is_clean() { 0 } else { 1 })
}
