use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pdla::apps::{parse_groups, parse_tree, solve_gst_online, solve_set_cover};
use pdla::baselines::offline_solve;
use pdla::harness::{ingest_edge_list, run_experiment, write_csv, ExperimentConfig, ExperimentKind};
use pdla::instance::{parse_sdp_instance_with, validate_sdp_advice, AdviceVector};
use pdla::lp::solve_instance;
use pdla::sdp::solve_sdp_instance;
use pdla::{parse_advice, parse_lp_instance, validate_advice, Error, Result, SolverParams};

#[derive(Parser)]
#[command(name = "pdla", version, about = "Online covering LP/SDP solvers with fractional advice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a covering LP online, revealing rows in file order.
    SolveLp {
        #[arg(long)]
        instance: PathBuf,
        /// Advice file `{"x": [..], "lambda": ..}`; zero advice when omitted.
        #[arg(long)]
        advice: Option<PathBuf>,
        /// Confidence in [0, 1]; overrides the advice file.
        #[arg(long)]
        lambda: Option<f64>,
        /// Add `x <= 1` box constraints.
        #[arg(long)]
        boxed: bool,
        /// Write one JSON step report per row to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a covering SDP online, revealing the B matrices in file order.
    SolveSdp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        advice: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        boxed: bool,
        #[arg(long)]
        trace: bool,
    },
    /// Fractional vertex cover of an edge-list graph, edges arriving online.
    SetCover {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        advice: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        cost_scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fractional group Steiner tree on a rooted tree, groups arriving online.
    Gst {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        groups: PathBuf,
        #[arg(long)]
        advice: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run an experiment design and write its CSV.
    Experiment {
        design: Design,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use every graph snapshot instead of the first two.
        #[arg(long)]
        full: bool,
    },
    /// Solve an instance offline and print the primal/dual certificate.
    Offline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Design {
    LambdaSweep,
    Corruption,
    Drift,
    Graphs,
}

impl From<Design> for ExperimentKind {
    fn from(d: Design) -> Self {
        match d {
            Design::LambdaSweep => ExperimentKind::LambdaSweep,
            Design::Corruption => ExperimentKind::Corruption,
            Design::Drift => ExperimentKind::Drift,
            Design::Graphs => ExperimentKind::Graphs,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Loads advice, applying the `--lambda` override; an empty `x` means zero advice.
fn load_advice(path: Option<&Path>, lambda: Option<f64>, n: usize) -> Result<(Vec<f64>, f64)> {
    let mut adv = match path {
        Some(p) => parse_advice(&read(p)?)?,
        None => AdviceVector::zeros(n, 1.0),
    };
    if adv.x_prime.is_empty() {
        adv.x_prime = vec![0.0; n];
    }
    Ok((adv.x_prime, lambda.unwrap_or(adv.lambda)))
}

fn emit(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{value}")?;
    Ok(())
}

fn trace_lines<T: serde::Serialize>(items: &[T]) -> Result<()> {
    let mut err = std::io::stderr().lock();
    for item in items {
        writeln!(err, "{}", serde_json::to_string(item)?)?;
    }
    Ok(())
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::SolveLp { instance, advice, lambda, boxed, trace, seed } => {
            let mut inst = parse_lp_instance(&read(&instance)?)?;
            inst.boxed |= boxed;
            let (x, l) = load_advice(advice.as_deref(), lambda, inst.n)?;
            let adv = validate_advice(x, l, &inst)?;
            let params = SolverParams { seed, ..SolverParams::default() };
            let (solver, reports) = solve_instance(&inst, &adv, params)?;
            if trace {
                trace_lines(&reports)?;
            }
            let cert = if inst.boxed { solver.dual_certificate_box() } else { solver.dual_certificate() };
            emit(&json!({
                "x": solver.current_solution(),
                "cost": solver.cost(),
                "phases": solver.phases(),
                "iterations": solver.iterations(),
                "violations": solver.violations_seen(),
                "dual_scale": cert.scale,
                "dual_objective": cert.objective,
            }))
        }
        Command::SolveSdp { instance, advice, lambda, boxed, trace } => {
            let params = SolverParams::default();
            let mut inst = parse_sdp_instance_with(&read(&instance)?, &params)?;
            inst.boxed |= boxed;
            let (x, l) = load_advice(advice.as_deref(), lambda, inst.n)?;
            let adv = validate_sdp_advice(x, l, &inst)?;
            let (solver, reports) = solve_sdp_instance(&inst, &adv, params)?;
            if trace {
                trace_lines(&reports)?;
            }
            emit(&json!({
                "x": solver.current_solution(),
                "cost": solver.cost(),
                "phases": solver.phases(),
                "iterations": solver.iterations(),
                "violations": solver.violations_seen(),
                "dual_scale": solver.dual_certificate().scale,
            }))
        }
        Command::SetCover { graph, advice, lambda, cost_scale, seed } => {
            let g = ingest_edge_list(&graph, cost_scale, seed)?;
            let (x, l) = load_advice(advice.as_deref(), lambda, g.system.n())?;
            let adv = validate_advice(x, l, &g.system.to_instance()?)?;
            let (solver, _) = solve_set_cover(&g.system, &adv, SolverParams::default())?;
            emit(&json!({
                "labels": g.labels,
                "x": solver.current_solution(),
                "cost": solver.cost(),
                "elements": g.system.memberships.len(),
                "self_loops_skipped": g.self_loops_skipped,
                "phases": solver.phases(),
                "violations": solver.violations_seen(),
            }))
        }
        Command::Gst { tree, groups, advice, lambda } => {
            let t = parse_tree(&read(&tree)?)?;
            let g = t.groups_from_labels(&parse_groups(&read(&groups)?)?)?;
            let (x, l) = load_advice(advice.as_deref(), lambda, t.costs.len())?;
            let out = solve_gst_online(&t, &g, &x, l, SolverParams::default())?;
            let edges: Vec<[u64; 2]> = t.edges.iter().map(|&(p, c)| [t.ids[p], t.ids[c]]).collect();
            emit(&json!({ "edges": edges, "x": out.x, "cost": out.cost, "oracle_rows": out.oracle_rows }))
        }
        Command::Experiment { design, config, out, full } => {
            let mut cfg: ExperimentConfig = serde_json::from_str(&read(&config)?)?;
            cfg.kind = design.into();
            cfg.full |= full;
            let rows = run_experiment(&cfg)?;
            write_csv(&out, &rows)?;
            emit(&json!({ "rows": rows.len(), "out": out }))
        }
        Command::Offline { instance, eps } => {
            let inst = parse_lp_instance(&read(&instance)?)?;
            emit(&serde_json::to_value(offline_solve(&inst, eps)?)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
