//! Experiment configurations, per-run metrics and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{corrupt_advice, derive_seed, drift_instance, gen_synthetic_with, ingest_edge_list};
use crate::baselines::offline_solve;
use crate::error::{Error, Result};
use crate::instance::{AdviceVector, CoveringLpInstance};
use crate::lp::solve_instance;
use crate::params::SolverParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LambdaSweep,
    Corruption,
    Drift,
    Graphs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub density: f64,
    pub trials: usize,
    pub seed: u64,
    pub lambdas: Vec<f64>,
    /// Corruption probabilities; the `step` column holds the index into this list.
    pub corruption_rates: Vec<f64>,
    pub drift_steps: usize,
    /// Cells toggled per drift step; defaults to `n`.
    pub flips: Option<usize>,
    pub eps_offline: f64,
    pub cost_scale: f64,
    /// Edge-list snapshots for the graph sequence, in time order.
    pub graphs: Vec<PathBuf>,
    /// Use every snapshot instead of the first two.
    pub full: bool,
    pub params: SolverParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::LambdaSweep,
            n: 100,
            density: 0.5,
            trials: 20,
            seed: 0,
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            corruption_rates: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            drift_steps: 10,
            flips: None,
            eps_offline: 1e-6,
            cost_scale: 10.0,
            graphs: Vec::new(),
            full: false,
            params: SolverParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.trials < 1 {
            return bad("trials must be at least 1");
        }
        if self.n < 2 && self.kind != ExperimentKind::Graphs {
            return bad("n must be at least 2");
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad("density must lie in (0, 1]");
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return bad("lambdas must be a nonempty subset of [0, 1]");
        }
        if self.corruption_rates.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("corruption rates must lie in [0, 1]");
        }
        if !(self.eps_offline > 0.0 && self.eps_offline <= 0.5) {
            return bad("eps_offline must lie in (0, 0.5]");
        }
        if !(self.cost_scale > 0.0) {
            return bad("cost_scale must be positive");
        }
        if self.kind == ExperimentKind::Graphs && self.graphs.is_empty() {
            return bad("graph experiments need at least one snapshot path");
        }
        self.params.validate()
    }

    /// The synthetic instance used by `trial` in the synthetic designs.
    pub fn trial_instance(&self, trial: usize) -> CoveringLpInstance {
        gen_synthetic_with(self.n, self.density, derive_seed(self.seed, trial as u64, 1), self.cost_scale)
    }
}

pub const CSV_HEADER: &str =
    "lambda,trial,step,cost_alg,cost_advice,cost_offline,ratio,violations,iterations,phases,dual_scale";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub lambda: f64,
    pub trial: usize,
    pub step: usize,
    pub cost_alg: f64,
    pub cost_advice: f64,
    pub cost_offline: f64,
    pub ratio: f64,
    pub violations: usize,
    pub iterations: usize,
    pub phases: usize,
    pub dual_scale: f64,
}

impl RunMetrics {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.lambda,
            self.trial,
            self.step,
            self.cost_alg,
            self.cost_advice,
            self.cost_offline,
            self.ratio,
            self.violations,
            self.iterations,
            self.phases,
            self.dual_scale
        )
    }
}

/// Runs the solver on `inst` with `advice` and records the metrics.
pub fn measure(
    inst: &CoveringLpInstance,
    advice: &[f64],
    lambda: f64,
    offline: f64,
    trial: usize,
    step: usize,
    params: SolverParams,
) -> Result<RunMetrics> {
    let adv = AdviceVector { x_prime: advice.to_vec(), lambda };
    let (s, _) = solve_instance(inst, &adv, params)?;
    let cost_alg = s.cost();
    Ok(RunMetrics {
        lambda,
        trial,
        step,
        cost_alg,
        cost_advice: inst.cost(advice),
        cost_offline: offline,
        ratio: cost_alg / offline,
        violations: s.violations_seen(),
        iterations: s.iterations(),
        phases: s.phases(),
        dual_scale: s.dual_certificate().scale,
    })
}


fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<RunMetrics>> {
    let p = cfg.params;
    let mut out = Vec::new();
    match cfg.kind {
        ExperimentKind::LambdaSweep => {
            let inst = cfg.trial_instance(trial);
            let off = offline_solve(&inst, cfg.eps_offline)?;
            for &l in &cfg.lambdas {
                out.push(measure(&inst, &off.x, l, off.primal, trial, 0, p)?);
            }
        }
        ExperimentKind::Corruption => {
            let inst = cfg.trial_instance(trial);
            let off = offline_solve(&inst, cfg.eps_offline)?;
            for (k, &rate) in cfg.corruption_rates.iter().enumerate() {
                let adv = corrupt_advice(&off.x, rate, derive_seed(cfg.seed, trial as u64, 100 + k as u64));
                for &l in &cfg.lambdas {
                    out.push(measure(&inst, &adv, l, off.primal, trial, k, p)?);
                }
            }
        }
        ExperimentKind::Drift => {
            let first = cfg.trial_instance(trial);
            let advice = offline_solve(&first, cfg.eps_offline)?.x;
            let flips = cfg.flips.unwrap_or(cfg.n);
            let mut inst = first;
            for step in 0..=cfg.drift_steps {
                if step > 0 {
                    inst = drift_instance(&inst, flips, derive_seed(cfg.seed, trial as u64, 1000 + step as u64));
                }
                let off = offline_solve(&inst, cfg.eps_offline)?;
                for &l in &cfg.lambdas {
                    out.push(measure(&inst, &advice, l, off.primal, trial, step, p)?);
                }
            }
        }
        ExperimentKind::Graphs => {
            let take = if cfg.full { cfg.graphs.len() } else { cfg.graphs.len().min(2) };
            let seed = derive_seed(cfg.seed, trial as u64, 7);
            let mut prev: Option<(Vec<u64>, Vec<f64>)> = None;
            for (step, path) in cfg.graphs[..take].iter().enumerate() {
                let g = ingest_edge_list(path, cfg.cost_scale, seed)?;
                let inst = g.system.to_instance()?;
                let off = offline_solve(&inst, cfg.eps_offline)?;
                // previous snapshot's optimum, matched by vertex label
                let advice: Vec<f64> = match &prev {
                    None => vec![0.0; inst.n],
                    Some((labels, x)) => g
                        .labels
                        .iter()
                        .map(|l| labels.iter().position(|m| m == l).map_or(0.0, |k| x[k].min(1.0)))
                        .collect(),
                };
                for &l in &cfg.lambdas {
                    out.push(measure(&inst, &advice, l, off.primal, trial, step, p)?);
                }
                prev = Some((g.labels, off.x));
            }
        }
    }
    Ok(out)
}

/// Runs every trial (in parallel) and returns rows ordered by trial, then
/// by parameter.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunMetrics>> {
    cfg.validate()?;
    let per_trial: Vec<Vec<RunMetrics>> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Writes the CSV next to `path` and renames it into place.
pub fn write_csv(path: &Path, rows: &[RunMetrics]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.partial", name.to_string_lossy()));
    let result = (|| -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        writeln!(f, "{CSV_HEADER}")?;
        for r in rows {
            writeln!(f, "{}", r.csv_line())?;
        }
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}
