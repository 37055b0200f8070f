//! Online covering LP solver with fractional advice, with and without the
//! `x <= 1` box.
//!
//! Rows arrive one at a time. Each violated row is grown toward value 2 (or
//! until the phase budget `α(r)` is spent, in which case `α` doubles and the
//! phase restarts from the advice-clipped initial point). The published
//! solution is the coordinate-wise max over all phases.

use serde::{Deserialize, Serialize};

use crate::engine::{IterationCoeffs, PhaseCore, StopEvent};
use crate::error::{Error, Result};
use crate::instance::{AdviceVector, ConstraintSource, CoveringLpInstance, SparseRow};
use crate::params::SolverParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The row was already satisfied on arrival.
    AlreadySatisfied,
    /// The last growth iteration brought the row to value 2.
    SatisfiedBy2,
    /// The row became satisfied after an advice or cap event, or after a
    /// phase restart, below value 2.
    Satisfied,
}

/// Per-round summary, emitted as a JSON line by `--trace`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub round: usize,
    pub phase: usize,
    pub phases_entered: usize,
    pub iterations: usize,
    pub final_row_value: f64,
    pub stop_reason: StopReason,
    pub cost: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tight_added: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    /// `(round, y_round)` for rounds of the current phase with `y > 0`.
    pub y: Vec<(usize, f64)>,
    /// Box duals in the instance's units; all zero without a box.
    pub z: Vec<f64>,
    /// `max_j (Σ_k a_kj y_k − z_j) / c_j`.
    pub scale: f64,
    /// `1^T y − u^T z`.
    pub objective: f64,
}

pub struct LpSolver {
    params: SolverParams,
    core: PhaseCore,
    /// Per-column upper bounds (all ones unless given); the core works in
    /// units where every bound is 1.
    unit: Vec<f64>,
    alpha_override: Option<f64>,
    round: usize,
    y: Vec<(usize, f64)>,
    phase_starts: Vec<usize>,
    col_max: Vec<f64>,
    col_min: Vec<f64>,
    sparsity: f64,
}

impl LpSolver {
    pub fn new(inst: &CoveringLpInstance, advice: &AdviceVector, params: SolverParams) -> Result<Self> {
        let unit = (0..inst.n).map(|j| inst.upper_bound(j)).collect();
        Self::with_units(inst.c.clone(), inst.boxed, unit, advice, params)
    }

    /// Solver for a stream whose rows are not known up front.
    pub fn online(c: Vec<f64>, boxed: bool, advice: &AdviceVector, params: SolverParams) -> Result<Self> {
        let n = c.len();
        Self::with_units(c, boxed, vec![1.0; n], advice, params)
    }

    fn with_units(
        c: Vec<f64>,
        boxed: bool,
        unit: Vec<f64>,
        advice: &AdviceVector,
        params: SolverParams,
    ) -> Result<Self> {
        params.validate()?;
        let n = c.len();
        let probe = CoveringLpInstance { n, c: c.clone(), rows: vec![], boxed, upper: boxed.then(|| unit.clone()) };
        probe.validate()?;
        crate::instance::validate_advice(advice.x_prime.clone(), advice.lambda, &probe)?;
        let c_scaled = c.iter().zip(&unit).map(|(c, u)| c * u).collect();
        let adv_scaled = advice.x_prime.iter().zip(&unit).map(|(x, u)| x / u).collect();
        Ok(Self {
            params,
            core: PhaseCore::new(c_scaled, adv_scaled, advice.lambda, boxed),
            unit,
            alpha_override: None,
            round: 0,
            y: Vec::new(),
            phase_starts: Vec::new(),
            col_max: vec![0.0; n],
            col_min: vec![f64::INFINITY; n],
            sparsity: 0.0,
        })
    }

    /// Uses `alpha1` instead of deriving `α(1)` from the first row.
    pub fn with_initial_alpha(mut self, alpha1: f64) -> Self {
        self.alpha_override = Some(alpha1);
        self
    }

    pub fn n(&self) -> usize {
        self.core.n
    }

    pub fn boxed(&self) -> bool {
        self.core.boxed
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    fn scaled_row(&self, row: &SparseRow) -> Vec<f64> {
        let mut a = vec![0.0; self.core.n];
        for &(j, v) in &row.entries {
            a[j] += v * self.unit[j];
        }
        a
    }

    fn dot(a: &[f64], x: &[f64]) -> f64 {
        a.iter().zip(x).map(|(a, x)| a * x).sum()
    }

    fn observe_row(&mut self, row: &SparseRow) {
        for (j, v) in row.positive() {
            let r = v * self.unit[j];
            self.col_max[j] = self.col_max[j].max(r);
            self.col_min[j] = self.col_min[j].min(r);
        }
    }

    /// Iteration coefficients the next growth step would use for `row`.
    pub fn compute_coeffs(&self, row: &SparseRow) -> IterationCoeffs {
        let a = self.scaled_row(row);
        let feasible = Self::dot(&a, &self.core.advice) >= 1.0 - self.params.tol_feas;
        self.core.compute_coeffs(&a, 1.0, feasible)
    }

    /// Next stop event for `row` from the current phase state: `(Δy, event)`.
    pub fn find_stop_event(&self, row: &SparseRow, coeffs: &IterationCoeffs) -> Result<(f64, StopEvent)> {
        let a = self.scaled_row(row);
        self.core.find_stop_event(&a, coeffs, &self.params).map(|(d, e, _)| (d, e))
    }

    /// Processes one arriving covering constraint.
    pub fn process_row(&mut self, row: &SparseRow) -> Result<StepReport> {
        self.round += 1;
        let i = self.round;
        row.validate(self.core.n, i - 1)?;
        self.observe_row(row);
        let a = self.scaled_row(row);

        if !self.core.started() {
            let alpha1 = match self.alpha_override {
                Some(a1) => a1,
                None => (0..self.core.n)
                    .filter(|&j| a[j] > 0.0)
                    .map(|j| self.core.c[j] / a[j])
                    .fold(f64::INFINITY, f64::min),
            };
            self.core.start(alpha1);
            self.phase_starts.push(i);
        }

        let tol = self.params.tol_feas;
        let advice_feasible = Self::dot(&a, &self.core.advice) >= 1.0 - tol;
        let mut phases_entered = 0;
        let mut iterations = 0;
        let mut y_round = 0.0;
        let mut counted = false;
        let mut tight_added = Vec::new();

        let stop_reason = loop {
            if self.core.exhausted(&self.params) {
                self.restart(i)?;
                phases_entered += 1;
                y_round = 0.0;
                counted = false;
                continue;
            }
            if Self::dot(&a, &self.core.x) >= 1.0 - tol {
                break if iterations == 0 { StopReason::AlreadySatisfied } else { StopReason::Satisfied };
            }
            let (capacity, free_mass) = self.core.capacity(&a, 1.0);
            if self.core.boxed {
                tight_added.extend(self.core.refresh_tight());
                let (capacity, free_mass) = self.core.capacity(&a, 1.0);
                if free_mass <= 0.0 {
                    return Err(Error::NoFeasibleSolution { round: i });
                }
                self.sparsity = self.sparsity.max(free_mass / capacity);
            } else if free_mass <= 0.0 || capacity <= 0.0 {
                return Err(Error::NoProgress);
            }
            if !counted {
                self.core.violations_seen += 1;
                counted = true;
            }
            let coeffs = self.core.compute_coeffs(&a, 1.0, advice_feasible);
            let out = self.core.iterate(&a, &coeffs, &self.params)?;
            iterations += 1;
            y_round += out.delta;
            tight_added.extend(out.newly_tight);
            match out.event {
                StopEvent::RowSatisfiedBy2 => break StopReason::SatisfiedBy2,
                StopEvent::ObjectiveReached => {
                    self.restart(i)?;
                    phases_entered += 1;
                    y_round = 0.0;
                    counted = false;
                }
                StopEvent::AdviceHit(_) | StopEvent::CapReached(_) => {}
            }
        };
        if y_round > 0.0 {
            self.y.push((i, y_round));
        }
        Ok(StepReport {
            round: i,
            phase: self.core.r,
            phases_entered,
            iterations,
            final_row_value: Self::dot(&a, &self.core.x),
            stop_reason,
            cost: self.cost(),
            tight_added,
        })
    }

    fn restart(&mut self, round: usize) -> Result<()> {
        self.core.restart(self.params.max_phase)?;
        self.y.clear();
        self.phase_starts.push(round);
        Ok(())
    }

    /// Box-constrained processing; errors if the solver is not boxed.
    pub fn process_row_box(&mut self, row: &SparseRow) -> Result<StepReport> {
        if !self.core.boxed {
            return Err(Error::InvalidParams("process_row_box on an unboxed solver".into()));
        }
        self.process_row(row)
    }

    /// Pulls rows from `source` until it is exhausted. Oracles are queried
    /// with the current phase's solution, which lower-bounds the published one.
    pub fn process_source(&mut self, source: ConstraintSource<'_>) -> Result<Vec<StepReport>> {
        let mut reports = Vec::new();
        match source {
            ConstraintSource::ExplicitRows(rows) => {
                for row in &rows {
                    reports.push(self.process_row(row)?);
                }
            }
            ConstraintSource::Oracle(mut oracle) => loop {
                let x = self.phase_solution();
                let Some(row) = oracle(&x)? else { break };
                if row.positive().next().is_none() {
                    return Err(Error::EmptyRow { row: self.round });
                }
                let value = row.dot(&x);
                if value >= 1.0 - self.params.tol_feas {
                    return Err(Error::OracleContract { value });
                }
                reports.push(self.process_row(&row)?);
            },
        }
        Ok(reports)
    }

    /// Published solution `max_ℓ x^(ℓ)`, in instance units.
    pub fn current_solution(&self) -> Vec<f64> {
        self.core.x_best.iter().zip(&self.unit).map(|(x, u)| x * u).collect()
    }

    /// Current phase's `x^(r)`, in instance units.
    pub fn phase_solution(&self) -> Vec<f64> {
        self.core.x.iter().zip(&self.unit).map(|(x, u)| x * u).collect()
    }

    pub fn cost(&self) -> f64 {
        self.core.best_cost()
    }

    pub fn dual_certificate(&self) -> DualCertificate {
        let z: Vec<f64> = self.core.z.iter().zip(&self.unit).map(|(z, u)| z / u).collect();
        let objective = self.y.iter().map(|p| p.1).sum::<f64>() - self.core.z.iter().sum::<f64>();
        DualCertificate { y: self.y.clone(), z, scale: self.core.dual_scale(), objective }
    }

    pub fn dual_certificate_box(&self) -> DualCertificate {
        self.dual_certificate()
    }

    /// Largest `Σ_{j∉T} a_j / (1 − Σ_{j∈T} a_j)` seen at growth steps (box only).
    pub fn sparsity_estimate(&self) -> f64 {
        self.sparsity
    }

    /// `max_j a^max_j / a^min_j` over revealed rows.
    pub fn kappa_seen(&self) -> f64 {
        (0..self.core.n)
            .filter(|&j| self.col_max[j] > 0.0)
            .map(|j| self.col_max[j] / self.col_min[j])
            .fold(1.0, f64::max)
    }

    /// `max_j a^max_j / c_j` over revealed rows.
    pub fn beta_seen(&self) -> f64 {
        (0..self.core.n).map(|j| self.col_max[j] / self.core.c[j]).fold(0.0, f64::max)
    }

    pub fn alpha1(&self) -> f64 {
        self.core.alpha1
    }

    pub fn alpha(&self) -> f64 {
        self.core.alpha
    }

    pub fn phases(&self) -> usize {
        self.core.r
    }

    pub fn phase_starts(&self) -> &[usize] {
        &self.phase_starts
    }

    pub fn iterations(&self) -> usize {
        self.core.iterations
    }

    pub fn violations_seen(&self) -> usize {
        self.core.violations_seen
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    /// Columns currently at their cap.
    pub fn tight_set(&self) -> Vec<usize> {
        (0..self.core.n).filter(|&j| self.core.tight[j]).collect()
    }
}

/// Runs the solver over every row of `inst`.
pub fn solve_instance(
    inst: &CoveringLpInstance,
    advice: &AdviceVector,
    params: SolverParams,
) -> Result<(LpSolver, Vec<StepReport>)> {
    let mut solver = LpSolver::new(inst, advice, params)?;
    let reports = solver.process_source(ConstraintSource::ExplicitRows(inst.rows.clone()))?;
    Ok((solver, reports))
}

/// Violation-count bound `C·n·(log₂(cx/α1) + 1)·(max(0, log₂ n + log₂(cx·β)) + 3)`.
pub fn violation_bound(n: usize, cost: f64, alpha1: f64, beta: f64, slack: f64) -> f64 {
    let n = n as f64;
    let phase_term = (cost / alpha1).log2().max(0.0) + 1.0;
    let growth_term = (n.log2() + (cost * beta).log2()).max(0.0) + 3.0;
    slack * n * phase_term * growth_term
}

/// Box iteration bound `C·n·(log₂(2s) + 1)·(log₂(cx/α1) + 1)`.
pub fn box_iteration_bound(n: usize, cost: f64, alpha1: f64, sparsity: f64, slack: f64) -> f64 {
    let n = n as f64;
    let phase_term = (cost / alpha1).log2().max(0.0) + 1.0;
    let s_term = (2.0 * sparsity.max(1.0)).log2() + 1.0;
    slack * n * s_term * phase_term
}
