//! Online covering SDP solver with fractional advice, with and without the
//! `x <= 1` box.
//!
//! Each arriving `B^(i)` is covered by repeatedly picking a violated rank-one
//! direction `V = v v^T` and running the LP growth step on the implicit
//! constraint `Σ_j (A_j ⊗ V) x_j >= B^(i) ⊗ V`. A direction is kept while it
//! still separates; otherwise the minimum eigenvector of
//! `Σ_j A_j x_j − B^(i)` supplies the next one.

use serde::{Deserialize, Serialize};

use crate::engine::{PhaseCore, StopEvent};
use crate::error::{Error, Result};
use crate::instance::{check_b_arrival, validate_sdp_advice, AdviceVector, CoveringSdpInstance};
use crate::linalg::{frobenius, min_eigpair, SymMatrix};
use crate::lp::{violation_bound, StopReason};
use crate::params::SolverParams;

/// A violated rank-one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    pub v: Vec<f64>,
    pub matrix: SymMatrix,
    /// `λ_min(Σ A_j x_j − B)`.
    pub gap: f64,
}

fn psd_slack(b: &SymMatrix, params: &SolverParams) -> f64 {
    params.tol_psd * b.frobenius_norm().max(1.0)
}

/// Returns a violated direction, or `None` if `Σ A_j x_j ⪰ B` within tolerance.
pub fn separation(
    x: &[f64],
    a: &[SymMatrix],
    b: &SymMatrix,
    params: &SolverParams,
) -> Result<Option<SeparationResult>> {
    let mut m = b.scaled(-1.0);
    for (aj, &xj) in a.iter().zip(x) {
        if xj != 0.0 {
            m.add_scaled(aj, xj)?;
        }
    }
    let (gap, v) = min_eigpair(&m, params.tol_eig)?;
    if gap >= -psd_slack(b, params) {
        return Ok(None);
    }
    let matrix = SymMatrix::outer(&v);
    Ok(Some(SeparationResult { v, matrix, gap }))
}

/// One growth iteration, recorded when tracing is on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpIterRecord {
    pub gap: f64,
    pub v: Vec<f64>,
    pub delta: f64,
    pub event: StopEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpStepReport {
    pub round: usize,
    pub phase: usize,
    pub phases_entered: usize,
    pub iterations: usize,
    /// `λ_min(Σ A_j x_j − B^(i))` for the published solution.
    pub final_gap: f64,
    pub stop_reason: StopReason,
    pub cost: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tight_added: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<SdpIterRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpDualCertificate {
    pub y: SymMatrix,
    pub z: Vec<f64>,
    /// `max_j (A_j ⊗ Y − z_j) / c_j`.
    pub scale: f64,
    /// `B^(i) ⊗ Y − 1^T z` for the latest `B^(i)`.
    pub objective: f64,
}

pub struct SdpSolver {
    params: SolverParams,
    core: PhaseCore,
    a: Vec<SymMatrix>,
    d: usize,
    y: SymMatrix,
    last_b: Option<SymMatrix>,
    round: usize,
    trace: bool,
    beta: f64,
}

impl SdpSolver {
    pub fn new(inst: &CoveringSdpInstance, advice: &AdviceVector, params: SolverParams) -> Result<Self> {
        params.validate()?;
        let advice = validate_sdp_advice(advice.x_prime.clone(), advice.lambda, inst)?;
        Ok(Self {
            params,
            core: PhaseCore::new(inst.c.clone(), advice.x_prime, advice.lambda, inst.boxed),
            a: inst.a.clone(),
            d: inst.d,
            y: SymMatrix::zeros(inst.d),
            last_b: None,
            round: 0,
            trace: false,
            beta: 0.0,
        })
    }

    /// Records per-iteration data in each report.
    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    /// Uses `alpha1` instead of deriving `α(1)` from the first nonzero `B`.
    pub fn with_initial_alpha(mut self, alpha1: f64) -> Self {
        self.core.start(alpha1);
        self
    }

    /// `min_j c_j tr(B) / tr(A_j)` over `A_j` with positive trace.
    pub fn initial_alpha(c: &[f64], a: &[SymMatrix], b: &SymMatrix) -> f64 {
        let tb = b.trace();
        a.iter().zip(c).filter(|(m, _)| m.trace() > 0.0).map(|(m, c)| c * tb / m.trace()).fold(f64::INFINITY, f64::min)
    }

    fn combination(&self, x: &[f64]) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.d);
        for (aj, &xj) in self.a.iter().zip(x) {
            if xj != 0.0 {
                m.add_scaled(aj, xj).expect("dimensions validated");
            }
        }
        m
    }

    fn restart(&mut self) -> Result<()> {
        self.core.restart(self.params.max_phase)?;
        self.y = SymMatrix::zeros(self.d);
        Ok(())
    }

    /// Processes one arriving lower-bound matrix `B^(i)`.
    pub fn process_matrix(&mut self, b: &SymMatrix) -> Result<SdpStepReport> {
        if b.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: b.dim() });
        }
        check_b_arrival(self.last_b.as_ref(), b, self.round, &self.params)?;
        self.round += 1;
        let i = self.round;
        self.last_b = Some(b.clone());

        if !self.core.started() && b.trace() > 0.0 {
            let alpha1 = Self::initial_alpha(&self.core.c, &self.a, b);
            if !alpha1.is_finite() {
                return Err(Error::NoFeasibleSolution { round: i });
            }
            self.core.start(alpha1);
        }
        if !self.core.started() {
            // B is the zero matrix and x = 0 covers it
            return Ok(self.report(i, 0, 0, StopReason::AlreadySatisfied, Vec::new(), Vec::new(), b));
        }

        let slack = psd_slack(b, &self.params);
        let advice_feasible = {
            let mut m = self.combination(&self.core.advice);
            m.add_scaled(b, -1.0)?;
            min_eigpair(&m, self.params.tol_eig)?.0 >= -slack
        };

        let mut phases_entered = 0;
        let mut iterations = 0usize;
        let mut tight_added = Vec::new();
        let mut records = Vec::new();
        let mut direction: Option<(Vec<f64>, SymMatrix)> = None;

        let stop_reason = loop {
            if self.core.exhausted(&self.params) {
                self.restart()?;
                phases_entered += 1;
                continue;
            }
            let x = self.core.x.clone();
            let kept = direction.take().filter(|(_, vm)| {
                let ax: f64 = self.a.iter().zip(&x).map(|(aj, xj)| frobenius(aj, vm).unwrap() * xj).sum();
                ax - frobenius(b, vm).unwrap() < -slack
            });
            let (v, vm, gap) = match kept {
                Some((v, vm)) => {
                    let ax: f64 = self.a.iter().zip(&x).map(|(aj, xj)| frobenius(aj, &vm).unwrap() * xj).sum();
                    let gap = ax - frobenius(b, &vm)?;
                    (v, vm, gap)
                }
                None => match separation(&x, &self.a, b, &self.params)? {
                    None => {
                        break if iterations == 0 { StopReason::AlreadySatisfied } else { StopReason::Satisfied }
                    }
                    Some(sep) => {
                        self.core.violations_seen += 1;
                        (sep.v, sep.matrix, sep.gap)
                    }
                },
            };
            let a_dir: Vec<f64> = self.a.iter().map(|aj| frobenius(aj, &vm)).collect::<Result<_>>()?;
            let b_dir = frobenius(b, &vm)?;
            if self.core.boxed {
                tight_added.extend(self.core.refresh_tight());
            }
            let (capacity, free_mass) = self.core.capacity(&a_dir, b_dir);
            if free_mass <= 0.0 {
                return Err(Error::NoFeasibleSolution { round: i });
            }
            if capacity <= 0.0 {
                return Err(Error::NoProgress);
            }
            for (j, &aj) in a_dir.iter().enumerate() {
                self.beta = self.beta.max(aj / (b_dir * self.core.c[j]));
            }
            let cap = 10.0 * violation_bound(self.core.n, 2.0 * self.core.alpha, self.core.alpha1, self.beta, 8.0);
            if iterations as f64 > cap {
                return Err(Error::NoProgress);
            }

            let coeffs = self.core.compute_coeffs(&a_dir, b_dir, advice_feasible);
            let out = self.core.iterate(&a_dir, &coeffs, &self.params)?;
            iterations += 1;
            self.y.add_scaled(&vm, out.delta)?;
            tight_added.extend(out.newly_tight);
            if self.trace {
                records.push(SdpIterRecord { gap, v: v.clone(), delta: out.delta, event: out.event });
            }
            match out.event {
                StopEvent::RowSatisfiedBy2 => {}
                StopEvent::ObjectiveReached => {
                    self.restart()?;
                    phases_entered += 1;
                    direction = Some((v, vm));
                }
                StopEvent::AdviceHit(_) | StopEvent::CapReached(_) => direction = Some((v, vm)),
            }
        };
        Ok(self.report(i, phases_entered, iterations, stop_reason, tight_added, records, b))
    }

    #[allow(clippy::too_many_arguments)]
    fn report(
        &self,
        round: usize,
        phases_entered: usize,
        iterations: usize,
        stop_reason: StopReason,
        tight_added: Vec<usize>,
        records: Vec<SdpIterRecord>,
        b: &SymMatrix,
    ) -> SdpStepReport {
        let final_gap = self.gap_for(&self.core.x_best, b).unwrap_or(f64::NAN);
        SdpStepReport {
            round,
            phase: self.core.r,
            phases_entered,
            iterations,
            final_gap,
            stop_reason,
            cost: self.cost(),
            tight_added,
            records,
        }
    }

    /// Box-constrained processing; errors if the solver is not boxed.
    pub fn process_matrix_box(&mut self, b: &SymMatrix) -> Result<SdpStepReport> {
        if !self.core.boxed {
            return Err(Error::InvalidParams("process_matrix_box on an unboxed solver".into()));
        }
        self.process_matrix(b)
    }

    fn gap_for(&self, x: &[f64], b: &SymMatrix) -> Result<f64> {
        let mut m = self.combination(x);
        m.add_scaled(b, -1.0)?;
        Ok(min_eigpair(&m, self.params.tol_eig)?.0)
    }

    /// `λ_min(Σ A_j x_j − B)` for the published solution.
    pub fn feasibility_gap(&self, b: &SymMatrix) -> Result<f64> {
        self.gap_for(&self.core.x_best, b)
    }

    pub fn current_solution(&self) -> Vec<f64> {
        self.core.x_best.clone()
    }

    pub fn phase_solution(&self) -> Vec<f64> {
        self.core.x.clone()
    }

    pub fn cost(&self) -> f64 {
        self.core.best_cost()
    }

    pub fn dual_certificate(&self) -> SdpDualCertificate {
        let objective = match &self.last_b {
            Some(b) => frobenius(b, &self.y).unwrap_or(0.0) - self.core.z.iter().sum::<f64>(),
            None => 0.0,
        };
        SdpDualCertificate { y: self.y.clone(), z: self.core.z.clone(), scale: self.core.dual_scale(), objective }
    }

    pub fn alpha1(&self) -> f64 {
        self.core.alpha1
    }

    pub fn phases(&self) -> usize {
        self.core.r
    }

    pub fn iterations(&self) -> usize {
        self.core.iterations
    }

    pub fn violations_seen(&self) -> usize {
        self.core.violations_seen
    }

    /// `max a_j / (b c_j)` over the directions used so far.
    pub fn beta_seen(&self) -> f64 {
        self.beta
    }
}

/// Runs the solver over every `B^(i)` of `inst`.
pub fn solve_sdp_instance(
    inst: &CoveringSdpInstance,
    advice: &AdviceVector,
    params: SolverParams,
) -> Result<(SdpSolver, Vec<SdpStepReport>)> {
    let mut solver = SdpSolver::new(inst, advice, params)?;
    let mut reports = Vec::with_capacity(inst.b.len());
    for b in &inst.b {
        reports.push(solver.process_matrix(b)?);
    }
    Ok((solver, reports))
}
