//! Comparators: the switch algorithm, pure online, advice scaling and an
//! exact offline optimum.

mod offline;

pub use offline::{offline_solve, OfflineCertificate};

use crate::error::{Error, Result};
use crate::instance::{AdviceVector, CoveringLpInstance, SparseRow};
use crate::lp::{solve_instance, LpSolver};
use crate::params::SolverParams;

/// Follows a pure online solver until feasible advice becomes cheaper, then
/// switches to the advice once; falls back to the online solution (merged
/// with the advice) if later rows make the advice infeasible.
pub struct SwitchState {
    /// Round at which the switch to the advice happened.
    pub i_a: Option<usize>,
    pub inner: LpSolver,
    pub x: Vec<f64>,
    c: Vec<f64>,
    advice: Vec<f64>,
    advice_cost: f64,
    /// `min_i A_i x'` over revealed rows.
    advice_min_row: f64,
    round: usize,
    tol_feas: f64,
}

impl SwitchState {
    pub fn new(c: Vec<f64>, boxed: bool, advice: Vec<f64>, params: SolverParams) -> Result<Self> {
        let n = c.len();
        let inner = LpSolver::online(c.clone(), boxed, &AdviceVector::zeros(n, 1.0), params)?;
        if advice.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: advice.len() });
        }
        let advice_cost = c.iter().zip(&advice).map(|(c, x)| c * x).sum();
        Ok(Self {
            i_a: None,
            inner,
            x: vec![0.0; n],
            c,
            advice,
            advice_cost,
            advice_min_row: f64::INFINITY,
            round: 0,
            tol_feas: params.tol_feas,
        })
    }

    pub fn process_row(&mut self, row: &SparseRow) -> Result<()> {
        self.round += 1;
        let i = self.round;
        let prev_inner = self.inner.current_solution();
        self.inner.process_row(row)?;
        let inner_x = self.inner.current_solution();
        let inner_cost = self.inner.cost();
        self.advice_min_row = self.advice_min_row.min(row.dot(&self.advice));
        let feasible = self.advice_min_row >= 1.0 - self.tol_feas;

        if feasible {
            if self.advice_cost >= inner_cost {
                self.x = inner_x;
            } else if self.i_a.is_none() {
                self.i_a = Some(i);
                self.x = self.advice.iter().zip(&prev_inner).map(|(a, b)| a.max(*b)).collect();
            }
        } else if self.i_a.is_none() {
            self.x = inner_x;
        } else {
            self.x = self.advice.iter().zip(&inner_x).map(|(a, b)| a.max(*b)).collect();
        }
        Ok(())
    }

    pub fn cost(&self) -> f64 {
        self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    pub i_a: Option<usize>,
    pub inner_cost: f64,
}

pub fn simple_switch(inst: &CoveringLpInstance, advice: &[f64], params: SolverParams) -> Result<SwitchOutcome> {
    let mut st = SwitchState::new(inst.c.clone(), inst.boxed, advice.to_vec(), params)?;
    for row in &inst.rows {
        st.process_row(row)?;
    }
    Ok(SwitchOutcome { cost: st.cost(), i_a: st.i_a, inner_cost: st.inner.cost(), x: st.x })
}

/// The LP solver with `λ = 1` and no advice.
pub fn pure_online(inst: &CoveringLpInstance, params: SolverParams) -> Result<LpSolver> {
    solve_instance(inst, &AdviceVector::zeros(inst.n, 1.0), params).map(|(s, _)| s)
}

/// On each violated row, raises `x` to the advice scaled to satisfy that row.
/// The scale factor is never below 1 so earlier progress is kept.
pub fn advice_scaling(inst: &CoveringLpInstance, advice: &[f64], tol_feas: f64) -> Result<Vec<f64>> {
    if advice.len() != inst.n {
        return Err(Error::LengthMismatch { expected: inst.n, got: advice.len() });
    }
    let mut x = vec![0.0; inst.n];
    for (i, row) in inst.rows.iter().enumerate() {
        if row.dot(&x) >= 1.0 - tol_feas {
            continue;
        }
        let cover = row.dot(advice);
        if cover <= 0.0 {
            return Err(Error::UnscalableRow { row: i });
        }
        let factor = (1.0 / cover).max(1.0);
        for (xj, &aj) in x.iter_mut().zip(advice) {
            *xj = xj.max(aj * factor);
        }
    }
    Ok(x)
}
