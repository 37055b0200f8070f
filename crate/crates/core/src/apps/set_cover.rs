//! Fractional set cover as a boxed covering LP.

use crate::error::{Error, Result};
use crate::instance::{AdviceVector, ConstraintSource, CoveringLpInstance, SparseRow};
use crate::lp::{LpSolver, StepReport};
use crate::params::SolverParams;

/// `n` sets with costs; element `i` arrives with membership list `F_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSystem {
    pub costs: Vec<f64>,
    pub memberships: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn n(&self) -> usize {
        self.costs.len()
    }

    /// `d = max_i |F_i|`.
    pub fn max_frequency(&self) -> usize {
        self.memberships.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn rows(&self) -> Result<Vec<SparseRow>> {
        self.memberships
            .iter()
            .enumerate()
            .map(|(element, f)| {
                if f.is_empty() {
                    return Err(Error::UncoverableElement { element });
                }
                if let Some(&col) = f.iter().find(|&&j| j >= self.n()) {
                    return Err(Error::ColumnOutOfRange { col, n: self.n() });
                }
                Ok(SparseRow::indicator(f.iter().copied()))
            })
            .collect()
    }

    pub fn to_instance(&self) -> Result<CoveringLpInstance> {
        CoveringLpInstance::new(self.costs.clone(), self.rows()?, true)
    }
}

/// One 0/1 row per arriving element.
pub fn set_cover_stream(sys: &SetSystem) -> Result<ConstraintSource<'static>> {
    Ok(ConstraintSource::ExplicitRows(sys.rows()?))
}

/// Runs the boxed LP solver over the element stream.
pub fn solve_set_cover(
    sys: &SetSystem,
    advice: &AdviceVector,
    params: SolverParams,
) -> Result<(LpSolver, Vec<StepReport>)> {
    let mut solver = LpSolver::online(sys.costs.clone(), true, advice, params)?;
    let reports = solver.process_source(set_cover_stream(sys)?)?;
    Ok((solver, reports))
}
