use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances and safety caps shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Relative tolerance of the event bisection.
    pub tol_bisect: f64,
    /// Slack allowed on a covering constraint before it counts as violated.
    pub tol_feas: f64,
    /// Eigenvalue slack, relative to `max(1, ||B||_F)`.
    pub tol_psd: f64,
    /// Symmetry tolerance, relative to `max(1, ||M||_F)`.
    pub tol_sym: f64,
    /// Relative accuracy of the Jacobi eigensolver.
    pub tol_eig: f64,
    pub max_phase: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol_bisect: 1e-9,
            tol_feas: 1e-7,
            tol_psd: 1e-7,
            tol_sym: 1e-9,
            tol_eig: 1e-10,
            max_phase: 200,
            seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("tol_bisect", self.tol_bisect),
            ("tol_feas", self.tol_feas),
            ("tol_psd", self.tol_psd),
            ("tol_sym", self.tol_sym),
            ("tol_eig", self.tol_eig),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_phase < 1 {
            return Err(Error::InvalidParams("max_phase must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_zero_tolerance_and_phase_cap() {
        let p = SolverParams { tol_feas: 0.0, ..Default::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
        let p = SolverParams { max_phase: 0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
