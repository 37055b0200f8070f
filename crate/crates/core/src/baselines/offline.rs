use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::CoveringLpInstance;

/// Offline primal/dual pair for a covering LP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineCertificate {
    pub x: Vec<f64>,
    /// Packing dual, one entry per row.
    pub y: Vec<f64>,
    /// Box duals; empty for unboxed instances.
    pub z: Vec<f64>,
    /// `c^T x`.
    pub primal: f64,
    /// `1^T y − u^T z`.
    pub dual: f64,
    /// `primal − dual`.
    pub gap: f64,
}

impl OfflineCertificate {
    pub fn opt(&self) -> f64 {
        self.primal
    }
}

/// Solves the covering LP and its packing dual exactly with the simplex
/// method and checks that the duality gap is within `eps · c^T x`.
pub fn offline_solve(inst: &CoveringLpInstance, eps: f64) -> Result<OfflineCertificate> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 0.5], got {eps}")));
    }
    let n = inst.n;
    if inst.rows.is_empty() {
        return Ok(OfflineCertificate {
            x: vec![0.0; n],
            y: vec![],
            z: if inst.boxed { vec![0.0; n] } else { vec![] },
            primal: 0.0,
            dual: 0.0,
            gap: 0.0,
        });
    }

    let mut primal = Problem::new(OptimizationDirection::Minimize);
    let xs: Vec<Variable> = (0..n)
        .map(|j| {
            let hi = if inst.boxed { inst.upper_bound(j) } else { f64::INFINITY };
            primal.add_var(inst.c[j], (0.0, hi))
        })
        .collect();
    for row in &inst.rows {
        let expr: Vec<(Variable, f64)> = row.entries.iter().map(|&(j, a)| (xs[j], a)).collect();
        primal.add_constraint(expr, ComparisonOp::Ge, 1.0);
    }
    let sol = primal.solve().map_err(|e| match e {
        minilp::Error::Infeasible => Error::Infeasible,
        other => Error::OfflineFailure(other.to_string()),
    })?;
    let mut x: Vec<f64> = xs.iter().map(|&v| sol[v].max(0.0)).collect();
    // remove simplex round-off so that every row holds exactly
    let min_row = inst.min_row_value(&x);
    if !inst.boxed && min_row > 0.0 && min_row < 1.0 {
        x.iter_mut().for_each(|v| *v /= min_row);
    }

    let mut dual = Problem::new(OptimizationDirection::Maximize);
    let ys: Vec<Variable> = inst.rows.iter().map(|_| dual.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let zs: Vec<Variable> = if inst.boxed {
        (0..n).map(|j| dual.add_var(-inst.upper_bound(j), (0.0, f64::INFINITY))).collect()
    } else {
        vec![]
    };
    let mut columns: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); n];
    for (i, row) in inst.rows.iter().enumerate() {
        for &(j, a) in &row.entries {
            columns[j].push((ys[i], a));
        }
    }
    for (j, mut col) in columns.into_iter().enumerate() {
        if inst.boxed {
            col.push((zs[j], -1.0));
        }
        if !col.is_empty() {
            dual.add_constraint(col, ComparisonOp::Le, inst.c[j]);
        }
    }
    let dsol = dual.solve().map_err(|e| Error::OfflineFailure(format!("dual: {e}")))?;
    let y: Vec<f64> = ys.iter().map(|&v| dsol[v].max(0.0)).collect();
    let z: Vec<f64> = zs.iter().map(|&v| dsol[v].max(0.0)).collect();

    let primal_value = inst.cost(&x);
    let dual_value =
        y.iter().sum::<f64>() - z.iter().enumerate().map(|(j, z)| inst.upper_bound(j) * z).sum::<f64>();
    let gap = primal_value - dual_value;
    if gap > eps * primal_value {
        return Err(Error::OfflineFailure(format!("duality gap {gap:.3e} exceeds eps * c^T x")));
    }
    Ok(OfflineCertificate { x, y, z, primal: primal_value, dual: dual_value, gap })
}
