//! Instance and advice types, their JSON formats, and constraint sources.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigpair, SymMatrix};
use crate::params::SolverParams;

/// One covering constraint `Σ_j a_j x_j >= 1`, stored as (column, value) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseRow {
    pub entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn new(entries: Vec<(usize, f64)>) -> Self {
        Self { entries }
    }

    /// Row from a dense vector, dropping zeros.
    pub fn from_dense(dense: &[f64]) -> Self {
        Self {
            entries: dense.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).collect(),
        }
    }

    /// Row with value 1 on each listed column.
    pub fn indicator(cols: impl IntoIterator<Item = usize>) -> Self {
        Self { entries: cols.into_iter().map(|j| (j, 1.0)).collect() }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(j, a) in &self.entries {
            out[j] += a;
        }
        out
    }

    pub fn positive(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied().filter(|&(_, a)| a > 0.0)
    }

    /// Checks column range, sign and the existence of a positive entry.
    pub fn validate(&self, n: usize, row: usize) -> Result<()> {
        for &(col, value) in &self.entries {
            if col >= n {
                return Err(Error::ColumnOutOfRange { col, n });
            }
            if !value.is_finite() {
                return Err(Error::MalformedDocument(format!("non-finite entry in row {row}")));
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { row, col, value });
            }
        }
        if self.positive().next().is_none() {
            return Err(Error::EmptyRow { row });
        }
        Ok(())
    }
}

fn validate_costs(c: &[f64]) -> Result<()> {
    for (index, &value) in c.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveCost { index, value });
        }
    }
    Ok(())
}

/// `min c^T x` s.t. `A x >= 1`, `x >= 0`, optionally `x <= u` (u defaults to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringLpInstance {
    pub n: usize,
    pub c: Vec<f64>,
    pub rows: Vec<SparseRow>,
    pub boxed: bool,
    /// Per-column upper bounds for boxed instances; `None` means all ones.
    pub upper: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct LpDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    c: Vec<f64>,
    #[serde(default)]
    boxed: bool,
    rows: Vec<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<f64>>,
}

impl CoveringLpInstance {
    pub fn new(c: Vec<f64>, rows: Vec<SparseRow>, boxed: bool) -> Result<Self> {
        let inst = Self { n: c.len(), c, rows, boxed, upper: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_upper(mut self, upper: Vec<f64>) -> Result<Self> {
        self.upper = Some(upper);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.len() != self.n {
            return Err(Error::MalformedDocument(format!(
                "n = {} but c has {} entries",
                self.n,
                self.c.len()
            )));
        }
        validate_costs(&self.c)?;
        for (i, row) in self.rows.iter().enumerate() {
            row.validate(self.n, i)?;
        }
        if let Some(u) = &self.upper {
            if !self.boxed {
                return Err(Error::MalformedDocument("upper bounds given for an unboxed instance".into()));
            }
            if u.len() != self.n {
                return Err(Error::MalformedDocument(format!("upper has {} entries, n = {}", u.len(), self.n)));
            }
            if let Some(j) = u.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::MalformedDocument(format!("upper[{j}] must be positive")));
            }
        }
        Ok(())
    }

    pub fn upper_bound(&self, j: usize) -> f64 {
        self.upper.as_ref().map_or(1.0, |u| u[j])
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// `min_i A_i x`, or `+inf` with no rows.
    pub fn min_row_value(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.dot(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.min_row_value(x) >= 1.0 - tol
            && x.iter().all(|&v| v >= 0.0)
            && (!self.boxed || (0..self.n).all(|j| x[j] <= self.upper_bound(j) * (1.0 + tol)))
    }

    pub fn to_json(&self) -> String {
        let doc = LpDoc {
            n: Some(self.n),
            c: self.c.clone(),
            boxed: self.boxed,
            rows: self.rows.iter().map(|r| r.entries.clone()).collect(),
            upper: self.upper.clone(),
        };
        serde_json::to_string(&doc).expect("serialising plain data cannot fail")
    }
}

pub fn parse_lp_instance(text: &str) -> Result<CoveringLpInstance> {
    let doc: LpDoc = serde_json::from_str(text)?;
    let inst = CoveringLpInstance {
        n: doc.n.unwrap_or(doc.c.len()),
        c: doc.c,
        rows: doc.rows.into_iter().map(SparseRow::new).collect(),
        boxed: doc.boxed,
        upper: doc.upper,
    };
    inst.validate()?;
    Ok(inst)
}

/// `min c^T x` s.t. `Σ_j A_j x_j ⪰ B^(i)` for every arrived `B^(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSdpInstance {
    pub n: usize,
    pub d: usize,
    pub c: Vec<f64>,
    pub a: Vec<SymMatrix>,
    pub b: Vec<SymMatrix>,
    pub boxed: bool,
}

#[derive(Serialize, Deserialize)]
struct SdpDoc {
    n: usize,
    d: usize,
    c: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(default)]
    boxed: bool,
}

/// Symmetry and PSD check for one matrix.
pub fn check_psd_matrix(m: &SymMatrix, what: &str, params: &SolverParams) -> Result<()> {
    if !m.is_symmetric(params.tol_sym) {
        return Err(Error::AsymmetricMatrix { what: what.into(), deviation: m.asymmetry() });
    }
    let (min_eig, _) = min_eigpair(m, params.tol_eig)?;
    if min_eig < -params.tol_psd * m.frobenius_norm().max(1.0) {
        return Err(Error::NotPsd { what: what.into(), min_eig });
    }
    Ok(())
}

/// Validates a newly arrived `B^(index)` against its predecessor only.
pub fn check_b_arrival(
    prev: Option<&SymMatrix>,
    next: &SymMatrix,
    index: usize,
    params: &SolverParams,
) -> Result<()> {
    check_psd_matrix(next, &format!("B[{index}]"), params)?;
    if let Some(prev) = prev {
        if prev.dim() != next.dim() {
            return Err(Error::DimensionMismatch { expected: prev.dim(), got: next.dim() });
        }
        let mut diff = next.clone();
        diff.add_scaled(prev, -1.0)?;
        let (min_eig, _) = min_eigpair(&diff, params.tol_eig)?;
        if min_eig < -params.tol_psd * next.frobenius_norm().max(1.0) {
            return Err(Error::NonMonotoneB { index, prev: index - 1, min_eig });
        }
    }
    Ok(())
}

impl CoveringSdpInstance {
    pub fn new(c: Vec<f64>, a: Vec<SymMatrix>, b: Vec<SymMatrix>, boxed: bool) -> Result<Self> {
        Self::new_with(c, a, b, boxed, &SolverParams::default())
    }

    pub fn new_with(
        c: Vec<f64>,
        a: Vec<SymMatrix>,
        b: Vec<SymMatrix>,
        boxed: bool,
        params: &SolverParams,
    ) -> Result<Self> {
        let d = a.first().map(|m| m.dim()).or_else(|| b.first().map(|m| m.dim())).unwrap_or(0);
        let inst = Self { n: c.len(), d, c, a, b, boxed };
        inst.validate(params)?;
        Ok(inst)
    }

    pub fn validate(&self, params: &SolverParams) -> Result<()> {
        if self.c.len() != self.n || self.a.len() != self.n {
            return Err(Error::MalformedDocument(format!(
                "n = {} but c has {} and A has {} entries",
                self.n,
                self.c.len(),
                self.a.len()
            )));
        }
        validate_costs(&self.c)?;
        for (j, m) in self.a.iter().enumerate() {
            if m.dim() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: m.dim() });
            }
            check_psd_matrix(m, &format!("A[{j}]"), params)?;
        }
        for (i, m) in self.b.iter().enumerate() {
            if m.dim() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: m.dim() });
            }
            check_b_arrival(i.checked_sub(1).map(|p| &self.b[p]), m, i, params)?;
        }
        Ok(())
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// `Σ_j A_j x_j`.
    pub fn combination(&self, x: &[f64]) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.d);
        for (a, &xj) in self.a.iter().zip(x) {
            if xj != 0.0 {
                m.add_scaled(a, xj).expect("dimensions validated");
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        let doc = SdpDoc {
            n: self.n,
            d: self.d,
            c: self.c.clone(),
            a: self.a.iter().map(|m| m.data().to_vec()).collect(),
            b: self.b.iter().map(|m| m.data().to_vec()).collect(),
            boxed: self.boxed,
        };
        serde_json::to_string(&doc).expect("serialising plain data cannot fail")
    }
}

pub fn parse_sdp_instance(text: &str) -> Result<CoveringSdpInstance> {
    parse_sdp_instance_with(text, &SolverParams::default())
}

pub fn parse_sdp_instance_with(text: &str, params: &SolverParams) -> Result<CoveringSdpInstance> {
    let doc: SdpDoc = serde_json::from_str(text)?;
    let to_mat = |v: Vec<f64>| SymMatrix::new(doc.d, v);
    let a = doc.a.into_iter().map(to_mat).collect::<Result<Vec<_>>>()?;
    let b = doc.b.into_iter().map(to_mat).collect::<Result<Vec<_>>>()?;
    let inst = CoveringSdpInstance { n: doc.n, d: doc.d, c: doc.c, a, b, boxed: doc.boxed };
    inst.validate(params)?;
    Ok(inst)
}

/// Fractional advice `x'` with confidence `λ` (0 = full trust, 1 = ignore).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdviceVector {
    #[serde(rename = "x")]
    pub x_prime: Vec<f64>,
    pub lambda: f64,
}

impl AdviceVector {
    /// Shape and range checks only; advice feasibility is never required.
    /// `caps` gives per-coordinate upper limits for boxed instances.
    pub fn validate_shape(x_prime: Vec<f64>, lambda: f64, n: usize, caps: Option<&dyn Fn(usize) -> f64>) -> Result<Self> {
        if x_prime.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: x_prime.len() });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        for (index, &value) in x_prime.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::MalformedDocument(format!("non-finite advice entry {index}")));
            }
            if value < 0.0 {
                return Err(Error::NegativeAdvice { index, value });
            }
            if let Some(cap) = caps {
                if value > cap(index) {
                    return Err(Error::AdviceAboveCap { index, value });
                }
            }
        }
        Ok(Self { x_prime, lambda })
    }

    pub fn zeros(n: usize, lambda: f64) -> Self {
        Self { x_prime: vec![0.0; n], lambda }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialising plain data cannot fail")
    }
}

pub fn validate_advice(x_prime: Vec<f64>, lambda: f64, inst: &CoveringLpInstance) -> Result<AdviceVector> {
    if inst.boxed {
        let cap = |j: usize| inst.upper_bound(j);
        AdviceVector::validate_shape(x_prime, lambda, inst.n, Some(&cap))
    } else {
        AdviceVector::validate_shape(x_prime, lambda, inst.n, None)
    }
}

pub fn validate_sdp_advice(x_prime: Vec<f64>, lambda: f64, inst: &CoveringSdpInstance) -> Result<AdviceVector> {
    let one = |_: usize| 1.0;
    AdviceVector::validate_shape(x_prime, lambda, inst.n, if inst.boxed { Some(&one) } else { None })
}

/// Parses `{"lambda": .., "x": [..]}` without instance checks.
pub fn parse_advice(text: &str) -> Result<AdviceVector> {
    Ok(serde_json::from_str(text)?)
}

/// Oracle callback: given the current solution, return a violated row or `None`.
pub type RowOracle<'a> = Box<dyn FnMut(&[f64]) -> Result<Option<SparseRow>> + Send + 'a>;

/// Where covering constraints come from: an explicit list or a separation oracle.
pub enum ConstraintSource<'a> {
    ExplicitRows(Vec<SparseRow>),
    Oracle(RowOracle<'a>),
}

impl<'a> ConstraintSource<'a> {
    pub fn oracle(f: impl FnMut(&[f64]) -> Result<Option<SparseRow>> + Send + 'a) -> Self {
        ConstraintSource::Oracle(Box::new(f))
    }
}

impl std::fmt::Debug for ConstraintSource<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintSource::ExplicitRows(rows) => f.debug_tuple("ExplicitRows").field(&rows.len()).finish(),
            ConstraintSource::Oracle(_) => f.write_str("Oracle(..)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_smallest_instances() {
        let i = parse_lp_instance(r#"{"c":[1],"rows":[[[0,1]]]}"#).unwrap();
        assert_eq!(i.n, 1);
        assert_eq!(i.rows, vec![SparseRow::new(vec![(0, 1.0)])]);
        assert!(!i.boxed);

        let i = parse_lp_instance(r#"{"c":[1,2],"rows":[[[0,1],[1,1]]]}"#).unwrap();
        assert_eq!(i.n, 2);
        assert_eq!(i.rows.len(), 1);
    }

    #[test]
    fn parse_rejections() {
        assert!(matches!(
            parse_lp_instance(r#"{"c":[0],"rows":[[[0,1]]]}"#),
            Err(Error::NonPositiveCost { index: 0, .. })
        ));
        assert!(matches!(
            parse_lp_instance(r#"{"c":[1],"rows":[[[0,-1]]]}"#),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(parse_lp_instance(r#"{"c":[1],"rows":[[[0,0]]]}"#), Err(Error::EmptyRow { row: 0 })));
        assert!(matches!(parse_lp_instance(r#"{"c":[1],"rows":[[]]}"#), Err(Error::EmptyRow { row: 0 })));
        assert!(matches!(
            parse_lp_instance(r#"{"c":[1],"rows":[[[3,1]]]}"#),
            Err(Error::ColumnOutOfRange { col: 3, n: 1 })
        ));
        assert!(matches!(parse_lp_instance("{"), Err(Error::MalformedDocument(_))));
        assert!(matches!(parse_lp_instance(r#"{"n":2,"c":[1],"rows":[]}"#), Err(Error::MalformedDocument(_))));
    }

    #[test]
    fn lp_round_trip() {
        let text = r#"{"n":3,"c":[0.1,2.5,3.0000000000000004],"boxed":true,"rows":[[[0,0.3],[2,1e-7]],[[1,1.0]]]}"#;
        let a = parse_lp_instance(text).unwrap();
        let b = parse_lp_instance(&a.to_json()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sdp_parse_examples() {
        let ok = r#"{"n":1,"d":2,"c":[1],"A":[[1,0,0,1]],"B":[[1,0,0,1]]}"#;
        let inst = parse_sdp_instance(ok).unwrap();
        assert_eq!(parse_sdp_instance(&inst.to_json()).unwrap(), inst);

        let non_mono = r#"{"n":1,"d":2,"c":[1],"A":[[1,0,0,1]],"B":[[1,0,0,1],[0,0,0,0]]}"#;
        assert!(matches!(parse_sdp_instance(non_mono), Err(Error::NonMonotoneB { index: 1, .. })));

        let not_psd = r#"{"n":1,"d":2,"c":[1],"A":[[0,1,1,0]],"B":[[1,0,0,1]]}"#;
        match parse_sdp_instance(not_psd) {
            Err(Error::NotPsd { min_eig, .. }) => assert!((min_eig + 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }

        let asym = r#"{"n":1,"d":2,"c":[1],"A":[[1,1,0,1]],"B":[]}"#;
        assert!(matches!(parse_sdp_instance(asym), Err(Error::AsymmetricMatrix { .. })));
    }

    #[test]
    fn advice_validation() {
        let inst = CoveringLpInstance::new(vec![1.0, 1.0], vec![SparseRow::indicator([0, 1])], false).unwrap();
        assert!(validate_advice(vec![0.0, 0.0], 1.0, &inst).is_ok());
        assert!(matches!(
            validate_advice(vec![-0.1, 0.0], 0.5, &inst),
            Err(Error::NegativeAdvice { index: 0, .. })
        ));
        assert!(matches!(validate_advice(vec![0.0, 0.0], 1.5, &inst), Err(Error::LambdaOutOfRange(_))));
        assert!(matches!(validate_advice(vec![0.0], 0.5, &inst), Err(Error::LengthMismatch { .. })));
        // infeasible advice is accepted
        assert!(validate_advice(vec![0.1, 0.1], 0.5, &inst).is_ok());
        // so is wildly over-feasible advice
        assert!(validate_advice(vec![5.0, 5.0], 0.5, &inst).is_ok());

        let boxed = CoveringLpInstance::new(vec![1.0], vec![SparseRow::indicator([0])], true).unwrap();
        assert!(matches!(validate_advice(vec![1.5], 0.5, &boxed), Err(Error::AdviceAboveCap { .. })));
        let wide = boxed.clone().with_upper(vec![2.0]).unwrap();
        assert!(validate_advice(vec![1.5], 0.5, &wide).is_ok());
    }

    #[test]
    fn advice_json() {
        let a = parse_advice(r#"{"lambda":0.25,"x":[0.5,1]}"#).unwrap();
        assert_eq!(a.lambda, 0.25);
        assert_eq!(parse_advice(&a.to_json()).unwrap(), a);
    }
}
