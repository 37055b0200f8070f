//! Dense symmetric linear algebra used by the SDP separation oracle.
//!
//! Everything here works on small dense matrices (d up to a few hundred).
//! The eigensolver is cyclic Jacobi, which converges unconditionally for
//! real symmetric input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const DEFAULT_TOL_SYM: f64 = 1e-9;

/// Dense d x d matrix stored row-major. Symmetry is checked by the
/// operations that need it, not by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: data.len() });
        }
        Ok(Self { d, data })
    }

    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![0.0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.data[i * d + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * d + i] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut data = Vec::with_capacity(d * d);
        for r in rows {
            if r.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { d, data })
    }

    /// Rank-one matrix `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        let d = v.len();
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = v[i] * v[j];
            }
        }
        Self { d, data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.d + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest |M_ij - M_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol_sym: f64) -> bool {
        self.asymmetry() <= tol_sym * self.frobenius_norm().max(1.0)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &SymMatrix, s: f64) -> Result<()> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix { d: self.d, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `v^T M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let d = self.d;
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.data[i * d..(i + 1) * d];
            let mut s = 0.0;
            for j in 0..d {
                s += row[j] * v[j];
            }
            acc += v[i] * s;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let d = self.d;
        (0..d).map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum()).collect()
    }
}

/// `A ⊗ B = Σ_ij A_ij B_ij = trace(A^T B)`.
pub fn frobenius(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch { expected: a.d, got: b.d });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Full symmetric eigendecomposition. `values` ascending; `vectors[k]` is the
/// unit eigenvector for `values[k]`, sign-normalised so its largest-magnitude
/// component is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigDecomp {
    /// `Σ_k λ_k v_k v_k^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        let d = self.values.len();
        let mut m = SymMatrix::zeros(d);
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..d {
                for j in 0..d {
                    m.data[i * d + j] += lam * v[i] * v[j];
                }
            }
        }
        m
    }
}

pub fn symmetric_eig(m: &SymMatrix, tol_eig: f64) -> Result<EigDecomp> {
    symmetric_eig_with(m, tol_eig, DEFAULT_TOL_SYM)
}

pub fn symmetric_eig_with(m: &SymMatrix, tol_eig: f64, tol_sym: f64) -> Result<EigDecomp> {
    if !m.is_symmetric(tol_sym) {
        return Err(Error::AsymmetricMatrix { what: "input".into(), deviation: m.asymmetry() });
    }
    let d = m.d;
    if d == 0 {
        return Ok(EigDecomp { values: vec![], vectors: vec![] });
    }
    let mut a = m.data.clone();
    // symmetrise so rounding noise in the input does not bias the rotations
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (a[i * d + j] + a[j * d + i]);
            a[i * d + j] = avg;
            a[j * d + i] = avg;
        }
    }
    let mut v = SymMatrix::identity(d).data;
    let norm = m.frobenius_norm();
    let threshold = tol_eig * norm;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[i * d + j] * a[i * d + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i * d + i].total_cmp(&a[j * d + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k * d + k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..d).map(|i| v[i * d + k]).collect();
            normalize_sign(&mut col);
            col
        })
        .collect();
    Ok(EigDecomp { values, vectors })
}

fn normalize_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).copied().unwrap_or(0.0) < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Smallest eigenvalue and a unit eigenvector for it.
pub fn min_eigpair(m: &SymMatrix, tol_eig: f64) -> Result<(f64, Vec<f64>)> {
    let mut eig = symmetric_eig(m, tol_eig)?;
    if eig.values.is_empty() {
        return Ok((0.0, vec![]));
    }
    Ok((eig.values[0], eig.vectors.swap_remove(0)))
}

/// `λ_min(M) >= -tol * max(1, ||M||_F)`.
pub fn is_psd(m: &SymMatrix, tol: f64, tol_eig: f64) -> Result<bool> {
    let (lam, _) = min_eigpair(m, tol_eig)?;
    Ok(lam >= -tol * m.frobenius_norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-10;

    fn m2(a: f64, b: f64, c: f64) -> SymMatrix {
        SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let i2 = SymMatrix::identity(2);
        assert_eq!(frobenius(&i2, &i2).unwrap(), 2.0);
        assert_eq!(frobenius(&m2(1.0, 2.0, 1.0), &m2(0.0, 1.0, 0.0)).unwrap(), 4.0);
        assert_eq!(frobenius(&m2(3.0, -1.0, 2.0), &SymMatrix::zeros(2)).unwrap(), 0.0);
        assert!(matches!(
            frobenius(&i2, &SymMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_identity_and_swap() {
        let e = symmetric_eig(&SymMatrix::identity(3), TOL).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);

        let e = symmetric_eig(&m2(0.0, 1.0, 0.0), TOL).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_diagonal_gives_axis_vectors() {
        let e = symmetric_eig(&SymMatrix::from_diag(&[3.0, 1.0]), TOL).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0]);
        assert_eq!(e.vectors[1], vec![1.0, 0.0]);
    }

    #[test]
    fn min_eigpair_examples() {
        let (l, v) = min_eigpair(&SymMatrix::from_diag(&[-1.0, 5.0]), TOL).unwrap();
        assert_eq!(l, -1.0);
        assert_eq!(v, vec![1.0, 0.0]);

        let (l, v) = min_eigpair(&SymMatrix::identity(2), TOL).unwrap();
        assert_eq!(l, 1.0);
        assert_abs_diff_eq!(v.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-14);

        let (l, v) = min_eigpair(&m2(0.0, 1.0, 0.0), TOL).unwrap();
        assert_abs_diff_eq!(l, -1.0, epsilon = 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v[0].abs(), s, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0], -v[1], epsilon = 1e-12);
        let outer = SymMatrix::outer(&v);
        assert_abs_diff_eq!(outer.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&SymMatrix::identity(2), 1e-9, TOL).unwrap());
        assert!(!is_psd(&m2(0.0, 1.0, 0.0), 1e-9, TOL).unwrap());
        assert!(is_psd(&SymMatrix::zeros(3), 1e-9, TOL).unwrap());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eig(&m, TOL), Err(Error::AsymmetricMatrix { .. })));
    }
}
