use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{fix_phase, hermitian_eigen, ComplexMatrix, TolerancePolicy};

use super::KrausChannel;

/// Hermiticity tolerance for Choi matrices, relative to `max(1, max|J|)`.
pub const CHOI_HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues below `-CP_TOL * lambda_max` mean the map is not completely
/// positive.
pub const CP_TOL: f64 = 1e-8;

/// `J = sum_ij |i><j| (x) Lambda(|i><j|)`, an `M^2 x M^2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let side = matrix.rows();
        let dim = (side as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != side {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix side {side} is not a positive perfect square"
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > CHOI_HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace over the output factor: `sum_k J[(i,k),(j,k)]`. Equals the
    /// identity for trace-preserving maps.
    pub fn output_partial_trace(&self) -> ComplexMatrix {
        let m = self.dim;
        ComplexMatrix::from_fn(m, m, |i, j| {
            (0..m).map(|k| self.matrix[(i * m + k, j * m + k)]).sum()
        })
    }
}

/// `J[(i*M + k), (j*M + l)] = sum_a E_a[k, i] conj(E_a[l, j])`.
pub fn to_choi(c: &KrausChannel) -> ChoiMatrix {
    let m = c.dim();
    let mut j = ComplexMatrix::zeros(m * m, m * m);
    for e in c.ops() {
        // Column-stacked copy of E: vec[i*M + k] = E[k, i].
        let v: Vec<Complex64> = (0..m * m).map(|r| e[(r % m, r / m)]).collect();
        for (row, &a) in v.iter().enumerate() {
            for (col, b) in v.iter().enumerate() {
                j[(row, col)] += a * b.conj();
            }
        }
    }
    ChoiMatrix { dim: m, matrix: j }
}

/// Kraus operators from the eigendecomposition of a Choi matrix, one per
/// eigenvalue above the rank threshold, largest first. Each eigenvector's
/// global phase makes its largest component real positive.
pub fn choi_to_kraus(j: &ChoiMatrix, tol: &TolerancePolicy) -> Result<KrausChannel> {
    let m = j.dim();
    let side = m * m;
    let eig = hermitian_eigen(j.matrix());
    let lambda_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    if let Some(&lowest) = eig.values.first() {
        if lowest < -CP_TOL * lambda_max {
            return Err(Error::NotCompletelyPositive { eigenvalue: lowest });
        }
    }
    let threshold = tol.threshold(lambda_max, side, side);
    let mut ops = Vec::new();
    for k in (0..side).rev() {
        let lambda = eig.values[k];
        if lambda <= threshold {
            break;
        }
        let mut v = eig.vectors.column_vec(k);
        fix_phase(&mut v);
        let s = lambda.sqrt();
        ops.push(ComplexMatrix::from_fn(m, m, |row, col| v[col * m + row] * s));
    }
    if ops.is_empty() {
        // Numerically the zero map; keep one zero operator so d >= 1.
        ops.push(ComplexMatrix::zeros(m, m));
    }
    KrausChannel::new(ops)
}

/// Shortest Kraus representation of the same map: `d` equals the numerical
/// rank of the Choi matrix.
pub fn minimal_kraus(c: &KrausChannel, tol: &TolerancePolicy) -> Result<KrausChannel> {
    choi_to_kraus(&to_choi(c), tol)
}
