//! Pure states, density matrices, and the reductions used by the control
//! analysis (bath partial trace, block populations, `H2` coherences).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, vec_norm, ComplexMatrix};
use crate::space::{Subspace, SubspacePartition};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Hermitian, positive semidefinite matrix with real trace in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every invariant, including positivity (one eigendecomposition).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitian { deviation });
        }
        let tr = matrix.trace();
        if tr.im.abs() > HERMITIAN_TOL || tr.re <= 0.0 || tr.re > 1.0 + TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i outside (0, 1]",
                tr.re, tr.im
            )));
        }
        let min_eig = hermitian_eigen(&matrix).values[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known to satisfy the invariants up to roundoff, such as
    /// the image of a valid state under a completely positive map.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// `|psi><psi|`.
pub fn pure_to_density(s: &PureState) -> DensityMatrix {
    let a = s.amplitudes();
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(a, a))
}

/// Contracts the bath index of a joint matrix laid out system-major
/// (`idx = s * dim_b + b`).
pub fn partial_trace_bath_matrix(
    joint: &ComplexMatrix,
    dim_s: usize,
    dim_b: usize,
) -> Result<ComplexMatrix> {
    let n = dim_s * dim_b;
    if joint.rows() != n || joint.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: joint.rows().max(joint.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |s, t| {
        (0..dim_b)
            .map(|b| joint[(s * dim_b + b, t * dim_b + b)])
            .sum()
    }))
}

/// `Tr_B rho_tot` for a joint density matrix on `dim_s * dim_b` levels.
pub fn partial_trace_bath(
    rho_tot: &DensityMatrix,
    dim_s: usize,
    dim_b: usize,
) -> Result<DensityMatrix> {
    partial_trace_bath_matrix(rho_tot.matrix(), dim_s, dim_b)
        .map(DensityMatrix::from_matrix_unchecked)
}

fn check_side(rho: &DensityMatrix, p: &SubspacePartition) -> Result<()> {
    if rho.dim() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Total population of one block: the sum of its diagonal entries. Roundoff
/// below zero is clipped to zero.
pub fn subspace_population(
    rho: &DensityMatrix,
    p: &SubspacePartition,
    subspace: Subspace,
) -> Result<f64> {
    check_side(rho, p)?;
    let m = rho.matrix();
    let total: f64 = p.range(subspace).map(|k| m[(k, k)].re).sum();
    Ok(total.max(0.0))
}

/// Frobenius norm of the `H2` rows of `rho`, i.e. `|P2 rho|_F`. Covers the
/// `H2` populations and every coherence between `H2` and the rest.
pub fn h2_coherence_norm(rho: &DensityMatrix, p: &SubspacePartition) -> Result<f64> {
    check_side(rho, p)?;
    let m = rho.matrix();
    let sum: f64 = p
        .range(Subspace::H2)
        .flat_map(|k| m.row(k).iter())
        .map(Complex64::norm_sqr)
        .sum();
    Ok(sum.sqrt())
}
