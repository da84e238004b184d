use crate::error::{Error, Result};
use crate::numerics::{kron, ComplexMatrix};
use crate::state::DensityMatrix;

use super::KrausChannel;

/// Linear map on row-major vectorized `M x M` matrices, stored as an
/// `M^2 x M^2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let side = dim * dim;
        if matrix.shape() != (side, side) {
            return Err(Error::ShapeMismatch(format!(
                "superoperator for dimension {dim} must be {side}x{side}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Unvectorizes `V vec(rho)`. No positivity is implied for general maps.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.rows(),
            });
        }
        let out = self.matrix.mul_vec(rho.entries());
        ComplexMatrix::new(self.dim, self.dim, out)
    }
}

/// `V = sum_a E_a (x) conj(E_a)`, so that `vec(apply(c, rho)) = V vec(rho)`
/// under row-major vectorization.
pub fn to_superoperator(c: &KrausChannel) -> Superoperator {
    let m = c.dim();
    let matrix = c
        .ops()
        .iter()
        .fold(ComplexMatrix::zeros(m * m, m * m), |acc, e| {
            &acc + &kron(e, &e.conj())
        });
    Superoperator { dim: m, matrix }
}

/// Applies a superoperator to a density matrix. The result is returned as a
/// raw matrix because a general linear map need not produce a valid state.
pub fn apply_superoperator(v: &Superoperator, rho0: &DensityMatrix) -> Result<ComplexMatrix> {
    v.apply_matrix(rho0.matrix())
}
