//! Quantum channels in Kraus form and their equivalent representations.
//!
//! A channel acts as `rho -> sum_a E_a rho E_a^dagger`. The same map can be
//! written as a superoperator on row-major vectorized matrices
//! (`vec(rho)[i*M + j] = rho[i, j]`), or as a Choi matrix, whose rank is the
//! smallest possible number of Kraus operators.

mod choi;
mod dilation;
mod superop;

pub use choi::{choi_to_kraus, minimal_kraus, to_choi, ChoiMatrix};
pub use dilation::{dilation_to_kraus, joint_hamiltonian, joint_unitary, DilationModel};
pub use superop::{apply_superoperator, to_superoperator, Superoperator};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix, ZERO};
use crate::state::DensityMatrix;

/// Tolerance on `sum E^dagger E` used to classify a Kraus set.
pub const KRAUS_TOL: f64 = 1e-10;

/// Tolerance on `u^dagger u = I` for remixing matrices.
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausKind {
    TracePreserving,
    TraceNonIncreasing,
    Invalid,
}

/// `sum_a E_a^dagger E_a`.
fn completeness_sum(ops: &[ComplexMatrix]) -> ComplexMatrix {
    let m = ops[0].rows();
    ops.iter().fold(ComplexMatrix::zeros(m, m), |acc, e| {
        &acc + &e.adjoint().matmul(e)
    })
}

fn check_shapes(ops: &[ComplexMatrix]) -> Result<usize> {
    let first = ops
        .first()
        .ok_or_else(|| Error::ShapeMismatch("no Kraus operators".into()))?;
    let m = first.rows();
    if m == 0 {
        return Err(Error::ShapeMismatch("zero-dimensional Kraus operator".into()));
    }
    for (k, e) in ops.iter().enumerate() {
        if e.shape() != (m, m) {
            return Err(Error::ShapeMismatch(format!(
                "Kraus operator {k} is {}x{}, expected {m}x{m}",
                e.rows(),
                e.cols()
            )));
        }
    }
    Ok(m)
}

/// Classifies a Kraus set by `S = sum E^dagger E`: trace preserving when
/// `max|S - I| <= tol`, trace non-increasing when the top eigenvalue of `S`
/// is at most `1 + tol`, invalid otherwise.
pub fn validate_kraus(ops: &[ComplexMatrix], tol: f64) -> Result<KrausKind> {
    let m = check_shapes(ops)?;
    let s = completeness_sum(ops);
    if (&s - &ComplexMatrix::identity(m)).max_abs() <= tol {
        return Ok(KrausKind::TracePreserving);
    }
    let top = *hermitian_eigen(&s).values.last().expect("nonempty spectrum");
    if top <= 1.0 + tol {
        Ok(KrausKind::TraceNonIncreasing)
    } else {
        Ok(KrausKind::Invalid)
    }
}

/// Ordered Kraus operators of a trace-non-increasing completely positive map.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<ComplexMatrix>,
    kind: KrausKind,
}

impl KrausChannel {
    /// Validates shapes and classifies the set; rejects maps that increase
    /// trace.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = check_shapes(&ops)?;
        let kind = validate_kraus(&ops, KRAUS_TOL)?;
        if kind == KrausKind::Invalid {
            let top = *hermitian_eigen(&completeness_sum(&ops))
                .values
                .last()
                .expect("nonempty spectrum");
            return Err(Error::InvalidKraus { max_eigenvalue: top });
        }
        Ok(Self { dim, ops, kind })
    }

    pub fn identity(m: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(m)]).expect("identity is a channel")
    }

    /// Single-operator channel `rho -> U rho U^dagger`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Kraus operators in this representation.
    pub fn d(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn kind(&self) -> KrausKind {
        self.kind
    }

    /// Same channel with extra operators appended; fails if the result
    /// would no longer be trace non-increasing.
    pub fn with_appended(&self, extra: &[ComplexMatrix]) -> Result<Self> {
        let mut ops = self.ops.clone();
        ops.extend_from_slice(extra);
        Self::new(ops)
    }

    /// `sum_a E_a rho E_a^dagger` on a raw matrix.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.ops {
            out = &out + &e.matmul(rho).matmul(&e.adjoint());
        }
        Ok(out)
    }

    /// `E_a |psi>` for every operator.
    pub fn act_on_vector(&self, psi: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.ops.iter().map(|e| e.mul_vec(psi)).collect()
    }
}

/// `rho -> sum_a E_a rho E_a^dagger`.
pub fn apply(c: &KrausChannel, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    c.apply_matrix(rho0.matrix())
        .map(DensityMatrix::from_matrix_unchecked)
}

/// `F_b = sum_a u[b, a] E_a` for a `d' x d` isometry `u`. Describes the same
/// map as the input.
pub fn remix_kraus(c: &KrausChannel, u: &ComplexMatrix) -> Result<KrausChannel> {
    if u.cols() != c.d() || u.rows() < u.cols() {
        return Err(Error::ShapeMismatch(format!(
            "mixing matrix is {}x{}, need d' x {} with d' >= {}",
            u.rows(),
            u.cols(),
            c.d(),
            c.d()
        )));
    }
    let deviation = (&u.adjoint().matmul(u) - &ComplexMatrix::identity(c.d())).max_abs();
    if deviation > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    let m = c.dim();
    let ops = (0..u.rows())
        .map(|b| {
            c.ops()
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(m, m), |acc, (a, e)| {
                    let w = u[(b, a)];
                    if w == ZERO {
                        acc
                    } else {
                        &acc + &e.scale(w)
                    }
                })
        })
        .collect();
    KrausChannel::new(ops)
}
