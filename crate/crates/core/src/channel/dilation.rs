use crate::error::{Error, Result};
use crate::numerics::{kron, unitary_from_hamiltonian, ComplexMatrix, TolerancePolicy};

use super::KrausChannel;

/// Hermiticity tolerance for the Hamiltonian blocks, relative to
/// `max(1, max|H|)`.
pub const HAMILTONIAN_TOL: f64 = 1e-12;

/// Tolerance on `sum p_a = 1`.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// System coupled to a finite bath that starts in the diagonal state
/// `diag(bath_probs)`. The joint index is system-major: `s * N_B + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationModel {
    h_s: ComplexMatrix,
    h_b: ComplexMatrix,
    h_sb: ComplexMatrix,
    bath_probs: Vec<f64>,
    time: f64,
}

fn check_hermitian(name: &str, h: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if h.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "{name} is {}x{}, expected {n}x{n}",
            h.rows(),
            h.cols()
        )));
    }
    let deviation = h.hermitian_deviation();
    if deviation > HAMILTONIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(h.hermitian_part())
}

impl DilationModel {
    /// Validates shapes, Hermiticity of each block and the bath
    /// probabilities. Blocks are stored as their exact Hermitian parts.
    pub fn new(
        h_s: ComplexMatrix,
        h_b: ComplexMatrix,
        h_sb: ComplexMatrix,
        bath_probs: Vec<f64>,
        time: f64,
    ) -> Result<Self> {
        let m = h_s.rows();
        let n_b = bath_probs.len();
        if m == 0 || n_b == 0 {
            return Err(Error::ShapeMismatch(
                "system and bath dimensions must be positive".into(),
            ));
        }
        let h_s = check_hermitian("h_s", &h_s, m)?;
        let h_b = check_hermitian("h_b", &h_b, n_b)?;
        let h_sb = check_hermitian("h_sb", &h_sb, m * n_b)?;
        if let Some(bad) = bath_probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "probability {bad} is negative or non-finite"
            )));
        }
        let total: f64 = bath_probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if !time.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            h_s,
            h_b,
            h_sb,
            bath_probs,
            time,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.h_s.rows()
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_probs.len()
    }

    pub fn h_s(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn h_b(&self) -> &ComplexMatrix {
        &self.h_b
    }

    pub fn h_sb(&self) -> &ComplexMatrix {
        &self.h_sb
    }

    pub fn bath_probs(&self) -> &[f64] {
        &self.bath_probs
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Same model evolved for a different time.
    pub fn with_time(&self, time: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            time,
            ..self.clone()
        })
    }

    /// Initial bath state `diag(p)`.
    pub fn bath_state(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.bath_probs)
    }
}

/// `H_tot = h_s (x) I_B + I_S (x) h_b + h_sb`.
pub fn joint_hamiltonian(m: &DilationModel) -> ComplexMatrix {
    let i_s = ComplexMatrix::identity(m.system_dim());
    let i_b = ComplexMatrix::identity(m.bath_dim());
    &(&kron(m.h_s(), &i_b) + &kron(&i_s, m.h_b())) + m.h_sb()
}

/// `exp(-i H_tot t)` on the joint space.
pub fn joint_unitary(m: &DilationModel) -> Result<ComplexMatrix> {
    unitary_from_hamiltonian(&joint_hamiltonian(m), m.time(), &TolerancePolicy::default())
}

/// Reduced dynamics as a Kraus set, `E_(a,e)[s', s] = sqrt(p_a) U[(s', e), (s, a)]`,
/// ordered by bath start level `a` and then end level `e`. Start levels with
/// `p_a` at or below the default absolute floor contribute nothing and are
/// skipped.
pub fn dilation_to_kraus(m: &DilationModel) -> Result<KrausChannel> {
    let u = joint_unitary(m)?;
    let n_s = m.system_dim();
    let n_b = m.bath_dim();
    let floor = TolerancePolicy::default().absolute_floor();
    let mut ops = Vec::new();
    for (a, &p) in m.bath_probs().iter().enumerate() {
        if p <= floor {
            continue;
        }
        let w = p.sqrt();
        for e in 0..n_b {
            ops.push(ComplexMatrix::from_fn(n_s, n_s, |s_out, s_in| {
                u[(s_out * n_b + e, s_in * n_b + a)] * w
            }));
        }
    }
    KrausChannel::new(ops)
}
