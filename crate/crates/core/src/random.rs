//! Seeded random ensembles: Hermitian matrices, unitaries, isometries, states,
//! channels and dilation models. Used by the scenario builder and by tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{DilationModel, KrausChannel};
use crate::numerics::ComplexMatrix;
use crate::state::{DensityMatrix, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ginibre(rng, n, n).hermitian_part()
}

/// Haar-distributed `rows x cols` isometry (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rng, rows, cols);
    let qr = g.to_nalgebra().qr();
    let q: DMatrix<Complex64> = qr.q();
    let r = qr.r();
    // Fix the column phases with the diagonal of R so the result is Haar.
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(rng, n, n)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState {
    let v = (0..n).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Random full-rank density matrix with unit trace.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n, n);
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Wishart matrix is a valid state")
}

/// Trace-preserving channel with `d` Kraus operators cut from a Haar
/// isometry `C^m -> C^(d m)`. Generically its Choi rank is `min(d, m^2)`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, m: usize, d: usize) -> KrausChannel {
    let v = random_isometry(rng, d * m, m);
    let ops = (0..d)
        .map(|a| ComplexMatrix::from_fn(m, m, |i, j| v[(a * m + i, j)]))
        .collect();
    KrausChannel::new(ops).expect("isometry blocks form a trace-preserving channel")
}

/// Dilation model with random Hermitian blocks. `bath_probs` fixes the
/// diagonal bath state.
pub fn random_dilation<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    bath_probs: Vec<f64>,
    time: f64,
) -> DilationModel {
    let n_b = bath_probs.len();
    DilationModel::new(
        random_hermitian(rng, m),
        random_hermitian(rng, n_b),
        random_hermitian(rng, m * n_b),
        bath_probs,
        time,
    )
    .expect("random Hermitian blocks form a valid model")
}

/// Random probability vector of length `n` with every entry at least
/// `min_weight / n`.
pub fn random_probs<R: Rng + ?Sized>(rng: &mut R, n: usize, min_weight: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| min_weight + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Put the rounding residue on the last entry so the sum is 1 to roundoff.
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}
