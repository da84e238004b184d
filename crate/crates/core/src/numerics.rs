//! Dense complex linear algebra used by the rest of the crate.
//!
//! Matrices are stored row-major. Decompositions (SVD, Hermitian
//! eigendecomposition) are delegated to `nalgebra`; everything that touches
//! index layout (Kronecker products, vectorization) is done here directly so
//! the row-major convention is never crossed implicitly.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Thresholds that turn exact-zero conditions into numerical decisions.
///
/// A singular value counts as zero when it is at most
/// `max(relative_eps * sigma_max * max(rows, cols), absolute_floor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    relative_eps: f64,
    absolute_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            relative_eps: 1e-12,
            absolute_floor: 1e-14,
        }
    }
}

impl TolerancePolicy {
    pub fn new(relative_eps: f64, absolute_floor: f64) -> Result<Self> {
        let ok = relative_eps.is_finite()
            && absolute_floor.is_finite()
            && absolute_floor > 0.0
            && absolute_floor <= relative_eps
            && relative_eps < 1.0;
        if !ok {
            return Err(Error::InvalidTolerance {
                relative_eps,
                absolute_floor,
            });
        }
        Ok(Self {
            relative_eps,
            absolute_floor,
        })
    }

    /// Replaces the relative threshold, keeping the floor.
    pub fn with_relative_eps(self, relative_eps: f64) -> Result<Self> {
        Self::new(relative_eps, self.absolute_floor)
    }

    pub fn relative_eps(&self) -> f64 {
        self.relative_eps
    }

    pub fn absolute_floor(&self) -> f64 {
        self.absolute_floor
    }

    /// Zero threshold for the singular values of a `rows x cols` matrix whose
    /// largest singular value is `sigma_max`.
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        let scale = rows.max(cols) as f64;
        (self.relative_eps * sigma_max * scale).max(self.absolute_floor)
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::LengthMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// Column vector (n x 1).
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries; for a density matrix this is its row-major
    /// vectorization.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix product. Panics on incompatible shapes.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics on incompatible shapes.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |h - h^dagger|` over entries; `f64::INFINITY` for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(h + h^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + adj[(i, j)]) * 0.5)
    }

    /// Stacks `blocks` vertically; all must share a column count.
    pub fn vstack(blocks: &[&Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Self { rows, cols, data }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product: `out[(i*rb + k, j*cb + l)] = a[i, j] * b[k, l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of the Hermitian part of `h`. The caller is
/// responsible for checking that `h` is Hermitian to begin with.
pub fn hermitian_eigen(h: &ComplexMatrix) -> HermitianEigen {
    assert!(h.is_square(), "hermitian_eigen needs a square matrix");
    let n = h.rows();
    let eig = h.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// `exp(-i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn unitary_from_hamiltonian(
    h: &ComplexMatrix,
    t: f64,
    tol: &TolerancePolicy,
) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = h.hermitian_deviation();
    let allowed = tol.absolute_floor().max(tol.relative_eps() * h.max_abs());
    if deviation > allowed {
        return Err(Error::NonHermitian { deviation });
    }
    let n = h.rows();
    if t == 0.0 || h.max_abs() == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let HermitianEigen { values, vectors } = hermitian_eigen(h);
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * phases[j]);
    Ok(scaled.matmul(&vectors.adjoint()))
}

/// Singular values (descending) and the full set of right-singular vectors,
/// paired with the value they belong to. Matrices with fewer rows than
/// columns are padded with zero rows so that every direction of the domain
/// is represented; padded directions carry singular value zero.
fn right_singular_pairs(a: &ComplexMatrix) -> (f64, Vec<(f64, Vec<Complex64>)>) {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return (0.0, Vec::new());
    }
    let padded_rows = rows.max(cols);
    let mut m = DMatrix::<Complex64>::zeros(padded_rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = a[(i, j)];
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..cols)
        .map(|k| {
            let v = (0..cols).map(|j| v_t[(k, j)].conj()).collect();
            (svd.singular_values[k], v)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let sigma_max = pairs.first().map_or(0.0, |p| p.0);
    (sigma_max, pairs)
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// A null-space direction together with the singular value it came from.
#[derive(Debug, Clone)]
pub struct NullVector {
    pub singular_value: f64,
    pub vector: Vec<Complex64>,
}

/// Null-space basis with the singular value of each direction, ordered from
/// the smallest singular value upwards.
pub fn null_space_detailed(a: &ComplexMatrix, tol: &TolerancePolicy) -> Vec<NullVector> {
    let (sigma_max, pairs) = right_singular_pairs(a);
    let threshold = tol.threshold(sigma_max, a.rows(), a.cols());
    let mut out: Vec<NullVector> = pairs
        .into_iter()
        .filter(|(s, _)| *s <= threshold)
        .map(|(singular_value, vector)| NullVector {
            singular_value,
            vector,
        })
        .collect();
    out.sort_by(|x, y| x.singular_value.total_cmp(&y.singular_value));
    out
}

/// Orthonormal basis of the numerical null space of `a`.
pub fn null_space(a: &ComplexMatrix, tol: &TolerancePolicy) -> Vec<Vec<Complex64>> {
    null_space_detailed(a, tol)
        .into_iter()
        .map(|n| n.vector)
        .collect()
}

/// Number of singular values above the null-space threshold.
pub fn matrix_rank(a: &ComplexMatrix, tol: &TolerancePolicy) -> usize {
    a.cols() - null_space_detailed(a, tol).len()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `<u|v>`, conjugating the left argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Rotates the global phase of `v` so that its largest-magnitude component
/// is real and positive. The first maximal component wins ties.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = k;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = v[best].conj() / best_abs;
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

/// Largest principal angle (radians) between the spans of two orthonormal
/// families of equal size. Computed from sines, `|(I - QaQa^dagger) Qb|`, which
/// stays accurate for tiny angles. Returns `pi/2` if the sizes differ.
pub fn max_principal_angle(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    if a.len() != b.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a[0].len();
    // Residual of each b-vector after projecting out span(a).
    let residual = ComplexMatrix::from_fn(n, b.len(), |i, j| {
        let proj: Complex64 = a.iter().map(|q| q[i] * inner(q, &b[j])).sum();
        b[j][i] - proj
    });
    let sin_max = singular_values(&residual).first().copied().unwrap_or(0.0);
    sin_max.min(1.0).asin()
}
