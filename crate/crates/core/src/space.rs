//! Three-way partition of the system Hilbert space.
//!
//! Flat indices are laid out block by block: `H0` first, then `H1`, then
//! `H2`. Basis labels inside a block are 1-based, flat indices 0-based.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subspace {
    H0,
    H1,
    H2,
}

impl Subspace {
    pub const ALL: [Subspace; 3] = [Subspace::H0, Subspace::H1, Subspace::H2];

    pub fn number(self) -> usize {
        match self {
            Subspace::H0 => 0,
            Subspace::H1 => 1,
            Subspace::H2 => 2,
        }
    }
}

impl TryFrom<usize> for Subspace {
    type Error = Error;

    fn try_from(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Subspace::H0),
            1 => Ok(Subspace::H1),
            2 => Ok(Subspace::H2),
            _ => Err(Error::InvalidPartition(format!("no subspace numbered {i}"))),
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.number())
    }
}

/// Dimensions `(M0, M1, M2)` of the three blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPartition", into = "RawPartition")]
pub struct SubspacePartition {
    m0: usize,
    m1: usize,
    m2: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    m0: usize,
    m1: usize,
    m2: usize,
}

impl TryFrom<RawPartition> for SubspacePartition {
    type Error = Error;

    fn try_from(r: RawPartition) -> Result<Self> {
        SubspacePartition::new(r.m0, r.m1, r.m2)
    }
}

impl From<SubspacePartition> for RawPartition {
    fn from(p: SubspacePartition) -> Self {
        RawPartition {
            m0: p.m0,
            m1: p.m1,
            m2: p.m2,
        }
    }
}

impl SubspacePartition {
    /// `m0` and `m2` must be at least 1; `m1` may be zero.
    pub fn new(m0: usize, m1: usize, m2: usize) -> Result<Self> {
        if m0 == 0 || m2 == 0 {
            return Err(Error::InvalidPartition(format!(
                "m0 and m2 must be positive, got ({m0}, {m1}, {m2})"
            )));
        }
        Ok(Self { m0, m1, m2 })
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    /// Total dimension `M = M0 + M1 + M2`.
    pub fn m(&self) -> usize {
        self.m0 + self.m1 + self.m2
    }

    pub fn dim_of(&self, s: Subspace) -> usize {
        match s {
            Subspace::H0 => self.m0,
            Subspace::H1 => self.m1,
            Subspace::H2 => self.m2,
        }
    }

    pub fn offset(&self, s: Subspace) -> usize {
        match s {
            Subspace::H0 => 0,
            Subspace::H1 => self.m0,
            Subspace::H2 => self.m0 + self.m1,
        }
    }

    /// Flat indices of a block.
    pub fn range(&self, s: Subspace) -> std::ops::Range<usize> {
        let start = self.offset(s);
        start..start + self.dim_of(s)
    }

    /// Flat index of `|i, n>` with 1-based label `n`.
    pub fn index_of(&self, s: Subspace, n: usize) -> Result<usize> {
        let dim = self.dim_of(s);
        if n == 0 || n > dim {
            return Err(Error::OutOfRange {
                subspace: s.number(),
                label: n,
                dim,
            });
        }
        Ok(self.offset(s) + n - 1)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn label_of(&self, flat: usize) -> Option<(Subspace, usize)> {
        Subspace::ALL.into_iter().find_map(|s| {
            self.range(s)
                .contains(&flat)
                .then(|| (s, flat - self.offset(s) + 1))
        })
    }

    /// Diagonal 0/1 projector onto a block.
    pub fn projector(&self, s: Subspace) -> ComplexMatrix {
        let range = self.range(s);
        let diag: Vec<Complex64> = (0..self.m())
            .map(|k| if range.contains(&k) { ONE } else { ZERO })
            .collect();
        ComplexMatrix::from_diagonal(&diag)
    }

    /// Places `amplitudes` in the `H0` block of an `M`-vector.
    pub fn embed_h0(&self, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
        if amplitudes.len() != self.m0 {
            return Err(Error::LengthMismatch {
                expected: self.m0,
                found: amplitudes.len(),
            });
        }
        let mut v = vec![ZERO; self.m()];
        v[..self.m0].copy_from_slice(amplitudes);
        Ok(v)
    }
}

impl fmt::Display for SubspacePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m0, self.m1, self.m2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::vec_norm;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_empty_h0_or_h2() {
        assert!(SubspacePartition::new(0, 1, 1).is_err());
        assert!(SubspacePartition::new(1, 1, 0).is_err());
        assert!(SubspacePartition::new(1, 0, 1).is_ok());
    }

    #[test]
    fn index_layout() {
        let p = SubspacePartition::new(2, 1, 1).unwrap();
        assert_eq!(p.index_of(Subspace::H0, 1).unwrap(), 0);
        assert_eq!(p.index_of(Subspace::H1, 1).unwrap(), 2);
        assert_eq!(p.index_of(Subspace::H2, 1).unwrap(), 3);
        assert!(matches!(
            p.index_of(Subspace::H0, 3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(p.index_of(Subspace::H2, 0).is_err());
    }

    #[test]
    fn projectors() {
        let p = SubspacePartition::new(1, 1, 1).unwrap();
        assert_eq!(
            p.projector(Subspace::H2),
            ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0])
        );
        let p = SubspacePartition::new(2, 1, 1).unwrap();
        assert_eq!(
            p.projector(Subspace::H0),
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0])
        );
        let sum = &(&p.projector(Subspace::H0) + &p.projector(Subspace::H1))
            + &p.projector(Subspace::H2);
        assert_eq!(sum, ComplexMatrix::identity(4));
    }

    #[test]
    fn embedding() {
        let p = SubspacePartition::new(2, 1, 1).unwrap();
        assert_eq!(
            p.embed_h0(&[c(1.0), c(0.0)]).unwrap(),
            vec![c(1.0), c(0.0), c(0.0), c(0.0)]
        );
        let s = c(FRAC_1_SQRT_2);
        assert_eq!(
            p.embed_h0(&[s, s]).unwrap(),
            vec![s, s, c(0.0), c(0.0)]
        );
        let p = SubspacePartition::new(1, 2, 1).unwrap();
        assert_eq!(
            p.embed_h0(&[c(1.0)]).unwrap(),
            vec![c(1.0), c(0.0), c(0.0), c(0.0)]
        );
        assert!(matches!(
            p.embed_h0(&[c(1.0), c(0.0)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip_rejects_invalid() {
        let p: SubspacePartition = serde_json::from_str(r#"{"m0":3,"m1":0,"m2":1}"#).unwrap();
        assert_eq!(p, SubspacePartition::new(3, 0, 1).unwrap());
        assert!(serde_json::from_str::<SubspacePartition>(r#"{"m0":0,"m1":0,"m2":1}"#).is_err());
        assert!(
            serde_json::from_str::<SubspacePartition>(r#"{"m0":1,"m1":0,"m2":1,"m3":1}"#).is_err()
        );
    }

    proptest! {
        #[test]
        fn index_of_is_a_bijection(m0 in 1usize..5, m1 in 0usize..5, m2 in 1usize..5) {
            let p = SubspacePartition::new(m0, m1, m2).unwrap();
            let mut seen = vec![false; p.m()];
            for s in Subspace::ALL {
                for n in 1..=p.dim_of(s) {
                    let k = p.index_of(s, n).unwrap();
                    prop_assert!(!seen[k]);
                    seen[k] = true;
                    prop_assert_eq!(p.label_of(k), Some((s, n)));
                }
            }
            prop_assert!(seen.into_iter().all(|b| b));
        }

        #[test]
        fn projectors_act_exactly_on_embedded_states(
            m0 in 1usize..4, m1 in 0usize..3, m2 in 1usize..3,
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        ) {
            let p = SubspacePartition::new(m0, m1, m2).unwrap();
            let v: Vec<Complex64> = amps[..m0].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let e = p.embed_h0(&v).unwrap();
            prop_assert_eq!(vec_norm(&e), vec_norm(&v));
            prop_assert_eq!(p.projector(Subspace::H0).mul_vec(&e), e.clone());
            for s in [Subspace::H1, Subspace::H2] {
                prop_assert!(p.projector(s).mul_vec(&e).iter().all(|z| *z == ZERO));
            }
        }
    }
}
