//! Dark-state analysis.
//!
//! A pure initial state `|psi0>` in `H0` never populates `H2` under a Kraus
//! channel exactly when `<2,k|E_a|psi0> = 0` for every `k` and `a`. Stacking
//! those conditions gives the `d*M2 x M0` matrix `W`, whose null space is the
//! set of dark states. When `M0 > d*M2` the null space is guaranteed to be
//! nontrivial; otherwise it exists only when `W` loses column rank.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{apply, minimal_kraus, KrausChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    fix_phase, matrix_rank, null_space_detailed, vec_norm, ComplexMatrix, TolerancePolicy,
};
use crate::space::{Subspace, SubspacePartition};
use crate::state::{h2_coherence_norm, pure_to_density, subspace_population, PureState};

/// Unit-norm tolerance for candidate initial states.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// `W[(k-1)*d + (a-1), n-1] = <2,k| E_a |0,n>`; rows run over `k` (major)
/// and `a` (minor).
#[derive(Debug, Clone, PartialEq)]
pub struct WMatrix {
    entries: ComplexMatrix,
    d: usize,
    m0: usize,
    m2: usize,
}

impl WMatrix {
    /// Wraps a raw `d*m2 x m0` matrix.
    pub fn from_entries(entries: ComplexMatrix, d: usize, m2: usize) -> Result<Self> {
        if entries.rows() != d * m2 || d == 0 || m2 == 0 || entries.cols() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "W must be {}x(m0 >= 1), got {}x{}",
                d * m2,
                entries.rows(),
                entries.cols()
            )));
        }
        Ok(Self {
            m0: entries.cols(),
            entries,
            d,
            m2,
        })
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    pub fn m2(&self) -> usize {
        self.m2
    }
}

fn check_dims(c: &KrausChannel, p: &SubspacePartition) -> Result<()> {
    if c.dim() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            found: c.dim(),
        });
    }
    Ok(())
}

/// Collects the `H2 <- H0` blocks of every Kraus operator into `W`.
pub fn build_w(c: &KrausChannel, p: &SubspacePartition) -> Result<WMatrix> {
    check_dims(c, p)?;
    let d = c.d();
    let h0 = p.offset(Subspace::H0);
    let h2 = p.offset(Subspace::H2);
    let entries = ComplexMatrix::from_fn(d * p.m2(), p.m0(), |row, n| {
        let (k, a) = (row / d, row % d);
        c.ops()[a][(h2 + k, h0 + n)]
    });
    WMatrix::from_entries(entries, d, p.m2())
}

/// `M0 > d * M2`: the sufficient condition for a dark state.
pub fn dimension_test(m0: usize, d: usize, m2: usize) -> bool {
    m0 > d * m2
}

/// Orthonormal dark-state amplitudes in `H0`, most robust first (ascending
/// singular value of `W`). Each vector's largest component is real positive.
pub fn dark_states(w: &WMatrix, tol: &TolerancePolicy) -> Vec<Vec<Complex64>> {
    null_space_detailed(w.entries(), tol)
        .into_iter()
        .map(|n| {
            let mut v = n.vector;
            fix_phase(&mut v);
            v
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankAnalysis {
    pub rank: usize,
    pub full_column_rank: bool,
    pub nullity: usize,
}

impl RankAnalysis {
    /// Whether some `H0` state avoids `H2`, i.e. the columns of `W` are
    /// linearly dependent.
    pub fn control_possible(&self) -> bool {
        !self.full_column_rank
    }
}

/// Numerical rank of `W`. Full column rank is equivalent to some `M0 x M0`
/// minor being nonzero, so a rank-deficient `W` is exactly the case where
/// control survives `M0 <= d*M2`.
pub fn rank_analysis(w: &WMatrix, tol: &TolerancePolicy) -> RankAnalysis {
    let rank = matrix_rank(w.entries(), tol);
    RankAnalysis {
        rank,
        full_column_rank: rank == w.m0(),
        nullity: w.m0() - rank,
    }
}

/// What a candidate state leaves behind in `H2` after one application of the
/// channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkStateResidual {
    pub h2_population: f64,
    pub h2_coherence: f64,
}

/// Evolves `embed_h0(psi0)` through the channel and measures the `H2`
/// population and the norm of the `H2` rows of the result.
pub fn verify_dark_state(
    c: &KrausChannel,
    p: &SubspacePartition,
    psi0: &[Complex64],
) -> Result<DarkStateResidual> {
    check_dims(c, p)?;
    let norm = vec_norm(psi0);
    if (norm - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::InvalidState(format!(
            "initial state has norm {norm}, expected 1"
        )));
    }
    let psi = PureState::normalized(p.embed_h0(psi0)?)?;
    let rho = apply(c, &pure_to_density(&psi))?;
    Ok(DarkStateResidual {
        h2_population: subspace_population(&rho, p, Subspace::H2)?,
        h2_coherence: h2_coherence_norm(&rho, p)?,
    })
}

/// Everything the analysis learns about one (channel, partition) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    /// Kraus count of the representation that was supplied.
    pub d_given: usize,
    /// Choi rank: the smallest Kraus count for this map.
    pub d_minimal: usize,
    /// `M0 > d * M2` for the `d` the analysis ran with.
    pub dimension_sufficient: bool,
    pub w_rank: usize,
    pub nullity: usize,
    pub dark_basis: Vec<Vec<Complex64>>,
    pub verification: Vec<DarkStateResidual>,
}

impl FeasibilityReport {
    pub fn has_dark_state(&self) -> bool {
        !self.dark_basis.is_empty()
    }
}

/// Full pipeline: minimal Kraus count, `W`, rank, dark basis and a check of
/// every dark vector by evolution. With `use_minimal` the analysis runs on
/// the Choi-minimal representation and the dimension test uses `d_minimal`;
/// otherwise both use the representation as given.
pub fn analyze(
    c: &KrausChannel,
    p: &SubspacePartition,
    tol: &TolerancePolicy,
    use_minimal: bool,
) -> Result<FeasibilityReport> {
    check_dims(c, p)?;
    let minimal = minimal_kraus(c, tol)?;
    let d_minimal = minimal.d();
    let working = if use_minimal { &minimal } else { c };
    let w = build_w(working, p)?;
    let ranks = rank_analysis(&w, tol);
    let dark_basis = dark_states(&w, tol);
    let verification = dark_basis
        .iter()
        .map(|v| verify_dark_state(c, p, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeasibilityReport {
        m0: p.m0(),
        m1: p.m1(),
        m2: p.m2(),
        d_given: c.d(),
        d_minimal,
        dimension_sufficient: dimension_test(p.m0(), working.d(), p.m2()),
        w_rank: ranks.rank,
        nullity: ranks.nullity,
        dark_basis,
        verification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::remix_kraus;
    use crate::numerics::{max_principal_angle, ONE, ZERO};
    use crate::random::{random_channel, random_isometry, seeded};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Permutation on three levels sending |0,1> to |2,1>.
    fn swap_channel() -> KrausChannel {
        let mut s = ComplexMatrix::zeros(3, 3);
        s[(2, 0)] = ONE;
        s[(0, 2)] = ONE;
        s[(1, 1)] = ONE;
        KrausChannel::unitary(s).unwrap()
    }

    fn p111() -> SubspacePartition {
        SubspacePartition::new(1, 1, 1).unwrap()
    }

    #[test]
    fn w_examples() {
        let w = build_w(&KrausChannel::identity(3), &p111()).unwrap();
        assert_eq!(w.entries(), &ComplexMatrix::zeros(1, 1));
        let w = build_w(&swap_channel(), &p111()).unwrap();
        assert_eq!(w.entries()[(0, 0)], ONE);
        assert!(matches!(
            build_w(&KrausChannel::identity(4), &p111()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn w_matches_element_lookup() {
        let ch = random_channel(&mut seeded(40), 6, 2);
        let p = SubspacePartition::new(3, 1, 2).unwrap();
        let w = build_w(&ch, &p).unwrap();
        assert_eq!(w.entries().shape(), (4, 3));
        for k in 1..=2 {
            for a in 1..=2 {
                for n in 1..=3 {
                    let row = p.index_of(Subspace::H2, k).unwrap();
                    let col = p.index_of(Subspace::H0, n).unwrap();
                    assert_eq!(
                        w.entries()[((k - 1) * 2 + (a - 1), n - 1)],
                        ch.ops()[a - 1][(row, col)]
                    );
                }
            }
        }
    }

    #[test]
    fn dimension_test_is_strict() {
        assert!(dimension_test(3, 1, 2));
        assert!(!dimension_test(4, 2, 2));
        assert!(dimension_test(5, 2, 2));
    }

    #[test]
    fn dark_state_examples() {
        let tol = TolerancePolicy::default();
        let w = build_w(&KrausChannel::identity(3), &p111()).unwrap();
        assert_eq!(dark_states(&w, &tol), vec![vec![ONE]]);
        let w = build_w(&swap_channel(), &p111()).unwrap();
        assert!(dark_states(&w, &tol).is_empty());
    }

    #[test]
    fn rank_examples() {
        let tol = TolerancePolicy::default();
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = ONE;
        let w = WMatrix::from_entries(m, 2, 1).unwrap();
        let r = rank_analysis(&w, &tol);
        assert_eq!((r.rank, r.nullity, r.full_column_rank), (1, 1, false));
        assert!(r.control_possible());

        let w = WMatrix::from_entries(ComplexMatrix::identity(2), 1, 2).unwrap();
        let r = rank_analysis(&w, &tol);
        assert_eq!((r.rank, r.nullity, r.full_column_rank), (2, 0, true));
        assert!(!r.control_possible());
    }

    #[test]
    fn planted_null_vector_is_recovered() {
        let tol = TolerancePolicy::default();
        let mut rng = seeded(41);
        // Square 3x3 W (M0 = d*M2) whose last column is a combination of the
        // first two, so v = (a, b, -1) / |.| spans the null space.
        let g = crate::random::ginibre(&mut rng, 3, 2);
        let (a, b) = (Complex64::new(0.3, -0.4), Complex64::new(-1.1, 0.2));
        let entries = ComplexMatrix::from_fn(3, 3, |i, j| match j {
            0 | 1 => g[(i, j)],
            _ => g[(i, 0)] * a + g[(i, 1)] * b,
        });
        let w = WMatrix::from_entries(entries, 3, 1).unwrap();
        let r = rank_analysis(&w, &tol);
        assert_eq!(r.nullity, 1);
        let planted = {
            let v = vec![a, b, c(-1.0)];
            let n = vec_norm(&v);
            v.into_iter().map(|z| z / n).collect::<Vec<_>>()
        };
        let found = dark_states(&w, &tol);
        assert!(max_principal_angle(&found, &[planted]) < 1e-10);
    }

    #[test]
    fn verification_examples() {
        let res = verify_dark_state(&KrausChannel::identity(3), &p111(), &[ONE]).unwrap();
        assert_eq!((res.h2_population, res.h2_coherence), (0.0, 0.0));
        let res = verify_dark_state(&swap_channel(), &p111(), &[ONE]).unwrap();
        assert_eq!((res.h2_population, res.h2_coherence), (1.0, 1.0));
        assert!(matches!(
            verify_dark_state(&swap_channel(), &p111(), &[c(2.0)]),
            Err(Error::InvalidState(_))
        ));
        assert!(verify_dark_state(&swap_channel(), &p111(), &[ONE, ZERO]).is_err());
    }

    #[test]
    fn analyze_examples() {
        let tol = TolerancePolicy::default();
        let p = SubspacePartition::new(2, 1, 1).unwrap();
        let r = analyze(&KrausChannel::identity(4), &p, &tol, true).unwrap();
        assert_eq!(r.d_minimal, 1);
        assert!(r.dimension_sufficient);
        assert_eq!(r.nullity, 2);
        assert_eq!(r.verification.len(), 2);

        let r = analyze(&swap_channel(), &p111(), &tol, true).unwrap();
        assert_eq!(r.nullity, 0);
        assert!(r.dark_basis.is_empty());
        assert!(!r.has_dark_state());
    }

    #[test]
    fn d_as_given_uses_supplied_representation() {
        let tol = TolerancePolicy::default();
        let p = SubspacePartition::new(2, 1, 1).unwrap();
        let u = random_isometry(&mut seeded(3), 3, 1);
        let padded = remix_kraus(&KrausChannel::identity(4), &u).unwrap();
        let given = analyze(&padded, &p, &tol, false).unwrap();
        assert_eq!((given.d_given, given.d_minimal), (3, 1));
        assert!(!given.dimension_sufficient);
        assert_eq!(given.nullity, 2);
        let minimal = analyze(&padded, &p, &tol, true).unwrap();
        assert!(minimal.dimension_sufficient);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn theorem_holds_for_random_channels(seed in any::<u64>(), m2 in 1usize..3, d in 1usize..3, extra in 1usize..3, m1 in 0usize..2) {
            let tol = TolerancePolicy::default();
            let m0 = d * m2 + extra;
            let p = SubspacePartition::new(m0, m1, m2).unwrap();
            let ch = random_channel(&mut seeded(seed), p.m(), d);
            let w = build_w(&ch, &p).unwrap();
            let dark = dark_states(&w, &tol);
            prop_assert!(dark.len() >= m0 - d * m2);
            for v in &dark {
                let r = verify_dark_state(&ch, &p, v).unwrap();
                prop_assert!(r.h2_population <= 1e-8 && r.h2_coherence <= 1e-8);
                prop_assert!(r.h2_coherence <= 10.0 * r.h2_population.sqrt() + 1e-10);
            }
        }

        #[test]
        fn appending_operators_never_adds_dark_states(seed in any::<u64>(), d in 1usize..3) {
            let tol = TolerancePolicy::default();
            let p = SubspacePartition::new(4, 1, 1).unwrap();
            let mut rng = seeded(seed);
            // Scale down so the extended set stays trace non-increasing.
            let base = random_channel(&mut rng, 6, d);
            let extra = random_channel(&mut rng, 6, 1);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let half: Vec<_> = base.ops().iter().map(|e| e.scale_real(s)).collect();
            let narrow = KrausChannel::new(half).unwrap();
            let wide = narrow.with_appended(&[extra.ops()[0].scale_real(s)]).unwrap();
            let before = rank_analysis(&build_w(&narrow, &p).unwrap(), &tol).nullity;
            let after = rank_analysis(&build_w(&wide, &p).unwrap(), &tol).nullity;
            prop_assert!(after <= before);
        }
    }
}
