//! Donor-acceptor energy transfer model.
//!
//! Three electronic manifolds: a lower manifold (`H0`) where preparation
//! starts, the donor (`H1`) and the acceptor (`H2`). `H0` couples to the
//! donor, the donor couples to the acceptor, and a small ladder bath couples
//! to the whole system. The question asked of the model is whether some
//! superposition in `H0` leaves no acceptor population at a chosen time.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply, dilation_to_kraus, DilationModel};
use crate::control::{analyze, FeasibilityReport};
use crate::error::{Error, Result};
use crate::numerics::{kron, singular_values, ComplexMatrix, TolerancePolicy};
use crate::random::{random_hermitian, seeded};
use crate::space::{Subspace, SubspacePartition};
use crate::state::{pure_to_density, subspace_population, PureState};

pub const POPULATION_TOL: f64 = 1e-10;

/// Inputs of the donor-acceptor model. Energies are angular frequencies
/// (`hbar = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DonorAcceptorParams {
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    pub n_bath: usize,
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub level_spacing: f64,
    pub j_da: f64,
    pub j_0d: f64,
    pub g_sb: f64,
    /// Bath level `a` starts with weight `exp(-a * bath_temp_weight)`.
    pub bath_temp_weight: f64,
    pub time: f64,
    pub seed: u64,
}

impl Default for DonorAcceptorParams {
    /// A cold two-level bath: the excited bath level carries weight
    /// `e^-50`, below the Kraus floor, so the channel has `d = 2` and
    /// `M0 = 3 > d * M2 = 2`.
    fn default() -> Self {
        Self {
            m0: 3,
            m1: 2,
            m2: 1,
            n_bath: 2,
            e0: 0.0,
            e1: 2.0,
            e2: 1.6,
            level_spacing: 0.15,
            j_da: 0.4,
            j_0d: 0.5,
            g_sb: 0.3,
            bath_temp_weight: 50.0,
            time: 4.0,
            seed: 42,
        }
    }
}

impl DonorAcceptorParams {
    pub fn validate(&self) -> Result<()> {
        if self.m0 == 0 || self.m1 == 0 || self.m2 == 0 || self.n_bath == 0 {
            return Err(Error::InvalidParams(
                "manifold and bath sizes must be at least 1".into(),
            ));
        }
        let reals = [
            ("e0", self.e0),
            ("e1", self.e1),
            ("e2", self.e2),
            ("level_spacing", self.level_spacing),
            ("j_da", self.j_da),
            ("j_0d", self.j_0d),
            ("g_sb", self.g_sb),
            ("bath_temp_weight", self.bath_temp_weight),
            ("time", self.time),
        ];
        if let Some((name, _)) = reals.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        if self.time < 0.0 {
            return Err(Error::InvalidParams("time must be non-negative".into()));
        }
        Ok(())
    }

    /// Normalized `exp(-a * w)` for `a = 0..n_bath`.
    pub fn bath_probs(&self) -> Vec<f64> {
        let w = self.bath_temp_weight;
        let exps: Vec<f64> = (0..self.n_bath).map(|a| -(a as f64) * w).collect();
        let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = exps.iter().map(|x| (x - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    }
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Builds the dilation model and partition for the given parameters.
pub fn build_donor_acceptor(
    params: &DonorAcceptorParams,
) -> Result<(DilationModel, SubspacePartition)> {
    params.validate()?;
    let p = SubspacePartition::new(params.m0, params.m1, params.m2)?;
    let m = p.m();
    let mut rng = seeded(params.seed);

    let mut h_s = ComplexMatrix::zeros(m, m);
    for (s, base) in [
        (Subspace::H0, params.e0),
        (Subspace::H1, params.e1),
        (Subspace::H2, params.e2),
    ] {
        for (n, k) in p.range(s).enumerate() {
            h_s[(k, k)] = Complex64::new(base + n as f64 * params.level_spacing, 0.0);
        }
    }
    for (from, to, strength) in [
        (Subspace::H0, Subspace::H1, params.j_0d),
        (Subspace::H1, Subspace::H2, params.j_da),
    ] {
        for i in p.range(from) {
            for j in p.range(to) {
                let z = random_phase(&mut rng) * strength;
                h_s[(i, j)] = z;
                h_s[(j, i)] = z.conj();
            }
        }
    }

    let n_b = params.n_bath;
    let h_b = ComplexMatrix::from_real_diagonal(&(0..n_b).map(|a| a as f64).collect::<Vec<_>>());

    // Unit-norm random system operator times a ladder position operator.
    let raw = random_hermitian(&mut rng, m);
    let norm = singular_values(&raw).first().copied().unwrap_or(1.0);
    let s_op = raw.scale_real(1.0 / norm);
    let mut x_b = ComplexMatrix::zeros(n_b, n_b);
    for a in 0..n_b.saturating_sub(1) {
        let v = Complex64::new(((a + 1) as f64).sqrt(), 0.0);
        x_b[(a, a + 1)] = v;
        x_b[(a + 1, a)] = v;
    }
    let h_sb = kron(&s_op, &x_b).scale_real(params.g_sb);

    let model = DilationModel::new(h_s, h_b, h_sb, params.bath_probs(), params.time)?;
    Ok((model, p))
}

/// Subspace populations along a time grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub pop0: Vec<f64>,
    pub pop1: Vec<f64>,
    pub pop2: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t,pop0,pop1,pop2`; values carry 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,pop0,pop1,pop2\n");
        for k in 0..self.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.pop0[k], self.pop1[k], self.pop2[k]
            );
        }
        out
    }
}

/// Uniformly spaced grid `t_max * k / steps` for `k = 0..=steps`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !t_max.is_finite() || t_max < 0.0 || steps == 0 {
        return Err(Error::InvalidParams(
            "t_max must be finite and non-negative, steps at least 1".into(),
        ));
    }
    Ok((0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect())
}

/// Populations of the three blocks after evolving `embed_h0(psi0)` to each
/// time in `t_grid` (non-negative, non-decreasing).
pub fn run_transfer(
    model: &DilationModel,
    p: &SubspacePartition,
    psi0: &[Complex64],
    t_grid: &[f64],
) -> Result<TimeSeries> {
    if model.system_dim() != p.m() {
        return Err(Error::DimensionMismatch {
            expected: p.m(),
            found: model.system_dim(),
        });
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0)
        || t_grid.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::InvalidParams(
            "time grid must be non-negative and non-decreasing".into(),
        ));
    }
    let rho0 = pure_to_density(&PureState::new(p.embed_h0(psi0)?)?);
    let mut series = TimeSeries::default();
    for &t in t_grid {
        let channel = dilation_to_kraus(&model.with_time(t)?)?;
        let rho = apply(&channel, &rho0)?;
        series.times.push(t);
        series.pop0.push(subspace_population(&rho, p, Subspace::H0)?);
        series.pop1.push(subspace_population(&rho, p, Subspace::H1)?);
        series.pop2.push(subspace_population(&rho, p, Subspace::H2)?);
    }
    Ok(series)
}

/// Acceptor population at the target time for the best dark state versus the
/// uniform superposition over `H0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub dark_found: bool,
    pub dark_pop2: f64,
    pub uniform_pop2: f64,
    /// `max(uniform_pop2, floor) / max(dark_pop2, floor)`; 0 when no dark
    /// state exists.
    pub suppression_ratio: f64,
}

pub fn uniform_h0_state(m0: usize) -> Vec<Complex64> {
    let a = Complex64::new(1.0 / (m0 as f64).sqrt(), 0.0);
    vec![a; m0]
}

fn pop2_at(channel: &crate::channel::KrausChannel, p: &SubspacePartition, psi0: &[Complex64]) -> Result<f64> {
    let rho0 = pure_to_density(&PureState::new(p.embed_h0(psi0)?)?);
    subspace_population(&apply(channel, &rho0)?, p, Subspace::H2)
}

/// Like [`compare_initial_states`], also returning the analysis it ran.
pub fn compare_with_report(
    model: &DilationModel,
    p: &SubspacePartition,
    t_star: f64,
    tol: &TolerancePolicy,
) -> Result<(FeasibilityReport, Comparison)> {
    if !t_star.is_finite() || t_star < 0.0 {
        return Err(Error::InvalidParams("t_star must be non-negative".into()));
    }
    let channel = dilation_to_kraus(&model.with_time(t_star)?)?;
    let report = analyze(&channel, p, tol, true)?;
    let Some(dark) = report.dark_basis.first() else {
        let comparison = Comparison {
            dark_found: false,
            dark_pop2: 0.0,
            uniform_pop2: 0.0,
            suppression_ratio: 0.0,
        };
        return Ok((report, comparison));
    };
    let floor = tol.absolute_floor();
    let dark_pop2 = pop2_at(&channel, p, dark)?;
    let uniform_pop2 = pop2_at(&channel, p, &uniform_h0_state(p.m0()))?;
    let comparison = Comparison {
        dark_found: true,
        dark_pop2,
        uniform_pop2,
        suppression_ratio: uniform_pop2.max(floor) / dark_pop2.max(floor),
    };
    Ok((report, comparison))
}

pub fn compare_initial_states(
    model: &DilationModel,
    p: &SubspacePartition,
    t_star: f64,
) -> Result<Comparison> {
    compare_with_report(model, p, t_star, &TolerancePolicy::default()).map(|(_, c)| c)
}

/// Time grid used by the packaged demo: twice the target time, 60 steps.
pub const DEMO_STEPS: usize = 60;

/// Output of the packaged donor-acceptor demonstration.
#[derive(Debug, Clone)]
pub struct DemoOutcome {
    pub params: DonorAcceptorParams,
    pub report: FeasibilityReport,
    pub comparison: Comparison,
    /// Populations for the first dark state (empty when none exists).
    pub series: TimeSeries,
    pub t_max: f64,
    pub steps: usize,
}

/// Builds the model, analyzes it at `params.time`, compares dark and uniform
/// preparations, and traces the dark state over `[0, 2 * params.time]`.
pub fn run_demo(params: &DonorAcceptorParams, tol: &TolerancePolicy) -> Result<DemoOutcome> {
    let (model, p) = build_donor_acceptor(params)?;
    let (report, comparison) = compare_with_report(&model, &p, params.time, tol)?;
    let t_max = 2.0 * params.time;
    let series = match report.dark_basis.first() {
        Some(dark) => run_transfer(&model, &p, dark, &uniform_grid(t_max, DEMO_STEPS)?)?,
        None => TimeSeries::default(),
    };
    Ok(DemoOutcome {
        params: params.clone(),
        report,
        comparison,
        series,
        t_max,
        steps: DEMO_STEPS,
    })
}
