//! Monte-Carlo harness for the factorization bound, plus the equivalence
//! suites run by `gmqd verify`.
//!
//! Every sampled state is drawn from its own ChaCha stream derived from
//! `(seed, ensemble, index)`, and per-state outcomes are merged in index
//! order, so a report depends only on its configuration.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::channels::{
    evolve_bloch, gmqd_dpc_closed, gmqd_pdc_closed, gmqd_pdc_dpc_closed, kraus_apply, ChannelKind,
    ChannelTransfer,
};
use crate::correlations::{concurrence, concurrence_xstate, gmqd_bloch, gmqd_svd, gmqd_xstate};
use crate::error::{Error, Result};
use crate::factorization::{
    bell_factor, bound_is_proven, is_tight_under_dephasing, BellFactor, FactorizationBound,
};
use crate::linalg::C64;
use crate::par::Execution;
use crate::state::{BlochState, DensityMatrix, XStateParams, PSD_TOL};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerance on the spread of the Bell factor across vertices for proven pairs.
pub const BELL_SPREAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelPair {
    pub a: ChannelKind,
    pub b: ChannelKind,
}

impl ChannelPair {
    pub const fn new(a: ChannelKind, b: ChannelKind) -> Self {
        Self { a, b }
    }

    /// The pairs checked by default: both-sided phase damping, depolarizing
    /// and mixed, the two one-sided channels, and amplitude damping.
    pub fn defaults() -> Vec<ChannelPair> {
        use ChannelKind::*;
        vec![
            Self::new(Pdc, Pdc),
            Self::new(Dpc, Dpc),
            Self::new(Pdc, Dpc),
            Self::new(Pdc, Identity),
            Self::new(Dpc, Identity),
            Self::new(Adc, Adc),
        ]
    }

    pub fn is_proven(&self) -> bool {
        bound_is_proven(self.a, self.b)
    }

    pub fn transfers(&self, p: f64, q: f64) -> Result<(ChannelTransfer, ChannelTransfer)> {
        Ok((self.a.transfer(p)?, self.b.transfer(q)?))
    }
}

impl fmt::Display for ChannelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl FromStr for ChannelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(',').ok_or_else(|| {
            Error::InvalidConfig(format!("channel pair '{s}' must look like 'pdc,dpc'"))
        })?;
        Ok(Self::new(a.parse()?, b.parse()?))
    }
}

impl Serialize for ChannelPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Population the rejection sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// `(r, s)` uniform in `[−1,1]²`, `c` uniform in `[−1,1]³`.
    XStates,
    /// `r = s = 0`, `c` uniform in `[−1,1]³`.
    BellDiagonal,
}

impl Ensemble {
    fn stream_tag(self) -> u64 {
        match self {
            Ensemble::XStates => 1,
            Ensemble::BellDiagonal => 2,
        }
    }
}

/// Deterministic stream for `(seed, tag, index)`.
fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 48) ^ index);
    rng
}

/// Physical X-state number `index` of the ensemble, by rejection sampling
/// (strict positivity, tolerance 0).
pub fn sample_state(seed: u64, ensemble: Ensemble, index: u64) -> XStateParams {
    let mut rng = stream_rng(seed, ensemble.stream_tag(), index);
    loop {
        let candidate = match ensemble {
            Ensemble::XStates => XStateParams::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ),
            Ensemble::BellDiagonal => XStateParams::bell_diagonal(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ),
        };
        if candidate.is_physical(0.0) {
            return candidate;
        }
    }
}

/// Random full-rank two-qubit state `GG†/Tr(GG†)` with `G` uniform in the
/// complex unit square.
pub fn sample_general_state(seed: u64, index: u64) -> DensityMatrix {
    let mut rng = stream_rng(seed, 3, index);
    let g = Matrix4::<C64>::from_fn(|_, _| {
        C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    });
    let m = g * g.adjoint();
    let trace = m.trace();
    DensityMatrix::from_matrix_unchecked(m / trace)
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub n_states: usize,
    pub p_grid: Vec<f64>,
    pub pairs: Vec<ChannelPair>,
    pub ensembles: Vec<Ensemble>,
    pub seed: u64,
    pub tol: f64,
    /// Cap on recorded violations per pair; counts are always complete.
    pub max_recorded: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_states: 10_000,
            p_grid: unit_grid(11),
            pairs: ChannelPair::defaults(),
            ensembles: vec![Ensemble::XStates, Ensemble::BellDiagonal],
            seed: 2012,
            tol: 1e-10,
            max_recorded: 32,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 {
            return Err(Error::InvalidConfig(
                "number of states must be at least 1".into(),
            ));
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidConfig(
                "p grid must be a non-empty subset of [0, 1]".into(),
            ));
        }
        if self.pairs.is_empty() || self.ensembles.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one channel pair and one ensemble are required".into(),
            ));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be non-negative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub index: u64,
    pub state: XStateParams,
    pub p: f64,
    pub q: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub ensemble: Ensemble,
    pub pair: ChannelPair,
    /// Amplitude-damping pairs: the bound is conjectural, results are findings.
    pub conjecture: bool,
    pub evaluations: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    /// Most negative `lhs − rhs` seen, or 0 when none is negative.
    pub max_negative_gap: f64,
    pub max_bell_spread: f64,
    /// States covered by an equality claim (tight dephasing states, or
    /// Bell-diagonal states under two depolarizing channels with p, q free).
    pub equality_cases_checked: u64,
    pub equality_cases_held: u64,
    pub equality_failure_count: u64,
    pub equality_failures: Vec<Violation>,
}

impl PairReport {
    /// Proven pairs must show no violations, no equality failures and a
    /// vertex-independent Bell factor.
    pub fn hard_failures(&self) -> u64 {
        if self.conjecture {
            return 0;
        }
        let spread = u64::from(self.max_bell_spread > BELL_SPREAD_TOL);
        self.violation_count + self.equality_failure_count + spread
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub schema_version: u32,
    pub config: VerifyConfig,
    pub samples: u64,
    pub pairs: Vec<PairReport>,
    pub hard_violations: u64,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.hard_violations == 0
    }
}

#[derive(Default)]
struct Outcome {
    evaluations: u64,
    min_gap: f64,
    violations: Vec<Violation>,
    equality_checked: bool,
    equality_failures: Vec<Violation>,
}

struct PairPlan {
    pair: ChannelPair,
    /// `(p, q, transfers, factor)` per grid point.
    diagonal: Vec<(f64, f64, ChannelTransfer, ChannelTransfer, BellFactor)>,
    /// Full `p × q` grid, only for depolarizing on both sides.
    independent: Vec<(f64, f64, ChannelTransfer, ChannelTransfer, BellFactor)>,
}

impl PairPlan {
    fn new(pair: ChannelPair, grid: &[f64]) -> Result<Self> {
        let point = |p: f64, q: f64| -> Result<_> {
            let (a, b) = pair.transfers(p, q)?;
            Ok((p, q, a, b, bell_factor(&a, &b)))
        };
        let diagonal = grid
            .iter()
            .map(|&p| point(p, p))
            .collect::<Result<Vec<_>>>()?;
        let independent = if pair == ChannelPair::new(ChannelKind::Dpc, ChannelKind::Dpc) {
            grid.iter()
                .flat_map(|&p| grid.iter().map(move |&q| (p, q)))
                .map(|(p, q)| point(p, q))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            pair,
            diagonal,
            independent,
        })
    }

    fn max_spread(&self) -> f64 {
        self.diagonal
            .iter()
            .chain(&self.independent)
            .map(|point| point.4.spread)
            .fold(0.0, f64::max)
    }

    fn evaluate(&self, index: u64, state: &XStateParams, tol: f64) -> Outcome {
        let mut out = Outcome::default();
        let tight_dephasing = self.pair == ChannelPair::new(ChannelKind::Pdc, ChannelKind::Pdc)
            && is_tight_under_dephasing(state);
        let bell_diagonal_dpc = !self.independent.is_empty() && state.is_bell_diagonal();
        out.equality_checked = tight_dephasing || bell_diagonal_dpc;

        let points = if bell_diagonal_dpc {
            &self.independent
        } else {
            &self.diagonal
        };
        for (p, q, a, b, factor) in points {
            let bound = FactorizationBound::with_factor(state, *factor, a, b);
            let gap = bound.gap();
            let v = Violation {
                index,
                state: *state,
                p: *p,
                q: *q,
                lhs: bound.lhs,
                rhs: bound.rhs,
                gap,
            };
            out.evaluations += 1;
            out.min_gap = out.min_gap.min(gap);
            if gap < -tol {
                out.violations.push(v);
            }
            let must_be_equal = out.equality_checked || (*p == 0.0 && *q == 0.0);
            if must_be_equal && gap.abs() > tol {
                out.equality_failures.push(v);
            }
        }
        out
    }
}

/// Samples `n_states` physical states per ensemble and checks the
/// factorization bound for every configured pair across the p grid.
pub fn verify_theorem(config: &VerifyConfig, exec: Execution) -> Result<FactorizationReport> {
    config.validate()?;
    let plans = config
        .pairs
        .iter()
        .map(|&pair| PairPlan::new(pair, &config.p_grid))
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    for &ensemble in &config.ensembles {
        let outcomes = exec.map(config.n_states, |i| {
            let state = sample_state(config.seed, ensemble, i as u64);
            plans
                .iter()
                .map(|plan| plan.evaluate(i as u64, &state, config.tol))
                .collect::<Vec<_>>()
        });
        for (k, plan) in plans.iter().enumerate() {
            let mut report = PairReport {
                ensemble,
                pair: plan.pair,
                conjecture: !plan.pair.is_proven(),
                evaluations: 0,
                violation_count: 0,
                violations: Vec::new(),
                max_negative_gap: 0.0,
                max_bell_spread: plan.max_spread(),
                equality_cases_checked: 0,
                equality_cases_held: 0,
                equality_failure_count: 0,
                equality_failures: Vec::new(),
            };
            for per_state in &outcomes {
                let o = &per_state[k];
                report.evaluations += o.evaluations;
                report.max_negative_gap = report.max_negative_gap.min(o.min_gap);
                report.violation_count += o.violations.len() as u64;
                record(&mut report.violations, &o.violations, config.max_recorded);
                if o.equality_checked {
                    report.equality_cases_checked += 1;
                    if o.equality_failures.is_empty() {
                        report.equality_cases_held += 1;
                    }
                }
                report.equality_failure_count += o.equality_failures.len() as u64;
                record(
                    &mut report.equality_failures,
                    &o.equality_failures,
                    config.max_recorded,
                );
            }
            pairs.push(report);
        }
    }

    let hard_violations = pairs.iter().map(PairReport::hard_failures).sum();
    Ok(FactorizationReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        samples: (config.n_states * config.ensembles.len()) as u64,
        pairs,
        hard_violations,
    })
}

fn record(into: &mut Vec<Violation>, from: &[Violation], cap: usize) {
    let room = cap.saturating_sub(into.len());
    into.extend(from.iter().take(room).copied());
}

/// Largest disagreements between the discord routes, the closed-form and dense
/// eigenvalues, and the two concurrence routes over sampled X-states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormulaEquivalence {
    pub samples: u64,
    pub bloch_vs_svd: f64,
    pub xstate_vs_bloch: f64,
    pub eigenvalues: f64,
    pub eigenvalue_sum: f64,
    pub concurrence: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn formula_equivalence(n: usize, seed: u64, tol: f64, exec: Execution) -> FormulaEquivalence {
    let rows = exec.map(n, |i| {
        let x = sample_state(seed, Ensemble::XStates, i as u64);
        let b = x.to_bloch();
        let rho = x.to_density();
        let closed = x.eigenvalues();
        let dense = rho.eigenvalues();
        let eig = (0..4)
            .map(|k| (closed[k] - dense[k]).abs())
            .fold(0.0, f64::max);
        let general = concurrence(&rho).unwrap_or(f64::NAN);
        [
            (gmqd_bloch(&b) - gmqd_svd(&b)).abs(),
            (gmqd_xstate(&x) - gmqd_bloch(&b)).abs(),
            eig,
            (closed.iter().sum::<f64>() - 1.0).abs(),
            (general - concurrence_xstate(&x)).abs(),
        ]
    });
    let max = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, nan_max);
    let report = FormulaEquivalence {
        samples: n as u64,
        bloch_vs_svd: max(0),
        xstate_vs_bloch: max(1),
        eigenvalues: max(2),
        eigenvalue_sum: max(3),
        concurrence: max(4),
        tol,
        passed: false,
    };
    let passed = [
        report.bloch_vs_svd,
        report.xstate_vs_bloch,
        report.eigenvalues,
        report.concurrence,
    ]
    .iter()
    .all(|&d| d <= tol)
        && report.eigenvalue_sum <= 1e-12;
    FormulaEquivalence { passed, ..report }
}

/// Propagates NaN so a broken sample cannot hide behind `f64::max`.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleDeviation {
    pub kind: ChannelKind,
    pub samples: u64,
    /// Max entrywise difference between transfer-matrix and Kraus evolution
    /// of the Bloch data.
    pub max_deviation: f64,
    /// Min eigenvalue over the Kraus outputs.
    pub min_output_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEquivalence {
    pub channels: Vec<OracleDeviation>,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the Heisenberg-picture evolution against the Kraus oracle on
/// random general two-qubit states, applying the same channel kind to both
/// qubits with independent random strengths.
pub fn channel_oracle_equivalence(
    n: usize,
    seed: u64,
    tol: f64,
    exec: Execution,
) -> Result<OracleEquivalence> {
    let mut channels = Vec::new();
    for kind in ChannelKind::ALL {
        let rows = exec.map(n, |i| -> Result<(f64, f64)> {
            let rho = sample_general_state(seed, i as u64);
            let mut rng = stream_rng(seed, 4, i as u64);
            let (p, q): (f64, f64) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            let heisenberg = evolve_bloch(&rho.to_bloch(), &kind.transfer(p)?, &kind.transfer(q)?);
            let out = kraus_apply(&rho, &kind.kraus(p)?, &kind.kraus(q)?);
            Ok((
                bloch_distance(&heisenberg, &out.to_bloch()),
                out.min_eigenvalue(),
            ))
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        channels.push(OracleDeviation {
            kind,
            samples: n as u64,
            max_deviation: rows.iter().map(|r| r.0).fold(0.0, nan_max),
            min_output_eigenvalue: rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        });
    }
    let passed = channels
        .iter()
        .all(|c| c.max_deviation <= tol && c.min_output_eigenvalue >= -PSD_TOL);
    Ok(OracleEquivalence {
        channels,
        tol,
        passed,
    })
}

pub fn bloch_distance(a: &BlochState, b: &BlochState) -> f64 {
    (a.x - b.x)
        .amax()
        .max((a.y - b.y).amax())
        .max((a.corr - b.corr).amax())
}

/// Largest disagreement between each closed-form dynamics expression and the
/// generic transfer-matrix pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormEquivalence {
    pub samples: u64,
    pub grid_points: u64,
    pub pdc: f64,
    pub dpc: f64,
    pub pdc_dpc: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn closed_form_equivalence(
    n: usize,
    seed: u64,
    grid: &[f64],
    tol: f64,
    exec: Execution,
) -> Result<ClosedFormEquivalence> {
    let transfers = grid
        .iter()
        .map(|&p| {
            Ok((
                p,
                ChannelKind::Pdc.transfer(p)?,
                ChannelKind::Dpc.transfer(p)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = exec.map(n, |i| {
        let x = sample_state(seed, Ensemble::XStates, i as u64);
        let b = x.to_bloch();
        let mut worst = [0.0f64; 3];
        for (p, pdc, dpc) in &transfers {
            let pipeline =
                |a: &ChannelTransfer, c: &ChannelTransfer| gmqd_svd(&evolve_bloch(&b, a, c));
            worst[0] = nan_max(
                worst[0],
                (gmqd_pdc_closed(&x, *p) - pipeline(pdc, pdc)).abs(),
            );
            worst[1] = nan_max(
                worst[1],
                (gmqd_dpc_closed(&x, *p) - pipeline(dpc, dpc)).abs(),
            );
            worst[2] = nan_max(
                worst[2],
                (gmqd_pdc_dpc_closed(&x, *p) - pipeline(pdc, dpc)).abs(),
            );
        }
        worst
    });
    let max = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, nan_max);
    let (pdc, dpc, pdc_dpc) = (max(0), max(1), max(2));
    Ok(ClosedFormEquivalence {
        samples: n as u64,
        grid_points: grid.len() as u64,
        pdc,
        dpc,
        pdc_dpc,
        tol,
        passed: pdc <= tol && dpc <= tol && pdc_dpc <= tol,
    })
}
