//! Local single-qubit decoherence channels.
//!
//! Channels act on the expectation matrix in the Heisenberg picture,
//! `𝓡 ↦ M_A 𝓡 M_Bᵀ`, where each 4×4 transfer matrix maps `(1, Bloch vector)`
//! of one qubit. A Kraus representation of every channel is kept alongside as
//! an independent Schrödinger-picture oracle.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::correlations::{expectation_matrix, gmqd_from_truncated, ExpectationMatrix};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, C64, ONE, ZERO};
use crate::state::{BlochState, DensityMatrix, XStateParams};

const KRAUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Phase damping.
    Pdc,
    /// Depolarizing.
    Dpc,
    /// Amplitude damping towards `|0⟩`.
    Adc,
    #[serde(rename = "id")]
    Identity,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::Pdc,
        ChannelKind::Dpc,
        ChannelKind::Adc,
        ChannelKind::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Pdc => "pdc",
            ChannelKind::Dpc => "dpc",
            ChannelKind::Adc => "adc",
            ChannelKind::Identity => "id",
        }
    }

    pub fn transfer(self, p: f64) -> Result<ChannelTransfer> {
        match self {
            ChannelKind::Pdc => pdc_transfer(p),
            ChannelKind::Dpc => dpc_transfer(p),
            ChannelKind::Adc => adc_transfer(p),
            ChannelKind::Identity => Ok(ChannelTransfer::identity()),
        }
    }

    pub fn kraus(self, p: f64) -> Result<KrausChannel> {
        match self {
            ChannelKind::Pdc => KrausChannel::pdc(p),
            ChannelKind::Dpc => KrausChannel::dpc(p),
            ChannelKind::Adc => KrausChannel::adc(p),
            ChannelKind::Identity => Ok(KrausChannel::identity()),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pdc" => Ok(ChannelKind::Pdc),
            "dpc" => Ok(ChannelKind::Dpc),
            "adc" => Ok(ChannelKind::Adc),
            "id" | "i" | "identity" => Ok(ChannelKind::Identity),
            other => Err(Error::InvalidConfig(format!(
                "unknown channel kind '{other}' (expected pdc, dpc, adc or id)"
            ))),
        }
    }
}

/// Heisenberg-picture transfer matrix of a single-qubit channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTransfer {
    pub kind: ChannelKind,
    pub p: f64,
    pub matrix: Matrix4<f64>,
}

impl ChannelTransfer {
    pub fn identity() -> Self {
        Self {
            kind: ChannelKind::Identity,
            p: 0.0,
            matrix: Matrix4::identity(),
        }
    }

    /// Image of a single-qubit Bloch vector.
    pub fn apply_bloch(&self, v: &nalgebra::Vector3<f64>) -> nalgebra::Vector3<f64> {
        let image = self.matrix * nalgebra::Vector4::new(1.0, v[0], v[1], v[2]);
        nalgebra::Vector3::new(image[1], image[2], image[3])
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// `diag(1, 1−p, 1−p, 1)`.
pub fn pdc_transfer(p: f64) -> Result<ChannelTransfer> {
    check_probability(p)?;
    let q = 1.0 - p;
    Ok(ChannelTransfer {
        kind: ChannelKind::Pdc,
        p,
        matrix: Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, q, q, 1.0)),
    })
}

/// `diag(1, 1−p, 1−p, 1−p)`.
pub fn dpc_transfer(p: f64) -> Result<ChannelTransfer> {
    check_probability(p)?;
    let q = 1.0 - p;
    Ok(ChannelTransfer {
        kind: ChannelKind::Dpc,
        p,
        matrix: Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, q, q, q)),
    })
}

/// Amplitude damping: `diag(1, √(1−p), √(1−p), 1−p)` with the affine shift
/// `z ↦ p + (1−p)z` carried in entry `(3, 0)`.
pub fn adc_transfer(p: f64) -> Result<ChannelTransfer> {
    check_probability(p)?;
    let q = 1.0 - p;
    let mut matrix = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, q.sqrt(), q.sqrt(), q));
    matrix[(3, 0)] = p;
    Ok(ChannelTransfer {
        kind: ChannelKind::Adc,
        p,
        matrix,
    })
}

/// `𝓡 ↦ M_A 𝓡 M_Bᵀ`.
pub fn apply_local_channels(
    e: &ExpectationMatrix,
    a: &ChannelTransfer,
    b: &ChannelTransfer,
) -> ExpectationMatrix {
    ExpectationMatrix::from_matrix(a.matrix * e.matrix() * b.matrix.transpose())
}

/// Geometric discord of `b` after the local channels `a ⊗ b_channel`, computed
/// through the generic transfer-matrix pipeline.
pub fn evolved_gmqd(state: &BlochState, a: &ChannelTransfer, b: &ChannelTransfer) -> f64 {
    let evolved = apply_local_channels(&expectation_matrix(state), a, b);
    gmqd_from_truncated(&evolved.truncated())
}

pub fn evolve_bloch(state: &BlochState, a: &ChannelTransfer, b: &ChannelTransfer) -> BlochState {
    apply_local_channels(&expectation_matrix(state), a, b).to_bloch()
}

/// Single-qubit channel in operator-sum form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<Matrix2<C64>>,
}

impl KrausChannel {
    /// Validates `Σ Kᵢ†Kᵢ = I` within 1e−12.
    pub fn new(ops: Vec<Matrix2<C64>>) -> Result<Self> {
        let sum = ops
            .iter()
            .fold(Matrix2::<C64>::zeros(), |acc, k| acc + k.adjoint() * k);
        let deviation = (sum - pauli(0))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if ops.is_empty() || deviation > KRAUS_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(Self { ops })
    }

    pub fn operators(&self) -> &[Matrix2<C64>] {
        &self.ops
    }

    pub fn identity() -> Self {
        Self {
            ops: vec![pauli(0)],
        }
    }

    /// `{√(1−p/2)·I, √(p/2)·σ₃}`.
    pub fn pdc(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(vec![
            pauli(0) * C64::from((1.0 - 0.5 * p).sqrt()),
            pauli(3) * C64::from((0.5 * p).sqrt()),
        ])
    }

    /// `{√(1−3p/4)·I, √(p/4)·σ₁, √(p/4)·σ₂, √(p/4)·σ₃}`.
    pub fn dpc(p: f64) -> Result<Self> {
        check_probability(p)?;
        let w = C64::from((0.25 * p).sqrt());
        Self::new(vec![
            pauli(0) * C64::from((1.0 - 0.75 * p).sqrt()),
            pauli(1) * w,
            pauli(2) * w,
            pauli(3) * w,
        ])
    }

    /// `K₀ = diag(1, √(1−p))`, `K₁ = √p·|0⟩⟨1|`.
    pub fn adc(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(vec![
            Matrix2::new(ONE, ZERO, ZERO, C64::from((1.0 - p).sqrt())),
            Matrix2::new(ZERO, C64::from(p.sqrt()), ZERO, ZERO),
        ])
    }
}

/// `Σᵢⱼ (Kᵢ⊗Lⱼ) ρ (Kᵢ⊗Lⱼ)†`.
pub fn kraus_apply(rho: &DensityMatrix, a: &KrausChannel, b: &KrausChannel) -> DensityMatrix {
    let m = rho.matrix();
    let mut out = Matrix4::<C64>::zeros();
    for ka in a.operators() {
        for kb in b.operators() {
            let k = kron(ka, kb);
            out += k * m * k.adjoint();
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// `p = 1 − e^{−γt}`.
pub fn p_from_time(gamma: f64, t: f64) -> Result<f64> {
    if !(gamma >= 0.0 && t >= 0.0) {
        return Err(Error::NegativeTime { gamma, t });
    }
    Ok(-(-gamma * t).exp_m1())
}

fn closed_form(coefficients: [f64; 3]) -> f64 {
    let [a, b, c] = coefficients;
    0.25 * (a + b + c - a.max(b).max(c))
}

/// Closed-form discord of an X-state after two identical phase-damping channels.
pub fn gmqd_pdc_closed(state: &XStateParams, p: f64) -> f64 {
    let q4 = (1.0 - p).powi(4);
    closed_form([
        q4 * state.c1 * state.c1,
        q4 * state.c2 * state.c2,
        state.r * state.r + state.c3 * state.c3,
    ])
}

/// Closed-form discord of an X-state after two identical depolarizing channels.
pub fn gmqd_dpc_closed(state: &XStateParams, p: f64) -> f64 {
    let q2 = (1.0 - p).powi(2);
    let q4 = q2 * q2;
    closed_form([
        q4 * state.c1 * state.c1,
        q4 * state.c2 * state.c2,
        q2 * state.r * state.r + q4 * state.c3 * state.c3,
    ])
}

/// Closed-form discord with phase damping on qubit A and depolarizing on qubit B.
pub fn gmqd_pdc_dpc_closed(state: &XStateParams, p: f64) -> f64 {
    let q2 = (1.0 - p).powi(2);
    let q4 = q2 * q2;
    closed_form([
        q4 * state.c1 * state.c1,
        q4 * state.c2 * state.c2,
        state.r * state.r + q2 * state.c3 * state.c3,
    ])
}
