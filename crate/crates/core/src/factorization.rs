//! Factorization bound relating evolved and initial discord, and the
//! frozen-discord threshold under phase damping.

use serde::Serialize;

use crate::channels::{evolved_gmqd, ChannelKind, ChannelTransfer};
use crate::correlations::gmqd_xstate;
use crate::state::{bell_state, BellLabel, XStateParams};

/// `2·D[(A⊗B)|β⟩⟨β|]` over the four Bell vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellFactor {
    /// Minimum over the vertices; this is the factor used in the bound.
    pub value: f64,
    /// Max minus min over the vertices.
    pub spread: f64,
}

pub fn bell_factor(a: &ChannelTransfer, b: &ChannelTransfer) -> BellFactor {
    let values =
        BellLabel::ALL.map(|label| 2.0 * evolved_gmqd(&bell_state(label).to_bloch(), a, b));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    BellFactor {
        value: min,
        spread: max - min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationBound {
    /// Discord of the evolved state.
    pub lhs: f64,
    /// Bell factor times the initial discord.
    pub rhs: f64,
    pub bell_factor: BellFactor,
    pub initial: f64,
}

impl FactorizationBound {
    pub fn gap(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub(crate) fn with_factor(
        state: &XStateParams,
        factor: BellFactor,
        a: &ChannelTransfer,
        b: &ChannelTransfer,
    ) -> Self {
        let initial = gmqd_xstate(state);
        Self {
            lhs: evolved_gmqd(&state.to_bloch(), a, b),
            rhs: factor.value * initial,
            bell_factor: factor,
            initial,
        }
    }
}

/// Evaluates both sides of `D[(A⊗B)ρ] ≥ 2·D[(A⊗B)|β⟩⟨β|]·D[ρ]`.
pub fn factorization_bound(
    state: &XStateParams,
    a: &ChannelTransfer,
    b: &ChannelTransfer,
) -> FactorizationBound {
    FactorizationBound::with_factor(state, bell_factor(a, b), a, b)
}

/// States for which the bound is tight under two identical phase-damping
/// channels: `r² + c3² ≥ max(c1², c2²)`.
pub fn is_tight_under_dephasing(state: &XStateParams) -> bool {
    let longitudinal = state.r * state.r + state.c3 * state.c3;
    longitudinal >= state.c1 * state.c1 && longitudinal >= state.c2 * state.c2
}

/// Whether the bound is a proven statement for this channel pair
/// (phase damping, depolarizing or identity on each side).
pub fn bound_is_proven(a: ChannelKind, b: ChannelKind) -> bool {
    a != ChannelKind::Adc && b != ChannelKind::Adc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrozenThreshold {
    /// Dephasing strength at which the plateau ends, `(1−p1)⁴·c² = r² + c3²`.
    pub p1: f64,
    /// Constant discord on `[0, p1)`, equal to `(r² + c3²)/4`.
    pub plateau_value: f64,
}

/// Detects the frozen-discord regime: one of `c1, c2` is zero and the other
/// satisfies `c² > r² + c3²`. Returns `None` otherwise.
///
/// When `r = c3 = 0` the threshold degenerates to `p1 = 1` with a zero plateau.
pub fn frozen_threshold(state: &XStateParams) -> Option<FrozenThreshold> {
    let longitudinal = state.r * state.r + state.c3 * state.c3;
    let transverse = if state.c1 == 0.0 {
        state.c2 * state.c2
    } else if state.c2 == 0.0 {
        state.c1 * state.c1
    } else {
        return None;
    };
    if transverse <= longitudinal {
        return None;
    }
    Some(FrozenThreshold {
        p1: 1.0 - (longitudinal / transverse).powf(0.25),
        plateau_value: 0.25 * longitudinal,
    })
}
