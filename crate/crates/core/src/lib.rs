//! Geometric measure of quantum discord (GMQD) for two-qubit states, with
//! emphasis on X-states under local decoherence.
//!
//! * [`state`]: Bloch and density-matrix representations, X-state parameters.
//! * [`correlations`]: GMQD through the Bloch, SVD and X-state routes; concurrence.
//! * [`channels`]: phase damping, depolarizing and amplitude damping channels.
//! * [`factorization`]: the Bell-state factorization bound and frozen discord.
//! * [`verify`]: seeded Monte-Carlo verification and equivalence suites.
//! * [`geometry`]: level surfaces of the measures over the correlation cube.
//! * [`cli`]: the `gmqd` command-line tool.

pub mod channels;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod factorization;
pub mod geometry;
mod linalg;
pub mod par;
pub mod state;
pub mod verify;

pub use channels::{ChannelKind, ChannelTransfer, KrausChannel};
pub use correlations::{
    concurrence, concurrence_xstate, gmqd_bloch, gmqd_svd, gmqd_xstate, ExpectationMatrix,
};
pub use error::{Error, Result};
pub use factorization::{
    factorization_bound, frozen_threshold, FactorizationBound, FrozenThreshold,
};
pub use linalg::C64;
pub use par::Execution;
pub use state::{BellLabel, BlochState, DensityMatrix, XStateParams};
