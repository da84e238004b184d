//! Initial-state control of open quantum systems.
//!
//! A system whose levels are split into subspaces `H0`, `H1`, `H2` evolves
//! through a Kraus channel with `d` operators. This crate decides whether a
//! pure state prepared in `H0` can evolve without ever populating `H2`, and
//! constructs such dark states when they exist. A dark state is guaranteed
//! when `M0 > d * M2`; `d` is taken from the Choi rank of the channel, the
//! smallest Kraus count of any representation.
//!
//! Module map:
//!
//! - [`numerics`]: dense complex matrices, SVD null spaces, Hermitian
//!   propagators.
//! - [`space`]: the `H0`/`H1`/`H2` partition and basis labels.
//! - [`state`]: pure states, density matrices, partial traces, block
//!   populations.
//! - [`channel`]: Kraus channels, superoperators, Choi matrices, bath
//!   dilations.
//! - [`control`]: the `W` matrix, dimension test, dark states, feasibility
//!   reports.
//! - [`scenario`]: donor-acceptor energy transfer model.
//! - [`json`]: wire formats shared with the command-line tool.

#![forbid(unsafe_code)]

pub mod channel;
pub mod control;
pub mod error;
pub mod json;
pub mod numerics;
pub mod random;
pub mod scenario;
pub mod space;
pub mod state;

pub use channel::{DilationModel, KrausChannel, KrausKind};
pub use control::{analyze, FeasibilityReport};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, TolerancePolicy};
pub use space::{Subspace, SubspacePartition};
pub use state::{DensityMatrix, PureState};
