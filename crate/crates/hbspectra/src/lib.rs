//! Heat-bath Markov chains on finite state spaces: exact construction from
//! partition specifications, spectral certification (no negative eigenvalues),
//! canonical forms for stochastic idempotent matrices, and the lifted-chain
//! transfer machinery behind Swendsen-Wang dynamics.
//!
//! All structural decisions (stochasticity, idempotence, detailed balance,
//! zero columns) are made in exact rational arithmetic; floating point is
//! used only for eigenvalues. The intended scale is dense matrices up to a
//! few thousand states.
//!
//! Module map:
//!
//! - [`matrix`] - exact-rational dense matrices, state spaces, stochasticity
//!   and reachability primitives, matrix CSV I/O.
//! - [`heatbath`] - the heat-bath chain abstraction: partition specs, label
//!   kernels, chain assembly, and reconstruction from kernel lists.
//! - [`spectral`] - symmetrization, Jacobi eigenvalues, positive
//!   semidefiniteness certificates, mixing-time bounds.
//! - [`sicanon`] - stochastic idempotent (SI) matrix classification,
//!   canonical decomposition, and finite-convergence analysis.
//! - [`transfer`] - adjoints and the lifted composition `R T R*`.
//! - [`models`] - spin systems, contingency tables, Swendsen-Wang.
//! - [`simulate`] - seeded trajectory simulation and total-variation checks.
//! - [`zoo`] - small named instances used by tests and examples.
//! - [`cli`] - the `hbspectra` command-line front end.
//!
//! Start with the `examples/` directory; each example is a runnable tour of
//! one capability.

pub mod cli;
pub mod heatbath;
pub mod matrix;
pub mod models;
pub mod rat;
pub mod sicanon;
pub mod simulate;
pub mod spectral;
pub mod transfer;
pub mod zoo;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not stochastic: {0}")]
    NotStochastic(String),
    #[error("not reversible: {0}")]
    NotReversible(String),
    #[error("not a stochastic idempotent matrix: {0}")]
    NotSi(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid heat-bath spec:\n{0}")]
    InvalidSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("state-space cap exceeded: {0}")]
    CapExceeded(String),
    #[error("mixing bound unavailable: {0}")]
    MixingBound(String),
    #[error("kernel {index} rejected: {reason}")]
    KernelRejected { index: usize, reason: String },
    #[error("property falsified: {0}")]
    Falsified(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("eigensolver did not converge within the sweep cap")]
    EigenNotConverged,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use heatbath::{build_chain, build_label_kernel, reconstruct_spec, validate_spec, HeatBathSpec};
pub use matrix::{
    check_reversible, check_stochastic, communicating_structure, lazify, zero_columns, RatMatrix,
    StateSpace, StochasticMatrix, TargetDistribution,
};
pub use rat::Rat;
pub use sicanon::{
    is_idempotent, reversible_settles_implies_idempotent, reversible_si_equivalence, settle_analysis,
    si_classify, si_decompose, SiDecomposition,
};
pub use spectral::{certify_psd, eigenvalues_symmetric, mixing_time_bound, symmetrize, SpectralReport};
pub use transfer::{adjoint, compose_transfer, verify_transfer_conditions};
