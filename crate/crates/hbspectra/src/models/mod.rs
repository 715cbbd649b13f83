//! Concrete chain families: single-site dynamics for spin systems,
//! the 2x2-subsquare chain for contingency tables, and Swendsen-Wang
//! cluster dynamics built through the lifted composition.

mod contingency;
mod graph;
mod spin;
mod swendsen_wang;

pub use contingency::{build_contingency_chain, enumerate_tables, ContingencyInstance};
pub use graph::Graph;
pub use spin::{build_spin_heatbath, SpinSystem};
pub use swendsen_wang::{build_swendsen_wang, direct_swendsen_wang, SwendsenWang};

/// Enumeration limits for model builders. Everything here is built by
/// explicit enumeration, so the caps are what keeps a typo from freezing
/// the process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    /// Maximum number of base states.
    pub max_states: usize,
    /// Maximum number of lifted states.
    pub max_lifted: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self { max_states: 20_000, max_lifted: 200_000 }
    }
}

impl EnumerationCaps {
    /// Default caps, overridden by the `HBSPECTRA_MAX_STATES` environment
    /// variable when set (the lifted cap scales with it, times ten).
    pub fn from_env() -> Self {
        match std::env::var("HBSPECTRA_MAX_STATES").ok().and_then(|v| v.parse::<usize>().ok()) {
            Some(max_states) if max_states > 0 => Self {
                max_states,
                max_lifted: max_states.saturating_mul(10),
            },
            _ => Self::default(),
        }
    }
}
