//! Numerical tolerances and search settings shared by all modules.

use serde::{Deserialize, Serialize};

/// Settings threaded through every computation.
///
/// All randomized searches derive their generator from `seed`, so two calls
/// with equal configurations return identical values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Master seed for multi-start searches.
    pub seed: u64,
    /// Random starts for a four-dimensional domain; scaled linearly with the
    /// domain dimension.
    pub starts: usize,
    /// Iteration cap for a single power-iteration start.
    pub max_iter: usize,
    /// Unit-norm and norming-functional normalization tolerance.
    pub tau_dual: f64,
    /// Relative tolerance for argmax ties and zero coordinates.
    pub tau_cluster: f64,
    /// Slack allowed between a witness value and the reported norm.
    pub tau_norm: f64,
    /// Slack for membership in a norm attainment set.
    pub tau_attain: f64,
    /// Two maximizers closer than this (up to a unimodular factor) are one orbit.
    pub delta_sep: f64,
    /// Birkhoff-James decision threshold on `dist - norm`.
    pub tau_bj: f64,
    /// Certificate norming and annihilation tolerance.
    pub tau_cert: f64,
    /// Component-norm tie tolerance in the sup-norm derivative formula.
    pub tau_tie: f64,
    /// Use the closed-form shortcuts available for outer exponent infinity
    /// (tuple norm as the component maximum, distance as the maximum of
    /// component distances). Disable to force the generic search.
    pub infty_fast_path: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            starts: 64,
            max_iter: 600,
            tau_dual: 1e-9,
            tau_cluster: 1e-7,
            tau_norm: 1e-7,
            tau_attain: 1e-7,
            delta_sep: 1e-4,
            tau_bj: 1e-6,
            tau_cert: 1e-6,
            tau_tie: 1e-7,
            infty_fast_path: true,
        }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// Random starts used for a domain of dimension `dim`.
    pub fn starts_for_dim(&self, dim: usize) -> usize {
        (self.starts * dim / 4).clamp(16.min(self.starts.max(1)), 2 * self.starts.max(1))
    }

    pub fn generic(&self) -> Self {
        Self { infty_fast_path: false, ..self.clone() }
    }
}
