//! Block matrices built from correlation tensors, their trace norms, and the
//! separability bounds they are compared against.
//!
//! For a bipartition `L|R` the block matrix `N` has one row per Weyl multi-index
//! of `L` and one column per Weyl multi-index of `R`. Product states across
//! `L|R` have `N = Σ_s p_s u_s v_sᵗ`, so `‖N‖_tr` is capped by the product of
//! the largest possible factor norms. A state whose smallest `‖N‖_tr` over all
//! bipartitions exceeds the largest cap cannot be biseparable, given the
//! coherence assumption recorded in every report's caveats.

mod bipartition;
mod bounds;
mod matrices;
mod verdict;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use bipartition::Bipartition;
pub use bounds::{
    bipartition_bound, correlation_norm_bound, multipartite_threshold, pair_norm_bound,
    product_dominates_square, tripartite_bipartition_bound, tripartite_bound, tripartite_threshold,
    uniform_threshold, uniform_threshold_for, BoundValue,
};
pub use matrices::{block_matrix, matricize, multipartite_block, trace_norm, tripartite_block};
pub use verdict::{
    biseparable_bound_check, gme_verdict, gme_verdict_from_tensor, t_score, t_score_from_tensor,
    BipartitionRecord, BoundCheck, CriterionReport, STANDING_ASSUMPTION,
};

use crate::{Error, Result};

/// Where the `β` block `S^{i|k}` sits inside a tripartite `N^{i|jk}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Columns immediately after the `α` block.
    #[default]
    Disjoint,
    /// The leading columns, overlapping the `α` block.
    LeadingOverlap,
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" => Ok(Placement::Disjoint),
            "leading-overlap" => Ok(Placement::LeadingOverlap),
            other => Err(Error::UnsupportedState(format!(
                "unknown placement {other:?} (expected disjoint or leading-overlap)"
            ))),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Disjoint => "disjoint",
            Placement::LeadingOverlap => "leading-overlap",
        })
    }
}

/// Weights of the blocks that make up `N`.
///
/// Tripartite: `N^{i|jk} = α [S^{i|j} 0] + β S^{i|k} + γ S^{i|jk}`.
/// Multipartite: `N^{L|R} = α [S^{L|c} 0] + β S^{L|R}` with `c ∈ R` the
/// column party (`gamma` is unused).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriterionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub placement: Placement,
    /// Column party of the multipartite `α` block; defaults to the smallest
    /// party on the right.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_party: Option<usize>,
}

impl Default for CriterionParams {
    fn default() -> Self {
        CriterionParams::new(1.0, 1.0, 1.0)
    }
}

impl CriterionParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        CriterionParams {
            alpha,
            beta,
            gamma,
            placement: Placement::Disjoint,
            column_party: None,
        }
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_column_party(mut self, party: usize) -> Self {
        self.column_party = Some(party);
        self
    }

    pub(crate) fn column_party_for(&self, bip: &Bipartition) -> Result<usize> {
        match self.column_party {
            None => Ok(bip.right()[0]),
            Some(c) if bip.right().contains(&c) => Ok(c),
            Some(c) => Err(Error::InvalidBipartition(format!(
                "column party {} is not on the right of {bip}",
                c + 1
            ))),
        }
    }
}

impl fmt::Display for CriterionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} beta={} gamma={}",
            self.alpha, self.beta, self.gamma
        )
    }
}
