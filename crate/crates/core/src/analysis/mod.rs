//! Stability notions, brute-force oracles, exhaustive censuses and
//! generalized clustering coefficients.

mod census;
mod clustering;
mod stability;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{BidirectedGraph, Mode};
use crate::params::{ModelParams, Rational};
use crate::utility;

pub use census::{
    are_isomorphic, canonical_form, census_size, enumerate_all, graph_from_mask, isomorphism_classes,
    EquilibriumCensus, StabilityNotion, DEFAULT_CENSUS_BUDGET,
};
pub use clustering::{clustering_global, clustering_local, removable_fraction};
pub use stability::{
    best_response, default_strategy_budget, diameter, find_profitable_deviation, is_bi_pairwise_stable, is_edge_stable,
    is_nash_bruteforce, is_nash_bruteforce_with_budget, is_symmetric, strategy_space, Deviation, Strategy,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Run the exhaustive Nash check.
    pub nash: bool,
    pub strategy_budget: Option<u128>,
    pub clustering_dim: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { nash: false, strategy_budget: None, clustering_dim: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub mode: Mode,
    pub params: ModelParams,
    pub edge_stable: bool,
    /// `None` when not requested.
    pub nash_stable: Option<bool>,
    /// `None` in directed mode.
    pub bi_pairwise_stable: Option<bool>,
    #[serde(with = "crate::params::serde_rational")]
    pub welfare: Rational,
    pub symmetric: bool,
    #[serde(with = "crate::params::serde_rational_vec")]
    pub utilities: Vec<Rational>,
    #[serde(with = "crate::params::serde_rational_vec")]
    pub clustering_global: Vec<Rational>,
    /// `None` when the graph is not strongly connected.
    pub diameter: Option<usize>,
}

pub fn analyze(g: &BidirectedGraph, p: &ModelParams, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let utilities = utility::utilities(g, p)?;
    let nash_stable = if opts.nash {
        let budget = opts.strategy_budget.unwrap_or_else(|| default_strategy_budget(g.mode()));
        Some(is_nash_bruteforce_with_budget(g, p, budget)?)
    } else {
        None
    };
    Ok(AnalysisReport {
        n: g.n(),
        mode: g.mode(),
        params: *p,
        edge_stable: is_edge_stable(g, p)?,
        nash_stable,
        bi_pairwise_stable: match g.mode() {
            Mode::Bidirected => Some(is_bi_pairwise_stable(g, p)?),
            Mode::Directed => None,
        },
        welfare: utilities.iter().sum(),
        symmetric: utilities.windows(2).all(|w| w[0] == w[1]),
        utilities,
        clustering_global: clustering_global(g, opts.clustering_dim)?,
        diameter: diameter(g),
    })
}
