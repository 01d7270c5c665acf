use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{potential_edges, AgentId, BidirectedGraph, EdgeRef, Mode};
use crate::io::GraphDocument;
use crate::params::{ModelParams, Rational};
use crate::utility;

use super::stability::{
    default_strategy_budget, is_bi_pairwise_stable, is_edge_stable, is_nash_bruteforce_with_budget,
};

/// Default cap on the number of labeled graphs a census visits; covers
/// directed graphs up to n = 4 and bidirected graphs up to n = 3.
pub const DEFAULT_CENSUS_BUDGET: u128 = 1 << 12;

/// Which stability notion the census records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityNotion {
    #[default]
    Edge,
    Nash,
    BiPairwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumCensus {
    pub n: usize,
    pub mode: Mode,
    pub params: ModelParams,
    pub notion: StabilityNotion,
    pub graphs_visited: u64,
    /// Graph documents in edge-mask order.
    pub stable_graphs: Vec<GraphDocument>,
    #[serde(with = "crate::params::serde_rational")]
    pub max_welfare: Rational,
    pub efficient_graphs: Vec<GraphDocument>,
    /// Isomorphism classes among the efficient graphs.
    pub efficient_classes: usize,
    #[serde(with = "crate::params::serde_rational_opt")]
    pub min_stable_welfare: Option<Rational>,
    #[serde(with = "crate::params::serde_rational_opt")]
    pub max_stable_welfare: Option<Rational>,
    /// Worst stable welfare over the optimum; undefined when the optimum is
    /// not positive or nothing is stable.
    #[serde(with = "crate::params::serde_rational_opt")]
    pub poa: Option<Rational>,
    #[serde(with = "crate::params::serde_rational_opt")]
    pub pos: Option<Rational>,
    /// Optimum over worst stable welfare, when that is positive.
    #[serde(with = "crate::params::serde_rational_opt")]
    pub poa_inverse: Option<Rational>,
}

/// Graph whose edges are the set bits of `mask` over `edges`.
pub fn graph_from_mask(n: usize, mode: Mode, edges: &[EdgeRef], mask: u64) -> Result<BidirectedGraph> {
    let mut g = BidirectedGraph::new(n, mode)?;
    for (i, &e) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            g.add_edge(e)?;
        }
    }
    Ok(g)
}

/// Number of labeled graphs on `n` vertices in `mode`.
pub fn census_size(n: usize, mode: Mode) -> Option<u128> {
    let bits = potential_edges(n, mode).len();
    (bits < 64).then(|| 1u128 << bits)
}

fn is_stable(g: &BidirectedGraph, p: &ModelParams, notion: StabilityNotion) -> Result<bool> {
    match notion {
        StabilityNotion::Edge => is_edge_stable(g, p),
        StabilityNotion::Nash => is_nash_bruteforce_with_budget(g, p, default_strategy_budget(g.mode())),
        StabilityNotion::BiPairwise => is_bi_pairwise_stable(g, p),
    }
}

/// Visit every labeled graph on `n` vertices, recording the stable ones and
/// the welfare maximizers. Work is spread over threads; the result does not
/// depend on the thread count.
pub fn enumerate_all(
    n: usize,
    p: &ModelParams,
    mode: Mode,
    notion: StabilityNotion,
    budget: u128,
) -> Result<EquilibriumCensus> {
    p.check_mode(mode)?;
    if n == 0 {
        return Err(Error::ZeroVertices);
    }
    if notion == StabilityNotion::BiPairwise && mode != Mode::Bidirected {
        return Err(Error::ModeMismatch { expected: Mode::Bidirected, actual: mode });
    }
    let edges = potential_edges(n, mode);
    let total = census_size(n, mode).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded { what: "census graphs", required: total, budget });
    }
    let total = total as u64;

    let rows: Vec<(Rational, bool)> = (0..total)
        .into_par_iter()
        .map(|mask| {
            let g = graph_from_mask(n, mode, &edges, mask)?;
            Ok((utility::welfare(&g, p)?, is_stable(&g, p, notion)?))
        })
        .collect::<Result<_>>()?;

    let max_welfare = rows.iter().map(|r| r.0).max().expect("at least the empty graph");
    let stable: Vec<u64> = (0..total).filter(|&m| rows[m as usize].1).collect();
    let efficient: Vec<u64> = (0..total).filter(|&m| rows[m as usize].0 == max_welfare).collect();
    let stable_welfare = || stable.iter().map(|&m| rows[m as usize].0);
    let min_stable_welfare = stable_welfare().min();
    let max_stable_welfare = stable_welfare().max();
    let positive = max_welfare > Rational::zero();
    let ratio_to_max = |w: Option<Rational>| w.filter(|_| positive).map(|w| w / max_welfare);

    let graphs = |masks: &[u64]| -> Result<Vec<BidirectedGraph>> {
        masks.iter().map(|&m| graph_from_mask(n, mode, &edges, m)).collect()
    };
    let encode_all = |gs: &[BidirectedGraph]| gs.iter().map(GraphDocument::from_graph).collect();
    let efficient_graphs = graphs(&efficient)?;

    Ok(EquilibriumCensus {
        n,
        mode,
        params: *p,
        notion,
        graphs_visited: total,
        stable_graphs: encode_all(&graphs(&stable)?),
        max_welfare,
        efficient_classes: isomorphism_classes(&efficient_graphs).len(),
        efficient_graphs: encode_all(&efficient_graphs),
        min_stable_welfare,
        max_stable_welfare,
        poa: ratio_to_max(min_stable_welfare),
        pos: ratio_to_max(max_stable_welfare),
        poa_inverse: min_stable_welfare.filter(|w| positive && *w > Rational::zero()).map(|w| max_welfare / w),
    })
}

/// Lexicographically smallest edge list over all relabelings of `g`.
pub fn canonical_form(g: &BidirectedGraph) -> Vec<EdgeRef> {
    let n = g.n();
    let edges: Vec<EdgeRef> = g.edges().collect();
    (0..n)
        .permutations(n)
        .map(|perm: Vec<AgentId>| {
            let mut relabeled: Vec<EdgeRef> =
                edges.iter().map(|e| EdgeRef { layer: e.layer, tail: perm[e.tail], head: perm[e.head] }).collect();
            relabeled.sort_unstable();
            relabeled
        })
        .min()
        .unwrap_or_default()
}

pub fn are_isomorphic(a: &BidirectedGraph, b: &BidirectedGraph) -> bool {
    a.n() == b.n() && a.mode() == b.mode() && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}

/// Groups indices of `graphs` into isomorphism classes, ordered by first
/// member.
pub fn isomorphism_classes(graphs: &[BidirectedGraph]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<(usize, Mode, Vec<EdgeRef>), Vec<usize>> = BTreeMap::new();
    for (i, g) in graphs.iter().enumerate() {
        classes.entry((g.n(), g.mode(), canonical_form(g))).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort_unstable_by_key(|c| c[0]);
    out
}
