//! Depth-bounded reachability, agent utilities and edge classification.
//!
//! An agent's utility is the number of agents it reaches within the
//! horizon along complete speaking hops, plus the number it reaches along
//! complete listening hops, minus the cost of the edges it pays for. Edge
//! status compares the owner's utility with and without the edge, using
//! strict inequalities; ties are neutral.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, BidirectedGraph, EdgeRef, Layer, Mode};
use crate::params::{Horizon, ModelParams, Rational};

/// Vertices reached from `v` (excluding `v`) within `horizon` complete hops
/// in `direction`, as a membership vector.
pub fn reach_mask(g: &BidirectedGraph, horizon: Horizon, direction: Layer, v: AgentId) -> Vec<bool> {
    let n = g.n();
    let limit = horizon.depth_limit().unwrap_or(usize::MAX);
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut frontier = VecDeque::from([(v, 0usize)]);
    while let Some((u, depth)) = frontier.pop_front() {
        if depth == limit {
            continue;
        }
        for w in g.hop_successors(direction, u) {
            if !seen[w] {
                seen[w] = true;
                frontier.push_back((w, depth + 1));
            }
        }
    }
    seen[v] = false;
    seen
}

pub fn reach_count(g: &BidirectedGraph, horizon: Horizon, direction: Layer, v: AgentId) -> usize {
    reach_mask(g, horizon, direction, v).into_iter().filter(|&b| b).count()
}

/// `R^s(v)` or `R^l(v)` for the given horizon.
pub fn reach_set(g: &BidirectedGraph, horizon: Horizon, direction: Layer, v: AgentId) -> Result<BTreeSet<AgentId>> {
    g.check_vertex(v)?;
    Ok(reach_mask(g, horizon, direction, v).into_iter().enumerate().filter_map(|(u, b)| b.then_some(u)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtilityBreakdown {
    pub speak_reach: usize,
    pub listen_reach: usize,
    pub ds_out: usize,
    pub dl_out: usize,
    #[serde(with = "crate::params::serde_rational")]
    pub u_speak: Rational,
    #[serde(with = "crate::params::serde_rational")]
    pub u_listen: Rational,
    #[serde(with = "crate::params::serde_rational")]
    pub u_total: Rational,
}

fn int(x: usize) -> Rational {
    Rational::from_integer(x as i64)
}

/// Utility of `v`. Directed mode only has the speaking part.
pub fn utility(g: &BidirectedGraph, p: &ModelParams, v: AgentId) -> Result<UtilityBreakdown> {
    p.check_mode(g.mode())?;
    g.check_vertex(v)?;
    Ok(utility_unchecked(g, p, v))
}

pub(crate) fn utility_unchecked(g: &BidirectedGraph, p: &ModelParams, v: AgentId) -> UtilityBreakdown {
    let speak_reach = reach_count(g, p.horizon, Layer::Speaking, v);
    let ds_out = g.out_degree(Layer::Speaking, v);
    let (listen_reach, dl_out) = match g.mode() {
        Mode::Directed => (0, 0),
        Mode::Bidirected => (reach_count(g, p.horizon, Layer::Listening, v), g.out_degree(Layer::Listening, v)),
    };
    let u_speak = int(speak_reach) - p.c_speak * int(ds_out);
    let u_listen = int(listen_reach) - p.c_listen * int(dl_out);
    UtilityBreakdown { speak_reach, listen_reach, ds_out, dl_out, u_speak, u_listen, u_total: u_speak + u_listen }
}

pub(crate) fn total_utility(g: &BidirectedGraph, p: &ModelParams, v: AgentId) -> Rational {
    utility_unchecked(g, p, v).u_total
}

/// Every agent's total utility.
pub fn utilities(g: &BidirectedGraph, p: &ModelParams) -> Result<Vec<Rational>> {
    p.check_mode(g.mode())?;
    Ok((0..g.n()).map(|v| total_utility(g, p, v)).collect())
}

/// Social welfare: the sum of all utilities.
pub fn welfare(g: &BidirectedGraph, p: &ModelParams) -> Result<Rational> {
    Ok(utilities(g, p)?.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeStatus {
    Addable,
    Removable,
    NeutralPresent,
    NeutralAbsent,
}

impl EdgeStatus {
    /// Whether the edge dynamics would toggle this edge.
    pub fn is_move(self) -> bool {
        matches!(self, EdgeStatus::Addable | EdgeStatus::Removable)
    }
}

/// Status of `e` given its owner's current utility `base`.
fn status_against(g: &BidirectedGraph, p: &ModelParams, e: EdgeRef, base: Rational) -> EdgeStatus {
    let present = g.has_edge(e);
    let mut toggled = g.clone();
    // `e` was validated by the caller.
    if present {
        toggled.remove_edge(e).expect("validated edge");
    } else {
        toggled.add_edge(e).expect("validated edge");
    }
    let after = total_utility(&toggled, p, e.tail);
    match (present, after > base) {
        (true, true) => EdgeStatus::Removable,
        (true, false) => EdgeStatus::NeutralPresent,
        (false, true) => EdgeStatus::Addable,
        (false, false) => EdgeStatus::NeutralAbsent,
    }
}

pub fn edge_status(g: &BidirectedGraph, p: &ModelParams, e: EdgeRef) -> Result<EdgeStatus> {
    p.check_mode(g.mode())?;
    g.check_mutable(e)?;
    Ok(status_against(g, p, e, total_utility(g, p, e.tail)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClassification {
    pub addable: Vec<EdgeRef>,
    pub removable: Vec<EdgeRef>,
}

impl EdgeClassification {
    pub fn is_empty(&self) -> bool {
        self.addable.is_empty() && self.removable.is_empty()
    }
}

/// Status of every potential edge, visited in `EdgeRef` order.
fn for_each_status(g: &BidirectedGraph, p: &ModelParams, mut visit: impl FnMut(EdgeRef, EdgeStatus) -> bool) {
    let base: Vec<Rational> = (0..g.n()).map(|v| total_utility(g, p, v)).collect();
    for e in g.potential_edges() {
        if !visit(e, status_against(g, p, e, base[e.tail])) {
            return;
        }
    }
}

/// Addable and removable edges over the whole potential-edge space.
pub fn classify_all(g: &BidirectedGraph, p: &ModelParams) -> Result<EdgeClassification> {
    p.check_mode(g.mode())?;
    let mut out = EdgeClassification::default();
    for_each_status(g, p, |e, status| {
        match status {
            EdgeStatus::Addable => out.addable.push(e),
            EdgeStatus::Removable => out.removable.push(e),
            _ => {}
        }
        true
    });
    Ok(out)
}

/// First addable or removable edge in `EdgeRef` order, if any.
pub fn first_move(g: &BidirectedGraph, p: &ModelParams) -> Result<Option<(EdgeRef, EdgeStatus)>> {
    p.check_mode(g.mode())?;
    let mut found = None;
    for_each_status(g, p, |e, status| {
        if status.is_move() {
            found = Some((e, status));
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Complete edges plus edges, both layers; bidirected mode only.
pub fn potential(g: &BidirectedGraph) -> Result<usize> {
    if g.mode() != Mode::Bidirected {
        return Err(Error::ModeMismatch { expected: Mode::Bidirected, actual: g.mode() });
    }
    Ok(g.complete_edge_count() + g.edge_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_cycle, make_empty};
    use crate::params::ratio;

    fn digraph(n: usize, arcs: &[(usize, usize)]) -> BidirectedGraph {
        let mut g = BidirectedGraph::new(n, Mode::Directed).unwrap();
        for &(u, v) in arcs {
            g.add_edge(EdgeRef::speaking(u, v)).unwrap();
        }
        g
    }

    fn bigraph(n: usize, edges: &[EdgeRef]) -> BidirectedGraph {
        let mut g = BidirectedGraph::new(n, Mode::Bidirected).unwrap();
        for &e in edges {
            g.add_edge(e).unwrap();
        }
        g
    }

    fn s(u: usize, v: usize) -> EdgeRef {
        EdgeRef::speaking(u, v)
    }

    fn l(u: usize, v: usize) -> EdgeRef {
        EdgeRef::listening(u, v)
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn reach_on_bidirected_path() {
        let g = bigraph(3, &[s(0, 1), l(1, 0), s(1, 2), l(2, 1)]);
        assert_eq!(reach_set(&g, Horizon::Finite(1), Layer::Speaking, 0).unwrap(), set(&[1]));
        assert_eq!(reach_set(&g, Horizon::Finite(2), Layer::Speaking, 0).unwrap(), set(&[1, 2]));
        assert_eq!(reach_set(&g, Horizon::Finite(2), Layer::Listening, 2).unwrap(), set(&[0, 1]));
    }

    #[test]
    fn missing_backward_listening_blocks_reach() {
        let g = bigraph(3, &[s(0, 1), s(1, 2), l(2, 1)]);
        for k in [Horizon::Finite(1), Horizon::Finite(5), Horizon::Infinite] {
            assert!(reach_set(&g, k, Layer::Speaking, 0).unwrap().is_empty());
        }
        assert!(reach_set(&g, Horizon::Infinite, Layer::Speaking, 3).is_err());
    }

    #[test]
    fn directed_five_cycle_utility() {
        let g = make_cycle(5, Mode::Directed).unwrap();
        let p = ModelParams::directed(ratio(1, 1), Horizon::Infinite).unwrap();
        for v in 0..5 {
            let u = utility(&g, &p, v).unwrap();
            assert_eq!((u.speak_reach, u.ds_out), (4, 1));
            assert_eq!(u.u_total, ratio(3, 1));
            assert_eq!((u.listen_reach, u.dl_out), (0, 0));
        }
        assert_eq!(welfare(&g, &p).unwrap(), ratio(15, 1));
    }

    #[test]
    fn empty_graph_utility_is_zero() {
        let g = make_empty(4, Mode::Bidirected).unwrap();
        let p = ModelParams::uniform(ratio(3, 2), Horizon::Finite(2)).unwrap();
        let u = utility(&g, &p, 2).unwrap();
        assert_eq!(u.u_total, ratio(0, 1));
        assert_eq!(u.speak_reach + u.listen_reach + u.ds_out + u.dl_out, 0);
        assert_eq!(welfare(&g, &p).unwrap(), ratio(0, 1));
    }

    #[test]
    fn bidirected_four_cycle_utility() {
        let g = make_cycle(4, Mode::Bidirected).unwrap();
        let p = ModelParams::uniform(ratio(1, 1), Horizon::Infinite).unwrap();
        let u = utility(&g, &p, 0).unwrap();
        assert_eq!(u.u_speak, ratio(2, 1));
        assert_eq!(u.u_listen, ratio(2, 1));
        assert_eq!(u.u_total, ratio(4, 1));
    }

    #[test]
    fn utility_rejects_listening_cost_in_directed_mode() {
        let g = make_cycle(3, Mode::Directed).unwrap();
        let p = ModelParams::uniform(ratio(1, 1), Horizon::Infinite).unwrap();
        assert!(utility(&g, &p, 0).is_err());
    }

    #[test]
    fn edge_status_cases() {
        let half = ModelParams::directed(ratio(1, 2), Horizon::Infinite).unwrap();
        let one = ModelParams::directed(ratio(1, 1), Horizon::Infinite).unwrap();
        let empty = make_empty(3, Mode::Directed).unwrap();
        assert_eq!(edge_status(&empty, &half, s(0, 1)).unwrap(), EdgeStatus::Addable);

        let cycle = make_cycle(3, Mode::Directed).unwrap();
        assert_eq!(edge_status(&cycle, &one, s(0, 1)).unwrap(), EdgeStatus::NeutralPresent);

        let chord = digraph(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        assert_eq!(edge_status(&chord, &half, s(0, 2)).unwrap(), EdgeStatus::Removable);

        let incomplete = bigraph(2, &[s(0, 1)]);
        let bi = ModelParams::uniform(ratio(1, 1), Horizon::Finite(2)).unwrap();
        assert_eq!(edge_status(&incomplete, &bi, s(0, 1)).unwrap(), EdgeStatus::Removable);

        assert_eq!(edge_status(&empty, &half, s(1, 1)), Err(Error::SelfLoop(1)));
        assert_eq!(edge_status(&empty, &half, l(0, 1)), Err(Error::ListeningInDirectedMode));
    }

    #[test]
    fn tie_is_neutral() {
        // Adding 0->1 on the empty graph gains exactly 1 at cost 1.
        let p = ModelParams::directed(ratio(1, 1), Horizon::Infinite).unwrap();
        let g = make_empty(2, Mode::Directed).unwrap();
        assert_eq!(edge_status(&g, &p, s(0, 1)).unwrap(), EdgeStatus::NeutralAbsent);
    }

    #[test]
    fn classify_all_cases() {
        let half = ModelParams::directed(ratio(1, 2), Horizon::Infinite).unwrap();
        let one = ModelParams::directed(ratio(1, 1), Horizon::Infinite).unwrap();
        let c = classify_all(&make_empty(3, Mode::Directed).unwrap(), &half).unwrap();
        assert_eq!(c.addable.len(), 6);
        assert!(c.removable.is_empty());

        let chord = digraph(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        let c = classify_all(&chord, &half).unwrap();
        assert_eq!(c.removable, vec![s(0, 2)]);
        assert!(c.addable.is_empty());

        assert!(classify_all(&make_cycle(3, Mode::Directed).unwrap(), &one).unwrap().is_empty());
        assert_eq!(first_move(&chord, &half).unwrap(), Some((s(0, 2), EdgeStatus::Removable)));
    }

    #[test]
    fn potential_counts() {
        assert_eq!(potential(&make_empty(3, Mode::Bidirected).unwrap()).unwrap(), 0);
        assert_eq!(potential(&make_cycle(4, Mode::Bidirected).unwrap()).unwrap(), 16);
        assert_eq!(potential(&bigraph(2, &[s(0, 1)])).unwrap(), 1);
        assert!(potential(&make_cycle(3, Mode::Directed).unwrap()).is_err());
    }
}
