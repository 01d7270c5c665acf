use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, BidirectedGraph, EdgeRef, Layer, Mode};
use crate::params::{ModelParams, Rational};
use crate::utility::{self, total_utility};

/// An agent's strategy: the heads of its speaking and listening edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub speak_targets: BTreeSet<AgentId>,
    pub listen_targets: BTreeSet<AgentId>,
}

impl Strategy {
    pub fn of(g: &BidirectedGraph, v: AgentId) -> Self {
        Self {
            speak_targets: g.out_row(Layer::Speaking, v).clone(),
            listen_targets: match g.mode() {
                Mode::Bidirected => g.out_row(Layer::Listening, v).clone(),
                Mode::Directed => BTreeSet::new(),
            },
        }
    }

    pub fn size(&self) -> usize {
        self.speak_targets.len() + self.listen_targets.len()
    }

    fn tie_key(&self) -> (usize, Vec<AgentId>, Vec<AgentId>) {
        (self.size(), self.speak_targets.iter().copied().collect(), self.listen_targets.iter().copied().collect())
    }
}

/// Joint strategies a brute-force search may visit per agent by default:
/// `2^15` in directed mode (n up to 16), `2^18` in bidirected mode (n up to 10).
pub fn default_strategy_budget(mode: Mode) -> u128 {
    match mode {
        Mode::Directed => 1 << 15,
        Mode::Bidirected => 1 << 18,
    }
}

/// Number of joint strategies of one agent.
pub fn strategy_space(n: usize, mode: Mode) -> Option<u128> {
    let bits = (n - 1) * mode_layers(mode);
    1u128.checked_shl(u32::try_from(bits).ok()?).filter(|_| bits < 128)
}

fn mode_layers(mode: Mode) -> usize {
    match mode {
        Mode::Directed => 1,
        Mode::Bidirected => 2,
    }
}

/// Stable in the edge sense: nothing addable, nothing removable.
pub fn is_edge_stable(g: &BidirectedGraph, p: &ModelParams) -> Result<bool> {
    Ok(utility::first_move(g, p)?.is_none())
}

fn mask_to_set(others: &[AgentId], mask: u64) -> BTreeSet<AgentId> {
    others.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &w)| w).collect()
}

/// Exhaustive best response of `v` against the other agents' strategies.
///
/// Ties go to the smallest strategy, then the lexicographically smallest
/// speaking and listening target lists.
pub fn best_response(g: &BidirectedGraph, p: &ModelParams, v: AgentId, budget: u128) -> Result<(Strategy, Rational)> {
    p.check_mode(g.mode())?;
    g.check_vertex(v)?;
    let n = g.n();
    let required = strategy_space(n, g.mode()).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { what: "best-response strategies", required, budget });
    }
    let others: Vec<AgentId> = (0..n).filter(|&w| w != v).collect();
    let per_layer = 1u64 << others.len();
    let listen_masks = if g.mode() == Mode::Bidirected { per_layer } else { 1 };
    let mut scratch = g.clone();
    let mut best: Option<(Strategy, Rational)> = None;
    for sm in 0..per_layer {
        scratch.set_out_row(Layer::Speaking, v, mask_to_set(&others, sm))?;
        for lm in 0..listen_masks {
            if g.mode() == Mode::Bidirected {
                scratch.set_out_row(Layer::Listening, v, mask_to_set(&others, lm))?;
            }
            let u = total_utility(&scratch, p, v);
            let better = match &best {
                None => true,
                Some((s, bu)) => match u.cmp(bu) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => Strategy::of(&scratch, v).tie_key() < s.tie_key(),
                },
            };
            if better {
                best = Some((Strategy::of(&scratch, v), u));
            }
        }
    }
    Ok(best.expect("strategy space is nonempty"))
}

/// A strategy change that strictly improves its agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: AgentId,
    pub strategy: Strategy,
    #[serde(with = "crate::params::serde_rational")]
    pub current: Rational,
    #[serde(with = "crate::params::serde_rational")]
    pub improved: Rational,
}

/// First agent (by id) whose best response strictly beats its current
/// utility.
pub fn find_profitable_deviation(g: &BidirectedGraph, p: &ModelParams, budget: u128) -> Result<Option<Deviation>> {
    for v in 0..g.n() {
        let current = utility::utility(g, p, v)?.u_total;
        let (strategy, improved) = best_response(g, p, v, budget)?;
        if improved > current {
            return Ok(Some(Deviation { agent: v, strategy, current, improved }));
        }
    }
    Ok(None)
}

/// Nash stability by exhaustive best responses.
pub fn is_nash_bruteforce(g: &BidirectedGraph, p: &ModelParams) -> Result<bool> {
    is_nash_bruteforce_with_budget(g, p, default_strategy_budget(g.mode()))
}

pub fn is_nash_bruteforce_with_budget(g: &BidirectedGraph, p: &ModelParams, budget: u128) -> Result<bool> {
    Ok(find_profitable_deviation(g, p, budget)?.is_none())
}

/// Bidirected pairwise stability: no edge is removable, and no pair
/// `s(u,v) + l(v,u)` improves `u` unless it strictly hurts `v`.
pub fn is_bi_pairwise_stable(g: &BidirectedGraph, p: &ModelParams) -> Result<bool> {
    if g.mode() != Mode::Bidirected {
        return Err(Error::ModeMismatch { expected: Mode::Bidirected, actual: g.mode() });
    }
    let classes = utility::classify_all(g, p)?;
    if !classes.removable.is_empty() {
        return Ok(false);
    }
    let base: Vec<Rational> = (0..g.n()).map(|v| total_utility(g, p, v)).collect();
    for u in 0..g.n() {
        for v in (0..g.n()).filter(|&v| v != u) {
            let (s, l) = (EdgeRef::speaking(u, v), EdgeRef::listening(v, u));
            if g.has_edge(s) && g.has_edge(l) {
                continue;
            }
            let mut h = g.clone();
            h.add_edge(s)?;
            h.add_edge(l)?;
            if total_utility(&h, p, u) > base[u] && total_utility(&h, p, v) >= base[v] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All agents have the same utility.
pub fn is_symmetric(g: &BidirectedGraph, p: &ModelParams) -> Result<bool> {
    let us = utility::utilities(g, p)?;
    Ok(us.windows(2).all(|w| w[0] == w[1]))
}

/// Longest shortest complete-hop speaking path; `None` when some ordered
/// pair is unreachable.
pub fn diameter(g: &BidirectedGraph) -> Option<usize> {
    let adj = g.speaking_hop_adjacency();
    let mut worst = 0;
    for s in 0..g.n() {
        let mut dist = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        worst = worst.max(*dist.iter().max().expect("n >= 1"));
    }
    (worst != usize::MAX).then_some(worst)
}
