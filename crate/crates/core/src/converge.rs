//! Constructive path to a stable graph for directed networks with an
//! unbounded horizon.
//!
//! The procedure alternates between pruning removable edges and adding one
//! or two edges chosen from the structure of the strongly connected
//! components:
//!
//! 1. remove removable edges, lowest `EdgeRef` first, until none remain;
//! 2. stop if nothing is addable;
//! 3. condense into SCCs and flag components larger than `c` as large;
//! 4. give every root of the large-component graph a representative;
//! 5. if a root `T` reaches a large leaf `L != T`, add `l -> r(T)`;
//! 6. otherwise, with two or more large components, join the first pair;
//! 7. otherwise, link the first small leaf component to the large one;
//! 8. otherwise, link the large component back into a small root that
//!    still has more than `c` vertices outside it.
//!
//! Every choice takes the smallest vertex or component id. Each move is
//! checked to be addable or removable where it is applied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, BidirectedGraph, EdgeAction, EdgeRef, Layer, Mode};
use crate::params::{ModelParams, Rational};
use crate::scc::{condense_sccs, Condensation};
use crate::utility::{self, EdgeStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMove {
    pub edge: EdgeRef,
    pub action: EdgeAction,
    /// Procedure step (1, 5, 6, 7 or 8) that emitted the move.
    pub step: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergePath {
    pub final_graph: BidirectedGraph,
    pub moves: Vec<PathMove>,
}

/// Move budget: `16 n^3`.
pub fn move_cap(n: usize) -> usize {
    16 * n.pow(3)
}

struct Walker<'a> {
    g: BidirectedGraph,
    p: &'a ModelParams,
    moves: Vec<PathMove>,
    cap: usize,
}

impl Walker<'_> {
    fn apply(&mut self, edge: EdgeRef, action: EdgeAction, step: u8) -> Result<()> {
        let status = utility::edge_status(&self.g, self.p, edge)?;
        let expected = match action {
            EdgeAction::Add => EdgeStatus::Addable,
            EdgeAction::Remove => EdgeStatus::Removable,
        };
        if status != expected {
            return Err(Error::Internal(format!("step {step}: {edge} should be {expected:?} but is {status:?}")));
        }
        if self.moves.len() == self.cap {
            return Err(Error::IterationCap { cap: self.cap });
        }
        self.g.apply(edge, action)?;
        self.moves.push(PathMove { edge, action, step });
        Ok(())
    }

    fn prune(&mut self) -> Result<()> {
        loop {
            let next =
                self.g.edges().find(|&e| utility::edge_status(&self.g, self.p, e).ok() == Some(EdgeStatus::Removable));
            match next {
                Some(e) => self.apply(e, EdgeAction::Remove, 1)?,
                None => return Ok(()),
            }
        }
    }

    fn has_addable(&self) -> bool {
        self.g
            .potential_edges()
            .into_iter()
            .any(|e| !self.g.has_edge(e) && utility::edge_status(&self.g, self.p, e).ok() == Some(EdgeStatus::Addable))
    }

    fn large_count(&self) -> usize {
        condense_sccs(&self.g, Some(self.p.c_speak)).large_count()
    }
}

/// Component-level reachability: `reach[a][b]` iff `b` is reachable from
/// `a` (every component reaches itself).
fn component_reach(cond: &Condensation) -> Vec<Vec<bool>> {
    let order = cond.topological_order().expect("condensation is acyclic");
    let mut reach = vec![vec![false; cond.len()]; cond.len()];
    for &c in order.iter().rev() {
        reach[c][c] = true;
        for d in cond.successors(c).collect::<Vec<_>>() {
            let below = reach[d].clone();
            for (mine, theirs) in reach[c].iter_mut().zip(below) {
                *mine |= theirs;
            }
        }
    }
    reach
}

fn smallest(cond: &Condensation, c: usize) -> AgentId {
    cond.components[c][0]
}

/// Walk the constructive path from `g` to a stable graph.
///
/// Requires a directed graph, an unbounded horizon and `c_s > 0`.
pub fn converge_path(g: &BidirectedGraph, p: &ModelParams) -> Result<ConvergePath> {
    if g.mode() != Mode::Directed {
        return Err(Error::ModeMismatch { expected: Mode::Directed, actual: g.mode() });
    }
    p.check_mode(g.mode())?;
    if !p.horizon.is_infinite() {
        return Err(Error::InvalidParameter("converge_path needs k = inf".into()));
    }
    if p.c_speak <= Rational::from_integer(0) {
        return Err(Error::InvalidParameter("converge_path needs c_s > 0".into()));
    }
    let mut w = Walker { g: g.clone(), p, moves: Vec::new(), cap: move_cap(g.n()) };

    loop {
        w.prune()?;
        if !w.has_addable() {
            break;
        }
        let cond = condense_sccs(&w.g, Some(p.c_speak));
        let reach = component_reach(&cond);
        let large: Vec<usize> = (0..cond.len()).filter(|&c| cond.is_large(c)).collect();
        if large.is_empty() {
            return Err(Error::Internal("addable edge exists but no component is large".into()));
        }
        // Roots of the large-component graph: no other large component reaches them.
        let roots: Vec<usize> =
            large.iter().copied().filter(|&t| large.iter().all(|&u| u == t || !reach[u][t])).collect();
        let is_leaf = |t: usize| large.iter().all(|&u| u == t || !reach[t][u]);

        // Step 5.
        let step5 = roots
            .iter()
            .find_map(|&t| large.iter().copied().find(|&l| l != t && reach[t][l] && is_leaf(l)).map(|l| (t, l)));
        if let Some((t, l)) = step5 {
            let before = large.len();
            w.apply(EdgeRef::speaking(smallest(&cond, l), smallest(&cond, t)), EdgeAction::Add, 5)?;
            w.prune()?;
            check_progress(5, before, w.large_count())?;
            continue;
        }

        // Step 6.
        if large.len() >= 2 {
            let (t1, t2) = large
                .iter()
                .flat_map(|&a| large.iter().map(move |&b| (a, b)))
                .find(|&(a, b)| a != b && !reach[b][a])
                .ok_or_else(|| Error::Internal("step 6: no pair of separated large components".into()))?;
            let (r1, r2) = (smallest(&cond, t1), smallest(&cond, t2));
            let before = large.len();
            w.apply(EdgeRef::speaking(r2, r1), EdgeAction::Add, 6)?;
            let back = utility::reach_mask(&w.g, p.horizon, Layer::Speaking, r1);
            if cond.components[t2].iter().any(|&x| !back[x]) {
                w.apply(EdgeRef::speaking(r1, r2), EdgeAction::Add, 6)?;
            }
            w.prune()?;
            check_progress(6, before, w.large_count())?;
            continue;
        }

        let t1 = large[0];
        let r1 = smallest(&cond, t1);

        // Step 7.
        if let Some(s) = (0..cond.len()).find(|&c| c != t1 && !cond.is_large(c) && !cond.has_outgoing(c)) {
            w.apply(EdgeRef::speaking(smallest(&cond, s), r1), EdgeAction::Add, 7)?;
            continue;
        }

        // Step 8.
        let in_t1 = |x: AgentId| cond.component_of[x] == t1;
        let outside = |c: usize| {
            (0..cond.len()).filter(|&d| reach[c][d] && d != t1).map(|d| cond.components[d].len()).sum::<usize>()
        };
        let root = (0..cond.len())
            .filter(|&c| c != t1 && !cond.is_large(c) && !cond.has_incoming(c))
            .find(|&c| Rational::from_integer(outside(c) as i64) > p.c_speak)
            .ok_or_else(|| Error::Internal("step 8: no small root with enough vertices outside".into()))?;
        let entry =
            w.g.speaking_edges()
                .find(|&(t, r)| in_t1(r) && !in_t1(t) && reach[root][cond.component_of[t]])
                .ok_or_else(|| Error::Internal("step 8: no edge enters the large component".into()))?;
        w.apply(EdgeRef::speaking(entry.1, smallest(&cond, root)), EdgeAction::Add, 8)?;
    }

    Ok(ConvergePath { final_graph: w.g, moves: w.moves })
}

fn check_progress(step: u8, before: usize, after: usize) -> Result<()> {
    if after < before {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "step {step}: large components went from {before} to {after}, expected a decrease"
        )))
    }
}
