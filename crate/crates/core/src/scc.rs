//! Strongly connected components over complete speaking hops.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::graph::{AgentId, BidirectedGraph};
use crate::params::Rational;

/// Maximal SCC partition and the acyclic component graph.
///
/// Components are numbered by their smallest vertex, and each member list
/// is ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub components: Vec<Vec<AgentId>>,
    pub component_of: Vec<usize>,
    pub dag_edges: BTreeSet<(usize, usize)>,
    /// `size > c` per component, when a cost threshold was supplied.
    pub large: Option<Vec<bool>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn successors(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.dag_edges.range((c, 0)..(c + 1, 0)).map(|&(_, d)| d)
    }

    pub fn has_incoming(&self, c: usize) -> bool {
        self.dag_edges.iter().any(|&(_, d)| d == c)
    }

    pub fn has_outgoing(&self, c: usize) -> bool {
        self.successors(c).next().is_some()
    }

    pub fn is_large(&self, c: usize) -> bool {
        self.large.as_ref().is_some_and(|flags| flags[c])
    }

    pub fn large_count(&self) -> usize {
        self.large.as_ref().map_or(0, |flags| flags.iter().filter(|&&b| b).count())
    }

    /// Kahn topological order of the component graph; `None` if it has a
    /// cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree = vec![0usize; self.len()];
        for &(_, d) in &self.dag_edges {
            indegree[d] += 1;
        }
        let mut ready: Vec<usize> = (0..self.len()).filter(|&c| indegree[c] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(c) = ready.pop() {
            order.push(c);
            for d in self.successors(c) {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.push(d);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }
}

/// Tarjan's algorithm, iterative, over an adjacency list.
pub fn tarjan(adj: &[Vec<AgentId>]) -> Vec<Vec<AgentId>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, pos)) = call.last() {
            if let Some(&w) = adj[v].get(pos) {
                call.last_mut().expect("frame").1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// Condense the complete-hop speaking digraph of `g`. With `threshold`,
/// components of size strictly greater than it are flagged large.
pub fn condense_sccs(g: &BidirectedGraph, threshold: Option<Rational>) -> Condensation {
    let adj = g.speaking_hop_adjacency();
    let mut components = tarjan(&adj);
    components.sort_unstable_by_key(|c| c[0]);
    let mut component_of = vec![0; g.n()];
    for (i, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = i;
        }
    }
    let mut dag_edges = BTreeSet::new();
    for (u, row) in adj.iter().enumerate() {
        for &v in row {
            if component_of[u] != component_of[v] {
                dag_edges.insert((component_of[u], component_of[v]));
            }
        }
    }
    let large = threshold.map(|c| {
        components.iter().map(|comp| Rational::from_integer(comp.len().to_i64().unwrap_or(i64::MAX)) > c).collect()
    });
    Condensation { components, component_of, dag_edges, large }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::make_cycle;
    use crate::graph::{EdgeRef, Mode};
    use crate::params::ratio;

    fn digraph(n: usize, arcs: &[(usize, usize)]) -> BidirectedGraph {
        let mut g = BidirectedGraph::new(n, Mode::Directed).unwrap();
        for &(u, v) in arcs {
            g.add_edge(EdgeRef::speaking(u, v)).unwrap();
        }
        g
    }

    #[test]
    fn cycle_is_one_component() {
        let c = condense_sccs(&make_cycle(3, Mode::Directed).unwrap(), None);
        assert_eq!(c.components, vec![vec![0, 1, 2]]);
        assert!(c.dag_edges.is_empty());
    }

    #[test]
    fn two_disjoint_cycles() {
        let g = digraph(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)]);
        let c = condense_sccs(&g, Some(ratio(2, 1)));
        assert_eq!(c.sizes(), vec![4, 4]);
        assert!(c.dag_edges.is_empty());
        assert_eq!(c.large_count(), 2);
    }

    #[test]
    fn single_arc() {
        let c = condense_sccs(&digraph(2, &[(0, 1)]), None);
        assert_eq!(c.components, vec![vec![0], vec![1]]);
        assert_eq!(c.dag_edges.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(c.has_outgoing(0) && !c.has_incoming(0));
        assert_eq!(c.topological_order(), Some(vec![0, 1]));
    }

    #[test]
    fn large_flags_are_strict() {
        let g = digraph(5, &[(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)]);
        let c = condense_sccs(&g, Some(ratio(2, 1)));
        assert_eq!(c.large, Some(vec![false, true]));
    }

    #[test]
    fn bidirected_uses_complete_hops_only() {
        let mut g = BidirectedGraph::new(2, Mode::Bidirected).unwrap();
        g.add_edge(EdgeRef::speaking(0, 1)).unwrap();
        g.add_edge(EdgeRef::speaking(1, 0)).unwrap();
        g.add_edge(EdgeRef::listening(1, 0)).unwrap();
        let c = condense_sccs(&g, None);
        assert_eq!(c.len(), 2);
        assert_eq!(c.dag_edges.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn deep_chain_does_not_recurse() {
        let n = 20_000;
        let arcs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let c = condense_sccs(&digraph(n, &arcs), None);
        assert_eq!(c.len(), 1);
    }
}
