use num_traits::Zero;

use crate::error::Result;
use crate::graph::{AgentId, BidirectedGraph, EdgeRef, Mode};
use crate::params::{Horizon, ModelParams, Rational};
use crate::utility::{self, EdgeStatus};

/// Cost 1 on every mutable layer, horizon `k`.
fn unit_params(mode: Mode, k: u32) -> ModelParams {
    let one = Rational::from_integer(1);
    let listen = match mode {
        Mode::Directed => Rational::zero(),
        Mode::Bidirected => one,
    };
    ModelParams::new(one, listen, Horizon::Finite(k)).expect("unit costs are valid")
}

/// Fraction of `edges` removable at unit cost and horizon `k`; zero when
/// there are no edges.
pub fn removable_fraction(g: &BidirectedGraph, edges: &[EdgeRef], k: u32) -> Result<Rational> {
    if edges.is_empty() {
        return Ok(Rational::zero());
    }
    let p = unit_params(g.mode(), k);
    let mut removable = 0i64;
    for &e in edges {
        if utility::edge_status(g, &p, e)? == EdgeStatus::Removable {
            removable += 1;
        }
    }
    Ok(Rational::new(removable, edges.len() as i64))
}

fn vector(g: &BidirectedGraph, edges: &[EdgeRef], dim: usize) -> Result<Vec<Rational>> {
    (1..=dim).map(|i| removable_fraction(g, edges, i as u32 + 1)).collect()
}

/// Generalized global clustering coefficient: entry `i` (1-based) is the
/// fraction of edges removable at cost 1 with horizon `i + 1`.
pub fn clustering_global(g: &BidirectedGraph, dim: usize) -> Result<Vec<Rational>> {
    let edges: Vec<EdgeRef> = g.edges().collect();
    vector(g, &edges, dim)
}

/// Generalized local clustering coefficient of `v`, over its out-edges.
pub fn clustering_local(g: &BidirectedGraph, v: AgentId, dim: usize) -> Result<Vec<Rational>> {
    g.check_vertex(v)?;
    let edges: Vec<EdgeRef> = g.edges().filter(|e| e.tail == v).collect();
    vector(g, &edges, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_complete, make_cycle, make_empty};
    use crate::params::ratio;

    #[test]
    fn clustering_examples() {
        let k3 = make_complete(3, Mode::Bidirected).unwrap();
        assert_eq!(clustering_global(&k3, 1).unwrap(), vec![ratio(1, 1)]);
        let c3 = make_cycle(3, Mode::Directed).unwrap();
        assert_eq!(clustering_global(&c3, 1).unwrap(), vec![ratio(0, 1)]);
        let empty = make_empty(4, Mode::Directed).unwrap();
        assert_eq!(clustering_global(&empty, 3).unwrap(), vec![ratio(0, 1); 3]);
        for v in 0..3 {
            assert_eq!(clustering_local(&k3, v, 1).unwrap(), vec![ratio(1, 1)]);
            assert_eq!(clustering_local(&c3, v, 1).unwrap(), vec![ratio(0, 1)]);
        }
        assert_eq!(clustering_local(&empty, 2, 2).unwrap(), vec![ratio(0, 1); 2]);
        assert!(clustering_local(&empty, 9, 2).is_err());
    }

    #[test]
    fn chord_is_redundant_only_at_longer_horizon() {
        // At horizon 2 the chord 0->2 is the only way 0 reaches 3 in time.
        let mut g = make_cycle(4, Mode::Directed).unwrap();
        g.add_edge(EdgeRef::speaking(0, 2)).unwrap();
        let v = clustering_global(&g, 2).unwrap();
        assert_eq!(v, vec![ratio(0, 1), ratio(1, 5)]);
    }
}
