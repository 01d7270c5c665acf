//! Canonical graph families.
//!
//! Every constructor builds a digraph over speaking edges. In bidirected
//! mode each speaking edge `s(u,v)` is paired with `l(v,u)`, so all edges
//! are complete.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AgentId, BidirectedGraph, EdgeRef, Mode};

fn from_arcs(n: usize, mode: Mode, arcs: impl IntoIterator<Item = (AgentId, AgentId)>) -> Result<BidirectedGraph> {
    let mut g = BidirectedGraph::new(n, mode)?;
    for (u, v) in arcs {
        g.add_edge(EdgeRef::speaking(u, v))?;
        if mode == Mode::Bidirected {
            g.add_edge(EdgeRef::listening(v, u))?;
        }
    }
    Ok(g)
}

pub fn make_empty(n: usize, mode: Mode) -> Result<BidirectedGraph> {
    BidirectedGraph::new(n, mode)
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn make_cycle(n: usize, mode: Mode) -> Result<BidirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 2, got {n}")));
    }
    from_arcs(n, mode, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Every ordered pair connected.
pub fn make_complete(n: usize, mode: Mode) -> Result<BidirectedGraph> {
    from_arcs(n, mode, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))))
}

/// Non-center vertex ids of each petal of a balanced flower, in petal order.
/// Vertex 0 is the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowerLayout {
    pub n: usize,
    pub k: usize,
    pub petals: Vec<Vec<AgentId>>,
}

impl FlowerLayout {
    pub fn petal_sizes(&self) -> Vec<usize> {
        self.petals.iter().map(Vec::len).collect()
    }

    /// Cycle arcs: center -> first -> ... -> last -> center, per petal.
    pub fn arcs(&self) -> Vec<(AgentId, AgentId)> {
        let mut arcs = Vec::new();
        for petal in &self.petals {
            let mut prev = 0;
            for &v in petal {
                arcs.push((prev, v));
                prev = v;
            }
            arcs.push((prev, 0));
        }
        arcs
    }
}

/// Petal layout of the balanced flower on `n` vertices for horizon `k`.
///
/// Full petals hold `k/2` (floored) non-center vertices. A nonzero
/// remainder becomes a final petal, topped up to `k/2 - 1` vertices by
/// taking one vertex from each full petal in creation order.
///
/// Requires `4 <= k`, `n >= 3`, at least one full petal, and enough full
/// petals to donate to the final one.
pub fn balanced_flower_layout(n: usize, k: usize) -> Result<FlowerLayout> {
    let half = k / 2;
    if n < 3 || k < 4 || half > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "balanced flower needs n >= 3, k >= 4 and floor(k/2) <= n - 1; got n={n}, k={k}"
        )));
    }
    let outer = n - 1;
    let full = outer / half;
    let remainder = outer % half;
    let mut sizes = vec![half; full];
    if remainder > 0 {
        let donations = (half - 1).saturating_sub(remainder);
        if donations > full {
            return Err(Error::InvalidParameter(format!(
                "balanced flower n={n}, k={k}: {donations} donations needed but only {full} full petals"
            )));
        }
        for size in sizes.iter_mut().take(donations) {
            *size -= 1;
        }
        sizes.push(remainder + donations);
    }
    let mut next = 1;
    let petals = sizes
        .into_iter()
        .map(|size| {
            let petal: Vec<AgentId> = (next..next + size).collect();
            next += size;
            petal
        })
        .collect();
    Ok(FlowerLayout { n, k, petals })
}

pub fn make_balanced_flower(n: usize, k: usize, mode: Mode) -> Result<BidirectedGraph> {
    let layout = balanced_flower_layout(n, k)?;
    from_arcs(n, mode, layout.arcs())
}

/// Labels of the Kautz graph: length-`diam` strings over `0..=degree` with
/// distinct adjacent symbols, in lexicographic order.
pub fn kautz_labels(degree: usize, diam: usize) -> Result<Vec<Vec<u8>>> {
    if degree == 0 || diam == 0 {
        return Err(Error::InvalidParameter(format!("Kautz graph needs d >= 1 and D >= 1; got d={degree}, D={diam}")));
    }
    if degree > 254 {
        return Err(Error::InvalidParameter("Kautz alphabet too large".into()));
    }
    let count = (degree as u128 + 1) * (degree as u128).pow(diam as u32 - 1);
    if count > 1 << 20 {
        return Err(Error::InvalidParameter(format!("Kautz graph with {count} vertices is too large")));
    }
    let mut labels: Vec<Vec<u8>> = (0..=degree as u8).map(|a| vec![a]).collect();
    for _ in 1..diam {
        labels = labels
            .into_iter()
            .flat_map(|prefix| {
                let last = *prefix.last().unwrap();
                (0..=degree as u8).filter(move |&a| a != last).map(move |a| {
                    let mut next = prefix.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    Ok(labels)
}

/// Kautz digraph with out-degree `degree` and diameter `diam`: vertices are
/// [`kautz_labels`], edges shift left and append any symbol differing from
/// the new second-to-last one.
pub fn make_kautz(degree: usize, diam: usize, mode: Mode) -> Result<BidirectedGraph> {
    let labels = kautz_labels(degree, diam)?;
    let index = |label: &[u8]| labels.binary_search_by(|l| l.as_slice().cmp(label)).unwrap();
    let mut arcs = Vec::with_capacity(labels.len() * degree);
    for (u, label) in labels.iter().enumerate() {
        let last = *label.last().unwrap();
        for a in (0..=degree as u8).filter(|&a| a != last) {
            let mut next: Vec<u8> = label[1..].to_vec();
            next.push(a);
            arcs.push((u, index(&next)));
        }
    }
    from_arcs(labels.len(), mode, arcs)
}

/// Maps a target size and horizon to Kautz parameters `(d, D)` with
/// `d = k - 1`, when `n = (d+1) d^(D-1)` holds exactly.
pub fn kautz_params_for(n: usize, k: usize) -> Option<(usize, usize)> {
    let d = k.checked_sub(1).filter(|&d| d >= 1)?;
    let mut count = d + 1;
    let mut diam = 1;
    while count < n {
        count = count.checked_mul(d)?;
        diam += 1;
        if d == 1 {
            break;
        }
    }
    (count == n).then_some((d, diam))
}

/// Erdos-Renyi style random graph: every potential edge (on every mutable
/// layer) present independently with probability `density`.
pub fn make_random(n: usize, mode: Mode, density: f64, seed: u64) -> Result<BidirectedGraph> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("edge probability {density} outside [0, 1]")));
    }
    let mut g = BidirectedGraph::new(n, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in g.potential_edges() {
        if rng.gen::<f64>() < density {
            g.add_edge(e)?;
        }
    }
    Ok(g)
}
