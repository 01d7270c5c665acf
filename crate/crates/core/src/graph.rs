//! Bidirected networks: a vertex set with independent speaking and
//! listening edge layers.
//!
//! In [`Mode::Directed`] no listening edges are stored. Every query treats
//! the listening layer as complete (each agent listens to everyone), which
//! reduces the model to an ordinary digraph over the speaking edges.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type AgentId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Directed,
    Bidirected,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Directed => "directed",
            Mode::Bidirected => "bidirected",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directed" => Ok(Mode::Directed),
            "bidirected" => Ok(Mode::Bidirected),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

/// Edge layer. Speaking sorts before listening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Speaking,
    Listening,
}

impl Layer {
    pub const BOTH: [Layer; 2] = [Layer::Speaking, Layer::Listening];

    pub fn other(self) -> Layer {
        match self {
            Layer::Speaking => Layer::Listening,
            Layer::Listening => Layer::Speaking,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Speaking => "speaking",
            Layer::Listening => "listening",
        })
    }
}

/// A potential edge. Ordered by `(layer, tail, head)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub layer: Layer,
    pub tail: AgentId,
    pub head: AgentId,
}

impl EdgeRef {
    pub fn speaking(tail: AgentId, head: AgentId) -> Self {
        Self { layer: Layer::Speaking, tail, head }
    }

    pub fn listening(tail: AgentId, head: AgentId) -> Self {
        Self { layer: Layer::Listening, tail, head }
    }

    /// The edge on the other layer running the opposite way; together with
    /// `self` it forms a complete pair.
    pub fn partner(self) -> Self {
        Self { layer: self.layer.other(), tail: self.head, head: self.tail }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.layer {
            Layer::Speaking => 's',
            Layer::Listening => 'l',
        };
        write!(f, "{tag}({},{})", self.tail, self.head)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeAction {
    Add,
    Remove,
}

/// Result of [`BidirectedGraph::mutate_edge`]; `changed` is false when the
/// edge was already in the requested state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub graph: BidirectedGraph,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BidirectedGraph {
    n: usize,
    mode: Mode,
    speak: Vec<BTreeSet<AgentId>>,
    listen: Vec<BTreeSet<AgentId>>,
}

impl BidirectedGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroVertices);
        }
        Ok(Self { n, mode, speak: vec![BTreeSet::new(); n], listen: vec![BTreeSet::new(); n] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn check_vertex(&self, v: AgentId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn check_edge(&self, e: EdgeRef) -> Result<()> {
        self.check_vertex(e.tail)?;
        self.check_vertex(e.head)?;
        if e.tail == e.head {
            return Err(Error::SelfLoop(e.tail));
        }
        Ok(())
    }

    /// Edge validity plus the directed-mode layer restriction for mutations.
    pub fn check_mutable(&self, e: EdgeRef) -> Result<()> {
        self.check_edge(e)?;
        if self.mode == Mode::Directed && e.layer == Layer::Listening {
            return Err(Error::ListeningInDirectedMode);
        }
        Ok(())
    }

    /// Presence test. Directed mode reports every listening edge as present.
    pub fn has_edge(&self, e: EdgeRef) -> bool {
        if e.tail >= self.n || e.head >= self.n || e.tail == e.head {
            return false;
        }
        match (self.mode, e.layer) {
            (_, Layer::Speaking) => self.speak[e.tail].contains(&e.head),
            (Mode::Directed, Layer::Listening) => true,
            (Mode::Bidirected, Layer::Listening) => self.listen[e.tail].contains(&e.head),
        }
    }

    /// In-place insert; returns whether the graph changed.
    pub fn add_edge(&mut self, e: EdgeRef) -> Result<bool> {
        self.check_mutable(e)?;
        Ok(self.row_mut(e.layer, e.tail).insert(e.head))
    }

    /// In-place delete; returns whether the graph changed.
    pub fn remove_edge(&mut self, e: EdgeRef) -> Result<bool> {
        self.check_mutable(e)?;
        Ok(self.row_mut(e.layer, e.tail).remove(&e.head))
    }

    pub fn apply(&mut self, e: EdgeRef, action: EdgeAction) -> Result<bool> {
        match action {
            EdgeAction::Add => self.add_edge(e),
            EdgeAction::Remove => self.remove_edge(e),
        }
    }

    /// Value-returning form of [`apply`](Self::apply).
    pub fn mutate_edge(&self, e: EdgeRef, action: EdgeAction) -> Result<Mutation> {
        let mut graph = self.clone();
        let changed = graph.apply(e, action)?;
        Ok(Mutation { graph, changed })
    }

    fn row_mut(&mut self, layer: Layer, v: AgentId) -> &mut BTreeSet<AgentId> {
        match layer {
            Layer::Speaking => &mut self.speak[v],
            Layer::Listening => &mut self.listen[v],
        }
    }

    /// Stored out-neighbours of `v` on `layer` (empty for listening in
    /// directed mode).
    pub fn out_row(&self, layer: Layer, v: AgentId) -> &BTreeSet<AgentId> {
        match layer {
            Layer::Speaking => &self.speak[v],
            Layer::Listening => &self.listen[v],
        }
    }

    /// Replace `v`'s stored out-edges on one layer.
    pub fn set_out_row(&mut self, layer: Layer, v: AgentId, targets: BTreeSet<AgentId>) -> Result<()> {
        self.check_vertex(v)?;
        for &t in &targets {
            self.check_mutable(EdgeRef { layer, tail: v, head: t })?;
        }
        *self.row_mut(layer, v) = targets;
        Ok(())
    }

    /// Number of paid out-edges on a layer: `ds+` or `dl+`. Zero for
    /// listening in directed mode since listening is free there.
    pub fn out_degree(&self, layer: Layer, v: AgentId) -> usize {
        self.out_row(layer, v).len()
    }

    /// Stored speaking edges in lexicographic order.
    pub fn speaking_edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.speak.iter().enumerate().flat_map(|(u, row)| row.iter().map(move |&v| (u, v)))
    }

    /// Stored listening edges in lexicographic order.
    pub fn listening_edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.listen.iter().enumerate().flat_map(|(u, row)| row.iter().map(move |&v| (u, v)))
    }

    /// All stored edges, both layers, in `EdgeRef` order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.speaking_edges()
            .map(|(u, v)| EdgeRef::speaking(u, v))
            .chain(self.listening_edges().map(|(u, v)| EdgeRef::listening(u, v)))
    }

    pub fn speaking_count(&self) -> usize {
        self.speak.iter().map(BTreeSet::len).sum()
    }

    pub fn listening_count(&self) -> usize {
        self.listen.iter().map(BTreeSet::len).sum()
    }

    /// Stored edges over both layers.
    pub fn edge_count(&self) -> usize {
        self.speaking_count() + self.listening_count()
    }

    /// Whether a present edge has its reverse partner on the other layer.
    pub fn is_complete_edge(&self, e: EdgeRef) -> Result<bool> {
        self.check_edge(e)?;
        if !self.has_edge(e) {
            return Err(Error::EdgeAbsent(e));
        }
        Ok(self.has_edge(e.partner()))
    }

    /// Number of stored edges (both layers) whose partner is present.
    pub fn complete_edge_count(&self) -> usize {
        self.edges().filter(|&e| self.has_edge(e.partner())).count()
    }

    /// Whether `from -> to` is a usable hop in the given direction: a
    /// speaking hop needs `s(from,to)` and `l(to,from)`, a listening hop
    /// needs `l(from,to)` and `s(to,from)`.
    pub fn hop(&self, direction: Layer, from: AgentId, to: AgentId) -> bool {
        let e = EdgeRef { layer: direction, tail: from, head: to };
        self.has_edge(e) && self.has_edge(e.partner())
    }

    /// Successors of `v` under complete hops in `direction`, ascending.
    pub fn hop_successors(&self, direction: Layer, v: AgentId) -> Vec<AgentId> {
        match (self.mode, direction) {
            (Mode::Directed, Layer::Speaking) => self.speak[v].iter().copied().collect(),
            (Mode::Directed, Layer::Listening) => {
                (0..self.n).filter(|&u| u != v && self.speak[u].contains(&v)).collect()
            }
            (Mode::Bidirected, Layer::Speaking) => {
                self.speak[v].iter().copied().filter(|&u| self.listen[u].contains(&v)).collect()
            }
            (Mode::Bidirected, Layer::Listening) => {
                self.listen[v].iter().copied().filter(|&u| self.speak[u].contains(&v)).collect()
            }
        }
    }

    /// Complete-hop speaking adjacency for all vertices.
    pub fn speaking_hop_adjacency(&self) -> Vec<Vec<AgentId>> {
        (0..self.n).map(|v| self.hop_successors(Layer::Speaking, v)).collect()
    }

    /// Layers an agent can build edges on in this mode.
    pub fn mutable_layers(&self) -> &'static [Layer] {
        match self.mode {
            Mode::Directed => &[Layer::Speaking],
            Mode::Bidirected => &Layer::BOTH,
        }
    }

    /// Size of the potential-edge space: `n(n-1)` per mutable layer.
    pub fn potential_edge_count(&self) -> usize {
        potential_edge_count(self.n, self.mode)
    }

    /// Every potential edge in `EdgeRef` order.
    pub fn potential_edges(&self) -> Vec<EdgeRef> {
        potential_edges(self.n, self.mode)
    }

    /// True when no edge is stored on either layer.
    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }
}

pub fn potential_edge_count(n: usize, mode: Mode) -> usize {
    let per_layer = n * n.saturating_sub(1);
    match mode {
        Mode::Directed => per_layer,
        Mode::Bidirected => 2 * per_layer,
    }
}

pub fn potential_edges(n: usize, mode: Mode) -> Vec<EdgeRef> {
    let layers: &[Layer] = match mode {
        Mode::Directed => &[Layer::Speaking],
        Mode::Bidirected => &Layer::BOTH,
    };
    let mut out = Vec::with_capacity(potential_edge_count(n, mode));
    for &layer in layers {
        for tail in 0..n {
            for head in (0..n).filter(|&h| h != tail) {
                out.push(EdgeRef { layer, tail, head });
            }
        }
    }
    out
}
