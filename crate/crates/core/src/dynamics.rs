//! Seeded asynchronous edge and vertex dynamics.
//!
//! Edge dynamics picks one potential edge uniformly per round and toggles
//! it when it is addable or removable. Vertex dynamics picks an agent, a
//! layer and an action, then applies every qualifying edge of that agent.
//! All randomness comes from one ChaCha8 stream seeded by
//! [`DynamicsConfig::seed`], so identical inputs give identical traces.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, BidirectedGraph, EdgeAction, EdgeRef, Layer, Mode};
use crate::io::GraphDocument;
use crate::params::{format_rational, ModelParams, Rational};
use crate::utility::{self, EdgeStatus};

pub const TRACE_FORMAT: &str = "netform-trace/1";

/// Recorded in every trace header so traces stay comparable across builds.
pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.3/seed_from_u64";

pub type DynamicsRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> DynamicsRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Edge,
    Vertex,
}

/// How vertex dynamics applies the qualifying edges of the chosen agent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexRule {
    /// Every edge that qualifies in the pre-round graph, all at once.
    #[default]
    Simultaneous,
    /// One edge at a time, best improvement first, re-evaluating after each.
    SequentialGreedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub seed: u64,
    pub max_rounds: u64,
    pub variant: Variant,
    /// Consecutive no-op rounds between full stability scans; defaults to
    /// the size of the potential-edge space.
    pub stability_scan_interval: Option<u64>,
    #[serde(default)]
    pub vertex_rule: VertexRule,
}

impl DynamicsConfig {
    pub fn edge(seed: u64, max_rounds: u64) -> Self {
        Self {
            seed,
            max_rounds,
            variant: Variant::Edge,
            stability_scan_interval: None,
            vertex_rule: VertexRule::Simultaneous,
        }
    }

    pub fn vertex(seed: u64, max_rounds: u64) -> Self {
        Self { variant: Variant::Vertex, ..Self::edge(seed, max_rounds) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
        }
        if self.stability_scan_interval == Some(0) {
            return Err(Error::InvalidParameter("stability scan interval must be at least 1".into()));
        }
        Ok(())
    }

    pub fn scan_interval(&self, g: &BidirectedGraph) -> u64 {
        self.stability_scan_interval.unwrap_or_else(|| (2 * g.n() * g.n().saturating_sub(1)).max(1) as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventAction {
    Added,
    Removed,
    NoOp,
}

impl EventAction {
    fn as_str(self) -> &'static str {
        match self {
            EventAction::Added => "added",
            EventAction::Removed => "removed",
            EventAction::NoOp => "no-op",
        }
    }
}

/// What a round selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Edge(EdgeRef),
    Vertex {
        agent: AgentId,
        layer: Layer,
        action: EdgeAction,
    },
    /// Nothing to select (a single-vertex graph).
    Nothing,
}

/// Outcome of one round; `changes` is empty for a no-op.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub selection: Selection,
    pub changes: Vec<(EdgeRef, EventAction)>,
}

impl StepOutcome {
    pub fn is_noop(&self) -> bool {
        self.changes.is_empty()
    }
}

/// One mutation in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub round: u64,
    pub edge: EdgeRef,
    pub action: EventAction,
    #[serde(with = "crate::params::serde_rational")]
    pub welfare_after: Rational,
    pub potential_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub config: DynamicsConfig,
    pub params: ModelParams,
    pub generator: &'static str,
    pub initial_graph: BidirectedGraph,
    pub events: Vec<TraceEvent>,
    pub converged: bool,
    pub rounds_used: u64,
    pub final_graph: BidirectedGraph,
}

impl DynamicsTrace {
    pub fn mutation_count(&self) -> usize {
        self.events.len()
    }
}

fn edge_from_index(n: usize, mode: Mode, index: usize) -> EdgeRef {
    let per_layer = n * (n - 1);
    let layer = if index < per_layer || mode == Mode::Directed { Layer::Speaking } else { Layer::Listening };
    let i = index % per_layer;
    let tail = i / (n - 1);
    let mut head = i % (n - 1);
    if head >= tail {
        head += 1;
    }
    EdgeRef { layer, tail, head }
}

/// Toggle `e` if it is addable or removable for its owner.
pub fn apply_edge_choice(g: &mut BidirectedGraph, p: &ModelParams, e: EdgeRef) -> Result<Option<EventAction>> {
    match utility::edge_status(g, p, e)? {
        EdgeStatus::Addable => {
            g.add_edge(e)?;
            Ok(Some(EventAction::Added))
        }
        EdgeStatus::Removable => {
            g.remove_edge(e)?;
            Ok(Some(EventAction::Removed))
        }
        EdgeStatus::NeutralPresent | EdgeStatus::NeutralAbsent => Ok(None),
    }
}

/// One round of edge dynamics: a uniformly random potential edge.
pub fn edge_step(g: &mut BidirectedGraph, p: &ModelParams, rng: &mut DynamicsRng) -> Result<StepOutcome> {
    let space = g.potential_edge_count();
    if space == 0 {
        return Ok(StepOutcome { selection: Selection::Nothing, changes: Vec::new() });
    }
    let e = edge_from_index(g.n(), g.mode(), rng.gen_range(0..space));
    let changes = apply_edge_choice(g, p, e)?.map(|a| vec![(e, a)]).unwrap_or_default();
    Ok(StepOutcome { selection: Selection::Edge(e), changes })
}

fn qualifying_edges(
    g: &BidirectedGraph,
    p: &ModelParams,
    agent: AgentId,
    layer: Layer,
    action: EdgeAction,
) -> Vec<(EdgeRef, Rational)> {
    let base = utility::total_utility(g, p, agent);
    let wanted = match action {
        EdgeAction::Add => EdgeStatus::Addable,
        EdgeAction::Remove => EdgeStatus::Removable,
    };
    (0..g.n())
        .filter(|&w| w != agent)
        .map(|head| EdgeRef { layer, tail: agent, head })
        .filter(|&e| utility::edge_status(g, p, e).ok() == Some(wanted))
        .map(|e| {
            let mut toggled = g.clone();
            toggled.apply(e, action).expect("qualifying edge is mutable");
            (e, utility::total_utility(&toggled, p, agent) - base)
        })
        .collect()
}

/// The edges a vertex-dynamics round would change, in application order.
pub fn plan_vertex_changes(
    g: &BidirectedGraph,
    p: &ModelParams,
    agent: AgentId,
    layer: Layer,
    action: EdgeAction,
    rule: VertexRule,
) -> Result<Vec<EdgeRef>> {
    p.check_mode(g.mode())?;
    g.check_vertex(agent)?;
    if g.mode() == Mode::Directed && layer == Layer::Listening {
        return Err(Error::ListeningInDirectedMode);
    }
    match rule {
        VertexRule::Simultaneous => {
            Ok(qualifying_edges(g, p, agent, layer, action).into_iter().map(|(e, _)| e).collect())
        }
        VertexRule::SequentialGreedy => {
            let mut scratch = g.clone();
            let mut plan = Vec::new();
            loop {
                let best = qualifying_edges(&scratch, p, agent, layer, action)
                    .into_iter()
                    .max_by(|(ea, ga), (eb, gb)| ga.cmp(gb).then(eb.cmp(ea)));
                let Some((e, _)) = best else { break };
                scratch.apply(e, action)?;
                plan.push(e);
            }
            Ok(plan)
        }
    }
}

fn event_action(action: EdgeAction) -> EventAction {
    match action {
        EdgeAction::Add => EventAction::Added,
        EdgeAction::Remove => EventAction::Removed,
    }
}

/// Apply a fixed vertex-dynamics choice.
pub fn apply_vertex_choice(
    g: &mut BidirectedGraph,
    p: &ModelParams,
    agent: AgentId,
    layer: Layer,
    action: EdgeAction,
    rule: VertexRule,
) -> Result<Vec<(EdgeRef, EventAction)>> {
    let plan = plan_vertex_changes(g, p, agent, layer, action, rule)?;
    for &e in &plan {
        g.apply(e, action)?;
    }
    Ok(plan.into_iter().map(|e| (e, event_action(action))).collect())
}

fn draw_vertex_selection(g: &BidirectedGraph, rng: &mut DynamicsRng) -> (AgentId, Layer, EdgeAction) {
    let agent = rng.gen_range(0..g.n());
    let layer = if rng.gen_range(0..2) == 0 { Layer::Speaking } else { Layer::Listening };
    let action = if rng.gen_range(0..2) == 0 { EdgeAction::Add } else { EdgeAction::Remove };
    (agent, layer, action)
}

/// One round of vertex dynamics (bidirected mode).
pub fn vertex_step(
    g: &mut BidirectedGraph,
    p: &ModelParams,
    rng: &mut DynamicsRng,
    rule: VertexRule,
) -> Result<StepOutcome> {
    require_bidirected(g)?;
    let (agent, layer, action) = draw_vertex_selection(g, rng);
    let changes = apply_vertex_choice(g, p, agent, layer, action, rule)?;
    Ok(StepOutcome { selection: Selection::Vertex { agent, layer, action }, changes })
}

fn require_bidirected(g: &BidirectedGraph) -> Result<()> {
    if g.mode() != Mode::Bidirected {
        return Err(Error::ModeMismatch { expected: Mode::Bidirected, actual: g.mode() });
    }
    Ok(())
}

fn is_stable(g: &BidirectedGraph, p: &ModelParams) -> Result<bool> {
    Ok(utility::first_move(g, p)?.is_none())
}

fn record(g: &BidirectedGraph, p: &ModelParams, round: u64, edge: EdgeRef, action: EventAction) -> Result<TraceEvent> {
    Ok(TraceEvent {
        round,
        edge,
        action,
        welfare_after: utility::welfare(g, p)?,
        potential_after: match g.mode() {
            Mode::Bidirected => Some(utility::potential(g)?),
            Mode::Directed => None,
        },
    })
}

/// Run dynamics until no edge is addable or removable, or `max_rounds`.
///
/// A full scan runs after every mutation and after every
/// `stability_scan_interval` consecutive no-op rounds.
pub fn run_dynamics(initial: &BidirectedGraph, p: &ModelParams, cfg: &DynamicsConfig) -> Result<DynamicsTrace> {
    p.check_mode(initial.mode())?;
    cfg.validate()?;
    if cfg.variant == Variant::Vertex {
        require_bidirected(initial)?;
    }
    let interval = cfg.scan_interval(initial);
    let mut g = initial.clone();
    let mut rng = seeded_rng(cfg.seed);
    let mut events = Vec::new();
    let mut converged = is_stable(&g, p)?;
    let mut round = 0;
    let mut idle = 0u64;

    while !converged && round < cfg.max_rounds {
        round += 1;
        let planned: Vec<(EdgeRef, EdgeAction)> = match cfg.variant {
            Variant::Edge => {
                let space = g.potential_edge_count();
                let e = edge_from_index(g.n(), g.mode(), rng.gen_range(0..space));
                match utility::edge_status(&g, p, e)? {
                    EdgeStatus::Addable => vec![(e, EdgeAction::Add)],
                    EdgeStatus::Removable => vec![(e, EdgeAction::Remove)],
                    _ => Vec::new(),
                }
            }
            Variant::Vertex => {
                let (agent, layer, action) = draw_vertex_selection(&g, &mut rng);
                plan_vertex_changes(&g, p, agent, layer, action, cfg.vertex_rule)?
                    .into_iter()
                    .map(|e| (e, action))
                    .collect()
            }
        };
        if planned.is_empty() {
            idle += 1;
            if idle.is_multiple_of(interval) {
                converged = is_stable(&g, p)?;
            }
            continue;
        }
        idle = 0;
        for (e, action) in planned {
            g.apply(e, action)?;
            events.push(record(&g, p, round, e, event_action(action))?);
        }
        converged = is_stable(&g, p)?;
    }

    Ok(DynamicsTrace {
        config: cfg.clone(),
        params: *p,
        generator: GENERATOR_ID,
        initial_graph: initial.clone(),
        events,
        converged,
        rounds_used: round,
        final_graph: g,
    })
}

pub fn run_edge_dynamics(initial: &BidirectedGraph, p: &ModelParams, cfg: &DynamicsConfig) -> Result<DynamicsTrace> {
    if cfg.variant != Variant::Edge {
        return Err(Error::InvalidParameter("run_edge_dynamics needs variant = edge".into()));
    }
    run_dynamics(initial, p, cfg)
}

pub fn run_vertex_dynamics(initial: &BidirectedGraph, p: &ModelParams, cfg: &DynamicsConfig) -> Result<DynamicsTrace> {
    if cfg.variant != Variant::Vertex {
        return Err(Error::InvalidParameter("run_vertex_dynamics needs variant = vertex".into()));
    }
    run_dynamics(initial, p, cfg)
}

/// Replays `trace` from its initial graph, checking that every event was a
/// legal move where it happened, and that the result matches
/// `final_graph`. Simultaneous vertex rounds are checked against the graph
/// at the start of the round.
pub fn replay(trace: &DynamicsTrace) -> Result<BidirectedGraph> {
    let p = &trace.params;
    let mut g = trace.initial_graph.clone();
    let batch = trace.config.variant == Variant::Vertex && trace.config.vertex_rule == VertexRule::Simultaneous;
    let mut i = 0;
    while i < trace.events.len() {
        let round = trace.events[i].round;
        let end = trace.events[i..].iter().position(|e| e.round != round).map_or(trace.events.len(), |j| i + j);
        if trace.config.variant == Variant::Edge && end - i > 1 {
            return Err(Error::Internal(format!("round {round} has {} edge events", end - i)));
        }
        let round_start = g.clone();
        for ev in &trace.events[i..end] {
            let reference = if batch { &round_start } else { &g };
            let status = utility::edge_status(reference, p, ev.edge)?;
            let (ok, action) = match ev.action {
                EventAction::Added => (status == EdgeStatus::Addable, EdgeAction::Add),
                EventAction::Removed => (status == EdgeStatus::Removable, EdgeAction::Remove),
                EventAction::NoOp => return Err(Error::Internal("no-op event recorded".into())),
            };
            if !ok {
                return Err(Error::Internal(format!(
                    "round {round}: {} {} but status was {status:?}",
                    ev.edge,
                    ev.action.as_str()
                )));
            }
            g.apply(ev.edge, action)?;
            if utility::welfare(&g, p)? != ev.welfare_after {
                return Err(Error::Internal(format!("round {round}: welfare mismatch after {}", ev.edge)));
            }
        }
        i = end;
    }
    if g != trace.final_graph {
        return Err(Error::Internal("replay does not reproduce the final graph".into()));
    }
    Ok(g)
}

/// Once both edges of a complete pair are absent, neither may be added
/// again. Returns the first violating event.
pub fn find_resurrection(trace: &DynamicsTrace) -> Option<&TraceEvent> {
    let g0 = &trace.initial_graph;
    if g0.mode() != Mode::Bidirected {
        return None;
    }
    // Keyed by the speaking edge (v, w) of the pair s(v,w) / l(w,v).
    let pair_key = |e: EdgeRef| match e.layer {
        Layer::Speaking => (e.tail, e.head),
        Layer::Listening => (e.head, e.tail),
    };
    let mut g = g0.clone();
    let mut dead: BTreeSet<(AgentId, AgentId)> = BTreeSet::new();
    let mark = |g: &BidirectedGraph, dead: &mut BTreeSet<_>, v: AgentId, w: AgentId| {
        if !g.has_edge(EdgeRef::speaking(v, w)) && !g.has_edge(EdgeRef::listening(w, v)) {
            dead.insert((v, w));
        }
    };
    for v in 0..g.n() {
        for w in (0..g.n()).filter(|&w| w != v) {
            mark(&g, &mut dead, v, w);
        }
    }
    for ev in &trace.events {
        let key = pair_key(ev.edge);
        match ev.action {
            EventAction::Added => {
                if dead.contains(&key) {
                    return Some(ev);
                }
                g.add_edge(ev.edge).ok()?;
            }
            EventAction::Removed => {
                g.remove_edge(ev.edge).ok()?;
                mark(&g, &mut dead, key.0, key.1);
            }
            EventAction::NoOp => {}
        }
    }
    None
}

/// Whether `potential_after` never increases from one event to the next
/// (the initial potential counts as the first value).
pub fn potential_non_increasing(trace: &DynamicsTrace) -> bool {
    let Ok(mut last) = utility::potential(&trace.initial_graph) else { return true };
    for ev in &trace.events {
        match ev.potential_after {
            Some(p) if p <= last => last = p,
            _ => return false,
        }
    }
    true
}

/// Tabular trace: `#` header lines with the full configuration, then one
/// comma-separated row per mutation.
pub fn trace_table(trace: &DynamicsTrace) -> String {
    let mut out = String::new();
    let cfg = &trace.config;
    let p = &trace.params;
    let _ = writeln!(out, "# format={TRACE_FORMAT}");
    let _ = writeln!(out, "# tool=netform {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# generator={}", trace.generator);
    let _ = writeln!(out, "# seed={}", cfg.seed);
    let _ = writeln!(
        out,
        "# variant={}",
        match cfg.variant {
            Variant::Edge => "edge",
            Variant::Vertex => "vertex",
        }
    );
    if cfg.variant == Variant::Vertex {
        let _ = writeln!(
            out,
            "# vertex_rule={}",
            match cfg.vertex_rule {
                VertexRule::Simultaneous => "simultaneous",
                VertexRule::SequentialGreedy => "sequential-greedy",
            }
        );
    }
    let _ = writeln!(out, "# max_rounds={}", cfg.max_rounds);
    let _ = writeln!(out, "# stability_scan_interval={}", cfg.scan_interval(&trace.initial_graph));
    let _ = writeln!(out, "# c_s={} c_l={} k={}", format_rational(&p.c_speak), format_rational(&p.c_listen), p.horizon);
    let _ = write!(out, "# initial_graph={}", GraphDocument::from_graph(&trace.initial_graph).to_json());
    let _ = writeln!(
        out,
        "# converged={} rounds_used={} mutations={}",
        trace.converged,
        trace.rounds_used,
        trace.events.len()
    );
    out.push_str("round,layer,tail,head,action,welfare_after,potential_after\n");
    for ev in &trace.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            ev.round,
            ev.edge.layer,
            ev.edge.tail,
            ev.edge.head,
            ev.action.as_str(),
            format_rational(&ev.welfare_after),
            ev.potential_after.map(|v| v.to_string()).unwrap_or_default()
        );
    }
    out
}
