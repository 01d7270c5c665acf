use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use netform::analysis::{self, clustering_local, AnalysisOptions, DEFAULT_CENSUS_BUDGET};
use netform::constructors::{make_balanced_flower, make_complete, make_cycle, make_empty, make_kautz, make_random};
use netform::converge::converge_path;
use netform::dynamics::{run_dynamics, trace_table, DynamicsConfig, Variant};
use netform::params::{format_rational, rational_to_f64};
use netform::utility::welfare;
use netform::{BidirectedGraph, EdgeAction, Horizon, Mode, ModelParams};
use serde::Serialize;
use serde_json::json;

use crate::args::{AnalyzeArgs, CensusArgs, ConvergeArgs, DynamicsArgs, GenerateArgs, GraphKind, ModeArg};
use crate::artifact::{provenance, read_graph, resolve_seed, write_document, write_graph, write_text};
use crate::Status;

fn need<T: Copy>(value: Option<T>, flag: &str, kind: GraphKind) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for --type {}", format!("{kind:?}").to_lowercase()))
}

fn diameter_text(g: &BidirectedGraph) -> String {
    analysis::diameter(g).map_or_else(|| "inf".to_string(), |d| d.to_string())
}

#[derive(Serialize)]
struct GenerateConfig {
    #[serde(rename = "type")]
    kind: GraphKind,
    n: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    #[serde(rename = "D")]
    diam: Option<usize>,
    mode: ModeArg,
    p: Option<f64>,
    seed: Option<u64>,
}

pub fn generate(a: &GenerateArgs) -> Result<Status> {
    let mode = Mode::from(a.mode);
    let kind = a.kind;
    let mut config = GenerateConfig { kind, n: a.n, k: a.k, d: a.d, diam: a.diam, mode: a.mode, p: a.p, seed: None };
    let g = match kind {
        GraphKind::Empty => make_empty(need(a.n, "n", kind)?, mode)?,
        GraphKind::Cycle => make_cycle(need(a.n, "n", kind)?, mode)?,
        GraphKind::Complete => make_complete(need(a.n, "n", kind)?, mode)?,
        GraphKind::Flower => make_balanced_flower(need(a.n, "n", kind)?, need(a.k, "k", kind)?, mode)?,
        GraphKind::Kautz => make_kautz(need(a.d, "d", kind)?, need(a.diam, "D", kind)?, mode)?,
        GraphKind::Random => {
            let seed = resolve_seed(a.seed);
            config.seed = Some(seed);
            make_random(need(a.n, "n", kind)?, mode, need(a.p, "p", kind)?, seed)?
        }
    };
    write_graph(&a.out, &g, provenance("generate", &config)?)?;
    println!(
        "n={} speaking_edges={} listening_edges={} diameter={} -> {}",
        g.n(),
        g.speaking_count(),
        g.listening_count(),
        diameter_text(&g),
        a.out.display()
    );
    Ok(Status::Done)
}

#[derive(Serialize)]
struct DynamicsEcho<'a> {
    graph: String,
    params: ModelParams,
    dynamics: &'a DynamicsConfig,
    trace: String,
    #[serde(rename = "final")]
    final_graph: String,
}

pub fn dynamics(a: &DynamicsArgs) -> Result<Status> {
    let g = read_graph(&a.graph)?;
    let p = a.params.resolve(g.mode())?;
    let cfg = DynamicsConfig {
        seed: resolve_seed(a.seed),
        max_rounds: a.max_rounds,
        variant: a.variant.into(),
        stability_scan_interval: a.scan_interval,
        vertex_rule: a.vertex_rule.into(),
    };
    if g.mode() == Mode::Directed && !p.horizon.is_infinite() && cfg.variant == Variant::Edge {
        eprintln!("warning: convergence of directed edge dynamics is only proven for k = inf");
    }
    let echo = DynamicsEcho {
        graph: a.graph.display().to_string(),
        params: p,
        dynamics: &cfg,
        trace: a.trace.display().to_string(),
        final_graph: a.final_graph.display().to_string(),
    };
    let prov = provenance("dynamics", &echo)?;
    let trace = run_dynamics(&g, &p, &cfg)?;

    let table = trace_table(&trace);
    let (first, rest) = table.split_once('\n').expect("trace table has a header");
    write_text(&a.trace, &format!("{first}\n# provenance={prov}\n{rest}"))?;
    let mut final_prov = prov;
    final_prov["result"] = json!({
        "converged": trace.converged,
        "rounds_used": trace.rounds_used,
        "mutations": trace.events.len(),
    });
    write_graph(&a.final_graph, &trace.final_graph, final_prov)?;

    let w = welfare(&trace.final_graph, &p)?;
    println!(
        "{} after {} rounds, {} mutations, final welfare {} -> {}, {}",
        if trace.converged { "converged" } else { "not converged" },
        trace.rounds_used,
        trace.events.len(),
        format_rational(&w),
        a.trace.display(),
        a.final_graph.display()
    );
    Ok(if trace.converged { Status::Done } else { Status::NotConverged })
}

#[derive(Serialize)]
struct AnalyzeEcho {
    graph: String,
    params: ModelParams,
    options: AnalysisOptions,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Status> {
    let g = read_graph(&a.graph)?;
    let p = a.params.resolve(g.mode())?;
    let options = AnalysisOptions { nash: a.nash, strategy_budget: a.budget, clustering_dim: a.clustering_dim };
    let report = analysis::analyze(&g, &p, &options)?;
    let prov = provenance("analyze", &AnalyzeEcho { graph: a.graph.display().to_string(), params: p, options })?;

    if let Some(path) = &a.clustering_csv {
        let mut out = format!("# provenance={prov}\nscope,vertex,dimension,value,approx\n");
        for (i, v) in report.clustering_global.iter().enumerate() {
            let _ = writeln!(out, "global,,{},{},{}", i + 1, format_rational(v), rational_to_f64(v));
        }
        for vertex in 0..g.n() {
            for (i, v) in clustering_local(&g, vertex, a.clustering_dim)?.iter().enumerate() {
                let _ = writeln!(out, "local,{vertex},{},{},{}", i + 1, format_rational(v), rational_to_f64(v));
            }
        }
        write_text(path, &out)?;
    }
    write_document(&a.out, "netform-report/1", prov, &report)?;

    let yes_no = |b: Option<bool>| b.map_or("n/a", |b| if b { "yes" } else { "no" });
    println!(
        "edge_stable={} nash={} bi_pairwise={} welfare={} symmetric={} diameter={} -> {}",
        report.edge_stable,
        if a.nash { yes_no(report.nash_stable) } else { "not-computed" },
        yes_no(report.bi_pairwise_stable),
        format_rational(&report.welfare),
        report.symmetric,
        diameter_text(&g),
        a.out.display()
    );
    Ok(Status::Done)
}

#[derive(Serialize)]
struct CensusEcho {
    n: usize,
    mode: ModeArg,
    params: ModelParams,
    notion: netform::analysis::StabilityNotion,
    budget: u128,
}

pub fn census(a: &CensusArgs) -> Result<Status> {
    let mode = Mode::from(a.mode);
    let p = a.params.resolve(mode)?;
    let budget = a.budget.unwrap_or(DEFAULT_CENSUS_BUDGET);
    let census = analysis::enumerate_all(a.n, &p, mode, a.notion.into(), budget)?;
    let prov = provenance("census", &CensusEcho { n: a.n, mode: a.mode, params: p, notion: a.notion.into(), budget })?;
    write_document(&a.out, "netform-census/1", prov, &census)?;
    let opt = |r: Option<netform::Rational>| r.map_or_else(|| "undefined".to_string(), |r| format_rational(&r));
    println!(
        "visited={} stable={} max_welfare={} efficient={} ({} classes) poa={} pos={} -> {}",
        census.graphs_visited,
        census.stable_graphs.len(),
        format_rational(&census.max_welfare),
        census.efficient_graphs.len(),
        census.efficient_classes,
        opt(census.poa),
        opt(census.pos),
        a.out.display()
    );
    Ok(Status::Done)
}

#[derive(Serialize)]
struct ConvergeEcho {
    graph: String,
    params: ModelParams,
}

pub fn converge(a: &ConvergeArgs) -> Result<Status> {
    let g = read_graph(&a.graph)?;
    if g.mode() != Mode::Directed {
        bail!("converge-path needs a directed graph");
    }
    let p = ModelParams::directed(a.c_speak, Horizon::Infinite)?;
    let path = converge_path(&g, &p)?;
    let prov = provenance("converge-path", &ConvergeEcho { graph: a.graph.display().to_string(), params: p })?;
    let mut out = format!("# provenance={prov}\nindex,step,action,layer,tail,head\n");
    for (i, m) in path.moves.iter().enumerate() {
        let action = match m.action {
            EdgeAction::Add => "added",
            EdgeAction::Remove => "removed",
        };
        let _ = writeln!(out, "{},{},{action},{},{},{}", i + 1, m.step, m.edge.layer, m.edge.tail, m.edge.head);
    }
    write_text(&a.out, &out)?;
    write_graph(&a.final_graph, &path.final_graph, prov)?;
    println!(
        "{} moves, final welfare {} -> {}, {}",
        path.moves.len(),
        format_rational(&welfare(&path.final_graph, &p)?),
        a.out.display(),
        a.final_graph.display()
    );
    Ok(Status::Done)
}
