//! Batch runner: seeded dynamics trials from a TOML file.
//!
//! ```toml
//! seeds = [1, 2, 3]          # one trial per seed, using [defaults]
//!
//! [defaults]
//! n = 6
//! mode = "bidirected"
//! density = 0.4
//! c_s = "7/10"
//! k = 3
//!
//! [[trial]]
//! seed = 9
//! variant = "vertex"
//! ```
//!
//! Every trial needs a seed. A relative `graph` path is taken from the
//! config file's directory. Output rows keep trial order whatever the
//! thread count.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use netform::constructors::make_random;
use netform::dynamics::{run_dynamics, DynamicsConfig, Variant, VertexRule};
use netform::params::{format_rational, parse_rational};
use netform::utility::welfare;
use netform::{Horizon, Mode, ModelParams, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::BatchArgs;
use crate::artifact::{provenance, read_graph, VERSION};
use crate::Status;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<Rational> {
        Ok(match self {
            Number::Int(v) => Rational::from_integer(*v),
            Number::Float(v) => parse_rational(&v.to_string())?,
            Number::Text(s) => parse_rational(s)?,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TrialSpec {
    seed: Option<u64>,
    /// Seed of the random start graph; defaults to `seed`.
    graph_seed: Option<u64>,
    /// Start from this graph file instead of a random graph.
    graph: Option<PathBuf>,
    n: Option<usize>,
    mode: Option<Mode>,
    density: Option<f64>,
    c_s: Option<Number>,
    c_l: Option<Number>,
    k: Option<Horizon>,
    variant: Option<Variant>,
    vertex_rule: Option<VertexRule>,
    max_rounds: Option<u64>,
    scan_interval: Option<u64>,
}

impl TrialSpec {
    fn over(self, base: &TrialSpec) -> TrialSpec {
        let b = base.clone();
        TrialSpec {
            seed: self.seed.or(b.seed),
            graph_seed: self.graph_seed.or(b.graph_seed),
            graph: self.graph.or(b.graph),
            n: self.n.or(b.n),
            mode: self.mode.or(b.mode),
            density: self.density.or(b.density),
            c_s: self.c_s.or(b.c_s),
            c_l: self.c_l.or(b.c_l),
            k: self.k.or(b.k),
            variant: self.variant.or(b.variant),
            vertex_rule: self.vertex_rule.or(b.vertex_rule),
            max_rounds: self.max_rounds.or(b.max_rounds),
            scan_interval: self.scan_interval.or(b.scan_interval),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchFile {
    #[serde(default)]
    seeds: Vec<u64>,
    #[serde(default)]
    defaults: TrialSpec,
    #[serde(default)]
    trial: Vec<TrialSpec>,
}

/// A trial with every field settled.
#[derive(Debug, Clone, Serialize)]
struct Trial {
    index: usize,
    graph: Option<PathBuf>,
    graph_seed: u64,
    n: Option<usize>,
    mode: Mode,
    density: f64,
    params: ModelParams,
    dynamics: DynamicsConfig,
}

fn resolve(index: usize, spec: TrialSpec) -> Result<Trial> {
    let seed = spec.seed.context("every trial needs a seed")?;
    let mode = match (&spec.graph, spec.mode) {
        (Some(path), _) => read_graph(path)?.mode(),
        (None, Some(mode)) => mode,
        (None, None) => bail!("mode is required for random start graphs"),
    };
    if spec.graph.is_none() && spec.n.is_none() {
        bail!("n is required for random start graphs");
    }
    let c_s = spec.c_s.as_ref().context("c_s is required")?.rational()?;
    let c_l = match (&spec.c_l, mode) {
        (Some(c), _) => c.rational()?,
        (None, Mode::Directed) => Rational::from_integer(0),
        (None, Mode::Bidirected) => c_s,
    };
    let params = ModelParams::new(c_s, c_l, spec.k.context("k is required")?)?;
    params.check_mode(mode)?;
    let dynamics = DynamicsConfig {
        seed,
        max_rounds: spec.max_rounds.unwrap_or(1_000_000),
        variant: spec.variant.unwrap_or(Variant::Edge),
        stability_scan_interval: spec.scan_interval,
        vertex_rule: spec.vertex_rule.unwrap_or_default(),
    };
    dynamics.validate()?;
    Ok(Trial {
        index,
        graph: spec.graph,
        graph_seed: spec.graph_seed.unwrap_or(seed),
        n: spec.n,
        mode,
        density: spec.density.unwrap_or(0.4),
        params,
        dynamics,
    })
}

struct Outcome {
    n: usize,
    converged: bool,
    rounds_used: u64,
    mutations: usize,
    welfare: Rational,
    edges: usize,
}

fn run_trial(t: &Trial) -> Result<Outcome> {
    let start = match &t.graph {
        Some(path) => read_graph(path)?,
        None => make_random(t.n.expect("resolved"), t.mode, t.density, t.graph_seed)?,
    };
    let trace = run_dynamics(&start, &t.params, &t.dynamics)?;
    Ok(Outcome {
        n: start.n(),
        converged: trace.converged,
        rounds_used: trace.rounds_used,
        mutations: trace.events.len(),
        welfare: welfare(&trace.final_graph, &t.params)?,
        edges: trace.final_graph.edge_count(),
    })
}

const COLUMNS: [&str; 18] = [
    "kind",
    "trial",
    "seed",
    "graph_seed",
    "n",
    "mode",
    "c_s",
    "c_l",
    "k",
    "variant",
    "converged",
    "rounds_used",
    "mutations",
    "final_welfare",
    "final_edges",
    "message",
    "metric",
    "value",
];

#[derive(Default)]
struct Row {
    cells: BTreeMap<&'static str, String>,
}

impl Row {
    fn set(mut self, column: &'static str, value: impl ToString) -> Self {
        debug_assert!(COLUMNS.contains(&column));
        self.cells.insert(column, value.to_string());
        self
    }

    fn record(&self) -> Vec<String> {
        COLUMNS.iter().map(|c| self.cells.get(c).cloned().unwrap_or_default()).collect()
    }
}

fn aggregate(kind_rows: &mut Vec<Row>, outcomes: &[(usize, &Outcome)], trials: usize, errors: usize) {
    let metric =
        |name: &str, value: String| Row::default().set("kind", "aggregate").set("metric", name).set("value", value);
    kind_rows.push(metric("trials", trials.to_string()));
    kind_rows.push(metric("errors", errors.to_string()));
    let converged = outcomes.iter().filter(|(_, o)| o.converged).count();
    kind_rows.push(metric("converged", converged.to_string()));
    if trials > 0 {
        let frac = Rational::new(converged as i64, trials as i64);
        kind_rows.push(metric("convergence_fraction", format_rational(&frac)));
    }
    if outcomes.is_empty() {
        return;
    }
    let count = Rational::from_integer(outcomes.len() as i64);
    let rounds: Rational = outcomes.iter().map(|(_, o)| Rational::from_integer(o.rounds_used as i64)).sum();
    kind_rows.push(metric("mean_rounds", format_rational(&(rounds / count))));
    let welfare = || outcomes.iter().map(|(_, o)| o.welfare);
    kind_rows.push(metric("welfare_min", format_rational(&welfare().min().expect("nonempty"))));
    kind_rows.push(metric("welfare_mean", format_rational(&(welfare().sum::<Rational>() / count))));
    kind_rows.push(metric("welfare_max", format_rational(&welfare().max().expect("nonempty"))));
}

pub fn run(a: &BatchArgs) -> Result<Status> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let file: BatchFile =
        toml::from_str(&text).with_context(|| format!("invalid batch config {}", a.config.display()))?;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let specs = file
        .seeds
        .iter()
        .map(|&seed| TrialSpec { seed: Some(seed), ..TrialSpec::default() })
        .chain(file.trial)
        .map(|spec| spec.over(&file.defaults))
        .map(|mut spec| {
            spec.graph = spec.graph.map(|g| base.join(g));
            spec
        });
    let trials: Vec<Trial> =
        specs.enumerate().map(|(i, s)| resolve(i, s).with_context(|| format!("trial {i}"))).collect::<Result<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.threads.unwrap_or(0)).build()?;
    let results: Vec<Result<Outcome, String>> =
        pool.install(|| trials.par_iter().map(|t| run_trial(t).map_err(|e| format!("{e:#}"))).collect());

    let mut rows = Vec::new();
    let mut first_use: BTreeMap<u64, usize> = BTreeMap::new();
    for t in &trials {
        if let Some(&earlier) = first_use.get(&t.dynamics.seed) {
            rows.push(
                Row::default()
                    .set("kind", "warning")
                    .set("trial", t.index)
                    .set("seed", t.dynamics.seed)
                    .set("message", format!("duplicate seed, also used by trial {earlier}")),
            );
        } else {
            first_use.insert(t.dynamics.seed, t.index);
        }
    }
    for (t, result) in trials.iter().zip(&results) {
        let mut row = Row::default()
            .set("kind", "trial")
            .set("trial", t.index)
            .set("seed", t.dynamics.seed)
            .set("graph_seed", t.graph_seed)
            .set("mode", t.mode)
            .set("c_s", format_rational(&t.params.c_speak))
            .set("c_l", format_rational(&t.params.c_listen))
            .set("k", t.params.horizon)
            .set(
                "variant",
                match t.dynamics.variant {
                    Variant::Edge => "edge",
                    Variant::Vertex => "vertex",
                },
            );
        row = match result {
            Ok(o) => row
                .set("n", o.n)
                .set("converged", o.converged)
                .set("rounds_used", o.rounds_used)
                .set("mutations", o.mutations)
                .set("final_welfare", format_rational(&o.welfare))
                .set("final_edges", o.edges),
            Err(e) => row.set("message", format!("error: {e}")),
        };
        rows.push(row);
    }
    let ok: Vec<(usize, &Outcome)> =
        results.iter().enumerate().filter_map(|(i, r)| r.as_ref().ok().map(|o| (i, o))).collect();
    let errors = results.len() - ok.len();
    aggregate(&mut rows, &ok, trials.len(), errors);

    let prov = provenance("batch", &serde_json::json!({ "config": a.config.display().to_string(), "trials": trials }))?;
    let mut out = format!("# tool=netform {VERSION}\n# provenance={prov}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(COLUMNS)?;
        for row in &rows {
            w.write_record(row.record())?;
        }
        w.flush()?;
    }
    fs::write(&a.out, out).with_context(|| format!("cannot write {}", a.out.display()))?;

    let converged = ok.iter().filter(|(_, o)| o.converged).count();
    println!("{} trials, {} converged, {} errors -> {}", trials.len(), converged, errors, a.out.display());
    Ok(Status::Done)
}
