//! Python bindings for the network formation engine.

use netform::analysis::{self, StabilityNotion};
use netform::constructors;
use netform::converge;
use netform::dynamics::{self, DynamicsConfig, Variant, VertexRule};
use netform::params::parse_rational;
use netform::utility::{self as util, EdgeStatus};
use netform::{BidirectedGraph, EdgeAction, EdgeRef, Horizon, Layer, Mode, ModelParams, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "directed" => Ok(Mode::Directed),
        "bidirected" => Ok(Mode::Bidirected),
        other => Err(err(format!("unknown mode {other:?}, expected \"directed\" or \"bidirected\""))),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Directed => "directed",
        Mode::Bidirected => "bidirected",
    }
}

fn parse_layer(layer: &str) -> PyResult<Layer> {
    match layer {
        "speaking" | "s" => Ok(Layer::Speaking),
        "listening" | "l" => Ok(Layer::Listening),
        other => Err(err(format!("unknown layer {other:?}, expected \"speaking\" or \"listening\""))),
    }
}

fn layer_name(layer: Layer) -> &'static str {
    match layer {
        Layer::Speaking => "speaking",
        Layer::Listening => "listening",
    }
}

/// Accepts `int`, `float`, `str` ("3/2", "0.7") or `fractions.Fraction`.
fn to_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(i) = value.extract::<i64>() {
        return Ok(Rational::from_integer(i));
    }
    if let Ok(s) = value.extract::<String>() {
        return parse_rational(&s).map_err(err);
    }
    if value.hasattr("numerator")? && value.hasattr("denominator")? {
        let num: i64 = value.getattr("numerator")?.extract()?;
        let den: i64 = value.getattr("denominator")?.extract()?;
        if den == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Ok(f) = value.extract::<f64>() {
        return parse_rational(&f.to_string()).map_err(err);
    }
    Err(err("expected an int, float, str or Fraction"))
}

fn to_horizon(value: &Bound<'_, PyAny>) -> PyResult<Horizon> {
    if let Ok(k) = value.extract::<u32>() {
        return format!("{k}").parse().map_err(err);
    }
    if let Ok(f) = value.extract::<f64>() {
        if f.is_infinite() && f > 0.0 {
            return Ok(Horizon::Infinite);
        }
    }
    value.extract::<String>()?.parse().map_err(err)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(fields) => {
            let dict = PyDict::new(py);
            for (k, item) in fields {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn edge(layer: &str, tail: usize, head: usize) -> PyResult<EdgeRef> {
    Ok(EdgeRef { layer: parse_layer(layer)?, tail, head })
}

/// Speaking/listening network on vertices `0..n`.
#[pyclass(name = "Graph", module = "netform_py", eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyGraph {
    inner: BidirectedGraph,
}

impl From<BidirectedGraph> for PyGraph {
    fn from(inner: BidirectedGraph) -> Self {
        PyGraph { inner }
    }
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, mode = "directed"))]
    fn new(n: usize, mode: &str) -> PyResult<Self> {
        Ok(BidirectedGraph::new(n, parse_mode(mode)?).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (n, mode = "directed"))]
    fn empty(n: usize, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_empty(n, parse_mode(mode)?).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (n, mode = "directed"))]
    fn cycle(n: usize, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_cycle(n, parse_mode(mode)?).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (n, mode = "directed"))]
    fn complete(n: usize, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_complete(n, parse_mode(mode)?).map_err(err)?.into())
    }

    /// Balanced flower on `n` vertices with diameter at most `k`.
    #[staticmethod]
    #[pyo3(signature = (n, k, mode = "directed"))]
    fn flower(n: usize, k: usize, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_balanced_flower(n, k, parse_mode(mode)?).map_err(err)?.into())
    }

    /// Kautz graph K(d, D).
    #[staticmethod]
    #[pyo3(signature = (d, diam, mode = "directed"))]
    fn kautz(d: usize, diam: usize, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_kautz(d, diam, parse_mode(mode)?).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (n, p, seed, mode = "directed"))]
    fn random(n: usize, p: f64, seed: u64, mode: &str) -> PyResult<Self> {
        Ok(constructors::make_random(n, parse_mode(mode)?, p, seed).map_err(err)?.into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(netform::io::decode(text).map_err(err)?.into())
    }

    fn to_json(&self) -> String {
        netform::io::encode(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        mode_name(self.inner.mode())
    }

    #[pyo3(signature = (tail, head, layer = "speaking"))]
    fn add_edge(&mut self, tail: usize, head: usize, layer: &str) -> PyResult<bool> {
        self.inner.add_edge(edge(layer, tail, head)?).map_err(err)
    }

    #[pyo3(signature = (tail, head, layer = "speaking"))]
    fn remove_edge(&mut self, tail: usize, head: usize, layer: &str) -> PyResult<bool> {
        self.inner.remove_edge(edge(layer, tail, head)?).map_err(err)
    }

    #[pyo3(signature = (tail, head, layer = "speaking"))]
    fn has_edge(&self, tail: usize, head: usize, layer: &str) -> PyResult<bool> {
        Ok(self.inner.has_edge(edge(layer, tail, head)?))
    }

    fn speaking_edges(&self) -> Vec<(usize, usize)> {
        self.inner.speaking_edges().collect()
    }

    fn listening_edges(&self) -> Vec<(usize, usize)> {
        self.inner.listening_edges().collect()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Longest shortest complete-hop path, or `None` when some pair is
    /// unreachable.
    fn diameter(&self) -> Option<usize> {
        analysis::diameter(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, mode={}, speaking={}, listening={})",
            self.inner.n(),
            mode_name(self.inner.mode()),
            self.inner.speaking_count(),
            self.inner.listening_count()
        )
    }
}

/// Edge costs and horizon.
#[pyclass(name = "Params", module = "netform_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: ModelParams,
}

#[pymethods]
impl PyParams {
    /// `c_l` defaults to 0 when `mode` is directed and to `c_s` otherwise;
    /// `k` is a positive int or `"inf"`.
    #[new]
    #[pyo3(signature = (c_s, k, c_l = None, mode = "directed"))]
    fn new(c_s: &Bound<'_, PyAny>, k: &Bound<'_, PyAny>, c_l: Option<&Bound<'_, PyAny>>, mode: &str) -> PyResult<Self> {
        let mode = parse_mode(mode)?;
        let c_speak = to_rational(c_s)?;
        let c_listen = match (c_l, mode) {
            (Some(c), _) => to_rational(c)?,
            (None, Mode::Directed) => Rational::from_integer(0),
            (None, Mode::Bidirected) => c_speak,
        };
        let inner = ModelParams::new(c_speak, c_listen, to_horizon(k)?).map_err(err)?;
        inner.check_mode(mode).map_err(err)?;
        Ok(PyParams { inner })
    }

    #[getter]
    fn c_s<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.c_speak)
    }

    #[getter]
    fn c_l<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.c_listen)
    }

    /// Horizon as an int, or `None` when unbounded.
    #[getter]
    fn k(&self) -> Option<usize> {
        self.inner.horizon.depth_limit()
    }

    fn __repr__(&self) -> String {
        format!("Params(c_s={}, c_l={}, k={})", self.inner.c_speak, self.inner.c_listen, self.inner.horizon)
    }
}

#[pyfunction]
fn utility<'py>(py: Python<'py>, g: &PyGraph, p: &PyParams, v: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &util::utility(&g.inner, &p.inner, v).map_err(err)?.u_total)
}

#[pyfunction]
fn utilities<'py>(py: Python<'py>, g: &PyGraph, p: &PyParams) -> PyResult<Vec<Bound<'py, PyAny>>> {
    util::utilities(&g.inner, &p.inner).map_err(err)?.iter().map(|u| fraction(py, u)).collect()
}

#[pyfunction]
fn welfare<'py>(py: Python<'py>, g: &PyGraph, p: &PyParams) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &util::welfare(&g.inner, &p.inner).map_err(err)?)
}

/// One of "addable", "removable", "neutral-present", "neutral-absent".
#[pyfunction]
#[pyo3(signature = (g, p, tail, head, layer = "speaking"))]
fn edge_status(g: &PyGraph, p: &PyParams, tail: usize, head: usize, layer: &str) -> PyResult<&'static str> {
    Ok(match util::edge_status(&g.inner, &p.inner, edge(layer, tail, head)?).map_err(err)? {
        EdgeStatus::Addable => "addable",
        EdgeStatus::Removable => "removable",
        EdgeStatus::NeutralPresent => "neutral-present",
        EdgeStatus::NeutralAbsent => "neutral-absent",
    })
}

#[pyfunction]
fn is_edge_stable(g: &PyGraph, p: &PyParams) -> PyResult<bool> {
    analysis::is_edge_stable(&g.inner, &p.inner).map_err(err)
}

/// Exhaustive best-response check; `budget` bounds strategies per agent.
#[pyfunction]
#[pyo3(signature = (g, p, budget = None))]
fn is_nash(g: &PyGraph, p: &PyParams, budget: Option<u128>) -> PyResult<bool> {
    let budget = budget.unwrap_or_else(|| analysis::default_strategy_budget(g.inner.mode()));
    analysis::is_nash_bruteforce_with_budget(&g.inner, &p.inner, budget).map_err(err)
}

#[pyfunction]
fn is_bi_pairwise_stable(g: &PyGraph, p: &PyParams) -> PyResult<bool> {
    analysis::is_bi_pairwise_stable(&g.inner, &p.inner).map_err(err)
}

#[pyfunction]
fn is_symmetric(g: &PyGraph, p: &PyParams) -> PyResult<bool> {
    analysis::is_symmetric(&g.inner, &p.inner).map_err(err)
}

/// Generalized clustering coefficients for dimensions `1..=dim`.
#[pyfunction]
#[pyo3(signature = (g, dim = 1))]
fn clustering<'py>(py: Python<'py>, g: &PyGraph, dim: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    analysis::clustering_global(&g.inner, dim).map_err(err)?.iter().map(|c| fraction(py, c)).collect()
}

/// Seeded edge or vertex dynamics. Returns a dict with `converged`,
/// `rounds_used`, `events`, `final_graph` and the tabular `trace`.
#[pyfunction]
#[pyo3(signature = (g, p, seed, max_rounds = 1_000_000, variant = "edge", vertex_rule = "simultaneous"))]
fn run_dynamics<'py>(
    py: Python<'py>,
    g: &PyGraph,
    p: &PyParams,
    seed: u64,
    max_rounds: u64,
    variant: &str,
    vertex_rule: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let variant = match variant {
        "edge" => Variant::Edge,
        "vertex" => Variant::Vertex,
        other => return Err(err(format!("unknown variant {other:?}"))),
    };
    let vertex_rule = match vertex_rule {
        "simultaneous" => VertexRule::Simultaneous,
        "sequential-greedy" => VertexRule::SequentialGreedy,
        other => return Err(err(format!("unknown vertex rule {other:?}"))),
    };
    let cfg = DynamicsConfig { seed, max_rounds, variant, stability_scan_interval: None, vertex_rule };
    let trace = py.detach(|| dynamics::run_dynamics(&g.inner, &p.inner, &cfg)).map_err(err)?;
    let events = PyList::empty(py);
    for ev in &trace.events {
        let action = match ev.action {
            dynamics::EventAction::Added => "added",
            dynamics::EventAction::Removed => "removed",
            dynamics::EventAction::NoOp => "no-op",
        };
        events.append((ev.round, layer_name(ev.edge.layer), ev.edge.tail, ev.edge.head, action))?;
    }
    let out = PyDict::new(py);
    out.set_item("converged", trace.converged)?;
    out.set_item("rounds_used", trace.rounds_used)?;
    out.set_item("events", events)?;
    out.set_item("trace", dynamics::trace_table(&trace))?;
    out.set_item("final_graph", PyGraph::from(trace.final_graph))?;
    Ok(out)
}

/// `(step, action, tail, head)`.
type Move = (u8, &'static str, usize, usize);

/// Constructive path to a stable directed graph at `k = inf`. Returns
/// `(final_graph, moves)` with moves as `(step, action, tail, head)`.
#[pyfunction]
fn converge_path(g: &PyGraph, c_s: &Bound<'_, PyAny>) -> PyResult<(PyGraph, Vec<Move>)> {
    let p = ModelParams::directed(to_rational(c_s)?, Horizon::Infinite).map_err(err)?;
    let path = converge::converge_path(&g.inner, &p).map_err(err)?;
    let moves = path
        .moves
        .iter()
        .map(|m| {
            let action = match m.action {
                EdgeAction::Add => "added",
                EdgeAction::Remove => "removed",
            };
            (m.step, action, m.edge.tail, m.edge.head)
        })
        .collect();
    Ok((path.final_graph.into(), moves))
}

/// Exhaustive census of all labeled graphs on `n` vertices, as a dict.
#[pyfunction]
#[pyo3(signature = (n, p, mode = "directed", notion = "edge", budget = None))]
fn census<'py>(
    py: Python<'py>,
    n: usize,
    p: &PyParams,
    mode: &str,
    notion: &str,
    budget: Option<u128>,
) -> PyResult<Bound<'py, PyAny>> {
    let notion = match notion {
        "edge" => StabilityNotion::Edge,
        "nash" => StabilityNotion::Nash,
        "bi-pairwise" => StabilityNotion::BiPairwise,
        other => return Err(err(format!("unknown notion {other:?}"))),
    };
    let mode = parse_mode(mode)?;
    let budget = budget.unwrap_or(analysis::DEFAULT_CENSUS_BUDGET);
    let params = p.inner;
    let c = py.detach(|| analysis::enumerate_all(n, &params, mode, notion, budget)).map_err(err)?;
    json_to_py(py, &serde_json::to_value(&c).map_err(err)?)
}

#[pymodule]
fn netform_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(utility, m)?)?;
    m.add_function(wrap_pyfunction!(utilities, m)?)?;
    m.add_function(wrap_pyfunction!(welfare, m)?)?;
    m.add_function(wrap_pyfunction!(edge_status, m)?)?;
    m.add_function(wrap_pyfunction!(is_edge_stable, m)?)?;
    m.add_function(wrap_pyfunction!(is_nash, m)?)?;
    m.add_function(wrap_pyfunction!(is_bi_pairwise_stable, m)?)?;
    m.add_function(wrap_pyfunction!(is_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(clustering, m)?)?;
    m.add_function(wrap_pyfunction!(run_dynamics, m)?)?;
    m.add_function(wrap_pyfunction!(converge_path, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    Ok(())
}
