use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use netform::analysis::StabilityNotion;
use netform::dynamics::{Variant, VertexRule};
use netform::params::parse_rational;
use netform::{Horizon, Mode, ModelParams, Rational};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Directed,
    Bidirected,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Directed => Mode::Directed,
            ModeArg::Bidirected => Mode::Bidirected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Empty,
    Cycle,
    Complete,
    Flower,
    Kautz,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Edge,
    Vertex,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Edge => Variant::Edge,
            VariantArg::Vertex => Variant::Vertex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VertexRuleArg {
    Simultaneous,
    SequentialGreedy,
}

impl From<VertexRuleArg> for VertexRule {
    fn from(v: VertexRuleArg) -> Self {
        match v {
            VertexRuleArg::Simultaneous => VertexRule::Simultaneous,
            VertexRuleArg::SequentialGreedy => VertexRule::SequentialGreedy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NotionArg {
    Edge,
    Nash,
    BiPairwise,
}

impl From<NotionArg> for StabilityNotion {
    fn from(n: NotionArg) -> Self {
        match n {
            NotionArg::Edge => StabilityNotion::Edge,
            NotionArg::Nash => StabilityNotion::Nash,
            NotionArg::BiPairwise => StabilityNotion::BiPairwise,
        }
    }
}

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

pub fn horizon_arg(s: &str) -> Result<Horizon, String> {
    s.parse::<Horizon>().map_err(|e| e.to_string())
}

/// Costs and horizon shared by most subcommands.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Speaking edge cost, e.g. `3/2` or `0.7`.
    #[arg(long = "cs", value_parser = rational_arg)]
    pub c_speak: Rational,
    /// Listening edge cost; defaults to 0 in directed mode and to the
    /// speaking cost in bidirected mode.
    #[arg(long = "cl", value_parser = rational_arg)]
    pub c_listen: Option<Rational>,
    /// Horizon: a positive integer or `inf`.
    #[arg(long = "k", value_parser = horizon_arg)]
    pub horizon: Horizon,
}

impl ParamArgs {
    pub fn resolve(&self, mode: Mode) -> Result<ModelParams> {
        let c_listen = self.c_listen.unwrap_or(match mode {
            Mode::Directed => Rational::from_integer(0),
            Mode::Bidirected => self.c_speak,
        });
        let p = ModelParams::new(self.c_speak, c_listen, self.horizon)?;
        p.check_mode(mode).context("parameters do not fit the graph mode")?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long = "type", value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Horizon the flower is built for.
    #[arg(long)]
    pub k: Option<usize>,
    /// Kautz out-degree.
    #[arg(long)]
    pub d: Option<usize>,
    /// Kautz diameter (label length).
    #[arg(long = "D")]
    pub diam: Option<usize>,
    #[arg(long, value_enum, default_value = "directed")]
    pub mode: ModeArg,
    /// Edge probability for random graphs.
    #[arg(long)]
    pub p: Option<f64>,
    /// Seed for random graphs; drawn from entropy and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "graph.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Drawn from entropy and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_rounds: u64,
    #[arg(long, value_enum, default_value = "edge")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "simultaneous")]
    pub vertex_rule: VertexRuleArg,
    /// No-op rounds between full stability scans (default: 2n(n-1)).
    #[arg(long)]
    pub scan_interval: Option<u64>,
    #[arg(long, default_value = "trace.csv")]
    pub trace: PathBuf,
    #[arg(long = "final", default_value = "final.json")]
    pub final_graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also run the exhaustive best-response (Nash) check.
    #[arg(long)]
    pub nash: bool,
    /// Joint strategies per agent the Nash check may enumerate.
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long, default_value_t = 1)]
    pub clustering_dim: usize,
    #[arg(long, short, default_value = "report.json")]
    pub out: PathBuf,
    /// Also write global and per-vertex clustering rows as CSV.
    #[arg(long)]
    pub clustering_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "directed")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "edge")]
    pub notion: NotionArg,
    /// Largest number of labeled graphs to visit.
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long, short, default_value = "census.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, short, default_value = "batch.csv")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Speaking edge cost.
    #[arg(long = "cs", value_parser = rational_arg)]
    pub c_speak: Rational,
    #[arg(long, short, default_value = "moves.csv")]
    pub out: PathBuf,
    #[arg(long = "final", default_value = "final.json")]
    pub final_graph: PathBuf,
}
