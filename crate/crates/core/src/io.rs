//! Graph documents: a single-line JSON object
//!
//! ```text
//! {"format":"netform-graph/1","n":3,"mode":"directed","speaking":[[0,1],[1,2],[2,0]],"listening":[]}
//! ```
//!
//! Edge lists are sorted, so equal graphs encode to identical bytes. An
//! optional `provenance` object records the tool and configuration that
//! produced the file; it does not affect the decoded graph.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{BidirectedGraph, EdgeRef, Mode};

pub const GRAPH_FORMAT: &str = "netform-graph/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub format: String,
    pub n: usize,
    pub mode: Mode,
    pub speaking: Vec<[usize; 2]>,
    pub listening: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

impl GraphDocument {
    pub fn from_graph(g: &BidirectedGraph) -> Self {
        Self {
            format: GRAPH_FORMAT.to_string(),
            n: g.n(),
            mode: g.mode(),
            speaking: g.speaking_edges().map(|(u, v)| [u, v]).collect(),
            listening: g.listening_edges().map(|(u, v)| [u, v]).collect(),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Value) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn to_graph(&self) -> Result<BidirectedGraph> {
        if self.format != GRAPH_FORMAT {
            return Err(Error::Document(format!("unsupported format `{}`, expected `{GRAPH_FORMAT}`", self.format)));
        }
        if self.mode == Mode::Directed && !self.listening.is_empty() {
            return Err(Error::ListeningInDirectedMode);
        }
        let mut g = BidirectedGraph::new(self.n, self.mode)?;
        for &[u, v] in &self.speaking {
            if !g.add_edge(EdgeRef::speaking(u, v))? {
                return Err(Error::Document(format!("duplicate speaking edge [{u},{v}]")));
            }
        }
        for &[u, v] in &self.listening {
            if !g.add_edge(EdgeRef::listening(u, v))? {
                return Err(Error::Document(format!("duplicate listening edge [{u},{v}]")));
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("graph document serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}

/// Canonical document bytes for `g`.
pub fn encode(g: &BidirectedGraph) -> String {
    GraphDocument::from_graph(g).to_json()
}

pub fn decode(text: &str) -> Result<BidirectedGraph> {
    GraphDocument::parse(text)?.to_graph()
}
