use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use netform::io::GraphDocument;
use netform::BidirectedGraph;
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "netform";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tool, version, command and fully resolved configuration.
pub fn provenance(command: &str, config: &impl Serialize) -> Result<Value> {
    Ok(json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "config": serde_json::to_value(config)?,
    }))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_graph(path: &Path, g: &BidirectedGraph, provenance: Value) -> Result<()> {
    write_text(path, &GraphDocument::from_graph(g).with_provenance(provenance).to_json())
}

/// A JSON document `{"format": .., "provenance": .., <body fields>}`.
pub fn write_document(path: &Path, format: &str, provenance: Value, body: &impl Serialize) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("format".into(), Value::from(format));
    doc.insert("provenance".into(), provenance);
    match serde_json::to_value(body)? {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("body".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_graph(path: &Path) -> Result<BidirectedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    netform::io::decode(&text).with_context(|| format!("invalid graph document {}", path.display()))
}

/// Seed from the flag, or a fresh one from the OS, announced on stderr.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("note: no --seed given, using seed {s}");
        s
    })
}
