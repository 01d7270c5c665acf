//! Network formation games on bidirected networks.
//!
//! Agents own speaking and listening edges, pay a per-edge cost, and gain
//! one unit for every agent they reach (or are reached by) within a
//! horizon of `k` complete hops. The crate provides the game state
//! ([`BidirectedGraph`]), canonical constructions, exact utility
//! computations, seeded asynchronous dynamics, the constructive
//! convergence path for directed graphs, and stability/efficiency
//! analysis with brute-force oracles.

pub mod analysis;
pub mod constructors;
pub mod converge;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod io;
pub mod params;
pub mod scc;
pub mod utility;

pub use error::{Error, Result};
pub use graph::{AgentId, BidirectedGraph, EdgeAction, EdgeRef, Layer, Mode};
pub use params::{Horizon, ModelParams, Rational};
