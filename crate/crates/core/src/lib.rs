//! Selfish network creation under a uniform single-edge-deletion adversary.
//!
//! Agents own edges of an undirected multigraph, pay `alpha` per owned edge
//! and minimise their expected sum of hop distances after one edge instance is
//! removed uniformly at random. This crate evaluates those costs exactly,
//! searches best responses and equilibria exhaustively, plays sequential
//! dynamics, enumerates optimum networks and analyses robustness structure.
//!
//! All cost values are exact rationals (or `+inf`); nothing that decides an
//! equilibrium or an optimum goes through floating point.

pub mod cost;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod graph;
pub mod hardness;
pub mod moves;
pub mod poa;
pub mod rational;
pub mod structure;

pub use cost::{agent_cost, delta_sum, expected_distance_cost, social_cost, CostModel, GameConfig};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Multigraph, OwnedMultiGraph, StateKey, StrategyVector};
pub use moves::{BestResponseResult, Move};
pub use rational::{ExtCost, Rational};

/// Default number of candidate strategies a single exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
