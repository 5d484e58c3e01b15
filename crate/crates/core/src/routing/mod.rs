//! The delay-bounded maximum-capacity routing algorithms.
//!
//! All four variants maximise the bottleneck rate of a route subject to
//! `delay <= bound`. The bound is inclusive everywhere: a route whose delay
//! equals the bound is accepted.

mod bellman_ford;
mod dijkstra;
mod floyd_warshall;
mod labels;
mod mra;

use std::fmt;
use std::str::FromStr;

pub use bellman_ford::{route_bellman_ford, route_bellman_ford_pair};
pub use dijkstra::{dijkstra_labels, route_dijkstra};
pub use floyd_warshall::{route_floyd_warshall, route_floyd_warshall_pair, AllPairsTable};
pub use labels::{Label, LabelTable};
pub use mra::{default_tick, mra_table, route_mra, MraOptions, MraTable, MAX_TABLE_CELLS};

use crate::graph::Graph;
use crate::route::{RouteError, RouteQuery, RouteResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Dijkstra,
    BellmanFord,
    FloydWarshall,
    Mra,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dijkstra,
        Algorithm::BellmanFord,
        Algorithm::FloydWarshall,
        Algorithm::Mra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dijkstra => "dijkstra",
            Algorithm::BellmanFord => "bellman-ford",
            Algorithm::FloydWarshall => "floyd-warshall",
            Algorithm::Mra => "mra",
        }
    }

    /// Runs one query. `mra` only applies to [`Algorithm::Mra`].
    pub fn route(
        self,
        graph: &Graph,
        query: &RouteQuery,
        mra: MraOptions,
    ) -> Result<RouteResult, RouteError> {
        match self {
            Algorithm::Dijkstra => route_dijkstra(graph, query),
            Algorithm::BellmanFord => route_bellman_ford_pair(graph, query),
            Algorithm::FloydWarshall => route_floyd_warshall_pair(graph, query),
            Algorithm::Mra => route_mra(graph, query, mra),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dijkstra" | "dj" => Ok(Algorithm::Dijkstra),
            "bellman-ford" | "bellman_ford" | "bf" => Ok(Algorithm::BellmanFord),
            "floyd-warshall" | "floyd_warshall" | "fw" => Ok(Algorithm::FloydWarshall),
            "mra" => Ok(Algorithm::Mra),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}
