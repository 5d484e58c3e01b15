//! Route queries and their results.

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::path::{erase_loops, path_delay, path_rate, Path};

/// Source, destination and end-to-end delay bound (ms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteQuery {
    pub source: NodeId,
    pub destination: NodeId,
    pub bound: f64,
}

impl RouteQuery {
    pub fn new(source: NodeId, destination: NodeId, bound: f64) -> Self {
        RouteQuery {
            source,
            destination,
            bound,
        }
    }

    pub fn validate(&self, graph: &Graph) -> Result<(), RouteError> {
        for node in [self.source, self.destination] {
            if !graph.contains(node) {
                return Err(RouteError::InvalidQuery(format!(
                    "node {node} not in graph of {} nodes",
                    graph.node_count()
                )));
            }
        }
        if self.bound.is_nan() || self.bound < 0.0 {
            return Err(RouteError::InvalidQuery(format!(
                "delay bound must be non-negative, got {}",
                self.bound
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouteError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("delay quantization failed: {0}")]
    Quantization(String),
    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },
}

/// A feasible route and its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub path: Path,
    /// Bottleneck rate in Mbps; unbounded for the single-node route.
    pub rate: f64,
    /// End-to-end delay in ms.
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteResult {
    Found(Route),
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Found,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Found => "found",
            Status::Infeasible => "infeasible",
        })
    }
}

impl RouteResult {
    pub fn status(&self) -> Status {
        match self {
            RouteResult::Found(_) => Status::Found,
            RouteResult::Infeasible => Status::Infeasible,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, RouteResult::Found(_))
    }

    pub fn route(&self) -> Option<&Route> {
        match self {
            RouteResult::Found(r) => Some(r),
            RouteResult::Infeasible => None,
        }
    }

    pub fn rate(&self) -> Option<f64> {
        self.route().map(|r| r.rate)
    }

    pub fn delay(&self) -> Option<f64> {
        self.route().map(|r| r.delay)
    }

    /// Turns a node walk produced by an algorithm into a result.
    ///
    /// Repeated nodes are erased and both metrics are recomputed from the
    /// graph's links, so the reported figures always describe the returned
    /// path. A walk whose recomputed delay exceeds the bound is infeasible.
    pub fn from_walk(graph: &Graph, query: &RouteQuery, walk: &[NodeId]) -> RouteResult {
        let nodes = erase_loops(walk);
        debug_assert_eq!(nodes.first(), Some(&query.source));
        debug_assert_eq!(nodes.last(), Some(&query.destination));
        let path = match Path::from_nodes(graph, &nodes) {
            Ok(p) => p,
            Err(err) => {
                debug_assert!(false, "algorithm produced an invalid walk: {err}");
                log::error!("discarding invalid walk: {err}");
                return RouteResult::Infeasible;
            }
        };
        let rate = path_rate(&path, graph).expect("path built from graph");
        let delay = path_delay(&path, graph).expect("path built from graph");
        if delay > query.bound {
            log::debug!(
                "walk {:?} exceeds bound {} (delay {delay})",
                nodes,
                query.bound
            );
            return RouteResult::Infeasible;
        }
        RouteResult::Found(Route { path, rate, delay })
    }

    /// The trivial route from a node to itself.
    pub fn trivial(node: NodeId) -> RouteResult {
        RouteResult::Found(Route {
            path: Path::single(node),
            rate: crate::graph::UNBOUNDED_RATE,
            delay: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_graph, cg};

    #[test]
    fn query_validation() {
        let g = canonical_graph();
        assert!(RouteQuery::new(cg::U, cg::Y, 6.0).validate(&g).is_ok());
        assert!(RouteQuery::new(cg::U, NodeId(6), 6.0).validate(&g).is_err());
        assert!(RouteQuery::new(cg::U, cg::Y, -1.0).validate(&g).is_err());
        assert!(RouteQuery::new(cg::U, cg::Y, f64::NAN).validate(&g).is_err());
    }

    #[test]
    fn from_walk_erases_loops_and_checks_bound() {
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::W, 4.0);
        let r = RouteResult::from_walk(&g, &q, &[cg::U, cg::B, cg::U, cg::A, cg::W]);
        let route = r.route().unwrap();
        assert_eq!(route.path.nodes(), &[cg::U, cg::A, cg::W]);
        assert_eq!((route.rate, route.delay), (5.0, 4.0));

        let tight = RouteQuery::new(cg::U, cg::W, 3.0);
        assert_eq!(
            RouteResult::from_walk(&g, &tight, &[cg::U, cg::A, cg::W]),
            RouteResult::Infeasible
        );
    }
}
