//! Label-correcting variant: `n - 1` rounds, each relaxing every link once in
//! storage order. Only a node's own label and its link attributes are read
//! when relaxing, and a run costs `O(n L)`.

use crate::graph::{Graph, NodeId};
use crate::route::{RouteError, RouteQuery, RouteResult};

use super::labels::LabelTable;

pub fn route_bellman_ford(
    graph: &Graph,
    source: NodeId,
    bound: f64,
) -> Result<LabelTable, RouteError> {
    RouteQuery::new(source, source, bound).validate(graph)?;
    let n = graph.node_count();
    let mut table = LabelTable::new(n, source, bound);
    for _ in 1..n {
        for link in graph.links() {
            table.relax(link.from, link.to, link.rate, link.delay);
        }
    }
    Ok(table)
}

/// Single-pair convenience wrapper over [`route_bellman_ford`].
pub fn route_bellman_ford_pair(
    graph: &Graph,
    query: &RouteQuery,
) -> Result<RouteResult, RouteError> {
    query.validate(graph)?;
    Ok(route_bellman_ford(graph, query.source, query.bound)?.route(graph, query.destination))
}
