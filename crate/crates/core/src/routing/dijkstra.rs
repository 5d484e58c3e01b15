//! Label-setting variant: each round fixes the unvisited node with the widest
//! label and relaxes its outgoing links under the delay bound.

use crate::graph::{Graph, NodeId};
use crate::route::{RouteError, RouteQuery, RouteResult};

use super::labels::LabelTable;

/// Runs the `n - 1` selection rounds from `source` and returns every label.
///
/// Selection is a linear scan for the maximum label rate, ties going to the
/// lowest node id, so a run costs `O(n^2 + L)`.
pub fn dijkstra_labels(graph: &Graph, source: NodeId, bound: f64) -> LabelTable {
    let n = graph.node_count();
    let mut table = LabelTable::new(n, source, bound);
    for _ in 1..n {
        let mut best: Option<(NodeId, f64)> = None;
        for (idx, label) in table.labels().iter().enumerate() {
            if !label.visited && best.is_none_or(|(_, r)| label.rate > r) {
                best = Some((NodeId(idx), label.rate));
            }
        }
        let Some((u, _)) = best else { break };
        table.set_visited(u);
        for &id in graph.outgoing(u) {
            let link = graph.link(id);
            // Fixed labels are final; the widest-first order means no
            // candidate through `u` can beat them anyway.
            if table.label(link.to).visited {
                continue;
            }
            table.relax(u, link.to, link.rate, link.delay);
        }
    }
    table
}

pub fn route_dijkstra(graph: &Graph, query: &RouteQuery) -> Result<RouteResult, RouteError> {
    query.validate(graph)?;
    Ok(dijkstra_labels(graph, query.source, query.bound).route(graph, query.destination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, UNBOUNDED_RATE};
    use crate::oracle::{canonical_graph, cg};

    #[test]
    fn canonical_example_at_six_ms() {
        let g = canonical_graph();
        let r = route_dijkstra(&g, &RouteQuery::new(cg::U, cg::Y, 6.0)).unwrap();
        let route = r.route().unwrap();
        assert_eq!(route.rate, 5.0);
        assert_eq!(route.delay, 6.0);
        assert_eq!(route.path.nodes(), &[cg::U, cg::A, cg::W, cg::Y]);
    }

    #[test]
    fn canonical_example_at_four_ms_is_infeasible() {
        let g = canonical_graph();
        let r = route_dijkstra(&g, &RouteQuery::new(cg::U, cg::Y, 4.0)).unwrap();
        assert_eq!(r, RouteResult::Infeasible);
    }

    #[test]
    fn self_route() {
        let g = canonical_graph();
        for bound in [0.0, 6.0] {
            let r = route_dijkstra(&g, &RouteQuery::new(cg::U, cg::U, bound)).unwrap();
            let route = r.route().unwrap();
            assert_eq!(route.path.nodes(), &[cg::U]);
            assert_eq!(route.rate, UNBOUNDED_RATE);
            assert_eq!(route.delay, 0.0);
        }
    }

    #[test]
    fn selection_order_follows_widest_labels() {
        // u, b, x, a, w are fixed in that order; y is relabelled from 3 to 5.
        let g = canonical_graph();
        let t = dijkstra_labels(&g, cg::U, 6.0);
        let y = t.label(cg::Y);
        assert_eq!((y.rate, y.delay, y.parent), (5.0, 6.0, Some(cg::W)));
        assert!(!y.visited);
        let x = t.label(cg::X);
        assert_eq!((x.rate, x.delay, x.parent), (8.0, 4.0, Some(cg::B)));
    }

    #[test]
    fn rejects_bad_query() {
        let g = canonical_graph();
        assert!(route_dijkstra(&g, &RouteQuery::new(NodeId(9), cg::U, 1.0)).is_err());
    }

    #[test]
    fn disconnected_pair_is_infeasible() {
        let g = GraphBuilder::undirected(3).build().unwrap();
        let r = route_dijkstra(&g, &RouteQuery::new(NodeId(0), NodeId(2), 100.0)).unwrap();
        assert_eq!(r, RouteResult::Infeasible);
    }
}
