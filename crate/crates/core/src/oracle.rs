//! Exact reference solvers used to adjudicate the routing algorithms, and the
//! six-node canonical example graph.
//!
//! The two solvers share no code with the algorithms under test or with each
//! other: one enumerates simple paths, the other thresholds on rate and runs
//! a heap-based minimum-delay search.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::path::Path;
use crate::route::{Route, RouteError, RouteQuery, RouteResult};

/// Node ids of the canonical graph.
pub mod cg {
    use crate::graph::NodeId;

    pub const U: NodeId = NodeId(0);
    pub const A: NodeId = NodeId(1);
    pub const W: NodeId = NodeId(2);
    pub const B: NodeId = NodeId(3);
    pub const X: NodeId = NodeId(4);
    pub const Y: NodeId = NodeId(5);

    pub const NAMES: [&str; 6] = ["u", "a", "w", "b", "x", "y"];
}

/// Six-node example: `y` is reachable only through `w` (last link 6 Mbps) or
/// `x` (last link 3 Mbps); every link takes 2 ms. The widest `u -> y` route
/// is `u-a-w-y` at 5 Mbps and 6 ms.
pub fn canonical_graph() -> Graph {
    let mut b = GraphBuilder::undirected(6).names(cg::NAMES.iter().map(|s| s.to_string()).collect());
    for (from, to, rate) in [
        (cg::U, cg::A, 5.0),
        (cg::A, cg::W, 7.0),
        (cg::W, cg::Y, 6.0),
        (cg::U, cg::B, 9.0),
        (cg::B, cg::X, 8.0),
        (cg::X, cg::Y, 3.0),
    ] {
        b.add_link(from.0, to.0, rate, 2.0);
    }
    b.build().expect("canonical graph is valid")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration budget of {0} partial paths exceeded")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Route(#[from] RouteError),
}

/// Default cap on partial paths explored by [`brute_force_route`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Enumerates every simple path from source to destination with delay within
/// the bound and returns the widest. Ties prefer lower delay, then fewer
/// hops, then the lexicographically smallest node sequence.
pub fn brute_force_route(graph: &Graph, query: &RouteQuery) -> Result<RouteResult, OracleError> {
    brute_force_route_with_budget(graph, query, DEFAULT_BUDGET)
}

pub fn brute_force_route_with_budget(
    graph: &Graph,
    query: &RouteQuery,
    budget: u64,
) -> Result<RouteResult, OracleError> {
    query.validate(graph)?;
    if query.source == query.destination {
        return Ok(RouteResult::trivial(query.source));
    }
    let mut search = Enumeration {
        graph,
        query,
        budget,
        explored: 0,
        on_path: vec![false; graph.node_count()],
        stack: vec![query.source],
        best: None,
    };
    search.on_path[query.source.0] = true;
    search.extend(f64::INFINITY, 0.0)?;
    Ok(match search.best {
        Some(best) => RouteResult::Found(Route {
            path: Path::from_nodes(graph, &best.nodes).expect("enumerated along links"),
            rate: best.rate,
            delay: best.delay,
        }),
        None => RouteResult::Infeasible,
    })
}

struct Candidate {
    rate: f64,
    delay: f64,
    nodes: Vec<NodeId>,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        let key = |c: &Candidate| (Reverse(OrdF64(c.rate)), OrdF64(c.delay), c.nodes.len());
        match key(self).cmp(&key(other)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.nodes < other.nodes,
        }
    }
}

struct Enumeration<'a> {
    graph: &'a Graph,
    query: &'a RouteQuery,
    budget: u64,
    explored: u64,
    on_path: Vec<bool>,
    stack: Vec<NodeId>,
    best: Option<Candidate>,
}

impl Enumeration<'_> {
    fn extend(&mut self, rate: f64, delay: f64) -> Result<(), OracleError> {
        let here = *self.stack.last().unwrap();
        for &id in self.graph.outgoing(here) {
            let link = *self.graph.link(id);
            if self.on_path[link.to.0] {
                continue;
            }
            let next_delay = delay + link.delay;
            if next_delay > self.query.bound {
                continue;
            }
            self.explored += 1;
            if self.explored > self.budget {
                return Err(OracleError::BudgetExceeded(self.budget));
            }
            let next_rate = rate.min(link.rate);
            self.stack.push(link.to);
            if link.to == self.query.destination {
                let cand = Candidate {
                    rate: next_rate,
                    delay: next_delay,
                    nodes: self.stack.clone(),
                };
                if self.best.as_ref().is_none_or(|b| cand.beats(b)) {
                    self.best = Some(cand);
                }
            } else {
                self.on_path[link.to.0] = true;
                self.extend(next_rate, next_delay)?;
                self.on_path[link.to.0] = false;
            }
            self.stack.pop();
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Minimum-delay path using only links of rate at least `min_rate`.
/// Returns the delay and node sequence, or `None` when unreachable.
pub fn min_delay_path(
    graph: &Graph,
    source: NodeId,
    destination: NodeId,
    min_rate: f64,
) -> Option<(f64, Vec<NodeId>)> {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<NodeId>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source.0] = 0.0;
    heap.push(Reverse((OrdF64(0.0), source)));
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        if d > dist[u.0] {
            continue;
        }
        if u == destination {
            break;
        }
        for &id in graph.outgoing(u) {
            let link = graph.link(id);
            if link.rate < min_rate {
                continue;
            }
            let nd = d + link.delay;
            if nd < dist[link.to.0] {
                dist[link.to.0] = nd;
                prev[link.to.0] = Some(u);
                heap.push(Reverse((OrdF64(nd), link.to)));
            }
        }
    }
    if !dist[destination.0].is_finite() {
        return None;
    }
    let mut nodes = vec![destination];
    let mut at = destination;
    while let Some(p) = prev[at.0] {
        nodes.push(p);
        at = p;
    }
    nodes.reverse();
    Some((dist[destination.0], nodes))
}

/// Exact solution by rate thresholding: the optimum is the largest link rate
/// `r` for which the minimum delay over links of rate `>= r` fits the bound.
/// Feasibility only grows as `r` falls, so the distinct rates are binary
/// searched.
pub fn threshold_exact_route(graph: &Graph, query: &RouteQuery) -> Result<RouteResult, RouteError> {
    query.validate(graph)?;
    if query.source == query.destination {
        return Ok(RouteResult::trivial(query.source));
    }
    let mut rates: Vec<f64> = graph
        .links()
        .iter()
        .filter(|l| l.delay <= query.bound)
        .map(|l| l.rate)
        .collect();
    rates.sort_by(|a, b| b.total_cmp(a));
    rates.dedup();
    let fits = |r: f64| {
        min_delay_path(graph, query.source, query.destination, r)
            .is_some_and(|(d, _)| d <= query.bound)
    };
    let first = rates.partition_point(|&r| !fits(r));
    let Some(&threshold) = rates.get(first) else {
        return Ok(RouteResult::Infeasible);
    };
    let (_, nodes) = min_delay_path(graph, query.source, query.destination, threshold)
        .expect("threshold was feasible");
    Ok(RouteResult::from_walk(graph, query, &nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_on_canonical_graph() {
        let g = canonical_graph();
        let r = brute_force_route(&g, &RouteQuery::new(cg::U, cg::Y, 6.0)).unwrap();
        let route = r.route().unwrap();
        assert_eq!((route.rate, route.delay), (5.0, 6.0));
        assert_eq!(route.path.nodes(), &[cg::U, cg::A, cg::W, cg::Y]);
        let loose = brute_force_route(&g, &RouteQuery::new(cg::U, cg::Y, 100.0)).unwrap();
        assert_eq!(loose.rate(), Some(5.0));
        let tight = brute_force_route(&g, &RouteQuery::new(cg::U, cg::Y, 4.0)).unwrap();
        assert_eq!(tight, RouteResult::Infeasible);
    }

    #[test]
    fn brute_force_budget() {
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::Y, 100.0);
        assert_eq!(
            brute_force_route_with_budget(&g, &q, 3),
            Err(OracleError::BudgetExceeded(3))
        );
    }

    #[test]
    fn disconnected_pair_is_infeasible() {
        let g = GraphBuilder::undirected(3).build().unwrap();
        let q = RouteQuery::new(NodeId(0), NodeId(2), 10.0);
        assert_eq!(brute_force_route(&g, &q).unwrap(), RouteResult::Infeasible);
        assert_eq!(threshold_exact_route(&g, &q).unwrap(), RouteResult::Infeasible);
    }

    #[test]
    fn threshold_on_canonical_graph() {
        let g = canonical_graph();
        let r = threshold_exact_route(&g, &RouteQuery::new(cg::U, cg::Y, 6.0)).unwrap();
        assert_eq!(r.rate(), Some(5.0));
        assert_eq!(r.delay(), Some(6.0));
        let r = threshold_exact_route(&g, &RouteQuery::new(cg::U, cg::Y, 4.0)).unwrap();
        assert_eq!(r, RouteResult::Infeasible);
    }

    #[test]
    fn tie_break_prefers_lower_delay_then_fewer_hops() {
        // Two 4 Mbps routes 0 -> 3: 0-1-3 (2 ms) and 0-2-3 (1.5 ms); 0-3 is
        // narrow. The lower-delay route wins.
        let mut b = GraphBuilder::undirected(4);
        b.add_link(0, 1, 4.0, 1.0)
            .add_link(1, 3, 4.0, 1.0)
            .add_link(0, 2, 4.0, 0.5)
            .add_link(2, 3, 4.0, 1.0)
            .add_link(0, 3, 1.0, 0.1);
        let g = b.build().unwrap();
        let r = brute_force_route(&g, &RouteQuery::new(NodeId(0), NodeId(3), 5.0)).unwrap();
        assert_eq!(r.route().unwrap().path.nodes(), &[NodeId(0), NodeId(2), NodeId(3)]);
    }
}
