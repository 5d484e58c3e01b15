//! Intermediate-node variant: round `k` lets node `k` join the routes between
//! every ordered pair, keeping the wider candidate that fits the delay bound.

use crate::graph::{Graph, LinkId, NodeId, UNBOUNDED_RATE};
use crate::path::Path;
use crate::route::{RouteError, RouteQuery, RouteResult};

#[derive(Debug, Clone, Copy)]
enum Segment {
    Arc(LinkId),
    Join(usize, usize),
}

/// Row-major `n x n` rate, delay and route matrices.
///
/// Each non-empty off-diagonal entry points at an immutable segment tree
/// describing the exact walk its rate and delay were computed from.
#[derive(Debug, Clone)]
pub struct AllPairsTable {
    n: usize,
    bound: f64,
    rate: Vec<f64>,
    delay: Vec<f64>,
    route: Vec<Option<usize>>,
    segments: Vec<Segment>,
}

impl AllPairsTable {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[inline]
    pub fn rate(&self, i: NodeId, j: NodeId) -> f64 {
        self.rate[i.0 * self.n + j.0]
    }

    #[inline]
    pub fn delay(&self, i: NodeId, j: NodeId) -> f64 {
        self.delay[i.0 * self.n + j.0]
    }

    /// The node preceding `j` on the stored `i -> j` route.
    pub fn parent(&self, graph: &Graph, i: NodeId, j: NodeId) -> Option<NodeId> {
        let mut seg = self.route[i.0 * self.n + j.0]?;
        loop {
            match self.segments[seg] {
                Segment::Arc(id) => return Some(graph.link(id).from),
                Segment::Join(_, right) => seg = right,
            }
        }
    }

    /// Number of segments recorded while filling the table.
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Expands the stored `source -> destination` walk.
    pub fn extract_walk(
        &self,
        graph: &Graph,
        source: NodeId,
        destination: NodeId,
    ) -> Result<Vec<NodeId>, RouteError> {
        if source == destination {
            return Ok(vec![source]);
        }
        let root = self
            .route
            .get(source.0 * self.n + destination.0)
            .copied()
            .flatten()
            .ok_or(RouteError::NoPath { from: source, to: destination })?;
        let mut walk = vec![source];
        let mut stack = vec![root];
        while let Some(seg) = stack.pop() {
            match self.segments[seg] {
                Segment::Arc(id) => walk.push(graph.link(id).to),
                Segment::Join(left, right) => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        debug_assert_eq!(walk.last(), Some(&destination));
        Ok(walk)
    }

    pub fn extract_path(
        &self,
        graph: &Graph,
        source: NodeId,
        destination: NodeId,
    ) -> Result<Path, RouteError> {
        let walk = self.extract_walk(graph, source, destination)?;
        Path::from_nodes(graph, &crate::path::erase_loops(&walk)).map_err(|_| {
            RouteError::NoPath { from: source, to: destination }
        })
    }

    pub fn route(&self, graph: &Graph, source: NodeId, destination: NodeId) -> RouteResult {
        if source == destination {
            return RouteResult::trivial(source);
        }
        let query = RouteQuery::new(source, destination, self.bound);
        match self.extract_walk(graph, source, destination) {
            Ok(walk) => RouteResult::from_walk(graph, &query, &walk),
            Err(_) => RouteResult::Infeasible,
        }
    }
}

pub fn route_floyd_warshall(graph: &Graph, bound: f64) -> Result<AllPairsTable, RouteError> {
    if bound.is_nan() || bound < 0.0 {
        return Err(RouteError::InvalidQuery(format!(
            "delay bound must be non-negative, got {bound}"
        )));
    }
    let n = graph.node_count();
    let mut t = AllPairsTable {
        n,
        bound,
        rate: vec![0.0; n * n],
        delay: vec![f64::INFINITY; n * n],
        route: vec![None; n * n],
        segments: Vec::with_capacity(graph.arc_count() * 2),
    };
    for i in 0..n {
        t.rate[i * n + i] = UNBOUNDED_RATE;
        t.delay[i * n + i] = 0.0;
    }
    for (idx, link) in graph.links().iter().enumerate() {
        // A link already over budget can never join a feasible route; the
        // first round touching it would reset it anyway.
        if link.delay > bound {
            continue;
        }
        let cell = link.from.0 * n + link.to.0;
        if link.rate > t.rate[cell] {
            t.rate[cell] = link.rate;
            t.delay[cell] = link.delay;
            t.segments.push(Segment::Arc(LinkId(idx)));
            t.route[cell] = Some(t.segments.len() - 1);
        }
    }

    for k in 0..n {
        for i in 0..n {
            if i == k {
                continue;
            }
            let ik = i * n + k;
            let r_ik = t.rate[ik];
            if r_ik == 0.0 {
                continue;
            }
            let d_ik = t.delay[ik];
            let seg_ik = t.route[ik];
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let kj = k * n + j;
                let r_kj = t.rate[kj];
                if r_kj == 0.0 {
                    continue;
                }
                let ij = i * n + j;
                let through = d_ik + t.delay[kj];
                if through <= bound {
                    let cap = if r_ik < r_kj { r_ik } else { r_kj };
                    if cap > t.rate[ij] || t.delay[ij] > bound {
                        let (Some(left), Some(right)) = (seg_ik, t.route[kj]) else {
                            unreachable!("non-empty off-diagonal entries carry a route");
                        };
                        t.segments.push(Segment::Join(left, right));
                        t.route[ij] = Some(t.segments.len() - 1);
                        t.rate[ij] = cap;
                        t.delay[ij] = through;
                    }
                } else if t.delay[ij] > bound && t.rate[ij] != 0.0 {
                    t.rate[ij] = 0.0;
                    t.delay[ij] = f64::INFINITY;
                    t.route[ij] = None;
                }
            }
        }
    }
    Ok(t)
}

/// Single-pair convenience wrapper over [`route_floyd_warshall`].
pub fn route_floyd_warshall_pair(
    graph: &Graph,
    query: &RouteQuery,
) -> Result<RouteResult, RouteError> {
    query.validate(graph)?;
    Ok(route_floyd_warshall(graph, query.bound)?.route(graph, query.source, query.destination))
}
