//! Graph, link and node representations shared by every routing algorithm.
//!
//! Undirected graphs store each physical link as two directed arcs with
//! identical rate and delay, placed at adjacent indices `2k` and `2k + 1`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rate reported for the trivial single-node path. Never appears on a link.
pub const UNBOUNDED_RATE: f64 = f64::INFINITY;

/// Dense node index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of a directed arc in [`Graph::links`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

/// A directed arc with its capacity (Mbps) and expected delay (ms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub rate: f64,
    pub delay: f64,
}

impl Link {
    pub fn new(from: NodeId, to: NodeId, rate: f64, delay: f64) -> Self {
        Link {
            from,
            to,
            rate,
            delay,
        }
    }

    fn reversed(self) -> Self {
        Link {
            from: self.to,
            to: self.from,
            ..self
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid path: no link from {from} to {to}")]
    InvalidPath { from: NodeId, to: NodeId },
    #[error("path must contain at least one node")]
    EmptyPath,
    #[error("link starts at {link_from} but path ends at {path_end}")]
    Mismatch { path_end: NodeId, link_from: NodeId },
    #[error("extending the path to {0} would revisit it")]
    Cycle(NodeId),
    #[error("node {0} is out of range")]
    UnknownNode(NodeId),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// One violated invariant reported by [`validate_graph`].
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    EndpointOutOfRange { link: LinkId },
    SelfLoop { link: LinkId },
    NonPositiveRate { link: LinkId, rate: f64 },
    InvalidDelay { link: LinkId, delay: f64 },
    MissingReverse { link: LinkId },
    AdjacencyMismatch { node: NodeId },
    NameCount { names: usize, nodes: usize },
    PositionCount { positions: usize, nodes: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EndpointOutOfRange { link } => {
                write!(f, "link #{} has an endpoint out of range", link.0)
            }
            Diagnostic::SelfLoop { link } => write!(f, "link #{} is a self-loop", link.0),
            Diagnostic::NonPositiveRate { link, rate } => {
                write!(f, "link #{} has non-positive or non-finite rate {rate}", link.0)
            }
            Diagnostic::InvalidDelay { link, delay } => {
                write!(f, "link #{} has negative or non-finite delay {delay}", link.0)
            }
            Diagnostic::MissingReverse { link } => {
                write!(f, "undirected link #{} has no matching reverse arc", link.0)
            }
            Diagnostic::AdjacencyMismatch { node } => {
                write!(f, "adjacency of node {node} disagrees with the link list")
            }
            Diagnostic::NameCount { names, nodes } => {
                write!(f, "{names} node names for {nodes} nodes")
            }
            Diagnostic::PositionCount { positions, nodes } => {
                write!(f, "{positions} positions for {nodes} nodes")
            }
        }
    }
}

/// Immutable routing graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    names: Vec<String>,
    positions: Option<Vec<(f64, f64)>>,
    links: Vec<Link>,
    adjacency: Vec<Vec<LinkId>>,
}

impl Graph {
    /// Assembles a graph from raw arcs without checking any invariant.
    /// Use [`validate_graph`] to inspect the result.
    pub fn from_raw_parts(n: usize, directed: bool, links: Vec<Link>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (idx, link) in links.iter().enumerate() {
            if let Some(out) = adjacency.get_mut(link.from.0) {
                out.push(LinkId(idx));
            }
        }
        Graph {
            n,
            directed,
            names: (0..n).map(|i| i.to_string()).collect(),
            positions: None,
            links,
            adjacency,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// All directed arcs, in storage order.
    #[inline]
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    #[inline]
    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    /// Number of stored directed arcs.
    pub fn arc_count(&self) -> usize {
        self.links.len()
    }

    /// Number of physical links: arcs for directed graphs, arc pairs otherwise.
    pub fn link_count(&self) -> usize {
        if self.directed {
            self.links.len()
        } else {
            self.links.len() / 2
        }
    }

    /// The physical links, one entry per undirected pair.
    pub fn physical_links(&self) -> impl Iterator<Item = &Link> {
        let step = if self.directed { 1 } else { 2 };
        self.links.iter().step_by(step)
    }

    /// Outgoing arcs of `node`, in insertion order.
    #[inline]
    pub fn outgoing(&self, node: NodeId) -> &[LinkId] {
        &self.adjacency[node.0]
    }

    /// The arc `from -> to`, if present.
    pub fn find_link(&self, from: NodeId, to: NodeId) -> Option<LinkId> {
        self.adjacency
            .get(from.0)?
            .iter()
            .copied()
            .find(|&id| self.links[id.0].to == to)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 < self.n
    }

    pub fn name(&self, node: NodeId) -> &str {
        &self.names[node.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    pub fn position(&self, node: NodeId) -> Option<(f64, f64)> {
        self.positions.as_ref().map(|p| p[node.0])
    }
}

/// Incremental graph construction.
///
/// Parallel links between the same ordered pair are collapsed on insertion,
/// keeping the higher-rate arc (lower delay on equal rate).
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    directed: bool,
    names: Option<Vec<String>>,
    positions: Option<Vec<(f64, f64)>>,
    links: Vec<Link>,
    slots: HashMap<(usize, usize), usize>,
}

impl GraphBuilder {
    pub fn undirected(n: usize) -> Self {
        GraphBuilder {
            n,
            directed: false,
            names: None,
            positions: None,
            links: Vec::new(),
            slots: HashMap::new(),
        }
    }

    pub fn directed(n: usize) -> Self {
        GraphBuilder {
            directed: true,
            ..GraphBuilder::undirected(n)
        }
    }

    pub fn names(mut self, names: Vec<String>) -> Self {
        self.names = Some(names);
        self
    }

    pub fn positions(mut self, positions: Vec<(f64, f64)>) -> Self {
        self.positions = Some(positions);
        self
    }

    /// Adds a physical link; undirected builders store it as two arcs.
    pub fn add_link(&mut self, from: usize, to: usize, rate: f64, delay: f64) -> &mut Self {
        let link = Link::new(NodeId(from), NodeId(to), rate, delay);
        let key = if self.directed || from < to {
            (from, to)
        } else {
            (to, from)
        };
        let existing = self.slots.get(&key).copied();
        match existing {
            Some(i) => {
                let old = self.links[i];
                log::warn!(
                    "parallel link {}-{} collapsed (rates {} and {})",
                    from,
                    to,
                    old.rate,
                    rate
                );
                if better_arc(&link, &old) {
                    self.links[i] = Link::new(old.from, old.to, rate, delay);
                    if !self.directed {
                        self.links[i + 1] = self.links[i].reversed();
                    }
                }
            }
            None => {
                self.slots.insert(key, self.links.len());
                self.links.push(link);
                if !self.directed {
                    self.links.push(link.reversed());
                }
            }
        }
        self
    }

    /// Builds the graph, rejecting it if [`validate_graph`] reports anything.
    pub fn build(self) -> Result<Graph, GraphError> {
        let graph = self.build_unchecked();
        let report = validate_graph(&graph);
        if report.is_empty() {
            Ok(graph)
        } else {
            let msg: Vec<String> = report.iter().map(|d| d.to_string()).collect();
            Err(GraphError::Invalid(msg.join("; ")))
        }
    }

    pub fn build_unchecked(self) -> Graph {
        let mut graph = Graph::from_raw_parts(self.n, self.directed, self.links);
        if let Some(names) = self.names {
            graph.names = names;
        }
        graph.positions = self.positions;
        graph
    }
}

fn better_arc(candidate: &Link, current: &Link) -> bool {
    candidate.rate > current.rate || (candidate.rate == current.rate && candidate.delay < current.delay)
}

/// Reports every violated graph invariant. An empty report means the graph is valid.
pub fn validate_graph(graph: &Graph) -> Vec<Diagnostic> {
    let mut report = Vec::new();
    let n = graph.n;
    let arc_keys: HashSet<(usize, usize, u64, u64)> = graph
        .links
        .iter()
        .map(|l| (l.from.0, l.to.0, l.rate.to_bits(), l.delay.to_bits()))
        .collect();
    for (idx, link) in graph.links.iter().enumerate() {
        let id = LinkId(idx);
        if link.from.0 >= n || link.to.0 >= n {
            report.push(Diagnostic::EndpointOutOfRange { link: id });
        } else if link.from == link.to {
            report.push(Diagnostic::SelfLoop { link: id });
        }
        if !(link.rate > 0.0 && link.rate.is_finite()) {
            report.push(Diagnostic::NonPositiveRate {
                link: id,
                rate: link.rate,
            });
        }
        if !(link.delay >= 0.0 && link.delay.is_finite()) {
            report.push(Diagnostic::InvalidDelay {
                link: id,
                delay: link.delay,
            });
        }
        if !graph.directed && !arc_keys.contains(&(link.to.0, link.from.0, link.rate.to_bits(), link.delay.to_bits())) {
            report.push(Diagnostic::MissingReverse { link: id });
        }
    }
    if graph.adjacency.len() != n {
        report.push(Diagnostic::AdjacencyMismatch { node: NodeId(n) });
    } else {
        let mut expected = vec![Vec::new(); n];
        for (idx, link) in graph.links.iter().enumerate() {
            if let Some(out) = expected.get_mut(link.from.0) {
                out.push(LinkId(idx));
            }
        }
        for (node, out) in expected.iter().enumerate() {
            if graph.adjacency[node] != *out {
                report.push(Diagnostic::AdjacencyMismatch { node: NodeId(node) });
            }
        }
    }
    if graph.names.len() != n {
        report.push(Diagnostic::NameCount {
            names: graph.names.len(),
            nodes: n,
        });
    }
    if let Some(p) = &graph.positions {
        if p.len() != n {
            report.push(Diagnostic::PositionCount {
                positions: p.len(),
                nodes: n,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::canonical_graph;

    #[test]
    fn canonical_graph_is_valid() {
        assert!(validate_graph(&canonical_graph()).is_empty());
    }

    #[test]
    fn zero_rate_is_reported_once() {
        let g = Graph::from_raw_parts(2, true, vec![Link::new(NodeId(0), NodeId(1), 0.0, 1.0)]);
        let report = validate_graph(&g);
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Diagnostic::NonPositiveRate { .. }));
    }

    #[test]
    fn missing_reverse_arc_is_reported() {
        let links = vec![
            Link::new(NodeId(0), NodeId(1), 5.0, 2.0),
            Link::new(NodeId(1), NodeId(0), 5.0, 2.0),
            Link::new(NodeId(1), NodeId(2), 4.0, 2.0),
        ];
        let report = validate_graph(&Graph::from_raw_parts(3, false, links));
        assert_eq!(report, vec![Diagnostic::MissingReverse { link: LinkId(2) }]);
    }

    #[test]
    fn bad_endpoints_and_self_loops() {
        let links = vec![
            Link::new(NodeId(0), NodeId(7), 1.0, 1.0),
            Link::new(NodeId(1), NodeId(1), 1.0, 1.0),
            Link::new(NodeId(0), NodeId(1), 1.0, -1.0),
        ];
        let report = validate_graph(&Graph::from_raw_parts(2, true, links));
        assert!(report.contains(&Diagnostic::EndpointOutOfRange { link: LinkId(0) }));
        assert!(report.contains(&Diagnostic::SelfLoop { link: LinkId(1) }));
        assert!(matches!(report[2], Diagnostic::InvalidDelay { .. }));
    }

    #[test]
    fn parallel_links_keep_better_rate() {
        let mut b = GraphBuilder::undirected(2);
        b.add_link(0, 1, 3.0, 2.0).add_link(1, 0, 8.0, 4.0).add_link(0, 1, 2.0, 1.0);
        let g = b.build().unwrap();
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.link_count(), 1);
        let l = g.link(g.find_link(NodeId(0), NodeId(1)).unwrap());
        assert_eq!((l.rate, l.delay), (8.0, 4.0));
        let r = g.link(g.find_link(NodeId(1), NodeId(0)).unwrap());
        assert_eq!((r.rate, r.delay), (8.0, 4.0));
    }

    #[test]
    fn undirected_links_are_symmetric_arc_pairs() {
        let g = canonical_graph();
        assert_eq!(g.arc_count(), 12);
        assert_eq!(g.link_count(), 6);
        for pair in g.links().chunks(2) {
            assert_eq!(pair[0], pair[1].reversed());
        }
    }

    #[test]
    fn build_rejects_invalid_links() {
        let mut b = GraphBuilder::directed(2);
        b.add_link(0, 1, -1.0, 1.0);
        assert!(matches!(b.build(), Err(GraphError::Invalid(_))));
    }
}
