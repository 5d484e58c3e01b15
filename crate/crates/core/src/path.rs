//! Paths and the two path metrics: bottleneck rate and additive delay.

use crate::graph::{Graph, GraphError, LinkId, NodeId, UNBOUNDED_RATE};

/// An ordered node sequence together with the arcs joining consecutive nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<NodeId>,
    links: Vec<LinkId>,
}

impl Path {
    pub fn single(node: NodeId) -> Self {
        Path {
            nodes: vec![node],
            links: Vec::new(),
        }
    }

    /// Resolves the arcs joining consecutive `nodes`.
    pub fn from_nodes(graph: &Graph, nodes: &[NodeId]) -> Result<Self, GraphError> {
        let first = *nodes.first().ok_or(GraphError::EmptyPath)?;
        if !graph.contains(first) {
            return Err(GraphError::UnknownNode(first));
        }
        let links = nodes
            .windows(2)
            .map(|w| {
                graph.find_link(w[0], w[1]).ok_or(GraphError::InvalidPath {
                    from: w[0],
                    to: w[1],
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Path {
            nodes: nodes.to_vec(),
            links,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[LinkId] {
        &self.links
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().expect("paths are never empty")
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.nodes.len());
        self.nodes.iter().all(|n| seen.insert(*n))
    }

    fn check(&self, graph: &Graph) -> Result<(), GraphError> {
        for (w, &id) in self.nodes.windows(2).zip(&self.links) {
            let ok = id.0 < graph.arc_count() && {
                let l = graph.link(id);
                l.from == w[0] && l.to == w[1]
            };
            if !ok {
                return Err(GraphError::InvalidPath {
                    from: w[0],
                    to: w[1],
                });
            }
        }
        Ok(())
    }
}

/// Bottleneck rate: the minimum rate over the traversed links, or
/// [`UNBOUNDED_RATE`] for a single-node path.
pub fn path_rate(path: &Path, graph: &Graph) -> Result<f64, GraphError> {
    path.check(graph)?;
    Ok(path
        .links
        .iter()
        .map(|&id| graph.link(id).rate)
        .fold(UNBOUNDED_RATE, f64::min))
}

/// End-to-end delay, summed left to right from the source.
pub fn path_delay(path: &Path, graph: &Graph) -> Result<f64, GraphError> {
    path.check(graph)?;
    Ok(path.links.iter().map(|&id| graph.link(id).delay).fold(0.0, |acc, d| acc + d))
}

/// Appends one arc, refusing to break simplicity.
pub fn path_concat(prefix: &Path, link: LinkId, graph: &Graph) -> Result<Path, GraphError> {
    let l = graph.link(link);
    if l.from != prefix.last() {
        return Err(GraphError::Mismatch {
            path_end: prefix.last(),
            link_from: l.from,
        });
    }
    if prefix.contains(l.to) {
        return Err(GraphError::Cycle(l.to));
    }
    let mut out = prefix.clone();
    out.nodes.push(l.to);
    out.links.push(link);
    Ok(out)
}

/// Removes cycles from a walk: whenever a node repeats, everything after its
/// first occurrence up to the repeat is cut. The result visits a subset of
/// the walk's arcs, so its rate is no lower and its delay no higher.
pub fn erase_loops(walk: &[NodeId]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = Vec::with_capacity(walk.len());
    for &node in walk {
        if let Some(pos) = out.iter().position(|&n| n == node) {
            out.truncate(pos + 1);
        } else {
            out.push(node);
        }
    }
    out
}
