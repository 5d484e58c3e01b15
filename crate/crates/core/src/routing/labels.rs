//! Single-source label state shared by the Dijkstra and Bellman-Ford variants.

use crate::graph::{Graph, NodeId, UNBOUNDED_RATE};
use crate::path::Path;
use crate::route::{RouteError, RouteQuery, RouteResult};

/// Best-known route from the source to one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Label {
    /// Bottleneck rate of the labelled route, 0 when unreached.
    pub rate: f64,
    /// Delay of the labelled route, infinite when unreached.
    pub delay: f64,
    pub parent: Option<NodeId>,
    pub visited: bool,
    trail: Option<usize>,
}

impl Label {
    const UNREACHED: Label = Label {
        rate: 0.0,
        delay: f64::INFINITY,
        parent: None,
        visited: false,
        trail: None,
    };

    pub fn is_reached(&self) -> bool {
        self.delay.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
struct TrailStep {
    node: NodeId,
    prev: Option<usize>,
}

/// One label per node plus the route each label stands for.
///
/// Every relabel `P(s, v) = P(s, u) + (u, v)` records a new trail step that
/// points at the step `u`'s label held at that moment. A label therefore keeps
/// describing the exact route its rate and delay were computed from, even if
/// `u` is relabelled later.
#[derive(Debug, Clone)]
pub struct LabelTable {
    source: NodeId,
    bound: f64,
    labels: Vec<Label>,
    trails: Vec<TrailStep>,
}

impl LabelTable {
    pub(crate) fn new(n: usize, source: NodeId, bound: f64) -> Self {
        let mut labels = vec![Label::UNREACHED; n];
        labels[source.0] = Label {
            rate: UNBOUNDED_RATE,
            delay: 0.0,
            parent: None,
            visited: false,
            trail: Some(0),
        };
        LabelTable {
            source,
            bound,
            labels,
            trails: vec![TrailStep {
                node: source,
                prev: None,
            }],
        }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, node: NodeId) -> &Label {
        &self.labels[node.0]
    }

    #[inline]
    pub(crate) fn set_visited(&mut self, node: NodeId) {
        self.labels[node.0].visited = true;
    }

    pub(crate) fn relabel(&mut self, node: NodeId, parent: NodeId, rate: f64, delay: f64) {
        let prev = self.labels[parent.0].trail;
        self.trails.push(TrailStep { node, prev });
        let label = &mut self.labels[node.0];
        label.rate = rate;
        label.delay = delay;
        label.parent = Some(parent);
        label.trail = Some(self.trails.len() - 1);
    }

    pub(crate) fn invalidate(&mut self, node: NodeId) {
        let visited = self.labels[node.0].visited;
        self.labels[node.0] = Label {
            visited,
            ..Label::UNREACHED
        };
    }

    /// Relaxes arc `u -> v` with the delay guard and relabel rule shared by
    /// the label-setting and label-correcting variants.
    ///
    /// The guard is inclusive (`D(u) + t <= bound`): a route whose delay
    /// equals the bound is accepted.
    #[inline]
    pub(crate) fn relax(&mut self, u: NodeId, v: NodeId, link_rate: f64, link_delay: f64) {
        let from = self.labels[u.0];
        let to = self.labels[v.0];
        let delay = from.delay + link_delay;
        if delay <= self.bound {
            let cap = if link_rate < from.rate {
                link_rate
            } else {
                from.rate
            };
            if cap > to.rate || to.delay > self.bound {
                self.relabel(v, u, cap, delay);
            }
        } else if to.delay > self.bound && to.is_reached() {
            self.invalidate(v);
        }
    }

    /// Walks the label's recorded route back to the source.
    pub fn extract_walk(&self, destination: NodeId) -> Result<Vec<NodeId>, RouteError> {
        let no_path = RouteError::NoPath { from: self.source, to: destination };
        let mut step = self.labels.get(destination.0).ok_or(no_path.clone())?.trail;
        if step.is_none() {
            return Err(no_path);
        }
        let mut walk = Vec::new();
        while let Some(idx) = step {
            let s = self.trails[idx];
            walk.push(s.node);
            assert!(walk.len() <= self.trails.len(), "cyclic trail in label table");
            step = s.prev;
        }
        walk.reverse();
        debug_assert_eq!(walk.first(), Some(&self.source));
        Ok(walk)
    }

    /// The route labelled for `destination` as a [`Path`].
    pub fn extract_path(&self, graph: &Graph, destination: NodeId) -> Result<Path, RouteError> {
        let walk = self.extract_walk(destination)?;
        Path::from_nodes(graph, &walk).map_err(|_| RouteError::NoPath { from: self.source, to: destination })
    }

    /// Packages the label for `destination` as a route result.
    pub fn route(&self, graph: &Graph, destination: NodeId) -> RouteResult {
        let query = RouteQuery::new(self.source, destination, self.bound);
        if destination == self.source {
            return RouteResult::trivial(self.source);
        }
        match self.extract_walk(destination) {
            Ok(walk) => RouteResult::from_walk(graph, &query, &walk),
            Err(_) => RouteResult::Infeasible,
        }
    }
}
