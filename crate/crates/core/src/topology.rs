//! Random geometric topologies in the style of a wireless mesh deployment.
//!
//! Generation is a pure function of [`TopologyParams`]. The random stream is
//! Xoshiro256** whose 256-bit state is filled by SplitMix64 from the 64-bit
//! seed. A uniform draw in `[0, 1)` takes the top 53 bits of the next output,
//! `(next_u64() >> 11) * 2^-53`. Draw order:
//!
//! 1. for each node `i` in `0..n`: `x = side * u`, then `y = side * u`;
//! 2. for each pair `(i, j)` with `i < j` in lexicographic order whose
//!    Euclidean distance is at most the radius: the rate draw, then the delay
//!    draw. Constant models consume no draws.
//!
//! A uniform model on `[lo, hi)` maps `u` to `lo + (hi - lo) * u`, clamped
//! below `hi`.

use std::collections::VecDeque;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, NodeId};

/// Distribution of a per-link attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeModel {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl AttributeModel {
    fn draw(&self, rng: &mut TopologyRng) -> f64 {
        match *self {
            AttributeModel::Constant { value } => value,
            AttributeModel::Uniform { lo, hi } => {
                let v = lo + (hi - lo) * rng.unit();
                if v < hi {
                    v
                } else {
                    hi.next_down()
                }
            }
        }
    }

    fn check(&self, what: &str, strictly_positive: bool) -> Result<(), TopologyError> {
        let ok_value = |v: f64| v.is_finite() && if strictly_positive { v > 0.0 } else { v >= 0.0 };
        match *self {
            AttributeModel::Constant { value } if ok_value(value) => Ok(()),
            AttributeModel::Uniform { lo, hi } if ok_value(lo) && hi.is_finite() && lo < hi => {
                Ok(())
            }
            other => Err(TopologyError::InvalidParams(format!(
                "bad {what} model {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologyParams {
    pub n: usize,
    /// Side of the square deployment area, metres.
    pub area_side: f64,
    /// Coverage radius, metres.
    pub radius: f64,
    pub seed: u64,
    /// Link rate model, Mbps.
    pub rate_model: AttributeModel,
    /// Link delay model, ms.
    pub delay_model: AttributeModel,
}

impl Default for TopologyParams {
    /// 50 nodes on 1000 m x 1000 m with 200 m coverage. Rates are uniform on
    /// [1, 10) Mbps and every link takes 2 ms.
    fn default() -> Self {
        TopologyParams {
            n: 50,
            area_side: 1000.0,
            radius: 200.0,
            seed: 0,
            rate_model: AttributeModel::Uniform { lo: 1.0, hi: 10.0 },
            delay_model: AttributeModel::Constant { value: 2.0 },
        }
    }
}

impl TopologyParams {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.n == 0 {
            return Err(TopologyError::InvalidParams("n must be at least 1".into()));
        }
        if !(self.area_side > 0.0 && self.area_side.is_finite()) {
            return Err(TopologyError::InvalidParams(format!(
                "area side must be positive, got {}",
                self.area_side
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(TopologyError::InvalidParams(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        self.rate_model.check("rate", true)?;
        self.delay_model.check("delay", false)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("invalid topology parameters: {0}")]
    InvalidParams(String),
}

struct TopologyRng(Xoshiro256StarStar);

impl TopologyRng {
    fn new(seed: u64) -> Self {
        TopologyRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// True when two positions are within coverage of each other.
pub fn within_range(a: (f64, f64), b: (f64, f64), radius: f64) -> bool {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy <= radius * radius
}

pub fn generate_topology(params: &TopologyParams) -> Result<Graph, TopologyError> {
    params.validate()?;
    let mut rng = TopologyRng::new(params.seed);
    let positions: Vec<(f64, f64)> = (0..params.n)
        .map(|_| {
            let x = params.area_side * rng.unit();
            let y = params.area_side * rng.unit();
            (x, y)
        })
        .collect();
    let mut builder = GraphBuilder::undirected(params.n);
    for i in 0..params.n {
        for j in i + 1..params.n {
            if within_range(positions[i], positions[j], params.radius) {
                let rate = params.rate_model.draw(&mut rng);
                let delay = params.delay_model.draw(&mut rng);
                builder.add_link(i, j, rate, delay);
            }
        }
    }
    builder
        .positions(positions)
        .build()
        .map_err(|e| TopologyError::InvalidParams(e.to_string()))
}

/// Whether `a` and `b` are joined by any chain of links, ignoring direction
/// and link attributes.
pub fn is_connected(graph: &Graph, a: NodeId, b: NodeId) -> bool {
    if a == b {
        return true;
    }
    let n = graph.node_count();
    let mut neighbours = vec![Vec::new(); n];
    for link in graph.links() {
        neighbours[link.from.0].push(link.to.0);
        neighbours[link.to.0].push(link.from.0);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([a.0]);
    seen[a.0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &neighbours[u] {
            if v == b.0 {
                return true;
            }
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_graph, cg};

    fn params(n: usize, seed: u64) -> TopologyParams {
        TopologyParams {
            n,
            seed,
            ..TopologyParams::default()
        }
    }

    #[test]
    fn links_respect_coverage_radius() {
        for seed in 0..20 {
            let g = generate_topology(&params(50, seed)).unwrap();
            let pos = g.positions().unwrap();
            for l in g.links() {
                let (a, b) = (pos[l.from.0], pos[l.to.0]);
                let dist = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                assert!(dist <= 200.0 + 1e-9, "link of {dist} m");
            }
        }
    }

    #[test]
    fn single_node_has_no_links() {
        let g = generate_topology(&params(1, 3)).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_topology(&params(50, 11)).unwrap();
        let b = generate_topology(&params(50, 11)).unwrap();
        assert_eq!(a, b);
        let c = generate_topology(&params(50, 12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn first_draws_are_pinned() {
        // Reference values from a separate SplitMix64 + xoshiro256** implementation.
        let p = TopologyParams {
            n: 3,
            radius: 2000.0,
            seed: 7,
            ..TopologyParams::default()
        };
        let g = generate_topology(&p).unwrap();
        let expected = [
            (700.5764821796896, 278.7512294737843),
            (839.6274618764198, 981.0977250149351),
            (990.8602788330683, 872.773938745132),
        ];
        assert_eq!(g.positions().unwrap(), &expected);
        let rates: Vec<f64> = g.physical_links().map(|l| l.rate).collect();
        assert_eq!(rates, [1.5467687154353453, 1.9399221031853044, 4.633358734922739]);
    }

    #[test]
    fn attribute_draws_stay_in_bounds() {
        let p = TopologyParams {
            n: 40,
            radius: 400.0,
            seed: 5,
            rate_model: AttributeModel::Uniform { lo: 2.0, hi: 3.0 },
            delay_model: AttributeModel::Uniform { lo: 0.5, hi: 1.5 },
            ..TopologyParams::default()
        };
        let g = generate_topology(&p).unwrap();
        assert!(g.arc_count() > 0);
        for l in g.links() {
            assert!((2.0..3.0).contains(&l.rate));
            assert!((0.5..1.5).contains(&l.delay));
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = [
            TopologyParams { n: 0, ..params(1, 0) },
            TopologyParams { radius: 0.0, ..params(5, 0) },
            TopologyParams { area_side: -1.0, ..params(5, 0) },
            TopologyParams {
                rate_model: AttributeModel::Uniform { lo: 0.0, hi: 4.0 },
                ..params(5, 0)
            },
            TopologyParams {
                rate_model: AttributeModel::Uniform { lo: 5.0, hi: 4.0 },
                ..params(5, 0)
            },
            TopologyParams {
                delay_model: AttributeModel::Constant { value: -2.0 },
                ..params(5, 0)
            },
        ];
        for p in bad {
            assert!(matches!(generate_topology(&p), Err(TopologyError::InvalidParams(_))));
        }
    }

    #[test]
    fn connectivity() {
        let g = canonical_graph();
        assert!(is_connected(&g, cg::U, cg::Y));
        let one = generate_topology(&params(1, 0)).unwrap();
        assert!(is_connected(&one, NodeId(0), NodeId(0)));
        let two = GraphBuilder::undirected(2).build().unwrap();
        assert!(!is_connected(&two, NodeId(0), NodeId(1)));
    }
}
