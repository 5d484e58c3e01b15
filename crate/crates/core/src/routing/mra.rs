//! Delay-indexed dynamic program (mesh routing algorithm).
//!
//! For a fixed destination `w`, `P_d(u)` is the widest walk from `u` to `w`
//! whose delay is exactly `d` ticks. Entries are seeded with direct links
//! whose delay is `d`, then extended one link at a time:
//! `P_d(u) = (u, v) + P_{d - t(u, v)}(v)` whenever that is wider.

use crate::graph::{Graph, LinkId, NodeId};
use crate::route::{RouteError, RouteQuery, RouteResult};

/// Largest table (`layers x nodes`) a single query may allocate.
pub const MAX_TABLE_CELLS: usize = 50_000_000;

const MAX_DENOMINATOR: u64 = 1000;
const MAX_COMMON_DENOMINATOR: u64 = 1_000_000;
const ALIGN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MraOptions {
    /// Delay grid in ms. Derived from the link delays and bound when absent.
    pub tick: Option<f64>,
    /// Answer with the widest route of delay exactly equal to the bound,
    /// instead of the widest route within it.
    pub exact_delay: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    rate: f64,
    /// First link of the walk; `None` only for the destination at delay 0.
    first: Option<LinkId>,
}

/// Filled `(delay tick, node)` table for one destination.
#[derive(Debug, Clone)]
pub struct MraTable {
    destination: NodeId,
    tick: f64,
    n: usize,
    layers: usize,
    link_ticks: Vec<u64>,
    cells: Vec<Option<Entry>>,
}

impl MraTable {
    pub fn tick(&self) -> f64 {
        self.tick
    }

    /// Number of delay ticks covered, inclusive of zero.
    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Rate of the widest walk from `node` with delay exactly `ticks`.
    pub fn rate_at(&self, node: NodeId, ticks: usize) -> Option<f64> {
        self.cell(ticks, node).map(|e| e.rate)
    }

    fn cell(&self, ticks: usize, node: NodeId) -> Option<Entry> {
        self.cells[ticks * self.n + node.0]
    }

    pub fn walk_from(&self, graph: &Graph, node: NodeId, ticks: usize) -> Option<Vec<NodeId>> {
        self.cell(ticks, node)?;
        let (mut at, mut d) = (node, ticks);
        let mut walk = vec![at];
        while let Some(entry) = self.cell(d, at) {
            let Some(id) = entry.first else { break };
            let link = graph.link(id);
            at = link.to;
            d -= self.link_ticks[id.0] as usize;
            walk.push(at);
            assert!(walk.len() <= self.cells.len() + 1, "cyclic MRA table");
        }
        debug_assert_eq!(at, self.destination);
        Some(walk)
    }
}

/// Chooses the delay grid: the greatest common divisor of all link delays and
/// the bound when each is a rational with a small denominator, else 1 ms.
pub fn default_tick(graph: &Graph, bound: f64) -> f64 {
    let values = graph
        .links()
        .iter()
        .map(|l| l.delay)
        .chain(std::iter::once(bound));
    let mut common = 1u64;
    let mut ratios = Vec::new();
    for v in values {
        let Some((num, den)) = as_ratio(v) else {
            return 1.0;
        };
        common = lcm(common, den);
        if common > MAX_COMMON_DENOMINATOR {
            return 1.0;
        }
        ratios.push((num, den));
    }
    let g = ratios
        .iter()
        .map(|&(num, den)| num * (common / den))
        .fold(0, gcd);
    if g == 0 {
        1.0
    } else {
        g as f64 / common as f64
    }
}

fn as_ratio(x: f64) -> Option<(u64, u64)> {
    if !(0.0..=1e12).contains(&x) {
        return None;
    }
    (1..=MAX_DENOMINATOR).find_map(|den| {
        let scaled = x * den as f64;
        let num = scaled.round();
        ((scaled - num).abs() <= ALIGN_TOLERANCE * num.max(1.0)).then_some((num as u64, den))
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn to_ticks(value: f64, tick: f64, what: &str) -> Result<u64, RouteError> {
    let ratio = value / tick;
    let k = ratio.round();
    if (ratio - k).abs() > ALIGN_TOLERANCE * k.max(1.0) || !k.is_finite() {
        return Err(RouteError::Quantization(format!(
            "{what} {value} ms is not a multiple of the {tick} ms tick"
        )));
    }
    Ok(k as u64)
}

/// Fills the table for `destination` up to `bound`.
pub fn mra_table(
    graph: &Graph,
    destination: NodeId,
    bound: f64,
    tick: Option<f64>,
) -> Result<MraTable, RouteError> {
    RouteQuery::new(destination, destination, bound).validate(graph)?;
    let tick = tick.unwrap_or_else(|| default_tick(graph, bound));
    if !(tick > 0.0 && tick.is_finite()) {
        return Err(RouteError::Quantization(format!("tick must be positive, got {tick}")));
    }
    let link_ticks = graph
        .links()
        .iter()
        .map(|l| to_ticks(l.delay, tick, "link delay"))
        .collect::<Result<Vec<_>, _>>()?;
    let max_ticks = to_ticks(bound, tick, "delay bound")?;
    let n = graph.node_count();
    let layers = max_ticks as usize + 1;
    if layers.saturating_mul(n) > MAX_TABLE_CELLS {
        return Err(RouteError::Quantization(format!(
            "{layers} delay ticks over {n} nodes exceeds the table limit"
        )));
    }
    let has_zero_delay = link_ticks.contains(&0);
    let mut cells: Vec<Option<Entry>> = vec![None; layers * n];
    cells[destination.0] = Some(Entry {
        rate: crate::graph::UNBOUNDED_RATE,
        first: None,
    });

    for d in 0..layers {
        // Direct links of delay exactly d.
        for u in graph.nodes().filter(|&u| u != destination) {
            for &id in graph.outgoing(u) {
                let link = graph.link(id);
                if link.to == destination && link_ticks[id.0] as usize == d {
                    let cell = &mut cells[d * n + u.0];
                    if cell.is_none_or(|e| link.rate > e.rate) {
                        *cell = Some(Entry {
                            rate: link.rate,
                            first: Some(id),
                        });
                    }
                }
            }
        }
        // Extensions. Zero-delay links read the layer being filled, so the
        // pass repeats until nothing widens.
        loop {
            let mut changed = false;
            for u in graph.nodes().filter(|&u| u != destination) {
                for &id in graph.outgoing(u) {
                    let link = graph.link(id);
                    let t = link_ticks[id.0] as usize;
                    if t > d || link.to == destination {
                        continue;
                    }
                    let Some(rest) = cells[(d - t) * n + link.to.0] else {
                        continue;
                    };
                    let rate = if link.rate < rest.rate {
                        link.rate
                    } else {
                        rest.rate
                    };
                    let cell = &mut cells[d * n + u.0];
                    if cell.is_none_or(|e| e.rate < rate) {
                        *cell = Some(Entry {
                            rate,
                            first: Some(id),
                        });
                        changed = true;
                    }
                }
            }
            if !(has_zero_delay && changed) {
                break;
            }
        }
    }
    Ok(MraTable {
        destination,
        tick,
        n,
        layers,
        link_ticks,
        cells,
    })
}

pub fn route_mra(
    graph: &Graph,
    query: &RouteQuery,
    options: MraOptions,
) -> Result<RouteResult, RouteError> {
    query.validate(graph)?;
    let table = mra_table(graph, query.destination, query.bound, options.tick)?;
    if query.source == query.destination {
        return Ok(RouteResult::trivial(query.source));
    }
    let chosen = if options.exact_delay {
        let d = table.layers - 1;
        table.rate_at(query.source, d).map(|_| d)
    } else {
        let mut best: Option<(usize, f64)> = None;
        for d in 0..table.layers {
            if let Some(rate) = table.rate_at(query.source, d) {
                if best.is_none_or(|(_, r)| rate > r) {
                    best = Some((d, rate));
                }
            }
        }
        best.map(|(d, _)| d)
    };
    Ok(match chosen.and_then(|d| table.walk_from(graph, query.source, d)) {
        Some(walk) => RouteResult::from_walk(graph, query, &walk),
        None => RouteResult::Infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::oracle::{canonical_graph, cg};

    fn opts(tick: f64) -> MraOptions {
        MraOptions {
            tick: Some(tick),
            exact_delay: false,
        }
    }

    #[test]
    fn canonical_example() {
        let g = canonical_graph();
        let r = route_mra(&g, &RouteQuery::new(cg::U, cg::Y, 6.0), opts(2.0)).unwrap();
        let route = r.route().unwrap();
        assert_eq!((route.rate, route.delay), (5.0, 6.0));
        assert_eq!(route.path.nodes(), &[cg::U, cg::A, cg::W, cg::Y]);
    }

    #[test]
    fn recurrence_inner_terms() {
        // P*(u, w) at 4 ms is min(5, 7) = 5; via w the 6 ms route to y is
        // min(5, 6) = 5 and via x it is min(8 or 9, 3) = 3.
        let g = canonical_graph();
        let r = route_mra(&g, &RouteQuery::new(cg::U, cg::W, 4.0), opts(2.0)).unwrap();
        assert_eq!(r.rate(), Some(5.0));
        let to_y = mra_table(&g, cg::Y, 6.0, Some(2.0)).unwrap();
        assert_eq!(to_y.rate_at(cg::W, 1), Some(6.0));
        assert_eq!(to_y.rate_at(cg::X, 1), Some(3.0));
        assert_eq!(to_y.rate_at(cg::U, 3), Some(5.0));
    }

    #[test]
    fn misaligned_tick_is_rejected() {
        let g = canonical_graph();
        let err = route_mra(&g, &RouteQuery::new(cg::U, cg::Y, 6.0), opts(3.0)).unwrap_err();
        assert!(matches!(err, RouteError::Quantization(_)));
    }

    #[test]
    fn exact_delay_mode() {
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::Y, 6.0);
        let exact = MraOptions {
            tick: Some(2.0),
            exact_delay: true,
        };
        assert_eq!(route_mra(&g, &q, exact).unwrap().rate(), Some(5.0));
        // No u-y walk takes exactly 8 ms (walk parity), but one fits within 8.
        let q8 = RouteQuery::new(cg::U, cg::Y, 8.0);
        assert_eq!(route_mra(&g, &q8, exact).unwrap(), RouteResult::Infeasible);
        assert_eq!(route_mra(&g, &q8, opts(2.0)).unwrap().rate(), Some(5.0));
    }

    #[test]
    fn infeasible_and_trivial() {
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::Y, 4.0);
        assert_eq!(route_mra(&g, &q, opts(2.0)).unwrap(), RouteResult::Infeasible);
        let q = RouteQuery::new(cg::U, cg::U, 0.0);
        let r = route_mra(&g, &q, MraOptions::default()).unwrap();
        assert_eq!(r.route().unwrap().path.nodes(), &[cg::U]);
    }

    #[test]
    fn default_tick_is_delay_gcd() {
        let g = canonical_graph();
        assert_eq!(default_tick(&g, 6.0), 2.0);
        assert_eq!(default_tick(&g, 5.0), 1.0);
        let mut b = GraphBuilder::undirected(3);
        b.add_link(0, 1, 1.0, 0.5).add_link(1, 2, 1.0, 1.25);
        let g = b.build().unwrap();
        assert_eq!(default_tick(&g, 2.0), 0.25);
        let mut b = GraphBuilder::undirected(2);
        b.add_link(0, 1, 1.0, std::f64::consts::PI);
        assert_eq!(default_tick(&b.build().unwrap(), 4.0), 1.0);
    }

    #[test]
    fn zero_delay_links_chain_within_a_layer() {
        let mut b = GraphBuilder::undirected(4);
        b.add_link(0, 1, 9.0, 0.0)
            .add_link(1, 2, 8.0, 0.0)
            .add_link(2, 3, 7.0, 1.0)
            .add_link(0, 3, 1.0, 1.0);
        let g = b.build().unwrap();
        let r = route_mra(&g, &RouteQuery::new(NodeId(0), NodeId(3), 1.0), opts(1.0)).unwrap();
        let route = r.route().unwrap();
        assert_eq!(route.rate, 7.0);
        assert_eq!(route.path.nodes(), &[NodeId(0), NodeId(1), NodeId(2), NodeId(3)]);
    }
}
