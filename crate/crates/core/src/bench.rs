//! Agreement harness and runtime measurement.
//!
//! [`compare_on_instance`] runs every algorithm and both exact solvers on one
//! query and records where they disagree. Agreement is judged on rate and
//! feasibility only; several routes may share the optimal rate.

use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::io::CounterexampleStore;
use crate::oracle::{brute_force_route_with_budget, threshold_exact_route, OracleError, DEFAULT_BUDGET};
use crate::path::{path_delay, path_rate};
use crate::route::{RouteError, RouteQuery, RouteResult};
use crate::routing::{Algorithm, MraOptions};
use crate::topology::{generate_topology, AttributeModel, TopologyParams};

/// Outcome of checking one result against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Match,
    Mismatch,
    Unchecked,
}

impl Check {
    fn of(ok: bool) -> Check {
        if ok {
            Check::Match
        } else {
            Check::Mismatch
        }
    }
}

/// Where an instance came from, so a counterexample can be regenerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<TopologyParams>,
}

impl InstanceDescriptor {
    pub fn named(label: impl Into<String>) -> Self {
        InstanceDescriptor {
            label: label.into(),
            params: None,
        }
    }

    pub fn generated(params: TopologyParams, query: &RouteQuery) -> Self {
        InstanceDescriptor {
            label: format!(
                "seed{}-n{}-{}-{}-tau{}",
                params.seed, params.n, query.source, query.destination, query.bound
            ),
            params: Some(params),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub result: Result<RouteResult, RouteError>,
    /// Rate and status equal to the exact optimum.
    pub matches_oracle: Check,
    /// A found route is feasible, simple, joins the query endpoints and
    /// reports the metrics recomputed from its links.
    pub sound: bool,
}

impl AlgorithmOutcome {
    pub fn rate(&self) -> Option<f64> {
        self.result.as_ref().ok().and_then(RouteResult::rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub instance: InstanceDescriptor,
    pub query: RouteQuery,
    pub outcomes: Vec<AlgorithmOutcome>,
    /// Threshold-decomposition optimum; always available.
    pub oracle: RouteResult,
    /// Enumeration optimum, absent when its budget ran out.
    pub brute_force: Option<RouteResult>,
    pub oracles_agree: Check,
    /// Every algorithm that ran returned the same rate and status.
    pub agree_rates: bool,
    pub counterexample_path: Option<PathBuf>,
}

impl AgreementReport {
    pub fn outcome(&self, algorithm: Algorithm) -> Option<&AlgorithmOutcome> {
        self.outcomes.iter().find(|o| o.algorithm == algorithm)
    }

    /// True when nothing needs to be persisted.
    pub fn is_clean(&self) -> bool {
        self.agree_rates
            && self.oracles_agree != Check::Mismatch
            && self
                .outcomes
                .iter()
                .all(|o| o.sound && o.matches_oracle != Check::Mismatch)
    }
}

fn same_outcome(a: &RouteResult, b: &RouteResult) -> bool {
    a.status() == b.status() && a.rate() == b.rate()
}

/// Checks a result's internal consistency against the graph and query.
pub fn is_sound(graph: &Graph, query: &RouteQuery, result: &RouteResult) -> bool {
    let Some(route) = result.route() else {
        return true;
    };
    let path = &route.path;
    path.source() == query.source
        && path.last() == query.destination
        && path.is_simple()
        && path_rate(path, graph).is_ok_and(|r| r == route.rate)
        && path_delay(path, graph).is_ok_and(|d| d == route.delay)
        && route.delay <= query.bound
}

/// Runs all four algorithms and both exact solvers on one query. When the
/// report is not clean and a store is given, a counterexample bundle is
/// written and its location recorded.
pub fn compare_on_instance(
    graph: &Graph,
    query: &RouteQuery,
    instance: InstanceDescriptor,
    store: Option<&CounterexampleStore>,
) -> Result<AgreementReport, RouteError> {
    query.validate(graph)?;
    let oracle = threshold_exact_route(graph, query)?;
    let brute_force = match brute_force_route_with_budget(graph, query, DEFAULT_BUDGET) {
        Ok(r) => Some(r),
        Err(OracleError::BudgetExceeded(_)) => None,
        Err(OracleError::Route(e)) => return Err(e),
    };
    let oracles_agree = match &brute_force {
        Some(b) => Check::of(same_outcome(b, &oracle)),
        None => Check::Unchecked,
    };
    let outcomes: Vec<AlgorithmOutcome> = Algorithm::ALL
        .iter()
        .map(|&algorithm| {
            let result = algorithm.route(graph, query, MraOptions::default());
            let (matches_oracle, sound) = match &result {
                Ok(r) => (Check::of(same_outcome(r, &oracle)), is_sound(graph, query, r)),
                Err(_) => (Check::Unchecked, true),
            };
            AlgorithmOutcome {
                algorithm,
                result,
                matches_oracle,
                sound,
            }
        })
        .collect();
    let ran: Vec<&RouteResult> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
    let agree_rates = ran.windows(2).all(|w| same_outcome(w[0], w[1]));
    let mut report = AgreementReport {
        instance,
        query: *query,
        outcomes,
        oracle,
        brute_force,
        oracles_agree,
        agree_rates,
        counterexample_path: None,
    };
    if let Some(store) = store {
        if !report.is_clean() {
            match store.persist(graph, &report) {
                Ok(dir) => report.counterexample_path = Some(dir),
                Err(e) => log::error!("could not persist counterexample: {e}"),
            }
        }
    }
    Ok(report)
}

/// Generator settings for agreement corpora: small dense-ish instances with
/// 2 ms links and uniform(1, 10) Mbps rates.
pub fn corpus_params(n: usize, seed: u64) -> TopologyParams {
    TopologyParams {
        n,
        area_side: 1000.0,
        radius: 450.0,
        seed,
        rate_model: AttributeModel::Uniform { lo: 1.0, hi: 10.0 },
        delay_model: AttributeModel::Constant { value: 2.0 },
    }
}

/// Picks a distinct source and destination for an instance, deterministically
/// from its seed.
pub fn query_for(params: &TopologyParams, bound: f64) -> RouteQuery {
    use crate::graph::NodeId;
    // SplitMix64 finaliser over the seed; independent of the topology stream.
    let mut z = params.seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let n = params.n as u64;
    if n < 2 {
        return RouteQuery::new(NodeId(0), NodeId(0), bound);
    }
    let source = z % n;
    let offset = 1 + (z >> 32) % (n - 1);
    RouteQuery::new(
        NodeId(source as usize),
        NodeId(((source + offset) % n) as usize),
        bound,
    )
}

/// Generates and compares one corpus instance.
pub fn compare_generated(
    params: TopologyParams,
    bound: f64,
    store: Option<&CounterexampleStore>,
) -> Result<(Graph, AgreementReport), RouteError> {
    let graph = generate_topology(&params).map_err(|e| RouteError::InvalidQuery(e.to_string()))?;
    let query = query_for(&params, bound);
    let report = compare_on_instance(&graph, &query, InstanceDescriptor::generated(params, &query), store)?;
    Ok((graph, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub algorithm: String,
    pub n: usize,
    /// Physical link count.
    pub links: usize,
    pub repetitions: usize,
    pub median_ms: f64,
    /// Fastest and slowest repetition.
    pub spread_ms: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub algorithm: String,
    pub slope: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("need at least {min_sizes} sizes spanning {min_span}x, got {sizes} sizes spanning {span:.2}x")]
    InsufficientData {
        min_sizes: usize,
        min_span: f64,
        sizes: usize,
        span: f64,
    },
    #[error("invalid benchmark setup: {0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub repetitions: usize,
    /// Expected node degree; the radius is held fixed and the area grows with n.
    pub mean_degree: f64,
    pub seed: u64,
    pub bound: f64,
    /// Each repetition loops the timed call until at least this long.
    pub min_sample_ms: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repetitions: 5,
            mean_degree: 16.0,
            seed: 1,
            bound: 50.0,
            min_sample_ms: 5.0,
        }
    }
}

pub const MIN_REPETITIONS: usize = 5;

/// Fixed-density topology: the area grows with `n` so the expected degree
/// (ignoring border effects) stays at `mean_degree`.
pub fn fixed_density_params(n: usize, mean_degree: f64, seed: u64) -> TopologyParams {
    let side = 1000.0 * (n as f64 / 50.0).sqrt();
    let radius = side * (mean_degree / (std::f64::consts::PI * n as f64)).sqrt();
    TopologyParams {
        n,
        area_side: side,
        radius,
        seed,
        ..TopologyParams::default()
    }
}

/// Times `run` and reports the per-call median over `repetitions` samples.
/// One warm-up call is discarded, and each sample loops `run` enough times
/// to last `min_sample_ms`.
pub fn time_closure(
    algorithm: &str,
    n: usize,
    links: usize,
    repetitions: usize,
    min_sample_ms: f64,
    mut run: impl FnMut(),
) -> TimingRecord {
    let repetitions = repetitions.max(MIN_REPETITIONS);
    let start = Instant::now();
    run();
    let warm = start.elapsed().as_secs_f64() * 1e3;
    let batch = if warm > 0.0 {
        ((min_sample_ms / warm).ceil() as usize).clamp(1, 1_000_000)
    } else {
        1_000_000
    };
    let mut samples: Vec<f64> = (0..repetitions)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                run();
            }
            start.elapsed().as_secs_f64() * 1e3 / batch as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let median = if repetitions % 2 == 1 {
        samples[repetitions / 2]
    } else {
        (samples[repetitions / 2 - 1] + samples[repetitions / 2]) / 2.0
    };
    TimingRecord {
        algorithm: algorithm.to_string(),
        n,
        links,
        repetitions,
        median_ms: median,
        spread_ms: (samples[0], samples[repetitions - 1]),
    }
}

/// Median runtime of one algorithm on fixed-density graphs of each size.
/// Graphs are generated before timing; the query runs from node 0 to node
/// `n - 1`.
pub fn measure_runtime(
    algorithm: Algorithm,
    sizes: &[usize],
    config: &BenchConfig,
) -> Result<Vec<TimingRecord>, BenchError> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::Setup("sizes must be strictly ascending".into()));
    }
    let graphs = sizes
        .iter()
        .map(|&n| {
            generate_topology(&fixed_density_params(n, config.mean_degree, config.seed))
                .map_err(|e| BenchError::Setup(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut records = Vec::with_capacity(sizes.len());
    for graph in &graphs {
        let n = graph.node_count();
        let query = RouteQuery::new(crate::graph::NodeId(0), crate::graph::NodeId(n - 1), config.bound);
        algorithm
            .route(graph, &query, MraOptions::default())
            .map_err(|e| BenchError::Setup(e.to_string()))?;
        records.push(time_closure(
            algorithm.name(),
            n,
            graph.link_count(),
            config.repetitions,
            config.min_sample_ms,
            || {
                let r = algorithm.route(black_box(graph), black_box(&query), MraOptions::default());
                black_box(r).ok();
            },
        ));
    }
    Ok(records)
}

pub const MIN_FIT_SIZES: usize = 5;
pub const MIN_FIT_SPAN: f64 = 8.0;

/// Least-squares slope of `ln(median)` against `ln(n)`.
pub fn fit_complexity_exponent(records: &[TimingRecord]) -> Result<ExponentFit, BenchError> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let span = match (sizes.first(), sizes.last()) {
        (Some(&lo), Some(&hi)) if lo > 0 => hi as f64 / lo as f64,
        _ => 0.0,
    };
    if sizes.len() < MIN_FIT_SIZES || span < MIN_FIT_SPAN || records.iter().any(|r| r.median_ms <= 0.0) {
        return Err(BenchError::InsufficientData {
            min_sizes: MIN_FIT_SIZES,
            min_span: MIN_FIT_SPAN,
            sizes: sizes.len(),
            span,
        });
    }
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.median_ms.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ExponentFit {
        algorithm: records[0].algorithm.clone(),
        slope,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_graph, cg};

    #[test]
    fn canonical_instance_agrees() {
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::Y, 6.0);
        let r = compare_on_instance(&g, &q, InstanceDescriptor::named("cg"), None).unwrap();
        assert!(r.agree_rates);
        assert_eq!(r.oracles_agree, Check::Match);
        for o in &r.outcomes {
            assert_eq!(o.matches_oracle, Check::Match, "{}", o.algorithm);
            assert!(o.sound);
            assert_eq!(o.rate(), Some(5.0));
        }
        assert!(r.is_clean());
    }

    #[test]
    fn trivial_instance() {
        let g = generate_topology(&TopologyParams {
            n: 1,
            ..TopologyParams::default()
        })
        .unwrap();
        let q = RouteQuery::new(crate::graph::NodeId(0), crate::graph::NodeId(0), 0.0);
        let r = compare_on_instance(&g, &q, InstanceDescriptor::named("one"), None).unwrap();
        for o in &r.outcomes {
            let route = o.result.as_ref().unwrap().route().unwrap().clone();
            assert_eq!(route.rate, f64::INFINITY);
            assert_eq!(route.delay, 0.0);
        }
    }

    fn record(n: usize, ms: f64) -> TimingRecord {
        TimingRecord {
            algorithm: "synthetic".into(),
            n,
            links: n,
            repetitions: 5,
            median_ms: ms,
            spread_ms: (ms, ms),
        }
    }

    #[test]
    fn fit_recovers_power_law() {
        let recs: Vec<_> = [50, 100, 150, 200, 400]
            .iter()
            .map(|&n| record(n, 1e-6 * (n as f64).powi(3)))
            .collect();
        let fit = fit_complexity_exponent(&recs).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn fit_needs_enough_sizes() {
        let four: Vec<_> = [50, 100, 200, 400].iter().map(|&n| record(n, 1.0)).collect();
        assert!(matches!(
            fit_complexity_exponent(&four),
            Err(BenchError::InsufficientData { sizes: 4, .. })
        ));
        let narrow: Vec<_> = [10, 11, 12, 13, 14].iter().map(|&n| record(n, 1.0)).collect();
        assert!(fit_complexity_exponent(&narrow).is_err());
    }

    #[test]
    fn query_pairs_are_distinct_and_in_range() {
        for seed in 0..200 {
            let p = corpus_params(2 + (seed as usize % 9), seed);
            let q = query_for(&p, 4.0);
            assert_ne!(q.source, q.destination);
            assert!(q.source.0 < p.n && q.destination.0 < p.n);
        }
    }

    #[test]
    fn fixed_density_keeps_radius() {
        let a = fixed_density_params(50, 16.0, 0);
        let b = fixed_density_params(400, 16.0, 0);
        assert!((a.radius - b.radius).abs() < 1e-9);
        assert!(b.area_side > a.area_side);
    }
}
