//! Delay-bounded maximum-capacity routing for wireless mesh topologies.
//!
//! Every algorithm here looks for the route with the largest bottleneck rate
//! (the minimum link rate along it) among routes whose summed link delay is
//! at most a bound. Four dynamic-programming variants are provided in
//! [`routing`], two exact reference solvers in [`oracle`], a random geometric
//! topology generator in [`topology`], and an agreement and timing harness in
//! [`bench`].

pub mod bench;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod path;
pub mod route;
pub mod routing;
pub mod topology;

pub use graph::{validate_graph, Diagnostic, Graph, GraphBuilder, GraphError, Link, LinkId, NodeId, UNBOUNDED_RATE};
pub use path::{path_concat, path_delay, path_rate, Path};
pub use route::{Route, RouteError, RouteQuery, RouteResult, Status};
pub use routing::Algorithm;
pub use topology::{generate_topology, is_connected, AttributeModel, TopologyParams};
