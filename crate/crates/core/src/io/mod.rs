//! Files and formats: the JSON graph format, DOT export, route records and
//! counterexample bundles. Nothing outside this module touches the filesystem.

mod bundle;
mod dot;
mod graph_file;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use bundle::{replay_bundle, CounterexampleStore, ReportRecord, COUNTEREXAMPLE_DIR_ENV};
pub use dot::export_dot;
pub use graph_file::{
    load_graph, save_graph, GraphFile, GraphHeader, LinkRecord, NodeRecord, FORMAT_VERSION,
};

use crate::graph::Graph;
use crate::route::RouteResult;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("malformed graph file: {0}")]
    Format(String),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        IoError::Json {
            path: path.into(),
            source,
        }
    }
}

/// Writes `text` to `path`, replacing any existing file.
pub fn write_text(path: &std::path::Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::io(path, e))
}

/// A real number written as a decimal string (`"7.8151"`, `"inf"`).
///
/// Serialization uses the shortest representation that parses back to the
/// same `f64`. Plain JSON numbers are accepted on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decimal(pub f64);

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Decimal(v)),
            Raw::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Decimal)
                .map_err(|_| serde::de::Error::custom(format!("invalid decimal `{s}`"))),
        }
    }
}

/// Machine-readable form of a route result, with nodes under their names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_mbps: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_ms: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RouteRecord {
    pub fn from_result(graph: &Graph, result: &RouteResult) -> Self {
        match result {
            RouteResult::Found(route) => RouteRecord {
                status: "found".into(),
                path: Some(
                    route
                        .path
                        .nodes()
                        .iter()
                        .map(|&n| graph.name(n).to_string())
                        .collect(),
                ),
                rate_mbps: Some(Decimal(route.rate)),
                delay_ms: Some(Decimal(route.delay)),
                error: None,
            },
            RouteResult::Infeasible => RouteRecord {
                status: "infeasible".into(),
                path: None,
                rate_mbps: None,
                delay_ms: None,
                error: None,
            },
        }
    }

    pub fn from_error(err: &impl fmt::Display) -> Self {
        RouteRecord {
            status: "error".into(),
            path: None,
            rate_mbps: None,
            delay_ms: None,
            error: Some(err.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trips_exactly() {
        for v in [7.8151, 0.1 + 0.2, 1e-300, 123456789.125, f64::INFINITY, 2.0] {
            let s = serde_json::to_string(&Decimal(v)).unwrap();
            let back: Decimal = serde_json::from_str(&s).unwrap();
            assert_eq!(back.0.to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(serde_json::to_string(&Decimal(5.0)).unwrap(), "\"5\"");
        let n: Decimal = serde_json::from_str("2.5").unwrap();
        assert_eq!(n.0, 2.5);
        assert!(serde_json::from_str::<Decimal>("\"abc\"").is_err());
    }
}
