//! Counterexample bundles: a directory holding `graph.json`, `query.json` and
//! `results.json` for one instance where the algorithms disagreed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Decimal, GraphFile, IoError, RouteRecord};
use crate::bench::{compare_on_instance, AgreementReport, Check, InstanceDescriptor};
use crate::graph::Graph;
use crate::route::RouteQuery;

/// Overrides the directory bundles are written to.
pub const COUNTEREXAMPLE_DIR_ENV: &str = "MESHROUTE_COUNTEREXAMPLE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct QueryRecord {
    source: String,
    destination: String,
    bound_ms: Decimal,
}

/// Serializable agreement report, with nodes under their names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub instance: InstanceDescriptor,
    pub results: BTreeMap<String, RouteRecord>,
    pub matches_oracle: BTreeMap<String, Check>,
    pub sound: BTreeMap<String, bool>,
    pub oracle: RouteRecord,
    pub brute_force: Option<RouteRecord>,
    pub oracles_agree: Check,
    pub agree_rates: bool,
}

impl ReportRecord {
    pub fn from_report(graph: &Graph, report: &AgreementReport) -> Self {
        let mut results = BTreeMap::new();
        let mut matches_oracle = BTreeMap::new();
        let mut sound = BTreeMap::new();
        for o in &report.outcomes {
            let key = o.algorithm.name().to_string();
            let record = match &o.result {
                Ok(r) => RouteRecord::from_result(graph, r),
                Err(e) => RouteRecord::from_error(e),
            };
            results.insert(key.clone(), record);
            matches_oracle.insert(key.clone(), o.matches_oracle);
            sound.insert(key, o.sound);
        }
        ReportRecord {
            instance: report.instance.clone(),
            results,
            matches_oracle,
            sound,
            oracle: RouteRecord::from_result(graph, &report.oracle),
            brute_force: report
                .brute_force
                .as_ref()
                .map(|r| RouteRecord::from_result(graph, r)),
            oracles_agree: report.oracles_agree,
            agree_rates: report.agree_rates,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CounterexampleStore {
    root: PathBuf,
}

impl CounterexampleStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CounterexampleStore { root: root.into() }
    }

    /// Uses the directory named by [`COUNTEREXAMPLE_DIR_ENV`] when set.
    pub fn from_env_or(default: impl Into<PathBuf>) -> Self {
        match std::env::var_os(COUNTEREXAMPLE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => CounterexampleStore::new(dir),
            _ => CounterexampleStore::new(default),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn persist(&self, graph: &Graph, report: &AgreementReport) -> Result<PathBuf, IoError> {
        let name: String = report
            .instance
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        let dir = self.root.join(name);
        fs::create_dir_all(&dir).map_err(|e| IoError::io(&dir, e))?;
        let generator = report.instance.params;
        write_json(&dir.join("graph.json"), &GraphFile::from_graph(graph, generator))?;
        let query = QueryRecord {
            source: graph.name(report.query.source).to_string(),
            destination: graph.name(report.query.destination).to_string(),
            bound_ms: Decimal(report.query.bound),
        };
        write_json(&dir.join("query.json"), &query)?;
        write_json(&dir.join("results.json"), &ReportRecord::from_report(graph, report))?;
        Ok(dir)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| IoError::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::json(path, e))
}

/// Reruns a bundle. Returns the stored report and the freshly computed one.
pub fn replay_bundle(dir: &Path) -> Result<(ReportRecord, ReportRecord), IoError> {
    let graph = read_json::<GraphFile>(&dir.join("graph.json"))?.to_graph()?;
    let query: QueryRecord = read_json(&dir.join("query.json"))?;
    let stored: ReportRecord = read_json(&dir.join("results.json"))?;
    let node = |name: &str| {
        graph
            .node_by_name(name)
            .ok_or_else(|| IoError::Format(format!("query names unknown node `{name}`")))
    };
    let q = RouteQuery::new(node(&query.source)?, node(&query.destination)?, query.bound_ms.0);
    let report = compare_on_instance(&graph, &q, stored.instance.clone(), None)
        .map_err(|e| IoError::Format(e.to_string()))?;
    Ok((stored, ReportRecord::from_report(&graph, &report)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_graph, cg};

    #[test]
    fn persist_and_replay() {
        let tmp = tempfile::tempdir().unwrap();
        let store = CounterexampleStore::new(tmp.path());
        let g = canonical_graph();
        let q = RouteQuery::new(cg::U, cg::Y, 6.0);
        let report = compare_on_instance(&g, &q, InstanceDescriptor::named("cg u/y"), None).unwrap();
        let dir = store.persist(&g, &report).unwrap();
        assert_eq!(dir.file_name().unwrap(), "cg_u_y");
        for f in ["graph.json", "query.json", "results.json"] {
            assert!(dir.join(f).is_file());
        }
        let (stored, replayed) = replay_bundle(&dir).unwrap();
        assert_eq!(stored, replayed);
        assert_eq!(stored.results["dijkstra"].path.as_ref().unwrap(), &["u", "a", "w", "y"]);
    }
}
