use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::{Decimal, IoError};
use crate::graph::{Graph, GraphBuilder};
use crate::topology::TopologyParams;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub format_version: u32,
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<TopologyParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    #[serde(deserialize_with = "node_name")]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Decimal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    #[serde(deserialize_with = "node_name")]
    pub from: String,
    #[serde(deserialize_with = "node_name")]
    pub to: String,
    pub rate_mbps: Decimal,
    pub delay_ms: Decimal,
}

/// On-disk graph. Undirected files list each physical link once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub header: GraphHeader,
    pub nodes: Vec<NodeRecord>,
    pub links: Vec<LinkRecord>,
}

fn node_name<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Index(u64),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::Text(s) => s,
        Raw::Index(i) => i.to_string(),
    })
}

impl GraphFile {
    pub fn from_graph(graph: &Graph, generator: Option<TopologyParams>) -> Self {
        let nodes = graph
            .nodes()
            .map(|v| {
                let pos = graph.position(v);
                NodeRecord {
                    id: graph.name(v).to_string(),
                    x: pos.map(|p| Decimal(p.0)),
                    y: pos.map(|p| Decimal(p.1)),
                }
            })
            .collect();
        let links = graph
            .physical_links()
            .map(|l| LinkRecord {
                from: graph.name(l.from).to_string(),
                to: graph.name(l.to).to_string(),
                rate_mbps: Decimal(l.rate),
                delay_ms: Decimal(l.delay),
            })
            .collect();
        GraphFile {
            header: GraphHeader {
                format_version: FORMAT_VERSION,
                directed: graph.is_directed(),
                generator,
            },
            nodes,
            links,
        }
    }

    /// Assigns dense ids in node-list order and builds the graph.
    pub fn to_graph(&self) -> Result<Graph, IoError> {
        if self.header.format_version != FORMAT_VERSION {
            return Err(IoError::Format(format!(
                "unsupported format version {}",
                self.header.format_version
            )));
        }
        let mut ids = HashMap::with_capacity(self.nodes.len());
        for (idx, node) in self.nodes.iter().enumerate() {
            if ids.insert(node.id.as_str(), idx).is_some() {
                return Err(IoError::Format(format!("duplicate node id `{}`", node.id)));
            }
        }
        let lookup = |name: &str| {
            ids.get(name)
                .copied()
                .ok_or_else(|| IoError::Format(format!("link refers to unknown node `{name}`")))
        };
        let n = self.nodes.len();
        let mut builder = if self.header.directed {
            GraphBuilder::directed(n)
        } else {
            GraphBuilder::undirected(n)
        };
        for link in &self.links {
            builder.add_link(
                lookup(&link.from)?,
                lookup(&link.to)?,
                link.rate_mbps.0,
                link.delay_ms.0,
            );
        }
        let placed = self.nodes.iter().filter(|r| r.x.is_some() && r.y.is_some()).count();
        if placed == n && n > 0 {
            let pos = self.nodes.iter().map(|r| (r.x.unwrap().0, r.y.unwrap().0)).collect();
            builder = builder.positions(pos);
        } else if self.nodes.iter().any(|r| r.x.is_some() || r.y.is_some()) {
            return Err(IoError::Format("either every node or none has a position".into()));
        }
        builder
            .names(self.nodes.iter().map(|r| r.id.clone()).collect())
            .build()
            .map_err(|e| IoError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph files always serialize");
        s.push('\n');
        s
    }
}

pub fn save_graph(path: &Path, file: &GraphFile) -> Result<(), IoError> {
    fs::write(path, file.to_json()).map_err(|e| IoError::io(path, e))
}

pub fn load_graph(path: &Path) -> Result<GraphFile, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::json(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::canonical_graph;
    use crate::topology::generate_topology;

    #[test]
    fn canonical_round_trip() {
        let g = canonical_graph();
        let file = GraphFile::from_graph(&g, None);
        assert_eq!(file.links.len(), 6);
        let text = file.to_json();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn generated_round_trip_keeps_positions_and_params() {
        let params = TopologyParams {
            seed: 9,
            ..TopologyParams::default()
        };
        let g = generate_topology(&params).unwrap();
        let file = GraphFile::from_graph(&g, Some(params));
        let back: GraphFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(back.header.generator, Some(params));
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn accepts_numeric_ids_and_plain_numbers() {
        let text = r#"{
            "header": {"format_version": 1, "directed": false},
            "nodes": [{"id": 0}, {"id": 1}],
            "links": [{"from": 0, "to": 1, "rate_mbps": 4.5, "delay_ms": "2"}]
        }"#;
        let file: GraphFile = serde_json::from_str(text).unwrap();
        let g = file.to_graph().unwrap();
        assert_eq!(g.link_count(), 1);
        assert_eq!(g.links()[0].rate, 4.5);
        assert_eq!(g.name(crate::graph::NodeId(1)), "1");
    }

    #[test]
    fn rejects_bad_files() {
        let mk = |nodes: &str, links: &str| -> GraphFile {
            serde_json::from_str(&format!(
                r#"{{"header": {{"format_version": 1, "directed": false}}, "nodes": {nodes}, "links": {links}}}"#
            ))
            .unwrap()
        };
        let dup = mk(r#"[{"id": "a"}, {"id": "a"}]"#, "[]");
        assert!(matches!(dup.to_graph(), Err(IoError::Format(_))));
        let unknown = mk(
            r#"[{"id": "a"}]"#,
            r#"[{"from": "a", "to": "b", "rate_mbps": "1", "delay_ms": "1"}]"#,
        );
        assert!(matches!(unknown.to_graph(), Err(IoError::Format(_))));
        let zero = mk(
            r#"[{"id": "a"}, {"id": "b"}]"#,
            r#"[{"from": "a", "to": "b", "rate_mbps": "0", "delay_ms": "1"}]"#,
        );
        assert!(matches!(zero.to_graph(), Err(IoError::Format(_))));
    }
}
