use std::collections::HashSet;
use std::fmt::Write;

use crate::graph::{Graph, NodeId};
use crate::path::Path;

/// Renders the graph in Graphviz DOT with `rate / delay` edge labels.
/// Links traversed by `route` are drawn red and thick.
pub fn export_dot(graph: &Graph, route: Option<&Path>) -> String {
    let mut on_route: HashSet<(NodeId, NodeId)> = HashSet::new();
    if let Some(path) = route {
        for w in path.nodes().windows(2) {
            on_route.insert((w[0], w[1]));
            if !graph.is_directed() {
                on_route.insert((w[1], w[0]));
            }
        }
    }
    let (kind, edge) = if graph.is_directed() {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut out = String::new();
    writeln!(out, "{kind} mesh {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in graph.nodes() {
        let name = quote(graph.name(v));
        match graph.position(v) {
            Some((x, y)) => writeln!(out, "  {name} [pos=\"{x},{y}!\"];").unwrap(),
            None => writeln!(out, "  {name};").unwrap(),
        }
    }
    for link in graph.physical_links() {
        let mut attrs = format!("label=\"{} Mbps / {} ms\"", link.rate, link.delay);
        if on_route.contains(&(link.from, link.to)) {
            attrs.push_str(", color=\"red\", penwidth=3");
        }
        writeln!(
            out,
            "  {} {edge} {} [{attrs}];",
            quote(graph.name(link.from)),
            quote(graph.name(link.to))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_graph, cg};

    #[test]
    fn plain_export() {
        let dot = export_dot(&canonical_graph(), None);
        assert!(dot.starts_with("graph mesh {"));
        assert_eq!(dot.matches(" -- ").count(), 6);
        assert_eq!(dot.lines().filter(|l| l.ends_with("\";") && !l.contains("--")).count(), 6);
        assert!(dot.contains("\"u\" -- \"a\" [label=\"5 Mbps / 2 ms\"];"));
        assert!(!dot.contains("penwidth"));
    }

    #[test]
    fn highlighted_route() {
        let g = canonical_graph();
        let p = Path::from_nodes(&g, &[cg::U, cg::A, cg::W, cg::Y]).unwrap();
        let dot = export_dot(&g, Some(&p));
        assert_eq!(dot.matches("penwidth=3").count(), 3);
        assert_eq!(dot, export_dot(&g, Some(&p)));
    }
}
