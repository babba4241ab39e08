//! Graphviz rendering of an information-value ordering.

use std::collections::BTreeSet;

use evpi_core::{NodeId, OrderingGraph};

fn escape(id: &NodeId) -> String {
    id.to_string().replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the ordering as DOT. A solid arc X -> Y reads "observing X is
/// worth at least as much as observing Y"; mutually screening pairs
/// collapse to one double-headed arc; provably worthless nodes carry an
/// `EVPI=0` annotation. Output order follows the graph's node and edge
/// order, so identical inputs render identical bytes.
pub fn render(g: &OrderingGraph) -> String {
    let zero: BTreeSet<&NodeId> = g.zero_set.iter().collect();
    let pairs: BTreeSet<(&NodeId, &NodeId)> = g.edges.iter().map(|e| (&e.from, &e.to)).collect();

    let mut out = String::from("digraph information_value {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=ellipse];\n");
    for n in &g.nodes {
        let name = escape(n);
        if zero.contains(n) {
            out.push_str(&format!("  \"{name}\" [label=\"{name}\\nEVPI=0\"];\n"));
        } else {
            out.push_str(&format!("  \"{name}\";\n"));
        }
    }
    let mut drawn: BTreeSet<(&NodeId, &NodeId)> = BTreeSet::new();
    for e in &g.edges {
        if drawn.contains(&(&e.from, &e.to)) {
            continue;
        }
        drawn.insert((&e.from, &e.to));
        let from = escape(&e.from);
        let to = escape(&e.to);
        if pairs.contains(&(&e.to, &e.from)) {
            // Equal-value class: draw the pair once, double-headed.
            drawn.insert((&e.to, &e.from));
            out.push_str(&format!("  \"{from}\" -> \"{to}\" [dir=both];\n"));
        } else {
            out.push_str(&format!("  \"{from}\" -> \"{to}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}
