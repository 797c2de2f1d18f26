//! Graphviz output for `Con(A)` and for the poset of meet-irreducibles.
//! Node ids are the block notation of the congruence, so the output only
//! depends on the algebra.

use std::fmt::Write as _;

use crate::lattice::CongruenceLattice;
use crate::pip::PipStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotView {
    Con,
    Cm,
}

const PALETTE: [&str; 8] = [
    "lightblue",
    "palegreen",
    "lightsalmon",
    "khaki",
    "plum",
    "lightcyan",
    "pink",
    "wheat",
];

fn label(lat: &CongruenceLattice, i: usize) -> String {
    let c = lat.get(i);
    if lat.len() > 1 && i == lat.bottom() {
        format!("Δ {c}")
    } else if lat.len() > 1 && i == lat.top() {
        format!("∇ {c}")
    } else {
        c.to_string()
    }
}

pub fn to_dot(lat: &CongruenceLattice, pip: Option<&PipStructure>, view: DotView) -> String {
    let nodes: Vec<usize> = match view {
        DotView::Con => (0..lat.len()).collect(),
        DotView::Cm => lat.cm().to_vec(),
    };
    let color = |i: usize| {
        pip.and_then(|p| p.class_index(i))
            .map(|k| PALETTE[k % PALETTE.len()])
    };
    let mut out = String::new();
    let graph = match view {
        DotView::Con => "con",
        DotView::Cm => "cm",
    };
    let _ = writeln!(out, "digraph {graph} {{");
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
    for &i in &nodes {
        let id = lat.get(i).to_string();
        let mut attrs = vec![format!("label=\"{}\"", label(lat, i))];
        if view == DotView::Con && lat.is_cm(i) {
            attrs.push("penwidth=2".into());
        }
        if let Some(c) = color(i) {
            attrs.push("style=filled".into());
            attrs.push(format!("fillcolor={c}"));
        }
        let _ = writeln!(out, "  \"{id}\" [{}];", attrs.join(", "));
    }
    let edges: Vec<(usize, usize)> = match view {
        DotView::Con => nodes
            .iter()
            .flat_map(|&i| lat.upper_covers(i).iter().map(move |&j| (i, j)))
            .collect(),
        // Covers in the induced order on Cm.
        DotView::Cm => nodes
            .iter()
            .flat_map(|&i| nodes.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| lat.lt(i, j) && !nodes.iter().any(|&k| lat.lt(i, k) && lat.lt(k, j)))
            .collect(),
    };
    for (i, j) in edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", lat.get(i), lat.get(j));
    }
    out.push_str("}\n");
    out
}

/// Count node and edge statements; used by tests and the CLI summary.
pub fn count_nodes_edges(dot: &str) -> (usize, usize) {
    let mut nodes = 0;
    let mut edges = 0;
    for line in dot.lines().map(str::trim) {
        if line.starts_with('"') {
            if line.contains("->") {
                edges += 1;
            } else {
                nodes += 1;
            }
        }
    }
    (nodes, edges)
}
