//! Graphviz DOT export for configuration graphs and explored graphs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::Bits;
use crate::coc::ExploredGraph;
use crate::confgraph::Layout;
use crate::machine::{self, MachineSpec};

/// The configuration graph reachable from the start over `tau`, vertices
/// labeled with their hex serialization, edges with their choice labels.
pub fn config_graph(spec: &MachineSpec, x: &Bits, tau: &Bits) -> String {
    let layout = Layout::for_machine(spec);
    let mut reachable = machine::reachable_set(spec, x, tau);
    reachable.sort();
    let ids: BTreeMap<_, _> = reachable
        .iter()
        .enumerate()
        .map(|(i, conf)| (conf.clone(), i))
        .collect();
    let mut out = String::new();
    writeln!(out, "digraph config_graph {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (i, conf) in reachable.iter().enumerate() {
        let shape = if spec.is_halting(conf) { "doublecircle" } else { "circle" };
        writeln!(
            out,
            "  n{i} [label=\"{}\" shape={shape}];",
            layout.serialize(conf).to_hex()
        )
        .unwrap();
    }
    for (i, conf) in reachable.iter().enumerate() {
        for (labels, succ) in spec.forward_edges(x, conf) {
            writeln!(out, "  n{i} -> n{} [label=\"{labels}\"];", ids[&succ]).unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

/// An explored graph with canonical-index vertex labels; the start, accept,
/// and reject nodes are marked.
pub fn explored_graph(g: &ExploredGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph explored {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    let node_name = |n: &crate::coc::NodeId| format!("n{}_{}", n.side, n.index);
    let mut nodes = g.nodes.clone();
    nodes.sort();
    for n in &nodes {
        let mut marks = Vec::new();
        if *n == g.r {
            marks.push("r");
        }
        if *n == g.t {
            marks.push("t");
        }
        if Some(*n) == g.rej {
            marks.push("rej");
        }
        let suffix = if marks.is_empty() {
            String::new()
        } else {
            format!(" [{}]", marks.join(","))
        };
        let shape = if *n == g.t || Some(*n) == g.rej { "doublecircle" } else { "circle" };
        writeln!(
            out,
            "  {} [label=\"{n}{suffix}\" shape={shape}];",
            node_name(n)
        )
        .unwrap();
    }
    for (from, succs) in &g.edges {
        for (to, labels) in succs {
            writeln!(
                out,
                "  {} -> {} [label=\"{labels}\"];",
                node_name(from),
                node_name(to)
            )
            .unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

#[cfg(test)]
mod tests;
