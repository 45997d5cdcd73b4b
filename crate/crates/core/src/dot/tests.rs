use super::*;
use crate::coc::{compute_or_compress, CocAction};
use crate::confgraph::ExploreParams;
use crate::corpus;
use crate::meter::SpaceMeter;

fn bits(s: &str) -> Bits {
    Bits::parse_bin(s).unwrap()
}

#[test]
fn config_graph_lists_reachable_vertices_and_edges() {
    let spec = corpus::m_flip(3);
    let dot = config_graph(&spec, &bits("0"), &bits("010"));
    assert!(dot.starts_with("digraph config_graph {"));
    assert!(dot.trim_end().ends_with('}'));
    // start -> back -> accept: three vertices, two edges.
    assert_eq!(dot.matches("shape=circle").count(), 2);
    assert_eq!(dot.matches("shape=doublecircle").count(), 1);
    assert_eq!(dot.matches(" -> ").count(), 2);
}

#[test]
fn config_graph_is_deterministic() {
    let spec = corpus::by_name("nd_stconn", 3).unwrap();
    let x = bits("110011");
    let tau = bits("011");
    assert_eq!(config_graph(&spec, &x, &tau), config_graph(&spec, &x, &tau));
}

#[test]
fn explored_graph_marks_the_distinguished_nodes() {
    let spec = corpus::m_flip(3);
    let x = bits("0");
    let params = ExploreParams::defaults(&Layout::for_machine(&spec)).unwrap();
    let meter = SpaceMeter::new();
    let mut payload = bits("010");
    let mut counter = Bits::zeros(params.b_bits);
    let out = compute_or_compress(&spec, &x, &mut payload, &mut counter, &params, &meter)
        .unwrap();
    let CocAction::Computed(graph) = out.action else {
        panic!("expected the compute case");
    };
    let dot = explored_graph(&graph);
    assert!(dot.starts_with("digraph explored {"));
    assert!(dot.contains("[r]"), "start node unmarked: {dot}");
    assert!(dot.contains("[t]"), "accept node unmarked: {dot}");
    assert!(dot.contains("[rej]"), "reject node unmarked: {dot}");
    // Two labeled edges on the accept side.
    assert_eq!(dot.matches(" -> ").count(), 2);
}
