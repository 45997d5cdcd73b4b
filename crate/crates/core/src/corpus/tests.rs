use std::path::Path;

use super::*;
use crate::machine::parse::write_machine;
use crate::machine::{brute_semantics, validate, Outcome};

fn bits(s: &str) -> Bits {
    Bits::parse_bin(s).unwrap()
}

#[test]
fn every_name_resolves() {
    for name in VALID_NAMES.iter().chain(INVALID_NAMES) {
        assert!(by_name(name, 4).is_some(), "{name}");
        assert!(!default_inputs(name).is_empty(), "{name}");
    }
    assert!(by_name("no_such_machine", 4).is_none());
}

#[test]
fn valid_machines_validate_everywhere() {
    for name in VALID_NAMES {
        for c in [2usize, 3, 4] {
            let spec = by_name(name, c).unwrap();
            assert_eq!(spec.c, c);
            for x in default_inputs(name) {
                for tau_val in 0..1u128 << c {
                    let tau = Bits::from_uint(tau_val, c);
                    let report = validate(&spec, &x, &tau);
                    assert!(
                        report.valid,
                        "{name} c={c} x={x} tau={tau}: {:?}",
                        report.failure
                    );
                }
            }
        }
    }
}

#[test]
fn invalid_machines_fail_validation() {
    for name in INVALID_NAMES {
        let spec = by_name(name, 3).unwrap();
        let report = validate(&spec, &bits("0"), &bits("000"));
        assert!(!report.valid, "{name} unexpectedly validated");
    }
}

#[test]
fn work_tape_length_satisfies_the_model_bound() {
    for name in VALID_NAMES.iter().chain(INVALID_NAMES) {
        for c in [2usize, 3, 4, 6, 8] {
            let spec = by_name(name, c).unwrap();
            assert!(1usize << spec.s >= c, "{name}: 2^{} < {c}", spec.s);
        }
    }
}

#[test]
fn frozen_verdicts_per_machine() {
    let tau = bits("101");
    let check = |name: &str, input: &str, outcome: Outcome| {
        let spec = by_name(name, 3).unwrap();
        let v = brute_semantics(&spec, &bits(input), &tau).unwrap();
        assert_eq!(v.outcome, outcome, "{name} on {input}");
    };
    check("m_id", "0", Outcome::Accept);
    check("m_id", "1", Outcome::Accept);
    check("m_flip", "0", Outcome::Accept);
    check("coin", "0", Outcome::Reject);
    check("dec", "0", Outcome::Accept);
    check("chain", "0", Outcome::Accept);
    check("nd_stconn", "110011", Outcome::Accept);
    check("nd_stconn", "100000", Outcome::Reject);
    check("nd_stconn", "100101", Outcome::Accept);
    check("nd_stconn", "000000", Outcome::Reject);
    check("nd_stconn", "001000", Outcome::Accept);
    check("co_nd_stconn", "110011", Outcome::Reject);
    check("co_nd_stconn", "100000", Outcome::Accept);
    check("maj3", "110000", Outcome::Accept);
    check("maj3", "100000", Outcome::Reject);
}

#[test]
fn chain_component_size_tracks_its_length() {
    use crate::confgraph::{ExploreParams, Layout, ZeroGraphView};
    use crate::meter::SpaceMeter;
    let meter = SpaceMeter::new();
    let tau = bits("0101");
    let x = bits("0");
    let mut widths = Vec::new();
    for m in [1usize, 8, 16, 100] {
        let spec = chain(m, 1025, 4);
        let layout = Layout::for_machine(&spec);
        widths.push(layout.w());
        let params = ExploreParams::defaults(&layout).unwrap();
        let view = ZeroGraphView::new(&spec, &x, params, &meter);
        let root = spec.halting_conf(Outcome::Accept, &tau);
        // m chain states plus the accept root: tour length 2m.
        assert_eq!(view.size(&root), Some(2 * m as u128));
    }
    // The padding keeps the serialization width fixed across chain lengths.
    assert!(widths.windows(2).all(|w| w[0] == w[1]), "widths vary: {widths:?}");
}

#[test]
fn corpus_round_trips_through_the_text_format() {
    for name in VALID_NAMES.iter().chain(INVALID_NAMES) {
        let spec = by_name(name, 4).unwrap();
        let text = write_machine(&spec);
        let reparsed = parse_machine(&text).unwrap();
        assert_eq!(write_machine(&reparsed), text, "{name}");
    }
}

#[test]
fn checked_in_machine_files_match_the_builders() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../machines");
    for name in ["m_id", "m_flip"] {
        let text = std::fs::read_to_string(dir.join(format!("{name}.ctm"))).unwrap();
        let from_file = parse_machine(&text).unwrap_or_else(|e| panic!("{name}.ctm: {e}"));
        let built = by_name(name, 4).unwrap();
        assert_eq!(from_file.state_names, built.state_names, "{name}");
        assert_eq!(from_file.mode, built.mode, "{name}");
        assert_eq!(from_file.n, built.n, "{name}");
        assert_eq!(from_file.c, built.c, "{name}");
        // Same behavior on every tape.
        for tau_val in 0..16u128 {
            let tau = Bits::from_uint(tau_val, 4);
            for x in ["0", "1"] {
                assert_eq!(
                    brute_semantics(&from_file, &bits(x), &tau).unwrap(),
                    brute_semantics(&built, &bits(x), &tau).unwrap(),
                    "{name} diverges at x={x} tau={tau}"
                );
            }
        }
    }
}
