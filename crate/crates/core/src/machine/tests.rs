use proptest::prelude::*;

use super::parse::{parse_machine, write_machine};
use super::*;
use crate::corpus;

fn bits(s: &str) -> Bits {
    Bits::parse_bin(s).unwrap()
}

#[test]
fn m_id_steps_straight_to_accept() {
    let spec = corpus::m_id(3);
    let tau = bits("101");
    let start = spec.start_conf(&tau);
    let next = spec.step(&bits("0"), &start, false);
    assert_eq!(next, spec.halting_conf(Outcome::Accept, &tau));
    assert_eq!(next, spec.step(&bits("0"), &start, true));
}

#[test]
fn m_flip_restores_the_flipped_bit() {
    let spec = corpus::m_flip(3);
    let x = bits("0");
    let tau = bits("010");
    let mid = spec.step(&x, &spec.start_conf(&tau), false);
    assert_eq!(mid.cat, bits("110"));
    let done = spec.step(&x, &mid, false);
    assert_eq!(done, spec.halting_conf(Outcome::Accept, &tau));
}

#[test]
fn head_moves_clamp_at_tape_ends() {
    // A one-cell tape cannot move its head at all.
    assert_eq!(apply_move(0, -1, 1), 0);
    assert_eq!(apply_move(0, 1, 1), 0);
    assert_eq!(apply_move(0, -1, 4), 0);
    assert_eq!(apply_move(3, 1, 4), 3);
    assert_eq!(apply_move(2, 1, 4), 3);
}

#[test]
fn head_preimages_cover_clamping() {
    // Moving right onto position 3 of a 4-cell tape: from 2, or clamped at 3.
    assert_eq!(head_preimages(3, 1, 4), vec![2, 3]);
    // Moving left onto 0: from 1, or clamped at 0.
    assert_eq!(head_preimages(0, -1, 4), vec![0, 1]);
    // A stay move only maps a position to itself.
    assert_eq!(head_preimages(2, 0, 4), vec![2]);
    // Interior positions have a single preimage per direction.
    assert_eq!(head_preimages(2, 1, 4), vec![1]);
}

/// Every forward edge must appear among the target's inverse edges with the
/// same labels, and vice versa.
fn assert_edge_duality(spec: &MachineSpec, x: &Bits, tau: &Bits) {
    for conf in reachable_set(spec, x, tau) {
        for (labels, succ) in spec.forward_edges(x, &conf) {
            let inv = spec.inverse_edges(x, &succ);
            let found = inv.iter().find(|(_, pred)| *pred == conf);
            assert_eq!(
                found.map(|(l, _)| *l),
                Some(labels),
                "forward edge {conf:?} -> {succ:?} missing from inverse edges"
            );
        }
        for (labels, pred) in spec.inverse_edges(x, &conf) {
            let fwd = spec.forward_edges(x, &pred);
            let found = fwd.iter().find(|(_, succ)| *succ == conf);
            assert_eq!(found.map(|(l, _)| *l), Some(labels));
        }
    }
}

#[test]
fn forward_and_inverse_edges_agree_on_the_corpus() {
    for name in corpus::VALID_NAMES {
        let spec = corpus::by_name(name, 3).unwrap();
        let x = corpus::default_inputs(name).remove(0);
        for tau_val in 0..1u128 << spec.c {
            let tau = Bits::from_uint(tau_val, spec.c);
            assert_edge_duality(&spec, &x, &tau);
        }
    }
}

#[test]
fn degree_bound_of_m_id_is_three() {
    // One inverse descriptor (start -> accept, no moves) plus the two
    // forward slots.
    assert_eq!(corpus::m_id(3).degree_bound(), 3);
}

#[test]
fn degree_bound_dominates_observed_degrees() {
    for name in corpus::VALID_NAMES {
        let spec = corpus::by_name(name, 3).unwrap();
        let x = corpus::default_inputs(name).remove(0);
        let bound = spec.degree_bound();
        for tau_val in 0..1u128 << spec.c {
            let tau = Bits::from_uint(tau_val, spec.c);
            for conf in reachable_set(&spec, &x, &tau) {
                let deg = spec.forward_edges(&x, &conf).len()
                    + spec.inverse_edges(&x, &conf).len();
                assert!(
                    deg <= bound,
                    "{name}: degree {deg} exceeds bound {bound} at {conf:?}"
                );
            }
        }
    }
}

#[test]
fn validate_accepts_the_valid_corpus() {
    for name in corpus::VALID_NAMES {
        let spec = corpus::by_name(name, 3).unwrap();
        for x in corpus::default_inputs(name) {
            for tau_val in 0..1u128 << spec.c {
                let tau = Bits::from_uint(tau_val, spec.c);
                let report = validate(&spec, &x, &tau);
                assert!(report.valid, "{name} invalid at tau {tau}: {:?}", report.failure);
            }
        }
    }
}

#[test]
fn validate_catches_the_loop() {
    let spec = corpus::invalid_loop(3);
    let report = validate(&spec, &bits("0"), &bits("000"));
    match report.failure {
        Some(Invalidity::Cycle { walk }) => {
            // The self-loop closes immediately at the start configuration.
            assert_eq!(walk.first(), walk.last());
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
}

#[test]
fn validate_catches_the_tape_destroyer() {
    let spec = corpus::invalid_flip(3);
    let report = validate(&spec, &bits("0"), &bits("000"));
    match report.failure {
        Some(Invalidity::BadSink { sink, walk }) => {
            assert_eq!(sink.cat, bits("100"));
            assert_eq!(walk.last(), Some(&sink));
        }
        other => panic!("expected a bad sink, got {other:?}"),
    }
}

#[test]
fn nondet_accepts_when_any_branch_accepts() {
    let spec = corpus::by_name("nd_stconn", 4).unwrap();
    let tau = bits("0110");
    let expect = [
        ("110011", Outcome::Accept),
        ("100000", Outcome::Reject),
        ("100101", Outcome::Accept),
        ("000000", Outcome::Reject),
        ("001000", Outcome::Accept),
    ];
    for (input, outcome) in expect {
        let v = brute_semantics(&spec, &bits(input), &tau).unwrap();
        assert_eq!(v.outcome, outcome, "input {input}");
    }
}

#[test]
fn co_nondet_flips_the_connectivity_answer() {
    let spec = corpus::by_name("co_nd_stconn", 4).unwrap();
    let tau = bits("0110");
    let expect = [
        ("110011", Outcome::Reject),
        ("100000", Outcome::Accept),
        ("100101", Outcome::Reject),
        ("000000", Outcome::Accept),
        ("001000", Outcome::Reject),
    ];
    for (input, outcome) in expect {
        let v = brute_semantics(&spec, &bits(input), &tau).unwrap();
        assert_eq!(v.outcome, outcome, "input {input}");
    }
}

#[test]
fn maj3_probabilities_are_exact() {
    let spec = corpus::maj3(3);
    let tau = bits("000");
    let quarter = |n: i32| BigRational::new(n.into(), 4.into());
    let expect = [
        ("110000", quarter(3), Outcome::Accept),
        ("111100", quarter(4), Outcome::Accept),
        ("100000", quarter(1), Outcome::Reject),
        ("101000", quarter(0), Outcome::Reject),
    ];
    for (input, p, outcome) in expect {
        let v = brute_semantics(&spec, &bits(input), &tau).unwrap();
        assert_eq!(v.probability, Some(p), "input {input}");
        assert_eq!(v.outcome, outcome, "input {input}");
    }
}

#[test]
fn maj3_all_free_votes_violate_the_promise() {
    let spec = corpus::maj3(3);
    let x = corpus::maj3_promise_violation_input();
    match brute_semantics(&spec, &x, &bits("000")) {
        Err(RunError::PromiseViolation(p)) => {
            assert_eq!(p, BigRational::new(1.into(), 2.into()));
        }
        other => panic!("expected a promise violation, got {other:?}"),
    }
}

#[test]
fn coin_rejects_in_unbounded_mode() {
    let spec = corpus::coin(3);
    let v = brute_semantics(&spec, &bits("0"), &bits("000")).unwrap();
    assert_eq!(v.outcome, Outcome::Reject);
    assert_eq!(v.probability, Some(BigRational::new(1.into(), 2.into())));
}

#[test]
fn text_format_round_trips_the_corpus() {
    for name in corpus::VALID_NAMES.iter().chain(corpus::INVALID_NAMES) {
        let spec = corpus::by_name(name, 3).unwrap();
        let text = write_machine(&spec);
        let reparsed = parse_machine(&text).unwrap();
        assert_eq!(write_machine(&reparsed), text, "{name}");
        assert_eq!(reparsed.state_names, spec.state_names);
        assert_eq!(reparsed.mode, spec.mode);
    }
}

#[test]
fn parser_rejects_partial_tables() {
    let text = "machine broken\nmode deterministic\ninput-bits 1\nwork-bits 1\ncat-bits 1\n\
                states a accept reject\nstart a\naccept accept\nreject reject\n\
                trans a 0 * * -> accept = = S S S\n";
    match parse_machine(text) {
        Err(parse::ParseError::Semantic(SpecError::MissingTransition { .. })) => {}
        other => panic!("expected a missing-transition error, got {other:?}"),
    }
}

#[test]
fn parser_rejects_transitions_from_halting_states() {
    let text = "machine broken\nmode deterministic\ninput-bits 1\nwork-bits 1\ncat-bits 1\n\
                states a accept reject\nstart a\naccept accept\nreject reject\n\
                trans a * * * -> accept = = S S S\n\
                trans accept * * * -> accept = = S S S\n";
    assert!(matches!(
        parse_machine(text),
        Err(parse::ParseError::Semantic(SpecError::HaltingStateHasTransition(_)))
    ));
}

proptest! {
    /// step() only changes the cells under the heads and moves heads by at
    /// most one.
    #[test]
    fn step_is_local(tau_val in 0u128..16, work_val in 0u128..4, choice in any::<bool>()) {
        let spec = corpus::dec(4);
        let x = bits("0");
        let mut conf = spec.start_conf(&Bits::from_uint(tau_val, 4));
        conf.work = Bits::from_uint(work_val % (1 << spec.s), spec.s);
        let next = spec.step(&x, &conf, choice);
        prop_assert!(next.input_head.abs_diff(conf.input_head) <= 1);
        prop_assert!(next.work_head.abs_diff(conf.work_head) <= 1);
        prop_assert!(next.cat_head.abs_diff(conf.cat_head) <= 1);
        let cat_changed = conf.cat.iter().zip(next.cat.iter()).filter(|(a, b)| a != b).count();
        prop_assert!(cat_changed <= 1);
        let work_changed = conf.work.iter().zip(next.work.iter()).filter(|(a, b)| a != b).count();
        prop_assert!(work_changed <= 1);
    }
}
