use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::corpus;
use crate::machine::{Configuration, Outcome, StateId};
use crate::meter::SpaceMeter;

fn view_of<'a>(
    spec: &'a crate::machine::MachineSpec,
    x: &'a Bits,
    meter: &'a SpaceMeter,
) -> ZeroGraphView<'a> {
    let params = ExploreParams::defaults(&Layout::for_machine(spec)).unwrap();
    ZeroGraphView::new(spec, x, params, meter)
}

/// All edge slots (conf, i) with i < deg(conf) in the undirected 0-component
/// of `seed`, found by brute-force BFS.
fn component_slots(view: &ZeroGraphView<'_>, seed: &Configuration) -> Vec<EdgeRef> {
    let mut seen = BTreeSet::new();
    let mut queue = vec![seed.clone()];
    while let Some(conf) = queue.pop() {
        if !seen.insert(conf.clone()) {
            continue;
        }
        if let Some(succ) = view.zero_forward(&conf) {
            queue.push(succ);
        }
        queue.extend(view.zero_predecessors(&conf));
    }
    let mut slots = Vec::new();
    for conf in seen {
        for index in 0..view.degree(&conf) {
            slots.push(EdgeRef { conf: conf.clone(), index });
        }
    }
    slots
}

#[test]
fn layout_widths_match_the_machine() {
    let spec = corpus::by_name("maj3", 4).unwrap();
    let layout = Layout::for_machine(&spec);
    // state bits + input head + work head + cat head + work tape.
    let expected_w = crate::bits::bit_width(spec.state_count() as u128)
        + crate::bits::bit_width(spec.n as u128)
        + crate::bits::bit_width(spec.s as u128)
        + crate::bits::bit_width(spec.c as u128)
        + spec.s;
    assert_eq!(layout.w(), expected_w);
    assert_eq!(layout.l(), expected_w + spec.c);
}

#[test]
fn serialization_round_trips() {
    let spec = corpus::dec(4);
    let layout = Layout::for_machine(&spec);
    for tau_val in 0..16u128 {
        let tau = Bits::from_uint(tau_val, 4);
        for conf in [
            spec.start_conf(&tau),
            spec.halting_conf(Outcome::Accept, &tau),
            spec.halting_conf(Outcome::Reject, &tau),
        ] {
            let bits = layout.serialize(&conf);
            assert_eq!(bits.len(), layout.l());
            assert_eq!(layout.deserialize(&bits), conf);
            // The extended prefix carries everything but the catalytic tape.
            let ext = layout.serialize_extended(&conf);
            assert_eq!(ext.len(), layout.w());
            assert_eq!(layout.deserialize_extended(&ext, &conf.cat), conf);
        }
    }
}

#[test]
fn layout_bit_agrees_with_serialize() {
    let spec = corpus::by_name("m_flip", 3).unwrap();
    let layout = Layout::for_machine(&spec);
    let tau = Bits::parse_bin("011").unwrap();
    let conf = spec.step(&Bits::parse_bin("0").unwrap(), &spec.start_conf(&tau), false);
    let bits = layout.serialize(&conf);
    for b in 0..layout.l() {
        assert_eq!(layout.bit(&conf, b).unwrap(), bits.get(b));
    }
    assert!(matches!(
        layout.bit(&conf, layout.l()),
        Err(WalkError::BitOutOfRange { .. })
    ));
}

#[test]
fn rot_is_an_involution_on_real_slots() {
    let meter = SpaceMeter::new();
    for name in ["m_id", "m_flip", "dec", "nd_stconn"] {
        let spec = corpus::by_name(name, 3).unwrap();
        let x = corpus::default_inputs(name).remove(0);
        let view = view_of(&spec, &x, &meter);
        for tau_val in 0..8u128 {
            let tau = Bits::from_uint(tau_val, 3);
            let root = spec.halting_conf(Outcome::Accept, &tau);
            for slot in component_slots(&view, &root) {
                let there = view.rot(&slot);
                assert!(there.index < view.degree(&there.conf));
                assert_eq!(view.rot(&there), slot, "{name}: rot not involutive");
            }
        }
    }
}

#[test]
fn rot_fixes_out_of_range_slots() {
    let meter = SpaceMeter::new();
    let spec = corpus::m_id(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::parse_bin("000").unwrap();
    // The reject configuration is isolated: degree 0, all slots fixed.
    let rej = spec.halting_conf(Outcome::Reject, &tau);
    let slot = EdgeRef { conf: rej, index: 5 };
    assert_eq!(view.rot(&slot), slot);
    assert_eq!(view.next_edge(&slot), slot);
    assert_eq!(view.step_back(&slot), slot);
}

#[test]
fn step_back_inverts_next_edge() {
    let meter = SpaceMeter::new();
    for name in ["m_flip", "dec", "maj3"] {
        let spec = corpus::by_name(name, 3).unwrap();
        let x = corpus::default_inputs(name).remove(0);
        let view = view_of(&spec, &x, &meter);
        let tau = Bits::parse_bin("101").unwrap();
        for outcome in [Outcome::Accept, Outcome::Reject] {
            let root = spec.halting_conf(outcome, &tau);
            for slot in component_slots(&view, &root) {
                assert_eq!(view.step_back(&view.next_edge(&slot)), slot, "{name}");
                assert_eq!(view.next_edge(&view.step_back(&slot)), slot, "{name}");
            }
        }
    }
}

#[test]
fn tour_visits_every_slot_exactly_once() {
    let meter = SpaceMeter::new();
    let spec = corpus::dec(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::parse_bin("110").unwrap();
    let root = spec.halting_conf(Outcome::Accept, &tau);
    let slots: BTreeSet<_> = component_slots(&view, &root)
        .into_iter()
        .map(|e| (e.conf, e.index))
        .collect();
    let size = view.size(&root).expect("component fits under the cap");
    assert_eq!(size as usize, slots.len());
    let mut visited = BTreeSet::new();
    let mut cur = EdgeRef { conf: root, index: 0 };
    for _ in 0..size {
        assert!(visited.insert((cur.conf.clone(), cur.index)), "slot revisited");
        cur = view.next_edge(&cur);
    }
    assert_eq!(visited, slots);
}

#[test]
fn size_is_twice_vertices_minus_one() {
    let meter = SpaceMeter::new();
    for name in corpus::VALID_NAMES {
        let spec = corpus::by_name(name, 3).unwrap();
        let x = corpus::default_inputs(name).remove(0);
        let view = view_of(&spec, &x, &meter);
        for tau_val in 0..8u128 {
            let tau = Bits::from_uint(tau_val, 3);
            for outcome in [Outcome::Accept, Outcome::Reject] {
                let root = spec.halting_conf(outcome, &tau);
                let vertices: BTreeSet<_> = component_slots(&view, &root)
                    .into_iter()
                    .map(|e| e.conf)
                    .collect();
                let expected = match vertices.len() {
                    0 | 1 => 1, // isolated root: a single trivial tour step
                    v => 2 * (v as u128 - 1),
                };
                assert_eq!(view.size(&root), Some(expected), "{name} tau {tau}");
            }
        }
    }
}

#[test]
fn size_returns_none_past_the_cap() {
    let meter = SpaceMeter::new();
    let spec = corpus::dec(4);
    let x = Bits::parse_bin("0").unwrap();
    let layout = Layout::for_machine(&spec);
    // A tiny cap that the big accept component cannot fit under.
    let params = ExploreParams { b_bits: 4, cap: 16 };
    let view = ZeroGraphView::new(&spec, &x, params, &meter);
    let tau = Bits::zeros(4);
    let root = spec.halting_conf(Outcome::Accept, &tau);
    assert_eq!(view.size(&root), None);
    // The same component fits under the default cap.
    let full = ZeroGraphView::new(&spec, &x, ExploreParams::defaults(&layout).unwrap(), &meter);
    assert!(full.size(&root).is_some());
}

#[test]
fn walk_respects_the_cap() {
    let meter = SpaceMeter::new();
    let spec = corpus::m_id(3);
    let x = Bits::parse_bin("0").unwrap();
    let params = ExploreParams { b_bits: 3, cap: 8 };
    let view = ZeroGraphView::new(&spec, &x, params, &meter);
    let tau = Bits::zeros(3);
    let home = EdgeRef { conf: spec.halting_conf(Outcome::Accept, &tau), index: 0 };
    assert!(view.walk(&home, 8).is_ok());
    assert!(matches!(
        view.walk(&home, 9),
        Err(WalkError::StepCapExceeded { t: 9, cap: 8 })
    ));
}

#[test]
fn count_steps_back_recovers_walk_distances() {
    let meter = SpaceMeter::new();
    let spec = corpus::dec(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::parse_bin("101").unwrap();
    let root = spec.halting_conf(Outcome::Accept, &tau);
    let home = EdgeRef { conf: root.clone(), index: 0 };
    let size = view.size(&root).unwrap();
    for t in 0..size {
        let slot = view.walk(&home, t).unwrap();
        let (count, back_home) = view.count_steps_back(&slot);
        assert_eq!(count, Some(t));
        assert_eq!(back_home, home);
    }
}

#[test]
fn count_steps_back_detects_rootless_cycles() {
    let meter = SpaceMeter::new();
    let spec = corpus::invalid_loop(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::zeros(3);
    // The start configuration's component is a pure cycle with no halting
    // root, so stepping back can never terminate at one.
    let slot = EdgeRef { conf: spec.start_conf(&tau), index: 0 };
    let (count, _) = view.count_steps_back(&slot);
    assert_eq!(count, None);
}

#[test]
fn conf_bit_at_reads_the_walked_configuration() {
    let meter = SpaceMeter::new();
    let spec = corpus::m_flip(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::parse_bin("010").unwrap();
    let root = spec.halting_conf(Outcome::Accept, &tau);
    let home = EdgeRef { conf: root.clone(), index: 0 };
    let size = view.size(&root).unwrap();
    for t in 0..size {
        let reached = view.walk(&home, t).unwrap().conf;
        let bits = view.layout.serialize(&reached);
        for b in 0..view.layout.l() {
            assert_eq!(view.conf_bit_at(&root, b, t).unwrap(), bits.get(b));
        }
    }
}

#[test]
fn canon_marks_first_visits() {
    let meter = SpaceMeter::new();
    let spec = corpus::dec(3);
    let x = Bits::parse_bin("0").unwrap();
    let view = view_of(&spec, &x, &meter);
    let tau = Bits::parse_bin("011").unwrap();
    let root = spec.halting_conf(Outcome::Accept, &tau);
    let home = EdgeRef { conf: root.clone(), index: 0 };
    let size = view.size(&root).unwrap();
    let mut canonical = 0u128;
    for t in 0..size {
        let slot = view.walk(&home, t).unwrap();
        assert_eq!(view.canon(&root, 0, t).unwrap(), slot.index == 0);
        if slot.index == 0 {
            canonical += 1;
        }
    }
    // Each vertex owns exactly one index-0 slot, visited once per tour.
    let vertices: BTreeSet<_> = component_slots(&view, &root)
        .into_iter()
        .map(|e| e.conf)
        .collect();
    assert_eq!(canonical, vertices.len() as u128);
}

#[test]
fn default_params_reject_wide_layouts() {
    // A synthetic layout report: defaults need 2W < 128.
    let spec = corpus::chain(16, 1025, 4);
    let layout = Layout::for_machine(&spec);
    assert!(2 * layout.w() < 128);
    assert!(ExploreParams::defaults(&layout).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Serialization is a bijection between configurations and L-bit strings
    /// restricted to in-range field values.
    #[test]
    fn serialize_round_trips_random_configurations(
        state in 0u16..3,
        ih in 0usize..6,
        wh in 0usize..2,
        ch in 0usize..4,
        work in 0u128..4,
        cat in 0u128..16,
    ) {
        let spec = corpus::by_name("maj3", 4).unwrap();
        let layout = Layout::for_machine(&spec);
        let conf = Configuration {
            state: StateId(state),
            input_head: ih,
            work_head: wh,
            cat_head: ch,
            work: Bits::from_uint(work, spec.s),
            cat: Bits::from_uint(cat, 4),
        };
        prop_assert_eq!(layout.deserialize(&layout.serialize(&conf)), conf);
    }

    /// Random-walk round trip: walking forward t steps and counting back
    /// returns exactly t from anywhere in a rooted component.
    #[test]
    fn random_walks_count_back(tau_val in 0u128..8, t in 0u128..64) {
        let meter = SpaceMeter::new();
        let spec = corpus::dec(3);
        let x = Bits::parse_bin("0").unwrap();
        let view = view_of(&spec, &x, &meter);
        let tau = Bits::from_uint(tau_val, 3);
        let root = spec.halting_conf(Outcome::Accept, &tau);
        let size = view.size(&root).unwrap();
        let t = t % size;
        let home = EdgeRef { conf: root, index: 0 };
        let slot = view.walk(&home, t).unwrap();
        let (count, back) = view.count_steps_back(&slot);
        prop_assert_eq!(count, Some(t));
        prop_assert_eq!(back, home);
    }
}
