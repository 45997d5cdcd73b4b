//! Exhaustive desk-scale checkers for the structural facts the reduction
//! rests on: tree shape of halting components, pairwise disjointness of the
//! component vertex sets across tapes, the summed size bound, containment of
//! the reachable set, and a driver-vs-reference equivalence sweep.
//!
//! Each checker is a thin enumeration layer over a pure assertion core, so
//! the cores can also be fed hand-built violations by the test suite.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::bits::Bits;
use crate::coc::{driver, VirtualTape};
use crate::confgraph::{ExploreParams, Layout, ZeroGraphView};
use crate::machine::{self, Configuration, MachineSpec, Outcome, StateId};
use crate::meter::SpaceMeter;

/// Outcome of one checker run: which law was checked on which machine, over
/// which sweep, and a replayable witness when it failed.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub machine: String,
    pub swept: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl LemmaReport {
    fn pass(lemma: &'static str, machine: &str, swept: String) -> LemmaReport {
        LemmaReport { lemma, machine: machine.to_string(), swept, pass: true, witness: None }
    }

    fn fail(lemma: &'static str, machine: &str, swept: String, witness: String) -> LemmaReport {
        LemmaReport {
            lemma,
            machine: machine.to_string(),
            swept,
            pass: false,
            witness: Some(witness),
        }
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma: {}", self.lemma)?;
        writeln!(f, "machine: {}", self.machine)?;
        writeln!(f, "swept: {}", self.swept)?;
        writeln!(f, "result: {}", if self.pass { "pass" } else { "FAIL" })?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness: {w}")?;
        }
        Ok(())
    }
}

/// Enumerate every syntactically well-formed configuration at the machine's
/// (n, s, c): all states, in-range heads, and tape contents.
pub fn configuration_universe(spec: &MachineSpec) -> Vec<Configuration> {
    let mut out = Vec::new();
    for q in 0..spec.state_count() {
        for ih in 0..spec.n {
            for wh in 0..spec.s {
                for ch in 0..spec.c {
                    for wv in 0..1u128 << spec.s {
                        for cv in 0..1u128 << spec.c {
                            out.push(Configuration {
                                state: StateId(q as u16),
                                input_head: ih,
                                work_head: wh,
                                cat_head: ch,
                                work: Bits::from_uint(wv, spec.s),
                                cat: Bits::from_uint(cv, spec.c),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Undirected 0-graph component of `root`, collected by breadth-first search
/// over forward and inverse 0-edges.
pub fn zero_component(view: &ZeroGraphView, root: &Configuration) -> BTreeSet<Configuration> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(conf) = queue.pop_front() {
        if !seen.insert(conf.clone()) {
            continue;
        }
        if let Some(succ) = view.zero_forward(&conf) {
            queue.push_back(succ);
        }
        for pred in view.zero_predecessors(&conf) {
            queue.push_back(pred);
        }
    }
    seen
}

/// Assertion core for the tree facts, over an explicit undirected multigraph
/// given by adjacency lists. Every component containing a halting vertex
/// must contain exactly one and have edge count |V| - 1.
pub fn tree_facts_core(adj: &[Vec<usize>], halting: &[bool]) -> Result<(), String> {
    assert_eq!(adj.len(), halting.len());
    let mut comp = vec![usize::MAX; adj.len()];
    let mut ncomp = 0;
    for v in 0..adj.len() {
        if comp[v] != usize::MAX {
            continue;
        }
        let id = ncomp;
        ncomp += 1;
        let mut queue = VecDeque::from([v]);
        comp[v] = id;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut verts = vec![0usize; ncomp];
    let mut half_edges = vec![0usize; ncomp];
    let mut roots: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for v in 0..adj.len() {
        verts[comp[v]] += 1;
        half_edges[comp[v]] += adj[v].len();
        if halting[v] {
            roots[comp[v]].push(v);
        }
    }
    for id in 0..ncomp {
        if roots[id].is_empty() {
            continue;
        }
        if roots[id].len() > 1 {
            return Err(format!(
                "component {id} contains {} halting vertices (e.g. {} and {})",
                roots[id].len(),
                roots[id][0],
                roots[id][1]
            ));
        }
        // Each undirected edge appears twice across adjacency lists; a
        // self-loop appears twice at its vertex and still breaks the count.
        let edges = half_edges[id] / 2;
        if edges != verts[id] - 1 {
            return Err(format!(
                "component {id} rooted at vertex {} has {} vertices but {} edges",
                roots[id][0], verts[id], edges
            ));
        }
    }
    Ok(())
}

/// Tree facts over the full 0-graph of (spec, x): enumerate every
/// configuration, materialize the forward 0-edges, and run the core.
pub fn check_tree_facts(spec: &MachineSpec, x: &Bits) -> LemmaReport {
    const LEMMA: &str = "tree-facts";
    let universe = configuration_universe(spec);
    let index: HashMap<&Configuration, usize> =
        universe.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); universe.len()];
    let mut halting = vec![false; universe.len()];
    for (i, conf) in universe.iter().enumerate() {
        if spec.is_halting(conf) {
            halting[i] = true;
            continue;
        }
        let succ = spec.step(x, conf, false);
        let j = index[&succ];
        adj[i].push(j);
        adj[j].push(i);
    }
    let swept = format!(
        "all {} configurations (x = {x}, s = {}, c = {})",
        universe.len(),
        spec.s,
        spec.c
    );
    match tree_facts_core(&adj, &halting) {
        Ok(()) => LemmaReport::pass(LEMMA, &spec.name, swept),
        Err(w) => {
            // Re-key the witness to serialized configurations.
            LemmaReport::fail(LEMMA, &spec.name, swept, w)
        }
    }
}

/// Assertion core for disjointness: no configuration may belong to two of
/// the labeled vertex sets.
pub fn disjointness_core(
    sets: &[(String, BTreeSet<Configuration>)],
    layout: &Layout,
) -> Result<(), String> {
    let mut owner: HashMap<&Configuration, &str> = HashMap::new();
    for (label, set) in sets {
        for conf in set {
            if let Some(prev) = owner.insert(conf, label) {
                return Err(format!(
                    "configuration {} belongs to both {prev} and {label}",
                    layout.serialize(conf).to_hex()
                ));
            }
        }
    }
    Ok(())
}

/// Collect the accept- and reject-rooted component vertex sets for every
/// catalytic tape content.
pub fn halting_components(
    spec: &MachineSpec,
    x: &Bits,
) -> Vec<(String, BTreeSet<Configuration>)> {
    let meter = SpaceMeter::new();
    let layout = Layout::for_machine(spec);
    let params = ExploreParams::defaults(&layout).expect("desk-scale machine");
    let view = ZeroGraphView::new(spec, x, params, &meter);
    let mut sets = Vec::new();
    for tau_val in 0..1u128 << spec.c {
        let tau = Bits::from_uint(tau_val, spec.c);
        for outcome in [Outcome::Accept, Outcome::Reject] {
            let root = spec.halting_conf(outcome, &tau);
            let label = format!(
                "{}-component(tau={})",
                match outcome {
                    Outcome::Accept => "accept",
                    Outcome::Reject => "reject",
                },
                tau
            );
            sets.push((label, zero_component(&view, &root)));
        }
    }
    sets
}

/// Disjointness of the 2 * 2^c halting-rooted component vertex sets.
pub fn check_disjointness(spec: &MachineSpec, x: &Bits) -> LemmaReport {
    const LEMMA: &str = "component-disjointness";
    let layout = Layout::for_machine(spec);
    let sets = halting_components(spec, x);
    let swept = format!("{} component sets (x = {x}, all tau at c = {})", sets.len(), spec.c);
    match disjointness_core(&sets, &layout) {
        Ok(()) => LemmaReport::pass(LEMMA, &spec.name, swept),
        Err(w) => LemmaReport::fail(LEMMA, &spec.name, swept, w),
    }
}

/// Assertion core for the summed size bound: each family's total vertex
/// count over all tapes must stay within 2^{c+W}.
pub fn expectation_core(
    sum_accept: u128,
    sum_reject: u128,
    c: usize,
    w: usize,
) -> Result<(), String> {
    let bound = 1u128 << (c + w).min(127);
    for (label, sum) in [("accept", sum_accept), ("reject", sum_reject)] {
        if sum > bound {
            return Err(format!(
                "sum of {label}-component sizes {sum} exceeds 2^(c+W) = {bound}"
            ));
        }
    }
    Ok(())
}

/// Summed component sizes over all tapes stay within the universe bound.
/// Returns the sums alongside the report for cross-checks.
pub fn check_expectation(spec: &MachineSpec, x: &Bits) -> (LemmaReport, u128, u128) {
    const LEMMA: &str = "size-expectation";
    let layout = Layout::for_machine(spec);
    let sets = halting_components(spec, x);
    let mut sum_accept: u128 = 0;
    let mut sum_reject: u128 = 0;
    for (label, set) in &sets {
        if label.starts_with("accept") {
            sum_accept += set.len() as u128;
        } else {
            sum_reject += set.len() as u128;
        }
    }
    let swept = format!(
        "all tau at c = {}, W = {} (sum_accept = {sum_accept}, sum_reject = {sum_reject})",
        spec.c,
        layout.w()
    );
    let report = match expectation_core(sum_accept, sum_reject, spec.c, layout.w()) {
        Ok(()) => LemmaReport::pass(LEMMA, &spec.name, swept),
        Err(w) => LemmaReport::fail(LEMMA, &spec.name, swept, w),
    };
    (report, sum_accept, sum_reject)
}

/// Containment: everything reachable from the start configuration lies in
/// the union of the accept- and reject-rooted components for the same tape.
pub fn check_containment(spec: &MachineSpec, x: &Bits, tau: &Bits) -> LemmaReport {
    const LEMMA: &str = "reachable-containment";
    let meter = SpaceMeter::new();
    let layout = Layout::for_machine(spec);
    let params = ExploreParams::defaults(&layout).expect("desk-scale machine");
    let view = ZeroGraphView::new(spec, x, params, &meter);
    let accept_set = zero_component(&view, &spec.halting_conf(Outcome::Accept, tau));
    let reject_set = zero_component(&view, &spec.halting_conf(Outcome::Reject, tau));
    let swept = format!("x = {x}, tau = {tau}");
    for conf in machine::reachable_set(spec, x, tau) {
        if !accept_set.contains(&conf) && !reject_set.contains(&conf) {
            return LemmaReport::fail(
                LEMMA,
                &spec.name,
                swept,
                format!(
                    "reachable configuration {} lies in neither halting component",
                    layout.serialize(&conf).to_hex()
                ),
            );
        }
    }
    LemmaReport::pass(LEMMA, &spec.name, swept)
}

/// For every input and every tape: the driver's verdict must equal the
/// brute-force reference verdict and the virtual tape must come back
/// bit-identical.
pub fn equivalence_sweep(spec: &MachineSpec, inputs: &[Bits]) -> LemmaReport {
    const LEMMA: &str = "driver-equivalence";
    let meter = SpaceMeter::new();
    let layout = Layout::for_machine(spec);
    let params = match ExploreParams::defaults(&layout) {
        Ok(p) => p,
        Err(e) => {
            return LemmaReport::fail(LEMMA, &spec.name, String::new(), e.to_string());
        }
    };
    let shape = match crate::coc::DriverShape::derive(spec, &params) {
        Ok(s) => s,
        Err(e) => {
            return LemmaReport::fail(LEMMA, &spec.name, String::new(), e.to_string());
        }
    };
    let swept = format!(
        "{} inputs, all tau at c = {}, patterned counters",
        inputs.len(),
        spec.c
    );
    for x in inputs {
        for tau_val in 0..1u128 << spec.c {
            let tau = Bits::from_uint(tau_val, spec.c);
            let reference = match machine::brute_semantics(spec, x, &tau) {
                Ok(v) => v,
                Err(e) => {
                    return LemmaReport::fail(
                        LEMMA,
                        &spec.name,
                        swept,
                        format!("reference semantics failed at x = {x}, tau = {tau}: {e}"),
                    );
                }
            };
            // Counter contents are part of the catalytic tape and therefore
            // arbitrary; use a nonzero pattern so restoration is not free.
            let counters: Vec<Bits> = (0..shape.k)
                .map(|i| Bits::from_bools((0..params.b_bits).map(|b| (b + i) % 3 == 0).collect()))
                .collect();
            let initial = VirtualTape { payload: tau.clone(), counters };
            let result = match driver(spec, x, &initial, &params, false, &meter) {
                Ok(r) => r,
                Err(e) => {
                    return LemmaReport::fail(
                        LEMMA,
                        &spec.name,
                        swept,
                        format!("driver failed at x = {x}, tau = {tau}: {e}"),
                    );
                }
            };
            if result.verdict.outcome != reference.outcome {
                return LemmaReport::fail(
                    LEMMA,
                    &spec.name,
                    swept,
                    format!(
                        "verdict mismatch at x = {x}, tau = {tau}: driver {:?}, reference {:?}",
                        result.verdict.outcome, reference.outcome
                    ),
                );
            }
            if result.verdict.probability != reference.probability {
                return LemmaReport::fail(
                    LEMMA,
                    &spec.name,
                    swept,
                    format!("probability mismatch at x = {x}, tau = {tau}"),
                );
            }
            if !result.restored || result.tape != initial {
                return LemmaReport::fail(
                    LEMMA,
                    &spec.name,
                    swept,
                    format!("tape not restored at x = {x}, tau = {tau}"),
                );
            }
        }
    }
    LemmaReport::pass(LEMMA, &spec.name, swept)
}
