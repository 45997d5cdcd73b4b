//! The catalytic Turing machine model: machine descriptions, small-step
//! semantics, local edge enumeration in the configuration graph, validity
//! checking, and brute-force reference semantics for all four resource modes.

pub mod parse;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bits::Bits;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub u16);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Deterministic,
    Nondet,
    CoNondet,
    BoundedRandom,
    UnboundedRandom,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Deterministic => "deterministic",
            Mode::Nondet => "nondet",
            Mode::CoNondet => "co-nondet",
            Mode::BoundedRandom => "bounded-random",
            Mode::UnboundedRandom => "unbounded-random",
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(s: &str) -> Option<Mode> {
        Some(match s {
            "deterministic" => Mode::Deterministic,
            "nondet" => Mode::Nondet,
            "co-nondet" => Mode::CoNondet,
            "bounded-random" => Mode::BoundedRandom,
            "unbounded-random" => Mode::UnboundedRandom,
            _ => return None,
        })
    }

    pub fn is_random(self) -> bool {
        matches!(self, Mode::BoundedRandom | Mode::UnboundedRandom)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resolved outcome of one transition choice. Writes are concrete bits;
/// head moves are -1, 0 or +1 and clamp at tape ends.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChoiceOutcome {
    pub next_state: StateId,
    pub work_write: bool,
    pub cat_write: bool,
    pub input_move: i8,
    pub work_move: i8,
    pub cat_move: i8,
}

/// A machine configuration with state and head positions held explicitly.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    pub state: StateId,
    pub input_head: usize,
    pub work_head: usize,
    pub cat_head: usize,
    pub work: Bits,
    pub cat: Bits,
}

/// Edge labels: a deterministic step carries both labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Labels {
    pub zero: bool,
    pub one: bool,
}

impl Labels {
    pub const BOTH: Labels = Labels { zero: true, one: true };
    pub const ZERO: Labels = Labels { zero: true, one: false };
    pub const ONE: Labels = Labels { zero: false, one: true };
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.zero, self.one) {
            (true, true) => f.write_str("0,1"),
            (true, false) => f.write_str("0"),
            (false, true) => f.write_str("1"),
            (false, false) => f.write_str("-"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Accept,
    Reject,
}

/// Result of a run: the outcome, plus the exact acceptance probability in
/// the random modes.
#[derive(Clone, PartialEq, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub probability: Option<BigRational>,
}

#[derive(Error, Debug)]
pub enum RunError {
    #[error("acceptance probability {0} lies in (1/3, 2/3): bounded-error promise violated")]
    PromiseViolation(BigRational),
    #[error("machine is not valid on this input and tape: {0}")]
    InvalidMachine(String),
}

/// One transition-table entry after wildcard expansion, kept in a reverse
/// index for predecessor enumeration.
#[derive(Clone, Copy, Debug)]
struct RevEntry {
    state: StateId,
    input_bit: bool,
    work_bit: bool,
    cat_bit: bool,
    choice: bool,
}

#[derive(Clone, Debug)]
pub struct MachineSpec {
    pub name: String,
    pub mode: Mode,
    /// Declared input length; operations require |x| = n.
    pub n: usize,
    /// Work tape length in bits.
    pub s: usize,
    /// Catalytic tape length in bits.
    pub c: usize,
    pub state_names: Vec<String>,
    pub start: StateId,
    pub accept: StateId,
    pub reject: StateId,
    /// Indexed by state * 8 + key(input, work, cat); None for halting states.
    transitions: Vec<Option<[ChoiceOutcome; 2]>>,
    /// Reverse index: for each state, the expanded entries that lead to it.
    by_target: Vec<Vec<RevEntry>>,
}

#[derive(Error, Debug)]
pub enum SpecError {
    #[error("catalytic length {c} exceeds 2^s = {max} (s = {s})")]
    CatalyticTooLong { c: usize, s: usize, max: u128 },
    #[error("halting state {0:?} has an outgoing transition")]
    HaltingStateHasTransition(String),
    #[error("missing transition for state {state:?} on key (input={i}, work={w}, cat={c})")]
    MissingTransition { state: String, i: u8, w: u8, c: u8 },
    #[error("duplicate transition for state {state:?} on key (input={i}, work={w}, cat={c})")]
    DuplicateTransition { state: String, i: u8, w: u8, c: u8 },
    #[error("deterministic mode requires equal choice outcomes for state {0:?}")]
    DeterministicMismatch(String),
    #[error("{0} must be at least 1")]
    ZeroWidth(&'static str),
    #[error("unknown state name {0:?}")]
    UnknownState(String),
}

fn key_index(input_bit: bool, work_bit: bool, cat_bit: bool) -> usize {
    (input_bit as usize) << 2 | (work_bit as usize) << 1 | cat_bit as usize
}

fn apply_move(pos: usize, mv: i8, len: usize) -> usize {
    match mv {
        -1 if pos > 0 => pos - 1,
        1 if pos + 1 < len => pos + 1,
        _ => pos,
    }
}

/// Positions `p` with `apply_move(p, mv, len) == post`.
fn head_preimages(post: usize, mv: i8, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(2);
    for cand in [post.wrapping_sub(1), post, post + 1] {
        if cand < len && apply_move(cand, mv, len) == post {
            out.push(cand);
        }
    }
    out
}

impl MachineSpec {
    /// Assemble a machine from raw parts, enforcing all type invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        name: String,
        mode: Mode,
        n: usize,
        s: usize,
        c: usize,
        state_names: Vec<String>,
        start: StateId,
        accept: StateId,
        reject: StateId,
        entries: Vec<(StateId, bool, bool, bool, [ChoiceOutcome; 2])>,
    ) -> Result<MachineSpec, SpecError> {
        if n == 0 {
            return Err(SpecError::ZeroWidth("input length"));
        }
        if s == 0 {
            return Err(SpecError::ZeroWidth("work tape length"));
        }
        if c == 0 {
            return Err(SpecError::ZeroWidth("catalytic tape length"));
        }
        if s < 128 && (c as u128) > 1u128 << s {
            return Err(SpecError::CatalyticTooLong { c, s, max: 1u128 << s });
        }
        let nstates = state_names.len();
        let mut transitions: Vec<Option<[ChoiceOutcome; 2]>> = vec![None; nstates * 8];
        for (state, ib, wb, cb, outcomes) in &entries {
            if *state == accept || *state == reject {
                return Err(SpecError::HaltingStateHasTransition(
                    state_names[state.0 as usize].clone(),
                ));
            }
            let slot = &mut transitions[state.0 as usize * 8 + key_index(*ib, *wb, *cb)];
            if slot.is_some() {
                return Err(SpecError::DuplicateTransition {
                    state: state_names[state.0 as usize].clone(),
                    i: *ib as u8,
                    w: *wb as u8,
                    c: *cb as u8,
                });
            }
            *slot = Some(*outcomes);
        }
        for q in 0..nstates {
            let qid = StateId(q as u16);
            if qid == accept || qid == reject {
                continue;
            }
            for key in 0..8 {
                if transitions[q * 8 + key].is_none() {
                    return Err(SpecError::MissingTransition {
                        state: state_names[q].clone(),
                        i: (key >> 2 & 1) as u8,
                        w: (key >> 1 & 1) as u8,
                        c: (key & 1) as u8,
                    });
                }
                if mode == Mode::Deterministic {
                    let pair = transitions[q * 8 + key].unwrap();
                    if pair[0] != pair[1] {
                        return Err(SpecError::DeterministicMismatch(state_names[q].clone()));
                    }
                }
            }
        }
        let mut by_target: Vec<Vec<RevEntry>> = vec![Vec::new(); nstates];
        for q in 0..nstates {
            for key in 0..8 {
                if let Some(pair) = transitions[q * 8 + key] {
                    for (choice, out) in pair.iter().enumerate() {
                        by_target[out.next_state.0 as usize].push(RevEntry {
                            state: StateId(q as u16),
                            input_bit: key >> 2 & 1 == 1,
                            work_bit: key >> 1 & 1 == 1,
                            cat_bit: key & 1 == 1,
                            choice: choice == 1,
                        });
                    }
                }
            }
        }
        Ok(MachineSpec {
            name,
            mode,
            n,
            s,
            c,
            state_names,
            start,
            accept,
            reject,
            transitions,
            by_target,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
    }

    pub fn is_halting_state(&self, q: StateId) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn is_halting(&self, conf: &Configuration) -> bool {
        self.is_halting_state(conf.state)
    }

    pub fn outcome(&self, q: StateId, ib: bool, wb: bool, cb: bool, choice: bool) -> ChoiceOutcome {
        self.transitions[q.0 as usize * 8 + key_index(ib, wb, cb)]
            .expect("transition lookup on halting state")[choice as usize]
    }

    /// The start configuration over catalytic contents `tau`.
    pub fn start_conf(&self, tau: &Bits) -> Configuration {
        assert_eq!(tau.len(), self.c);
        Configuration {
            state: self.start,
            input_head: 0,
            work_head: 0,
            cat_head: 0,
            work: Bits::zeros(self.s),
            cat: tau.clone(),
        }
    }

    /// Canonical halting configuration: heads at 0, zeroed work tape.
    pub fn halting_conf(&self, outcome: Outcome, tau: &Bits) -> Configuration {
        assert_eq!(tau.len(), self.c);
        Configuration {
            state: match outcome {
                Outcome::Accept => self.accept,
                Outcome::Reject => self.reject,
            },
            input_head: 0,
            work_head: 0,
            cat_head: 0,
            work: Bits::zeros(self.s),
            cat: tau.clone(),
        }
    }

    /// Apply one execution step. `conf` must not be halting.
    pub fn step(&self, x: &Bits, conf: &Configuration, choice: bool) -> Configuration {
        assert_eq!(x.len(), self.n, "input length mismatch");
        assert!(!self.is_halting(conf), "step on a halting configuration");
        let out = self.outcome(
            conf.state,
            x.get(conf.input_head),
            conf.work.get(conf.work_head),
            conf.cat.get(conf.cat_head),
            choice,
        );
        let mut work = conf.work.clone();
        work.set(conf.work_head, out.work_write);
        let mut cat = conf.cat.clone();
        cat.set(conf.cat_head, out.cat_write);
        Configuration {
            state: out.next_state,
            input_head: apply_move(conf.input_head, out.input_move, self.n),
            work_head: apply_move(conf.work_head, out.work_move, self.s),
            cat_head: apply_move(conf.cat_head, out.cat_move, self.c),
            work,
            cat,
        }
    }

    /// Outgoing edges with labels merged when the two choices coincide.
    pub fn forward_edges(&self, x: &Bits, conf: &Configuration) -> Vec<(Labels, Configuration)> {
        if self.is_halting(conf) {
            return Vec::new();
        }
        let succ0 = self.step(x, conf, false);
        let succ1 = self.step(x, conf, true);
        if succ0 == succ1 {
            vec![(Labels::BOTH, succ0)]
        } else {
            vec![(Labels::ZERO, succ0), (Labels::ONE, succ1)]
        }
    }

    /// Incoming edges, computed locally by inverting the transition table.
    /// Results are sorted by the canonical predecessor-descriptor order
    /// (state index, input move, work move, cat move, overwritten work bit,
    /// overwritten cat bit) and merged per predecessor configuration.
    pub fn inverse_edges(&self, x: &Bits, conf: &Configuration) -> Vec<(Labels, Configuration)> {
        assert_eq!(x.len(), self.n, "input length mismatch");
        type Descriptor = (u16, i8, i8, i8, bool, bool);
        let mut found: Vec<(Descriptor, bool, Configuration)> = Vec::new();
        for entry in &self.by_target[conf.state.0 as usize] {
            let out = self.outcome(
                entry.state,
                entry.input_bit,
                entry.work_bit,
                entry.cat_bit,
                entry.choice,
            );
            debug_assert_eq!(out.next_state, conf.state);
            for ih in head_preimages(conf.input_head, out.input_move, self.n) {
                if x.get(ih) != entry.input_bit {
                    continue;
                }
                for wh in head_preimages(conf.work_head, out.work_move, self.s) {
                    if conf.work.get(wh) != out.work_write {
                        continue;
                    }
                    for ch in head_preimages(conf.cat_head, out.cat_move, self.c) {
                        if conf.cat.get(ch) != out.cat_write {
                            continue;
                        }
                        let mut work = conf.work.clone();
                        work.set(wh, entry.work_bit);
                        let mut cat = conf.cat.clone();
                        cat.set(ch, entry.cat_bit);
                        let pred = Configuration {
                            state: entry.state,
                            input_head: ih,
                            work_head: wh,
                            cat_head: ch,
                            work,
                            cat,
                        };
                        if self.step(x, &pred, entry.choice) == *conf {
                            found.push((
                                (
                                    entry.state.0,
                                    out.input_move,
                                    out.work_move,
                                    out.cat_move,
                                    entry.work_bit,
                                    entry.cat_bit,
                                ),
                                entry.choice,
                                pred,
                            ));
                        }
                    }
                }
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
        let mut merged: Vec<(Labels, Configuration)> = Vec::new();
        for (_, choice, pred) in found {
            if let Some(existing) = merged.iter_mut().find(|(_, p)| *p == pred) {
                if choice {
                    existing.0.one = true;
                } else {
                    existing.0.zero = true;
                }
            } else {
                let labels = if choice { Labels::ONE } else { Labels::ZERO };
                merged.push((labels, pred));
            }
        }
        merged
    }

    /// Static bound d_M on the total degree of any configuration in any
    /// configuration graph of this machine: inverse-descriptor count plus 2.
    pub fn degree_bound(&self) -> usize {
        // Group expanded entries by (source state, target state, moves) and
        // bound the predecessors one group can contribute to a single target:
        // head-clamp ambiguity doubles per moving head, and write patterns
        // determine how many overwritten bit values stay consistent.
        // Group key: (source state, target state, input/work/cat moves).
        // Member: (scanned work bit, scanned cat bit, work write, cat write).
        type GroupKey = (u16, u16, i8, i8, i8);
        type GroupMember = (bool, bool, bool, bool);
        let mut groups: HashMap<GroupKey, Vec<GroupMember>> = HashMap::new();
        for q in 0..self.state_count() {
            for key in 0..8 {
                if let Some(pair) = self.transitions[q * 8 + key] {
                    let mut outs = vec![pair[0]];
                    if pair[1] != pair[0] {
                        outs.push(pair[1]);
                    }
                    for out in outs {
                        groups
                            .entry((
                                q as u16,
                                out.next_state.0,
                                out.input_move,
                                out.work_move,
                                out.cat_move,
                            ))
                            .or_default()
                            .push((
                                key >> 1 & 1 == 1,
                                key & 1 == 1,
                                out.work_write,
                                out.cat_write,
                            ));
                    }
                }
            }
        }
        let mut in_bound: HashMap<u16, usize> = HashMap::new();
        for ((_, target, im, wm, cm), members) in &groups {
            let head_mult = |mv: i8| if mv == 0 { 1 } else { 2 };
            // Count overwritten-bit values that can produce a given target bit.
            let bit_mult = |select: fn(&GroupMember) -> (bool, bool)| {
                let mut best = 0;
                for target_bit in [false, true] {
                    let mut vals = [false, false];
                    for m in members {
                        let (overwritten, written) = select(m);
                        if written == target_bit {
                            vals[overwritten as usize] = true;
                        }
                    }
                    best = best.max(vals.iter().filter(|v| **v).count());
                }
                best
            };
            let mult = head_mult(*im)
                * head_mult(*wm)
                * head_mult(*cm)
                * bit_mult(|m| (m.0, m.2))
                * bit_mult(|m| (m.1, m.3));
            *in_bound.entry(*target).or_default() += mult;
        }
        in_bound.values().copied().max().unwrap_or(0) + 2
    }
}

/// Outcome of exploring everything reachable from a start configuration.
#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub valid: bool,
    pub reachable_size: usize,
    pub failure: Option<Invalidity>,
}

#[derive(Clone, Debug)]
pub enum Invalidity {
    /// A cycle in the reachable configuration graph; the walk leads from the
    /// start configuration into and around the cycle.
    Cycle { walk: Vec<Configuration> },
    /// A reachable sink that is not the canonical accept/reject over tau.
    BadSink { sink: Configuration, walk: Vec<Configuration> },
}

impl fmt::Display for Invalidity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invalidity::Cycle { walk } => write!(f, "cycle after {} steps", walk.len() - 1),
            Invalidity::BadSink { sink, .. } => {
                write!(f, "non-canonical sink in state {:?}", sink.state)
            }
        }
    }
}

/// Explore all configurations reachable from the start over `tau` under both
/// choices. Valid iff the reachable graph is acyclic and every sink is the
/// canonical accept or reject configuration with cat = tau.
pub fn validate(spec: &MachineSpec, x: &Bits, tau: &Bits) -> ValidityReport {
    assert_eq!(tau.len(), spec.c);
    let start = spec.start_conf(tau);
    // Iterative DFS with colors for cycle detection; parents for witnesses.
    let mut color: HashMap<Configuration, u8> = HashMap::new(); // 1 = open, 2 = done
    let mut parent: HashMap<Configuration, Configuration> = HashMap::new();
    let mut stack: Vec<(Configuration, bool)> = vec![(start.clone(), false)];
    let mut failure: Option<Invalidity> = None;
    let walk_to = |parent: &HashMap<Configuration, Configuration>, mut conf: Configuration| {
        let mut walk = vec![conf.clone()];
        while let Some(p) = parent.get(&conf) {
            conf = p.clone();
            walk.push(conf.clone());
        }
        walk.reverse();
        walk
    };
    'dfs: while let Some((conf, processed)) = stack.pop() {
        if processed {
            color.insert(conf, 2);
            continue;
        }
        if color.contains_key(&conf) {
            continue;
        }
        color.insert(conf.clone(), 1);
        stack.push((conf.clone(), true));
        let edges = spec.forward_edges(x, &conf);
        if edges.is_empty() {
            let canonical = conf == spec.halting_conf(Outcome::Accept, tau)
                || conf == spec.halting_conf(Outcome::Reject, tau);
            if !canonical && failure.is_none() {
                failure = Some(Invalidity::BadSink {
                    sink: conf.clone(),
                    walk: walk_to(&parent, conf.clone()),
                });
            }
        }
        for (_, succ) in edges {
            match color.get(&succ) {
                Some(1) => {
                    if failure.is_none() {
                        let mut walk = walk_to(&parent, conf.clone());
                        walk.push(succ.clone());
                        failure = Some(Invalidity::Cycle { walk });
                    }
                    break 'dfs;
                }
                Some(_) => {}
                None => {
                    parent.entry(succ.clone()).or_insert_with(|| conf.clone());
                    stack.push((succ, false));
                }
            }
        }
    }
    ValidityReport {
        valid: failure.is_none(),
        reachable_size: color.len(),
        failure,
    }
}

/// Collect every configuration reachable from the start over `tau`.
pub fn reachable_set(spec: &MachineSpec, x: &Bits, tau: &Bits) -> Vec<Configuration> {
    let start = spec.start_conf(tau);
    let mut seen: HashMap<Configuration, ()> = HashMap::new();
    let mut queue = vec![start];
    while let Some(conf) = queue.pop() {
        if seen.contains_key(&conf) {
            continue;
        }
        seen.insert(conf.clone(), ());
        for (_, succ) in spec.forward_edges(x, &conf) {
            queue.push(succ);
        }
    }
    seen.into_keys().collect()
}

/// Reference semantics by full exploration of the reachable DAG.
/// Requires a valid (spec, x, tau).
pub fn brute_semantics(spec: &MachineSpec, x: &Bits, tau: &Bits) -> Result<Verdict, RunError> {
    match spec.mode {
        Mode::Deterministic | Mode::Nondet | Mode::CoNondet => {
            let mut accept_reachable = false;
            let mut reject_reachable = false;
            for conf in reachable_set(spec, x, tau) {
                if conf.state == spec.accept {
                    accept_reachable = true;
                } else if conf.state == spec.reject {
                    reject_reachable = true;
                }
            }
            let outcome = match spec.mode {
                Mode::Nondet | Mode::Deterministic => {
                    if accept_reachable {
                        Outcome::Accept
                    } else {
                        Outcome::Reject
                    }
                }
                Mode::CoNondet => {
                    if reject_reachable {
                        Outcome::Reject
                    } else {
                        Outcome::Accept
                    }
                }
                _ => unreachable!(),
            };
            Ok(Verdict { outcome, probability: None })
        }
        Mode::BoundedRandom | Mode::UnboundedRandom => {
            let p = acceptance_probability(spec, x, tau)?;
            let half = BigRational::new(1.into(), 2.into());
            let third = BigRational::new(1.into(), 3.into());
            let two_thirds = BigRational::new(2.into(), 3.into());
            let outcome = match spec.mode {
                Mode::BoundedRandom => {
                    if p > third && p < two_thirds {
                        return Err(RunError::PromiseViolation(p));
                    }
                    if p >= two_thirds {
                        Outcome::Accept
                    } else {
                        Outcome::Reject
                    }
                }
                Mode::UnboundedRandom => {
                    if p > half {
                        Outcome::Accept
                    } else {
                        Outcome::Reject
                    }
                }
                _ => unreachable!(),
            };
            Ok(Verdict { outcome, probability: Some(p) })
        }
    }
}

/// Exact acceptance probability with p = (p(succ0) + p(succ1)) / 2, computed
/// bottom-up over the reachable DAG.
pub fn acceptance_probability(
    spec: &MachineSpec,
    x: &Bits,
    tau: &Bits,
) -> Result<BigRational, RunError> {
    let start = spec.start_conf(tau);
    let mut memo: HashMap<Configuration, BigRational> = HashMap::new();
    // Post-order over the DAG, iteratively to survive deep chains.
    let mut stack: Vec<(Configuration, bool)> = vec![(start.clone(), false)];
    while let Some((conf, processed)) = stack.pop() {
        if memo.contains_key(&conf) {
            continue;
        }
        if spec.is_halting(&conf) {
            let p = if conf.state == spec.accept {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            memo.insert(conf, p);
            continue;
        }
        let s0 = spec.step(x, &conf, false);
        let s1 = spec.step(x, &conf, true);
        if processed {
            let p0 = memo
                .get(&s0)
                .ok_or_else(|| RunError::InvalidMachine("cyclic configuration graph".into()))?;
            let p1 = memo
                .get(&s1)
                .ok_or_else(|| RunError::InvalidMachine("cyclic configuration graph".into()))?;
            let p = (p0 + p1) / BigRational::from_integer(2.into());
            memo.insert(conf, p);
        } else {
            stack.push((conf, true));
            for succ in [s0, s1] {
                if !memo.contains_key(&succ) {
                    stack.push((succ, false));
                }
            }
        }
    }
    Ok(memo.remove(&start).unwrap())
}

#[cfg(test)]
mod tests;
