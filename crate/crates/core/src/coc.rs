//! The compute-or-compress subroutine and the driving procedure that turns a
//! nondeterministic / co-nondeterministic / randomized catalytic run into a
//! deterministic one with a single graph-oracle query, restoring the
//! catalytic tape bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{bit_width, Bits};
use crate::confgraph::{EdgeRef, ExploreParams, Layout, ParamError, ZeroGraphView};
use crate::machine::{Configuration, Labels, MachineSpec, Outcome, RunError, Verdict};
use crate::meter::SpaceMeter;
use crate::oracle::{self, OracleError, OracleQuery};

/// A node of the explored graph: the canonical walk index within the tour
/// rooted at accept (side 0) or reject (side 1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId {
    pub index: u128,
    pub side: u8,
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.index, self.side)
    }
}

/// The compute-case output: a labeled directed graph over canonical indices
/// with distinguished start, accept, and reject nodes. Stored sparsely; the
/// subgraph forward-reachable from `r` is isomorphic to the reachable
/// configuration graph with labels preserved.
#[derive(Clone, Debug)]
pub struct ExploredGraph {
    pub nodes: Vec<NodeId>,
    pub edges: BTreeMap<NodeId, Vec<(NodeId, Labels)>>,
    pub r: NodeId,
    pub t: NodeId,
    pub rej: Option<NodeId>,
}

impl ExploredGraph {
    pub fn successors(&self, v: NodeId) -> &[(NodeId, Labels)] {
        self.edges.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }
}

/// The driver's catalytic tape: a c-bit payload block followed by k counter
/// blocks of B bits each.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VirtualTape {
    pub payload: Bits,
    pub counters: Vec<Bits>,
}

impl VirtualTape {
    pub fn new(payload: Bits, k: usize, b_bits: usize) -> Self {
        VirtualTape {
            payload,
            counters: vec![Bits::zeros(b_bits); k],
        }
    }

    /// Rebuild from flat contents of length c + k*B.
    pub fn from_bits(bits: &Bits, c: usize, k: usize, b_bits: usize) -> Self {
        assert_eq!(bits.len(), c + k * b_bits);
        VirtualTape {
            payload: bits.slice(0, c),
            counters: (0..k)
                .map(|i| bits.slice(c + i * b_bits, c + (i + 1) * b_bits))
                .collect(),
        }
    }

    pub fn to_bits(&self) -> Bits {
        let mut out = self.payload.clone();
        for ctr in &self.counters {
            out = out.concat(ctr);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum CocAction {
    Computed(ExploredGraph),
    Compressed(CompressSummary),
}

/// Action taken plus the component sizes that decided it.
#[derive(Clone, Debug)]
pub struct CocOutcome {
    pub action: CocAction,
    pub size_accept: Option<u128>,
    pub size_reject: Option<u128>,
}

#[derive(Clone, Debug)]
pub struct CompressSummary {
    /// Which halting root anchored the long walk.
    pub root: Outcome,
    /// Steps walked (counter value plus one).
    pub steps: u128,
    /// Counter bits zeroed by the record padding.
    pub freed_bits: usize,
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub round: usize,
    pub action: &'static str,
    pub size_accept: Option<u128>,
    pub size_reject: Option<u128>,
    pub freed_bits: usize,
    pub oracle_query_bits: usize,
}

#[derive(Clone, Default, Debug)]
pub struct Trace {
    pub rounds: Vec<RoundRecord>,
    /// Tapes tried during the brute-force search phase.
    pub search_tapes_tried: u128,
}

impl Trace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            let fmt_size = |s: &Option<u128>| match s {
                Some(v) => v.to_string(),
                None => "inf".to_string(),
            };
            writeln!(
                out,
                "round {} action {} size-accept {} size-reject {} freed-bits {} oracle-query-bits {}",
                r.round,
                r.action,
                fmt_size(&r.size_accept),
                fmt_size(&r.size_reject),
                r.freed_bits,
                r.oracle_query_bits,
            )
            .unwrap();
        }
        writeln!(out, "search-tapes-tried {}", self.search_tapes_tried).unwrap();
        out
    }
}

#[derive(Error, Debug)]
pub enum CocError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("walk error: {0}")]
    Walk(#[from] crate::confgraph::WalkError),
    #[error("start configuration not found among canonical nodes (machine invalid?)")]
    StartNotFound,
    #[error("counter value {ctr} + 1 exceeds the step cap S = {cap}")]
    CounterExceedsCap { ctr: u128, cap: u128 },
    #[error("compression record corrupted: walking back did not reach a halting root")]
    Corrupted,
    #[error(
        "driver completeness requires S >= 2^(W+3) (S = {cap}, W = {w}); pass the unsafe flag to run anyway"
    )]
    SmallS { cap: u128, w: usize },
    #[error("no tape with small components found in the search phase (S too small for completeness)")]
    SearchExhausted,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// Canonical accept and reject configurations over `tau`.
pub fn halting_confs(spec: &MachineSpec, tau: &Bits) -> (Configuration, Configuration) {
    (
        spec.halting_conf(Outcome::Accept, tau),
        spec.halting_conf(Outcome::Reject, tau),
    )
}

/// Derived driver shape: counter block count and record widths.
#[derive(Clone, Copy, Debug)]
pub struct DriverShape {
    pub w: usize,
    pub b_bits: usize,
    pub edge_index_bits: usize,
    pub freed_per_round: usize,
    pub k: usize,
}

impl DriverShape {
    pub fn derive(spec: &MachineSpec, params: &ExploreParams) -> Result<DriverShape, ParamError> {
        let layout = Layout::for_machine(spec);
        let w = layout.w();
        let edge_index_bits = bit_width(spec.degree_bound() as u128);
        let b = params.b_bits;
        if w + edge_index_bits + 1 > b {
            return Err(ParamError::CounterTooNarrow { b, need: w + edge_index_bits + 1 });
        }
        let freed_per_round = b - w - edge_index_bits;
        let k = (spec.c + b).div_ceil(freed_per_round) + 1;
        Ok(DriverShape {
            w,
            b_bits: b,
            edge_index_bits,
            freed_per_round,
            k,
        })
    }
}

/// One round of compute-or-compress over (payload, counter).
///
/// Compute: both halting components fit in S/2 + 1 vertices; emits the
/// explored graph and leaves the tape untouched.
///
/// Compress: walks counter+1 tour steps from the large component's root,
/// leaving the walk's catalytic contents as the new payload and the
/// (extended-work part, edge index, zero padding) record in the counter.
pub fn compute_or_compress(
    spec: &MachineSpec,
    x: &Bits,
    payload: &mut Bits,
    counter: &mut Bits,
    params: &ExploreParams,
    meter: &SpaceMeter,
) -> Result<CocOutcome, CocError> {
    let shape = DriverShape::derive(spec, params)?;
    assert_eq!(counter.len(), shape.b_bits, "counter block width mismatch");
    let view = ZeroGraphView::new(spec, x, *params, meter);
    let layout = view.layout;
    let _g = meter.enter(
        "compute_or_compress",
        2 * (layout.w() + bit_width(spec.degree_bound() as u128))
            + 3 * (bit_width(params.cap) + 1),
    );
    let (accept_root, reject_root) = halting_confs(spec, payload);
    let size_accept = view.size(&accept_root);
    let size_reject = view.size(&reject_root);
    let outcome = |action| CocOutcome { action, size_accept, size_reject };

    if size_accept.is_some() && size_reject.is_some() {
        let graph = explore_graph(&view, payload, &accept_root, &reject_root)?;
        return Ok(outcome(CocAction::Computed(graph)));
    }

    // Compress case: prefer the accept root when its component is large.
    let (root_conf, root_kind) = if size_accept.is_none() {
        (accept_root, Outcome::Accept)
    } else {
        (reject_root, Outcome::Reject)
    };
    let ctr = counter.to_u128();
    let steps = ctr + 1;
    if steps > params.cap {
        return Err(CocError::CounterExceedsCap { ctr, cap: params.cap });
    }
    let reached = view.walk(&EdgeRef { conf: root_conf, index: 0 }, steps)?;
    // size = infinity guarantees the walk never revisits the root slot, so
    // stepping back from `reached` counts exactly `steps`.
    debug_assert!(
        !(spec.is_halting(&reached.conf) && reached.index == 0),
        "walk revisited the root slot despite an infinite tour"
    );
    *payload = reached.conf.cat.clone();
    let mut record = layout.serialize_extended(&reached.conf);
    record.push_uint(reached.index as u128, shape.edge_index_bits);
    let freed = shape.b_bits - record.len();
    record = record.concat(&Bits::zeros(freed));
    *counter = record;
    Ok(outcome(CocAction::Compressed(CompressSummary {
        root: root_kind,
        steps,
        freed_bits: freed,
    })))
}

/// Enumerate canonical nodes of both halting tours and connect them with the
/// labeled edges of the configuration graph.
fn explore_graph(
    view: &ZeroGraphView<'_>,
    tau: &Bits,
    accept_root: &Configuration,
    reject_root: &Configuration,
) -> Result<ExploredGraph, CocError> {
    let spec = view.spec;
    // Canonical index per configuration, discovered along the Euler tours.
    // The abstract subroutine recovers an index with CountStepsBack; the
    // index cache trades that re-walk for time.
    let mut canon_of: std::collections::HashMap<Configuration, NodeId> =
        std::collections::HashMap::new();
    let mut nodes: Vec<(NodeId, Configuration)> = Vec::new();
    for (side, root) in [(0u8, accept_root), (1u8, reject_root)] {
        let tour = view.size(root).expect("compute case requires finite tours");
        let mut slot = EdgeRef { conf: root.clone(), index: 0 };
        let span = if view.degree(root) == 0 { 1 } else { tour };
        for t in 0..span {
            if slot.index == 0 {
                let id = NodeId { index: t, side };
                canon_of.insert(slot.conf.clone(), id);
                nodes.push((id, slot.conf.clone()));
            }
            if span > 1 {
                slot = view.next_edge(&slot);
            }
        }
    }

    let mut edges: BTreeMap<NodeId, Vec<(NodeId, Labels)>> = BTreeMap::new();
    for (id, conf) in &nodes {
        for (labels, succ) in spec.forward_edges(view.x, conf) {
            // Successors outside the two components have no canonical index
            // and are dropped, matching the indexing over the two tours.
            if let Some(succ_id) = canon_of.get(&succ) {
                edges.entry(*id).or_default().push((*succ_id, labels));
            }
        }
    }

    let start = spec.start_conf(tau);
    let r = *canon_of.get(&start).ok_or(CocError::StartNotFound)?;
    let t = *canon_of.get(accept_root).expect("accept root is canonical node 0");
    let rej = canon_of.get(reject_root).copied();
    Ok(ExploredGraph {
        nodes: nodes.into_iter().map(|(id, _)| id).collect(),
        edges,
        r,
        t,
        rej,
    })
}

/// Invert one compress round: parse the (u, j) record from the counter
/// block, step back to the halting root, restore the previous payload, and
/// rewrite the counter with the recovered step count minus one.
pub fn decompress_round(
    spec: &MachineSpec,
    x: &Bits,
    payload: &mut Bits,
    counter: &mut Bits,
    params: &ExploreParams,
    meter: &SpaceMeter,
) -> Result<(), CocError> {
    let shape = DriverShape::derive(spec, params)?;
    let view = ZeroGraphView::new(spec, x, *params, meter);
    let _g = meter.enter(
        "decompress_round",
        view.layout.w() + shape.edge_index_bits + bit_width(params.cap) + 1,
    );
    let ext = counter.slice(0, shape.w);
    let index = counter.uint_at(shape.w, shape.edge_index_bits) as usize;
    let conf = view.layout.deserialize_extended(&ext, payload);
    let (count, root_slot) = view.count_steps_back(&EdgeRef { conf, index });
    let count = count.ok_or(CocError::Corrupted)?;
    if count == 0 {
        return Err(CocError::Corrupted);
    }
    *payload = root_slot.conf.cat.clone();
    *counter = Bits::from_uint(count - 1, shape.b_bits);
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DriverResult {
    pub verdict: Verdict,
    pub tape: VirtualTape,
    pub trace: Trace,
    pub restored: bool,
}

/// The full reduction: iterate compute-or-compress over the counter blocks;
/// on the first compute, consult the oracle; if every round compresses, use
/// the freed space to search over payloads; finally decompress the executed
/// rounds in reverse order. The tape ends bit-identical to how it started.
pub fn driver(
    spec: &MachineSpec,
    x: &Bits,
    initial: &VirtualTape,
    params: &ExploreParams,
    allow_small_s: bool,
    meter: &SpaceMeter,
) -> Result<DriverResult, CocError> {
    let shape = DriverShape::derive(spec, params)?;
    assert_eq!(initial.counters.len(), shape.k, "counter block count mismatch");
    if !allow_small_s && params.cap < 1u128 << (shape.w + 3).min(127) {
        return Err(CocError::SmallS { cap: params.cap, w: shape.w });
    }
    let snapshot = initial.clone();
    let mut tape = initial.clone();
    let mut trace = Trace::default();

    let mut answer: Option<Result<Verdict, CocError>> = None;
    let mut compressed_rounds: usize = 0;

    for round in 0..shape.k {
        let mut counter = tape.counters[round].clone();
        // Round errors surface only after the earlier rounds are undone;
        // compute_or_compress mutates the tape only on success.
        let out = match compute_or_compress(spec, x, &mut tape.payload, &mut counter, params, meter)
        {
            Ok(out) => out,
            Err(e) => {
                answer = Some(Err(e));
                break;
            }
        };
        tape.counters[round] = counter;
        match out.action {
            CocAction::Computed(graph) => {
                let query = OracleQuery { graph, mode: spec.mode };
                let query_bits = oracle::query_bits(&query);
                trace.rounds.push(RoundRecord {
                    round,
                    action: "compute",
                    size_accept: out.size_accept,
                    size_reject: out.size_reject,
                    freed_bits: 0,
                    oracle_query_bits: query_bits,
                });
                answer = Some(oracle::decide(&query).map_err(CocError::Oracle));
                break;
            }
            CocAction::Compressed(summary) => {
                trace.rounds.push(RoundRecord {
                    round,
                    action: "compress",
                    size_accept: out.size_accept,
                    size_reject: out.size_reject,
                    freed_bits: summary.freed_bits,
                    oracle_query_bits: 0,
                });
                compressed_rounds += 1;
            }
        }
    }

    if answer.is_none() {
        // Every round compressed: at least c + B bits are free, enough to
        // sweep payload candidates with a saturated counter.
        let _g = meter.enter("tape_search", spec.c + shape.b_bits);
        let mut tau_k = Bits::zeros(spec.c);
        loop {
            trace.search_tapes_tried += 1;
            let mut candidate = tau_k.clone();
            let mut ctr_k = Bits::from_uint(params.cap - 1, shape.b_bits);
            // Search errors only touch the local candidate; surface them
            // after the real rounds are undone below.
            let out = match compute_or_compress(spec, x, &mut candidate, &mut ctr_k, params, meter)
            {
                Ok(out) => out,
                Err(e) => {
                    answer = Some(Err(e));
                    break;
                }
            };
            match out.action {
                CocAction::Computed(graph) => {
                    let query = OracleQuery { graph, mode: spec.mode };
                    let query_bits = oracle::query_bits(&query);
                    trace.rounds.push(RoundRecord {
                        round: shape.k,
                        action: "search-compute",
                        size_accept: out.size_accept,
                        size_reject: out.size_reject,
                        freed_bits: 0,
                        oracle_query_bits: query_bits,
                    });
                    answer = Some(oracle::decide(&query).map_err(CocError::Oracle));
                    break;
                }
                CocAction::Compressed(_) => {
                    if let Err(e) =
                        decompress_round(spec, x, &mut candidate, &mut ctr_k, params, meter)
                    {
                        answer = Some(Err(e));
                        break;
                    }
                    debug_assert_eq!(candidate, tau_k);
                    if tau_k.increment() {
                        // Wrapped around: no good tape exists at this S.
                        answer = Some(Err(CocError::SearchExhausted));
                        break;
                    }
                }
            }
        }
    }

    // Decompress the executed compress rounds in reverse order regardless of
    // the oracle outcome, so the tape is restored even on error paths.
    for round in (0..compressed_rounds).rev() {
        let mut counter = tape.counters[round].clone();
        decompress_round(spec, x, &mut tape.payload, &mut counter, params, meter)?;
        tape.counters[round] = counter;
    }

    let restored = tape == snapshot;
    let verdict = answer.expect("driver always produces an answer or an error")?;
    Ok(DriverResult {
        verdict,
        tape,
        trace,
        restored,
    })
}
