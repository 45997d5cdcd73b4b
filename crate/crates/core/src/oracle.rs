//! Decision procedures on explored graphs, standing in for the bounded-space
//! oracle: reachability for the nondeterministic modes and an exact dyadic
//! acceptance-probability evaluation for the randomized ones.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coc::{ExploredGraph, NodeId};
use crate::machine::{Mode, Outcome, Verdict};

#[derive(Clone, Debug)]
pub struct OracleQuery {
    pub graph: ExploredGraph,
    pub mode: Mode,
}

#[derive(Error, Debug)]
pub enum OracleError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("subgraph reachable from r is cyclic")]
    Cyclic,
    #[error("node {node} lacks a label-{label} successor")]
    MissingSuccessor { node: NodeId, label: u8 },
    #[error("acceptance probability {0} lies in (1/3, 2/3): bounded-error promise violated")]
    PromiseViolation(BigRational),
}

/// True iff a directed path a -> b exists, labels ignored.
pub fn reachable(g: &ExploredGraph, a: NodeId, b: NodeId) -> Result<bool, OracleError> {
    for node in [a, b] {
        if !g.nodes.contains(&node) {
            return Err(OracleError::UnknownNode(node));
        }
    }
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            return Ok(true);
        }
        if !seen.insert(v) {
            continue;
        }
        for (succ, _) in g.successors(v) {
            queue.push_back(*succ);
        }
    }
    Ok(false)
}

/// Exact acceptance probability of the random walk from r: sinks t and rej
/// carry 1 and 0, every interior node averages its label-0 and label-1
/// successors. The reachable subgraph must be acyclic with both successors
/// defined at every non-sink (one {0,1}-labeled edge supplies both).
pub fn accept_probability(g: &ExploredGraph) -> Result<BigRational, OracleError> {
    // Iterative post-order; open nodes double as the cycle check.
    let mut memo: HashMap<NodeId, BigRational> = HashMap::new();
    let mut open: HashSet<NodeId> = HashSet::new();
    let mut stack: Vec<(NodeId, bool)> = vec![(g.r, false)];
    while let Some((v, processed)) = stack.pop() {
        if memo.contains_key(&v) {
            continue;
        }
        if v == g.t {
            memo.insert(v, BigRational::one());
            continue;
        }
        if Some(v) == g.rej {
            memo.insert(v, BigRational::zero());
            continue;
        }
        let succ_for = |label: bool| -> Result<NodeId, OracleError> {
            g.successors(v)
                .iter()
                .find(|(_, l)| if label { l.one } else { l.zero })
                .map(|(s, _)| *s)
                .ok_or(OracleError::MissingSuccessor { node: v, label: label as u8 })
        };
        let s0 = succ_for(false)?;
        let s1 = succ_for(true)?;
        if processed {
            open.remove(&v);
            let p0 = memo.get(&s0).ok_or(OracleError::Cyclic)?;
            let p1 = memo.get(&s1).ok_or(OracleError::Cyclic)?;
            let p = (p0 + p1) / BigRational::from_integer(2.into());
            memo.insert(v, p);
        } else {
            if !open.insert(v) {
                return Err(OracleError::Cyclic);
            }
            stack.push((v, true));
            for succ in [s0, s1] {
                if open.contains(&succ) {
                    return Err(OracleError::Cyclic);
                }
                if !memo.contains_key(&succ) {
                    stack.push((succ, false));
                }
            }
        }
    }
    Ok(memo.remove(&g.r).unwrap())
}

/// Mode-specific decision on the query graph. An absent reject node counts
/// as unreachable for the co-nondeterministic test.
pub fn decide(q: &OracleQuery) -> Result<Verdict, OracleError> {
    let g = &q.graph;
    match q.mode {
        Mode::Deterministic | Mode::Nondet => {
            let acc = reachable(g, g.r, g.t)?;
            Ok(Verdict {
                outcome: if acc { Outcome::Accept } else { Outcome::Reject },
                probability: None,
            })
        }
        Mode::CoNondet => {
            let rej_reachable = match g.rej {
                Some(rej) => reachable(g, g.r, rej)?,
                None => false,
            };
            Ok(Verdict {
                outcome: if rej_reachable { Outcome::Reject } else { Outcome::Accept },
                probability: None,
            })
        }
        Mode::BoundedRandom => {
            let p = accept_probability(g)?;
            let third = BigRational::new(1.into(), 3.into());
            let two_thirds = BigRational::new(2.into(), 3.into());
            if p > third && p < two_thirds {
                return Err(OracleError::PromiseViolation(p));
            }
            Ok(Verdict {
                outcome: if p >= two_thirds { Outcome::Accept } else { Outcome::Reject },
                probability: Some(p),
            })
        }
        Mode::UnboundedRandom => {
            let p = accept_probability(g)?;
            let half = BigRational::new(1.into(), 2.into());
            Ok(Verdict {
                outcome: if p > half { Outcome::Accept } else { Outcome::Reject },
                probability: Some(p),
            })
        }
    }
}

/// Stable text serialization of a query: node list, labeled edge list, and
/// the distinguished nodes. Used at the in-process oracle boundary and for
/// `transform --format query`.
pub fn serialize_query(q: &OracleQuery) -> String {
    let mut out = String::new();
    writeln!(out, "mode {}", q.mode).unwrap();
    writeln!(out, "r {}", q.graph.r).unwrap();
    writeln!(out, "t {}", q.graph.t).unwrap();
    match q.graph.rej {
        Some(rej) => writeln!(out, "rej {rej}").unwrap(),
        None => writeln!(out, "rej -").unwrap(),
    }
    let mut nodes = q.graph.nodes.clone();
    nodes.sort();
    writeln!(out, "nodes {}", nodes.len()).unwrap();
    for n in &nodes {
        writeln!(out, "node {n}").unwrap();
    }
    writeln!(out, "edges {}", q.graph.edge_count()).unwrap();
    for (from, succs) in &q.graph.edges {
        for (to, labels) in succs {
            writeln!(out, "edge {from} -> {to} [{labels}]").unwrap();
        }
    }
    out
}

/// Length of the serialized query in bits, logged at the oracle boundary.
pub fn query_bits(q: &OracleQuery) -> usize {
    serialize_query(q).len() * 8
}
