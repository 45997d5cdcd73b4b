//! Built-in machine corpus: small catalytic machines covering all modes,
//! two deliberately broken machines for negative controls, and a
//! parameterized chain machine with a padded state set so its serialization
//! widths stay constant while its component sizes sweep.
//!
//! Machines are generated in the text format and parsed, so every corpus
//! machine also exercises the parser round trip.

use std::fmt::Write as _;

use crate::bits::Bits;
use crate::machine::parse::parse_machine;
use crate::machine::MachineSpec;

pub const VALID_NAMES: &[&str] = &[
    "m_id",
    "m_flip",
    "coin",
    "maj3",
    "nd_stconn",
    "co_nd_stconn",
    "dec",
    "chain",
];

pub const INVALID_NAMES: &[&str] = &["invalid_loop", "invalid_flip"];

/// Look up a corpus machine by name at the given catalytic tape length.
pub fn by_name(name: &str, c: usize) -> Option<MachineSpec> {
    Some(match name {
        "m_id" => m_id(c),
        "m_flip" => m_flip(c),
        "coin" => coin(c),
        "maj3" => maj3(c),
        "nd_stconn" => stconn(false, c),
        "co_nd_stconn" => stconn(true, c),
        "dec" => dec(c),
        "chain" => chain(16, 1025, c),
        "invalid_loop" => invalid_loop(c),
        "invalid_flip" => invalid_flip(c),
        _ => return None,
    })
}

/// The fixed input set each machine is swept over.
pub fn default_inputs(name: &str) -> Vec<Bits> {
    let parse = |strs: &[&str]| strs.iter().map(|s| Bits::parse_bin(s).unwrap()).collect();
    match name {
        "nd_stconn" | "co_nd_stconn" => {
            parse(&["110011", "100000", "100101", "000000", "001000"])
        }
        // The all-free input (acceptance probability exactly 1/2) violates
        // the bounded-error promise and is exercised separately.
        "maj3" => parse(&["110000", "111100", "100000", "101000"]),
        _ => parse(&["0", "1"]),
    }
}

/// MAJ3 input on which every vote is a fresh random bit, making the
/// acceptance probability exactly 1/2.
pub fn maj3_promise_violation_input() -> Bits {
    Bits::parse_bin("000000").unwrap()
}


/// Smallest work tape length with 2^s >= c; the corpus machines never write
/// the work tape but must satisfy the model constraint.
fn s_for(c: usize) -> usize {
    let mut s = 1;
    while (1usize << s) < c {
        s += 1;
    }
    s
}

fn header(out: &mut String, name: &str, mode: &str, n: usize, s: usize, c: usize) {
    writeln!(out, "machine {name}").unwrap();
    writeln!(out, "mode {mode}").unwrap();
    writeln!(out, "input-bits {n}").unwrap();
    writeln!(out, "work-bits {s}").unwrap();
    writeln!(out, "cat-bits {c}").unwrap();
}

fn footer(out: &mut String, states: &[String], start: &str) {
    for chunk in states.chunks(8) {
        writeln!(out, "states {}", chunk.join(" ")).unwrap();
    }
    writeln!(out, "start {start}").unwrap();
    writeln!(out, "accept accept").unwrap();
    writeln!(out, "reject reject").unwrap();
}

fn parsed(text: &str) -> MachineSpec {
    parse_machine(text).expect("corpus machine must parse")
}

/// One step to accept; touches nothing.
pub fn m_id(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "m_id", "deterministic", 1, s_for(c), c);
    footer(
        &mut t,
        &["start".into(), "accept".into(), "reject".into()],
        "start",
    );
    writeln!(t, "trans start * * * -> accept = = S S S").unwrap();
    parsed(&t)
}

/// Flips the first catalytic bit and flips it back before accepting.
pub fn m_flip(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "m_flip", "deterministic", 1, s_for(c), c);
    footer(
        &mut t,
        &["start".into(), "back".into(), "accept".into(), "reject".into()],
        "start",
    );
    writeln!(t, "trans start * * * -> back = ! S S S").unwrap();
    writeln!(t, "trans back * * * -> accept = ! S S S").unwrap();
    parsed(&t)
}

/// One random bit decides accept or reject; p = 1/2 exactly.
pub fn coin(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "coin", "unbounded-random", 1, s_for(c), c);
    footer(
        &mut t,
        &["start".into(), "accept".into(), "reject".into()],
        "start",
    );
    writeln!(
        t,
        "trans start * * * -> accept = = S S S | reject = = S S S"
    )
    .unwrap();
    parsed(&t)
}

/// Majority of three votes; input pairs (f_i, v_i) force vote i to v_i when
/// f_i = 1 and draw it as a random bit otherwise. Acceptance probabilities
/// {0, 1/4, 1/2, 3/4, 1} are all reachable through the forced pattern.
pub fn maj3(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "maj3", "bounded-random", 6, s_for(c), c);
    let mut states: Vec<String> = Vec::new();
    for i in 0..3usize {
        for k in 0..=i {
            states.push(format!("f{i}_{k}"));
            states.push(format!("v{i}_{k}"));
        }
        for j in 0..=i + 1 {
            states.push(format!("g{i}_{j}"));
        }
    }
    for j in 1..=4 {
        states.push(format!("rwa{j}"));
        states.push(format!("rwr{j}"));
    }
    states.push("accept".into());
    states.push("reject".into());
    footer(&mut t, &states, "f0_0");

    // Rewind entry from input position 5: four left moves remain after the
    // transition that enters the chain.
    let decide = |total: usize| if total >= 2 { "rwa4" } else { "rwr4" };
    for i in 0..3usize {
        for k in 0..=i {
            // Forced vote: read v_i next door.
            writeln!(t, "trans f{i}_{k} 1 * * -> v{i}_{k} = = R S S").unwrap();
            // Free vote: the choice bit is the vote.
            writeln!(
                t,
                "trans f{i}_{k} 0 * * -> g{i}_{k} = = R S S | g{i}_{} = = R S S",
                k + 1
            )
            .unwrap();
            for b in 0..2usize {
                let total = k + b;
                let target = if i < 2 {
                    format!("f{}_{total} = = R S S", i + 1)
                } else {
                    format!("{} = = L S S", decide(total))
                };
                writeln!(t, "trans v{i}_{k} {b} * * -> {target}").unwrap();
            }
        }
        for j in 0..=i + 1 {
            let target = if i < 2 {
                format!("f{}_{j} = = R S S", i + 1)
            } else {
                format!("{} = = L S S", decide(j))
            };
            writeln!(t, "trans g{i}_{j} * * * -> {target}").unwrap();
        }
    }
    for j in (1..=4usize).rev() {
        let (ta, tr) = if j == 1 {
            ("accept".to_string(), "reject".to_string())
        } else {
            (format!("rwa{}", j - 1), format!("rwr{}", j - 1))
        };
        writeln!(t, "trans rwa{j} * * * -> {ta} = = L S S").unwrap();
        writeln!(t, "trans rwr{j} * * * -> {tr} = = L S S").unwrap();
    }
    parsed(&t)
}

/// Edge index of the unordered pair (v, w) in the 6-bit upper-triangle
/// encoding over 4 vertices: (01, 02, 03, 12, 13, 23).
fn edge_index(v: usize, w: usize) -> usize {
    let (a, b) = if v < w { (v, w) } else { (w, v) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => unreachable!("edge index on equal vertices"),
    }
}

/// s-t connectivity from vertex 0 to vertex 3 on an input-encoded 4-vertex
/// graph: three rounds, each guessing the next vertex with two choice bits,
/// walking the input head to the edge bit and back. `swap` exchanges the
/// halting roles, giving the co-nondeterministic non-connectivity machine.
fn stconn(swap: bool, c: usize) -> MachineSpec {
    let (acc, rej) = if swap { ("reject", "accept") } else { ("accept", "reject") };
    let mut t = String::new();
    header(
        &mut t,
        if swap { "co_nd_stconn" } else { "nd_stconn" },
        if swap { "co-nondet" } else { "nondet" },
        6,
        s_for(c),
        c,
    );
    let mut states: Vec<String> = Vec::new();
    let mut trans: Vec<String> = Vec::new();

    // Walking chain into the read of edge bit e, then back out: position is
    // implied by the state, keeping the head-at-zero invariant at every at_*.
    let step_in = |tt: usize, w: usize, e: usize, r: usize| {
        if r == 0 {
            format!("rd{tt}_{w}_{e}")
        } else {
            format!("wk{tt}_{w}_{e}_{r}")
        }
    };
    let step_ret = |tt: usize, w: usize, j: usize| {
        if j == 0 {
            format!("at{tt}_{w}")
        } else {
            format!("ret{tt}_{w}_{j}")
        }
    };
    let step_fail = |j: usize| {
        if j == 0 {
            rej.to_string()
        } else {
            format!("fail{j}")
        }
    };

    for tt in 0..=3usize {
        for v in 0..=3usize {
            states.push(format!("at{tt}_{v}"));
            if v == 3 {
                trans.push(format!("trans at{tt}_{v} * * * -> {acc} = = S S S"));
            } else if tt == 3 {
                trans.push(format!("trans at{tt}_{v} * * * -> {rej} = = S S S"));
            } else {
                trans.push(format!(
                    "trans at{tt}_{v} * * * -> g{tt}_{v}_0 = = S S S | g{tt}_{v}_1 = = S S S"
                ));
            }
        }
    }
    for tt in 0..3usize {
        for v in 0..3usize {
            for b in 0..2usize {
                states.push(format!("g{tt}_{v}_{b}"));
                let out = |w: usize| {
                    if w == v {
                        format!("at{}_{v} = = S S S", tt + 1)
                    } else {
                        let e = edge_index(v, w);
                        if e == 0 {
                            format!("rd{tt}_{w}_0 = = S S S")
                        } else {
                            format!("{} = = R S S", step_in(tt, w, e, e - 1))
                        }
                    }
                };
                trans.push(format!(
                    "trans g{tt}_{v}_{b} * * * -> {} | {}",
                    out(2 * b),
                    out(2 * b + 1)
                ));
            }
        }
        // (w, e) pairs that some guess can produce at this round.
        for w in 0..=3usize {
            let mut edges: Vec<usize> = (0..=3)
                .filter(|v| *v != w && *v != 3)
                .map(|v| edge_index(v, w))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            for &e in &edges {
                for r in 1..e {
                    states.push(format!("wk{tt}_{w}_{e}_{r}"));
                    trans.push(format!(
                        "trans wk{tt}_{w}_{e}_{r} * * * -> {} = = R S S",
                        step_in(tt, w, e, r - 1)
                    ));
                }
                states.push(format!("rd{tt}_{w}_{e}"));
                let hit = if e == 0 {
                    format!("at{}_{w} = = S S S", tt + 1)
                } else {
                    format!("{} = = L S S", step_ret(tt + 1, w, e - 1))
                };
                let miss = if e == 0 {
                    format!("{rej} = = S S S")
                } else {
                    format!("{} = = L S S", step_fail(e - 1))
                };
                trans.push(format!("trans rd{tt}_{w}_{e} 1 * * -> {hit}"));
                trans.push(format!("trans rd{tt}_{w}_{e} 0 * * -> {miss}"));
            }
            // One return chain per target vertex, long enough for the
            // farthest edge bit.
            let max_e = edges.last().copied().unwrap_or(0);
            for j in 1..max_e {
                states.push(format!("ret{}_{w}_{j}", tt + 1));
                trans.push(format!(
                    "trans ret{}_{w}_{j} * * * -> {} = = L S S",
                    tt + 1,
                    step_ret(tt + 1, w, j - 1)
                ));
            }
        }
    }
    for j in 1..=4usize {
        states.push(format!("fail{j}"));
        trans.push(format!(
            "trans fail{j} * * * -> {} = = L S S",
            step_fail(j - 1)
        ));
    }
    states.push("accept".into());
    states.push("reject".into());
    footer(&mut t, &states, "at0_0");
    for line in trans {
        writeln!(t, "{line}").unwrap();
    }
    parsed(&t)
}

/// Accepts immediately from the start state, but carries an unreachable
/// binary-countdown gadget on the catalytic tape whose whole history drains
/// into the canonical accept over the all-zero tape. That one component is
/// large while all others stay small, which is exactly the shape the
/// compression path needs at a small step cap.
pub fn dec(c: usize) -> MachineSpec {
    assert!(c >= 1);
    let mut t = String::new();
    header(&mut t, "dec", "deterministic", 1, s_for(c), c);
    let mut states: Vec<String> = vec!["start".into()];
    let mut trans: Vec<String> = vec!["trans start * * * -> accept = = S S S".into()];

    let rwz_step = |j: usize| if j == 0 { "accept".to_string() } else { format!("rwz{j}") };
    let rl_step = |j: usize| if j == 0 { "chk0".to_string() } else { format!("rl{j}") };
    let walk_step = |q: usize| {
        if q == c - 1 {
            format!("dec{}", c - 1)
        } else {
            format!("w{q}")
        }
    };

    for p in 0..c {
        states.push(format!("chk{p}"));
        if p < c - 1 {
            trans.push(format!("trans chk{p} * * 0 -> chk{} = = S S R", p + 1));
            trans.push(format!(
                "trans chk{p} * * 1 -> {} = = S S R",
                walk_step(p + 1)
            ));
        } else if c == 1 {
            trans.push("trans chk0 * * 0 -> accept = = S S S".into());
            trans.push("trans chk0 * * 1 -> chk0 = 0 S S S".into());
        } else {
            trans.push(format!(
                "trans chk{p} * * 0 -> {} = = S S L",
                rwz_step(c - 2)
            ));
            trans.push(format!(
                "trans chk{p} * * 1 -> {} = 0 S S L",
                rl_step(c - 2)
            ));
        }
    }
    for q in 1..c.saturating_sub(1) {
        states.push(format!("w{q}"));
        trans.push(format!("trans w{q} * * * -> {} = = S S R", walk_step(q + 1)));
    }
    if c >= 2 {
        for q in 0..c {
            states.push(format!("dec{q}"));
            if q == 0 {
                trans.push("trans dec0 * * 1 -> chk0 = 0 S S S".into());
                // Unreachable during a real borrow (the value is nonzero);
                // kept total and acyclic by bumping the bit and rescanning.
                trans.push("trans dec0 * * 0 -> chk0 = 1 S S S".into());
            } else {
                trans.push(format!(
                    "trans dec{q} * * 1 -> {} = 0 S S L",
                    rl_step(q - 1)
                ));
                trans.push(format!("trans dec{q} * * 0 -> dec{} = 1 S S L", q - 1));
            }
        }
    }
    for j in 1..=c.saturating_sub(2) {
        states.push(format!("rl{j}"));
        trans.push(format!("trans rl{j} * * * -> {} = = S S L", rl_step(j - 1)));
        states.push(format!("rwz{j}"));
        trans.push(format!(
            "trans rwz{j} * * * -> {} = = S S L",
            rwz_step(j - 1)
        ));
    }
    states.push("accept".into());
    states.push("reject".into());
    footer(&mut t, &states, "start");
    for line in trans {
        writeln!(t, "{line}").unwrap();
    }
    parsed(&t)
}

/// A straight chain of m states into accept, padded with unreachable
/// self-looping states up to `pad` total states so the serialization width
/// W is independent of m. Every tape's accept component has m + 1 vertices.
pub fn chain(m: usize, pad: usize, c: usize) -> MachineSpec {
    assert!(m >= 1);
    assert!(pad >= m + 2, "padding must cover the chain and halting states");
    let mut t = String::new();
    header(&mut t, "chain", "deterministic", 1, s_for(c), c);
    let mut states: Vec<String> = (0..m).map(|i| format!("s{i}")).collect();
    states.push("accept".into());
    states.push("reject".into());
    for i in 0..pad - m - 2 {
        states.push(format!("pad{i}"));
    }
    footer(&mut t, &states, "s0");
    for i in 0..m {
        let target = if i == m - 1 { "accept".to_string() } else { format!("s{}", i + 1) };
        writeln!(t, "trans s{i} * * * -> {target} = = S S S").unwrap();
    }
    for i in 0..pad - m - 2 {
        writeln!(t, "trans pad{i} * * * -> pad{i} = = S S S").unwrap();
    }
    parsed(&t)
}

/// Negative control: spins forever on the start state.
pub fn invalid_loop(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "invalid_loop", "deterministic", 1, s_for(c), c);
    footer(
        &mut t,
        &["start".into(), "accept".into(), "reject".into()],
        "start",
    );
    writeln!(t, "trans start * * * -> start = = S S S").unwrap();
    parsed(&t)
}

/// Negative control: halts with the first catalytic bit flipped.
pub fn invalid_flip(c: usize) -> MachineSpec {
    let mut t = String::new();
    header(&mut t, "invalid_flip", "deterministic", 1, s_for(c), c);
    footer(
        &mut t,
        &["start".into(), "accept".into(), "reject".into()],
        "start",
    );
    writeln!(t, "trans start * * * -> accept = ! S S S").unwrap();
    parsed(&t)
}

#[cfg(test)]
mod tests;
