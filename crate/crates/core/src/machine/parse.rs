//! Text format for machine descriptions.
//!
//! ```text
//! # comment
//! machine m_id
//! mode deterministic
//! input-bits 2
//! work-bits 2
//! cat-bits 4
//! states start accept reject
//! start start
//! accept accept
//! reject reject
//! trans start * * * -> accept = = S S S
//! ```
//!
//! A `trans` line gives the source state, the (input, work, cat) key bits
//! (`*` expands to both values), then the choice-0 outcome and, after `|`,
//! the choice-1 outcome; a single outcome applies to both choices. An
//! outcome is `next-state work-write cat-write input-move work-move
//! cat-move` with writes in {0, 1, =, !} (= keeps the read bit, ! flips it)
//! and moves in {L, S, R}. Head moves that would leave a tape are clamped
//! to no-move.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ChoiceOutcome, MachineSpec, Mode, SpecError, StateId};

#[derive(Error, Debug)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header field {0:?}")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Semantic(#[from] SpecError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Write token before key expansion.
#[derive(Clone, Copy)]
enum WriteTok {
    Zero,
    One,
    Keep,
    Flip,
}

impl WriteTok {
    fn parse(s: &str, line: usize) -> Result<Self, ParseError> {
        Ok(match s {
            "0" => WriteTok::Zero,
            "1" => WriteTok::One,
            "=" => WriteTok::Keep,
            "!" => WriteTok::Flip,
            other => return Err(syntax(line, format!("invalid write token {other:?}"))),
        })
    }

    fn resolve(self, read: bool) -> bool {
        match self {
            WriteTok::Zero => false,
            WriteTok::One => true,
            WriteTok::Keep => read,
            WriteTok::Flip => !read,
        }
    }

    // Emitting concrete bits is always faithful; `=`/`!` are input sugar.
    fn token(written: bool) -> &'static str {
        if written {
            "1"
        } else {
            "0"
        }
    }
}

fn parse_move(s: &str, line: usize) -> Result<i8, ParseError> {
    Ok(match s {
        "L" | "-1" => -1,
        "S" | "0" => 0,
        "R" | "+1" | "1" => 1,
        other => return Err(syntax(line, format!("invalid move token {other:?}"))),
    })
}

fn parse_key_bit(s: &str, line: usize) -> Result<Option<bool>, ParseError> {
    Ok(match s {
        "0" => Some(false),
        "1" => Some(true),
        "*" => None,
        other => return Err(syntax(line, format!("invalid key bit {other:?}"))),
    })
}

struct RawOutcome {
    next: String,
    ww: WriteTok,
    cw: WriteTok,
    im: i8,
    wm: i8,
    cm: i8,
}

fn parse_outcome(toks: &[&str], line: usize) -> Result<RawOutcome, ParseError> {
    if toks.len() != 6 {
        return Err(syntax(line, "outcome needs 6 tokens: state ww cw im wm cm"));
    }
    Ok(RawOutcome {
        next: toks[0].to_string(),
        ww: WriteTok::parse(toks[1], line)?,
        cw: WriteTok::parse(toks[2], line)?,
        im: parse_move(toks[3], line)?,
        wm: parse_move(toks[4], line)?,
        cm: parse_move(toks[5], line)?,
    })
}

pub fn parse_machine(text: &str) -> Result<MachineSpec, ParseError> {
    let mut name: Option<String> = None;
    let mut mode: Option<Mode> = None;
    let mut n: Option<usize> = None;
    let mut s: Option<usize> = None;
    let mut c: Option<usize> = None;
    let mut states: Vec<String> = Vec::new();
    let mut start: Option<String> = None;
    let mut accept: Option<String> = None;
    let mut reject: Option<String> = None;
    struct RawTrans {
        line: usize,
        state: String,
        key: [Option<bool>; 3],
        out0: RawOutcome,
        out1: Option<RawOutcome>,
    }
    let mut raw: Vec<RawTrans> = Vec::new();

    for (idx, full_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = full_line.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let set_once = |slot: &mut Option<String>, value: &str, what: &str| {
            if slot.is_some() {
                Err(syntax(line, format!("duplicate {what}")))
            } else {
                *slot = Some(value.to_string());
                Ok(())
            }
        };
        match toks[0] {
            "machine" if toks.len() == 2 => set_once(&mut name, toks[1], "machine name")?,
            "mode" if toks.len() == 2 => {
                mode = Some(
                    Mode::from_str(toks[1])
                        .ok_or_else(|| syntax(line, format!("unknown mode {:?}", toks[1])))?,
                );
            }
            "input-bits" | "work-bits" | "cat-bits" if toks.len() == 2 => {
                let v: usize = toks[1]
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid number {:?}", toks[1])))?;
                match toks[0] {
                    "input-bits" => n = Some(v),
                    "work-bits" => s = Some(v),
                    _ => c = Some(v),
                }
            }
            "states" => states.extend(toks[1..].iter().map(|t| t.to_string())),
            "start" if toks.len() == 2 => set_once(&mut start, toks[1], "start")?,
            "accept" if toks.len() == 2 => set_once(&mut accept, toks[1], "accept")?,
            "reject" if toks.len() == 2 => set_once(&mut reject, toks[1], "reject")?,
            "trans" => {
                let arrow = toks
                    .iter()
                    .position(|t| *t == "->")
                    .ok_or_else(|| syntax(line, "trans line missing '->'"))?;
                if arrow != 5 {
                    return Err(syntax(line, "trans needs: trans state i w c -> outcome"));
                }
                let key = [
                    parse_key_bit(toks[2], line)?,
                    parse_key_bit(toks[3], line)?,
                    parse_key_bit(toks[4], line)?,
                ];
                let rest = &toks[arrow + 1..];
                let (out0, out1) = match rest.iter().position(|t| *t == "|") {
                    Some(bar) => (
                        parse_outcome(&rest[..bar], line)?,
                        Some(parse_outcome(&rest[bar + 1..], line)?),
                    ),
                    None => (parse_outcome(rest, line)?, None),
                };
                raw.push(RawTrans {
                    line,
                    state: toks[1].to_string(),
                    key,
                    out0,
                    out1,
                });
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }

    let name = name.ok_or(ParseError::MissingHeader("machine"))?;
    let mode = mode.ok_or(ParseError::MissingHeader("mode"))?;
    let n = n.ok_or(ParseError::MissingHeader("input-bits"))?;
    let s = s.ok_or(ParseError::MissingHeader("work-bits"))?;
    let c = c.ok_or(ParseError::MissingHeader("cat-bits"))?;
    let start = start.ok_or(ParseError::MissingHeader("start"))?;
    let accept = accept.ok_or(ParseError::MissingHeader("accept"))?;
    let reject = reject.ok_or(ParseError::MissingHeader("reject"))?;

    let lookup = |nm: &str| -> Result<StateId, SpecError> {
        states
            .iter()
            .position(|st| st == nm)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| SpecError::UnknownState(nm.to_string()))
    };
    let start = lookup(&start)?;
    let accept = lookup(&accept)?;
    let reject = lookup(&reject)?;

    let mut entries = Vec::new();
    for t in &raw {
        let state = lookup(&t.state).map_err(|e| syntax(t.line, e.to_string()))?;
        let expand = |k: Option<bool>| match k {
            Some(b) => vec![b],
            None => vec![false, true],
        };
        for ib in expand(t.key[0]) {
            for wb in expand(t.key[1]) {
                for cb in expand(t.key[2]) {
                    let resolve = |o: &RawOutcome| -> Result<ChoiceOutcome, ParseError> {
                        Ok(ChoiceOutcome {
                            next_state: lookup(&o.next)
                                .map_err(|e| syntax(t.line, e.to_string()))?,
                            work_write: o.ww.resolve(wb),
                            cat_write: o.cw.resolve(cb),
                            input_move: o.im,
                            work_move: o.wm,
                            cat_move: o.cm,
                        })
                    };
                    let o0 = resolve(&t.out0)?;
                    let o1 = match &t.out1 {
                        Some(o) => resolve(o)?,
                        None => o0,
                    };
                    entries.push((state, ib, wb, cb, [o0, o1]));
                }
            }
        }
    }

    Ok(MachineSpec::assemble(
        name, mode, n, s, c, states, start, accept, reject, entries,
    )?)
}

fn move_token(m: i8) -> &'static str {
    match m {
        -1 => "L",
        0 => "S",
        _ => "R",
    }
}

/// Emit a machine back into the text format; `parse_machine` round-trips it.
pub fn write_machine(spec: &MachineSpec) -> String {
    let mut out = String::new();
    writeln!(out, "machine {}", spec.name).unwrap();
    writeln!(out, "mode {}", spec.mode).unwrap();
    writeln!(out, "input-bits {}", spec.n).unwrap();
    writeln!(out, "work-bits {}", spec.s).unwrap();
    writeln!(out, "cat-bits {}", spec.c).unwrap();
    for chunk in spec.state_names.chunks(8) {
        writeln!(out, "states {}", chunk.join(" ")).unwrap();
    }
    writeln!(out, "start {}", spec.state_names[spec.start.0 as usize]).unwrap();
    writeln!(out, "accept {}", spec.state_names[spec.accept.0 as usize]).unwrap();
    writeln!(out, "reject {}", spec.state_names[spec.reject.0 as usize]).unwrap();
    for q in 0..spec.state_count() {
        let qid = StateId(q as u16);
        if spec.is_halting_state(qid) {
            continue;
        }
        for key in 0..8u8 {
            let (ib, wb, cb) = (key >> 2 & 1 == 1, key >> 1 & 1 == 1, key & 1 == 1);
            let pair = [
                spec.outcome(qid, ib, wb, cb, false),
                spec.outcome(qid, ib, wb, cb, true),
            ];
            let fmt_out = |o: &ChoiceOutcome| {
                format!(
                    "{} {} {} {} {} {}",
                    spec.state_names[o.next_state.0 as usize],
                    WriteTok::token(o.work_write),
                    WriteTok::token(o.cat_write),
                    move_token(o.input_move),
                    move_token(o.work_move),
                    move_token(o.cat_move),
                )
            };
            let mut line = format!(
                "trans {} {} {} {} -> {}",
                spec.state_names[q],
                ib as u8,
                wb as u8,
                cb as u8,
                fmt_out(&pair[0])
            );
            if pair[1] != pair[0] {
                write!(line, " | {}", fmt_out(&pair[1])).unwrap();
            }
            writeln!(out, "{line}").unwrap();
        }
    }
    out
}
