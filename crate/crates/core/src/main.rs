//! Command-line surface: validate, simulate, transform, verify, and export
//! catalytic machines from the built-in corpus or from description files.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use catsim::bits::Bits;
use catsim::coc::{driver, DriverShape, VirtualTape};
use catsim::confgraph::{ExploreParams, Layout, ZeroGraphView};
use catsim::machine::{self, parse, MachineSpec, Mode, RunError};
use catsim::meter::SpaceMeter;
use catsim::oracle::OracleError;
use catsim::{coc, corpus, dot, verify};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INVALID_MACHINE: u8 = 2;
const EXIT_LEMMA_FAILURE: u8 = 3;
const EXIT_PROMISE_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "catsim", about = "catalytic Turing machine simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MachineArgs {
    /// Path to a machine description file.
    #[arg(long, conflicts_with = "corpus")]
    machine: Option<String>,
    /// Name of a built-in corpus machine.
    #[arg(long)]
    corpus: Option<String>,
    /// Catalytic tape length for corpus machines.
    #[arg(long, default_value_t = 4)]
    cat_bits: usize,
    /// Override the machine's mode.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    machine: MachineArgs,
    /// Input bits (binary). Defaults to all zeros.
    #[arg(long)]
    input: Option<String>,
    /// Initial catalytic contents: hex digits, "all", or "sample:N:seed".
    #[arg(long, default_value = "all")]
    tau: String,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Override the counter block width B (test mode).
    #[arg(long = "set-B")]
    set_b: Option<usize>,
    /// Override the step cap S (test mode).
    #[arg(long = "set-S")]
    set_s: Option<u128>,
    /// Allow step caps below the completeness threshold 2^(W+3).
    #[arg(long)]
    unsafe_small_s: bool,
    /// Output format: text, dot, or query.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check halting and tape restoration over the selected tapes.
    Validate(RunArgs),
    /// Brute-force reference verdicts over the selected tapes.
    Run(RunArgs),
    /// Run the deterministic driver and report verdicts, traces, and
    /// restoration.
    Transform(TransformArgs),
    /// Run the lemma checkers.
    Verify(RunArgs),
    /// Component-size histograms over the selected tapes.
    Stats(RunArgs),
    /// Emit the reachable configuration graph as DOT.
    ExportDot(RunArgs),
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_machine(args: &MachineArgs) -> Result<MachineSpec, (u8, String)> {
    let spec = if let Some(path) = &args.machine {
        let text = std::fs::read_to_string(path)
            .map_err(|e| (EXIT_USAGE, format!("cannot read {path}: {e}")))?;
        parse::parse_machine(&text).map_err(|e| (EXIT_INVALID_MACHINE, e.to_string()))?
    } else if let Some(name) = &args.corpus {
        corpus::by_name(name, args.cat_bits)
            .ok_or((EXIT_USAGE, format!("unknown corpus machine {name:?}")))?
    } else {
        return Err((EXIT_USAGE, "one of --machine or --corpus is required".into()));
    };
    match &args.mode {
        None => Ok(spec),
        Some(m) => {
            let mode =
                Mode::from_str(m).ok_or((EXIT_USAGE, format!("unknown mode {m:?}")))?;
            set_mode(&spec, mode).map_err(|e| (EXIT_INVALID_MACHINE, e))
        }
    }
}

/// Rebuild a machine under a different mode via the text format.
fn set_mode(spec: &MachineSpec, mode: Mode) -> Result<MachineSpec, String> {
    let text = parse::write_machine(spec);
    let swapped: String = text
        .lines()
        .map(|l| {
            if l.starts_with("mode ") {
                format!("mode {mode}\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    parse::parse_machine(&swapped).map_err(|e| e.to_string())
}

fn input_bits(arg: &Option<String>, n: usize) -> Result<Bits, (u8, String)> {
    match arg {
        None => Ok(Bits::zeros(n)),
        Some(s) => {
            let bits = Bits::parse_bin(s)
                .map_err(|e| (EXIT_USAGE, format!("bad input bits: {e}")))?;
            if bits.len() != n {
                return Err((
                    EXIT_USAGE,
                    format!("input must be {n} bits, got {}", bits.len()),
                ));
            }
            Ok(bits)
        }
    }
}

fn tau_set(arg: &str, c: usize) -> Result<Vec<Bits>, (u8, String)> {
    if arg == "all" {
        if c > 20 {
            return Err((EXIT_USAGE, format!("--tau all is impractical at c = {c}")));
        }
        return Ok((0..1u128 << c).map(|v| Bits::from_uint(v, c)).collect());
    }
    if let Some(rest) = arg.strip_prefix("sample:") {
        let (count, seed) = rest
            .split_once(':')
            .ok_or((EXIT_USAGE, "sample spec must be sample:N:seed".to_string()))?;
        let count: usize = count
            .parse()
            .map_err(|_| (EXIT_USAGE, "bad sample count".to_string()))?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| (EXIT_USAGE, "bad sample seed".to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..count)
            .map(|_| Bits::from_bools((0..c).map(|_| rng.random()).collect()))
            .collect());
    }
    Bits::parse_hex(arg, c).map_err(|e| (EXIT_USAGE, format!("bad tau: {e}"))).map(|b| vec![b])
}

fn params_for(
    spec: &MachineSpec,
    set_b: Option<usize>,
    set_s: Option<u128>,
) -> Result<ExploreParams, (u8, String)> {
    let layout = Layout::for_machine(spec);
    let mut params = ExploreParams::defaults(&layout)
        .map_err(|e| (EXIT_INVALID_MACHINE, e.to_string()))?;
    if let Some(b) = set_b {
        if b == 0 || b >= 128 {
            return Err((EXIT_USAGE, "B must be in 1..128".into()));
        }
        params.b_bits = b;
        params.cap = 1u128 << b;
    }
    if let Some(s) = set_s {
        if s == 0 {
            return Err((EXIT_USAGE, "S must be positive".into()));
        }
        if params.b_bits < 127 && s > 1u128 << params.b_bits {
            return Err((EXIT_USAGE, "S must not exceed 2^B".into()));
        }
        params.cap = s;
    }
    Ok(params)
}

fn cmd_validate(args: &RunArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.machine)?;
    let x = input_bits(&args.input, spec.n)?;
    let taus = tau_set(&args.tau, spec.c)?;
    let mut bad = 0;
    for tau in &taus {
        let report = machine::validate(&spec, &x, tau);
        match &report.failure {
            None => println!(
                "tau {tau} valid (reachable configurations: {})",
                report.reachable_size
            ),
            Some(f) => {
                println!("tau {tau} INVALID: {f}");
                bad += 1;
            }
        }
    }
    println!("valid: {}/{}", taus.len() - bad, taus.len());
    Ok(if bad > 0 { EXIT_INVALID_MACHINE } else { EXIT_OK })
}

fn run_error_exit(e: &RunError) -> u8 {
    match e {
        RunError::PromiseViolation(_) => EXIT_PROMISE_VIOLATION,
        RunError::InvalidMachine(_) => EXIT_INVALID_MACHINE,
    }
}

fn cmd_run(args: &RunArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.machine)?;
    let x = input_bits(&args.input, spec.n)?;
    let taus = tau_set(&args.tau, spec.c)?;
    for tau in &taus {
        match machine::brute_semantics(&spec, &x, tau) {
            Ok(v) => match &v.probability {
                Some(p) => println!("tau {tau} {:?} (p = {p})", v.outcome),
                None => println!("tau {tau} {:?}", v.outcome),
            },
            Err(e) => {
                println!("tau {tau} error: {e}");
                return Ok(run_error_exit(&e));
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_transform(args: &TransformArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.run.machine)?;
    let x = input_bits(&args.run.input, spec.n)?;
    let taus = tau_set(&args.run.tau, spec.c)?;
    let params = params_for(&spec, args.set_b, args.set_s)?;
    let shape =
        DriverShape::derive(&spec, &params).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let meter = SpaceMeter::new();
    let mut restored = 0;
    for tau in &taus {
        let initial = VirtualTape::new(tau.clone(), shape.k, params.b_bits);
        match driver(&spec, &x, &initial, &params, args.unsafe_small_s, &meter) {
            Ok(result) => {
                match &result.verdict.probability {
                    Some(p) => println!("tau {tau} {:?} (p = {p})", result.verdict.outcome),
                    None => println!("tau {tau} {:?}", result.verdict.outcome),
                }
                if args.format == "text" {
                    print!("{}", result.trace.render());
                }
                if args.format == "query" {
                    // Re-explore to print the query the oracle saw.
                    let mut payload = tau.clone();
                    let mut counter = Bits::zeros(params.b_bits);
                    if let Ok(out) = coc::compute_or_compress(
                        &spec,
                        &x,
                        &mut payload,
                        &mut counter,
                        &params,
                        &meter,
                    ) {
                        if let coc::CocAction::Computed(graph) = out.action {
                            print!(
                                "{}",
                                catsim::oracle::serialize_query(&catsim::oracle::OracleQuery {
                                    graph,
                                    mode: spec.mode,
                                })
                            );
                        }
                    }
                }
                if args.format == "dot" {
                    let mut payload = tau.clone();
                    let mut counter = Bits::zeros(params.b_bits);
                    if let Ok(out) = coc::compute_or_compress(
                        &spec,
                        &x,
                        &mut payload,
                        &mut counter,
                        &params,
                        &meter,
                    ) {
                        if let coc::CocAction::Computed(graph) = out.action {
                            print!("{}", dot::explored_graph(&graph));
                        }
                    }
                }
                if result.restored {
                    restored += 1;
                } else {
                    println!("tau {tau} TAPE NOT RESTORED");
                }
            }
            Err(coc::CocError::Oracle(OracleError::PromiseViolation(p))) => {
                println!("tau {tau} promise violation (p = {p})");
                return Ok(EXIT_PROMISE_VIOLATION);
            }
            Err(coc::CocError::Run(e)) => {
                println!("tau {tau} error: {e}");
                return Ok(run_error_exit(&e));
            }
            Err(e) => return Err((EXIT_LEMMA_FAILURE, e.to_string())),
        }
    }
    println!("tape restored: {restored}/{}", taus.len());
    println!("peak auxiliary bits: {}", meter.peak_bits());
    Ok(if restored == taus.len() { EXIT_OK } else { EXIT_LEMMA_FAILURE })
}

fn cmd_verify(args: &RunArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.machine)?;
    let x = input_bits(&args.input, spec.n)?;
    let taus = tau_set(&args.tau, spec.c)?;
    let mut reports = vec![
        verify::check_tree_facts(&spec, &x),
        verify::check_disjointness(&spec, &x),
        verify::check_expectation(&spec, &x).0,
    ];
    for tau in &taus {
        reports.push(verify::check_containment(&spec, &x, tau));
    }
    let inputs = match &args.machine.corpus {
        Some(name) => corpus::default_inputs(name),
        None => vec![x.clone()],
    };
    reports.push(verify::equivalence_sweep(&spec, &inputs));
    let mut failed = false;
    for r in &reports {
        print!("{r}");
        println!();
        failed |= !r.pass;
    }
    Ok(if failed { EXIT_LEMMA_FAILURE } else { EXIT_OK })
}

fn cmd_stats(args: &RunArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.machine)?;
    let x = input_bits(&args.input, spec.n)?;
    let taus = tau_set(&args.tau, spec.c)?;
    let layout = Layout::for_machine(&spec);
    let params =
        ExploreParams::defaults(&layout).map_err(|e| (EXIT_INVALID_MACHINE, e.to_string()))?;
    let meter = SpaceMeter::new();
    let view = ZeroGraphView::new(&spec, &x, params, &meter);
    let mut histogram: std::collections::BTreeMap<(String, String), usize> =
        std::collections::BTreeMap::new();
    for tau in &taus {
        let (acc, rej) = coc::halting_confs(&spec, tau);
        let fmt = |size: Option<u128>| match size {
            Some(v) => v.to_string(),
            None => "inf".to_string(),
        };
        let sa = fmt(view.size(&acc));
        let sr = fmt(view.size(&rej));
        println!("tau {tau} accept-tour {sa} reject-tour {sr}");
        *histogram.entry(("accept".into(), sa)).or_default() += 1;
        *histogram.entry(("reject".into(), sr)).or_default() += 1;
    }
    for ((side, size), count) in &histogram {
        println!("histogram {side} tour {size}: {count} tapes");
    }
    Ok(EXIT_OK)
}

fn cmd_export_dot(args: &RunArgs) -> Result<u8, (u8, String)> {
    let spec = load_machine(&args.machine)?;
    let x = input_bits(&args.input, spec.n)?;
    let taus = tau_set(&args.tau, spec.c)?;
    for tau in &taus {
        print!("{}", dot::config_graph(&spec, &x, tau));
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's help/version on stdout with status 0; real usage
            // errors exit 1.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Run(a) => cmd_run(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::ExportDot(a) => cmd_export_dot(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => fail(code, msg),
    }
}
