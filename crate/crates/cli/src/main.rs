use std::io::Read;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use freeknot::explore::{
    distinguish, invariance_trials, reduce, rotation_trials, scramble_path, search_nontrivial, trial_rng, Mode,
    TrialConfig, Verdict,
};
use freeknot::group::{relation_check, relation_check_with, ParityRule};
use freeknot::moves::{enumerate_moves, MoveLimits};
use freeknot::{evaluate, filtration, word_of, ChordDiagram, NormalForm};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

const DEFAULT_SEED: u64 = 20_240_601;

/// Parity-filtration invariant of free knots given as Gauss codes.
#[derive(Parser)]
#[command(name = "freeknot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Filtration depth; repeat for several depths.
    #[arg(long = "m", default_values_t = [1usize])]
    m: Vec<usize>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Long,
    Free,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Long => Mode::Long,
            ModeArg::Free => Mode::Free,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Filtration, word and normal form of a diagram for each depth.
    Invariant {
        /// Gauss code; read from standard input when omitted.
        #[arg(long)]
        gauss: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two diagrams. Exit code 0: same invariant, 1: certified
    /// distinct, 2: undetermined.
    Compare {
        /// Exactly two Gauss codes.
        #[arg(long, num_args = 1, required = true)]
        gauss: Vec<String>,
        #[arg(long, value_enum, default_value = "long")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apply random moves, rotations included.
    Scramble {
        #[arg(long)]
        gauss: Option<String>,
        #[arg(long, default_value_t = 100)]
        moves: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Size cap; defaults to twice the chord count.
        #[arg(long)]
        max_chords: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Breadth-first search for a path to the empty diagram.
    Reduce {
        #[arg(long)]
        gauss: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
        /// Defaults to twice the chord count.
        #[arg(long)]
        max_chords: Option<usize>,
        #[arg(long, value_enum, default_value = "long")]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate small diagrams with non-identity invariant.
    Search {
        #[arg(long, default_value_t = 6)]
        max_chords: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the group relations and run randomized invariance trials.
    Selfcheck {
        /// Random points per depth for the relation check.
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
        /// Move trials (and a tenth as many rotation trials).
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_chords: usize,
        #[command(flatten)]
        common: Common,
    },
    /// List the applicable moves of a diagram.
    Moves {
        #[arg(long)]
        gauss: Option<String>,
        /// Print one move per line.
        #[arg(long)]
        list: bool,
        /// Cap for additive moves; defaults to the chord count plus two.
        #[arg(long)]
        max_chords: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn read_diagram(gauss: Option<&str>) -> Result<ChordDiagram> {
    let text = match gauss {
        Some(g) => g.to_string(),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading Gauss code from stdin")?;
            s
        }
    };
    ChordDiagram::parse_gauss_code(&text).with_context(|| format!("invalid Gauss code {:?}", text.trim()))
}

fn check_m(ms: &[usize]) -> Result<()> {
    if let Some(&m) = ms.iter().find(|&&m| m == 0) {
        bail!("--m must be at least 1, got {m}");
    }
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

#[derive(Serialize)]
struct FiltrationJson {
    levels: Vec<Vec<freeknot::Chord>>,
    primes: Vec<Vec<freeknot::Chord>>,
    double_primes: Vec<Vec<freeknot::Chord>>,
}

#[derive(Serialize)]
struct DepthJson {
    m: usize,
    filtration: FiltrationJson,
    word: freeknot::Word,
    normal_form: NormalForm,
}

fn cmd_invariant(d: &ChordDiagram, common: &Common) -> Result<ExitCode> {
    check_m(&common.m)?;
    let mut depths = Vec::new();
    for &m in &common.m {
        let f = filtration(d, m)?;
        let w = word_of(d, m)?;
        let nf = evaluate(&w);
        if !common.json {
            println!("m={m}");
            println!("  filtration: {}", f.summary());
            println!("  word: {w}");
            println!("  normal form: {}", serde_json::to_string(&nf)?);
        }
        depths.push(DepthJson {
            m,
            filtration: FiltrationJson {
                levels: (0..=m).map(|k| f.level(k)).collect(),
                primes: (0..m).map(|k| f.primes(k)).collect(),
                double_primes: (0..m).map(|k| f.double_primes(k)).collect(),
            },
            word: w,
            normal_form: nf,
        });
    }
    if common.json {
        print_json(&json!({ "gauss": d.serialize(), "diagram": d, "invariants": depths }))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(codes: &[String], mode: Mode, max_states: usize, common: &Common) -> Result<ExitCode> {
    check_m(&common.m)?;
    if codes.len() != 2 {
        bail!("compare needs exactly two --gauss codes, got {}", codes.len());
    }
    let a = read_diagram(Some(&codes[0]))?;
    let b = read_diagram(Some(&codes[1]))?;
    let r = distinguish(&a, &b, &common.m, max_states, mode)?;
    if common.json {
        print_json(&r)?;
    } else {
        for c in &r.depths {
            println!("m={}: {} vs {}", c.m, c.first, c.second);
        }
        match r.verdict {
            Verdict::CertifiedDistinct { m } => println!("CertifiedDistinct (m={m})"),
            Verdict::SameInvariant => println!("SameInvariant"),
            Verdict::Undetermined => println!("Undetermined"),
        }
    }
    Ok(ExitCode::from(match r.verdict {
        Verdict::SameInvariant => 0,
        Verdict::CertifiedDistinct { .. } => 1,
        Verdict::Undetermined => 2,
    }))
}

fn cmd_scramble(d: &ChordDiagram, moves: usize, seed: u64, cap: Option<usize>, common: &Common) -> Result<ExitCode> {
    check_m(&common.m)?;
    let cap = cap.unwrap_or(2 * d.n());
    let (out, path) = scramble_path(d, moves, seed, cap)?;
    let mut invariants = Vec::new();
    for &m in &common.m {
        invariants.push(json!({
            "m": m,
            "before": evaluate(&word_of(d, m)?),
            "after": evaluate(&word_of(&out, m)?),
        }));
    }
    if common.json {
        print_json(&json!({
            "seed": seed,
            "max_chords": cap,
            "start": d,
            "result": out,
            "gauss": out.serialize(),
            "path": path,
            "invariants": invariants,
        }))?;
    } else {
        println!("seed: {seed}");
        println!("moves applied: {}", path.len());
        println!("result: {out}");
        for v in &invariants {
            println!("m={}: before {} after {}", v["m"], v["before"], v["after"]);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(d: &ChordDiagram, max_states: usize, cap: Option<usize>, mode: Mode, as_json: bool) -> Result<ExitCode> {
    let cap = cap.unwrap_or(2 * d.n());
    let r = reduce(d, max_states, cap, mode);
    if as_json {
        print_json(&r)?;
    } else {
        let label = match &r.outcome {
            freeknot::explore::Outcome::ReducedToEmpty { .. } => "ReducedToEmpty".to_string(),
            freeknot::explore::Outcome::MinimalFound { diagram, .. } => format!("MinimalFound \"{diagram}\""),
            freeknot::explore::Outcome::Exhausted { best, .. } => format!("Exhausted (best so far \"{best}\")"),
        };
        println!("{label} after {} states; path of {} moves", r.visited, r.path().len());
        let mut cur = d.clone();
        for mv in r.path() {
            cur = mv.apply(&cur)?;
            println!("  {mv}  ->  \"{cur}\"");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(max_chords: usize, max_states: usize, common: &Common) -> Result<ExitCode> {
    check_m(&common.m)?;
    let mut reports = Vec::new();
    for &m in &common.m {
        let s = search_nontrivial(max_chords, m, max_states)?;
        if !common.json {
            println!(
                "m={m}: {} witnesses among {} diagrams up to rotation{}",
                s.witnesses.len(),
                s.examined,
                if s.complete { "" } else { " (truncated)" }
            );
            for w in &s.witnesses {
                println!("  {}  {}", w.diagram, w.invariant);
            }
        }
        reports.push(s);
    }
    if common.json {
        print_json(&reports)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_selfcheck(samples: usize, trials: usize, seed: u64, max_chords: usize, common: &Common) -> Result<ExitCode> {
    check_m(&common.m)?;
    let mut relations_ok = true;
    let mut control_fails = true;
    for &m in &common.m {
        let mut rng = trial_rng(seed, m as u64);
        let pts: Vec<NormalForm> = (0..samples)
            .map(|_| {
                let x = (0..m).map(|_| rng.gen_range(-20..=20)).collect();
                NormalForm::new(m, x, rng.gen_range(0..=1)).expect("valid point")
            })
            .chain(std::iter::once(NormalForm::identity(m)?))
            .collect();
        relations_ok &= relation_check(m, &pts);
        control_fails &= !relation_check_with(m, &pts, ParityRule::WithoutEps);
    }
    let cfg = TrialConfig { trials, max_n: max_chords, m_list: common.m.clone(), seed, plant_triple: false };
    let moves = invariance_trials(&cfg);
    let rot_cfg = TrialConfig { trials: (trials / 10).max(1), seed: seed.wrapping_add(1), ..cfg };
    let rotations = rotation_trials(&rot_cfg, 10_000);
    let ok = relations_ok && control_fails && moves.ok() && rotations.ok();
    if common.json {
        print_json(&json!({
            "seed": seed,
            "m": common.m,
            "relations_ok": relations_ok,
            "negative_control_fails": control_fails,
            "invariance": moves,
            "rotation": rotations,
            "ok": ok,
        }))?;
    } else {
        println!(
            "relations {}; invariance trials {}/{} {}; rotation trials {}/{} {}",
            if relations_ok && control_fails { "OK" } else { "FAILED" },
            moves.passed(),
            moves.trials,
            if moves.ok() { "OK" } else { "FAILED" },
            rotations.passed(),
            rotations.trials,
            if rotations.ok() { "OK" } else { "FAILED" },
        );
        println!("seed: {seed}");
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_moves(d: &ChordDiagram, list: bool, cap: Option<usize>, as_json: bool) -> Result<ExitCode> {
    let moves = enumerate_moves(d, MoveLimits::new(cap.unwrap_or(d.n() + 2)));
    if as_json {
        print_json(&moves)?;
    } else if list {
        for mv in &moves {
            println!("{}", serde_json::to_string(mv)?);
        }
    } else {
        let mut counts = std::collections::BTreeMap::new();
        for mv in &moves {
            *counts.entry(mv.kind()).or_insert(0) += 1;
        }
        for (k, v) in counts {
            println!("{k}: {v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Invariant { gauss, common } => cmd_invariant(&read_diagram(gauss.as_deref())?, &common),
        Command::Compare { gauss, mode, max_states, common } => cmd_compare(&gauss, mode.into(), max_states, &common),
        Command::Scramble { gauss, moves, seed, max_chords, common } => {
            cmd_scramble(&read_diagram(gauss.as_deref())?, moves, seed, max_chords, &common)
        }
        Command::Reduce { gauss, max_states, max_chords, mode, json } => {
            cmd_reduce(&read_diagram(gauss.as_deref())?, max_states, max_chords, mode.into(), json)
        }
        Command::Search { max_chords, max_states, common } => cmd_search(max_chords, max_states, &common),
        Command::Selfcheck { samples, trials, seed, max_chords, common } => {
            cmd_selfcheck(samples, trials, seed, max_chords, &common)
        }
        Command::Moves { gauss, list, max_chords, json } => {
            cmd_moves(&read_diagram(gauss.as_deref())?, list, max_chords, json)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
