//! Command-line driver: parse the program and witness, solve under the
//! configured mode/domain/strategy, validate, and emit the report.
//!
//! Exit codes: 0 = property verified, 2 = property unknown, 1 = usage or
//! parse error. The witness verdict lives in the report, not the exit
//! code: witness-guided verification can succeed even when the
//! invariants themselves cannot be confirmed.

use crate::cfg::build_cfg;
use crate::env::VarTable;
use crate::parser::parse_program;
use crate::solver::{solve, DomainKind, Mode, Strategy};
use crate::validator::{validate, ConfigReport, Report};
use crate::witness::{bind_to_cfg, parse_witness, BoundWitness, WitnessEntry};
use clap::{Parser, ValueEnum};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Resolved analysis options; `mode`/`strategy` of `None` pick the
/// documented defaults (unassume iff a witness is given; propagating for
/// interval, dual-narrowing for octagon).
#[derive(Debug, Clone)]
pub struct Options {
    pub program: PathBuf,
    pub witness: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub domain: DomainKind,
    pub strategy: Option<Strategy>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyzeError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    None,
    TotalInit,
    PartialInit,
    Unassume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Interval,
    Octagon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Propagating,
    Naive,
    DualNarrowing,
}

/// Witness-guided abstract interpreter for MiniC programs.
#[derive(Debug, Parser)]
#[command(name = "unassume", version, disable_help_subcommand = true)]
pub struct Cli {
    /// MiniC program to analyze.
    pub program: PathBuf,
    /// YAML correctness witness with location/loop invariants.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Guidance mode (default: unassume when a witness is given, none otherwise).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Abstract domain.
    #[arg(long, value_enum, default_value = "interval")]
    pub domain: DomainArg,
    /// Unassume strategy (default: propagating for interval, dual-narrowing for octagon).
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Write the JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print solver statistics.
    #[arg(long)]
    pub stats: bool,
    /// Run both unguided and witness-guided analyses and report the
    /// transfer-evaluation ratio.
    #[arg(long)]
    pub compare: bool,
}

fn mode_str(m: Mode) -> &'static str {
    match m {
        Mode::None => "none",
        Mode::TotalInit => "total-init",
        Mode::PartialInit => "partial-init",
        Mode::Unassume => "unassume",
    }
}

fn print_summary(r: &Report, stats: bool) {
    println!("property: {}", r.property);
    if r.config.witness.is_some() {
        println!("witness: {}", r.witness_verdict);
    }
    for inv in &r.invariants {
        println!("  invariant {} (line {}): {} -- {}", inv.uuid, inv.line, inv.text, inv.verdict);
    }
    if stats {
        print_stats(r);
    }
}

fn print_stats(r: &Report) {
    println!(
        "stats: transfer_evaluations={} widenings_applied={} widenings_delayed={} narrowing_iterations={} unassume_applications={}",
        r.stats.transfer_evaluations,
        r.stats.widenings_applied,
        r.stats.widenings_delayed,
        r.stats.narrowing_iterations,
        r.stats.unassume_applications
    );
}

struct Inputs {
    vt: VarTable,
    cfg: crate::cfg::Cfg,
    bw: BoundWitness,
    entries: Vec<WitnessEntry>,
    mode: Mode,
    domain: DomainKind,
    strategy: Strategy,
}

fn load(opts: &Options) -> Result<Inputs, AnalyzeError> {
    let src = std::fs::read_to_string(&opts.program)
        .map_err(|e| AnalyzeError::Io(format!("cannot read {}: {e}", opts.program.display())))?;
    let program = parse_program(&src)
        .map_err(|e| AnalyzeError::Parse(format!("{}: {e}", opts.program.display())))?;
    let cfg = build_cfg(&program);
    let vt = VarTable::from_program(&program);

    let (bw, entries) = match &opts.witness {
        Some(wp) => {
            let wtext = std::fs::read_to_string(wp)
                .map_err(|e| AnalyzeError::Io(format!("cannot read {}: {e}", wp.display())))?;
            let parsed = parse_witness(&wtext)
                .map_err(|e| AnalyzeError::Parse(format!("{}: {e}", wp.display())))?;
            for w in &parsed.skipped {
                eprintln!("warning: {}: {w}", wp.display());
            }
            let file_name = Path::new(&opts.program)
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let bw = bind_to_cfg(&parsed.entries, &cfg, &program, &file_name);
            for (e, reason) in &bw.unmatched {
                eprintln!("warning: invariant {} not bound: {reason}", e.uuid);
            }
            (bw, parsed.entries)
        }
        None => (BoundWitness::default(), Vec::new()),
    };

    let mode = match opts.mode {
        Some(m) => m,
        None if opts.witness.is_some() => Mode::Unassume,
        None => Mode::None,
    };
    if mode != Mode::None && opts.witness.is_none() {
        return Err(AnalyzeError::Config(format!("mode {} requires --witness", mode_str(mode))));
    }
    let strategy = opts.strategy.unwrap_or(match opts.domain {
        DomainKind::Interval => Strategy::Propagating,
        DomainKind::Octagon => Strategy::DualNarrowing,
    });
    Ok(Inputs { vt, cfg, bw, entries, mode, domain: opts.domain, strategy })
}

/// One full analysis from files to report; the programmatic twin of the
/// command line (also used by the C API).
pub fn analyze_files(opts: &Options) -> Result<Report, AnalyzeError> {
    let inputs = load(opts)?;
    analyze(opts, &inputs, inputs.mode)
}

fn config_report(opts: &Options, inputs: &Inputs, mode: Mode) -> ConfigReport {
    ConfigReport {
        program: opts.program.display().to_string(),
        witness: opts.witness.as_ref().map(|p| p.display().to_string()),
        mode: mode_str(mode).to_string(),
        domain: match inputs.domain {
            DomainKind::Interval => "interval",
            DomainKind::Octagon => "octagon",
        }
        .to_string(),
        strategy: match inputs.strategy {
            Strategy::Propagating => "propagating",
            Strategy::Naive => "naive",
            Strategy::DualNarrowing => "dual-narrowing",
        }
        .to_string(),
    }
}

fn analyze(opts: &Options, inputs: &Inputs, mode: Mode) -> Result<Report, AnalyzeError> {
    let run = solve(&inputs.cfg, &inputs.bw, mode, inputs.domain, inputs.strategy, &inputs.vt)
        .map_err(|e| AnalyzeError::Config(e.to_string()))?;
    validate(&run, &inputs.bw, &inputs.entries, &inputs.vt, config_report(opts, inputs, mode))
        .map_err(|e| AnalyzeError::Config(e.to_string()))
}

fn write_report(path: &Path, report: &Report) -> Result<(), String> {
    let json = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    std::fs::write(path, json + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn exit_code(report: &Report) -> i32 {
    if report.property == "verified" {
        0
    } else {
        2
    }
}

fn run_once(cli: &Cli, opts: &Options, inputs: &Inputs) -> Result<i32, String> {
    let report = analyze(opts, inputs, inputs.mode).map_err(|e| e.to_string())?;
    print_summary(&report, cli.stats);
    if let Some(path) = &cli.report {
        write_report(path, &report)?;
    }
    Ok(exit_code(&report))
}

fn run_compare(cli: &Cli, opts: &Options, inputs: &Inputs) -> Result<i32, String> {
    if cli.witness.is_none() {
        return Err("--compare requires --witness".to_string());
    }
    let baseline = analyze(opts, inputs, Mode::None).map_err(|e| e.to_string())?;
    let guided = analyze(opts, inputs, Mode::Unassume).map_err(|e| e.to_string())?;
    println!("baseline (mode none):");
    print_stats(&baseline);
    println!("guided (mode unassume):");
    print_stats(&guided);
    let ratio =
        baseline.stats.transfer_evaluations as f64 / guided.stats.transfer_evaluations as f64;
    println!("ratio: {ratio:.3}");
    println!("property: {}", guided.property);
    println!("witness: {}", guided.witness_verdict);
    if let Some(path) = &cli.report {
        write_report(path, &guided)?;
    }
    Ok(exit_code(&guided))
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let opts = Options {
        program: cli.program.clone(),
        witness: cli.witness.clone(),
        mode: cli.mode.map(|m| match m {
            ModeArg::None => Mode::None,
            ModeArg::TotalInit => Mode::TotalInit,
            ModeArg::PartialInit => Mode::PartialInit,
            ModeArg::Unassume => Mode::Unassume,
        }),
        domain: match cli.domain {
            DomainArg::Interval => DomainKind::Interval,
            DomainArg::Octagon => DomainKind::Octagon,
        },
        strategy: cli.strategy.map(|s| match s {
            StrategyArg::Propagating => Strategy::Propagating,
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::DualNarrowing => Strategy::DualNarrowing,
        }),
    };
    let result = load(&opts).map_err(|e| e.to_string()).and_then(|inputs| {
        if cli.compare {
            run_compare(&cli, &opts, &inputs)
        } else {
            run_once(&cli, &opts, &inputs)
        }
    });
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
