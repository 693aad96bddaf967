use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmimo::bench::{
    emit_report, parse_detector_list, parse_snr_list, resolve_out_dir, run_landscape,
    run_ser_experiment, run_single, ExperimentConfig, ExperimentKind,
};
use qmimo::SnrConvention;

#[derive(Parser)]
#[command(name = "qmimo", version, about = "QAOA and classical MIMO detection benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo symbol error rate over an SNR sweep.
    Ser(SerArgs),
    /// Expected-cost landscapes of the six QAOA variants on one instance.
    Landscape(LandscapeArgs),
    /// Detailed trace of a single instance.
    Single(SingleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Nominal,
    #[value(name = "shifted-6db")]
    Shifted6dB,
}

impl From<Convention> for SnrConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Nominal => SnrConvention::Nominal,
            Convention::Shifted6dB => SnrConvention::Shifted6dB,
        }
    }
}

#[derive(Args)]
struct Common {
    /// TOML file with a full or partial experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nt: Option<usize>,
    /// Receive antennas (defaults to Nt).
    #[arg(long)]
    nr: Option<usize>,
    /// Constellation order M.
    #[arg(long = "mod")]
    modulation: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// QAOA depth.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    /// Comma-separated ramp slopes.
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long, value_enum)]
    snr_convention: Option<Convention>,
    /// Output directory [env: QMIMO_OUT_DIR, default: results].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "QMIMO_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct SerArgs {
    #[command(flatten)]
    common: Common,
    /// `start:stop:step` (inclusive) or a comma-separated list, in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated: ml,zf,mmse,bcd,qaoa,ws-rx,ws-ws,lr-qaoa,wslr-rx,wslr-w
    #[arg(long)]
    detectors: Option<String>,
    #[arg(long, value_enum)]
    noise: Option<Switch>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Stream id of the instance under the seed.
    #[arg(long)]
    instance: Option<u64>,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Also write the cost Hamiltonian as text.
    #[arg(long)]
    dump_hamiltonian: bool,
    #[arg(long, value_enum)]
    noise: Option<Switch>,
}

fn base_config(common: &Common, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = kind;
    if let Some(nt) = common.nt {
        cfg.nt = nt;
        if common.nr.is_none() && common.config.is_none() {
            cfg.nr = nt;
        }
    }
    if let Some(nr) = common.nr {
        cfg.nr = nr;
    }
    if let Some(m) = common.modulation {
        cfg.modulation = m;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(p) = common.p {
        cfg.qaoa.p = p;
    }
    if let Some(shots) = common.shots {
        cfg.qaoa.shots = shots;
    }
    if let Some(d) = &common.deltas {
        cfg.qaoa.deltas = parse_snr_list(d).context("--deltas")?;
    }
    if let Some(c) = common.snr_convention {
        cfg.snr_convention = c.into();
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    Ok(cfg)
}

fn out_dir(common: &Common) -> PathBuf {
    resolve_out_dir(common.out.clone())
}

fn print_paths(paths: &[&Path]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn ser(args: SerArgs) -> Result<()> {
    let mut cfg = base_config(&args.common, ExperimentKind::Ser)?;
    if let Some(s) = &args.snr {
        cfg.snr_db = parse_snr_list(s)?;
    }
    match args.trials {
        Some(t) => cfg.trials = t,
        None if args.common.config.is_none() => cfg.trials = ExperimentConfig::desk_trials(cfg.nt),
        None => {}
    }
    if let Some(d) = &args.detectors {
        cfg.detectors = parse_detector_list(d)?;
    }
    if let Some(n) = args.noise {
        cfg.noise.enabled = matches!(n, Switch::On);
    }
    cfg.validate()?;

    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    ctrlc::set_handler(move || {
        eprintln!("interrupt: finishing current chunk and writing partial results");
        flag.store(true, Ordering::Relaxed);
    })
    .context("installing interrupt handler")?;

    let report = run_ser_experiment(&cfg, Some(&cancel))?;
    println!("{:<10} {:>7} {:>8} {:>8} {:>10} {:>10}", "detector", "snr_db", "trials", "errors", "ser", "ci95");
    for c in &report.cells {
        println!(
            "{:<10} {:>7} {:>8} {:>8} {:>10.5} {:>10.5}",
            c.detector, c.snr_db, c.trials, c.errors, c.ser, c.ci95
        );
    }
    if report.truncated {
        eprintln!("run interrupted; report marked truncated");
    }
    let (csv, json) = emit_report(&report, &out_dir(&args.common), "ser")?;
    print_paths(&[&csv, &json]);
    Ok(())
}

fn landscape(args: LandscapeArgs) -> Result<()> {
    let mut cfg = base_config(&args.common, ExperimentKind::Landscape)?;
    cfg.snr_db = vec![args.snr_db.unwrap_or(if args.common.config.is_some() { cfg.snr_db[0] } else { 7.0 })];
    if let Some(g) = args.grid {
        cfg.landscape.grid = g;
    }
    if let Some(i) = args.instance {
        cfg.landscape.instance_stream = i;
    }
    let report = run_landscape(&cfg)?;
    println!("{:<8} {:>12} {:>12} {:>12} {:>12} {:>12}", "variant", "min", "max", "range", "mean", "std");
    for l in &report.variants {
        let s = &l.stats;
        println!(
            "{:<8} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            l.variant.name(),
            s.min,
            s.max,
            s.range,
            s.mean,
            s.std
        );
    }
    let (csv, json) = emit_report(&report, &out_dir(&args.common), "landscape")?;
    print_paths(&[&csv, &json]);
    Ok(())
}

fn single(args: SingleArgs) -> Result<()> {
    let mut cfg = base_config(&args.common, ExperimentKind::Single)?;
    cfg.snr_db = vec![args.snr_db.unwrap_or(if args.common.config.is_some() { cfg.snr_db[0] } else { 7.0 })];
    if let Some(n) = args.noise {
        cfg.noise.enabled = matches!(n, Switch::On);
    }
    let trace = run_single(&cfg)?;
    for c in &trace.classical {
        println!("{:<8} energy {:>12.4}  errors {}", c.detector, c.energy, c.symbol_errors);
    }
    for v in &trace.variants {
        println!("{:<8} energy {:>12.4}  errors {}", v.variant.name(), v.energy, v.symbol_errors);
    }
    let dir = out_dir(&args.common);
    let (csv, json) = emit_report(&trace, &dir, "single")?;
    print_paths(&[&csv, &json]);
    if args.dump_hamiltonian {
        let path = dir.join("hamiltonian.txt");
        std::fs::write(&path, &trace.hamiltonian).with_context(|| format!("writing {}", path.display()))?;
        print_paths(&[&path]);
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ser(a) => ser(a),
        Command::Landscape(a) => landscape(a),
        Command::Single(a) => single(a),
    }
}
