use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use velopt::bench::cs::{sweep_compressed_sensing, CsRun};
use velopt::bench::csv::write_trace_csv;
use velopt::bench::illustrative::{default_grid, region_boundaries, write_regions};
use velopt::bench::{run_illustrative, solve, CsvRecord, Experiment, ExperimentConfig, MethodName};
use velopt::solvers::{loglog_slope, Status};

/// Velocity-constrained gradient methods: single solves and benchmark sweeps.
#[derive(Parser, Debug)]
#[command(name = "velopt", version)]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one method and write its trace CSV.
    Solve {
        /// illustrative, compressed_sensing or custom_qp (default custom_qp).
        #[arg(long)]
        experiment: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Benchmark experiments.
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Subcommand, Debug)]
enum Bench {
    /// Phase-portrait trajectories of the one-dimensional example.
    Illustrative {
        #[command(flatten)]
        opts: Opts,
    },
    /// Compressed-sensing sweep over the velocity schemes and the projection baselines.
    Cs {
        /// First iteration of the log-log slope window.
        #[arg(long, default_value_t = 50)]
        slope_from: usize,
        /// Last iteration of the window (default: the final iteration).
        #[arg(long)]
        slope_to: Option<usize>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Debug)]
struct Opts {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Step size, or the initial step of a diminishing schedule.
    #[arg(long = "T")]
    step: Option<f64>,
    /// constant, diminishing, manual, heavy_ball, nesterov_constant or nesterov_varying.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (solve) or directory (bench).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the file and before the flags above.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
    Infeasible(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn config(experiment: Option<&str>, default: Experiment, opts: &Opts) -> Result<ExperimentConfig> {
    let mut text = match &opts.config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let has_experiment = text
        .lines()
        .any(|l| l.split('#').next().unwrap_or("").split_once('=').is_some_and(|(k, _)| k.trim() == "experiment"));
    match experiment {
        Some(e) => text = format!("experiment = {e}\n{text}"),
        None if !has_experiment => text = format!("experiment = {}\n{text}", default.name()),
        None => {}
    }
    let mut cfg = ExperimentConfig::parse(&text)?;
    for kv in &opts.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("expected KEY=VALUE, got '{kv}'"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    let flags: [(&str, Option<String>); 8] = [
        ("method", opts.method.clone()),
        ("p", opts.p.map(|v| v.to_string())),
        ("nu", opts.nu.map(|v| v.to_string())),
        ("T", opts.step.map(|v| v.to_string())),
        ("schedule", opts.schedule.clone()),
        ("iters", opts.iters.map(|v| v.to_string())),
        ("seed", opts.seed.map(|v| v.to_string())),
        ("out", opts.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(cfg.experiment.name()));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn cmd_solve(experiment: Option<&str>, opts: &Opts) -> std::result::Result<(), Failure> {
    let cfg = config(experiment, Experiment::CustomQp, opts).map_err(Failure::Config)?;
    cfg.validate().map_err(|e| Failure::Config(e.into()))?;
    let (records, status): (Vec<CsvRecord>, Status) = if cfg.experiment == Experiment::CompressedSensing {
        let run = velopt::bench::run_compressed_sensing(&cfg).map_err(anyhow::Error::from)?;
        (run.records.iter().map(CsvRecord::from).collect(), run.status)
    } else {
        let trace = solve(&cfg).map_err(anyhow::Error::from)?;
        (trace.records.iter().map(CsvRecord::from).collect(), trace.status)
    };
    let (hash, seed) = (cfg.hash(), cfg.instance.seed);
    match &cfg.out {
        Some(path) => {
            let mut w = create(path)?;
            write_trace_csv(&mut w, &hash, seed, &records, cfg.stride).map_err(anyhow::Error::from)?;
            w.flush().map_err(anyhow::Error::from)?;
            info!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            write_trace_csv(stdout.lock(), &hash, seed, &records, cfg.stride).map_err(anyhow::Error::from)?;
        }
    }
    let last = records.last();
    eprintln!(
        "{} {}: status {} after {} iterations, f = {:.6e}",
        cfg.experiment.name(),
        cfg.method.name(),
        status.name(),
        last.map_or(0, |r| r.k),
        last.map_or(f64::NAN, |r| r.fx)
    );
    if status == Status::InfeasibleCone {
        return Err(Failure::Infeasible(format!("{} stopped on an empty velocity cone", cfg.method.name())));
    }
    Ok(())
}

fn cmd_illustrative(opts: &Opts) -> std::result::Result<(), Failure> {
    let cfg = config(Some(Experiment::Illustrative.name()), Experiment::Illustrative, opts).map_err(Failure::Config)?;
    cfg.validate().map_err(|e| Failure::Config(e.into()))?;
    let dir = out_dir(&cfg)?;
    let grid = default_grid();
    let trajectories = run_illustrative(&cfg, &grid).map_err(anyhow::Error::from)?;
    let mut index = create(&dir.join("trajectories.csv"))?;
    writeln!(index, "# config={} seed={}", cfg.hash(), cfg.instance.seed).map_err(anyhow::Error::from)?;
    writeln!(index, "file,x0,u0,status,final_x").map_err(anyhow::Error::from)?;
    let mut infeasible = 0;
    for (idx, tr) in trajectories.iter().enumerate() {
        let name = format!("trajectory_{idx:03}.csv");
        let mut w = create(&dir.join(&name))?;
        tr.write_csv(&mut w).map_err(anyhow::Error::from)?;
        w.flush().map_err(anyhow::Error::from)?;
        writeln!(index, "{name},{:.16e},{:.16e},{},{:.16e}", tr.x0, tr.u0, tr.status.name(), tr.final_x())
            .map_err(anyhow::Error::from)?;
        if tr.status == Status::InfeasibleCone {
            infeasible += 1;
            warn!("trajectory from ({}, {}) hit an empty velocity cone", tr.x0, tr.u0);
        }
    }
    index.flush().map_err(anyhow::Error::from)?;
    let (x_lo, x_hi) = grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| (acc.0.min(p.0), acc.1.max(p.0)));
    let (ulo, uhi) = grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| (acc.0.min(p.1), acc.1.max(p.1)));
    let mut w = create(&dir.join("regions.csv"))?;
    write_regions(&mut w, &region_boundaries(cfg.params.alpha, x_lo - 1.0, x_hi + 1.0, ulo, uhi)).map_err(anyhow::Error::from)?;
    w.flush().map_err(anyhow::Error::from)?;
    eprintln!("{} trajectories written to {}", trajectories.len(), dir.display());
    if infeasible > 0 {
        return Err(Failure::Infeasible(format!("{infeasible} trajectories hit an empty velocity cone")));
    }
    Ok(())
}

fn slopes(run: &CsRun, lo: usize, hi: usize) -> (Option<f64>, Option<f64>) {
    let (k, g): (Vec<f64>, Vec<f64>) = run
        .records
        .iter()
        .filter(|r| r.k >= lo && r.k <= hi)
        .map(|r| (r.k as f64, r.constraint.abs()))
        .unzip();
    (run.violation_slope(lo, hi), loglog_slope(&k, &g))
}

fn cmd_cs(slope_from: usize, slope_to: Option<usize>, opts: &Opts) -> std::result::Result<(), Failure> {
    let cfg = config(Some(Experiment::CompressedSensing.name()), Experiment::CompressedSensing, opts).map_err(Failure::Config)?;
    let methods: Vec<MethodName> = match &opts.method {
        Some(_) => vec![cfg.method],
        None if cfg.instance.p == 1.0 => MethodName::CS_METHODS.to_vec(),
        None => vec![MethodName::Alg4, MethodName::Alg5],
    };
    for m in &methods {
        let mut c = cfg.clone();
        c.method = *m;
        c.validate().map_err(|e| Failure::Config(e.into()))?;
    }
    let dir = out_dir(&cfg)?;
    let runs = sweep_compressed_sensing(&cfg, &methods).map_err(anyhow::Error::from)?;
    let hi = slope_to.unwrap_or(cfg.iters);
    let fmt = |v: Option<f64>| v.map_or("nan".to_string(), |s| format!("{s:.4}"));
    let mut summary = create(&dir.join("summary.csv"))?;
    writeln!(summary, "# config={} seed={}", cfg.hash(), cfg.instance.seed).map_err(anyhow::Error::from)?;
    writeln!(summary, "method,status,iterations,final_fx,final_violation,violation_slope,slack_slope").map_err(anyhow::Error::from)?;
    println!("window k in [{slope_from}, {hi}]");
    println!("{:<6} {:<15} {:>14} {:>14} {:>10} {:>10}", "method", "status", "f", "violation", "slope", "|g| slope");
    let mut infeasible = Vec::new();
    for run in &runs {
        let mut c = cfg.clone();
        c.method = run.method;
        let records: Vec<CsvRecord> = run.records.iter().map(CsvRecord::from).collect();
        let mut w = create(&dir.join(format!("cs_{}.csv", run.method.name())))?;
        write_trace_csv(&mut w, &c.hash(), c.instance.seed, &records, c.stride).map_err(anyhow::Error::from)?;
        w.flush().map_err(anyhow::Error::from)?;
        let (vs, gs) = slopes(run, slope_from, hi);
        let last = run.records.last();
        let (k, f, v) = last.map_or((0, f64::NAN, f64::NAN), |r| (r.k, r.fx, r.violation));
        writeln!(summary, "{},{},{k},{f:.16e},{v:.16e},{},{}", run.method.name(), run.status.name(), fmt(vs), fmt(gs))
            .map_err(anyhow::Error::from)?;
        println!("{:<6} {:<15} {f:>14.6e} {v:>14.6e} {:>10} {:>10}", run.method.name(), run.status.name(), fmt(vs), fmt(gs));
        if run.status == Status::InfeasibleCone {
            infeasible.push(run.method.name());
        }
    }
    summary.flush().map_err(anyhow::Error::from)?;
    eprintln!("traces written to {}", dir.display());
    if !infeasible.is_empty() {
        return Err(Failure::Infeasible(format!("empty velocity cone in {}", infeasible.join(", "))));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    let result = match &cli.command {
        Command::Solve { experiment, opts } => cmd_solve(experiment.as_deref(), opts),
        Command::Bench(Bench::Illustrative { opts }) => cmd_illustrative(opts),
        Command::Bench(Bench::Cs { slope_from, slope_to, opts }) => cmd_cs(*slope_from, *slope_to, opts),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("invalid configuration: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible_cone: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
