mod config;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use tbc_core::experiment::{run_convergence, run_evolution, run_map_test, SchemeChoice};
use tbc_core::tbc::Scheme;
use tbc_core::weights::{cq_weights, pade, OneStep};
use tbc_core::TbcError;

use config::{Experiment, RunConfig, Settings};
use export::{fmt_num, series_csv, table_csv, Writer};

#[derive(Parser)]
#[command(name = "tbc", version, about = "2D Schrödinger solver with discrete transparent boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary-map accuracy driven by exact Dirichlet data
    MapTest(RunArgs),
    /// Full evolution with error, energy and snapshots
    Evolve(RunArgs),
    /// Temporal convergence over a list of N_t
    Converge(RunArgs),
    /// CQ weights as CSV (j,omega)
    Weights {
        /// bdf1 or tr (scheme names such as np-tr also work)
        #[arg(long, default_value = "bdf1")]
        scheme: String,
        /// Largest index
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagonal Padé data for sqrt(z) as CSV (k,eta,b); row 0 holds b_0
    Pade {
        #[arg(long = "M", default_value_t = 20)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<TbcError> for Failure {
    fn from(e: TbcError) -> Self {
        match e {
            TbcError::InvalidArgument(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn method_of(name: &str) -> Result<OneStep, Failure> {
    match name.to_ascii_lowercase().as_str() {
        "bdf1" => Ok(OneStep::Bdf1),
        "tr" => Ok(OneStep::Tr),
        other => other.parse::<SchemeChoice>().map(SchemeChoice::method).map_err(|e| Failure::Config(e.to_string())),
    }
}

fn emit(out: &Option<PathBuf>, name: &str, text: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => Writer::new(dir).and_then(|mut w| w.write(name, text)).map_err(Failure::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve(experiment: Experiment, args: RunArgs) -> Result<RunConfig, Failure> {
    let base = match &args.config {
        Some(p) => Settings::from_file(p).map_err(Failure::Config)?,
        None => Settings::default(),
    };
    RunConfig::resolve(experiment, base.overlay(args.settings)).map_err(Failure::Config)
}

fn finish<S: Serialize>(cfg: &RunConfig, writer: Option<Writer>, summary: S) -> Result<(), Failure> {
    let Some(mut w) = writer else { return Ok(()) };
    let config_json = serde_json::to_string(cfg).expect("config serializes");
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let mut files = w.files.clone();
    files.push("run.json".into());
    let sidecar = export::Sidecar { run_id: export::run_id(&config_json, nanos), scheme: &cfg.scheme, config: cfg, summary, files };
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    w.write("run.json", &(text + "\n")).map_err(Failure::Io)
}

fn writer(cfg: &RunConfig) -> Result<Option<Writer>, Failure> {
    cfg.out.as_deref().map(Writer::new).transpose().map_err(Failure::Io)
}

fn cq_memory_note(cfg: &RunConfig) {
    let cq = matches!(cfg.experiment_config.scheme, SchemeChoice::Interior(Scheme::CqBdf1 | Scheme::CqTr));
    if cfg.full && cq {
        let nt = *cfg.nt.iter().max().unwrap() as f64;
        let bytes = 16.0 * (4.0 * nt * nt + 4.0 * nt * (cfg.n as f64 + 1.0));
        eprintln!("note: CQ history storage reaches about {:.2} GiB at the last step", bytes / (1u64 << 30) as f64);
    }
}

fn map_test(cfg: RunConfig) -> Result<(), Failure> {
    let series = run_map_test(&cfg.experiment_config)?;
    println!("{} map-test {}: max boundary error {}", cfg.scheme, cfg.preset, fmt_num(series.max()));
    let mut w = writer(&cfg)?;
    if let Some(w) = w.as_mut() {
        w.write("error.csv", &series_csv("t,error", &series.times, &series.values)).map_err(Failure::Io)?;
    }
    finish(&cfg, w, json!({ "max_error": series.max(), "steps": series.len() }))
}

fn evolve(cfg: RunConfig) -> Result<(), Failure> {
    cq_memory_note(&cfg);
    let r = run_evolution(&cfg.experiment_config)?;
    if let Some(warn) = &r.support_warning {
        eprintln!("warning: {warn}");
    }
    println!(
        "{} evolve {}: max relative error {}, max norm ratio {}",
        cfg.scheme,
        cfg.preset,
        fmt_num(r.error.max()),
        fmt_num(r.max_norm_ratio)
    );
    let mut w = writer(&cfg)?;
    if let Some(w) = w.as_mut() {
        let io = Failure::Io;
        w.write("error.csv", &series_csv("t,error", &r.error.times, &r.error.values)).map_err(io)?;
        w.write("energy.csv", &series_csv("t,energy", &r.energy.times, &r.energy.values)).map_err(io)?;
        w.write("energy_exact.csv", &series_csv("t,energy", &r.exact_energy.times, &r.exact_energy.values))
            .map_err(io)?;
        for (k, (_, grid)) in r.snapshots.iter().enumerate() {
            w.write(&format!("contour_{k:03}.csv"), &export::contour_csv(grid, cfg.fmag)).map_err(io)?;
        }
    }
    let snaps: Vec<f64> = r.snapshots.iter().map(|(t, _)| *t).collect();
    let last = r.step_work.last().copied().unwrap_or_default();
    finish(
        &cfg,
        w,
        json!({
            "max_error": r.error.max(),
            "max_norm_ratio": r.max_norm_ratio,
            "snapshot_times": snaps,
            "support_warning": r.support_warning,
            "last_step_work": { "segment": last.segment_ops, "corner": last.corner_ops },
            "final_storage": r.storage.last().copied().unwrap_or(0),
            "psi_symmetry_defect": r.symmetry_defect,
        }),
    )
}

fn converge(cfg: RunConfig) -> Result<(), Failure> {
    cq_memory_note(&cfg);
    let r = run_convergence(&cfg.experiment_config, &cfg.nt)?;
    for ((nt, dt), e) in r.n_t.iter().zip(&r.dt).zip(&r.max_error) {
        println!("N_t {nt:>8}  dt {}  max error {}", fmt_num(*dt), fmt_num(*e));
    }
    match r.slope {
        Some(s) => println!("fitted slope {s:.4} over {} pre-plateau points", r.pre_plateau),
        None => println!("slope unavailable: {} pre-plateau point(s)", r.pre_plateau),
    }
    let mut w = writer(&cfg)?;
    if let Some(w) = w.as_mut() {
        let rows: Vec<Vec<f64>> = r.n_t.iter().zip(&r.dt).zip(&r.max_error).map(|((&n, &d), &e)| vec![n as f64, d, e]).collect();
        w.write("convergence.csv", &table_csv("nt,dt,max_error", &rows)).map_err(Failure::Io)?;
    }
    finish(&cfg, w, json!({ "slope": r.slope, "pre_plateau": r.pre_plateau }))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::MapTest(a) => map_test(resolve(Experiment::MapTest, a)?),
        Command::Evolve(a) => evolve(resolve(Experiment::Evolve, a)?),
        Command::Converge(a) => converge(resolve(Experiment::Converge, a)?),
        Command::Weights { scheme, n, out } => {
            let t = cq_weights(method_of(&scheme)?, n);
            let mut text = String::from("j,omega\n");
            for (j, &w) in t.omega.iter().enumerate() {
                text.push_str(&format!("{j},{}\n", fmt_num(w)));
            }
            emit(&out, "weights.csv", &text)
        }
        Command::Pade { m, out } => {
            let p = pade(m)?;
            let mut text = format!("k,eta,b\n0,{},{}\n", fmt_num(0.0), fmt_num(p.b0));
            for (k, (e, b)) in p.etak.iter().zip(&p.bk).enumerate() {
                text.push_str(&format!("{},{},{}\n", k + 1, fmt_num(*e), fmt_num(*b)));
            }
            emit(&out, "pade.csv", &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical breakdown: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(1)
        }
    }
}
