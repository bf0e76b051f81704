use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ris_core::channel::{derive_seed, draw_channels};
use ris_core::montecarlo::{run_experiment, summarize, write_cdf_csv, write_samples_csv, write_summary_json};
use ris_core::policies::{solve_with, OutcomeRecord, PolicyId};
use ris_core::tracking::{cadence_summary, dynamic_power_curve, simulate_tracking, write_events_csv, write_pdavg_csv, write_trace_csv};
use ris_core::units::to_db;

use crate::config::Config;
use crate::manifest::{looks_like_manifest, Manifest, OutputSet};
use crate::presets;

#[derive(Debug, Parser)]
#[command(name = "ris-sim", version, about = "Power-splitting RIS simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Configuration file, or a manifest.json from an earlier run.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Built-in scenario applied before the configuration file.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Override one key (`key=value` or `section.key=value`); repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Master seed; replaces run.seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads. Results do not depend on this value.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repeated-trial comparison of allocation policies.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Threshold-triggered reconfiguration along the user path.
    Tracking {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// One channel draw and one policy; prints the allocation as JSON.
    PolicyDemo {
        #[command(flatten)]
        common: Common,
        /// Policy to run; defaults to the first entry of run.policies.
        #[arg(long, value_parser = parse_policy)]
        policy: Option<PolicyId>,
        /// Trial index whose channel draw is used.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Prints the resolved configuration.
    Config {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_policy(s: &str) -> Result<PolicyId, String> {
    s.parse::<PolicyId>().map_err(|e| e.to_string())
}

/// Defaults, then the preset, then the file, then `--set`, then `--seed`.
pub fn resolve(common: &Common) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(name) = &common.preset {
        let text = presets::preset(name).map_err(anyhow::Error::msg)?;
        cfg.apply_text(text, &format!("preset {name}"))?;
    }
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let origin = path.display().to_string();
        if looks_like_manifest(&text) {
            let m = Manifest::parse(&text).with_context(|| format!("in {origin}"))?;
            cfg.apply_text(&m.config, &format!("{origin} (manifest config)"))?;
            cfg.set_seed(m.seed);
        } else {
            cfg.apply_text(&text, &origin)?;
        }
    }
    for s in &common.set {
        cfg.set(s)?;
    }
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => bail!("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("cannot build thread pool")?;
            Ok(pool.install(f))
        }
    }
}

fn manifest(command: &str, common: &Common, cfg: &Config, start: Instant, derived: serde_json::Value) -> Manifest {
    Manifest {
        tool: "ris-sim".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        preset: common.preset.clone(),
        config: cfg.render(),
        seed: cfg.seed(),
        threads: common.threads,
        duration_seconds: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        derived,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Montecarlo { common, out } => cmd_montecarlo(&common, &out),
        Command::Tracking { common, out } => cmd_tracking(&common, &out),
        Command::PolicyDemo { common, policy, trial } => cmd_policy_demo(&common, policy, trial),
        Command::Config { common } => {
            print!("{}", resolve(&common)?.render());
            Ok(())
        }
    }
}

pub fn cmd_montecarlo(common: &Common, out: &Path) -> Result<()> {
    let start = Instant::now();
    let cfg = resolve(common)?;
    let experiment = cfg.experiment()?;
    let result = with_pool(common.threads, || run_experiment(&experiment))??;
    let summary = summarize(&result)?;

    let mut files = OutputSet::create(out)?;
    files.write("samples.csv", |b| write_samples_csv(&result, b))?;
    files.write("cdf.csv", |b| write_cdf_csv(&result, b))?;
    files.write("summary.json", |b| write_summary_json(&summary, b))?;

    for p in &summary.policies {
        let mean = p.mean_db.map_or("-inf".to_string(), |v| format!("{v:.2}"));
        eprintln!(
            "{:<12} mean {mean:>8} dB  feasible {:>6.2}%",
            p.policy_id,
            100.0 * p.feasibility_rate
        );
    }
    let derived = serde_json::json!({
        "m_s": result.m_s,
        "p_ris_watts": experiment.problem.p_ris,
        "sigma_sq_watts": experiment.problem.sigma_sq,
    });
    files.finish(manifest("montecarlo", common, &cfg, start, derived))?;
    Ok(())
}

pub fn cmd_tracking(common: &Common, out: &Path) -> Result<()> {
    let start = Instant::now();
    let cfg = resolve(common)?;
    let scenario = cfg.tracking()?;
    let run = with_pool(common.threads, || simulate_tracking(&scenario))??;
    let (near, far) = cfg.cadence_regions();
    let cadence = cadence_summary(&run, near, far);

    let mut points = Vec::new();
    let pdavg_note = if run.configurations.len() >= 2 {
        for &d in &cfg.reconfig_durations() {
            points.extend(dynamic_power_curve(&run, &scenario, d, &cfg.p_dynamic_grid())?);
        }
        None
    } else {
        let note = "no reconfiguration was triggered, so the reconfiguration probability is undefined and pdavg.csv has no rows";
        eprintln!("note: {note}");
        Some(note)
    };

    let mut files = OutputSet::create(out)?;
    files.write("trace.csv", |b| write_trace_csv(&run, b))?;
    files.write("events.csv", |b| write_events_csv(&run, b))?;
    files.write("pdavg.csv", |b| write_pdavg_csv(&points, b))?;

    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3} m"));
    eprintln!(
        "ris height {:.3} m, {} configurations, near spacing {}, far spacing {}",
        run.geometry.ris_height,
        run.configurations.len(),
        show(cadence.near_mean_spacing),
        show(cadence.far_mean_spacing)
    );
    let derived = serde_json::json!({
        "geometry": run.geometry,
        "cadence": cadence,
        "pdavg_note": pdavg_note,
    });
    files.finish(manifest("tracking", common, &cfg, start, derived))?;
    Ok(())
}

#[derive(Serialize)]
struct DemoOutput {
    seed: u64,
    trial: u64,
    m_s: usize,
    objective_db: Option<f64>,
    #[serde(flatten)]
    outcome: OutcomeRecord,
}

pub fn cmd_policy_demo(common: &Common, policy: Option<PolicyId>, trial: u64) -> Result<()> {
    let cfg = resolve(common)?;
    let policy = match policy {
        Some(p) => p,
        None => cfg.policies()[0],
    };
    let scenario = cfg.scenario()?;
    let spec = scenario.problem(policy.kind(), cfg.gamma_0())?;
    let channels = draw_channels(
        &scenario.geometry,
        &scenario.placement,
        &scenario.fading,
        derive_seed(cfg.seed(), trial),
    )?;
    let outcome = with_pool(common.threads, || {
        solve_with(policy, &channels, &spec, &scenario.harvester, &cfg.brute_force_options())
    })??;
    let db = to_db(outcome.objective());
    let out = DemoOutput {
        seed: cfg.seed(),
        trial,
        m_s: channels.num_cells(),
        objective_db: db.is_finite().then_some(db),
        outcome: outcome.record(),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}
