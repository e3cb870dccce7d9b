mod args;
mod plant;
mod reproduce;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use rshaper_core::freq::{FrequencyResponse, ResponseSet};
use rshaper_core::sim::ScenarioKind;
use rshaper_core::*;
use serde_json::json;

use crate::plant::Plant;
use crate::reproduce::Figure;

/// Delay-based resonance compensation: loop analysis, design and simulation.
#[derive(Parser)]
#[command(name = "rshaper", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bode data and stability margins of C·H (or of whichever parts are given)
    Analyze(AnalyzeArgs),
    /// Delay and gain of the compensator for a plant
    Design(DesignArgs),
    /// Closed-loop (or open-loop pulse) time response
    Simulate(SimulateArgs),
    /// Regenerate the data behind a figure
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct ControllerArgs {
    /// Controller JSON: {"pi":{"kp","ki"},"comp":{"kd","tau"},"gravity_ff"}
    #[arg(long)]
    controller: Option<PathBuf>,
    /// PI gains, overriding the controller file
    #[arg(long, value_name = "KP,KI", value_parser = args::parse_pi)]
    pi: Option<PiControllerF64>,
    /// Delay compensator, overriding the controller file
    #[arg(long, value_name = "KD,TAU", value_parser = args::parse_comp)]
    comp: Option<DelayCompensatorF64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// builtin:paper-two-mass, builtin:two-mass-nominal or a JSON plant file
    #[arg(long)]
    plant: String,
    #[command(flatten)]
    controller: ControllerArgs,
    #[arg(long, value_name = "WMIN,WMAX,N", value_parser = args::parse_grid)]
    grid: Option<FrequencyGridF64>,
    /// Bode CSV destination
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    plant: String,
    /// Frequency to compensate, rad/s; defaults to the least damped pole pair
    #[arg(long)]
    omega0: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    plant: String,
    #[command(flatten)]
    controller: ControllerArgs,
    /// Feedforward voltage added to the recorded input
    #[arg(long)]
    gravity_ff: Option<f64>,
    /// step:AMP@T, pulse:AMP,WIDTH@T or combo:AMP@T,IMP@TD
    #[arg(long, default_value = "step:0.005@0", value_parser = args::parse_scenario)]
    scenario: ScenarioF64,
    #[arg(long, default_value_t = rshaper_core::sim::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 20.0)]
    duration: f64,
    /// Settling band as a fraction of the reference
    #[arg(long, default_value_t = reproduce::SETTLE_BAND)]
    band: f64,
    /// Trace CSV destination
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verdict JSON destination (also printed)
    #[arg(long)]
    verdict: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    figure: Figure,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_name = "WMIN,WMAX,N", value_parser = args::parse_grid)]
    grid: Option<FrequencyGridF64>,
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

impl ControllerArgs {
    fn resolve(&self) -> Result<Option<ControllerConfigF64>> {
        let mut base: Option<ControllerConfigF64> = match &self.controller {
            Some(p) => {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let c: ControllerConfigF64 = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", p.display()))?;
                c.validate()?;
                Some(c)
            }
            None => None,
        };
        match (&mut base, self.pi) {
            (Some(c), Some(pi)) => c.pi = pi,
            (None, Some(pi)) => {
                base = Some(ControllerConfig {
                    pi,
                    comp: None,
                    gravity_ff: 0.0,
                })
            }
            _ => {}
        }
        if let Some(comp) = self.comp {
            match &mut base {
                Some(c) => c.comp = Some(comp),
                None => bail!("--comp needs PI gains (--pi or --controller)"),
            }
        }
        Ok(base)
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<ExitCode> {
    let plant = Plant::resolve(&a.plant)?;
    info!("plant: {plant}");
    let g = plant.transfer()?;
    let ctl = a.controller.resolve()?;
    let comp = ctl.and_then(|c| c.comp);
    let grid = a.grid.unwrap_or_else(FrequencyGrid::standard);
    let l: Box<dyn FrequencyResponse<f64>> = match (ctl, comp) {
        (None, None) => Box::new(g),
        (c, comp) => Box::new(QuasiRationalLoop::new(&g, comp, c.map(|c| c.pi))),
    };
    let resp: ResponseSet<f64> = sample_response(&l, &grid)?;
    if let Some(out) = &a.out {
        write_file(out, |w| resp.write_csv(w))?;
    }
    let report = stability_margins(&resp);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(match report.stable_verdict {
        MarginVerdict::MarginsViolated => ExitCode::from(2),
        MarginVerdict::MarginsPositive | MarginVerdict::NoCrossover => ExitCode::SUCCESS,
    })
}

fn design(a: &DesignArgs) -> Result<ExitCode> {
    let g = Plant::resolve(&a.plant)?.transfer()?;
    let report = design_from_transfer(&g, a.omega0)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn simulate(a: &SimulateArgs) -> Result<ExitCode> {
    let plant = Plant::resolve(&a.plant)?;
    let m = plant.statespace()?;
    let ctl = a.controller.resolve()?;
    let cfg = SimConfig::new(a.dt, a.duration)?;
    let sc = a.scenario;
    let (trace, reference) = match ctl {
        Some(mut c) => {
            if let Some(ug) = a.gravity_ff {
                c.gravity_ff = ug;
            }
            (simulate_closed_loop(m, &c, &sc, &cfg)?, sc.amplitude)
        }
        None if sc.kind == ScenarioKind::OpenLoopPulse => {
            sc.validate(cfg.duration)?;
            let input = sc.sampled_input(cfg.dt, cfg.steps() + 1);
            let tr = simulate_open_loop(m, &input, a.gravity_ff.unwrap_or(0.0), &cfg)?;
            let rest = tr.x.last().copied().unwrap_or(0.0);
            (tr, rest)
        }
        None => bail!("closed-loop scenarios need PI gains (--pi or --controller)"),
    };
    if let Some(out) = &a.out {
        write_file(out, |w| trace.write_csv(w))?;
    }
    let v = classify_trace(&trace, reference, a.band);
    let doc = json!({ "verdict": v, "truncated": trace.diverged, "samples": trace.len() });
    let text = serde_json::to_string_pretty(&doc)?;
    if let Some(path) = &a.verdict {
        fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(match v.verdict {
        Verdict::Settled => ExitCode::SUCCESS,
        Verdict::Diverged => ExitCode::from(2),
        Verdict::Oscillating => ExitCode::from(3),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze(a) => analyze(&a),
        Command::Design(a) => design(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Reproduce(a) => {
            let grid = a.grid.unwrap_or_else(FrequencyGrid::standard);
            let manifest = reproduce::run(a.figure, &grid, &a.out_dir)?;
            for p in &manifest.outputs {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
