//! Data behind each figure, written as CSV plus a manifest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use rshaper_core::freq::{FrequencyResponse, ResponseSet};
use rshaper_core::*;
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_KP: f64 = 100.0;
pub const DEFAULT_KI: f64 = 150.0;
pub const DEFAULT_KD: f64 = 100.0;
pub const DEFAULT_TAU: f64 = 0.1923;
pub const STEP_AMPLITUDE: f64 = 0.005;
pub const SETTLE_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Template Bode plots for two damping ratios
    Fig2,
    /// Compensator magnitude |R(jw)|
    Fig3,
    /// Suppression ratio |G/H|
    Fig4,
    /// Loop Bode plots with and without the compensator
    Fig6,
    /// Open-loop pulse response
    Fig8a,
    /// Step response under PI control only
    Fig8b,
    /// Step and disturbance response with the compensator
    Fig8c,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Value,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub truncated: bool,
}

struct Emitter<'a> {
    dir: &'a Path,
    outputs: Vec<PathBuf>,
    truncated: bool,
}

impl Emitter<'_> {
    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let file =
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w)
            .and_then(|_| w.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path);
        Ok(())
    }

    fn response(&mut self, name: &str, r: &ResponseSet<f64>) -> Result<()> {
        self.write(name, |w| r.write_csv(w))
    }

    fn json(&mut self, name: &str, v: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(v)?;
        self.write(name, |w| writeln!(w, "{text}"))
    }

    fn trace(&mut self, name: &str, tr: &SimTraceF64, reference: f64) -> Result<TraceVerdict<f64>> {
        self.truncated |= tr.diverged;
        self.write(&format!("{name}.csv"), |w| tr.write_csv(w))?;
        let v = classify_trace(tr, reference, SETTLE_BAND);
        self.json(
            &format!("{name}_verdict.json"),
            &json!({ "verdict": v, "truncated": tr.diverged }),
        )?;
        Ok(v)
    }
}

fn template(zeta: f64) -> TemplateParams<f64> {
    TemplateParams {
        k: 1.0,
        z1: 50.0,
        p1: 100.0,
        zeta,
        omega0: 10.0,
    }
}

fn two_mass_loop(comp: Option<DelayCompensatorF64>) -> Result<QuasiRationalLoop<f64>> {
    let g = RationalTransferF64::from_statespace(&paper_verbatim_statespace())?;
    Ok(QuasiRationalLoop::new(
        &g,
        comp,
        Some(PiControllerF64::new(DEFAULT_KP, DEFAULT_KI)?),
    ))
}

fn closed_loop_run(
    comp: Option<DelayCompensatorF64>,
    sc: &ScenarioF64,
    duration: f64,
) -> Result<SimTraceF64> {
    let ctl = ControllerConfig {
        pi: PiControllerF64::new(DEFAULT_KP, DEFAULT_KI)?,
        comp,
        gravity_ff: gravity_feedforward(&nominal_params()),
    };
    Ok(simulate_closed_loop(
        &paper_verbatim_statespace(),
        &ctl,
        sc,
        &SimConfig::new(1e-4, duration)?,
    )?)
}

pub fn run(fig: Figure, grid: &FrequencyGridF64, out_dir: &Path) -> Result<RunManifest> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut e = Emitter {
        dir: out_dir,
        outputs: Vec::new(),
        truncated: false,
    };
    let grid_json = json!({ "omega_min": grid.omega_min(), "omega_max": grid.omega_max(), "points": grid.points() });
    let ug = gravity_feedforward(&nominal_params::<f64>());

    let inputs = match fig {
        Figure::Fig2 => {
            for zeta in [0.01, 0.7] {
                let g = RationalTransferF64::fourth_order_template(template(zeta))?;
                e.response(
                    &format!("fig2_zeta_{zeta}.csv"),
                    &sample_response(&g, grid)?,
                )?;
            }
            json!({ "template": template(0.01), "zeta": [0.01, 0.7], "grid": grid_json })
        }
        Figure::Fig3 => {
            let r = DelayCompensatorF64::new(1.0, 0.3142)?;
            let rows: Vec<(f64, f64)> = grid
                .omegas()
                .into_iter()
                .map(|w| Ok((w, r.at(w)?.norm())))
                .collect::<Result<_>>()?;
            e.write("fig3_compensator.csv", |w| {
                writeln!(w, "omega_rad_s,magnitude,magnitude_db")?;
                for (om, m) in &rows {
                    writeln!(w, "{om:.16e},{m:.16e},{:.16e}", 20.0 * m.log10())?;
                }
                Ok(())
            })?;
            json!({ "compensator": r, "grid": grid_json })
        }
        Figure::Fig4 => {
            let p = template(0.01);
            let g = RationalTransferF64::fourth_order_template(p)?;
            let r = DelayCompensatorF64::new(design_kd(&p)?, design_tau(&g, p.omega0)?)?;
            let rows: Vec<(f64, f64)> = grid
                .omegas()
                .into_iter()
                .map(|w| Ok((w, suppression_ratio(&g, &r, w)?)))
                .collect::<Result<_>>()?;
            e.write("fig4_ratio.csv", |w| {
                writeln!(w, "omega_rad_s,ratio")?;
                for (om, q) in &rows {
                    writeln!(w, "{om:.16e},{q:.16e}")?;
                }
                Ok(())
            })?;
            json!({ "template": p, "compensator": r, "grid": grid_json })
        }
        Figure::Fig6 => {
            let comp = DelayCompensatorF64::new(DEFAULT_KD, DEFAULT_TAU)?;
            let cg = sample_response(&two_mass_loop(None)?, grid)?;
            let ch = sample_response(&two_mass_loop(Some(comp))?, grid)?;
            e.response("fig6_cg.csv", &cg)?;
            e.response("fig6_ch.csv", &ch)?;
            e.json(
                "fig6_margins.json",
                &json!({ "cg": stability_margins(&cg), "ch": stability_margins(&ch) }),
            )?;
            json!({ "plant": crate::plant::BUILTIN_PAPER, "pi": { "kp": DEFAULT_KP, "ki": DEFAULT_KI }, "compensator": comp, "grid": grid_json })
        }
        Figure::Fig8a => {
            let sc = ScenarioF64::pulse(1.0, 0.05, 0.5);
            let cfg = SimConfig::new(1e-4, 10.0)?;
            let tr = simulate_open_loop(
                &paper_verbatim_statespace(),
                &sc.sampled_input(cfg.dt, cfg.steps() + 1),
                ug,
                &cfg,
            )?;
            let rest = *tr.x.last().unwrap_or(&0.0);
            e.trace("fig8a_open_loop", &tr, rest)?;
            json!({ "plant": crate::plant::BUILTIN_PAPER, "scenario": sc, "sim": cfg, "gravity_ff": ug })
        }
        Figure::Fig8b => {
            let sc = ScenarioF64::step(STEP_AMPLITUDE, 0.0);
            e.trace(
                "fig8b_pi_only",
                &closed_loop_run(None, &sc, 20.0)?,
                STEP_AMPLITUDE,
            )?;
            json!({ "plant": crate::plant::BUILTIN_PAPER, "pi": { "kp": DEFAULT_KP, "ki": DEFAULT_KI }, "scenario": sc, "dt": 1e-4, "duration": 20.0, "gravity_ff": ug })
        }
        Figure::Fig8c => {
            let sc = ScenarioF64::combo(STEP_AMPLITUDE, 0.0, 0.02, 15.0);
            let comp = DelayCompensatorF64::new(DEFAULT_KD, DEFAULT_TAU)?;
            e.trace(
                "fig8c_compensated",
                &closed_loop_run(Some(comp), &sc, 25.0)?,
                STEP_AMPLITUDE,
            )?;
            json!({ "plant": crate::plant::BUILTIN_PAPER, "pi": { "kp": DEFAULT_KP, "ki": DEFAULT_KI }, "compensator": comp, "scenario": sc, "dt": 1e-4, "duration": 25.0, "gravity_ff": ug })
        }
    };

    let fig_name = fig
        .to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default();
    let mut manifest = RunManifest {
        command: format!("reproduce {fig_name}"),
        inputs,
        outputs: e.outputs,
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        truncated: e.truncated,
    };
    let path = out_dir.join("manifest.json");
    manifest.outputs.push(path.clone());
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(manifest)
}
