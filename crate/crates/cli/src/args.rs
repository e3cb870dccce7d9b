//! Compact tuple grammar shared by the subcommands.

use anyhow::{bail, Context, Result};
use rshaper_core::{DelayCompensatorF64, FrequencyGridF64, PiControllerF64, ScenarioF64};

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        bail!("{what}: expected {n} comma-separated values, got {s:?}");
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .with_context(|| format!("{what}: {p:?} is not a number"))
        })
        .collect()
}

pub fn parse_pi(s: &str) -> Result<PiControllerF64> {
    let v = numbers(s, 2, "--pi KP,KI")?;
    Ok(PiControllerF64::new(v[0], v[1])?)
}

pub fn parse_comp(s: &str) -> Result<DelayCompensatorF64> {
    let v = numbers(s, 2, "--comp KD,TAU")?;
    Ok(DelayCompensatorF64::new(v[0], v[1])?)
}

pub fn parse_grid(s: &str) -> Result<FrequencyGridF64> {
    let v = numbers(s, 3, "--grid WMIN,WMAX,N")?;
    if v[2] < 2.0 || v[2].fract() != 0.0 {
        bail!("--grid: N must be an integer >= 2, got {}", v[2]);
    }
    Ok(FrequencyGridF64::logarithmic(v[0], v[1], v[2] as usize)?)
}

fn split_at_time<'a>(body: &'a str, what: &str) -> Result<(&'a str, f64)> {
    let (head, t) = body
        .rsplit_once('@')
        .with_context(|| format!("{what}: missing @TIME in {body:?}"))?;
    Ok((head, numbers(t, 1, what)?[0]))
}

/// `step:AMP@T`, `pulse:AMP,WIDTH@T` or `combo:AMP@T,IMP@TD`.
pub fn parse_scenario(s: &str) -> Result<ScenarioF64> {
    let (kind, body) = s
        .split_once(':')
        .with_context(|| format!("--scenario: expected KIND:ARGS, got {s:?}"))?;
    match kind {
        "step" => {
            let (amp, t) = split_at_time(body, "step:AMP@T")?;
            Ok(ScenarioF64::step(numbers(amp, 1, "step:AMP@T")?[0], t))
        }
        "pulse" => {
            let (head, t) = split_at_time(body, "pulse:AMP,WIDTH@T")?;
            let v = numbers(head, 2, "pulse:AMP,WIDTH@T")?;
            Ok(ScenarioF64::pulse(v[0], v[1], t))
        }
        "combo" => {
            let (step, disturbance) = body
                .split_once(',')
                .with_context(|| format!("combo:AMP@T,IMP@TD: got {body:?}"))?;
            let (amp, t) = split_at_time(step, "combo:AMP@T,IMP@TD")?;
            let (imp, td) = split_at_time(disturbance, "combo:AMP@T,IMP@TD")?;
            Ok(ScenarioF64::combo(
                numbers(amp, 1, "combo amplitude")?[0],
                t,
                numbers(imp, 1, "combo impulse")?[0],
                td,
            ))
        }
        other => bail!("--scenario: unknown kind {other:?} (step, pulse or combo)"),
    }
}
