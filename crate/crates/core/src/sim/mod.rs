//! Fixed-step closed-loop simulation of the plant under the two-DOF law
//! `u = K_p e + K_i ∫e + K_d (x(t) - x(t-τ))` (+ feedforward), which makes
//! the loop a delay differential equation.

mod buffer;
mod classify;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::design::{DelayCompensator, PiController};
use crate::error::{Error, Result};
use crate::lti::StateSpaceModel;
use crate::Scalar;

pub use buffer::DelayBuffer;
pub use classify::{classify_trace, TraceVerdict, Verdict};

/// Step used when none is given: the 10 kHz rate of the sampled controller.
pub const DEFAULT_DT: f64 = 1e-4;

/// Minimum number of samples spanning the compensator delay.
pub const MIN_SAMPLES_PER_DELAY: f64 = 20.0;

/// State index receiving disturbance impulses (load velocity).
pub const DISTURBANCE_STATE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ControllerConfig<T: Scalar> {
    pub pi: PiController<T>,
    /// `None` or `kd = 0` disables the delayed feedback.
    #[serde(default)]
    pub comp: Option<DelayCompensator<T>>,
    /// Constant voltage added to the applied input, volts.
    #[serde(default)]
    pub gravity_ff: T,
}

impl<T: Scalar> ControllerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.pi.validate()?;
        if let Some(c) = &self.comp {
            c.validate()?;
        }
        if !self.gravity_ff.is_finite() {
            return Err(Error::InvalidParameter("gravity_ff must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Reference jumps to `amplitude` at `start_time`.
    StepReference,
    /// Input voltage pulse of `amplitude` for `pulse_width` from `start_time`; reference stays 0.
    OpenLoopPulse,
    /// Reference step plus a velocity impulse on the load at `disturbance_time`.
    DisturbanceStepCombo,
}

fn default_load_mass<T: Scalar>() -> T {
    T::lit(0.75)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Scenario<T: Scalar> {
    pub kind: ScenarioKind,
    pub amplitude: T,
    #[serde(default)]
    pub start_time: T,
    #[serde(default)]
    pub pulse_width: T,
    #[serde(default)]
    pub disturbance_time: T,
    /// Force impulse on the load, N·s.
    #[serde(default)]
    pub disturbance_impulse: T,
    /// Mass converting the impulse into a velocity jump, kg.
    #[serde(default = "default_load_mass")]
    pub load_mass: T,
}

impl<T: Scalar> Scenario<T> {
    pub fn step(amplitude: T, start_time: T) -> Self {
        Self {
            kind: ScenarioKind::StepReference,
            amplitude,
            start_time,
            pulse_width: T::zero(),
            disturbance_time: T::zero(),
            disturbance_impulse: T::zero(),
            load_mass: default_load_mass(),
        }
    }

    pub fn pulse(amplitude: T, width: T, start_time: T) -> Self {
        Self {
            kind: ScenarioKind::OpenLoopPulse,
            pulse_width: width,
            ..Self::step(amplitude, start_time)
        }
    }

    pub fn combo(amplitude: T, start_time: T, impulse: T, disturbance_time: T) -> Self {
        Self {
            kind: ScenarioKind::DisturbanceStepCombo,
            disturbance_time,
            disturbance_impulse: impulse,
            ..Self::step(amplitude, start_time)
        }
    }

    pub fn validate(&self, horizon: T) -> Result<()> {
        let times = [
            ("start_time", self.start_time),
            ("disturbance_time", self.disturbance_time),
        ];
        for (name, t) in times {
            if !(t >= T::zero()) || t > horizon {
                return Err(Error::SimConfig(format!(
                    "{name} = {t} outside the horizon [0, {horizon}]"
                )));
            }
        }
        if !(self.pulse_width >= T::zero()) {
            return Err(Error::SimConfig("pulse_width must be >= 0".into()));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::SimConfig("amplitude must be finite".into()));
        }
        if self.kind == ScenarioKind::DisturbanceStepCombo && !(self.load_mass > T::zero()) {
            return Err(Error::SimConfig("load_mass must be positive".into()));
        }
        Ok(())
    }

    pub fn reference(&self, t: T) -> T {
        match self.kind {
            ScenarioKind::StepReference | ScenarioKind::DisturbanceStepCombo
                if t >= self.start_time =>
            {
                self.amplitude
            }
            _ => T::zero(),
        }
    }

    /// Open-loop voltage added to the controller output.
    pub fn input_pulse(&self, t: T) -> T {
        match self.kind {
            ScenarioKind::OpenLoopPulse
                if t >= self.start_time && t < self.start_time + self.pulse_width =>
            {
                self.amplitude
            }
            _ => T::zero(),
        }
    }

    /// Sampled open-loop input covering `n` steps of `dt`.
    pub fn sampled_input(&self, dt: T, n: usize) -> Vec<T> {
        (0..n)
            .map(|k| self.input_pulse(T::from_usize_lossy(k) * dt))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HistoryPolicy {
    /// `x(θ) = x(0)` for `θ < 0`.
    #[default]
    ConstantInitial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SimConfig<T: Scalar> {
    pub dt: T,
    pub duration: T,
    #[serde(default)]
    pub history_policy: HistoryPolicy,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(dt: T, duration: T) -> Result<Self> {
        let c = Self {
            dt,
            duration,
            history_policy: HistoryPolicy::ConstantInitial,
        };
        c.validate(None)?;
        Ok(c)
    }

    pub fn validate(&self, comp: Option<&DelayCompensator<T>>) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::SimConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.duration >= self.dt) || !self.duration.is_finite() {
            return Err(Error::SimConfig(format!(
                "duration {} shorter than dt {}",
                self.duration, self.dt
            )));
        }
        if let Some(c) = comp.filter(|c| c.is_active()) {
            if self.dt > c.tau / T::lit(MIN_SAMPLES_PER_DELAY) {
                return Err(Error::SimConfig(format!(
                    "dt = {} resolves tau = {} with fewer than {MIN_SAMPLES_PER_DELAY} samples",
                    self.dt, c.tau
                )));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// One row per step: time, load position, actuator position (state 2),
/// applied voltage (incl. feedforward), reference.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SimTrace<T: Scalar> {
    pub t: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub u: Vec<T>,
    pub r: Vec<T>,
    /// Set when the state became nonfinite; the trace stops before that step.
    pub diverged: bool,
}

impl<T: Scalar> SimTrace<T> {
    fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            diverged: false,
        }
    }

    fn record(&mut self, t: T, x: T, y: T, u: T, r: T) {
        self.t.push(t);
        self.x.push(x);
        self.y.push(y);
        self.u.push(u);
        self.r.push(r);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV with header `t_s,x_m,y_m,u_V,r_m`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t_s,x_m,y_m,u_V,r_m")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.t[i].as_f64(),
                self.x[i].as_f64(),
                self.y[i].as_f64(),
                self.u[i].as_f64(),
                self.r[i].as_f64()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Classic RK4 over one step with the input held constant.
struct Rk4<T: Scalar> {
    k: [Vec<T>; 4],
    tmp: Vec<T>,
}

impl<T: Scalar> Rk4<T> {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![T::zero(); n]),
            tmp: vec![T::zero(); n],
        }
    }

    fn step(&mut self, plant: &StateSpaceModel<T>, z: &mut [T], u: T, dt: T) {
        let half = dt * T::lit(0.5);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        plant.derivative(z, u, &mut self.k[0]);
        for stage in 1..4 {
            let h = if stage == 3 { dt } else { half };
            let (done, rest) = self.k.split_at_mut(stage);
            for ((t, &zi), &ki) in self.tmp.iter_mut().zip(z.iter()).zip(&done[stage - 1]) {
                *t = zi + h * ki;
            }
            plant.derivative(&self.tmp, u, &mut rest[0]);
        }
        let [k1, k2, k3, k4] = &self.k;
        for (i, zi) in z.iter_mut().enumerate() {
            *zi += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
    }
}

fn plant_y<T: Scalar>(z: &[T]) -> T {
    z.get(1).copied().unwrap_or_else(T::zero)
}

/// Closed loop from rest. The delayed output is read from a ring buffer with
/// linear interpolation; the integrator is advanced with the trapezoidal rule.
pub fn simulate_closed_loop<T: Scalar>(
    plant: &StateSpaceModel<T>,
    ctl: &ControllerConfig<T>,
    sc: &Scenario<T>,
    cfg: &SimConfig<T>,
) -> Result<SimTrace<T>> {
    ctl.validate()?;
    cfg.validate(ctl.comp.as_ref())?;
    sc.validate(cfg.duration)?;
    if sc.kind == ScenarioKind::DisturbanceStepCombo && plant.order() <= DISTURBANCE_STATE {
        return Err(Error::SimConfig(format!(
            "disturbance needs at least {} states",
            DISTURBANCE_STATE + 1
        )));
    }

    let n = plant.order();
    let steps = cfg.steps();
    let dt = cfg.dt;
    let mut z = vec![T::zero(); n];
    let mut rk = Rk4::new(n);
    let mut buffer = ctl.comp.map(|c| (c.kd, DelayBuffer::new(c.tau, dt)));
    let mut integral = T::zero();
    let mut trace = SimTrace::with_capacity(steps + 1);
    let half = T::lit(0.5);
    let PiController { kp, ki } = ctl.pi;

    for k in 0..=steps {
        let t = T::from_usize_lossy(k) * dt;
        let x = plant.output(&z);
        let r = sc.reference(t);
        let e = r - x;
        let mut u = kp * e + ki * integral + sc.input_pulse(t);
        if let Some((kd, buf)) = buffer.as_mut() {
            buf.push(x);
            u += *kd * (x - buf.delayed());
        }
        trace.record(t, x, plant_y(&z), u + ctl.gravity_ff, r);
        if k == steps {
            break;
        }

        let mut next = z.clone();
        rk.step(plant, &mut next, u, dt);
        let t_next = T::from_usize_lossy(k + 1) * dt;
        if sc.kind == ScenarioKind::DisturbanceStepCombo
            && sc.disturbance_time > t
            && sc.disturbance_time <= t_next
        {
            next[DISTURBANCE_STATE] += sc.disturbance_impulse / sc.load_mass;
        }
        if next.iter().any(|v| !v.is_finite()) {
            trace.diverged = true;
            break;
        }
        let e_next = sc.reference(t_next) - plant.output(&next);
        integral += dt * half * (e + e_next);
        z = next;
    }
    Ok(trace)
}

/// Open loop from rest driven by `input` (one sample per step, held over the
/// step). `gravity_ff` only offsets the recorded voltage: the linear model
/// is taken about the gravity equilibrium the feedforward establishes.
pub fn simulate_open_loop<T: Scalar>(
    plant: &StateSpaceModel<T>,
    input: &[T],
    gravity_ff: T,
    cfg: &SimConfig<T>,
) -> Result<SimTrace<T>> {
    cfg.validate(None)?;
    let steps = cfg.steps();
    if input.len() < steps {
        return Err(Error::SimConfig(format!(
            "input has {} samples, need {steps}",
            input.len()
        )));
    }
    let n = plant.order();
    let mut z = vec![T::zero(); n];
    let mut rk = Rk4::new(n);
    let mut trace = SimTrace::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = T::from_usize_lossy(k) * cfg.dt;
        let u = input.get(k).copied().unwrap_or_else(T::zero);
        trace.record(t, plant.output(&z), plant_y(&z), u + gravity_ff, T::zero());
        if k == steps {
            break;
        }
        let mut next = z.clone();
        rk.step(plant, &mut next, u, cfg.dt);
        if next.iter().any(|v| !v.is_finite()) {
            trace.diverged = true;
            break;
        }
        z = next;
    }
    Ok(trace)
}
