//! The delayed-output compensator `R(s) = K_d (e^{-sτ} - 1)`, its tuning
//! rules, and the loops it forms with the plant and an outer PI controller.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::FrequencyResponse;
use crate::lti::{Polynomial, RationalTransfer, TemplateParams};
use crate::Scalar;

/// Damping ratio the compensated resonance is shaped towards.
pub const REFERENCE_DAMPING: f64 = 0.7;

/// Delayed-difference output feedback, time law `u = K_d (x(t) - x(t-τ))`.
///
/// `kd = 0` disables the compensator; `tau` must be positive whenever `kd` is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DelayCompensator<T: Scalar> {
    pub kd: T,
    pub tau: T,
}

impl<T: Scalar> DelayCompensator<T> {
    pub fn new(kd: T, tau: T) -> Result<Self> {
        let c = Self { kd, tau };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kd >= T::zero()) || !self.kd.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kd must be >= 0, got {}",
                self.kd
            )));
        }
        if !(self.tau >= T::zero()) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        if self.kd > T::zero() && self.tau.is_zero() {
            return Err(Error::InvalidParameter(
                "tau must be positive when kd > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn is_active(&self) -> bool {
        self.kd > T::zero()
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        ((-s * self.tau).exp() - T::one()) * self.kd
    }
}

impl<T: Scalar> FrequencyResponse<T> for DelayCompensator<T> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval(s))
    }
}

pub fn compensator_eval<T: Scalar>(r: &DelayCompensator<T>, s: Complex<T>) -> Complex<T> {
    r.eval(s)
}

/// `C(s) = K_p + K_i / s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PiController<T: Scalar> {
    pub kp: T,
    pub ki: T,
}

impl<T: Scalar> PiController<T> {
    pub fn new(kp: T, ki: T) -> Result<Self> {
        let c = Self { kp, ki };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kp > T::zero()) || !self.kp.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kp must be > 0, got {}",
                self.kp
            )));
        }
        if !(self.ki >= T::zero()) || !self.ki.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ki must be >= 0, got {}",
                self.ki
            )));
        }
        Ok(())
    }

    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        if s.norm().is_zero() {
            return Err(Error::Singular {
                re: 0.0,
                im: 0.0,
                magnitude: 0.0,
            });
        }
        Ok((s + self.ki / self.kp) / s * self.kp)
    }
}

impl<T: Scalar> FrequencyResponse<T> for PiController<T> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        self.eval(s)
    }
}

/// `C(s)·inner(s)`.
pub fn pi_series_eval<T: Scalar, F: FrequencyResponse<T> + ?Sized>(
    c: &PiController<T>,
    inner: &F,
    s: Complex<T>,
) -> Result<Complex<T>> {
    Ok(c.eval(s)? * inner.eval_s(s)?)
}

/// Plant `N/D`, optionally closed through `R` and put in series with a PI.
///
/// As a [`FrequencyResponse`] it evaluates `C(s) · N / (D + R N)`, dropping
/// whichever of `C` and `R` is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiRationalLoop<T: Scalar> {
    pub plant_num: Polynomial<T>,
    pub plant_den: Polynomial<T>,
    pub compensator: Option<DelayCompensator<T>>,
    pub pi: Option<PiController<T>>,
}

impl<T: Scalar> QuasiRationalLoop<T> {
    pub fn new(
        plant: &RationalTransfer<T>,
        compensator: Option<DelayCompensator<T>>,
        pi: Option<PiController<T>>,
    ) -> Self {
        Self {
            plant_num: plant.num().clone(),
            plant_den: plant.den().clone(),
            compensator,
            pi,
        }
    }

    /// `H(s) = N / (D + R N)`; exactly `N / D` when no compensator is attached.
    pub fn closed_loop_eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        let n = self.plant_num.eval(s);
        let d = self.plant_den.eval(s);
        let denom = match &self.compensator {
            Some(r) => d + r.eval(s) * n,
            None => d,
        };
        let scale = d.norm() + n.norm();
        if denom.norm() <= T::epsilon() * T::lit(16.0) * scale {
            return Err(Error::Singular {
                re: s.re.as_f64(),
                im: s.im.as_f64(),
                magnitude: denom.norm().as_f64(),
            });
        }
        Ok(n / denom)
    }
}

impl<T: Scalar> FrequencyResponse<T> for QuasiRationalLoop<T> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        let h = self.closed_loop_eval(s)?;
        match &self.pi {
            Some(c) => Ok(c.eval(s)? * h),
            None => Ok(h),
        }
    }
}

pub fn closed_loop_eval<T: Scalar>(l: &QuasiRationalLoop<T>, s: Complex<T>) -> Result<Complex<T>> {
    l.closed_loop_eval(s)
}

/// `|G(jω)| / |H(jω)| = |1 + R(jω) N(jω) / D(jω)|`.
pub fn suppression_ratio<T: Scalar>(
    g: &RationalTransfer<T>,
    r: &DelayCompensator<T>,
    omega: T,
) -> Result<T> {
    let s = Complex::new(T::zero(), omega);
    let gs = g.eval(s)?;
    Ok((r.eval(s) * gs + T::one()).norm())
}

/// Continuous phase (radians) of `g(jω)` tracked from well below `omega` up to
/// `omega`, refining the step wherever the phase moves quickly.
pub fn tracked_phase<T: Scalar, F: FrequencyResponse<T> + ?Sized>(g: &F, omega: T) -> Result<T> {
    const COARSE_STEPS: usize = 400;
    let start = omega * T::lit(1e-3);
    let ratio = (omega / start).ln() / T::from_usize_lossy(COARSE_STEPS);
    let mut w_prev = start;
    let mut raw_prev = g.at(start)?.arg();
    let mut phase = raw_prev;
    for i in 1..=COARSE_STEPS {
        let w = if i == COARSE_STEPS {
            omega
        } else {
            start * (ratio * T::from_usize_lossy(i)).exp()
        };
        let (delta, raw) = track_segment(g, w_prev, raw_prev, w, 0)?;
        phase += delta;
        w_prev = w;
        raw_prev = raw;
    }
    Ok(phase)
}

fn wrap_rad<T: Scalar>(d: T) -> T {
    let two_pi = T::TAU();
    let mut d = d % two_pi;
    if d > T::PI() {
        d -= two_pi;
    } else if d <= -T::PI() {
        d += two_pi;
    }
    d
}

fn track_segment<T: Scalar, F: FrequencyResponse<T> + ?Sized>(
    g: &F,
    wa: T,
    raw_a: T,
    wb: T,
    depth: usize,
) -> Result<(T, T)> {
    let raw_b = g.at(wb)?.arg();
    let d = wrap_rad(raw_b - raw_a);
    if d.abs() > T::lit(20f64.to_radians()) && depth < 40 {
        let mid = (wa * wb).sqrt();
        let (d1, raw_m) = track_segment(g, wa, raw_a, mid, depth + 1)?;
        let (d2, raw_b) = track_segment(g, mid, raw_m, wb, depth + 1)?;
        return Ok((d1 + d2, raw_b));
    }
    Ok((d, raw_b))
}

/// `τ = -arg G(jω₀) / ω₀` with the phase taken on the continuous branch
/// reached from low frequency.
pub fn design_tau<T: Scalar, F: FrequencyResponse<T> + ?Sized>(g: &F, omega0: T) -> Result<T> {
    if !(omega0 > T::zero()) || !omega0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "omega0 must be positive, got {omega0}"
        )));
    }
    let phase = tracked_phase(g, omega0)?;
    let tau = -phase / omega0;
    if !(tau > T::zero()) {
        return Err(Error::Design(format!(
            "phase at omega0 = {omega0} is {:.3} deg; no positive delay reaches anti-phase",
            phase.to_degrees_()
        )));
    }
    Ok(tau)
}

/// Gain that makes `|G(jω₀)| / |H(jω₀)|` equal `target / ζ`:
/// `K_d = ω₀³ (target − ζ) / k · |(p1 + jω₀) / (z1 + jω₀)|`.
pub fn design_kd_with_target<T: Scalar>(params: &TemplateParams<T>, target_zeta: T) -> Result<T> {
    params.validate()?;
    let TemplateParams {
        k,
        z1,
        p1,
        zeta,
        omega0,
    } = *params;
    let slack = T::lit(1e-9) * target_zeta;
    if zeta > target_zeta + slack {
        return Err(Error::Design(format!(
            "damping ratio {zeta} already exceeds the reference {target_zeta}"
        )));
    }
    let gap = (target_zeta - zeta).max(T::zero());
    let modulus = Complex::new(p1, omega0).norm() / Complex::new(z1, omega0).norm();
    Ok(omega0.powi(3) * gap / k * modulus)
}

pub fn design_kd<T: Scalar>(params: &TemplateParams<T>) -> Result<T> {
    design_kd_with_target(params, T::lit(REFERENCE_DAMPING))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DesignReport<T: Scalar> {
    pub omega0: T,
    pub tau: T,
    /// Gain from the template formula; absent when the plant has no template form.
    pub kd: Option<T>,
    /// Desired `|G/H|` at ω₀, i.e. reference damping over plant damping.
    pub target_ratio: Option<T>,
}

/// Full design from a transfer: ω₀ (given, or the damped frequency of the
/// least damped pole pair), τ, and the template gain when applicable.
pub fn design_from_transfer<T: Scalar>(
    g: &RationalTransfer<T>,
    omega0: Option<T>,
) -> Result<DesignReport<T>> {
    let omega0 = match omega0 {
        Some(w) => w,
        None => g
            .oscillatory_mode()?
            .map(|m| m.damped)
            .ok_or_else(|| Error::Design("no complex pole pair and no omega0 given".into()))?,
    };
    let tau = design_tau(g, omega0)?;
    let reference = T::lit(REFERENCE_DAMPING);
    let (kd, target_ratio) = match g.template_params()? {
        Some(mut p) => {
            p.omega0 = omega0;
            let kd = design_kd_with_target(&p, reference).ok();
            (kd, Some(reference / p.zeta))
        }
        None => (None, None),
    };
    Ok(DesignReport {
        omega0,
        tau,
        kd,
        target_ratio,
    })
}
