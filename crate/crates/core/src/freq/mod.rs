//! Frequency-response sampling, phase unwrapping and stability margins.

mod margins;

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::RationalTransfer;
use crate::Scalar;

pub use margins::{resonance_peak, stability_margins, MarginReport, MarginVerdict, PhaseCrossover};

pub const DEFAULT_OMEGA_MIN: f64 = 0.1;
pub const DEFAULT_OMEGA_MAX: f64 = 1000.0;
pub const DEFAULT_GRID_POINTS: usize = 2000;

/// Largest wrapped phase increment between adjacent samples that is still
/// attributed unambiguously to one branch.
pub const MAX_PHASE_STEP_DEG: f64 = 170.0;

/// Anything that can be evaluated on the complex plane, in particular at `jω`.
pub trait FrequencyResponse<T: Scalar> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>>;

    fn at(&self, omega: T) -> Result<Complex<T>> {
        self.eval_s(Complex::new(T::zero(), omega))
    }
}

impl<T: Scalar, F: FrequencyResponse<T> + ?Sized> FrequencyResponse<T> for &F {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        (**self).eval_s(s)
    }
}

impl<T: Scalar, F: FrequencyResponse<T> + ?Sized> FrequencyResponse<T> for Box<F> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        (**self).eval_s(s)
    }
}

impl<T: Scalar> FrequencyResponse<T> for RationalTransfer<T> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        self.eval(s)
    }
}

/// `e^{-sτ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureDelay<T: Scalar>(pub T);

impl<T: Scalar> FrequencyResponse<T> for PureDelay<T> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok((-s * self.0).exp())
    }
}

/// Constant gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain<T: Scalar>(pub T);

impl<T: Scalar> FrequencyResponse<T> for Gain<T> {
    fn eval_s(&self, _s: Complex<T>) -> Result<Complex<T>> {
        Ok(Complex::new(self.0, T::zero()))
    }
}

/// Series connection `A(s)·B(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series<A, B>(pub A, pub B);

impl<T: Scalar, A: FrequencyResponse<T>, B: FrequencyResponse<T>> FrequencyResponse<T>
    for Series<A, B>
{
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok(self.0.eval_s(s)? * self.1.eval_s(s)?)
    }
}

/// Adapter for closures `s -> Result<Complex>`.
pub struct FnResponse<F>(pub F);

impl<T: Scalar, F: Fn(Complex<T>) -> Result<Complex<T>>> FrequencyResponse<T> for FnResponse<F> {
    fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        (self.0)(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Logarithmic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FrequencyGrid<T: Scalar> {
    omega_min: T,
    omega_max: T,
    points: usize,
    spacing: Spacing,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(omega_min: T, omega_max: T, points: usize, spacing: Spacing) -> Result<Self> {
        if !(omega_min > T::zero()) || !(omega_max > omega_min) || !omega_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        Ok(Self {
            omega_min,
            omega_max,
            points,
            spacing,
        })
    }

    pub fn logarithmic(omega_min: T, omega_max: T, points: usize) -> Result<Self> {
        Self::new(omega_min, omega_max, points, Spacing::Logarithmic)
    }

    pub fn linear(omega_min: T, omega_max: T, points: usize) -> Result<Self> {
        Self::new(omega_min, omega_max, points, Spacing::Linear)
    }

    /// 2000 logarithmic points on [0.1, 1000] rad/s.
    pub fn standard() -> Self {
        Self::with_points(DEFAULT_GRID_POINTS)
    }

    /// Standard band with a custom point count (clamped to at least 2).
    pub fn with_points(points: usize) -> Self {
        Self {
            omega_min: T::lit(DEFAULT_OMEGA_MIN),
            omega_max: T::lit(DEFAULT_OMEGA_MAX),
            points: points.max(2),
            spacing: Spacing::Logarithmic,
        }
    }

    pub fn omega_min(&self) -> T {
        self.omega_min
    }

    pub fn omega_max(&self) -> T {
        self.omega_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Same band and spacing with `2·points - 1` samples (every old point kept).
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    pub fn omegas(&self) -> Vec<T> {
        let last = self.points - 1;
        let denom = T::from_usize_lossy(last);
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.omega_min;
                }
                if i == last {
                    return self.omega_max;
                }
                let frac = T::from_usize_lossy(i) / denom;
                match self.spacing {
                    Spacing::Logarithmic => {
                        let (lo, hi) = (self.omega_min.ln(), self.omega_max.ln());
                        (lo + (hi - lo) * frac).exp()
                    }
                    Spacing::Linear => self.omega_min + (self.omega_max - self.omega_min) * frac,
                }
            })
            .collect()
    }
}

/// Sampled response with continuous (unwrapped) phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ResponseSet<T: Scalar> {
    omega: Vec<T>,
    magnitude_db: Vec<T>,
    phase_deg: Vec<T>,
}

impl<T: Scalar> ResponseSet<T> {
    /// Checks lengths, strictly increasing ω and the unwrap step bound.
    pub fn from_parts(omega: Vec<T>, magnitude_db: Vec<T>, phase_deg: Vec<T>) -> Result<Self> {
        if omega.len() != magnitude_db.len() || omega.len() != phase_deg.len() {
            return Err(Error::Dimension("response columns differ in length".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "omega must be strictly increasing".into(),
            ));
        }
        let limit = T::lit(180.0);
        for (i, w) in phase_deg.windows(2).enumerate() {
            let step = w[1] - w[0];
            if !(step.abs() < limit) {
                return Err(Error::UnwrapAmbiguity {
                    omega_lo: omega[i].as_f64(),
                    omega_hi: omega[i + 1].as_f64(),
                    step_deg: step.as_f64(),
                });
            }
        }
        Ok(Self {
            omega,
            magnitude_db,
            phase_deg,
        })
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn magnitude_db(&self) -> &[T] {
        &self.magnitude_db
    }

    pub fn phase_deg(&self) -> &[T] {
        &self.phase_deg
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// CSV with header `omega_rad_s,magnitude_db,phase_deg` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega_rad_s,magnitude_db,phase_deg")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e}",
                self.omega[i].as_f64(),
                self.magnitude_db[i].as_f64(),
                self.phase_deg[i].as_f64()
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

/// Wraps an angle in degrees into (-180, 180].
pub(crate) fn wrap_deg<T: Scalar>(mut d: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    d %= full;
    if d > half {
        d -= full;
    } else if d <= -half {
        d += full;
    }
    d
}

/// Evaluates `system` on the grid; phase starts at the principal value at
/// `omega_min` and is tracked continuously from there.
pub fn sample_response<T: Scalar, F: FrequencyResponse<T> + ?Sized>(
    system: &F,
    grid: &FrequencyGrid<T>,
) -> Result<ResponseSet<T>> {
    let omega = grid.omegas();
    let mut magnitude_db = Vec::with_capacity(omega.len());
    let mut phase_deg = Vec::with_capacity(omega.len());
    let twenty = T::lit(20.0);
    let limit = T::lit(MAX_PHASE_STEP_DEG);
    let mut prev_raw = T::zero();
    for (i, &w) in omega.iter().enumerate() {
        let v = system.at(w)?;
        magnitude_db.push(twenty * v.norm().log10());
        let raw = v.arg().to_degrees_();
        if i == 0 {
            phase_deg.push(raw);
        } else {
            let step = wrap_deg(raw - prev_raw);
            if step.abs() > limit {
                return Err(Error::UnwrapAmbiguity {
                    omega_lo: omega[i - 1].as_f64(),
                    omega_hi: w.as_f64(),
                    step_deg: step.as_f64(),
                });
            }
            let last = phase_deg[i - 1];
            phase_deg.push(last + step);
        }
        prev_raw = raw;
    }
    Ok(ResponseSet {
        omega,
        magnitude_db,
        phase_deg,
    })
}
