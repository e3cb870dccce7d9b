use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ResponseSet;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginVerdict {
    MarginsPositive,
    MarginsViolated,
    NoCrossover,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCrossover<T: Scalar> {
    pub omega: T,
    pub magnitude_db: T,
    /// The odd multiple of 180° that was crossed.
    pub level_deg: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MarginReport<T: Scalar> {
    /// `+inf` when the phase never reaches an odd multiple of 180°.
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub gain_margin_db: T,
    /// Measured at the first downward 0 dB crossing; absent without one.
    pub phase_margin_deg: Option<T>,
    pub gain_crossover: Option<T>,
    pub phase_crossovers: Vec<T>,
    pub stable_verdict: MarginVerdict,
}

impl<T: Scalar> MarginReport<T> {
    pub fn gain_margin_is_infinite(&self) -> bool {
        self.gain_margin_db.is_infinite() && self.gain_margin_db > T::zero()
    }
}

fn ser_extended<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > T::zero() { "inf" } else { "-inf" })
    } else {
        v.serialize(s)
    }
}

fn de_extended<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged, bound = "")]
    enum Repr<T: Scalar> {
        Num(T),
        Text(String),
    }
    match Repr::<T>::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) => match t.as_str() {
            "inf" | "+inf" => Ok(T::infinity()),
            "-inf" => Ok(T::neg_infinity()),
            other => Err(serde::de::Error::custom(format!(
                "expected number or inf, got {other}"
            ))),
        },
    }
}

/// Linear interpolation fraction of `target` between `a` and `b`.
fn frac<T: Scalar>(a: T, b: T, target: T) -> T {
    (target - a) / (b - a)
}

/// Every crossing of an odd multiple of 180°, in frequency order.
pub(crate) fn phase_crossings<T: Scalar>(r: &ResponseSet<T>) -> Vec<PhaseCrossover<T>> {
    let (w, mag, ph) = (r.omega(), r.magnitude_db(), r.phase_deg());
    let half = T::lit(180.0);
    let full = T::lit(360.0);
    let mut out = Vec::new();
    for i in 0..r.len().saturating_sub(1) {
        let (p0, p1) = (ph[i], ph[i + 1]);
        let (lo, hi) = if p0 <= p1 { (p0, p1) } else { (p1, p0) };
        // odd multiples of 180 in (lo, hi], or [lo, hi) when descending
        let mut k = ((lo - half) / full).floor();
        loop {
            let level = half + k * full;
            if level > hi {
                break;
            }
            let hit = if p0 <= p1 {
                level > p0 && level <= p1
            } else {
                level < p0 && level >= p1
            };
            if hit && p0 != p1 {
                let f = frac(p0, p1, level);
                let lw = w[i].ln() + (w[i + 1].ln() - w[i].ln()) * f;
                out.push(PhaseCrossover {
                    omega: lw.exp(),
                    magnitude_db: mag[i] + (mag[i + 1] - mag[i]) * f,
                    level_deg: level,
                });
            }
            k += T::one();
        }
    }
    out
}

/// First downward 0 dB crossing: (ω, phase there).
fn first_gain_crossing<T: Scalar>(r: &ResponseSet<T>) -> Option<(T, T)> {
    let (w, mag, ph) = (r.omega(), r.magnitude_db(), r.phase_deg());
    (0..r.len().saturating_sub(1))
        .find(|&i| mag[i] >= T::zero() && mag[i + 1] < T::zero())
        .map(|i| {
            let f = frac(mag[i], mag[i + 1], T::zero());
            let lw = w[i].ln() + (w[i + 1].ln() - w[i].ln()) * f;
            (lw.exp(), ph[i] + (ph[i + 1] - ph[i]) * f)
        })
}

/// Gain and phase margins of a loop response, interpolating linearly in
/// `(log ω, dB)` and `(log ω, deg)`.
pub fn stability_margins<T: Scalar>(r: &ResponseSet<T>) -> MarginReport<T> {
    let crossings = phase_crossings(r);
    let gain_margin_db = crossings.first().map_or(T::infinity(), |c| -c.magnitude_db);
    let gc = first_gain_crossing(r);
    let phase_margin_deg = gc.map(|(_, p)| T::lit(180.0) + p);
    let stable_verdict = match phase_margin_deg {
        None if gain_margin_db <= T::zero() => MarginVerdict::MarginsViolated,
        None => MarginVerdict::NoCrossover,
        Some(pm) if pm > T::zero() && gain_margin_db > T::zero() => MarginVerdict::MarginsPositive,
        Some(_) => MarginVerdict::MarginsViolated,
    };
    MarginReport {
        gain_margin_db,
        phase_margin_deg,
        gain_crossover: gc.map(|(w, _)| w),
        phase_crossovers: crossings.iter().map(|c| c.omega).collect(),
        stable_verdict,
    }
}

/// Highest interior strict local maximum of the magnitude: `(ω, dB)`.
pub fn resonance_peak<T: Scalar>(r: &ResponseSet<T>) -> Option<(T, T)> {
    let mag = r.magnitude_db();
    (1..r.len().saturating_sub(1))
        .filter(|&i| mag[i] > mag[i - 1] && mag[i] > mag[i + 1])
        .max_by(|&a, &b| {
            mag[a]
                .partial_cmp(&mag[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|i| (r.omega()[i], mag[i]))
}
