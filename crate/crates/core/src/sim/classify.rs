use serde::{Deserialize, Serialize};

use super::SimTrace;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Settled,
    Oscillating,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TraceVerdict<T: Scalar> {
    pub verdict: Verdict,
    /// First time after which `|x - reference|` stays within the band; `None` unless settled.
    pub settling_time: Option<T>,
    /// `(max x - reference) / |reference|`, 0 when the reference is 0.
    pub overshoot_fraction: T,
    /// Largest `|u|` seen.
    pub peak_u: T,
}

fn envelope<T: Scalar>(v: &[T], center: T) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max((x - center).abs()))
}

/// Classifies the load position against a constant `reference`.
///
/// The band is `settle_band * |reference|`, or `settle_band` itself when the
/// reference is 0. Diverged: simulation overflowed, or the deviation envelope
/// over the last fifth is at least twice that over the first fifth and
/// outside the band. Settled: the final tenth stays within the band.
pub fn classify_trace<T: Scalar>(
    tr: &SimTrace<T>,
    reference: T,
    settle_band: T,
) -> TraceVerdict<T> {
    let peak_u = tr.u.iter().fold(T::zero(), |m, &u| m.max(u.abs()));
    let overshoot_fraction = if reference.is_zero() {
        T::zero()
    } else {
        let peak =
            tr.x.iter()
                .fold(T::neg_infinity(), |m, &x| m.max(x * reference.signum()));
        ((peak - reference.abs()) / reference.abs()).max(T::zero())
    };
    let band = if reference.is_zero() {
        settle_band
    } else {
        settle_band * reference.abs()
    };
    let out = |verdict, settling_time| TraceVerdict {
        verdict,
        settling_time,
        overshoot_fraction,
        peak_u,
    };

    let n = tr.x.len();
    if tr.diverged {
        return out(Verdict::Diverged, None);
    }
    if n == 0 {
        return out(Verdict::Oscillating, None);
    }
    let fifth = (n / 5).max(1);
    let early = envelope(&tr.x[..fifth], reference);
    let late = envelope(&tr.x[n - fifth..], reference);
    if late > band && late >= T::lit(2.0) * early {
        return out(Verdict::Diverged, None);
    }
    let tenth = (n / 10).max(1);
    if envelope(&tr.x[n - tenth..], reference) > band {
        return out(Verdict::Oscillating, None);
    }
    let first_inside =
        tr.x.iter()
            .rposition(|&x| (x - reference).abs() > band)
            .map_or(0, |i| i + 1);
    out(Verdict::Settled, Some(tr.t[first_inside]))
}
