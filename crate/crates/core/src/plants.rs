//! The two-mass oscillator: a voice-coil actuator mass coupled through a
//! lightly damped spring to a hanging load whose position is measured.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::StateSpaceModel;
use crate::Scalar;

/// Physical parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TwoMassParams<T: Scalar> {
    /// Actuator mass, kg.
    pub m1: T,
    /// Load mass, kg.
    pub m2: T,
    /// Spring constant, N/m.
    pub k_spring: T,
    /// Actuator damping, kg/s.
    pub sigma: T,
    /// Spring damping, kg/s.
    pub delta: T,
    /// Coil resistance, V/A.
    pub r_coil: T,
    /// EMF constant, Vs/m.
    pub psi: T,
    /// Gravity, m/s².
    pub g: T,
}

impl<T: Scalar> TwoMassParams<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("m1", self.m1),
            ("m2", self.m2),
            ("k_spring", self.k_spring),
            ("sigma", self.sigma),
            ("delta", self.delta),
            ("r_coil", self.r_coil),
            ("psi", self.psi),
            ("g", self.g),
        ];
        for (name, v) in fields {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Nominal laboratory values.
pub fn nominal_params<T: Scalar>() -> TwoMassParams<T> {
    TwoMassParams {
        m1: T::lit(0.6),
        m2: T::lit(0.75),
        k_spring: T::lit(200.0),
        sigma: T::lit(200.0),
        delta: T::lit(0.01),
        r_coil: T::lit(5.23),
        psi: T::lit(17.16),
        g: T::lit(9.81),
    }
}

/// State `z = (ẏ, y, ẋ, x)`, input coil voltage, output load position `x`.
pub fn two_mass_statespace<T: Scalar>(p: &TwoMassParams<T>) -> Result<StateSpaceModel<T>> {
    p.validate()?;
    let (m1, m2, k, sigma, delta) = (p.m1, p.m2, p.k_spring, p.sigma, p.delta);
    let (o, l) = (T::zero(), T::one());
    let a = vec![
        vec![-(sigma + delta) / m1, -k / m1, delta / m1, k / m1],
        vec![l, o, o, o],
        vec![delta / m2, k / m2, -delta / m2, -k / m2],
        vec![o, o, l, o],
    ];
    let b = vec![p.psi / (p.r_coil * m1), o, o, o];
    StateSpaceModel::from_rows(&a, b, vec![o, o, o, l])
}

/// The identified rig model with its rounded entries. Its coupling terms
/// imply `delta ≈ 0.02`, so it differs slightly from the nominal constructor.
pub fn paper_verbatim_statespace<T: Scalar>() -> StateSpaceModel<T> {
    let c = T::lit;
    let a = vec![
        vec![c(-333.4), c(-333.3), c(0.033), c(333.3)],
        vec![c(1.0), c(0.0), c(0.0), c(0.0)],
        vec![c(0.027), c(266.7), c(-0.027), c(-266.7)],
        vec![c(0.0), c(0.0), c(1.0), c(0.0)],
    ];
    let b = vec![c(5.47), c(0.0), c(0.0), c(0.0)];
    let f = vec![c(0.0), c(0.0), c(0.0), c(1.0)];
    StateSpaceModel::from_rows(&a, b, f).expect("verbatim model is 4x4")
}

/// Constant voltage cancelling the weight of both masses: `R g (m1 + m2) / Ψ`.
pub fn gravity_feedforward<T: Scalar>(p: &TwoMassParams<T>) -> T {
    p.r_coil * p.g / p.psi * (p.m1 + p.m2)
}
