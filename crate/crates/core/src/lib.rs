//! Delay-based resonance compensation for lightly damped oscillatory plants.
//!
//! Every routine is generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the concrete instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod freq;
pub mod lti;
pub mod plants;
mod scalar;
pub mod sim;

pub use design::{
    design_from_transfer, design_kd, design_kd_with_target, design_tau, suppression_ratio,
    tracked_phase, DelayCompensator, DesignReport, PiController, QuasiRationalLoop,
    REFERENCE_DAMPING,
};
pub use error::{Error, Result};
pub use freq::{
    sample_response, stability_margins, FrequencyGrid, FrequencyResponse, MarginReport,
    MarginVerdict, ResponseSet,
};
pub use lti::{Matrix, Polynomial, RationalTransfer, StateSpaceModel, TemplateParams};
pub use plants::{
    gravity_feedforward, nominal_params, paper_verbatim_statespace, two_mass_statespace,
    TwoMassParams,
};
pub use scalar::Scalar;
pub use sim::{
    classify_trace, simulate_closed_loop, simulate_open_loop, ControllerConfig, Scenario,
    SimConfig, SimTrace, TraceVerdict, Verdict,
};

pub type PolynomialF64 = Polynomial<f64>;
pub type MatrixF64 = Matrix<f64>;
pub type StateSpaceModelF64 = StateSpaceModel<f64>;
pub type RationalTransferF64 = RationalTransfer<f64>;
pub type FrequencyGridF64 = FrequencyGrid<f64>;
pub type ResponseSetF64 = ResponseSet<f64>;
pub type MarginReportF64 = MarginReport<f64>;
pub type DelayCompensatorF64 = DelayCompensator<f64>;
pub type PiControllerF64 = PiController<f64>;
pub type TwoMassParamsF64 = TwoMassParams<f64>;
pub type ControllerConfigF64 = ControllerConfig<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type SimConfigF64 = SimConfig<f64>;
pub type SimTraceF64 = SimTrace<f64>;

pub type PolynomialF32 = Polynomial<f32>;
pub type MatrixF32 = Matrix<f32>;
pub type StateSpaceModelF32 = StateSpaceModel<f32>;
pub type RationalTransferF32 = RationalTransfer<f32>;
pub type FrequencyGridF32 = FrequencyGrid<f32>;
pub type ResponseSetF32 = ResponseSet<f32>;
pub type MarginReportF32 = MarginReport<f32>;
pub type DelayCompensatorF32 = DelayCompensator<f32>;
pub type PiControllerF32 = PiController<f32>;
pub type TwoMassParamsF32 = TwoMassParams<f32>;
pub type ControllerConfigF32 = ControllerConfig<f32>;
pub type ScenarioF32 = Scenario<f32>;
pub type SimConfigF32 = SimConfig<f32>;
pub type SimTraceF32 = SimTrace<f32>;
