//! Polynomial and single-input single-output LTI algebra.

pub mod matrix;
pub mod poly;
pub mod roots;
pub mod statespace;
pub mod transfer;

pub use matrix::Matrix;
pub use poly::Polynomial;
pub use statespace::StateSpaceModel;
pub use transfer::{OscillatoryMode, RationalTransfer, TemplateParams};
