use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lti::matrix::Matrix;
use crate::Scalar;

/// Single-input single-output model `ż = A z + B u`, `x = F z`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel<T: Scalar> {
    a: Matrix<T>,
    b: Vec<T>,
    f: Vec<T>,
}

impl<T: Scalar> StateSpaceModel<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>, f: Vec<T>) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if n == 0 {
            return Err(Error::Dimension("empty state".into()));
        }
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "B has {} rows, A is {n}x{n}",
                b.len()
            )));
        }
        if f.len() != n {
            return Err(Error::Dimension(format!(
                "F has {} columns, A is {n}x{n}",
                f.len()
            )));
        }
        Ok(Self { a, b, f })
    }

    pub fn from_rows(a: &[Vec<T>], b: Vec<T>, f: Vec<T>) -> Result<Self> {
        Self::new(Matrix::from_rows(a)?, b, f)
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn f(&self) -> &[T] {
        &self.f
    }

    pub fn output(&self, z: &[T]) -> T {
        self.f.iter().zip(z).map(|(&c, &v)| c * v).sum()
    }

    /// `dz = A z + B u`, written into `dz`.
    pub fn derivative(&self, z: &[T], u: T, dz: &mut [T]) {
        self.a.mul_vec_into(z, dz);
        for (d, &b) in dz.iter_mut().zip(&self.b) {
            *d += b * u;
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct StateSpaceDoc<T: Scalar> {
    #[serde(rename = "A")]
    a: Vec<Vec<T>>,
    #[serde(rename = "B")]
    b: Vec<T>,
    #[serde(rename = "F")]
    f: Vec<T>,
}

impl<T: Scalar> Serialize for StateSpaceModel<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateSpaceDoc {
            a: self.a.to_rows(),
            b: self.b.clone(),
            f: self.f.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for StateSpaceModel<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = StateSpaceDoc::<T>::deserialize(deserializer)?;
        Self::from_rows(&doc.a, doc.b, doc.f).map_err(serde::de::Error::custom)
    }
}
