//! Real-coefficient polynomials in descending powers of `s`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lti::roots;
use crate::Scalar;

/// `c[0]·s^n + c[1]·s^(n-1) + … + c[n]`.
///
/// Leading zeros are stripped on construction, so the degree is always
/// `coefficients.len() - 1` and the leading coefficient is nonzero unless
/// the polynomial is identically zero (stored as `[0]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", from = "Vec<T>", into = "Vec<T>")]
pub struct Polynomial<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> From<Vec<T>> for Polynomial<T> {
    fn from(v: Vec<T>) -> Self {
        Self::new(v)
    }
}

impl<T: Scalar> From<Polynomial<T>> for Vec<T> {
    fn from(p: Polynomial<T>) -> Self {
        p.coeffs
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: impl Into<Vec<T>>) -> Self {
        let mut coeffs = coeffs.into();
        let first = coeffs.iter().position(|c| !c.is_zero());
        match first {
            Some(i) => {
                coeffs.drain(..i);
            }
            None => coeffs = vec![T::zero()],
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![T::zero()],
        }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Self::new(vec![T::one(), T::zero()])
    }

    /// Real polynomial `∏ (s - rᵢ)`. Imaginary parts of the expanded
    /// coefficients are dropped, so `roots` should be closed under conjugation.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut acc = vec![Complex::new(T::one(), T::zero())];
        for &r in roots {
            let mut next = vec![Complex::new(T::zero(), T::zero()); acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect::<Vec<_>>())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> T {
        self.coeffs[0]
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * s + c)
    }

    pub fn eval_real(&self, x: T) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect::<Vec<_>>())
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Drops leading coefficients with `|c| <= rel_tol · max|c|` and snaps
    /// the remaining ones under that threshold to exactly zero.
    pub fn pruned(&self, rel_tol: T) -> Self {
        let threshold = rel_tol * self.max_abs_coeff();
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= threshold { T::zero() } else { c })
                .collect::<Vec<_>>(),
        )
    }

    /// All complex roots with multiplicity, sorted by real then imaginary part.
    pub fn roots(&self) -> Result<Vec<Complex<T>>> {
        roots::polynomial_roots(self)
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> Mul for Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![T::zero(); n];
        for (dst, &c) in out[n - self.coeffs.len()..].iter_mut().zip(&self.coeffs) {
            *dst += c;
        }
        for (dst, &c) in out[n - rhs.coeffs.len()..].iter_mut().zip(&rhs.coeffs) {
            *dst += c;
        }
        Polynomial::new(out)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        self + &(-rhs)
    }
}
