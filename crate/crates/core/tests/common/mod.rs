//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rshaper_core::{StateSpaceModel, StateSpaceModelF64};

pub fn to_dmatrix(m: &StateSpaceModelF64) -> DMatrix<f64> {
    let n = m.order();
    DMatrix::from_fn(n, n, |i, j| m.a()[(i, j)])
}

/// `F (jωI - A)^{-1} B` by a dense complex LU solve.
pub fn resolvent(m: &StateSpaceModelF64, omega: f64) -> Complex<f64> {
    let n = m.order();
    let a = to_dmatrix(m).map(|v| Complex::new(v, 0.0));
    let lhs = DMatrix::<Complex<f64>>::identity(n, n) * Complex::new(0.0, omega) - a;
    let b = DVector::from_iterator(n, m.b().iter().map(|&v| Complex::new(v, 0.0)));
    let x = lhs.lu().solve(&b).expect("jω is not an eigenvalue");
    m.f().iter().zip(x.iter()).map(|(&f, &xi)| xi * f).sum()
}

pub fn eigenvalues(m: &StateSpaceModelF64) -> Vec<Complex<f64>> {
    to_dmatrix(m)
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Least-squares fit of `a sin ωt + b cos ωt + c + d t`; returns the
/// sinusoid amplitude.
pub fn fitted_amplitude(t: &[f64], x: &[f64], omega: f64) -> f64 {
    let basis = |t: f64| [(omega * t).sin(), (omega * t).cos(), 1.0, t];
    let rows = DMatrix::from_fn(t.len(), 4, |i, j| basis(t[i])[j]);
    let rhs = DVector::from_column_slice(x);
    let coef = rows
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .expect("well-posed fit");
    coef[0].hypot(coef[1])
}

/// `K - (MᵀM + εI)` with `K` skew: its symmetric part is negative definite.
pub fn stable_system(n: usize, entries: &[f64]) -> StateSpaceModelF64 {
    let m = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    let k = DMatrix::from_fn(n, n, |i, j| entries[n * n + i * n + j]);
    let skew = &k - k.transpose();
    let a = skew - m.transpose() * &m - DMatrix::identity(n, n) * 0.5;
    let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).iter().copied().collect()).collect();
    let b = entries[2 * n * n..2 * n * n + n].to_vec();
    let f = entries[2 * n * n + n..2 * n * n + 2 * n].to_vec();
    StateSpaceModel::from_rows(&rows, b, f).expect("consistent dimensions")
}

pub fn stable_system_strategy(n: usize) -> impl Strategy<Value = StateSpaceModelF64> {
    prop::collection::vec(-2.0f64..2.0, 2 * n * n + 2 * n)
        .prop_filter("nonzero input and output", move |e| {
            let b = &e[2 * n * n..2 * n * n + n];
            let f = &e[2 * n * n + n..];
            b.iter().any(|v| v.abs() > 0.1) && f.iter().any(|v| v.abs() > 0.1)
        })
        .prop_map(move |e| stable_system(n, &e))
}

pub fn rel_err(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm()
}
