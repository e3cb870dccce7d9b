//! Rational transfer functions `G(s) = N(s) / D(s)`.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::lti::matrix::Matrix;
use crate::lti::poly::Polynomial;
use crate::lti::statespace::StateSpaceModel;
use crate::Scalar;

/// Relative threshold below which a coefficient produced by the
/// state-space conversion is treated as zero.
pub const DEFAULT_PRUNE_TOLERANCE: f64 = 1e-12;

/// Distance under which a numerator root and a denominator root are
/// reported as a likely cancelation.
pub const CANCELATION_WARN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct RationalTransfer<T: Scalar> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<'de, T: Scalar> Deserialize<'de> for RationalTransfer<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "")]
        struct Doc<T: Scalar> {
            num: Polynomial<T>,
            den: Polynomial<T>,
        }
        let doc = Doc::<T>::deserialize(deserializer)?;
        Self::new(doc.num, doc.den).map_err(serde::de::Error::custom)
    }
}

/// Parameters of the fourth-order oscillatory template
/// `k (s + z1) / [s (s + p1) (s² + 2 ζ ω₀ s + ω₀²)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TemplateParams<T: Scalar> {
    pub k: T,
    pub z1: T,
    pub p1: T,
    pub zeta: T,
    pub omega0: T,
}

impl<T: Scalar> TemplateParams<T> {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("k", self.k),
            ("z1", self.z1),
            ("p1", self.p1),
            ("zeta", self.zeta),
            ("omega0", self.omega0),
        ];
        for (name, v) in named {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.zeta >= T::one() {
            return Err(Error::InvalidParameter(format!(
                "damping ratio must be below 1, got {}",
                self.zeta
            )));
        }
        if self.z1 <= self.omega0 {
            return Err(Error::InvalidParameter(format!(
                "zero z1 = {} must exceed omega0 = {}",
                self.z1, self.omega0
            )));
        }
        Ok(())
    }
}

/// Lightly damped complex pole pair `-ζω₀ ± jω₀√(1-ζ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryMode<T: Scalar> {
    /// Undamped natural frequency `|λ|`.
    pub natural: T,
    /// Damped frequency `|Im λ|`.
    pub damped: T,
    pub zeta: T,
}

impl<T: Scalar> RationalTransfer<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = Self { num, den };
        g.warn_on_cancelation();
        Ok(g)
    }

    pub fn from_coeffs(num: Vec<T>, den: Vec<T>) -> Result<Self> {
        Self::new(Polynomial::new(num), Polynomial::new(den))
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    /// `k (s + z1) / [s (s + p1) (s² + 2 ζ ω₀ s + ω₀²)]` with the denominator expanded.
    pub fn fourth_order_template(params: TemplateParams<T>) -> Result<Self> {
        params.validate()?;
        let TemplateParams {
            k,
            z1,
            p1,
            zeta,
            omega0,
        } = params;
        let two = T::lit(2.0);
        let num = Polynomial::new(vec![k, k * z1]);
        let den = &(&Polynomial::s() * &Polynomial::new(vec![T::one(), p1]))
            * &Polynomial::new(vec![T::one(), two * zeta * omega0, omega0 * omega0]);
        Self::new(num, den)
    }

    /// `F (sI - A)^{-1} B` via the Faddeev–LeVerrier recursion.
    pub fn from_statespace(m: &StateSpaceModel<T>) -> Result<Self> {
        Self::from_statespace_with_tolerance(m, T::lit(DEFAULT_PRUNE_TOLERANCE))
    }

    pub fn from_statespace_with_tolerance(m: &StateSpaceModel<T>, rel_tol: T) -> Result<Self> {
        let n = m.order();
        let a = m.a();
        // adj(sI - A) = Σ_{k=1..n} M_k s^{n-k},  M_1 = I,  M_k = A M_{k-1} + c_{k-1} I
        // det(sI - A) = s^n + c_1 s^{n-1} + … + c_n,  c_k = -tr(A M_k) / k
        let mut den = vec![T::zero(); n + 1];
        den[0] = T::one();
        let mut num = vec![T::zero(); n + 1];
        let mut mk = Matrix::identity(n);
        for k in 1..=n {
            if k > 1 {
                mk = a.matmul(&mk);
                mk.add_diagonal(den[k - 1]);
            }
            let mb = mk.mul_vec(m.b());
            num[k] = m.f().iter().zip(&mb).map(|(&f, &v)| f * v).sum();
            den[k] = -a.matmul(&mk).trace() / T::from_usize_lossy(k);
        }
        let num = Polynomial::new(num).pruned(rel_tol);
        let den = Polynomial::new(den).pruned(rel_tol);
        Self::new(num, den)
    }

    /// `N(s)/D(s)`; fails when `|D(s)|` is negligible relative to the size of its terms.
    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        let d = self.den.eval(s);
        let scale = self
            .den
            .coeffs()
            .iter()
            .fold(T::zero(), |acc, &c| acc * s.norm() + c.abs());
        if d.norm() <= T::epsilon() * T::lit(16.0) * scale {
            return Err(Error::Singular {
                re: s.re.as_f64(),
                im: s.im.as_f64(),
                magnitude: d.norm().as_f64(),
            });
        }
        Ok(self.num.eval(s) / d)
    }

    pub fn eval_jw(&self, omega: T) -> Result<Complex<T>> {
        self.eval(Complex::new(T::zero(), omega))
    }

    pub fn poles(&self) -> Result<Vec<Complex<T>>> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Result<Vec<Complex<T>>> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        self.num.roots()
    }

    /// The complex pole pair with the smallest damping ratio, if any.
    pub fn oscillatory_mode(&self) -> Result<Option<OscillatoryMode<T>>> {
        let poles = self.poles()?;
        let tiny = T::epsilon().sqrt();
        Ok(poles
            .iter()
            .filter(|p| p.im > tiny * p.norm().max(T::one()))
            .map(|p| {
                let natural = p.norm();
                OscillatoryMode {
                    natural,
                    damped: p.im.abs(),
                    zeta: -p.re / natural,
                }
            })
            .min_by(|a, b| {
                a.zeta
                    .partial_cmp(&b.zeta)
                    .unwrap_or(std::cmp::Ordering::Equal)
            }))
    }

    /// Recovers template parameters when the transfer has the
    /// `k (s + z1) / [s (s + p1)(s² + 2ζω₀s + ω₀²)]` structure.
    pub fn template_params(&self) -> Result<Option<TemplateParams<T>>> {
        if self.num.degree() != 1 || self.den.degree() != 4 {
            return Ok(None);
        }
        let lead = self.den.leading();
        let k = self.num.coeffs()[0] / lead;
        let z1 = self.num.coeffs()[1] / self.num.coeffs()[0];
        let poles = self.poles()?;
        let tol = T::lit(1e-9) * poles.iter().fold(T::one(), |m, p| m.max(p.norm()));
        let has_integrator = poles.iter().any(|p| p.norm() <= tol);
        let real_pole = poles
            .iter()
            .filter(|p| p.im.is_zero() && p.norm() > tol)
            .map(|p| -p.re)
            .next();
        let mode = self.oscillatory_mode()?;
        match (has_integrator, real_pole, mode) {
            (true, Some(p1), Some(mode)) => {
                let params = TemplateParams {
                    k,
                    z1,
                    p1,
                    zeta: mode.zeta,
                    omega0: mode.natural,
                };
                Ok(params.validate().ok().map(|_| params))
            }
            _ => Ok(None),
        }
    }

    fn warn_on_cancelation(&self) {
        if self.num.is_zero() || self.num.degree() == 0 || self.den.degree() == 0 {
            return;
        }
        let (Ok(zs), Ok(ps)) = (self.num.roots(), self.den.roots()) else {
            return;
        };
        let limit = T::lit(CANCELATION_WARN_DISTANCE);
        for z in &zs {
            if let Some(p) = ps.iter().find(|p| (*p - z).norm() < limit) {
                log::warn!(
                    "numerator root {} + {}j nearly cancels pole {} + {}j",
                    z.re,
                    z.im,
                    p.re,
                    p.im
                );
            }
        }
    }
}
