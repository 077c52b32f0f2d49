//! Truncated exponential generating functions.
//!
//! A series of order `J` holds `a_0..a_J` and stands for `Σ_{j≤J} a_j z^j/j!`.
//! In this convention the EGF of a moment sequence is the moment generating
//! function, and the product of two series is the binomial convolution
//! `c_j = Σ_k C(j,k) a_k b_{j-k}`.

use num_complex::Complex64;

use crate::combinat::pascal;
use crate::error::{Error, Result};
use crate::scalar::{Cq, Field, Mode, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Egf<T> {
    coeffs: Vec<T>,
}

fn binomial_rows<T: Field>(order: usize) -> Vec<Vec<T>> {
    pascal(order)
        .into_iter()
        .map(|row| row.iter().map(T::from_integer).collect())
        .collect()
}

impl<T: Field> Egf<T> {
    /// Series of order `coeffs.len() - 1`. Empty input is rejected.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "a series needs at least the constant coefficient".into(),
            ));
        }
        Ok(Egf { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Egf {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    /// The constant series `1` (that is, `e^{0·z}`).
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = T::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &T {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Drops coefficients beyond `order`.
    pub fn truncate(&self, order: usize) -> Self {
        Egf {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    fn check_order(&self, rhs: &Self) -> Result<()> {
        if self.order() != rhs.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(Egf {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        Ok(Egf {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Egf {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_order(rhs)?;
        let binom = binomial_rows::<T>(self.order());
        Ok(self.mul_with(rhs, &binom))
    }

    fn mul_with(&self, rhs: &Self, binom: &[Vec<T>]) -> Self {
        let coeffs = (0..=self.order())
            .map(|j| {
                let mut acc = T::zero();
                for k in 0..=j {
                    let (a, b) = (&self.coeffs[k], &rhs.coeffs[j - k]);
                    if a.is_zero_value() || b.is_zero_value() {
                        continue;
                    }
                    acc = acc.add_ref(&binom[j][k].mul_ref(&a.mul_ref(b)));
                }
                acc
            })
            .collect();
        Egf { coeffs }
    }

    /// `n`-fold product; `pow(0)` is the constant series 1.
    pub fn pow(&self, n: usize) -> Self {
        self.powers(n).pop().expect("powers is never empty")
    }

    /// `[a^0, a^1, ..., a^n]`.
    pub fn powers(&self, n: usize) -> Vec<Self> {
        let binom = binomial_rows::<T>(self.order());
        let mut out = Vec::with_capacity(n + 1);
        out.push(Self::one(self.order()));
        for k in 1..=n {
            let next = out[k - 1].mul_with(self, &binom);
            out.push(next);
        }
        out
    }

    /// Logarithm of a series with `a_0 = 1`, solved from
    /// `a_{j+1} = Σ_k C(j,k) L_{k+1} a_{j-k}`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one_value() {
            return Err(Error::Domain("log needs a_0 = 1".into()));
        }
        let order = self.order();
        let binom = binomial_rows::<T>(order);
        let mut log = vec![T::zero(); order + 1];
        for j in 0..order {
            let mut rest = T::zero();
            for k in 0..j {
                rest = rest.add_ref(&binom[j][k].mul_ref(&log[k + 1].mul_ref(&self.coeffs[j - k])));
            }
            log[j + 1] = self.coeffs[j + 1].sub_ref(&rest);
        }
        Ok(Egf { coeffs: log })
    }

    /// Exponential of a series with `a_0 = 0`, via
    /// `E_{j+1} = Σ_k C(j,k) a_{k+1} E_{j-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero_value() {
            return Err(Error::Domain("exp needs a_0 = 0".into()));
        }
        let order = self.order();
        let binom = binomial_rows::<T>(order);
        let mut out = vec![T::zero(); order + 1];
        out[0] = T::one();
        for j in 0..order {
            let mut acc = T::zero();
            for k in 0..=j {
                acc = acc.add_ref(&binom[j][k].mul_ref(&self.coeffs[k + 1].mul_ref(&out[j - k])));
            }
            out[j + 1] = acc;
        }
        Ok(Egf { coeffs: out })
    }
}

impl Egf<Cq> {
    pub fn to_float(&self) -> Egf<Complex64> {
        Egf {
            coeffs: self.coeffs.iter().map(Cq::to_complex64).collect(),
        }
    }
}

/// A series in either scalar mode; the runtime-checked face of [`Egf`].
#[derive(Clone, Debug, PartialEq)]
pub enum EgfSeries {
    Exact(Egf<Cq>),
    Float(Egf<Complex64>),
}

impl EgfSeries {
    /// Builds a series from tagged scalars, all of which must share one mode.
    pub fn from_scalars(coeffs: Vec<Scalar>) -> Result<Self> {
        let mode = coeffs
            .first()
            .map(Scalar::mode)
            .ok_or_else(|| Error::InvalidParameter("empty series".into()))?;
        if let Some(bad) = coeffs.iter().find(|c| c.mode() != mode) {
            return Err(Error::ModeMismatch {
                left: mode,
                right: bad.mode(),
            });
        }
        match mode {
            Mode::Exact => Egf::new(
                coeffs
                    .into_iter()
                    .filter_map(|c| c.as_exact().cloned())
                    .collect(),
            )
            .map(EgfSeries::Exact),
            Mode::Float => Egf::new(coeffs.iter().map(Scalar::to_complex64).collect())
                .map(EgfSeries::Float),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            EgfSeries::Exact(_) => Mode::Exact,
            EgfSeries::Float(_) => Mode::Float,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            EgfSeries::Exact(s) => s.order(),
            EgfSeries::Float(s) => s.order(),
        }
    }

    pub fn coeff(&self, j: usize) -> Scalar {
        match self {
            EgfSeries::Exact(s) => Scalar::Exact(s.coeff(j).clone()),
            EgfSeries::Float(s) => Scalar::Float(*s.coeff(j)),
        }
    }

    pub fn to_float(&self) -> EgfSeries {
        match self {
            EgfSeries::Exact(s) => EgfSeries::Float(s.to_float()),
            EgfSeries::Float(_) => self.clone(),
        }
    }
}

pub fn egf_mul(a: &EgfSeries, b: &EgfSeries) -> Result<EgfSeries> {
    match (a, b) {
        (EgfSeries::Exact(x), EgfSeries::Exact(y)) => x.mul(y).map(EgfSeries::Exact),
        (EgfSeries::Float(x), EgfSeries::Float(y)) => x.mul(y).map(EgfSeries::Float),
        _ => Err(Error::ModeMismatch {
            left: a.mode(),
            right: b.mode(),
        }),
    }
}

pub fn egf_pow(a: &EgfSeries, n: usize) -> EgfSeries {
    match a {
        EgfSeries::Exact(x) => EgfSeries::Exact(x.pow(n)),
        EgfSeries::Float(x) => EgfSeries::Float(x.pow(n)),
    }
}

pub fn egf_log(a: &EgfSeries) -> Result<EgfSeries> {
    match a {
        EgfSeries::Exact(x) => x.log().map(EgfSeries::Exact),
        EgfSeries::Float(x) => x.log().map(EgfSeries::Float),
    }
}

pub fn egf_exp(a: &EgfSeries) -> Result<EgfSeries> {
    match a {
        EgfSeries::Exact(x) => x.exp().map(EgfSeries::Exact),
        EgfSeries::Float(x) => x.exp().map(EgfSeries::Float),
    }
}
