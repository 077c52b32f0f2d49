//! Scalars: exact complex rationals and their double-precision mirror.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic mode of a scalar or series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Exact complex rational `re + i·im`.
///
/// Both parts are `BigRational`, which keeps numerator and denominator
/// coprime with a positive denominator after every operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Cq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Cq { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Cq {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Cq::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Cq::real(BigRational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Cq::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Cq {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Cq {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = <Cq as One>::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

/// Nearest-double conversion (saturating to ±inf on overflow).
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl Zero for Cq {
    fn zero() -> Self {
        Cq::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Cq {
    fn one() -> Self {
        Cq::real(BigRational::one())
    }
}

impl From<BigRational> for Cq {
    fn from(q: BigRational) -> Self {
        Cq::real(q)
    }
}

impl From<i64> for Cq {
    fn from(n: i64) -> Self {
        Cq::from_int(n)
    }
}

impl<'a> Add<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn add(self, rhs: &'a Cq) -> Cq {
        Cq {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn sub(self, rhs: &'a Cq) -> Cq {
        Cq {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a Cq> for &'a Cq {
    type Output = Cq;
    fn mul(self, rhs: &'a Cq) -> Cq {
        // real inputs dominate; skip the three wasted products
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => Cq::real(&self.re * &rhs.re),
            (true, false) => Cq {
                re: &self.re * &rhs.re,
                im: &self.re * &rhs.im,
            },
            (false, true) => Cq {
                re: &self.re * &rhs.re,
                im: &self.im * &rhs.re,
            },
            (false, false) => Cq {
                re: &self.re * &rhs.re - &self.im * &rhs.im,
                im: &self.re * &rhs.im + &self.im * &rhs.re,
            },
        }
    }
}

impl<'a> Div<&'a Cq> for &'a Cq {
    type Output = Cq;
    /// Panics on division by zero, like `BigRational`.
    fn div(self, rhs: &'a Cq) -> Cq {
        if rhs.im.is_zero() {
            return Cq {
                re: &self.re / &rhs.re,
                im: &self.im / &rhs.re,
            };
        }
        let den = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Cq {
            re: num.re / &den,
            im: num.im / den,
        }
    }
}

impl Neg for &Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Cq> for Cq {
            type Output = Cq;
            fn $m(self, rhs: Cq) -> Cq {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Cq> for Cq {
            type Output = Cq;
            fn $m(self, rhs: &'a Cq) -> Cq {
                (&self).$m(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq {
            re: -self.re,
            im: -self.im,
        }
    }
}

/// Writes a real value as `p/q` (or `p` for integers), a complex one as
/// `re+imi` / `re-imi`.
impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Coefficient field for the generic series kernels.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_integer(n: &BigInt) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn div_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn is_one_value(&self) -> bool;
    fn mode() -> Mode;
}

impl Field for Cq {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_integer(n: &BigInt) -> Self {
        Cq::from_bigint(n.clone())
    }
    fn from_rational(q: &BigRational) -> Self {
        Cq::real(q.clone())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one_value(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }
    fn mode() -> Mode {
        Mode::Exact
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_integer(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(ratio_to_f64(q), 0.0)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn is_zero_value(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_one_value(&self) -> bool {
        self.re == 1.0 && self.im == 0.0
    }
    fn mode() -> Mode {
        Mode::Float
    }
}

/// A mode-tagged scalar. Arithmetic across modes is an error.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Cq),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => q.to_complex64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Cq> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => Zero::is_zero(q),
            Scalar::Float(z) => Field::is_zero_value(z),
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(&Cq, &Cq) -> Cq,
        float: impl FnOnce(Complex64, Complex64) -> Complex64,
    ) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            _ => Err(Error::ModeMismatch {
                left: self.mode(),
                right: rhs.mode(),
            }),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.binary(rhs, |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Parses `p`, `p/q` or a decimal literal like `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rationals_are_normalized() {
        let x = q(6, -4);
        assert_eq!(*x.numer(), BigInt::from(-3));
        assert_eq!(*x.denom(), BigInt::from(2));
    }

    #[test]
    fn complex_arithmetic() {
        let a = Cq::new(q(1, 2), q(1, 1));
        let b = Cq::new(q(-1, 3), q(2, 1));
        let p = &a * &b;
        assert_eq!(p, Cq::new(q(-1, 6) - q(2, 1), q(1, 1) - q(1, 3)));
        assert_eq!(&(&p / &b), &a);
        assert_eq!(&Cq::i() * &Cq::i(), Cq::from_int(-1));
    }

    #[test]
    fn mixed_modes_rejected() {
        let a = Scalar::Exact(Cq::from_int(1));
        let b = Scalar::Float(Complex64::new(1.0, 0.0));
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::ModeMismatch {
                left: Mode::Exact,
                right: Mode::Float
            })
        ));
        assert!(a.checked_mul(&a).is_ok());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Cq::from_int(21).to_string(), "21");
        assert_eq!(Cq::ratio(-6, 5).to_string(), "-6/5");
        assert_eq!(Cq::new(q(1, 2), q(-3, 1)).to_string(), "1/2-3i");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
