//! Distributions as truncated moment sequences, the x²-biased (tilde) and
//! `Y + iZ` (hat) transforms, vanishing orders, and seeded samplers.
//!
//! A distribution enters every computation only through `μ_k = E Y^k`,
//! `k = 0..=J`. Finiteness of the moment generating function is assumed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinat::{factorial, normal_moment, pascal, stirling2_triangle};
use crate::error::{Error, Result};
use crate::scalar::{ratio_to_f64, Cq};
use crate::series::Egf;

/// `μ_0..μ_J` with `μ_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeq {
    mu: Vec<Cq>,
}

impl MomentSeq {
    pub fn new(mu: Vec<Cq>) -> Result<Self> {
        match mu.first() {
            None => Err(Error::InvalidParameter("empty moment sequence".into())),
            Some(m0) if *m0 != Cq::from_int(1) => Err(Error::InvalidParameter(format!(
                "moment sequences start with mu_0 = 1, got {m0}"
            ))),
            Some(_) => Ok(MomentSeq { mu }),
        }
    }

    pub fn from_rationals(mu: Vec<BigRational>) -> Result<Self> {
        Self::new(mu.into_iter().map(Cq::real).collect())
    }

    pub fn from_ints(mu: &[i64]) -> Result<Self> {
        Self::new(mu.iter().map(|&x| Cq::from_int(x)).collect())
    }

    /// Point mass at zero: `[1, 0, ..., 0]`.
    pub fn zero_point(order: usize) -> Self {
        let mut mu = vec![Cq::from_int(0); order + 1];
        mu[0] = Cq::from_int(1);
        MomentSeq { mu }
    }

    pub fn order(&self) -> usize {
        self.mu.len() - 1
    }

    pub fn get(&self, k: usize) -> &Cq {
        &self.mu[k]
    }

    pub fn as_slice(&self) -> &[Cq] {
        &self.mu
    }

    pub fn is_real(&self) -> bool {
        self.mu.iter().all(Cq::is_real)
    }

    pub fn truncate(&self, order: usize) -> Self {
        MomentSeq {
            mu: self.mu[..=order.min(self.order())].to_vec(),
        }
    }

    /// The moment generating function as an EGF.
    pub fn to_egf(&self) -> Egf<Cq> {
        Egf::new(self.mu.clone()).expect("moment sequences are non-empty")
    }

    /// Real parts, failing on any non-zero imaginary part.
    pub fn real_moments(&self) -> Result<Vec<BigRational>> {
        if !self.is_real() {
            return Err(Error::Domain("real moment sequence required".into()));
        }
        Ok(self.mu.iter().map(|q| q.re.clone()).collect())
    }

    pub(crate) fn require_order(&self, needed: usize) -> Result<()> {
        if self.order() < needed {
            return Err(Error::Precondition(format!(
                "moment order {} needed, sequence has {}",
                needed,
                self.order()
            )));
        }
        Ok(())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Catalog of distributions with exact rational moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum DistSpec {
    PointMass {
        #[serde(with = "crate::json::rational")]
        c: BigRational,
    },
    Rademacher,
    Bernoulli {
        #[serde(with = "crate::json::rational")]
        p: BigRational,
    },
    /// Uniform on `[-√3, √3]` (mean 0, variance 1).
    UniformStd,
    Poisson {
        #[serde(with = "crate::json::rational")]
        lambda: BigRational,
    },
    /// Rate-1 exponential.
    Exponential,
    /// Gamma with rate 1.
    Gamma {
        #[serde(with = "crate::json::rational")]
        shape: BigRational,
    },
    Normal {
        #[serde(with = "crate::json::rational")]
        variance: BigRational,
    },
    Custom {
        #[serde(with = "crate::json::scalar_list")]
        moments: Vec<Cq>,
    },
}

impl DistSpec {
    pub fn point_mass(c: BigRational) -> Self {
        DistSpec::PointMass { c }
    }
    pub fn bernoulli(p: BigRational) -> Self {
        DistSpec::Bernoulli { p }
    }
    pub fn poisson(lambda: BigRational) -> Self {
        DistSpec::Poisson { lambda }
    }
    pub fn gamma(shape: BigRational) -> Self {
        DistSpec::Gamma { shape }
    }
    pub fn normal(variance: BigRational) -> Self {
        DistSpec::Normal { variance }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistSpec::PointMass { .. } => "point_mass",
            DistSpec::Rademacher => "rademacher",
            DistSpec::Bernoulli { .. } => "bernoulli",
            DistSpec::UniformStd => "uniform_std",
            DistSpec::Poisson { .. } => "poisson",
            DistSpec::Exponential => "exponential",
            DistSpec::Gamma { .. } => "gamma",
            DistSpec::Normal { .. } => "normal",
            DistSpec::Custom { .. } => "custom",
        }
    }

    /// Supported on a lattice (no integrable characteristic function).
    pub fn is_lattice(&self) -> bool {
        matches!(
            self,
            DistSpec::PointMass { .. }
                | DistSpec::Rademacher
                | DistSpec::Bernoulli { .. }
                | DistSpec::Poisson { .. }
        )
    }

    pub fn is_real(&self) -> bool {
        match self {
            DistSpec::Custom { moments } => moments.iter().all(Cq::is_real),
            _ => true,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            DistSpec::PointMass { c } => !c.is_negative(),
            DistSpec::Bernoulli { .. }
            | DistSpec::Poisson { .. }
            | DistSpec::Exponential
            | DistSpec::Gamma { .. } => true,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            DistSpec::Bernoulli { p } if p.is_negative() || *p > BigRational::one() => {
                bad(format!("bernoulli p = {p} outside [0, 1]"))
            }
            DistSpec::Poisson { lambda } if !lambda.is_positive() => {
                bad(format!("poisson lambda = {lambda} must be > 0"))
            }
            DistSpec::Gamma { shape } if !shape.is_positive() => {
                bad(format!("gamma shape = {shape} must be > 0"))
            }
            DistSpec::Normal { variance } if variance.is_negative() => {
                bad(format!("normal variance = {variance} must be >= 0"))
            }
            DistSpec::Custom { moments } => MomentSeq::new(moments.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn moments(&self, order: usize) -> Result<MomentSeq> {
        moments_of(self, order)
    }
}

/// Exact moments `μ_0..μ_J` of a catalog distribution.
pub fn moments_of(spec: &DistSpec, order: usize) -> Result<MomentSeq> {
    spec.validate()?;
    let ks = 0..=order;
    let mu: Vec<BigRational> = match spec {
        DistSpec::PointMass { c } => ks.map(|k| num_traits::pow(c.clone(), k)).collect(),
        DistSpec::Rademacher => ks.map(|k| int(if k % 2 == 0 { 1 } else { 0 })).collect(),
        DistSpec::Bernoulli { p } => ks
            .map(|k| if k == 0 { BigRational::one() } else { p.clone() })
            .collect(),
        DistSpec::UniformStd => ks
            .map(|k| {
                if k % 2 == 1 {
                    BigRational::zero()
                } else {
                    int(num_traits::pow(BigInt::from(3), k / 2)) / int(k as u64 + 1)
                }
            })
            .collect(),
        DistSpec::Poisson { lambda } => {
            // Touchard polynomials Σ_m S(k,m) λ^m
            let s2 = stirling2_triangle(order);
            ks.map(|k| {
                (0..=k)
                    .map(|m| int(s2[k][m].clone()) * num_traits::pow(lambda.clone(), m))
                    .sum()
            })
            .collect()
        }
        DistSpec::Exponential => ks.map(|k| int(factorial(k))).collect(),
        DistSpec::Gamma { shape } => {
            let mut acc = BigRational::one();
            let mut out = Vec::with_capacity(order + 1);
            for k in ks {
                out.push(acc.clone());
                acc *= shape + int(k as u64);
            }
            out
        }
        DistSpec::Normal { variance } => ks
            .map(|k| {
                if k % 2 == 1 {
                    BigRational::zero()
                } else {
                    num_traits::pow(variance.clone(), k / 2) * int(normal_moment(k))
                }
            })
            .collect(),
        DistSpec::Custom { moments } => {
            let seq = MomentSeq::new(moments.clone())?;
            seq.require_order(order)?;
            return Ok(seq.truncate(order));
        }
    };
    MomentSeq::from_rationals(mu)
}

/// Rigorous rational enclosures `lo_k ≤ E|Y|^k ≤ hi_k`.
///
/// Exact (`lo = hi`) whenever the absolute moments are rational; uniform and
/// normal odd absolute moments carry an irrational factor and get a tight
/// enclosure instead.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsMoments {
    pub lo: Vec<BigRational>,
    pub hi: Vec<BigRational>,
}

impl AbsMoments {
    pub fn exact(values: Vec<BigRational>) -> Self {
        AbsMoments {
            lo: values.clone(),
            hi: values,
        }
    }

    pub fn order(&self) -> usize {
        self.lo.len() - 1
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

const PI_LO: (i64, i64) = (314_159_265_358_979, 100_000_000_000_000);
const PI_HI: (i64, i64) = (314_159_265_358_980, 100_000_000_000_000);

/// Rational `r` with `r ≤ √x` (`upper = false`) or `r ≥ √x` (`upper = true`).
fn sqrt_bound(x: &BigRational, upper: bool) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let approx = ratio_to_f64(x).sqrt();
    let mut rel = 1e-13;
    loop {
        let f = if upper { approx * (1.0 + rel) } else { approx * (1.0 - rel) };
        let r = BigRational::from_float(f).expect("finite sqrt");
        let sq = &r * &r;
        if (upper && sq >= *x) || (!upper && sq <= *x) {
            return r;
        }
        rel *= 4.0;
    }
}

/// Absolute moments `E|Y|^k`, `k = 0..=J`, for the catalog.
pub fn abs_moments_of(spec: &DistSpec, order: usize) -> Result<AbsMoments> {
    spec.validate()?;
    match spec {
        DistSpec::PointMass { c } => Ok(AbsMoments::exact(
            (0..=order).map(|k| num_traits::pow(c.abs(), k)).collect(),
        )),
        DistSpec::Rademacher => Ok(AbsMoments::exact(vec![BigRational::one(); order + 1])),
        DistSpec::Bernoulli { .. }
        | DistSpec::Poisson { .. }
        | DistSpec::Exponential
        | DistSpec::Gamma { .. } => Ok(AbsMoments::exact(moments_of(spec, order)?.real_moments()?)),
        DistSpec::UniformStd => {
            // E|Y|^k = (√3)^k/(k+1)
            let three = int(3);
            let (r_lo, r_hi) = (sqrt_bound(&three, false), sqrt_bound(&three, true));
            let mut lo = Vec::with_capacity(order + 1);
            let mut hi = Vec::with_capacity(order + 1);
            for k in 0..=order {
                let base = num_traits::pow(three.clone(), k / 2) / int(k as u64 + 1);
                if k % 2 == 0 {
                    lo.push(base.clone());
                    hi.push(base);
                } else {
                    lo.push(&base * &r_lo);
                    hi.push(base * &r_hi);
                }
            }
            Ok(AbsMoments { lo, hi })
        }
        DistSpec::Normal { variance } => {
            // E|σZ|^k = σ^k (k-1)!! for even k, σ^k √(2/π) 2^{(k-1)/2} ((k-1)/2)! for odd k
            let two_var = variance * int(2);
            let c_lo = sqrt_bound(&(&two_var / rat(PI_HI.0, PI_HI.1)), false);
            let c_hi = sqrt_bound(&(&two_var / rat(PI_LO.0, PI_LO.1)), true);
            let mut lo = Vec::with_capacity(order + 1);
            let mut hi = Vec::with_capacity(order + 1);
            for k in 0..=order {
                if k % 2 == 0 {
                    let v = num_traits::pow(variance.clone(), k / 2) * int(normal_moment(k));
                    lo.push(v.clone());
                    hi.push(v);
                } else {
                    let h = (k - 1) / 2;
                    let base = num_traits::pow(variance.clone(), h)
                        * int(num_traits::pow(BigInt::from(2), h))
                        * int(factorial(h));
                    lo.push(&base * &c_lo);
                    hi.push(base * &c_hi);
                }
            }
            Ok(AbsMoments { lo, hi })
        }
        DistSpec::Custom { .. } => Err(Error::Unsupported(
            "absolute moments are not derivable for custom moment lists".into(),
        )),
    }
}

/// Moments of the x²-biased law: `ν_k = μ_{k+2}/μ_2`, order `J - 2`.
///
/// For `μ_2 = 0` (which for a real law means `Y = 0`) returns the point mass
/// at zero.
pub fn tilde_transform(m: &MomentSeq) -> Result<MomentSeq> {
    if !m.is_real() {
        return Err(Error::Domain("tilde transform needs real moments".into()));
    }
    m.require_order(2)?;
    let order = m.order() - 2;
    let mu2 = &m.get(2).re;
    if mu2.is_zero() {
        return Ok(MomentSeq::zero_point(order));
    }
    MomentSeq::from_rationals((0..=order).map(|k| &m.get(k + 2).re / mu2).collect())
}

/// Moments of `Ŷ = Y + iZ`, `Z` standard normal independent of `Y`:
/// `μ̂_s = Σ_k C(s,k) μ_k i^{s-k} E Z^{s-k}`.
pub fn hat_transform(m: &MomentSeq) -> MomentSeq {
    let order = m.order();
    let binom = pascal(order);
    // i^l E Z^l: zero for odd l, (-1)^{l/2} (l-1)!! for even l
    let iz: Vec<BigRational> = (0..=order)
        .map(|l| {
            let z = int(normal_moment(l));
            if l % 4 == 2 {
                -z
            } else {
                z
            }
        })
        .collect();
    let mu = (0..=order)
        .map(|s| {
            let mut acc = Cq::from_int(0);
            for k in (0..=s).filter(|k| (s - k) % 2 == 0) {
                let w = Cq::real(int(binom[s][k].clone()) * &iz[s - k]);
                acc = &acc + &(&w * m.get(k));
            }
            acc
        })
        .collect();
    MomentSeq { mu }
}

/// Largest `r ≤ J` with `μ_1 = ··· = μ_r = 0`.
pub fn vanishing_order(m: &MomentSeq) -> usize {
    (1..=m.order())
        .take_while(|&k| m.get(k).is_zero())
        .count()
}

/// Moments of `β(r)` with density `r(1-θ)^{r-1}` on `[0,1]`:
/// `k! r!/(k+r)!`; `β(0) = 1`.
pub fn beta_moments(r: usize, order: usize) -> MomentSeq {
    if r == 0 {
        return MomentSeq::from_ints(&vec![1; order + 1]).expect("mu_0 = 1");
    }
    let rf = factorial(r);
    MomentSeq::from_rationals(
        (0..=order)
            .map(|k| BigRational::new(factorial(k) * &rf, factorial(k + r)))
            .collect(),
    )
    .expect("mu_0 = 1")
}

/// Moments of `Y - E Y`.
pub fn centered(m: &MomentSeq) -> MomentSeq {
    let order = m.order();
    if order == 0 {
        return m.clone();
    }
    let binom = pascal(order);
    let shift = -m.get(1);
    let shift_pows: Vec<Cq> = (0..=order).map(|k| shift.pow(k)).collect();
    let mu = (0..=order)
        .map(|k| {
            (0..=k).fold(Cq::from_int(0), |acc, i| {
                let term = &Cq::from_bigint(binom[k][i].clone()) * &(m.get(i) * &shift_pows[k - i]);
                &acc + &term
            })
        })
        .collect();
    MomentSeq { mu }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    let root = BigRational::new(n, d);
    (&root * &root == *q).then_some(root)
}

/// Moments of `(Y - E Y)/σ`. The variance must be a positive rational square.
pub fn standardized(m: &MomentSeq) -> Result<MomentSeq> {
    if !m.is_real() {
        return Err(Error::Domain("standardization needs real moments".into()));
    }
    m.require_order(2)?;
    let c = centered(m);
    let var = c.get(2).re.clone();
    if !var.is_positive() {
        return Err(Error::Domain("degenerate distribution has no standardization".into()));
    }
    let sigma = rational_sqrt(&var).ok_or_else(|| {
        Error::Unsupported(format!("variance {var} is not a rational square"))
    })?;
    let mut scale = BigRational::one();
    let mut mu = Vec::with_capacity(c.order() + 1);
    for k in 0..=c.order() {
        mu.push(Cq::real(&c.get(k).re / &scale));
        scale *= &sigma;
    }
    MomentSeq::new(mu)
}

/// The pinned generator for all stochastic checks.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws from a catalog distribution.
#[derive(Clone, Debug)]
pub enum Sampler {
    PointMass(f64),
    Rademacher,
    Bernoulli(f64),
    UniformStd,
    Poisson { exp_neg_lambda: f64 },
    Exponential,
    Gamma { whole: u64, frac: f64 },
    Normal { sigma: f64 },
}

/// Uniform on `(0, 1]`, safe for logarithms.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -open_unit(rng).ln()
}

/// Ahrens–Dieter GS rejection for `Gamma(δ, 1)`, `0 < δ < 1`.
fn gamma_fractional<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> f64 {
    let e = std::f64::consts::E;
    let b = (e + delta) / e;
    loop {
        let p = b * rng.gen::<f64>();
        let v = rng.gen::<f64>();
        if p <= 1.0 {
            let x = p.powf(1.0 / delta);
            if v <= (-x).exp() {
                return x;
            }
        } else {
            let x = -((b - p) / delta).ln();
            if v <= x.powf(delta - 1.0) {
                return x;
            }
        }
    }
}

impl Sampler {
    pub fn new(spec: &DistSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            DistSpec::PointMass { c } => Sampler::PointMass(ratio_to_f64(c)),
            DistSpec::Rademacher => Sampler::Rademacher,
            DistSpec::Bernoulli { p } => Sampler::Bernoulli(ratio_to_f64(p)),
            DistSpec::UniformStd => Sampler::UniformStd,
            DistSpec::Poisson { lambda } => {
                let l = ratio_to_f64(lambda);
                if l > 700.0 {
                    return Err(Error::Unsupported(
                        "product-method Poisson sampling needs lambda <= 700".into(),
                    ));
                }
                Sampler::Poisson {
                    exp_neg_lambda: (-l).exp(),
                }
            }
            DistSpec::Exponential => Sampler::Exponential,
            DistSpec::Gamma { shape } => {
                let whole = shape.floor();
                Sampler::Gamma {
                    whole: whole.to_integer().to_u64().ok_or_else(|| {
                        Error::Unsupported("gamma shape too large to sample".into())
                    })?,
                    frac: ratio_to_f64(&(shape - whole)),
                }
            }
            DistSpec::Normal { variance } => Sampler::Normal {
                sigma: ratio_to_f64(variance).sqrt(),
            },
            DistSpec::Custom { .. } => {
                return Err(Error::Unsupported(
                    "custom moment lists cannot be sampled".into(),
                ))
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Sampler::PointMass(c) => c,
            Sampler::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Sampler::Bernoulli(p) => {
                if rng.gen::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::UniformStd => 3f64.sqrt() * (2.0 * rng.gen::<f64>() - 1.0),
            Sampler::Poisson { exp_neg_lambda } => {
                let mut k = 0u64;
                let mut prod = open_unit(rng);
                while prod > exp_neg_lambda {
                    k += 1;
                    prod *= open_unit(rng);
                }
                k as f64
            }
            Sampler::Exponential => exponential(rng),
            Sampler::Gamma { whole, frac } => {
                let mut x: f64 = (0..whole).map(|_| exponential(rng)).sum();
                if frac > 0.0 {
                    x += gamma_fractional(rng, frac);
                }
                x
            }
            Sampler::Normal { sigma } => {
                // Box–Muller, cosine branch
                let r = (-2.0 * open_unit(rng).ln()).sqrt();
                let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                sigma * r * theta.cos()
            }
        }
    }

    pub fn sample_sum<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        (0..n).map(|_| self.sample(rng)).sum()
    }
}

/// One draw of `S_n = Y_1 + ··· + Y_n`.
pub fn sample_sum<R: Rng + ?Sized>(spec: &DistSpec, n: usize, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(Sampler::new(spec)?.sample_sum(n, rng))
}
