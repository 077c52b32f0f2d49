//! Moments of `S_n = Y_1 + ··· + Y_n` and cumulants of `Y`.
//!
//! `E S_n^j = Σ_{m ≤ n ∧ τ} S_Y(j,m) (n)_m` with `τ = ⌊j/(r+1)⌋`, where `r`
//! is the vanishing order of the moment sequence.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::{binomial, factorial, falling, normal_moment};
use crate::error::{Error, Result};
use crate::randomvars::{vanishing_order, MomentSeq};
use crate::scalar::Cq;
use crate::stirling::{psn_egf, StirlingTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumRoute {
    Stirling,
    Recursion,
    EgfOracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumMomentReport {
    pub n: usize,
    pub j: usize,
    pub value: Cq,
    pub route: SumRoute,
}

fn tau(r: usize, j: usize) -> usize {
    j / (r + 1)
}

fn check_row(m: &MomentSeq, j: usize) -> Result<()> {
    if j > m.order() {
        return Err(Error::Precondition(format!(
            "moment order {j} exceeds available order {}",
            m.order()
        )));
    }
    Ok(())
}

fn check_override(m: &MomentSeq, r: usize) -> Result<()> {
    let actual = vanishing_order(m);
    if r > actual {
        return Err(Error::Precondition(format!(
            "r = {r} exceeds the vanishing order {actual}"
        )));
    }
    Ok(())
}

/// `Σ_{m=0}^{n ∧ ⌊j/(r+1)⌋} S(j,m) (n)_m` over a prebuilt table.
///
/// The caller guarantees `r` does not exceed the vanishing order of the
/// sequence behind `table`.
pub fn sum_moment_from_table(table: &StirlingTable, r: usize, n: usize, j: usize) -> Cq {
    (0..=n.min(tau(r, j))).fold(Cq::zero(), |acc, m| {
        &acc + &(&Cq::from_bigint(falling(n, m)) * table.get(j, m))
    })
}

/// `E S_n^j` through the Stirling decomposition, `r` from [`vanishing_order`].
pub fn sum_moment(m: &MomentSeq, n: usize, j: usize) -> Result<Cq> {
    sum_moment_with_order(m, vanishing_order(m), n, j)
}

/// [`sum_moment`] with a caller-chosen `r ≤ vanishing_order(m)`.
pub fn sum_moment_with_order(m: &MomentSeq, r: usize, n: usize, j: usize) -> Result<Cq> {
    check_row(m, j)?;
    check_override(m, r)?;
    let table = psn_egf(&m.truncate(j));
    Ok(sum_moment_from_table(&table, r, n, j))
}

/// `E S_n^j` as the `j`-th coefficient of `M(z)^n`.
pub fn sum_moment_oracle(m: &MomentSeq, n: usize, j: usize) -> Result<Cq> {
    check_row(m, j)?;
    Ok(m.truncate(j).to_egf().pow(n).coeff(j).clone())
}

/// `E S_n^j` for `n ∈ ns`, `j ∈ 0..=j_max`, from a single table.
pub fn sweep(m: &MomentSeq, ns: &[usize], j_max: usize) -> Result<Vec<SumMomentReport>> {
    check_row(m, j_max)?;
    let truncated = m.truncate(j_max);
    let r = vanishing_order(&truncated);
    let table = psn_egf(&truncated);
    Ok(ns
        .iter()
        .flat_map(|&n| (0..=j_max).map(move |j| (n, j)))
        .map(|(n, j)| SumMomentReport {
            n,
            j,
            value: sum_moment_from_table(&table, r, n, j),
            route: SumRoute::Stirling,
        })
        .collect())
}

/// CSV with header `n,j,value`.
pub fn sweep_csv(rows: &[SumMomentReport]) -> String {
    let mut out = String::from("n,j,value\n");
    for row in rows {
        writeln!(out, "{},{},{}", row.n, row.j, row.value).unwrap();
    }
    out
}

/// `E S_n^j` by the finite recursion in `n ≥ τ`:
/// `E S_n^j / (n)_τ = S(j,τ) + (1/(τ-1)!) Σ_{k<τ} C(τ-1,k)(-1)^{τ-k-1} E S_k^j / (n-k)`.
pub fn sum_moment_recursion(m: &MomentSeq, n: usize, j: usize) -> Result<Cq> {
    sum_moment_recursion_with_order(m, vanishing_order(m), n, j)
}

pub fn sum_moment_recursion_with_order(m: &MomentSeq, r: usize, n: usize, j: usize) -> Result<Cq> {
    check_row(m, j)?;
    check_override(m, r)?;
    let t = tau(r, j);
    if t < 1 {
        return Err(Error::Precondition(format!(
            "recursion needs tau >= 1, have tau = {t} for j = {j}, r = {r}"
        )));
    }
    if n < t {
        return Err(Error::Precondition(format!("recursion needs n >= tau = {t}, got n = {n}")));
    }
    let truncated = m.truncate(j);
    let table = psn_egf(&truncated);
    let sums = truncated.to_egf().powers(t - 1);
    let tail = (0..t).fold(Cq::zero(), |acc, k| {
        let mut w = BigRational::new(binomial(t - 1, k), BigInt::from(n - k));
        if (t - k - 1) % 2 == 1 {
            w = -w;
        }
        &acc + &(&Cq::real(w) * sums[k].coeff(j))
    });
    let tail = &tail * &Cq::real(BigRational::new(BigInt::one(), factorial(t - 1)));
    Ok(&(table.get(j, t) + &tail) * &Cq::from_bigint(falling(n, t)))
}

/// `E S_n^{2j} / (n)_j` for `n = j..=n_max` and the limit `σ^{2j}(2j-1)!!`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenMomentSequence {
    pub j: usize,
    pub values: Vec<(usize, BigRational)>,
    pub limit: BigRational,
}

impl EvenMomentSequence {
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn bounded_below_by_limit(&self) -> bool {
        self.values.iter().all(|(_, v)| *v >= self.limit)
    }
}

pub fn even_moment_sequence(m: &MomentSeq, j: usize, n_max: usize) -> Result<EvenMomentSequence> {
    if !m.is_real() {
        return Err(Error::Domain("even moment sequence needs real moments".into()));
    }
    check_row(m, 2 * j)?;
    let truncated = m.truncate(2 * j);
    if j >= 1 && !truncated.get(1).is_zero() {
        return Err(Error::Precondition("even moment sequence needs a centered law".into()));
    }
    let r = vanishing_order(&truncated);
    let table = psn_egf(&truncated);
    let values = (j.max(1)..=n_max)
        .map(|n| {
            let s = sum_moment_from_table(&table, r, n, 2 * j);
            (n, &s.re / BigRational::from_integer(falling(n, j)))
        })
        .collect();
    let sigma2 = if truncated.order() >= 2 { truncated.get(2).re.clone() } else { BigRational::one() };
    let limit = num_traits::pow(sigma2, j) * BigRational::from_integer(normal_moment(2 * j));
    Ok(EvenMomentSequence { j, values, limit })
}

/// `κ_0 = 0, κ_1, …, κ_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSeq {
    kappa: Vec<Cq>,
}

impl CumulantSeq {
    pub fn order(&self) -> usize {
        self.kappa.len() - 1
    }

    /// `κ_j` for `1 ≤ j ≤ J`.
    pub fn get(&self, j: usize) -> &Cq {
        &self.kappa[j]
    }

    pub fn values(&self) -> &[Cq] {
        &self.kappa[1..]
    }

    pub fn is_real(&self) -> bool {
        self.kappa.iter().all(Cq::is_real)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,re,im\n");
        for (j, k) in self.kappa.iter().enumerate().skip(1) {
            writeln!(out, "{j},{},{}", k.re, k.im).unwrap();
        }
        out
    }
}

/// `κ_j = Σ_m (-1)^{m-1} (m-1)! S_Y(j,m)`.
pub fn cumulants_from_stirling(m: &MomentSeq) -> CumulantSeq {
    let table = psn_egf(m);
    cumulants_from_table(&table)
}

pub fn cumulants_from_table(table: &StirlingTable) -> CumulantSeq {
    let kappa = (0..=table.order())
        .map(|j| {
            (1..=j).fold(Cq::zero(), |acc, k| {
                let w = Cq::from_bigint(factorial(k - 1));
                let term = &w * table.get(j, k);
                if k % 2 == 0 {
                    &acc - &term
                } else {
                    &acc + &term
                }
            })
        })
        .collect();
    CumulantSeq { kappa }
}

/// `κ_j = Σ_{k=1}^{j} C(j,k) (-1)^{k-1}/k · E S_k^j`.
pub fn cumulants_binomial(m: &MomentSeq) -> CumulantSeq {
    let order = m.order();
    let sums = m.to_egf().powers(order);
    let kappa = (0..=order)
        .map(|j| {
            (1..=j).fold(Cq::zero(), |acc, k| {
                let mut w = BigRational::new(binomial(j, k), BigInt::from(k));
                if k % 2 == 0 {
                    w = -w;
                }
                &acc + &(&Cq::real(w) * sums[k].coeff(j))
            })
        })
        .collect();
    CumulantSeq { kappa }
}

/// Coefficients of `log M(z)`.
pub fn cumulants_oracle(m: &MomentSeq) -> CumulantSeq {
    let log = m.to_egf().log().expect("moment sequences have mu_0 = 1");
    CumulantSeq { kappa: log.into_coeffs() }
}

/// Leading `n^j` coefficient of `E S_n^{2j+1}` for a centered law,
/// `j(2j+1)(2j-1)!! σ^{2j-2} μ_3/3`.
pub fn odd_moment_leading(m: &MomentSeq, j: usize) -> Result<BigRational> {
    if !m.is_real() {
        return Err(Error::Domain("needs real moments".into()));
    }
    check_row(m, 3)?;
    if !m.get(1).is_zero() {
        return Err(Error::Precondition("needs a centered law".into()));
    }
    if j == 0 {
        return Ok(m.get(1).re.clone());
    }
    let sigma2 = m.get(2).re.clone();
    let w = BigRational::new(BigInt::from(j * (2 * j + 1)) * normal_moment(2 * j), BigInt::from(3));
    Ok(w * num_traits::pow(sigma2, j - 1) * &m.get(3).re)
}
