//! Classical and probabilistic Stirling numbers of the second kind.
//!
//! `S_Y(j,m) = (1/m!) Σ_k C(m,k)(-1)^{m-k} E S_k^j` where `S_k` is a sum of
//! `k` i.i.d. copies of `Y`. Four routes are provided:
//!
//! * [`psn_egf`]: coefficients of `(M(z) - 1)^m / m!` (production route),
//! * [`psn_direct`]: the alternating sum above,
//! * [`psn_via_classical`]: through classical Stirling numbers and factorial
//!   moments of `S_k`,
//! * [`psn_gr_rep`]: the representation for laws with vanishing moments
//!   `μ_1 = ··· = μ_r = 0`, built from beta-weighted sums.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinat::{binomial, factorial, pascal};
use crate::error::{Error, Result};
use crate::randomvars::{abs_moments_of, beta_moments, moments_of, vanishing_order, AbsMoments, DistSpec, MomentSeq};
use crate::scalar::Cq;
use crate::series::Egf;

/// Which route produced a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Egf,
    Direct,
    ViaClassical,
    GrRep { r: usize },
}

/// `S(j,m)` for `0 ≤ j, m ≤ J`; entries with `m > j` are structural zeros.
#[derive(Clone, Debug)]
pub struct StirlingTable {
    entries: Vec<Vec<Cq>>,
    route: Route,
}

impl StirlingTable {
    fn from_fn(order: usize, route: Route, mut entry: impl FnMut(usize, usize) -> Cq) -> Self {
        let entries = (0..=order)
            .map(|j| {
                (0..=order)
                    .map(|m| if m > j { Cq::zero() } else { entry(j, m) })
                    .collect()
            })
            .collect();
        StirlingTable { entries, route }
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// `S(j,m)`; zero for `m > j`.
    pub fn get(&self, j: usize, m: usize) -> &Cq {
        &self.entries[j][m]
    }

    /// Same entries, regardless of route.
    pub fn entries_eq(&self, other: &StirlingTable) -> bool {
        self.entries == other.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().flatten().all(Cq::is_real)
    }

    /// `(j, m, S(j,m))` over the triangle `0 ≤ m ≤ j ≤ J`.
    pub fn triangle(&self) -> impl Iterator<Item = (usize, usize, &Cq)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row[..=j].iter().enumerate().map(move |(m, s)| (j, m, s)))
    }

    /// CSV with header `j,m,re,im`, exact rationals as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,m,re,im\n");
        for (j, m, s) in self.triangle() {
            writeln!(out, "{j},{m},{},{}", s.re, s.im).unwrap();
        }
        out
    }
}

/// `S(j,m) = (1/m!) Σ_k C(m,k)(-1)^{m-k} k^j`.
pub fn classical_s2(j: usize, m: usize) -> BigInt {
    let binom = pascal(m);
    let sum: BigInt = (0..=m)
        .map(|k| {
            let term = &binom[m][k] * num_traits::pow(BigInt::from(k), j);
            if (m - k) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    sum / factorial(m)
}

/// Signed first-kind numbers: `(x)_l = Σ_i s(l,i) x^i`.
pub fn classical_s1_signed(l: usize, i: usize) -> BigInt {
    s1_triangle(l)[l].get(i).cloned().unwrap_or_default()
}

fn s1_triangle(n: usize) -> Vec<Vec<BigInt>> {
    // s(l+1, i) = s(l, i-1) - l s(l, i)
    let mut rows = vec![vec![BigInt::one()]];
    for l in 0..n {
        let prev = &rows[l];
        let row = (0..=l + 1)
            .map(|i| {
                let shifted = if i > 0 { prev[i - 1].clone() } else { BigInt::zero() };
                let kept = prev.get(i).map(|s| s * BigInt::from(l)).unwrap_or_default();
                shifted - kept
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn sign(q: Cq, odd: bool) -> Cq {
    if odd {
        -q
    } else {
        q
    }
}

fn inv_factorial(m: usize) -> Cq {
    Cq::real(BigRational::new(BigInt::one(), factorial(m)))
}

fn check_row(moments: &MomentSeq, j: usize) -> Result<()> {
    if j > moments.order() {
        return Err(Error::Precondition(format!(
            "row j = {j} exceeds moment order {}",
            moments.order()
        )));
    }
    Ok(())
}

/// Production route: `S_Y(j,m)` is the `j`-th EGF coefficient of
/// `(M(z) - 1)^m / m!`.
pub fn psn_egf(moments: &MomentSeq) -> StirlingTable {
    let mut shifted = moments.to_egf().into_coeffs();
    shifted[0] = Cq::zero();
    let powers = Egf::new(shifted).expect("non-empty").powers(moments.order());
    StirlingTable::from_fn(moments.order(), Route::Egf, |j, m| {
        powers[m].coeff(j) * &inv_factorial(m)
    })
}

fn direct_entry(sums: &[Egf<Cq>], binom: &[Vec<BigInt>], j: usize, m: usize) -> Cq {
    let total = (0..=m).fold(Cq::zero(), |acc, k| {
        let term = &Cq::from_bigint(binom[m][k].clone()) * sums[k].coeff(j);
        &acc + &sign(term, (m - k) % 2 == 1)
    });
    &total * &inv_factorial(m)
}

/// Definition route: `(1/m!) Σ_k C(m,k)(-1)^{m-k} E S_k^j`, with `E S_k^j`
/// read off `M(z)^k`. Returns zero for `m > j`.
pub fn psn_direct(moments: &MomentSeq, j: usize, m: usize) -> Result<Cq> {
    check_row(moments, j)?;
    if m > j {
        return Ok(Cq::zero());
    }
    let sums = moments.to_egf().powers(m);
    Ok(direct_entry(&sums, &pascal(m), j, m))
}

pub fn table_direct(moments: &MomentSeq) -> StirlingTable {
    let order = moments.order();
    let sums = moments.to_egf().powers(order);
    let binom = pascal(order);
    StirlingTable::from_fn(order, Route::Direct, |j, m| direct_entry(&sums, &binom, j, m))
}

struct ClassicalParts {
    s2: Vec<Vec<BigInt>>,
    s1: Vec<Vec<BigInt>>,
    binom: Vec<Vec<BigInt>>,
}

impl ClassicalParts {
    fn new(order: usize) -> Self {
        ClassicalParts {
            s2: crate::combinat::stirling2_triangle(order),
            s1: s1_triangle(order),
            binom: pascal(order),
        }
    }

    /// `E (S_k)_l = Σ_i s(l,i) E S_k^i`.
    fn factorial_moment(&self, sums: &[Egf<Cq>], k: usize, l: usize) -> Cq {
        (0..=l).fold(Cq::zero(), |acc, i| {
            &acc + &(&Cq::from_bigint(self.s1[l][i].clone()) * sums[k].coeff(i))
        })
    }

    fn entry(&self, sums: &[Egf<Cq>], j: usize, m: usize) -> Cq {
        let total = (0..=j).fold(Cq::zero(), |acc, l| {
            if self.s2[j][l].is_zero() {
                return acc;
            }
            let inner = (0..=m).fold(Cq::zero(), |inner, k| {
                let term = &Cq::from_bigint(self.binom[m][k].clone()) * &self.factorial_moment(sums, k, l);
                &inner + &sign(term, (m - k) % 2 == 1)
            });
            &acc + &(&Cq::from_bigint(self.s2[j][l].clone()) * &inner)
        });
        &total * &inv_factorial(m)
    }
}

/// Route through classical Stirling numbers:
/// `(1/m!) Σ_l S(j,l) Σ_k C(m,k)(-1)^{m-k} E (S_k)_l`.
pub fn psn_via_classical(moments: &MomentSeq, j: usize, m: usize) -> Result<Cq> {
    check_row(moments, j)?;
    if m > j {
        return Ok(Cq::zero());
    }
    let parts = ClassicalParts::new(j.max(m));
    let sums = moments.truncate(j).to_egf().powers(m);
    Ok(parts.entry(&sums, j, m))
}

pub fn table_via_classical(moments: &MomentSeq) -> StirlingTable {
    let order = moments.order();
    let parts = ClassicalParts::new(order);
    let sums = moments.to_egf().powers(order);
    StirlingTable::from_fn(order, Route::ViaClassical, |j, m| parts.entry(&sums, j, m))
}

fn gr_entry(moments: &MomentSeq, beta: &MomentSeq, r: usize, j: usize, m: usize) -> Cq {
    let block = m * (r + 1);
    if m == 0 {
        return if j == 0 { Cq::one() } else { Cq::zero() };
    }
    if j < block {
        return Cq::zero();
    }
    let p = j - block;
    // g_k = E β(r+1)^k μ_{k+r+1}: EGF of E Y^{r+1} e^{z β(r+1) Y}
    let g: Vec<Cq> = (0..=p).map(|k| beta.get(k) * moments.get(k + r + 1)).collect();
    let weighted = Egf::new(g).expect("non-empty").pow(m);
    let lead = BigRational::new(
        factorial(block) * binomial(j, block),
        factorial(m) * num_traits::pow(factorial(r + 1), m),
    );
    &Cq::real(lead) * weighted.coeff(p)
}

fn check_vanishing(moments: &MomentSeq, r: usize) -> Result<()> {
    let actual = vanishing_order(moments);
    if actual < r {
        return Err(Error::Precondition(format!(
            "representation needs vanishing order >= {r}, sequence has {actual}"
        )));
    }
    Ok(())
}

/// Vanishing-order route, valid when `μ_1 = ··· = μ_r = 0`:
/// zero for `j < m(r+1)`, otherwise
/// `(m(r+1))!/(m!((r+1)!)^m) C(j, m(r+1)) E (Y_1···Y_m)^{r+1} W_m(r+1,Y)^{j-m(r+1)}`.
pub fn psn_gr_rep(moments: &MomentSeq, r: usize, j: usize, m: usize) -> Result<Cq> {
    check_row(moments, j)?;
    check_vanishing(moments, r)?;
    Ok(gr_entry(moments, &beta_moments(r + 1, j), r, j, m))
}

pub fn table_gr_rep(moments: &MomentSeq, r: usize) -> Result<StirlingTable> {
    check_vanishing(moments, r)?;
    let order = moments.order();
    let beta = beta_moments(r + 1, order);
    Ok(StirlingTable::from_fn(order, Route::GrRep { r }, |j, m| {
        gr_entry(moments, &beta, r, j, m)
    }))
}

/// `E W_m(r,Y)^p` for `W_m(r,Y) = β_1(r) Y_1 + ··· + β_m(r) Y_m`;
/// `r = 0` gives `E S_m^p`.
pub fn weighted_sum_moment(moments: &MomentSeq, r: usize, m: usize, p: usize) -> Result<Cq> {
    check_row(moments, p)?;
    let beta = beta_moments(r, p);
    let h: Vec<Cq> = (0..=p).map(|k| beta.get(k) * moments.get(k)).collect();
    Ok(Egf::new(h).expect("non-empty").pow(m).coeff(p).clone())
}

/// Both sides of `|S_Y(j,m)| ≤ E(|Y_1| + ··· + |Y_m|)^j / m!`.
///
/// The right side is enclosed in `[rhs_lower, rhs_upper]`; `holds` is the
/// exact comparison against the lower end.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: BigRational,
    pub rhs_lower: BigRational,
    pub rhs_upper: BigRational,
    pub holds: bool,
}

pub fn bound_holds(moments: &MomentSeq, abs: &AbsMoments, j: usize, m: usize) -> Result<BoundCheck> {
    if !moments.is_real() {
        return Err(Error::Domain("the bound is stated for real laws".into()));
    }
    check_row(moments, j)?;
    if abs.order() < j {
        return Err(Error::Precondition(format!(
            "absolute moments up to order {j} needed, have {}",
            abs.order()
        )));
    }
    let truncated = moments.truncate(j);
    let lhs = if m > j {
        BigRational::zero()
    } else {
        let mut shifted = truncated.to_egf().into_coeffs();
        shifted[0] = Cq::zero();
        let s = Egf::new(shifted).expect("non-empty").pow(m).coeff(j) * &inv_factorial(m);
        s.re.abs()
    };
    let sum_power = |values: &[BigRational]| -> BigRational {
        let series = Egf::new(values[..=j].iter().cloned().map(Cq::real).collect()).expect("non-empty");
        &series.pow(m).coeff(j).re / BigRational::from_integer(factorial(m))
    };
    let rhs_lower = sum_power(&abs.lo);
    let rhs_upper = sum_power(&abs.hi);
    Ok(BoundCheck {
        holds: lhs <= rhs_lower,
        lhs,
        rhs_lower,
        rhs_upper,
    })
}

/// [`bound_holds`] with moments and absolute moments taken from the catalog.
pub fn bound_holds_for(spec: &DistSpec, j: usize, m: usize) -> Result<BoundCheck> {
    let moments = moments_of(spec, j)?;
    let abs = abs_moments_of(spec, j)?;
    bound_holds(&moments, &abs, j, m)
}
