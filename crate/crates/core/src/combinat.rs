//! Exact integer combinatorics. Everything here is built from recurrences on
//! `BigInt`; no floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rows `0..=n` of Pascal's triangle.
pub fn pascal(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut row = vec![BigInt::one(); j + 1];
        for k in 1..j {
            row[k] = &rows[j - 1][k - 1] + &rows[j - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    // row-by-row Pascal on a single buffer
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    for j in 1..=n {
        for i in (1..=k.min(j)).rev() {
            let prev = row[i - 1].clone();
            row[i] += prev;
        }
    }
    row[k].clone()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Descending factorial `(n)_m = n(n-1)···(n-m+1)`, zero when `m > n`.
pub fn falling(n: usize, m: usize) -> BigInt {
    if m > n {
        return BigInt::zero();
    }
    (0..m).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Descending factorial of a rational argument.
pub fn falling_rational(x: &BigRational, m: usize) -> BigRational {
    (0..m).fold(BigRational::one(), |acc, i| {
        acc * (x - BigRational::from_integer(BigInt::from(i)))
    })
}

/// Normal moment `E Z^k`: `(2m)!/(m! 2^m)` for `k = 2m`, zero for odd `k`.
pub fn normal_moment(k: usize) -> BigInt {
    if k % 2 == 1 {
        return BigInt::zero();
    }
    // (k-1)!! = (2m)!/(m! 2^m)
    (1..k).step_by(2).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Classical second-kind Stirling triangle by `S(n,k) = k S(n-1,k) + S(n-1,k-1)`.
///
/// Row `n` has `n + 1` entries.
pub fn stirling2_triangle(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for j in 1..=n {
        let mut row = vec![BigInt::zero(); j + 1];
        for k in 1..=j {
            let prev = &rows[j - 1];
            let keep = if k < j {
                &prev[k] * BigInt::from(k)
            } else {
                BigInt::zero()
            };
            row[k] = keep + &prev[k - 1];
        }
        rows.push(row);
    }
    rows
}

/// Bell numbers `B_0..B_n` by the recurrence `B_{n+1} = Σ_k C(n,k) B_k`.
pub fn bell_numbers(n: usize) -> Vec<BigInt> {
    let binom = pascal(n);
    let mut bell = vec![BigInt::one()];
    for j in 0..n {
        let next = (0..=j).map(|k| &binom[j][k] * &bell[k]).sum();
        bell.push(next);
    }
    bell
}
