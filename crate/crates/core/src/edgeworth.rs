//! Edgeworth expansion of the distribution function of `S_n/√n` built from
//! the Stirling numbers of `Ŷ = Y + iZ`.
//!
//! `F_n(y) - G(y) ≈ -g(y) Σ_{k=r-1}^{K} n^{-k/2} Σ_{(m,j) ∈ Δ_k} S_Ŷ(j,m)/j! (n)_m/n^m H_{j-1}(y)`

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::combinat::{factorial, falling};
use crate::error::{Error, Result};
use crate::randomvars::{hat_transform, moments_of, vanishing_order, DistSpec, MomentSeq};
use crate::scalar::{ratio_to_f64, Cq};
use crate::stirling::{psn_egf, StirlingTable};

/// Probabilists' Hermite polynomial `H_n(y)`.
pub fn hermite_eval(n: usize, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, y);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = y * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(y), …, H_{n_max}(y)`.
pub fn hermite_all(n_max: usize, y: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(1.0);
    if n_max >= 1 {
        h.push(y);
    }
    for k in 1..n_max {
        h.push(y * h[k] - k as f64 * h[k - 1]);
    }
    h
}

pub fn normal_pdf(y: f64) -> f64 {
    (-0.5 * y * y).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(y: f64) -> f64 {
    0.5 * libm::erfc(-y * FRAC_1_SQRT_2)
}

/// `Δ_k = {(m, 2m+k) : 1 ≤ m ≤ n ∧ ⌊k/(r-1)⌋}`; empty when `k < r-1`.
pub fn delta_set(r: usize, n: usize, k: usize) -> Vec<(usize, usize)> {
    if r < 2 || k < r - 1 {
        return Vec::new();
    }
    (1..=n.min(k / (r - 1))).map(|m| (m, 2 * m + k)).collect()
}

fn required_order(r: usize, k_max: usize) -> usize {
    if k_max + 1 < r {
        0
    } else {
        2 * (k_max / (r - 1)) + k_max
    }
}

#[derive(Clone, Debug)]
pub struct EdgeworthModel {
    r: usize,
    k_max: usize,
    hat_moments: MomentSeq,
    hat_table: StirlingTable,
    lattice: bool,
}

/// Value of the truncated expansion; `lattice_warning` is set when the
/// source law is a lattice law, for which the expansion is not justified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeworthValue {
    pub value: f64,
    pub lattice_warning: bool,
}

impl EdgeworthModel {
    /// Model with `r` equal to the vanishing order of `Ŷ`.
    pub fn new(moments: &MomentSeq, k_max: usize, lattice: bool) -> Result<Self> {
        let r = Self::hat_order(moments)?;
        Self::with_order(moments, r, k_max, lattice)
    }

    /// Model with a caller-chosen `2 ≤ r ≤ vanishing_order(Ŷ)`.
    pub fn with_order(moments: &MomentSeq, r: usize, k_max: usize, lattice: bool) -> Result<Self> {
        let actual = Self::hat_order(moments)?;
        if r < 2 || r > actual {
            return Err(Error::Precondition(format!(
                "matching order r = {r} must satisfy 2 <= r <= {actual}"
            )));
        }
        let needed = required_order(r, k_max).max((r + 1).min(moments.order()));
        if moments.order() < needed {
            return Err(Error::Precondition(format!(
                "K = {k_max} with r = {r} needs moments through order {needed}, have {}",
                moments.order()
            )));
        }
        let hat_moments = hat_transform(&moments.truncate(needed));
        let hat_table = psn_egf(&hat_moments);
        if !hat_table.is_real() {
            return Err(Error::Domain("Stirling table of the hat sequence is not real".into()));
        }
        Ok(EdgeworthModel { r, k_max, hat_moments, hat_table, lattice })
    }

    /// Model for a catalog law; the law must have mean 0 and variance 1.
    pub fn from_spec(spec: &DistSpec, k_max: usize) -> Result<Self> {
        let moments = moments_of(spec, 3 * k_max + 2)?;
        Self::new(&moments, k_max, spec.is_lattice())
    }

    fn hat_order(moments: &MomentSeq) -> Result<usize> {
        if !moments.is_real() {
            return Err(Error::Domain("Edgeworth expansion needs a real law".into()));
        }
        let r = vanishing_order(&hat_transform(moments));
        if r < 2 {
            return Err(Error::Precondition(format!(
                "law must match the standard normal through order 2 (mean 0, variance 1); matches through {r}"
            )));
        }
        Ok(r)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice
    }

    pub fn hat_table(&self) -> &StirlingTable {
        &self.hat_table
    }

    /// `E Ŷ^{r+1}`, when available.
    pub fn hat_moment(&self, k: usize) -> Option<&Cq> {
        (k <= self.hat_moments.order()).then(|| self.hat_moments.get(k))
    }

    /// The coefficient of `g(y) H_r(y) n^{-(r-1)/2}`: `-E Ŷ^{r+1}/(r+1)!`.
    pub fn leading_coefficient(&self) -> Option<BigRational> {
        let mu = self.hat_moment(self.r + 1)?;
        Some(-&mu.re / BigRational::from_integer(factorial(self.r + 1)))
    }

    /// `(j, S_Ŷ(j,m)/j! (n)_m/n^m)` over `Δ_k`, exact.
    pub fn term_coefficients(&self, k: usize, n: usize) -> Result<Vec<(usize, BigRational)>> {
        self.check_k(k)?;
        Ok(delta_set(self.r, n, k)
            .into_iter()
            .map(|(m, j)| {
                let s = &self.hat_table.get(j, m).re;
                let ratio = BigRational::new(falling(n, m), num_traits::pow(BigInt::from(n), m));
                (j, s * ratio / BigRational::from_integer(factorial(j)))
            })
            .collect())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k + 1 < self.r || k > self.k_max {
            return Err(Error::InvalidParameter(format!(
                "term index k = {k} outside [{}, {}]",
                self.r - 1,
                self.k_max
            )));
        }
        Ok(())
    }

    /// `-g(y) n^{-k/2} Σ_{(m,j) ∈ Δ_k} S_Ŷ(j,m)/j! (n)_m/n^m H_{j-1}(y)`.
    pub fn edgeworth_term(&self, k: usize, n: usize, y: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let coeffs = float_coeffs(&self.term_coefficients(k, n)?);
        Ok(eval_term(k, n, &coeffs, y))
    }

    pub fn edgeworth_cdf(&self, n: usize, y: f64) -> Result<EdgeworthValue> {
        let plan = self.plan(n)?;
        Ok(self.wrap(plan.eval(y)))
    }

    /// [`Self::edgeworth_cdf`] over a grid, evaluated in parallel.
    pub fn edgeworth_grid(&self, n: usize, ys: &[f64]) -> Result<Vec<EdgeworthValue>> {
        let plan = self.plan(n)?;
        Ok(ys.par_iter().map(|&y| self.wrap(plan.eval(y))).collect())
    }

    fn wrap(&self, value: f64) -> EdgeworthValue {
        EdgeworthValue { value, lattice_warning: self.lattice }
    }

    fn plan(&self, n: usize) -> Result<Plan> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let first = self.r - 1;
        let terms = (first..=self.k_max)
            .map(|k| Ok((k, float_coeffs(&self.term_coefficients(k, n)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Plan { n, terms })
    }
}

fn float_coeffs(exact: &[(usize, BigRational)]) -> Vec<(usize, f64)> {
    exact.iter().map(|(j, c)| (*j, ratio_to_f64(c))).collect()
}

fn eval_term(k: usize, n: usize, coeffs: &[(usize, f64)], y: f64) -> f64 {
    let Some(max_j) = coeffs.iter().map(|(j, _)| *j).max() else {
        return 0.0;
    };
    let h = hermite_all(max_j, y);
    let inner: f64 = coeffs.iter().map(|(j, c)| c * h[j - 1]).sum();
    -normal_pdf(y) * (n as f64).powf(-(k as f64) / 2.0) * inner
}

struct Plan {
    n: usize,
    terms: Vec<(usize, Vec<(usize, f64)>)>,
}

impl Plan {
    fn eval(&self, y: f64) -> f64 {
        normal_cdf(y)
            + self
                .terms
                .iter()
                .map(|(k, coeffs)| eval_term(*k, self.n, coeffs, y))
                .sum::<f64>()
    }
}

/// `E Ŷ^{2s}` by binomial expansion, with whether `Ŷ` vanishes through
/// order `2s - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatEvenMoment {
    pub value: Cq,
    pub precondition_met: bool,
}

pub fn hat_even_moment(moments: &MomentSeq, s: usize) -> Result<HatEvenMoment> {
    moments_check(moments, 2 * s)?;
    let hat = hat_transform(&moments.truncate(2 * s));
    let precondition_met = s == 0 || vanishing_order(&hat) >= 2 * s - 1;
    Ok(HatEvenMoment { value: hat.get(2 * s).clone(), precondition_met })
}

fn moments_check(moments: &MomentSeq, order: usize) -> Result<()> {
    if moments.order() < order {
        return Err(Error::Precondition(format!(
            "needs moments through order {order}, have {}",
            moments.order()
        )));
    }
    Ok(())
}

/// One row of an Edgeworth curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeworthRow {
    pub y: f64,
    pub normal: f64,
    pub exact: Option<f64>,
    pub edgeworth: f64,
}

impl EdgeworthRow {
    pub fn abs_err(&self) -> Option<f64> {
        self.exact.map(|f| (f - self.edgeworth).abs())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with header `y,G,F_exact,edgeworth,abs_err`; the oracle columns are
/// empty when no exact distribution function is available.
pub fn curve_csv(rows: &[EdgeworthRow]) -> String {
    let mut out = String::from("y,G,F_exact,edgeworth,abs_err\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.y,
            row.normal,
            opt(row.exact),
            row.edgeworth,
            opt(row.abs_err())
        )
        .unwrap();
    }
    out
}

/// Rows for `ys`, with `exact` supplying the oracle column if present.
pub fn curve(
    model: &EdgeworthModel,
    n: usize,
    ys: &[f64],
    exact: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<Vec<EdgeworthRow>> {
    let values = model.edgeworth_grid(n, ys)?;
    Ok(ys
        .par_iter()
        .zip(values.par_iter())
        .map(|(&y, v)| EdgeworthRow {
            y,
            normal: normal_cdf(y),
            exact: exact.map(|f| f(y)),
            edgeworth: v.value,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomvars::{standardized, tests::catalog};
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Taylor series of erf, summed well past convergence.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        sum * 2.0 / PI.sqrt()
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert_eq!(hermite_eval(3, 2.0), 2.0);
        assert_eq!(hermite_eval(2, 0.0), -1.0);
        let h = hermite_all(10, 0.7);
        for n in 0..=10 {
            assert_eq!(h[n], hermite_eval(n, 0.7));
        }
        for n in 1..10 {
            let lhs = h[n + 1];
            let rhs = 0.7 * h[n] - n as f64 * h[n - 1];
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
        // H_4 = y^4 - 6y^2 + 3
        assert!((hermite_eval(4, 1.5) - (1.5f64.powi(4) - 6.0 * 2.25 + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn normal_examples() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for y in [0.1, 0.5, 1.0, 1.96, 2.5, 4.0] {
            assert!((normal_cdf(y) + normal_cdf(-y) - 1.0).abs() <= 1e-13);
        }
        assert!((normal_cdf(1.96) - 0.9750021).abs() < 5e-8);
        for y in [-2.0, -1.0, -0.3, 0.0, 0.8, 1.96, 2.4] {
            let oracle = 0.5 * (1.0 + erf_series(y / 2f64.sqrt()));
            assert!((normal_cdf(y) - oracle).abs() <= 1e-13, "y={y}");
        }
        assert!((normal_pdf(0.0) - 0.3989422804014327).abs() < 1e-16);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_set(3, 5, 2), vec![(1, 4)]);
        assert_eq!(delta_set(3, 5, 4), vec![(1, 6), (2, 8)]);
        assert_eq!(delta_set(2, 5, 1), vec![(1, 3)]);
        assert_eq!(delta_set(3, 1, 4), vec![(1, 6)]);
        assert!(delta_set(3, 5, 1).is_empty());
        for r in 2..6 {
            for k in r - 1..12 {
                for (m, j) in delta_set(r, 100, k) {
                    assert_eq!(j, 2 * m + k);
                    assert!(j >= m * (r + 1));
                }
            }
        }
    }

    fn uniform(k_max: usize) -> EdgeworthModel {
        EdgeworthModel::from_spec(&DistSpec::UniformStd, k_max).unwrap()
    }

    #[test]
    fn uniform_terms() {
        let model = uniform(4);
        assert_eq!(model.r(), 3);
        assert_eq!(model.leading_coefficient().unwrap(), q(1, 20));
        assert_eq!(model.term_coefficients(2, 16).unwrap(), vec![(4, q(-1, 20))]);
        assert!(model.term_coefficients(3, 16).unwrap().iter().all(|(_, c)| c.is_zero()));
        for y in [-2.0, -0.5, 0.0, 1.0, 2.0] {
            let t = model.edgeworth_term(2, 16, y).unwrap();
            let expected = normal_pdf(y) * hermite_eval(3, y) / 320.0;
            assert!((t - expected).abs() <= 1e-15);
            assert_eq!(model.edgeworth_term(3, 16, y).unwrap(), 0.0);
        }
        assert!(model.edgeworth_term(1, 16, 0.0).is_err());
        assert!(model.edgeworth_term(5, 16, 0.0).is_err());
    }

    #[test]
    fn uniform_cdf_examples() {
        let model = uniform(2);
        let v = model.edgeworth_cdf(16, 1.0).unwrap();
        let expected = normal_cdf(1.0) - 2.0 * normal_pdf(1.0) / 320.0;
        assert!((v.value - expected).abs() < 1e-15);
        assert!(!v.lattice_warning);
        assert_eq!(model.edgeworth_cdf(16, 0.0).unwrap().value, 0.5);
        let none = uniform(1);
        for y in [-1.0, 0.3, 2.0] {
            assert_eq!(none.edgeworth_cdf(9, y).unwrap().value, normal_cdf(y));
        }
    }

    #[test]
    fn leading_term_consistency() {
        for spec in catalog() {
            let Ok(m) = standardized(&moments_of(&spec, 12).unwrap()) else { continue };
            let Ok(model) = EdgeworthModel::new(&m, 4, spec.is_lattice()) else { continue };
            let r = model.r();
            if r - 1 > 4 {
                continue;
            }
            let lead = ratio_to_f64(&model.leading_coefficient().unwrap());
            for n in [4usize, 25] {
                for y in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                    let term = model.edgeworth_term(r - 1, n, y).unwrap();
                    let expected = normal_pdf(y) * hermite_eval(r, y) * lead * (n as f64).powf(-((r - 1) as f64) / 2.0);
                    assert!((term - expected).abs() <= 1e-12, "{spec:?} n={n} y={y}");
                }
            }
        }
    }

    #[test]
    fn hat_table_invariants() {
        for spec in catalog() {
            let Ok(m) = standardized(&moments_of(&spec, 14).unwrap()) else { continue };
            let Ok(model) = EdgeworthModel::new(&m, 4, false) else { continue };
            let table = model.hat_table();
            assert!(table.is_real());
            for (j, k, s) in table.triangle() {
                if j < k * (model.r() + 1) {
                    assert!(s.re.is_zero(), "{spec:?} j={j} m={k}");
                }
            }
        }
    }

    #[test]
    fn model_preconditions() {
        assert!(matches!(EdgeworthModel::from_spec(&DistSpec::Exponential, 3), Err(Error::Precondition(_))));
        let rad = EdgeworthModel::from_spec(&DistSpec::Rademacher, 3).unwrap();
        assert_eq!(rad.r(), 3);
        assert!(rad.edgeworth_cdf(10, 0.5).unwrap().lattice_warning);
        let short = moments_of(&DistSpec::UniformStd, 6).unwrap();
        assert!(matches!(EdgeworthModel::new(&short, 4, false), Err(Error::Precondition(_))));
        assert!(EdgeworthModel::new(&short, 2, false).is_ok());
        assert!(matches!(EdgeworthModel::with_order(&short, 4, 2, false), Err(Error::Precondition(_))));
        let with_two = EdgeworthModel::with_order(&moments_of(&DistSpec::UniformStd, 12).unwrap(), 2, 4, false).unwrap();
        let with_three = uniform(4);
        for y in [-1.5, 0.2, 1.1] {
            let a = with_two.edgeworth_cdf(12, y).unwrap().value;
            let b = with_three.edgeworth_cdf(12, y).unwrap().value;
            assert!((a - b).abs() < 1e-15);
        }
        let complex = MomentSeq::new(vec![Cq::from_int(1), Cq::i(), Cq::from_int(1)]).unwrap();
        assert!(matches!(EdgeworthModel::new(&complex, 1, false), Err(Error::Domain(_))));
        let normal = EdgeworthModel::from_spec(&DistSpec::normal(q(1, 1)), 4).unwrap();
        assert_eq!(normal.edgeworth_cdf(5, 0.7).unwrap().value, normal_cdf(0.7));
    }

    #[test]
    fn hat_even_examples() {
        let rad = moments_of(&DistSpec::Rademacher, 4).unwrap();
        assert_eq!(hat_even_moment(&rad, 2).unwrap(), HatEvenMoment { value: Cq::from_int(-2), precondition_met: true });
        let uni = moments_of(&DistSpec::UniformStd, 4).unwrap();
        assert_eq!(hat_even_moment(&uni, 2).unwrap().value, Cq::ratio(-6, 5));
        let normal = moments_of(&DistSpec::normal(q(1, 1)), 12).unwrap();
        for s in 1..=6 {
            assert_eq!(hat_even_moment(&normal, s).unwrap().value, Cq::zero());
        }
        // ±√3 w.p. 1/6 each, 0 w.p. 2/3: matches Z through order 5
        let three_point = MomentSeq::from_ints(&[1, 0, 1, 0, 3, 0, 9]).unwrap();
        let h = hat_even_moment(&three_point, 3).unwrap();
        assert!(h.precondition_met);
        assert_eq!(h.value, Cq::from_int(9 - 15));
        let exp = moments_of(&DistSpec::Exponential, 4).unwrap();
        assert!(!hat_even_moment(&exp, 2).unwrap().precondition_met);
    }

    /// Under the matching condition `E Ŷ^{2s} = E Y^{2s} - E Z^{2s}`.
    #[test]
    fn hat_even_matched_difference() {
        for spec in catalog() {
            let m = moments_of(&spec, 12).unwrap();
            for s in 1..=6 {
                let h = hat_even_moment(&m, s).unwrap();
                if h.precondition_met {
                    let z = Cq::from_bigint(crate::combinat::normal_moment(2 * s));
                    assert_eq!(h.value, m.get(2 * s) - &z, "{spec:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let model = uniform(2);
        let ys = [-1.0, 0.0, 1.0];
        let rows = curve(&model, 4, &ys, None).unwrap();
        let csv = curve_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "y,G,F_exact,edgeworth,abs_err");
        assert_eq!(lines[2], "0,0.5,,0.5,");
        let half = |_: f64| 0.5;
        let rows = curve(&model, 4, &ys, Some(&half)).unwrap();
        assert_eq!(rows[1].abs_err(), Some(0.0));
    }
}
