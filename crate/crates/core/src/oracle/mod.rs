//! Independent reference values: the exact Irwin–Hall law, Monte Carlo
//! estimators over pinned streams, and validation reports.

pub mod suite;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::{factorial, pascal};
use crate::edgeworth::EdgeworthModel;
use crate::error::{Error, Result};
use crate::randomvars::{moments_of, seeded_rng, DistSpec, Sampler};
use crate::scalar::ratio_to_f64;

/// `P(U_1 + ··· + U_n ≤ x) = (1/n!) Σ_{k ≤ ⌊x⌋} (-1)^k C(n,k) (x-k)^n`.
pub fn irwin_hall_cdf_exact(n: usize, x: &BigRational) -> BigRational {
    if !x.is_positive() {
        return if n == 0 { BigRational::one() } else { BigRational::zero() };
    }
    let n_q = BigRational::from_integer(BigInt::from(n));
    if *x >= n_q {
        return BigRational::one();
    }
    let top = x.floor().to_integer().to_usize().expect("0 <= x < n");
    let binom = pascal(n);
    let sum: BigRational = (0..=top)
        .map(|k| {
            let shifted = x - BigRational::from_integer(BigInt::from(k));
            let term = BigRational::from_integer(binom[n][k].clone()) * num_traits::pow(shifted, n);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    sum / BigRational::from_integer(factorial(n))
}

/// Irwin–Hall CDF at a float argument, evaluated exactly at the dyadic
/// rational equal to `x` and rounded once.
pub fn irwin_hall_cdf(n: usize, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x >= n as f64 {
        return 1.0;
    }
    let exact = BigRational::from_float(x).expect("finite");
    ratio_to_f64(&irwin_hall_cdf_exact(n, &exact))
}

/// The same alternating sum in `f64`, on the shorter side of `n/2`.
/// Cancellation makes this unreliable beyond `n ≈ 30`.
pub fn irwin_hall_cdf_float(n: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x >= n as f64 {
        return 1.0;
    }
    if x > n as f64 / 2.0 {
        return 1.0 - irwin_hall_cdf_float(n, n as f64 - x);
    }
    let mut sum = 0.0;
    let mut c = 1.0;
    for k in 0..=(x.floor() as usize) {
        let term = c * (x - k as f64).powi(n as i32);
        sum += if k % 2 == 0 { term } else { -term };
        c *= (n - k) as f64 / (k + 1) as f64;
    }
    let nf: f64 = (1..=n).map(|i| i as f64).product();
    sum / nf
}

/// `F_n(y) = P(S_n/√n ≤ y)` for sums of the standardized uniform.
pub fn uniform_fn_exact(n: usize, y: f64) -> f64 {
    let nf = n as f64;
    irwin_hall_cdf(n, y * nf.sqrt() / (2.0 * 3f64.sqrt()) + nf / 2.0)
}

/// One comparison of a computed value against a reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub quantity: String,
    pub reference: String,
    pub computed: String,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationReport {
    /// Numeric comparison: passes when `|computed - reference| ≤ tolerance`.
    pub fn numeric(quantity: impl Into<String>, reference: f64, computed: f64, tolerance: f64) -> Self {
        let abs_dev = (computed - reference).abs();
        ValidationReport {
            quantity: quantity.into(),
            reference: reference.to_string(),
            computed: computed.to_string(),
            abs_dev,
            rel_dev: rel(abs_dev, reference.abs()),
            tolerance,
            pass: abs_dev <= tolerance,
        }
    }

    /// Exact comparison of rationals, tolerance zero.
    pub fn exact(quantity: impl Into<String>, reference: &BigRational, computed: &BigRational) -> Self {
        let dev = (computed - reference).abs();
        let abs_dev = ratio_to_f64(&dev);
        ValidationReport {
            quantity: quantity.into(),
            reference: reference.to_string(),
            computed: computed.to_string(),
            abs_dev,
            rel_dev: rel(abs_dev, ratio_to_f64(&reference.abs())),
            tolerance: 0.0,
            pass: dev.is_zero(),
        }
    }

    /// Passes when `lo ≤ value ≤ hi`; the deviation is the distance outside.
    pub fn bracket(quantity: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let abs_dev = (lo - value).max(value - hi).max(0.0);
        ValidationReport {
            quantity: quantity.into(),
            reference: format!("[{lo}, {hi}]"),
            computed: value.to_string(),
            abs_dev,
            rel_dev: rel(abs_dev, value.abs()),
            tolerance: 0.0,
            pass: lo <= value && value <= hi,
        }
    }

    /// A property check with no scalar deviation.
    pub fn flag(quantity: impl Into<String>, holds: bool) -> Self {
        ValidationReport {
            quantity: quantity.into(),
            reference: "true".into(),
            computed: holds.to_string(),
            abs_dev: if holds { 0.0 } else { 1.0 },
            rel_dev: if holds { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: holds,
        }
    }
}

fn rel(abs_dev: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs_dev / scale
    } else {
        abs_dev
    }
}

/// Monte Carlo settings. Stream `i` is seeded with `seed + i` and results
/// are reduced in stream order.
#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub sigmas: f64,
    pub dkw_delta: f64,
    pub streams: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0,
            samples: 1_000_000,
            sigmas: 4.0,
            dkw_delta: 1e-3,
            streams: 16,
        }
    }
}

impl McConfig {
    pub fn with_seed(seed: u64) -> Self {
        McConfig { seed, ..Self::default() }
    }

    fn check(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::InvalidParameter(format!(
                "Monte Carlo needs at least 10^4 samples, got {}",
                self.samples
            )));
        }
        if self.streams == 0 {
            return Err(Error::InvalidParameter("at least one stream is needed".into()));
        }
        Ok(())
    }

    fn stream_sizes(&self) -> Vec<usize> {
        let base = self.samples / self.streams;
        let extra = self.samples % self.streams;
        (0..self.streams).map(|i| base + usize::from(i < extra)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Draws of `S_n`, grouped by stream.
fn draw_sums(spec: &DistSpec, n: usize, cfg: &McConfig) -> Result<Vec<Vec<f64>>> {
    cfg.check()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let sampler = Sampler::new(spec)?;
    Ok(cfg
        .stream_sizes()
        .into_par_iter()
        .enumerate()
        .map(|(i, size)| {
            let mut rng = seeded_rng(cfg.seed.wrapping_add(i as u64));
            (0..size).map(|_| sampler.sample_sum(n, &mut rng)).collect()
        })
        .collect())
}

/// Sample means of `S_n^j`, `j = 0..=j_max`, with standard errors, all from
/// the same draws.
pub fn mc_sum_moments(spec: &DistSpec, n: usize, j_max: usize, cfg: &McConfig) -> Result<Vec<McEstimate>> {
    let streams = draw_sums(spec, n, cfg)?;
    let partial: Vec<(Vec<f64>, Vec<f64>)> = streams
        .par_iter()
        .map(|draws| {
            let mut sum = vec![0.0; j_max + 1];
            let mut sq = vec![0.0; j_max + 1];
            for &s in draws {
                let mut p = 1.0;
                for j in 0..=j_max {
                    sum[j] += p;
                    sq[j] += p * p;
                    p *= s;
                }
            }
            (sum, sq)
        })
        .collect();
    let total = cfg.samples as f64;
    Ok((0..=j_max)
        .map(|j| {
            let sum: f64 = partial.iter().map(|(s, _)| s[j]).sum();
            let sq: f64 = partial.iter().map(|(_, q)| q[j]).sum();
            let mean = sum / total;
            let var = ((sq - total * mean * mean) / (total - 1.0)).max(0.0);
            McEstimate { mean, std_err: (var / total).sqrt(), samples: cfg.samples }
        })
        .collect())
}

pub fn mc_sum_moment(spec: &DistSpec, n: usize, j: usize, cfg: &McConfig) -> Result<McEstimate> {
    Ok(mc_sum_moments(spec, n, j, cfg)?[j])
}

/// `√(ln(2/δ)/(2N))`.
pub fn dkw_bound(samples: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    pub points: Vec<(f64, f64)>,
    pub dkw_bound: f64,
    pub samples: usize,
}

impl EmpiricalCdf {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].0 > w[1].0 || w[1].1 >= w[0].1)
    }
}

/// Empirical CDF of `S_n/√(n μ_2)` on `grid`.
pub fn mc_empirical_cdf(spec: &DistSpec, n: usize, grid: &[f64], cfg: &McConfig) -> Result<EmpiricalCdf> {
    let mu2 = ratio_to_f64(&moments_of(spec, 2)?.get(2).re);
    if !(mu2 > 0.0) {
        return Err(Error::Domain("normalization needs E Y^2 > 0".into()));
    }
    let scale = (n as f64 * mu2).sqrt();
    let mut draws: Vec<f64> = draw_sums(spec, n, cfg)?.concat();
    draws.par_iter_mut().for_each(|s| *s /= scale);
    draws.par_sort_unstable_by(f64::total_cmp);
    let total = draws.len() as f64;
    let points = grid
        .iter()
        .map(|&y| (y, draws.partition_point(|&s| s <= y) as f64 / total))
        .collect();
    Ok(EmpiricalCdf { points, dkw_bound: dkw_bound(cfg.samples, cfg.dkw_delta), samples: cfg.samples })
}

/// `√(E S_n^{2j} - (E S_n^j)^2)`: the standard deviation of one draw of
/// `S_n^j`, from exact moments.
pub fn exact_draw_std(spec: &DistSpec, n: usize, j: usize) -> Result<f64> {
    let seq = moments_of(spec, 2 * j)?;
    let sums = seq.to_egf().pow(n);
    let var = &sums.coeff(2 * j).re - &sums.coeff(j).re * &sums.coeff(j).re;
    Ok(ratio_to_f64(&var).max(0.0).sqrt())
}

/// `y = -3.0, -2.9, …, 3.0`.
pub fn rate_grid() -> Vec<f64> {
    (-30..=30).map(|i| i as f64 / 10.0).collect()
}

/// `sup_y |F_n(y) - edgeworth_cdf(y)|` for the standardized uniform with
/// truncation `K = k_max`.
pub fn uniform_edgeworth_error(n: usize, k_max: usize, grid: &[f64]) -> Result<f64> {
    let model = EdgeworthModel::from_spec(&DistSpec::UniformStd, k_max)?;
    let approx = model.edgeworth_grid(n, grid)?;
    Ok(grid
        .par_iter()
        .zip(approx.par_iter())
        .map(|(&y, v)| (uniform_fn_exact(n, y) - v.value).abs())
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn irwin_hall_examples() {
        for x in [q(0, 1), q(1, 7), q(1, 2), q(9, 10), q(1, 1)] {
            assert_eq!(irwin_hall_cdf_exact(1, &x), x);
        }
        assert_eq!(irwin_hall_cdf_exact(2, &q(1, 2)), q(1, 8));
        assert_eq!(irwin_hall_cdf_exact(3, &q(3, 2)), q(1, 2));
        assert_eq!(irwin_hall_cdf_exact(4, &q(-1, 3)), q(0, 1));
        assert_eq!(irwin_hall_cdf_exact(4, &q(5, 1)), q(1, 1));
        // 1 - (2-x)^2/2 on [1, 2]
        assert_eq!(irwin_hall_cdf_exact(2, &q(3, 2)), q(7, 8));
    }

    #[test]
    fn irwin_hall_properties() {
        for n in 1..=12usize {
            assert_eq!(irwin_hall_cdf_exact(n, &q(0, 1)), q(0, 1));
            assert_eq!(irwin_hall_cdf_exact(n, &BigRational::from_integer(n.into())), q(1, 1));
            let mut prev = q(0, 1);
            for i in 0..=(8 * n) {
                let x = q(i as i64, 8);
                let f = irwin_hall_cdf_exact(n, &x);
                assert!(f >= prev);
                let mirror = irwin_hall_cdf_exact(n, &(BigRational::from_integer(n.into()) - &x));
                assert_eq!(&f + &mirror, q(1, 1), "n={n} x={x}");
                prev = f;
            }
        }
    }

    #[test]
    fn float_paths_agree_for_small_n() {
        for n in 1..=20usize {
            for i in 1..40 {
                let x = n as f64 * i as f64 / 40.0 + 0.013;
                let a = irwin_hall_cdf(n, x);
                let b = irwin_hall_cdf_float(n, x);
                assert!((a - b).abs() < 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn standardized_uniform_examples() {
        for n in [1usize, 2, 5, 16, 64] {
            assert_eq!(uniform_fn_exact(n, 0.0), 0.5);
        }
        assert_eq!(uniform_fn_exact(1, 3f64.sqrt()), 1.0);
        let x = 1.0 + 1.0 / 6f64.sqrt();
        let closed = 1.0 - (2.0 - x) * (2.0 - x) / 2.0;
        assert!((uniform_fn_exact(2, 1.0) - closed).abs() < 1e-15);
        // triangular law of S_2 on [-2√3, 2√3]: upper tail (2√3 - s)^2 / 24
        let tail = (2.0 * 3f64.sqrt() - 2f64.sqrt()).powi(2) / 24.0;
        assert!((uniform_fn_exact(2, 1.0) - (1.0 - tail)).abs() < 1e-15);
        assert!((uniform_fn_exact(2, 1.0) - 0.8249).abs() < 1e-4);
    }

    fn small(seed: u64, samples: usize) -> McConfig {
        McConfig { seed, samples, ..McConfig::default() }
    }

    #[test]
    fn mc_examples() {
        let cfg = McConfig::with_seed(11);
        let point = mc_sum_moment(&DistSpec::point_mass(q(2, 1)), 3, 2, &small(1, 10_000)).unwrap();
        assert_eq!((point.mean, point.std_err), (36.0, 0.0));
        let rad = mc_sum_moment(&DistSpec::Rademacher, 2, 4, &cfg).unwrap();
        assert!((rad.mean - 8.0).abs() <= 4.0 * rad.std_err);
        let uni = mc_sum_moment(&DistSpec::UniformStd, 4, 2, &cfg).unwrap();
        assert!((uni.mean - 4.0).abs() <= 4.0 * uni.std_err);
        assert!(mc_sum_moment(&DistSpec::Custom { moments: vec![crate::Cq::from_int(1)] }, 1, 1, &cfg).is_err());
        assert!(mc_sum_moment(&DistSpec::Rademacher, 2, 1, &small(1, 100)).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let cfg = small(5, 20_000);
        let a = mc_sum_moments(&DistSpec::gamma(q(5, 2)), 3, 3, &cfg).unwrap();
        let b = mc_sum_moments(&DistSpec::gamma(q(5, 2)), 3, 3, &cfg).unwrap();
        assert_eq!(a, b);
        let c = mc_sum_moments(&DistSpec::gamma(q(5, 2)), 3, 3, &small(6, 20_000)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn standard_error_shrinks() {
        let mut ratio_sum = 0.0;
        let reps = 12;
        for rep in 0..reps {
            let seed = 1000 * rep;
            let se_n = mc_sum_moment(&DistSpec::UniformStd, 4, 2, &small(seed, 10_000)).unwrap().std_err;
            let se_2n = mc_sum_moment(&DistSpec::UniformStd, 4, 2, &small(seed + 500, 20_000)).unwrap().std_err;
            ratio_sum += se_2n / se_n;
        }
        assert!(ratio_sum / reps as f64 <= 0.8);
    }

    #[test]
    fn empirical_cdf_examples() {
        let cfg = McConfig::with_seed(3);
        let grid: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.25).collect();
        let uni = mc_empirical_cdf(&DistSpec::UniformStd, 4, &grid, &cfg).unwrap();
        assert!(uni.is_monotone());
        assert!((uni.dkw_bound - 0.0019495).abs() < 1e-6);
        for &(y, f) in &uni.points {
            assert!((f - uniform_fn_exact(4, y)).abs() <= uni.dkw_bound, "y={y}");
        }
        let normal = mc_empirical_cdf(&DistSpec::normal(q(4, 1)), 3, &[0.0], &cfg).unwrap();
        assert!((normal.points[0].1 - 0.5).abs() <= 0.002);
        assert!(mc_empirical_cdf(&DistSpec::point_mass(q(0, 1)), 3, &[0.0], &cfg).is_err());
    }

    #[test]
    fn exact_draw_std_examples() {
        // S_2^4 for Rademacher: E S^8 = 128, E S^4 = 8
        assert!((exact_draw_std(&DistSpec::Rademacher, 2, 4).unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(exact_draw_std(&DistSpec::point_mass(q(2, 1)), 3, 2).unwrap(), 0.0);
    }

    #[test]
    fn reports() {
        let ok = ValidationReport::numeric("x", 1.0, 1.05, 0.1);
        assert!(ok.pass && (ok.abs_dev - 0.05).abs() < 1e-12);
        assert!(!ValidationReport::numeric("x", 1.0, 1.2, 0.1).pass);
        let exact = ValidationReport::exact("y", &q(1, 3), &q(1, 3));
        assert!(exact.pass && exact.reference == "1/3");
        assert!(!ValidationReport::exact("y", &q(1, 3), &q(1, 2)).pass);
        let json = serde_json::to_string(&exact).unwrap();
        assert!(json.starts_with("{\"quantity\":\"y\""));
    }
}
