//! Moments of centered Lévy processes `Y(t)` and centered subordinators
//! `X(t) - t`, given by moment sequences of the jump laws.
//!
//! Both families share one finite sum. With variance parameter `s` and a
//! nonnegative auxiliary law `T`,
//!
//! `c_j(t) = Σ_{m=0}^{⌊j/2⌋} C(j,2m) s^m (2m-1)!! E W_m(2,T)^{j-2m} t^{m-⌊j/2⌋}`
//!
//! and `E Y(t)^j = c_j(t) t^{⌊j/2⌋}`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::combinat::{binomial, factorial, normal_moment};
use crate::error::{Error, Result};
use crate::randomvars::MomentSeq;
use crate::scalar::{ratio_to_f64, Cq};
use crate::stirling::weighted_sum_moment;

/// `σ²`, `κ² > 0` and the moments of `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevySpec {
    sigma2: BigRational,
    kappa2: BigRational,
    u_moments: MomentSeq,
}

impl LevySpec {
    pub fn new(sigma2: BigRational, kappa2: BigRational, u_moments: MomentSeq) -> Result<Self> {
        if sigma2.is_negative() {
            return Err(Error::InvalidParameter(format!("sigma2 must be >= 0, got {sigma2}")));
        }
        if !kappa2.is_positive() {
            return Err(Error::InvalidParameter(format!("kappa2 must be > 0, got {kappa2}")));
        }
        if !u_moments.is_real() {
            return Err(Error::InvalidParameter("U moments must be real".into()));
        }
        Ok(LevySpec { sigma2, kappa2, u_moments })
    }

    pub fn sigma2(&self) -> &BigRational {
        &self.sigma2
    }

    pub fn kappa2(&self) -> &BigRational {
        &self.kappa2
    }

    pub fn u_moments(&self) -> &MomentSeq {
        &self.u_moments
    }

    /// `σ² + κ²`.
    pub fn total_variance(&self) -> BigRational {
        &self.sigma2 + &self.kappa2
    }
}

/// `τ² ≥ 0` and the moments of `T*`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinatorSpec {
    tau2: BigRational,
    tstar_moments: MomentSeq,
}

impl SubordinatorSpec {
    pub fn new(tau2: BigRational, tstar_moments: MomentSeq) -> Result<Self> {
        if tau2.is_negative() {
            return Err(Error::InvalidParameter(format!("tau2 must be >= 0, got {tau2}")));
        }
        if !tstar_moments.is_real() || tstar_moments.as_slice().iter().any(|q| q.re.is_negative()) {
            return Err(Error::InvalidParameter("T* moments must be real and nonnegative".into()));
        }
        Ok(SubordinatorSpec { tau2, tstar_moments })
    }

    pub fn tau2(&self) -> &BigRational {
        &self.tau2
    }

    pub fn tstar_moments(&self) -> &MomentSeq {
        &self.tstar_moments
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessSpec {
    Levy(LevySpec),
    Subordinator(SubordinatorSpec),
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum ProcessRepr {
    Levy {
        #[serde(with = "crate::json::rational")]
        sigma2: BigRational,
        #[serde(with = "crate::json::rational")]
        kappa2: BigRational,
        #[serde(with = "crate::json::scalar_list")]
        u_moments: Vec<Cq>,
    },
    Subordinator {
        #[serde(with = "crate::json::rational")]
        tau2: BigRational,
        #[serde(with = "crate::json::scalar_list")]
        tstar_moments: Vec<Cq>,
    },
}

impl ProcessSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ProcessRepr = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value_repr(repr)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let repr: ProcessRepr = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value_repr(repr)
    }

    fn from_value_repr(repr: ProcessRepr) -> Result<Self> {
        match repr {
            ProcessRepr::Levy { sigma2, kappa2, u_moments } => {
                Ok(ProcessSpec::Levy(LevySpec::new(sigma2, kappa2, MomentSeq::new(u_moments)?)?))
            }
            ProcessRepr::Subordinator { tau2, tstar_moments } => Ok(ProcessSpec::Subordinator(
                SubordinatorSpec::new(tau2, MomentSeq::new(tstar_moments)?)?,
            )),
        }
    }

    /// Variance parameter and auxiliary moment sequence of the shared sum.
    fn parts(&self, order: usize) -> Result<(BigRational, MomentSeq)> {
        match self {
            ProcessSpec::Levy(spec) => Ok((spec.total_variance(), tstar_moments(spec, order)?)),
            ProcessSpec::Subordinator(spec) => {
                spec.tstar_moments.require_order(order)?;
                Ok((spec.tau2.clone(), spec.tstar_moments.truncate(order)))
            }
        }
    }

    /// `g_j(t)` or `h_j(t)`.
    pub fn moment_fn(&self, j: usize, t: &BigRational) -> Result<BigRational> {
        check_t(t)?;
        Ok(evaluate(&self.terms(j)?, t))
    }

    pub fn moment_fn_f64(&self, j: usize, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be positive and finite, got {t}")));
        }
        Ok(self
            .terms(j)?
            .iter()
            .map(|(p, c)| ratio_to_f64(c) * t.powi(-(*p as i32)))
            .sum())
    }

    /// `E Y(t)^j` (Lévy) or `E (X(t) - t)^j` (subordinator).
    pub fn central_moment(&self, j: usize, t: &BigRational) -> Result<BigRational> {
        Ok(self.moment_fn(j, t)? * num_traits::pow(t.clone(), j / 2))
    }

    /// All `(⌊j/2⌋ - m, c_m)` in order of increasing `m`, zeros included.
    pub fn terms(&self, j: usize) -> Result<Vec<(usize, BigRational)>> {
        let (s, aux) = self.parts(j.saturating_sub(2))?;
        Ok(theorem_terms(&s, &aux, j))
    }

    /// `κ_j = t s E T^{j-2}` for `j ≥ 2`.
    pub fn cumulant(&self, j: usize, t: &BigRational) -> Result<BigRational> {
        check_t(t)?;
        if j < 2 {
            return Err(Error::InvalidParameter(format!("cumulant formula needs j >= 2, got {j}")));
        }
        let (s, aux) = self.parts(j - 2)?;
        Ok(t * s * &aux.get(j - 2).re)
    }
}

fn check_t(t: &BigRational) -> Result<()> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    Ok(())
}

fn theorem_terms(s: &BigRational, aux: &MomentSeq, j: usize) -> Vec<(usize, BigRational)> {
    let half = j / 2;
    (0..=half)
        .map(|m| {
            let p = j - 2 * m;
            let w = if m == 0 {
                if p == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            } else {
                weighted_sum_moment(aux, 2, m, p).expect("order checked").re
            };
            let c = BigRational::from_integer(binomial(j, 2 * m) * normal_moment(2 * m))
                * num_traits::pow(s.clone(), m)
                * w;
            (half - m, c)
        })
        .collect()
}

fn evaluate(terms: &[(usize, BigRational)], t: &BigRational) -> BigRational {
    let inv = t.recip();
    terms
        .iter()
        .map(|(p, c)| c * num_traits::pow(inv.clone(), *p))
        .sum()
}

/// `E T★^k = κ²/(σ²+κ²) E U^k` for `k ≥ 1`.
pub fn tstar_moments(spec: &LevySpec, order: usize) -> Result<MomentSeq> {
    spec.u_moments.require_order(order)?;
    let w = &spec.kappa2 / spec.total_variance();
    let mu = (0..=order)
        .map(|k| if k == 0 { BigRational::one() } else { &w * &spec.u_moments.get(k).re })
        .collect();
    MomentSeq::from_rationals(mu)
}

/// `g_j(t)` for a centered Lévy process.
pub fn levy_moment_g(spec: &LevySpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Levy(spec.clone()).moment_fn(j, t)
}

pub fn levy_moment_g_f64(spec: &LevySpec, j: usize, t: f64) -> Result<f64> {
    ProcessSpec::Levy(spec.clone()).moment_fn_f64(j, t)
}

/// `E Y(t)^j = g_j(t) t^{⌊j/2⌋}`.
pub fn levy_moment(spec: &LevySpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Levy(spec.clone()).central_moment(j, t)
}

/// `h_j(t)` for a centered subordinator.
pub fn subordinator_moment_h(spec: &SubordinatorSpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Subordinator(spec.clone()).moment_fn(j, t)
}

pub fn subordinator_moment_h_f64(spec: &SubordinatorSpec, j: usize, t: f64) -> Result<f64> {
    ProcessSpec::Subordinator(spec.clone()).moment_fn_f64(j, t)
}

/// `E (X(t) - t)^j = h_j(t) t^{⌊j/2⌋}`.
pub fn subordinator_moment(spec: &SubordinatorSpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Subordinator(spec.clone()).central_moment(j, t)
}

/// Nonzero `(power of 1/t, coefficient)` pairs of `g_j` or `h_j`, in order
/// of increasing `m`. For Lévy specs only even `j` is accepted.
pub fn cm_coefficients(spec: &ProcessSpec, j: usize) -> Result<Vec<(usize, BigRational)>> {
    if matches!(spec, ProcessSpec::Levy(_)) && j % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "complete monotonicity is only asserted for even j on Lévy specs, got j = {j}"
        )));
    }
    Ok(spec.terms(j)?.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

pub fn is_completely_monotone(coeffs: &[(usize, BigRational)]) -> bool {
    coeffs.iter().all(|(_, c)| !c.is_negative())
}

/// `κ_j(Y(t)) = t (σ²+κ²) E T★^{j-2}`, `j ≥ 2`.
pub fn levy_cumulant(spec: &LevySpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Levy(spec.clone()).cumulant(j, t)
}

/// `κ_j(X(t)) = t τ² E T*^{j-2}`, `j ≥ 2`.
pub fn subordinator_cumulant(spec: &SubordinatorSpec, j: usize, t: &BigRational) -> Result<BigRational> {
    ProcessSpec::Subordinator(spec.clone()).cumulant(j, t)
}

/// Poisson process: `τ² = 1`, `T* = 1`.
pub fn poisson_subordinator(order: usize) -> SubordinatorSpec {
    SubordinatorSpec::new(BigRational::one(), MomentSeq::from_ints(&vec![1; order + 1]).unwrap()).unwrap()
}

/// Gamma process with unit rate: `τ² = 1`, `E T*^k = (k+1)!`.
pub fn gamma_subordinator(order: usize) -> SubordinatorSpec {
    let mu = (0..=order).map(|k| BigRational::from_integer(factorial(k + 1))).collect();
    SubordinatorSpec::new(BigRational::one(), MomentSeq::from_rationals(mu).unwrap()).unwrap()
}

/// Compensated Poisson process: `σ² = 0`, `κ² = 1`, `U = 1`.
pub fn compensated_unit_jump(order: usize) -> LevySpec {
    LevySpec::new(
        BigRational::zero(),
        BigRational::one(),
        MomentSeq::from_ints(&vec![1; order + 1]).unwrap(),
    )
    .unwrap()
}

/// CSV with header `t,j,value` over a `t × j` sweep of `g_j`/`h_j`.
pub fn sweep_csv(spec: &ProcessSpec, ts: &[BigRational], j_max: usize) -> Result<String> {
    let mut out = String::from("t,j,value\n");
    for t in ts {
        for j in 0..=j_max {
            writeln!(out, "{t},{j},{}", spec.moment_fn(j, t)?).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::cumulants_oracle;
    use crate::randomvars::{centered, moments_of, DistSpec};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ts() -> [BigRational; 3] {
        [q(1, 2), q(1, 1), q(5, 1)]
    }

    #[test]
    fn tstar_examples() {
        let u = MomentSeq::from_ints(&[1, 2, 6, 24]).unwrap();
        let pure = LevySpec::new(q(0, 1), q(3, 1), u.clone()).unwrap();
        assert_eq!(tstar_moments(&pure, 3).unwrap(), u);
        let half = LevySpec::new(q(2, 1), q(2, 1), u).unwrap();
        let t = tstar_moments(&half, 3).unwrap();
        assert_eq!(t.real_moments().unwrap(), vec![q(1, 1), q(1, 1), q(3, 1), q(12, 1)]);
    }

    #[test]
    fn compensated_jump_examples() {
        let spec = compensated_unit_jump(8);
        for t in ts() {
            assert_eq!(levy_moment_g(&spec, 3, &t).unwrap(), q(1, 1));
            assert_eq!(levy_moment_g(&spec, 4, &t).unwrap(), q(3, 1) + t.recip());
            assert_eq!(levy_moment(&spec, 3, &t).unwrap(), t);
        }
        assert!(matches!(levy_moment_g(&spec, 2, &q(0, 1)), Err(Error::Domain(_))));
        assert!(matches!(levy_moment_g(&spec, 2, &q(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn no_jumps_is_gaussian() {
        let spec = LevySpec::new(q(1, 2), q(3, 2), MomentSeq::from_ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap()).unwrap();
        for j in 0..=10 {
            let g = levy_moment_g(&spec, j, &q(7, 3)).unwrap();
            let expected = if j % 2 == 0 {
                num_traits::pow(q(2, 1), j / 2) * BigRational::from_integer(normal_moment(j))
            } else {
                q(0, 1)
            };
            assert_eq!(g, expected, "j={j}");
        }
        for j in [2usize, 4, 6, 8, 10] {
            let cm = cm_coefficients(&ProcessSpec::Levy(spec.clone()), j).unwrap();
            assert_eq!(cm.len(), 1);
            assert_eq!(cm[0].0, 0);
        }
        assert_eq!(levy_cumulant(&spec, 2, &q(3, 1)).unwrap(), q(6, 1));
        for j in 3..=8 {
            assert_eq!(levy_cumulant(&spec, j, &q(3, 1)).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn subordinator_examples() {
        let pois = poisson_subordinator(8);
        let gamma = gamma_subordinator(8);
        for t in ts() {
            assert_eq!(subordinator_moment_h(&pois, 3, &t).unwrap(), q(1, 1));
            assert_eq!(subordinator_moment_h(&pois, 4, &t).unwrap(), q(3, 1) + t.recip());
            assert_eq!(subordinator_moment_h(&gamma, 3, &t).unwrap(), q(2, 1));
            for spec in [&pois, &gamma] {
                assert_eq!(subordinator_moment_h(spec, 0, &t).unwrap(), q(1, 1));
                assert_eq!(subordinator_moment_h(spec, 1, &t).unwrap(), q(0, 1));
            }
        }
        let p = ProcessSpec::Subordinator(pois);
        assert_eq!(cm_coefficients(&p, 4).unwrap(), vec![(1, q(1, 1)), (0, q(3, 1))]);
        let g = ProcessSpec::Subordinator(gamma);
        assert_eq!(cm_coefficients(&g, 3).unwrap(), vec![(0, q(2, 1))]);
    }

    /// Centered moments of `Poisson(t)` and `Gamma(t, 1)` from the catalog.
    #[test]
    fn subordinators_match_centered_laws() {
        let pois = poisson_subordinator(8);
        let gamma = gamma_subordinator(8);
        for t in ts() {
            let exact_p = centered(&moments_of(&DistSpec::poisson(t.clone()), 8).unwrap());
            let exact_g = centered(&moments_of(&DistSpec::gamma(t.clone()), 8).unwrap());
            for j in 0..=8 {
                assert_eq!(subordinator_moment(&pois, j, &t).unwrap(), exact_p.get(j).re, "poisson j={j}");
                assert_eq!(subordinator_moment(&gamma, j, &t).unwrap(), exact_g.get(j).re, "gamma j={j}");
            }
        }
        let comp = compensated_unit_jump(8);
        for t in ts() {
            let exact = centered(&moments_of(&DistSpec::poisson(t.clone()), 8).unwrap());
            for j in 0..=8 {
                assert_eq!(levy_moment(&comp, j, &t).unwrap(), exact.get(j).re);
            }
        }
    }

    fn process_catalog() -> Vec<ProcessSpec> {
        let exp = moments_of(&DistSpec::Exponential, 12).unwrap();
        let bern = moments_of(&DistSpec::bernoulli(q(1, 3)), 12).unwrap();
        vec![
            ProcessSpec::Subordinator(poisson_subordinator(12)),
            ProcessSpec::Subordinator(gamma_subordinator(12)),
            ProcessSpec::Subordinator(SubordinatorSpec::new(q(5, 2), exp.clone()).unwrap()),
            ProcessSpec::Levy(compensated_unit_jump(12)),
            ProcessSpec::Levy(LevySpec::new(q(1, 2), q(3, 1), exp).unwrap()),
            ProcessSpec::Levy(LevySpec::new(q(2, 1), q(1, 7), bern).unwrap()),
        ]
    }

    #[test]
    fn coefficients_nonnegative() {
        for spec in process_catalog() {
            for j in 0..=10 {
                if matches!(spec, ProcessSpec::Levy(_)) && j % 2 == 1 {
                    assert!(cm_coefficients(&spec, j).is_err());
                    continue;
                }
                let cm = cm_coefficients(&spec, j).unwrap();
                assert!(is_completely_monotone(&cm), "{spec:?} j={j}");
            }
        }
    }

    #[test]
    fn cumulants_match_series_log() {
        for spec in process_catalog() {
            for t in ts() {
                let mu: Vec<BigRational> = (0..=8).map(|j| spec.central_moment(j, &t).unwrap()).collect();
                let log = cumulants_oracle(&MomentSeq::from_rationals(mu).unwrap());
                assert_eq!(log.get(1).re, q(0, 1));
                for j in 2..=8 {
                    assert_eq!(spec.cumulant(j, &t).unwrap(), log.get(j).re, "{spec:?} j={j}");
                }
            }
        }
        let comp = compensated_unit_jump(8);
        for j in 2..=8 {
            assert_eq!(levy_cumulant(&comp, j, &q(9, 4)).unwrap(), q(9, 4));
        }
        assert!(levy_cumulant(&comp, 1, &q(1, 1)).is_err());
        let gamma = gamma_subordinator(6);
        assert_eq!(subordinator_cumulant(&gamma, 5, &q(2, 1)).unwrap(), q(48, 1));
    }

    #[test]
    fn levy_matches_subordinator_through_tstar() {
        let u = moments_of(&DistSpec::Exponential, 10).unwrap();
        let levy = LevySpec::new(q(1, 3), q(2, 1), u).unwrap();
        let sub = SubordinatorSpec::new(levy.total_variance(), tstar_moments(&levy, 10).unwrap()).unwrap();
        for j in 0..=10 {
            assert_eq!(levy_moment_g(&levy, j, &q(3, 2)).unwrap(), subordinator_moment_h(&sub, j, &q(3, 2)).unwrap());
        }
    }

    #[test]
    fn float_path_tracks_exact() {
        let spec = gamma_subordinator(8);
        for j in 0..=8 {
            let exact = ratio_to_f64(&subordinator_moment_h(&spec, j, &q(5, 4)).unwrap());
            let float = subordinator_moment_h_f64(&spec, j, 1.25).unwrap();
            assert!((exact - float).abs() <= 1e-12 * exact.abs().max(1.0));
        }
        assert!(subordinator_moment_h_f64(&spec, 3, 0.0).is_err());
        let comp = compensated_unit_jump(4);
        assert!((levy_moment_g_f64(&comp, 4, 2.0).unwrap() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn order_is_checked() {
        let short = poisson_subordinator(2);
        assert!(matches!(subordinator_moment_h(&short, 4, &q(1, 1)), Ok(_)));
        assert!(matches!(subordinator_moment_h(&short, 5, &q(1, 1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_specs() {
        let levy = ProcessSpec::from_json(r#"{"sigma2":"1/2","kappa2":"1","u_moments":["1","1","1"]}"#).unwrap();
        assert!(matches!(levy, ProcessSpec::Levy(_)));
        let sub = ProcessSpec::from_json(r#"{"tau2":"1","tstar_moments":["1","2","6"]}"#).unwrap();
        assert!(matches!(sub, ProcessSpec::Subordinator(_)));
        assert!(ProcessSpec::from_json(r#"{"sigma2":"1","kappa2":"0","u_moments":["1"]}"#).is_err());
        assert!(ProcessSpec::from_json(r#"{"tau2":"1","tstar_moments":["1","-2"]}"#).is_err());
        assert!(ProcessSpec::from_json(r#"{"tau2":"1"}"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = sweep_csv(&ProcessSpec::Subordinator(poisson_subordinator(4)), &[q(1, 2), q(2, 1)], 4).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,j,value");
        assert_eq!(lines.len(), 11);
        assert!(lines.contains(&"1/2,4,5"));
        assert!(lines.contains(&"2,4,7/2"));
    }
}
