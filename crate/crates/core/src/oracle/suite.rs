//! Validation suites behind the `validate` command. Each check compares a
//! production route against an independent one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{
    dkw_bound, exact_draw_std, mc_empirical_cdf, mc_sum_moments, rate_grid, uniform_edgeworth_error,
    uniform_fn_exact, McConfig, ValidationReport,
};
use crate::edgeworth::{hermite_eval, normal_pdf, EdgeworthModel};
use crate::error::{Error, Result};
use crate::levy::{
    cm_coefficients, compensated_unit_jump, gamma_subordinator, is_completely_monotone, levy_cumulant,
    poisson_subordinator, subordinator_moment_h, LevySpec, ProcessSpec, SubordinatorSpec,
};
use crate::moments::{
    cumulants_binomial, cumulants_from_stirling, cumulants_oracle, even_moment_sequence, sum_moment_from_table,
    sum_moment_recursion,
};
use crate::randomvars::{centered, hat_transform, moments_of, vanishing_order, DistSpec, MomentSeq};
use crate::scalar::ratio_to_f64;
use crate::stirling::{
    bound_holds_for, classical_s2, psn_egf, table_direct, table_gr_rep, table_via_classical,
};

pub const SUITES: [&str; 7] = ["stirling", "moments", "cumulants", "levy", "edgeworth", "mc", "all"];

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// The catalog used by the checks, with display names.
pub fn catalog() -> Vec<(String, DistSpec)> {
    [
        DistSpec::point_mass(q(1, 1)),
        DistSpec::point_mass(q(2, 1)),
        DistSpec::Rademacher,
        DistSpec::bernoulli(q(1, 2)),
        DistSpec::bernoulli(q(1, 3)),
        DistSpec::UniformStd,
        DistSpec::poisson(q(1, 1)),
        DistSpec::poisson(q(3, 2)),
        DistSpec::Exponential,
        DistSpec::gamma(q(5, 2)),
        DistSpec::normal(q(1, 1)),
        DistSpec::normal(q(4, 1)),
    ]
    .into_iter()
    .map(|s| (label(&s), s))
    .collect()
}

pub fn label(spec: &DistSpec) -> String {
    match spec {
        DistSpec::PointMass { c } => format!("point_mass({c})"),
        DistSpec::Bernoulli { p } => format!("bernoulli({p})"),
        DistSpec::Poisson { lambda } => format!("poisson({lambda})"),
        DistSpec::Gamma { shape } => format!("gamma({shape})"),
        DistSpec::Normal { variance } => format!("normal({variance})"),
        other => other.name().to_string(),
    }
}

/// Sequences for the route-agreement checks, including two hat transforms.
pub fn route_sequences(order: usize) -> Result<Vec<(String, MomentSeq)>> {
    let mut out = Vec::new();
    for spec in [
        DistSpec::Rademacher,
        DistSpec::bernoulli(q(1, 2)),
        DistSpec::UniformStd,
        DistSpec::poisson(q(1, 1)),
        DistSpec::Exponential,
        DistSpec::normal(q(1, 1)),
    ] {
        out.push((label(&spec), moments_of(&spec, order)?));
    }
    for spec in [DistSpec::UniformStd, DistSpec::Rademacher] {
        out.push((format!("hat({})", label(&spec)), hat_transform(&moments_of(&spec, order)?)));
    }
    Ok(out)
}

pub fn run(name: &str, cfg: &McConfig) -> Result<Vec<ValidationReport>> {
    match name {
        "stirling" => stirling(),
        "moments" => moments(),
        "cumulants" => cumulants(),
        "levy" => levy(),
        "edgeworth" => edgeworth(),
        "mc" => monte_carlo(cfg),
        "all" => {
            let mut out = Vec::new();
            for part in &SUITES[..SUITES.len() - 1] {
                out.extend(run(part, cfg)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown suite '{other}', expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

pub fn stirling() -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    let point = psn_egf(&moments_of(&DistSpec::point_mass(q(1, 1)), 12)?);
    let classical = point
        .triangle()
        .all(|(j, m, s)| s.is_real() && s.re == int(classical_s2(j, m)));
    out.push(ValidationReport::flag("stirling/classical_recovery/j<=12", classical));
    out.push(ValidationReport::exact("stirling/S(4,2)", &q(7, 1), &point.get(4, 2).re));
    out.push(ValidationReport::exact("stirling/S(5,3)", &q(25, 1), &point.get(5, 3).re));
    for (name, m) in route_sequences(10)? {
        let egf = psn_egf(&m);
        let r = vanishing_order(&m);
        let mut agree = egf.entries_eq(&table_direct(&m)) && egf.entries_eq(&table_via_classical(&m));
        agree &= egf.entries_eq(&table_gr_rep(&m, r)?);
        out.push(ValidationReport::flag(format!("stirling/routes/{name}"), agree));
        let zeros = egf.triangle().all(|(j, k, s)| j >= k * (r + 1) || s.re.is_zero() && s.im.is_zero());
        out.push(ValidationReport::flag(format!("stirling/vanishing/{name}/r={r}"), zeros));
    }
    let rad = psn_egf(&moments_of(&DistSpec::Rademacher, 4)?);
    out.push(ValidationReport::exact("stirling/rademacher/S(4,2)", &q(3, 1), &rad.get(4, 2).re));
    for (name, spec) in catalog() {
        let mut holds = true;
        for j in 0..=10 {
            for m in 0..=j {
                holds &= bound_holds_for(&spec, j, m)?.holds;
            }
        }
        out.push(ValidationReport::flag(format!("stirling/bound/{name}/j<=10"), holds));
    }
    Ok(out)
}

pub fn moments() -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    for (name, spec) in catalog() {
        let m = moments_of(&spec, 10)?;
        let r = vanishing_order(&m);
        let table = psn_egf(&m);
        let mut identity = true;
        let mut recursion = true;
        for n in 0..=20usize {
            let power = m.to_egf().pow(n);
            for j in 0..=10usize {
                let s = sum_moment_from_table(&table, r, n, j);
                identity &= s == *power.coeff(j);
                let tau = j / (r + 1);
                if j <= 8 && tau >= 1 && n >= tau {
                    recursion &= sum_moment_recursion(&m, n, j)? == s;
                }
            }
        }
        out.push(ValidationReport::flag(format!("moments/identity/{name}"), identity));
        out.push(ValidationReport::flag(format!("moments/recursion/{name}"), recursion));
    }
    let rad = moments_of(&DistSpec::Rademacher, 4)?;
    let table = psn_egf(&rad);
    for n in 1..=20i64 {
        let s = sum_moment_from_table(&table, 1, n as usize, 4);
        out.push(ValidationReport::exact(format!("moments/rademacher/E S_{n}^4"), &q(3 * n * n - 2 * n, 1), &s.re));
        if n >= 2 {
            let rec = sum_moment_recursion(&rad, n as usize, 4)?;
            let closed = (q(3, 1) + q(1, n - 1)) * int(n * (n - 1));
            out.push(ValidationReport::exact(format!("moments/rademacher/recursion n={n}"), &closed, &rec.re));
        }
    }
    for (name, spec) in catalog() {
        let m = centered(&moments_of(&spec, 8)?);
        if m.get(2).is_zero() {
            continue;
        }
        for j in 1..=4 {
            let seq = even_moment_sequence(&m, j, 50)?;
            let ok = seq.is_non_increasing() && seq.bounded_below_by_limit();
            out.push(ValidationReport::flag(format!("moments/monotone/{name}/j={j}"), ok));
        }
    }
    let uni = moments_of(&DistSpec::UniformStd, 6)?;
    for (j, limit) in [(2usize, 3i64), (3, 15)] {
        let seq = even_moment_sequence(&uni, j, 50)?;
        out.push(ValidationReport::exact(format!("moments/limit/j={j}"), &q(limit, 1), &seq.limit));
    }
    Ok(out)
}

pub fn cumulants() -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    for (name, spec) in catalog() {
        let m = moments_of(&spec, 8)?;
        let oracle = cumulants_oracle(&m);
        let ok = cumulants_from_stirling(&m) == oracle && cumulants_binomial(&m) == oracle;
        out.push(ValidationReport::flag(format!("cumulants/routes/{name}"), ok));
    }
    let pois = cumulants_from_stirling(&moments_of(&DistSpec::poisson(q(1, 1)), 8)?);
    for j in 1..=8 {
        out.push(ValidationReport::exact(format!("cumulants/poisson(1)/k{j}"), &q(1, 1), &pois.get(j).re));
    }
    let normal = cumulants_from_stirling(&moments_of(&DistSpec::normal(q(4, 1)), 8)?);
    for j in 1..=8 {
        let expected = if j == 2 { q(4, 1) } else { q(0, 1) };
        out.push(ValidationReport::exact(format!("cumulants/normal(4)/k{j}"), &expected, &normal.get(j).re));
    }
    let rad = cumulants_from_stirling(&moments_of(&DistSpec::Rademacher, 4)?);
    out.push(ValidationReport::exact("cumulants/rademacher/k4", &q(-2, 1), &rad.get(4).re));
    Ok(out)
}

pub fn levy_catalog() -> Result<Vec<(String, ProcessSpec)>> {
    let exp = moments_of(&DistSpec::Exponential, 12)?;
    let bern = moments_of(&DistSpec::bernoulli(q(1, 3)), 12)?;
    Ok(vec![
        ("poisson_subordinator".into(), ProcessSpec::Subordinator(poisson_subordinator(12))),
        ("gamma_subordinator".into(), ProcessSpec::Subordinator(gamma_subordinator(12))),
        (
            "subordinator(5/2,exponential)".into(),
            ProcessSpec::Subordinator(SubordinatorSpec::new(q(5, 2), exp.clone())?),
        ),
        ("compensated_unit_jump".into(), ProcessSpec::Levy(compensated_unit_jump(12))),
        ("levy(1/2,3,exponential)".into(), ProcessSpec::Levy(LevySpec::new(q(1, 2), q(3, 1), exp)?)),
        ("levy(2,1/7,bernoulli(1/3))".into(), ProcessSpec::Levy(LevySpec::new(q(2, 1), q(1, 7), bern)?)),
    ])
}

pub fn levy() -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    let pois = poisson_subordinator(8);
    let gamma = gamma_subordinator(8);
    for t in [q(1, 2), q(1, 1), q(5, 1)] {
        out.push(ValidationReport::exact(format!("levy/poisson/h3(t={t})"), &q(1, 1), &subordinator_moment_h(&pois, 3, &t)?));
        let h4 = q(3, 1) + t.recip();
        out.push(ValidationReport::exact(format!("levy/poisson/h4(t={t})"), &h4, &subordinator_moment_h(&pois, 4, &t)?));
        out.push(ValidationReport::exact(format!("levy/gamma/h3(t={t})"), &q(2, 1), &subordinator_moment_h(&gamma, 3, &t)?));
        let exact_p = centered(&moments_of(&DistSpec::poisson(t.clone()), 8)?);
        let exact_g = centered(&moments_of(&DistSpec::gamma(t.clone()), 8)?);
        let mut ok = true;
        for j in 0..=8 {
            ok &= ProcessSpec::Subordinator(pois.clone()).central_moment(j, &t)? == exact_p.get(j).re;
            ok &= ProcessSpec::Subordinator(gamma.clone()).central_moment(j, &t)? == exact_g.get(j).re;
        }
        out.push(ValidationReport::flag(format!("levy/centered_laws(t={t})"), ok));
    }
    for (name, spec) in levy_catalog()? {
        let mut ok = true;
        for j in 0..=10 {
            if matches!(spec, ProcessSpec::Levy(_)) && j % 2 == 1 {
                continue;
            }
            ok &= is_completely_monotone(&cm_coefficients(&spec, j)?);
        }
        out.push(ValidationReport::flag(format!("levy/cm/{name}/j<=10"), ok));
        let t = q(7, 3);
        let mu: Vec<BigRational> = (0..=8).map(|j| spec.central_moment(j, &t)).collect::<Result<_>>()?;
        let log = cumulants_oracle(&MomentSeq::from_rationals(mu)?);
        let mut agree = true;
        for j in 2..=8 {
            agree &= spec.cumulant(j, &t)? == log.get(j).re;
        }
        out.push(ValidationReport::flag(format!("levy/cumulants/{name}"), agree));
    }
    let comp = compensated_unit_jump(8);
    for j in 2..=8 {
        out.push(ValidationReport::exact(format!("levy/compensated/k{j}(t=3/2)"), &q(3, 2), &levy_cumulant(&comp, j, &q(3, 2))?));
    }
    Ok(out)
}

pub fn edgeworth() -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    let model = EdgeworthModel::from_spec(&DistSpec::UniformStd, 4)?;
    let lead = model.leading_coefficient().expect("r + 1 within order");
    out.push(ValidationReport::exact("edgeworth/uniform/leading_coefficient", &q(1, 20), &lead));
    let r = model.r();
    let hat = &model.hat_moment(r + 1).expect("available").re;
    let factor = ratio_to_f64(hat) / (1..=r + 1).map(|i| i as f64).product::<f64>();
    for n in [4usize, 16] {
        for y in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let expected = -normal_pdf(y) * hermite_eval(r, y) * factor * (n as f64).powf(-((r - 1) as f64) / 2.0);
            let term = model.edgeworth_term(r - 1, n, y)?;
            out.push(ValidationReport::numeric(format!("edgeworth/uniform/leading_term(n={n},y={y})"), expected, term, 1e-12));
        }
    }
    let grid = rate_grid();
    let errors: Vec<f64> = [8usize, 16, 32, 64]
        .iter()
        .map(|&n| uniform_edgeworth_error(n, 2, &grid))
        .collect::<Result<_>>()?;
    for (i, n) in [8usize, 16, 32].iter().enumerate() {
        let ratio = errors[i + 1] / errors[i];
        out.push(ValidationReport::bracket(format!("edgeworth/uniform/rate E_{}/E_{n}", 2 * n), ratio, 0.25 * 0.7, 0.5 * 1.4));
    }
    for (i, n) in [(1usize, 16usize), (2, 32)] {
        let k4 = uniform_edgeworth_error(n, 4, &grid)?;
        out.push(ValidationReport::flag(format!("edgeworth/uniform/K=4 improves (n={n}): {k4:e} < {:e}", errors[i]), k4 < errors[i]));
    }
    Ok(out)
}

/// Monte Carlo checks at `cfg.sigmas` standard errors and the DKW bound.
pub fn monte_carlo(cfg: &McConfig) -> Result<Vec<ValidationReport>> {
    let mut out = Vec::new();
    let mut sub = 0u64;
    let mut next_seed = || {
        sub += 1;
        McConfig { seed: cfg.seed.wrapping_add(sub * 1_000), ..cfg.clone() }
    };
    let sd = (cfg.samples as f64).sqrt();
    for (name, spec) in catalog() {
        let exact = moments_of(&spec, 4)?;
        for n in [1usize, 2, 4, 8] {
            let est = mc_sum_moments(&spec, n, 4, &next_seed())?;
            let sums = exact.to_egf().pow(n);
            for j in 1..=4 {
                let reference = ratio_to_f64(&sums.coeff(j).re);
                let tol = cfg.sigmas * exact_draw_std(&spec, n, j)? / sd;
                out.push(ValidationReport::numeric(
                    format!("mc/sum_moment/{name}/n={n}/j={j}"),
                    reference,
                    est[j].mean,
                    tol,
                ));
            }
        }
    }
    let grid: Vec<f64> = (-12..=12).map(|i| i as f64 * 0.25).collect();
    let bound = dkw_bound(cfg.samples, cfg.dkw_delta);
    for n in [1usize, 2, 4, 8] {
        let cdf = mc_empirical_cdf(&DistSpec::UniformStd, n, &grid, &next_seed())?;
        let worst = cdf
            .points
            .iter()
            .map(|&(y, f)| (f - uniform_fn_exact(n, y)).abs())
            .fold(0.0, f64::max);
        out.push(ValidationReport::numeric(format!("mc/cdf/uniform_std/n={n}/sup_dev"), 0.0, worst, bound));
        out.push(ValidationReport::flag(format!("mc/cdf/uniform_std/n={n}/monotone"), cdf.is_monotone()));
    }
    for spec in [DistSpec::UniformStd, DistSpec::normal(q(1, 1)), DistSpec::normal(q(4, 1)), DistSpec::Rademacher] {
        for n in [1usize, 3, 5] {
            let cdf = mc_empirical_cdf(&spec, n, &[0.0], &next_seed())?;
            out.push(ValidationReport::numeric(
                format!("mc/cdf/{}/n={n}/y=0", label(&spec)),
                0.5,
                cdf.points[0].1,
                0.002,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failures(reports: &[ValidationReport]) -> Vec<&ValidationReport> {
        reports.iter().filter(|r| !r.pass).collect()
    }

    #[test]
    fn exact_suites_pass() {
        for name in ["stirling", "moments", "cumulants", "levy", "edgeworth"] {
            let reports = run(name, &McConfig::default()).unwrap();
            assert!(!reports.is_empty());
            assert!(failures(&reports).is_empty(), "{name}: {:#?}", failures(&reports));
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run("nope", &McConfig::default()), Err(Error::InvalidParameter(_))));
    }
}
