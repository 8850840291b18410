//! The eleven experiment tags. Each one returns named checks of the form
//! `value ≤ limit`, a structured payload, and optionally a CSV table.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{element, ExperimentConfig, Params};
use super::report::{float, to_json, Table};
use crate::coeffalg::{c, AlgElement, AlgebraSpec};
use crate::crossed::{
    alpha_norm, alpha_square, compression_matrix, exact_norm_finite, expectation, full_radius, l1_norm, norms,
    opnorm_bounds, star, twisted_mul, CcElement, Norm,
};
use crate::decay::{
    commutative_decay_chain, commutative_inequality_check, content_chain, decay_constant_probe,
    generalized_inequality_experiment, make_weight, tail_profile, ShellNorm,
};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::hilbmod::{EquivariantRep, ModuleVector};
use crate::ideals::{
    central_projection_split, e_invariance_probe, enumerate_invariant_ideals, ideal_membership, quotient_system,
    standard_commutants, MembershipMode,
};
use crate::multipliers::{apply_multiplier, pd_check, Multiplier, ModuleField, ScalarKernel};
use crate::summation::{abel_poisson_net, approx_data_net, fejer_net, run_convergence, ConvergenceReport, SummingNet};
use crate::system::{default_length, validate_system, TwistedSystem};
use crate::tol;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, pass: value <= limit }
    }

    /// Encodes `value ≥ floor` as `−value ≤ −floor`.
    pub fn at_least(name: &str, value: f64, floor: f64) -> Self {
        Check::at_most(name, -value, -floor)
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check::at_most(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Value,
    pub table: Option<Table>,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: &'a str,
    seed: u64,
    system: Value,
    pass: bool,
    checks: &'a [Check],
    results: &'a Value,
}

pub struct RunOutput {
    /// 0 when every check passes, 2 otherwise.
    pub exit_code: i32,
    pub json: String,
    pub csv: Option<String>,
}

/// Runs one configured experiment. Errors are configuration or parameter
/// errors; invariant violations are reported through the exit code.
pub fn run(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<RunOutput> {
    let seed = cfg.seed(seed_override)?;
    let sys = cfg.system()?;
    let p = &cfg.params;
    let outcome = match cfg.experiment.as_str() {
        "validate" => validate(&sys, p, seed),
        "arithmetic-suite" => arithmetic_suite(&sys, p, seed),
        "norms" => norms_experiment(&sys, p),
        "fejer" => fejer(&sys, p, seed),
        "abel-poisson" => abel_poisson(&sys, p),
        "approx-net" => approx_net(&sys, p, seed),
        "decay-probe" => decay_probe(&sys, p, seed),
        "content-probe" => content_experiment(&sys, p, seed),
        "commutative-inequality" => commutative_inequality(&sys, p, seed),
        "ideals" => ideals(&sys, p, seed),
        "psl-preset" => psl(&sys, p, seed),
        other => Err(Error::Config(format!("unknown experiment tag `{other}`"))),
    }?;
    let pass = outcome.checks.iter().all(|c| c.pass);
    let report = Report {
        experiment: &cfg.experiment,
        seed,
        system: json!({ "algebra": sys.algebra.blocks(), "group": sys.group }),
        pass,
        checks: &outcome.checks,
        results: &outcome.results,
    };
    Ok(RunOutput {
        exit_code: if pass { 0 } else { 2 },
        json: to_json(&report)?,
        csv: outcome.table.map(|t| t.to_csv()).transpose()?,
    })
}

/// Validation of the system alone, used by the `validate` command.
pub fn validate_only(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<RunOutput> {
    let seed = cfg.seed(seed_override)?;
    let sys = cfg.system()?;
    let outcome = validate(&sys, &cfg.params, seed)?;
    let pass = outcome.checks.iter().all(|c| c.pass);
    let report = Report {
        experiment: "validate",
        seed,
        system: json!({ "algebra": sys.algebra.blocks(), "group": sys.group }),
        pass,
        checks: &outcome.checks,
        results: &outcome.results,
    };
    Ok(RunOutput { exit_code: if pass { 0 } else { 2 }, json: to_json(&report)?, csv: None })
}

fn value(x: &impl Serialize) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

/// The whole group when it has at most 64 elements, else `ball(radius)`.
fn pool(sys: &TwistedSystem, radius: f64) -> Result<Vec<GroupElement>> {
    match sys.group.order() {
        Some(n) if n <= 64 => sys.group.elements(),
        _ => sys.group.ball(radius, default_length(&sys.group)),
    }
}

fn random_element(sys: &TwistedSystem, pool: &[GroupElement], rng: &mut ChaCha8Rng, max_support: usize) -> CcElement {
    let k = rng.random_range(1..=pool.len().min(max_support));
    let support: Vec<GroupElement> = pool.choose_multiple(rng, k).cloned().collect();
    CcElement::random(&sys.algebra, &support, rng)
}

fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64))
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn validate(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let triples = sys.validation_triples(p.validation_radius, p.validation_cap, seed)?;
    let mut probes = sys.algebra.matrix_units();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    probes.extend((0..4).map(|_| AlgElement::random(&sys.algebra, &mut rng)));
    let report = validate_system(sys, &triples, &probes);
    Ok(Outcome {
        checks: vec![Check::at_most("twisted-action-axioms", report.max_violation(), tol::ALGEBRAIC)],
        results: value(&report)?,
        table: None,
    })
}

/// Ring and involution laws, expectation identities and, on finite groups,
/// the regular-representation oracle.
fn arithmetic_suite(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let pool = pool(sys, p.radius)?;
    let regular = sys.group.order().is_some_and(|n| n <= 64);
    let radius = if regular { full_radius(&sys.group, default_length(&sys.group))? } else { 0.0 };
    let rows: Vec<[f64; 11]> = (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let f1 = random_element(sys, &pool, &mut rng, 5);
            let f2 = random_element(sys, &pool, &mut rng, 5);
            let f3 = random_element(sys, &pool, &mut rng, 5);
            let g = pool.choose(&mut rng).expect("nonempty pool").clone();
            let m = |a: &CcElement, b: &CcElement| twisted_mul(sys, a, b);
            let assoc = m(&m(&f1, &f2)?, &f3)?.dist(&m(&f1, &m(&f2, &f3)?)?);
            let dist_l = m(&f1, &f2.add(&f3)?)?.dist(&m(&f1, &f2)?.add(&m(&f1, &f3)?)?);
            let dist_r = m(&f1.add(&f2)?, &f3)?.dist(&m(&f1, &f3)?.add(&m(&f2, &f3)?)?);
            let invol = star(sys, &star(sys, &f1)).dist(&f1);
            let anti = star(sys, &m(&f1, &f2)?).dist(&m(&star(sys, &f2), &star(sys, &f1))?);
            let unit = CcElement::unit(sys);
            let unit_law = m(&unit, &f1)?.dist(&f1).max(m(&f1, &unit)?.dist(&f1));
            let e_square = expectation(sys, &m(&star(sys, &f1), &f1)?).dist(&alpha_square(sys, &f1));
            let dg = CcElement::delta(&sys.algebra, g.clone(), sys.one())?;
            let conj = m(&m(&dg, &f1)?, &star(sys, &dg))?;
            let e_cov = expectation(sys, &conj).dist(&sys.alpha_apply(&g, &expectation(sys, &f1)));
            let (reg_mul, reg_star) = if regular {
                let mat = |f: &CcElement| compression_matrix(sys, f, radius, default_length(&sys.group)).map(|r| r.dense());
                let (a, b) = (mat(&f1)?, mat(&f2)?);
                let prod = mat(&m(&f1, &f2)?)?;
                let adj = mat(&star(sys, &f1))?;
                (
                    (&prod - &a * &b).iter().map(|z| z.norm()).fold(0.0, f64::max),
                    (&adj - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max),
                )
            } else {
                (0.0, 0.0)
            };
            let star_add = star(sys, &f1.add(&f2)?).dist(&star(sys, &f1).add(&star(sys, &f2))?);
            Ok([assoc, dist_l, dist_r, invol, anti, unit_law, e_square, e_cov, reg_mul, reg_star, star_add])
        })
        .collect::<Result<_>>()?;
    let names = [
        "associativity",
        "left-distributivity",
        "right-distributivity",
        "involution",
        "star-antimultiplicative",
        "unit",
        "expectation-square",
        "expectation-covariance",
        "regular-multiplicative",
        "regular-adjoint",
        "star-additive",
    ];
    let checks: Vec<Check> = names
        .iter()
        .enumerate()
        .filter(|(_, name)| regular || !name.starts_with("regular"))
        .map(|(k, name)| Check::at_most(name, max_of(rows.iter().map(|r| r[k])), tol::ALGEBRAIC))
        .collect();
    Ok(Outcome {
        results: json!({ "samples": p.samples, "regular_oracle": regular }),
        checks,
        table: None,
    })
}

fn norms_experiment(sys: &TwistedSystem, p: &Params) -> Result<Outcome> {
    let f = element(sys, p.element.as_deref())?;
    let length = p.length.unwrap_or_else(|| default_length(&sys.group));
    let bounds = opnorm_bounds(sys, &f, &p.radii, length)?;
    let exact = match sys.group.order() {
        Some(n) if n <= 64 => Some(exact_norm_finite(sys, &f)?),
        _ => None,
    };
    let mut checks = vec![Check::at_most("lower-minus-upper", bounds.lower - bounds.upper, 1e-9)];
    if let Some(x) = exact {
        checks.push(Check::at_most("lower-minus-exact", bounds.lower - x, 1e-9));
        checks.push(Check::at_most("exact-minus-l1", x - bounds.upper, 1e-9));
    }
    let mut table = Table::new(&["radius", "ball_size", "singular_value", "lower", "upper"]);
    for row in &bounds.trace {
        table.push(vec![
            float(row.radius),
            row.ball_size.to_string(),
            float(row.singular_value),
            float(row.lower),
            float(bounds.upper),
        ]);
    }
    Ok(Outcome {
        results: json!({
            "bounds": bounds,
            "exact": exact,
            "l1": l1_norm(&f),
            "alpha": alpha_norm(sys, &f),
            "two": norms(sys, &f, Norm::L2)?,
        }),
        checks,
        table: Some(table),
    })
}

fn convergence_table(report: &ConvergenceReport, closed_form: &[f64]) -> Table {
    let mut header: Vec<String> =
        ["label", "l1_error", "closed_form", "alpha_error", "pointwise_error", "error_bar"].map(String::from).to_vec();
    header.extend(report.radii.iter().map(|r| format!("opnorm_error_r{r}")));
    let mut table = Table { header, rows: Vec::new() };
    for (row, cf) in report.rows.iter().zip(closed_form) {
        let mut cells = vec![
            row.label.clone(),
            float(row.l1_error),
            float(*cf),
            float(row.alpha_error),
            float(row.pointwise_error),
            float(row.error_bar),
        ];
        cells.extend(row.opnorm_error.iter().map(|&e| float(e)));
        table.push(cells);
    }
    table
}

/// `Σ |1 − φ(g)| ‖f(g)‖` for each scalar-kernel index.
fn scalar_closed_form(sys: &TwistedSystem, net: &SummingNet, f: &CcElement) -> Vec<f64> {
    net.indices
        .iter()
        .map(|idx| match &idx.multiplier {
            Multiplier::Scalar(k) => f
                .terms()
                .iter()
                .map(|(g, a)| (c(1.0, 0.0) - k.eval(&sys.group, g)).norm() * a.norm())
                .sum(),
            _ => f64::NAN,
        })
        .collect()
}

fn convergence_checks(report: &ConvergenceReport, closed_form: Option<&[f64]>) -> Vec<Check> {
    let last = report.rows.last().expect("nonempty schedule");
    let mut checks = vec![
        Check::at_most("final-l1-error", last.l1_error + last.error_bar, report.target_error),
        Check::flag("compression-dominated-by-l1", report.domination_holds),
    ];
    if let Some(cf) = closed_form {
        let gap = max_of(report.rows.iter().zip(cf).map(|(r, x)| (r.l1_error - x).abs()));
        checks.push(Check::at_most("closed-form-l1-error", gap, 1e-12));
    }
    checks
}

/// On finite groups, `‖T·f‖ ≤ bound·‖f‖` in the full regular representation.
fn contraction_check(sys: &TwistedSystem, net: &SummingNet, samples: usize, seed: u64) -> Result<Option<Check>> {
    if !sys.group.order().is_some_and(|n| n <= 64) {
        return Ok(None);
    }
    let pool = sys.group.elements()?;
    let excess: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let f = random_element(sys, &pool, &mut rng, pool.len());
            let base = exact_norm_finite(sys, &f)?;
            let mut worst = f64::NEG_INFINITY;
            for idx in &net.indices {
                let tf = apply_multiplier(sys, &idx.multiplier, &f)?;
                worst = worst.max(exact_norm_finite(sys, &tf)? - idx.declared_bound * base);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(Some(Check::at_most("contraction-excess", excess.into_iter().fold(f64::NEG_INFINITY, f64::max), 1e-9)))
}

fn fejer(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let net = fejer_net(&sys.group, &p.schedule)?;
    let f = element(sys, p.element.as_deref())?;
    let length = default_length(&sys.group);
    let mut pd = Vec::new();
    for (idx, &n) in net.indices.iter().zip(&p.schedule) {
        let Multiplier::Scalar(k) = &idx.multiplier else { unreachable!("Fejér kernels are scalar") };
        let set = match sys.group {
            Group::Lattice { dim: 1 } if n <= 16 => (-(n as i64)..=n as i64).map(|x| GroupElement::from_raw(vec![x])).collect(),
            Group::Lattice { .. } if n > 16 => continue,
            _ => pool(sys, (n as f64).min(4.0))?,
        };
        let _ = length;
        pd.push((idx.label.clone(), pd_check(&sys.group, k, &set)?));
    }
    let report = run_convergence(sys, &net, &f, &p.radii, p.target_error.unwrap_or(1e-2))?;
    let cf = scalar_closed_form(sys, &net, &f);
    let mut checks = convergence_checks(&report, Some(&cf));
    checks.push(Check::at_least("min-gram-eigenvalue", pd.iter().map(|(_, r)| r.min_eigenvalue).fold(0.0, f64::min), -1e-10));
    checks.extend(contraction_check(sys, &net, p.samples.min(50), seed)?);
    Ok(Outcome {
        table: Some(convergence_table(&report, &cf)),
        results: json!({ "convergence": report, "positive_definite": pd.into_iter().map(|(l, r)| json!({"label": l, "report": r})).collect::<Vec<_>>() }),
        checks,
    })
}

fn abel_poisson(sys: &TwistedSystem, p: &Params) -> Result<Outcome> {
    let length = p.length.unwrap_or(LengthFunction::OneNorm);
    let net = abel_poisson_net(&sys.group, length, &p.rates, p.eps)?;
    let f = element(sys, p.element.as_deref())?;
    let ball = sys.group.ball(4.0, length)?;
    let mut pd = Vec::new();
    for &r in &p.rates {
        pd.push((r, pd_check(&sys.group, &ScalarKernel::geometric(r, length)?, &ball)?));
    }
    let report = run_convergence(sys, &net, &f, &p.radii, p.target_error.unwrap_or(1e-3))?;
    let cf = scalar_closed_form(sys, &net, &f);
    let mut checks = convergence_checks(&report, Some(&cf));
    checks.push(Check::at_least("min-gram-eigenvalue", pd.iter().map(|(_, r)| r.min_eigenvalue).fold(0.0, f64::min), -1e-10));
    let truncations: Vec<_> = net.indices.iter().map(|i| (i.label.clone(), i.truncation.clone())).collect();
    Ok(Outcome {
        table: Some(convergence_table(&report, &cf)),
        results: json!({
            "length": length,
            "convergence": report,
            "truncations": truncations,
            "positive_definite": pd.into_iter().map(|(r, rep)| json!({"r": r, "report": rep})).collect::<Vec<_>>(),
        }),
        checks,
    })
}

/// Normalized indicator data `ξ = η = |F|^{-1/2} 1_F` on the shipped
/// Følner sets, in the trivial module `A`.
fn approx_net(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let zero = ModuleVector::zero(&sys.algebra, 1);
    let mut data = Vec::new();
    for &i in &p.schedule {
        let set = sys.group.folner(i)?;
        let x = ModuleVector::from_scalars(&sys.algebra, &[c(1.0 / (set.len() as f64).sqrt(), 0.0)]);
        let field = ModuleField::table(zero.clone(), set.into_iter().map(|g| (g, x.clone())).collect())?;
        data.push((field.clone(), field));
    }
    let net = approx_data_net(&EquivariantRep::trivial(), data)?;
    let f = element(sys, p.element.as_deref())?;
    let report = run_convergence(sys, &net, &f, &p.radii, p.target_error.unwrap_or(1e-2))?;
    let mut checks = convergence_checks(&report, None);
    checks.push(Check::at_most("declared-bound", max_of(net.indices.iter().map(|i| i.declared_bound)), 1.0 + 1e-12));
    checks.extend(contraction_check(sys, &net, p.samples.min(50), seed)?);
    let bounds: Vec<f64> = net.indices.iter().map(|i| i.declared_bound).collect();
    Ok(Outcome {
        table: Some(convergence_table(&report, &vec![f64::NAN; report.rows.len()])),
        results: json!({ "convergence": report, "declared_bounds": bounds }),
        checks,
    })
}

fn decay_probe(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let length = p.length.unwrap_or_else(|| default_length(&sys.group));
    let weight = make_weight(p.weight, length)?;
    let probe = decay_constant_probe(sys, &weight, p.radius, p.budget, seed)?;
    let summable = weight.inverse_l2_summable(&sys.group);
    let upper = weight.inverse_l2_norm_upper(&sys.group);
    let mut checks = Vec::new();
    // ‖Λ(f)‖ ≤ ‖f‖₁ ≤ ‖κ⁻¹‖₂‖f‖_{2,κ}, and ‖·‖_{α,κ} = ‖·‖_{2,κ} for A = ℂ
    if let (Some(u), true) = (upper, sys.algebra.blocks() == [1]) {
        checks.push(Check::at_most("lower-minus-inverse-weight-norm", probe.lower - u, 1e-9));
    }
    let max_shell = (2.0 * p.radius).ceil() as usize + 1;
    let rows = tail_profile(&sys.group, &probe.witness_element, length, max_shell, ShellNorm::L2)?;
    let mut table = Table::new(&["shell", "count", "norm"]);
    for r in &rows {
        table.push(vec![r.shell.to_string(), r.count.to_string(), float(r.norm)]);
    }
    Ok(Outcome {
        results: json!({ "probe": probe, "inverse_l2_summable": summable, "inverse_l2_norm_upper": upper, "witness_shells": rows }),
        checks,
        table: Some(table),
    })
}

fn content_experiment(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let length = default_length(&sys.group);
    let mut radii = p.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let chain: Vec<Vec<GroupElement>> = radii.iter().map(|&r| sys.group.ball(r, length)).collect::<Result<_>>()?;
    let est = content_chain(sys, &chain, p.budget, seed)?;
    let mut checks = vec![
        Check::at_most("lower-minus-size", max_of(est.iter().map(|e| e.lower - e.upper)), 1e-9),
        Check::at_most("chain-decrease", max_of(est.windows(2).map(|w| w[0].lower - w[1].lower)), 1e-12),
    ];
    if let Some(single) = est.iter().find(|e| e.set.len() == 1) {
        checks.push(Check::at_most("singleton-deviation", (single.lower - 1.0).abs(), 1e-9));
    }
    if sys.algebra.blocks() == [1] {
        let big = chain.last().expect("nonempty chain");
        let radius = 2.0 * big.iter().map(|g| sys.group.length(g, length)).fold(0.0, f64::max);
        let excess: Vec<f64> = (0..p.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i);
                let f = random_element(sys, big, &mut rng, big.len());
                let lower = compression_matrix(sys, &f, radius, length)?.largest_singular_value();
                Ok(lower - (big.len() as f64).sqrt() * norms(sys, &f, Norm::L2)?)
            })
            .collect::<Result<_>>()?;
        checks.push(Check::at_most(
            "scalar-content-excess",
            excess.into_iter().fold(f64::NEG_INFINITY, f64::max),
            1e-9,
        ));
    }
    let mut table = Table::new(&["radius", "size", "lower", "upper", "upper_scalar"]);
    for (r, e) in radii.iter().zip(&est) {
        table.push(vec![
            float(*r),
            e.set.len().to_string(),
            float(e.lower),
            float(e.upper),
            e.upper_scalar.map_or(String::new(), float),
        ]);
    }
    Ok(Outcome { results: json!({ "radii": radii, "estimates": est }), checks, table: Some(table) })
}

fn commutative_inequality(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    if !sys.algebra.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let pool = pool(sys, p.radius)?;
    let points = sys.algebra.num_blocks();
    let trivial = sys.action_is_trivial();
    // multiples of 1 are fixed by any action
    let fixed = |rng: &mut ChaCha8Rng| {
        let f = random_element(sys, &pool, rng, 6);
        if trivial {
            f
        } else {
            f.map_coefficients(|_, a| AlgElement::scalar(&sys.algebra, a.value(0)))
        }
    };
    let rows: Vec<(f64, f64, usize)> = (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let f = fixed(&mut rng);
            let xi = random_element(sys, &pool, &mut rng, 6);
            let wild = random_element(sys, &pool, &mut rng, 6);
            let (mut residual, mut pointwise, mut counterexamples) = (f64::INFINITY, f64::INFINITY, 0);
            for j in 0..points {
                let r = commutative_inequality_check(sys, &f, &xi, j)?;
                residual = residual.min(r.residual);
                pointwise = pointwise.min(r.pointwise_min_residual);
                if !generalized_inequality_experiment(sys, &wild, &xi, j)?.pass {
                    counterexamples += 1;
                }
            }
            Ok((residual, pointwise, counterexamples))
        })
        .collect::<Result<_>>()?;
    let min_residual = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let min_pointwise = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let counterexamples: usize = rows.iter().map(|r| r.2).sum();

    let length = p.length.unwrap_or_else(|| default_length(&sys.group));
    let weight = make_weight(p.weight, length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain_samples: Vec<CcElement> = (0..p.samples.clamp(1, 20)).map(|_| fixed(&mut rng)).collect();
    let chain = commutative_decay_chain(sys, &weight, &chain_samples, 2.0 * p.radius)?;
    Ok(Outcome {
        checks: vec![
            Check::at_least("min-residual", min_residual, -tol::INEQUALITY),
            Check::at_least("min-pointwise-residual", min_pointwise, -tol::INEQUALITY),
            Check::at_least("decay-chain-residual", chain.min_residual, -1e-9),
        ],
        results: json!({
            "samples": p.samples,
            "points": points,
            "min_residual": min_residual,
            "min_pointwise_residual": min_pointwise,
            "generalized_counterexamples": counterexamples,
            "decay_chain": chain,
        }),
        table: None,
    })
}

/// Scalar kernels shipped for the group: geometric kernels always, Fejér
/// where Følner sets exist, truncated Abel–Poisson on ℤ^d.
fn shipped_multipliers(sys: &TwistedSystem, p: &Params) -> Result<Vec<(String, Multiplier)>> {
    let length = default_length(&sys.group);
    let mut out: Vec<(String, Multiplier)> = Vec::new();
    for &r in &p.rates {
        out.push((format!("geometric r={r}"), Multiplier::Scalar(ScalarKernel::geometric(r, length)?)));
    }
    if matches!(sys.group, Group::Lattice { .. }) || sys.group.is_finite() {
        for idx in fejer_net(&sys.group, &p.schedule)?.indices {
            out.push((format!("fejer {}", idx.label), idx.multiplier));
        }
    }
    if matches!(sys.group, Group::Lattice { .. }) {
        for idx in abel_poisson_net(&sys.group, LengthFunction::OneNorm, &p.rates, p.eps)?.indices {
            out.push((format!("abel-poisson {}", idx.label), idx.multiplier));
        }
    }
    Ok(out)
}

fn ideals(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    let lattice = enumerate_invariant_ideals(sys)?;
    let pool = pool(sys, p.radius)?;
    let multipliers = shipped_multipliers(sys, p)?;
    let mut per_ideal = Vec::new();
    let (mut closure, mut leak, mut axioms, mut hom, mut e_viol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0usize);
    for (n, ideal) in lattice.ideals.iter().enumerate() {
        let rows: Vec<(f64, f64, f64)> = (0..p.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed ^ n as u64, i);
                let f = random_element(sys, &pool, &mut rng, 5).map_coefficients(|_, a| a.project(&ideal.blocks));
                let h = random_element(sys, &pool, &mut rng, 5);
                let mut c = 0.0f64;
                for z in [twisted_mul(sys, &h, &f)?, twisted_mul(sys, &f, &h)?] {
                    let alg = ideal_membership(&z, ideal, MembershipMode::InducedAlgebraic);
                    let hat = ideal_membership(&z, ideal, MembershipMode::HatJ);
                    c = c.max(alg.max_outside).max(hat.max_outside);
                }
                let mut l = 0.0f64;
                for (_, t) in &multipliers {
                    l = l.max(ideal_membership(&apply_multiplier(sys, t, &f)?, ideal, MembershipMode::HatJ).max_outside);
                }
                Ok((c, l, 0.0))
            })
            .collect::<Result<_>>()?;
        let c_max = max_of(rows.iter().map(|r| r.0));
        let l_max = max_of(rows.iter().map(|r| r.1));
        closure = closure.max(c_max);
        leak = leak.max(l_max);

        let mut quotient = Value::Null;
        if ideal.blocks.len() < sys.algebra.num_blocks() {
            let q = quotient_system(sys, ideal)?;
            let triples = q.system.validation_triples(p.validation_radius, p.validation_cap.min(1000), seed)?;
            let report = validate_system(&q.system, &triples, &q.system.algebra.matrix_units());
            axioms = axioms.max(report.max_violation());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
            let mut h_max = 0.0f64;
            for _ in 0..p.samples.min(20) {
                let f1 = random_element(sys, &pool, &mut rng, 5);
                let f2 = random_element(sys, &pool, &mut rng, 5);
                let lhs = q.map(&twisted_mul(sys, &f1, &f2)?)?;
                let rhs = twisted_mul(&q.system, &q.map(&f1)?, &q.map(&f2)?)?;
                h_max = h_max.max(lhs.dist(&rhs));
            }
            hom = hom.max(h_max);
            quotient = json!({ "blocks": q.system.algebra.blocks(), "validation": report, "homomorphism_residual": h_max });
        }
        let mut e_report = Value::Null;
        if !ideal.is_zero() {
            let gen = CcElement::delta(&sys.algebra, sys.group.identity(), sys.one().project(&ideal.blocks))?;
            let r = e_invariance_probe(sys, &[gen], p.samples.min(50), seed)?;
            e_viol += r.violations;
            e_report = value(&r)?;
        }
        per_ideal.push(json!({
            "blocks": ideal.blocks,
            "closure_max_outside": c_max,
            "net_leak": l_max,
            "quotient": quotient,
            "e_invariance": e_report,
        }));
    }
    Ok(Outcome {
        checks: vec![
            Check::at_most("ideal-closure", closure, tol::MEMBERSHIP),
            Check::at_most("net-ideal-leak", leak, tol::MEMBERSHIP),
            Check::at_most("quotient-axioms", axioms, tol::ALGEBRAIC),
            Check::at_most("quotient-homomorphism", hom, tol::ALGEBRAIC),
            Check::at_most("e-invariance-violations", e_viol as f64, 0.0),
        ],
        results: json!({
            "orbits": lattice.orbits,
            "count": lattice.ideals.len(),
            "multipliers": multipliers.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>(),
            "ideals": per_ideal,
        }),
        table: None,
    })
}

fn psl(sys: &TwistedSystem, p: &Params, seed: u64) -> Result<Outcome> {
    if sys.algebra != AlgebraSpec::commutative(2) {
        return Err(Error::Config("psl-preset needs A = ℂ²".into()));
    }
    let triples = sys.validation_triples(3.0, usize::MAX, seed)?;
    let validation = validate_system(sys, &triples, &sys.algebra.matrix_units());
    let s = CcElement::delta(&sys.algebra, sys.group.identity(), AlgElement::from_values(&[c(1.0, 0.0), c(-1.0, 0.0)]))?;
    let (proj_p, proj_q, split) = central_projection_split(sys, &s, &standard_commutants(sys)?)?;
    let ideal_outcome = ideals(sys, p, seed)?;
    let mut checks = vec![
        Check::at_most("section-cocycle-axioms", validation.max_violation(), tol::ALGEBRAIC),
        Check::at_most("projection-idempotent", split.idempotent, tol::ALGEBRAIC),
        Check::at_most("projection-orthogonal", split.orthogonal, tol::ALGEBRAIC),
        Check::at_most("projection-sum", split.sum, tol::ALGEBRAIC),
    ];
    checks.extend(ideal_outcome.checks);
    Ok(Outcome {
        results: json!({
            "validation": validation,
            "p": crate::crossed::term_records(&sys.group, &proj_p),
            "q": crate::crossed::term_records(&sys.group, &proj_q),
            "split": split,
            "ideals": ideal_outcome.results,
        }),
        checks,
        table: None,
    })
}
