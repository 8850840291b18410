//! Fourier summing nets and convergence diagnostics.

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffalg::AlgElement;
use crate::crossed::{alpha_norm, check_system, compression_matrix, l1_norm, CcElement};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::hilbmod::EquivariantRep;
use crate::multipliers::{apply_multiplier, make_approx_data_multiplier, ModuleField, Multiplier, ScalarKernel};
use crate::system::{default_length, TwistedSystem};

/// Default truncation level for infinite-support kernels.
pub const TRUNCATION_EPS: f64 = 1e-8;

/// Pointwise target `‖T^i_g(a) − a‖` at the last index.
pub const POINTWISE_TARGET: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Truncation {
    pub eps: f64,
    /// Kernel values with `L(g) > radius` are dropped.
    pub radius: f64,
    /// Certified bound on the dropped `Σ |φ(g)|`.
    pub tail_bound: f64,
}

#[derive(Clone, Debug)]
pub struct NetIndex {
    pub label: String,
    pub multiplier: Multiplier,
    pub declared_bound: f64,
    pub truncation: Option<Truncation>,
}

#[derive(Clone, Debug)]
pub struct SummingNet {
    pub kind: String,
    pub indices: Vec<NetIndex>,
}

/// Fejér kernels `|gF_i ∩ F_i| / |F_i|` for the shipped Følner sets.
/// Boxes on ℤ^d use the closed form.
pub fn fejer_net(group: &Group, schedule: &[usize]) -> Result<SummingNet> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty Fejér schedule".into()));
    }
    let indices = schedule
        .iter()
        .map(|&i| {
            let kernel = match group {
                Group::Lattice { .. } => {
                    group.folner(i)?;
                    ScalarKernel::FejerBox { side: i }
                }
                _ => ScalarKernel::fejer(group.folner(i)?)?,
            };
            Ok(NetIndex {
                label: format!("N={i}"),
                multiplier: Multiplier::Scalar(kernel),
                declared_bound: 1.0,
                truncation: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SummingNet { kind: "fejer".into(), indices })
}

/// Kernels `r^{L}` on ℤ^d, each truncated at the smallest integer radius
/// whose certified tail bound is below `eps`.
pub fn abel_poisson_net(group: &Group, length: LengthFunction, schedule: &[f64], eps: f64) -> Result<SummingNet> {
    let Group::Lattice { dim } = group else {
        return Err(Error::InvalidParameter("Abel–Poisson nets are shipped for ℤ^d only".into()));
    };
    if !matches!(length, LengthFunction::OneNorm | LengthFunction::TwoNorm | LengthFunction::SquaredTwoNorm) {
        return Err(Error::InvalidParameter(format!("unsupported length {length:?}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("truncation level must be positive".into()));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty r schedule".into()));
    }
    let indices = schedule
        .iter()
        .map(|&r| {
            ScalarKernel::geometric(r, length)?;
            let (radius, tail_bound) = truncation_radius(*dim as usize, length, r, eps);
            Ok(NetIndex {
                label: format!("r={r}"),
                multiplier: Multiplier::Scalar(ScalarKernel::Geometric { r, length, cutoff: Some(radius) }),
                declared_bound: 1.0,
                truncation: Some(Truncation { eps, radius, tail_bound }),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SummingNet { kind: "abel-poisson".into(), indices })
}

/// Smallest integer `R` with `tail(R) < eps` and the tail bound there.
pub fn truncation_radius(dim: usize, length: LengthFunction, r: f64, eps: f64) -> (f64, f64) {
    let tail = |radius: u64| match length {
        LengthFunction::TwoNorm => one_norm_tail(dim, r.powf(1.0 / (dim as f64).sqrt()), radius),
        LengthFunction::SquaredTwoNorm => squared_tail(dim, r, radius),
        _ => one_norm_tail(dim, r, radius),
    };
    let mut hi = 1u64;
    while tail(hi) >= eps {
        hi *= 2;
    }
    let mut lo = 0u64;
    if tail(0) < eps {
        return (0.0, tail(0));
    }
    // tail(lo) ≥ eps > tail(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi as f64, tail(hi))
}

fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Points of ℤ^d with `|g|₁ = n`.
pub fn one_norm_shell(dim: usize, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (1..=dim.min(n as usize) as u64)
        .map(|k| 2f64.powi(k as i32) * binom(dim as u64, k) * binom(n - 1, k - 1))
        .sum()
}

/// `Σ_{|g|₁ > R} r^{|g|₁}` bounded above: exact terms up to a cut, then the
/// geometric remainder of `2^d C(n+d−1, d−1) r^n`, whose term ratio
/// `r(n+d)/(n+1)` decreases in `n`.
fn one_norm_tail(dim: usize, r: f64, radius: u64) -> f64 {
    let d = dim as f64;
    let mut n = radius + 1;
    let mut sum = 0.0f64;
    loop {
        let term = one_norm_shell(dim, n) * r.powf(n as f64);
        let ratio = r * (n as f64 + d) / (n as f64 + 1.0);
        if ratio < 1.0 {
            let majorant = 2f64.powf(d) * binom(n + dim as u64 - 1, dim as u64 - 1) * r.powf(n as f64);
            let remainder = majorant / (1.0 - ratio);
            if remainder <= 1e-6 * sum.max(f64::MIN_POSITIVE) || remainder < 1e-300 {
                return sum + remainder;
            }
        }
        sum += term;
        n += 1;
    }
}

/// `Σ_{|g|₂² > R} r^{|g|₂²}` bounded by a union over coordinates:
/// `d θ(r)^{d−1} Σ_{k² > R/d} r^{k²}` with `θ(r) = Σ_k r^{k²}`.
fn squared_tail(dim: usize, r: f64, radius: u64) -> f64 {
    let one_dim_tail = |m: u64| {
        // 2 Σ_{k > m} r^{k²}; successive ratios r^{2k+1} decrease
        let mut k = m + 1;
        let mut sum = 0.0;
        loop {
            let term = r.powf((k * k) as f64);
            let ratio = r.powf((2 * k + 1) as f64);
            let remainder = r.powf(((k + 1) * (k + 1)) as f64) / (1.0 - ratio);
            sum += term;
            if remainder <= 1e-6 * sum || term < 1e-300 {
                return 2.0 * (sum + remainder);
            }
            k += 1;
        }
    };
    let theta = 1.0 + one_dim_tail(0);
    // k² > R/d ⟺ k > ⌊√(R/d)⌋ for integers
    let m = ((radius as f64) / dim as f64).sqrt().floor() as u64;
    dim as f64 * theta.powi(dim as i32 - 1) * one_dim_tail(m)
}

/// `T^i(g, a) = Σ_h ⟨ξ_i(h), ρ(a)v(g)η_i(g⁻¹h)⟩`.
pub fn approx_data_net(rep: &EquivariantRep, data: Vec<(ModuleField, ModuleField)>) -> Result<SummingNet> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("empty approximation data".into()));
    }
    let indices = data
        .into_iter()
        .enumerate()
        .map(|(i, (xi, eta))| {
            let multiplier = make_approx_data_multiplier(rep, xi, eta)?;
            let declared_bound = multiplier.declared_bound().expect("finite supports");
            Ok(NetIndex { label: format!("i={i}"), multiplier, declared_bound, truncation: None })
        })
        .collect::<Result<_>>()?;
    Ok(SummingNet { kind: "approx-data".into(), indices })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvergenceRow {
    pub label: String,
    pub l1_error: f64,
    pub alpha_error: f64,
    /// Compression lower bound for `‖Λ(T·f − f)‖` at each scheduled radius.
    pub opnorm_error: Vec<f64>,
    /// Largest sampled `‖T_g(a) − a‖`.
    pub pointwise_error: f64,
    /// `ε‖f‖₁` for truncated kernels, else 0.
    pub error_bar: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvergenceReport {
    pub kind: String,
    pub radii: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
    pub target_error: f64,
    /// Last ℓ¹ error within `target_error`.
    pub converged: bool,
    /// Pointwise errors nonincreasing along the schedule.
    pub pointwise_monotone: bool,
    /// Last pointwise error below [`POINTWISE_TARGET`].
    pub pointwise_converged: bool,
    /// Every compression error within its ℓ¹ error.
    pub domination_holds: bool,
}

/// Per-index errors of `T^i·f` against `f`.
pub fn run_convergence(
    sys: &TwistedSystem,
    net: &SummingNet,
    f: &CcElement,
    radii: &[f64],
    target_error: f64,
) -> Result<ConvergenceReport> {
    check_system(sys, f)?;
    let length = default_length(&sys.group);
    let mut gs: Vec<GroupElement> = sys.group.ball(1.0, length)?;
    gs.extend(f.support());
    gs.sort();
    gs.dedup();
    let mut as_: Vec<AlgElement> = f
        .terms()
        .values()
        .map(|a| a.scale_real(1.0 / a.norm()))
        .collect();
    as_.push(sys.one());
    let f_l1 = l1_norm(f);

    let rows: Vec<ConvergenceRow> = net
        .indices
        .par_iter()
        .map(|idx| {
            let tf = apply_multiplier(sys, &idx.multiplier, f)?;
            let diff = tf.sub(f)?;
            let opnorm_error = radii
                .iter()
                .map(|&r| Ok(compression_matrix(sys, &diff, r, length)?.largest_singular_value()))
                .collect::<Result<Vec<_>>>()?;
            let pointwise_error = gs
                .iter()
                .flat_map(|g| as_.iter().map(move |a| (g, a)))
                .map(|(g, a)| idx.multiplier.eval(sys, g, a).dist(a))
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                label: idx.label.clone(),
                l1_error: l1_norm(&diff),
                alpha_error: alpha_norm(sys, &diff),
                opnorm_error,
                pointwise_error,
                error_bar: idx.truncation.as_ref().map_or(0.0, |t| t.eps * f_l1),
            })
        })
        .collect::<Result<_>>()?;

    let last = rows.last().expect("nonempty schedule");
    let converged = last.l1_error <= target_error;
    let pointwise_converged = last.pointwise_error < POINTWISE_TARGET;
    let pointwise_monotone = rows.windows(2).all(|w| w[1].pointwise_error <= w[0].pointwise_error + 1e-12);
    let domination_holds = rows
        .iter()
        .all(|row| row.opnorm_error.iter().all(|&e| e <= row.l1_error + 1e-9));
    Ok(ConvergenceReport {
        kind: net.kind.clone(),
        radii: radii.to_vec(),
        rows,
        target_error,
        converged,
        pointwise_monotone,
        pointwise_converged,
        domination_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffalg::{c, AlgebraSpec};
    use crate::crossed::exact_norm_finite;
    use crate::hilbmod::ModuleVector;
    use crate::multipliers::pd_check;
    use crate::system::presets;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z1() -> Group {
        Group::lattice(1)
    }

    fn pt(v: &[i64]) -> GroupElement {
        GroupElement::from_raw(v.to_vec())
    }

    #[test]
    fn fejer_on_integers() {
        let net = fejer_net(&z1(), &[1, 2, 4, 8]).unwrap();
        for (idx, n) in net.indices.iter().zip([1.0, 2.0, 4.0, 8.0]) {
            let Multiplier::Scalar(k) = &idx.multiplier else { panic!() };
            assert_eq!(k.eval(&z1(), &pt(&[0])), c(1.0, 0.0));
            for g in -10i64..=10 {
                let expected = (1.0f64 - g.abs() as f64 / n).max(0.0);
                assert!((k.eval(&z1(), &pt(&[g])).re - expected).abs() < 1e-15);
            }
            assert_eq!(idx.declared_bound, 1.0);
        }
        assert!(matches!(fejer_net(&Group::FreeTwo, &[2]), Err(Error::NoFolnerSequence(_))));
    }

    #[test]
    fn fejer_on_finite_group_is_identity() {
        let sys = presets::cyclic_swap(12, 1);
        let net = fejer_net(&sys.group, &[1, 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = CcElement::random(&sys.algebra, &sys.group.elements().unwrap(), &mut rng);
        for idx in &net.indices {
            assert!(apply_multiplier(&sys, &idx.multiplier, &f).unwrap().approx_eq(&f, 1e-15));
        }
    }

    #[test]
    fn shell_counts_match_enumeration() {
        for d in 1..=3u32 {
            let z = Group::lattice(d);
            let ball = z.ball(6.0, LengthFunction::OneNorm).unwrap();
            for n in 0..=6u64 {
                let count = ball.iter().filter(|g| z.length(g, LengthFunction::OneNorm) == n as f64).count();
                assert_eq!(one_norm_shell(d as usize, n), count as f64, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn tail_bounds_dominate_direct_sums() {
        for (length, d) in [
            (LengthFunction::OneNorm, 2usize),
            (LengthFunction::TwoNorm, 2),
            (LengthFunction::SquaredTwoNorm, 2),
            (LengthFunction::OneNorm, 3),
        ] {
            let z = Group::lattice(d as u32);
            let r = 0.5;
            let (radius, bound) = truncation_radius(d, length, r, 1e-6);
            assert!(bound < 1e-6);
            // direct sum over a big ball of everything beyond the radius
            let big = z.ball(60.0, LengthFunction::OneNorm).unwrap();
            let direct: f64 = big
                .iter()
                .map(|g| z.length(g, length))
                .filter(|&l| l > radius)
                .map(|l| r.powf(l))
                .sum();
            assert!(direct <= bound + 1e-15, "{length:?}: {direct} vs {bound}");
            // one step smaller fails the certified bound
            if radius >= 1.0 {
                let below = match length {
                    LengthFunction::TwoNorm => one_norm_tail(d, r.powf(1.0 / (d as f64).sqrt()), radius as u64 - 1),
                    LengthFunction::SquaredTwoNorm => squared_tail(d, r, radius as u64 - 1),
                    _ => one_norm_tail(d, r, radius as u64 - 1),
                };
                assert!(below >= 1e-6);
            }
        }
    }

    #[test]
    fn abel_poisson_examples() {
        let z2 = Group::lattice(2);
        let net = abel_poisson_net(&z2, LengthFunction::OneNorm, &[0.5], TRUNCATION_EPS).unwrap();
        let Multiplier::Scalar(k) = &net.indices[0].multiplier else { panic!() };
        assert_eq!(k.eval(&z2, &z2.identity()), c(1.0, 0.0));
        assert!((k.eval(&z2, &pt(&[1, 1])).re - 0.25).abs() < 1e-15);
        let ball = z2.ball(4.0, LengthFunction::Word).unwrap();
        for length in [LengthFunction::OneNorm, LengthFunction::TwoNorm, LengthFunction::SquaredTwoNorm] {
            let net = abel_poisson_net(&z2, length, &[0.5, 0.9, 0.99], TRUNCATION_EPS).unwrap();
            for idx in &net.indices {
                let Multiplier::Scalar(k) = &idx.multiplier else { panic!() };
                assert!(pd_check(&z2, k, &ball).unwrap().is_pd);
            }
        }
        assert!(abel_poisson_net(&z2, LengthFunction::OneNorm, &[1.0], 1e-8).is_err());
        assert!(abel_poisson_net(&z2, LengthFunction::OneNorm, &[0.0], 1e-8).is_err());
        assert!(abel_poisson_net(&Group::FreeTwo, LengthFunction::Word, &[0.5], 1e-8).is_err());
    }

    #[test]
    fn fejer_convergence_closed_form() {
        let sys = TwistedSystem::untwisted(AlgebraSpec::scalar(), z1()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let support: Vec<_> = (-2..=2).map(|k| pt(&[k])).collect();
        let f = CcElement::random(&sys.algebra, &support, &mut rng);
        let f = f.scale(c(1.0 / l1_norm(&f), 0.0));
        let schedule = [2usize, 4, 8, 16, 256];
        let net = fejer_net(&sys.group, &schedule).unwrap();
        let report = run_convergence(&sys, &net, &f, &[2.0, 8.0], 1e-2).unwrap();
        for (row, &n) in report.rows.iter().zip(&schedule) {
            let closed: f64 = f
                .terms()
                .iter()
                .map(|(g, a)| (1.0 - (1.0 - g.raw()[0].abs() as f64 / n as f64).max(0.0)) * a.norm())
                .sum();
            assert!((row.l1_error - closed).abs() < 1e-12);
        }
        assert!(report.converged);
        assert!(report.domination_holds);
        assert!(report.pointwise_monotone);
    }

    #[test]
    fn identity_net_has_zero_errors() {
        let sys = presets::matrix_line();
        let net = SummingNet {
            kind: "identity".into(),
            indices: vec![NetIndex {
                label: "I".into(),
                multiplier: Multiplier::identity(),
                declared_bound: 1.0,
                truncation: None,
            }],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = CcElement::random(&sys.algebra, &[pt(&[0]), pt(&[2])], &mut rng);
        let report = run_convergence(&sys, &net, &f, &[3.0], 0.0).unwrap();
        let row = &report.rows[0];
        assert_eq!((row.l1_error, row.alpha_error, row.opnorm_error[0], row.pointwise_error), (0.0, 0.0, 0.0, 0.0));
        assert!(report.converged && report.pointwise_converged);
    }

    #[test]
    fn abel_poisson_convergence_on_z2() {
        let z2 = Group::lattice(2);
        let sys = TwistedSystem::untwisted(AlgebraSpec::scalar(), z2.clone()).unwrap();
        let pts = [([0, 0], 0.6), ([1, 0], 0.1), ([-1, 0], 0.1), ([0, 1], 0.1), ([0, -1], 0.1)];
        let f = CcElement::from_terms(
            &sys.algebra,
            pts.iter().map(|(p, w)| (pt(p), AlgElement::scalar(&sys.algebra, c(*w, 0.0)))),
        )
        .unwrap();
        for length in [LengthFunction::OneNorm, LengthFunction::TwoNorm, LengthFunction::SquaredTwoNorm] {
            let net = abel_poisson_net(&z2, length, &[0.9, 0.99, 0.999], TRUNCATION_EPS).unwrap();
            let report = run_convergence(&sys, &net, &f, &[2.0], 1e-3).unwrap();
            assert!(report.converged, "{:?}", report.rows);
            let last = report.rows.last().unwrap();
            // every support point has L = 1: error is 0.4 (1 − r)
            assert!((last.l1_error - 0.4 * (1.0 - 0.999)).abs() < 1e-12);
            assert!(last.l1_error + last.error_bar < 1e-3);
        }
    }

    #[test]
    fn approx_data_net_bound_on_finite_group() {
        let sys = presets::cyclic_swap(12, 1);
        let zero = ModuleVector::zero(&sys.algebra, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let elems = sys.group.elements().unwrap();
        let field = |rng: &mut ChaCha8Rng, k: usize| {
            let values = elems[..k]
                .iter()
                .map(|g| (g.clone(), ModuleVector::random(&sys.algebra, 1, rng)))
                .collect();
            ModuleField::table(zero.clone(), values).unwrap()
        };
        let data = vec![(field(&mut rng, 2), field(&mut rng, 3)), (field(&mut rng, 4), field(&mut rng, 1))];
        let net = approx_data_net(&EquivariantRep::trivial(), data).unwrap();
        for idx in &net.indices {
            for _ in 0..10 {
                let f = CcElement::random(&sys.algebra, &elems[..5], &mut rng);
                let lhs = exact_norm_finite(&sys, &apply_multiplier(&sys, &idx.multiplier, &f).unwrap()).unwrap();
                assert!(lhs <= idx.declared_bound * exact_norm_finite(&sys, &f).unwrap() + 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn shipped_kernels_are_normalized_and_pd(n in 1usize..12, r in 0.05f64..0.95) {
            let z = z1();
            let set: Vec<_> = (-6..=6).map(|k| pt(&[k])).collect();
            let fej = ScalarKernel::FejerBox { side: n };
            prop_assert_eq!(fej.eval(&z, &z.identity()), c(1.0, 0.0));
            prop_assert!(pd_check(&z, &fej, &set).unwrap().is_pd);
            let geo = ScalarKernel::geometric(r, LengthFunction::Word).unwrap();
            prop_assert_eq!(geo.eval(&z, &z.identity()), c(1.0, 0.0));
            prop_assert!(pd_check(&z, &geo, &set).unwrap().is_pd);
        }

        #[test]
        fn compression_error_dominated_by_l1(seed in 0u64..1000) {
            let sys = presets::rotation_algebra(0.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let support = sys.group.ball(2.0, LengthFunction::Word).unwrap();
            let f = CcElement::random(&sys.algebra, &support[..6], &mut rng);
            let net = fejer_net(&sys.group, &[1, 3]).unwrap();
            let report = run_convergence(&sys, &net, &f, &[1.0, 2.0], 1.0).unwrap();
            prop_assert!(report.domination_holds);
        }
    }
}
