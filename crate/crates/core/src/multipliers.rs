//! Multipliers `T = {T_g}` of a system, acting coefficientwise on `C_c`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffalg::{c, AlgElement, AlgEndomorphism, C64};
use crate::crossed::{best_upper, check_system, compression_matrix, CcElement};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::hilbmod::{EquivariantRep, ModuleVector, RhoRule};
use crate::system::{default_length, TwistedSystem};
use crate::tol;

/// `φ: G → ℂ` given in closed form or by a table (zero off the table).
#[derive(Clone, Debug)]
pub enum ScalarKernel {
    Delta,
    Constant(C64),
    /// `r^{L(g)}`, set to zero where `L(g) > cutoff`.
    Geometric { r: f64, length: LengthFunction, cutoff: Option<f64> },
    /// `|gF ∩ F| / |F|`.
    Fejer { set: BTreeSet<GroupElement> },
    /// `Π_k max(0, 1 − |g_k|/N)`: the Følner ratio of the box `{0..N-1}^d`
    /// on ℤ^d in closed form.
    FejerBox { side: usize },
    Table(BTreeMap<GroupElement, C64>),
}

impl ScalarKernel {
    pub fn geometric(r: f64, length: LengthFunction) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("r = {r} must lie in (0, 1)")));
        }
        Ok(ScalarKernel::Geometric { r, length, cutoff: None })
    }

    pub fn fejer(set: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let set: BTreeSet<_> = set.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidParameter("Følner set is empty".into()));
        }
        Ok(ScalarKernel::Fejer { set })
    }

    pub fn eval(&self, group: &Group, g: &GroupElement) -> C64 {
        match self {
            ScalarKernel::Delta => c(if group.is_identity(g) { 1.0 } else { 0.0 }, 0.0),
            ScalarKernel::Constant(z) => *z,
            ScalarKernel::Geometric { r, length, cutoff } => {
                let l = group.length(g, *length);
                match cutoff {
                    Some(rc) if l > *rc => c(0.0, 0.0),
                    _ => c(r.powf(l), 0.0),
                }
            }
            ScalarKernel::FejerBox { side } => {
                let n = *side as f64;
                c(g.raw().iter().map(|&k| (1.0 - k.abs() as f64 / n).max(0.0)).product(), 0.0)
            }
            ScalarKernel::Fejer { set } => {
                let hits = set.iter().filter(|x| set.contains(&group.mul(g, x))).count();
                c(hits as f64 / set.len() as f64, 0.0)
            }
            ScalarKernel::Table(t) => t.get(g).copied().unwrap_or(c(0.0, 0.0)),
        }
    }

    /// A finite set containing the support, when one is known.
    pub fn support(&self, group: &Group) -> Option<Vec<GroupElement>> {
        match self {
            ScalarKernel::Delta => Some(vec![group.identity()]),
            ScalarKernel::Fejer { set } => {
                let s: BTreeSet<_> = set
                    .iter()
                    .flat_map(|x| set.iter().map(move |y| (x, y)))
                    .map(|(x, y)| group.mul(x, &group.inv(y)))
                    .collect();
                Some(s.into_iter().collect())
            }
            ScalarKernel::FejerBox { side } => {
                let dim = group.identity().raw().len() as u32;
                let m = *side as i64 - 1;
                Some(group.ball(m as f64 * dim as f64, LengthFunction::OneNorm).ok()?.into_iter()
                    .filter(|g| g.raw().iter().all(|k| k.abs() <= m))
                    .collect())
            }
            ScalarKernel::Table(t) => Some(t.keys().cloned().collect()),
            ScalarKernel::Constant(_) | ScalarKernel::Geometric { .. } => None,
        }
    }
}

/// A field `G → X = Aⁿ`.
#[derive(Clone, Debug)]
pub enum ModuleField {
    Constant(ModuleVector),
    /// Zero off the table.
    Table { zero: ModuleVector, values: BTreeMap<GroupElement, ModuleVector> },
}

impl ModuleField {
    pub fn table(zero: ModuleVector, values: BTreeMap<GroupElement, ModuleVector>) -> Result<Self> {
        for v in values.values() {
            zero.inner(v)?;
        }
        Ok(ModuleField::Table { zero, values })
    }

    pub fn eval(&self, g: &GroupElement) -> ModuleVector {
        match self {
            ModuleField::Constant(x) => x.clone(),
            ModuleField::Table { zero, values } => values.get(g).cloned().unwrap_or_else(|| zero.clone()),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ModuleField::Constant(x) | ModuleField::Table { zero: x, .. } => x.rank(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            ModuleField::Constant(x) => x.norm(),
            ModuleField::Table { values, .. } => values.values().map(|x| x.norm()).fold(0.0, f64::max),
        }
    }

    fn support(&self) -> Option<Vec<GroupElement>> {
        match self {
            ModuleField::Constant(_) => None,
            ModuleField::Table { values, .. } => Some(values.keys().cloned().collect()),
        }
    }

    /// `‖Σ_h ⟨ξ(h), ξ(h)⟩‖^{1/2}` in `X^G`.
    fn l2_norm(&self) -> Option<f64> {
        match self {
            ModuleField::Constant(_) => None,
            ModuleField::Table { zero, values } => {
                let mut acc = zero.inner_unchecked(zero);
                for x in values.values() {
                    acc = &acc + &x.inner_unchecked(x);
                }
                Some(acc.norm().sqrt())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// Data `(π, η₁, η₂)` with `φ(g) = α_g(⟨η₁(g), η₂(e)⟩)`.
#[derive(Clone, Debug)]
pub struct GilbertData {
    pub pi: RhoRule,
    pub eta1: ModuleField,
    pub eta2: ModuleField,
    pub side: Side,
}

impl GilbertData {
    fn phi(&self, sys: &TwistedSystem, g: &GroupElement) -> AlgElement {
        let inner = self.eta1.eval(g).inner_unchecked(&self.eta2.eval(&sys.group.identity()));
        sys.alpha_apply(g, &inner)
    }
}

#[derive(Clone, Debug)]
pub enum Multiplier {
    /// `T_g(a) = φ(g)a`.
    Scalar(ScalarKernel),
    /// `T_g(a) = ψ(g)a`, zero off the table.
    Left(BTreeMap<GroupElement, AlgElement>),
    /// `T_g(a) = aψ(g)`, zero off the table.
    Right(BTreeMap<GroupElement, AlgElement>),
    /// `T_g(a) = ⟨x, ρ(a)v(g)y⟩`.
    MatrixCoeff { rep: EquivariantRep, x: ModuleVector, y: ModuleVector },
    /// `L^φ` or `R^φ` from validated data.
    Gilbert(GilbertData),
    /// `T_g = β` for every `g`.
    Endomorphism(AlgEndomorphism),
    /// `T_g(a) = Σ_h ⟨ξ(h), ρ(a)v(g)η(g⁻¹h)⟩` with finitely supported `ξ, η`.
    ApproxData { rep: EquivariantRep, xi: ModuleField, eta: ModuleField },
}

impl Multiplier {
    pub fn identity() -> Self {
        Multiplier::Scalar(ScalarKernel::Constant(c(1.0, 0.0)))
    }

    pub fn eval(&self, sys: &TwistedSystem, g: &GroupElement, a: &AlgElement) -> AlgElement {
        match self {
            Multiplier::Scalar(k) => a.scale(k.eval(&sys.group, g)),
            Multiplier::Left(t) => t.get(g).map_or_else(|| AlgElement::zero(&sys.algebra), |p| p * a),
            Multiplier::Right(t) => t.get(g).map_or_else(|| AlgElement::zero(&sys.algebra), |p| a * p),
            Multiplier::MatrixCoeff { rep, x, y } => x.inner_unchecked(&rep.rho(a, &rep.v(sys, g, y))),
            Multiplier::Gilbert(d) => {
                let p = d.phi(sys, g);
                match d.side {
                    Side::Left => &p * a,
                    Side::Right => a * &p,
                }
            }
            Multiplier::Endomorphism(b) => b.apply(a),
            Multiplier::ApproxData { rep, xi, eta } => {
                let mut acc = AlgElement::zero(&sys.algebra);
                for h in xi.support().unwrap_or_default() {
                    let k = sys.group.left_div(g, &h);
                    let w = eta.eval(&k);
                    if w.norm() == 0.0 {
                        continue;
                    }
                    acc = &acc + &xi.eval(&h).inner_unchecked(&rep.rho(a, &rep.v(sys, g, &w)));
                }
                acc
            }
        }
    }

    /// A finite set containing the `G`-support, when one is known.
    pub fn g_support(&self, group: &Group) -> Option<Vec<GroupElement>> {
        match self {
            Multiplier::Scalar(k) => k.support(group),
            Multiplier::Left(t) | Multiplier::Right(t) => Some(t.keys().cloned().collect()),
            Multiplier::ApproxData { xi, eta, .. } => {
                let (sx, se) = (xi.support()?, eta.support()?);
                let s: BTreeSet<_> = sx
                    .iter()
                    .flat_map(|h| se.iter().map(move |k| group.mul(h, &group.inv(k))))
                    .collect();
                Some(s.into_iter().collect())
            }
            Multiplier::Gilbert(d) => d.eta1.support(),
            Multiplier::MatrixCoeff { .. } | Multiplier::Endomorphism(_) => None,
        }
    }

    /// The constant the construction guarantees for `‖M_T‖`, if any.
    pub fn declared_bound(&self) -> Option<f64> {
        match self {
            Multiplier::Scalar(ScalarKernel::Delta)
            | Multiplier::Scalar(ScalarKernel::Geometric { .. })
            | Multiplier::Scalar(ScalarKernel::Fejer { .. })
            | Multiplier::Scalar(ScalarKernel::FejerBox { .. })
            | Multiplier::Endomorphism(_) => Some(1.0),
            Multiplier::Scalar(ScalarKernel::Constant(z)) => Some(z.norm()),
            Multiplier::Scalar(ScalarKernel::Table(t)) => Some(t.values().map(|z| z.norm()).sum()),
            Multiplier::Left(t) | Multiplier::Right(t) => Some(t.values().map(|a| a.norm()).sum()),
            Multiplier::MatrixCoeff { x, y, .. } => Some(x.norm() * y.norm()),
            Multiplier::Gilbert(d) => Some(d.eta1.sup_norm() * d.eta2.sup_norm()),
            Multiplier::ApproxData { xi, eta, .. } => Some(xi.l2_norm()? * eta.l2_norm()?),
        }
    }

    /// True when each `T_g` is left or right multiplication by an element,
    /// so that every ideal of `A` is mapped into itself.
    pub fn is_one_sided(&self) -> bool {
        matches!(self, Multiplier::Scalar(_) | Multiplier::Left(_) | Multiplier::Right(_) | Multiplier::Gilbert(_))
    }
}

/// `(T·f)(g) = T_g(f(g))`.
pub fn apply_multiplier(sys: &TwistedSystem, t: &Multiplier, f: &CcElement) -> Result<CcElement> {
    check_system(sys, f)?;
    let terms: Vec<_> = f.terms().iter().map(|(g, a)| (g.clone(), t.eval(sys, g, a))).collect();
    CcElement::from_terms(&sys.algebra, terms)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PdReport {
    pub is_pd: bool,
    pub min_eigenvalue: f64,
}

/// Gram matrix `[φ(g_i⁻¹g_j)]` on `set`; positive definite iff its least
/// eigenvalue is at least `-1e-10`.
pub fn pd_check(group: &Group, kernel: &ScalarKernel, set: &[GroupElement]) -> Result<PdReport> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("pd_check needs a nonempty set".into()));
    }
    let n = set.len();
    let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval(group, &group.left_div(&set[i], &set[j])));
    let defect = (&gram - gram.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(defect));
    }
    let hermitian = (&gram + gram.adjoint()).scale(0.5);
    let min = SymmetricEigen::new(hermitian).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PdReport { is_pd: min >= -tol::ALGEBRAIC, min_eigenvalue: min })
}

pub fn make_matrix_coeff_multiplier(rep: &EquivariantRep, x: ModuleVector, y: ModuleVector) -> Result<Multiplier> {
    if x.rank() != rep.rank || y.rank() != rep.rank {
        return Err(Error::ShapeMismatch(format!(
            "vectors of rank {} and {} on a module of rank {}",
            x.rank(),
            y.rank(),
            rep.rank
        )));
    }
    x.inner(&y)?;
    Ok(Multiplier::MatrixCoeff { rep: rep.clone(), x, y })
}

pub fn make_approx_data_multiplier(rep: &EquivariantRep, xi: ModuleField, eta: ModuleField) -> Result<Multiplier> {
    if xi.rank() != rep.rank || eta.rank() != rep.rank {
        return Err(Error::ShapeMismatch("approximation data of the wrong rank".into()));
    }
    if xi.support().is_none() || eta.support().is_none() {
        return Err(Error::InvalidParameter("approximation data must be finitely supported".into()));
    }
    Ok(Multiplier::ApproxData { rep: rep.clone(), xi, eta })
}

/// Group samples used to validate constructor conditions: the whole group
/// when finite, otherwise `ball(2)` together with any table supports.
fn condition_samples(sys: &TwistedSystem, extra: &[Option<Vec<GroupElement>>]) -> Result<Vec<GroupElement>> {
    let mut set: BTreeSet<GroupElement> = match sys.group.order() {
        Some(_) => sys.group.elements()?.into_iter().collect(),
        None => sys.group.ball(2.0, default_length(&sys.group))?.into_iter().collect(),
    };
    for s in extra.iter().flatten() {
        set.extend(s.iter().cloned());
    }
    Ok(set.into_iter().collect())
}

/// Validates the centrality and factorization conditions of the side and
/// returns the multiplier. Left: `π(a)η₂(t) = η₂(t)·a` and
/// `φ(st⁻¹) = α_s(⟨η₁(s), η₂(t)⟩)`. Right: `π(a)η₁(t) = η₁(t)·a` and
/// `φ(st⁻¹) = σ(st⁻¹,t) α_s(⟨η₁(s), η₂(t)⟩) σ(st⁻¹,t)*`.
pub fn make_gilbert_multiplier(sys: &TwistedSystem, data: GilbertData) -> Result<Multiplier> {
    if data.eta1.rank() != data.eta2.rank() {
        return Err(Error::ShapeMismatch("η₁ and η₂ live on different modules".into()));
    }
    let probe = data.eta1.eval(&sys.group.identity());
    if probe.spec() != sys.algebra {
        return Err(Error::ShapeMismatch("η data over a different algebra".into()));
    }
    let samples = condition_samples(sys, &[data.eta1.support(), data.eta2.support()])?;
    let units = sys.algebra.matrix_units();
    let (central_field, central_name) = match data.side {
        Side::Left => (&data.eta2, "π(a)η₂(t) = η₂(t)·a"),
        Side::Right => (&data.eta1, "π(a)η₁(t) = η₁(t)·a"),
    };
    for t in &samples {
        let x = central_field.eval(t);
        for a in &units {
            let v = data.pi.apply(a, &x).dist(&x.right_mul(a));
            if v > tol::ALGEBRAIC {
                return Err(Error::ConditionViolated {
                    condition: central_name.into(),
                    violation: v,
                    witness: format!("t = {}", sys.group.display(t)),
                });
            }
        }
    }
    let worst = samples
        .par_iter()
        .map(|s| {
            let e1 = data.eta1.eval(s);
            let mut worst = (0.0f64, None);
            for t in &samples {
                let g = sys.group.mul(s, &sys.group.inv(t));
                let mut rhs = sys.alpha_apply(s, &e1.inner_unchecked(&data.eta2.eval(t)));
                if data.side == Side::Right {
                    let u = sys.sigma(&g, t);
                    rhs = &(&u * &rhs) * &u.star();
                }
                let v = data.phi(sys, &g).dist(&rhs);
                if v > worst.0 {
                    worst = (v, Some(t.clone()));
                }
            }
            (worst.0, s.clone(), worst.1)
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a });
    if let Some((v, s, Some(t))) = worst {
        if v > tol::ALGEBRAIC {
            return Err(Error::ConditionViolated {
                condition: match data.side {
                    Side::Left => "φ(st⁻¹) = α_s(⟨η₁(s), η₂(t)⟩)".into(),
                    Side::Right => "φ(st⁻¹) = Ad(σ(st⁻¹,t)) α_s(⟨η₁(s), η₂(t)⟩)".into(),
                },
                violation: v,
                witness: format!("(s, t) = ({}, {})", sys.group.display(&s), sys.group.display(&t)),
            });
        }
    }
    Ok(Multiplier::Gilbert(data))
}

/// Requires `βα_g = α_gβ` and `β(σ(g,h)) = σ(g,h)` on samples.
pub fn make_endo_multiplier(sys: &TwistedSystem, beta: AlgEndomorphism) -> Result<Multiplier> {
    let one = sys.one();
    if beta.apply(&one).dist(&one) > tol::ALGEBRAIC || beta.source().len() != sys.algebra.num_blocks() {
        return Err(Error::ShapeMismatch("β must be a unital endomorphism of the coefficient algebra".into()));
    }
    let samples = condition_samples(sys, &[])?;
    let units = sys.algebra.matrix_units();
    for g in &samples {
        for a in &units {
            let v = beta.apply(&sys.alpha_apply(g, a)).dist(&sys.alpha_apply(g, &beta.apply(a)));
            if v > tol::ALGEBRAIC {
                return Err(Error::ConditionViolated {
                    condition: "β α_g = α_g β".into(),
                    violation: v,
                    witness: format!("g = {}", sys.group.display(g)),
                });
            }
        }
        for h in &samples {
            let s = sys.sigma(g, h);
            let v = beta.apply(&s).dist(&s);
            if v > tol::ALGEBRAIC {
                return Err(Error::ConditionViolated {
                    condition: "β(σ(g,h)) = σ(g,h)".into(),
                    violation: v,
                    witness: format!("(g, h) = ({}, {})", sys.group.display(g), sys.group.display(h)),
                });
            }
        }
    }
    Ok(Multiplier::Endomorphism(beta))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NormProbe {
    /// A lower bound for `‖M_T‖`, never its value.
    pub ratio_max: f64,
    /// Support of the maximizing sample, displayed.
    pub witness: Vec<String>,
    pub samples: usize,
}

/// `max_f lower(T·f, R) / upper(f)` over the unit and `budget` random `f`
/// supported in `ball(R)` on at most six points.
pub fn multiplier_norm_probe(
    sys: &TwistedSystem,
    t: &Multiplier,
    budget: usize,
    radius: f64,
    seed: u64,
) -> Result<NormProbe> {
    let length = default_length(&sys.group);
    let ball = sys.group.ball(radius, length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fs = vec![CcElement::unit(sys)];
    for _ in 0..budget {
        let k = ball.len().min(6);
        let support: Vec<_> = ball.choose_multiple(&mut rng, k).cloned().collect();
        fs.push(CcElement::random(&sys.algebra, &support, &mut rng));
    }
    let ratios: Vec<(f64, Vec<String>)> = fs
        .par_iter()
        .map(|f| {
            let tf = apply_multiplier(sys, t, f)?;
            let lower = compression_matrix(sys, &tf, radius, length)?.largest_singular_value();
            let upper = best_upper(sys, f);
            let support = f.support().iter().map(|g| sys.group.display(g)).collect();
            Ok((if upper > 0.0 { lower / upper } else { 0.0 }, support))
        })
        .collect::<Result<_>>()?;
    let (ratio_max, witness) = ratios
        .into_iter()
        .fold((0.0, Vec::new()), |best, r| if r.0 > best.0 { r } else { best });
    Ok(NormProbe { ratio_max, witness, samples: fs.len() })
}

/// Largest block component outside `keep` of `T_g(a)` over sampled `g` and
/// `a ∈ J = ⊕_{j ∈ keep} block_j`.
pub fn ideal_leak(
    sys: &TwistedSystem,
    t: &Multiplier,
    keep: &[usize],
    group_samples: &[GroupElement],
    algebra_samples: &[AlgElement],
) -> f64 {
    let mut worst = 0.0f64;
    for g in group_samples {
        for a in algebra_samples {
            let inside = a.project(keep);
            worst = worst.max(t.eval(sys, g, &inside).max_abs_outside(keep));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossed::{exact_norm_finite, twisted_mul};
    use crate::hilbmod::GroupUnitaryRep;
    use crate::system::presets;
    use rand::Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(41)
    }

    fn random_f(sys: &TwistedSystem, rng: &mut ChaCha8Rng) -> CcElement {
        let pool = match sys.group.order() {
            Some(_) => sys.group.elements().unwrap(),
            None => sys.group.ball(2.0, default_length(&sys.group)).unwrap(),
        };
        let k = rng.random_range(1..=pool.len().min(5));
        let support: Vec<_> = pool.choose_multiple(rng, k).cloned().collect();
        CcElement::random(&sys.algebra, &support, rng)
    }

    #[test]
    fn identity_and_delta() {
        let sys = presets::matrix_line();
        let mut r = rng();
        let f = random_f(&sys, &mut r);
        assert_eq!(apply_multiplier(&sys, &Multiplier::identity(), &f).unwrap(), f);
        let e = apply_multiplier(&sys, &Multiplier::Scalar(ScalarKernel::Delta), &f).unwrap();
        let id = sys.group.identity();
        let expected = CcElement::from_terms(&sys.algebra, [(id.clone(), f.coefficient(&id))]).unwrap();
        assert_eq!(e, expected);
    }

    #[test]
    fn scalar_left_right_are_exact() {
        let sys = presets::dihedral_inner(4);
        let mut r = rng();
        let f = random_f(&sys, &mut r);
        let table: BTreeMap<_, _> = sys
            .group
            .elements()
            .unwrap()
            .into_iter()
            .map(|g| (g, AlgElement::random(&sys.algebra, &mut r)))
            .collect();
        let scalars: BTreeMap<_, _> = table.keys().map(|g| (g.clone(), c(r.random(), r.random()))).collect();
        let tl = apply_multiplier(&sys, &Multiplier::Left(table.clone()), &f).unwrap();
        let tr = apply_multiplier(&sys, &Multiplier::Right(table.clone()), &f).unwrap();
        let ts = apply_multiplier(&sys, &Multiplier::Scalar(ScalarKernel::Table(scalars.clone())), &f).unwrap();
        for (g, a) in f.terms() {
            assert_eq!(tl.coefficient(g), &table[g] * a);
            assert_eq!(tr.coefficient(g), a * &table[g]);
            assert_eq!(ts.coefficient(g), a.scale(scalars[g]));
        }
    }

    #[test]
    fn pd_examples() {
        let z = Group::lattice(1);
        let set: Vec<_> = (-4..=4).map(|k| GroupElement::from_raw(vec![k])).collect();
        let d = pd_check(&z, &ScalarKernel::Delta, &set).unwrap();
        assert!(d.is_pd && (d.min_eigenvalue - 1.0).abs() < 1e-12);
        let geo = ScalarKernel::geometric(0.5, LengthFunction::Word).unwrap();
        assert!(pd_check(&z, &geo, &set).unwrap().is_pd);
        for n in [1i64, 2, 5, 16] {
            let f = ScalarKernel::fejer((0..n).map(|k| GroupElement::from_raw(vec![k]))).unwrap();
            let s: Vec<_> = (-n..=n).map(|k| GroupElement::from_raw(vec![k])).collect();
            assert!(pd_check(&z, &f, &s).unwrap().is_pd);
        }
        // a non-Hermitian table
        let mut t = BTreeMap::new();
        t.insert(GroupElement::from_raw(vec![1]), c(1.0, 0.0));
        assert!(matches!(pd_check(&z, &ScalarKernel::Table(t), &set), Err(Error::NotHermitian(_))));
        // Hermitian but not positive: φ = δ_e - δ_1 - δ_{-1}
        let mut t = BTreeMap::new();
        t.insert(z.identity(), c(1.0, 0.0));
        t.insert(GroupElement::from_raw(vec![1]), c(-1.0, 0.0));
        t.insert(GroupElement::from_raw(vec![-1]), c(-1.0, 0.0));
        assert!(!pd_check(&z, &ScalarKernel::Table(t), &set).unwrap().is_pd);
        assert!(ScalarKernel::geometric(1.0, LengthFunction::Word).is_err());
    }

    #[test]
    fn fejer_box_matches_enumeration() {
        for dim in [1u32, 2] {
            let z = Group::lattice(dim);
            for n in [1usize, 2, 4] {
                let closed = ScalarKernel::FejerBox { side: n };
                let counted = ScalarKernel::fejer(z.folner(n).unwrap()).unwrap();
                for g in z.ball(6.0, LengthFunction::OneNorm).unwrap() {
                    assert!((closed.eval(&z, &g) - counted.eval(&z, &g)).norm() < 1e-15);
                }
                let mut a = closed.support(&z).unwrap();
                let mut b = counted.support(&z).unwrap();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn fejer_kernel_closed_form_on_integers() {
        let z = Group::lattice(1);
        for n in [1i64, 3, 8] {
            let k = ScalarKernel::fejer((0..n).map(|i| GroupElement::from_raw(vec![i]))).unwrap();
            for g in -10i64..=10 {
                let expected = (1.0f64 - g.abs() as f64 / n as f64).max(0.0);
                assert!((k.eval(&z, &GroupElement::from_raw(vec![g])).re - expected).abs() < 1e-15);
            }
            assert_eq!(k.support(&z).unwrap().len() as i64, 2 * n - 1);
        }
    }

    #[test]
    fn matrix_coefficient_examples() {
        let sys = presets::dihedral_inner(3);
        let mut r = rng();
        let one = ModuleVector::basis(&sys.algebra, 1, 0);
        let t = make_matrix_coeff_multiplier(&EquivariantRep::trivial(), one.clone(), one).unwrap();
        let f = random_f(&sys, &mut r);
        assert!(apply_multiplier(&sys, &t, &f).unwrap().approx_eq(&f, 1e-12));

        // central y gives a scalar kernel
        let u = GroupUnitaryRep::regular(&sys.group).unwrap();
        let rep = EquivariantRep::tensor_unitary(u);
        let n = rep.rank;
        let xi: Vec<C64> = (0..n).map(|_| c(r.random(), r.random())).collect();
        let eta: Vec<C64> = (0..n).map(|_| c(r.random(), r.random())).collect();
        let x = ModuleVector::from_scalars(&sys.algebra, &xi);
        let y = ModuleVector::from_scalars(&sys.algebra, &eta);
        let t = make_matrix_coeff_multiplier(&rep, x.clone(), y.clone()).unwrap();
        for g in sys.group.elements().unwrap() {
            let phi = x.inner(&rep.v(&sys, &g, &y)).unwrap();
            assert!(phi.is_central());
            let a = AlgElement::random(&sys.algebra, &mut r);
            assert!(t.eval(&sys, &g, &a).approx_eq(&(&phi * &a), 1e-12));
        }
        // x = y: T_e(1) = ⟨x, x⟩
        let t = make_matrix_coeff_multiplier(&rep, x.clone(), x.clone()).unwrap();
        let te = t.eval(&sys, &sys.group.identity(), &sys.one());
        assert!(te.approx_eq(&x.inner(&x).unwrap(), 1e-12));
        assert!((te.norm() - x.norm().powi(2)).abs() < 1e-12);

        assert!(make_matrix_coeff_multiplier(&rep, one_of(&sys, 1), one_of(&sys, n)).is_err());
    }

    fn one_of(sys: &TwistedSystem, n: usize) -> ModuleVector {
        ModuleVector::basis(&sys.algebra, n, 0)
    }

    #[test]
    fn matrix_coefficient_bound_on_finite_group() {
        let sys = presets::cyclic_swap(12, 1);
        let mut r = rng();
        let rot = |t: f64| {
            DMatrix::from_row_slice(2, 2, &[c(t.cos(), 0.), c(-t.sin(), 0.), c(t.sin(), 0.), c(t.cos(), 0.)])
        };
        let u = GroupUnitaryRep::new(&sys.group, vec![rot(std::f64::consts::TAU / 12.0)]).unwrap();
        let rep = EquivariantRep::tensor_unitary(u);
        for _ in 0..10 {
            let x = ModuleVector::random(&sys.algebra, 2, &mut r);
            let y = ModuleVector::random(&sys.algebra, 2, &mut r);
            let bound = x.norm() * y.norm();
            let t = make_matrix_coeff_multiplier(&rep, x, y).unwrap();
            let f = random_f(&sys, &mut r);
            let lhs = exact_norm_finite(&sys, &apply_multiplier(&sys, &t, &f).unwrap()).unwrap();
            assert!(lhs <= bound * exact_norm_finite(&sys, &f).unwrap() + 1e-9);
        }
    }

    /// `[M(f)ξ](h) = Σ_g ⟨η₁(h), π(α_h⁻¹(f(g)σ(g,g⁻¹h)))η₂(g⁻¹h)⟩ ξ(g⁻¹h)`
    /// as a block matrix over the whole finite group, block `j`.
    fn gilbert_oracle(sys: &TwistedSystem, d: &GilbertData, f: &CcElement, j: usize) -> DMatrix<C64> {
        let elems = sys.group.elements().unwrap();
        let dj = sys.algebra.blocks()[j];
        let n = elems.len();
        let mut m = DMatrix::zeros(n * dj, n * dj);
        for (row, h) in elems.iter().enumerate() {
            for (g, a) in f.terms() {
                let k = sys.group.left_div(g, h);
                let col = elems.iter().position(|x| *x == k).unwrap();
                let coeff = sys.alpha_inv_apply(h, &(a * &sys.sigma(g, &k)));
                let entry = d.eta1.eval(h).inner_unchecked(&d.pi.apply(&coeff, &d.eta2.eval(&k)));
                let b = entry.block(j);
                for p in 0..dj {
                    for q in 0..dj {
                        m[(row * dj + p, col * dj + q)] += b[(p, q)];
                    }
                }
            }
        }
        m
    }

    fn compressed_block(sys: &TwistedSystem, f: &CcElement, j: usize) -> DMatrix<C64> {
        let elems = sys.group.elements().unwrap();
        let length = default_length(&sys.group);
        let m = compression_matrix(sys, f, 1e9, length).unwrap();
        // reorder rows to the enumeration order of `elems`
        let dj = sys.algebra.blocks()[j];
        let block = m.dense_block(j);
        let perm: Vec<usize> = elems.iter().map(|g| m.index.iter().position(|x| x == g).unwrap()).collect();
        DMatrix::from_fn(elems.len() * dj, elems.len() * dj, |r, s| {
            block[(perm[r / dj] * dj + r % dj, perm[s / dj] * dj + s % dj)]
        })
    }

    /// `η₁(s) = α_s⁻¹(b)*`, `η₂(t) = α_t⁻¹(c)` on a commutative algebra, so
    /// `φ(g) = b α_g(c)`.
    fn commutative_gilbert(sys: &TwistedSystem, side: Side, r: &mut ChaCha8Rng) -> GilbertData {
        let b = AlgElement::random(&sys.algebra, r);
        let cc = AlgElement::random(&sys.algebra, r);
        let elems = sys.group.elements().unwrap();
        let zero = ModuleVector::zero(&sys.algebra, 1);
        let f1 = elems
            .iter()
            .map(|s| (s.clone(), ModuleVector::new(vec![sys.alpha_inv_apply(s, &b).star()]).unwrap()))
            .collect();
        let f2 = elems
            .iter()
            .map(|t| (t.clone(), ModuleVector::new(vec![sys.alpha_inv_apply(t, &cc)]).unwrap()))
            .collect();
        GilbertData {
            pi: RhoRule::LeftMultiplication,
            eta1: ModuleField::table(zero.clone(), f1).unwrap(),
            eta2: ModuleField::table(zero, f2).unwrap(),
            side,
        }
    }

    #[test]
    fn gilbert_multipliers_match_the_dilation_oracle() {
        let sys = presets::cyclic_swap(6, 1);
        let mut r = rng();
        for side in [Side::Left, Side::Right] {
            let d = commutative_gilbert(&sys, side, &mut r);
            let t = make_gilbert_multiplier(&sys, d.clone()).unwrap();
            let bound = t.declared_bound().unwrap();
            for _ in 0..5 {
                let f = random_f(&sys, &mut r);
                let tf = apply_multiplier(&sys, &t, &f).unwrap();
                for j in 0..sys.algebra.num_blocks() {
                    let diff = gilbert_oracle(&sys, &d, &f, j) - compressed_block(&sys, &tf, j);
                    assert!(diff.iter().all(|z| z.norm() < 1e-12), "{side:?}");
                }
                let lhs = exact_norm_finite(&sys, &tf).unwrap();
                assert!(lhs <= bound * exact_norm_finite(&sys, &f).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn scalar_gilbert_from_unitary_rep() {
        let sys = presets::dihedral_inner(3);
        let mut r = rng();
        let u = GroupUnitaryRep::regular(&sys.group).unwrap();
        let n = u.dim();
        let xi: Vec<C64> = (0..n).map(|_| c(r.random(), r.random())).collect();
        let eta: Vec<C64> = (0..n).map(|_| c(r.random(), r.random())).collect();
        let vx = nalgebra::DVector::from_vec(xi.clone());
        let vy = nalgebra::DVector::from_vec(eta.clone());
        let elems = sys.group.elements().unwrap();
        let field = |v: &nalgebra::DVector<C64>| {
            let values = elems
                .iter()
                .map(|s| {
                    let w = u.eval(&sys.group, s).adjoint() * v;
                    (s.clone(), ModuleVector::from_scalars(&sys.algebra, w.as_slice()))
                })
                .collect();
            ModuleField::table(ModuleVector::zero(&sys.algebra, n), values).unwrap()
        };
        for side in [Side::Left, Side::Right] {
            let d = GilbertData { pi: RhoRule::LeftMultiplication, eta1: field(&vx), eta2: field(&vy), side };
            let t = make_gilbert_multiplier(&sys, d).unwrap();
            for g in &elems {
                let phi = (vx.adjoint() * u.eval(&sys.group, g) * &vy)[(0, 0)];
                let a = AlgElement::random(&sys.algebra, &mut r);
                assert!(t.eval(&sys, g, &a).approx_eq(&a.scale(phi), 1e-12));
            }
        }
    }

    #[test]
    fn gilbert_identity_and_rejection() {
        let sys = presets::matrix_line();
        let one = ModuleVector::basis(&sys.algebra, 1, 0);
        let d = GilbertData {
            pi: RhoRule::LeftMultiplication,
            eta1: ModuleField::Constant(one.clone()),
            eta2: ModuleField::Constant(one),
            side: Side::Left,
        };
        let t = make_gilbert_multiplier(&sys, d).unwrap();
        assert_eq!(t.declared_bound(), Some(1.0));
        let mut r = rng();
        let f = random_f(&sys, &mut r);
        assert!(apply_multiplier(&sys, &t, &f).unwrap().approx_eq(&f, 1e-12));

        let fin = presets::cyclic_swap(6, 1);
        let mut d = commutative_gilbert(&fin, Side::Left, &mut r);
        if let ModuleField::Table { values, .. } = &mut d.eta1 {
            let g = fin.group.generator_power(0, 2);
            let v = values[&g].scale(c(1.5, 0.0));
            values.insert(g, v);
        }
        assert!(matches!(make_gilbert_multiplier(&fin, d), Err(Error::ConditionViolated { .. })));

        // a noncentral η₂ fails (l1) on M₂
        let m2 = presets::dihedral_inner(3);
        let x = ModuleVector::new(vec![AlgElement::random(&m2.algebra, &mut r)]).unwrap();
        let d = GilbertData {
            pi: RhoRule::LeftMultiplication,
            eta1: ModuleField::Constant(x.clone()),
            eta2: ModuleField::Constant(x),
            side: Side::Left,
        };
        assert!(make_gilbert_multiplier(&m2, d).is_err());
    }

    #[test]
    fn endomorphism_multipliers() {
        let sys = presets::cyclic_swap(12, 1);
        let id = AlgEndomorphism::identity(&sys.algebra);
        let t = make_endo_multiplier(&sys, id).unwrap();
        let mut r = rng();
        let f = random_f(&sys, &mut r);
        assert_eq!(apply_multiplier(&sys, &t, &f).unwrap(), f);

        // the swap commutes with the action and fixes the scalar cocycle
        let swap = AlgEndomorphism::pullback(&[1, 0]).unwrap();
        let t = make_endo_multiplier(&sys, swap).unwrap();
        for _ in 0..20 {
            let f1 = random_f(&sys, &mut r);
            let f2 = random_f(&sys, &mut r);
            let lhs = apply_multiplier(&sys, &t, &twisted_mul(&sys, &f1, &f2).unwrap()).unwrap();
            let rhs = twisted_mul(
                &sys,
                &apply_multiplier(&sys, &t, &f1).unwrap(),
                &apply_multiplier(&sys, &t, &f2).unwrap(),
            )
            .unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-12));
        }

        // collapsing both points onto the first does not commute with the swap
        let collapse = AlgEndomorphism::pullback(&[0, 0]).unwrap();
        assert!(matches!(make_endo_multiplier(&sys, collapse), Err(Error::ConditionViolated { .. })));
    }

    #[test]
    fn norm_probe_examples() {
        let sys = presets::cyclic_swap(12, 1);
        let length = default_length(&sys.group);
        let full = crate::crossed::full_radius(&sys.group, length).unwrap();
        let p = multiplier_norm_probe(&sys, &Multiplier::identity(), 10, full, 1).unwrap();
        assert!((p.ratio_max - 1.0).abs() < 1e-9);
        let fej = ScalarKernel::fejer(sys.group.ball(2.0, length).unwrap()).unwrap();
        let p = multiplier_norm_probe(&sys, &Multiplier::Scalar(fej), 30, full, 2).unwrap();
        assert!(p.ratio_max <= 1.0 + 1e-9);
    }

    #[test]
    fn approx_data_trivial_and_support() {
        let sys = presets::dihedral_inner(3);
        let e = sys.group.identity();
        let one = ModuleVector::basis(&sys.algebra, 1, 0);
        let zero = ModuleVector::zero(&sys.algebra, 1);
        let mut r = rng();
        let f = random_f(&sys, &mut r);

        // ξ = η = 1⊙δ_e leaves only the h = g = e term: the expectation
        let delta = ModuleField::table(zero.clone(), [(e.clone(), one.clone())].into()).unwrap();
        let t = make_approx_data_multiplier(&EquivariantRep::trivial(), delta.clone(), delta).unwrap();
        let expected = apply_multiplier(&sys, &Multiplier::Scalar(ScalarKernel::Delta), &f).unwrap();
        assert!(apply_multiplier(&sys, &t, &f).unwrap().approx_eq(&expected, 1e-12));
        assert!((t.declared_bound().unwrap() - 1.0).abs() < 1e-12);

        // ξ = η = |G|^{-1/2} everywhere gives I_Σ with bound 1
        let elems = sys.group.elements().unwrap();
        let w = ModuleVector::from_scalars(&sys.algebra, &[c((elems.len() as f64).sqrt().recip(), 0.0)]);
        let flat = ModuleField::table(zero.clone(), elems.iter().map(|g| (g.clone(), w.clone())).collect()).unwrap();
        let t = make_approx_data_multiplier(&EquivariantRep::trivial(), flat.clone(), flat).unwrap();
        assert!(apply_multiplier(&sys, &t, &f).unwrap().approx_eq(&f, 1e-12));
        assert!((t.declared_bound().unwrap() - 1.0).abs() < 1e-12);

        let xi = ModuleField::table(zero.clone(), [(elems[1].clone(), one.clone())].into()).unwrap();
        let eta = ModuleField::table(zero, [(elems[2].clone(), one.clone()), (elems[3].clone(), one)].into()).unwrap();
        let t = make_approx_data_multiplier(&EquivariantRep::trivial(), xi, eta).unwrap();
        let mut support = t.g_support(&sys.group).unwrap();
        support.sort();
        let mut expected: Vec<_> = [2, 3]
            .iter()
            .map(|&k| sys.group.mul(&elems[1], &sys.group.inv(&elems[k])))
            .collect();
        expected.sort();
        assert_eq!(support, expected);
        for g in &elems {
            let nonzero = !t.eval(&sys, g, &sys.one()).is_zero(1e-14);
            assert_eq!(nonzero, expected.contains(g));
        }
    }

    #[test]
    fn one_sided_recipes_preserve_ideals() {
        let sys = presets::rotation_algebra(0.2);
        let comm = TwistedSystem::untwisted(crate::coeffalg::AlgebraSpec::commutative(3), Group::lattice(1)).unwrap();
        let mut r = rng();
        let gs = comm.group.ball(3.0, LengthFunction::Word).unwrap();
        let as_: Vec<_> = (0..5).map(|_| AlgElement::random(&comm.algebra, &mut r)).collect();
        let table: BTreeMap<_, _> = gs.iter().map(|g| (g.clone(), AlgElement::random(&comm.algebra, &mut r))).collect();
        for t in [
            Multiplier::Scalar(ScalarKernel::geometric(0.5, LengthFunction::Word).unwrap()),
            Multiplier::Left(table.clone()),
            Multiplier::Right(table),
        ] {
            assert!(t.is_one_sided());
            assert!(ideal_leak(&comm, &t, &[0, 2], &gs, &as_) <= 1e-12);
        }
        let _ = sys;
        // a pullback moving block 1 into block 0 leaks out of J = block 0
        let beta = Multiplier::Endomorphism(AlgEndomorphism::pullback(&[0, 0, 2]).unwrap());
        assert!(ideal_leak(&comm, &beta, &[0], &gs, &as_) > 0.01);
    }
}
