//! Weights, decay-constant and content probes, shell profiles, and the
//! commutative-coefficient inequality.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffalg::{c, AlgElement, AlgebraSpec};
use crate::crossed::{alpha_norm, check_system, compression_matrix, norms, term_records, CcElement, Norm, TermRecord};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::system::{default_length, TwistedSystem};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    Constant,
    /// `(1 + L)^s`.
    Power { s: f64 },
    /// `r^{−L}`.
    Exponential { r: f64 },
    /// `exp(tL)`.
    ExpT { t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Weight {
    pub kind: WeightKind,
    pub length: LengthFunction,
}

pub fn make_weight(kind: WeightKind, length: LengthFunction) -> Result<Weight> {
    let ok = match kind {
        WeightKind::Constant => true,
        WeightKind::Power { s } => s > 0.0,
        WeightKind::Exponential { r } => r > 0.0 && r < 1.0,
        WeightKind::ExpT { t } => t > 0.0,
    };
    if !ok {
        return Err(Error::InvalidParameter(format!("weight parameters out of range: {kind:?}")));
    }
    Ok(Weight { kind, length })
}

impl Weight {
    pub fn eval(&self, group: &Group, g: &GroupElement) -> f64 {
        let l = group.length(g, self.length);
        match self.kind {
            WeightKind::Constant => 1.0,
            WeightKind::Power { s } => (1.0 + l).powf(s),
            WeightKind::Exponential { r } => r.powf(-l),
            WeightKind::ExpT { t } => (t * l).exp(),
        }
    }

    /// Whether `κ⁻¹ ∈ ℓ²(G)`, where this is decided by growth: polynomial
    /// on ℤ^d (degree `d`, with `L` of homogeneity 1 or 2), exponential with
    /// ratio 3 on F₂ word length, and always on finite groups.
    pub fn inverse_l2_summable(&self, group: &Group) -> Option<bool> {
        if group.is_finite() {
            return Some(true);
        }
        match (group, self.kind) {
            (_, WeightKind::Constant) => Some(false),
            (Group::Lattice { dim }, WeightKind::Power { s }) => {
                let homogeneity = if self.length == LengthFunction::SquaredTwoNorm { 2.0 } else { 1.0 };
                Some(2.0 * s * homogeneity > *dim as f64)
            }
            (Group::Lattice { .. }, _) => Some(true),
            (Group::FreeTwo, WeightKind::Power { .. }) => Some(false),
            // shell sizes 4·3^{n−1}
            (Group::FreeTwo, WeightKind::Exponential { r }) => Some(3.0 * r * r < 1.0),
            (Group::FreeTwo, WeightKind::ExpT { t }) => Some(3.0 * (-2.0 * t).exp() < 1.0),
            _ => None,
        }
    }

    /// An upper bound for `‖κ⁻¹‖₂` where one is available in closed form:
    /// finite groups (exact), power weights on ℤ with word length, and
    /// exponential weights on ℤ^d with the 1-norm.
    pub fn inverse_l2_norm_upper(&self, group: &Group) -> Option<f64> {
        if group.is_finite() {
            let s: f64 = group.elements().ok()?.iter().map(|g| self.eval(group, g).powi(-2)).sum();
            return Some(s.sqrt());
        }
        match (group, self.kind, self.length) {
            (Group::Lattice { dim: 1 }, WeightKind::Power { s }, LengthFunction::Word | LengthFunction::OneNorm)
                if 2.0 * s > 1.0 =>
            {
                // 1 + 2 Σ_{n≥2} n^{−2s}, tail after N bounded by N^{1−2s}/(2s−1)
                let p = 2.0 * s;
                let cut = 10_000u32;
                let head: f64 = (2..=cut).map(|n| (n as f64).powf(-p)).sum();
                let tail = (cut as f64).powf(1.0 - p) / (p - 1.0);
                Some((1.0 + 2.0 * (head + tail)).sqrt())
            }
            (Group::Lattice { dim }, kind, LengthFunction::Word | LengthFunction::OneNorm) => {
                let q = match kind {
                    WeightKind::Exponential { r } => r * r,
                    WeightKind::ExpT { t } => (-2.0 * t).exp(),
                    _ => return None,
                };
                Some(((1.0 + q) / (1.0 - q)).powi(*dim as i32).sqrt())
            }
            _ => None,
        }
    }
}

fn random_support(pool: &[GroupElement], rng: &mut ChaCha8Rng, max: usize) -> Vec<GroupElement> {
    let k = rng.random_range(1..=pool.len().min(max));
    pool.choose_multiple(rng, k).cloned().collect()
}

fn lower_at(sys: &TwistedSystem, f: &CcElement, radius: f64) -> Result<f64> {
    Ok(compression_matrix(sys, f, radius, default_length(&sys.group))?.largest_singular_value())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DecayProbe {
    pub weight: Weight,
    pub radius: f64,
    /// A lower bound for every valid decay constant.
    pub lower: f64,
    pub witness: Vec<TermRecord>,
    #[serde(skip)]
    pub witness_element: CcElement,
    pub budget: usize,
    pub seed: u64,
}

/// `max_f lower(f, 2R) / ‖f‖_{α,κ}` over the unit and `budget` random `f`
/// supported in `ball(R)`.
pub fn decay_constant_probe(
    sys: &TwistedSystem,
    weight: &Weight,
    radius: f64,
    budget: usize,
    seed: u64,
) -> Result<DecayProbe> {
    let pool = sys.group.ball(radius, default_length(&sys.group))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fs = vec![CcElement::unit(sys)];
    for _ in 0..budget {
        let support = random_support(&pool, &mut rng, 8);
        fs.push(CcElement::random(&sys.algebra, &support, &mut rng));
    }
    let kappa = |g: &GroupElement| weight.eval(&sys.group, g);
    let ratios: Vec<f64> = fs
        .par_iter()
        .map(|f| Ok(lower_at(sys, f, 2.0 * radius)? / norms(sys, f, Norm::AlphaKappa(&kappa))?))
        .collect::<Result<_>>()?;
    let (best, lower) = ratios
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    Ok(DecayProbe {
        weight: *weight,
        radius,
        lower,
        witness: term_records(&sys.group, &fs[best]),
        witness_element: fs[best].clone(),
        budget,
        seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContentEstimate {
    pub set: Vec<String>,
    pub radius: f64,
    /// Best `‖P_R Λ(f) P_R‖` found with `‖f‖_α = 1`.
    pub lower: f64,
    /// `|E|`.
    pub upper: f64,
    /// `|E|^{1/2}`, when `A = ℂ`.
    pub upper_scalar: Option<f64>,
    pub witness: Vec<TermRecord>,
    #[serde(skip)]
    pub witness_element: CcElement,
    pub budget: usize,
    pub seed: u64,
}

impl ContentEstimate {
    pub fn best_upper(&self) -> f64 {
        self.upper_scalar.map_or(self.upper, |s| s.min(self.upper))
    }
}

/// Random starts followed by coordinate ascent over the real and imaginary
/// parts of `f` on `E`, at radius `2·max L(E)`. `seeds` (typically witnesses
/// for subsets of `E`) are always among the starts, so the estimate never
/// falls below theirs.
pub fn content_probe(
    sys: &TwistedSystem,
    set: &[GroupElement],
    budget: usize,
    seed: u64,
    seeds: &[CcElement],
) -> Result<ContentEstimate> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("content needs a nonempty set".into()));
    }
    let mut set = set.to_vec();
    set.sort();
    set.dedup();
    let length = default_length(&sys.group);
    let radius = 2.0 * set.iter().map(|g| sys.group.length(g, length)).fold(0.0, f64::max);
    let objective = |f: &CcElement| -> Result<f64> {
        let n = alpha_norm(sys, f);
        if n == 0.0 {
            return Ok(0.0);
        }
        lower_at(sys, f, radius).map(|v| v / n)
    };

    let mut starts: Vec<CcElement> = Vec::new();
    for s in seeds {
        check_system(sys, s)?;
        if s.support().iter().all(|g| set.contains(g)) && !s.is_empty() {
            starts.push(s.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_starts = (budget / 40).clamp(1, 8);
    for _ in 0..random_starts {
        starts.push(CcElement::random(&sys.algebra, &set, &mut rng));
    }
    let per_start = (budget / starts.len()).max(1);
    let results: Vec<(f64, CcElement)> = starts
        .par_iter()
        .map(|f0| coordinate_ascent(sys, &set, f0, per_start, &objective))
        .collect::<Result<_>>()?;
    let (lower, best) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, CcElement::zero(&sys.algebra)), |acc, r| if r.0 > acc.0 { r } else { acc });
    let best = best.scale(c(1.0 / alpha_norm(sys, &best), 0.0));
    let upper = set.len() as f64;
    let upper_scalar = (sys.algebra.blocks() == [1]).then(|| upper.sqrt());
    Ok(ContentEstimate {
        set: set.iter().map(|g| sys.group.display(g)).collect(),
        radius,
        lower,
        upper,
        upper_scalar,
        witness: term_records(&sys.group, &best),
        witness_element: best,
        budget,
        seed,
    })
}

fn coordinate_ascent(
    sys: &TwistedSystem,
    set: &[GroupElement],
    start: &CcElement,
    evaluations: usize,
    objective: &(dyn Fn(&CcElement) -> Result<f64> + Sync),
) -> Result<(f64, CcElement)> {
    let spec = &sys.algebra;
    let mut coords: BTreeMap<GroupElement, Vec<f64>> = set
        .iter()
        .map(|g| (g.clone(), start.coefficient(g).to_interleaved()))
        .collect();
    let build = |coords: &BTreeMap<GroupElement, Vec<f64>>| -> Result<CcElement> {
        let terms = coords
            .iter()
            .map(|(g, v)| Ok((g.clone(), AlgElement::from_interleaved(spec, v)?)))
            .collect::<Result<Vec<_>>>()?;
        CcElement::from_terms(spec, terms)
    };
    let mut best = objective(&build(&coords)?)?;
    let mut used = 1;
    let mut step = 0.5;
    let keys: Vec<GroupElement> = coords.keys().cloned().collect();
    let width = coords.values().next().map_or(0, |v| v.len());
    while used < evaluations && step > 1e-4 {
        let mut improved = false;
        'sweep: for g in &keys {
            for i in 0..width {
                for sign in [1.0, -1.0] {
                    if used >= evaluations {
                        break 'sweep;
                    }
                    let mut trial = coords.clone();
                    trial.get_mut(g).expect("key")[i] += sign * step;
                    let v = objective(&build(&trial)?)?;
                    used += 1;
                    if v > best + 1e-15 {
                        best = v;
                        coords = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((best, build(&coords)?))
}

/// Estimates along an increasing chain of sets, each seeded with the
/// previous witness.
pub fn content_chain(
    sys: &TwistedSystem,
    chain: &[Vec<GroupElement>],
    budget: usize,
    seed: u64,
) -> Result<Vec<ContentEstimate>> {
    let mut out: Vec<ContentEstimate> = Vec::new();
    for (i, set) in chain.iter().enumerate() {
        let seeds: Vec<CcElement> = out.iter().map(|e| e.witness_element.clone()).collect();
        out.push(content_probe(sys, set, budget, seed.wrapping_add(i as u64), &seeds)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShellNorm {
    L1,
    L2,
    Max,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShellRow {
    pub shell: usize,
    pub count: usize,
    pub norm: f64,
}

/// Norms of `ξ` restricted to the shells `{k−1 < L(g) ≤ k}` (shell 0 is
/// `L = 0`) for `k = 0..=max_shell`.
pub fn tail_profile(
    group: &Group,
    xi: &CcElement,
    length: LengthFunction,
    max_shell: usize,
    norm: ShellNorm,
) -> Result<Vec<ShellRow>> {
    let mut shells: Vec<Vec<f64>> = vec![Vec::new(); max_shell + 1];
    for (g, a) in xi.terms() {
        let l = group.try_length(g, length)?;
        let k = (l - 1e-9).ceil().max(0.0) as usize;
        if k <= max_shell {
            shells[k].push(a.norm());
        }
    }
    Ok(shells
        .into_iter()
        .enumerate()
        .map(|(shell, v)| ShellRow {
            shell,
            count: v.len(),
            norm: match norm {
                ShellNorm::L1 => v.iter().sum(),
                ShellNorm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
                ShellNorm::Max => v.iter().copied().fold(0.0, f64::max),
            },
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InequalityReport {
    pub point: usize,
    /// `‖ |Λ(f)ξ|_ω ‖₂`.
    pub lhs: f64,
    /// `‖ |f|_ω ∗ |ξ|_ω ‖₂`.
    pub rhs: f64,
    pub residual: f64,
    /// `min_h ((|f|_ω ∗ |ξ|_ω)(h) − |Λ(f)ξ|_ω(h))`.
    pub pointwise_min_residual: f64,
    pub pass: bool,
}

fn require_commutative(sys: &TwistedSystem, point: usize) -> Result<()> {
    if !sys.algebra.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if point >= sys.algebra.num_blocks() {
        return Err(Error::InvalidParameter(format!("no point {point} in the spectrum")));
    }
    Ok(())
}

/// `(Λ(f)ξ)(h) = Σ_g α_h⁻¹(f(g) σ(g, g⁻¹h)) ξ(g⁻¹h)` on its finite support.
fn regular_apply(sys: &TwistedSystem, f: &CcElement, xi: &CcElement) -> BTreeMap<GroupElement, AlgElement> {
    let mut out: BTreeMap<GroupElement, AlgElement> = BTreeMap::new();
    for (g, a) in f.terms() {
        for (k, b) in xi.terms() {
            let h = sys.group.mul(g, k);
            let term = &sys.alpha_inv_apply(&h, &(a * &sys.sigma(g, k))) * b;
            match out.get_mut(&h) {
                Some(v) => *v = &*v + &term,
                None => {
                    out.insert(h, term);
                }
            }
        }
    }
    out
}

/// `(u ∗ v)(h) = Σ_g u(g) v(g⁻¹h)` for finitely supported nonnegative `u, v`.
fn convolve(group: &Group, u: &BTreeMap<GroupElement, f64>, v: &BTreeMap<GroupElement, f64>) -> BTreeMap<GroupElement, f64> {
    let mut out = BTreeMap::new();
    for (g, x) in u {
        for (k, y) in v {
            *out.entry(group.mul(g, k)).or_insert(0.0) += x * y;
        }
    }
    out
}

fn inequality(
    sys: &TwistedSystem,
    f: &CcElement,
    xi: &CcElement,
    point: usize,
    kernel: &BTreeMap<GroupElement, f64>,
) -> InequalityReport {
    let applied = regular_apply(sys, f, xi);
    let xi_abs: BTreeMap<_, _> = xi.terms().iter().map(|(g, a)| (g.clone(), a.value(point).norm())).collect();
    let conv = convolve(&sys.group, kernel, &xi_abs);
    let lhs = applied.values().map(|a| a.value(point).norm_sqr()).sum::<f64>().sqrt();
    let rhs = conv.values().map(|x| x * x).sum::<f64>().sqrt();
    let pointwise_min_residual = applied
        .iter()
        .map(|(h, a)| conv.get(h).copied().unwrap_or(0.0) - a.value(point).norm())
        .fold(f64::INFINITY, f64::min);
    let residual = rhs - lhs;
    InequalityReport {
        point,
        lhs,
        rhs,
        residual,
        pointwise_min_residual,
        pass: residual >= -tol::INEQUALITY,
    }
}

/// `‖ |Λ(f)ξ|_ω ‖₂ ≤ ‖ |f|_ω ∗ |ξ|_ω ‖₂` for `f` with values fixed by the
/// action, `ω` evaluation at `point`.
pub fn commutative_inequality_check(
    sys: &TwistedSystem,
    f: &CcElement,
    xi: &CcElement,
    point: usize,
) -> Result<InequalityReport> {
    require_commutative(sys, point)?;
    check_system(sys, f)?;
    check_system(sys, xi)?;
    require_fixed(sys, f)?;
    let kernel = f.terms().iter().map(|(g, a)| (g.clone(), a.value(point).norm())).collect();
    Ok(inequality(sys, f, xi, point, &kernel))
}

fn require_fixed(sys: &TwistedSystem, f: &CcElement) -> Result<()> {
    let gens = sys.group.generators();
    for (g, a) in f.terms() {
        for s in &gens {
            if sys.alpha_apply(s, a).dist(a) > tol::ALGEBRAIC {
                return Err(Error::NotFixedByAction(sys.group.display(g)));
            }
        }
    }
    Ok(())
}

/// The same comparison with `|f^α|_ω`, `f^α(g) = α_g⁻¹(f(g))`, for any `f`.
/// This is not a known inequality: failures are recorded, not raised.
pub fn generalized_inequality_experiment(
    sys: &TwistedSystem,
    f: &CcElement,
    xi: &CcElement,
    point: usize,
) -> Result<InequalityReport> {
    require_commutative(sys, point)?;
    check_system(sys, f)?;
    check_system(sys, xi)?;
    let kernel = f
        .terms()
        .iter()
        .map(|(g, a)| (g.clone(), sys.alpha_inv_apply(g, a).value(point).norm()))
        .collect();
    Ok(inequality(sys, f, xi, point, &kernel))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DecayChainReport {
    /// `max lower(|f|_ω, R) / ‖|f|_ω‖_{2,κ}` over samples and points, on
    /// the untwisted scalar system over the same group.
    pub c_group: f64,
    /// `min (C·‖f‖_{α,κ} − lower(f, R))` over samples.
    pub min_residual: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Checks `lower(f, R) ≤ C_grp ‖f‖_{α,κ}` where `C_grp` is measured on the
/// pointwise moduli of the same samples.
pub fn commutative_decay_chain(
    sys: &TwistedSystem,
    weight: &Weight,
    samples: &[CcElement],
    radius: f64,
) -> Result<DecayChainReport> {
    require_commutative(sys, 0)?;
    let scalar = TwistedSystem::untwisted(AlgebraSpec::scalar(), sys.group.clone())?;
    let kappa = |g: &GroupElement| weight.eval(&sys.group, g);
    let points = sys.algebra.num_blocks();
    let mut c_group = 0.0f64;
    let mut lhs_rhs = Vec::with_capacity(samples.len());
    for f in samples {
        check_system(sys, f)?;
        require_fixed(sys, f)?;
        for j in 0..points {
            let collapsed = CcElement::from_terms(
                &scalar.algebra,
                f.terms().iter().map(|(g, a)| (g.clone(), AlgElement::scalar(&scalar.algebra, c(a.value(j).norm(), 0.0)))),
            )?;
            if collapsed.is_empty() {
                continue;
            }
            let num = lower_at(&scalar, &collapsed, radius)?;
            let den = norms(&scalar, &collapsed, Norm::TwoKappa(&kappa))?;
            c_group = c_group.max(num / den);
        }
        lhs_rhs.push((lower_at(sys, f, radius)?, norms(sys, f, Norm::AlphaKappa(&kappa))?));
    }
    let min_residual = lhs_rhs
        .iter()
        .map(|(l, r)| c_group * r - l)
        .fold(f64::INFINITY, f64::min);
    Ok(DecayChainReport {
        c_group,
        min_residual,
        samples: samples.len(),
        pass: min_residual >= -1e-9,
    })
}
