//! Invariant ideals of the coefficient algebra, membership at the `C_c`
//! level, quotient systems, E-invariance probes and central splittings.
//!
//! An ideal of a block algebra is a sum of blocks, so everything here is a
//! statement about block index sets.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeffalg::{c, AlgElement, AlgebraSpec};
use crate::crossed::{check_system, expectation, l1_norm, star, term_records, twisted_mul, CcElement, TermRecord};
use crate::error::{Error, Result};
use crate::system::{default_length, Action, Cocycle, TwistedSystem};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantIdeal {
    /// Sorted block indices.
    pub blocks: Vec<usize>,
}

impl InvariantIdeal {
    pub fn zero() -> Self {
        InvariantIdeal { blocks: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn complement(&self, spec: &AlgebraSpec) -> Vec<usize> {
        (0..spec.num_blocks()).filter(|j| !self.blocks.contains(j)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealLattice {
    /// Orbits of the block permutations induced by the action.
    pub orbits: Vec<Vec<usize>>,
    /// Every union of orbits, ordered by the bitmask of orbits used.
    pub ideals: Vec<InvariantIdeal>,
}

/// Orbits of blocks under the permutations of `α_s` for the generators `s`;
/// inner parts and the cocycle never move blocks.
pub fn block_orbits(sys: &TwistedSystem) -> Vec<Vec<usize>> {
    let n = sys.algebra.num_blocks();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    if !sys.action_is_trivial() {
        for s in sys.group.generators() {
            let alpha = sys.alpha(&s);
            for (j, &src) in alpha.permutation_part().iter().enumerate() {
                let (a, b) = (find(&mut parent, j), find(&mut parent, src));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for j in 0..n {
        let r = find(&mut parent, j);
        match roots.iter().position(|&x| x == r) {
            Some(i) => orbits[i].push(j),
            None => {
                roots.push(r);
                orbits.push(vec![j]);
            }
        }
    }
    orbits
}

/// All unions of block orbits, from `{0}` to `A`.
pub fn enumerate_invariant_ideals(sys: &TwistedSystem) -> Result<IdealLattice> {
    let orbits = block_orbits(sys);
    if orbits.len() > 20 {
        return Err(Error::InvalidParameter(format!("{} block orbits is too many to enumerate", orbits.len())));
    }
    let ideals = (0u32..1 << orbits.len())
        .map(|mask| {
            let mut blocks: Vec<usize> = orbits
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, o)| o.iter().copied())
                .collect();
            blocks.sort_unstable();
            InvariantIdeal { blocks }
        })
        .collect();
    Ok(IdealLattice { orbits, ideals })
}

/// Checks that `blocks` is a union of orbits.
pub fn invariant_ideal(sys: &TwistedSystem, mut blocks: Vec<usize>) -> Result<InvariantIdeal> {
    blocks.sort_unstable();
    blocks.dedup();
    if blocks.iter().any(|&j| j >= sys.algebra.num_blocks()) {
        return Err(Error::InvalidParameter("block index out of range".into()));
    }
    for orbit in block_orbits(sys) {
        let inside = orbit.iter().filter(|j| blocks.contains(j)).count();
        if inside != 0 && inside != orbit.len() {
            return Err(Error::InvalidParameter(format!("blocks {blocks:?} are not invariant under the action")));
        }
    }
    Ok(InvariantIdeal { blocks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipMode {
    /// `f ∈ ⟨J⟩_alg`, the algebraic ideal generated by `J`.
    InducedAlgebraic,
    /// `f̂(g) ∈ J` for every `g`.
    HatJ,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub mode: MembershipMode,
    pub member: bool,
    /// Largest entry of a block outside `J`, over all coefficients.
    pub max_outside: f64,
}

/// At the `C_c` level both modes are the same blockwise test.
pub fn ideal_membership(f: &CcElement, ideal: &InvariantIdeal, mode: MembershipMode) -> Membership {
    let max_outside = f
        .terms()
        .values()
        .map(|a| a.max_abs_outside(&ideal.blocks))
        .fold(0.0, f64::max);
    Membership { mode, member: max_outside <= tol::MEMBERSHIP, max_outside }
}

#[derive(Clone, Debug)]
pub struct QuotientSystem {
    pub system: TwistedSystem,
    /// Blocks of the parent algebra that survive, in order.
    pub keep: Vec<usize>,
}

impl QuotientSystem {
    /// `q(a)`.
    pub fn map_algebra(&self, a: &AlgElement) -> AlgElement {
        a.restrict(&self.keep)
    }

    /// `q̃(f)(g) = q(f(g))`.
    pub fn map(&self, f: &CcElement) -> Result<CcElement> {
        CcElement::from_terms(
            &self.system.algebra,
            f.terms().iter().map(|(g, a)| (g.clone(), self.map_algebra(a))),
        )
    }
}

pub fn quotient_system(sys: &TwistedSystem, ideal: &InvariantIdeal) -> Result<QuotientSystem> {
    let keep = ideal.complement(&sys.algebra);
    if keep.is_empty() {
        return Err(Error::IdealIsWhole);
    }
    let checked = invariant_ideal(sys, ideal.blocks.clone())?;
    if checked.is_zero() {
        return Ok(QuotientSystem { system: sys.clone(), keep });
    }
    let dims: Vec<usize> = keep.iter().map(|&j| sys.algebra.blocks()[j]).collect();
    let algebra = AlgebraSpec::new(dims)?;
    let action = if sys.action_is_trivial() {
        Action::Trivial
    } else {
        Action::Quotient { base: Box::new(sys.action.clone()), parent: sys.algebra.clone(), keep: keep.clone() }
    };
    let cocycle = if sys.cocycle_is_trivial() {
        Cocycle::Trivial
    } else {
        Cocycle::Quotient { base: Box::new(sys.cocycle.clone()), parent: sys.algebra.clone(), keep: keep.clone() }
    };
    let system = TwistedSystem::new(algebra, sys.group.clone(), action, cocycle)?;
    Ok(QuotientSystem { system, keep })
}

#[derive(Clone, Debug, Serialize)]
pub struct EInvarianceReport {
    /// Smallest invariant ideal containing `E(gen)` for every generator,
    /// standing in for `𝒥 ∩ A`.
    pub visible_ideal: InvariantIdeal,
    pub samples: usize,
    pub violations: usize,
    /// Largest block entry of `E(z)` outside the visible ideal, relative to
    /// `max(1, ‖z‖₁)`.
    pub max_violation: f64,
    pub witness: Option<Vec<TermRecord>>,
    pub e_invariant: bool,
}

/// Samples `z = h₁ ⋆ gen ⋆ h₂` and tests `E(z)` against the visible ideal.
/// Besides random `h₁, h₂` on a ball, every `δ_{k⁻¹}` for `k` in a
/// generator's support is tried on the left.
pub fn e_invariance_probe(
    sys: &TwistedSystem,
    generators: &[CcElement],
    sample_budget: usize,
    seed: u64,
) -> Result<EInvarianceReport> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("an ideal needs at least one generator".into()));
    }
    let mut visible: Vec<usize> = Vec::new();
    for gen in generators {
        check_system(sys, gen)?;
        let e = expectation(sys, gen);
        visible.extend((0..sys.algebra.num_blocks()).filter(|&j| e.block(j).iter().any(|z| z.norm() > tol::MEMBERSHIP)));
    }
    let visible_ideal = invariant_hull(sys, visible);

    let length = default_length(&sys.group);
    let radius = generators
        .iter()
        .map(|g| g.support_radius(&sys.group, length))
        .fold(1.0, f64::max);
    let pool = sys.group.ball(radius, length)?;
    let unit = CcElement::unit(sys);
    let mut pairs: Vec<(CcElement, usize, CcElement)> = Vec::new();
    for (i, gen) in generators.iter().enumerate() {
        pairs.push((unit.clone(), i, unit.clone()));
        for k in gen.support() {
            let left = CcElement::delta(&sys.algebra, sys.group.inv(&k), sys.one())?;
            pairs.push((left, i, unit.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_budget {
        let side = |rng: &mut ChaCha8Rng| {
            let k = rng.random_range(1..=pool.len().min(4));
            let support: Vec<_> = pool.choose_multiple(rng, k).cloned().collect();
            CcElement::random(&sys.algebra, &support, rng)
        };
        let (h1, h2) = (side(&mut rng), side(&mut rng));
        pairs.push((h1, rng.random_range(0..generators.len()), h2));
    }

    let mut violations = 0;
    let mut max_violation = 0.0f64;
    let mut witness = None;
    for (h1, i, h2) in &pairs {
        let z = twisted_mul(sys, &twisted_mul(sys, h1, &generators[*i])?, h2)?;
        let v = expectation(sys, &z).max_abs_outside(&visible_ideal.blocks) / l1_norm(&z).max(1.0);
        if v > tol::MEMBERSHIP {
            violations += 1;
        }
        if v > max_violation {
            max_violation = v;
            witness = Some(term_records(&sys.group, &z));
        }
    }
    Ok(EInvarianceReport {
        visible_ideal,
        samples: pairs.len(),
        violations,
        max_violation,
        witness: if violations > 0 { witness } else { None },
        e_invariant: violations == 0,
    })
}

fn invariant_hull(sys: &TwistedSystem, blocks: Vec<usize>) -> InvariantIdeal {
    let mut out: Vec<usize> = block_orbits(sys)
        .into_iter()
        .filter(|o| o.iter().any(|j| blocks.contains(j)))
        .flatten()
        .collect();
    out.sort_unstable();
    InvariantIdeal { blocks: out }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub self_adjoint: f64,
    pub unitary: f64,
    /// `max ‖s⋆x − x⋆s‖` over the supplied elements.
    pub commutation: Vec<f64>,
    /// `max(‖p⋆p − p‖, ‖q⋆q − q‖, ‖p* − p‖, ‖q* − q‖)`.
    pub idempotent: f64,
    /// `‖p⋆q‖`.
    pub orthogonal: f64,
    /// `‖p + q − 1‖`.
    pub sum: f64,
}

/// `p = (1+s)/2`, `q = (1−s)/2` for a self-adjoint unitary `s` commuting with
/// every element of `commutants`.
pub fn central_projection_split(
    sys: &TwistedSystem,
    s: &CcElement,
    commutants: &[CcElement],
) -> Result<(CcElement, CcElement, SplitReport)> {
    check_system(sys, s)?;
    let unit = CcElement::unit(sys);
    let self_adjoint = star(sys, s).dist(s);
    let unitary = twisted_mul(sys, s, s)?.dist(&unit);
    for (condition, violation) in [("self-adjoint", self_adjoint), ("unitary", unitary)] {
        if violation > tol::ALGEBRAIC {
            return Err(Error::ConditionViolated { condition: condition.into(), violation, witness: "s".into() });
        }
    }
    let mut commutation = Vec::with_capacity(commutants.len());
    for (i, x) in commutants.iter().enumerate() {
        check_system(sys, x)?;
        let r = twisted_mul(sys, s, x)?.dist(&twisted_mul(sys, x, s)?);
        if r > tol::ALGEBRAIC {
            return Err(Error::ConditionViolated {
                condition: "central".into(),
                violation: r,
                witness: format!("commutant {i}"),
            });
        }
        commutation.push(r);
    }
    let half = c(0.5, 0.0);
    let p = unit.add(s)?.scale(half);
    let q = unit.sub(s)?.scale(half);
    let idempotent = [
        twisted_mul(sys, &p, &p)?.dist(&p),
        twisted_mul(sys, &q, &q)?.dist(&q),
        star(sys, &p).dist(&p),
        star(sys, &q).dist(&q),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let orthogonal = twisted_mul(sys, &p, &q)?.dist(&CcElement::zero(&sys.algebra));
    let sum = p.add(&q)?.dist(&unit);
    Ok((p, q, SplitReport { self_adjoint, unitary, commutation, idempotent, orthogonal, sum }))
}

/// `a ⊙ δ_e` for each matrix unit `a` and `1 ⊙ δ_s` for each generator `s`.
pub fn standard_commutants(sys: &TwistedSystem) -> Result<Vec<CcElement>> {
    let e = sys.group.identity();
    let mut out = Vec::new();
    for a in sys.algebra.matrix_units() {
        out.push(CcElement::delta(&sys.algebra, e.clone(), a)?);
    }
    for s in sys.group.generators() {
        out.push(CcElement::delta(&sys.algebra, s, sys.one())?);
    }
    Ok(out)
}
