//! Twisted C*-dynamical systems `(A, G, α, σ)` and their validator.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeffalg::{c, AlgAutomorphism, AlgElement, AlgebraSpec, C64};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::tol;

/// `g ↦ α_g`.
#[derive(Clone, Debug)]
pub enum Action {
    Trivial,
    /// One automorphism per group generator; `α_g` is the product along the
    /// normal-form word of `g`.
    Generators(Vec<AlgAutomorphism>),
    /// Total table on a finite group.
    Table(BTreeMap<GroupElement, AlgAutomorphism>),
    /// Induced action on the listed (invariant) blocks of `parent`.
    Quotient {
        base: Box<Action>,
        parent: AlgebraSpec,
        keep: Vec<usize>,
    },
}

/// `(g, h) ↦ σ(g, h)`.
#[derive(Clone, Debug)]
pub enum Cocycle {
    Trivial,
    /// `σ(m, n) = exp(2πi mᵀΘn)·1` on ℤ^d or a product of cyclic groups.
    Bicharacter { theta: Vec<Vec<f64>> },
    Section(SectionCocycle),
    /// Total table on a finite group.
    Table(BTreeMap<(GroupElement, GroupElement), AlgElement>),
    /// `base` multiplied by `factor` at a single pair.
    Perturbed {
        base: Box<Cocycle>,
        pair: (GroupElement, GroupElement),
        factor: C64,
    },
    Quotient {
        base: Box<Cocycle>,
        parent: AlgebraSpec,
        keep: Vec<usize>,
    },
}

/// Integer 2×2 matrix.
pub type IntMatrix = [[i128; 2]; 2];

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = [[0i128; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Inverse of a determinant-one integer matrix.
pub fn int_inv(a: &IntMatrix) -> IntMatrix {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

const IDENTITY: IntMatrix = [[1, 0], [0, 1]];
const MINUS_IDENTITY: IntMatrix = [[-1, 0], [0, -1]];

/// Cocycle of a central extension `1 → {±I} → K → ℤ₂∗ℤ₃ → 1` by 2×2 integer
/// matrices, with the section lifting each syllable to a fixed matrix.
///
/// The centre is realised as `C*({±I}) ≅ ℂ²` through its two characters, so
/// `σ(g,h) = (1, sign)` where `s(g)s(h)s(gh)⁻¹ = sign·I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionCocycle {
    lifts: [IntMatrix; 3],
    /// sign of `lift(a)·lift(b)·lift(a+b)⁻¹` for syllables `a, b` (0 = s,
    /// 1 = t, 2 = t²); only same-factor pairs are used.
    s_square: i8,
    t_merge: [[i8; 3]; 3],
}

impl SectionCocycle {
    /// The normal-form lift into SL(2,ℤ): `s ↦ [[0,-1],[1,0]]`,
    /// `t ↦ [[0,-1],[1,1]]`, `t² ↦ its square`.
    pub fn sl2z() -> Self {
        let s = [[0, -1], [1, 0]];
        let t = [[0, -1], [1, 1]];
        Self::new(IDENTITY, s, t, int_mul(&t, &t)).expect("SL(2,Z) lift is a valid section")
    }

    /// Lifts for `e, s, t, t²`. The lifts must satisfy the defining relations
    /// up to `±I`.
    pub fn new(e: IntMatrix, s: IntMatrix, t: IntMatrix, t2: IntMatrix) -> Result<Self> {
        if e != IDENTITY {
            return Err(Error::SectionNotNormalized);
        }
        for m in [&s, &t, &t2] {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det != 1 {
                return Err(Error::InvalidParameter(format!(
                    "section lift {m:?} does not have determinant 1"
                )));
            }
        }
        let sign = |m: IntMatrix| -> Result<i8> {
            if m == IDENTITY {
                Ok(1)
            } else if m == MINUS_IDENTITY {
                Ok(-1)
            } else {
                Err(Error::InvalidParameter(format!(
                    "lift relation lands outside the centre {{±I}}: {m:?}"
                )))
            }
        };
        let lifts = [s, t, t2];
        let s_square = sign(int_mul(&s, &s))?;
        let lift_t = |k: usize| if k == 0 { IDENTITY } else { lifts[k] };
        let mut t_merge = [[1i8; 3]; 3];
        for a in 1..3 {
            for b in 1..3 {
                let prod = int_mul(&lift_t(a), &lift_t(b));
                t_merge[a][b] = sign(int_mul(&prod, &int_inv(&lift_t((a + b) % 3))))?;
            }
        }
        Ok(SectionCocycle { lifts, s_square, t_merge })
    }

    /// The lift of a normal-form word of ℤ₂∗ℤ₃.
    pub fn lift(&self, g: &GroupElement) -> IntMatrix {
        g.raw()
            .iter()
            .fold(IDENTITY, |acc, &x| int_mul(&acc, &self.lifts[x as usize]))
    }

    /// The sign `z` with `s(g)s(h) = z·s(gh)`, from the relations met while
    /// reducing the concatenated word.
    pub fn sign(&self, g: &GroupElement, h: &GroupElement) -> i8 {
        let mut left: Vec<i64> = g.raw().to_vec();
        let mut right: &[i64] = h.raw();
        let mut sign = 1i8;
        while let (Some(&a), Some(&b)) = (left.last(), right.first()) {
            match (a, b) {
                (0, 0) => {
                    sign *= self.s_square;
                    left.pop();
                    right = &right[1..];
                }
                (0, _) | (_, 0) => break,
                (a, b) => {
                    sign *= self.t_merge[a as usize][b as usize];
                    left.pop();
                    right = &right[1..];
                    let merged = (a + b) % 3;
                    if merged != 0 {
                        break;
                    }
                }
            }
        }
        sign
    }
}

/// The quadruple `(A, G, α, σ)`.
#[derive(Clone, Debug)]
pub struct TwistedSystem {
    pub algebra: AlgebraSpec,
    pub group: Group,
    pub action: Action,
    pub cocycle: Cocycle,
}

impl TwistedSystem {
    pub fn new(algebra: AlgebraSpec, group: Group, action: Action, cocycle: Cocycle) -> Result<Self> {
        group.validate()?;
        match &action {
            Action::Generators(gens) => {
                if gens.len() != group.generator_count() {
                    return Err(Error::InvalidParameter(format!(
                        "action needs {} generator automorphisms, got {}",
                        group.generator_count(),
                        gens.len()
                    )));
                }
                for a in gens {
                    if !a.as_endomorphism().fits(&algebra) {
                        return Err(Error::ShapeMismatch("action generator on wrong algebra".into()));
                    }
                }
            }
            Action::Table(t) => {
                let elems = group.elements()?;
                if elems.iter().any(|g| !t.contains_key(g)) {
                    return Err(Error::InvalidParameter("action table is not total".into()));
                }
            }
            _ => {}
        }
        match &cocycle {
            Cocycle::Bicharacter { theta } => {
                let k = match &group {
                    Group::Lattice { dim } => *dim as usize,
                    Group::Cyclic { .. } => 1,
                    Group::FiniteProduct { factors } => factors.len(),
                    _ => {
                        return Err(Error::InvalidParameter(
                            "bicharacter cocycles need an abelian coordinate group".into(),
                        ))
                    }
                };
                if theta.len() != k || theta.iter().any(|r| r.len() != k) {
                    return Err(Error::ShapeMismatch(format!("Θ must be {k}x{k}")));
                }
            }
            Cocycle::Section(_) => {
                if group != Group::ModularGroup || algebra != AlgebraSpec::commutative(2) {
                    return Err(Error::InvalidParameter(
                        "section cocycles live on ℤ₂∗ℤ₃ with A = ℂ²".into(),
                    ));
                }
            }
            Cocycle::Table(t) => {
                let elems = group.elements()?;
                for g in &elems {
                    for h in &elems {
                        match t.get(&(g.clone(), h.clone())) {
                            Some(v) if v.same_shape(&AlgElement::one(&algebra)) => {}
                            Some(_) => {
                                return Err(Error::ShapeMismatch("cocycle table value".into()))
                            }
                            None => {
                                return Err(Error::InvalidParameter(
                                    "cocycle table is not total".into(),
                                ))
                            }
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(TwistedSystem { algebra, group, action, cocycle })
    }

    /// `A` with trivial action and cocycle.
    pub fn untwisted(algebra: AlgebraSpec, group: Group) -> Result<Self> {
        Self::new(algebra, group, Action::Trivial, Cocycle::Trivial)
    }

    /// `α_g = Ad(V_g)`, `σ(g,h) = V_g V_h V_{gh}*` on a finite group, for a
    /// map `V` of unitaries with `V_e = 1`.
    pub fn inner_twist(
        algebra: AlgebraSpec,
        group: Group,
        v: impl Fn(&GroupElement) -> AlgElement,
    ) -> Result<Self> {
        let elems = group.elements()?;
        let vs: BTreeMap<GroupElement, AlgElement> =
            elems.iter().map(|g| (g.clone(), v(g))).collect();
        let mut action = BTreeMap::new();
        for (g, u) in &vs {
            action.insert(g.clone(), AlgAutomorphism::inner(u)?);
        }
        let mut table = BTreeMap::new();
        for g in &elems {
            for h in &elems {
                let gh = group.mul(g, h);
                let val = &(&vs[g] * &vs[h]) * &vs[&gh].star();
                table.insert((g.clone(), h.clone()), val);
            }
        }
        Self::new(algebra, group, Action::Table(action), Cocycle::Table(table))
    }

    pub fn one(&self) -> AlgElement {
        AlgElement::one(&self.algebra)
    }

    pub fn action_is_trivial(&self) -> bool {
        matches!(self.action, Action::Trivial)
    }

    pub fn alpha(&self, g: &GroupElement) -> AlgAutomorphism {
        eval_action(&self.action, &self.group, &self.algebra, g)
    }

    pub fn alpha_apply(&self, g: &GroupElement, a: &AlgElement) -> AlgElement {
        if self.action_is_trivial() {
            a.clone()
        } else {
            self.alpha(g).apply(a)
        }
    }

    /// `α_g⁻¹(a)`.
    pub fn alpha_inv_apply(&self, g: &GroupElement, a: &AlgElement) -> AlgElement {
        if self.action_is_trivial() {
            a.clone()
        } else {
            self.alpha(g).inverse().apply(a)
        }
    }

    pub fn sigma(&self, g: &GroupElement, h: &GroupElement) -> AlgElement {
        eval_cocycle(&self.cocycle, &self.group, &self.algebra, g, h)
    }

    pub fn cocycle_is_trivial(&self) -> bool {
        matches!(self.cocycle, Cocycle::Trivial)
    }

    /// `(g, h, k)` triples for validation: exhaustive when `|G| ≤ 64`,
    /// otherwise `ball(radius)³` when that has at most `cap` triples, and
    /// `cap` seeded samples from it beyond that.
    pub fn validation_triples(
        &self,
        radius: f64,
        cap: usize,
        seed: u64,
    ) -> Result<Vec<[GroupElement; 3]>> {
        let pool = match self.group.order() {
            Some(n) if n <= 64 => self.group.elements()?,
            _ => self.group.ball(radius, default_length(&self.group))?,
        };
        let total = pool.len().pow(3);
        if total <= cap || self.group.order().is_some_and(|n| n <= 64) {
            let mut out = Vec::with_capacity(total);
            for g in &pool {
                for h in &pool {
                    for k in &pool {
                        out.push([g.clone(), h.clone(), k.clone()]);
                    }
                }
            }
            return Ok(out);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..cap)
            .map(|_| {
                [0, 1, 2].map(|_| pool.choose(&mut rng).expect("ball is nonempty").clone())
            })
            .collect())
    }
}

/// Word length where defined, block length on ℤ₂∗ℤ₃.
pub fn default_length(group: &Group) -> LengthFunction {
    match group {
        Group::ModularGroup => LengthFunction::Block,
        _ => LengthFunction::Word,
    }
}

fn power(a: &AlgAutomorphism, k: i64) -> AlgAutomorphism {
    let base = if k < 0 { a.inverse() } else { a.clone() };
    let mut n = k.unsigned_abs();
    let spec_blocks: Vec<usize> = base.as_endomorphism().unitaries().iter().map(|u| u.nrows()).collect();
    let spec = AlgebraSpec::new(spec_blocks).expect("automorphism has blocks");
    let mut acc = AlgAutomorphism::identity(&spec);
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.compose(&sq);
        }
        sq = sq.compose(&sq);
        n >>= 1;
    }
    acc
}

fn eval_action(action: &Action, group: &Group, spec: &AlgebraSpec, g: &GroupElement) -> AlgAutomorphism {
    match action {
        Action::Trivial => AlgAutomorphism::identity(spec),
        Action::Generators(gens) => group
            .generator_word(g)
            .into_iter()
            .fold(AlgAutomorphism::identity(spec), |acc, (i, k)| {
                acc.compose(&power(&gens[i], k))
            }),
        Action::Table(t) => t[g].clone(),
        Action::Quotient { base, parent, keep } => eval_action(base, group, parent, g)
            .restrict(keep)
            .expect("quotient blocks are invariant"),
    }
}

fn eval_cocycle(
    cocycle: &Cocycle,
    group: &Group,
    spec: &AlgebraSpec,
    g: &GroupElement,
    h: &GroupElement,
) -> AlgElement {
    match cocycle {
        Cocycle::Trivial => AlgElement::one(spec),
        Cocycle::Bicharacter { theta } => {
            let (m, n) = (g.raw(), h.raw());
            let mut phase = 0.0;
            for (i, row) in theta.iter().enumerate() {
                for (j, &t) in row.iter().enumerate() {
                    if t != 0.0 {
                        phase += t * (m[i] * n[j]) as f64;
                    }
                }
            }
            AlgElement::scalar(spec, C64::from_polar(1.0, TAU * phase.rem_euclid(1.0)))
        }
        Cocycle::Section(sc) => {
            let z = sc.sign(g, h) as f64;
            AlgElement::from_values(&[c(1.0, 0.0), c(z, 0.0)])
        }
        Cocycle::Table(t) => t[&(g.clone(), h.clone())].clone(),
        Cocycle::Perturbed { base, pair, factor } => {
            let v = eval_cocycle(base, group, spec, g, h);
            if (g, h) == (&pair.0, &pair.1) {
                v.scale(*factor)
            } else {
                v
            }
        }
        Cocycle::Quotient { base, parent, keep } => {
            eval_cocycle(base, group, parent, g, h).restrict(keep)
        }
    }
}

/// Maximum violations of the twisted-action axioms over a sample.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ValidationReport {
    /// `α_g α_h (a) = σ(g,h) α_{gh}(a) σ(g,h)*`.
    pub twisted_action: f64,
    /// `σ(g,h)σ(gh,k) = α_g(σ(h,k)) σ(g,hk)`.
    pub cocycle_identity: f64,
    /// `σ(g,e) = σ(e,g) = 1` and `α_e = id`.
    pub normalization: f64,
    pub unitarity: f64,
    pub triples_checked: usize,
    /// Display form of the triple with the largest violation.
    pub witness: Option<[String; 3]>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn max_violation(&self) -> f64 {
        self.twisted_action
            .max(self.cocycle_identity)
            .max(self.normalization)
            .max(self.unitarity)
    }
}

/// Checks the four axiom groups on every triple and probe; violations are
/// reported, never thrown.
pub fn validate_system(
    sys: &TwistedSystem,
    triples: &[[GroupElement; 3]],
    probes: &[AlgElement],
) -> ValidationReport {
    use rayon::prelude::*;
    let e = sys.group.identity();
    let one = sys.one();

    // per-triple maxima, reduced in input order for a deterministic witness
    let per: Vec<(f64, f64, f64, f64)> = triples
        .par_iter()
        .map(|[g, h, k]| {
            let gh = sys.group.mul(g, h);
            let hk = sys.group.mul(h, k);
            let s_gh = sys.sigma(g, h);
            let ag = sys.alpha(g);
            let ah = sys.alpha(h);
            let agh = sys.alpha(&gh);

            let mut act = 0.0f64;
            for a in probes {
                let lhs = ag.apply(&ah.apply(a));
                let rhs = &(&s_gh * &agh.apply(a)) * &s_gh.star();
                act = act.max(lhs.dist(&rhs));
            }

            let lhs = &s_gh * &sys.sigma(&gh, k);
            let rhs = &ag.apply(&sys.sigma(h, k)) * &sys.sigma(g, &hk);
            let coc = lhs.dist(&rhs);

            let mut norm = sys.sigma(g, &e).dist(&one).max(sys.sigma(&e, g).dist(&one));
            if sys.group.is_identity(g) {
                for a in probes {
                    norm = norm.max(ag.apply(a).dist(a));
                }
            }

            let mut unit = 0.0f64;
            for s in [&s_gh, &sys.sigma(h, k)] {
                unit = unit
                    .max((&s.star() * s).dist(&one))
                    .max((s * &s.star()).dist(&one));
            }
            (act, coc, norm, unit)
        })
        .collect();

    let mut report = ValidationReport {
        twisted_action: 0.0,
        cocycle_identity: 0.0,
        normalization: 0.0,
        unitarity: 0.0,
        triples_checked: triples.len(),
        witness: None,
        pass: true,
    };
    let mut worst = 0.0;
    for (t, &(act, coc, norm, unit)) in triples.iter().zip(&per) {
        report.twisted_action = report.twisted_action.max(act);
        report.cocycle_identity = report.cocycle_identity.max(coc);
        report.normalization = report.normalization.max(norm);
        report.unitarity = report.unitarity.max(unit);
        let m = act.max(coc).max(norm).max(unit);
        if m > worst {
            worst = m;
            report.witness = Some(t.clone().map(|x| sys.group.display(&x)));
        }
    }
    report.pass = report.max_violation() <= tol::ALGEBRAIC;
    if report.pass {
        report.witness = None;
    }
    report
}

/// Shipped systems used by tests, presets and the acceptance suite.
pub mod presets {
    use super::*;
    use nalgebra::DMatrix;

    /// ℤ acting on `M₂ ⊕ ℂ` by `Ad(U)` on the matrix block, trivial cocycle.
    pub fn matrix_line() -> TwistedSystem {
        let spec = AlgebraSpec::new(vec![2, 1]).expect("valid");
        let (ct, st) = (0.6f64, 0.8f64);
        // a fixed non-diagonal unitary with irrational-looking spectrum
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[c(ct, 0.0), c(0.0, -st), c(0.0, -st), c(ct, 0.0)],
        ) * C64::from_polar(1.0, 0.3);
        let alpha = AlgAutomorphism::new(&spec, vec![0, 1], vec![u, DMatrix::identity(1, 1)])
            .expect("unitary");
        TwistedSystem::new(spec, Group::lattice(1), Action::Generators(vec![alpha]), Cocycle::Trivial)
            .expect("valid preset")
    }

    /// The rotation algebra: ℤ², `A = ℂ`, `σ((m₁,m₂),(n₁,n₂)) = exp(2πiθ m₂n₁)`.
    pub fn rotation_algebra(theta: f64) -> TwistedSystem {
        TwistedSystem::new(
            AlgebraSpec::scalar(),
            Group::lattice(2),
            Action::Trivial,
            Cocycle::Bicharacter { theta: vec![vec![0.0, 0.0], vec![theta, 0.0]] },
        )
        .expect("valid preset")
    }

    /// ℤ_n acting on `ℂ²` by swapping the points, with the bicharacter
    /// `σ(m,n) = exp(2πi·k·mn/n)`; `n` must be even for the swap to be an
    /// action.
    pub fn cyclic_swap(n: u32, k: i64) -> TwistedSystem {
        let swap = AlgAutomorphism::permutation(vec![1, 0]).expect("valid");
        TwistedSystem::new(
            AlgebraSpec::commutative(2),
            Group::cyclic(n),
            Action::Generators(vec![swap]),
            Cocycle::Bicharacter { theta: vec![vec![k as f64 / n as f64]] },
        )
        .expect("valid preset")
    }

    /// `ℂ²`-valued section cocycle of SL(2,ℤ) → PSL(2,ℤ) ≅ ℤ₂∗ℤ₃, trivial
    /// action.
    pub fn psl_model() -> TwistedSystem {
        TwistedSystem::new(
            AlgebraSpec::commutative(2),
            Group::ModularGroup,
            Action::Trivial,
            Cocycle::Section(SectionCocycle::sl2z()),
        )
        .expect("valid preset")
    }

    /// Dihedral group of order 2n acting on `M₂` by `Ad` of its standard
    /// projective lift, giving a non-central matrix-valued cocycle.
    pub fn dihedral_inner(n: u32) -> TwistedSystem {
        let group = Group::Dihedral { n };
        let spec = AlgebraSpec::new(vec![2]).expect("valid");
        let theta = std::f64::consts::PI / n as f64;
        let g2 = group.clone();
        TwistedSystem::inner_twist(spec, group, move |g| {
            // r ↦ diag(e^{iθ}, e^{-iθ}) rotation by half-angle, s ↦ [[0,1],[1,0]]
            let word = g2.generator_word(g);
            let mut m = DMatrix::<C64>::identity(2, 2);
            for (gen, k) in word {
                let step = if gen == 0 {
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            C64::from_polar(1.0, theta * k as f64),
                            c(0.0, 0.0),
                            c(0.0, 0.0),
                            C64::from_polar(1.0, -theta * k as f64),
                        ],
                    )
                } else {
                    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
                };
                m = m * step;
            }
            AlgElement::from_blocks(vec![m]).expect("square")
        })
        .expect("valid preset")
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    fn probes(spec: &AlgebraSpec) -> Vec<AlgElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        (0..3).map(|_| AlgElement::random(spec, &mut rng)).collect()
    }

    fn check(sys: &TwistedSystem) -> ValidationReport {
        let triples = sys.validation_triples(3.0, 20_000, 5).unwrap();
        validate_system(sys, &triples, &probes(&sys.algebra))
    }

    #[test]
    fn presets_validate() {
        for sys in [
            matrix_line(),
            rotation_algebra(0.2),
            cyclic_swap(12, 1),
            psl_model(),
            dihedral_inner(3),
        ] {
            let r = check(&sys);
            assert!(r.pass, "{:?}: {r:?}", sys.group);
        }
    }

    #[test]
    fn perturbed_cocycle_fails_with_expected_size() {
        let base = rotation_algebra(0.2);
        let g = base.group.parse("(1,0)").unwrap();
        let h = base.group.parse("(0,1)").unwrap();
        let factor = C64::from_polar(1.0, 0.1);
        let sys = TwistedSystem {
            cocycle: Cocycle::Perturbed {
                base: Box::new(base.cocycle.clone()),
                pair: (g.clone(), h.clone()),
                factor,
            },
            ..base
        };
        let k = sys.group.parse("(0,1)").unwrap();
        // witness triple containing the perturbed pair
        let r = validate_system(&sys, &[[g, h, k]], &probes(&sys.algebra));
        assert!(!r.pass);
        let expected = (factor - c(1.0, 0.0)).norm();
        assert!((r.cocycle_identity - expected).abs() < 1e-12, "{r:?}");
        assert!(r.witness.is_some());
    }

    #[test]
    fn non_homomorphic_action_fails() {
        // ℤ₃ acting by a swap is not an action
        let swap = AlgAutomorphism::permutation(vec![1, 0]).unwrap();
        let sys = TwistedSystem::new(
            AlgebraSpec::commutative(2),
            Group::cyclic(3),
            Action::Generators(vec![swap]),
            Cocycle::Trivial,
        )
        .unwrap();
        assert!(!check(&sys).pass);
    }

    /// Independent route: multiply the integer lifts directly.
    #[test]
    fn section_signs_match_matrix_products() {
        let g = Group::ModularGroup;
        let sc = SectionCocycle::sl2z();
        let ball = g.ball(4.0, LengthFunction::Block).unwrap();
        for x in &ball {
            for y in &ball {
                let z = int_mul(
                    &int_mul(&sc.lift(x), &sc.lift(y)),
                    &int_inv(&sc.lift(&g.mul(x, y))),
                );
                let expected = if z == IDENTITY {
                    1
                } else {
                    assert_eq!(z, MINUS_IDENTITY);
                    -1
                };
                assert_eq!(sc.sign(x, y), expected, "{x:?} {y:?}");
            }
        }
        let u = [[0, -1], [1, 1]];
        assert_eq!(int_mul(&int_mul(&u, &u), &u), MINUS_IDENTITY);
    }

    #[test]
    fn homomorphic_section_gives_trivial_cocycle() {
        // determinant -1 lifts are rejected
        let flip = [[0, 1], [1, 0]];
        let t = [[0, -1], [1, -1]];
        let t2 = int_mul(&t, &t);
        assert!(SectionCocycle::new(IDENTITY, flip, t, t2).is_err());
        // s ↦ I, t ↦ an order-3 matrix: a homomorphism ℤ₂∗ℤ₃ → SL(2,ℤ)
        assert_eq!(int_mul(&t2, &t), IDENTITY);
        let sc = SectionCocycle::new(IDENTITY, IDENTITY, t, t2).unwrap();
        let g = Group::ModularGroup;
        let ball = g.ball(3.0, LengthFunction::Block).unwrap();
        for x in &ball {
            for y in &ball {
                assert_eq!(sc.sign(x, y), 1);
            }
        }
    }

    #[test]
    fn section_rejects_bad_identity() {
        let s = [[0, -1], [1, 0]];
        let t = [[0, -1], [1, 1]];
        assert_eq!(
            SectionCocycle::new(MINUS_IDENTITY, s, t, int_mul(&t, &t)),
            Err(Error::SectionNotNormalized)
        );
    }

    #[test]
    fn sigma_inverse_pair_identity() {
        for sys in [matrix_line(), rotation_algebra(0.3), psl_model(), dihedral_inner(4)] {
            let pool = match sys.group.order() {
                Some(_) => sys.group.elements().unwrap(),
                None => sys.group.ball(3.0, default_length(&sys.group)).unwrap(),
            };
            for g in &pool {
                let gi = sys.group.inv(g);
                let lhs = sys.sigma(g, &gi);
                let rhs = sys.alpha_apply(g, &sys.sigma(&gi, g));
                assert!(lhs.approx_eq(&rhs, 1e-10));
            }
        }
    }

    #[test]
    fn torus_relation_value() {
        let sys = rotation_algebra(0.2);
        let g = sys.group.parse("(0,1)").unwrap();
        let h = sys.group.parse("(1,0)").unwrap();
        let v = sys.sigma(&g, &h).value(0);
        assert!((v - C64::from_polar(1.0, TAU * 0.2)).norm() < 1e-14);
    }
}
