//! Free Hilbert `A`-modules `Aⁿ`, adjointable operators and equivariant
//! representations.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::coeffalg::{c, AddAssignRef, AlgElement, AlgEndomorphism, AlgebraSpec, C64};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement};
use crate::system::TwistedSystem;
use crate::tol;

/// Largest module rank accepted by the central-part solver.
pub const MAX_RANK: usize = 8;

/// A column `(x_1, …, x_n)` over `A`. Inner products are linear in the
/// second variable: `⟨x, y⟩ = Σ x_i* y_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector {
    entries: Vec<AlgElement>,
}

impl ModuleVector {
    pub fn new(entries: Vec<AlgElement>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("module vectors have rank >= 1".into()));
        }
        if entries.iter().any(|a| !a.same_shape(&entries[0])) {
            return Err(Error::ShapeMismatch("entries over different algebras".into()));
        }
        Ok(ModuleVector { entries })
    }

    pub fn zero(spec: &AlgebraSpec, n: usize) -> Self {
        ModuleVector { entries: vec![AlgElement::zero(spec); n] }
    }

    /// `(1, 0, …, 0)` shifted to position `i`.
    pub fn basis(spec: &AlgebraSpec, n: usize, i: usize) -> Self {
        let mut v = Self::zero(spec, n);
        v.entries[i] = AlgElement::one(spec);
        v
    }

    /// `(ξ_1·1, …, ξ_n·1)` for a complex vector `ξ`.
    pub fn from_scalars(spec: &AlgebraSpec, xi: &[C64]) -> Self {
        ModuleVector {
            entries: xi.iter().map(|&z| AlgElement::scalar(spec, z)).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, n: usize, rng: &mut R) -> Self {
        ModuleVector {
            entries: (0..n).map(|_| AlgElement::random(spec, rng)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AlgElement] {
        &self.entries
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.entries[0].spec()
    }

    fn check(&self, other: &ModuleVector) -> Result<()> {
        if self.rank() != other.rank() || !self.entries[0].same_shape(&other.entries[0]) {
            return Err(Error::ShapeMismatch(format!(
                "module vectors of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        Ok(())
    }

    pub fn inner(&self, other: &ModuleVector) -> Result<AlgElement> {
        self.check(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &ModuleVector) -> AlgElement {
        let mut acc = AlgElement::zero(&self.entries[0].spec());
        for (x, y) in self.entries.iter().zip(&other.entries) {
            acc.add_assign_ref(&(&x.star() * y));
        }
        acc
    }

    /// `‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_unchecked(self).norm().sqrt()
    }

    /// `x·a`.
    pub fn right_mul(&self, a: &AlgElement) -> ModuleVector {
        ModuleVector { entries: self.entries.iter().map(|x| x * a).collect() }
    }

    pub fn map(&self, f: impl Fn(&AlgElement) -> AlgElement) -> ModuleVector {
        ModuleVector { entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check(other)?;
        Ok(ModuleVector {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, z: C64) -> ModuleVector {
        self.map(|a| a.scale(z))
    }

    pub fn dist(&self, other: &ModuleVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }

    fn flatten(&self) -> Vec<C64> {
        self.entries
            .iter()
            .flat_map(|a| a.blocks().iter().flat_map(|b| b.transpose().iter().copied().collect::<Vec<_>>()))
            .collect()
    }

    fn unflatten(spec: &AlgebraSpec, n: usize, data: &[C64]) -> ModuleVector {
        let mut it = data.iter();
        let entries = (0..n)
            .map(|_| {
                let blocks = spec
                    .blocks()
                    .iter()
                    .map(|&d| DMatrix::from_row_iterator(d, d, it.by_ref().take(d * d).copied()))
                    .collect();
                AlgElement::from_blocks(blocks).expect("square blocks")
            })
            .collect();
        ModuleVector { entries }
    }
}

/// An `n × n` matrix over `A`, acting on columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleOperator {
    n: usize,
    entries: Vec<AlgElement>,
}

impl ModuleOperator {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<AlgElement>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!("need {} entries for rank {n}", n * n)));
        }
        Ok(ModuleOperator { n, entries })
    }

    pub fn identity(spec: &AlgebraSpec, n: usize) -> Self {
        Self::diagonal(n, &AlgElement::one(spec))
    }

    pub fn diagonal(n: usize, a: &AlgElement) -> Self {
        let zero = AlgElement::zero(&a.spec());
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { a.clone() } else { zero.clone() })
            .collect();
        ModuleOperator { n, entries }
    }

    /// `u ⊗ 1` for a complex `n × n` matrix `u`.
    pub fn from_scalar_matrix(spec: &AlgebraSpec, u: &DMatrix<C64>) -> Self {
        let n = u.nrows();
        let entries = (0..n * n)
            .map(|k| AlgElement::scalar(spec, u[(k / n, k % n)]))
            .collect();
        ModuleOperator { n, entries }
    }

    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, n: usize, rng: &mut R) -> Self {
        ModuleOperator {
            n,
            entries: (0..n * n).map(|_| AlgElement::random(spec, rng)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgElement {
        &self.entries[i * self.n + j]
    }

    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        if x.rank() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "operator of rank {} on vector of rank {}",
                self.n,
                x.rank()
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &ModuleVector) -> ModuleVector {
        let spec = x.spec();
        let entries = (0..self.n)
            .map(|i| {
                let mut acc = AlgElement::zero(&spec);
                for j in 0..self.n {
                    acc.add_assign_ref(&(self.entry(i, j) * &x.entries[j]));
                }
                acc
            })
            .collect();
        ModuleVector { entries }
    }

    /// Entrywise star of the transpose.
    pub fn adjoint(&self) -> ModuleOperator {
        let n = self.n;
        ModuleOperator {
            n,
            entries: (0..n * n).map(|k| self.entry(k % n, k / n).star()).collect(),
        }
    }

    pub fn mul(&self, other: &ModuleOperator) -> ModuleOperator {
        let n = self.n;
        let spec = self.entries[0].spec();
        let entries = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let mut acc = AlgElement::zero(&spec);
                for m in 0..n {
                    acc.add_assign_ref(&(self.entry(i, m) * other.entry(m, j)));
                }
                acc
            })
            .collect();
        ModuleOperator { n, entries }
    }
}

/// The left action `ρ` of `A` on `Aⁿ`.
#[derive(Clone, Debug)]
pub enum RhoRule {
    /// `ρ(a) = diag(a)`.
    LeftMultiplication,
    /// `ρ(a) = diag(β(a))` for a unital endomorphism `β`.
    Endomorphism(AlgEndomorphism),
}

impl RhoRule {
    pub fn eval(&self, a: &AlgElement) -> AlgElement {
        match self {
            RhoRule::LeftMultiplication => a.clone(),
            RhoRule::Endomorphism(b) => b.apply(a),
        }
    }

    pub fn apply(&self, a: &AlgElement, x: &ModuleVector) -> ModuleVector {
        let ra = self.eval(a);
        x.map(|xi| &ra * xi)
    }
}

/// A unitary representation of `G` on `ℂⁿ`, given on the generators.
#[derive(Clone, Debug)]
pub struct GroupUnitaryRep {
    generators: Vec<DMatrix<C64>>,
}

impl GroupUnitaryRep {
    pub fn new(group: &Group, generators: Vec<DMatrix<C64>>) -> Result<Self> {
        if generators.len() != group.generator_count() {
            return Err(Error::InvalidParameter(format!(
                "representation needs {} generator matrices",
                group.generator_count()
            )));
        }
        let n = generators[0].nrows();
        for u in &generators {
            if u.nrows() != n || u.ncols() != n {
                return Err(Error::ShapeMismatch("generator matrices must share a size".into()));
            }
            let defect = (u.adjoint() * u - DMatrix::identity(n, n))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > tol::ALGEBRAIC {
                return Err(Error::InvalidParameter("generator matrix is not unitary".into()));
            }
        }
        Ok(GroupUnitaryRep { generators })
    }

    /// The left regular representation of a finite group.
    pub fn regular(group: &Group) -> Result<Self> {
        let elems = group.elements()?;
        let n = elems.len();
        let gens = group
            .generators()
            .iter()
            .map(|s| {
                DMatrix::from_fn(n, n, |i, j| {
                    let moved = group.mul(s, &elems[j]);
                    if elems[i] == moved {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self::new(group, gens)
    }

    pub fn dim(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn eval(&self, group: &Group, g: &GroupElement) -> DMatrix<C64> {
        let n = self.dim();
        group
            .generator_word(g)
            .into_iter()
            .fold(DMatrix::identity(n, n), |acc, (i, k)| {
                let base = if k < 0 { self.generators[i].adjoint() } else { self.generators[i].clone() };
                (0..k.unsigned_abs()).fold(acc, |m, _| m * &base)
            })
    }
}

/// `v(g)x = V_g · α_g(x)`, with `α_g` applied entrywise.
#[derive(Clone, Debug)]
pub enum VRule {
    /// `V_g = 1`.
    Alpha,
    /// `V_g = u(g) ⊗ 1`.
    TensorUnitary(GroupUnitaryRep),
    /// `base` with `V_g` multiplied by `factor` at one group element.
    Scaled {
        base: Box<VRule>,
        at: GroupElement,
        factor: C64,
    },
}

/// An equivariant representation `(ρ, v)` of a system on `Aⁿ`.
#[derive(Clone, Debug)]
pub struct EquivariantRep {
    pub rank: usize,
    pub rho: RhoRule,
    pub v: VRule,
}

impl EquivariantRep {
    /// The trivial pair `(ℓ, α)` on `A`.
    pub fn trivial() -> Self {
        EquivariantRep { rank: 1, rho: RhoRule::LeftMultiplication, v: VRule::Alpha }
    }

    /// `(ℓ, u ⊗ α)` on `A^d`.
    pub fn tensor_unitary(u: GroupUnitaryRep) -> Self {
        EquivariantRep { rank: u.dim(), rho: RhoRule::LeftMultiplication, v: VRule::TensorUnitary(u) }
    }

    pub fn rho(&self, a: &AlgElement, x: &ModuleVector) -> ModuleVector {
        self.rho.apply(a, x)
    }

    fn v_matrix(rule: &VRule, sys: &TwistedSystem, g: &GroupElement, inverse: bool) -> Option<(DMatrix<C64>, C64)> {
        // returns (scalar matrix, extra scalar factor); None means identity
        match rule {
            VRule::Alpha => None,
            VRule::TensorUnitary(u) => {
                let m = u.eval(&sys.group, g);
                Some((if inverse { m.adjoint() } else { m }, c(1.0, 0.0)))
            }
            VRule::Scaled { base, at, factor } => {
                let f = if g == at {
                    if inverse { c(1.0, 0.0) / factor } else { *factor }
                } else {
                    c(1.0, 0.0)
                };
                match Self::v_matrix(base, sys, g, inverse) {
                    Some((m, s)) => Some((m, s * f)),
                    None => Some((DMatrix::identity(1, 1), f)),
                }
            }
        }
    }

    fn apply_scalar_part(m: Option<(DMatrix<C64>, C64)>, x: &ModuleVector) -> ModuleVector {
        match m {
            None => x.clone(),
            Some((m, s)) if m.nrows() == 1 && x.rank() != 1 => x.scale(m[(0, 0)] * s),
            Some((m, s)) => {
                let spec = x.spec();
                let entries = (0..x.rank())
                    .map(|i| {
                        let mut acc = AlgElement::zero(&spec);
                        for j in 0..x.rank() {
                            acc.add_assign_ref(&x.entries()[j].scale(m[(i, j)] * s));
                        }
                        acc
                    })
                    .collect();
                ModuleVector { entries }
            }
        }
    }

    /// `v(g)x`.
    pub fn v(&self, sys: &TwistedSystem, g: &GroupElement, x: &ModuleVector) -> ModuleVector {
        let moved = x.map(|a| sys.alpha_apply(g, a));
        Self::apply_scalar_part(Self::v_matrix(&self.v, sys, g, false), &moved)
    }

    /// `v(g)⁻¹x`.
    pub fn v_inv(&self, sys: &TwistedSystem, g: &GroupElement, x: &ModuleVector) -> ModuleVector {
        let y = Self::apply_scalar_part(Self::v_matrix(&self.v, sys, g, true), x);
        y.map(|a| sys.alpha_inv_apply(g, a))
    }

    /// `ad_ρ(u)x = (ρ(u)x)·u*`.
    pub fn ad_rho(&self, u: &AlgElement, x: &ModuleVector) -> ModuleVector {
        self.rho(u, x).right_mul(&u.star())
    }
}

/// Maximum violation of each axiom over the samples.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EquivariantReport {
    /// `ρ(α_g(a)) = v(g)ρ(a)v(g)⁻¹`.
    pub covariance: f64,
    /// `v(g)v(h) = ad_ρ(σ(g,h)) v(gh)`.
    pub projectivity: f64,
    /// `α_g(⟨x,x′⟩) = ⟨v(g)x, v(g)x′⟩`.
    pub inner_product: f64,
    /// `v(g)(x·a) = (v(g)x)·α_g(a)`.
    pub twisted_linearity: f64,
    /// `v(e) = 1` and `v(g)⁻¹v(g) = 1`.
    pub identity: f64,
    pub pass: bool,
}

pub fn validate_equivariant(
    rep: &EquivariantRep,
    sys: &TwistedSystem,
    group_samples: &[GroupElement],
    algebra_samples: &[AlgElement],
    vectors: &[ModuleVector],
) -> Result<EquivariantReport> {
    for x in vectors {
        if x.rank() != rep.rank || x.spec() != sys.algebra {
            return Err(Error::ShapeMismatch("sample vector does not live on the module".into()));
        }
    }
    let mut r = EquivariantReport {
        covariance: 0.0,
        projectivity: 0.0,
        inner_product: 0.0,
        twisted_linearity: 0.0,
        identity: 0.0,
        pass: false,
    };
    let e = sys.group.identity();
    for x in vectors {
        r.identity = r.identity.max(rep.v(sys, &e, x).dist(x));
    }
    for g in group_samples {
        for x in vectors {
            r.identity = r.identity.max(rep.v_inv(sys, g, &rep.v(sys, g, x)).dist(x));
            for a in algebra_samples {
                let lhs = rep.rho(&sys.alpha_apply(g, a), x);
                let rhs = rep.v(sys, g, &rep.rho(a, &rep.v_inv(sys, g, x)));
                r.covariance = r.covariance.max(lhs.dist(&rhs));

                let lhs = rep.v(sys, g, &x.right_mul(a));
                let rhs = rep.v(sys, g, x).right_mul(&sys.alpha_apply(g, a));
                r.twisted_linearity = r.twisted_linearity.max(lhs.dist(&rhs));
            }
            for y in vectors {
                let lhs = sys.alpha_apply(g, &x.inner_unchecked(y));
                let rhs = rep.v(sys, g, x).inner_unchecked(&rep.v(sys, g, y));
                r.inner_product = r.inner_product.max(lhs.dist(&rhs));
            }
            for h in group_samples {
                let lhs = rep.v(sys, g, &rep.v(sys, h, x));
                let gh = sys.group.mul(g, h);
                let rhs = rep.ad_rho(&sys.sigma(g, h), &rep.v(sys, &gh, x));
                r.projectivity = r.projectivity.max(lhs.dist(&rhs));
            }
        }
    }
    r.pass = [r.covariance, r.projectivity, r.inner_product, r.twisted_linearity, r.identity]
        .iter()
        .all(|&v| v <= tol::ALGEBRAIC);
    Ok(r)
}

/// Orthonormal basis (over ℂ, after flattening) of
/// `Z_X = {z : ρ(a)z = z·a for all a}`.
pub fn central_part(rep: &EquivariantRep, spec: &AlgebraSpec) -> Result<Vec<ModuleVector>> {
    let n = rep.rank;
    if n > MAX_RANK {
        return Err(Error::InvalidParameter(format!("module rank {n} exceeds {MAX_RANK}")));
    }
    let unknowns = n * spec.dim();
    let units = spec.matrix_units();
    let rows_per_unit = unknowns;
    let rows = (units.len() * rows_per_unit).max(unknowns);
    let mut m = DMatrix::<C64>::zeros(rows, unknowns);
    for col in 0..unknowns {
        let mut e = vec![c(0.0, 0.0); unknowns];
        e[col] = c(1.0, 0.0);
        let z = ModuleVector::unflatten(spec, n, &e);
        for (k, a) in units.iter().enumerate() {
            let lhs = rep.rho(a, &z);
            let rhs = z.right_mul(a);
            let diff = lhs.add(&rhs.scale(c(-1.0, 0.0)))?.flatten();
            for (i, v) in diff.into_iter().enumerate() {
                m[(k * rows_per_unit + i, col)] = v;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let scale = svd.singular_values.max().max(1.0);
    let basis = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol::ALGEBRAIC * scale)
        .map(|(i, _)| {
            let row: Vec<C64> = v_t.row(i).iter().map(|z| z.conj()).collect();
            ModuleVector::unflatten(spec, n, &row)
        })
        .collect();
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(31)
    }

    fn samples(sys: &TwistedSystem, n: usize) -> (Vec<GroupElement>, Vec<AlgElement>, Vec<ModuleVector>) {
        let mut r = rng();
        let gs = match sys.group.order() {
            Some(_) => sys.group.elements().unwrap(),
            None => sys.group.ball(2.0, crate::system::default_length(&sys.group)).unwrap(),
        };
        let as_ = (0..3).map(|_| AlgElement::random(&sys.algebra, &mut r)).collect();
        let xs = (0..3).map(|_| ModuleVector::random(&sys.algebra, n, &mut r)).collect();
        (gs, as_, xs)
    }

    #[test]
    fn inner_product_basics() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let one = ModuleVector::basis(&spec, 1, 0);
        assert_eq!(one.inner(&one).unwrap(), AlgElement::one(&spec));
        let e0 = ModuleVector::basis(&spec, 3, 0);
        assert_eq!(e0.inner(&e0).unwrap(), AlgElement::one(&spec));
        let mut r = rng();
        for _ in 0..50 {
            let x = ModuleVector::random(&spec, 3, &mut r);
            let y = ModuleVector::random(&spec, 3, &mut r);
            let a = AlgElement::random(&spec, &mut r);
            assert!(x.inner(&x).unwrap().classify().positive);
            assert!(x.inner(&y.right_mul(&a)).unwrap().approx_eq(&(&x.inner(&y).unwrap() * &a), 1e-12));
            assert!(x.inner(&y).unwrap().norm() <= x.norm() * y.norm() + 1e-12);
        }
        assert!(ModuleVector::zero(&spec, 2).inner(&ModuleVector::zero(&spec, 3)).is_err());
    }

    #[test]
    fn operators_are_adjointable() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let mut r = rng();
        for _ in 0..20 {
            let s = ModuleOperator::random(&spec, 3, &mut r);
            let x = ModuleVector::random(&spec, 3, &mut r);
            let y = ModuleVector::random(&spec, 3, &mut r);
            let lhs = s.apply(&x).unwrap().inner(&y).unwrap();
            let rhs = x.inner(&s.adjoint().apply(&y).unwrap()).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-12));
        }
    }

    #[test]
    fn trivial_pair_validates() {
        for sys in [presets::matrix_line(), presets::cyclic_swap(12, 1), presets::dihedral_inner(3)] {
            let (gs, as_, xs) = samples(&sys, 1);
            let r = validate_equivariant(&EquivariantRep::trivial(), &sys, &gs, &as_, &xs).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn scaled_v_breaks_inner_product_axiom() {
        let sys = presets::cyclic_swap(12, 1);
        let g = sys.group.parse("r").unwrap();
        let rep = EquivariantRep {
            rank: 1,
            rho: RhoRule::LeftMultiplication,
            v: VRule::Scaled { base: Box::new(VRule::Alpha), at: g.clone(), factor: c(2.0, 0.0) },
        };
        let (_, as_, xs) = samples(&sys, 1);
        let r = validate_equivariant(&rep, &sys, &[g.clone()], &as_, &xs).unwrap();
        assert!(!r.pass);
        // ⟨2x, 2x⟩ = 4⟨x,x⟩, so the violation is 3·|α_g⟨x,x⟩| entrywise
        let x = &xs[0];
        let expected = sys.alpha_apply(&g, &x.inner(x).unwrap()).max_abs() * 3.0;
        assert!(r.inner_product >= expected - 1e-9);
    }

    #[test]
    fn tensor_unitary_rep_validates() {
        let sys = presets::cyclic_swap(12, 1);
        let rot = |t: f64| {
            DMatrix::from_row_slice(2, 2, &[c(t.cos(), 0.), c(-t.sin(), 0.), c(t.sin(), 0.), c(t.cos(), 0.)])
        };
        // a genuine representation of ℤ₁₂: rotation by 2π/12
        let u = GroupUnitaryRep::new(&sys.group, vec![rot(std::f64::consts::TAU / 12.0)]).unwrap();
        let rep = EquivariantRep::tensor_unitary(u);
        let (gs, as_, xs) = samples(&sys, 2);
        assert!(validate_equivariant(&rep, &sys, &gs, &as_, &xs).unwrap().pass);
        // rotation by 1 radian does not close up on ℤ₁₂
        let bad = GroupUnitaryRep::new(&sys.group, vec![rot(1.0)]).unwrap();
        let rep = EquivariantRep::tensor_unitary(bad);
        assert!(!validate_equivariant(&rep, &sys, &gs, &as_, &xs).unwrap().pass);
    }

    #[test]
    fn endomorphism_pair_validates() {
        // β = identity pullback on ℂ² commutes with the swap only if it is
        // swap-equivariant; the swap itself qualifies
        let sys = presets::cyclic_swap(12, 1);
        let beta = AlgEndomorphism::pullback(&[1, 0]).unwrap();
        let rep = EquivariantRep { rank: 1, rho: RhoRule::Endomorphism(beta), v: VRule::Alpha };
        let (gs, as_, xs) = samples(&sys, 1);
        assert!(validate_equivariant(&rep, &sys, &gs, &as_, &xs).unwrap().pass);
    }

    #[test]
    fn central_parts() {
        let comm = AlgebraSpec::commutative(3);
        let z = central_part(&EquivariantRep::trivial(), &comm).unwrap();
        assert_eq!(z.len(), 3);

        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let z = central_part(&EquivariantRep::trivial(), &m2).unwrap();
        assert_eq!(z.len(), 1);
        // the solution is a multiple of the unit
        let v = &z[0].entries()[0];
        let lambda = v.block(0)[(0, 0)];
        assert!(v.approx_eq(&AlgElement::scalar(&m2, lambda), 1e-10));
        assert!((lambda.norm() * 2f64.sqrt() - 1.0).abs() < 1e-10);

        let big = EquivariantRep { rank: 9, rho: RhoRule::LeftMultiplication, v: VRule::Alpha };
        assert!(central_part(&big, &m2).is_err());
    }

    #[test]
    fn central_part_is_v_invariant() {
        let sys = presets::dihedral_inner(3);
        let rep = EquivariantRep::trivial();
        let basis = central_part(&rep, &sys.algebra).unwrap();
        let units = sys.algebra.matrix_units();
        for g in sys.group.elements().unwrap() {
            for z in &basis {
                let w = rep.v(&sys, &g, z);
                for a in &units {
                    assert!(rep.rho(a, &w).dist(&w.right_mul(a)) < 1e-10);
                }
            }
        }
    }
}
