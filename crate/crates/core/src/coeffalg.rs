//! Finite-dimensional C*-algebras `M_{d_1} ⊕ … ⊕ M_{d_k}`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = nalgebra::Complex<f64>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Block dimensions `(d_1, …, d_k)`, each at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSpec {
    blocks: Vec<usize>,
}

impl AlgebraSpec {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidParameter(
                "algebra needs at least one block and every block dimension >= 1".into(),
            ));
        }
        Ok(AlgebraSpec { blocks })
    }

    /// `ℂ^k`, i.e. `C(X)` with `|X| = k`.
    pub fn commutative(points: usize) -> Self {
        AlgebraSpec { blocks: vec![1; points.max(1)] }
    }

    pub fn scalar() -> Self {
        Self::commutative(1)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&d| d == 1)
    }

    /// Σ d_j, the size of the faithful left-multiplication picture.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Σ d_j², the complex dimension.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|d| d * d).sum()
    }

    /// Matrix units `e^{(j)}_{rs}`, a linear basis of the algebra.
    pub fn matrix_units(&self) -> Vec<AlgElement> {
        let mut out = Vec::with_capacity(self.dim());
        for (j, &d) in self.blocks.iter().enumerate() {
            for r in 0..d {
                for s in 0..d {
                    let mut a = AlgElement::zero(self);
                    a.blocks[j][(r, s)] = c(1.0, 0.0);
                    out.push(a);
                }
            }
        }
        out
    }
}

/// One complex `d_j × d_j` matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    blocks: Vec<DMatrix<C64>>,
}

/// Classification flags, each decided to [`tol::ALGEBRAIC`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub selfadjoint: bool,
    pub unitary: bool,
    pub positive: bool,
    pub projection: bool,
    pub central: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArithOp {
    Add,
    Mul,
    Star,
    Scale(C64),
}

impl AlgElement {
    pub fn zero(spec: &AlgebraSpec) -> Self {
        AlgElement {
            blocks: spec.blocks.iter().map(|&d| DMatrix::zeros(d, d)).collect(),
        }
    }

    pub fn one(spec: &AlgebraSpec) -> Self {
        Self::scalar(spec, c(1.0, 0.0))
    }

    pub fn scalar(spec: &AlgebraSpec, z: C64) -> Self {
        AlgElement {
            blocks: spec
                .blocks
                .iter()
                .map(|&d| DMatrix::from_diagonal_element(d, d, z))
                .collect(),
        }
    }

    /// Element of a commutative algebra from its point values.
    pub fn from_values(values: &[C64]) -> Self {
        AlgElement {
            blocks: values.iter().map(|&z| DMatrix::from_element(1, 1, z)).collect(),
        }
    }

    pub fn from_blocks(blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|b| !b.is_square() || b.nrows() == 0) {
            return Err(Error::ShapeMismatch("blocks must be nonempty square matrices".into()));
        }
        Ok(AlgElement { blocks })
    }

    /// Inverse of [`AlgElement::to_interleaved`].
    pub fn from_interleaved(spec: &AlgebraSpec, data: &[f64]) -> Result<Self> {
        if data.len() != 2 * spec.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} reals, got {}",
                2 * spec.dim(),
                data.len()
            )));
        }
        let mut out = Self::zero(spec);
        let mut it = data.chunks_exact(2);
        for b in out.blocks.iter_mut() {
            let d = b.nrows();
            for r in 0..d {
                for s in 0..d {
                    let p = it.next().expect("length checked");
                    b[(r, s)] = c(p[0], p[1]);
                }
            }
        }
        Ok(out)
    }

    /// Row-major entries of each block in block order, as `re, im` pairs.
    pub fn to_interleaved(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for s in 0..b.ncols() {
                    out.push(b[(r, s)].re);
                    out.push(b[(r, s)].im);
                }
            }
        }
        out
    }

    /// Entries uniform in the unit square `[-1,1] + i[-1,1]`.
    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, rng: &mut R) -> Self {
        AlgElement {
            blocks: spec
                .blocks
                .iter()
                .map(|&d| {
                    DMatrix::from_fn(d, d, |_, _| {
                        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    })
                })
                .collect(),
        }
    }

    /// Haar-distributed unitary via QR of a random matrix, one per block.
    pub fn random_unitary<R: Rng + ?Sized>(spec: &AlgebraSpec, rng: &mut R) -> Self {
        let blocks = spec
            .blocks
            .iter()
            .map(|&d| random_unitary_matrix(d, rng))
            .collect();
        AlgElement { blocks }
    }

    pub fn spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            blocks: self.blocks.iter().map(|b| b.nrows()).collect(),
        }
    }

    pub fn same_shape(&self, other: &AlgElement) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.nrows() == b.nrows())
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &DMatrix<C64> {
        &self.blocks[j]
    }

    /// The component in the ideal spanned by the blocks in `keep`.
    pub fn project(&self, keep: &[usize]) -> AlgElement {
        AlgElement {
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(j, b)| if keep.contains(&j) { b.clone() } else { DMatrix::zeros(b.nrows(), b.ncols()) })
                .collect(),
        }
    }

    /// Value at point `j` of a commutative algebra.
    pub fn value(&self, j: usize) -> C64 {
        self.blocks[j][(0, 0)]
    }

    pub fn star(&self) -> Self {
        AlgElement {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        AlgElement {
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(c(x, 0.0))
    }

    /// Checked arithmetic; shape mismatches are errors instead of panics.
    pub fn arith(&self, other: Option<&AlgElement>, op: ArithOp) -> Result<AlgElement> {
        let need = |o: Option<&AlgElement>| -> Result<AlgElement> {
            let o = o.ok_or_else(|| Error::ShapeMismatch("binary op needs two operands".into()))?;
            if !self.same_shape(o) {
                return Err(Error::ShapeMismatch(format!(
                    "{:?} vs {:?}",
                    self.spec().blocks,
                    o.spec().blocks
                )));
            }
            Ok(o.clone())
        };
        Ok(match op {
            ArithOp::Add => self + &need(other)?,
            ArithOp::Mul => self * &need(other)?,
            ArithOp::Star => self.star(),
            ArithOp::Scale(z) => self.scale(z),
        })
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                if b.nrows() == 1 {
                    b[(0, 0)].norm()
                } else {
                    b.singular_values().max()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &AlgElement) -> f64 {
        (self - other).max_abs()
    }

    pub fn approx_eq(&self, other: &AlgElement, tol: f64) -> bool {
        self.dist(other) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Largest entry modulus among blocks not listed in `keep`.
    pub fn max_abs_outside(&self, keep: &[usize]) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| !keep.contains(j))
            .flat_map(|(_, b)| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The image in the quotient by the blocks not in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> AlgElement {
        AlgElement {
            blocks: keep.iter().map(|&j| self.blocks[j].clone()).collect(),
        }
    }

    /// Smallest Hermitian eigenvalue over blocks of `(a + a*)/2`.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let h = (b + b.adjoint()) * c(0.5, 0.0);
                h.symmetric_eigenvalues().min()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_central(&self) -> bool {
        self.blocks.iter().all(|b| {
            let z = b[(0, 0)];
            let d = b.nrows();
            (0..d).all(|r| {
                (0..d).all(|s| {
                    let target = if r == s { z } else { c(0.0, 0.0) };
                    (b[(r, s)] - target).norm() <= tol::ALGEBRAIC
                })
            })
        })
    }

    pub fn classify(&self) -> Classification {
        let spec = self.spec();
        let one = AlgElement::one(&spec);
        let t = tol::ALGEBRAIC;
        let selfadjoint = self.approx_eq(&self.star(), t);
        let unitary =
            (&self.star() * self).approx_eq(&one, t) && (self * &self.star()).approx_eq(&one, t);
        let positive = selfadjoint && self.min_eigenvalue() >= -t;
        let projection = selfadjoint && (self * self).approx_eq(self, t);
        Classification {
            selfadjoint,
            unitary,
            positive,
            projection,
            central: self.is_central(),
        }
    }
}

pub(crate) fn random_unitary_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let m = DMatrix::from_fn(d, d, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    // fix the phase of each column so the distribution does not depend on QR conventions
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                c(1.0, 0.0)
            }
        } else {
            c(0.0, 0.0)
        }
    });
    q * phases
}

impl<'a> Add<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: &AlgElement) -> AlgElement {
        assert!(self.same_shape(rhs), "algebra shape mismatch");
        AlgElement {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: &AlgElement) -> AlgElement {
        assert!(self.same_shape(rhs), "algebra shape mismatch");
        AlgElement {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: &AlgElement) -> AlgElement {
        assert!(self.same_shape(rhs), "algebra shape mismatch");
        AlgElement {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect(),
        }
    }
}

impl AddAssignRef for AlgElement {
    fn add_assign_ref(&mut self, rhs: &AlgElement) {
        for (a, b) in self.blocks.iter_mut().zip(&rhs.blocks) {
            *a += b;
        }
    }
}

pub(crate) trait AddAssignRef {
    fn add_assign_ref(&mut self, rhs: &Self);
}

/// A unital *-endomorphism `β(a)_j = U_j a_{source(j)} U_j*`.
///
/// Every unital *-endomorphism of a block algebra into itself with this
/// block-to-block shape is covered; pullbacks of point maps on `C(X)` are the
/// commutative case.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgEndomorphism {
    source: Vec<usize>,
    unitaries: Vec<DMatrix<C64>>,
}

impl AlgEndomorphism {
    pub fn new(spec: &AlgebraSpec, source: Vec<usize>, unitaries: Vec<DMatrix<C64>>) -> Result<Self> {
        let k = spec.num_blocks();
        if source.len() != k || unitaries.len() != k {
            return Err(Error::ShapeMismatch(format!(
                "endomorphism needs {k} source indices and {k} unitaries"
            )));
        }
        for (j, (&s, u)) in source.iter().zip(&unitaries).enumerate() {
            if s >= k || spec.blocks[s] != spec.blocks[j] {
                return Err(Error::InvalidParameter(format!(
                    "block {j} cannot be fed from block {s}"
                )));
            }
            let d = spec.blocks[j];
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::ShapeMismatch(format!("unitary for block {j} is not {d}x{d}")));
            }
            let defect = (u.adjoint() * u - DMatrix::identity(d, d))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > tol::ALGEBRAIC {
                return Err(Error::InvalidParameter(format!(
                    "conjugator for block {j} is not unitary (defect {defect:.3e})"
                )));
            }
        }
        Ok(AlgEndomorphism { source, unitaries })
    }

    /// Pullback `f ↦ f ∘ θ` on `C(X)` for a point map `θ`.
    pub fn pullback(points: &[usize]) -> Result<Self> {
        let spec = AlgebraSpec::commutative(points.len());
        let ones = points.iter().map(|_| DMatrix::identity(1, 1)).collect();
        Self::new(&spec, points.to_vec(), ones)
    }

    /// Whether the block shapes agree with `spec`.
    pub fn fits(&self, spec: &AlgebraSpec) -> bool {
        self.source.len() == spec.num_blocks()
            && self.unitaries.iter().zip(&spec.blocks).all(|(u, &d)| u.nrows() == d)
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        AlgEndomorphism {
            source: (0..spec.num_blocks()).collect(),
            unitaries: spec.blocks.iter().map(|&d| DMatrix::identity(d, d)).collect(),
        }
    }

    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn unitaries(&self) -> &[DMatrix<C64>] {
        &self.unitaries
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.source.len()];
        for &s in &self.source {
            if std::mem::replace(&mut seen[s], true) {
                return false;
            }
        }
        true
    }

    pub fn apply(&self, a: &AlgElement) -> AlgElement {
        AlgElement {
            blocks: self
                .source
                .iter()
                .zip(&self.unitaries)
                .map(|(&s, u)| {
                    if u.nrows() == 1 {
                        a.blocks[s].clone()
                    } else {
                        u * &a.blocks[s] * u.adjoint()
                    }
                })
                .collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AlgEndomorphism) -> AlgEndomorphism {
        AlgEndomorphism {
            source: self.source.iter().map(|&s| other.source[s]).collect(),
            unitaries: self
                .source
                .iter()
                .zip(&self.unitaries)
                .map(|(&s, u)| u * &other.unitaries[s])
                .collect(),
        }
    }
}

/// An automorphism: a block permutation followed by unitary conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgAutomorphism(AlgEndomorphism);

impl AlgAutomorphism {
    pub fn new(spec: &AlgebraSpec, source: Vec<usize>, unitaries: Vec<DMatrix<C64>>) -> Result<Self> {
        let e = AlgEndomorphism::new(spec, source, unitaries)?;
        if !e.is_bijective() {
            return Err(Error::InvalidParameter("block map is not a permutation".into()));
        }
        Ok(AlgAutomorphism(e))
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        AlgAutomorphism(AlgEndomorphism::identity(spec))
    }

    /// Permutation of the points of `C(X)`: `α(f)(x) = f(source[x])`.
    pub fn permutation(source: Vec<usize>) -> Result<Self> {
        let spec = AlgebraSpec::commutative(source.len());
        let ones = source.iter().map(|_| DMatrix::identity(1, 1)).collect();
        Self::new(&spec, source, ones)
    }

    /// `Ad(u)` for a unitary `u`.
    pub fn inner(u: &AlgElement) -> Result<Self> {
        let spec = u.spec();
        Self::new(&spec, (0..spec.num_blocks()).collect(), u.blocks.clone())
    }

    pub fn as_endomorphism(&self) -> &AlgEndomorphism {
        &self.0
    }

    pub fn permutation_part(&self) -> &[usize] {
        &self.0.source
    }

    pub fn apply(&self, a: &AlgElement) -> AlgElement {
        self.0.apply(a)
    }

    pub fn compose(&self, other: &AlgAutomorphism) -> AlgAutomorphism {
        AlgAutomorphism(self.0.compose(&other.0))
    }

    pub fn inverse(&self) -> AlgAutomorphism {
        let k = self.0.source.len();
        let mut source = vec![0; k];
        let mut unitaries = vec![DMatrix::zeros(0, 0); k];
        for (j, &s) in self.0.source.iter().enumerate() {
            source[s] = j;
            unitaries[s] = self.0.unitaries[j].adjoint();
        }
        AlgAutomorphism(AlgEndomorphism { source, unitaries })
    }

    pub fn is_identity_map(&self) -> bool {
        self.0.source.iter().enumerate().all(|(j, &s)| j == s)
            && self.0.unitaries.iter().all(|u| {
                // Ad(u) is trivial iff u is a scalar
                let z = u[(0, 0)];
                let d = u.nrows();
                (0..d).all(|r| {
                    (0..d).all(|s| {
                        let t = if r == s { z } else { c(0.0, 0.0) };
                        (u[(r, s)] - t).norm() <= tol::ALGEBRAIC
                    })
                })
            })
    }

    /// Keep only the listed blocks; the list must be invariant.
    pub fn restrict(&self, keep: &[usize]) -> Result<AlgAutomorphism> {
        let mut source = Vec::with_capacity(keep.len());
        let mut unitaries = Vec::with_capacity(keep.len());
        for &j in keep {
            let s = self.0.source[j];
            let pos = keep.iter().position(|&k| k == s).ok_or_else(|| {
                Error::InvalidParameter("restriction to a non-invariant set of blocks".into())
            })?;
            source.push(pos);
            unitaries.push(self.0.unitaries[j].clone());
        }
        Ok(AlgAutomorphism(AlgEndomorphism { source, unitaries }))
    }
}

/// A pure state: point evaluation on a 1×1 block, or a vector state on a
/// larger block.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgState {
    Point { block: usize },
    Vector { block: usize, vector: DVector<C64> },
}

impl AlgState {
    pub fn eval(&self, a: &AlgElement) -> C64 {
        match self {
            AlgState::Point { block } => a.blocks[*block][(0, 0)],
            AlgState::Vector { block, vector } => {
                (vector.adjoint() * &a.blocks[*block] * vector)[(0, 0)]
            }
        }
    }

    /// `ω(a*a)^{1/2}`.
    pub fn seminorm(&self, a: &AlgElement) -> f64 {
        self.eval(&(&a.star() * a)).re.max(0.0).sqrt()
    }
}

/// Every point evaluation, plus `sample_budget` random unit-vector states on
/// each block of size at least 2.
pub fn pure_states<R: Rng + ?Sized>(
    spec: &AlgebraSpec,
    sample_budget: usize,
    rng: &mut R,
) -> Vec<AlgState> {
    let mut out = Vec::new();
    for (j, &d) in spec.blocks.iter().enumerate() {
        if d == 1 {
            out.push(AlgState::Point { block: j });
            continue;
        }
        for _ in 0..sample_budget {
            let v = DVector::from_fn(d, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let n = v.norm();
            out.push(AlgState::Vector { block: j, vector: v / c(n, 0.0) });
        }
    }
    out
}
