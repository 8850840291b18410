//! `C_c(Σ)`: twisted convolution, involution, expectation, norms, and
//! compressions of the regular representation.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffalg::{c, AddAssignRef, AlgElement, AlgebraSpec, C64};
use crate::error::{Error, Result};
use crate::grp::{Group, GroupElement, LengthFunction};
use crate::spectral::{largest_singular_value_dense, largest_singular_value_lanczos, DENSE_LIMIT};
use crate::system::TwistedSystem;
use crate::tol;

/// A finitely supported `A`-valued function on `G`.
///
/// Values with norm below [`tol::SUPPORT`] are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct CcElement {
    spec: AlgebraSpec,
    terms: BTreeMap<GroupElement, AlgElement>,
}

impl CcElement {
    pub fn zero(spec: &AlgebraSpec) -> Self {
        CcElement { spec: spec.clone(), terms: BTreeMap::new() }
    }

    /// `a ⊙ δ_g`.
    pub fn delta(spec: &AlgebraSpec, g: GroupElement, a: AlgElement) -> Result<Self> {
        Self::from_terms(spec, [(g, a)])
    }

    /// `1 ⊙ δ_e`.
    pub fn unit(sys: &TwistedSystem) -> Self {
        Self::delta(&sys.algebra, sys.group.identity(), sys.one()).expect("unit has the right shape")
    }

    /// Repeated group elements are summed.
    pub fn from_terms(
        spec: &AlgebraSpec,
        terms: impl IntoIterator<Item = (GroupElement, AlgElement)>,
    ) -> Result<Self> {
        let template = AlgElement::zero(spec);
        let mut acc: BTreeMap<GroupElement, AlgElement> = BTreeMap::new();
        for (g, a) in terms {
            if !a.same_shape(&template) {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient shape {:?} on algebra {:?}",
                    a.spec().blocks(),
                    spec.blocks()
                )));
            }
            match acc.get_mut(&g) {
                Some(v) => v.add_assign_ref(&a),
                None => {
                    acc.insert(g, a);
                }
            }
        }
        let mut out = CcElement { spec: spec.clone(), terms: acc };
        out.prune();
        Ok(out)
    }

    /// Coefficients uniform in the unit square on each listed element.
    pub fn random<R: Rng + ?Sized>(spec: &AlgebraSpec, support: &[GroupElement], rng: &mut R) -> Self {
        Self::from_terms(spec, support.iter().map(|g| (g.clone(), AlgElement::random(spec, rng))))
            .expect("random coefficients match the spec")
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= tol::SUPPORT);
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<GroupElement, AlgElement> {
        &self.terms
    }

    pub fn support(&self) -> Vec<GroupElement> {
        self.terms.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fourier coefficient `f(g)`, zero off the support.
    pub fn coefficient(&self, g: &GroupElement) -> AlgElement {
        self.terms.get(g).cloned().unwrap_or_else(|| AlgElement::zero(&self.spec))
    }

    pub fn add(&self, other: &CcElement) -> Result<CcElement> {
        self.check_spec(other)?;
        CcElement::from_terms(
            &self.spec,
            self.terms.iter().chain(&other.terms).map(|(g, a)| (g.clone(), a.clone())),
        )
    }

    pub fn sub(&self, other: &CcElement) -> Result<CcElement> {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> CcElement {
        let mut out = CcElement {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(g, a)| (g.clone(), a.scale(z))).collect(),
        };
        out.prune();
        out
    }

    /// Apply a map coefficientwise; the support can only shrink.
    pub fn map_coefficients(&self, mut f: impl FnMut(&GroupElement, &AlgElement) -> AlgElement) -> CcElement {
        let mut out = CcElement {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(g, a)| (g.clone(), f(g, a))).collect(),
        };
        out.prune();
        out
    }

    /// Max coefficient distance over the union of supports.
    pub fn dist(&self, other: &CcElement) -> f64 {
        let mut d = 0.0f64;
        for (g, a) in &self.terms {
            d = d.max(a.dist(&other.coefficient(g)));
        }
        for (g, b) in &other.terms {
            if !self.terms.contains_key(g) {
                d = d.max(b.max_abs());
            }
        }
        d
    }

    pub fn approx_eq(&self, other: &CcElement, tol: f64) -> bool {
        self.dist(other) <= tol
    }

    fn check_spec(&self, other: &CcElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::ShapeMismatch(format!(
                "elements over {:?} and {:?}",
                self.spec.blocks(),
                other.spec.blocks()
            )));
        }
        Ok(())
    }

    /// Largest length of a support point, 0 for the zero element.
    pub fn support_radius(&self, group: &Group, l: LengthFunction) -> f64 {
        self.terms.keys().map(|g| group.length(g, l)).fold(0.0, f64::max)
    }
}

pub(crate) fn check_system(sys: &TwistedSystem, f: &CcElement) -> Result<()> {
    if f.spec != sys.algebra {
        return Err(Error::ShapeMismatch(format!(
            "element over {:?} used with a system over {:?}",
            f.spec.blocks(),
            sys.algebra.blocks()
        )));
    }
    Ok(())
}

/// `(f₁⋆f₂)(k) = Σ_g f₁(g) α_g(f₂(g⁻¹k)) σ(g, g⁻¹k)`.
pub fn twisted_mul(sys: &TwistedSystem, f1: &CcElement, f2: &CcElement) -> Result<CcElement> {
    check_system(sys, f1)?;
    check_system(sys, f2)?;
    let mut acc: BTreeMap<GroupElement, AlgElement> = BTreeMap::new();
    for (g, a) in &f1.terms {
        let alpha = (!sys.action_is_trivial()).then(|| sys.alpha(g));
        for (h, b) in &f2.terms {
            let moved = match &alpha {
                Some(al) => al.apply(b),
                None => b.clone(),
            };
            let mut term = a * &moved;
            if !sys.cocycle_is_trivial() {
                term = &term * &sys.sigma(g, h);
            }
            let k = sys.group.mul(g, h);
            match acc.get_mut(&k) {
                Some(v) => v.add_assign_ref(&term),
                None => {
                    acc.insert(k, term);
                }
            }
        }
    }
    let mut out = CcElement { spec: sys.algebra.clone(), terms: acc };
    out.prune();
    Ok(out)
}

/// `f*(h) = α_h(σ(h⁻¹,h)* f(h⁻¹)*)`.
pub fn star(sys: &TwistedSystem, f: &CcElement) -> CcElement {
    let terms = f.terms.iter().map(|(g, a)| {
        let h = sys.group.inv(g);
        let inner = &sys.sigma(g, &h).star() * &a.star();
        (h.clone(), sys.alpha_apply(&h, &inner))
    });
    CcElement::from_terms(&sys.algebra, terms).expect("same spec")
}

/// `E(f) = f(e)`.
pub fn expectation(sys: &TwistedSystem, f: &CcElement) -> AlgElement {
    f.coefficient(&sys.group.identity())
}

/// The Fourier coefficient at `g`.
pub fn fourier_coefficient(f: &CcElement, g: &GroupElement) -> AlgElement {
    f.coefficient(g)
}

/// Norm selectors; weights are rules `κ: G → [1, ∞)`.
pub enum Norm<'a> {
    L1,
    LInf,
    L2,
    Alpha,
    TwoKappa(&'a dyn Fn(&GroupElement) -> f64),
    AlphaKappa(&'a dyn Fn(&GroupElement) -> f64),
}

pub fn norms(sys: &TwistedSystem, f: &CcElement, which: Norm<'_>) -> Result<f64> {
    Ok(match which {
        Norm::L1 => l1_norm(f),
        Norm::LInf => f.terms.values().map(|a| a.norm()).fold(0.0, f64::max),
        Norm::L2 => f.terms.values().map(|a| a.norm().powi(2)).sum::<f64>().sqrt(),
        Norm::Alpha => alpha_norm(sys, f),
        Norm::TwoKappa(kappa) => {
            let w = weighted(f, kappa)?;
            w.terms.values().map(|a| a.norm().powi(2)).sum::<f64>().sqrt()
        }
        Norm::AlphaKappa(kappa) => alpha_norm(sys, &weighted(f, kappa)?),
    })
}

pub fn l1_norm(f: &CcElement) -> f64 {
    f.terms.values().map(|a| a.norm()).sum()
}

/// `‖Σ_g α_g⁻¹(f(g)* f(g))‖^{1/2}`.
pub fn alpha_norm(sys: &TwistedSystem, f: &CcElement) -> f64 {
    alpha_square(sys, f).norm().sqrt()
}

/// `Σ_g α_g⁻¹(f(g)* f(g))`, which equals `E(f*⋆f)`.
pub fn alpha_square(sys: &TwistedSystem, f: &CcElement) -> AlgElement {
    let mut acc = AlgElement::zero(&sys.algebra);
    for (g, a) in &f.terms {
        acc.add_assign_ref(&sys.alpha_inv_apply(g, &(&a.star() * a)));
    }
    acc
}

/// `f·κ`, rejecting weights below 1 on the support.
pub fn weighted(f: &CcElement, kappa: &dyn Fn(&GroupElement) -> f64) -> Result<CcElement> {
    let mut terms = Vec::with_capacity(f.len());
    for (g, a) in &f.terms {
        let k = kappa(g);
        if !(k >= 1.0) {
            return Err(Error::WeightBelowOne(format!("{:?} (κ = {k})", g.raw())));
        }
        terms.push((g.clone(), a.scale_real(k)));
    }
    CcElement::from_terms(&f.spec, terms)
}

/// One coefficient of an element in report form: the displayed group
/// element and the interleaved `(re, im)` block entries.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TermRecord {
    pub element: String,
    pub coefficient: Vec<f64>,
}

pub fn term_records(group: &Group, f: &CcElement) -> Vec<TermRecord> {
    f.terms
        .iter()
        .map(|(g, a)| TermRecord { element: group.display(g), coefficient: a.to_interleaved() })
        .collect()
}

/// `P_R Λ(f) P_R` in the `A^G` picture, stored sparsely.
///
/// The `A`-valued entry at `(h′, h)` is `α_{h′}⁻¹(f(h′h⁻¹) σ(h′h⁻¹, h))`,
/// acting by left multiplication. Block `j` of the algebra contributes a
/// complex matrix of size `|ball|·d_j`; the operator norm is the maximum over
/// blocks.
#[derive(Clone, Debug)]
pub struct CompressedRep {
    pub radius: f64,
    pub length: LengthFunction,
    pub index: Vec<GroupElement>,
    spec: AlgebraSpec,
    entries: Vec<(usize, usize, AlgElement)>,
}

impl CompressedRep {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[(usize, usize, AlgElement)] {
        &self.entries
    }

    /// Dense matrix of block `j`, size `|ball|·d_j`.
    pub fn dense_block(&self, j: usize) -> DMatrix<C64> {
        let d = self.spec.blocks()[j];
        let n = self.index.len();
        let mut m = DMatrix::zeros(n * d, n * d);
        for (r, col, a) in &self.entries {
            let b = a.block(j);
            for x in 0..d {
                for y in 0..d {
                    m[(r * d + x, col * d + y)] += b[(x, y)];
                }
            }
        }
        m
    }

    /// Block-diagonal assembly of every algebra block, size `|ball|·Σd_j`.
    pub fn dense(&self) -> DMatrix<C64> {
        let total = self.index.len() * self.spec.rep_dim();
        let mut m = DMatrix::zeros(total, total);
        let mut offset = 0;
        for j in 0..self.spec.num_blocks() {
            let b = self.dense_block(j);
            let s = b.nrows();
            m.view_mut((offset, offset), (s, s)).copy_from(&b);
            offset += s;
        }
        m
    }

    fn apply_block(&self, j: usize, x: &[C64], adjoint: bool) -> Vec<C64> {
        let d = self.spec.blocks()[j];
        let mut y = vec![c(0.0, 0.0); x.len()];
        for (r, col, a) in &self.entries {
            let b = a.block(j);
            let (src, dst) = if adjoint { (*r, *col) } else { (*col, *r) };
            for p in 0..d {
                let mut acc = c(0.0, 0.0);
                for q in 0..d {
                    let coef = if adjoint { b[(q, p)].conj() } else { b[(p, q)] };
                    acc += coef * x[src * d + q];
                }
                y[dst * d + p] += acc;
            }
        }
        y
    }

    /// Largest singular value: dense SVD for small blocks, Lanczos otherwise.
    pub fn largest_singular_value(&self) -> f64 {
        (0..self.spec.num_blocks())
            .map(|j| {
                let n = self.index.len() * self.spec.blocks()[j];
                if n <= DENSE_LIMIT {
                    largest_singular_value_dense(&self.dense_block(j))
                } else {
                    largest_singular_value_lanczos(
                        n,
                        |x| self.apply_block(j, &self.apply_block(j, x, false), true),
                        0x5eed_0000 + j as u64,
                        tol::SPECTRAL_REL * 1e-2,
                    )
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Compression of `Λ(f)` to `ball(R)`.
pub fn compression_matrix(
    sys: &TwistedSystem,
    f: &CcElement,
    radius: f64,
    length: LengthFunction,
) -> Result<CompressedRep> {
    check_system(sys, f)?;
    let index = sys.group.ball(radius, length)?;
    let position: HashMap<&GroupElement, usize> =
        index.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let rows: Vec<Vec<(usize, usize, AlgElement)>> = index
        .par_iter()
        .enumerate()
        .map(|(r, hp)| {
            let inv_alpha = (!sys.action_is_trivial()).then(|| sys.alpha(hp).inverse());
            let mut row = Vec::new();
            for (g, a) in &f.terms {
                // h = g⁻¹ h′ so that h′h⁻¹ = g
                let h = sys.group.left_div(g, hp);
                let Some(&col) = position.get(&h) else { continue };
                let mut v = if sys.cocycle_is_trivial() {
                    a.clone()
                } else {
                    a * &sys.sigma(g, &h)
                };
                if let Some(ai) = &inv_alpha {
                    v = ai.apply(&v);
                }
                row.push((r, col, v));
            }
            row
        })
        .collect();
    Ok(CompressedRep {
        radius,
        length,
        index,
        spec: sys.algebra.clone(),
        entries: rows.into_iter().flatten().collect(),
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TraceRow {
    pub radius: f64,
    pub ball_size: usize,
    pub singular_value: f64,
    pub lower: f64,
}

/// Certified bounds `lower ≤ ‖Λ(f)‖ ≤ upper`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OpnormBounds {
    pub lower: f64,
    pub upper: f64,
    pub trace: Vec<TraceRow>,
}

/// Radius at which the ball is the whole finite group.
pub fn full_radius(group: &Group, length: LengthFunction) -> Result<f64> {
    let elems = group.elements()?;
    Ok(elems.iter().map(|g| group.length(g, length)).fold(0.0, f64::max))
}

/// Lower bound from compressions along `schedule` (running maximum, so
/// nondecreasing), upper bound `‖f‖₁`.
pub fn opnorm_bounds(
    sys: &TwistedSystem,
    f: &CcElement,
    schedule: &[f64],
    length: LengthFunction,
) -> Result<OpnormBounds> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty radius schedule".into()));
    }
    let values: Vec<(f64, usize, f64)> = schedule
        .par_iter()
        .map(|&r| {
            let m = compression_matrix(sys, f, r, length)?;
            Ok((r, m.index.len(), m.largest_singular_value()))
        })
        .collect::<Result<_>>()?;
    let mut lower = 0.0f64;
    let trace = values
        .into_iter()
        .map(|(radius, ball_size, sv)| {
            lower = lower.max(sv);
            TraceRow { radius, ball_size, singular_value: sv, lower }
        })
        .collect();
    Ok(OpnormBounds { lower, upper: l1_norm(f), trace })
}

/// `‖Λ(f)‖` through the full regular representation of a finite group.
pub fn exact_norm_finite(sys: &TwistedSystem, f: &CcElement) -> Result<f64> {
    let length = crate::system::default_length(&sys.group);
    let r = full_radius(&sys.group, length)?;
    Ok(compression_matrix(sys, f, r, length)?.largest_singular_value())
}

/// Best certified upper bound: `‖f‖₁`, tightened to the exact norm on finite
/// groups.
pub fn best_upper(sys: &TwistedSystem, f: &CcElement) -> f64 {
    let l1 = l1_norm(f);
    match sys.group.order() {
        Some(_) => exact_norm_finite(sys, f).map_or(l1, |n| n.min(l1)),
        None => l1,
    }
}
