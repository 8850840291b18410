//! Reference computations written directly from the defining formulas,
//! sharing nothing with the library beyond group arithmetic, the action and
//! the cocycle.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use twisted_fourier::{AlgElement, AlgebraSpec, CcElement, GroupElement, TwistedSystem, C64};

/// `(f₁⋆f₂)(gh) += f₁(g) α_g(f₂(h)) σ(g, h)`.
pub fn convolve(sys: &TwistedSystem, f1: &CcElement, f2: &CcElement) -> BTreeMap<GroupElement, AlgElement> {
    let mut out: BTreeMap<GroupElement, AlgElement> = BTreeMap::new();
    for (g, a) in f1.terms() {
        for (h, b) in f2.terms() {
            let k = sys.group.mul(g, h);
            let term = &(a * &sys.alpha_apply(g, b)) * &sys.sigma(g, h);
            let slot = out.entry(k).or_insert_with(|| AlgElement::zero(&sys.algebra));
            *slot = &*slot + &term;
        }
    }
    out
}

pub fn to_element(sys: &TwistedSystem, map: BTreeMap<GroupElement, AlgElement>) -> CcElement {
    CcElement::from_terms(&sys.algebra, map).expect("oracle terms match the algebra")
}

/// Block entries, row-major, block after block.
pub fn flatten(a: &AlgElement) -> Vec<C64> {
    let mut out = Vec::new();
    for m in a.blocks() {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.push(m[(r, c)]);
            }
        }
    }
    out
}

/// Matrix units in the order used by [`flatten`].
pub fn units(spec: &AlgebraSpec) -> Vec<AlgElement> {
    let sizes = spec.blocks();
    let mut out = Vec::new();
    for (j, &d) in sizes.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                let blocks = sizes
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| {
                        let mut m = DMatrix::<C64>::zeros(n, n);
                        if i == j {
                            m[(r, c)] = C64::new(1.0, 0.0);
                        }
                        m
                    })
                    .collect();
                out.push(AlgElement::from_blocks(blocks).expect("square blocks"));
            }
        }
    }
    out
}

/// Left multiplication by `f` on `C(G, A)` with the Frobenius inner product
/// `Σ_g Tr(ξ(g)*η(g))`. The trace is invariant under the action, so this is
/// a faithful representation of the reduced crossed product and `f*` acts by
/// the adjoint.
pub fn regular_matrix(sys: &TwistedSystem, f: &CcElement, elems: &[GroupElement]) -> DMatrix<C64> {
    let basis = units(&sys.algebra);
    let u = basis.len();
    let index: HashMap<&GroupElement, usize> = elems.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n = elems.len() * u;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (i, g) in elems.iter().enumerate() {
        for (p, e) in basis.iter().enumerate() {
            let delta = CcElement::delta(&sys.algebra, g.clone(), e.clone()).expect("unit matches");
            for (k, a) in convolve(sys, f, &delta) {
                let row = index[&k] * u;
                for (q, z) in flatten(&a).into_iter().enumerate() {
                    m[(row + q, i * u + p)] = z;
                }
            }
        }
    }
    m
}

pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ_g α_g⁻¹(f(g)* f(g))`.
pub fn alpha_square(sys: &TwistedSystem, f: &CcElement) -> AlgElement {
    let mut acc = AlgElement::zero(&sys.algebra);
    for (g, a) in f.terms() {
        acc = &acc + &sys.alpha_inv_apply(g, &(&a.star() * a));
    }
    acc
}

/// Least eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: DMatrix<C64>) -> f64 {
    let h = (&m + m.adjoint()).scale(0.5);
    nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest absolute entry of `a` in blocks outside `keep`.
pub fn outside(a: &AlgElement, keep: &[usize]) -> f64 {
    a.blocks()
        .iter()
        .enumerate()
        .filter(|(j, _)| !keep.contains(j))
        .flat_map(|(_, m)| m.iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
}
