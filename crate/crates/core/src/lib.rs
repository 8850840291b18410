//! Fourier analysis in reduced twisted crossed products over discrete groups.
//!
//! Coefficient algebras are finite-dimensional block algebras, groups come
//! from a fixed list of families, and every norm of an infinite object is
//! reported as a certified `(lower, upper)` pair.

pub mod coeffalg;
pub mod crossed;
pub mod decay;
pub mod error;
pub mod grp;
pub mod hilbmod;
pub mod ideals;
pub mod multipliers;
pub mod spectral;
pub mod summation;
pub mod system;

pub mod cli;

pub use coeffalg::{AlgAutomorphism, AlgElement, AlgEndomorphism, AlgState, AlgebraSpec, C64};
pub use crossed::{CcElement, CompressedRep, OpnormBounds};
pub use error::{Error, Result};
pub use grp::{Group, GroupElement, LengthFunction};
pub use system::TwistedSystem;

/// Every tolerance used by validators and comparisons.
pub mod tol {
    /// Algebraic identities (cocycle laws, ring axioms, module axioms).
    pub const ALGEBRAIC: f64 = 1e-10;
    /// Relative accuracy of largest-singular-value computations.
    pub const SPECTRAL_REL: f64 = 1e-9;
    /// Coefficients below this norm are dropped from supports.
    pub const SUPPORT: f64 = 1e-14;
    /// Blockwise ideal membership.
    pub const MEMBERSHIP: f64 = 1e-12;
    /// Lower-bound slack for the pointwise commutative inequality.
    pub const INEQUALITY: f64 = 1e-12;
}
