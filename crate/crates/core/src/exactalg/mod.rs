//! Exact arithmetic substrate: rationals, sparse polynomials, weights and the
//! truncated parameter ring.

mod matrix;
mod mpoly;
mod rat;
mod unfold_ring;
mod weights;

pub use matrix::{identity, inverse, mat_mul, RatMatrix};
pub use mpoly::{MPoly, Monomial, WeightedDegree};
pub use rat::{ParseRatError, Rat};
pub use unfold_ring::{UMono, UnfoldRingElem};
pub use weights::WeightSystem;

use crate::error::Result;

/// Exact product of two polynomials over the same variable list.
pub fn poly_mul(a: &MPoly, b: &MPoly) -> Result<MPoly> {
    a.mul(b)
}

/// Common weighted degree of all terms of `m`.
pub fn weighted_degree(m: &MPoly, w: &WeightSystem) -> WeightedDegree {
    m.weighted_degree(w)
}

/// Truncated product in `Q[u] / m^{N+1}`.
pub fn trunc_mul(a: &UnfoldRingElem, b: &UnfoldRingElem) -> Result<UnfoldRingElem> {
    a.trunc_mul(b)
}
