//! Exact computation of primitive forms for weighted homogeneous
//! singularities: Jacobian ring data, Brieskorn lattice reduction, the
//! oscillator matrices of the universal unfolding, the block Neumann solve
//! for the primitive form, the moduli of good opposite filtrations, and
//! univariate higher residue pairings.

pub mod error;
pub mod exactalg;
pub mod singularity;
pub mod brieskorn;
pub mod unfolding;
pub mod primitive;
pub mod moduli;
pub mod residue_series;
pub mod cli;

pub use error::{Error, Result};
