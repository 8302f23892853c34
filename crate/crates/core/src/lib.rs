//! Decision procedure for weak Presburger arithmetic, the first-order theory
//! of `(Z, 0, 1, +, =)`, built on shifted lattices and difference-normal-form
//! chains of lattice unions.

pub mod cli;
pub mod error;
pub mod frontend;
pub mod intlin;
pub mod json;
pub mod lattice;
pub mod oracle;
pub mod sdf;
pub mod solver;
pub mod unions;

pub use sdf::chain::DnfChain;
pub use error::{Error, Result};
pub use lattice::ShiftedLattice;
pub use unions::LatticeUnion;
