//! Quillen-complex laboratory: p-subgroup posets of small permutation groups,
//! their replacement posets, exact rational homology of order complexes, and
//! checkers for homology propagation and fixed-point Euler characteristics.

pub mod corpus;
pub mod error;
pub mod group;
pub mod homology;
pub mod poset;
pub mod propagation;
pub mod psubgroup;
pub mod replacement;
pub mod robinson;

pub use error::{Error, Result};
