//! Enumerated permutation groups and subgroup constructions.
//!
//! Products act on points from the right: `(a * b)(x) = b(a(x))`, and
//! conjugation is `a^g = g^-1 a g`.

mod spec;
mod structure;
mod subgroup;
mod sylow;
mod table;

pub use spec::GroupSpec;
pub use structure::{FittingData, PInvariants};
pub use subgroup::{is_power_of, is_prime, p_part, prime_divisors, Subgroup};
pub use table::{default_cap, Elt, GroupTable, Permutation, DEFAULT_CAP};
