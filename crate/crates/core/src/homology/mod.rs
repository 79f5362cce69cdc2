//! Bar-resolution chains, coset data and the explicit transfer to a
//! finite-index subgroup.
//!
//! Coset indices are 0-based, with representative 0 the identity.

pub mod chain;
pub mod coset;
pub mod group;

pub use chain::{
    bar_differential, check_chain_map, factorization_check, find_bounding_chain, section_of_lift, solve_integer,
    transfer_t, BarChain,
};
pub use coset::{CosetSystem, MAX_INDEX};
pub use group::{closure, Group, MatrixGroup, Perm, PermGroup};
