//! Permutation algebra over `S_m` and the group machinery built on it:
//! stabilizer chains (order, membership, transversals), coset-representative
//! listing, automorphism-group search from a membership oracle, and
//! exhaustive orbit enumeration.
//!
//! Points are `0..m` internally; the one-line text form ("2,3,1") is 1-based.
//! Composition is `(p * q)(x) = p(q(x))`: `q` acts first. Under this
//! convention distinct orbit images of an object correspond to distinct
//! *left* cosets of its stabilizer, while the compressed evaluators in
//! [`crate::aggregate`] decompose over *right* cosets; [`cosets::list_coset_reps`]
//! exposes both sides and either transversal is the element-wise inverse of
//! the other.

mod aut;
mod chain;
mod cosets;
mod orbit;
mod permutation;

pub use aut::{aut_group, aut_group_with_cap, AutStrategy, FnOracle, GroupOracle, EXHAUSTIVE_DEGREE_CAP};
pub use chain::{schreier_sims, schreier_sims_with_base, StabilizerChain};
pub use cosets::{
    canonical_coset_rep, canonical_coset_reps_bfs, factorial, list_coset_reps, subgroup_index,
    CosetSide,
};
pub use orbit::{orbit_of, ORBIT_DEGREE_CAP};
pub use permutation::{Permutation, Permutations};
