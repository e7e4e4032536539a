//! Truth-table laboratory for symmetry-based recovery from random noise.
//!
//! The crate builds exact evaluation tables for small instances of hard
//! problems (CLIQUE, k-SAT, k-CSP, colorability, Hamiltonicity, orthogonal
//! vectors, ...), corrupts a seeded random fraction of the entries, and
//! recovers every entry through a two-branch algorithm: highly symmetric
//! instances are recomputed directly through a coset transversal of their
//! automorphism group, and asymmetric instances are decoded by majority
//! vote over queries at isomorphic table positions.
//!
//! Modules:
//! - [`perm`]: permutations of `0..m`, stabilizer chains, coset transversals,
//!   automorphism-group search, orbit enumeration.
//! - [`aggregate`]: the semigroup-aggregation view of a problem (`f(phi) =
//!   combine over certificates of h(phi, x)`) and its evaluation strategies.
//! - [`problems`]: concrete problem instantiations with their group actions.
//! - [`noise`]: exact truth tables, the seeded corruption operator, and the
//!   binary table/mask file formats.
//! - [`recover`]: the two-branch recovery algorithm and full-table sweeps.
//! - [`finegrained`]: near-linear randomized recovery for orthogonal vectors
//!   and parity k-clique, plus the closed-form high-symmetry graph families.
//! - [`experiment`]: batch experiment harness with JSON/CSV reports.

pub mod error;
pub mod experiment;
pub mod finegrained;
pub mod noise;
pub mod perm;
pub mod problems;
pub mod ratio;
pub mod recover;
pub mod rng;
pub mod aggregate;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
