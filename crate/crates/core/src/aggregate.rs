//! The semigroup-aggregation view of a problem and its evaluators.
//!
//! A problem is a function `f(phi) = combine over certificates x of
//! h(phi, x)` for a commutative semigroup `combine`, together with a pair of
//! compatible `S_m` actions: `alpha` on instances and `beta` on certificates,
//! satisfying `h(alpha_g(phi), beta_g(x)) = h(phi, x)`. Three evaluation
//! strategies are provided:
//!
//! - [`eval_bruteforce`]: fold `h` over every certificate (the ground truth),
//! - [`eval_orbit_full`]: fold `h` over one certificate orbit by enumerating
//!   all of `S_m` (reference path for tests),
//! - [`eval_compressed`]: per orbit, fold `h` over the images of one orbit
//!   representative under a right transversal of the instance's automorphism
//!   group. Exact for idempotent semigroups; [`eval_compressed_regular`]
//!   extends this to any commutative semigroup when every certificate orbit
//!   is regular (size `m!`), by raising each term to the automorphism-group
//!   order.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::perm::{
    list_coset_reps, subgroup_index, CosetSide, GroupOracle, Permutation, Permutations,
    StabilizerChain,
};
use crate::{Error, Result};

/// The aggregation semigroups used by the concrete problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SemigroupId {
    BoolOr,
    IntMax,
    BoolXor,
    IntAdd,
}

impl SemigroupId {
    /// Whether `combine(d, d) = d` for every value; the precondition of the
    /// compressed evaluators.
    pub fn idempotent(self) -> bool {
        matches!(self, SemigroupId::BoolOr | SemigroupId::IntMax)
    }

    pub fn combine(self, a: SemigroupValue, b: SemigroupValue) -> Result<SemigroupValue> {
        use SemigroupValue::*;
        match (self, a, b) {
            (SemigroupId::BoolOr, Bool(x), Bool(y)) => Ok(Bool(x | y)),
            (SemigroupId::BoolXor, Bool(x), Bool(y)) => Ok(Bool(x ^ y)),
            (SemigroupId::IntMax, Int(x), Int(y)) => Ok(Int(x.max(y))),
            (SemigroupId::IntAdd, Int(x), Int(y)) => Ok(Int(x + y)),
            _ => Err(Error::ValueTypeMismatch),
        }
    }
}

/// An element of the aggregation semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemigroupValue {
    Bool(bool),
    Int(i64),
}

impl SemigroupValue {
    /// Packed representation for truth-table storage.
    pub fn to_raw(self) -> u64 {
        match self {
            SemigroupValue::Bool(b) => b as u64,
            SemigroupValue::Int(i) => {
                debug_assert!(i >= 0, "table values are non-negative");
                i as u64
            }
        }
    }

    pub fn from_raw(semigroup: SemigroupId, raw: u64) -> SemigroupValue {
        match semigroup {
            SemigroupId::BoolOr | SemigroupId::BoolXor => SemigroupValue::Bool(raw != 0),
            SemigroupId::IntMax | SemigroupId::IntAdd => SemigroupValue::Int(raw as i64),
        }
    }
}

impl std::fmt::Display for SemigroupValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SemigroupValue::Bool(b) => write!(f, "{}", *b as u8),
            SemigroupValue::Int(i) => write!(f, "{i}"),
        }
    }
}

/// Canonical index of one instance under the problem's encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceIndex(pub u64);

/// Canonical index into the problem's certificate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CertificateIndex(pub u64);

/// Zero-based certificate-orbit index, `0 <= i < orbit_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitIndex(pub usize);

/// A pluggable problem description: encodings, the verifier `h`, the two
/// group actions, and canonical orbit representatives.
///
/// Implementations are immutable and freely shareable across threads; all
/// methods are pure. Index arguments are trusted to be in range and group
/// elements to have degree [`Problem::group_degree`] (checked by the callers
/// that accept external input).
pub trait Problem: Send + Sync {
    fn id(&self) -> String;
    fn n(&self) -> u32;
    /// Alphabet size of the instance encoding.
    fn alphabet_size(&self) -> u64;
    /// Instance length in symbols (the exponent of the alphabet).
    fn instance_symbols(&self) -> u64;
    /// Extra factor for product domains (the clique-size coordinate); 1 for
    /// plain power domains.
    fn extra_factor(&self) -> u64 {
        1
    }
    /// Total number of instances: `alphabet_size ^ instance_symbols * extra`.
    fn instance_count(&self) -> u64;
    /// Degree `m` of the acting symmetric group.
    fn group_degree(&self) -> usize;
    fn semigroup(&self) -> SemigroupId;
    fn certificate_count(&self) -> BigUint;
    /// Number of certificate orbits.
    fn orbit_count(&self) -> u64;
    /// Largest value `h` can produce; fixes the packed table width.
    fn max_value(&self) -> u64;
    /// True when every certificate orbit has size exactly `m!`.
    fn regular_certificate_orbits(&self) -> bool {
        false
    }
    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue;
    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex;
    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex;
    /// One canonical representative per certificate orbit; deterministic.
    fn orbit_reps(&self) -> Vec<CertificateIndex>;
    /// Pruning hook for stabilizer search: may return false only when no
    /// stabilizer element of `instance` extends the partial point map. The
    /// search grows prefixes one point at a time, so implementations may
    /// assume the prefix without its last point already passed and check
    /// only the newest point.
    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let _ = (instance, partial_images);
        true
    }
}

/// Shared handle to a problem description.
pub type ProblemSpec = Arc<dyn Problem>;

/// Membership oracle for the automorphism group of one instance:
/// `g` is accepted iff `act_instance(g, instance) == instance`.
pub struct InstanceStabilizerOracle<'a> {
    problem: &'a dyn Problem,
    instance: InstanceIndex,
}

impl<'a> InstanceStabilizerOracle<'a> {
    pub fn new(problem: &'a dyn Problem, instance: InstanceIndex) -> Self {
        InstanceStabilizerOracle { problem, instance }
    }
}

impl GroupOracle for InstanceStabilizerOracle<'_> {
    fn contains(&self, p: &Permutation) -> bool {
        self.problem.act_instance(p, self.instance) == self.instance
    }

    fn partial_compatible(&self, images: &[usize]) -> bool {
        self.problem.stabilizer_partial_check(self.instance, images)
    }
}

/// Certificate-enumeration budget for the brute-force evaluator.
pub const CERTIFICATE_BUDGET: u64 = 1 << 26;

/// Ground-truth evaluation: folds `h` over every certificate.
pub fn eval_bruteforce(problem: &dyn Problem, instance: InstanceIndex) -> Result<SemigroupValue> {
    let count_big = problem.certificate_count();
    let count: u64 = count_big
        .clone()
        .try_into()
        .map_err(|_| Error::CertificateBudgetExceeded {
            count: count_big.clone(),
            budget: CERTIFICATE_BUDGET,
        })?;
    if count > CERTIFICATE_BUDGET {
        return Err(Error::CertificateBudgetExceeded {
            count: count_big,
            budget: CERTIFICATE_BUDGET,
        });
    }
    let semigroup = problem.semigroup();
    let mut acc = problem.h(instance, CertificateIndex(0));
    for x in 1..count {
        acc = semigroup.combine(acc, problem.h(instance, CertificateIndex(x)))?;
    }
    Ok(acc)
}

/// Degree cap for [`eval_orbit_full`], which enumerates all `m!` elements.
pub const ORBIT_FULL_DEGREE_CAP: usize = 8;

/// Reference per-orbit evaluation: folds `h(phi, beta_g(y_i))` over every
/// `g` in `S_m`, for the orbit representative `y_i`. Requires an idempotent
/// semigroup (every orbit element is hit `|Aut(y_i)|` times).
pub fn eval_orbit_full(
    problem: &dyn Problem,
    instance: InstanceIndex,
    orbit: OrbitIndex,
) -> Result<SemigroupValue> {
    let semigroup = problem.semigroup();
    if !semigroup.idempotent() {
        return Err(Error::NonIdempotentSemigroup(semigroup));
    }
    let m = problem.group_degree();
    if m > ORBIT_FULL_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded {
            degree: m,
            cap: ORBIT_FULL_DEGREE_CAP,
        });
    }
    let rep = problem.orbit_reps()[orbit.0];
    let mut acc: Option<SemigroupValue> = None;
    for g in Permutations::new(m) {
        let v = problem.h(instance, problem.act_certificate(&g, rep));
        acc = Some(match acc {
            None => v,
            Some(a) => semigroup.combine(a, v)?,
        });
    }
    Ok(acc.expect("S_m is never empty"))
}

/// Transversal-compressed evaluation through the instance's automorphism
/// group: per orbit representative `y_i`, folds `h(phi, beta_u(y_i))` over a
/// full right transversal `u` of `Aut(phi)`, then combines across orbits.
///
/// `aut_chain` must be the stabilizer chain of `instance`'s automorphism
/// group. Errors with [`Error::TransversalBudgetExceeded`] when the
/// transversal is larger than `budget` — the signal that the caller should
/// have taken the query branch instead.
pub fn eval_compressed(
    problem: &dyn Problem,
    instance: InstanceIndex,
    aut_chain: &StabilizerChain,
    budget: Option<u64>,
) -> Result<SemigroupValue> {
    let semigroup = problem.semigroup();
    if !semigroup.idempotent() {
        return Err(Error::NonIdempotentSemigroup(semigroup));
    }
    let reps = right_transversal(problem.group_degree(), aut_chain, budget)?;
    eval_with_right_transversal(problem, instance, &reps)
}

/// Subgroup index `[S_m : H]` as a machine integer.
pub fn subgroup_index_u64(chain: &StabilizerChain, m: usize) -> Result<u64> {
    let index = subgroup_index(chain, m);
    index
        .clone()
        .try_into()
        .map_err(|_| Error::TransversalBudgetExceeded {
            index,
            budget: u64::MAX,
        })
}

/// Full right transversal of the chain's group inside `S_m`, in the fixed
/// reference order, with an optional size budget.
pub fn right_transversal(
    m: usize,
    aut_chain: &StabilizerChain,
    budget: Option<u64>,
) -> Result<Vec<Permutation>> {
    let index = subgroup_index(aut_chain, m);
    let index_u64: u64 =
        index
            .clone()
            .try_into()
            .map_err(|_| Error::TransversalBudgetExceeded {
                index: index.clone(),
                budget: budget.unwrap_or(u64::MAX),
            })?;
    if let Some(b) = budget {
        if index_u64 > b {
            return Err(Error::TransversalBudgetExceeded { index, budget: b });
        }
    }
    list_coset_reps(aut_chain, m, index_u64, CosetSide::Right)
}

/// Compressed evaluation against an explicit right transversal. Exposed so
/// sweeps can reuse a transversal across instances sharing an automorphism
/// group; `reps` must be the exact output of [`right_transversal`].
pub fn eval_with_right_transversal(
    problem: &dyn Problem,
    instance: InstanceIndex,
    reps: &[Permutation],
) -> Result<SemigroupValue> {
    let semigroup = problem.semigroup();
    let mut total: Option<SemigroupValue> = None;
    for rep in problem.orbit_reps() {
        let mut f_i: Option<SemigroupValue> = None;
        for u in reps {
            let v = problem.h(instance, problem.act_certificate(u, rep));
            f_i = Some(match f_i {
                None => v,
                Some(a) => semigroup.combine(a, v)?,
            });
        }
        let f_i = f_i.expect("transversal is never empty");
        total = Some(match total {
            None => f_i,
            Some(a) => semigroup.combine(a, f_i)?,
        });
    }
    Ok(total.expect("at least one orbit"))
}

/// Compressed evaluation for any commutative semigroup under the guarantee
/// that every certificate orbit is regular (size exactly `m!`): each term
/// `h(phi, beta_u(y_i))` is raised to the `|Aut(phi)|`-th semigroup power.
pub fn eval_compressed_regular(
    problem: &dyn Problem,
    instance: InstanceIndex,
    aut_chain: &StabilizerChain,
    budget: Option<u64>,
) -> Result<SemigroupValue> {
    if !problem.regular_certificate_orbits() {
        return Err(Error::NonRegularOrbits(problem.id()));
    }
    let semigroup = problem.semigroup();
    let aut_order = aut_chain.group_order();
    let reps = right_transversal(problem.group_degree(), aut_chain, budget)?;
    let mut total: Option<SemigroupValue> = None;
    for rep in problem.orbit_reps() {
        let mut f_i: Option<SemigroupValue> = None;
        for u in &reps {
            let v = problem.h(instance, problem.act_certificate(u, rep));
            let v = semigroup_power(v, &aut_order, semigroup)?;
            f_i = Some(match f_i {
                None => v,
                Some(a) => semigroup.combine(a, v)?,
            });
        }
        let f_i = f_i.expect("transversal is never empty");
        total = Some(match total {
            None => f_i,
            Some(a) => semigroup.combine(a, f_i)?,
        });
    }
    Ok(total.expect("at least one orbit"))
}

/// Combines `t` copies of `d` in `O(log t)` combines (double-and-add).
/// `t = 0` is rejected: the semigroups carry no identity element.
pub fn semigroup_power(
    d: SemigroupValue,
    t: &BigUint,
    semigroup: SemigroupId,
) -> Result<SemigroupValue> {
    if t.is_zero() {
        return Err(Error::ZeroPower);
    }
    let mut result: Option<SemigroupValue> = None;
    let mut base = d;
    let bits = t.bits();
    for i in 0..bits {
        if t.bit(i) {
            result = Some(match result {
                None => base,
                Some(r) => semigroup.combine(r, base)?,
            });
        }
        if i + 1 < bits {
            base = semigroup.combine(base, base)?;
        }
    }
    Ok(result.expect("t > 0 has a set bit"))
}

/// The pairing invariance `h(alpha_g(phi), beta_g(x)) = h(phi, x)`.
pub fn check_invariance(
    problem: &dyn Problem,
    instance: InstanceIndex,
    certificate: CertificateIndex,
    g: &Permutation,
) -> bool {
    let lhs = problem.h(
        problem.act_instance(g, instance),
        problem.act_certificate(g, certificate),
    );
    lhs == problem.h(instance, certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn sample_value(semigroup: SemigroupId, rng: &mut SplitMix64) -> SemigroupValue {
        match semigroup {
            SemigroupId::BoolOr | SemigroupId::BoolXor => {
                SemigroupValue::Bool(rng.next_u64() & 1 == 1)
            }
            SemigroupId::IntMax | SemigroupId::IntAdd => {
                SemigroupValue::Int((rng.next_u64() % 100) as i64)
            }
        }
    }

    const ALL: [SemigroupId; 4] = [
        SemigroupId::BoolOr,
        SemigroupId::IntMax,
        SemigroupId::BoolXor,
        SemigroupId::IntAdd,
    ];

    #[test]
    fn combine_is_associative_and_commutative_on_samples() {
        let mut rng = SplitMix64::new(3);
        for sg in ALL {
            for _ in 0..200 {
                let (a, b, c) = (
                    sample_value(sg, &mut rng),
                    sample_value(sg, &mut rng),
                    sample_value(sg, &mut rng),
                );
                let left = sg.combine(sg.combine(a, b).unwrap(), c).unwrap();
                let right = sg.combine(a, sg.combine(b, c).unwrap()).unwrap();
                assert_eq!(left, right);
                assert_eq!(sg.combine(a, b).unwrap(), sg.combine(b, a).unwrap());
            }
        }
    }

    #[test]
    fn idempotency_matches_the_flag() {
        let mut rng = SplitMix64::new(4);
        for sg in ALL {
            let mut all_idempotent = true;
            for _ in 0..100 {
                let d = sample_value(sg, &mut rng);
                if sg.combine(d, d).unwrap() != d {
                    all_idempotent = false;
                }
            }
            assert_eq!(all_idempotent, sg.idempotent(), "{sg:?}");
        }
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let err = SemigroupId::BoolOr.combine(SemigroupValue::Bool(true), SemigroupValue::Int(1));
        assert!(err.is_err());
    }

    #[test]
    fn power_examples() {
        let four = BigUint::from(4u32);
        let seven = BigUint::from(7u32);
        let five = BigUint::from(5u32);
        assert_eq!(
            semigroup_power(SemigroupValue::Bool(true), &four, SemigroupId::BoolXor).unwrap(),
            SemigroupValue::Bool(false)
        );
        assert_eq!(
            semigroup_power(SemigroupValue::Bool(true), &seven, SemigroupId::BoolOr).unwrap(),
            SemigroupValue::Bool(true)
        );
        assert_eq!(
            semigroup_power(SemigroupValue::Int(3), &five, SemigroupId::IntAdd).unwrap(),
            SemigroupValue::Int(15)
        );
        assert!(
            semigroup_power(SemigroupValue::Int(1), &BigUint::zero(), SemigroupId::IntAdd)
                .is_err()
        );
    }

    #[test]
    fn power_equals_left_fold_up_to_1000() {
        let mut rng = SplitMix64::new(9);
        for sg in ALL {
            let d = sample_value(sg, &mut rng);
            let mut acc = d;
            for t in 1..=1000u32 {
                let fast = semigroup_power(d, &BigUint::from(t), sg).unwrap();
                assert_eq!(fast, acc, "{sg:?} at t={t}");
                acc = sg.combine(acc, d).unwrap();
            }
        }
    }
}
