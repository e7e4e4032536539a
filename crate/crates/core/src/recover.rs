//! The two-branch recovery algorithm.
//!
//! Given oracle access to a corrupted truth table and an input instance:
//! compute the order of the instance's automorphism group with a
//! deterministic stabilizer-chain search, then
//!
//! - **Symmetric branch** (`|Aut| * s >= m!`): the answer is recomputed
//!   outright through a right transversal of the automorphism group — zero
//!   oracle queries, so the result is immune to any corruption;
//! - **Query branch** (otherwise): query the table at `s` distinct
//!   isomorphic instances (images under the element-wise inverses of `s`
//!   right-coset representatives, i.e. a partial left transversal) and
//!   return the strict majority of the retrieved values.
//!
//! The sample size `s` is `ceil(16 p ln|Sigma| / eps^2)` unless overridden;
//! at desk scale the formula routinely exceeds `m!`, collapsing everything
//! to the symmetric branch, so experiments use the override to exercise the
//! query branch and report the recomputed tail bound for the actual `s`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;

use crate::noise::CorruptedTable;
use crate::perm::{aut_group, list_coset_reps, AutStrategy, CosetSide, Permutation, StabilizerChain};
use crate::ratio::Ratio64;
use crate::aggregate::{
    eval_with_right_transversal, semigroup_power, subgroup_index_u64, InstanceIndex,
    InstanceStabilizerOracle, Problem, SemigroupValue,
};
use crate::{Error, Result};

/// Strict-majority decoding is the only rule implemented; the enum records
/// the choice in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MajorityRule {
    Strict,
}

/// Recovery parameters.
#[derive(Debug, Clone)]
pub struct RecoveryConfig {
    epsilon: Ratio64,
    sample_size_override: Option<u64>,
    pub majority_rule: MajorityRule,
}

impl RecoveryConfig {
    /// `epsilon` must lie strictly between 0 and 1/2.
    pub fn new(epsilon: Ratio64) -> Result<Self> {
        if epsilon.num() == 0 || epsilon.cmp_fraction(1, 2) != std::cmp::Ordering::Less {
            return Err(Error::BadEpsilon(epsilon.to_string()));
        }
        Ok(RecoveryConfig {
            epsilon,
            sample_size_override: None,
            majority_rule: MajorityRule::Strict,
        })
    }

    pub fn with_override(mut self, sample_size: u64) -> Self {
        self.sample_size_override = Some(sample_size.max(1));
        self
    }

    pub fn epsilon(&self) -> Ratio64 {
        self.epsilon
    }

    pub fn sample_size_override(&self) -> Option<u64> {
        self.sample_size_override
    }
}

/// Which branch served an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    Symmetric,
    Query,
}

/// Result of recovering a single table entry.
#[derive(Debug, Clone)]
pub struct RecoveryOutcome {
    pub value: SemigroupValue,
    pub branch: Branch,
    pub aut_order: BigUint,
    pub queries_made: u64,
    /// Winning share of the majority vote, query branch only.
    pub majority_margin: Option<Ratio64>,
}

/// The sample size `s`: the override if present, else
/// `ceil(16 * p(n) * ln|Sigma| / eps^2)`.
pub fn recovery_threshold(problem: &dyn Problem, config: &RecoveryConfig) -> u64 {
    if let Some(s) = config.sample_size_override {
        return s;
    }
    threshold_formula(
        problem.instance_symbols(),
        problem.alphabet_size(),
        config.epsilon.as_f64(),
    )
}

/// `ceil(16 * symbols * ln(alphabet) / epsilon^2)`.
pub fn threshold_formula(symbols: u64, alphabet: u64, epsilon: f64) -> u64 {
    let s = 16.0 * symbols as f64 * (alphabet as f64).ln() / (epsilon * epsilon);
    (s.ceil() as u64).max(1)
}

/// The value occurring strictly more than `len/2` times.
pub fn majority(values: &[SemigroupValue]) -> Result<SemigroupValue> {
    majority_with_margin(values).map(|(v, _)| v)
}

fn majority_with_margin(values: &[SemigroupValue]) -> Result<(SemigroupValue, Ratio64)> {
    if values.is_empty() {
        return Err(Error::MajorityUndefined(0));
    }
    let mut counts: HashMap<SemigroupValue, u64> = HashMap::new();
    for v in values {
        *counts.entry(*v).or_insert(0) += 1;
    }
    let len = values.len() as u64;
    for (value, count) in counts {
        if 2 * count > len {
            return Ok((value, Ratio64::new(count, len)?));
        }
    }
    Err(Error::MajorityUndefined(values.len()))
}

/// Transversal memo shared across a sweep, keyed by the strong-generator
/// signature of the automorphism group (which the deterministic chain
/// search makes canonical per group) and the requested length.
pub struct TransversalCache {
    map: RwLock<HashMap<(Vec<u8>, u64), Arc<Vec<Permutation>>>>,
}

impl TransversalCache {
    pub fn new() -> Self {
        TransversalCache {
            map: RwLock::new(HashMap::new()),
        }
    }

    fn get(&self, chain: &StabilizerChain, m: usize, k: u64) -> Result<Arc<Vec<Permutation>>> {
        let key = (signature(chain), k);
        if let Some(hit) = self.map.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let reps = Arc::new(list_coset_reps(chain, m, k, CosetSide::Right)?);
        self.map
            .write()
            .expect("cache lock")
            .insert(key, reps.clone());
        Ok(reps)
    }
}

impl Default for TransversalCache {
    fn default() -> Self {
        Self::new()
    }
}

fn signature(chain: &StabilizerChain) -> Vec<u8> {
    let mut sig = Vec::new();
    for g in chain.strong_generators() {
        sig.extend(g.images().iter().map(|&x| x as u8));
        sig.push(u8::MAX);
    }
    sig
}

/// Recovers one table entry. See the module docs for the branch rule.
pub fn recover_one(
    problem: &dyn Problem,
    instance: InstanceIndex,
    corrupted: &CorruptedTable,
    config: &RecoveryConfig,
) -> Result<RecoveryOutcome> {
    recover_one_impl(problem, instance, corrupted, config, None)
}

fn recover_one_impl(
    problem: &dyn Problem,
    instance: InstanceIndex,
    corrupted: &CorruptedTable,
    config: &RecoveryConfig,
    cache: Option<&TransversalCache>,
) -> Result<RecoveryOutcome> {
    if corrupted.problem_id() != problem.id() || corrupted.n() != problem.n() {
        return Err(Error::BindingMismatch {
            table: corrupted.problem_id(),
            table_n: corrupted.n(),
            expected: problem.id(),
            expected_n: problem.n(),
        });
    }
    let m = problem.group_degree();
    let s = recovery_threshold(problem, config);
    let oracle = InstanceStabilizerOracle::new(problem, instance);
    let chain = aut_group(&oracle, m, AutStrategy::Backtracking)?;
    let aut_order = chain.group_order();
    let group_size = crate::perm::factorial(m);

    // Exact integer branch test; equality goes to the symmetric branch,
    // which needs no probabilistic guarantee.
    let symmetric = &aut_order * BigUint::from(s) >= group_size;

    if symmetric {
        let index = subgroup_index_u64(&chain, m)?;
        debug_assert!(index <= s);
        let reps = match cache {
            Some(c) => c.get(&chain, m, index)?,
            None => Arc::new(list_coset_reps(&chain, m, index, CosetSide::Right)?),
        };
        let semigroup = problem.semigroup();
        let value = if semigroup.idempotent() {
            eval_with_right_transversal(problem, instance, &reps)?
        } else if problem.regular_certificate_orbits() {
            regular_with_transversal(problem, instance, &reps, &aut_order)?
        } else {
            return Err(Error::NonIdempotentSemigroup(semigroup));
        };
        return Ok(RecoveryOutcome {
            value,
            branch: Branch::Symmetric,
            aut_order,
            queries_made: 0,
            majority_margin: None,
        });
    }

    let reps = match cache {
        Some(c) => c.get(&chain, m, s)?,
        None => Arc::new(list_coset_reps(&chain, m, s, CosetSide::Right)?),
    };
    // The inverses of right-coset representatives form a left transversal,
    // so the queried images below are pairwise-distinct orbit members.
    let mut values = Vec::with_capacity(reps.len());
    for rep in reps.iter() {
        let image = problem.act_instance(&rep.inverse(), instance);
        values.push(corrupted.query(image.0)?);
    }
    let (value, margin) = majority_with_margin(&values)?;
    Ok(RecoveryOutcome {
        value,
        branch: Branch::Query,
        aut_order,
        queries_made: values.len() as u64,
        majority_margin: Some(margin),
    })
}

fn regular_with_transversal(
    problem: &dyn Problem,
    instance: InstanceIndex,
    reps: &[Permutation],
    aut_order: &BigUint,
) -> Result<SemigroupValue> {
    let semigroup = problem.semigroup();
    let mut total: Option<SemigroupValue> = None;
    for rep in problem.orbit_reps() {
        let mut f_i: Option<SemigroupValue> = None;
        for u in reps {
            let v = problem.h(instance, problem.act_certificate(u, rep));
            let v = semigroup_power(v, aut_order, semigroup)?;
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

/// Aggregate of a full-table recovery sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct RecoverySweep {
    pub total: u64,
    pub symmetric: u64,
    pub query_branch: u64,
    pub correct: u64,
    pub majority_undefined: u64,
    pub queries: u64,
}

impl RecoverySweep {
    fn absorb(mut self, other: RecoverySweep) -> RecoverySweep {
        self.total += other.total;
        self.symmetric += other.symmetric;
        self.query_branch += other.query_branch;
        self.correct += other.correct;
        self.majority_undefined += other.majority_undefined;
        self.queries += other.queries;
        self
    }
}

/// Recovers every entry of the corrupted table and compares each outcome
/// against the pristine value. Failures are counted, never thrown;
/// `parallelism = 0` uses all cores and the aggregate is
/// schedule-independent.
pub fn recover_all(
    problem: &dyn Problem,
    corrupted: &CorruptedTable,
    config: &RecoveryConfig,
    parallelism: usize,
) -> Result<RecoverySweep> {
    use rayon::prelude::*;

    let cache = TransversalCache::new();
    let run = || -> Result<RecoverySweep> {
        (0..corrupted.entry_count())
            .into_par_iter()
            .map(|i| -> Result<RecoverySweep> {
                let mut row = RecoverySweep {
                    total: 1,
                    ..Default::default()
                };
                match recover_one_impl(problem, InstanceIndex(i), corrupted, config, Some(&cache)) {
                    Ok(outcome) => {
                        match outcome.branch {
                            Branch::Symmetric => row.symmetric += 1,
                            Branch::Query => row.query_branch += 1,
                        }
                        row.queries += outcome.queries_made;
                        if outcome.value == corrupted.true_value(i)? {
                            row.correct += 1;
                        }
                    }
                    Err(Error::MajorityUndefined(_)) => {
                        row.query_branch += 1;
                        row.majority_undefined += 1;
                        row.queries += recovery_threshold(problem, config);
                    }
                    Err(other) => return Err(other),
                }
                Ok(row)
            })
            .try_reduce(RecoverySweep::default, |a, b| Ok(a.absorb(b)))
    };

    if parallelism > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}
