//! Concrete problem instantiations: encodings, verifiers, group actions,
//! and canonical certificate-orbit representatives.
//!
//! Every problem acts under `S_m` with `m` tied to its size parameter:
//! graph problems relabel vertices, k-SAT relabels variables, k-CSP and
//! orthogonal vectors permute positions. Instances are indexed by a
//! canonical bijection documented per problem; see the `encode`/`decode`
//! helpers next to each type.

mod csp;
mod graphs;
mod ov;
mod sat;

pub use csp::KCspProblem;
pub use graphs::{
    clique_family_decode, clique_family_encode, graph_from_index, graph_to_index, CliqueFamily,
    DirHamPathProblem, GraphAutOracle, GraphInstance, HamiltonProblem, KColProblem,
    ParityKCliqueProblem, SetVariant,
};
pub use ov::{ov_decode, ov_encode, OvProblem};
pub use sat::KSatProblem;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::aggregate::{ProblemSpec, SemigroupId};
use crate::{Error, Result};

/// Integer parameters accepted by [`make_problem`], e.g. `n`, `k`, `q`, `d`.
pub type Params = BTreeMap<String, i64>;

fn get_param(params: &Params, key: &str) -> Result<i64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::BadParams(format!("missing parameter `{key}`")))
}

fn get_param_or(params: &Params, key: &str, default: i64) -> i64 {
    params.get(key).copied().unwrap_or(default)
}

fn check_known_keys(params: &Params, known: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !known.contains(&key.as_str()) {
            return Err(Error::BadParams(format!("unknown parameter `{key}`")));
        }
    }
    Ok(())
}

fn positive(value: i64, key: &str) -> Result<usize> {
    if value <= 0 {
        return Err(Error::BadParams(format!("`{key}` must be positive")));
    }
    Ok(value as usize)
}

/// Builds a fully wired problem description.
///
/// Recognized ids: `clique`, `indset`, `vertexcover`, `kcol`, `hampath`,
/// `hamcycle`, `dir_hampath_parity`, `dir_hampath_count`, `ksat`, `kcsp`,
/// `maxkcsp`, `ov`, `parity_kclique`. The `kcsp`/`maxkcsp` clause truth
/// table defaults to not-all-equal when `clause_table` is `None`.
pub fn make_problem(
    id: &str,
    params: &Params,
    clause_table: Option<Vec<bool>>,
) -> Result<ProblemSpec> {
    if clause_table.is_some() && !matches!(id, "kcsp" | "maxkcsp") {
        return Err(Error::BadParams(format!(
            "`{id}` does not take a clause table"
        )));
    }
    match id {
        "clique" | "indset" | "vertexcover" => {
            check_known_keys(params, &["n"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            let variant = match id {
                "clique" => SetVariant::Clique,
                "indset" => SetVariant::IndependentSet,
                _ => SetVariant::VertexCover,
            };
            Ok(Arc::new(CliqueFamily::new(variant, n)?))
        }
        "kcol" => {
            check_known_keys(params, &["n", "k"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            let k = positive(get_param(params, "k")?, "k")?;
            Ok(Arc::new(KColProblem::new(n, k)?))
        }
        "hampath" => {
            check_known_keys(params, &["n"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            Ok(Arc::new(HamiltonProblem::new(n, false)?))
        }
        "hamcycle" => {
            check_known_keys(params, &["n"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            Ok(Arc::new(HamiltonProblem::new(n, true)?))
        }
        "dir_hampath_parity" => {
            check_known_keys(params, &["n"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            Ok(Arc::new(DirHamPathProblem::new(n, SemigroupId::BoolXor)?))
        }
        "dir_hampath_count" => {
            check_known_keys(params, &["n"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            Ok(Arc::new(DirHamPathProblem::new(n, SemigroupId::IntAdd)?))
        }
        "ksat" => {
            check_known_keys(params, &["n", "k"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            let k = positive(get_param(params, "k")?, "k")?;
            Ok(Arc::new(KSatProblem::new(n, k)?))
        }
        "kcsp" | "maxkcsp" => {
            check_known_keys(params, &["n", "k", "sigma"])?;
            let q = positive(get_param(params, "n")?, "n")?;
            let k = positive(get_param(params, "k")?, "k")?;
            let sigma = positive(get_param_or(params, "sigma", 2), "sigma")?;
            Ok(Arc::new(KCspProblem::new(
                q,
                k,
                sigma,
                clause_table,
                id == "maxkcsp",
            )?))
        }
        "ov" => {
            check_known_keys(params, &["n", "d"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            let d = positive(get_param(params, "d")?, "d")?;
            Ok(Arc::new(OvProblem::new(n, d)?))
        }
        "parity_kclique" => {
            check_known_keys(params, &["n", "k"])?;
            let n = positive(get_param(params, "n")?, "n")?;
            let k = positive(get_param(params, "k")?, "k")?;
            Ok(Arc::new(ParityKCliqueProblem::new(n, k)?))
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

// --- shared index arithmetic -------------------------------------------

/// Number of unordered vertex pairs.
pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Bit position of the unordered pair `{i, j}`: pairs `(i, j)` with `i < j`
/// in lexicographic order, so bit 0 is the pair of the two lowest points.
pub(crate) fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a != b && a < n && b < n);
    let (i, j) = (a.min(b), a.max(b));
    i * n - i * (i + 1) / 2 + j - i - 1
}

/// Bit position of the ordered pair `(i, j)`, `i != j`, lexicographic.
pub(crate) fn ordered_pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    i * (n - 1) + if j < i { j } else { j - 1 }
}

/// Exact binomial coefficient at machine scale.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All nondecreasing length-`len` sequences over `0..alphabet`, in
/// lexicographic order. Canonical representatives for orbits of strings
/// under position permutation.
pub(crate) fn nondecreasing_sequences(len: usize, alphabet: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, len: usize, alphabet: usize, lo: usize) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for s in lo..alphabet {
            current.push(s);
            rec(out, current, len, alphabet, s);
            current.pop();
        }
    }
    rec(&mut out, &mut current, len, alphabet, 0);
    out
}
