//! Near-linear randomized recovery for Orthogonal Vectors and Parity
//! k-Clique, plus the closed-form family of graphs with very large
//! automorphism groups.
//!
//! Both problems share the shape of the general algorithm but replace the
//! deterministic coset machinery with cheap structure tests: an OV input
//! with at most three distinct vectors is answered directly in `O(nd)`;
//! a graph matching one of the twelve high-symmetry families gets its
//! k-clique count (hence parity) from a closed form. Everything else has a
//! large orbit, so the answer is decoded by majority over queries at
//! seeded-random isomorphic table positions.

use num_bigint::BigUint;

use crate::noise::CorruptedTable;
use crate::problems::{ov_encode, GraphInstance};
use crate::ratio::Ratio64;
use crate::rng::SplitMix64;
use crate::aggregate::SemigroupValue;
use crate::{Error, Result};

/// An Orthogonal Vectors input: `n` bit vectors of dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OVInstance {
    n: usize,
    d: usize,
    vectors: Vec<u64>,
}

impl OVInstance {
    pub fn new(vectors: Vec<u64>, d: usize) -> Result<Self> {
        if d == 0 || d > 63 {
            return Err(Error::BadParams(format!("dimension {d} out of range")));
        }
        for (i, &v) in vectors.iter().enumerate() {
            if v >> d != 0 {
                return Err(Error::BadParams(format!("vector {i} exceeds dimension {d}")));
            }
        }
        Ok(OVInstance {
            n: vectors.len(),
            d,
            vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[u64] {
        &self.vectors
    }

    /// Packs into the `ov` problem's instance index.
    pub fn encode(&self) -> Result<crate::aggregate::InstanceIndex> {
        ov_encode(&self.vectors, self.d)
    }

    /// Parses "n d" on the first line, then `n` lines of `d` space-separated
    /// bits.
    pub fn parse(text: &str) -> Result<OVInstance> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty vector file".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format("first line must be `n d`".into()))?;
        let d: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Format("first line must be `n d`".into()))?;
        let mut vectors = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format("missing vector line".into()))?;
            let mut v = 0u64;
            let mut count = 0;
            for (pos, tok) in line.split_whitespace().enumerate() {
                match tok {
                    "0" => {}
                    "1" => v |= 1 << pos,
                    _ => return Err(Error::Format(format!("bad bit `{tok}`"))),
                }
                count = pos + 1;
            }
            if count != d {
                return Err(Error::Format(format!(
                    "vector line has {count} bits, expected {d}"
                )));
            }
            vectors.push(v);
        }
        OVInstance::new(vectors, d)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.d);
        for &v in &self.vectors {
            let bits: Vec<String> = (0..self.d).map(|t| ((v >> t) & 1).to_string()).collect();
            out.push_str(&bits.join(" "));
            out.push('\n');
        }
        out
    }

    /// Slot permutation: the vector in slot `s` moves to slot `g(s)`.
    /// Matches the `ov` problem's instance action.
    pub fn permute_slots(&self, images: &[usize]) -> OVInstance {
        let mut vectors = vec![0u64; self.n];
        for (s, &img) in images.iter().enumerate() {
            vectors[img] = self.vectors[s];
        }
        OVInstance {
            n: self.n,
            d: self.d,
            vectors,
        }
    }
}

/// Direct `O(nd)` answer when the input has at most three distinct vectors;
/// `None` otherwise. Pairs of equal vectors count when a vector repeats.
pub fn ov_shortcut(input: &OVInstance) -> Option<bool> {
    let mut distinct: Vec<(u64, u64)> = Vec::new(); // (vector, multiplicity)
    for &v in &input.vectors {
        match distinct.iter_mut().find(|(u, _)| *u == v) {
            Some((_, count)) => *count += 1,
            None => {
                if distinct.len() == 3 {
                    return None;
                }
                distinct.push((v, 1));
            }
        }
    }
    let mut answer = false;
    for i in 0..distinct.len() {
        let (u, count) = distinct[i];
        // A repeated vector pairs with itself; its self dot product is its
        // weight, zero only for the zero vector.
        if count >= 2 && u == 0 {
            answer = true;
        }
        for &(w, _) in &distinct[i + 1..] {
            if u & w == 0 {
                answer = true;
            }
        }
    }
    Some(answer)
}

/// Default sample count `ceil(8 ln(max(n, 4)) / eps^2)`.
pub fn default_sample_count(n: usize, epsilon: Ratio64) -> u64 {
    let eps = epsilon.as_f64();
    let s = 8.0 * (n.max(4) as f64).ln() / (eps * eps);
    (s.ceil() as u64).max(1)
}

/// Hoeffding bound on the majority-vote failure probability when each
/// query is independently correct with probability `1/2 + advantage`.
pub fn majority_failure_bound(samples: u64, advantage: f64) -> f64 {
    (-2.0 * samples as f64 * advantage * advantage).exp()
}

fn bool_of(value: SemigroupValue) -> Result<bool> {
    match value {
        SemigroupValue::Bool(b) => Ok(b),
        SemigroupValue::Int(_) => Err(Error::ValueTypeMismatch),
    }
}

fn sampled_majority_bool(
    corrupted: &CorruptedTable,
    indices: impl Iterator<Item = u64>,
) -> Result<bool> {
    let mut trues = 0u64;
    let mut total = 0u64;
    for idx in indices {
        if bool_of(corrupted.query(idx)?)? {
            trues += 1;
        }
        total += 1;
    }
    if 2 * trues > total {
        Ok(true)
    } else if 2 * (total - trues) > total {
        Ok(false)
    } else {
        Err(Error::MajorityUndefined(total as usize))
    }
}

/// Majority vote over `samples` seeded-random slot permutations of the
/// input, queried in the corrupted `ov` table. Callers should route
/// through [`ov_shortcut`] first; inputs with at most three distinct
/// vectors do not need the table at all.
pub fn ov_recover(
    input: &OVInstance,
    corrupted: &CorruptedTable,
    epsilon: Ratio64,
    samples: Option<u64>,
    seed: u64,
) -> Result<bool> {
    if corrupted.problem_id() != "ov" || corrupted.n() as usize != input.n {
        return Err(Error::BindingMismatch {
            table: corrupted.problem_id(),
            table_n: corrupted.n(),
            expected: "ov".into(),
            expected_n: input.n as u32,
        });
    }
    let samples = samples.unwrap_or_else(|| default_sample_count(input.n, epsilon));
    let mut rng = SplitMix64::new(seed);
    let indices = (0..samples).map(|_| {
        let images = rng.permutation(input.n);
        input
            .permute_slots(&images)
            .encode()
            .expect("permuted input stays in range")
            .0
    });
    // Iterator is lazy; collect indices first to keep rng borrow simple.
    let indices: Vec<u64> = indices.collect();
    sampled_majority_bool(corrupted, indices.into_iter())
}

/// Shortcut-or-sample decision for one OV input.
pub fn ov_decide(
    input: &OVInstance,
    corrupted: &CorruptedTable,
    epsilon: Ratio64,
    samples: Option<u64>,
    seed: u64,
) -> Result<(bool, bool)> {
    match ov_shortcut(input) {
        Some(answer) => Ok((answer, true)),
        None => ov_recover(input, corrupted, epsilon, samples, seed).map(|b| (b, false)),
    }
}

/// The six structures with automorphism groups near `n!`, each present as
/// itself or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseFamily {
    Complete,
    CompleteMinusEdge,
    CliqueN1PlusIsolated,
    CliqueN1PlusPendant,
    CliqueN2PlusTwoIsolated,
    CliqueN2PlusEdge,
}

/// Classification of a graph against the twelve high-symmetry structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFamily {
    Known {
        base: BaseFamily,
        complemented: bool,
    },
    Other,
}

fn sorted_degrees(graph: &GraphInstance) -> Vec<usize> {
    let mut degs: Vec<usize> = (0..graph.n()).map(|v| graph.degree(v)).collect();
    degs.sort_unstable();
    degs
}

fn matches_base(graph: &GraphInstance) -> Option<BaseFamily> {
    let n = graph.n();
    let pairs = n * (n - 1) / 2;
    let edges = graph.edge_count() as usize;
    if edges == pairs {
        return Some(BaseFamily::Complete);
    }
    if edges == pairs - 1 {
        return Some(BaseFamily::CompleteMinusEdge);
    }
    let degs = sorted_degrees(graph);
    let expect = |profile: &[(usize, usize)]| -> bool {
        let mut want: Vec<usize> = Vec::with_capacity(n);
        for &(deg, count) in profile {
            want.extend(std::iter::repeat(deg).take(count));
        }
        want.sort_unstable();
        degs == want
    };
    if expect(&[(0, 1), (n - 2, n - 1)]) {
        return Some(BaseFamily::CliqueN1PlusIsolated);
    }
    // A universal vertex forces the degree-(n-2) vertices into a clique, so
    // the profile alone identifies the pendant variant.
    if expect(&[(1, 1), (n - 2, n - 2), (n - 1, 1)]) {
        return Some(BaseFamily::CliqueN1PlusPendant);
    }
    if expect(&[(0, 2), (n - 3, n - 2)]) {
        return Some(BaseFamily::CliqueN2PlusTwoIsolated);
    }
    if expect(&[(1, 2), (n - 3, n - 2)]) {
        // The two degree-1 vertices must form their own component; their
        // adjacency forces the rest into K_{n-2}.
        let ones: Vec<usize> = (0..n).filter(|&v| graph.degree(v) == 1).collect();
        for (a, &u) in ones.iter().enumerate() {
            for &w in &ones[a + 1..] {
                if graph.edge(u, w) {
                    return Some(BaseFamily::CliqueN2PlusEdge);
                }
            }
        }
    }
    None
}

/// Runs the structural tests against the graph and its complement.
/// Recognition is exact for every `n >= 4`; smaller graphs are `Other`.
pub fn classify_graph(graph: &GraphInstance) -> GraphFamily {
    if graph.n() < 4 || graph.directed() {
        return GraphFamily::Other;
    }
    if let Some(base) = matches_base(graph) {
        return GraphFamily::Known {
            base,
            complemented: false,
        };
    }
    if let Some(base) = matches_base(&graph.complement()) {
        return GraphFamily::Known {
            base,
            complemented: true,
        };
    }
    GraphFamily::Other
}

/// Constructs the canonical labeled member of a family at size `n`
/// (vertices `0..j` form the clique part).
pub fn family_graph(family: GraphFamily, n: usize) -> Result<GraphInstance> {
    let GraphFamily::Known { base, complemented } = family else {
        return Err(Error::BadParams("no canonical graph for Other".into()));
    };
    if n < 4 {
        return Err(Error::BadParams("families are defined for n >= 4".into()));
    }
    let clique = |size: usize| {
        let mut g = GraphInstance::empty(n, false);
        for i in 0..size {
            for j in i + 1..size {
                g.set_edge(i, j, true);
            }
        }
        g
    };
    let mut g = match base {
        BaseFamily::Complete => clique(n),
        BaseFamily::CompleteMinusEdge => {
            let mut g = clique(n);
            g.set_edge(0, 1, false);
            g
        }
        BaseFamily::CliqueN1PlusIsolated => clique(n - 1),
        BaseFamily::CliqueN1PlusPendant => {
            let mut g = clique(n - 1);
            g.set_edge(0, n - 1, true);
            g
        }
        BaseFamily::CliqueN2PlusTwoIsolated => clique(n - 2),
        BaseFamily::CliqueN2PlusEdge => {
            let mut g = clique(n - 2);
            g.set_edge(n - 2, n - 1, true);
            g
        }
    };
    if complemented {
        g = g.complement();
    }
    Ok(g)
}

/// Closed-form automorphism-group order of a classified family.
///
/// Complements share their base's order. Exact for `n >= 5`; at `n = 4`
/// the `CliqueN2PlusEdge` structure degenerates to two interchangeable
/// edges and the true order is twice the formula.
pub fn aut_order_closed_form(family: GraphFamily, n: usize) -> Result<BigUint> {
    let GraphFamily::Known { base, .. } = family else {
        return Err(Error::BadParams("no closed form for Other".into()));
    };
    if n < 4 {
        return Err(Error::BadParams("closed forms need n >= 4".into()));
    }
    let fact = crate::perm::factorial;
    Ok(match base {
        BaseFamily::Complete => fact(n),
        BaseFamily::CompleteMinusEdge => 2u32 * fact(n - 2),
        BaseFamily::CliqueN1PlusIsolated => fact(n - 1),
        BaseFamily::CliqueN1PlusPendant => fact(n - 2),
        BaseFamily::CliqueN2PlusTwoIsolated => 2u32 * fact(n - 2),
        BaseFamily::CliqueN2PlusEdge => 2u32 * fact(n - 2),
    })
}

/// Closed-form number of k-cliques of a classified family, `k >= 3`.
///
/// The complement side is 0 except for the complement of
/// `CliqueN2PlusTwoIsolated`, whose two universal vertices form a triangle
/// with every remaining vertex: `n - 2` triangles at `k = 3`.
pub fn count_k_cliques_special(family: GraphFamily, n: usize, k: usize) -> Result<BigUint> {
    let GraphFamily::Known { base, complemented } = family else {
        return Err(Error::BadParams("no closed form for Other".into()));
    };
    if k < 3 {
        return Err(Error::BadParams("clique counts are for k >= 3".into()));
    }
    let c = |a: usize, b: usize| -> BigUint {
        if b > a {
            return BigUint::from(0u32);
        }
        let mut acc = BigUint::from(1u32);
        for i in 0..b {
            acc = acc * BigUint::from((a - i) as u64) / BigUint::from((i + 1) as u64);
        }
        acc
    };
    if complemented {
        return Ok(
            if base == BaseFamily::CliqueN2PlusTwoIsolated && k == 3 {
                BigUint::from((n - 2) as u64)
            } else {
                BigUint::from(0u32)
            },
        );
    }
    Ok(match base {
        BaseFamily::Complete => c(n, k),
        BaseFamily::CompleteMinusEdge => c(n, k) - c(n - 2, k - 2),
        BaseFamily::CliqueN1PlusIsolated | BaseFamily::CliqueN1PlusPendant => c(n - 1, k),
        BaseFamily::CliqueN2PlusTwoIsolated | BaseFamily::CliqueN2PlusEdge => c(n - 2, k),
    })
}

/// Outcome of one parity-k-clique recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityOutcome {
    pub bit: bool,
    pub family: GraphFamily,
    pub queries: u64,
}

/// Parity of the number of k-cliques: classified graphs are answered from
/// the closed form with zero queries; everything else by seeded majority
/// over random relabelings queried in the corrupted table.
pub fn parity_kclique_recover(
    graph: &GraphInstance,
    k: usize,
    corrupted: &CorruptedTable,
    epsilon: Ratio64,
    samples: Option<u64>,
    seed: u64,
) -> Result<ParityOutcome> {
    if corrupted.problem_id() != "parity_kclique" || corrupted.n() as usize != graph.n() {
        return Err(Error::BindingMismatch {
            table: corrupted.problem_id(),
            table_n: corrupted.n(),
            expected: "parity_kclique".into(),
            expected_n: graph.n() as u32,
        });
    }
    let family = classify_graph(graph);
    if let GraphFamily::Known { .. } = family {
        let count = count_k_cliques_special(family, graph.n(), k)?;
        return Ok(ParityOutcome {
            bit: count.bit(0),
            family,
            queries: 0,
        });
    }
    let samples = samples.unwrap_or_else(|| default_sample_count(graph.n(), epsilon));
    let mut rng = SplitMix64::new(seed);
    let mut indices = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        let images = rng.permutation(graph.n());
        let relabeled = permute_graph(graph, &images);
        indices.push(relabeled.bits());
    }
    let bit = sampled_majority_bool(corrupted, indices.into_iter())?;
    Ok(ParityOutcome {
        bit,
        family,
        queries: samples,
    })
}

fn permute_graph(graph: &GraphInstance, images: &[usize]) -> GraphInstance {
    let mut out = GraphInstance::empty(graph.n(), false);
    for i in 0..graph.n() {
        for j in i + 1..graph.n() {
            if graph.edge(i, j) {
                out.set_edge(images[i], images[j], true);
            }
        }
    }
    out
}

/// Sweeps the whole OV table: every instance is decided by shortcut or
/// seeded sampling and compared against the pristine value. Shortcut
/// decisions count as `symmetric` (zero queries).
pub fn ov_sweep(
    n: usize,
    d: usize,
    corrupted: &CorruptedTable,
    epsilon: Ratio64,
    samples: Option<u64>,
    seed: u64,
    parallelism: usize,
) -> Result<crate::recover::RecoverySweep> {
    use rayon::prelude::*;
    let samples = samples.unwrap_or_else(|| default_sample_count(n, epsilon));
    let run = || {
        (0..corrupted.entry_count())
            .into_par_iter()
            .map(|idx| -> Result<crate::recover::RecoverySweep> {
                let mut row = crate::recover::RecoverySweep {
                    total: 1,
                    ..Default::default()
                };
                let input = OVInstance::new(
                    crate::problems::ov_decode(crate::aggregate::InstanceIndex(idx), n, d),
                    d,
                )?;
                let truth = bool_of(corrupted.true_value(idx)?)?;
                match ov_decide(
                    &input,
                    corrupted,
                    epsilon,
                    Some(samples),
                    crate::rng::derive_seed(seed, idx),
                ) {
                    Ok((answer, true)) => {
                        row.symmetric += 1;
                        if answer == truth {
                            row.correct += 1;
                        }
                    }
                    Ok((answer, false)) => {
                        row.query_branch += 1;
                        row.queries += samples;
                        if answer == truth {
                            row.correct += 1;
                        }
                    }
                    Err(Error::MajorityUndefined(_)) => {
                        row.query_branch += 1;
                        row.queries += samples;
                        row.majority_undefined += 1;
                    }
                    Err(other) => return Err(other),
                }
                Ok(row)
            })
            .try_reduce(Default::default, |a: crate::recover::RecoverySweep, b| {
                Ok(crate::recover::RecoverySweep {
                    total: a.total + b.total,
                    symmetric: a.symmetric + b.symmetric,
                    query_branch: a.query_branch + b.query_branch,
                    correct: a.correct + b.correct,
                    majority_undefined: a.majority_undefined + b.majority_undefined,
                    queries: a.queries + b.queries,
                })
            })
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

/// Sweeps the whole parity-k-clique table; classifier hits count as
/// `symmetric` (zero queries).
pub fn parity_sweep(
    n: usize,
    k: usize,
    corrupted: &CorruptedTable,
    epsilon: Ratio64,
    samples: Option<u64>,
    seed: u64,
    parallelism: usize,
) -> Result<crate::recover::RecoverySweep> {
    use rayon::prelude::*;
    let samples = samples.unwrap_or_else(|| default_sample_count(n, epsilon));
    let run = || {
        (0..corrupted.entry_count())
            .into_par_iter()
            .map(|idx| -> Result<crate::recover::RecoverySweep> {
                let mut row = crate::recover::RecoverySweep {
                    total: 1,
                    ..Default::default()
                };
                let graph = GraphInstance::from_bits(n, false, idx)?;
                let truth = bool_of(corrupted.true_value(idx)?)?;
                match parity_kclique_recover(
                    &graph,
                    k,
                    corrupted,
                    epsilon,
                    Some(samples),
                    crate::rng::derive_seed(seed, idx),
                ) {
                    Ok(outcome) => {
                        if outcome.queries == 0 {
                            row.symmetric += 1;
                        } else {
                            row.query_branch += 1;
                            row.queries += outcome.queries;
                        }
                        if outcome.bit == truth {
                            row.correct += 1;
                        }
                    }
                    Err(Error::MajorityUndefined(_)) => {
                        row.query_branch += 1;
                        row.queries += samples;
                        row.majority_undefined += 1;
                    }
                    Err(other) => return Err(other),
                }
                Ok(row)
            })
            .try_reduce(Default::default, |a: crate::recover::RecoverySweep, b| {
                Ok(crate::recover::RecoverySweep {
                    total: a.total + b.total,
                    symmetric: a.symmetric + b.symmetric,
                    query_branch: a.query_branch + b.query_branch,
                    correct: a.correct + b.correct,
                    majority_undefined: a.majority_undefined + b.majority_undefined,
                    queries: a.queries + b.queries,
                })
            })
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
