use std::collections::HashMap;

use num_bigint::BigUint;

use super::{nondecreasing_sequences, ordered_pair_index, pair_count, pair_index};
use crate::perm::Permutation;
use crate::aggregate::{CertificateIndex, InstanceIndex, Problem, SemigroupId, SemigroupValue};
use crate::{Error, Result};

/// A labeled simple graph stored as an edge bit vector.
///
/// Undirected: bit `pair_index(n, i, j)` is the edge `{i, j}`; bit 0 is the
/// pair of the two lowest vertices. Directed: bit `ordered_pair_index(n, i, j)`
/// is the arc `i -> j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphInstance {
    n: usize,
    directed: bool,
    bits: u64,
}

impl GraphInstance {
    pub fn empty(n: usize, directed: bool) -> Self {
        GraphInstance {
            n,
            directed,
            bits: 0,
        }
    }

    pub fn from_bits(n: usize, directed: bool, bits: u64) -> Result<Self> {
        let width = if directed {
            n * (n - 1)
        } else {
            pair_count(n)
        };
        if width < 64 && bits >> width != 0 {
            return Err(Error::Format(format!(
                "edge bits exceed the {width}-bit layout for n={n}"
            )));
        }
        Ok(GraphInstance { n, directed, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn edge(&self, a: usize, b: usize) -> bool {
        let idx = if self.directed {
            ordered_pair_index(self.n, a, b)
        } else {
            pair_index(self.n, a, b)
        };
        self.bits >> idx & 1 == 1
    }

    pub fn set_edge(&mut self, a: usize, b: usize, present: bool) {
        let idx = if self.directed {
            ordered_pair_index(self.n, a, b)
        } else {
            pair_index(self.n, a, b)
        };
        if present {
            self.bits |= 1 << idx;
        } else {
            self.bits &= !(1 << idx);
        }
    }

    pub fn edge_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of neighbors; undirected graphs only.
    pub fn degree(&self, v: usize) -> usize {
        debug_assert!(!self.directed);
        (0..self.n).filter(|&u| u != v && self.edge(v, u)).count()
    }

    /// Complement within the simple-graph layout (no loops).
    pub fn complement(&self) -> GraphInstance {
        let width = if self.directed {
            self.n * (self.n - 1)
        } else {
            pair_count(self.n)
        };
        let mask = if width >= 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        GraphInstance {
            n: self.n,
            directed: self.directed,
            bits: self.bits ^ mask,
        }
    }

    /// Vertex relabeling: the image has an edge between `g(i)` and `g(j)`
    /// iff this graph has one between `i` and `j`.
    pub fn relabel(&self, g: &Permutation) -> GraphInstance {
        debug_assert_eq!(g.degree(), self.n);
        let mut out = GraphInstance::empty(self.n, self.directed);
        if self.directed {
            for i in 0..self.n {
                for j in 0..self.n {
                    if i != j && self.edge(i, j) {
                        out.set_edge(g.apply(i), g.apply(j), true);
                    }
                }
            }
        } else {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    if self.edge(i, j) {
                        out.set_edge(g.apply(i), g.apply(j), true);
                    }
                }
            }
        }
        out
    }

    /// Parses the undirected text format: first line `n`, then either one
    /// edge `i j` per line (1-based) or a single `0x...` hex edge-bit vector.
    pub fn parse(text: &str) -> Result<GraphInstance> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Format("empty graph file".into()))?
            .parse()
            .map_err(|_| Error::Format("first line must be the vertex count".into()))?;
        if n == 0 || pair_count(n) > 63 {
            return Err(Error::Format(format!("vertex count {n} out of range")));
        }
        let rest: Vec<&str> = lines.collect();
        if rest.len() == 1 && rest[0].starts_with("0x") {
            let bits = u64::from_str_radix(&rest[0][2..], 16)
                .map_err(|_| Error::Format("bad hex edge vector".into()))?;
            return GraphInstance::from_bits(n, false, bits);
        }
        let mut graph = GraphInstance::empty(n, false);
        for line in rest {
            let mut parts = line.split_whitespace();
            let a: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad edge line `{line}`")))?;
            let b: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad edge line `{line}`")))?;
            if parts.next().is_some() {
                return Err(Error::Format(format!("bad edge line `{line}`")));
            }
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::Format(format!("edge `{line}` out of range")));
            }
            graph.set_edge(a - 1, b - 1, true);
        }
        Ok(graph)
    }

    /// Text form matching [`Self::parse`]: vertex count then 1-based edges.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let js: Box<dyn Iterator<Item = usize>> = if self.directed {
                Box::new((0..self.n).filter(move |&j| j != i))
            } else {
                Box::new(i + 1..self.n)
            };
            for j in js {
                if self.edge(i, j) {
                    out.push_str(&format!("{} {}\n", i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn to_hex(&self) -> String {
        format!("0x{:x}", self.bits)
    }
}

/// Plain graph <-> instance index for the single-graph problems
/// (`kcol`, `hampath`, `hamcycle`, `dir_hampath_*`, `parity_kclique`).
pub fn graph_to_index(graph: &GraphInstance) -> InstanceIndex {
    InstanceIndex(graph.bits)
}

pub fn graph_from_index(n: usize, directed: bool, index: InstanceIndex) -> Result<GraphInstance> {
    GraphInstance::from_bits(n, directed, index.0)
}

/// `(k, graph)` <-> instance index for the clique family:
/// `index = (k - 1) * 2^{pairs} + edge bits`, `k` in `1..=n`.
pub fn clique_family_encode(n: usize, k: usize, graph: &GraphInstance) -> Result<InstanceIndex> {
    if k == 0 || k > n {
        return Err(Error::BadParams(format!("k={k} outside 1..={n}")));
    }
    if graph.n() != n || graph.directed() {
        return Err(Error::BadParams("graph shape mismatch".into()));
    }
    let width = pair_count(n);
    Ok(InstanceIndex(((k - 1) as u64) << width | graph.bits))
}

pub fn clique_family_decode(n: usize, index: InstanceIndex) -> Result<(usize, GraphInstance)> {
    let width = pair_count(n);
    let k = (index.0 >> width) as usize + 1;
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: index.0,
            count: (n as u64) << width,
        });
    }
    let bits = index.0 & ((1u64 << width) - 1);
    Ok((k, GraphInstance { n, directed: false, bits }))
}

/// Incremental adjacency compatibility: assumes the prefix without its
/// last point already passed, so only pairs touching the newest point are
/// checked.
fn graph_prefix_compatible(graph: &GraphInstance, images: &[usize]) -> bool {
    let Some(a) = images.len().checked_sub(1) else {
        return true;
    };
    for b in 0..a {
        if graph.directed {
            if graph.edge(a, b) != graph.edge(images[a], images[b])
                || graph.edge(b, a) != graph.edge(images[b], images[a])
            {
                return false;
            }
        } else if graph.edge(a, b) != graph.edge(images[a], images[b]) {
            return false;
        }
    }
    true
}

/// Stabilizer-search oracle for a standalone graph: accepts exactly the
/// relabelings fixing the edge set.
pub struct GraphAutOracle<'a>(pub &'a GraphInstance);

impl crate::perm::GroupOracle for GraphAutOracle<'_> {
    fn contains(&self, p: &Permutation) -> bool {
        self.0.relabel(p) == *self.0
    }

    fn partial_compatible(&self, images: &[usize]) -> bool {
        graph_prefix_compatible(self.0, images)
    }
}

// --- clique / independent set / vertex cover ----------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetVariant {
    Clique,
    IndependentSet,
    VertexCover,
}

/// CLIQUE, INDSET and VERTEXCOVER over the product domain
/// `k in [n]  x  {0,1}^{C(n,2)}`; the certificate space is all vertex
/// subsets, partitioned into orbits by size with canonical representative
/// `{1, ..., z}`.
pub struct CliqueFamily {
    variant: SetVariant,
    n: usize,
}

impl CliqueFamily {
    pub fn new(variant: SetVariant, n: usize) -> Result<Self> {
        if n < 2 || pair_count(n) + (64 - (n as u64).leading_zeros() as usize) > 62 {
            return Err(Error::BadParams(format!("n={n} out of range for the clique family")));
        }
        Ok(CliqueFamily { variant, n })
    }

    fn subset_holds(&self, graph: &GraphInstance, subset: u64) -> bool {
        let n = self.n;
        match self.variant {
            SetVariant::Clique => {
                for i in 0..n {
                    if subset >> i & 1 == 0 {
                        continue;
                    }
                    for j in i + 1..n {
                        if subset >> j & 1 == 1 && !graph.edge(i, j) {
                            return false;
                        }
                    }
                }
                true
            }
            SetVariant::IndependentSet => {
                for i in 0..n {
                    if subset >> i & 1 == 0 {
                        continue;
                    }
                    for j in i + 1..n {
                        if subset >> j & 1 == 1 && graph.edge(i, j) {
                            return false;
                        }
                    }
                }
                true
            }
            SetVariant::VertexCover => {
                for i in 0..n {
                    for j in i + 1..n {
                        if graph.edge(i, j) && subset >> i & 1 == 0 && subset >> j & 1 == 0 {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }
}

impl Problem for CliqueFamily {
    fn id(&self) -> String {
        match self.variant {
            SetVariant::Clique => "clique",
            SetVariant::IndependentSet => "indset",
            SetVariant::VertexCover => "vertexcover",
        }
        .to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        pair_count(self.n) as u64
    }

    fn extra_factor(&self) -> u64 {
        self.n as u64
    }

    fn instance_count(&self) -> u64 {
        (self.n as u64) << pair_count(self.n)
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        SemigroupId::BoolOr
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from(1u64 << self.n)
    }

    fn orbit_count(&self) -> u64 {
        self.n as u64 + 1
    }

    fn max_value(&self) -> u64 {
        1
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let (k, graph) = clique_family_decode(self.n, instance).expect("index in range");
        let subset = certificate.0;
        let size_ok = subset.count_ones() as usize == k;
        SemigroupValue::Bool(size_ok && self.subset_holds(&graph, subset))
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let (k, graph) = clique_family_decode(self.n, instance).expect("index in range");
        clique_family_encode(self.n, k, &graph.relabel(g)).expect("relabeled graph is in range")
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let mut out = 0u64;
        for i in 0..self.n {
            if certificate.0 >> i & 1 == 1 {
                out |= 1 << g.apply(i);
            }
        }
        CertificateIndex(out)
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        (0..=self.n)
            .map(|z| CertificateIndex(if z == 0 { 0 } else { (1u64 << z) - 1 }))
            .collect()
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let (_, graph) = clique_family_decode(self.n, instance).expect("index in range");
        graph_prefix_compatible(&graph, partial_images)
    }
}

// --- k-colorability ------------------------------------------------------

/// k-COL: is there a proper k-coloring. Certificates are colorings
/// `[k]^n` encoded base-k with vertex 0 least significant; orbits are
/// color-count multisets with the nondecreasing coloring as representative.
pub struct KColProblem {
    n: usize,
    k: usize,
    reps: Vec<CertificateIndex>,
}

impl KColProblem {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || pair_count(n) > 62 {
            return Err(Error::BadParams(format!("n={n} out of range for kcol")));
        }
        if k < 1 || (k as u64).checked_pow(n as u32).is_none() {
            return Err(Error::BadParams(format!("k={k} out of range for kcol")));
        }
        let reps = nondecreasing_sequences(n, k)
            .into_iter()
            .map(|seq| CertificateIndex(encode_base(&seq, k as u64)))
            .collect();
        Ok(KColProblem { n, k, reps })
    }

    fn colors(&self, certificate: CertificateIndex) -> Vec<usize> {
        decode_base(certificate.0, self.k as u64, self.n)
    }
}

fn encode_base(digits: &[usize], base: u64) -> u64 {
    let mut acc = 0u64;
    for (pos, &d) in digits.iter().enumerate() {
        acc += (d as u64) * base.pow(pos as u32);
    }
    acc
}

fn decode_base(mut value: u64, base: u64, len: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((value % base) as usize);
        value /= base;
    }
    out
}

impl Problem for KColProblem {
    fn id(&self) -> String {
        "kcol".to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        pair_count(self.n) as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << pair_count(self.n)
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        SemigroupId::BoolOr
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from((self.k as u64).pow(self.n as u32))
    }

    fn orbit_count(&self) -> u64 {
        self.reps.len() as u64
    }

    fn max_value(&self) -> u64 {
        1
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        let colors = self.colors(certificate);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if graph.edge(i, j) && colors[i] == colors[j] {
                    return SemigroupValue::Bool(false);
                }
            }
        }
        SemigroupValue::Bool(true)
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_to_index(&graph.relabel(g))
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let colors = self.colors(certificate);
        let mut out = vec![0usize; self.n];
        for v in 0..self.n {
            out[g.apply(v)] = colors[v];
        }
        CertificateIndex(encode_base(&out, self.k as u64))
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        self.reps.clone()
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_prefix_compatible(&graph, partial_images)
    }
}

// --- Hamiltonian path / cycle --------------------------------------------

/// HAMPATH / HAMCYCLE with deliberately redundant full-sequence
/// certificates: every injective vertex sequence, indexed by lexicographic
/// rank; a permutation relabels the sequence values, so the whole space is
/// one orbit with the identity sequence as representative.
pub struct HamiltonProblem {
    n: usize,
    cyclic: bool,
    sequences: Vec<Vec<usize>>,
    rank: HashMap<Vec<usize>, u64>,
}

fn all_sequences(n: usize) -> (Vec<Vec<usize>>, HashMap<Vec<usize>, u64>) {
    let mut seqs = Vec::new();
    for p in crate::perm::Permutations::new(n) {
        seqs.push(p.images().to_vec());
    }
    let rank = seqs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u64))
        .collect();
    (seqs, rank)
}

impl HamiltonProblem {
    pub fn new(n: usize, cyclic: bool) -> Result<Self> {
        if n < 2 || n > 8 {
            return Err(Error::BadParams(format!(
                "n={n} out of range for hamiltonian problems"
            )));
        }
        let (sequences, rank) = all_sequences(n);
        Ok(HamiltonProblem {
            n,
            cyclic,
            sequences,
            rank,
        })
    }
}

impl Problem for HamiltonProblem {
    fn id(&self) -> String {
        if self.cyclic { "hamcycle" } else { "hampath" }.to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        pair_count(self.n) as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << pair_count(self.n)
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        SemigroupId::BoolOr
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from(self.sequences.len() as u64)
    }

    fn orbit_count(&self) -> u64 {
        1
    }

    fn max_value(&self) -> u64 {
        1
    }

    fn regular_certificate_orbits(&self) -> bool {
        true
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        let seq = &self.sequences[certificate.0 as usize];
        for t in 0..self.n - 1 {
            if !graph.edge(seq[t], seq[t + 1]) {
                return SemigroupValue::Bool(false);
            }
        }
        if self.cyclic && !graph.edge(seq[self.n - 1], seq[0]) {
            return SemigroupValue::Bool(false);
        }
        SemigroupValue::Bool(true)
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_to_index(&graph.relabel(g))
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let seq = &self.sequences[certificate.0 as usize];
        let image: Vec<usize> = seq.iter().map(|&v| g.apply(v)).collect();
        CertificateIndex(self.rank[&image])
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        vec![CertificateIndex(0)]
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_prefix_compatible(&graph, partial_images)
    }
}

// --- directed Hamiltonian path, parity and count variants -----------------

/// Directed Hamiltonian path aggregation over all injective vertex
/// sequences. With `BoolXor` this is the parity of directed Hamiltonian
/// paths; with `IntAdd` the exact count. The single certificate orbit has
/// size `n!` (regular), which is what makes the non-idempotent compressed
/// evaluator applicable.
pub struct DirHamPathProblem {
    n: usize,
    semigroup: SemigroupId,
    sequences: Vec<Vec<usize>>,
    rank: HashMap<Vec<usize>, u64>,
}

impl DirHamPathProblem {
    pub fn new(n: usize, semigroup: SemigroupId) -> Result<Self> {
        if n < 2 || n * (n - 1) > 62 {
            return Err(Error::BadParams(format!(
                "n={n} out of range for dir_hampath"
            )));
        }
        if !matches!(semigroup, SemigroupId::BoolXor | SemigroupId::IntAdd) {
            return Err(Error::BadParams(
                "dir_hampath supports BoolXor (parity) or IntAdd (count)".into(),
            ));
        }
        let (sequences, rank) = all_sequences(n);
        Ok(DirHamPathProblem {
            n,
            semigroup,
            sequences,
            rank,
        })
    }
}

impl Problem for DirHamPathProblem {
    fn id(&self) -> String {
        match self.semigroup {
            SemigroupId::BoolXor => "dir_hampath_parity",
            _ => "dir_hampath_count",
        }
        .to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        (self.n * (self.n - 1)) as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << (self.n * (self.n - 1))
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        self.semigroup
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from(self.sequences.len() as u64)
    }

    fn orbit_count(&self) -> u64 {
        1
    }

    fn max_value(&self) -> u64 {
        match self.semigroup {
            SemigroupId::BoolXor => 1,
            _ => self.sequences.len() as u64,
        }
    }

    fn regular_certificate_orbits(&self) -> bool {
        true
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let graph = graph_from_index(self.n, true, instance).expect("index in range");
        let seq = &self.sequences[certificate.0 as usize];
        let ok = (0..self.n - 1).all(|t| graph.edge(seq[t], seq[t + 1]));
        match self.semigroup {
            SemigroupId::BoolXor => SemigroupValue::Bool(ok),
            _ => SemigroupValue::Int(ok as i64),
        }
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let graph = graph_from_index(self.n, true, instance).expect("index in range");
        graph_to_index(&graph.relabel(g))
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let seq = &self.sequences[certificate.0 as usize];
        let image: Vec<usize> = seq.iter().map(|&v| g.apply(v)).collect();
        CertificateIndex(self.rank[&image])
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        vec![CertificateIndex(0)]
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let graph = graph_from_index(self.n, true, instance).expect("index in range");
        graph_prefix_compatible(&graph, partial_images)
    }
}

// --- parity k-clique -------------------------------------------------------

/// Lowest-order bit of the number of k-cliques: XOR of the k-clique
/// indicator over all size-k subsets (one orbit). Non-idempotent and
/// non-regular, so only brute force and the query path apply; it exists for
/// the fine-grained recovery experiments.
pub struct ParityKCliqueProblem {
    n: usize,
    k: usize,
    subsets: Vec<u64>,
    rank: HashMap<u64, u64>,
}

impl ParityKCliqueProblem {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || pair_count(n) > 62 || k == 0 || k > n {
            return Err(Error::BadParams(format!(
                "n={n}, k={k} out of range for parity_kclique"
            )));
        }
        let subsets: Vec<u64> = (0u64..1 << n)
            .filter(|s| s.count_ones() as usize == k)
            .collect();
        let rank = subsets
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i as u64))
            .collect();
        Ok(ParityKCliqueProblem {
            n,
            k,
            subsets,
            rank,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Problem for ParityKCliqueProblem {
    fn id(&self) -> String {
        "parity_kclique".to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        pair_count(self.n) as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << pair_count(self.n)
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        SemigroupId::BoolXor
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from(self.subsets.len() as u64)
    }

    fn orbit_count(&self) -> u64 {
        1
    }

    fn max_value(&self) -> u64 {
        1
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        let subset = self.subsets[certificate.0 as usize];
        for i in 0..self.n {
            if subset >> i & 1 == 0 {
                continue;
            }
            for j in i + 1..self.n {
                if subset >> j & 1 == 1 && !graph.edge(i, j) {
                    return SemigroupValue::Bool(false);
                }
            }
        }
        SemigroupValue::Bool(true)
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_to_index(&graph.relabel(g))
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let subset = self.subsets[certificate.0 as usize];
        let mut out = 0u64;
        for i in 0..self.n {
            if subset >> i & 1 == 1 {
                out |= 1 << g.apply(i);
            }
        }
        CertificateIndex(self.rank[&out])
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        vec![CertificateIndex(0)]
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        let graph = graph_from_index(self.n, false, instance).expect("index in range");
        graph_prefix_compatible(&graph, partial_images)
    }
}
