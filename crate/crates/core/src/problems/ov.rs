use num_bigint::BigUint;

use super::{pair_count, pair_index};
use crate::perm::Permutation;
use crate::aggregate::{CertificateIndex, InstanceIndex, Problem, SemigroupId, SemigroupValue};
use crate::{Error, Result};

/// Orthogonal Vectors: given `n` bit vectors of dimension `d`, is there an
/// unordered pair with dot product zero.
///
/// The instance index packs vector `i` into bits `[i*d, (i+1)*d)`.
/// Certificates are the unordered slot pairs `{i, j}` (one orbit, canonical
/// representative the lowest pair); the group permutes vector slots.
pub struct OvProblem {
    n: usize,
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl OvProblem {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 || d < 1 || n * d > 62 {
            return Err(Error::BadParams(format!("n={n}, d={d} out of range for ov")));
        }
        let mut pairs = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Ok(OvProblem { n, d, pairs })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    fn vector(&self, instance: InstanceIndex, slot: usize) -> u64 {
        instance.0 >> (slot * self.d) & ((1u64 << self.d) - 1)
    }
}

/// Packs `n` d-bit vectors into an instance index.
pub fn ov_encode(vectors: &[u64], d: usize) -> Result<InstanceIndex> {
    if vectors.len() * d > 62 {
        return Err(Error::BadParams("vector list exceeds the 62-bit layout".into()));
    }
    let mut acc = 0u64;
    for (i, &v) in vectors.iter().enumerate() {
        if d < 64 && v >> d != 0 {
            return Err(Error::BadParams(format!("vector {i} exceeds dimension {d}")));
        }
        acc |= v << (i * d);
    }
    Ok(InstanceIndex(acc))
}

/// Unpacks an instance index into `n` d-bit vectors.
pub fn ov_decode(index: InstanceIndex, n: usize, d: usize) -> Vec<u64> {
    (0..n)
        .map(|i| index.0 >> (i * d) & ((1u64 << d) - 1))
        .collect()
}

impl Problem for OvProblem {
    fn id(&self) -> String {
        "ov".to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        (self.n * self.d) as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << (self.n * self.d)
    }

    fn group_degree(&self) -> usize {
        self.n
    }

    fn semigroup(&self) -> SemigroupId {
        SemigroupId::BoolOr
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from(self.pairs.len() as u64)
    }

    fn orbit_count(&self) -> u64 {
        1
    }

    fn max_value(&self) -> u64 {
        1
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let (i, j) = self.pairs[certificate.0 as usize];
        let dot_zero = self.vector(instance, i) & self.vector(instance, j) == 0;
        SemigroupValue::Bool(dot_zero)
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        // Slot position action: the vector in slot s moves to slot g(s).
        let mut out = 0u64;
        for s in 0..self.n {
            out |= self.vector(instance, s) << (g.apply(s) * self.d);
        }
        InstanceIndex(out)
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let (i, j) = self.pairs[certificate.0 as usize];
        let (a, b) = (g.apply(i), g.apply(j));
        CertificateIndex(pair_index(self.n, a, b) as u64)
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        vec![CertificateIndex(0)]
    }

    fn stabilizer_partial_check(&self, instance: InstanceIndex, partial_images: &[usize]) -> bool {
        // g stabilizes V iff every slot holds the same vector as its image;
        // earlier slots were checked as the prefix grew.
        match partial_images.len().checked_sub(1) {
            None => true,
            Some(s) => self.vector(instance, s) == self.vector(instance, partial_images[s]),
        }
    }
}
