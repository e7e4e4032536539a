use num_bigint::BigUint;

use super::nondecreasing_sequences;
use crate::perm::Permutation;
use crate::aggregate::{CertificateIndex, InstanceIndex, Problem, SemigroupId, SemigroupValue};
use crate::{Error, Result};

/// k-CSP satisfiability and Max-k-CSP over a caller-supplied clause.
///
/// An instance selects a subset of the ordered k-tuples `L in [q]^k`; for a
/// proof `y in Sigma^q` the verifier is the conjunction (satisfiability,
/// BoolOr over proofs) or the count (maximization, IntMax over proofs) of
/// `clause(y[L_1], ..., y[L_k])` over the selected tuples. The acting group
/// is `S_q` permuting proof positions, so proof orbits are symbol multisets
/// with the nondecreasing proof as representative.
///
/// Tuple `L` maps to bit `sum L_t * q^(k-1-t)` (first coordinate most
/// significant); proofs are encoded base-sigma with position 0 least
/// significant. The default clause is not-all-equal.
pub struct KCspProblem {
    q: usize,
    k: usize,
    sigma: usize,
    clause: Vec<bool>,
    maximize: bool,
    tuples: Vec<Vec<usize>>,
    reps: Vec<CertificateIndex>,
}

impl KCspProblem {
    pub fn new(
        q: usize,
        k: usize,
        sigma: usize,
        clause_table: Option<Vec<bool>>,
        maximize: bool,
    ) -> Result<Self> {
        if q < 1 || k < 1 || sigma < 2 {
            return Err(Error::BadParams(
                "kcsp needs q >= 1, k >= 1, sigma >= 2".into(),
            ));
        }
        let tuple_count = (q as u64).checked_pow(k as u32);
        match tuple_count {
            Some(t) if t <= 62 => {}
            _ => {
                return Err(Error::BadParams(format!(
                    "kcsp with q={q}, k={k} selects over q^k tuples; instance space exceeds 2^62"
                )))
            }
        }
        if (sigma as u64).checked_pow(q as u32).is_none() {
            return Err(Error::BadParams("proof space exceeds u64".into()));
        }
        let clause_len = (sigma as u64).pow(k as u32) as usize;
        let clause = match clause_table {
            Some(t) => {
                if t.len() != clause_len {
                    return Err(Error::BadParams(format!(
                        "clause table must have sigma^k = {clause_len} entries, got {}",
                        t.len()
                    )));
                }
                t
            }
            // not-all-equal clause
            None => (0..clause_len)
                .map(|idx| {
                    let digits = decode_base(idx as u64, sigma as u64, k);
                    digits.iter().any(|&d| d != digits[0])
                })
                .collect(),
        };
        let mut tuples = Vec::with_capacity((q as u64).pow(k as u32) as usize);
        let mut current = vec![0usize; k];
        loop {
            tuples.push(current.clone());
            let mut t = k;
            loop {
                if t == 0 {
                    break;
                }
                t -= 1;
                current[t] += 1;
                if current[t] < q {
                    break;
                }
                current[t] = 0;
            }
            if current.iter().all(|&c| c == 0) {
                break;
            }
        }
        let reps = nondecreasing_sequences(q, sigma)
            .into_iter()
            .map(|seq| CertificateIndex(encode_base(&seq, sigma as u64)))
            .collect();
        Ok(KCspProblem {
            q,
            k,
            sigma,
            clause,
            maximize,
            tuples,
            reps,
        })
    }

    fn tuple_bit(&self, tuple: &[usize]) -> usize {
        let mut acc = 0usize;
        for &coord in tuple {
            acc = acc * self.q + coord;
        }
        acc
    }

    fn clause_value(&self, proof: &[usize], tuple: &[usize]) -> bool {
        let mut idx = 0usize;
        for &pos in tuple {
            idx = idx * self.sigma + proof[pos];
        }
        self.clause[idx]
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

impl Problem for KCspProblem {
    fn id(&self) -> String {
        if self.maximize { "maxkcsp" } else { "kcsp" }.to_string()
    }

    fn n(&self) -> u32 {
        self.q as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        self.tuples.len() as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << self.tuples.len()
    }

    fn group_degree(&self) -> usize {
        self.q
    }

    fn semigroup(&self) -> SemigroupId {
        if self.maximize {
            SemigroupId::IntMax
        } else {
            SemigroupId::BoolOr
        }
    }

    fn certificate_count(&self) -> BigUint {
        BigUint::from((self.sigma as u64).pow(self.q as u32))
    }

    fn orbit_count(&self) -> u64 {
        self.reps.len() as u64
    }

    fn max_value(&self) -> u64 {
        if self.maximize {
            self.tuples.len() as u64
        } else {
            1
        }
    }

    fn h(&self, instance: InstanceIndex, certificate: CertificateIndex) -> SemigroupValue {
        let proof = decode_base(certificate.0, self.sigma as u64, self.q);
        if self.maximize {
            let mut satisfied = 0i64;
            for (bit, tuple) in self.tuples.iter().enumerate() {
                if instance.0 >> bit & 1 == 1 && self.clause_value(&proof, tuple) {
                    satisfied += 1;
                }
            }
            SemigroupValue::Int(satisfied)
        } else {
            for (bit, tuple) in self.tuples.iter().enumerate() {
                if instance.0 >> bit & 1 == 1 && !self.clause_value(&proof, tuple) {
                    return SemigroupValue::Bool(false);
                }
            }
            SemigroupValue::Bool(true)
        }
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        // Bit for tuple L in the image is the bit for g^{-1}(L) pointwise,
        // i.e. the selected tuple L moves to g(L).
        let mut out = 0u64;
        let mut image = vec![0usize; self.k];
        for (bit, tuple) in self.tuples.iter().enumerate() {
            if instance.0 >> bit & 1 == 1 {
                for (slot, &coord) in tuple.iter().enumerate() {
                    image[slot] = g.apply(coord);
                }
                out |= 1 << self.tuple_bit(&image);
            }
        }
        InstanceIndex(out)
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        let proof = decode_base(certificate.0, self.sigma as u64, self.q);
        let mut out = vec![0usize; self.q];
        for pos in 0..self.q {
            out[g.apply(pos)] = proof[pos];
        }
        CertificateIndex(encode_base(&out, self.sigma as u64))
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        self.reps.clone()
    }
}
