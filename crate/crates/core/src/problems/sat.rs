use std::collections::HashMap;

use num_bigint::BigUint;

use crate::perm::Permutation;
use crate::aggregate::{CertificateIndex, InstanceIndex, Problem, SemigroupId, SemigroupValue};
use crate::{Error, Result};

/// Satisfiability over the width-at-most-k clause-selection encoding: an
/// instance is a bit vector choosing or not choosing each of the
/// `sum_{j<=k} C(2n, j)` clauses over the `2n` literals, and the formula is
/// the conjunction of the selected clauses.
///
/// Literals are coded `2*var + negated`; a clause is a sorted set of
/// literal codes, and clauses are enumerated by size then lexicographically,
/// which fixes the instance bit layout. A clause containing both `x` and
/// `not x` is a tautology and is satisfied by every assignment. Assignments
/// are bit masks with bit `v` giving the value of variable `v`; orbits are
/// weight classes with representative `0^z 1^{n-z}`.
pub struct KSatProblem {
    n: usize,
    k: usize,
    clauses: Vec<Vec<usize>>,
    clause_rank: HashMap<Vec<usize>, usize>,
}

impl KSatProblem {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 1 || k < 1 || k > 2 * n {
            return Err(Error::BadParams(format!("n={n}, k={k} out of range for ksat")));
        }
        let clauses = enumerate_clauses(2 * n, k);
        if clauses.len() > 62 {
            return Err(Error::BadParams(format!(
                "ksat with n={n}, k={k} has {} clauses; instance space exceeds 2^62",
                clauses.len()
            )));
        }
        let clause_rank = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Ok(KSatProblem {
            n,
            k,
            clauses,
            clause_rank,
        })
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn clause_satisfied(clause: &[usize], assignment: u64) -> bool {
        clause.iter().any(|&code| {
            let var = code >> 1;
            let negated = code & 1 == 1;
            (assignment >> var & 1 == 1) != negated
        })
    }
}

/// All nonempty subsets of `0..universe` of size at most `max_size`,
/// ordered by size then lexicographically.
fn enumerate_clauses(universe: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(universe) {
        let mut stack: Vec<usize> = Vec::with_capacity(size);
        fn rec(out: &mut Vec<Vec<usize>>, stack: &mut Vec<usize>, universe: usize, size: usize, lo: usize) {
            if stack.len() == size {
                out.push(stack.clone());
                return;
            }
            for v in lo..universe {
                stack.push(v);
                rec(out, stack, universe, size, v + 1);
                stack.pop();
            }
        }
        rec(&mut out, &mut stack, universe, size, 0);
    }
    out
}

impl Problem for KSatProblem {
    fn id(&self) -> String {
        "ksat".to_string()
    }

    fn n(&self) -> u32 {
        self.n as u32
    }

    fn alphabet_size(&self) -> u64 {
        2
    }

    fn instance_symbols(&self) -> u64 {
        self.clauses.len() as u64
    }

    fn instance_count(&self) -> u64 {
        1u64 << self.clauses.len()
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
        let assignment = certificate.0;
        for (c, clause) in self.clauses.iter().enumerate() {
            if instance.0 >> c & 1 == 1 && !Self::clause_satisfied(clause, assignment) {
                return SemigroupValue::Bool(false);
            }
        }
        SemigroupValue::Bool(true)
    }

    fn act_instance(&self, g: &Permutation, instance: InstanceIndex) -> InstanceIndex {
        let mut out = 0u64;
        let mut image = Vec::with_capacity(self.k);
        for (c, clause) in self.clauses.iter().enumerate() {
            if instance.0 >> c & 1 == 1 {
                image.clear();
                image.extend(clause.iter().map(|&code| (g.apply(code >> 1) << 1) | (code & 1)));
                image.sort_unstable();
                out |= 1 << self.clause_rank[&image];
            }
        }
        InstanceIndex(out)
    }

    fn act_certificate(&self, g: &Permutation, certificate: CertificateIndex) -> CertificateIndex {
        // Variable relabeling sends the value of variable v to variable g(v).
        let mut out = 0u64;
        for v in 0..self.n {
            if certificate.0 >> v & 1 == 1 {
                out |= 1 << g.apply(v);
            }
        }
        CertificateIndex(out)
    }

    fn orbit_reps(&self) -> Vec<CertificateIndex> {
        // z zeros then ones: 0^z 1^{n-z}.
        (0..=self.n)
            .map(|z| {
                let ones = self.n - z;
                let mask = if ones == 0 { 0 } else { ((1u64 << ones) - 1) << z };
                CertificateIndex(mask)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::eval_bruteforce;

    #[test]
    fn clause_count_matches_binomials() {
        // n=3, k=2: C(6,1) + C(6,2) = 21 clauses.
        let p = KSatProblem::new(3, 2).unwrap();
        assert_eq!(p.clause_count(), 21);
        assert_eq!(p.instance_count(), 1 << 21);
    }

    #[test]
    fn orbit_reps_are_zero_prefixes() {
        let p = KSatProblem::new(3, 2).unwrap();
        let reps: Vec<u64> = p.orbit_reps().iter().map(|c| c.0).collect();
        // Assignments 111, 011, 001, 000 read as x1 x2 x3.
        assert_eq!(reps, vec![0b111, 0b110, 0b100, 0b000]);
    }

    #[test]
    fn tautological_clause_is_always_satisfied() {
        let p = KSatProblem::new(2, 2).unwrap();
        // Find the clause {x0, not x0} = codes [0, 1].
        let taut = p.clause_rank[&vec![0, 1]];
        let instance = InstanceIndex(1 << taut);
        for a in 0..4u64 {
            assert_eq!(
                p.h(instance, CertificateIndex(a)),
                SemigroupValue::Bool(true)
            );
        }
    }

    #[test]
    fn contradictory_pair_of_unit_clauses_is_unsatisfiable() {
        let p = KSatProblem::new(2, 2).unwrap();
        let x0 = p.clause_rank[&vec![0]];
        let not_x0 = p.clause_rank[&vec![1]];
        let instance = InstanceIndex(1 << x0 | 1 << not_x0);
        assert_eq!(
            eval_bruteforce(&p, instance).unwrap(),
            SemigroupValue::Bool(false)
        );
    }

    #[test]
    fn empty_selection_is_satisfiable() {
        let p = KSatProblem::new(2, 1).unwrap();
        assert_eq!(
            eval_bruteforce(&p, InstanceIndex(0)).unwrap(),
            SemigroupValue::Bool(true)
        );
    }

    #[test]
    fn relabeling_preserves_satisfiability() {
        let p = KSatProblem::new(3, 2).unwrap();
        let mut rng = crate::rng::SplitMix64::new(12);
        for _ in 0..50 {
            let instance = InstanceIndex(rng.next_u64() & ((1 << 21) - 1));
            let g = Permutation::from_images(rng.permutation(3)).unwrap();
            let image = p.act_instance(&g, instance);
            assert_eq!(
                eval_bruteforce(&p, instance).unwrap(),
                eval_bruteforce(&p, image).unwrap()
            );
        }
    }
}
