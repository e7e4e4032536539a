use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use super::chain::{schreier_sims_with_base, StabilizerChain};
use super::{Permutation, Permutations};
use crate::{Error, Result};

/// Which side of the subgroup the cosets are taken on.
///
/// For a subgroup `H`, elements `g, g'` lie in the same *right* coset `Hg`
/// iff `g . g'^{-1}` is in `H`, and in the same *left* coset `gH` iff
/// `g'^{-1} . g` is in `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetSide {
    Left,
    Right,
}

/// `m!` as an arbitrary-precision integer.
pub fn factorial(m: usize) -> BigUint {
    let mut f = BigUint::from(1u32);
    for i in 2..=m as u64 {
        f *= i;
    }
    f
}

/// Index `[S_m : H]` of the chain's group in `S_m`.
pub fn subgroup_index(chain: &StabilizerChain, m: usize) -> BigUint {
    factorial(m) / chain.group_order()
}

/// Lists `k` permutations lying in pairwise-distinct cosets of the chain's
/// group, on the requested side.
///
/// Reference enumeration: scan `S_m` in lexicographic one-line order and keep
/// an element iff it is not in the coset of any already-kept element (decided
/// by sifting). The output is therefore identical across runs and platforms.
/// Errors when `k` exceeds the subgroup index.
pub fn list_coset_reps(
    chain: &StabilizerChain,
    m: usize,
    k: u64,
    side: CosetSide,
) -> Result<Vec<Permutation>> {
    if chain.degree() != m {
        return Err(Error::DegreeMismatch {
            left: chain.degree(),
            right: m,
        });
    }
    let index = subgroup_index(chain, m);
    if BigUint::from(k) > index {
        return Err(Error::CosetCountExceedsIndex {
            requested: k,
            index,
        });
    }
    let mut reps: Vec<Permutation> = Vec::new();
    let mut reps_inv: Vec<Permutation> = Vec::new();
    let mut scratch = Vec::new();
    let mut sift_buf = Vec::new();
    let mut sift_tmp = Vec::new();
    for g in Permutations::new(m) {
        if reps.len() as u64 == k {
            break;
        }
        let mut duplicate = false;
        for inv in &reps_inv {
            match side {
                // g r^{-1} in H  <=>  Hg = Hr
                CosetSide::Right => g.compose_into(inv, &mut scratch),
                // r^{-1} g in H  <=>  gH = rH
                CosetSide::Left => inv.compose_into(&g, &mut scratch),
            }
            if chain.contains_images(&scratch, &mut sift_buf, &mut sift_tmp) {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            reps_inv.push(g.inverse());
            reps.push(g);
        }
    }
    debug_assert_eq!(reps.len() as u64, k);
    Ok(reps)
}

/// Lexicographically minimal element of the coset of `g` on `side`.
///
/// Walks a stabilizer chain greedily: for right cosets `Hg` the chain is
/// rebuilt over the base order `(g(0), g(1), ...)`, for left cosets `gH` the
/// natural base suffices.
pub fn canonical_coset_rep(
    chain: &StabilizerChain,
    g: &Permutation,
    side: CosetSide,
) -> Result<Permutation> {
    let m = chain.degree();
    let gens = chain.strong_generators();
    match side {
        CosetSide::Right => {
            let rebased = schreier_sims_with_base(&gens, m, g.images())?;
            // Minimize h(g(0)), then h(g(1)), ... over h in H.
            let mut acc = Permutation::identity(m);
            for level in rebased.all_levels() {
                let best = *level
                    .orbit()
                    .iter()
                    .min_by_key(|&&pt| acc.apply(pt))
                    .expect("orbit never empty");
                let u = level.transversal(best).expect("orbit point has a rep");
                acc = acc.compose(u)?;
            }
            acc.compose(g)
        }
        CosetSide::Left => {
            let natural = schreier_sims_with_base(&gens, m, &(0..m).collect::<Vec<_>>())?;
            // Minimize g(h(0)), then g(h(1)), ... over h in H.
            let mut acc = g.clone();
            for level in natural.all_levels() {
                let best = *level
                    .orbit()
                    .iter()
                    .min_by_key(|&&pt| acc.apply(pt))
                    .expect("orbit never empty");
                let u = level.transversal(best).expect("orbit point has a rep");
                acc = acc.compose(u)?;
            }
            Ok(acc)
        }
    }
}

/// Optimized coset listing: breadth-first search on the coset graph
/// generated by adjacent transpositions, with canonical (lexicographically
/// minimal) representatives as node labels.
///
/// Emits the same coset partition as [`list_coset_reps`]; the visit order is
/// BFS order rather than the reference lexicographic order.
pub fn canonical_coset_reps_bfs(
    chain: &StabilizerChain,
    m: usize,
    k: u64,
    side: CosetSide,
) -> Result<Vec<Permutation>> {
    if chain.degree() != m {
        return Err(Error::DegreeMismatch {
            left: chain.degree(),
            right: m,
        });
    }
    let index = subgroup_index(chain, m);
    if BigUint::from(k) > index {
        return Err(Error::CosetCountExceedsIndex {
            requested: k,
            index,
        });
    }
    let transpositions: Vec<Permutation> = (0..m.saturating_sub(1))
        .map(|j| Permutation::transposition(m, j, j + 1).expect("adjacent points"))
        .collect();
    let start = canonical_coset_rep(chain, &Permutation::identity(m), side)?;
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    out.push(start.clone());
    queue.push_back(start);
    while let Some(node) = queue.pop_front() {
        if out.len() as u64 >= k {
            break;
        }
        for tau in &transpositions {
            let neighbor = match side {
                CosetSide::Right => node.compose(tau)?,
                CosetSide::Left => tau.compose(&node)?,
            };
            let canon = canonical_coset_rep(chain, &neighbor, side)?;
            if seen.insert(canon.clone()) {
                out.push(canon.clone());
                queue.push_back(canon);
                if out.len() as u64 == k {
                    break;
                }
            }
        }
    }
    Ok(out)
}

impl StabilizerChain {
    /// All strong generators, outermost level first.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.all_levels()
            .iter()
            .flat_map(|l| l.generators().iter().cloned())
            .collect()
    }
}
