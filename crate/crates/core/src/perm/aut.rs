use super::chain::{schreier_sims, StabilizerChain};
use super::{Permutation, Permutations};
use crate::{Error, Result};

/// Membership oracle for a subgroup of `S_m`.
///
/// `contains` must describe a genuine subgroup (closed under composition and
/// inverse); this is not checked. `partial_compatible` may prune the
/// backtracking search: given the images of points `0..images.len()`, return
/// false only if no group element can extend the partial map. The search
/// grows prefixes one point at a time, so implementations may assume the
/// prefix without its last point already passed. The default never prunes.
pub trait GroupOracle {
    fn contains(&self, p: &Permutation) -> bool;

    fn partial_compatible(&self, images: &[usize]) -> bool {
        let _ = images;
        true
    }
}

/// Closure-backed oracle without partial pruning.
pub struct FnOracle<F: Fn(&Permutation) -> bool>(pub F);

impl<F: Fn(&Permutation) -> bool> GroupOracle for FnOracle<F> {
    fn contains(&self, p: &Permutation) -> bool {
        (self.0)(p)
    }
}

/// How [`aut_group`] enumerates the subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutStrategy {
    /// Test every element of `S_m`. Exact but needs `m!` oracle calls.
    Exhaustive,
    /// Depth-first search over partial point maps, pruned by
    /// [`GroupOracle::partial_compatible`]; inside a subtree that deviates
    /// from the identity prefix, the search stops at the first member found,
    /// since the rest of that coset is already covered by it.
    Backtracking,
}

/// Default degree cap for the exhaustive strategy.
pub const EXHAUSTIVE_DEGREE_CAP: usize = 10;

/// Computes a stabilizer chain for the subgroup accepted by `oracle`.
pub fn aut_group(
    oracle: &dyn GroupOracle,
    m: usize,
    strategy: AutStrategy,
) -> Result<StabilizerChain> {
    aut_group_with_cap(oracle, m, strategy, EXHAUSTIVE_DEGREE_CAP)
}

/// As [`aut_group`] with an explicit degree cap for the exhaustive strategy.
pub fn aut_group_with_cap(
    oracle: &dyn GroupOracle,
    m: usize,
    strategy: AutStrategy,
    exhaustive_cap: usize,
) -> Result<StabilizerChain> {
    match strategy {
        AutStrategy::Exhaustive => {
            if m > exhaustive_cap {
                return Err(Error::DegreeCapExceeded {
                    degree: m,
                    cap: exhaustive_cap,
                });
            }
            let gens: Vec<Permutation> = Permutations::new(m)
                .filter(|p| oracle.contains(p))
                .collect();
            schreier_sims(&gens, m)
        }
        AutStrategy::Backtracking => backtracking(oracle, m),
    }
}

/// Generator search by DFS over partial point maps `0 -> img, 1 -> img, ...`
/// with images tried in increasing order.
///
/// Along the identity spine (partial map fixing `0..d`), each branch
/// `d -> beta` with `beta != d` is searched only until its first member: any
/// further member `g'` of that branch satisfies `first^{-1} . g'` fixing
/// `0..d`, so it is generated by the representative together with the deeper
/// spine levels.
fn backtracking(oracle: &dyn GroupOracle, m: usize) -> Result<StabilizerChain> {
    let mut chain = schreier_sims(&[], m)?;
    let mut images: Vec<usize> = Vec::with_capacity(m);
    let mut used = vec![false; m];
    spine(oracle, m, &mut images, &mut used, &mut chain);
    Ok(chain)
}

fn spine(
    oracle: &dyn GroupOracle,
    m: usize,
    images: &mut Vec<usize>,
    used: &mut [bool],
    chain: &mut StabilizerChain,
) {
    let d = images.len();
    if d == m {
        return; // identity leaf
    }
    // Deviating branches first or spine first makes no difference to the
    // generated group; keep increasing image order for determinism.
    for beta in 0..m {
        if used[beta] {
            continue;
        }
        images.push(beta);
        used[beta] = true;
        if oracle.partial_compatible(images) {
            if beta == d {
                spine(oracle, m, images, used, chain);
            } else if let Some(found) = find_first(oracle, m, images, used) {
                if !chain.contains(&found) {
                    absorb(chain, found);
                }
            }
        }
        used[beta] = false;
        images.pop();
    }
}

fn find_first(
    oracle: &dyn GroupOracle,
    m: usize,
    images: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<Permutation> {
    if images.len() == m {
        let p = Permutation::from_images(images.clone()).expect("DFS maintains a bijection");
        return oracle.contains(&p).then_some(p);
    }
    for beta in 0..m {
        if used[beta] {
            continue;
        }
        images.push(beta);
        used[beta] = true;
        let hit = if oracle.partial_compatible(images) {
            find_first(oracle, m, images, used)
        } else {
            None
        };
        used[beta] = false;
        images.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Adds one generator to an existing chain by rebuilding from the strong
/// generators plus the newcomer. Rebuild cost is negligible at desk scale
/// and keeps chain construction single-entry.
fn absorb(chain: &mut StabilizerChain, g: Permutation) {
    let mut gens = chain.strong_generators();
    gens.push(g);
    *chain = schreier_sims(&gens, chain.degree()).expect("generators share the chain degree");
}
