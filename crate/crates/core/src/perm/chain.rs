use std::collections::HashMap;

use num_bigint::BigUint;

use super::Permutation;
use crate::{Error, Result};

/// One level of a stabilizer chain: the basic orbit of `point` under the
/// pointwise stabilizer of the earlier base points, with a transversal
/// element `u` per orbit point satisfying `u(point) = orbit point`.
///
/// `generators` holds the strong generators first placed at this level; the
/// group acting at level `i` is generated by the generators of all levels
/// `>= i` (they all fix the earlier base points).
#[derive(Debug, Clone)]
pub struct Level {
    point: usize,
    generators: Vec<Permutation>,
    orbit: Vec<usize>,
    transversal: HashMap<usize, Permutation>,
}

impl Level {
    fn new(point: usize, m: usize) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(point, Permutation::identity(m));
        Level {
            point,
            generators: Vec::new(),
            orbit: vec![point],
            transversal,
        }
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Basic orbit in discovery order.
    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    pub fn transversal(&self, point: usize) -> Option<&Permutation> {
        self.transversal.get(&point)
    }
}

/// Base-and-strong-generating-set representation of a subgroup of `S_m`.
///
/// Internally the chain carries a level for every point of its base order
/// (trivial orbits included), which keeps prescribed-base construction and
/// canonical coset representatives simple. The public [`Self::base`] and
/// [`Self::levels`] views skip trivial levels, so the visible base consists
/// of the points, taken in base order, not already fixed by the current
/// stabilizer.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

/// Deterministic Schreier-Sims over the natural base order `0, 1, ..., m-1`.
///
/// The empty generator set yields the trivial group.
pub fn schreier_sims(generators: &[Permutation], m: usize) -> Result<StabilizerChain> {
    let base: Vec<usize> = (0..m).collect();
    schreier_sims_with_base(generators, m, &base)
}

/// Schreier-Sims with a prescribed base order (a permutation of `0..m`).
///
/// Chains for the same group built over different base orders agree on order
/// and membership; the base order matters only for transversal extraction.
pub fn schreier_sims_with_base(
    generators: &[Permutation],
    m: usize,
    base: &[usize],
) -> Result<StabilizerChain> {
    {
        let mut seen = vec![false; m];
        for &b in base {
            if b >= m || seen[b] {
                return Err(Error::InvalidPermutation(format!(
                    "base must be a permutation of 0..{m}"
                )));
            }
            seen[b] = true;
        }
        if base.len() != m {
            return Err(Error::InvalidPermutation(format!(
                "base must list all {m} points"
            )));
        }
    }
    let mut chain = StabilizerChain {
        degree: m,
        levels: base.iter().map(|&b| Level::new(b, m)).collect(),
    };
    for g in generators {
        if g.degree() != m {
            return Err(Error::DegreeMismatch {
                left: g.degree(),
                right: m,
            });
        }
        chain.insert_generator(g.clone());
    }
    Ok(chain)
}

impl StabilizerChain {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Visible base: points whose basic orbit is nontrivial, in base order.
    pub fn base(&self) -> Vec<usize> {
        self.levels
            .iter()
            .filter(|l| l.orbit.len() > 1)
            .map(|l| l.point)
            .collect()
    }

    /// Nontrivial levels, outermost first.
    pub fn levels(&self) -> Vec<&Level> {
        self.levels.iter().filter(|l| l.orbit.len() > 1).collect()
    }

    pub(crate) fn all_levels(&self) -> &[Level] {
        &self.levels
    }

    /// Exact group order: the product of the basic orbit lengths.
    pub fn group_order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for level in &self.levels {
            order *= BigUint::from(level.orbit.len() as u64);
        }
        order
    }

    /// Sifts `p` through the chain. Returns the residue after dividing out
    /// transversal elements level by level, and whether `p` is a member.
    /// The residue is the identity exactly when `p` is a member.
    pub fn sift(&self, p: &Permutation) -> Result<(Permutation, bool)> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: p.degree(),
                right: self.degree,
            });
        }
        Ok(self.sift_from(0, p.clone()))
    }

    /// Membership test without exposing the residue.
    pub fn contains(&self, p: &Permutation) -> bool {
        matches!(self.sift(p), Ok((_, true)))
    }

    fn sift_from(&self, level: usize, p: Permutation) -> (Permutation, bool) {
        let mut residue = p;
        for lvl in &self.levels[level..] {
            let img = residue.apply(lvl.point);
            match lvl.transversal.get(&img) {
                None => return (residue, false),
                Some(u) => {
                    residue = u
                        .inverse()
                        .compose(&residue)
                        .expect("degrees match inside a chain");
                }
            }
        }
        debug_assert!(residue.is_identity());
        (residue, true)
    }

    /// Allocation-light membership test on a raw image slice; hot-loop path.
    pub(crate) fn contains_images(
        &self,
        images: &[usize],
        buf: &mut Vec<usize>,
        tmp: &mut Vec<usize>,
    ) -> bool {
        if images.len() != self.degree {
            return false;
        }
        buf.clear();
        buf.extend_from_slice(images);
        for level in &self.levels {
            if level.orbit.len() == 1 {
                if buf[level.point] != level.point {
                    return false;
                }
                continue;
            }
            let img = buf[level.point];
            match level.transversal.get(&img) {
                None => return false,
                Some(u) => {
                    // residue := u^{-1} . residue, i.e. inv_u[buf[x]] pointwise.
                    tmp.clear();
                    tmp.resize(u.images().len(), 0);
                    for (x, &y) in u.images().iter().enumerate() {
                        tmp[y] = x;
                    }
                    for slot in buf.iter_mut() {
                        *slot = tmp[*slot];
                    }
                }
            }
        }
        true
    }

    /// Index of the first base point moved by `g`; `None` for the identity.
    fn first_moved_level(&self, g: &Permutation) -> Option<usize> {
        self.levels.iter().position(|l| g.apply(l.point) != l.point)
    }

    /// Inserts one group generator and restores the strong-generation
    /// invariant by bottom-up verification of every level.
    fn insert_generator(&mut self, g: Permutation) {
        let Some(level) = self.first_moved_level(&g) else {
            return; // identity
        };
        if self.contains(&g) {
            return;
        }
        self.levels[level].generators.push(g);
        // Verify levels deepest-first: a level passes when its orbit is
        // closed under the effective generators and every Schreier generator
        // sifts through the deeper chain. A failed residue is placed at its
        // own first-moved level and verification resumes there.
        let mut i = self.levels.len().saturating_sub(1);
        loop {
            match self.verify_level(i) {
                Some(residue) => {
                    let j = self
                        .first_moved_level(&residue)
                        .expect("verify_level never returns the identity");
                    debug_assert!(j > i);
                    self.levels[j].generators.push(residue);
                    i = j;
                }
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    /// Effective generators acting at level `i`: those stored at levels >= i.
    fn effective_generators(&self, i: usize) -> Vec<Permutation> {
        self.levels[i..]
            .iter()
            .flat_map(|l| l.generators.iter().cloned())
            .collect()
    }

    /// Recomputes the basic orbit at level `i`, then checks all Schreier
    /// generators against the deeper chain. Returns the first non-member
    /// residue, or `None` when the level is consistent.
    fn verify_level(&mut self, i: usize) -> Option<Permutation> {
        let m = self.degree;
        let gens = self.effective_generators(i);
        // Deterministic breadth-first orbit of the base point.
        {
            let point = self.levels[i].point;
            let level = &mut self.levels[i];
            level.orbit.clear();
            level.orbit.push(point);
            level.transversal.clear();
            level.transversal.insert(point, Permutation::identity(m));
            let mut head = 0;
            while head < level.orbit.len() {
                let pt = level.orbit[head];
                head += 1;
                let u = level.transversal[&pt].clone();
                for g in &gens {
                    let img = g.apply(pt);
                    if !level.transversal.contains_key(&img) {
                        let t = g.compose(&u).expect("degrees match inside a chain");
                        level.transversal.insert(img, t);
                        level.orbit.push(img);
                    }
                }
            }
        }
        let orbit = self.levels[i].orbit.clone();
        for beta in orbit {
            for s in &gens {
                let schreier = {
                    let lvl = &self.levels[i];
                    let u_beta = &lvl.transversal[&beta];
                    let u_img = &lvl.transversal[&s.apply(beta)];
                    u_img
                        .inverse()
                        .compose(s)
                        .and_then(|x| x.compose(u_beta))
                        .expect("degrees match inside a chain")
                };
                if schreier.is_identity() {
                    continue;
                }
                let (residue, member) = self.sift_from(i + 1, schreier);
                if !member {
                    return Some(residue);
                }
            }
        }
        None
    }
}
