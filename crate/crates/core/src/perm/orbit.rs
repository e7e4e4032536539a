use std::collections::HashSet;
use std::hash::Hash;

use super::{Permutation, Permutations};
use crate::{Error, Result};

/// Degree cap for exhaustive orbit enumeration (`m!` group elements).
pub const ORBIT_DEGREE_CAP: usize = 8;

/// Full orbit of `seed` under the action of all of `S_m`, enumerated
/// exhaustively and deduplicated. Test-support machinery; refuses degrees
/// above [`ORBIT_DEGREE_CAP`].
pub fn orbit_of<T, A>(action: A, seed: &T, m: usize) -> Result<HashSet<T>>
where
    T: Clone + Eq + Hash,
    A: Fn(&Permutation, &T) -> T,
{
    if m > ORBIT_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded {
            degree: m,
            cap: ORBIT_DEGREE_CAP,
        });
    }
    let mut orbit = HashSet::new();
    for p in Permutations::new(m) {
        orbit.insert(action(&p, seed));
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Edge-set relabeling action on a bitmask graph over 4 vertices,
    /// pairs in lexicographic order.
    fn act_graph4(p: &Permutation, bits: &u16) -> u16 {
        let pair = |a: usize, b: usize| -> usize {
            let (i, j) = (a.min(b), a.max(b));
            i * 4 - i * (i + 1) / 2 + j - i - 1
        };
        let mut out = 0u16;
        for a in 0..4 {
            for b in a + 1..4 {
                if bits >> pair(a, b) & 1 == 1 {
                    out |= 1 << pair(p.apply(a), p.apply(b));
                }
            }
        }
        out
    }

    #[test]
    fn complete_graph_is_a_fixed_point() {
        let k4: u16 = 0b111111;
        let orbit = orbit_of(act_graph4, &k4, 4).unwrap();
        assert_eq!(orbit.len(), 1);
        assert!(orbit.contains(&k4));
    }

    #[test]
    fn path_on_three_vertices_has_orbit_three() {
        // P_3 inside S_3: edges {0,1} and {1,2}; |orbit| = 6 / |Aut| = 3.
        let act = |p: &Permutation, bits: &u8| -> u8 {
            let pair = |a: usize, b: usize| -> usize {
                let (i, j) = (a.min(b), a.max(b));
                i * 3 - i * (i + 1) / 2 + j - i - 1
            };
            let mut out = 0u8;
            for a in 0..3 {
                for b in a + 1..3 {
                    if bits >> pair(a, b) & 1 == 1 {
                        out |= 1 << pair(p.apply(a), p.apply(b));
                    }
                }
            }
            out
        };
        let p3: u8 = 0b101; // pairs (0,1) and (1,2)
        let orbit = orbit_of(act, &p3, 3).unwrap();
        assert_eq!(orbit.len(), 3);
    }

    #[test]
    fn orbit_times_stabilizer_is_group_order_for_all_graphs_on_4() {
        use crate::perm::{aut_group, AutStrategy, FnOracle};
        for bits in 0u16..64 {
            let orbit = orbit_of(act_graph4, &bits, 4).unwrap();
            let oracle = FnOracle(move |p: &Permutation| act_graph4(p, &bits) == bits);
            let aut = aut_group(&oracle, 4, AutStrategy::Backtracking).unwrap();
            let aut_order: u64 = aut.group_order().try_into().unwrap();
            assert_eq!(orbit.len() as u64 * aut_order, 24);
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let res = orbit_of(|_, x: &u8| *x, &0u8, 9);
        assert!(res.is_err());
    }
}
