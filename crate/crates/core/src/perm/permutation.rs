use std::fmt;

use crate::{Error, Result};

/// A permutation of the points `0..m`, stored in one-line image form:
/// `images[x]` is the image of `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Identity on `0..m`.
    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (0..m).collect(),
        }
    }

    /// Builds a permutation from its image vector, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m {
                return Err(Error::PointOutOfRange {
                    point: x,
                    degree: m,
                });
            }
            if seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "point {x} appears twice in the image list"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Transposition swapping `a` and `b` inside `0..m`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        if a >= m || b >= m {
            return Err(Error::PointOutOfRange {
                point: a.max(b),
                degree: m,
            });
        }
        let mut images: Vec<usize> = (0..m).collect();
        images.swap(a, b);
        Ok(Permutation { images })
    }

    /// The m-cycle `0 -> 1 -> ... -> m-1 -> 0`.
    pub fn cycle(m: usize) -> Self {
        let images = (0..m).map(|x| (x + 1) % m).collect();
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Applies the permutation to a point.
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn checked_apply(&self, point: usize) -> Result<usize> {
        if point >= self.degree() {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree(),
            });
        }
        Ok(self.images[point])
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Composition `(self . other)(x) = self(other(x))`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        let images = other.images.iter().map(|&x| self.images[x]).collect();
        Ok(Permutation { images })
    }

    /// Writes `self(other(x))` into `out` without allocating.
    pub(crate) fn compose_into(&self, other: &Permutation, out: &mut Vec<usize>) {
        debug_assert_eq!(self.degree(), other.degree());
        out.clear();
        out.extend(other.images.iter().map(|&x| self.images[x]));
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    /// One-line text form, 1-based: the identity on 3 points is "1,2,3".
    pub fn to_one_line(&self) -> String {
        self.images
            .iter()
            .map(|&x| (x + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the 1-based one-line form produced by [`Self::to_one_line`].
    pub fn from_one_line(text: &str) -> Result<Permutation> {
        let mut images = Vec::new();
        for part in text.split(',') {
            let v: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidPermutation(format!("bad point `{part}`")))?;
            if v == 0 {
                return Err(Error::InvalidPermutation(
                    "one-line form is 1-based; point 0 is invalid".into(),
                ));
            }
            images.push(v - 1);
        }
        Permutation::from_images(images)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.to_one_line())
    }
}

/// Iterator over all of `S_m` in lexicographic one-line order.
///
/// This fixed enumeration order is what makes coset listings and exhaustive
/// searches deterministic across runs and platforms.
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Permutations {
    pub fn new(m: usize) -> Self {
        Permutations {
            next: Some((0..m).collect()),
        }
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        self.next = next_lex(&mut succ).then_some(succ);
        Some(Permutation { images: current })
    }
}

/// Advances `v` to its lexicographic successor; false when `v` was the last.
fn next_lex(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
