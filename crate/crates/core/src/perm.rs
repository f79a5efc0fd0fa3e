//! Permutations of the first-level vertices `{1..d}`.
//!
//! Internally images are stored 0-based. Composition follows the convention used
//! throughout the crate: `p.then(q)` applies `p` first, so the root permutation of a
//! product `gh` is `perm(g).then(perm(h))`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree).collect())
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::BadPermutation(format!("{images:?} is not a bijection of 0..{d}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation from 1-based images, as used in group spec files.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::BadPermutation(format!("{images:?}: images are 1-based")));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    /// Parses cycle notation such as `(1 3 2)`, `(1,2)(3 4)` or `()`.
    pub fn from_cycles(degree: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let bad = |why: &str| Error::BadPermutation(format!("`{text}`: {why}"));
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body_end = rest.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            if !rest.starts_with('(') {
                return Err(bad("expected `(`"));
            }
            let body = &rest[1..body_end];
            let points = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("non-numeric point")))
                .collect::<Result<Vec<_>>>()?;
            for (k, &pt) in points.iter().enumerate() {
                if pt == 0 || pt > degree {
                    return Err(bad("point out of range"));
                }
                let next = points[(k + 1) % points.len()];
                images[pt - 1] = next - 1;
            }
            rest = rest[body_end + 1..].trim_start();
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, u: usize) -> usize {
        self.0[u]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Sign as +1 / -1.
    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.0.len()];
        let mut sign = 1i8;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push((i + 1).to_string());
                i = self.0[i];
            }
            write!(f, "({})", cycle.join(" "))?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}
