use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use crate::arith::params::RingParams;
use crate::error::{Error, Result};
use crate::matforms::OMatrix;

/// A group given by its multiplication and inversion.
pub trait Group {
    type Elem: Clone + Eq + Ord + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }
}

/// Permutations of {0, …, n-1} as one-line images. Products act on the
/// right: (στ)(k) = τ(σ(k)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
}

pub type Perm = Vec<u8>;

impl PermGroup {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > 255 {
            return Err(Error::InvalidParams(format!("permutation degree {degree} outside 1..=255")));
        }
        Ok(PermGroup { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Checks a one-line image.
    pub fn perm(&self, images: &[usize]) -> Result<Perm> {
        let mut seen = vec![false; self.degree];
        if images.len() != self.degree {
            return Err(Error::InvalidParams(format!("{images:?} is not a permutation of degree {}", self.degree)));
        }
        for &i in images {
            if i >= self.degree || seen[i] {
                return Err(Error::InvalidParams(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(images.iter().map(|&i| i as u8).collect())
    }

    /// Permutation from disjoint cycles of 0-based points.
    pub fn from_cycles(&self, cycles: &[&[usize]]) -> Result<Perm> {
        let mut img: Vec<usize> = (0..self.degree).collect();
        for c in cycles {
            for (k, &a) in c.iter().enumerate() {
                img[a] = c[(k + 1) % c.len()];
            }
        }
        self.perm(&img)
    }

    pub fn sign(&self, a: &Perm) -> i64 {
        let mut seen = vec![false; self.degree];
        let mut sign = 1;
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = a[k] as usize;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

impl Group for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        (0..self.degree as u8).collect()
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.iter().map(|&k| b[k as usize]).collect()
    }

    fn inv(&self, a: &Perm) -> Perm {
        let mut out = vec![0u8; a.len()];
        for (k, &v) in a.iter().enumerate() {
            out[v as usize] = k as u8;
        }
        out
    }
}

/// GL_N(O_F / p^M).
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    params: Arc<RingParams>,
    n: usize,
}

impl MatrixGroup {
    pub fn new(params: &Arc<RingParams>, n: usize) -> Self {
        MatrixGroup { params: params.clone(), n }
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl Group for MatrixGroup {
    type Elem = OMatrix;

    fn identity(&self) -> OMatrix {
        OMatrix::identity(&self.params, self.n)
    }

    fn mul(&self, a: &OMatrix, b: &OMatrix) -> OMatrix {
        a.mul(b).expect("group elements share one ring")
    }

    fn inv(&self, a: &OMatrix) -> OMatrix {
        a.inverse().expect("group elements are invertible")
    }
}

/// All elements generated by `gens`, sorted.
pub fn closure<G: Group>(group: &G, gens: &[G::Elem]) -> Vec<G::Elem> {
    let mut seen: BTreeSet<G::Elem> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let id = group.identity();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = group.mul(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_action_composition() {
        let s3 = PermGroup::new(3).unwrap();
        let a = s3.from_cycles(&[&[0, 1]]).unwrap();
        let b = s3.from_cycles(&[&[1, 2]]).unwrap();
        // apply a then b: 0 -> 1 -> 2
        assert_eq!(s3.mul(&a, &b)[0], 2);
        assert_eq!(s3.mul(&a, &s3.inv(&a)), s3.identity());
        assert_eq!(s3.sign(&s3.mul(&a, &b)), 1);
    }

    #[test]
    fn closure_sizes() {
        let s4 = PermGroup::new(4).unwrap();
        let gens = vec![s4.from_cycles(&[&[0, 1, 2, 3]]).unwrap(), s4.from_cycles(&[&[0, 1]]).unwrap()];
        assert_eq!(closure(&s4, &gens).len(), 24);
        let d4 = vec![s4.from_cycles(&[&[0, 1, 2, 3]]).unwrap(), s4.from_cycles(&[&[0, 2]]).unwrap()];
        assert_eq!(closure(&s4, &d4).len(), 8);
    }
}
