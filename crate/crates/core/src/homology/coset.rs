use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::arith::params::RingParams;
use crate::arith::ring::RingElem;
use crate::error::{Error, Result};
use crate::homology::group::{closure, Group, MatrixGroup, Perm, PermGroup};
use crate::matforms::OMatrix;

type Membership<E> = Arc<dyn Fn(&E) -> bool + Send + Sync>;
type Locator<E> = Arc<dyn Fn(&E) -> Option<usize> + Send + Sync>;

/// Right coset representatives x_0, …, x_{m-1} of H in G together with a
/// membership test for H. Indices are 0-based; x_0 is the identity.
#[derive(Clone)]
pub struct CosetSystem<G: Group> {
    group: G,
    reps: Vec<G::Elem>,
    rep_invs: Vec<G::Elem>,
    member: Membership<G::Elem>,
    locate: Option<Locator<G::Elem>>,
}

impl<G: Group> std::fmt::Debug for CosetSystem<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CosetSystem(index {})", self.reps.len())
    }
}

impl<G: Group> CosetSystem<G> {
    /// Representatives are trusted apart from pairwise distinctness of their
    /// cosets.
    pub fn new(group: G, reps: Vec<G::Elem>, member: impl Fn(&G::Elem) -> bool + Send + Sync + 'static) -> Result<Self> {
        if reps.is_empty() {
            return Err(Error::InvalidReps("no representatives".into()));
        }
        let rep_invs = reps.iter().map(|x| group.inv(x)).collect();
        let cs = CosetSystem { group, reps, rep_invs, member: Arc::new(member), locate: None };
        for i in 0..cs.reps.len() {
            for j in 0..i {
                if cs.is_member(&cs.group.mul(&cs.reps[i], &cs.rep_invs[j])) {
                    return Err(Error::InvalidReps(format!("representatives {j} and {i} share a coset")));
                }
            }
        }
        Ok(cs)
    }

    fn with_locator(mut self, locate: impl Fn(&G::Elem) -> Option<usize> + Send + Sync + 'static) -> Self {
        self.locate = Some(Arc::new(locate));
        self
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn reps(&self) -> &[G::Elem] {
        &self.reps
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn is_member(&self, g: &G::Elem) -> bool {
        (self.member)(g)
    }

    /// The (h, j) with y = h·x_j and h ∈ H.
    pub fn factor(&self, y: &G::Elem) -> Result<(G::Elem, usize)> {
        let j = match &self.locate {
            Some(locate) => locate(y),
            None => (0..self.reps.len()).find(|&j| self.is_member(&self.group.mul(y, &self.rep_invs[j]))),
        }
        .ok_or_else(|| Error::InvalidReps(format!("no representative for the coset of {y:?}")))?;
        let h = self.group.mul(y, &self.rep_invs[j]);
        if !self.is_member(&h) {
            return Err(Error::InvalidReps(format!("coset of {y:?} located at {j} incorrectly")));
        }
        Ok((h, j))
    }

    /// The (h(i, g), π(g)(i)) with x_i·g = h·x_{π(g)(i)}.
    pub fn coset_data(&self, i: usize, g: &G::Elem) -> Result<(G::Elem, usize)> {
        let x = self.reps.get(i).ok_or_else(|| Error::InvalidReps(format!("index {i} out of range")))?;
        self.factor(&self.group.mul(x, g))
    }

    /// The permutation π(g) of coset indices.
    pub fn coset_permutation(&self, g: &G::Elem) -> Result<Vec<usize>> {
        (0..self.reps.len()).map(|i| Ok(self.coset_data(i, g)?.1)).collect()
    }

    /// Checks that the representatives cover every element of an
    /// enumerated G.
    pub fn validate_cover(&self, elements: &[G::Elem]) -> Result<()> {
        for y in elements {
            self.factor(y)?;
        }
        Ok(())
    }
}

impl CosetSystem<PermGroup> {
    /// Cosets of the subgroup generated by `h_gens` in the group generated by
    /// `g_gens`, with representatives chosen greedily in sorted order.
    pub fn from_permutations(degree: usize, g_gens: &[Perm], h_gens: &[Perm]) -> Result<Self> {
        let group = PermGroup::new(degree)?;
        let g = closure(&group, g_gens);
        let h: BTreeSet<Perm> = closure(&group, h_gens).into_iter().collect();
        let gset: BTreeSet<&Perm> = g.iter().collect();
        if !h.iter().all(|x| gset.contains(x)) {
            return Err(Error::InvalidReps("subgroup generators leave the group".into()));
        }
        let mut table: HashMap<Perm, usize> = HashMap::new();
        let mut reps = Vec::new();
        for y in &g {
            if table.contains_key(y) {
                continue;
            }
            let j = reps.len();
            for x in &h {
                table.insert(group.mul(x, y), j);
            }
            reps.push(y.clone());
        }
        let hs = h.clone();
        let cs = CosetSystem::new(group, reps, move |x| hs.contains(x))?;
        Ok(cs.with_locator(move |y| table.get(y).copied()))
    }

    /// As [`Self::from_permutations`] but with caller-chosen representatives,
    /// validated against the enumerated group.
    pub fn with_reps(degree: usize, g_gens: &[Perm], h_gens: &[Perm], reps: Vec<Perm>) -> Result<Self> {
        let group = PermGroup::new(degree)?;
        let g = closure(&group, g_gens);
        let h: BTreeSet<Perm> = closure(&group, h_gens).into_iter().collect();
        let expected = g.len() / h.len();
        if reps.len() != expected {
            return Err(Error::InvalidReps(format!("{} representatives for index {expected}", reps.len())));
        }
        let cs = CosetSystem::new(group, reps, move |x| h.contains(x))?;
        cs.validate_cover(&g)?;
        Ok(cs)
    }
}

/// All residues of O_F / p^e as coefficient vectors with entries in [0, p^e).
fn residues(params: &RingParams, e: u32) -> Vec<Vec<i128>> {
    let q = params.p().pow(e) as i128;
    let d = params.degree();
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v: Vec<i128>| (0..q).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Order of GL_N(O_F / p^e) without enumeration.
fn congruence_index(params: &RingParams, n: usize, e: u32) -> u128 {
    let q = (params.p() as u128).pow(params.degree() as u32);
    let gl: u128 = (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product();
    gl * q.pow((n * n) as u32 * (e - 1))
}

/// Largest index enumerated for a congruence coset system.
pub const MAX_INDEX: u128 = 1_000_000;

impl CosetSystem<MatrixGroup> {
    /// Cosets of G_{N,e} = ker(GL_N(O/p^M) → GL_N(O/p^e)): representatives
    /// are the invertible matrices with entries in [0, p^e), identity first.
    pub fn congruence(params: &Arc<RingParams>, n: usize, e: u32) -> Result<Self> {
        if e == 0 || e > params.precision() {
            return Err(Error::InvalidParams(format!("congruence level {e} outside 1..={}", params.precision())));
        }
        let index = congruence_index(params, n, e);
        if index > MAX_INDEX {
            return Err(Error::IndexTooLarge(format!("index {index} exceeds {MAX_INDEX}")));
        }
        let res = residues(params, e);
        let entries: Vec<RingElem> = res.iter().map(|c| RingElem::from_coeffs(params, c).expect("degree matches")).collect();
        let group = MatrixGroup::new(params, n);
        let id = group.identity();
        let mut reps = vec![id.clone()];
        let mut counter = vec![0usize; n * n];
        'outer: loop {
            let mut m = OMatrix::zero(params, n);
            for (k, &c) in counter.iter().enumerate() {
                m.set(k / n, k % n, &entries[c]).expect("same ring");
            }
            if m != id && m.inverse().is_ok() {
                reps.push(m);
            }
            for slot in counter.iter_mut() {
                *slot += 1;
                if *slot < entries.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        let q = params.pow_p(e);
        let table: HashMap<Vec<u64>, usize> = reps.iter().enumerate().map(|(j, x)| (reduce(x, q), j)).collect();
        let member = move |g: &OMatrix| g.is_one_mod(e);
        let cs = CosetSystem {
            rep_invs: reps.iter().map(|x| group.inv(x)).collect(),
            group,
            reps,
            member: Arc::new(member),
            locate: None,
        };
        Ok(cs.with_locator(move |y| table.get(&reduce(y, q)).copied()))
    }
}

fn reduce(m: &OMatrix, q: u64) -> Vec<u64> {
    m.to_coeff_rows().into_iter().flatten().flatten().map(|c| c % q).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_a3() -> (PermGroup, CosetSystem<PermGroup>) {
        let s3 = PermGroup::new(3).unwrap();
        let g = vec![s3.from_cycles(&[&[0, 1, 2]]).unwrap(), s3.from_cycles(&[&[0, 1]]).unwrap()];
        let h = vec![s3.from_cycles(&[&[0, 1, 2]]).unwrap()];
        let reps = vec![s3.identity(), s3.from_cycles(&[&[0, 1]]).unwrap()];
        (s3.clone(), CosetSystem::with_reps(3, &g, &h, reps).unwrap())
    }

    #[test]
    fn s3_coset_data() {
        let (s3, cs) = s3_a3();
        let t = s3.from_cycles(&[&[0, 1]]).unwrap();
        assert_eq!(cs.coset_data(0, &t).unwrap(), (s3.identity(), 1));
        assert_eq!(cs.coset_data(1, &s3.identity()).unwrap(), (s3.identity(), 1));
    }

    #[test]
    fn invalid_reps_rejected() {
        let s3 = PermGroup::new(3).unwrap();
        let g = vec![s3.from_cycles(&[&[0, 1, 2]]).unwrap(), s3.from_cycles(&[&[0, 1]]).unwrap()];
        let h = vec![s3.from_cycles(&[&[0, 1, 2]]).unwrap()];
        let bad = vec![s3.identity(), s3.from_cycles(&[&[0, 1, 2]]).unwrap()];
        assert!(matches!(CosetSystem::with_reps(3, &g, &h, bad), Err(Error::InvalidReps(_))));
    }

    #[test]
    fn congruence_counts() {
        let p3 = RingParams::prime_field(3, 4).unwrap();
        assert_eq!(CosetSystem::congruence(&p3, 2, 1).unwrap().index(), 48);
        assert_eq!(CosetSystem::congruence(&p3, 2, 2).unwrap().index(), 3888);
        let p2 = RingParams::prime_field(2, 4).unwrap();
        assert_eq!(CosetSystem::congruence(&p2, 2, 1).unwrap().index(), 6);
        let big = RingParams::prime_field(13, 4).unwrap();
        assert!(matches!(CosetSystem::congruence(&big, 3, 1), Err(Error::IndexTooLarge(_))));
    }
}
