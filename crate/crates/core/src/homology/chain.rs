use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::homology::coset::CosetSystem;
use crate::homology::group::Group;

/// Σ c·1⊗(1, g_1, …, g_n) in the coinvariants of the bar resolution, keyed
/// by (g_1, …, g_n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarChain<E: Ord> {
    degree: usize,
    terms: BTreeMap<Vec<E>, i64>,
}

impl<E: Ord + Clone> BarChain<E> {
    pub fn zero(degree: usize) -> Self {
        BarChain { degree, terms: BTreeMap::new() }
    }

    pub fn basis(tuple: Vec<E>) -> Self {
        let mut c = Self::zero(tuple.len());
        c.add_term(tuple, 1).expect("length matches");
        c
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Vec<E>, i64)>) -> Result<Self> {
        let mut c = Self::zero(degree);
        for (t, k) in terms {
            c.add_term(t, k)?;
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<E>, &i64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, tuple: &[E]) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, tuple: Vec<E>, coeff: i64) -> Result<()> {
        if tuple.len() != self.degree {
            return Err(Error::DimensionMismatch(format!("tuple of length {} in degree {}", tuple.len(), self.degree)));
        }
        if coeff == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(tuple.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&tuple);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (t, &k) in &other.terms {
            out.add_term(t.clone(), k)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.degree);
        if k != 0 {
            out.terms = self.terms.iter().map(|(t, &c)| (t.clone(), c * k)).collect();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1))
    }
}

/// The bar differential Σ_j (-1)^j (g_0, …, ĝ_j, …, g_n) on the basis
/// g_0 = 1; face 0 is renormalized to (1, g_1^{-1}g_2, …, g_1^{-1}g_n).
pub fn bar_differential<G: Group>(group: &G, c: &BarChain<G::Elem>) -> Result<BarChain<G::Elem>> {
    let n = c.degree;
    if n == 0 {
        return Err(Error::InvalidParams("the differential needs degree >= 1".into()));
    }
    let mut out = BarChain::zero(n - 1);
    for (t, &k) in &c.terms {
        let first = group.inv(&t[0]);
        out.add_term(t[1..].iter().map(|g| group.mul(&first, g)).collect(), k)?;
        for j in 1..=n {
            let mut face = t.clone();
            face.remove(j - 1);
            out.add_term(face, if j % 2 == 1 { -k } else { k })?;
        }
    }
    Ok(out)
}

/// T_n(1⊗(1, g_1, …, g_n)) = Σ_i 1⊗(1, h(i, g_1), …, h(i, g_n)).
pub fn transfer_t<G: Group>(cs: &CosetSystem<G>, c: &BarChain<G::Elem>) -> Result<BarChain<G::Elem>> {
    let mut out = BarChain::zero(c.degree);
    for (t, &k) in &c.terms {
        for i in 0..cs.index() {
            let tuple = t.iter().map(|g| Ok(cs.coset_data(i, g)?.0)).collect::<Result<Vec<_>>>()?;
            out.add_term(tuple, k)?;
        }
    }
    Ok(out)
}

/// (1⊗d)·T_n = T_{n-1}·(1⊗d) on the given chain.
pub fn check_chain_map<G: Group>(cs: &CosetSystem<G>, c: &BarChain<G::Elem>) -> Result<bool> {
    let lhs = bar_differential(cs.group(), &transfer_t(cs, c)?)?;
    let rhs = transfer_t(cs, &bar_differential(cs.group(), c)?)?;
    Ok(lhs == rhs)
}

/// The section s(h_0 x_{i_0}, …, h_n x_{i_n}) = (h_0, …, h_n) applied to
/// T̃(1⊗(1, g_1, …)) = Σ_i 1⊗_H (x_i, x_i g_1, …), written in the H-basis.
pub fn section_of_lift<G: Group>(cs: &CosetSystem<G>, c: &BarChain<G::Elem>) -> Result<BarChain<G::Elem>> {
    let group = cs.group();
    let mut out = BarChain::zero(c.degree);
    for (t, &k) in &c.terms {
        for x in cs.reps() {
            let mut homogeneous = vec![x.clone()];
            homogeneous.extend(t.iter().map(|g| group.mul(x, g)));
            let hs = homogeneous.iter().map(|y| Ok(cs.factor(y)?.0)).collect::<Result<Vec<_>>>()?;
            let first = group.inv(&hs[0]);
            out.add_term(hs[1..].iter().map(|h| group.mul(&first, h)).collect(), k)?;
        }
    }
    Ok(out)
}

/// T = s·T̃ on the given chain.
pub fn factorization_check<G: Group>(cs: &CosetSystem<G>, c: &BarChain<G::Elem>) -> Result<bool> {
    Ok(transfer_t(cs, c)? == section_of_lift(cs, c)?)
}

/// Column-style integer echelon solve of A·x = b; returns a solution when one
/// exists over ℤ.
pub fn solve_integer(a: &[Vec<i128>], b: &[i128]) -> Option<Vec<i128>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<i128>> = a.to_vec();
    let mut u: Vec<Vec<i128>> = (0..cols).map(|i| (0..cols).map(|j| i128::from(i == j)).collect()).collect();
    // column ops applied to both m and u (u tracks the unimodular transform)
    let col_op = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize, j: usize, t: [i128; 4]| {
        // (col_i, col_j) <- (t0 col_i + t1 col_j, t2 col_i + t3 col_j)
        for row in m.iter_mut().chain(u.iter_mut()) {
            let (x, y) = (row[i], row[j]);
            row[i] = t[0] * x + t[1] * y;
            row[j] = t[2] * x + t[3] * y;
        }
    };
    let mut pivots = Vec::new();
    let mut k = 0;
    for r in 0..rows {
        if k == cols {
            break;
        }
        for j in k + 1..cols {
            if m[r][j] == 0 {
                continue;
            }
            let (x, y) = (m[r][k], m[r][j]);
            let (g, s, t) = ext_gcd(x, y);
            col_op(&mut m, &mut u, k, j, [s, t, -y / g, x / g]);
        }
        if m[r][k] != 0 {
            pivots.push((r, k));
            k += 1;
        }
    }
    let mut resid = b.to_vec();
    let mut y = vec![0i128; cols];
    let mut next = 0;
    for r in 0..rows {
        if next < pivots.len() && pivots[next].0 == r {
            let c = pivots[next].1;
            if resid[r] % m[r][c] != 0 {
                return None;
            }
            y[c] = resid[r] / m[r][c];
            for (rr, slot) in resid.iter_mut().enumerate() {
                *slot -= m[rr][c] * y[c];
            }
            next += 1;
        } else if resid[r] != 0 {
            return None;
        }
    }
    Some((0..cols).map(|i| (0..cols).map(|j| u[i][j] * y[j]).sum()).collect())
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Finds x of degree n+1 over the listed elements with d(x) = z, searching
/// the full basis of (n+1)-tuples.
pub fn find_bounding_chain<G: Group>(group: &G, elements: &[G::Elem], z: &BarChain<G::Elem>) -> Result<Option<BarChain<G::Elem>>> {
    let n = z.degree + 1;
    let mut basis: Vec<Vec<G::Elem>> = vec![vec![]];
    for _ in 0..n {
        basis = basis
            .into_iter()
            .flat_map(|t| elements.iter().map(move |g| [t.clone(), vec![g.clone()]].concat()))
            .collect();
    }
    let images = basis.iter().map(|t| bar_differential(group, &BarChain::basis(t.clone()))).collect::<Result<Vec<_>>>()?;
    let mut row_keys: BTreeMap<Vec<G::Elem>, usize> = BTreeMap::new();
    for img in images.iter().chain(std::iter::once(z)) {
        for (t, _) in img.terms() {
            let len = row_keys.len();
            row_keys.entry(t.clone()).or_insert(len);
        }
    }
    let mut a = vec![vec![0i128; basis.len()]; row_keys.len()];
    for (col, img) in images.iter().enumerate() {
        for (t, &k) in img.terms() {
            a[row_keys[t]][col] = k as i128;
        }
    }
    let mut b = vec![0i128; row_keys.len()];
    for (t, &k) in z.terms() {
        b[row_keys[t]] = k as i128;
    }
    let Some(x) = solve_integer(&a, &b) else {
        return Ok(None);
    };
    let mut chain = BarChain::zero(n);
    for (t, &k) in basis.iter().zip(&x) {
        let k = i64::try_from(k).map_err(|_| Error::InvalidParams("bounding chain coefficient overflow".into()))?;
        chain.add_term(t.clone(), k)?;
    }
    Ok(Some(chain))
}
