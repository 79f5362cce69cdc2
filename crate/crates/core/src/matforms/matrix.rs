use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::arith::params::{RingParams, Zmod};
use crate::arith::ring::RingElem;
use crate::error::{Error, Result};

/// An N×N matrix over O_F / p^M. Entries are stored row-major, each as `d`
/// residues.
#[derive(Clone)]
pub struct OMatrix {
    params: Arc<RingParams>,
    n: usize,
    data: Vec<u64>,
}

impl PartialEq for OMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.data == other.data
            && (Arc::ptr_eq(&self.params, &other.params) || self.params == other.params)
    }
}

impl Eq for OMatrix {}

// Ordering and hashing look only at the entries; matrices compared this way
// are expected to share one ring.
impl Ord for OMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.data.cmp(&other.data))
    }
}

impl PartialOrd for OMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for OMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.data.hash(state);
    }
}

impl fmt::Debug for OMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.params.degree();
        let rows: Vec<Vec<&[u64]>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| &self.data[(i * self.n + j) * d..(i * self.n + j + 1) * d]).collect())
            .collect();
        write!(f, "OMatrix{rows:?}")
    }
}

/// Raw product `out = a·b` of flat N×N matrices over the ring.
pub(crate) fn mul_raw(params: &RingParams, n: usize, a: &[u64], b: &[u64], out: &mut [u64]) {
    let r = params.precision();
    let d = params.degree();
    if d == 1 {
        let m = params.pow_p(r) as u128;
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += a[i * n + k] as u128 * b[k * n + j] as u128;
                }
                out[i * n + j] = (acc % m) as u64;
            }
        }
        return;
    }
    let zm = params.zmod(r);
    let mut tmp = vec![0u64; d];
    for i in 0..n {
        for j in 0..n {
            let slot = (i * n + j) * d;
            out[slot..slot + d].iter_mut().for_each(|c| *c = 0);
            for k in 0..n {
                let x = &a[(i * n + k) * d..(i * n + k + 1) * d];
                let y = &b[(k * n + j) * d..(k * n + j + 1) * d];
                params.mul_into(r, x, y, &mut tmp);
                for t in 0..d {
                    out[slot + t] = zm.add(out[slot + t], tmp[t]);
                }
            }
        }
    }
}

/// `acc += sign·src` entrywise.
#[inline]
/// Smallest p-adic valuation among raw entries, capped at the precision.
pub(crate) fn raw_valuation(params: &RingParams, data: &[u64]) -> u32 {
    let p = params.p();
    let r = params.precision();
    data.iter()
        .map(|&c| {
            let (mut c, mut v) = (c, 0);
            while c != 0 && c % p == 0 && v < r {
                c /= p;
                v += 1;
            }
            if c == 0 {
                r
            } else {
                v
            }
        })
        .min()
        .unwrap_or(r)
}

/// trace(a·b) written into `out` (length d).
pub(crate) fn trace_product_raw(params: &RingParams, n: usize, a: &[u64], b: &[u64], out: &mut [u64]) {
    let r = params.precision();
    let d = params.degree();
    if d == 1 {
        let m = params.pow_p(r) as u128;
        let mut acc: u128 = 0;
        for i in 0..n {
            for k in 0..n {
                acc += a[i * n + k] as u128 * b[k * n + i] as u128;
            }
            acc %= m;
        }
        out[0] = acc as u64;
        return;
    }
    let zm = params.zmod(r);
    let mut tmp = vec![0u64; d];
    out.iter_mut().for_each(|c| *c = 0);
    for i in 0..n {
        for k in 0..n {
            params.mul_into(r, &a[(i * n + k) * d..(i * n + k + 1) * d], &b[(k * n + i) * d..(k * n + i + 1) * d], &mut tmp);
            for (o, &t) in out.iter_mut().zip(&tmp) {
                *o = zm.add(*o, t);
            }
        }
    }
}

pub(crate) fn accumulate(zm: &Zmod, acc: &mut [u64], src: &[u64], negate: bool) {
    if negate {
        for (a, &s) in acc.iter_mut().zip(src) {
            *a = zm.sub(*a, s);
        }
    } else {
        for (a, &s) in acc.iter_mut().zip(src) {
            *a = zm.add(*a, s);
        }
    }
}

impl OMatrix {
    pub fn zero(params: &Arc<RingParams>, n: usize) -> Self {
        OMatrix { params: params.clone(), n, data: vec![0; n * n * params.degree()] }
    }

    pub fn identity(params: &Arc<RingParams>, n: usize) -> Self {
        let mut m = Self::zero(params, n);
        let d = params.degree();
        let one = 1 % params.pow_p(params.precision());
        for i in 0..n {
            m.data[(i * n + i) * d] = one;
        }
        m
    }

    /// Builds from row-major integer entries, each given as its coefficient
    /// list in the generator.
    pub fn from_coeff_rows(params: &Arc<RingParams>, rows: &[Vec<Vec<i128>>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zero(params, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, entry) in row.iter().enumerate() {
                m.set(i, j, &RingElem::from_coeffs(params, entry)?)?;
            }
        }
        Ok(m)
    }

    /// Builds from row-major integer entries of the prime subring.
    pub fn from_ints(params: &Arc<RingParams>, rows: &[Vec<i128>]) -> Result<Self> {
        let rows: Vec<Vec<Vec<i128>>> = rows.iter().map(|r| r.iter().map(|&x| vec![x]).collect()).collect();
        Self::from_coeff_rows(params, &rows)
    }

    pub fn diagonal(entries: &[RingElem]) -> Result<Self> {
        let params = entries.first().ok_or_else(|| Error::DimensionMismatch("empty diagonal".into()))?.params();
        let mut m = Self::zero(params, entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e)?;
        }
        Ok(m)
    }

    pub(crate) fn from_raw(params: &Arc<RingParams>, n: usize, data: Vec<u64>) -> Self {
        debug_assert_eq!(data.len(), n * n * params.degree());
        OMatrix { params: params.clone(), n, data }
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub(crate) fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> RingElem {
        let d = self.params.degree();
        let at = (i * self.n + j) * d;
        RingElem::from_raw(&self.params, self.data[at..at + d].to_vec())
    }

    pub fn set(&mut self, i: usize, j: usize, value: &RingElem) -> Result<()> {
        if value.params() != &self.params {
            return Err(Error::ParamMismatch);
        }
        let d = self.params.degree();
        let at = (i * self.n + j) * d;
        self.data[at..at + d].copy_from_slice(value.coeffs());
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        if !(Arc::ptr_eq(&self.params, &other.params) || self.params == other.params) {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let zm = self.params.zmod(self.params.precision());
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| zm.add(a, b)).collect();
        Ok(Self::from_raw(&self.params, self.n, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let zm = self.params.zmod(self.params.precision());
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| zm.sub(a, b)).collect();
        Ok(Self::from_raw(&self.params, self.n, data))
    }

    pub fn neg(&self) -> Self {
        let zm = self.params.zmod(self.params.precision());
        Self::from_raw(&self.params, self.n, self.data.iter().map(|&c| zm.neg(c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = vec![0; self.data.len()];
        mul_raw(&self.params, self.n, &self.data, &other.data, &mut out);
        Ok(Self::from_raw(&self.params, self.n, out))
    }

    pub fn scale(&self, c: &RingElem) -> Result<Self> {
        if c.params() != &self.params {
            return Err(Error::ParamMismatch);
        }
        let d = self.params.degree();
        let r = self.params.precision();
        let mut data = vec![0; self.data.len()];
        for (src, dst) in self.data.chunks(d).zip(data.chunks_mut(d)) {
            self.params.mul_into(r, c.coeffs(), src, dst);
        }
        Ok(Self::from_raw(&self.params, self.n, data))
    }

    pub fn scale_int(&self, k: i128) -> Self {
        self.scale(&RingElem::from_int(&self.params, k)).expect("same ring")
    }

    pub fn trace(&self) -> RingElem {
        let d = self.params.degree();
        let zm = self.params.zmod(self.params.precision());
        let mut acc = vec![0u64; d];
        for i in 0..self.n {
            let at = (i * self.n + i) * d;
            for t in 0..d {
                acc[t] = zm.add(acc[t], self.data[at + t]);
            }
        }
        RingElem::from_raw(&self.params, acc)
    }

    /// True when every entry of `self - 1` is divisible by p^e.
    pub fn is_one_mod(&self, e: u32) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    x.is_one_mod(e)
                } else {
                    x.valuation() >= e.min(self.params.precision())
                }
            })
        })
    }

    /// Inverse via Gauss-Jordan elimination with unit pivots; fails unless the
    /// determinant is a unit.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a: Vec<Vec<RingElem>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect();
        let mut inv: Vec<Vec<RingElem>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { RingElem::one(&self.params) } else { RingElem::zero(&self.params) })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r][col].is_unit()).ok_or(Error::NotUnit)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv)?;
                inv[col][j] = inv[col][j].mul(&pinv)?;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&factor.mul(&a[col][j])?)?;
                    inv[r][j] = inv[r][j].sub(&factor.mul(&inv[col][j])?)?;
                }
            }
        }
        let mut out = Self::zero(&self.params, n);
        for (i, row) in inv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out.set(i, j, x)?;
            }
        }
        Ok(out)
    }

    /// Same entries in another precision of the same field.
    pub fn to_params(&self, params: &Arc<RingParams>) -> Result<Self> {
        if !self.params.same_field(params) {
            return Err(Error::ParamMismatch);
        }
        let m = params.pow_p(params.precision());
        Ok(Self::from_raw(params, self.n, self.data.iter().map(|&c| c % m).collect()))
    }

    /// Frobenius applied entrywise.
    pub fn frobenius(&self) -> Result<Self> {
        let mut out = Self::zero(&self.params, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, &self.get(i, j).frobenius()?)?;
            }
        }
        Ok(out)
    }

    /// Block embedding diag(self, 1, …, 1) into (N+k)×(N+k).
    pub fn embed(&self, size: usize) -> Result<Self> {
        if size < self.n {
            return Err(Error::DimensionMismatch(format!("cannot embed {} into {size}", self.n)));
        }
        let mut out = Self::identity(&self.params, size);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, &self.get(i, j))?;
            }
        }
        Ok(out)
    }

    /// Entries as coefficient lists, row-major.
    pub fn to_coeff_rows(&self) -> Vec<Vec<Vec<u64>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).coeffs().to_vec()).collect()).collect()
    }
}

/// Inverse of 1 + p^e X by the geometric series Σ (-p^e X)^i, stopping once
/// p^(e·i) vanishes mod p^M.
pub fn mat_inverse_one_plus(x: &OMatrix, e: u32) -> Result<OMatrix> {
    if e == 0 {
        return Err(Error::Divergent { p: x.params().p(), e });
    }
    let params = x.params();
    let m = params.precision();
    let scale = if e >= m { 0 } else { params.pow_p(e) };
    let step = x.scale_int(-(scale as i128));
    let mut term = OMatrix::identity(params, x.dim());
    let mut sum = term.clone();
    let mut level = 0;
    while level + e < m {
        level += e;
        term = term.mul(&step)?;
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_of_identity() {
        let params = RingParams::prime_field(7, 3).unwrap();
        assert_eq!(OMatrix::identity(&params, 2).trace(), RingElem::from_int(&params, 2));
    }

    #[test]
    fn inverse_one_plus_scalar() {
        let params = RingParams::prime_field(5, 3).unwrap();
        let x = OMatrix::from_ints(&params, &[vec![1]]).unwrap();
        let inv = mat_inverse_one_plus(&x, 1).unwrap();
        assert_eq!(inv.get(0, 0).coeffs(), &[21]);
        let zero = OMatrix::zero(&params, 3);
        assert_eq!(mat_inverse_one_plus(&zero, 2).unwrap(), OMatrix::identity(&params, 3));
    }

    #[test]
    fn general_inverse() {
        let params = RingParams::prime_field(3, 5).unwrap();
        let a = OMatrix::from_ints(&params, &[vec![0, 1], vec![2, 5]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), OMatrix::identity(&params, 2));
        let singular = OMatrix::from_ints(&params, &[vec![3, 1], vec![6, 2]]).unwrap();
        assert_eq!(singular.inverse(), Err(Error::NotUnit));
    }

    #[test]
    fn dimension_mismatch() {
        let params = RingParams::prime_field(3, 5).unwrap();
        let a = OMatrix::identity(&params, 2);
        let b = OMatrix::identity(&params, 3);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }
}
