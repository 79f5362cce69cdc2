use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::arith::params::RingParams;
use crate::error::{Error, Result};
use crate::matforms::matrix::{accumulate, mul_raw, raw_valuation, trace_product_raw, OMatrix};

/// Most variables a key can carry.
pub const MAX_VARS: usize = 8;
/// Largest exponent (and degree cap) a key can carry.
pub const MAX_EXPONENT: u32 = 255;

/// Monomial x^a dx_S. Exponents are packed one byte each with a_0 in the
/// top byte, so comparing the packed word compares `a` lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FormKey {
    exps: u64,
    dx: u16,
}

#[inline]
fn shift(i: usize) -> u32 {
    8 * (7 - i as u32)
}

impl FormKey {
    pub fn new(a: &[u32], dx: &[usize]) -> Result<Self> {
        if a.len() > MAX_VARS {
            return Err(Error::MalformedKey(format!("{} variables, at most {MAX_VARS}", a.len())));
        }
        let mut exps = 0u64;
        for (i, &x) in a.iter().enumerate() {
            if x > MAX_EXPONENT {
                return Err(Error::MalformedKey(format!("exponent {x} exceeds {MAX_EXPONENT}")));
            }
            exps |= (x as u64) << shift(i);
        }
        let mut mask = 0u16;
        for (k, &i) in dx.iter().enumerate() {
            if i >= a.len().max(1) || (k > 0 && dx[k - 1] >= i) {
                return Err(Error::MalformedKey(format!("differential indices {dx:?} not increasing within range")));
            }
            mask |= 1 << i;
        }
        Ok(FormKey { exps, dx: mask })
    }

    pub(crate) const CONST: FormKey = FormKey { exps: 0, dx: 0 };

    #[inline]
    pub fn exponent(&self, i: usize) -> u32 {
        ((self.exps >> shift(i)) & 0xff) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn dx_indices(&self) -> Vec<usize> {
        (0..16).filter(|&i| self.dx & (1 << i) != 0).collect()
    }

    #[inline]
    pub fn has_dx(&self, i: usize) -> bool {
        self.dx & (1 << i) != 0
    }

    /// Total x-degree |a|.
    #[inline]
    pub fn degree(&self) -> u32 {
        self.exps.to_le_bytes().iter().map(|&b| b as u32).sum()
    }

    /// Differential degree |S|.
    #[inline]
    pub fn form_degree(&self) -> u32 {
        self.dx.count_ones()
    }

    #[inline]
    fn with_exponent_delta(&self, i: usize, up: bool) -> FormKey {
        let unit = 1u64 << shift(i);
        FormKey { exps: if up { self.exps + unit } else { self.exps - unit }, dx: self.dx }
    }

    pub(crate) fn exps_word(&self) -> u64 {
        self.exps
    }
}

impl Ord for FormKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exps.cmp(&other.exps).then_with(|| {
            // lexicographic on the sorted index lists
            let (mut a, mut b) = (self.dx, other.dx);
            loop {
                match (a, b) {
                    (0, 0) => return Ordering::Equal,
                    (0, _) => return Ordering::Less,
                    (_, 0) => return Ordering::Greater,
                    _ => {
                        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
                        if ia != ib {
                            return ia.cmp(&ib);
                        }
                        a &= a - 1;
                        b &= b - 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for FormKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FormKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{:?} dx{:?}", self.exponents(MAX_VARS), self.dx_indices())
    }
}

/// Sign of dx_A ∧ dx_B against the sorted union: parity of pairs (i ∈ A, j ∈ B)
/// with i > j.
#[inline]
pub(crate) fn shuffle_sign(a: u16, b: u16) -> bool {
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    inversions % 2 == 1
}

/// A truncated power series in x_0..x_{n-1} with N×N matrix coefficients and
/// exterior-algebra differentials, living in the free algebra (no relation
/// Σ x_i = 1 is imposed).
#[derive(Clone, PartialEq, Eq)]
pub struct FormSeries {
    params: Arc<RingParams>,
    nvars: usize,
    dim: usize,
    cap: u32,
    terms: BTreeMap<FormKey, OMatrix>,
}

impl fmt::Debug for FormSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FormSeries(vars={}, N={}, cap={})", self.nvars, self.dim, self.cap)?;
        for (k, m) in &self.terms {
            writeln!(f, "  {:?} dx{:?}: {:?}", k.exponents(self.nvars), k.dx_indices(), m)?;
        }
        Ok(())
    }
}

impl FormSeries {
    pub fn zero(params: &Arc<RingParams>, nvars: usize, dim: usize, cap: u32) -> Result<Self> {
        if nvars == 0 || nvars > MAX_VARS {
            return Err(Error::InvalidParams(format!("{nvars} variables; supported range is 1..={MAX_VARS}")));
        }
        if cap > MAX_EXPONENT {
            return Err(Error::InvalidParams(format!("degree cap {cap} exceeds {MAX_EXPONENT}")));
        }
        Ok(FormSeries { params: params.clone(), nvars, dim, cap, terms: BTreeMap::new() })
    }

    pub fn constant(m: &OMatrix, nvars: usize, cap: u32) -> Result<Self> {
        let mut f = Self::zero(m.params(), nvars, m.dim(), cap)?;
        f.add_term(FormKey::CONST, m)?;
        Ok(f)
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic key order.
    pub fn terms(&self) -> impl Iterator<Item = (&FormKey, &OMatrix)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &FormKey) -> Option<&OMatrix> {
        self.terms.get(key)
    }

    /// Adds `m·key`; terms above the cap are dropped and zero sums removed.
    pub fn add_term(&mut self, key: FormKey, m: &OMatrix) -> Result<()> {
        if m.dim() != self.dim || m.params() != &self.params {
            return Err(Error::ParamMismatch);
        }
        if key.dx >> self.nvars != 0 || (self.nvars < MAX_VARS && key.exps << (8 * self.nvars) != 0) {
            return Err(Error::MalformedKey(format!("{key:?} outside {} variables", self.nvars)));
        }
        if key.degree() > self.cap {
            return Ok(());
        }
        let sum = match self.terms.get(&key) {
            Some(old) => old.add(m)?,
            None => m.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.dim != other.dim || self.cap != other.cap {
            return Err(Error::DimensionMismatch(format!(
                "series shapes (vars {}, N {}, cap {}) vs (vars {}, N {}, cap {})",
                self.nvars, self.dim, self.cap, other.nvars, other.dim, other.cap
            )));
        }
        if self.params != other.params {
            return Err(Error::ParamMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, m) in &other.terms {
            out.add_term(*k, m)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for m in out.terms.values_mut() {
            *m = m.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Same series under a different degree cap.
    pub fn with_cap(&self, cap: u32) -> Result<Self> {
        let mut out = Self::zero(&self.params, self.nvars, self.dim, cap)?;
        out.terms = self.terms.iter().filter(|(k, _)| k.degree() <= cap).map(|(k, m)| (*k, m.clone())).collect();
        Ok(out)
    }

    /// Left multiplication of every coefficient by a constant matrix.
    pub fn left_mul(&self, m: &OMatrix) -> Result<Self> {
        let mut out = Self::zero(&self.params, self.nvars, self.dim, self.cap)?;
        for (k, c) in &self.terms {
            out.add_term(*k, &m.mul(c)?)?;
        }
        Ok(out)
    }

    fn from_accumulator(&self, acc: FxHashMap<FormKey, Vec<u64>>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, v)| v.iter().any(|&c| c != 0))
            .map(|(k, v)| (k, OMatrix::from_raw(&self.params, self.dim, v)))
            .collect();
        FormSeries { params: self.params.clone(), nvars: self.nvars, dim: self.dim, cap: self.cap, terms }
    }

    /// Terms grouped by degree, each group with its least valuation.
    fn buckets(&self) -> Vec<(u32, Vec<(&FormKey, &OMatrix, u32)>)> {
        let prec = self.params.precision();
        let mut out: Vec<(u32, Vec<_>)> = vec![(prec, Vec::new()); self.cap as usize + 1];
        for (k, m) in &self.terms {
            let v = raw_valuation(&self.params, m.data());
            let slot = &mut out[k.degree() as usize];
            slot.0 = slot.0.min(v);
            slot.1.push((k, m, v));
        }
        out
    }

    /// Wedge product; coefficients multiply in order.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let cap = self.cap;
        let prec = self.params.precision();
        let by_degree = other.buckets();
        let len = self.dim * self.dim * self.params.degree();
        let zm = self.params.zmod(self.params.precision());
        let mut acc: FxHashMap<FormKey, Vec<u64>> = FxHashMap::default();
        let mut scratch = vec![0u64; len];
        for (kf, mf) in &self.terms {
            let df = kf.degree();
            let vf = raw_valuation(&self.params, mf.data());
            for (vmin, bucket) in &by_degree[..=(cap - df) as usize] {
                // products divisible by p^prec vanish
                if vf + vmin >= prec {
                    continue;
                }
                for &(kg, mg, vg) in bucket {
                    if kf.dx & kg.dx != 0 || vf + vg >= prec {
                        continue;
                    }
                    let key = FormKey { exps: kf.exps + kg.exps, dx: kf.dx | kg.dx };
                    mul_raw(&self.params, self.dim, mf.data(), mg.data(), &mut scratch);
                    let slot = acc.entry(key).or_insert_with(|| vec![0; len]);
                    accumulate(&zm, slot, &scratch, shuffle_sign(kf.dx, kg.dx));
                }
            }
        }
        Ok(self.from_accumulator(acc))
    }

    /// Traces of the coefficients of `self ∧ other`, without forming the
    /// matrix products.
    pub(crate) fn wedge_traces(&self, other: &Self) -> Result<FxHashMap<FormKey, Vec<u64>>> {
        self.check(other)?;
        let cap = self.cap;
        let prec = self.params.precision();
        let by_degree = other.buckets();
        let d = self.params.degree();
        let zm = self.params.zmod(self.params.precision());
        let mut acc: FxHashMap<FormKey, Vec<u64>> = FxHashMap::default();
        let mut scratch = vec![0u64; d];
        for (kf, mf) in &self.terms {
            let df = kf.degree();
            let vf = raw_valuation(&self.params, mf.data());
            for (vmin, bucket) in &by_degree[..=(cap - df) as usize] {
                // products divisible by p^prec vanish
                if vf + vmin >= prec {
                    continue;
                }
                for &(kg, mg, vg) in bucket {
                    if kf.dx & kg.dx != 0 || vf + vg >= prec {
                        continue;
                    }
                    let key = FormKey { exps: kf.exps + kg.exps, dx: kf.dx | kg.dx };
                    trace_product_raw(&self.params, self.dim, mf.data(), mg.data(), &mut scratch);
                    let slot = acc.entry(key).or_insert_with(|| vec![0; d]);
                    accumulate(&zm, slot, &scratch, shuffle_sign(kf.dx, kg.dx));
                }
            }
        }
        Ok(acc)
    }

    /// Exterior derivative: x^a dx_S ↦ Σ_j a_j x^(a - e_j) dx_j ∧ dx_S.
    pub fn d(&self) -> Self {
        let len = self.dim * self.dim * self.params.degree();
        let zm = self.params.zmod(self.params.precision());
        let mut acc: FxHashMap<FormKey, Vec<u64>> = FxHashMap::default();
        for (k, m) in &self.terms {
            for j in 0..self.nvars {
                let aj = k.exponent(j);
                if aj == 0 || k.has_dx(j) {
                    continue;
                }
                let below = (k.dx & ((1u16 << j) - 1)).count_ones();
                let key = FormKey { exps: k.with_exponent_delta(j, false).exps, dx: k.dx | (1 << j) };
                let scaled = m.scale_int(aj as i128);
                let slot = acc.entry(key).or_insert_with(|| vec![0; len]);
                accumulate(&zm, slot, scaled.data(), below % 2 == 1);
            }
        }
        self.from_accumulator(acc)
    }

    /// Multiplies by the 0-form x_i.
    pub fn mul_variable(&self, i: usize) -> Result<Self> {
        let mut out = Self::zero(&self.params, self.nvars, self.dim, self.cap)?;
        for (k, m) in &self.terms {
            if k.exponent(i) == MAX_EXPONENT {
                return Err(Error::MalformedKey("exponent overflow".into()));
            }
            out.add_term(k.with_exponent_delta(i, true), m)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(params: &Arc<RingParams>, k: i128) -> OMatrix {
        OMatrix::from_ints(params, &[vec![k]]).unwrap()
    }

    fn monomial(params: &Arc<RingParams>, nvars: usize, a: &[u32], dx: &[usize], c: i128) -> FormSeries {
        let mut f = FormSeries::zero(params, nvars, 1, 10).unwrap();
        f.add_term(FormKey::new(a, dx).unwrap(), &scalar(params, c)).unwrap();
        f
    }

    #[test]
    fn key_order_is_lexicographic() {
        let a = FormKey::new(&[0, 2, 0], &[0, 2]).unwrap();
        let b = FormKey::new(&[1, 0, 0], &[]).unwrap();
        assert!(a < b);
        let c = FormKey::new(&[0, 2, 0], &[1]).unwrap();
        assert!(a < c);
        assert!(FormKey::new(&[0, 0], &[1, 0]).is_err());
    }

    #[test]
    fn antisymmetry() {
        let params = RingParams::prime_field(7, 3).unwrap();
        let dx0 = monomial(&params, 2, &[0, 0], &[0], 3);
        let dx1 = monomial(&params, 2, &[0, 0], &[1], 5);
        let fwd = dx0.wedge(&dx1).unwrap();
        let back = dx1.wedge(&dx0).unwrap();
        assert_eq!(fwd.add(&back).unwrap().len(), 0);
        let key = FormKey::new(&[0, 0], &[0, 1]).unwrap();
        assert_eq!(back.coefficient(&key).unwrap(), &scalar(&params, -15));
        let f = dx0.add(&dx1).unwrap();
        assert!(f.wedge(&f).unwrap().is_empty());
    }

    #[test]
    fn derivative_examples() {
        let params = RingParams::prime_field(5, 4).unwrap();
        let c = monomial(&params, 4, &[0, 0, 0, 0], &[], 7);
        assert!(c.d().is_empty());
        let w = monomial(&params, 4, &[1, 0, 0, 0], &[1, 2, 3], 1);
        let dw = w.d();
        let key = FormKey::new(&[0, 0, 0, 0], &[0, 1, 2, 3]).unwrap();
        assert_eq!(dw.coefficient(&key).unwrap(), &scalar(&params, 1));
        let v = monomial(&params, 4, &[0, 0, 2, 0], &[0, 3], 1);
        // d(x_2^2 dx_0∧dx_3) = 2 x_2 dx_2∧dx_0∧dx_3 = -2 x_2 dx_0∧dx_2∧dx_3
        let key = FormKey::new(&[0, 0, 1, 0], &[0, 2, 3]).unwrap();
        assert_eq!(v.d().coefficient(&key).unwrap(), &scalar(&params, -2));
    }

    #[test]
    fn cap_drops_high_terms() {
        let params = RingParams::prime_field(3, 4).unwrap();
        let mut x = FormSeries::zero(&params, 2, 1, 3).unwrap();
        x.add_term(FormKey::new(&[2, 0], &[]).unwrap(), &scalar(&params, 1)).unwrap();
        assert!(x.wedge(&x).unwrap().is_empty());
    }
}
