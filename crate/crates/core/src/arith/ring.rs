use std::fmt;
use std::sync::Arc;

use crate::arith::params::RingParams;
use crate::error::{Error, Result};

/// An element of O_F / p^M, stored as `d` residues mod p^M.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElem {
    params: Arc<RingParams>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({:?} mod {}^{})", self.coeffs, self.params.p(), self.params.precision())
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("\"{c}\"")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl RingElem {
    pub fn zero(params: &Arc<RingParams>) -> Self {
        RingElem { params: params.clone(), coeffs: vec![0; params.degree()] }
    }

    pub fn one(params: &Arc<RingParams>) -> Self {
        RingElem { params: params.clone(), coeffs: params.one_vec(params.precision()) }
    }

    pub fn from_int(params: &Arc<RingParams>, value: i128) -> Self {
        let mut e = Self::zero(params);
        e.coeffs[0] = params.zmod(params.precision()).from_i128(value);
        e
    }

    /// Coefficients are reduced mod p^M; missing high coefficients are zero.
    pub fn from_coeffs(params: &Arc<RingParams>, coeffs: &[i128]) -> Result<Self> {
        if coeffs.len() > params.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for an extension of degree {}",
                coeffs.len(),
                params.degree()
            )));
        }
        let zm = params.zmod(params.precision());
        let mut e = Self::zero(params);
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = zm.from_i128(c);
        }
        Ok(e)
    }

    pub(crate) fn from_raw(params: &Arc<RingParams>, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), params.degree());
        RingElem { params: params.clone(), coeffs }
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        !self.params.divisible_by_p(&self.coeffs)
    }

    /// p-adic valuation of the stored representative, capped at M.
    pub fn valuation(&self) -> u32 {
        let p = self.params.p();
        self.coeffs
            .iter()
            .map(|&c| {
                if c == 0 {
                    self.params.precision()
                } else {
                    let mut v = 0;
                    let mut c = c;
                    while c % p == 0 {
                        c /= p;
                        v += 1;
                    }
                    v
                }
            })
            .min()
            .unwrap_or(self.params.precision())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.params, &other.params) || self.params == other.params {
            Ok(())
        } else {
            Err(Error::ParamMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let zm = self.params.zmod(self.params.precision());
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| zm.add(a, b)).collect();
        Ok(Self::from_raw(&self.params, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let zm = self.params.zmod(self.params.precision());
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| zm.sub(a, b)).collect();
        Ok(Self::from_raw(&self.params, coeffs))
    }

    pub fn neg(&self) -> Self {
        let zm = self.params.zmod(self.params.precision());
        Self::from_raw(&self.params, self.coeffs.iter().map(|&c| zm.neg(c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_raw(
            &self.params,
            self.params.mul_vec(self.params.precision(), &self.coeffs, &other.coeffs),
        ))
    }

    pub fn scale(&self, k: i128) -> Self {
        let zm = self.params.zmod(self.params.precision());
        let k = zm.from_i128(k);
        Self::from_raw(&self.params, self.coeffs.iter().map(|&c| zm.mul(c, k)).collect())
    }

    pub fn pow(&self, k: u128) -> Self {
        Self::from_raw(&self.params, self.params.pow_vec(self.params.precision(), &self.coeffs, k))
    }

    /// Inverse of a unit.
    pub fn inv(&self) -> Result<Self> {
        let inv = self.params.inv_vec(self.params.precision(), &self.coeffs).ok_or(Error::NotUnit)?;
        Ok(Self::from_raw(&self.params, inv))
    }

    /// True when `self ≡ 1 mod p^e`.
    pub fn is_one_mod(&self, e: u32) -> bool {
        let e = e.min(self.params.precision());
        let m = self.params.pow_p(e);
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c % m == if i == 0 { 1 % m } else { 0 })
    }

    /// Reinterprets the stored residues at another precision of the same field.
    /// Lowering precision reduces; raising treats the residues as exact integers.
    pub fn to_params(&self, params: &Arc<RingParams>) -> Result<Self> {
        if !self.params.same_field(params) {
            return Err(Error::ParamMismatch);
        }
        let m = params.pow_p(params.precision());
        Ok(Self::from_raw(params, self.coeffs.iter().map(|&c| c % m).collect()))
    }

    /// The Frobenius automorphism: the unique lift of y ↦ y^p.
    pub fn frobenius(&self) -> Result<Self> {
        let root = self.params.frobenius_root().ok_or(Error::TrivialFrobenius)?;
        let r = self.params.precision();
        let coeffs: Vec<u64> = self.coeffs.clone();
        Ok(Self::from_raw(&self.params, self.params.eval_poly(r, &coeffs, root)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_mod_125() {
        let params = RingParams::prime_field(5, 3).unwrap();
        let two = RingElem::from_int(&params, 2);
        assert_eq!(two.inv().unwrap().coeffs(), &[63]);
        assert_eq!(RingElem::from_int(&params, 6).inv().unwrap().coeffs(), &[21]);
        assert_eq!(RingElem::from_int(&params, 10).inv(), Err(Error::NotUnit));
    }

    #[test]
    fn identity_and_mismatch() {
        let params = RingParams::prime_field(5, 3).unwrap();
        let one = RingElem::one(&params);
        assert_eq!(one.add(&RingElem::zero(&params)).unwrap(), one);
        let other = RingParams::prime_field(5, 4).unwrap();
        assert_eq!(one.add(&RingElem::one(&other)), Err(Error::ParamMismatch));
    }

    #[test]
    fn frobenius_on_gaussian_integers() {
        let params = RingParams::new(3, 6, Some(vec![1, 0, 1])).unwrap();
        let t = RingElem::from_coeffs(&params, &[0, 1]).unwrap();
        assert_eq!(t.frobenius().unwrap(), t.neg());
        let c = RingElem::from_int(&params, 17);
        assert_eq!(c.frobenius().unwrap(), c);
        let prime = RingParams::prime_field(3, 6).unwrap();
        assert_eq!(RingElem::one(&prime).frobenius(), Err(Error::TrivialFrobenius));
    }

    #[test]
    fn inverse_in_unramified_extension() {
        let params = RingParams::new(3, 7, Some(vec![2, 1, 1])).unwrap();
        let x = RingElem::from_coeffs(&params, &[5, 7]).unwrap();
        let prod = x.mul(&x.inv().unwrap()).unwrap();
        assert_eq!(prod, RingElem::one(&params));
    }
}
