use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest admissible working modulus p^M. Keeping it below 2^62 lets sums of
/// two residues stay inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Arithmetic in ℤ/mℤ for a modulus below 2^62.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zmod {
    m: u64,
    small: bool,
}

impl Zmod {
    pub fn new(m: u64) -> Self {
        debug_assert!(m >= 1 && m <= MAX_MODULUS);
        Zmod { m, small: m < (1 << 32) }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            a * b % self.m
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }

    /// Reduces a signed integer into `[0, m)`.
    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    pub fn pow(&self, mut a: u64, mut k: u128) -> u64 {
        let mut acc = 1 % self.m;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Parameters of the coefficient ring O_F / p^M for an unramified extension
/// F = ℚ_p[t]/(f) of degree d.
///
/// Elements are stored as `d` residues mod p^M, little-endian in the
/// generator `t`. When `d = 1` the modulus is the placeholder `t`.
#[derive(Clone)]
pub struct RingParams {
    p: u64,
    prec: u32,
    modulus: Vec<i64>,
    reduced: Vec<u64>,
    powers: Vec<u64>,
    frob: Option<Vec<u64>>,
}

impl PartialEq for RingParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.prec == other.prec && self.modulus == other.modulus
    }
}

impl Eq for RingParams {}

impl fmt::Debug for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingParams")
            .field("p", &self.p)
            .field("M", &self.prec)
            .field("d", &self.degree())
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl RingParams {
    /// ℤ_p / p^M.
    pub fn prime_field(p: u64, prec: u32) -> Result<Arc<Self>> {
        Self::new(p, prec, None)
    }

    /// `modulus` is monic, little-endian, of degree d. `None` means d = 1.
    pub fn new(p: u64, prec: u32, modulus: Option<Vec<i64>>) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if prec == 0 {
            return Err(Error::InvalidParams("working precision M must be >= 1".into()));
        }
        let mut powers = vec![1u64];
        for _ in 0..prec {
            let last = *powers.last().unwrap();
            match last.checked_mul(p) {
                Some(next) if next <= MAX_MODULUS => powers.push(next),
                _ => return Err(Error::PrecisionTooLarge { p, m: prec }),
            }
        }
        let modulus = modulus.unwrap_or_else(|| vec![0, 1]);
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidParams("modulus must be monic of degree >= 1".into()));
        }
        let zm = Zmod::new(powers[prec as usize]);
        let reduced: Vec<u64> = modulus.iter().map(|&c| zm.from_i128(c as i128)).collect();
        let mut params = RingParams { p, prec, modulus, reduced, powers, frob: None };
        if params.degree() >= 2 {
            if !params.modulus_irreducible() {
                return Err(Error::ReducibleModulus(p));
            }
            params.frob = Some(params.lift_frobenius_root()?);
        }
        Ok(Arc::new(params))
    }

    /// Same field, different working precision.
    pub fn with_precision(&self, prec: u32) -> Result<Arc<Self>> {
        let modulus = if self.degree() == 1 { None } else { Some(self.modulus.clone()) };
        Self::new(self.p, prec, modulus)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Working precision M.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    /// p^k for 0 <= k <= M.
    pub fn pow_p(&self, k: u32) -> u64 {
        self.powers[k as usize]
    }

    /// True when both describe the same field, whatever the precision.
    pub fn same_field(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }

    pub fn zmod(&self, r: u32) -> Zmod {
        Zmod::new(self.powers[r as usize])
    }

    /// Image of the generator `t` under Frobenius, mod p^M.
    pub fn frobenius_root(&self) -> Option<&[u64]> {
        self.frob.as_deref()
    }

    fn modulus_at(&self, r: u32) -> Vec<u64> {
        let m = self.powers[r as usize];
        self.reduced.iter().map(|&c| c % m).collect()
    }

    /// Product of two ring elements mod p^r, written into `out`.
    pub(crate) fn mul_into(&self, r: u32, a: &[u64], b: &[u64], out: &mut [u64]) {
        let zm = self.zmod(r);
        let d = self.degree();
        if d == 1 {
            out[0] = zm.mul(a[0], b[0]);
            return;
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = zm.add(prod[i + j], zm.mul(ai, bj));
            }
        }
        let f = if r == self.prec { self.reduced.clone() } else { self.modulus_at(r) };
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for j in 0..d {
                let idx = k - d + j;
                prod[idx] = zm.sub(prod[idx], zm.mul(c, f[j]));
            }
        }
        out.copy_from_slice(&prod[..d]);
    }

    pub(crate) fn mul_vec(&self, r: u32, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.degree()];
        self.mul_into(r, a, b, &mut out);
        out
    }

    pub(crate) fn one_vec(&self, r: u32) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[0] = 1 % self.powers[r as usize];
        v
    }

    pub(crate) fn pow_vec(&self, r: u32, a: &[u64], mut k: u128) -> Vec<u64> {
        let mut acc = self.one_vec(r);
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_vec(r, &acc, &base);
            }
            base = self.mul_vec(r, &base, &base);
            k >>= 1;
        }
        acc
    }

    /// True when the element reduces to zero mod p.
    pub(crate) fn divisible_by_p(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c % self.p == 0)
    }

    /// Inverse of a unit mod p^r: Fermat inverse in the residue field, then
    /// Newton iteration x <- x(2 - a x).
    pub(crate) fn inv_vec(&self, r: u32, a: &[u64]) -> Option<Vec<u64>> {
        if self.divisible_by_p(a) {
            return None;
        }
        let q = (self.p as u128).pow(self.degree() as u32);
        let residue: Vec<u64> = a.iter().map(|&c| c % self.p).collect();
        let mut x = self.pow_vec(1, &residue, q - 2);
        let zm = self.zmod(r);
        let mut known = 1u32;
        while known < r {
            let ax = self.mul_vec(r, a, &x);
            let mut two_minus: Vec<u64> = ax.iter().map(|&c| zm.neg(c)).collect();
            two_minus[0] = zm.add(two_minus[0], 2 % zm.modulus());
            x = self.mul_vec(r, &x, &two_minus);
            known = known.saturating_mul(2);
        }
        // x was computed mod p^1 first; make sure it is reduced mod p^r.
        Some(x.into_iter().map(|c| c % zm.modulus()).collect())
    }

    /// Brute-force irreducibility test: no monic factor of degree <= d/2
    /// over F_p.
    fn modulus_irreducible(&self) -> bool {
        let p = self.p;
        let f: Vec<u64> = self.modulus.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        let d = self.degree();
        for k in 1..=d / 2 {
            let count = (p as u128).pow(k as u32);
            for idx in 0..count {
                let mut g = Vec::with_capacity(k + 1);
                let mut rest = idx;
                for _ in 0..k {
                    g.push((rest % p as u128) as u64);
                    rest /= p as u128;
                }
                g.push(1);
                if poly_rem_mod_p(&f, &g, p).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    /// Hensel-lifts the root of the modulus congruent to t^p mod p.
    fn lift_frobenius_root(&self) -> Result<Vec<u64>> {
        let r = self.prec;
        let zm = self.zmod(r);
        let d = self.degree();
        let mut t = vec![0u64; d];
        t[1] = 1;
        let mut root = self.pow_vec(r, &t, self.p as u128);
        let deriv: Vec<u64> =
            (1..self.reduced.len()).map(|i| zm.mul(self.reduced[i], i as u64 % zm.modulus())).collect();
        for _ in 0..(64 - (r as u64).leading_zeros() + 2) {
            let value = self.eval_poly(r, &self.reduced, &root);
            if value.iter().all(|&c| c == 0) {
                return Ok(root);
            }
            let slope = self.eval_poly(r, &deriv, &root);
            let slope_inv = self.inv_vec(r, &slope).ok_or(Error::ReducibleModulus(self.p))?;
            let step = self.mul_vec(r, &value, &slope_inv);
            root = root.iter().zip(&step).map(|(&a, &b)| zm.sub(a, b)).collect();
        }
        let value = self.eval_poly(r, &self.reduced, &root);
        if value.iter().all(|&c| c == 0) {
            Ok(root)
        } else {
            Err(Error::ReducibleModulus(self.p))
        }
    }

    /// Evaluates an integer polynomial (little-endian) at a ring element.
    pub(crate) fn eval_poly(&self, r: u32, coeffs: &[u64], x: &[u64]) -> Vec<u64> {
        let zm = self.zmod(r);
        let mut acc = vec![0u64; self.degree()];
        for &c in coeffs.iter().rev() {
            acc = self.mul_vec(r, &acc, x);
            acc[0] = zm.add(acc[0], c % zm.modulus());
        }
        acc
    }
}

fn poly_rem_mod_p(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let zm = Zmod::new(p);
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = rem.pop().unwrap();
        if lead != 0 {
            let shift = rem.len() - dg;
            for j in 0..dg {
                rem[shift + j] = zm.sub(rem[shift + j], zm.mul(lead, g[j]));
            }
        }
    }
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_reducible() {
        assert_eq!(RingParams::prime_field(9, 3).unwrap_err(), Error::NotPrime(9));
        // t^2 + 1 = (t + 2)(t + 3) mod 5
        assert_eq!(
            RingParams::new(5, 3, Some(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus(5)
        );
        assert!(RingParams::new(3, 3, Some(vec![1, 0, 1])).is_ok());
        // t^4 + t^2 + 1 = (t^2 + t + 1)(t^2 - t + 1) has no roots mod 2 but factors
        assert_eq!(
            RingParams::new(2, 3, Some(vec![1, 0, 1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus(2)
        );
    }

    #[test]
    fn precision_limit() {
        assert!(RingParams::prime_field(2, 62).is_ok());
        assert!(matches!(
            RingParams::prime_field(2, 63),
            Err(Error::PrecisionTooLarge { .. })
        ));
    }

    #[test]
    fn frobenius_root_for_gaussian_modulus() {
        let params = RingParams::new(3, 8, Some(vec![1, 0, 1])).unwrap();
        let m = params.pow_p(8);
        assert_eq!(params.frobenius_root().unwrap(), &[0, m - 1]);
    }
}
