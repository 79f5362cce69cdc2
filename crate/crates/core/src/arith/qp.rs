use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::params::RingParams;
use crate::arith::ring::RingElem;
use crate::error::{Error, Result};

/// Absolute precision carried by an exact zero.
pub const EXACT: i64 = i64::MAX;

/// Valuation reported by the defect checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    /// The difference is nonzero with this valuation.
    Finite(i64),
    /// The difference vanishes to the stated absolute precision.
    AtLeast(i64),
    /// Both sides are bitwise identical.
    Infinite,
}

impl Valuation {
    pub fn meets(&self, target: i64) -> bool {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v >= target,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    /// Zero modulo p^abs.
    Zero { abs: i64 },
    /// p^val * unit, with the unit known mod p^rel.
    Unit { val: i64, unit: Vec<u64>, rel: u32 },
}

/// An element of F known to finite precision.
#[derive(Clone, PartialEq, Eq)]
pub struct QpElem {
    params: Arc<RingParams>,
    kind: Kind,
}

impl QpElem {
    pub fn zero(params: &Arc<RingParams>, abs: i64) -> Self {
        QpElem { params: params.clone(), kind: Kind::Zero { abs } }
    }

    pub fn exact_zero(params: &Arc<RingParams>) -> Self {
        Self::zero(params, EXACT)
    }

    /// Normalizes p^shift * residue where the residue is known mod p^n.
    pub(crate) fn from_fixed(params: &Arc<RingParams>, shift: i64, residue: &[u64], n: u32) -> Self {
        if n == 0 {
            return Self::zero(params, shift);
        }
        let p = params.p();
        let mut v = n;
        for &c in residue {
            if c != 0 {
                let mut c = c;
                let mut k = 0;
                while c % p == 0 && k < n {
                    c /= p;
                    k += 1;
                }
                v = v.min(k);
            }
        }
        if v >= n {
            return Self::zero(params, shift.saturating_add(n as i64));
        }
        let rel = n - v;
        let div = params.pow_p(v);
        let m = params.pow_p(rel);
        let unit = residue.iter().map(|&c| (c / div) % m).collect();
        QpElem { params: params.clone(), kind: Kind::Unit { val: shift + v as i64, unit, rel } }
    }

    /// An element of O_F known mod p^M.
    pub fn from_ring(x: &RingElem) -> Self {
        Self::from_fixed(x.params(), 0, x.coeffs(), x.params().precision())
    }

    pub fn from_int(params: &Arc<RingParams>, value: i128) -> Self {
        Self::from_rational(params, &BigRational::from_integer(BigInt::from(value)))
    }

    /// Exact rational into F with relative precision M.
    pub fn from_rational(params: &Arc<RingParams>, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::exact_zero(params);
        }
        let p = BigInt::from(params.p());
        let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
        let mut val = 0i64;
        while (&num % &p).is_zero() {
            num /= &p;
            val += 1;
        }
        while (&den % &p).is_zero() {
            den /= &p;
            val -= 1;
        }
        let prec = params.precision();
        let m = BigInt::from(params.pow_p(prec));
        let zm = params.zmod(prec);
        let reduce = |x: &BigInt| -> u64 {
            let mut y = x % &m;
            if y.sign() == Sign::Minus {
                y += &m;
            }
            y.to_u64().unwrap()
        };
        let n = reduce(&num);
        let d = reduce(&den);
        let mut dv = vec![0u64; params.degree()];
        dv[0] = d;
        let dinv = params.inv_vec(prec, &dv).expect("p-free denominator is a unit");
        let mut unit = vec![0u64; params.degree()];
        unit[0] = zm.mul(n, dinv[0]);
        QpElem { params: params.clone(), kind: Kind::Unit { val, unit, rel: prec } }
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    /// None for a zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.kind {
            Kind::Zero { .. } => None,
            Kind::Unit { val, .. } => Some(*val),
        }
    }

    /// The value is known modulo p^(absolute precision).
    pub fn abs_precision(&self) -> i64 {
        match &self.kind {
            Kind::Zero { abs } => *abs,
            Kind::Unit { val, rel, .. } => val + *rel as i64,
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match &self.kind {
            Kind::Zero { .. } => 0,
            Kind::Unit { rel, .. } => *rel,
        }
    }

    /// Unit part residues (empty for a zero).
    pub fn unit(&self) -> &[u64] {
        match &self.kind {
            Kind::Zero { .. } => &[],
            Kind::Unit { unit, .. } => unit,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        self.kind == Kind::Zero { abs: EXACT }
    }

    fn check(&self, other: &Self) -> Result<Arc<RingParams>> {
        if !self.params.same_field(&other.params) {
            return Err(Error::ParamMismatch);
        }
        Ok(if other.params.precision() > self.params.precision() {
            other.params.clone()
        } else {
            self.params.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let params = self.check(other)?;
        let abs = self.abs_precision().min(other.abs_precision());
        let k = match (self.valuation(), other.valuation()) {
            (None, None) => return Ok(Self::zero(&params, abs)),
            (Some(a), None) | (None, Some(a)) => a,
            (Some(a), Some(b)) => a.min(b),
        };
        if abs <= k {
            return Ok(Self::zero(&params, abs));
        }
        let n = (abs - k) as u32;
        let zm = params.zmod(n);
        let mut acc = vec![0u64; params.degree()];
        for x in [self, other] {
            if let Kind::Unit { val, unit, .. } = &x.kind {
                let shift = (val - k) as u32;
                if shift >= n {
                    continue;
                }
                let scale = params.pow_p(shift);
                for (slot, &c) in acc.iter_mut().zip(unit) {
                    *slot = zm.add(*slot, zm.mul(c % zm.modulus(), scale));
                }
            }
        }
        Ok(Self::from_fixed(&params, k, &acc, n))
    }

    pub fn neg(&self) -> Self {
        match &self.kind {
            Kind::Zero { .. } => self.clone(),
            Kind::Unit { val, unit, rel } => {
                let zm = self.params.zmod(*rel);
                QpElem {
                    params: self.params.clone(),
                    kind: Kind::Unit { val: *val, unit: unit.iter().map(|&c| zm.neg(c)).collect(), rel: *rel },
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let params = self.check(other)?;
        Ok(match (&self.kind, &other.kind) {
            (Kind::Zero { abs: a }, Kind::Zero { abs: b }) => Self::zero(&params, a.saturating_add(*b)),
            (Kind::Zero { abs }, Kind::Unit { val, .. }) | (Kind::Unit { val, .. }, Kind::Zero { abs }) => {
                let abs = if *abs == EXACT { EXACT } else { abs.saturating_add(*val) };
                Self::zero(&params, abs)
            }
            (Kind::Unit { val: va, unit: ua, rel: ra }, Kind::Unit { val: vb, unit: ub, rel: rb }) => {
                let rel = (*ra).min(*rb);
                let m = params.pow_p(rel);
                let a: Vec<u64> = ua.iter().map(|&c| c % m).collect();
                let b: Vec<u64> = ub.iter().map(|&c| c % m).collect();
                let unit = params.mul_vec(rel, &a, &b);
                QpElem { params, kind: Kind::Unit { val: va + vb, unit, rel } }
            }
        })
    }

    pub fn mul_int(&self, k: i128) -> Self {
        let other = Self::from_int(&self.params, k);
        self.mul(&other).expect("same field")
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.kind {
            Kind::Zero { .. } => Err(Error::DivisionByZero),
            Kind::Unit { val, unit, rel } => {
                let inv = self.params.inv_vec(*rel, unit).ok_or(Error::NotUnit)?;
                Ok(QpElem { params: self.params.clone(), kind: Kind::Unit { val: -val, unit: inv, rel: *rel } })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Forgets digits beyond absolute precision `abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        match &self.kind {
            Kind::Zero { abs: a } => Self::zero(&self.params, (*a).min(abs)),
            Kind::Unit { val, unit, rel } => {
                if abs <= *val {
                    return Self::zero(&self.params, abs);
                }
                let keep = ((abs - val) as u32).min(*rel);
                let m = self.params.pow_p(keep);
                QpElem {
                    params: self.params.clone(),
                    kind: Kind::Unit { val: *val, unit: unit.iter().map(|&c| c % m).collect(), rel: keep },
                }
            }
        }
    }

    /// Valuation of `self - other`, with `Infinite` for bitwise-identical inputs.
    pub fn defect_against(&self, other: &Self) -> Result<Valuation> {
        if self.kind == other.kind && self.params.same_field(&other.params) {
            return Ok(Valuation::Infinite);
        }
        let diff = self.sub(other)?;
        Ok(match diff.valuation() {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(diff.abs_precision()),
        })
    }

    /// Applies the Frobenius automorphism to the unit part.
    pub fn frobenius(&self) -> Result<Self> {
        let root = self.params.frobenius_root().ok_or(Error::TrivialFrobenius)?;
        match &self.kind {
            Kind::Zero { .. } => Ok(self.clone()),
            Kind::Unit { val, unit, rel } => {
                let m = self.params.pow_p(*rel);
                let root: Vec<u64> = root.iter().map(|&c| c % m).collect();
                let image = self.params.eval_poly(*rel, unit, &root);
                Ok(QpElem { params: self.params.clone(), kind: Kind::Unit { val: *val, unit: image, rel: *rel } })
            }
        }
    }

    /// Base-p digits of each unit coefficient, least significant first.
    pub fn digits(&self) -> Vec<Vec<u64>> {
        let p = self.params.p();
        match &self.kind {
            Kind::Zero { .. } => Vec::new(),
            Kind::Unit { unit, rel, .. } => unit
                .iter()
                .map(|&c| {
                    let mut c = c;
                    (0..*rel)
                        .map(|_| {
                            let dgt = c % p;
                            c /= p;
                            dgt
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Exact rational representative when d = 1: p^val times the unit residue
    /// lifted to the symmetric interval.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.params.degree() != 1 {
            return None;
        }
        Some(match &self.kind {
            Kind::Zero { .. } => BigRational::zero(),
            Kind::Unit { val, unit, rel } => {
                let m = self.params.pow_p(*rel) as i128;
                let mut u = unit[0] as i128;
                if u > m / 2 {
                    u -= m;
                }
                let pv = BigInt::from(self.params.p()).pow(val.unsigned_abs() as u32);
                let u = BigRational::from_integer(BigInt::from(u));
                if *val >= 0 {
                    u * BigRational::from_integer(pv)
                } else {
                    u / BigRational::from_integer(pv)
                }
            }
        })
    }

    /// Residue of an integral element mod p^abs as ring coefficients.
    pub fn integral_residue(&self, abs: u32) -> Option<Vec<u64>> {
        let m = self.params.pow_p(abs.min(self.params.precision()));
        match &self.kind {
            Kind::Zero { .. } => Some(vec![0; self.params.degree()]),
            Kind::Unit { val, unit, .. } => {
                if *val < 0 {
                    return None;
                }
                let zm = self.params.zmod(abs.min(self.params.precision()));
                let scale = if (*val as u32) >= abs { 0 } else { self.params.pow_p(*val as u32) % m };
                Some(unit.iter().map(|&c| zm.mul(c % m, scale)).collect())
            }
        }
    }
}

impl fmt::Debug for QpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QpElem({self})")
    }
}

impl fmt::Display for QpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params.p();
        match &self.kind {
            Kind::Zero { abs } if *abs == EXACT => write!(f, "0"),
            Kind::Zero { abs } => write!(f, "0 (mod {p}^{abs})"),
            Kind::Unit { val, unit, rel } => {
                let u = if unit.len() == 1 {
                    unit[0].to_string()
                } else {
                    let parts: Vec<String> = unit.iter().map(|c| c.to_string()).collect();
                    format!("[{}]", parts.join(", "))
                };
                write!(f, "{p}^{val} * {u} (mod {p}^{})", val + *rel as i64)
            }
        }
    }
}

/// ν_p of a nonzero big integer.
pub fn bigint_valuation(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_conversion() {
        let params = RingParams::prime_field(5, 2).unwrap();
        let third = QpElem::from_rational(&params, &q(1, 3));
        assert_eq!(third.valuation(), Some(0));
        assert_eq!(third.unit(), &[17]);
        assert!(QpElem::from_rational(&params, &q(0, 1)).is_exact_zero());
        let x = QpElem::from_rational(&params, &q(9, 5));
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(x.unit(), &[9]);
        assert_eq!(x.to_string(), "5^-1 * 9 (mod 5^1)");
    }

    #[test]
    fn aligned_addition() {
        let params = RingParams::prime_field(5, 4).unwrap();
        let a = QpElem::from_int(&params, 25 * 3);
        let b = QpElem::from_int(&params, 25 * 2);
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), Some(3));
        assert_eq!(s.abs_precision(), 6);
        assert_eq!(s.to_rational().unwrap(), q(125, 1));
    }

    #[test]
    fn precision_tracking() {
        let params = RingParams::prime_field(3, 4).unwrap();
        let a = QpElem::from_int(&params, 1);
        let b = QpElem::from_int(&params, -1);
        let s = a.add(&b).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.abs_precision(), 4);
        let c = QpElem::from_int(&params, 27).mul(&QpElem::from_int(&params, 2)).unwrap();
        assert_eq!(c.abs_precision(), 7);
        let d = c.div(&QpElem::from_int(&params, 9)).unwrap();
        assert_eq!(d.valuation(), Some(1));
        assert_eq!(d.to_rational().unwrap(), q(6, 1));
        assert_eq!(QpElem::zero(&params, 3).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn defect_kinds() {
        let params = RingParams::prime_field(3, 4).unwrap();
        let a = QpElem::from_int(&params, 10);
        assert_eq!(a.defect_against(&a).unwrap(), Valuation::Infinite);
        let b = QpElem::from_int(&params, 1);
        assert_eq!(a.defect_against(&b).unwrap(), Valuation::Finite(2));
        let c = a.add(&QpElem::zero(&params, 3)).unwrap();
        assert_eq!(a.defect_against(&c).unwrap(), Valuation::AtLeast(3));
        assert!(Valuation::AtLeast(4).meets(4));
        assert!(!Valuation::Finite(2).meets(3));
    }

    #[test]
    fn digit_expansion() {
        let params = RingParams::prime_field(3, 4).unwrap();
        let x = QpElem::from_int(&params, 3 * 16);
        assert_eq!(x.digits(), vec![vec![1, 2, 1, 0]]);
    }
}
