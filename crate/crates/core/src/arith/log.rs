use crate::arith::qp::QpElem;
use crate::arith::ring::RingElem;
use crate::arith::valuation::{check_convergence, int_valuation};
use crate::error::{Error, Result};

fn floor_log(i: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut q = i;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

/// Number of series terms needed for `log(1 + z)` mod p^target when
/// ν(z) >= e, and the worst p-adic loss from dividing by the term index.
pub fn log_series_length(p: u64, e: u32, target: u32) -> (u64, u32) {
    let mut i = 1u64;
    while (e as i64) * (i as i64) - (floor_log(i, p) as i64) < target as i64 {
        i += 1;
    }
    let terms = i - 1;
    (terms, if terms == 0 { 0 } else { floor_log(terms, p) })
}

/// The p-adic logarithm Σ (-1)^(i+1) z^i / i of u = 1 + z with u ≡ 1 mod p^e,
/// correct mod p^target.
pub fn padic_log(u: &RingElem, e: u32, target: u32) -> Result<QpElem> {
    let params = u.params();
    let p = params.p();
    check_convergence(p, e)?;
    if !u.is_one_mod(e) {
        return Err(Error::NotCongruent(e));
    }
    let (terms, guard) = log_series_length(p, e, target);
    let work = target + guard;
    if work > params.precision() {
        return Err(Error::PrecisionExhausted { needed: work, available: params.precision() });
    }
    let wm = params.pow_p(work);
    let zw = params.zmod(work);
    let zt = params.zmod(target);
    let mut z: Vec<u64> = u.coeffs().iter().map(|&c| c % wm).collect();
    z[0] = zw.sub(z[0], 1 % wm);
    let mut power = z.clone();
    let mut acc = vec![0u64; params.degree()];
    for i in 1..=terms {
        if i > 1 {
            power = params.mul_vec(work, &power, &z);
        }
        let v = int_valuation(i as u128, p);
        let cofactor = i / p.pow(v);
        let shift = params.pow_p(v);
        let inv = zt.pow(cofactor % zt.modulus(), phi_exponent(p, target));
        for (slot, &c) in acc.iter_mut().zip(&power) {
            let term = zt.mul((c / shift) % zt.modulus(), inv);
            *slot = if i % 2 == 1 { zt.add(*slot, term) } else { zt.sub(*slot, term) };
        }
    }
    Ok(QpElem::from_fixed(params, 0, &acc, target))
}

/// φ(p^k) - 1, the exponent inverting a unit mod p^k.
fn phi_exponent(p: u64, k: u32) -> u128 {
    if k == 0 {
        return 0;
    }
    (p as u128 - 1) * (p as u128).pow(k - 1) - 1
}

fn base_level(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// The exponent (p^d - 1)·p^e0 used by [`extend_log`].
pub fn default_log_exponent(p: u64, d: usize) -> u128 {
    ((p as u128).pow(d as u32) - 1) * (p as u128).pow(base_level(p))
}

/// Ring precision [`extend_log`] needs to reach `target` digits.
pub fn extend_log_precision(p: u64, target: u32) -> u32 {
    let e0 = base_level(p);
    let (_, guard) = log_series_length(p, e0, target + e0);
    target + e0 + guard
}

/// The homomorphic extension of the logarithm to all units: log(u^k) / k.
pub fn extend_log(u: &RingElem, target: u32) -> Result<QpElem> {
    extend_log_with_exponent(u, default_log_exponent(u.params().p(), u.params().degree()), target)
}

/// `log(u^k) / k` for an exponent with u^k ≡ 1 mod p^e0.
pub fn extend_log_with_exponent(u: &RingElem, k: u128, target: u32) -> Result<QpElem> {
    if !u.is_unit() {
        return Err(Error::NotUnit);
    }
    let params = u.params();
    let p = params.p();
    let e0 = base_level(p);
    let w = u.pow(k);
    if !w.is_one_mod(e0) {
        return Err(Error::NotCongruent(e0));
    }
    let loss = int_valuation(k, p);
    let log = padic_log(&w, e0, target + loss)?;
    let result = log.div(&QpElem::from_int(params, k as i128))?;
    Ok(result.truncate(target as i64))
}
