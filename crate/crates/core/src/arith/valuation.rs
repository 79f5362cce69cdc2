//! Factorial valuations and the convergence bounds that drive truncation.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Base-p digit sum of `l`.
pub fn digit_sum(mut l: u64, p: u64) -> u64 {
    let mut s = 0;
    while l > 0 {
        s += l % p;
        l /= p;
    }
    s
}

/// ν_p(l!) via the digit-sum identity (l - α(l)) / (p - 1).
pub fn factorial_valuation(l: u64, p: u64) -> u64 {
    (l - digit_sum(l, p)) / (p - 1)
}

/// ν_p(l!) via Legendre's sum of ⌊l / p^i⌋.
pub fn factorial_valuation_legendre(l: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = l / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// Fails unless e >= 1 for odd p and e >= 2 for p = 2.
pub fn check_convergence(p: u64, e: u32) -> Result<()> {
    if e == 0 || (p == 2 && e < 2) {
        Err(Error::Divergent { p, e })
    } else {
        Ok(())
    }
}

/// Lower bound (e - 1/(p-1))·deg - (2s-1)/(p-1) on the valuation of any
/// degree-`deg` term of the integral functional.
pub fn term_valuation_bound(deg: u64, e: u32, s: u32, p: u64) -> Result<Ratio<i64>> {
    check_convergence(p, e)?;
    if s == 0 {
        return Err(Error::InvalidParams("s must be >= 1".into()));
    }
    let pm1 = p as i64 - 1;
    let slope = Ratio::new(e as i64 * pm1 - 1, pm1);
    Ok(slope * Ratio::from_integer(deg as i64) - Ratio::new(2 * s as i64 - 1, pm1))
}

/// Smallest degree D whose bound already reaches `target`; every monomial of
/// degree > D then vanishes mod p^target.
pub fn truncation_degree(target: u32, e: u32, s: u32, p: u64) -> Result<u32> {
    let goal = Ratio::from_integer(target as i64);
    let mut deg = 0u32;
    while term_valuation_bound(deg as u64, e, s, p)? < goal {
        deg += 1;
    }
    Ok(deg)
}

/// ν_p of a positive integer.
pub fn int_valuation(mut n: u128, p: u64) -> u32 {
    debug_assert!(n > 0);
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}
