//! Index formula, pairing of the cocycle with bar cycles, the regulator on
//! GL_N(O_F) via transfer, its rational normalization, and ℚ_p-valued
//! absolute values on ℚ.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::log::{extend_log, extend_log_precision};
use crate::arith::params::RingParams;
use crate::arith::qp::{QpElem, Valuation};
use crate::cocycle::{cocycle_eval, GroupTuple};
use crate::error::{Error, Result};
use crate::homology::{bar_differential, transfer_t, BarChain, CosetSystem, MatrixGroup, MAX_INDEX};
use crate::matforms::OMatrix;

/// |GL_N(F_q)| = Π_{i<N} (q^N - q^i).
pub fn gl_order(n: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n);
    (0..n).map(|i| &qn - q.pow(i)).product()
}

/// [GL_N(O_F) : G_{N,e}] = |GL_N(F_{p^d})| · p^{N² d (e ε - 1)}.
pub fn index(n: u32, p: u64, d: u32, e: u32, eps: u32) -> Result<BigUint> {
    if n == 0 || d == 0 || e == 0 || eps == 0 {
        return Err(Error::InvalidParams("index parameters must be positive".into()));
    }
    let q = p.checked_pow(d).ok_or_else(|| Error::InvalidParams("residue field too large".into()))?;
    Ok(gl_order(n, q) * BigUint::from(p).pow(n * n * d * (e * eps - 1)))
}

/// Parameters of a regulator computation.
#[derive(Clone, Debug)]
pub struct RegulatorConfig {
    pub params: Arc<RingParams>,
    pub e: u32,
    pub s: u32,
    pub n: usize,
    pub target: u32,
}

impl RegulatorConfig {
    pub fn new(params: &Arc<RingParams>, e: u32, s: u32, n: usize, target: u32) -> Result<Self> {
        crate::arith::valuation::check_convergence(params.p(), e)?;
        if s == 0 || n == 0 {
            return Err(Error::InvalidParams("s and N must be >= 1".into()));
        }
        Ok(RegulatorConfig { params: params.clone(), e, s, n, target })
    }

    fn group(&self) -> MatrixGroup {
        MatrixGroup::new(&self.params, self.n)
    }

    fn check_chain(&self, c: &BarChain<OMatrix>) -> Result<()> {
        if c.degree() != 2 * self.s as usize - 1 {
            return Err(Error::DimensionMismatch(format!("chain of degree {} for s = {}", c.degree(), self.s)));
        }
        for (t, _) in c.terms() {
            if t.iter().any(|g| g.dim() != self.n || g.params() != &self.params) {
                return Err(Error::ParamMismatch);
            }
        }
        Ok(())
    }

    /// Fails unless the chain is a cycle.
    pub fn require_cycle(&self, c: &BarChain<OMatrix>) -> Result<()> {
        self.check_chain(c)?;
        if c.degree() > 0 && !bar_differential(&self.group(), c)?.is_zero() {
            return Err(Error::NotACycle);
        }
        Ok(())
    }
}

/// Σ c · Φ(1, g_1, …, g_{2s-1}) over a chain in G_{N,e}, after checking it is
/// a cycle when `check_cycle` is set.
pub fn pair(cfg: &RegulatorConfig, c: &BarChain<OMatrix>, check_cycle: bool) -> Result<QpElem> {
    if check_cycle {
        cfg.require_cycle(c)?;
    } else {
        cfg.check_chain(c)?;
    }
    let one = OMatrix::identity(&cfg.params, cfg.n);
    let mut total = QpElem::exact_zero(&cfg.params);
    for (t, &k) in c.terms() {
        let mut elems = vec![one.clone()];
        elems.extend(t.iter().cloned());
        let tuple = GroupTuple::new(cfg.s, cfg.e, elems)?;
        total = total.add(&cocycle_eval(&tuple, cfg.target)?.mul_int(k as i128))?;
    }
    Ok(total.truncate(cfg.target as i64))
}

/// The regulator on a cycle of GL_N(O_F): transfer to G_{N,e}, pair, divide
/// by the index.
pub fn r_nf(cfg: &RegulatorConfig, c: &BarChain<OMatrix>) -> Result<QpElem> {
    let p = cfg.params.p();
    let idx = index(cfg.n as u32, p, cfg.params.degree() as u32, cfg.e, 1)?;
    if idx > BigUint::from(MAX_INDEX) {
        return Err(Error::IndexTooLarge(format!("index {idx} exceeds {MAX_INDEX}")));
    }
    cfg.require_cycle(c)?;
    let idx = idx.to_u128().expect("bounded by the guard");
    let loss = crate::arith::valuation::int_valuation(idx, p);
    let cs = CosetSystem::congruence(&cfg.params, cfg.n, cfg.e)?;
    let moved = transfer_t(&cs, c)?;
    let inner = RegulatorConfig { target: cfg.target + loss, ..cfg.clone() };
    let value = pair(&inner, &moved, false)?;
    Ok(value.div(&QpElem::from_int(&cfg.params, idx as i128))?.truncate(cfg.target as i64))
}

/// (-1)^s (s-1)! / ((2s-2)! (2s-1)!).
pub fn normalization_constant(s: u32) -> Result<BigRational> {
    if s == 0 {
        return Err(Error::InvalidParams("s must be >= 1".into()));
    }
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    let r = BigRational::new(fact(s - 1), fact(2 * s - 2) * fact(2 * s - 1));
    Ok(if s % 2 == 1 { -r } else { r })
}

/// Multiplies a regulator value by the normalization constant.
pub fn hat_r(value: &QpElem, s: u32) -> Result<QpElem> {
    value.mul(&QpElem::from_rational(value.params(), &normalization_constant(s)?))
}

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinite,
}

/// The ℚ_p-valued absolute value of a rational at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceValue {
    pub place: Place,
    /// The value as an exact rational; ±1 at the infinite place.
    pub exact: BigRational,
    /// The value in ℚ_p; `None` at the infinite place.
    pub value: Option<QpElem>,
}

fn valuation_at(x: &BigInt, l: u64) -> u32 {
    let l = BigInt::from(l);
    let mut v = 0;
    let mut y = x.clone();
    while !y.is_zero() && (&y % &l).is_zero() {
        y /= &l;
        v += 1;
    }
    v
}

/// |x|_{ℓ,p}: ℓ^{-ν_ℓ(x)} for ℓ ≠ p, the unit part x·p^{-ν_p(x)} at p, and
/// the sign at infinity.
pub fn abs_value_q(x: &BigRational, place: Place, params: &Arc<RingParams>) -> Result<PlaceValue> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let exact = match place {
        Place::Infinite => BigRational::from_integer(BigInt::from(if x.is_negative() { -1 } else { 1 })),
        Place::Finite(l) => {
            if !crate::arith::params::is_prime(l) {
                return Err(Error::NotPrime(l));
            }
            let v = valuation_at(x.numer(), l) as i32 - valuation_at(x.denom(), l) as i32;
            let lv = BigRational::from_integer(BigInt::from(l)).pow(-v);
            if l == params.p() {
                x * &lv
            } else {
                lv
            }
        }
    };
    let value = match place {
        Place::Infinite => None,
        Place::Finite(_) => Some(QpElem::from_rational(params, &exact)),
    };
    Ok(PlaceValue { place, exact, value })
}

/// Primes dividing the numerator or denominator, by trial division.
pub fn support(x: &BigRational) -> Result<Vec<u64>> {
    let mut primes = Vec::new();
    for part in [x.numer().abs(), x.denom().clone()] {
        let mut n = part.to_u64().ok_or_else(|| Error::InvalidParams("numerator and denominator must fit in 64 bits".into()))?;
        let mut f = 2u64;
        while f * f <= n {
            if n % f == 0 {
                primes.push(f);
                while n % f == 0 {
                    n /= f;
                }
            }
            f += 1;
        }
        if n > 1 {
            primes.push(n);
        }
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// Result of checking Π_v |x|_v = 1 and Σ_v log |x|_v = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCheck {
    pub places: Vec<PlaceValue>,
    pub exact_product: BigRational,
    /// Product of the finite places only; equals sign(x).
    pub finite_product: BigRational,
    pub product_defect: Valuation,
    pub log_sum_defect: Valuation,
}

/// Evaluates every place in the support of x plus p and ∞.
pub fn product_formula_check(x: &BigRational, p: u64, target: u32) -> Result<ProductCheck> {
    let params = RingParams::prime_field(p, extend_log_precision(p, target))?;
    let mut primes = support(x)?;
    if !primes.contains(&p) {
        primes.push(p);
        primes.sort_unstable();
    }
    let mut places = Vec::new();
    for l in primes {
        places.push(abs_value_q(x, Place::Finite(l), &params)?);
    }
    places.push(abs_value_q(x, Place::Infinite, &params)?);
    let exact_product: BigRational = places.iter().map(|v| v.exact.clone()).product();
    let finite_product: BigRational = places.iter().filter(|v| v.value.is_some()).map(|v| v.exact.clone()).product();
    let mut product = QpElem::from_int(&params, 1);
    let mut log_sum = QpElem::exact_zero(&params);
    for v in &places {
        match &v.value {
            Some(q) => {
                product = product.mul(q)?;
                let unit = q.integral_residue(params.precision()).ok_or(Error::NotUnit)?;
                let u = crate::arith::ring::RingElem::from_coeffs(&params, &[unit[0] as i128])?;
                log_sum = log_sum.add(&extend_log(&u, target)?)?;
            }
            None => {
                // log of ±1 is zero; the sign enters the product directly
                product = product.mul_int(v.exact.numer().to_i128().expect("sign"));
            }
        }
    }
    let product_defect = product.defect_against(&QpElem::from_int(&params, 1))?;
    let log_sum = log_sum.truncate(target as i64);
    let log_sum_defect = match log_sum.valuation() {
        Some(v) => Valuation::Finite(v),
        None => Valuation::AtLeast(log_sum.abs_precision()),
    };
    Ok(ProductCheck { places, exact_product, finite_product, product_defect, log_sum_defect })
}
