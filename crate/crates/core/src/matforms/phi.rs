use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::arith::params::RingParams;
use crate::arith::qp::QpElem;
use crate::arith::ring::RingElem;
use crate::error::{Error, Result};
use crate::matforms::form::{FormKey, FormSeries};

struct Factorials(Vec<BigUint>);

impl Factorials {
    fn new() -> Self {
        Factorials(vec![BigUint::one()])
    }

    fn get(&mut self, n: usize) -> &BigUint {
        while self.0.len() <= n {
            let k = self.0.len();
            let next = &self.0[k - 1] * BigUint::from(k);
            self.0.push(next);
        }
        &self.0[n]
    }
}

/// a_0!⋯a_n! / (|a| + n)! for an exponent vector of length n + 1.
pub fn simplex_weight(a: &[u32]) -> BigRational {
    let mut f = Factorials::new();
    weight_with(&mut f, a)
}

fn weight_with(f: &mut Factorials, a: &[u32]) -> BigRational {
    let n = a.len().saturating_sub(1);
    let total: usize = a.iter().map(|&x| x as usize).sum::<usize>() + n;
    let mut num = BigUint::one();
    for &x in a {
        num *= f.get(x as usize);
    }
    BigRational::new(BigInt::from(num), BigInt::from(f.get(total).clone()))
}

fn omitted_index(key: &FormKey, nvars: usize) -> Result<usize> {
    if key.form_degree() as usize + 1 != nvars {
        return Err(Error::MalformedKey(format!(
            "integrand term {key:?} has differential degree {}, expected {}",
            key.form_degree(),
            nvars - 1
        )));
    }
    Ok((0..nvars).find(|&i| !key.has_dx(i)).expect("one index is missing"))
}

/// The term-by-term simplex integral Σ (-1)^u Trace C · a!/(|a| + n)! of a
/// top-degree form, where u is the index missing from the differential part.
/// The result is known to absolute precision M minus the largest denominator
/// valuation among the weights.
pub fn phi(f: &FormSeries) -> Result<QpElem> {
    let traces: Vec<(FormKey, RingElem)> = f.terms().map(|(k, m)| (*k, m.trace())).collect();
    integrate_traces(f.params(), f.nvars(), traces.iter().map(|(k, t)| (k, t.coeffs())))
}

/// `phi(f ∧ g)` without materializing the product.
pub fn phi_wedge(f: &FormSeries, g: &FormSeries) -> Result<QpElem> {
    let traces = f.wedge_traces(g)?;
    let mut keys: Vec<&FormKey> = traces.keys().collect();
    keys.sort();
    integrate_traces(f.params(), f.nvars(), keys.into_iter().map(|k| (k, traces[k].as_slice())))
}

fn integrate_traces<'a>(
    params: &Arc<RingParams>,
    nvars: usize,
    traces: impl Iterator<Item = (&'a FormKey, &'a [u64])>,
) -> Result<QpElem> {
    let prec = params.precision();
    let zm = params.zmod(prec);
    let mut facts = Factorials::new();
    let mut cache: FxHashMap<u64, (i64, u64)> = FxHashMap::default();
    let mut terms = Vec::new();
    let mut guard = 0i64;
    for (key, trace) in traces {
        if trace.iter().all(|&c| c == 0) {
            continue;
        }
        let u = omitted_index(key, nvars)?;
        let (v, unit) = *cache.entry(key.exps_word()).or_insert_with(|| {
            let w = QpElem::from_rational(params, &weight_with(&mut facts, &key.exponents(nvars)));
            (w.valuation().expect("weights are nonzero"), w.unit()[0])
        });
        guard = guard.max(-v);
        terms.push((u % 2 == 1, v, unit, trace));
    }
    let mut acc = vec![0u64; params.degree()];
    for (negate, v, unit, trace) in terms {
        let shift = v + guard;
        if shift >= prec as i64 {
            continue;
        }
        let scale = zm.mul(unit, params.pow_p(shift as u32));
        for (slot, &c) in acc.iter_mut().zip(trace) {
            let t = zm.mul(c, scale);
            *slot = if negate { zm.sub(*slot, t) } else { zm.add(*slot, t) };
        }
    }
    Ok(QpElem::from_fixed(params, -guard, &acc, prec))
}

/// Exact rational value of the integral over ℚ_p, lifting each trace to the
/// symmetric interval around zero. Meaningful when coefficients are small
/// integers stored at ample precision.
pub fn phi_exact(f: &FormSeries) -> Result<BigRational> {
    let params = f.params();
    if params.degree() != 1 {
        return Err(Error::InvalidParams("exact integration needs the prime field".into()));
    }
    let m = params.pow_p(params.precision()) as i128;
    let mut facts = Factorials::new();
    let mut total = BigRational::zero();
    for (key, c) in f.terms() {
        let u = omitted_index(key, f.nvars())?;
        let mut t = c.trace().coeffs()[0] as i128;
        if t > m / 2 {
            t -= m;
        }
        let w = weight_with(&mut facts, &key.exponents(f.nvars())) * BigInt::from(t);
        if u % 2 == 1 {
            total -= w;
        } else {
            total += w;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::params::RingParams;
    use crate::matforms::matrix::OMatrix;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn agrees(x: &QpElem, r: &BigRational) -> bool {
        let expected = QpElem::from_rational(x.params(), r);
        x.defect_against(&expected).unwrap().meets(x.abs_precision())
    }

    #[test]
    fn single_volume_term() {
        let params = RingParams::prime_field(3, 8).unwrap();
        let mut f = FormSeries::zero(&params, 4, 1, 10).unwrap();
        let one = OMatrix::identity(&params, 1);
        f.add_term(FormKey::new(&[0, 0, 0, 0], &[1, 2, 3]).unwrap(), &one).unwrap();
        assert_eq!(phi_exact(&f).unwrap(), q(1, 6));
        let v = phi(&f).unwrap();
        assert!(agrees(&v, &q(1, 6)));
        assert_eq!(v.valuation(), Some(-1));
        assert_eq!(v.abs_precision(), 7);
    }

    #[test]
    fn empty_series_is_zero() {
        let params = RingParams::prime_field(3, 8).unwrap();
        let f = FormSeries::zero(&params, 4, 2, 10).unwrap();
        assert!(phi(&f).unwrap().is_zero());
        assert_eq!(phi_exact(&f).unwrap(), q(0, 1));
    }

    #[test]
    fn rejects_wrong_degree() {
        let params = RingParams::prime_field(3, 8).unwrap();
        let mut f = FormSeries::zero(&params, 4, 1, 10).unwrap();
        f.add_term(FormKey::new(&[0, 0, 0, 0], &[1, 2]).unwrap(), &OMatrix::identity(&params, 1)).unwrap();
        assert!(matches!(phi(&f), Err(Error::MalformedKey(_))));
    }

    #[test]
    fn weights() {
        assert_eq!(simplex_weight(&[1, 1, 0, 0]), q(1, 120));
        assert_eq!(simplex_weight(&[1, 0, 0, 0]), q(1, 24));
        assert_eq!(simplex_weight(&[2, 0]), q(1, 3));
    }

    #[test]
    fn signs_and_traces() {
        let params = RingParams::prime_field(5, 10).unwrap();
        let mut f = FormSeries::zero(&params, 4, 2, 10).unwrap();
        let c = OMatrix::from_ints(&params, &[vec![3, 1], vec![4, 2]]).unwrap();
        f.add_term(FormKey::new(&[1, 0, 0, 0], &[0, 2, 3]).unwrap(), &c).unwrap();
        // u = 1: -(3+2)/24
        assert_eq!(phi_exact(&f).unwrap(), q(-5, 24));
        assert!(agrees(&phi(&f).unwrap(), &q(-5, 24)));
    }
}
