//! The power-series cocycle on tuples in the congruence subgroup
//! G_{N,e} = {g ∈ GL_N(O_F) : g ≡ 1 mod p^e}.
//!
//! For g_i = 1 + Y_i set ν = 1 + Σ Y_i x_i. The cocycle value is the simplex
//! integral of Trace (ν^{-1} dν)^{∧(2s-1)}, computed in the free algebra of
//! truncated series.

use std::sync::Arc;

use rand::Rng;

use crate::arith::params::RingParams;
use crate::arith::qp::{QpElem, Valuation};
use crate::arith::ring::RingElem;
use crate::arith::valuation::{check_convergence, factorial_valuation, truncation_degree};
use crate::error::{Error, Result};
use crate::matforms::{phi, phi_wedge, FormKey, FormSeries, OMatrix};

/// A tuple of matrices congruent to the identity mod p^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTuple {
    s: u32,
    e: u32,
    elems: Vec<OMatrix>,
}

impl GroupTuple {
    pub fn new(s: u32, e: u32, elems: Vec<OMatrix>) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("s must be >= 1".into()));
        }
        let first = elems.first().ok_or_else(|| Error::InvalidParams("empty tuple".into()))?;
        check_convergence(first.params().p(), e)?;
        for g in &elems {
            if g.dim() != first.dim() {
                return Err(Error::DimensionMismatch("tuple entries differ in size".into()));
            }
            if g.params() != first.params() {
                return Err(Error::ParamMismatch);
            }
            if !g.is_one_mod(e) {
                return Err(Error::NotCongruent(e));
            }
        }
        Ok(GroupTuple { s, e, elems })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn elems(&self) -> &[OMatrix] {
        &self.elems
    }

    pub fn params(&self) -> &Arc<RingParams> {
        self.elems[0].params()
    }

    pub fn dim(&self) -> usize {
        self.elems[0].dim()
    }

    /// The same tuple with entry `i` removed.
    pub fn omit(&self, i: usize) -> GroupTuple {
        let mut elems = self.elems.clone();
        elems.remove(i);
        GroupTuple { s: self.s, e: self.e, elems }
    }

    /// Applies a map entrywise, re-checking congruence.
    pub fn map(&self, f: impl Fn(&OMatrix) -> Result<OMatrix>) -> Result<GroupTuple> {
        let elems = self.elems.iter().map(f).collect::<Result<Vec<_>>>()?;
        GroupTuple::new(self.s, self.e, elems)
    }
}

/// Tuning knobs for [`cocycle_eval_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Replaces the automatic truncation degree.
    pub degree_cap: Option<u32>,
    /// Digits added on top of target plus guard.
    pub extra_precision: u32,
}

/// A cocycle value with the truncation degree and working precision used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleValue {
    pub value: QpElem,
    pub degree_cap: u32,
    pub work_precision: u32,
}

/// Truncation degree and working precision for a target.
pub fn work_parameters(p: u64, e: u32, s: u32, target: u32, opts: &EvalOptions) -> Result<(u32, u32)> {
    let auto = truncation_degree(target, e, s, p)?;
    let cap = opts.degree_cap.unwrap_or(auto);
    let guard = factorial_valuation((cap + 2 * s - 1) as u64, p) as u32;
    Ok((cap, target + guard + opts.extra_precision))
}

/// ν = 1 + Σ (g_i - 1) x_i as a 0-form of degree at most one.
pub fn build_nu(t: &GroupTuple, cap: u32) -> Result<FormSeries> {
    let params = t.params();
    let n = t.dim();
    let nvars = t.elems.len();
    let mut nu = FormSeries::constant(&OMatrix::identity(params, n), nvars, cap)?;
    let one = OMatrix::identity(params, n);
    for (i, g) in t.elems.iter().enumerate() {
        let mut a = vec![0; nvars];
        a[i] = 1;
        nu.add_term(FormKey::new(&a, &[])?, &g.sub(&one)?)?;
    }
    Ok(nu)
}

/// dν = Σ (g_i - 1) dx_i.
fn build_dnu(t: &GroupTuple, cap: u32) -> Result<FormSeries> {
    let params = t.params();
    let n = t.dim();
    let nvars = t.elems.len();
    let one = OMatrix::identity(params, n);
    let mut dnu = FormSeries::zero(params, nvars, n, cap)?;
    for (i, g) in t.elems.iter().enumerate() {
        dnu.add_term(FormKey::new(&vec![0; nvars], &[i])?, &g.sub(&one)?)?;
    }
    Ok(dnu)
}

/// ν^{-1} = Σ_k (-B)^k with B = ν - 1, truncated at the cap.
pub fn nu_inverse(nu: &FormSeries) -> Result<FormSeries> {
    let one = OMatrix::identity(nu.params(), nu.dim());
    let mut minus_b = nu.neg();
    minus_b.add_term(FormKey::new(&vec![0; nu.nvars()], &[])?, &one)?;
    let mut power = FormSeries::constant(&one, nu.nvars(), nu.cap())?;
    let mut sum = power.clone();
    for _ in 0..nu.cap() {
        power = power.wedge(&minus_b)?;
        if power.is_empty() {
            break;
        }
        sum = sum.add(&power)?;
    }
    Ok(sum)
}

/// ω = ν^{-1} dν.
pub fn maurer_cartan_form(t: &GroupTuple, cap: u32) -> Result<FormSeries> {
    nu_inverse(&build_nu(t, cap)?)?.wedge(&build_dnu(t, cap)?)
}

/// ω^{∧k} for a tuple, computed left to right.
pub fn maurer_cartan_power(t: &GroupTuple, k: u32, cap: u32) -> Result<FormSeries> {
    let omega = maurer_cartan_form(t, cap)?;
    let mut w = omega.clone();
    for _ in 1..k {
        w = w.wedge(&omega)?;
    }
    Ok(w)
}

/// The cocycle on a tuple of length 2s, correct mod p^target.
pub fn cocycle_eval(t: &GroupTuple, target: u32) -> Result<QpElem> {
    Ok(cocycle_eval_with(t, target, &EvalOptions::default())?.value)
}

pub fn cocycle_eval_with(t: &GroupTuple, target: u32, opts: &EvalOptions) -> Result<CocycleValue> {
    let s = t.s;
    if t.elems.len() != 2 * s as usize {
        return Err(Error::DimensionMismatch(format!("expected {} entries, got {}", 2 * s, t.elems.len())));
    }
    let params = t.params();
    let (cap, work) = work_parameters(params.p(), t.e, s, target, opts)?;
    if work > params.precision() {
        return Err(Error::PrecisionExhausted { needed: work, available: params.precision() });
    }
    let wp = params.with_precision(work)?;
    let local = t.map(|g| g.to_params(&wp))?;
    let value = if s == 1 {
        phi(&maurer_cartan_power(&local, 1, cap)?)?
    } else {
        // the last wedge is folded into the integral
        let omega = maurer_cartan_form(&local, cap)?;
        phi_wedge(&maurer_cartan_power(&local, 2 * s - 2, cap)?, &omega)?
    }
    .truncate(target as i64);
    Ok(CocycleValue { value, degree_cap: cap, work_precision: work })
}

fn valuation_of(x: &QpElem) -> Valuation {
    match x.valuation() {
        Some(v) => Valuation::Finite(v),
        None if x.is_exact_zero() => Valuation::Infinite,
        None => Valuation::AtLeast(x.abs_precision()),
    }
}

/// Valuation of the alternating face sum Σ (-1)^i Φ(g_0, …, ĝ_i, …, g_2s).
pub fn cocycle_defect(t: &GroupTuple, target: u32) -> Result<Valuation> {
    cocycle_defect_with(t, target, &EvalOptions::default())
}

pub fn cocycle_defect_with(t: &GroupTuple, target: u32, opts: &EvalOptions) -> Result<Valuation> {
    let n = 2 * t.s as usize + 1;
    if t.elems.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} entries, got {}", t.elems.len())));
    }
    let mut sum = QpElem::exact_zero(t.params());
    for i in 0..n {
        let v = cocycle_eval_with(&t.omit(i), target, opts)?.value;
        sum = if i % 2 == 1 { sum.sub(&v)? } else { sum.add(&v)? };
    }
    Ok(valuation_of(&sum))
}

/// A transformation of tuples under which the cocycle is invariant.
#[derive(Clone, Debug)]
pub enum Transform {
    /// g ↦ left·g·right with both factors congruent to 1 mod p^e.
    Translate { left: OMatrix, right: OMatrix },
    /// g ↦ y·g·y^{-1} with y invertible.
    Conjugate(OMatrix),
}

impl Transform {
    pub fn apply(&self, t: &GroupTuple) -> Result<GroupTuple> {
        match self {
            Transform::Translate { left, right } => {
                if !left.is_one_mod(t.e) || !right.is_one_mod(t.e) {
                    return Err(Error::NotCongruent(t.e));
                }
                t.map(|g| left.mul(g)?.mul(right))
            }
            Transform::Conjugate(y) => {
                let yi = y.inverse()?;
                t.map(|g| y.mul(g)?.mul(&yi))
            }
        }
    }
}

/// Valuation of Φ(transformed tuple) - Φ(tuple).
pub fn invariance_defect(t: &GroupTuple, transform: &Transform, target: u32) -> Result<Valuation> {
    let moved = transform.apply(t)?;
    if moved == *t {
        return Ok(Valuation::Infinite);
    }
    cocycle_eval(&moved, target)?.defect_against(&cocycle_eval(t, target)?)
}

/// Valuation of σ(Φ(t)) - Φ(σ t) for the Frobenius σ.
pub fn galois_defect(t: &GroupTuple, target: u32) -> Result<Valuation> {
    let moved = t.map(|g| g.frobenius())?;
    let lhs = cocycle_eval(t, target)?.frobenius()?;
    lhs.defect_against(&cocycle_eval(&moved, target)?)
}

/// A random N×N matrix 1 + p^e X with X uniform over O_F / p^M.
pub fn random_congruent<R: Rng + ?Sized>(params: &Arc<RingParams>, n: usize, e: u32, rng: &mut R) -> OMatrix {
    let m = params.pow_p(params.precision());
    let scale = if e >= params.precision() { 0 } else { params.pow_p(e) } as i128;
    let mut g = OMatrix::identity(params, n);
    for i in 0..n {
        for j in 0..n {
            let coeffs: Vec<i128> = (0..params.degree()).map(|_| rng.gen_range(0..m) as i128 * scale).collect();
            let x = RingElem::from_coeffs(params, &coeffs).expect("degree matches");
            g.set(i, j, &g.get(i, j).add(&x).expect("same ring")).expect("same ring");
        }
    }
    g
}

/// A random element of GL_N(O_F / p^M).
pub fn random_invertible<R: Rng + ?Sized>(params: &Arc<RingParams>, n: usize, rng: &mut R) -> OMatrix {
    let m = params.pow_p(params.precision());
    loop {
        let mut g = OMatrix::zero(params, n);
        for i in 0..n {
            for j in 0..n {
                let coeffs: Vec<i128> = (0..params.degree()).map(|_| rng.gen_range(0..m) as i128).collect();
                g.set(i, j, &RingElem::from_coeffs(params, &coeffs).expect("degree matches")).expect("same ring");
            }
        }
        if g.inverse().is_ok() {
            return g;
        }
    }
}
