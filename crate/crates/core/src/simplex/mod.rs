//! Exact-rational calculus on the standard simplex Δ^n = {x_i ≥ 0, Σ x_i = 1}.
//!
//! A form x^a dx_0∧⋯∧d̂x_v∧⋯∧dx_n is integrated by eliminating x_0, which
//! gives the closed form (-1)^v a_0!⋯a_n!/(|a| + n)!. The iterated-integral
//! oracle recomputes the magnitude symbolically without using it.

mod poly;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use poly::Poly;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// (-1)^v a_0!⋯a_n!/(|a| + n)! for the monomial x^a with dx_v omitted.
pub fn integrate_monomial(a: &[u32], v: usize, n: usize) -> Result<BigRational> {
    if a.len() != n + 1 || v > n {
        return Err(Error::MalformedKey(format!("exponents {a:?} with omitted index {v} on a {n}-simplex")));
    }
    let num = a.iter().fold(BigInt::one(), |acc, &x| acc * factorial(x));
    let total: u32 = a.iter().sum::<u32>() + n as u32;
    let r = BigRational::new(num, factorial(total));
    Ok(if v % 2 == 1 { -r } else { r })
}

/// ∫ x^a over Δ^n as an iterated integral after substituting
/// x_i = 1 - Σ_{j≠i} x_j, computed symbolically.
pub fn iterated_integral_oracle(a: &[u32], i: usize, n: usize) -> Result<BigRational> {
    if a.len() != n + 1 || i > n {
        return Err(Error::MalformedKey(format!("exponents {a:?} eliminating {i} on a {n}-simplex")));
    }
    // remaining coordinates y_0..y_{n-1} are x_j, j ≠ i, in order
    let others: Vec<usize> = (0..=n).filter(|&j| j != i).collect();
    let mut exps = vec![0u32; n];
    for (k, &j) in others.iter().enumerate() {
        exps[k] = a[j];
    }
    let mut eliminated = Poly::one(n);
    for k in 0..n {
        eliminated = eliminated.add(&Poly::variable(n, k).scale(&-BigRational::one()));
    }
    let mut integrand = Poly::monomial(exps, BigRational::one()).mul(&eliminated.pow(a[i]));
    // y_{n-1} runs from 0 to 1 - y_0 - ⋯ - y_{n-2}, and so on outward
    for k in (0..n).rev() {
        let mut upper = Poly::one(n);
        for j in 0..k {
            upper = upper.add(&Poly::variable(n, j).scale(&-BigRational::one()));
        }
        integrand = integrand.integrate(k, &upper);
    }
    Ok(integrand.constant_term())
}

/// Key of a monomial form: exponents a and the sorted indices S of dx factors.
pub type FormTerm = (Vec<u32>, Vec<usize>);

/// A polynomial differential form on Δ^n with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    n: usize,
    terms: BTreeMap<FormTerm, BigRational>,
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, s), c)| format!("{c}·x^{a:?} dx{s:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl RationalForm {
    pub fn zero(n: usize) -> Self {
        RationalForm { n, terms: BTreeMap::new() }
    }

    pub fn monomial(n: usize, a: Vec<u32>, s: Vec<usize>, c: BigRational) -> Result<Self> {
        let mut f = Self::zero(n);
        f.add_term(a, s, c)?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormTerm, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: Vec<u32>, s: Vec<usize>, c: BigRational) -> Result<()> {
        if a.len() != self.n + 1 || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&i| i > self.n) {
            return Err(Error::MalformedKey(format!("term x^{a:?} dx{s:?} on a {}-simplex", self.n)));
        }
        let key = (a, s);
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{}-form vs {}-form domain", self.n, other.n)));
        }
        let mut out = self.clone();
        for ((a, s), c) in &other.terms {
            out.add_term(a.clone(), s.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Integral over Δ^n; only top-degree terms (|S| = n) contribute.
    pub fn integrate(&self) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for ((a, s), c) in &self.terms {
            if s.len() != self.n {
                continue;
            }
            let v = (0..=self.n).find(|i| !s.contains(i)).expect("one index is omitted");
            total += c * integrate_monomial(a, v, self.n)?;
        }
        Ok(total)
    }
}

/// Restriction to the face x_i = 0, relabelling the remaining coordinates in
/// order.
pub fn face_restrict(w: &RationalForm, i: usize) -> Result<RationalForm> {
    if w.n == 0 || i > w.n {
        return Err(Error::MalformedKey(format!("face {i} of a {}-simplex", w.n)));
    }
    let mut out = RationalForm::zero(w.n - 1);
    for ((a, s), c) in &w.terms {
        if a[i] > 0 || s.contains(&i) {
            continue;
        }
        let mut a2 = a.clone();
        a2.remove(i);
        let s2 = s.iter().map(|&j| if j > i { j - 1 } else { j }).collect();
        out.add_term(a2, s2, c.clone())?;
    }
    Ok(out)
}

/// Exterior derivative: x^a dx_S ↦ Σ_j a_j x^(a - e_j) dx_j ∧ dx_S.
pub fn exterior_derivative_exact(w: &RationalForm) -> Result<RationalForm> {
    let mut out = RationalForm::zero(w.n);
    for ((a, s), c) in &w.terms {
        for j in 0..=w.n {
            if a[j] == 0 || s.contains(&j) {
                continue;
            }
            let below = s.iter().filter(|&&k| k < j).count();
            let mut a2 = a.clone();
            a2[j] -= 1;
            let mut s2 = s.clone();
            s2.insert(below, j);
            let mut coeff = c * BigRational::from_integer(BigInt::from(a[j]));
            if below % 2 == 1 {
                coeff = -coeff;
            }
            out.add_term(a2, s2, coeff)?;
        }
    }
    Ok(out)
}

/// Both sides of Stokes' theorem for x^a dx_S on Δ^n with S omitting u < v:
/// Σ_i (-1)^i ∫_{x_i = 0} ω and ∫ dω.
pub fn stokes_check(a: &[u32], u: usize, v: usize) -> Result<(BigRational, BigRational)> {
    let n = a.len().checked_sub(1).ok_or_else(|| Error::MalformedKey("empty exponent vector".into()))?;
    if !(u < v && v <= n) || n < 2 {
        return Err(Error::MalformedKey(format!("omitted pair ({u}, {v}) on a {n}-simplex")));
    }
    let s: Vec<usize> = (0..=n).filter(|&i| i != u && i != v).collect();
    let w = RationalForm::monomial(n, a.to_vec(), s, BigRational::one())?;
    let mut lhs = BigRational::zero();
    for i in 0..=n {
        let face = face_restrict(&w, i)?.integrate()?;
        if i % 2 == 1 {
            lhs -= face;
        } else {
            lhs += face;
        }
    }
    let rhs = exterior_derivative_exact(&w)?.integrate()?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(integrate_monomial(&[0, 0, 0, 0], 0, 3).unwrap(), q(1, 6));
        assert_eq!(integrate_monomial(&[1, 1, 0, 0], 2, 3).unwrap(), q(1, 120));
        assert_eq!(integrate_monomial(&[1, 0, 0, 0], 1, 3).unwrap(), q(-1, 24));
        assert!(integrate_monomial(&[1, 0], 0, 3).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(iterated_integral_oracle(&[0, 0, 0, 0], 2, 3).unwrap(), q(1, 6));
        assert_eq!(iterated_integral_oracle(&[1, 0], 1, 1).unwrap(), q(1, 2));
        assert_eq!(iterated_integral_oracle(&[2, 1, 3], 0, 2).unwrap(), q(2 * 6, 40320));
    }

    #[test]
    fn face_examples() {
        let w = RationalForm::monomial(4, vec![0, 1, 0, 0, 0], vec![2, 3, 4], BigRational::one()).unwrap();
        let f = face_restrict(&w, 0).unwrap();
        assert_eq!(f, RationalForm::monomial(3, vec![1, 0, 0, 0], vec![1, 2, 3], BigRational::one()).unwrap());
        assert!(face_restrict(&w, 1).unwrap().is_zero());
        assert!(face_restrict(&w, 2).unwrap().is_zero());
    }

    #[test]
    fn derivative_examples() {
        let w = RationalForm::monomial(4, vec![1, 0, 0, 0, 0], vec![1, 2, 3], BigRational::one()).unwrap();
        let dw = exterior_derivative_exact(&w).unwrap();
        assert_eq!(dw, RationalForm::monomial(4, vec![0; 5], vec![0, 1, 2, 3], BigRational::one()).unwrap());
        let top = RationalForm::monomial(2, vec![3, 1, 0], vec![0, 1], BigRational::one()).unwrap();
        assert!(exterior_derivative_exact(&top).unwrap().is_zero());
    }

    #[test]
    fn stokes_cases() {
        assert_eq!(stokes_check(&[1, 0, 0, 0, 0], 0, 4).unwrap(), (q(1, 24), q(1, 24)));
        assert_eq!(stokes_check(&[1, 0, 0, 0, 1], 0, 4).unwrap(), (q(0, 1), q(0, 1)));
        assert_eq!(stokes_check(&[0, 0, 0, 0, 0], 0, 4).unwrap(), (q(0, 1), q(0, 1)));
        assert!(stokes_check(&[0, 0, 0, 0, 0], 3, 1).is_err());
    }
}
