use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padreg::arith::log::{default_log_exponent, extend_log_with_exponent};
use padreg::arith::valuation::{factorial_valuation_legendre, int_valuation};
use padreg::arith::{extend_log, factorial_valuation, padic_log, QpElem, RingElem, RingParams, Valuation};
use padreg::cocycle::{cocycle_eval, maurer_cartan_power, random_congruent, random_invertible, GroupTuple};
use padreg::homology::{
    bar_differential, closure, find_bounding_chain, transfer_t, BarChain, CosetSystem, Group, MatrixGroup, Perm,
    PermGroup,
};
use padreg::matforms::{mat_inverse_one_plus, phi, phi_exact, phi_wedge, FormKey, FormSeries, OMatrix};
use padreg::regulator::{hat_r, index, pair, product_formula_check, r_nf, RegulatorConfig};
use padreg::simplex::integrate_monomial;

fn field(p: u64, m: u32) -> Arc<RingParams> {
    RingParams::prime_field(p, m).unwrap()
}

fn gaussian() -> Arc<RingParams> {
    RingParams::new(3, 10, Some(vec![1, 0, 1])).unwrap()
}

fn cubic() -> Arc<RingParams> {
    RingParams::new(2, 20, Some(vec![1, 1, 0, 1])).unwrap()
}

fn random_elem(params: &Arc<RingParams>, rng: &mut ChaCha8Rng) -> RingElem {
    let m = params.pow_p(params.precision()) as i128;
    let coeffs: Vec<i128> = (0..params.degree()).map(|_| rng.gen_range(0..m)).collect();
    RingElem::from_coeffs(params, &coeffs).unwrap()
}

fn meets(v: Valuation, target: u32) -> bool {
    v.meets(target as i64)
}

/// Σ (-1)^{k+1} y^k / k, stopping once terms are divisible by p^(target + 4).
fn log_series(y: &BigInt, p: u64, target: u32) -> BigRational {
    let mut sum = BigRational::zero();
    let mut power = BigInt::one();
    for k in 1u32..400 {
        power *= y;
        let term = BigRational::new(power.clone(), BigInt::from(k));
        sum = if k % 2 == 1 { sum + term } else { sum - term };
        if k > 4 * (target + 4) && k as i64 - int_valuation(k as u128, p) as i64 > (target + 4) as i64 {
            break;
        }
    }
    sum
}

#[test]
fn log_of_four_at_three() {
    let params = field(3, 16);
    let value = padic_log(&RingElem::from_int(&params, 4), 1, 10).unwrap();
    let oracle = QpElem::from_rational(&params, &log_series(&BigInt::from(3), 3, 10));
    assert!(meets(value.defect_against(&oracle).unwrap(), 10));
}

#[test]
fn extended_log_of_two_at_five() {
    let params = field(5, 16);
    let value = extend_log(&RingElem::from_int(&params, 2), 8).unwrap();
    let log16 = log_series(&BigInt::from(15), 5, 10);
    let oracle = QpElem::from_rational(&params, &(log16 / BigInt::from(4)));
    assert!(meets(value.defect_against(&oracle).unwrap(), 8));
}

#[test]
fn index_ratio_by_enumeration() {
    for (n, p) in [(1usize, 5u64), (2, 2), (2, 3)] {
        let params = field(p, 3);
        let one = CosetSystem::congruence(&params, n, 1).unwrap().index();
        let two = CosetSystem::congruence(&params, n, 2).unwrap().index();
        assert_eq!(BigUint::from(one), index(n as u32, p, 1, 1, 1).unwrap());
        assert_eq!(BigUint::from(two), index(n as u32, p, 1, 2, 1).unwrap());
        assert_eq!(two / one, p.pow((n * n) as u32) as usize);
    }
}

fn check_coset_identities<G: Group>(cs: &CosetSystem<G>, pairs: &[(G::Elem, G::Elem)]) {
    let group = cs.group();
    for (g, g2) in pairs {
        let pg = cs.coset_permutation(g).unwrap();
        let pg2 = cs.coset_permutation(g2).unwrap();
        let pgg = cs.coset_permutation(&group.mul(g, g2)).unwrap();
        for i in 0..cs.index() {
            assert_eq!(pgg[i], pg2[pg[i]]);
            let (h1, _) = cs.coset_data(i, g).unwrap();
            let (h12, _) = cs.coset_data(i, &group.mul(g, g2)).unwrap();
            let (h2, _) = cs.coset_data(pg[i], g2).unwrap();
            assert_eq!(group.mul(&group.inv(&h1), &h12), h2);
        }
    }
}

#[test]
fn coset_identities_on_permutation_groups() {
    let s4 = PermGroup::new(4).unwrap();
    let gens = [s4.from_cycles(&[&[0, 1, 2, 3]]).unwrap(), s4.from_cycles(&[&[0, 1]]).unwrap()];
    let elements = closure(&s4, &gens);
    let pairs: Vec<(Perm, Perm)> =
        elements.iter().flat_map(|a| elements.iter().map(move |b| (a.clone(), b.clone()))).collect();
    for sub in [
        vec![s4.from_cycles(&[&[0, 1, 2]]).unwrap(), s4.from_cycles(&[&[0, 1], &[2, 3]]).unwrap()],
        vec![s4.from_cycles(&[&[0, 1, 2, 3]]).unwrap(), s4.from_cycles(&[&[0, 2]]).unwrap()],
    ] {
        check_coset_identities(&CosetSystem::from_permutations(4, &gens, &sub).unwrap(), &pairs);
    }
}

#[test]
fn coset_identities_on_matrices() {
    let params = field(3, 2);
    let cs = CosetSystem::congruence(&params, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<_> =
        (0..40).map(|_| (random_invertible(&params, 2, &mut rng), random_invertible(&params, 2, &mut rng))).collect();
    check_coset_identities(&cs, &pairs);
}

#[test]
fn transfer_is_independent_of_representatives() {
    let s3 = PermGroup::new(3).unwrap();
    let gens = [s3.from_cycles(&[&[0, 1, 2]]).unwrap(), s3.from_cycles(&[&[0, 1]]).unwrap()];
    let sub = [s3.from_cycles(&[&[0, 1, 2]]).unwrap()];
    let first = CosetSystem::with_reps(3, &gens, &sub, vec![s3.identity(), s3.from_cycles(&[&[0, 1]]).unwrap()]).unwrap();
    let second = CosetSystem::with_reps(3, &gens, &sub, vec![s3.identity(), s3.from_cycles(&[&[1, 2]]).unwrap()]).unwrap();
    let h_elements = closure(&s3, &sub);
    let g_elements = closure(&s3, &gens);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let mut c = BarChain::zero(1);
        for _ in 0..3 {
            c.add_term(vec![g_elements[rng.gen_range(0..6)].clone()], rng.gen_range(-3..=3)).unwrap();
        }
        let diff = transfer_t(&first, &c).unwrap().sub(&transfer_t(&second, &c).unwrap()).unwrap();
        let x = find_bounding_chain(&s3, &h_elements, &diff).unwrap().expect("difference bounds");
        assert_eq!(bar_differential(&s3, &x).unwrap(), diff);
    }
}

#[test]
fn pairing_kills_boundaries_and_is_linear() {
    let params = field(3, 16);
    let cfg = RegulatorConfig::new(&params, 1, 1, 2, 8).unwrap();
    let group = MatrixGroup::new(&params, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut g = || random_congruent(&params, 2, 1, &mut rng);
    for _ in 0..5 {
        let mut c = BarChain::zero(2);
        c.add_term(vec![g(), g()], 2).unwrap();
        c.add_term(vec![g(), g()], -1).unwrap();
        let boundary = bar_differential(&group, &c).unwrap();
        assert!(meets(pair(&cfg, &boundary, true).unwrap().defect_against(&QpElem::exact_zero(&params)).unwrap(), 8));

        let a = BarChain::basis(vec![g()]);
        let b = BarChain::basis(vec![g()]).scale(3);
        let sum = pair(&cfg, &a.add(&b).unwrap(), false).unwrap();
        let parts = pair(&cfg, &a, false).unwrap().add(&pair(&cfg, &b, false).unwrap()).unwrap();
        assert!(meets(sum.defect_against(&parts).unwrap(), 8));
    }
}

#[test]
fn normalized_s1_regulator_is_minus_log() {
    let params = field(5, 16);
    let cfg = RegulatorConfig::new(&params, 1, 1, 1, 6).unwrap();
    for u in [2i128, 3, 7, 123] {
        let m = OMatrix::from_ints(&params, &[vec![u]]).unwrap();
        let value = hat_r(&r_nf(&cfg, &BarChain::basis(vec![m])).unwrap(), 1).unwrap();
        let log = extend_log(&RingElem::from_int(&params, u), 6).unwrap();
        assert!(meets(value.add(&log).unwrap().defect_against(&QpElem::exact_zero(&params)).unwrap(), 6));
    }
}

#[test]
fn s1_diagonal_tuples_reduce_to_log() {
    let params = field(3, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let u: Vec<i128> = (0..2).map(|_| 1 + 3 * rng.gen_range(0..10_000i128)).collect();
        let elems = u.iter().map(|&x| OMatrix::from_ints(&params, &[vec![x, 0], vec![0, 1]]).unwrap()).collect();
        let value = cocycle_eval(&GroupTuple::new(1, 1, elems).unwrap(), 8).unwrap();
        let ratio = RingElem::from_int(&params, u[1]).mul(&RingElem::from_int(&params, u[0]).inv().unwrap()).unwrap();
        let log = extend_log(&ratio, 8).unwrap();
        assert!(meets(value.defect_against(&log).unwrap(), 8));
    }
}

#[test]
fn s2_cocycle_alternates_under_permutations() {
    let params = field(3, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let elems: Vec<OMatrix> = (0..4).map(|_| random_congruent(&params, 2, 1, &mut rng)).collect();
    let base = cocycle_eval(&GroupTuple::new(2, 1, elems.clone()).unwrap(), 4).unwrap();
    for (perm, odd) in [([1, 0, 2, 3], true), ([1, 2, 3, 0], true), ([2, 3, 0, 1], false)] {
        let moved: Vec<OMatrix> = perm.iter().map(|&i| elems[i].clone()).collect();
        let value = cocycle_eval(&GroupTuple::new(2, 1, moved).unwrap(), 4).unwrap();
        let expected = if odd { base.neg() } else { base.clone() };
        assert!(meets(value.defect_against(&expected).unwrap(), 4), "{perm:?}");
    }
}

#[test]
fn trace_cyclicity_kills_exact_integrand() {
    // d(ω^{2s-1}) on 2s + 1 variables integrates to zero
    for (s, target) in [(1u32, 8u32), (2, 3)] {
        let params = field(3, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(8 + s as u64);
        let t = GroupTuple::new(s, 1, (0..2 * s + 1).map(|_| random_congruent(&params, 2, 1, &mut rng)).collect())
            .unwrap();
        let w = maurer_cartan_power(&t, 2 * s - 1, 8 + 2 * target).unwrap();
        let value = phi(&w.d()).unwrap();
        assert!(meets(value.defect_against(&QpElem::exact_zero(&params)).unwrap(), target), "s = {s}");
    }
}

fn arb_form(nvars: usize, degree: usize, max_a: u32, cap: u32) -> impl Strategy<Value = Vec<(Vec<u32>, Vec<usize>, [i64; 4])>> {
    let term = (
        prop::collection::vec(0..=max_a, nvars),
        prop::sample::subsequence((0..nvars).collect::<Vec<_>>(), degree),
        prop::array::uniform4(-40i64..=40),
    );
    prop::collection::vec(term, 1..5).prop_map(move |ts| {
        ts.into_iter()
            .map(|(mut a, s, c)| {
                while a.iter().sum::<u32>() > cap {
                    let i = a.iter().position(|&x| x > 0).unwrap();
                    a[i] -= 1;
                }
                (a, s, c)
            })
            .collect()
    })
}

fn build(params: &Arc<RingParams>, nvars: usize, cap: u32, terms: &[(Vec<u32>, Vec<usize>, [i64; 4])]) -> FormSeries {
    let mut f = FormSeries::zero(params, nvars, 2, cap).unwrap();
    for (a, s, c) in terms {
        let m = OMatrix::from_ints(params, &[vec![c[0] as i128, c[1] as i128], vec![c[2] as i128, c[3] as i128]]).unwrap();
        f.add_term(FormKey::new(a, s).unwrap(), &m).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorial_formulas_agree(l in 0u64..1_000_000, pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        prop_assert_eq!(factorial_valuation(l, p), factorial_valuation_legendre(l, p));
    }

    #[test]
    fn ultrametric(a in -10_000i64..10_000, b in -10_000i64..10_000, da in 1i64..50, db in 1i64..50) {
        let params = field(3, 20);
        let x = QpElem::from_rational(&params, &BigRational::new(a.into(), da.into()));
        let y = QpElem::from_rational(&params, &BigRational::new(b.into(), db.into()));
        let sum = x.add(&y).unwrap();
        if let (Some(vx), Some(vy)) = (x.valuation(), y.valuation()) {
            match sum.valuation() {
                Some(vs) => {
                    prop_assert!(vs >= vx.min(vy));
                    if vx != vy {
                        prop_assert_eq!(vs, vx.min(vy));
                    }
                }
                None => prop_assert!(sum.abs_precision() >= vx.min(vy)),
            }
        }
    }

    #[test]
    fn log_is_a_homomorphism(seed in any::<u64>(), gauss in any::<bool>()) {
        let params = if gauss { gaussian() } else { field(5, 10) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = params.p();
        let one_plus = |rng: &mut ChaCha8Rng| {
            RingElem::one(&params).add(&random_elem(&params, rng).scale(p as i128)).unwrap()
        };
        let (u, v) = (one_plus(&mut rng), one_plus(&mut rng));
        let lhs = padic_log(&u.mul(&v).unwrap(), 1, 6).unwrap();
        let rhs = padic_log(&u, 1, 6).unwrap().add(&padic_log(&v, 1, 6).unwrap()).unwrap();
        prop_assert!(meets(lhs.defect_against(&rhs).unwrap(), 6));
    }

    #[test]
    fn extended_log_ignores_the_exponent(u in 1i128..100_000) {
        prop_assume!(u % 3 != 0);
        let params = field(3, 20);
        let x = RingElem::from_int(&params, u);
        let k = default_log_exponent(3, 1);
        let a = extend_log_with_exponent(&x, k, 8).unwrap();
        let b = extend_log_with_exponent(&x, 3 * k, 8).unwrap();
        prop_assert!(meets(a.defect_against(&b).unwrap(), 8));
    }

    #[test]
    fn frobenius_is_a_ring_automorphism_of_order_d(seed in any::<u64>(), cubic_field in any::<bool>()) {
        let params = if cubic_field { cubic() } else { gaussian() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_elem(&params, &mut rng), random_elem(&params, &mut rng));
        let f = |z: &RingElem| z.frobenius().unwrap();
        prop_assert_eq!(f(&x.add(&y).unwrap()), f(&x).add(&f(&y)).unwrap());
        prop_assert_eq!(f(&x.mul(&y).unwrap()), f(&x).mul(&f(&y)).unwrap());
        let mut z = x.clone();
        for _ in 0..params.degree() {
            z = f(&z);
        }
        prop_assert_eq!(z, x);
    }

    #[test]
    fn trace_is_cyclic(seed in any::<u64>()) {
        let params = gaussian();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_invertible(&params, 3, &mut rng);
        let b = random_invertible(&params, 3, &mut rng);
        prop_assert_eq!(a.mul(&b).unwrap().trace(), b.mul(&a).unwrap().trace());
    }

    #[test]
    fn inverse_of_one_plus(seed in any::<u64>(), e in 1u32..4) {
        let params = field(5, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_invertible(&params, 2, &mut rng);
        let inv = mat_inverse_one_plus(&x, e).unwrap();
        let one = OMatrix::identity(&params, 2);
        let g = one.add(&x.scale_int(5i128.pow(e))).unwrap();
        prop_assert_eq!(g.mul(&inv).unwrap(), one);
    }

    #[test]
    fn wedge_is_associative(f in arb_form(4, 1, 3, 12), g in arb_form(4, 1, 3, 12), h in arb_form(4, 1, 3, 12)) {
        let params = field(3, 10);
        let (f, g, h) = (build(&params, 4, 8, &f), build(&params, 4, 8, &g), build(&params, 4, 8, &h));
        prop_assert_eq!(f.wedge(&g).unwrap().wedge(&h).unwrap(), f.wedge(&g.wedge(&h).unwrap()).unwrap());
    }

    #[test]
    fn d_is_an_odd_derivation(f in arb_form(4, 1, 3, 4), g in arb_form(4, 2, 3, 4)) {
        let params = field(3, 10);
        let (f, g) = (build(&params, 4, 12, &f), build(&params, 4, 12, &g));
        let lhs = f.wedge(&g).unwrap().d();
        let rhs = f.d().wedge(&g).unwrap().sub(&f.wedge(&g.d()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(f.d().d().is_empty());
        prop_assert!(g.d().d().is_empty());
    }

    #[test]
    fn phi_matches_the_simplex_integral(f in arb_form(4, 3, 4, 4), w in arb_form(4, 2, 2, 2), v in arb_form(4, 1, 2, 2)) {
        let params = field(3, 30);
        let form = build(&params, 4, 6, &f);
        let mut expected = BigRational::zero();
        for (key, m) in form.terms() {
            let u = (0..4).find(|&i| !key.has_dx(i)).unwrap();
            let mut t = BigInt::from(m.trace().coeffs()[0]);
            if t > BigInt::from(params.pow_p(30) / 2) {
                t -= BigInt::from(params.pow_p(30));
            }
            expected += integrate_monomial(&key.exponents(4), u, 3).unwrap() * t;
        }
        prop_assert_eq!(phi_exact(&form).unwrap(), expected.clone());
        let value = phi(&form).unwrap();
        prop_assert!(meets(value.defect_against(&QpElem::from_rational(&params, &expected)).unwrap(), 25));

        let (w, v) = (build(&params, 4, 6, &w), build(&params, 4, 6, &v));
        prop_assert_eq!(phi_wedge(&w, &v).unwrap(), phi(&w.wedge(&v).unwrap()).unwrap());
    }

    #[test]
    fn simplex_integral_is_symmetric(a in prop::collection::vec(0u32..5, 2..6), seed in any::<u64>()) {
        let n = a.len() - 1;
        let mut b = a.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..b.len()).rev() {
            b.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(integrate_monomial(&a, 0, n).unwrap(), integrate_monomial(&b, 0, n).unwrap());
    }

    #[test]
    fn bar_differential_squares_to_zero(seed in any::<u64>(), degree in 2usize..5) {
        let s4 = PermGroup::new(4).unwrap();
        let elements = closure(&s4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = BarChain::zero(degree);
        for _ in 0..4 {
            let t = (0..degree).map(|_| elements[rng.gen_range(0..elements.len())].clone()).collect();
            c.add_term(t, rng.gen_range(-5..=5)).unwrap();
        }
        let dc = bar_differential(&s4, &c).unwrap();
        prop_assert!(bar_differential(&s4, &dc).unwrap().is_zero());
    }

    #[test]
    fn finite_places_multiply_to_the_sign(num in -1_000_000i64..1_000_000, den in 1i64..1_000_000, pi in 0usize..3) {
        prop_assume!(num != 0);
        let x = BigRational::new(num.into(), den.into());
        let check = product_formula_check(&x, [3u64, 5, 7][pi], 4).unwrap();
        let sign = BigRational::from_integer(BigInt::from(if x.is_negative() { -1 } else { 1 }));
        prop_assert!((check.finite_product * sign).is_one());
    }
}
