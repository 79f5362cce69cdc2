use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use padreg::arith::RingParams;
use padreg::cocycle::{cocycle_defect, invariance_defect, random_congruent, random_invertible, GroupTuple, Transform};
use padreg::homology::{check_chain_map, factorization_check, BarChain, CosetSystem};
use padreg::io::DefectReport;
use padreg::regulator::product_formula_check;
use padreg::simplex::{integrate_monomial, iterated_integral_oracle, stokes_check};
use padreg::Result;

use crate::Failure;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn defect(name: &'static str, d: DefectReport) -> Check {
    Check { name, passed: d.passed, detail: format!("{} {:?}", d.kind, d.valuation) }
}

fn checks(target: u32) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let params = RingParams::prime_field(3, target + 8)?;

    let tuple = |rng: &mut ChaCha8Rng, len: usize| {
        GroupTuple::new(1, 1, (0..len).map(|_| random_congruent(&params, 2, 1, rng)).collect())
    };
    let t = tuple(&mut rng, 3)?;
    out.push(defect("cocycle s=1", DefectReport::new(cocycle_defect(&t, target)?, target)));

    let t = tuple(&mut rng, 2)?;
    let y = random_invertible(&params, 2, &mut rng);
    out.push(defect("conjugation s=1", DefectReport::new(invariance_defect(&t, &Transform::Conjugate(y), target)?, target)));

    let a = [2, 1, 3];
    let closed = integrate_monomial(&a, 0, 2)?;
    let oracle = iterated_integral_oracle(&a, 0, 2)?;
    out.push(Check { name: "simplex oracle", passed: closed == oracle, detail: closed.to_string() });
    let (lhs, rhs) = stokes_check(&[1, 2, 0, 1], 1, 3)?;
    out.push(Check { name: "stokes", passed: lhs == rhs, detail: format!("{lhs} = {rhs}") });

    let cs = CosetSystem::from_permutations(4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]], &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])?;
    let g = cs.group().clone();
    let elems = [[1, 0, 2, 3], [0, 2, 3, 1], [3, 1, 0, 2]].iter().map(|im| g.perm(im)).collect::<Result<Vec<_>>>()?;
    let c = BarChain::from_terms(
        2,
        vec![(vec![elems[0].clone(), elems[1].clone()], 1), (vec![elems[1].clone(), elems[2].clone()], -2)],
    )?;
    let ok = check_chain_map(&cs, &c)? && factorization_check(&cs, &c)?;
    out.push(Check { name: "transfer S4/A4", passed: ok, detail: format!("index {}", cs.index()) });

    let x = BigRational::new(BigInt::from(-12), BigInt::from(35));
    let pc = product_formula_check(&x, 5, target)?;
    let passed = pc.exact_product == BigRational::from_integer(BigInt::from(1)) && pc.product_defect.meets(target as i64);
    out.push(Check { name: "product formula", passed, detail: pc.exact_product.to_string() });
    Ok(out)
}

pub fn run(target: u32) -> std::result::Result<(Value, bool), Failure> {
    let checks = checks(target)?;
    let ok = checks.iter().all(|c| c.passed);
    Ok((serde_json::json!({ "target": target, "passed": ok, "checks": checks }), ok))
}
