//! `padreg`: batch front end for cocycle evaluation, invariance checks,
//! simplex integration, transfers and regulator pairings.
//!
//! Exit status: 0 success, 2 verification failure, 3 precondition error,
//! 4 schema error.

mod selftest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use padreg::arith::{extend_log, extend_log_precision, RingElem, RingParams};
use padreg::cocycle::{cocycle_defect, cocycle_eval_with, galois_defect, invariance_defect, EvalOptions, Transform};
use padreg::homology::{check_chain_map, factorization_check, transfer_t};
use padreg::io::{
    parse_matrix, ChainInput, DefectReport, FieldSpec, GroupSpec, InvarianceInput, QpReport, RegulatorInput,
    TupleInput,
};
use padreg::regulator::{abs_value_q, hat_r, pair, product_formula_check, r_nf, Place, RegulatorConfig};
use padreg::simplex::{integrate_monomial, iterated_integral_oracle, stokes_check};
use padreg::Error;

#[derive(Parser)]
#[command(name = "padreg", version, about = "p-adic regulator cocycles and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// Prime p (overrides the input file).
    #[arg(long)]
    p: Option<u64>,
    /// Ring precision: entries live in O_F / p^M.
    #[arg(long = "M")]
    m: Option<u32>,
    /// Unramified degree.
    #[arg(long)]
    d: Option<u32>,
    /// Monic modulus, comma separated, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    modulus: Option<Vec<i64>>,
    /// Congruence level e.
    #[arg(long)]
    e: Option<u32>,
    /// Cocycle degree: the form has degree 2s-1.
    #[arg(long)]
    s: Option<u32>,
    /// Matrix size.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Target precision in p-adic digits.
    #[arg(long, env = "PADREG_TARGET", default_value_t = 6)]
    target: u32,
    /// Overrides the automatic truncation degree.
    #[arg(long)]
    degree_cap: Option<u32>,
    /// JSON input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the cocycle on a tuple of 2s matrices.
    CocycleEval(Common),
    /// Alternating face sum on a tuple of 2s+1 matrices.
    CocycleCheck(Common),
    /// Left/right translation or conjugation invariance.
    InvarianceCheck(Common),
    /// Frobenius equivariance over an unramified extension.
    GaloisCheck(Common),
    /// Integral of x^a with dx_omit left out over the simplex.
    SimplexIntegrate {
        /// Exponents a_0,...,a_n.
        #[arg(long, value_delimiter = ',')]
        a: Vec<u32>,
        /// Index of the omitted differential.
        #[arg(long)]
        omit: usize,
        /// Also run the iterated-integral oracle.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of Stokes' theorem for one monomial form.
    SimplexStokes {
        /// Exponents a_0,...,a_n.
        #[arg(long, value_delimiter = ',')]
        a: Vec<u32>,
        /// Indices u < v of the two omitted differentials.
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the transfer to a chain.
    TransferApply(ChainArgs),
    /// Chain-map and section checks for the transfer.
    TransferCheck(ChainArgs),
    /// Same as `regulator pair`.
    #[command(name = "regulator-pair")]
    RegulatorPair(PairArgs),
    /// Same as `regulator rnf`.
    #[command(name = "regulator-rnf")]
    RegulatorRnf(PairArgs),
    /// Regulator pairing (`pair`) or the full regulator via transfer (`rnf`).
    Regulator {
        #[command(subcommand)]
        which: RegulatorVerb,
    },
    /// Logarithm of a unit, extended homomorphically.
    Log {
        /// Integer or rational `a/b`; for d > 1 a comma-separated coefficient list.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// ℚ_p-valued absolute values of a rational.
    Absval {
        /// Nonzero rational `a/b`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Also multiply all places and sum the logarithms.
        #[arg(long)]
        check_product: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a quick invariant suite.
    Selftest(Common),
}

#[derive(Subcommand)]
enum RegulatorVerb {
    /// Pair a cycle with the cocycle.
    Pair(PairArgs),
    /// Transfer to the congruence subgroup, pair, and scale by the index.
    Rnf(PairArgs),
}

#[derive(Args)]
struct ChainArgs {
    /// Group and subgroup description.
    #[arg(long)]
    group: PathBuf,
    /// Chain file; defaults to --input.
    #[arg(long)]
    chain: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PairArgs {
    /// Field, level and target.
    #[arg(long)]
    config: PathBuf,
    /// Chain of matrix tuples.
    #[arg(long)]
    chain: PathBuf,
    /// Pair without checking that the chain is a cycle.
    #[arg(long)]
    no_cycle_check: bool,
    #[command(flatten)]
    common: Common,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Schema(_) | Error::MalformedKey(_) => (4, "schema"),
            Error::NotACycle => (2, "verification"),
            _ => (3, "precondition"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 4, kind: "schema", message: e.to_string() }
    }
}

type CliResult = Result<(Value, bool), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: 3, kind: "precondition", message: format!("{}: {e}", path.display()) })?;
    Ok(serde_json::from_str(&text)?)
}

fn input_path(c: &Common) -> Result<&PathBuf, Failure> {
    c.input.as_ref().ok_or(Failure { code: 3, kind: "precondition", message: "--input is required".into() })
}

fn report<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn override_tuple(mut t: TupleInput, c: &Common) -> TupleInput {
    if let Some(p) = c.p {
        t.p = p;
    }
    if let Some(m) = c.m {
        t.m = m;
    }
    if let Some(d) = c.d {
        t.d = d;
    }
    if c.modulus.is_some() {
        t.modulus = c.modulus.clone();
    }
    if let Some(e) = c.e {
        t.e = e;
    }
    if let Some(s) = c.s {
        t.s = s;
    }
    if let Some(n) = c.n {
        t.n = n;
    }
    t
}

fn field_from_flags(c: &Common, default_m: impl FnOnce(u64) -> u32) -> Result<FieldSpec, Failure> {
    let p = c.p.ok_or(Failure { code: 3, kind: "precondition", message: "--p is required".into() })?;
    Ok(FieldSpec { p, m: c.m.unwrap_or_else(|| default_m(p)), d: c.d.unwrap_or(1), modulus: c.modulus.clone() })
}

#[derive(Serialize)]
struct EvalReport {
    target: u32,
    degree_cap: u32,
    work_precision: u32,
    value: QpReport,
}

fn cocycle_eval_cmd(c: &Common) -> CliResult {
    let input = override_tuple(read_json(input_path(c)?)?, c);
    let t = input.tuple()?;
    let opts = EvalOptions { degree_cap: c.degree_cap, extra_precision: 0 };
    let v = cocycle_eval_with(&t, c.target, &opts)?;
    Ok((
        report(&EvalReport {
            target: c.target,
            degree_cap: v.degree_cap,
            work_precision: v.work_precision,
            value: QpReport::from(&v.value),
        }),
        true,
    ))
}

fn defect_result(d: DefectReport) -> CliResult {
    let ok = d.passed;
    Ok((report(&d), ok))
}

fn cocycle_check_cmd(c: &Common) -> CliResult {
    let t = override_tuple(read_json(input_path(c)?)?, c).tuple()?;
    defect_result(DefectReport::new(cocycle_defect(&t, c.target)?, c.target))
}

fn invariance_cmd(c: &Common) -> CliResult {
    let mut input: InvarianceInput = read_json(input_path(c)?)?;
    input.tuple = override_tuple(input.tuple, c);
    let t = input.tuple.tuple()?;
    let y1 = parse_matrix(t.params(), &input.y1)?;
    let transform = match input.mode.as_str() {
        "translate" => {
            let y2 = input.y2.as_ref().ok_or_else(|| Error::Schema("translate mode needs y2".into()))?;
            Transform::Translate { left: y1, right: parse_matrix(t.params(), y2)? }
        }
        "conjugate" => Transform::Conjugate(y1),
        other => return Err(Error::Schema(format!("unknown mode {other:?}")).into()),
    };
    defect_result(DefectReport::new(invariance_defect(&t, &transform, c.target)?, c.target))
}

fn galois_cmd(c: &Common) -> CliResult {
    let t = override_tuple(read_json(input_path(c)?)?, c).tuple()?;
    defect_result(DefectReport::new(galois_defect(&t, c.target)?, c.target))
}

fn simplex_integrate_cmd(a: &[u32], omit: usize, oracle: bool) -> CliResult {
    let n = a.len().saturating_sub(1);
    let value = integrate_monomial(a, omit, n)?;
    let mut out = serde_json::json!({ "a": a, "omit": omit, "value": value.to_string() });
    if oracle {
        let magnitude = iterated_integral_oracle(a, omit, n)?;
        let signed = if omit % 2 == 1 { -magnitude } else { magnitude };
        out["oracle"] = Value::String(signed.to_string());
        let agree = signed == value;
        out["agree"] = Value::Bool(agree);
        return Ok((out, agree));
    }
    Ok((out, true))
}

fn simplex_stokes_cmd(a: &[u32], u: usize, v: usize) -> CliResult {
    let (lhs, rhs) = stokes_check(a, u, v)?;
    let equal = lhs == rhs;
    Ok((serde_json::json!({ "a": a, "u": u, "v": v, "lhs": lhs.to_string(), "rhs": rhs.to_string(), "equal": equal }), equal))
}

fn chain_input(args: &ChainArgs) -> Result<ChainInput, Failure> {
    let path = args.chain.as_ref().or(args.common.input.as_ref()).ok_or(Failure {
        code: 3,
        kind: "precondition",
        message: "--chain (or --input) is required".into(),
    })?;
    read_json(path)
}

fn transfer_cmd(args: &ChainArgs, check: bool) -> CliResult {
    let spec: GroupSpec = read_json(&args.group)?;
    let chain = chain_input(args)?;
    match &spec {
        GroupSpec::Permutation { degree, .. } => {
            let cs = spec.perm_system()?;
            let group = padreg::homology::PermGroup::new(*degree)?;
            let c = chain.perm_chain(&group)?;
            if check {
                let (a, b) = (check_chain_map(&cs, &c)?, factorization_check(&cs, &c)?);
                Ok((serde_json::json!({ "index": cs.index(), "chain_map": a, "factorization": b }), a && b))
            } else {
                Ok((report(&ChainInput::from_perm_chain(&transfer_t(&cs, &c)?)), true))
            }
        }
        GroupSpec::Matrix { .. } => {
            let cs = spec.matrix_system()?;
            let c = chain.matrix_chain(cs.group().params())?;
            if check {
                let (a, b) = (check_chain_map(&cs, &c)?, factorization_check(&cs, &c)?);
                Ok((serde_json::json!({ "index": cs.index(), "chain_map": a, "factorization": b }), a && b))
            } else {
                Ok((report(&ChainInput::from_matrix_chain(&transfer_t(&cs, &c)?)), true))
            }
        }
    }
}

#[derive(Serialize)]
struct PairReport {
    target: u32,
    value: QpReport,
    normalized: QpReport,
}

fn regulator_cmd(args: &PairArgs, full: bool) -> CliResult {
    let mut cfg: RegulatorInput = read_json(&args.config)?;
    if args.common.input.is_some() {
        return Err(Error::Schema("use --config and --chain".into()).into());
    }
    if let Some(m) = args.common.m {
        cfg.m = m;
    }
    let params = cfg.field().params()?;
    let config = RegulatorConfig::new(&params, cfg.e, cfg.s, cfg.n, cfg.target)?;
    let chain: ChainInput = read_json(&args.chain)?;
    let c = chain.matrix_chain(&params)?;
    let value = if full { r_nf(&config, &c)? } else { pair(&config, &c, !args.no_cycle_check)? };
    let normalized = hat_r(&value, cfg.s)?.truncate(cfg.target as i64);
    Ok((
        report(&PairReport { target: cfg.target, value: QpReport::from(&value), normalized: QpReport::from(&normalized) }),
        true,
    ))
}

fn parse_rational(x: &str) -> Result<BigRational, Failure> {
    BigRational::from_str(x.trim()).map_err(|_| Error::Schema(format!("bad rational {x:?}")).into())
}

fn log_cmd(x: &str, c: &Common) -> CliResult {
    let field = field_from_flags(c, |p| extend_log_precision(p, c.target))?;
    let params = field.params()?;
    let u = if field.d > 1 {
        let coeffs = x
            .split(',')
            .map(|s| s.trim().parse::<i128>().map_err(|_| Error::Schema(format!("bad coefficient {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        RingElem::from_coeffs(&params, &coeffs)?
    } else {
        let r = parse_rational(x)?;
        let q = padreg::arith::QpElem::from_rational(&params, &r);
        if q.valuation() != Some(0) {
            return Err(Error::NotUnit.into());
        }
        let res = q.integral_residue(params.precision()).ok_or(Error::NotUnit)?;
        RingElem::from_coeffs(&params, &[res[0] as i128])?
    };
    let value = extend_log(&u, c.target)?;
    Ok((serde_json::json!({ "x": x, "target": c.target, "value": QpReport::from(&value) }), true))
}

fn absval_cmd(x: &str, check_product: bool, c: &Common) -> CliResult {
    let r = parse_rational(x)?;
    let p = c.p.ok_or(Failure { code: 3, kind: "precondition", message: "--p is required".into() })?;
    let m = c.m.unwrap_or_else(|| extend_log_precision(p, c.target));
    let params = RingParams::prime_field(p, m)?;
    let mut primes = padreg::regulator::support(&r)?;
    if !primes.contains(&p) {
        primes.push(p);
        primes.sort_unstable();
    }
    let mut places = Vec::new();
    for l in primes {
        let v = abs_value_q(&r, Place::Finite(l), &params)?;
        places.push(serde_json::json!({
            "place": l.to_string(),
            "exact": v.exact.to_string(),
            "value": v.value.as_ref().map(QpReport::from),
        }));
    }
    let inf = abs_value_q(&r, Place::Infinite, &params)?;
    places.push(serde_json::json!({ "place": "inf", "exact": inf.exact.to_string(), "value": Value::Null }));
    let mut out = serde_json::json!({ "x": r.to_string(), "p": p, "places": places });
    let mut ok = true;
    if check_product {
        let check = product_formula_check(&r, p, c.target)?;
        let product = DefectReport::new(check.product_defect, c.target);
        let logs = DefectReport::new(check.log_sum_defect, c.target);
        let exact_one = check.exact_product == BigRational::from_integer(BigInt::from(1));
        ok = exact_one && product.passed && logs.passed;
        out["product"] = serde_json::json!({
            "exact": check.exact_product.to_string(),
            "finite_places": check.finite_product.to_string(),
            "defect": product,
            "log_sum_defect": logs,
        });
    }
    Ok((out, ok))
}

fn run(cli: Cli) -> (Result<(Value, bool), Failure>, Option<PathBuf>) {
    match cli.command {
        Command::CocycleEval(c) => (cocycle_eval_cmd(&c), c.output),
        Command::CocycleCheck(c) => (cocycle_check_cmd(&c), c.output),
        Command::InvarianceCheck(c) => (invariance_cmd(&c), c.output),
        Command::GaloisCheck(c) => (galois_cmd(&c), c.output),
        Command::SimplexIntegrate { a, omit, oracle, common } => (simplex_integrate_cmd(&a, omit, oracle), common.output),
        Command::SimplexStokes { a, u, v, common } => (simplex_stokes_cmd(&a, u, v), common.output),
        Command::TransferApply(args) => (transfer_cmd(&args, false), args.common.output.clone()),
        Command::TransferCheck(args) => (transfer_cmd(&args, true), args.common.output.clone()),
        Command::RegulatorPair(args) | Command::Regulator { which: RegulatorVerb::Pair(args) } => {
            (regulator_cmd(&args, false), args.common.output.clone())
        }
        Command::RegulatorRnf(args) | Command::Regulator { which: RegulatorVerb::Rnf(args) } => {
            (regulator_cmd(&args, true), args.common.output.clone())
        }
        Command::Log { x, common } => (log_cmd(&x, &common), common.output),
        Command::Absval { x, check_product, common } => (absval_cmd(&x, check_product, &common), common.output),
        Command::Selftest(c) => (selftest::run(c.target), c.output),
    }
}

fn main() -> ExitCode {
    let (result, output) = run(Cli::parse());
    match result {
        Ok((value, ok)) => {
            let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, &text) {
                        eprintln!("{}", serde_json::json!({ "error": "precondition", "message": e.to_string() }));
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(f) => {
            eprintln!("{}", serde_json::json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
