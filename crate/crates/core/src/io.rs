//! JSON input schemas and report types shared by the command-line tool and
//! the Python bindings.
//!
//! Matrix entries are base-10 strings or integers; over an extension of
//! degree d > 1 an entry is a list of up to d such values, little-endian in
//! the generator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::params::RingParams;
use crate::arith::qp::{QpElem, Valuation};
use crate::arith::ring::RingElem;
use crate::cocycle::GroupTuple;
use crate::error::{Error, Result};
use crate::homology::{BarChain, CosetSystem, Perm, PermGroup};
use crate::matforms::OMatrix;

fn one() -> u32 {
    1
}

/// The coefficient field and working precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(default = "one")]
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<i64>>,
}

impl FieldSpec {
    pub fn params(&self) -> Result<Arc<RingParams>> {
        let modulus = match (&self.modulus, self.d) {
            (Some(m), d) => {
                if m.len() != d as usize + 1 {
                    return Err(Error::Schema(format!("modulus of length {} for degree {d}", m.len())));
                }
                Some(m.clone())
            }
            (None, 1) => None,
            (None, d) => return Err(Error::Schema(format!("degree {d} needs a modulus"))),
        };
        RingParams::new(self.p, self.m, modulus)
    }
}

fn scalar_value(v: &Value) -> Result<i128> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| Error::Schema(format!("bad integer {s:?}"))),
        Value::Number(n) => n.as_i64().map(i128::from).ok_or_else(|| Error::Schema(format!("bad integer {n}"))),
        _ => Err(Error::Schema(format!("expected an integer, found {v}"))),
    }
}

/// Parses one matrix entry into ring coefficients.
pub fn parse_entry(params: &Arc<RingParams>, v: &Value) -> Result<RingElem> {
    let coeffs = match v {
        Value::Array(items) => items.iter().map(scalar_value).collect::<Result<Vec<_>>>()?,
        other => vec![scalar_value(other)?],
    };
    RingElem::from_coeffs(params, &coeffs).map_err(|e| Error::Schema(e.to_string()))
}

pub fn parse_matrix(params: &Arc<RingParams>, v: &Value) -> Result<OMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Schema("a matrix is an array of rows".into()))?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::Schema("empty matrix".into()));
    }
    let mut m = OMatrix::zero(params, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Schema("a matrix row is an array".into()))?;
        if row.len() != n {
            return Err(Error::Schema(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, &parse_entry(params, x)?)?;
        }
    }
    Ok(m)
}

pub fn entry_json(x: &RingElem) -> Value {
    let parts: Vec<Value> = x.coeffs().iter().map(|c| Value::String(c.to_string())).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        Value::Array(parts)
    }
}

pub fn matrix_json(m: &OMatrix) -> Value {
    Value::Array((0..m.dim()).map(|i| Value::Array((0..m.dim()).map(|j| entry_json(&m.get(i, j))).collect())).collect())
}

/// A tuple of congruence-subgroup elements.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleInput {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(default = "one")]
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<i64>>,
    pub e: u32,
    pub s: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub elems: Vec<Value>,
}

impl TupleInput {
    pub fn field(&self) -> FieldSpec {
        FieldSpec { p: self.p, m: self.m, d: self.d, modulus: self.modulus.clone() }
    }

    pub fn tuple(&self) -> Result<GroupTuple> {
        let params = self.field().params()?;
        let elems = self.elems.iter().map(|v| parse_matrix(&params, v)).collect::<Result<Vec<_>>>()?;
        if elems.iter().any(|g| g.dim() != self.n) {
            return Err(Error::Schema(format!("every element must be {0}x{0}", self.n)));
        }
        GroupTuple::new(self.s, self.e, elems)
    }
}

/// A tuple plus the transformation for an invariance check; `mode` is
/// "translate" (g ↦ y1·g·y2) or "conjugate" (g ↦ y1·g·y1⁻¹).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceInput {
    pub tuple: TupleInput,
    pub mode: String,
    pub y1: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<Value>,
}

/// Parameters of a regulator computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorInput {
    pub p: u64,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(default = "one")]
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<i64>>,
    pub e: u32,
    pub s: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub target: u32,
}

impl RegulatorInput {
    pub fn field(&self) -> FieldSpec {
        FieldSpec { p: self.p, m: self.m, d: self.d, modulus: self.modulus.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTerm {
    pub coeff: i64,
    pub tuple: Vec<Value>,
}

/// Σ coeff · 1⊗(1, tuple…).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainInput {
    /// Degree, needed only when there are no terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub terms: Vec<ChainTerm>,
}

impl ChainInput {
    fn degree_of(&self) -> Result<usize> {
        match (self.degree, self.terms.first()) {
            (Some(d), _) => Ok(d),
            (None, Some(t)) => Ok(t.tuple.len()),
            (None, None) => Err(Error::Schema("an empty chain needs a degree".into())),
        }
    }

    pub fn matrix_chain(&self, params: &Arc<RingParams>) -> Result<BarChain<OMatrix>> {
        let mut c = BarChain::zero(self.degree_of()?);
        for t in &self.terms {
            let tuple = t.tuple.iter().map(|v| parse_matrix(params, v)).collect::<Result<Vec<_>>>()?;
            c.add_term(tuple, t.coeff).map_err(|e| Error::Schema(e.to_string()))?;
        }
        Ok(c)
    }

    pub fn perm_chain(&self, group: &PermGroup) -> Result<BarChain<Perm>> {
        let mut c = BarChain::zero(self.degree_of()?);
        for t in &self.terms {
            let tuple = t.tuple.iter().map(|v| parse_perm(group, v)).collect::<Result<Vec<_>>>()?;
            c.add_term(tuple, t.coeff).map_err(|e| Error::Schema(e.to_string()))?;
        }
        Ok(c)
    }

    pub fn from_matrix_chain(c: &BarChain<OMatrix>) -> Self {
        ChainInput {
            degree: Some(c.degree()),
            terms: c.terms().map(|(t, &k)| ChainTerm { coeff: k, tuple: t.iter().map(matrix_json).collect() }).collect(),
        }
    }

    pub fn from_perm_chain(c: &BarChain<Perm>) -> Self {
        ChainInput {
            degree: Some(c.degree()),
            terms: c
                .terms()
                .map(|(t, &k)| ChainTerm {
                    coeff: k,
                    tuple: t.iter().map(|p| Value::Array(p.iter().map(|&i| Value::from(i)).collect())).collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_perm(group: &PermGroup, v: &Value) -> Result<Perm> {
    let items = v.as_array().ok_or_else(|| Error::Schema("a permutation is an array of images".into()))?;
    let images = items
        .iter()
        .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| Error::Schema(format!("bad image {x}"))))
        .collect::<Result<Vec<_>>>()?;
    group.perm(&images).map_err(|e| Error::Schema(e.to_string()))
}

/// A group with a subgroup and coset representatives.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    /// Permutations as 0-based one-line images, composed on the right.
    Permutation {
        degree: usize,
        generators: Vec<Value>,
        subgroup: Vec<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reps: Option<Vec<Value>>,
    },
    /// GL_N(O_F / p^M) with the congruence subgroup of level e.
    Matrix {
        p: u64,
        #[serde(rename = "M")]
        m: u32,
        #[serde(default = "one")]
        d: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<i64>>,
        #[serde(rename = "N")]
        n: usize,
        e: u32,
    },
}

impl GroupSpec {
    pub fn perm_system(&self) -> Result<CosetSystem<PermGroup>> {
        match self {
            GroupSpec::Permutation { degree, generators, subgroup, reps } => {
                let group = PermGroup::new(*degree).map_err(|e| Error::Schema(e.to_string()))?;
                let g = generators.iter().map(|v| parse_perm(&group, v)).collect::<Result<Vec<_>>>()?;
                let h = subgroup.iter().map(|v| parse_perm(&group, v)).collect::<Result<Vec<_>>>()?;
                match reps {
                    Some(r) => {
                        let r = r.iter().map(|v| parse_perm(&group, v)).collect::<Result<Vec<_>>>()?;
                        CosetSystem::with_reps(*degree, &g, &h, r)
                    }
                    None => CosetSystem::from_permutations(*degree, &g, &h),
                }
            }
            GroupSpec::Matrix { .. } => Err(Error::Schema("not a permutation group".into())),
        }
    }

    pub fn matrix_system(&self) -> Result<CosetSystem<crate::homology::MatrixGroup>> {
        match self {
            GroupSpec::Matrix { p, m, d, modulus, n, e } => {
                let field = FieldSpec { p: *p, m: *m, d: *d, modulus: modulus.clone() };
                CosetSystem::congruence(&field.params()?, *n, *e)
            }
            GroupSpec::Permutation { .. } => Err(Error::Schema("not a matrix group".into())),
        }
    }
}

/// A p-adic number in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpReport {
    /// `null` for zero.
    pub valuation: Option<i64>,
    /// Unit part coefficients mod p^relative_precision.
    pub unit: Vec<String>,
    /// Absolute precision: the value is known mod p^precision.
    pub precision: i64,
    pub relative_precision: u32,
    /// Base-p digits of each unit coefficient, least significant first.
    pub digits: Vec<Vec<u64>>,
    pub text: String,
}

impl From<&QpElem> for QpReport {
    fn from(x: &QpElem) -> Self {
        QpReport {
            valuation: x.valuation(),
            unit: x.unit().iter().map(|c| c.to_string()).collect(),
            precision: x.abs_precision(),
            relative_precision: x.rel_precision(),
            digits: x.digits(),
            text: x.to_string(),
        }
    }
}

/// A defect valuation in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    /// "finite", "at_least" or "infinite".
    pub kind: String,
    pub valuation: Option<i64>,
    pub target: u32,
    pub passed: bool,
}

impl DefectReport {
    pub fn new(v: Valuation, target: u32) -> Self {
        let (kind, valuation) = match v {
            Valuation::Finite(k) => ("finite", Some(k)),
            Valuation::AtLeast(k) => ("at_least", Some(k)),
            Valuation::Infinite => ("infinite", None),
        };
        DefectReport { kind: kind.into(), valuation, target, passed: v.meets(target as i64) }
    }
}
