//! Membership oracles for possibly infinite subsets of ℕ.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coloring::rule::{parse_rule, ColorRule};
use crate::error::{Error, Result};
use crate::tower::{Caps, PowerForm};

/// A decidable set of naturals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SetSpecJson", into = "SetSpecJson")]
pub enum SetSpec {
    ExplicitList(BTreeSet<BigUint>),
    /// `{ n : n mod modulus = residue }`
    Residue { modulus: BigUint, residue: BigUint },
    /// `{ n : rule(n) mod k = cell }`
    Rule { rule: ColorRule, cell: usize },
    ComplementOf(Box<SetSpec>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum SetSpecJson {
    ExplicitList {
        values: Vec<String>,
    },
    Residue {
        modulus: String,
        residue: String,
    },
    Rule {
        source: String,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_cell")]
        cell: usize,
    },
    ComplementOf {
        of: Box<SetSpecJson>,
    },
}

fn default_k() -> usize {
    2
}

fn default_cell() -> usize {
    1
}

fn nat(s: &str) -> Result<BigUint> {
    s.trim()
        .parse()
        .map_err(|_| Error::domain(format!("not a natural number: {s:?}")))
}

impl TryFrom<SetSpecJson> for SetSpec {
    type Error = Error;

    fn try_from(raw: SetSpecJson) -> Result<Self> {
        match raw {
            SetSpecJson::ExplicitList { values } => Ok(SetSpec::ExplicitList(
                values.iter().map(|v| nat(v)).collect::<Result<_>>()?,
            )),
            SetSpecJson::Residue { modulus, residue } => SetSpec::residue(nat(&modulus)?, nat(&residue)?),
            SetSpecJson::Rule { source, k, cell } => SetSpec::rule(&source, k, cell),
            SetSpecJson::ComplementOf { of } => Ok(SetSpec::ComplementOf(Box::new(SetSpec::try_from(*of)?))),
        }
    }
}

impl From<SetSpec> for SetSpecJson {
    fn from(spec: SetSpec) -> Self {
        match spec {
            SetSpec::ExplicitList(values) => SetSpecJson::ExplicitList {
                values: values.iter().map(ToString::to_string).collect(),
            },
            SetSpec::Residue { modulus, residue } => SetSpecJson::Residue {
                modulus: modulus.to_string(),
                residue: residue.to_string(),
            },
            SetSpec::Rule { rule, cell } => SetSpecJson::Rule {
                source: rule.source().to_string(),
                k: rule.k(),
                cell,
            },
            SetSpec::ComplementOf(of) => SetSpecJson::ComplementOf {
                of: Box::new((*of).into()),
            },
        }
    }
}

fn oracle_range(n: impl fmt::Display) -> Error {
    Error::capacity(format!("oracle range: rule cannot be evaluated at {n}"))
}

impl SetSpec {
    pub fn all() -> Self {
        SetSpec::ComplementOf(Box::new(SetSpec::ExplicitList(BTreeSet::new())))
    }

    pub fn empty() -> Self {
        SetSpec::ExplicitList(BTreeSet::new())
    }

    pub fn list(values: impl IntoIterator<Item = u64>) -> Self {
        SetSpec::ExplicitList(values.into_iter().map(BigUint::from).collect())
    }

    pub fn residue(modulus: BigUint, residue: BigUint) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::domain("residue class needs a modulus of at least 1"));
        }
        if residue >= modulus {
            return Err(Error::domain(format!("residue {residue} is not below modulus {modulus}")));
        }
        Ok(SetSpec::Residue { modulus, residue })
    }

    pub fn rule(source: &str, k: usize, cell: usize) -> Result<Self> {
        if cell >= k {
            return Err(Error::domain(format!("cell {cell} is not below k = {k}")));
        }
        Ok(SetSpec::Rule {
            rule: parse_rule(source, k)?,
            cell,
        })
    }

    pub fn complement(self) -> Self {
        SetSpec::ComplementOf(Box::new(self))
    }

    pub fn contains_value(&self, n: &BigUint) -> Result<bool> {
        match self {
            SetSpec::ExplicitList(values) => Ok(values.contains(n)),
            SetSpec::Residue { modulus, residue } => Ok(&(n % modulus) == residue),
            SetSpec::Rule { rule, cell } => {
                let v = n.to_i128().ok_or_else(|| oracle_range(n))?;
                Ok(rule.color_of(v)? == *cell)
            }
            SetSpec::ComplementOf(of) => Ok(!of.contains_value(n)?),
        }
    }

    pub fn contains_u64(&self, n: u64) -> Result<bool> {
        match self {
            SetSpec::Rule { rule, cell } => Ok(rule.color_of(n as i128)? == *cell),
            _ => self.contains_value(&BigUint::from(n)),
        }
    }

    /// Membership of a value that may be too large to write out. Rules
    /// only see values inside `i128`; beyond that this is a capacity error.
    pub fn contains_form(&self, v: &PowerForm, caps: &Caps) -> Result<bool> {
        match self {
            SetSpec::ExplicitList(values) => {
                if let Some(x) = v.try_value(caps) {
                    return Ok(values.contains(&x));
                }
                let unbounded = Caps {
                    value_bit_cap: u64::MAX,
                    exp_bit_cap: u64::MAX,
                };
                for x in values.iter().filter(|x| x.bits() > caps.value_bit_cap) {
                    if PowerForm::normalize(x, &unbounded)? == *v {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            SetSpec::Residue { modulus, residue } => Ok(&v.residue(modulus) == residue),
            SetSpec::Rule { rule, cell } => {
                let n = v.to_u64().ok_or_else(|| oracle_range(v))?;
                Ok(rule.color_of(n as i128)? == *cell)
            }
            SetSpec::ComplementOf(of) => Ok(!of.contains_form(v, caps)?),
        }
    }

    /// Membership of `base^exp` for any `base` (0 and 1 included) and
    /// `exp >= 1`.
    pub fn contains_pow(&self, base: &BigUint, exp: &BigUint, caps: &Caps) -> Result<bool> {
        if *base < BigUint::from(2u32) {
            return self.contains_value(base);
        }
        self.contains_form(&PowerForm::with_exponent(base, exp, caps)?, caps)
    }
}

impl FromStr for SetSpec {
    type Err = Error;

    /// Shorthands: `all`, `empty`, `even`, `odd`, `residue:M:R`,
    /// `list:1,2,3`, `rule:SRC` (cell 1 of 2), `not:SPEC`. Anything
    /// starting with `{` is read as JSON.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::domain(format!("bad set JSON: {e}")));
        }
        if let Some(rest) = s.strip_prefix("not:") {
            return Ok(rest.parse::<SetSpec>()?.complement());
        }
        if let Some(src) = s.strip_prefix("rule:") {
            return SetSpec::rule(src, 2, 1);
        }
        if let Some(rest) = s.strip_prefix("list:") {
            let values = rest
                .split(',')
                .filter(|w| !w.trim().is_empty())
                .map(nat)
                .collect::<Result<_>>()?;
            return Ok(SetSpec::ExplicitList(values));
        }
        if let Some(rest) = s.strip_prefix("residue:") {
            let (m, r) = rest
                .split_once(':')
                .ok_or_else(|| Error::domain("residue shorthand is residue:M:R"))?;
            return SetSpec::residue(nat(m)?, nat(r)?);
        }
        match s {
            "all" => Ok(SetSpec::all()),
            "empty" => Ok(SetSpec::empty()),
            "even" => SetSpec::residue(2u32.into(), 0u32.into()),
            "odd" => SetSpec::residue(2u32.into(), 1u32.into()),
            _ => Err(Error::domain(format!("unrecognised set {s:?}"))),
        }
    }
}
