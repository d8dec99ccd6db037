use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::oracle_failure;
use crate::error::Result;
use crate::ipsets::SetSpec;
use crate::structures::{fe, fp, fs, FeKind, SeedSequence};
use crate::tower::{Caps, PowerForm};

/// Outcome of one containment check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Check {
    Holds,
    /// The least element outside `A`.
    Fails { element: String },
    Inconclusive { reason: String },
    /// No sequence was supplied for this check.
    Skipped,
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FecorReport {
    pub fs: Check,
    pub fe1: Check,
    pub fp: Check,
    pub fe2: Check,
}

fn first_failure<'a, I>(a: &SetSpec, elements: I, caps: &Caps) -> Result<Check>
where
    I: IntoIterator<Item = &'a PowerForm>,
{
    for e in elements {
        match oracle_failure(a.contains_form(e, caps))? {
            Ok(true) => {}
            Ok(false) => return Ok(Check::Fails { element: e.to_string() }),
            Err(err) => {
                return Ok(Check::Inconclusive {
                    reason: err.to_string(),
                })
            }
        }
    }
    Ok(Check::Holds)
}

fn explicit(seeds: &SeedSequence, caps: &Caps) -> Option<Vec<BigUint>> {
    seeds.as_slice().iter().map(|s| s.try_value(caps)).collect()
}

fn linear_check(a: &SetSpec, seeds: &SeedSequence, additive: bool, caps: &Caps) -> Result<Check> {
    let Some(values) = explicit(seeds, caps) else {
        return Ok(Check::Inconclusive {
            reason: "seeds exceed value_bit_cap".into(),
        });
    };
    let set = match oracle_failure(if additive { fs(&values) } else { fp(&values, caps) })? {
        Ok(set) => set,
        Err(err) => {
            return Ok(Check::Inconclusive {
                reason: err.to_string(),
            })
        }
    };
    for v in &set {
        match oracle_failure(a.contains_value(v))? {
            Ok(true) => {}
            Ok(false) => return Ok(Check::Fails { element: v.to_string() }),
            Err(err) => {
                return Ok(Check::Inconclusive {
                    reason: err.to_string(),
                })
            }
        }
    }
    Ok(Check::Holds)
}

fn exp_check(a: &SetSpec, seeds: &SeedSequence, kind: FeKind, depth: usize, caps: &Caps) -> Result<Check> {
    let level = fe(seeds, depth, kind, caps)?;
    if level.dropped > 0 {
        return Ok(Check::Inconclusive {
            reason: format!("{} element(s) exceed the caps", level.dropped),
        });
    }
    first_failure(a, &level.elements, caps)
}

/// Checks `FS(X)`, `FE^I_d(X)`, `FP(Y)` and `FE^II_d(Y)` against `a`,
/// reporting the least offending element of each failed check.
pub fn verify_fecor(
    a: &SetSpec,
    x: Option<&SeedSequence>,
    y: Option<&SeedSequence>,
    depth: usize,
    caps: &Caps,
) -> Result<FecorReport> {
    let (fs_check, fe1_check) = match x {
        Some(x) => (linear_check(a, x, true, caps)?, exp_check(a, x, FeKind::TypeI, depth, caps)?),
        None => (Check::Skipped, Check::Skipped),
    };
    let (fp_check, fe2_check) = match y {
        Some(y) => (linear_check(a, y, false, caps)?, exp_check(a, y, FeKind::TypeII, depth, caps)?),
        None => (Check::Skipped, Check::Skipped),
    };
    Ok(FecorReport {
        fs: fs_check,
        fe1: fe1_check,
        fp: fp_check,
        fe2: fe2_check,
    })
}
