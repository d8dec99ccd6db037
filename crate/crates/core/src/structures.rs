//! Finite sums, finite products and the two exponential generators.
//!
//! `fe1` adds each new seed as an exponent (`y ↦ y^x`), `fe2` adds it as a
//! base (`y ↦ x^y`). Both operate on finite prefixes of the seed sequence.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tower::{Caps, PowerForm, PowerFormRecord};

/// Largest seed set accepted by [`fs`] and [`fp`].
pub const SUBSET_GUARD: usize = 25;

/// A strictly increasing sequence of power forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSequence(Vec<PowerForm>);

impl SeedSequence {
    pub fn new(elements: Vec<PowerForm>) -> Result<Self> {
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "seed sequence not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(SeedSequence(elements))
    }

    pub fn from_u64s(values: &[u64]) -> Result<Self> {
        let forms = values
            .iter()
            .map(|&v| PowerForm::from_u64(v))
            .collect::<Result<Vec<_>>>()?;
        SeedSequence::new(forms)
    }

    pub fn as_slice(&self) -> &[PowerForm] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Type I puts the new seed in the exponent, type II in the base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeKind {
    #[serde(rename = "FE1")]
    TypeI,
    #[serde(rename = "FE2")]
    TypeII,
}

/// One level of an exponential generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeLevel {
    pub level: usize,
    pub elements: BTreeSet<PowerForm>,
    /// Elements discarded because they exceeded a cap.
    pub dropped: u64,
}

impl FeLevel {
    pub fn max(&self) -> Option<&PowerForm> {
        self.elements.iter().next_back()
    }
}

fn check_subset_guard(n: usize) -> Result<()> {
    if n > SUBSET_GUARD {
        return Err(Error::capacity(format!(
            "{n} seeds exceed the subset guard of {SUBSET_GUARD}"
        )));
    }
    Ok(())
}

fn distinct_positive(xs: &[BigUint]) -> Result<BTreeSet<BigUint>> {
    let set: BTreeSet<BigUint> = xs.iter().cloned().collect();
    if set.iter().next().is_some_and(|x| x.is_zero()) {
        return Err(Error::domain("FS/FP seeds must be at least 1"));
    }
    check_subset_guard(set.len())?;
    Ok(set)
}

/// Sums of the non-empty subsets of `xs`.
pub fn fs(xs: &[BigUint]) -> Result<BTreeSet<BigUint>> {
    let seeds = distinct_positive(xs)?;
    let mut sums = BTreeSet::new();
    for x in &seeds {
        let extended: Vec<BigUint> = sums.iter().map(|s| s + x).collect();
        sums.extend(extended);
        sums.insert(x.clone());
    }
    Ok(sums)
}

/// Products of the non-empty subsets of `xs`.
pub fn fp(xs: &[BigUint], caps: &Caps) -> Result<BTreeSet<BigUint>> {
    let seeds = distinct_positive(xs)?;
    let mut products = BTreeSet::new();
    for x in &seeds {
        let extended: Vec<BigUint> = products.iter().map(|p| p * x).collect();
        if let Some(p) = extended.iter().find(|p| p.bits() > caps.value_bit_cap) {
            return Err(Error::capacity(format!(
                "product of {} bits exceeds value_bit_cap {}",
                p.bits(),
                caps.value_bit_cap
            )));
        }
        products.extend(extended);
        products.insert(x.clone());
    }
    Ok(products)
}

/// Unrolls the exponential recursion over any seed slice. Capacity failures
/// of individual elements are counted, other errors propagate.
pub(crate) fn fe_unchecked(seeds: &[PowerForm], level: usize, kind: FeKind, caps: &Caps) -> Result<FeLevel> {
    if seeds.len() < level + 1 {
        return Err(Error::domain(format!(
            "level {level} needs {} seeds, got {}",
            level + 1,
            seeds.len()
        )));
    }
    let mut current: BTreeSet<PowerForm> = BTreeSet::from([seeds[0].clone()]);
    let mut dropped = 0u64;
    for x in &seeds[1..=level] {
        let mut next = current.clone();
        next.insert(x.clone());
        for y in &current {
            let produced = match kind {
                FeKind::TypeI => y.pow(x, caps),
                FeKind::TypeII => x.pow(y, caps),
            };
            match produced {
                Ok(v) => {
                    next.insert(v);
                }
                Err(e) if e.is_capacity() => dropped += 1,
                Err(e) => return Err(e),
            }
        }
        current = next;
    }
    Ok(FeLevel {
        level,
        elements: current,
        dropped,
    })
}

/// `FE^I_level(X)`.
pub fn fe1(seeds: &SeedSequence, level: usize, caps: &Caps) -> Result<FeLevel> {
    fe_unchecked(seeds.as_slice(), level, FeKind::TypeI, caps)
}

/// `FE^II_level(X)`.
pub fn fe2(seeds: &SeedSequence, level: usize, caps: &Caps) -> Result<FeLevel> {
    fe_unchecked(seeds.as_slice(), level, FeKind::TypeII, caps)
}

pub fn fe(seeds: &SeedSequence, level: usize, kind: FeKind, caps: &Caps) -> Result<FeLevel> {
    fe_unchecked(seeds.as_slice(), level, kind, caps)
}

fn checked_big_pow(base: &BigUint, exp: &BigUint, caps: &Caps) -> Result<BigUint> {
    if exp.is_zero() || base.is_one() {
        return Ok(BigUint::one());
    }
    if base.is_zero() {
        return Ok(BigUint::zero());
    }
    let too_big = || Error::capacity(format!("{base}^{exp} exceeds value_bit_cap {}", caps.value_bit_cap));
    // lower bound on the bit length: exp·(bits−1) + 1
    let lower = exp * (base.bits() - 1) + 1u32;
    if lower > BigUint::from(caps.value_bit_cap) {
        return Err(too_big());
    }
    let e = exp.to_u32().ok_or_else(too_big)?;
    let v = base.pow(e);
    if v.bits() > caps.value_bit_cap {
        return Err(too_big());
    }
    Ok(v)
}

/// `{ base^s : s ∈ set }`.
pub fn pow_image_base(base: &BigUint, set: &BTreeSet<BigUint>, caps: &Caps) -> Result<BTreeSet<BigUint>> {
    if *base < BigUint::from(2u32) {
        return Err(Error::domain("pow_image_base needs a base of at least 2"));
    }
    set.iter().map(|s| checked_big_pow(base, s, caps)).collect()
}

/// `{ s^exp : s ∈ set }`.
pub fn pow_image_exp(set: &BTreeSet<BigUint>, exp: &BigUint, caps: &Caps) -> Result<BTreeSet<BigUint>> {
    if exp.is_zero() {
        return Err(Error::domain("pow_image_exp needs an exponent of at least 1"));
    }
    set.iter().map(|s| checked_big_pow(s, exp, caps)).collect()
}

/// An element of a structure report: a power form or a plain decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportElement {
    Form(PowerFormRecord),
    Decimal(String),
}

/// JSON shape shared by all generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub kind: String,
    pub seeds: Vec<String>,
    pub level: Option<usize>,
    pub elements: Vec<ReportElement>,
    pub dropped: u64,
}

/// A named structure generator selectable at runtime.
pub trait StructureGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    fn generate(&self, seeds: &[BigUint], level: Option<usize>, caps: &Caps) -> Result<StructureReport>;
}

struct FiniteSums;
struct FiniteProducts;
struct Exponential(FeKind);

fn decimal_report(kind: &str, seeds: &[BigUint], set: BTreeSet<BigUint>) -> StructureReport {
    StructureReport {
        kind: kind.to_string(),
        seeds: seeds.iter().map(|s| s.to_string()).collect(),
        level: None,
        elements: set.into_iter().map(|v| ReportElement::Decimal(v.to_string())).collect(),
        dropped: 0,
    }
}

impl StructureGenerator for FiniteSums {
    fn name(&self) -> &'static str {
        "fs"
    }

    fn generate(&self, seeds: &[BigUint], _level: Option<usize>, _caps: &Caps) -> Result<StructureReport> {
        Ok(decimal_report("FS", seeds, fs(seeds)?))
    }
}

impl StructureGenerator for FiniteProducts {
    fn name(&self) -> &'static str {
        "fp"
    }

    fn generate(&self, seeds: &[BigUint], _level: Option<usize>, caps: &Caps) -> Result<StructureReport> {
        Ok(decimal_report("FP", seeds, fp(seeds, caps)?))
    }
}

impl StructureGenerator for Exponential {
    fn name(&self) -> &'static str {
        match self.0 {
            FeKind::TypeI => "fe1",
            FeKind::TypeII => "fe2",
        }
    }

    fn generate(&self, seeds: &[BigUint], level: Option<usize>, caps: &Caps) -> Result<StructureReport> {
        let forms = seeds
            .iter()
            .map(|s| PowerForm::normalize(s, caps))
            .collect::<Result<Vec<_>>>()?;
        let seq = SeedSequence::new(forms)?;
        let level = level.unwrap_or(seq.len().saturating_sub(1));
        let out = fe(&seq, level, self.0, caps)?;
        Ok(StructureReport {
            kind: match self.0 {
                FeKind::TypeI => "FE1",
                FeKind::TypeII => "FE2",
            }
            .to_string(),
            seeds: seeds.iter().map(|s| s.to_string()).collect(),
            level: Some(level),
            elements: out
                .elements
                .iter()
                .map(|p| ReportElement::Form(p.to_record(caps)))
                .collect(),
            dropped: out.dropped,
        })
    }
}

/// Generators registered by name.
pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Arc<dyn StructureGenerator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        GeneratorRegistry {
            generators: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(FiniteSums);
        reg.register(FiniteProducts);
        reg.register(Exponential(FeKind::TypeI));
        reg.register(Exponential(FeKind::TypeII));
        reg
    }

    pub fn register<G: StructureGenerator + 'static>(&mut self, generator: G) {
        self.generators.insert(generator.name(), Arc::new(generator));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn StructureGenerator>> {
        self.generators.get(name).cloned().ok_or_else(|| {
            Error::domain(format!(
                "unknown structure {name:?}; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.generators.keys().copied().collect()
    }
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
