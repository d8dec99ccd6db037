//! Canonical `root^exponent` arithmetic.
//!
//! Every natural `n >= 2` has a unique representation `n = r^e` where `r` is
//! not itself a perfect power. Storing that pair instead of `n` keeps values
//! such as `2^(2^2048)` exact and comparable without materializing them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for explicit values and symbolic exponents, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub value_bit_cap: u64,
    pub exp_bit_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            value_bit_cap: 4096,
            exp_bit_cap: 65536,
        }
    }
}

/// A materialized natural whose bit length respects `value_bit_cap`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExplicitValue(BigUint);

impl ExplicitValue {
    pub fn new(value: BigUint, caps: &Caps) -> Result<Self> {
        if value.bits() > caps.value_bit_cap {
            return Err(Error::capacity(format!(
                "value of {} bits exceeds value_bit_cap {}",
                value.bits(),
                caps.value_bit_cap
            )));
        }
        Ok(ExplicitValue(value))
    }

    pub fn get(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl fmt::Display for ExplicitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A natural `>= 2` held as `root^exponent` with a perfect-power-free root.
///
/// Equality and hashing are structural; canonicity makes that coincide with
/// numeric equality. `Ord` is the numeric order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerForm {
    root: BigUint,
    exponent: BigUint,
}

/// JSON record of a power form. `value` is `None` when the number does not
/// fit `value_bit_cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerFormRecord {
    pub root: String,
    pub exp: String,
    pub value: Option<String>,
}

const SMALL_PRIMES: [u32; 18] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];

/// Bit length above which [`PowerForm::cmp`] stops materializing values.
const EXPLICIT_COMPARE_BITS: u64 = 4096;

fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Exact integer `p`-th root of `n` if one exists.
fn exact_root_u64(n: u64, p: u32) -> Option<u64> {
    let r = n.nth_root(p);
    match r.checked_pow(p) {
        Some(v) if v == n => Some(r),
        _ => None,
    }
}

fn exact_root_big(n: &BigUint, p: u32) -> Option<BigUint> {
    let r = n.nth_root(p);
    if r.pow(p) == *n {
        Some(r)
    } else {
        None
    }
}

/// Splits `n >= 2` into `(root, exponent)` with the exponent maximal.
fn perfect_power_split_u64(n: u64) -> (u64, u64) {
    let mut root = n;
    let mut exp = 1u64;
    'outer: loop {
        let bits = 64 - root.leading_zeros();
        for &p in SMALL_PRIMES.iter().take_while(|&&p| p < bits) {
            if let Some(r) = exact_root_u64(root, p) {
                root = r;
                exp *= p as u64;
                continue 'outer;
            }
        }
        return (root, exp);
    }
}

fn perfect_power_split_big(n: &BigUint) -> (BigUint, BigUint) {
    if let Some(small) = n.to_u64() {
        let (r, e) = perfect_power_split_u64(small);
        return (BigUint::from(r), BigUint::from(e));
    }
    let primes = primes_up_to(n.bits());
    let mut root = n.clone();
    let mut exp = BigUint::one();
    'outer: loop {
        if let Some(small) = root.to_u64() {
            let (r, e) = perfect_power_split_u64(small);
            return (BigUint::from(r), exp * e);
        }
        let bits = root.bits();
        for &p in primes.iter().take_while(|&&p| p < bits) {
            if let Some(r) = exact_root_big(&root, p as u32) {
                root = r;
                exp *= p;
                continue 'outer;
            }
        }
        return (root, exp);
    }
}

impl PowerForm {
    /// Canonical form of an explicit natural `n >= 2`.
    pub fn normalize(n: &BigUint, caps: &Caps) -> Result<Self> {
        if *n < BigUint::from(2u32) {
            return Err(Error::domain(format!("{n} is below 2 and has no power form")));
        }
        if n.bits() > caps.value_bit_cap {
            return Err(Error::capacity(format!(
                "input of {} bits exceeds value_bit_cap {}",
                n.bits(),
                caps.value_bit_cap
            )));
        }
        let (root, exponent) = perfect_power_split_big(n);
        Ok(PowerForm { root, exponent })
    }

    /// Canonical form of a machine-word natural `n >= 2`.
    pub fn from_u64(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("{n} is below 2 and has no power form")));
        }
        let (r, e) = perfect_power_split_u64(n);
        Ok(PowerForm {
            root: BigUint::from(r),
            exponent: BigUint::from(e),
        })
    }

    /// The form of `base^exp` for an explicit `base >= 2` and `exp >= 1`.
    pub fn with_exponent(base: &BigUint, exp: &BigUint, caps: &Caps) -> Result<Self> {
        if exp.is_zero() {
            return Err(Error::domain("exponent must be at least 1"));
        }
        PowerForm::normalize(base, caps)?.raise(exp, caps)
    }

    /// Accepts a decimal natural or `base^exp` with decimal parts.
    pub fn parse(text: &str, caps: &Caps) -> Result<Self> {
        let text = text.trim();
        let parse_nat = |s: &str| {
            s.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::domain(format!("not a natural number: {s:?}")))
        };
        match text.split_once('^') {
            Some((base, exp)) => PowerForm::with_exponent(&parse_nat(base)?, &parse_nat(exp)?, caps),
            None => PowerForm::normalize(&parse_nat(text)?, caps),
        }
    }

    pub fn root(&self) -> &BigUint {
        &self.root
    }

    pub fn exponent(&self) -> &BigUint {
        &self.exponent
    }

    /// Inclusive bounds on the bit length of the represented value.
    fn bit_bounds(&self) -> (BigUint, BigUint) {
        let b = self.root.bits();
        let lo = &self.exponent * (b - 1) + 1u32;
        let hi = &self.exponent * b;
        (lo, hi)
    }

    fn fits_bits(&self, cap: u64) -> bool {
        let (lo, hi) = self.bit_bounds();
        let cap = BigUint::from(cap);
        if hi <= cap {
            return true;
        }
        if lo > cap {
            return false;
        }
        // the bounds straddle the cap; only possible for small exponents
        let e = self.exponent.to_u32().expect("straddling exponent fits u32");
        self.root.pow(e).bits() <= cap.to_u64().unwrap_or(u64::MAX)
    }

    pub fn is_evaluable(&self, caps: &Caps) -> bool {
        self.fits_bits(caps.value_bit_cap)
    }

    pub fn evaluate(&self, caps: &Caps) -> Result<ExplicitValue> {
        if !self.is_evaluable(caps) {
            return Err(Error::capacity(format!(
                "{self} exceeds value_bit_cap {}",
                caps.value_bit_cap
            )));
        }
        let e = self.exponent.to_u32().expect("evaluable exponent fits u32");
        Ok(ExplicitValue(self.root.pow(e)))
    }

    /// The explicit value when it fits the caps.
    pub fn try_value(&self, caps: &Caps) -> Option<BigUint> {
        self.evaluate(caps).ok().map(ExplicitValue::into_inner)
    }

    pub fn to_u64(&self) -> Option<u64> {
        if !self.fits_bits(64) {
            return None;
        }
        let e = self.exponent.to_u32()?;
        self.root.to_u64()?.checked_pow(e)
    }

    /// `self^k` for an explicit `k >= 1`.
    pub fn raise(&self, k: &BigUint, caps: &Caps) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::domain("exponent must be at least 1"));
        }
        let exponent = &self.exponent * k;
        if exponent.bits() > caps.exp_bit_cap {
            return Err(Error::capacity(format!(
                "exponent of {} bits exceeds exp_bit_cap {}",
                exponent.bits(),
                caps.exp_bit_cap
            )));
        }
        Ok(PowerForm {
            root: self.root.clone(),
            exponent,
        })
    }

    /// `self^b`; `b` must be explicitly evaluable.
    pub fn pow(&self, b: &PowerForm, caps: &Caps) -> Result<Self> {
        let vb = b
            .try_value(caps)
            .ok_or_else(|| Error::capacity("symbolic exponent unsupported"))?;
        self.raise(&vb, caps)
    }

    /// `value mod m` without materializing the value.
    pub fn residue(&self, modulus: &BigUint) -> BigUint {
        self.root.modpow(&self.exponent, modulus)
    }

    pub fn to_record(&self, caps: &Caps) -> PowerFormRecord {
        PowerFormRecord {
            root: self.root.to_string(),
            exp: self.exponent.to_string(),
            value: self.try_value(caps).map(|v| v.to_string()),
        }
    }

    pub fn from_record(record: &PowerFormRecord, caps: &Caps) -> Result<Self> {
        let root: BigUint = record
            .root
            .parse()
            .map_err(|_| Error::domain(format!("bad root {:?}", record.root)))?;
        let exp: BigUint = record
            .exp
            .parse()
            .map_err(|_| Error::domain(format!("bad exponent {:?}", record.exp)))?;
        let form = PowerForm::with_exponent(&root, &exp, caps)?;
        if form.root != root {
            return Err(Error::domain(format!("root {root} is a perfect power")));
        }
        Ok(form)
    }

    fn compare_by_logs(&self, other: &PowerForm) -> Ordering {
        let mut precision = 64;
        loop {
            let a = Log2Bounds::of(&self.root, precision);
            let b = Log2Bounds::of(&other.root, precision);
            // self^... ∈ exponent·[lo, hi]/2^shift
            let a_lo = (&self.exponent * &a.lo) << b.shift;
            let a_hi = (&self.exponent * &a.hi) << b.shift;
            let b_lo = (&other.exponent * &b.lo) << a.shift;
            let b_hi = (&other.exponent * &b.hi) << a.shift;
            if a_hi < b_lo {
                return Ordering::Less;
            }
            if b_hi < a_lo {
                return Ordering::Greater;
            }
            precision *= 2;
        }
    }
}

impl Ord for PowerForm {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if self.root == other.root {
            return self.exponent.cmp(&other.exponent);
        }
        let (a_lo, a_hi) = self.bit_bounds();
        let (b_lo, b_hi) = other.bit_bounds();
        if a_hi < b_lo {
            return Ordering::Less;
        }
        if b_hi < a_lo {
            return Ordering::Greater;
        }
        if self.fits_bits(EXPLICIT_COMPARE_BITS) && other.fits_bits(EXPLICIT_COMPARE_BITS) {
            let ea = self.exponent.to_u32().expect("small exponent");
            let eb = other.exponent.to_u32().expect("small exponent");
            return self.root.pow(ea).cmp(&other.root.pow(eb));
        }
        self.compare_by_logs(other)
    }
}

impl PartialOrd for PowerForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PowerForm {
    /// Decimal for values up to 128 bits, `root^exp` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fits_bits(128) {
            let e = self.exponent.to_u32().expect("small exponent");
            write!(f, "{}", self.root.pow(e))
        } else {
            write!(f, "{}^{}", self.root, self.exponent)
        }
    }
}

/// Certified dyadic enclosure `lo/2^shift <= log2(r) <= hi/2^shift`.
#[derive(Debug, Clone)]
pub(crate) struct Log2Bounds {
    pub lo: BigUint,
    pub hi: BigUint,
    pub shift: u64,
}

fn shr_ceil(x: &BigUint, s: u64) -> BigUint {
    if s == 0 {
        return x.clone();
    }
    let floor = x >> s;
    if (&floor << s) == *x {
        floor
    } else {
        floor + 1u32
    }
}

impl Log2Bounds {
    /// Extracts up to `precision` fractional bits of `log2(r)` by repeated
    /// squaring of the mantissa, carried as a fixed-point interval.
    pub(crate) fn of(r: &BigUint, precision: u64) -> Self {
        assert!(r.bits() >= 2, "log2 bounds need r >= 2");
        let k = r.bits() - 1;
        let guard = 2 * (64 - precision.leading_zeros() as u64) + 16;
        let w = precision + guard;
        // mantissa r / 2^k in [1, 2), scaled by 2^w
        let (mut yl, mut yu) = if k >= w {
            (r >> (k - w), shr_ceil(r, k - w))
        } else {
            (r << (w - k), r << (w - k))
        };
        let two = BigUint::one() << (w + 1);
        let mut frac = BigUint::zero();
        let mut shift = 0u64;
        for _ in 0..precision {
            yl = (&yl * &yl) >> w;
            yu = shr_ceil(&(&yu * &yu), w);
            let bit = if yl >= two {
                yl >>= 1;
                yu = shr_ceil(&yu, 1);
                1u32
            } else if yu < two {
                0u32
            } else {
                break;
            };
            frac = (frac << 1) + bit;
            shift += 1;
        }
        let lo = (BigUint::from(k) << shift) + frac;
        let hi = &lo + 1u32;
        Log2Bounds { lo, hi, shift }
    }
}
