//! Finite windows onto subsets of ℕ: preimage transforms, FS/FP witness
//! search and the progression detectors.

mod progressions;
mod seeds;
pub mod setspec;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use progressions::{find_geometric_progressions, find_power_progressions};
pub use seeds::{find_fp_seed, find_fs_seed, find_seed, is_ip_star_window, IpKind, SeedSearch, Verdict};
pub use setspec::SetSpec;

/// An inclusive range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: u64,
    pub hi: u64,
}

impl Window {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// A finite set together with the window it was observed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowSetJson")]
pub struct WindowSet {
    pub lo: u64,
    pub hi: u64,
    pub members: BTreeSet<u64>,
}

#[derive(Deserialize)]
struct WindowSetJson {
    lo: u64,
    hi: u64,
    members: BTreeSet<u64>,
}

impl TryFrom<WindowSetJson> for WindowSet {
    type Error = Error;

    fn try_from(raw: WindowSetJson) -> Result<Self> {
        WindowSet::new(raw.lo, raw.hi, raw.members)
    }
}

impl WindowSet {
    pub fn new(lo: u64, hi: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        Window::new(lo, hi)?;
        let members: BTreeSet<u64> = members.into_iter().collect();
        if let Some(m) = members.iter().find(|&&m| m < lo || m > hi) {
            return Err(Error::domain(format!("member {m} lies outside [{lo}, {hi}]")));
        }
        Ok(WindowSet { lo, hi, members })
    }

    /// Members of `[lo, hi]` selected by `keep`.
    pub fn from_predicate(window: Window, mut keep: impl FnMut(u64) -> Result<bool>) -> Result<Self> {
        let mut members = BTreeSet::new();
        for v in window.lo..=window.hi {
            if keep(v)? {
                members.insert(v);
            }
        }
        Ok(WindowSet {
            lo: window.lo,
            hi: window.hi,
            members,
        })
    }

    pub fn window(&self) -> Window {
        Window {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        self.members.contains(&v)
    }
}

/// The four preimage maps on subsets of ℕ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "n", rename_all = "lowercase")]
pub enum Transform {
    /// `-n + A = { m : m + n ∈ A }`
    Shift(u64),
    /// `n⁻¹A = { m : m·n ∈ A }`
    Divide(u64),
    /// `log_n[A] = { m : n^m ∈ A }`
    Log(u64),
    /// `A^{1/n} = { m : m^n ∈ A }`
    Root(u64),
}

impl FromStr for Transform {
    type Err = Error;

    /// `shift:3`, `divide:2`, `log:2`, `root:2`.
    fn from_str(s: &str) -> Result<Self> {
        let (op, n) = s
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("transform {s:?} should look like log:2")))?;
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("bad transform parameter in {s:?}")))?;
        match op.trim() {
            "shift" => Ok(Transform::Shift(n)),
            "divide" => Ok(Transform::Divide(n)),
            "log" => Ok(Transform::Log(n)),
            "root" => Ok(Transform::Root(n)),
            other => Err(Error::domain(format!("unknown transform {other:?}"))),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Shift(n) => write!(f, "shift:{n}"),
            Transform::Divide(n) => write!(f, "divide:{n}"),
            Transform::Log(n) => write!(f, "log:{n}"),
            Transform::Root(n) => write!(f, "root:{n}"),
        }
    }
}

fn floor_log(base: u64, x: u64) -> u64 {
    debug_assert!(base >= 2 && x >= 1);
    x.ilog(base) as u64
}

fn ceil_log(base: u64, x: u64) -> u64 {
    let f = floor_log(base, x);
    if base.checked_pow(f as u32) == Some(x) {
        f
    } else {
        f + 1
    }
}

fn ceil_root(x: u64, n: u32) -> u64 {
    let r = x.nth_root(n);
    if r.checked_pow(n) == Some(x) {
        r
    } else {
        r + 1
    }
}

/// Applies `op` and records the shrunken result window.
pub fn transform(a: &WindowSet, op: Transform) -> Result<WindowSet> {
    let empty = || Error::domain(format!("{op} leaves no window inside [{}, {}]", a.lo, a.hi));
    match op {
        Transform::Shift(n) => {
            if a.hi < n {
                return Err(empty());
            }
            let members = a.members.iter().filter(|&&v| v >= n).map(|&v| v - n);
            WindowSet::new(a.lo.saturating_sub(n), a.hi - n, members)
        }
        Transform::Divide(n) => {
            if n == 0 {
                return Err(Error::domain("divide needs n >= 1"));
            }
            let (lo, hi) = (a.lo.div_ceil(n), a.hi / n);
            if lo > hi {
                return Err(empty());
            }
            let members = a.members.iter().filter(|&&v| v % n == 0).map(|&v| v / n);
            WindowSet::new(lo, hi, members)
        }
        Transform::Log(n) => {
            if n < 2 {
                return Err(Error::domain("log needs n >= 2"));
            }
            if a.hi == 0 {
                return Err(empty());
            }
            let (lo, hi) = (ceil_log(n, a.lo.max(1)), floor_log(n, a.hi));
            if lo > hi {
                return Err(empty());
            }
            let members = (lo..=hi).filter(|&m| a.contains(n.pow(m as u32)));
            WindowSet::new(lo, hi, members.collect::<Vec<_>>())
        }
        Transform::Root(n) => {
            if n == 0 {
                return Err(Error::domain("root needs n >= 1"));
            }
            let k = u32::try_from(n).unwrap_or(u32::MAX);
            let (lo, hi) = (ceil_root(a.lo, k), a.hi.nth_root(k));
            if lo > hi {
                return Err(empty());
            }
            let members = a.members.iter().filter_map(|&v| {
                let r = v.nth_root(k);
                (r.checked_pow(k) == Some(v)).then_some(r)
            });
            WindowSet::new(lo, hi, members.collect::<Vec<_>>())
        }
    }
}
