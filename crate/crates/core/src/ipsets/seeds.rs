use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::setspec::SetSpec;
use super::{Window, WindowSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IpKind {
    Additive,
    Multiplicative,
}

impl std::str::FromStr for IpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" | "add" | "fs" => Ok(IpKind::Additive),
            "multiplicative" | "mul" | "fp" => Ok(IpKind::Multiplicative),
            _ => Err(Error::domain(format!("unknown IP kind {s:?}"))),
        }
    }
}

/// Result of a seed search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum SeedSearch {
    Found { seed: Vec<u64> },
    None,
    Inconclusive,
}

/// Three-valued IP* verdict on a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails { witness: Vec<u64> },
    Inconclusive,
}

fn combine(kind: IpKind, a: u64, b: u64) -> Option<u64> {
    match kind {
        IpKind::Additive => a.checked_add(b),
        IpKind::Multiplicative => a.checked_mul(b),
    }
}

struct Dfs<'a> {
    a: &'a WindowSet,
    members: &'a [u64],
    kind: IpKind,
    m: usize,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found(Vec<u64>),
    Exhausted,
    OutOfBudget,
}

impl Dfs<'_> {
    /// Extends `chosen` (whose finite sums/products are `closure`) with
    /// members at positions `>= from`.
    fn extend(&mut self, chosen: &mut Vec<u64>, closure: &BTreeSet<u64>, from: usize) -> Step {
        if chosen.len() == self.m {
            return Step::Found(chosen.clone());
        }
        for i in from..self.members.len() {
            let x = self.members[i];
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::OutOfBudget;
            }
            let mut next = closure.clone();
            next.insert(x);
            let mut ok = true;
            let mut overshoot = false;
            for &s in closure {
                match combine(self.kind, s, x) {
                    Some(v) if self.a.contains(v) => {
                        next.insert(v);
                    }
                    Some(v) if v > self.a.hi => {
                        ok = false;
                        overshoot = true;
                        break;
                    }
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        ok = false;
                        overshoot = true;
                        break;
                    }
                }
            }
            // growing x only pushes the closure further up, except that
            // a product with 0 stays 0
            if overshoot && closure.iter().all(|&s| s > 0) {
                return Step::Exhausted;
            }
            if !ok {
                continue;
            }
            chosen.push(x);
            match self.extend(chosen, &next, i + 1) {
                Step::Exhausted => {}
                other => return other,
            }
            chosen.pop();
        }
        Step::Exhausted
    }
}

/// Lexicographically least strictly increasing `X` of size `m` whose finite
/// sums (products) all lie in `a`. The budget bounds the search nodes below
/// each choice of the first element.
pub fn find_seed(a: &WindowSet, m: usize, kind: IpKind, budget: u64) -> Result<SeedSearch> {
    if m < 1 {
        return Err(Error::domain("seed size must be at least 1"));
    }
    let members: Vec<u64> = a.members.iter().copied().collect();
    let best = std::sync::atomic::AtomicUsize::new(usize::MAX);
    let results: Vec<Option<Step>> = (0..members.len())
        .into_par_iter()
        .map(|i| {
            if i > best.load(std::sync::atomic::Ordering::Relaxed) {
                return None;
            }
            let mut dfs = Dfs {
                a,
                members: &members,
                kind,
                m,
                nodes: 1,
                budget,
            };
            let x = members[i];
            let step = dfs.extend(&mut vec![x], &BTreeSet::from([x]), i + 1);
            if matches!(step, Step::Found(_)) {
                best.fetch_min(i, std::sync::atomic::Ordering::Relaxed);
            }
            Some(step)
        })
        .collect();
    let mut inconclusive = false;
    for step in results.into_iter().flatten() {
        match step {
            Step::Found(seed) => return Ok(SeedSearch::Found { seed }),
            Step::OutOfBudget => inconclusive = true,
            Step::Exhausted => {}
        }
    }
    Ok(if inconclusive {
        SeedSearch::Inconclusive
    } else {
        SeedSearch::None
    })
}

pub fn find_fs_seed(a: &WindowSet, m: usize, budget: u64) -> Result<SeedSearch> {
    find_seed(a, m, IpKind::Additive, budget)
}

pub fn find_fp_seed(a: &WindowSet, m: usize, budget: u64) -> Result<SeedSearch> {
    find_seed(a, m, IpKind::Multiplicative, budget)
}

/// Looks for a size-`m` FS (FP) set inside the complement of `a` within
/// `window`. Finding one refutes the IP* shadow; exhausting the window
/// without one means it holds there.
pub fn is_ip_star_window(a: &SetSpec, kind: IpKind, m: usize, window: Window, budget: u64) -> Result<Verdict> {
    let complement = WindowSet::from_predicate(window, |v| Ok(!a.contains_u64(v)?))?;
    Ok(match find_seed(&complement, m, kind, budget)? {
        SeedSearch::Found { seed } => Verdict::Fails { witness: seed },
        SeedSearch::None => Verdict::Holds,
        SeedSearch::Inconclusive => Verdict::Inconclusive,
    })
}
