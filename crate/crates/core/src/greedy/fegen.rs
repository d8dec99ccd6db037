use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle_failure;
use crate::error::{Error, Result};
use crate::ipsets::SetSpec;
use crate::structures::{fe_unchecked, FeKind};
use crate::tower::{Caps, PowerForm};

/// Every subset of the chosen elements is checked, so this stays small.
const MAX_STEPS: usize = 20;

/// How the bound `l = f(x_0, …, x_{p-1})` on `t` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FSpec {
    Constant(u64),
    /// `max FE^I_n(x_0, …, x_n)`; 1 on the empty prefix.
    MaxFe1,
    /// `max FE^II_n(x_0, …, x_n)`; 1 on the empty prefix.
    MaxFe2,
}

impl FromStr for FSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "max-fe1" => return Ok(FSpec::MaxFe1),
            "max-fe2" => return Ok(FSpec::MaxFe2),
            _ => {}
        }
        let c = s
            .strip_prefix("constant:")
            .or_else(|| s.strip_prefix("const:"))
            .unwrap_or(s);
        c.parse()
            .map(FSpec::Constant)
            .map_err(|_| Error::domain(format!("unknown f spec {s:?}")))
    }
}

impl fmt::Display for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FSpec::Constant(c) => write!(f, "constant:{c}"),
            FSpec::MaxFe1 => write!(f, "max-fe1"),
            FSpec::MaxFe2 => write!(f, "max-fe2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FegenLimits {
    pub max_block_size: usize,
    /// Blocks only use indices below this.
    pub max_index: usize,
    /// Search nodes allowed below each choice of the first block.
    pub budget: u64,
    /// Largest bound `l` on `t` that is scanned.
    pub max_t: u64,
}

impl Default for FegenLimits {
    fn default() -> Self {
        FegenLimits {
            max_block_size: 4,
            max_index: 32,
            budget: 1_000_000,
            max_t: 1 << 16,
        }
    }
}

/// One tested instance of the conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    /// Indices into `chosen`.
    pub set: Vec<usize>,
    pub t: u64,
    pub value: String,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyState {
    pub kind: FeKind,
    pub f_spec: FSpec,
    pub y: Vec<String>,
    pub blocks: Vec<Vec<usize>>,
    /// Block sums (type I) or block products (type II) of `y`.
    pub chosen: Vec<String>,
    /// `level_max[p] = f(x_0, …, x_{p-1})`, the bound on `t` for sets `F`
    /// with `min F = p`.
    pub level_max: Vec<String>,
    pub checks: Vec<ConditionCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FegenOutcome {
    Success(GreedyState),
    Failure { reason: String },
    Inconclusive { reason: String },
}

impl FegenOutcome {
    pub fn state(&self) -> Option<&GreedyState> {
        match self {
            FegenOutcome::Success(s) => Some(s),
            _ => None,
        }
    }
}

struct Ctx<'a> {
    a: &'a SetSpec,
    kind: FeKind,
    f_spec: FSpec,
    y: &'a [BigUint],
    limits: &'a FegenLimits,
    caps: &'a Caps,
}

impl Ctx<'_> {
    fn block_value(&self, block: &[usize]) -> BigUint {
        match self.kind {
            FeKind::TypeI => block.iter().map(|&i| &self.y[i]).sum(),
            FeKind::TypeII => block.iter().map(|&i| &self.y[i]).product(),
        }
    }

    fn combine(&self, xs: &[BigUint], set: &[usize]) -> BigUint {
        match self.kind {
            FeKind::TypeI => set.iter().map(|&j| &xs[j]).sum(),
            FeKind::TypeII => set.iter().map(|&j| &xs[j]).product(),
        }
    }

    /// `f(prefix)` as a scan bound.
    fn f_value(&self, prefix: &[BigUint]) -> Result<u64> {
        let kind = match self.f_spec {
            FSpec::Constant(c) => return Ok(c),
            _ if prefix.is_empty() => return Ok(1),
            FSpec::MaxFe1 => FeKind::TypeI,
            FSpec::MaxFe2 => FeKind::TypeII,
        };
        let seeds = prefix
            .iter()
            .map(|x| PowerForm::normalize(x, self.caps))
            .collect::<Result<Vec<_>>>()?;
        let level = fe_unchecked(&seeds, seeds.len() - 1, kind, self.caps)?;
        if level.dropped > 0 {
            return Err(Error::capacity("f: FE level exceeds the caps"));
        }
        let top = level.max().expect("levels are non-empty");
        top.to_u64()
            .filter(|&l| l <= self.limits.max_t)
            .ok_or_else(|| Error::capacity(format!("f = {top} exceeds max_t {}", self.limits.max_t)))
    }

    fn t_range(&self, l: u64) -> std::ops::RangeInclusive<u64> {
        match self.kind {
            FeKind::TypeI => 2..=l,
            FeKind::TypeII => 1..=l,
        }
    }

    /// `t^v` (type I) or `v^t` (type II).
    fn member(&self, v: &BigUint, t: u64) -> Result<bool> {
        let t = BigUint::from(t);
        match self.kind {
            FeKind::TypeI => self.a.contains_pow(&t, v, self.caps),
            FeKind::TypeII => self.a.contains_pow(v, &t, self.caps),
        }
    }

    fn describe(&self, v: &BigUint, t: u64) -> String {
        let (base, exp) = match self.kind {
            FeKind::TypeI => (BigUint::from(t), v.clone()),
            FeKind::TypeII => (v.clone(), BigUint::from(t)),
        };
        if base < BigUint::from(2u32) {
            return base.to_string();
        }
        match PowerForm::with_exponent(&base, &exp, self.caps) {
            Ok(f) => f.to_string(),
            Err(_) => format!("{base}^{exp}"),
        }
    }

    /// Checks every `F` with `max F = i`. `Err` only for capacity.
    fn conditions_hold(&self, xs: &[BigUint], f_vals: &[u64]) -> Result<std::result::Result<bool, Error>> {
        let i = xs.len() - 1;
        for mask in 0u64..(1 << i) {
            let mut set: Vec<usize> = (0..i).filter(|&j| mask >> j & 1 == 1).collect();
            set.push(i);
            let v = self.combine(xs, &set);
            for t in self.t_range(f_vals[set[0]]) {
                match oracle_failure(self.member(&v, t))? {
                    Ok(true) => {}
                    Ok(false) => return Ok(Ok(false)),
                    Err(e) => return Ok(Err(e)),
                }
            }
        }
        Ok(Ok(true))
    }
}

/// All blocks (sorted index lists) in lexicographic order.
fn all_blocks(len: usize, max_size: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, len: usize, max_size: usize, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max_size {
            return;
        }
        for next in cur.last().map_or(0, |&l| l + 1)..len {
            cur.push(next);
            grow(cur, len, max_size, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for first in 0..len {
        grow(&mut vec![first], len, max_size, &mut out);
    }
    out
}

enum Branch {
    Found(Vec<Vec<usize>>),
    Exhausted { undecidable: u64 },
    OutOfBudget,
}

struct Search<'a> {
    ctx: &'a Ctx<'a>,
    blocks: &'a [Vec<usize>],
    steps: usize,
    nodes: u64,
    undecidable: u64,
    chosen: Vec<Vec<usize>>,
    xs: Vec<BigUint>,
    f_vals: Vec<u64>,
}

enum Visit {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    /// Tries `block` as the next block and recurses.
    fn visit(&mut self, block: &[usize]) -> Result<Visit> {
        self.nodes += 1;
        if self.nodes > self.ctx.limits.budget {
            return Ok(Visit::OutOfBudget);
        }
        let x = self.ctx.block_value(block);
        if !matches!(self.ctx.f_spec, FSpec::Constant(_)) && x < BigUint::from(2u32) {
            return Ok(Visit::Exhausted);
        }
        self.xs.push(x);
        self.chosen.push(block.to_vec());
        let verdict = match self.ctx.conditions_hold(&self.xs, &self.f_vals)? {
            Ok(true) if self.xs.len() < self.steps => match oracle_failure(self.ctx.f_value(&self.xs))? {
                Ok(l) => {
                    self.f_vals.push(l);
                    let r = self.descend()?;
                    self.f_vals.pop();
                    r
                }
                Err(_) => {
                    self.undecidable += 1;
                    Visit::Exhausted
                }
            },
            Ok(true) => Visit::Found,
            Ok(false) => Visit::Exhausted,
            Err(_) => {
                self.undecidable += 1;
                Visit::Exhausted
            }
        };
        if !matches!(verdict, Visit::Found) {
            self.xs.pop();
            self.chosen.pop();
        }
        Ok(verdict)
    }

    fn descend(&mut self) -> Result<Visit> {
        let after = self.chosen.last().and_then(|b| b.last()).map_or(0, |&l| l + 1);
        let start = self.blocks.partition_point(|b| b[0] < after);
        for block in &self.blocks[start..] {
            match self.visit(block)? {
                Visit::Exhausted => {}
                other => return Ok(other),
            }
        }
        Ok(Visit::Exhausted)
    }
}

fn check_y(y: &[BigUint]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::domain("the y-prefix is empty"));
    }
    if y[0].is_zero() {
        return Err(Error::domain("y must consist of naturals >= 1"));
    }
    if y.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("y must be strictly increasing"));
    }
    Ok(())
}

/// Backtracking over blocks `H_0 < H_1 < …` of `y` such that, with `x_j`
/// the block sums (type I) or products (type II), every non-empty `F` and
/// every admissible `t` give `t^{ΣF} ∈ A` (type I, `2 <= t <= l`) or
/// `(ΠF)^t ∈ A` (type II, `1 <= t <= l`), where `l = f(x_0, …, x_{min F-1})`.
/// The lexicographically least block list is returned.
pub fn search_fegen(
    a: &SetSpec,
    kind: FeKind,
    y: &[BigUint],
    f_spec: FSpec,
    steps: usize,
    limits: &FegenLimits,
    caps: &Caps,
) -> Result<FegenOutcome> {
    check_y(y)?;
    if steps < 1 {
        return Err(Error::domain("steps must be at least 1"));
    }
    if steps > MAX_STEPS {
        return Err(Error::capacity(format!("at most {MAX_STEPS} steps are supported")));
    }
    let ctx = Ctx {
        a,
        kind,
        f_spec,
        y,
        limits,
        caps,
    };
    let f0 = ctx.f_value(&[])?;
    let blocks = all_blocks(y.len().min(limits.max_index), limits.max_block_size.max(1));
    let best = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<Branch>> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, first)| -> Result<Option<Branch>> {
            if i > best.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let mut search = Search {
                ctx: &ctx,
                blocks: &blocks,
                steps,
                nodes: 0,
                undecidable: 0,
                chosen: Vec::new(),
                xs: Vec::new(),
                f_vals: vec![f0],
            };
            let branch = match search.visit(first)? {
                Visit::Found => {
                    best.fetch_min(i, Ordering::Relaxed);
                    Branch::Found(search.chosen)
                }
                Visit::Exhausted => Branch::Exhausted {
                    undecidable: search.undecidable,
                },
                Visit::OutOfBudget => Branch::OutOfBudget,
            };
            Ok(Some(branch))
        })
        .collect::<Result<_>>()?;

    let mut out_of_budget = false;
    let mut undecidable = 0;
    for branch in results.into_iter().flatten() {
        match branch {
            Branch::Found(blocks) => return Ok(FegenOutcome::Success(build_state(&ctx, blocks)?)),
            Branch::OutOfBudget => out_of_budget = true,
            Branch::Exhausted { undecidable: u } => undecidable += u,
        }
    }
    Ok(if out_of_budget {
        FegenOutcome::Inconclusive {
            reason: "search budget exhausted".into(),
        }
    } else if undecidable > 0 {
        FegenOutcome::Inconclusive {
            reason: format!("{undecidable} candidate(s) fell outside the oracle range"),
        }
    } else {
        FegenOutcome::Failure {
            reason: "no valid choice within the y-prefix".into(),
        }
    })
}

/// Records every condition for a full block list.
fn build_state(ctx: &Ctx<'_>, blocks: Vec<Vec<usize>>) -> Result<GreedyState> {
    let xs: Vec<BigUint> = blocks.iter().map(|b| ctx.block_value(b)).collect();
    let f_vals = (0..xs.len())
        .map(|p| ctx.f_value(&xs[..p]))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for mask in 1u64..(1 << xs.len()) {
        let set: Vec<usize> = (0..xs.len()).filter(|&j| mask >> j & 1 == 1).collect();
        let v = ctx.combine(&xs, &set);
        for t in ctx.t_range(f_vals[set[0]]) {
            checks.push(ConditionCheck {
                set: set.clone(),
                t,
                value: ctx.describe(&v, t),
                member: ctx.member(&v, t)?,
            });
        }
    }
    Ok(GreedyState {
        kind: ctx.kind,
        f_spec: ctx.f_spec,
        y: ctx.y.iter().map(ToString::to_string).collect(),
        blocks,
        chosen: xs.iter().map(ToString::to_string).collect(),
        level_max: f_vals.iter().map(ToString::to_string).collect(),
        checks,
    })
}

pub fn search_fegen1(
    a: &SetSpec,
    y: &[BigUint],
    f_spec: FSpec,
    steps: usize,
    limits: &FegenLimits,
    caps: &Caps,
) -> Result<FegenOutcome> {
    search_fegen(a, FeKind::TypeI, y, f_spec, steps, limits, caps)
}

pub fn search_fegen2(
    a: &SetSpec,
    y: &[BigUint],
    f_spec: FSpec,
    steps: usize,
    limits: &FegenLimits,
    caps: &Caps,
) -> Result<FegenOutcome> {
    search_fegen(a, FeKind::TypeII, y, f_spec, steps, limits, caps)
}

/// Independent re-check of a state: block discipline, block values, the
/// bounds `l`, and every condition over all non-empty `F`. The recorded
/// check list must match the recomputed one exactly.
pub fn verify_fegen(state: &GreedyState, a: &SetSpec, limits: &FegenLimits, caps: &Caps) -> Result<bool> {
    let parse = |s: &String| {
        s.parse::<BigUint>()
            .map_err(|_| Error::domain(format!("not a natural number: {s:?}")))
    };
    let y = state.y.iter().map(parse).collect::<Result<Vec<_>>>()?;
    check_y(&y)?;
    let mut prev_max: Option<usize> = None;
    for b in &state.blocks {
        let (Some(&lo), Some(&hi)) = (b.first(), b.last()) else {
            return Ok(false);
        };
        if b.windows(2).any(|w| w[0] >= w[1]) || hi >= y.len() || prev_max.is_some_and(|p| lo <= p) {
            return Ok(false);
        }
        prev_max = Some(hi);
    }
    let ctx = Ctx {
        a,
        kind: state.kind,
        f_spec: state.f_spec,
        y: &y,
        limits,
        caps,
    };
    let xs: Vec<BigUint> = state.blocks.iter().map(|b| ctx.block_value(b)).collect();
    if xs.iter().map(ToString::to_string).ne(state.chosen.iter().cloned()) {
        return Ok(false);
    }
    let Ok(fresh) = build_state(&ctx, state.blocks.clone()) else {
        return Ok(false);
    };
    Ok(fresh == *state && fresh.checks.iter().all(|c| c.member))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn chosen(o: &FegenOutcome) -> Vec<String> {
        o.state().expect("success").chosen.clone()
    }

    fn strs(xs: &[u64]) -> Vec<String> {
        xs.iter().map(ToString::to_string).collect()
    }

    const POW2: &str = "rule:n >= 1 and ipow(2, ilog2(n)) == n";

    #[test]
    fn fegen1_examples() {
        let caps = Caps::default();
        let lim = FegenLimits::default();
        let all: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = search_fegen1(&all, &big(&[1, 2, 4, 8]), FSpec::Constant(2), 2, &lim, &caps).unwrap();
        assert_eq!(chosen(&got), strs(&[1, 2]));
        assert_eq!(got.state().unwrap().blocks, vec![vec![0], vec![1]]);
        assert!(verify_fegen(got.state().unwrap(), &all, &lim, &caps).unwrap());

        let pow2: SetSpec = POW2.parse().unwrap();
        let got = search_fegen1(&pow2, &big(&[1, 2, 4, 8]), FSpec::Constant(2), 2, &lim, &caps).unwrap();
        assert_eq!(chosen(&got), strs(&[1, 2]));
        let values: Vec<&str> = got.state().unwrap().checks.iter().map(|c| c.value.as_str()).collect();
        assert_eq!(values, vec!["2", "4", "8"]);

        let odd: SetSpec = "odd".parse().unwrap();
        let got = search_fegen1(&odd, &big(&[1, 2]), FSpec::Constant(2), 1, &lim, &caps).unwrap();
        assert!(matches!(got, FegenOutcome::Failure { .. }));
    }

    #[test]
    fn fegen2_examples() {
        let caps = Caps::default();
        let lim = FegenLimits::default();
        let all: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = search_fegen2(&all, &big(&[2, 3, 5]), FSpec::Constant(2), 2, &lim, &caps).unwrap();
        assert_eq!(chosen(&got), strs(&[2, 3]));
        assert!(verify_fegen(got.state().unwrap(), &all, &lim, &caps).unwrap());

        let squares = SetSpec::list((1..=100).map(|n| n * n));
        let got = search_fegen2(&squares, &big(&[2, 3]), FSpec::Constant(2), 1, &lim, &caps).unwrap();
        assert!(matches!(got, FegenOutcome::Failure { .. }));

        let got = search_fegen2(&SetSpec::empty(), &big(&[2, 3]), FSpec::Constant(2), 1, &lim, &caps).unwrap();
        assert!(matches!(got, FegenOutcome::Failure { .. }));
    }

    #[test]
    fn max_fe_bound() {
        let caps = Caps::default();
        let lim = FegenLimits::default();
        let all: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = search_fegen1(&all, &big(&[2, 3, 5, 7]), FSpec::MaxFe1, 2, &lim, &caps).unwrap();
        let state = got.state().unwrap();
        assert_eq!(state.chosen, strs(&[2, 3]));
        // f() = 1, f(2) = 2
        assert_eq!(state.level_max, strs(&[1, 2]));
        assert!(verify_fegen(state, &all, &lim, &caps).unwrap());
    }

    #[test]
    fn blocks_are_lexicographic() {
        let b = all_blocks(3, 2);
        assert_eq!(
            b,
            vec![vec![0], vec![0, 1], vec![0, 2], vec![1], vec![1, 2], vec![2]]
        );
        assert_eq!(all_blocks(32, 4).len(), 32 + 496 + 4960 + 35960);
    }

    #[test]
    fn tampered_states_fail_verification() {
        let caps = Caps::default();
        let lim = FegenLimits::default();
        let all: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = search_fegen1(&all, &big(&[1, 2, 4, 8]), FSpec::Constant(2), 2, &lim, &caps).unwrap();
        let state = got.state().unwrap();
        let mut overlapping = state.clone();
        overlapping.blocks = vec![vec![0, 1], vec![1]];
        assert!(!verify_fegen(&overlapping, &all, &lim, &caps).unwrap());
        let mut wrong_sum = state.clone();
        wrong_sum.chosen[1] = "3".into();
        assert!(!verify_fegen(&wrong_sum, &all, &lim, &caps).unwrap());
        let mut missing = state.clone();
        missing.checks.pop();
        assert!(!verify_fegen(&missing, &all, &lim, &caps).unwrap());
        let no_eight: SetSpec = "rule:n >= 2 and n != 8".parse().unwrap();
        assert!(!verify_fegen(state, &no_eight, &lim, &caps).unwrap());
    }

    #[test]
    fn budget_gives_inconclusive() {
        let caps = Caps::default();
        let lim = FegenLimits {
            budget: 1,
            ..FegenLimits::default()
        };
        let odd: SetSpec = "odd".parse().unwrap();
        let y = big(&(1..=10).collect::<Vec<_>>());
        let got = search_fegen2(&odd, &y, FSpec::Constant(2), 3, &lim, &caps).unwrap();
        assert!(matches!(got, FegenOutcome::Inconclusive { .. }));
    }

    #[test]
    fn f_spec_parsing() {
        assert_eq!("2".parse::<FSpec>().unwrap(), FSpec::Constant(2));
        assert_eq!("constant:3".parse::<FSpec>().unwrap(), FSpec::Constant(3));
        assert_eq!("max-fe2".parse::<FSpec>().unwrap(), FSpec::MaxFe2);
        assert!("max".parse::<FSpec>().is_err());
        assert_eq!(serde_json::to_value(FSpec::Constant(2)).unwrap(), serde_json::json!({"constant": 2}));
    }
}
