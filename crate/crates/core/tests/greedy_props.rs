use std::collections::BTreeSet;

use exporamsey_core::greedy::{
    greedy_fe, search_fegen, verify_certificate, verify_fegen, FSpec, FegenLimits, FegenOutcome, GreedyFe,
};
use exporamsey_core::ipsets::{SetSpec, Window};
use exporamsey_core::structures::FeKind;
use exporamsey_core::Caps;
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;

/// `n ≡ r (mod m)`, or its complement.
#[derive(Debug, Clone, Copy)]
struct Residue {
    m: u64,
    r: u64,
    negate: bool,
}

impl Residue {
    fn spec(self) -> SetSpec {
        let s = SetSpec::residue(BigUint::from(self.m), BigUint::from(self.r)).unwrap();
        if self.negate {
            s.complement()
        } else {
            s
        }
    }

    fn has_pow(self, base: &BigUint, exp: &BigUint) -> bool {
        let v = base.modpow(exp, &BigUint::from(self.m));
        (v == BigUint::from(self.r)) != self.negate
    }

    fn has(self, n: u64) -> bool {
        self.has_pow(&BigUint::from(n), &BigUint::one())
    }
}

fn residue() -> impl Strategy<Value = Residue> {
    (2u64..=6, 0u64..6, any::<bool>()).prop_map(|(m, r, negate)| Residue { m, r: r % m, negate })
}

fn fe_kind() -> impl Strategy<Value = FeKind> {
    prop_oneof![Just(FeKind::TypeI), Just(FeKind::TypeII)]
}

/// Explicit `FE_level` of small seeds, or `None` once a value passes `limit`.
fn fe_values(xs: &[u64], kind: FeKind, limit: &BigUint) -> Option<BTreeSet<BigUint>> {
    let mut level: BTreeSet<BigUint> = BTreeSet::from([BigUint::from(xs[0])]);
    for &x in &xs[1..] {
        let mut next = level.clone();
        next.insert(BigUint::from(x));
        for y in &level {
            let v = match kind {
                FeKind::TypeI => y.pow(x as u32),
                FeKind::TypeII => BigUint::from(x).pow(u32::try_from(y).ok()?),
            };
            if v > *limit {
                return None;
            }
            next.insert(v);
        }
        level = next;
    }
    Some(level)
}

enum Expected {
    Seeds(Vec<u64>),
    Fails(usize, &'static str),
}

/// The least-choice recurrence evaluated directly. `None` when a level
/// grows past what the oracle is willing to scan.
fn greedy_oracle(a: Residue, kind: FeKind, depth: usize, lo: u64, hi: u64) -> Option<Expected> {
    let limit = BigUint::from(50_000u32);
    let Some(x0) = (lo.max(2)..=hi).find(|&x| a.has(x)) else {
        return Some(Expected::Fails(0, "no x_0"));
    };
    let mut xs = vec![x0];
    for _ in 0..depth {
        let level = fe_values(&xs, kind, &limit)?;
        let top = u64::try_from(level.iter().next_back()?).ok()?;
        let ok = |x: u64| {
            a.has(x)
                && match kind {
                    FeKind::TypeI => (2..=top).all(|j| a.has_pow(&BigUint::from(j), &BigUint::from(x))),
                    FeKind::TypeII => level.iter().all(|y| a.has_pow(&BigUint::from(x), y)),
                }
        };
        match (xs[xs.len() - 1] + 1..=hi).find(|&x| ok(x)) {
            Some(x) => xs.push(x),
            None => return Some(Expected::Fails(xs.len(), "empty intersection")),
        }
    }
    let last = fe_values(&xs, kind, &BigUint::from(1u64 << 60))?;
    if last.iter().any(|v| !a.has_pow(v, &BigUint::one())) {
        return Some(Expected::Fails(depth, "certificate rejected"));
    }
    Some(Expected::Seeds(xs))
}

/// All block sequences of length `steps` satisfying every condition, least
/// first.
fn fegen_oracle(a: Residue, kind: FeKind, y: &[u64], c: u64, steps: usize, max_block: usize) -> Option<Vec<Vec<usize>>> {
    fn blocks_from(start: usize, len: usize, max_block: usize) -> Vec<Vec<usize>> {
        (1u32..1 << (len - start.min(len)))
            .map(|mask| (0..len - start).filter(|&i| mask >> i & 1 == 1).map(|i| start + i).collect::<Vec<_>>())
            .filter(|b| b.len() <= max_block)
            .collect()
    }
    fn sequences(start: usize, len: usize, steps: usize, max_block: usize, out: &mut Vec<Vec<Vec<usize>>>, cur: &mut Vec<Vec<usize>>) {
        if cur.len() == steps {
            out.push(cur.clone());
            return;
        }
        if start >= len {
            return;
        }
        for b in blocks_from(start, len, max_block) {
            let next = b[b.len() - 1] + 1;
            cur.push(b);
            sequences(next, len, steps, max_block, out, cur);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    sequences(0, y.len(), steps, max_block, &mut all, &mut Vec::new());
    let value = |b: &[usize]| -> BigUint {
        match kind {
            FeKind::TypeI => b.iter().map(|&i| BigUint::from(y[i])).sum(),
            FeKind::TypeII => b.iter().map(|&i| BigUint::from(y[i])).product(),
        }
    };
    let valid = |seq: &Vec<Vec<usize>>| {
        let xs: Vec<BigUint> = seq.iter().map(|b| value(b)).collect();
        (1u32..1 << xs.len()).all(|mask| {
            let f: Vec<&BigUint> = (0..xs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| &xs[i]).collect();
            match kind {
                FeKind::TypeI => {
                    let s: BigUint = f.into_iter().sum();
                    (2..=c).all(|t| a.has_pow(&BigUint::from(t), &s))
                }
                FeKind::TypeII => {
                    let p: BigUint = f.into_iter().product();
                    (1..=c).all(|t| a.has_pow(&p, &BigUint::from(t)))
                }
            }
        })
    };
    all.into_iter().filter(valid).min()
}

fn y_prefix() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::btree_set(1u64..=12, 2..=6).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn least_choice_matches_direct_recurrence(
        a in residue(),
        kind in fe_kind(),
        depth in 0usize..=2,
        lo in 0u64..=6,
        span in 2u64..=20,
    ) {
        let caps = Caps::default();
        let hi = lo + span;
        let Some(want) = greedy_oracle(a, kind, depth, lo, hi) else { return Ok(()) };
        let got = greedy_fe(&a.spec(), kind, depth, Window::new(lo, hi).unwrap(), &caps).unwrap();
        match (want, &got) {
            (Expected::Seeds(xs), GreedyFe::Success(cert)) => {
                let seeds: Vec<String> = xs.iter().map(ToString::to_string).collect();
                prop_assert_eq!(&cert.seeds, &seeds);
                prop_assert!(verify_certificate(cert, &a.spec(), &caps).unwrap());
            }
            (Expected::Fails(step, reason), GreedyFe::Failure { step: s, reason: r, .. }) => {
                prop_assert_eq!((step, reason), (*s, r.as_str()));
            }
            (_, got) => prop_assert!(false, "unexpected {:?}", got),
        }
    }

    #[test]
    fn certificates_detect_tampering(a in residue(), kind in fe_kind(), depth in 1usize..=2) {
        let caps = Caps::default();
        let got = greedy_fe(&a.spec(), kind, depth, Window::new(2, 30).unwrap(), &caps).unwrap();
        if let GreedyFe::Success(cert) = got {
            let mut bad = cert.clone();
            bad.checked.pop();
            prop_assert!(!verify_certificate(&bad, &a.spec(), &caps).unwrap());
            let mut bad = cert.clone();
            bad.seeds.swap(0, 1);
            prop_assert!(!verify_certificate(&bad, &a.spec(), &caps).unwrap());
        }
    }

    #[test]
    fn block_search_matches_enumeration(
        a in residue(),
        kind in fe_kind(),
        y in y_prefix(),
        c in 1u64..=3,
        steps in 1usize..=3,
        max_block in 1usize..=3,
    ) {
        let caps = Caps::default();
        let limits = FegenLimits { max_block_size: max_block, ..FegenLimits::default() };
        let ys: Vec<BigUint> = y.iter().map(|&v| BigUint::from(v)).collect();
        let got = search_fegen(&a.spec(), kind, &ys, FSpec::Constant(c), steps, &limits, &caps).unwrap();
        match (fegen_oracle(a, kind, &y, c, steps, max_block), &got) {
            (Some(blocks), FegenOutcome::Success(state)) => {
                prop_assert_eq!(&state.blocks, &blocks);
                for pair in state.blocks.windows(2) {
                    prop_assert!(pair[0].last() < pair[1].first());
                }
                prop_assert!(verify_fegen(state, &a.spec(), &limits, &caps).unwrap());
                let mut forged = state.clone();
                if let Some(first) = forged.chosen.first_mut() {
                    first.push('0');
                }
                prop_assert!(!verify_fegen(&forged, &a.spec(), &limits, &caps).unwrap());
            }
            (None, FegenOutcome::Failure { .. }) => {}
            (want, got) => prop_assert!(false, "oracle {:?}, search {:?}", want, got),
        }
    }
}
