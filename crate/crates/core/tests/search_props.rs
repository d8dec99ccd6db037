use std::collections::BTreeSet;

use exporamsey_core::ipsets::{
    find_geometric_progressions, find_power_progressions, find_seed, is_ip_star_window, IpKind, SeedSearch,
    SetSpec, Verdict, Window, WindowSet,
};
use num_bigint::BigUint;
use proptest::prelude::*;

const BUDGET: u64 = 10_000_000;

fn combine(kind: IpKind, xs: &[u64]) -> u64 {
    match kind {
        IpKind::Additive => xs.iter().sum(),
        IpKind::Multiplicative => xs.iter().product(),
    }
}

/// Every finite sum (product) of `xs` satisfies `inside`.
fn closed(kind: IpKind, xs: &[u64], inside: impl Fn(u64) -> bool) -> bool {
    (1u32..1 << xs.len()).all(|mask| {
        let pick: Vec<u64> = (0..xs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| xs[i]).collect();
        inside(combine(kind, &pick))
    })
}

/// Strictly increasing m-tuples of `pool` in lexicographic order.
fn combinations(pool: &[u64], m: usize) -> Vec<Vec<u64>> {
    fn go(pool: &[u64], m: usize, from: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            go(pool, m, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, m, 0, &mut Vec::new(), &mut out);
    out
}

fn window_set() -> impl Strategy<Value = WindowSet> {
    (0u64..=5, 6u64..=60).prop_flat_map(|(lo, hi)| {
        proptest::collection::btree_set(lo..=hi, 0..=(hi - lo) as usize)
            .prop_map(move |m| WindowSet::new(lo, hi, m).unwrap())
    })
}

fn kind() -> impl Strategy<Value = IpKind> {
    prop_oneof![Just(IpKind::Additive), Just(IpKind::Multiplicative)]
}

/// Residue classes and their complements: membership is exact at any size.
fn residue_set() -> impl Strategy<Value = (SetSpec, u64, u64, bool)> {
    (2u64..=6, 0u64..6, any::<bool>()).prop_map(|(m, r, negate)| {
        let r = r % m;
        let spec = SetSpec::residue(BigUint::from(m), BigUint::from(r)).unwrap();
        (if negate { spec.complement() } else { spec }, m, r, negate)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn seed_search_matches_subset_enumeration(a in window_set(), m in 1usize..=3, kind in kind()) {
        let pool: Vec<u64> = a.members.iter().copied().collect();
        let want = combinations(&pool, m)
            .into_iter()
            .find(|xs| closed(kind, xs, |v| a.contains(v)));
        let got = find_seed(&a, m, kind, BUDGET).unwrap();
        match want {
            Some(seed) => prop_assert_eq!(got, SeedSearch::Found { seed }),
            None => prop_assert_eq!(got, SeedSearch::None),
        }
    }

    #[test]
    fn ip_star_witnesses_are_sound(
        (spec, m_mod, r, negate) in residue_set(),
        hi in 5u64..=80,
        m in 1usize..=3,
        kind in kind(),
    ) {
        let in_a = |v: u64| (v % m_mod == r) != negate;
        let window = Window::new(1, hi).unwrap();
        let outside = |v: u64| (1..=hi).contains(&v) && !in_a(v);
        match is_ip_star_window(&spec, kind, m, window, BUDGET).unwrap() {
            Verdict::Fails { witness } => {
                prop_assert_eq!(witness.len(), m);
                prop_assert!(witness.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(closed(kind, &witness, outside));
            }
            Verdict::Holds => {
                let pool: Vec<u64> = (1..=hi).filter(|&v| !in_a(v)).collect();
                let counter = combinations(&pool, m).into_iter().find(|xs| closed(kind, xs, outside));
                prop_assert!(counter.is_none(), "missed witness {:?}", counter);
            }
            Verdict::Inconclusive => prop_assert!(false, "budget exhausted"),
        }
    }

    #[test]
    fn geometric_progressions_match_naive_scan(a in window_set(), k in 2usize..=4) {
        let mut want = Vec::new();
        for &start in a.members.iter().filter(|&&x| x > 0) {
            for h in 2..=a.hi {
                if (0..k as u32).all(|j| a.contains(start * h.pow(j))) {
                    want.push((start, h));
                }
            }
        }
        prop_assert_eq!(find_geometric_progressions(&a, k).unwrap(), want);
    }

    #[test]
    fn power_progressions_match_naive_scan(a in window_set(), k in 2usize..=4) {
        let want: Vec<u64> = (2..=a.hi)
            .filter(|&h| (1..=k as u32).all(|j| h.checked_pow(j).is_some_and(|v| a.contains(v))))
            .collect();
        prop_assert_eq!(find_power_progressions(&a, k).unwrap(), want);
    }
}

#[test]
fn combinations_are_lexicographic() {
    let c = combinations(&[1, 2, 3, 4], 2);
    let sorted: BTreeSet<Vec<u64>> = c.iter().cloned().collect();
    assert_eq!(c, sorted.into_iter().collect::<Vec<_>>());
    assert_eq!(c.len(), 6);
}
