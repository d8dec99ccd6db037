use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::rule::ColorRule;
use crate::error::{Error, Result};
use crate::tower::{Caps, PowerForm};
use crate::triples::enumerate_triples;

/// Monochromatic triple counts for one rule and bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoCounts {
    pub max: String,
    /// `per_cell[c]` counts triples lying entirely in cell `c`.
    pub per_cell: Vec<u64>,
    /// Triples whose members span more than one cell.
    pub rainbow: u64,
    pub total_mono: u64,
}

impl MonoCounts {
    /// CSV rows `N,cell,count`: one per cell, then `total` and `rainbow`.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows: Vec<String> = self
            .per_cell
            .iter()
            .enumerate()
            .map(|(c, n)| format!("{},{c},{n}", self.max))
            .collect();
        rows.push(format!("{},total,{}", self.max, self.total_mono));
        rows.push(format!("{},rainbow,{}", self.max, self.rainbow));
        rows
    }
}

pub const CSV_HEADER: &str = "N,cell,count";

fn rule_input(v: &PowerForm) -> Result<i128> {
    v.to_u64().map(i128::from).ok_or_else(|| Error::Eval {
        n: v.to_string(),
        message: "value outside the rule's integer range".into(),
    })
}

/// Classifies every triple with `c <= max` under `rule`. The rule is
/// evaluated on the members of those triples; the least failing input is
/// reported.
pub fn count_mono_triples(rule: &ColorRule, max: &BigUint, caps: &Caps) -> Result<MonoCounts> {
    let triples = enumerate_triples(max, caps)?;
    let mut colors: BTreeMap<PowerForm, usize> = BTreeMap::new();
    for t in &triples {
        for v in [&t.a, &t.b, &t.c] {
            colors.entry(v.clone()).or_insert(usize::MAX);
        }
    }
    for (v, slot) in colors.iter_mut() {
        *slot = rule.color_of(rule_input(v)?)?;
    }
    let mut per_cell = vec![0u64; rule.k()];
    let mut rainbow = 0u64;
    for t in &triples {
        let ca = colors[&t.a];
        if colors[&t.b] == ca && colors[&t.c] == ca {
            per_cell[ca] += 1;
        } else {
            rainbow += 1;
        }
    }
    Ok(MonoCounts {
        max: max.to_string(),
        total_mono: per_cell.iter().sum(),
        per_cell,
        rainbow,
    })
}

/// Parses a bound written either as a decimal or as `10^6`-style power.
pub fn parse_bound(text: &str) -> Result<BigUint> {
    let text = text.trim();
    let nat = |s: &str| {
        s.trim()
            .parse::<BigUint>()
            .map_err(|_| Error::domain(format!("not a natural number: {s:?}")))
    };
    match text.split_once('^') {
        Some((b, e)) => {
            let e = nat(e)?
                .to_u32()
                .ok_or_else(|| Error::capacity("bound exponent too large"))?;
            Ok(nat(b)?.pow(e))
        }
        None => nat(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::rule::parse_rule;

    /// Brute force over a, b directly, without the enumerator.
    fn oracle(src: &str, k: usize, max: u64) -> (Vec<u64>, u64) {
        let rule = parse_rule(src, k).unwrap();
        let color = |n: u64| rule.color_of(n as i128).unwrap();
        let mut cells = vec![0u64; k];
        let mut rainbow = 0;
        for a in 2..=max {
            let mut c = a * a;
            let mut b = 2;
            while c <= max {
                let ca = color(a);
                if color(b) == ca && color(c) == ca {
                    cells[ca] += 1;
                } else {
                    rainbow += 1;
                }
                b += 1;
                c = match c.checked_mul(a) {
                    Some(c) => c,
                    None => break,
                };
            }
        }
        (cells, rainbow)
    }

    #[test]
    fn parity_up_to_30() {
        let caps = Caps::default();
        let rule = parse_rule("n % 2", 2).unwrap();
        let got = count_mono_triples(&rule, &BigUint::from(30u32), &caps).unwrap();
        let (cells, rainbow) = oracle("n % 2", 2, 30);
        assert_eq!(got.per_cell, cells);
        assert_eq!(got.rainbow, rainbow);
        // (3, 3, 27) is all odd
        assert!(got.per_cell[1] >= 1);
        assert_eq!(got.per_cell, vec![3, 1]);
    }

    #[test]
    fn single_cell_counts_everything() {
        let caps = Caps::default();
        let rule = parse_rule("0", 2).unwrap();
        let got = count_mono_triples(&rule, &BigUint::from(16u32), &caps).unwrap();
        assert_eq!(got.total_mono, 5);
        assert_eq!(got.rainbow, 0);
    }

    #[test]
    fn below_four_is_empty() {
        let caps = Caps::default();
        let rule = parse_rule("n % 3", 3).unwrap();
        let got = count_mono_triples(&rule, &BigUint::from(3u32), &caps).unwrap();
        assert_eq!(got.per_cell, vec![0, 0, 0]);
        assert_eq!(got.total_mono + got.rainbow, 0);
    }

    #[test]
    fn matches_oracle_for_other_rules() {
        let caps = Caps::default();
        for (src, k) in [("ilog2(ilog2(n)) % 2", 2), ("n % 3", 3), ("if(n < 50, 0, 1)", 2)] {
            let rule = parse_rule(src, k).unwrap();
            let got = count_mono_triples(&rule, &BigUint::from(5000u32), &caps).unwrap();
            let (cells, rainbow) = oracle(src, k, 5000);
            assert_eq!((got.per_cell, got.rainbow), (cells, rainbow), "{src}");
        }
    }

    #[test]
    fn evaluation_error_names_least_input() {
        let caps = Caps::default();
        let rule = parse_rule("100 / (n - 8)", 2).unwrap();
        let err = count_mono_triples(&rule, &BigUint::from(100u32), &caps).unwrap_err();
        assert_eq!(
            err,
            Error::Eval {
                n: "8".into(),
                message: "division by zero".into()
            }
        );
    }

    #[test]
    fn csv_rows_and_bounds() {
        let caps = Caps::default();
        let rule = parse_rule("n % 2", 2).unwrap();
        let got = count_mono_triples(&rule, &BigUint::from(30u32), &caps).unwrap();
        assert_eq!(got.csv_rows(), vec!["30,0,3", "30,1,1", "30,total,4", "30,rainbow,3"]);
        assert_eq!(parse_bound("10^6").unwrap(), BigUint::from(1_000_000u32));
        assert_eq!(parse_bound("42").unwrap(), BigUint::from(42u32));
        assert!(parse_bound("x").is_err());
    }
}
