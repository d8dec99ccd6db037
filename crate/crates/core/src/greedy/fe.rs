use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::oracle_failure;
use crate::error::Result;
use crate::ipsets::{SetSpec, Window};
use crate::structures::{fe_unchecked, FeKind};
use crate::tower::{Caps, PowerForm, PowerFormRecord};

/// Largest `N_i` the type I recurrence will scan `j ∈ [2, N_i]` over.
const MAX_LEVEL_MAX: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckedElement {
    pub element: PowerFormRecord,
    pub member: bool,
}

/// The chosen seeds together with every element of the generated level
/// and its membership verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeCertificate {
    pub kind: FeKind,
    pub seeds: Vec<String>,
    pub depth: usize,
    /// `N_i = max FE_i(x_0, …, x_i)` for `i < depth`.
    pub level_max: Vec<String>,
    pub checked: Vec<CheckedElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum GreedyFe {
    Success(FeCertificate),
    Failure {
        step: usize,
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        element: Option<String>,
    },
}

impl GreedyFe {
    pub fn certificate(&self) -> Option<&FeCertificate> {
        match self {
            GreedyFe::Success(c) => Some(c),
            GreedyFe::Failure { .. } => None,
        }
    }

    fn fail(step: usize, reason: &str, element: Option<String>) -> Self {
        GreedyFe::Failure {
            step,
            reason: reason.to_string(),
            element,
        }
    }
}

enum Candidate {
    Accept,
    Reject,
    OutOfRange(String),
}

/// Does `x` meet the step condition given the previous level?
fn test_candidate(a: &SetSpec, kind: FeKind, x: u64, level: &BTreeSet<PowerForm>, n_max: u64, caps: &Caps) -> Result<Candidate> {
    let bx = BigUint::from(x);
    match kind {
        FeKind::TypeI => {
            for j in 2..=n_max {
                let bj = BigUint::from(j);
                match oracle_failure(a.contains_pow(&bj, &bx, caps))? {
                    Ok(true) => {}
                    Ok(false) => return Ok(Candidate::Reject),
                    Err(_) => return Ok(Candidate::OutOfRange(format!("{j}^{x}"))),
                }
            }
        }
        FeKind::TypeII => {
            let base = PowerForm::from_u64(x)?;
            for y in level {
                let form = match oracle_failure(base.pow(y, caps))? {
                    Ok(f) => f,
                    Err(_) => return Ok(Candidate::OutOfRange(format!("{x}^{y}"))),
                };
                match oracle_failure(a.contains_form(&form, caps))? {
                    Ok(true) => {}
                    Ok(false) => return Ok(Candidate::Reject),
                    Err(_) => return Ok(Candidate::OutOfRange(form.to_string())),
                }
            }
        }
    }
    Ok(Candidate::Accept)
}

/// Least-choice run of the recurrence `x_{i+1} ∈ ⋂_{j=2}^{N_i} A_j ∩ A`
/// (type I) or `x_{i+1} ∈ A` with `x_{i+1}^y ∈ A` for all `y ∈ FE^II_i`
/// (type II), for `depth` steps inside `window`.
pub fn greedy_fe(a: &SetSpec, kind: FeKind, depth: usize, window: Window, caps: &Caps) -> Result<GreedyFe> {
    let start = window.lo.max(2);
    let mut x0 = None;
    for x in start..=window.hi {
        if a.contains_u64(x)? {
            x0 = Some(x);
            break;
        }
    }
    let Some(x0) = x0 else {
        return Ok(GreedyFe::fail(0, "no x_0", None));
    };
    let mut xs = vec![x0];
    let mut seeds = vec![PowerForm::from_u64(x0)?];
    let mut level_max = Vec::new();
    for i in 0..depth {
        let level = fe_unchecked(&seeds, i, kind, caps)?;
        if level.dropped > 0 {
            return Ok(GreedyFe::fail(i + 1, "oracle range", None));
        }
        let top = level.max().expect("levels are non-empty").clone();
        level_max.push(top.to_string());
        let n_max = match (kind, top.to_u64()) {
            (FeKind::TypeII, _) => 0,
            (FeKind::TypeI, Some(n)) if n <= MAX_LEVEL_MAX => n,
            (FeKind::TypeI, _) => return Ok(GreedyFe::fail(i + 1, "oracle range", Some(top.to_string()))),
        };
        let mut next = None;
        for x in xs[i] + 1..=window.hi {
            if !a.contains_u64(x)? {
                continue;
            }
            match test_candidate(a, kind, x, &level.elements, n_max, caps)? {
                Candidate::Accept => {
                    next = Some(x);
                    break;
                }
                Candidate::Reject => {}
                Candidate::OutOfRange(e) => return Ok(GreedyFe::fail(i + 1, "oracle range", Some(e))),
            }
        }
        let Some(x) = next else {
            return Ok(GreedyFe::fail(i + 1, "empty intersection", None));
        };
        xs.push(x);
        seeds.push(PowerForm::from_u64(x)?);
    }

    let level = fe_unchecked(&seeds, depth, kind, caps)?;
    if level.dropped > 0 {
        return Ok(GreedyFe::fail(depth, "oracle range", None));
    }
    let mut checked = Vec::with_capacity(level.elements.len());
    for e in &level.elements {
        match oracle_failure(a.contains_form(e, caps))? {
            Ok(true) => checked.push(CheckedElement {
                element: e.to_record(caps),
                member: true,
            }),
            Ok(false) => return Ok(GreedyFe::fail(depth, "certificate rejected", Some(e.to_string()))),
            Err(_) => return Ok(GreedyFe::fail(depth, "oracle range", Some(e.to_string()))),
        }
    }
    Ok(GreedyFe::Success(FeCertificate {
        kind,
        seeds: xs.iter().map(ToString::to_string).collect(),
        depth,
        level_max,
        checked,
    }))
}

pub fn greedy_fe1(a: &SetSpec, depth: usize, window: Window, caps: &Caps) -> Result<GreedyFe> {
    greedy_fe(a, FeKind::TypeI, depth, window, caps)
}

pub fn greedy_fe2(a: &SetSpec, depth: usize, window: Window, caps: &Caps) -> Result<GreedyFe> {
    greedy_fe(a, FeKind::TypeII, depth, window, caps)
}

/// Recomputes the level from the seeds and re-tests every element against
/// `a`. `Ok(false)` for any mismatch.
pub fn verify_certificate(cert: &FeCertificate, a: &SetSpec, caps: &Caps) -> Result<bool> {
    let seeds = cert
        .seeds
        .iter()
        .map(|s| PowerForm::parse(s, caps))
        .collect::<Result<Vec<_>>>()?;
    if seeds.windows(2).any(|w| w[0] >= w[1]) || seeds.len() != cert.depth + 1 {
        return Ok(false);
    }
    let level = fe_unchecked(&seeds, cert.depth, cert.kind, caps)?;
    let listed = cert
        .checked
        .iter()
        .map(|c| PowerForm::from_record(&c.element, caps))
        .collect::<Result<BTreeSet<_>>>()?;
    if level.dropped > 0 || listed != level.elements || listed.len() != cert.checked.len() {
        return Ok(false);
    }
    if cert.checked.iter().any(|c| !c.member) {
        return Ok(false);
    }
    for e in &level.elements {
        if !a.contains_form(e, caps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(cert: &FeCertificate) -> Vec<String> {
        cert.checked
            .iter()
            .map(|c| c.element.value.clone().expect("small"))
            .collect()
    }

    fn strs(xs: &[u64]) -> Vec<String> {
        xs.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn fe1_all_from_two() {
        let caps = Caps::default();
        let a: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = greedy_fe1(&a, 2, Window::new(2, 100).unwrap(), &caps).unwrap();
        let cert = got.certificate().unwrap();
        assert_eq!(cert.seeds, strs(&[2, 3, 4]));
        assert_eq!(values(cert), strs(&[2, 3, 4, 8, 16, 81, 4096]));
        assert_eq!(cert.level_max, strs(&[2, 8]));
        assert!(verify_certificate(cert, &a, &caps).unwrap());
    }

    #[test]
    fn fe1_even_fails_at_step_two() {
        let caps = Caps::default();
        let a: SetSpec = "even".parse().unwrap();
        let got = greedy_fe1(&a, 2, Window::new(2, 10_000).unwrap(), &caps).unwrap();
        assert_eq!(
            got,
            GreedyFe::Failure {
                step: 2,
                reason: "empty intersection".into(),
                element: None
            }
        );
    }

    #[test]
    fn empty_set_has_no_start() {
        let caps = Caps::default();
        let w = Window::new(2, 100).unwrap();
        for kind in [FeKind::TypeI, FeKind::TypeII] {
            let got = greedy_fe(&SetSpec::empty(), kind, 2, w, &caps).unwrap();
            assert!(matches!(got, GreedyFe::Failure { step: 0, ref reason, .. } if reason == "no x_0"));
        }
    }

    #[test]
    fn fe2_examples() {
        let caps = Caps::default();
        let w = Window::new(2, 100).unwrap();
        let all: SetSpec = "rule:n >= 2".parse().unwrap();
        let got = greedy_fe2(&all, 2, w, &caps).unwrap();
        let cert = got.certificate().unwrap();
        assert_eq!(cert.seeds, strs(&[2, 3, 4]));
        assert_eq!(values(cert), strs(&[2, 3, 4, 9, 16, 64, 262144]));

        let odd3: SetSpec = "rule:n % 2 == 1 and n >= 3".parse().unwrap();
        let got = greedy_fe2(&odd3, 1, w, &caps).unwrap();
        assert_eq!(values(got.certificate().unwrap()), strs(&[3, 5, 125]));
    }

    #[test]
    fn oracle_range_is_reported() {
        let caps = Caps::default();
        let a: SetSpec = "rule:n >= 2".parse().unwrap();
        // N_3 = 4096^5 = 2^60, so step 4 would test j^x far beyond i128
        let got = greedy_fe1(&a, 4, Window::new(2, 100).unwrap(), &caps).unwrap();
        assert!(matches!(got, GreedyFe::Failure { step: 4, ref reason, .. } if reason == "oracle range"));
    }

    #[test]
    fn corrupted_certificates_are_rejected() {
        let caps = Caps::default();
        let a: SetSpec = "rule:n >= 2".parse().unwrap();
        let cert = greedy_fe1(&a, 2, Window::new(2, 100).unwrap(), &caps)
            .unwrap()
            .certificate()
            .unwrap()
            .clone();
        let mut dropped = cert.clone();
        dropped.checked.pop();
        assert!(!verify_certificate(&dropped, &a, &caps).unwrap());
        let mut swapped = cert.clone();
        swapped.seeds[2] = "5".into();
        assert!(!verify_certificate(&swapped, &a, &caps).unwrap());
        let mut flagged = cert.clone();
        flagged.checked[0].member = false;
        assert!(!verify_certificate(&flagged, &a, &caps).unwrap());
        let no_81: SetSpec = "rule:n >= 2 and n != 81".parse().unwrap();
        assert!(!verify_certificate(&cert, &no_81, &caps).unwrap());
    }

    #[test]
    fn json_shape() {
        let got = GreedyFe::Failure {
            step: 2,
            reason: "empty intersection".into(),
            element: None,
        };
        assert_eq!(
            serde_json::to_value(&got).unwrap(),
            serde_json::json!({"status": "failure", "step": 2, "reason": "empty intersection"})
        );
    }
}
