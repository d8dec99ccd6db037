use super::WindowSet;
use crate::error::{Error, Result};

/// All `(a, h)` with `a > 0`, `h >= 2` and `a, ah, …, ah^(k-1)` in `a_set`,
/// sorted by `(a, h)`.
pub fn find_geometric_progressions(a_set: &WindowSet, k: usize) -> Result<Vec<(u64, u64)>> {
    if k < 2 {
        return Err(Error::domain("progression length must be at least 2"));
    }
    let mut out = Vec::new();
    for &a in a_set.members.iter().filter(|&&a| a > 0) {
        for h in 2u64.. {
            // a·h ≤ hi is necessary for every longer progression too
            match a.checked_mul(h) {
                Some(v) if v <= a_set.hi => {}
                _ => break,
            }
            let mut term = a;
            let mut ok = true;
            for _ in 1..k {
                match term.checked_mul(h) {
                    Some(t) if a_set.contains(t) => term = t,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push((a, h));
            }
        }
    }
    Ok(out)
}

/// All `h >= 2` with `h, h², …, h^k` in `a_set`, ascending.
pub fn find_power_progressions(a_set: &WindowSet, k: usize) -> Result<Vec<u64>> {
    if k < 2 {
        return Err(Error::domain("progression length must be at least 2"));
    }
    let mut out = Vec::new();
    for &h in a_set.members.iter().filter(|&&h| h >= 2) {
        if h.checked_mul(h).is_none_or(|sq| sq > a_set.hi) {
            break;
        }
        let mut term = h;
        let mut ok = true;
        for _ in 1..k {
            match term.checked_mul(h) {
                Some(t) if a_set.contains(t) => term = t,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(h);
        }
    }
    Ok(out)
}
