use rayon::prelude::*;

use super::solver::{ColoringSolver, SolveLimits};
use super::ColoringProblem;
use crate::error::{Error, Result};

/// Tries every assignment in index order; the witness is the first proper
/// one, so it does not depend on the thread count.
pub struct Exhaustive;

fn decode(mut index: u64, k: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().take(n) {
        *slot = (index % k as u64) as usize;
        index /= k as u64;
    }
}

impl ColoringSolver for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn solve(&self, problem: &ColoringProblem, limits: &SolveLimits) -> Result<Option<Vec<usize>>> {
        let n = problem.num_vertices;
        let k = problem.k;
        let total = (k as u64)
            .checked_pow(n as u32)
            .filter(|&t| t <= limits.exhaustive_max_states)
            .ok_or_else(|| {
                Error::capacity(format!(
                    "exhaustive: {k}^{n} assignments exceed the budget of {}",
                    limits.exhaustive_max_states
                ))
            })?;
        let found = (0..total).into_par_iter().find_first(|&i| {
            let mut colors = vec![0usize; n];
            decode(i, k, n, &mut colors);
            problem.is_proper(&colors)
        });
        Ok(found.map(|i| {
            let mut colors = vec![0usize; n];
            decode(i, k, n, &mut colors);
            colors
        }))
    }
}
