use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_coloring, Backtracking, Coloring, ColoringProblem, Exhaustive};
use crate::error::{Error, Result};
use crate::triples::TripleHypergraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Coloring),
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Upper bound on `k^|V|` for exhaustive enumeration.
    pub exhaustive_max_states: u64,
    /// Decision nodes the backtracking search may visit.
    pub backtracking_max_nodes: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            exhaustive_max_states: 1 << 24,
            backtracking_max_nodes: 50_000_000,
        }
    }
}

/// A k-colorability decision procedure.
pub trait ColoringSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Returns a proper coloring or proves none exists. Exceeding a limit
    /// is a capacity error.
    fn solve(&self, problem: &ColoringProblem, limits: &SolveLimits) -> Result<Option<Vec<usize>>>;
}

/// Solvers registered by name.
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn ColoringSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry {
            solvers: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Backtracking);
        reg.register(Exhaustive);
        reg
    }

    pub fn register<S: ColoringSolver + 'static>(&mut self, solver: S) {
        self.solvers.insert(solver.name(), Arc::new(solver));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ColoringSolver>> {
        self.solvers.get(name).cloned().ok_or_else(|| {
            Error::domain(format!(
                "unknown solver {name:?}; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    /// Runs `method` and re-checks any witness against the hypergraph.
    pub fn solve(&self, h: &TripleHypergraph, k: usize, method: &str, limits: &SolveLimits) -> Result<SolveOutcome> {
        let solver = self.get(method)?;
        let problem = ColoringProblem::new(h, k)?;
        match solver.solve(&problem, limits)? {
            None => Ok(SolveOutcome::Unsat),
            Some(colors) => {
                let coloring = Coloring::new(k, colors)?;
                let mono = check_coloring(h, &coloring)?;
                assert!(
                    mono.is_empty(),
                    "solver {method} returned a witness with monochromatic edges {mono:?}"
                );
                Ok(SolveOutcome::Sat(coloring))
            }
        }
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// [`SolverRegistry::solve`] on the built-in solvers.
pub fn solve_colorability(h: &TripleHypergraph, k: usize, method: &str, limits: &SolveLimits) -> Result<SolveOutcome> {
    SolverRegistry::builtin().solve(h, k, method, limits)
}
