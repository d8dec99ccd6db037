use std::path::Path;

use exporamsey_core::coloring::SolveLimits;
use exporamsey_core::greedy::FegenLimits;
use exporamsey_core::triples::ClosureLimits;
use exporamsey_core::Caps;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Dimacs,
}

/// Optional settings read from `--config`. Flags override every field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub value_bit_cap: Option<u64>,
    pub exp_bit_cap: Option<u64>,
    pub vertex_budget: Option<usize>,
    pub max_depth: Option<usize>,
    pub search_budget: Option<u64>,
    pub exhaustive_max_states: Option<u64>,
    pub backtracking_max_nodes: Option<u64>,
    pub deterministic: Option<bool>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Effective settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub caps: Caps,
    pub vertex_budget: usize,
    pub max_depth: usize,
    pub search_budget: u64,
    pub solve: SolveLimits,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub format: Format,
}

impl RunConfig {
    pub fn merge(flags: &crate::GlobalArgs, file: FileConfig) -> Result<Self, CliError> {
        let d_closure = ClosureLimits::default();
        let d_solve = SolveLimits::default();
        let caps = Caps {
            value_bit_cap: flags
                .value_bit_cap
                .or(file.value_bit_cap)
                .unwrap_or(Caps::default().value_bit_cap),
            exp_bit_cap: flags.exp_bit_cap.or(file.exp_bit_cap).unwrap_or(Caps::default().exp_bit_cap),
        };
        let env_threads = match std::env::var("EXPORAMSEY_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("EXPORAMSEY_THREADS={v:?} is not a count")))?,
            ),
            Err(_) => None,
        };
        let cfg = RunConfig {
            caps,
            vertex_budget: flags
                .vertex_budget
                .or(file.vertex_budget)
                .unwrap_or(d_closure.vertex_budget),
            max_depth: flags.max_depth.or(file.max_depth).unwrap_or(d_closure.max_depth),
            search_budget: flags
                .search_budget
                .or(file.search_budget)
                .unwrap_or(FegenLimits::default().budget),
            solve: SolveLimits {
                exhaustive_max_states: file.exhaustive_max_states.unwrap_or(d_solve.exhaustive_max_states),
                backtracking_max_nodes: flags
                    .max_nodes
                    .or(file.backtracking_max_nodes)
                    .unwrap_or(d_solve.backtracking_max_nodes),
            },
            deterministic: flags.deterministic || file.deterministic.unwrap_or(false),
            threads: env_threads.or(file.threads),
            format: flags.format.or(file.format).unwrap_or_default(),
        };
        if cfg.caps.value_bit_cap == 0 || cfg.caps.exp_bit_cap == 0 || cfg.vertex_budget == 0 || cfg.search_budget == 0 {
            return Err(CliError::Usage("caps and budgets must be positive".into()));
        }
        if cfg.threads == Some(0) {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn closure_limits(&self) -> ClosureLimits {
        ClosureLimits {
            caps: self.caps,
            max_depth: self.max_depth,
            vertex_budget: self.vertex_budget,
        }
    }

    /// Worker count for the global pool; `--deterministic` forces one.
    pub fn worker_threads(&self) -> Option<usize> {
        if self.deterministic {
            Some(1)
        } else {
            self.threads
        }
    }
}
