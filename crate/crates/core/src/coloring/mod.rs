//! Colorings of triple hypergraphs.
//!
//! An edge `(a, b, c)` is monochromatic when every member of the set
//! `{a, b, c}` gets the same color, so `(2, 2, 4)` only constrains 2 and 4.

mod backtracking;
pub mod count;
pub mod dimacs;
mod exhaustive;
pub mod rule;
pub mod solver;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tower::{Caps, PowerForm};
use crate::triples::{Edge, TripleHypergraph};

pub use backtracking::Backtracking;
pub use count::{count_mono_triples, MonoCounts};
pub use dimacs::{export_dimacs, DimacsCnf};
pub use exhaustive::Exhaustive;
pub use rule::{parse_rule, ColorRule};
pub use solver::{solve_colorability, ColoringSolver, SolveLimits, SolveOutcome, SolverRegistry};

/// A total assignment of colors in `[0, k)` to vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    k: usize,
    colors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ColoringJson {
    k: usize,
    colors: BTreeMap<String, usize>,
}

impl Coloring {
    pub fn new(k: usize, colors: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("need at least 2 colors, got {k}")));
        }
        if let Some((i, c)) = colors.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::domain(format!("vertex {i} has color {c} outside [0, {k})")));
        }
        Ok(Coloring { k, colors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, vertex: usize) -> usize {
        self.colors[vertex]
    }

    /// `{"k": k, "colors": {"<vertex id>": c}}`, keyed by the vertex display form.
    pub fn to_json(&self, h: &TripleHypergraph) -> serde_json::Value {
        let colors = h
            .vertices()
            .iter()
            .zip(&self.colors)
            .map(|(v, &c)| (v.to_string(), c))
            .collect();
        serde_json::to_value(ColoringJson { k: self.k, colors }).expect("coloring serializes")
    }

    pub fn from_json(value: &serde_json::Value, h: &TripleHypergraph, caps: &Caps) -> Result<Self> {
        let raw: ColoringJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::domain(format!("malformed coloring JSON: {e}")))?;
        let mut by_vertex: BTreeMap<PowerForm, usize> = BTreeMap::new();
        for (key, c) in raw.colors {
            by_vertex.insert(PowerForm::parse(&key, caps)?, c);
        }
        let colors = h
            .vertices()
            .iter()
            .map(|v| {
                by_vertex
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::domain(format!("vertex {v} has no color")))
            })
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(raw.k, colors)
    }
}

/// Edges of `h` whose deduplicated vertex set is one color under `coloring`.
pub fn check_coloring(h: &TripleHypergraph, coloring: &Coloring) -> Result<Vec<Edge>> {
    if coloring.colors.len() != h.num_vertices() {
        return Err(Error::domain(format!(
            "coloring covers {} of {} vertices",
            coloring.colors.len(),
            h.num_vertices()
        )));
    }
    Ok(h.edges()
        .iter()
        .filter(|e| {
            let c = coloring.colors[e[0]];
            e.iter().all(|&v| coloring.colors[v] == c)
        })
        .copied()
        .collect())
}

/// Solver input: the distinct vertex sets of the edges.
#[derive(Debug, Clone)]
pub struct ColoringProblem {
    pub num_vertices: usize,
    pub k: usize,
    /// Sorted, deduplicated; each has 2 or 3 members.
    pub constraints: Vec<Vec<usize>>,
}

impl ColoringProblem {
    pub fn new(h: &TripleHypergraph, k: usize) -> Result<Self> {
        if !(2..=64).contains(&k) {
            return Err(Error::domain(format!("k must be in [2, 64], got {k}")));
        }
        let mut constraints: Vec<Vec<usize>> = h.edges().iter().map(TripleHypergraph::edge_vertex_set).collect();
        constraints.sort();
        constraints.dedup();
        Ok(ColoringProblem {
            num_vertices: h.num_vertices(),
            k,
            constraints,
        })
    }

    pub fn is_proper(&self, colors: &[usize]) -> bool {
        self.constraints.iter().all(|c| {
            let first = colors[c[0]];
            c[1..].iter().any(|&v| colors[v] != first)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::{exp_closure, ClosureLimits};
    use num_bigint::BigUint;

    fn closure(seed: u32, depth: usize) -> TripleHypergraph {
        exp_closure(&[BigUint::from(seed)], depth, &ClosureLimits::default()).unwrap()
    }

    #[test]
    fn check_examples() {
        let h = closure(2, 2);
        // vertices 2, 4, 16, 256
        let col = Coloring::new(2, vec![0, 1, 1, 0]).unwrap();
        assert!(check_coloring(&h, &col).unwrap().is_empty());
        let h1 = closure(2, 1);
        let all0 = Coloring::new(2, vec![0, 0]).unwrap();
        assert_eq!(check_coloring(&h1, &all0).unwrap(), vec![[0, 0, 1]]);
        let h0 = closure(3, 0);
        assert!(check_coloring(&h0, &Coloring::new(2, vec![1]).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn check_rejects_partial() {
        let h = closure(2, 2);
        let col = Coloring::new(2, vec![0, 1]).unwrap();
        assert!(matches!(check_coloring(&h, &col), Err(Error::Domain(_))));
        assert!(Coloring::new(2, vec![0, 2]).is_err());
        assert!(Coloring::new(1, vec![0]).is_err());
    }

    #[test]
    fn coloring_json_round_trip() {
        let caps = Caps::default();
        let h = closure(2, 3);
        let col = Coloring::new(3, (0..h.num_vertices()).map(|i| i % 3).collect()).unwrap();
        let back = Coloring::from_json(&col.to_json(&h), &h, &caps).unwrap();
        assert_eq!(back, col);
    }
}
