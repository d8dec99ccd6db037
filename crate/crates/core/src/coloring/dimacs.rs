//! DIMACS CNF export of k-colorability and decoding of solver models.
//!
//! For `k = 2` vertex `i` becomes variable `i + 1` (true = color 1) and
//! every edge contributes "not all false" and "not all true". For `k > 2`
//! variable `i·k + c + 1` means "vertex `i` has color `c`", with
//! at-least-one and pairwise at-most-one clauses per vertex and one
//! "not all colored `c`" clause per edge and color. Comment lines
//! `c vertex <index> value <id> var <v>` (plus `color <c>` for `k > 2`)
//! record the variable map.

use std::fmt::Write;

use super::Coloring;
use crate::error::{Error, Result};
use crate::triples::TripleHypergraph;

/// Renders the CNF with LF line endings.
pub fn export_dimacs(h: &TripleHypergraph, k: usize) -> Result<String> {
    if k < 2 {
        return Err(Error::domain(format!("need at least 2 colors, got {k}")));
    }
    let n = h.num_vertices();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut out = String::new();
    let num_vars;
    if k == 2 {
        num_vars = n;
        for e in h.edges() {
            let set = TripleHypergraph::edge_vertex_set(e);
            clauses.push(set.iter().map(|&v| v as i64 + 1).collect());
            clauses.push(set.iter().map(|&v| -(v as i64 + 1)).collect());
        }
        writeln!(out, "c exponential-triple hypergraph, k = 2").unwrap();
        for (i, v) in h.vertices().iter().enumerate() {
            writeln!(out, "c vertex {i} value {v} var {}", i + 1).unwrap();
        }
    } else {
        num_vars = n * k;
        let var = |v: usize, c: usize| (v * k + c + 1) as i64;
        for v in 0..n {
            clauses.push((0..k).map(|c| var(v, c)).collect());
            for c in 0..k {
                for d in c + 1..k {
                    clauses.push(vec![-var(v, c), -var(v, d)]);
                }
            }
        }
        for e in h.edges() {
            let set = TripleHypergraph::edge_vertex_set(e);
            for c in 0..k {
                clauses.push(set.iter().map(|&v| -var(v, c)).collect());
            }
        }
        writeln!(out, "c exponential-triple hypergraph, k = {k}").unwrap();
        for (i, v) in h.vertices().iter().enumerate() {
            for c in 0..k {
                writeln!(out, "c vertex {i} value {v} color {c} var {}", var(i, c)).unwrap();
            }
        }
    }
    writeln!(out, "p cnf {num_vars} {}", clauses.len()).unwrap();
    for clause in &clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Meaning of a variable, as recorded by the comment map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarMeaning {
    pub vertex: usize,
    /// `None` for the direct 2-color encoding.
    pub color: Option<usize>,
}

/// A parsed CNF together with its vertex map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimacsCnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
    /// Indexed by variable − 1.
    pub var_map: Vec<Option<VarMeaning>>,
}

impl DimacsCnf {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut map_entries = Vec::new();
        let mut pending: Vec<i64> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            let bad = |what: &str| Error::domain(format!("DIMACS line {}: {what}", lineno + 1));
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('c') {
                let words: Vec<&str> = comment.split_whitespace().collect();
                if words.first() == Some(&"vertex") {
                    let field = |name: &str| {
                        words
                            .iter()
                            .position(|w| *w == name)
                            .and_then(|p| words.get(p + 1))
                            .and_then(|w| w.parse::<usize>().ok())
                    };
                    let vertex = words.get(1).and_then(|w| w.parse().ok()).ok_or_else(|| bad("bad vertex"))?;
                    let var = field("var").ok_or_else(|| bad("missing var"))?;
                    map_entries.push((var, VarMeaning { vertex, color: field("color") }));
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|w| w.parse().map_err(|_| bad("bad header")))
                    .collect::<Result<_>>()?;
                if nums.len() != 2 {
                    return Err(bad("bad header"));
                }
                header = Some((nums[0], nums[1]));
                continue;
            }
            for w in line.split_whitespace() {
                let lit: i64 = w.parse().map_err(|_| bad("bad literal"))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut pending));
                } else {
                    pending.push(lit);
                }
            }
        }
        let (num_vars, num_clauses) = header.ok_or_else(|| Error::domain("DIMACS header missing"))?;
        if !pending.is_empty() {
            return Err(Error::domain("unterminated clause"));
        }
        if clauses.len() != num_clauses {
            return Err(Error::domain(format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        if clauses.iter().flatten().any(|l| l.unsigned_abs() as usize > num_vars) {
            return Err(Error::domain("literal exceeds declared variable count"));
        }
        let mut var_map = vec![None; num_vars];
        for (var, meaning) in map_entries {
            if var == 0 || var > num_vars {
                return Err(Error::domain(format!("comment map names variable {var}")));
            }
            var_map[var - 1] = Some(meaning);
        }
        Ok(DimacsCnf {
            num_vars,
            clauses,
            var_map,
        })
    }

    /// `model[i]` is the value of variable `i + 1`.
    pub fn is_satisfied(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// Turns a model into a coloring through the comment map.
    pub fn decode(&self, model: &[bool], k: usize) -> Result<Coloring> {
        if model.len() != self.num_vars {
            return Err(Error::domain("model length differs from variable count"));
        }
        let n = self
            .var_map
            .iter()
            .flatten()
            .map(|m| m.vertex + 1)
            .max()
            .unwrap_or(0);
        let mut colors: Vec<Option<usize>> = vec![None; n];
        for (i, meaning) in self.var_map.iter().enumerate() {
            let Some(m) = meaning else { continue };
            match m.color {
                None => colors[m.vertex] = Some(model[i] as usize),
                Some(c) if model[i] => {
                    if colors[m.vertex].replace(c).is_some() {
                        return Err(Error::domain(format!("vertex {} has two colors", m.vertex)));
                    }
                }
                Some(_) => {}
            }
        }
        let colors = colors
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| Error::domain(format!("vertex {v} has no color"))))
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(k, colors)
    }
}
