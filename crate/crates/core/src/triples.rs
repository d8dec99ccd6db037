//! Exponential triples and the hypergraphs they span.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tower::{Caps, PowerForm, PowerFormRecord};

/// Ordered triple `(a, b, a^b)` with `a, b >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpTriple {
    pub a: PowerForm,
    pub b: PowerForm,
    pub c: PowerForm,
}

impl ExpTriple {
    pub fn new(a: PowerForm, b: PowerForm, caps: &Caps) -> Result<Self> {
        let c = a.pow(&b, caps)?;
        Ok(ExpTriple { a, b, c })
    }

    /// The distinct members of `{a, b, c}`: two when `a == b`, else three.
    pub fn vertex_set(&self) -> Vec<&PowerForm> {
        if self.a == self.b {
            vec![&self.a, &self.c]
        } else {
            vec![&self.a, &self.b, &self.c]
        }
    }

    fn sort_key(&self) -> (&PowerForm, &PowerForm, &PowerForm) {
        (&self.c, &self.a, &self.b)
    }
}

/// All triples with `a^b <= max`, sorted by `(c, a, b)`.
pub fn enumerate_triples(max: &BigUint, caps: &Caps) -> Result<Vec<ExpTriple>> {
    if max.bits() > caps.value_bit_cap {
        return Err(Error::capacity(format!(
            "bound of {} bits exceeds value_bit_cap {}",
            max.bits(),
            caps.value_bit_cap
        )));
    }
    let mut out = Vec::new();
    let mut b = 2u32;
    while BigUint::from(2u32).pow(b) <= *max {
        let a_max = max.nth_root(b);
        let b_form = PowerForm::from_u64(b as u64)?;
        let mut a = BigUint::from(2u32);
        while a <= a_max {
            let a_form = PowerForm::normalize(&a, caps)?;
            out.push(ExpTriple::new(a_form, b_form.clone(), caps)?);
            a += 1u32;
        }
        b += 1;
    }
    out.par_sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    Ok(out)
}

/// Edge indices `(a, b, c)` into a vertex list.
pub type Edge = [usize; 3];

/// Every `(a, b, c)` among `vertices` with `b` evaluable and `a^b = c`,
/// sorted by `(c, a, b)` index.
fn edges_within(vertices: &[PowerForm], caps: &Caps) -> Vec<Edge> {
    let index: HashMap<&PowerForm, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let exponents: Vec<(usize, BigUint)> = vertices
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.try_value(caps).map(|val| (i, val)))
        .collect();
    let mut edges: Vec<Edge> = (0..vertices.len())
        .into_par_iter()
        .flat_map_iter(|ai| {
            let a = &vertices[ai];
            let index = &index;
            exponents.iter().filter_map(move |(bi, vb)| {
                let c = a.raise(vb, caps).ok()?;
                index.get(&c).map(|&ci| [ai, *bi, ci])
            })
        })
        .collect();
    edges.sort_by_key(|e| (e[2], e[0], e[1]));
    edges
}

/// Triples with all three members in `set`.
pub fn triples_within(set: &BTreeSet<PowerForm>, caps: &Caps) -> Vec<ExpTriple> {
    let vertices: Vec<PowerForm> = set.iter().cloned().collect();
    edges_within(&vertices, caps)
        .into_iter()
        .map(|[a, b, c]| ExpTriple {
            a: vertices[a].clone(),
            b: vertices[b].clone(),
            c: vertices[c].clone(),
        })
        .collect()
}

/// Provenance of a hypergraph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphMeta {
    pub seeds: Vec<String>,
    pub depth: Option<usize>,
    pub value_bit_cap: u64,
    pub exp_bit_cap: u64,
    pub vertex_budget: Option<usize>,
    /// Distinct generated values discarded by the exponent cap.
    pub dropped: u64,
    /// Vertices cut by the vertex budget.
    pub truncated: u64,
}

/// Vertices ascending by value plus exponential-triple edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleHypergraph {
    vertices: Vec<PowerForm>,
    edges: Vec<Edge>,
    pub meta: HypergraphMeta,
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    vertices: Vec<PowerFormRecord>,
    edges: Vec<Edge>,
    meta: HypergraphMeta,
}

impl TripleHypergraph {
    /// The hypergraph of all triples inside `vertices`.
    pub fn spanned_by(vertices: impl IntoIterator<Item = PowerForm>, caps: &Caps) -> Self {
        let set: BTreeSet<PowerForm> = vertices.into_iter().collect();
        let vertices: Vec<PowerForm> = set.into_iter().collect();
        let edges = edges_within(&vertices, caps);
        TripleHypergraph {
            vertices,
            edges,
            meta: HypergraphMeta {
                value_bit_cap: caps.value_bit_cap,
                exp_bit_cap: caps.exp_bit_cap,
                ..Default::default()
            },
        }
    }

    /// Builds from explicit parts, checking every edge is a genuine triple.
    pub fn new(vertices: Vec<PowerForm>, edges: Vec<Edge>, caps: &Caps) -> Result<Self> {
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("vertices must be distinct and ascending"));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::domain(format!("edge {e:?} has an index out of range")));
            }
            if !seen.insert(*e) {
                return Err(Error::domain(format!("duplicate edge {e:?}")));
            }
            let c = vertices[e[0]].pow(&vertices[e[1]], caps)?;
            if c != vertices[e[2]] {
                return Err(Error::domain(format!("edge {e:?} is not an exponential triple")));
            }
        }
        Ok(TripleHypergraph {
            vertices,
            edges,
            meta: HypergraphMeta {
                value_bit_cap: caps.value_bit_cap,
                exp_bit_cap: caps.exp_bit_cap,
                ..Default::default()
            },
        })
    }

    pub fn vertices(&self) -> &[PowerForm] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Sorted distinct vertex indices of an edge.
    pub fn edge_vertex_set(edge: &Edge) -> Vec<usize> {
        let mut s = edge.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn triple(&self, edge: &Edge) -> ExpTriple {
        ExpTriple {
            a: self.vertices[edge[0]].clone(),
            b: self.vertices[edge[1]].clone(),
            c: self.vertices[edge[2]].clone(),
        }
    }

    /// Sub-hypergraph induced by the given vertex indices.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let keep: BTreeSet<usize> = keep.iter().copied().filter(|&i| i < self.vertices.len()).collect();
        let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let vertices = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some([*remap.get(&e[0])?, *remap.get(&e[1])?, *remap.get(&e[2])?]))
            .collect();
        TripleHypergraph {
            vertices,
            edges,
            meta: HypergraphMeta {
                seeds: self.meta.seeds.clone(),
                depth: self.meta.depth,
                value_bit_cap: self.meta.value_bit_cap,
                exp_bit_cap: self.meta.exp_bit_cap,
                ..Default::default()
            },
        }
    }

    pub fn to_json(&self, caps: &Caps) -> serde_json::Value {
        serde_json::to_value(HypergraphJson {
            vertices: self.vertices.iter().map(|v| v.to_record(caps)).collect(),
            edges: self.edges.clone(),
            meta: self.meta.clone(),
        })
        .expect("hypergraph serializes")
    }

    pub fn from_json(value: &serde_json::Value, caps: &Caps) -> Result<Self> {
        let raw: HypergraphJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::domain(format!("malformed hypergraph JSON: {e}")))?;
        let vertices = raw
            .vertices
            .iter()
            .map(|r| PowerForm::from_record(r, caps))
            .collect::<Result<Vec<_>>>()?;
        let mut h = TripleHypergraph::new(vertices, raw.edges, caps)?;
        h.meta = raw.meta;
        Ok(h)
    }
}

/// Limits for [`exp_closure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureLimits {
    pub caps: Caps,
    pub max_depth: usize,
    pub vertex_budget: usize,
}

impl Default for ClosureLimits {
    fn default() -> Self {
        ClosureLimits {
            caps: Caps::default(),
            max_depth: 4,
            vertex_budget: 100_000,
        }
    }
}

/// Closes `seeds` under `(a, b) ↦ a^b` for `depth` rounds and returns the
/// triple hypergraph on the result.
pub fn exp_closure(seeds: &[BigUint], depth: usize, limits: &ClosureLimits) -> Result<TripleHypergraph> {
    if seeds.is_empty() {
        return Err(Error::domain("closure needs at least one seed"));
    }
    if depth > limits.max_depth {
        return Err(Error::capacity(format!(
            "depth {depth} exceeds the closure limit {}",
            limits.max_depth
        )));
    }
    let caps = &limits.caps;
    let mut vertices: BTreeSet<PowerForm> = seeds
        .iter()
        .map(|s| PowerForm::normalize(s, caps))
        .collect::<Result<_>>()?;
    let mut dropped: HashSet<(BigUint, BigUint)> = HashSet::new();
    let mut truncated = 0u64;
    for _ in 0..depth {
        let current: Vec<PowerForm> = vertices.iter().cloned().collect();
        let exponents: Vec<BigUint> = current.iter().filter_map(|v| v.try_value(caps)).collect();
        let produced: Vec<std::result::Result<PowerForm, (BigUint, BigUint)>> = current
            .par_iter()
            .flat_map_iter(|a| {
                exponents.iter().map(move |vb| {
                    a.raise(vb, caps)
                        .map_err(|_| (a.root().clone(), a.exponent() * vb))
                })
            })
            .collect();
        for p in produced {
            match p {
                Ok(v) => {
                    vertices.insert(v);
                }
                Err(key) => {
                    dropped.insert(key);
                }
            }
        }
        if vertices.len() > limits.vertex_budget {
            let excess = vertices.len() - limits.vertex_budget;
            truncated += excess as u64;
            vertices = vertices.into_iter().take(limits.vertex_budget).collect();
        }
    }
    let mut h = TripleHypergraph::spanned_by(vertices, caps);
    h.meta = HypergraphMeta {
        seeds: seeds.iter().map(|s| s.to_string()).collect(),
        depth: Some(depth),
        value_bit_cap: caps.value_bit_cap,
        exp_bit_cap: caps.exp_bit_cap,
        vertex_budget: Some(limits.vertex_budget),
        dropped: dropped.len() as u64,
        truncated,
    };
    Ok(h)
}

/// Convenience for small explicit values.
pub fn triple_values(t: &ExpTriple) -> Option<(u64, u64, u64)> {
    Some((t.a.to_u64()?, t.b.to_u64()?, t.c.to_u64()?))
}
