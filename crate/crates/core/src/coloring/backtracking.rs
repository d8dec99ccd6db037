use super::solver::{ColoringSolver, SolveLimits};
use super::ColoringProblem;
use crate::error::{Error, Result};

/// Depth-first search over a static vertex order (descending degree, then
/// ascending value) with propagation: once all but one vertex of an edge
/// share a color, that color leaves the last vertex's domain.
pub struct Backtracking;

enum Undo {
    Domain(usize, u64),
    Color(usize),
}

struct Frame {
    pos: usize,
    vertex: usize,
    next_color: usize,
    mark: usize,
}

struct State<'a> {
    problem: &'a ColoringProblem,
    incident: Vec<Vec<usize>>,
    domain: Vec<u64>,
    color: Vec<Option<usize>>,
    trail: Vec<Undo>,
}

impl State<'_> {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail above mark") {
                Undo::Domain(v, old) => self.domain[v] = old,
                Undo::Color(v) => self.color[v] = None,
            }
        }
    }

    /// Assigns and propagates; `false` on conflict (caller undoes).
    fn assign(&mut self, vertex: usize, color: usize) -> bool {
        let mut queue = vec![(vertex, color)];
        while let Some((v, c)) = queue.pop() {
            if let Some(existing) = self.color[v] {
                if existing != c {
                    return false;
                }
                continue;
            }
            if self.domain[v] & (1 << c) == 0 {
                return false;
            }
            self.color[v] = Some(c);
            self.trail.push(Undo::Color(v));
            for &e in &self.incident[v] {
                let members = &self.problem.constraints[e];
                let mut open = None;
                let mut open_count = 0;
                let mut shared = None;
                let mut uniform = true;
                for &u in members {
                    match self.color[u] {
                        None => {
                            open_count += 1;
                            open = Some(u);
                        }
                        Some(cu) => match shared {
                            None => shared = Some(cu),
                            Some(s) if s != cu => uniform = false,
                            _ => {}
                        },
                    }
                }
                if !uniform {
                    continue;
                }
                match (open_count, open, shared) {
                    (0, _, _) => return false,
                    (1, Some(u), Some(s)) if self.domain[u] & (1 << s) != 0 => {
                        self.trail.push(Undo::Domain(u, self.domain[u]));
                        self.domain[u] &= !(1 << s);
                        match self.domain[u].count_ones() {
                            0 => return false,
                            1 => queue.push((u, self.domain[u].trailing_zeros() as usize)),
                            _ => {}
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }
}

impl ColoringSolver for Backtracking {
    fn name(&self) -> &'static str {
        "backtracking"
    }

    fn solve(&self, problem: &ColoringProblem, limits: &SolveLimits) -> Result<Option<Vec<usize>>> {
        let n = problem.num_vertices;
        let k = problem.k;
        let mut incident = vec![Vec::new(); n];
        for (i, c) in problem.constraints.iter().enumerate() {
            for &v in c {
                incident[v].push(i);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(incident[v].len()), v));
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let mut st = State {
            problem,
            incident,
            domain: vec![full; n],
            color: vec![None; n],
            trail: Vec::new(),
        };

        let mut nodes = 0u64;
        let mut stack: Vec<Frame> = Vec::new();
        let mut pos = 0;
        'descend: loop {
            while pos < n && st.color[order[pos]].is_some() {
                pos += 1;
            }
            if pos == n {
                return Ok(Some(st.color.iter().map(|c| c.expect("all assigned")).collect()));
            }
            stack.push(Frame {
                pos,
                vertex: order[pos],
                next_color: 0,
                mark: st.trail.len(),
            });
            loop {
                let depth = stack.len();
                let Some(frame) = stack.last_mut() else {
                    return Ok(None);
                };
                st.undo_to(frame.mark);
                // colors are interchangeable before the first decision
                let max_color = if depth == 1 { 1 } else { k };
                let dom = st.domain[frame.vertex];
                let next = (frame.next_color..max_color).find(|&c| dom & (1 << c) != 0);
                let Some(c) = next else {
                    stack.pop();
                    continue;
                };
                nodes += 1;
                if nodes > limits.backtracking_max_nodes {
                    return Err(Error::capacity(format!(
                        "backtracking: node budget of {} exceeded",
                        limits.backtracking_max_nodes
                    )));
                }
                frame.next_color = c + 1;
                let (v, p) = (frame.vertex, frame.pos);
                if st.assign(v, c) {
                    pos = p + 1;
                    continue 'descend;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(n: usize, k: usize, constraints: Vec<Vec<usize>>) -> ColoringProblem {
        ColoringProblem {
            num_vertices: n,
            k,
            constraints,
        }
    }

    #[test]
    fn pair_constraints_behave_like_graph_coloring() {
        let limits = SolveLimits::default();
        // triangle via pair constraints: 2-coloring impossible, 3 fine
        let tri = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert_eq!(Backtracking.solve(&problem(3, 2, tri.clone()), &limits).unwrap(), None);
        let w = Backtracking.solve(&problem(3, 3, tri.clone()), &limits).unwrap().unwrap();
        assert!(problem(3, 3, tri).is_proper(&w));
    }

    #[test]
    fn fano_plane_is_not_two_colorable() {
        let fano = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let limits = SolveLimits::default();
        assert_eq!(Backtracking.solve(&problem(7, 2, fano.clone()), &limits).unwrap(), None);
        assert!(Backtracking.solve(&problem(7, 3, fano), &limits).unwrap().is_some());
    }

    #[test]
    fn node_budget() {
        let fano = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let limits = SolveLimits {
            backtracking_max_nodes: 2,
            ..SolveLimits::default()
        };
        assert!(Backtracking.solve(&problem(7, 2, fano), &limits).unwrap_err().is_capacity());
    }
}
