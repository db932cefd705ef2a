//! Simple undirected graphs, used for primal and incidence graphs.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

/// Tag of a vertex. Clause vertices only occur in incidence graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Variable,
    Clause,
}

/// Undirected simple graph on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
    kinds: Vec<VertexKind>,
}

impl Graph {
    /// Edgeless graph of `n` variable vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            num_vertices: n,
            edges: BTreeSet::new(),
            kinds: vec![VertexKind::Variable; n],
        }
    }

    pub fn with_kinds(kinds: Vec<VertexKind>) -> Self {
        Graph {
            num_vertices: kinds.len(),
            edges: BTreeSet::new(),
            kinds,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    /// Adds `{u, v}`. Self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.num_vertices && v < self.num_vertices, "edge endpoint out of range");
        if u != v {
            self.edges.insert((u.min(v), u.max(v)));
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// A proper 2-colouring, or an edge whose endpoints are forced to the same colour.
    pub fn two_coloring(&self) -> Result<Vec<bool>, (usize, usize)> {
        let adj = self.adjacency();
        let mut color: Vec<Option<bool>> = vec![None; self.num_vertices];
        let mut queue = VecDeque::new();
        for start in 0..self.num_vertices {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &w in &adj[u] {
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return Err((u.min(w), u.max(w))),
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_not_bipartite() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 0);
        assert!(!g.is_bipartite());
        g = Graph::new(4);
        for i in 0..4 {
            g.add_edge(i, (i + 1) % 4);
        }
        let col = g.two_coloring().unwrap();
        for (u, v) in g.edges() {
            assert_ne!(col[u], col[v]);
        }
    }

    #[test]
    fn self_loops_are_dropped() {
        let mut g = Graph::new(2);
        g.add_edge(1, 1);
        g.add_edge(1, 0);
        g.add_edge(0, 1);
        assert_eq!(g.num_edges(), 1);
    }
}
