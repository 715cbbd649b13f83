//! Simple undirected graphs with named vertices.

use crate::{Error, Result};

/// Finite simple graph: named vertices, undirected edges, no self-loops or
/// parallel edges. Vertex order is fixed at construction and used as the
/// index order everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate vertex `{v}`")));
            }
        }
        let n = vertices.len();
        let mut edge_set = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !edge_set.insert(e) {
                return Err(Error::InvalidInput(format!("parallel edge ({}, {})", e.0, e.1)));
            }
            normalized.push(e);
        }
        Ok(Self { vertices, edges: normalized })
    }

    /// Path on `n` vertices (`n - 1` edges); `n = 2` is a single edge.
    pub fn path(n: usize) -> Result<Self> {
        let vertices = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::new(vertices, edges)
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("a cycle needs at least three vertices".into()));
        }
        let vertices = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(vertices, edges)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let vertices = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::new(vertices, edges)
    }

    /// Parses the edge-list format: one `u v` pair per line, vertices as
    /// arbitrary tokens in order of first appearance. A line with a single
    /// token declares an isolated vertex; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let intern = |name: &str, vertices: &mut Vec<String>,
                          index: &mut std::collections::HashMap<String, usize>| {
            *index.entry(name.to_string()).or_insert_with(|| {
                vertices.push(name.to_string());
                vertices.len() - 1
            })
        };
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [v] => {
                    intern(v, &mut vertices, &mut index);
                }
                [u, v] => {
                    let ui = intern(u, &mut vertices, &mut index);
                    let vi = intern(v, &mut vertices, &mut index);
                    edges.push((ui, vi));
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected `u v` or a single vertex token",
                        lineno + 1
                    )));
                }
            }
        }
        Self::new(vertices, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}
