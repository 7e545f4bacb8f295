//! Bipartite pigeon/hole graphs.
//!
//! Edges are kept sorted by `(u, v)`; the edge at position `r` carries the
//! formula variable `r + 1`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) is outside {u_count} x {v_count}")]
    EdgeOutOfRange {
        u: u32,
        v: u32,
        u_count: u32,
        v_count: u32,
    },
    #[error("edge ({u}, {v}) listed twice")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A bipartite graph with pigeons `1..=u_count` and holes `1..=v_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    u_count: u32,
    v_count: u32,
    edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    pub fn new(u_count: u32, v_count: u32, mut edges: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        for &(u, v) in &edges {
            if u == 0 || v == 0 || u > u_count || v > v_count {
                return Err(GraphError::EdgeOutOfRange {
                    u,
                    v,
                    u_count,
                    v_count,
                });
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge {
                u: w[0].0,
                v: w[0].1,
            });
        }
        Ok(BipartiteGraph {
            u_count,
            v_count,
            edges,
        })
    }

    /// `pigeons` pigeons, `pigeons - 1` holes, every pair adjacent.
    pub fn complete(pigeons: u32) -> Self {
        assert!(pigeons >= 1);
        let holes = pigeons - 1;
        let edges = (1..=pigeons)
            .flat_map(|u| (1..=holes).map(move |v| (u, v)))
            .collect();
        BipartiteGraph::new(pigeons, holes, edges).expect("complete graph is well formed")
    }

    pub fn u_count(&self) -> u32 {
        self.u_count
    }

    pub fn v_count(&self) -> u32 {
        self.v_count
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Variable index of edge `(u, v)`.
    pub fn edge_var(&self, u: u32, v: u32) -> Option<u32> {
        self.edges.binary_search(&(u, v)).ok().map(|r| r as u32 + 1)
    }

    /// Edge variables at pigeon `u`, ordered by hole.
    pub fn pigeon_vars(&self, u: u32) -> Vec<u32> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.0 == u)
            .map(|(r, _)| r as u32 + 1)
            .collect()
    }

    /// Edge variables at hole `v`, ordered by pigeon.
    pub fn hole_vars(&self, v: u32) -> Vec<u32> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.1 == v)
            .map(|(r, _)| r as u32 + 1)
            .collect()
    }

    pub fn pigeon_degree(&self, u: u32) -> usize {
        self.edges.iter().filter(|e| e.0 == u).count()
    }

    pub fn hole_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    /// Text form: `u_count v_count` then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.u_count, self.v_count);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing `u_count v_count` header".into(),
        })?;
        let (u_count, v_count) = parse_pair(header, line)?;
        let mut edges = Vec::new();
        for (line, text) in lines {
            edges.push(parse_pair(text, line)?);
        }
        BipartiteGraph::new(u_count, v_count, edges)
    }
}

fn parse_pair(text: &str, line: usize) -> Result<(u32, u32), GraphError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let bad = || GraphError::Parse {
        line,
        message: format!("expected two non-negative integers, got `{text}`"),
    };
    if fields.len() != 2 {
        return Err(bad());
    }
    let a = fields[0].parse().map_err(|_| bad())?;
    let b = fields[1].parse().map_err(|_| bad())?;
    Ok((a, b))
}
