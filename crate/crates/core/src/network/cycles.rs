//! Directed simple-cycle enumeration.
//!
//! Johnson's algorithm: for every start vertex `s` (in increasing order) the
//! search is restricted to vertices `>= s`, so each cycle is reported exactly
//! once, already rotated so that its smallest vertex comes first.

use serde::{Deserialize, Serialize};

use super::GmasNetwork;
use crate::error::{Error, Result};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// A directed simple cycle, rotated so the smallest vertex index is first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    /// Visited vertices in order; the closing edge returns to `vertices[0]`.
    pub vertices: Vec<usize>,
    /// `edges[j]` goes from `vertices[j]` to `vertices[(j + 1) % len]`.
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, edge: usize) -> bool {
        self.edges.contains(&edge)
    }

    /// Rotate so the smallest vertex index comes first.
    pub fn canonicalize(&mut self) {
        if let Some(pos) = self.vertices.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i) {
            self.vertices.rotate_left(pos);
            self.edges.rotate_left(pos);
        }
    }

    /// Human-readable `a -> b -> c -> a` form.
    pub fn describe(&self, net: &GmasNetwork) -> String {
        let mut names: Vec<&str> = self.vertices.iter().map(|&v| net.vertices()[v].name.as_str()).collect();
        if let Some(first) = names.first().copied() {
            names.push(first);
        }
        names.join(" -> ")
    }
}

pub fn enumerate_cycles(net: &GmasNetwork) -> Result<Vec<Cycle>> {
    enumerate_cycles_capped(net, DEFAULT_CYCLE_CAP)
}

/// All directed simple cycles in lexicographic order of their vertex lists.
pub fn enumerate_cycles_capped(net: &GmasNetwork, cap: usize) -> Result<Vec<Cycle>> {
    let adj = net.out_edges();
    let m = net.n_vertices();
    let mut out = Vec::new();
    for start in 0..m {
        let component = scc_containing(&adj, start);
        if component.iter().filter(|&&v| v).count() < 2 {
            continue;
        }
        let mut search = Search {
            adj: &adj,
            allowed: component,
            blocked: vec![false; m],
            block_map: vec![Vec::new(); m],
            path: Vec::new(),
            path_edges: Vec::new(),
            out: &mut out,
            cap,
        };
        search.circuit(start, start)?;
    }
    out.sort();
    Ok(out)
}

/// Vertices of the strongly connected component of `start` within the
/// subgraph induced by vertices `>= start`.
fn scc_containing(adj: &[Vec<(usize, usize)>], start: usize) -> Vec<bool> {
    let m = adj.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; m];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for w in 0..m {
                if w < start || seen[w] {
                    continue;
                }
                let linked = if forward {
                    adj[u].iter().any(|&(t, _)| t == w)
                } else {
                    adj[w].iter().any(|&(t, _)| t == u)
                };
                if linked {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

struct Search<'a> {
    adj: &'a [Vec<(usize, usize)>],
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    block_map: Vec<Vec<usize>>,
    path: Vec<usize>,
    path_edges: Vec<usize>,
    out: &'a mut Vec<Cycle>,
    cap: usize,
}

impl Search<'_> {
    fn circuit(&mut self, v: usize, start: usize) -> Result<bool> {
        let mut found = false;
        self.path.push(v);
        self.blocked[v] = true;
        for &(w, edge) in self.adj[v].iter() {
            if !self.allowed[w] {
                continue;
            }
            if w == start {
                let mut edges = self.path_edges.clone();
                edges.push(edge);
                self.out.push(Cycle { vertices: self.path.clone(), edges });
                if self.out.len() > self.cap {
                    return Err(Error::CycleCap(self.cap));
                }
                found = true;
            } else if !self.blocked[w] {
                self.path_edges.push(edge);
                if self.circuit(w, start)? {
                    found = true;
                }
                self.path_edges.pop();
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &(w, _) in self.adj[v].iter() {
                if self.allowed[w] && !self.block_map[w].contains(&v) {
                    self.block_map[w].push(v);
                }
            }
        }
        self.path.pop();
        Ok(found)
    }

    fn unblock(&mut self, v: usize) {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            stack.extend(std::mem::take(&mut self.block_map[u]));
        }
    }
}
