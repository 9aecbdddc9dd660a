//! Undirected simple graphs over dense vertex indices.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Adjacency lists over vertices `0..len()`, each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj })
    }

    /// Like [`Graph::from_edges`] but silently merges duplicate edges.
    pub fn from_edge_set(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let set: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self::from_edges(n, set)
    }

    /// Cycle graph `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Each edge once, as `(low, high)`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Connected components of the subgraph induced by vertices passing `keep`,
    /// ordered by smallest member; each component sorted.
    pub fn components_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX || !keep(start) {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX && keep(w) {
                        label[w] = id;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.components_where(|_| true).len() == 1
    }

    /// Whether the subgraph induced by `subset` is connected (true when empty).
    pub fn is_connected_within(&self, subset: &BTreeSet<usize>) -> bool {
        subset.is_empty() || self.components_where(|v| subset.contains(&v)).len() == 1
    }

    /// Breadth-first hop distances from `sources`, walking only through vertices
    /// passing `allowed`. Unreached vertices are `None`.
    pub fn hop_distances(
        &self,
        sources: impl IntoIterator<Item = usize>,
        allowed: impl Fn(usize) -> bool,
    ) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for &w in &self.adj[v] {
                if dist[w].is_none() && allowed(w) {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}
