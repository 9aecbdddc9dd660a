//! Graph distances and deterministic shortest paths on a mesh.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mesh::Mesh;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Every edge has length 1.
    #[default]
    Hop,
    /// Edges weighted by the Euclidean distance between their endpoints.
    EuclideanEdgeWeight,
}

/// Edge length function for a mesh under a [`DistanceMode`].
#[derive(Clone, Copy)]
pub(crate) struct Weights<'a, T> {
    mesh: &'a Mesh<T>,
    mode: DistanceMode,
}

impl<'a, T: Scalar> Weights<'a, T> {
    pub(crate) fn new(mesh: &'a Mesh<T>, mode: DistanceMode) -> Result<Self> {
        if mode == DistanceMode::EuclideanEdgeWeight && mesh.positions().is_none() {
            return Err(Error::InvalidInput(
                "euclidean edge weights need vertex positions".into(),
            ));
        }
        Ok(Weights { mesh, mode })
    }

    fn weight(&self, a: usize, b: usize) -> T {
        match self.mode {
            DistanceMode::Hop => T::one(),
            DistanceMode::EuclideanEdgeWeight => {
                self.mesh.edge_length(a, b).expect("positions checked")
            }
        }
    }

    pub(crate) fn graph(&self) -> &'a Graph {
        self.mesh.graph()
    }
}

#[derive(PartialEq)]
struct HeapItem<T> {
    dist: T,
    vertex: usize,
}

impl<T: Scalar> Eq for HeapItem<T> {}

impl<T: Scalar> Ord for HeapItem<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl<T: Scalar> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Whether the walk may step from the first vertex to the second.
pub(crate) type StepFilter<'a> = Box<dyn Fn(usize, usize) -> bool + 'a>;

/// Result of a (multi-source) Dijkstra run.
pub(crate) struct ShortestPathTree<'a, T> {
    weights: Weights<'a, T>,
    step: StepFilter<'a>,
    pub(crate) dist: Vec<T>,
    order: Vec<usize>,
    root: Vec<bool>,
}

impl<'a, T: Scalar> ShortestPathTree<'a, T> {
    /// Dijkstra from `sources` (each with a starting potential), traversing
    /// only edges accepted by `step`.
    pub(crate) fn build(
        weights: Weights<'a, T>,
        sources: &[(usize, T)],
        step: StepFilter<'a>,
    ) -> Self {
        let n = weights.graph().len();
        let mut dist = vec![T::infinity(); n];
        let mut order = vec![usize::MAX; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        for &(s, d0) in sources {
            if d0 < dist[s] {
                dist[s] = d0;
                heap.push(HeapItem {
                    dist: d0,
                    vertex: s,
                });
            }
        }
        let mut settled = 0;
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if order[v] != usize::MAX || d > dist[v] {
                continue;
            }
            order[v] = settled;
            settled += 1;
            for &w in weights.graph().neighbors(v) {
                if order[w] != usize::MAX || !step(v, w) {
                    continue;
                }
                let nd = d + weights.weight(v, w);
                if nd < dist[w] {
                    dist[w] = nd;
                    via[w] = Some(v);
                    heap.push(HeapItem {
                        dist: nd,
                        vertex: w,
                    });
                }
            }
        }
        let root = via
            .iter()
            .zip(&order)
            .map(|(p, &o)| p.is_none() && o != usize::MAX)
            .collect();
        ShortestPathTree {
            weights,
            step,
            dist,
            order,
            root,
        }
    }

    /// Plain tree over every edge.
    pub(crate) fn unrestricted(weights: Weights<'a, T>, source: usize) -> Self {
        Self::build(weights, &[(source, T::zero())], Box::new(|_, _| true))
    }

    pub(crate) fn reached(&self, v: usize) -> bool {
        self.order[v] != usize::MAX
    }

    /// Path from the tree's root to `v`. Among equal-cost predecessors the
    /// lowest vertex index wins.
    pub(crate) fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if !self.reached(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while !self.root[cur] {
            let pred = self
                .weights
                .graph()
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&u| {
                    self.order[u] < self.order[cur]
                        && (self.step)(u, cur)
                        && self.dist[u] + self.weights.weight(u, cur) == self.dist[cur]
                })
                .expect("settled non-root vertex has a tight predecessor");
            path.push(pred);
            cur = pred;
        }
        path.reverse();
        Some(path)
    }
}

/// Single-source shortest distances; unreachable vertices are `+inf`.
pub fn shortest_distances<T: Scalar>(
    mesh: &Mesh<T>,
    source: usize,
    mode: DistanceMode,
) -> Result<Vec<T>> {
    check_vertex(mesh, source)?;
    let w = Weights::new(mesh, mode)?;
    Ok(ShortestPathTree::unrestricted(w, source).dist)
}

/// Symmetric distance matrix between an ordered list of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    vertices: Vec<usize>,
    position: HashMap<usize, usize>,
    data: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Builds from a full row-major matrix; rejects asymmetric input or a
    /// non-zero diagonal.
    pub fn from_rows(vertices: Vec<usize>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = vertices.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("distance matrix shape mismatch".into()));
        }
        for i in 0..n {
            if rows[i][i] != T::zero() {
                return Err(Error::InvalidInput(
                    "distance matrix diagonal must be zero".into(),
                ));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] || rows[i][j] < T::zero() {
                    return Err(Error::InvalidInput(
                        "distance matrix must be symmetric and non-negative".into(),
                    ));
                }
            }
        }
        Ok(Self::from_parts(
            vertices,
            rows.into_iter().flatten().collect(),
        ))
    }

    fn from_parts(vertices: Vec<usize>, data: Vec<T>) -> Self {
        let position = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        DistanceMatrix {
            vertices,
            position,
            data,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Entry by row/column position.
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.vertices.len() + j]
    }

    /// Entry by vertex id.
    pub fn between(&self, a: usize, b: usize) -> Option<T> {
        Some(self.at(*self.position.get(&a)?, *self.position.get(&b)?))
    }

    /// Pairs `(a, b)` (a < b in list order) with infinite distance.
    pub fn disconnected_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.at(i, j).is_finite() {
                    out.push((self.vertices[i], self.vertices[j]));
                }
            }
        }
        out
    }
}

/// Distances between every pair of `vertices`, one Dijkstra run per vertex.
pub fn pairwise_distances<T: Scalar>(
    mesh: &Mesh<T>,
    vertices: &[usize],
    mode: DistanceMode,
) -> Result<DistanceMatrix<T>> {
    for &v in vertices {
        check_vertex(mesh, v)?;
    }
    let w = Weights::new(mesh, mode)?;
    let n = vertices.len();
    let mut data = vec![T::zero(); n * n];
    for (i, &s) in vertices.iter().enumerate() {
        let tree = ShortestPathTree::unrestricted(w, s);
        for (j, &t) in vertices.iter().enumerate() {
            data[i * n + j] = if i == j { T::zero() } else { tree.dist[t] };
        }
    }
    // Floating point sums can differ by direction; keep the matrix exactly symmetric.
    for i in 0..n {
        for j in 0..i {
            let m = data[i * n + j].min(data[j * n + i]);
            data[i * n + j] = m;
            data[j * n + i] = m;
        }
    }
    Ok(DistanceMatrix::from_parts(vertices.to_vec(), data))
}

/// Pairwise distances between the sample vertices, in ascending vertex order.
pub fn pairwise_sample_distances<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &crate::field::SampleSet<T>,
    mode: DistanceMode,
) -> Result<DistanceMatrix<T>> {
    pairwise_distances(mesh, &samples.vertices(), mode)
}

/// Shortest path from `u` to `v`, ties broken toward the lowest predecessor index.
pub fn shortest_path<T: Scalar>(
    mesh: &Mesh<T>,
    u: usize,
    v: usize,
    mode: DistanceMode,
) -> Result<Vec<usize>> {
    shortest_path_avoiding(mesh, u, v, mode, |_| false)?.ok_or(Error::NoPath { from: u, to: v })
}

/// Shortest path from `u` to `v` that never enters a vertex for which
/// `blocked` holds (the endpoints are always permitted). `Ok(None)` if none.
pub fn shortest_path_avoiding<T: Scalar>(
    mesh: &Mesh<T>,
    u: usize,
    v: usize,
    mode: DistanceMode,
    blocked: impl Fn(usize) -> bool,
) -> Result<Option<Vec<usize>>> {
    check_vertex(mesh, u)?;
    check_vertex(mesh, v)?;
    let w = Weights::new(mesh, mode)?;
    let tree = ShortestPathTree::build(
        w,
        &[(u, T::zero())],
        Box::new(move |_, x| x == v || !blocked(x)),
    );
    Ok(tree.path_to(v))
}

fn check_vertex<T: Scalar>(mesh: &Mesh<T>, v: usize) -> Result<()> {
    if v < mesh.vertex_count() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "vertex {v} is not in the mesh ({} vertices)",
            mesh.vertex_count()
        )))
    }
}
