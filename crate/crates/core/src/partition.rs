//! Sample-through curve networks and the surface patches they cut out.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::field::SampleSet;
use crate::graph::Graph;
use crate::mesh::{face_edges, Mesh};
use crate::metric::{DistanceMode, ShortestPathTree, Weights};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionAlgorithm {
    /// Greedy nearest-sample tour closed into a curve.
    #[default]
    LinkCycle,
    /// Repeatedly close a curve through the closest pair of uncovered samples.
    Geodesic,
}

/// Union of mesh paths running through every sample.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CurveNetwork {
    samples: Vec<usize>,
    segments: Vec<Vec<usize>>,
    vertices: BTreeSet<usize>,
}

impl CurveNetwork {
    /// Assembles a network from explicit segments. Every consecutive pair must
    /// be a mesh edge; every sample must lie on the network.
    pub fn from_segments<T: Scalar>(
        mesh: &Mesh<T>,
        samples: impl IntoIterator<Item = usize>,
        segments: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut net = CurveNetwork {
            samples: samples
                .into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            ..Default::default()
        };
        for seg in segments {
            if seg.is_empty() {
                continue;
            }
            for w in seg.windows(2) {
                if !mesh.graph().has_edge(w[0], w[1]) {
                    return Err(Error::InvalidInput(format!(
                        "segment step ({}, {}) is not a mesh edge",
                        w[0], w[1]
                    )));
                }
            }
            net.push(seg);
        }
        if let Some(s) = net.samples.iter().find(|s| !net.vertices.contains(s)) {
            return Err(Error::InvalidInput(format!(
                "sample {s} is not on the network"
            )));
        }
        Ok(net)
    }

    /// A network consisting of the given closed curves (each closes back to its start).
    pub fn from_cycles<T: Scalar>(
        mesh: &Mesh<T>,
        samples: impl IntoIterator<Item = usize>,
        cycles: &[Vec<usize>],
    ) -> Result<Self> {
        let segments = cycles
            .iter()
            .map(|c| {
                let mut s = c.clone();
                if let Some(&first) = c.first() {
                    s.push(first);
                }
                s
            })
            .collect();
        Self::from_segments(mesh, samples, segments)
    }

    fn push(&mut self, seg: Vec<usize>) {
        self.vertices.extend(seg.iter().copied());
        self.segments.push(seg);
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn segments(&self) -> &[Vec<usize>] {
        &self.segments
    }

    pub fn boundary_vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Distinct undirected segment edges as `(low, high)`.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.segments
            .iter()
            .flat_map(|s| s.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
            .collect()
    }

    /// Graph over all `vertex_count` mesh vertices with only segment edges.
    pub fn graph(&self, vertex_count: usize) -> Graph {
        Graph::from_edge_set(vertex_count, self.edges()).expect("segment edges are mesh edges")
    }

    /// Whether the segment edges connect all network vertices.
    pub fn is_connected(&self, vertex_count: usize) -> bool {
        self.graph(vertex_count).is_connected_within(&self.vertices)
    }

    /// A fundamental cycle basis of the segment graph: one simple closed
    /// vertex sequence per edge outside a breadth-first spanning forest.
    pub fn cycles(&self, vertex_count: usize) -> Vec<Vec<usize>> {
        let g = self.graph(vertex_count);
        let mut parent: BTreeMap<usize, Option<usize>> = BTreeMap::new();
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        let mut tree_edges = BTreeSet::new();
        for &root in &self.vertices {
            if parent.contains_key(&root) {
                continue;
            }
            parent.insert(root, None);
            depth.insert(root, 0);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in g.neighbors(v) {
                    if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                        e.insert(Some(v));
                        depth.insert(w, depth[&v] + 1);
                        tree_edges.insert((v.min(w), v.max(w)));
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            if tree_edges.contains(&(a, b)) {
                continue;
            }
            let (mut x, mut y) = (a, b);
            let (mut left, mut right) = (vec![x], vec![y]);
            while x != y {
                if depth[&x] >= depth[&y] {
                    x = parent[&x].expect("non-root has parent");
                    left.push(x);
                } else {
                    y = parent[&y].expect("non-root has parent");
                    right.push(y);
                }
            }
            right.pop();
            right.reverse();
            left.extend(right);
            out.push(left);
        }
        out
    }

    /// Every segment is simple and no sample sits strictly inside a segment
    /// unless it is also a segment endpoint elsewhere.
    fn check_segments(&self) -> Result<()> {
        let endpoints: BTreeSet<usize> = self
            .segments
            .iter()
            .flat_map(|s| [s[0], *s.last().unwrap()])
            .collect();
        for (k, seg) in self.segments.iter().enumerate() {
            let closed = seg.len() > 2 && seg.first() == seg.last();
            let body = if closed {
                &seg[..seg.len() - 1]
            } else {
                &seg[..]
            };
            let distinct: BTreeSet<_> = body.iter().collect();
            if distinct.len() != body.len() {
                return Err(Error::Pathological(format!(
                    "segment {k} {seg:?} revisits a vertex"
                )));
            }
            if seg.len() > 2 {
                if let Some(s) = seg[1..seg.len() - 1]
                    .iter()
                    .find(|v| self.samples.binary_search(v).is_ok() && !endpoints.contains(v))
                {
                    return Err(Error::Pathological(format!(
                        "segment {k} {seg:?} is forced through sample {s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Path search over the mesh that never walks through network vertices
/// (other than where it starts and `open_targets`) nor through samples.
struct Router<'m, T> {
    weights: Weights<'m, T>,
    samples: BTreeSet<usize>,
}

impl<'m, T: Scalar> Router<'m, T> {
    fn new(mesh: &'m Mesh<T>, samples: &[usize], mode: DistanceMode) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "partitioning needs at least two samples, got {}",
                samples.len()
            )));
        }
        mesh.require_connected()?;
        Ok(Router {
            weights: Weights::new(mesh, mode)?,
            samples: samples.iter().copied().collect(),
        })
    }

    /// Tree from `sources`. A walk may enter network vertices and samples but
    /// never continue out of one (sources excepted). `banned` edges are skipped.
    fn tree<'b>(
        &'b self,
        sources: &[usize],
        net: &'b BTreeSet<usize>,
        banned: &'b BTreeSet<(usize, usize)>,
    ) -> ShortestPathTree<'b, T> {
        let src: BTreeSet<usize> = sources.iter().copied().collect();
        let seeds: Vec<(usize, T)> = sources.iter().map(|&s| (s, T::zero())).collect();
        let samples = &self.samples;
        ShortestPathTree::build(
            self.weights,
            &seeds,
            Box::new(move |from, to| {
                let stop = net.contains(&from) || samples.contains(&from);
                (src.contains(&from) || !stop)
                    && !src.contains(&to)
                    && !banned.contains(&(from.min(to), from.max(to)))
            }),
        )
    }

    fn dist(&self, tree: &ShortestPathTree<'_, T>, v: usize) -> Option<T> {
        tree.reached(v).then(|| tree.dist[v])
    }
}

fn nearest<T: Scalar>(candidates: impl IntoIterator<Item = (usize, Option<T>)>) -> Option<usize> {
    let mut best: Option<(T, usize)> = None;
    for (v, d) in candidates {
        if let Some(d) = d {
            if best.is_none_or(|(bd, bv)| d < bd || (d == bd && v < bv)) {
                best = Some((d, v));
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Links the samples one by one into a closed curve: starting at the lowest
/// sample, walk to the nearest unvisited sample, then close back to the start.
/// Walks never cross the curve built so far. Samples the tour cannot reach
/// are attached to the curve by shortest paths.
pub fn link_cycle<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &SampleSet<T>,
    mode: DistanceMode,
) -> Result<CurveNetwork> {
    let sample_list = samples.vertices();
    let router = Router::new(mesh, &sample_list, mode)?;
    let mut net = CurveNetwork {
        samples: sample_list.clone(),
        ..Default::default()
    };
    let start = sample_list[0];
    net.vertices.insert(start);
    let mut unvisited: BTreeSet<usize> = sample_list[1..].iter().copied().collect();
    let mut cur = start;
    let no_ban = BTreeSet::new();

    while !unvisited.is_empty() {
        let verts = net.vertices.clone();
        let tree = router.tree(&[cur], &verts, &no_ban);
        let Some(t) = nearest(unvisited.iter().map(|&t| (t, router.dist(&tree, t)))) else {
            break;
        };
        let path = tree.path_to(t).expect("reached");
        net.push(path);
        unvisited.remove(&t);
        cur = t;
    }

    if cur != start {
        close_curve(&router, &mut net, cur, start)?;
    }
    attach_remaining(&router, &mut net, unvisited)?;
    net.check_segments()?;
    Ok(net)
}

/// Closes the open chain ending at `cur` back to `start`, or failing that to
/// the nearest other chain vertex.
fn close_curve<T: Scalar>(
    router: &Router<'_, T>,
    net: &mut CurveNetwork,
    cur: usize,
    start: usize,
) -> Result<()> {
    let banned = net.edges();
    let verts: BTreeSet<usize> = net
        .vertices
        .iter()
        .copied()
        .filter(|&v| v != start)
        .collect();
    let tree = router.tree(&[cur], &verts, &banned);
    if let Some(path) = tree.path_to(start) {
        net.push(path);
        return Ok(());
    }
    // Lasso: any network vertex not adjacent along the chain will do.
    let chain_neighbors: BTreeSet<usize> = banned
        .iter()
        .filter_map(|&(a, b)| {
            if a == cur {
                Some(b)
            } else if b == cur {
                Some(a)
            } else {
                None
            }
        })
        .collect();
    let targets: Vec<usize> = net
        .vertices
        .iter()
        .copied()
        .filter(|&v| v != cur && !chain_neighbors.contains(&v))
        .collect();
    let verts = net.vertices.clone();
    let no_ban = BTreeSet::new();
    let tree = router.tree(&[cur], &verts, &no_ban);
    let target = nearest(targets.iter().map(|&v| (v, router.dist(&tree, v))));
    match target.and_then(|t| tree.path_to(t)) {
        Some(path) => {
            net.push(path);
            Ok(())
        }
        None => Err(Error::Pathological(format!(
            "no free path closes the curve from sample {cur}"
        ))),
    }
}

/// Joins each leftover sample to the network along a shortest free path.
fn attach_remaining<T: Scalar>(
    router: &Router<'_, T>,
    net: &mut CurveNetwork,
    remaining: BTreeSet<usize>,
) -> Result<()> {
    let no_ban = BTreeSet::new();
    for t in remaining {
        if net.contains(t) {
            continue;
        }
        let sources: Vec<usize> = net.vertices.iter().copied().collect();
        let verts = net.vertices.clone();
        let tree = router.tree(&sources, &verts, &no_ban);
        let path = tree.path_to(t).ok_or_else(|| {
            Error::Pathological(format!("sample {t} cannot be linked to the curve network"))
        })?;
        net.push(path);
    }
    Ok(())
}

/// Grows closed curves through pairs of samples until every sample is on the
/// network: the closest uncovered pair is joined by a shortest path plus a
/// second, vertex-disjoint shortest path. New curves that do not touch the
/// existing network are bridged to it.
pub fn geodesic_partition<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &SampleSet<T>,
    mode: DistanceMode,
) -> Result<CurveNetwork> {
    let sample_list = samples.vertices();
    let router = Router::new(mesh, &sample_list, mode)?;
    let mut net = CurveNetwork {
        samples: sample_list.clone(),
        ..Default::default()
    };
    let no_ban = BTreeSet::new();

    loop {
        let uncovered: Vec<usize> = sample_list
            .iter()
            .copied()
            .filter(|&s| !net.contains(s))
            .collect();
        if uncovered.is_empty() {
            break;
        }
        let before = net.vertices.clone();

        // Closest uncovered pair, ties to the lowest (a, b).
        let mut pair: Option<(T, usize, usize)> = None;
        if uncovered.len() >= 2 {
            for (i, &a) in uncovered.iter().enumerate() {
                let tree = router.tree(&[a], &before, &no_ban);
                for &b in &uncovered[i + 1..] {
                    if let Some(d) = router.dist(&tree, b) {
                        if pair.is_none_or(|(pd, _, _)| d < pd) {
                            pair = Some((d, a, b));
                        }
                    }
                }
            }
        }

        match pair {
            Some((_, a, b)) => {
                let first = router
                    .tree(&[a], &before, &no_ban)
                    .path_to(b)
                    .expect("reached");
                let mut blocked = before.clone();
                blocked.extend(first[1..first.len() - 1].iter().copied());
                let banned: BTreeSet<(usize, usize)> = first
                    .windows(2)
                    .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                    .collect();
                let second = router.tree(&[b], &blocked, &banned).path_to(a);
                net.push(first);
                if let Some(p) = second {
                    net.push(p);
                }
            }
            None => {
                if before.is_empty() {
                    return Err(Error::Pathological("no two samples can be linked".into()));
                }
                // One sample left: two disjoint paths from it to distinct network vertices.
                let s = uncovered[0];
                let sources: Vec<usize> = before.iter().copied().collect();
                let first = router
                    .tree(&sources, &before, &no_ban)
                    .path_to(s)
                    .ok_or_else(|| {
                        Error::Pathological(format!(
                            "sample {s} cannot be linked to the curve network"
                        ))
                    })?;
                let mut blocked = before.clone();
                blocked.extend(first[1..].iter().copied());
                blocked.remove(&s);
                let anchor = first[0];
                let banned: BTreeSet<(usize, usize)> = first
                    .windows(2)
                    .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                    .collect();
                let tree = router.tree(&[s], &blocked, &banned);
                let targets = before.iter().copied().filter(|&v| v != anchor);
                let second = nearest(targets.map(|v| (v, router.dist(&tree, v))))
                    .and_then(|t| tree.path_to(t));
                net.push(first);
                if let Some(p) = second {
                    net.push(p);
                }
            }
        }

        // Keep the network connected.
        if !before.is_empty() && !net.is_connected(mesh.vertex_count()) {
            let fresh: Vec<usize> = net.vertices.difference(&before).copied().collect();
            let verts = net.vertices.clone();
            let tree = router.tree(&fresh, &verts, &no_ban);
            let t =
                nearest(before.iter().map(|&v| (v, router.dist(&tree, v)))).ok_or_else(|| {
                    Error::Pathological("new curve cannot be joined to the network".into())
                })?;
            let bridge = tree.path_to(t).expect("reached");
            net.push(bridge);
        }
    }
    net.check_segments()?;
    Ok(net)
}

pub fn build_network<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &SampleSet<T>,
    mode: DistanceMode,
    algorithm: PartitionAlgorithm,
) -> Result<CurveNetwork> {
    match algorithm {
        PartitionAlgorithm::LinkCycle => link_cycle(mesh, samples, mode),
        PartitionAlgorithm::Geodesic => geodesic_partition(mesh, samples, mode),
    }
}

/// Patches cut out by a curve network.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub network: CurveNetwork,
    /// Interior vertices of each patch, sorted; ordered by smallest vertex.
    pub components: Vec<Vec<usize>>,
    /// Closed boundary loops of each patch (face-walked when faces exist,
    /// otherwise the sorted adjacent network vertices as a single entry).
    pub component_boundaries: Vec<Vec<Vec<usize>>>,
    /// Euler characteristic of each closed patch, when faces exist.
    pub euler: Vec<Option<i64>>,
    pub warnings: Vec<String>,
}

impl Partition {
    /// Component id per vertex; `None` for network vertices.
    pub fn labels(&self, vertex_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; vertex_count];
        for (c, comp) in self.components.iter().enumerate() {
            for &v in comp {
                out[v] = Some(c);
            }
        }
        out
    }

    /// Network vertices adjacent to component `c`.
    pub fn ring<T: Scalar>(&self, mesh: &Mesh<T>, c: usize) -> BTreeSet<usize> {
        ring_of(mesh, &self.network, &self.components[c])
    }
}

fn ring_of<T: Scalar>(mesh: &Mesh<T>, net: &CurveNetwork, comp: &[usize]) -> BTreeSet<usize> {
    comp.iter()
        .flat_map(|&v| mesh.neighbors(v).iter().copied())
        .filter(|&w| net.contains(w))
        .collect()
}

/// Closed patch faces cut open along the network: every face touching the
/// component, with network edges acting as seams.
struct CutPatch<'a> {
    faces: Vec<&'a Vec<usize>>,
    comp: &'a [usize],
    seams: &'a BTreeSet<(usize, usize)>,
}

impl CutPatch<'_> {
    fn edge_faces(&self) -> BTreeMap<(usize, usize), usize> {
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &self.faces {
            for (a, b) in face_edges(f) {
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        count
    }

    /// V - E + F after splitting each seam edge into one copy per side and
    /// each network vertex into one copy per fan of faces between seams.
    fn euler(&self) -> i64 {
        let count = self.edge_faces();
        let edges: i64 = count
            .iter()
            .map(|(e, &c)| if self.seams.contains(e) { c as i64 } else { 1 })
            .sum();
        let mut around: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f.iter() {
                around.entry(v).or_default().push(fi);
            }
        }
        let mut verts = 0i64;
        for (&v, fs) in &around {
            if self.comp.binary_search(&v).is_ok() {
                verts += 1;
                continue;
            }
            // Fans around a network vertex: faces joined through a non-seam edge at v.
            let mut parent: Vec<usize> = (0..fs.len()).collect();
            fn find(p: &mut [usize], mut i: usize) -> usize {
                while p[i] != i {
                    p[i] = p[p[i]];
                    i = p[i];
                }
                i
            }
            for i in 0..fs.len() {
                for j in i + 1..fs.len() {
                    let shared = self.faces[fs[i]]
                        .iter()
                        .filter(|&&w| w != v && self.faces[fs[j]].contains(&w))
                        .any(|&w| !self.seams.contains(&(v.min(w), v.max(w))));
                    if shared {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
            verts += (0..fs.len()).filter(|&i| find(&mut parent, i) == i).count() as i64;
        }
        verts - edges + self.faces.len() as i64
    }

    /// Ordered closed loops along the patch border: edges with one patch face,
    /// plus seams, which border the patch once per side.
    fn loops(&self) -> Vec<Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(a, b), &c) in &self.edge_faces() {
            let times = if self.seams.contains(&(a, b)) {
                c
            } else {
                usize::from(c == 1)
            };
            for _ in 0..times {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
        for ns in adj.values_mut() {
            ns.sort_unstable();
        }
        let take = |adj: &mut BTreeMap<usize, Vec<usize>>, a: usize, b: usize| {
            let ns = adj.get_mut(&a).unwrap();
            let i = ns.iter().position(|&x| x == b).unwrap();
            ns.remove(i);
        };
        let mut loops = Vec::new();
        while let Some((&start, _)) = adj.iter().find(|(_, ns)| !ns.is_empty()) {
            let mut lp = vec![start];
            let mut cur = start;
            let mut prev = usize::MAX;
            loop {
                let Some(ns) = adj.get(&cur) else { break };
                // Prefer not to turn straight back along the edge just walked.
                let Some(&next) = ns.iter().find(|&&w| w != prev).or_else(|| ns.first()) else {
                    break;
                };
                take(&mut adj, cur, next);
                take(&mut adj, next, cur);
                if next == start {
                    break;
                }
                lp.push(next);
                prev = cur;
                cur = next;
            }
            loops.push(lp);
        }
        loops
    }
}

/// Flood-fills the vertices off the network into components and checks that
/// each closed patch is a disk, i.e. has Euler characteristic 1. The closed
/// patch of a component is every face touching one of its vertices, cut
/// open along network edges.
pub fn extract_components<T: Scalar>(mesh: &Mesh<T>, network: &CurveNetwork) -> Result<Partition> {
    if let Some(&v) = network.vertices.iter().find(|&&v| v >= mesh.vertex_count()) {
        return Err(Error::InvalidInput(format!(
            "network vertex {v} is not in the mesh"
        )));
    }
    if let Some(&s) = network.samples.iter().find(|&&s| !network.contains(s)) {
        return Err(Error::InvalidInput(format!(
            "sample {s} is inside a component, not on the network"
        )));
    }
    let components = mesh.graph().components_where(|v| !network.contains(v));
    let seams = network.edges();
    let mut warnings = Vec::new();
    let mut euler = Vec::with_capacity(components.len());
    let mut component_boundaries = Vec::with_capacity(components.len());

    if !mesh.has_faces() && !components.is_empty() {
        warnings.push("mesh has no faces; patch simple-connectivity not checked".to_string());
    }
    for (c, comp) in components.iter().enumerate() {
        let ring = ring_of(mesh, network, comp);
        if mesh.has_faces() {
            let patch = CutPatch {
                faces: mesh
                    .faces()
                    .iter()
                    .filter(|f| f.iter().any(|v| comp.binary_search(v).is_ok()))
                    .collect(),
                comp,
                seams: &seams,
            };
            let chi = patch.euler();
            if chi != 1 {
                let connected = network.is_connected(mesh.vertex_count());
                return Err(Error::Topology(format!(
                    "component {c} ({} interior vertices, lowest {}) has Euler characteristic {chi}, not 1{}",
                    comp.len(),
                    comp[0],
                    if connected { "" } else { "; the curve network is disconnected" }
                )));
            }
            euler.push(Some(chi));
            component_boundaries.push(patch.loops());
        } else {
            euler.push(None);
            component_boundaries.push(vec![ring.into_iter().collect()]);
        }
    }

    let covered: usize = components.iter().map(Vec::len).sum::<usize>() + network.vertices.len();
    debug_assert_eq!(covered, mesh.vertex_count());
    if covered != mesh.vertex_count() {
        return Err(Error::Topology(
            "components and network do not cover the mesh".into(),
        ));
    }
    Ok(Partition {
        network: network.clone(),
        components,
        component_boundaries,
        euler,
        warnings,
    })
}
