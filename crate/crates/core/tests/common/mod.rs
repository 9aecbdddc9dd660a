//! Brute-force oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use surfharm::{Graph, LevelSequence, QuantizedSamples};

/// Random connected graph: a random spanning tree plus each other pair with probability `p`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn bfs(graph: &Graph, s: usize) -> Vec<Option<u32>> {
    let mut d = vec![None; graph.len()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in graph.neighbors(v) {
            if d[w].is_none() {
                d[w] = Some(d[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    d
}

/// Every assignment of levels `1..=m` to the vertices that matches `fixed`
/// and changes by at most one level along each edge.
pub fn enumerate_gvf(
    graph: &Graph,
    fixed: &BTreeMap<usize, u32>,
    m: u32,
    limit: usize,
) -> Vec<Vec<u32>> {
    fn go(
        v: usize,
        graph: &Graph,
        fixed: &BTreeMap<usize, u32>,
        m: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if v == graph.len() {
            out.push(cur.clone());
            return;
        }
        let choices: Vec<u32> = match fixed.get(&v) {
            Some(&l) => vec![l],
            None => (1..=m).collect(),
        };
        for l in choices {
            let ok = graph
                .neighbors(v)
                .iter()
                .all(|&w| w >= v || cur[w].abs_diff(l) <= 1);
            if ok {
                cur[v] = l;
                go(v + 1, graph, fixed, m, cur, out, limit);
            }
        }
    }
    let mut out = Vec::new();
    go(
        0,
        graph,
        fixed,
        m,
        &mut vec![0; graph.len()],
        &mut out,
        limit,
    );
    out
}

pub fn gvf_exists(graph: &Graph, fixed: &BTreeMap<usize, u32>, m: u32) -> bool {
    !enumerate_gvf(graph, fixed, m, 1).is_empty()
}

pub fn quantized(indices: BTreeMap<usize, u32>, m: u32) -> QuantizedSamples<f64> {
    let levels = LevelSequence::uniform(0.0, 1.0, m as usize).unwrap();
    QuantizedSamples::from_indices(levels, indices).unwrap()
}

/// Random sample assignment on a random subset of vertices.
pub fn random_levels(rng: &mut impl Rng, n: usize, m: u32) -> BTreeMap<usize, u32> {
    let k = rng.gen_range(1..=n);
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    vs[..k].iter().map(|&v| (v, rng.gen_range(1..=m))).collect()
}

/// Harmonic extension by dense Gaussian elimination on the graph Laplacian,
/// built straight from adjacency. Returns unknown values in `unknowns` order.
pub fn dense_harmonic(
    graph: &Graph,
    unknowns: &[usize],
    boundary: &BTreeMap<usize, f64>,
) -> Vec<f64> {
    let n = unknowns.len();
    let row: BTreeMap<usize, usize> = unknowns.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, &u) in unknowns.iter().enumerate() {
        for &w in graph.neighbors(u) {
            if let Some(&j) = row.get(&w) {
                a[i][i] += 1.0;
                a[i][j] -= 1.0;
            } else if let Some(&b) = boundary.get(&w) {
                a[i][i] += 1.0;
                a[i][n] += b;
            }
        }
    }
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap();
        a.swap(c, p);
        assert!(a[c][c].abs() > 1e-12, "singular");
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..=n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Grid graph `nx * ny` with vertex `x + nx * y`.
pub fn grid_graph(nx: usize, ny: usize) -> Graph {
    let mut e = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            let v = x + nx * y;
            if x + 1 < nx {
                e.push((v, v + 1));
            }
            if y + 1 < ny {
                e.push((v, v + nx));
            }
        }
    }
    Graph::from_edges(nx * ny, e).unwrap()
}

pub fn grid_ring(nx: usize, ny: usize) -> Vec<usize> {
    (0..nx * ny)
        .filter(|v| {
            let (x, y) = (v % nx, v / nx);
            x == 0 || y == 0 || x == nx - 1 || y == ny - 1
        })
        .collect()
}

/// A random Dirichlet problem: a grid patch, a sphere-like mesh, or a voxel
/// block, with random boundary values in [-5, 5]. `max_unknowns` caps size.
pub fn random_problem(
    rng: &mut impl Rng,
    max_unknowns: usize,
) -> (Graph, Vec<usize>, BTreeMap<usize, f64>) {
    loop {
        let side = (max_unknowns as f64).sqrt() as usize + 2;
        let cube = (max_unknowns as f64).cbrt() as usize + 2;
        let (graph, mut bverts): (Graph, Vec<usize>) = match rng.gen_range(0..3) {
            0 => {
                let (nx, ny) = (rng.gen_range(3..=side), rng.gen_range(3..=side));
                (grid_graph(nx, ny), grid_ring(nx, ny))
            }
            1 => {
                let mesh = surfharm::shapes::subdivided_octahedron::<f64>(
                    rng.gen_range(1..=if max_unknowns >= 1000 { 4 } else { 3 }),
                );
                let n = mesh.vertex_count();
                let k = rng.gen_range(1..=n / 4);
                let mut vs: Vec<usize> = (0..n).collect();
                vs.shuffle(rng);
                (mesh.graph().clone(), vs[..k].to_vec())
            }
            _ => {
                let d = [
                    rng.gen_range(3..=cube),
                    rng.gen_range(3..=cube),
                    rng.gen_range(3..=cube),
                ];
                let adj = if rng.gen_bool(0.5) {
                    surfharm::Adjacency::Six
                } else {
                    surfharm::Adjacency::TwentySix
                };
                let g = surfharm::VolumeGrid::full(d, adj).unwrap();
                (g.graph(), g.boundary_cells())
            }
        };
        // A few interior pins make the boundary irregular.
        let extra = rng.gen_range(0..4);
        for _ in 0..extra {
            bverts.push(rng.gen_range(0..graph.len()));
        }
        let boundary: BTreeMap<usize, f64> = bverts
            .into_iter()
            .map(|v| (v, rng.gen_range(-5.0..5.0)))
            .collect();
        let unknowns: Vec<usize> = (0..graph.len())
            .filter(|v| !boundary.contains_key(v))
            .collect();
        if !unknowns.is_empty() && unknowns.len() <= max_unknowns {
            return (graph, unknowns, boundary);
        }
    }
}
