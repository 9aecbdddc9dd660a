//! Procedural meshes used by fixtures and tests.

use std::collections::BTreeMap;

use crate::mesh::Mesh;
use crate::scalar::Scalar;

/// Unit octahedron. Vertex 0 is the north pole, 1..=4 the equator in
/// counter-clockwise order, 5 the south pole.
pub fn octahedron<T: Scalar>() -> Mesh<T> {
    let p = |x: f64, y: f64, z: f64| [T::of(x), T::of(y), T::of(z)];
    let positions = vec![
        p(0.0, 0.0, 1.0),
        p(1.0, 0.0, 0.0),
        p(0.0, 1.0, 0.0),
        p(-1.0, 0.0, 0.0),
        p(0.0, -1.0, 0.0),
        p(0.0, 0.0, -1.0),
    ];
    let faces = vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 1],
        vec![5, 2, 1],
        vec![5, 3, 2],
        vec![5, 4, 3],
        vec![5, 1, 4],
    ];
    Mesh::from_faces(6, Some(positions), faces).expect("octahedron is a valid mesh")
}

/// Octahedron with `levels` rounds of 1-to-4 midpoint subdivision, new
/// vertices pushed onto the unit sphere. Vertex counts: 6, 18, 66, 258, ...
pub fn subdivided_octahedron<T: Scalar>(levels: usize) -> Mesh<T> {
    let base = octahedron::<f64>();
    let mut positions: Vec<[f64; 3]> = base.positions().unwrap().to_vec();
    let mut faces: Vec<[usize; 3]> = base.faces().iter().map(|f| [f[0], f[1], f[2]]).collect();
    for _ in 0..levels {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let mut m = |u: usize, v: usize| {
                *mid.entry((u.min(v), u.max(v))).or_insert_with(|| {
                    let (pu, pv) = (positions[u], positions[v]);
                    let q = [
                        (pu[0] + pv[0]) / 2.0,
                        (pu[1] + pv[1]) / 2.0,
                        (pu[2] + pv[2]) / 2.0,
                    ];
                    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
                    positions.push([q[0] / n, q[1] / n, q[2] / n]);
                    positions.len() - 1
                })
            };
            let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        faces = next;
    }
    let n = positions.len();
    let positions = positions
        .into_iter()
        .map(|p| [T::of(p[0]), T::of(p[1]), T::of(p[2])])
        .collect();
    Mesh::from_faces(
        n,
        Some(positions),
        faces.into_iter().map(Vec::from).collect(),
    )
    .expect("subdivision preserves manifoldness")
}

/// Planar `nx` by `ny` vertex grid with quad faces; vertex `x + nx * y` sits at `(x, y, 0)`.
pub fn grid<T: Scalar>(nx: usize, ny: usize) -> Mesh<T> {
    assert!(nx >= 2 && ny >= 2);
    let id = |x: usize, y: usize| x + nx * y;
    let positions = (0..ny)
        .flat_map(|y| (0..nx).map(move |x| [T::count(x), T::count(y), T::zero()]))
        .collect();
    let mut faces = Vec::new();
    for y in 0..ny - 1 {
        for x in 0..nx - 1 {
            faces.push(vec![id(x, y), id(x + 1, y), id(x + 1, y + 1), id(x, y + 1)]);
        }
    }
    Mesh::from_faces(nx * ny, Some(positions), faces).expect("grid is a valid mesh")
}

/// Quad torus with `n` by `m` vertices (both at least 3).
pub fn torus<T: Scalar>(n: usize, m: usize) -> Mesh<T> {
    assert!(n >= 3 && m >= 3);
    let id = |i: usize, j: usize| (i % n) + n * (j % m);
    let (big, small) = (2.0, 0.75);
    let mut positions = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            let u = std::f64::consts::TAU * i as f64 / n as f64;
            let v = std::f64::consts::TAU * j as f64 / m as f64;
            let r = big + small * v.cos();
            positions.push([
                T::of(r * u.cos()),
                T::of(r * u.sin()),
                T::of(small * v.sin()),
            ]);
        }
    }
    let mut faces = Vec::new();
    for j in 0..m {
        for i in 0..n {
            faces.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh::from_faces(n * m, Some(positions), faces).expect("torus is a valid mesh")
}
