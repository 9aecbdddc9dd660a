//! Surface meshes: vertex positions, polygonal faces and the derived edge graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

/// A discrete surface: a graph over vertices `0..n`, optionally with 3D
/// positions and faces. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    positions: Option<Vec<[T; 3]>>,
    faces: Vec<Vec<usize>>,
    graph: Graph,
}

impl<T: Scalar> Mesh<T> {
    /// Builds a mesh from polygonal faces, deriving edges from face boundaries.
    /// Every edge may border at most two faces.
    pub fn from_faces(
        vertex_count: usize,
        positions: Option<Vec<[T; 3]>>,
        faces: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if let Some(p) = &positions {
            if p.len() != vertex_count {
                return Err(Error::InvalidMesh(format!(
                    "{} positions for {vertex_count} vertices",
                    p.len()
                )));
            }
            if p.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMesh("non-finite vertex position".into()));
            }
        }
        let mut edge_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (fi, face) in faces.iter().enumerate() {
            validate_face(fi, face, vertex_count)?;
            for (a, b) in face_edges(face) {
                *edge_faces.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some((&(a, b), _)) = edge_faces.iter().find(|(_, &c)| c > 2) {
            return Err(Error::NonManifoldEdge(a, b));
        }
        let graph = Graph::from_edges(vertex_count, edge_faces.into_keys())?;
        Ok(Mesh {
            positions,
            faces,
            graph,
        })
    }

    /// Builds a face-less mesh from an explicit edge list.
    pub fn from_edges(
        vertex_count: usize,
        positions: Option<Vec<[T; 3]>>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if let Some(p) = &positions {
            if p.len() != vertex_count {
                return Err(Error::InvalidMesh(format!(
                    "{} positions for {vertex_count} vertices",
                    p.len()
                )));
            }
        }
        let graph = Graph::from_edges(vertex_count, edges).map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidMesh(m),
            e => e,
        })?;
        Ok(Mesh {
            positions,
            faces: Vec::new(),
            graph,
        })
    }

    pub fn from_graph(graph: Graph) -> Self {
        Mesh {
            positions: None,
            faces: Vec::new(),
            graph,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn has_faces(&self) -> bool {
        !self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn positions(&self) -> Option<&[[T; 3]]> {
        self.positions.as_deref()
    }

    pub fn position(&self, v: usize) -> Option<[T; 3]> {
        self.positions.as_ref().map(|p| p[v])
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.graph.neighbors(v)
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            let n = self.graph.components_where(|_| true).len();
            Err(Error::InvalidMesh(format!(
                "mesh graph has {n} connected components, expected 1"
            )))
        }
    }

    /// Euclidean length of edge `(a, b)`; `None` without positions.
    pub fn edge_length(&self, a: usize, b: usize) -> Option<T> {
        let p = self.positions.as_ref()?;
        let (pa, pb) = (p[a], p[b]);
        Some(
            (0..3)
                .map(|k| (pa[k] - pb[k]) * (pa[k] - pb[k]))
                .sum::<T>()
                .sqrt(),
        )
    }

    /// `V - E + F` of the sub-complex formed by every face whose vertices all
    /// lie in `subset`, together with those faces' edges and vertices.
    pub fn euler_characteristic(&self, subset: &BTreeSet<usize>) -> Result<i64> {
        self.euler_characteristic_where(|face| face.iter().all(|v| subset.contains(v)))
    }

    /// `V - E + F` of the faces selected by `keep`, with their edges and vertices.
    pub fn euler_characteristic_where(&self, keep: impl Fn(&[usize]) -> bool) -> Result<i64> {
        if self.faces.is_empty() {
            return Err(Error::Unsupported(
                "Euler characteristic needs a mesh with faces".into(),
            ));
        }
        let mut verts = BTreeSet::new();
        let mut edges = BTreeSet::new();
        let mut f = 0i64;
        for face in &self.faces {
            if keep(face) {
                f += 1;
                verts.extend(face.iter().copied());
                edges.extend(face_edges(face).map(|(a, b)| (a.min(b), a.max(b))));
            }
        }
        Ok(verts.len() as i64 - edges.len() as i64 + f)
    }

    /// Euler characteristic of the whole mesh.
    pub fn euler_characteristic_all(&self) -> Result<i64> {
        self.euler_characteristic(&(0..self.vertex_count()).collect())
    }

    pub fn load(path: impl AsRef<Path>, format: MeshFormat) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match format {
            MeshFormat::Off => Self::parse_off(&text),
            MeshFormat::Obj => Self::parse_obj(&text),
        }
    }

    /// Parses OFF text: `OFF`, a `V F E` counts line, V position lines and F
    /// face lines `k i1 .. ik`. Blank lines and `#` comments are skipped.
    pub fn parse_off(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
        let mut header_rest = match header.strip_prefix("OFF") {
            Some(rest) => rest.trim().to_string(),
            None => return Err(Error::parse(line_no, "expected OFF header")),
        };
        let counts_line = if header_rest.is_empty() {
            let (n, l) = lines
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing counts line"))?;
            header_rest = l.to_string();
            n
        } else {
            line_no
        };
        let counts: Vec<usize> = header_rest
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(counts_line, "counts line must be integers `V F E`"))?;
        if counts.len() < 2 {
            return Err(Error::parse(counts_line, "counts line must be `V F E`"));
        }
        let (nv, nf) = (counts[0], counts[1]);

        let mut positions = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (n, l) = lines
                .next()
                .ok_or_else(|| Error::parse(counts_line, format!("expected {nv} vertex lines")))?;
            positions.push(parse_xyz(n, l.split_whitespace())?);
        }
        let mut faces = Vec::with_capacity(nf);
        for fi in 0..nf {
            let (n, l) = lines
                .next()
                .ok_or_else(|| Error::parse(counts_line, format!("expected {nf} face lines")))?;
            let toks: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(n, format!("face {fi}: non-integer token")))?;
            let (&k, rest) = toks
                .split_first()
                .ok_or_else(|| Error::parse(n, format!("face {fi}: empty line")))?;
            if rest.len() < k {
                return Err(Error::parse(n, format!("face {fi}: expected {k} indices")));
            }
            let face = rest[..k].to_vec();
            if let Some(&bad) = face.iter().find(|&&v| v >= nv) {
                return Err(Error::parse(
                    n,
                    format!("face {fi} references vertex {bad} but only {nv} vertices exist"),
                ));
            }
            faces.push(face);
        }
        Self::from_faces(nv, Some(positions), faces)
    }

    /// Parses the `v x y z` and `f i j k ..` (1-based) subset of OBJ.
    pub fn parse_obj(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        let mut raw_faces = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("v") => positions.push(parse_xyz(n, toks)?),
                Some("f") => {
                    let face: Vec<usize> = toks
                        .map(|t| {
                            t.split('/')
                                .next()
                                .and_then(|s| s.parse::<usize>().ok())
                                .filter(|&k| k >= 1)
                                .map(|k| k - 1)
                                .ok_or_else(|| Error::parse(n, format!("bad face index `{t}`")))
                        })
                        .collect::<Result<_>>()?;
                    raw_faces.push((n, face));
                }
                Some(other) => log::warn!("line {n}: ignoring OBJ directive `{other}`"),
                None => {}
            }
        }
        let nv = positions.len();
        let mut faces = Vec::with_capacity(raw_faces.len());
        for (fi, (n, face)) in raw_faces.into_iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&v| v >= nv) {
                return Err(Error::parse(
                    n,
                    format!(
                        "face {fi} references vertex {} but only {nv} vertices exist",
                        bad + 1
                    ),
                ));
            }
            faces.push(face);
        }
        Self::from_faces(nv, Some(positions), faces)
    }

    /// OFF text with positions printed in shortest round-trip form.
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(
            s,
            "{} {} {}",
            self.vertex_count(),
            self.faces.len(),
            self.edge_count()
        );
        for v in 0..self.vertex_count() {
            let p = self.position(v).unwrap_or([T::zero(); 3]);
            let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
        }
        for face in &self.faces {
            let _ = write!(s, "{}", face.len());
            for v in face {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn save_off(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_off()).map_err(|e| Error::io(path, e))
    }
}

fn parse_xyz<'a, T: Scalar>(line: usize, toks: impl Iterator<Item = &'a str>) -> Result<[T; 3]> {
    let vals: Vec<f64> = toks
        .take(3)
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(line, "vertex coordinates must be numbers"))?;
    if vals.len() != 3 {
        return Err(Error::parse(line, "vertex needs three coordinates"));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::parse(line, "non-finite vertex coordinate"));
    }
    Ok([T::of(vals[0]), T::of(vals[1]), T::of(vals[2])])
}

fn validate_face(fi: usize, face: &[usize], n: usize) -> Result<()> {
    if face.len() < 3 {
        return Err(Error::InvalidMesh(format!(
            "face {fi} has fewer than 3 vertices"
        )));
    }
    if let Some(&bad) = face.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidMesh(format!(
            "face {fi} references vertex {bad} but only {n} vertices exist"
        )));
    }
    let distinct: BTreeSet<_> = face.iter().collect();
    if distinct.len() != face.len() {
        return Err(Error::InvalidMesh(format!("face {fi} repeats a vertex")));
    }
    Ok(())
}

/// Consecutive vertex pairs around a face, including the closing pair.
pub(crate) fn face_edges(face: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..face.len()).map(move |i| (face[i], face[(i + 1) % face.len()]))
}
