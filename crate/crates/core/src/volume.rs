//! Voxelized solids: occupancy grids with boundary/interior classification.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Which cells count as adjacent when solving over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Adjacency {
    /// Shared face.
    #[default]
    Six,
    /// Shared face, edge or corner.
    TwentySix,
}

impl Adjacency {
    pub fn max_neighbors(self) -> usize {
        match self {
            Adjacency::Six => 6,
            Adjacency::TwentySix => 26,
        }
    }

    fn offsets(self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        for dz in -1..=1i64 {
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let taxi = dx.abs() + dy.abs() + dz.abs();
                    let keep = match self {
                        Adjacency::Six => taxi == 1,
                        Adjacency::TwentySix => taxi >= 1,
                    };
                    if keep {
                        out.push([dx, dy, dz]);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Empty,
    /// Occupied, with at least one face-neighbor empty or outside the grid.
    Boundary,
    Interior,
}

/// Occupancy grid with cells indexed `x + nx * (y + ny * z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeGrid {
    dims: [usize; 3],
    occupancy: Vec<bool>,
    adjacency: Adjacency,
    class: Vec<CellClass>,
}

impl VolumeGrid {
    pub fn new(dims: [usize; 3], occupancy: Vec<bool>, adjacency: Adjacency) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidVolume(format!(
                "dimensions must be positive, got {dims:?}"
            )));
        }
        let n = dims[0] * dims[1] * dims[2];
        if occupancy.len() != n {
            return Err(Error::InvalidVolume(format!(
                "{}x{}x{} grid needs {n} cells, got {}",
                dims[0],
                dims[1],
                dims[2],
                occupancy.len()
            )));
        }
        if !occupancy.iter().any(|&o| o) {
            return Err(Error::InvalidVolume("no occupied cells".into()));
        }
        let mut grid = VolumeGrid {
            dims,
            occupancy,
            adjacency,
            class: Vec::new(),
        };
        grid.class = grid.classify();
        Ok(grid)
    }

    pub fn full(dims: [usize; 3], adjacency: Adjacency) -> Result<Self> {
        Self::new(dims, vec![true; dims.iter().product()], adjacency)
    }

    /// Occupancy from a predicate on `(x, y, z)`.
    pub fn from_fn(
        dims: [usize; 3],
        adjacency: Adjacency,
        occupied: impl Fn(usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let mut occ = Vec::with_capacity(dims.iter().product());
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    occ.push(occupied(x, y, z));
                }
            }
        }
        Self::new(dims, occ, adjacency)
    }

    pub fn with_adjacency(mut self, adjacency: Adjacency) -> Self {
        self.adjacency = adjacency;
        self
    }

    /// Parses `VOX nx ny nz` followed by `nx*ny*nz` 0/1 tokens, x fastest.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.lines().enumerate().flat_map(|(i, l)| {
            l.split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .map(move |t| (i + 1, t))
        });
        match tokens.next() {
            Some((_, "VOX")) => {}
            Some((line, _)) => return Err(Error::parse(line, "expected VOX header")),
            None => return Err(Error::parse(1, "empty file")),
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let (line, tok) = tokens
                .next()
                .ok_or_else(|| Error::parse(1, "header must be `VOX nx ny nz`"))?;
            *d = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad dimension `{tok}`")))?;
        }
        let mut occ = Vec::new();
        for (line, tok) in tokens {
            match tok {
                "0" => occ.push(false),
                "1" => occ.push(true),
                _ => return Err(Error::parse(line, format!("expected 0 or 1, got `{tok}`"))),
            }
        }
        Self::new(dims, occ, Adjacency::Six)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_vox(&self) -> String {
        let [nx, ny, nz] = self.dims;
        let mut s = format!("VOX {nx} {ny} {nz}\n");
        for row in self.occupancy.chunks(nx) {
            let line: Vec<&str> = row.iter().map(|&o| if o { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }

    pub fn cell_count(&self) -> usize {
        self.occupancy.len()
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn coords(&self, i: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [i % nx, (i / nx) % ny, i / (nx * ny)]
    }

    pub fn is_occupied(&self, i: usize) -> bool {
        self.occupancy[i]
    }

    pub fn class(&self, i: usize) -> CellClass {
        self.class[i]
    }

    pub fn occupied_cells(&self) -> Vec<usize> {
        (0..self.cell_count())
            .filter(|&i| self.occupancy[i])
            .collect()
    }

    pub fn boundary_cells(&self) -> Vec<usize> {
        self.cells_of(CellClass::Boundary)
    }

    pub fn interior_cells(&self) -> Vec<usize> {
        self.cells_of(CellClass::Interior)
    }

    fn cells_of(&self, c: CellClass) -> Vec<usize> {
        (0..self.cell_count())
            .filter(|&i| self.class[i] == c)
            .collect()
    }

    fn offset_cell(&self, i: usize, d: [i64; 3]) -> Option<usize> {
        let c = self.coords(i);
        let mut out = [0usize; 3];
        for k in 0..3 {
            let v = c[k] as i64 + d[k];
            if v < 0 || v >= self.dims[k] as i64 {
                return None;
            }
            out[k] = v as usize;
        }
        Some(self.index(out[0], out[1], out[2]))
    }

    fn classify(&self) -> Vec<CellClass> {
        let faces = Adjacency::Six.offsets();
        (0..self.cell_count())
            .map(|i| {
                if !self.occupancy[i] {
                    CellClass::Empty
                } else if faces
                    .iter()
                    .all(|&d| self.offset_cell(i, d).is_some_and(|j| self.occupancy[j]))
                {
                    CellClass::Interior
                } else {
                    CellClass::Boundary
                }
            })
            .collect()
    }

    /// Occupied neighbors of cell `i` under the grid's adjacency mode, ascending.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .adjacency
            .offsets()
            .into_iter()
            .filter_map(|d| self.offset_cell(i, d))
            .filter(|&j| self.occupancy[j])
            .collect();
        out.sort_unstable();
        out
    }

    /// Adjacency graph over all cell indices; empty cells are isolated.
    pub fn graph(&self) -> Graph {
        let offsets = self.adjacency.offsets();
        let mut edges = Vec::new();
        for i in 0..self.cell_count() {
            if !self.occupancy[i] {
                continue;
            }
            for &d in &offsets {
                if let Some(j) = self.offset_cell(i, d) {
                    if j > i && self.occupancy[j] {
                        edges.push((i, j));
                    }
                }
            }
        }
        Graph::from_edges(self.cell_count(), edges).expect("grid edges are simple")
    }

    /// Cell center in grid units: cell `(x, y, z)` sits at `(x, y, z)`.
    pub fn center(&self, i: usize) -> [f64; 3] {
        let c = self.coords(i);
        [c[0] as f64, c[1] as f64, c[2] as f64]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_grids_classify() {
        let g = VolumeGrid::full([3, 3, 3], Adjacency::Six).unwrap();
        assert_eq!(g.boundary_cells().len(), 26);
        assert_eq!(g.interior_cells(), vec![g.index(1, 1, 1)]);

        let g = VolumeGrid::full([1, 1, 1], Adjacency::Six).unwrap();
        assert_eq!((g.boundary_cells().len(), g.interior_cells().len()), (1, 0));
    }

    #[test]
    fn four_cube_has_eight_interior_cells() {
        // Brute force: a cell is interior iff all six face-neighbors are in range.
        let g = VolumeGrid::full([4, 4, 4], Adjacency::Six).unwrap();
        let mut expected = 0;
        for z in 0..4 {
            for y in 0..4 {
                for x in 0..4 {
                    if (1..3).contains(&x) && (1..3).contains(&y) && (1..3).contains(&z) {
                        expected += 1;
                    }
                }
            }
        }
        assert_eq!(expected, 8);
        assert_eq!(g.interior_cells().len(), expected);
    }

    #[test]
    fn classification_is_exhaustive_and_disjoint() {
        let g = VolumeGrid::from_fn([5, 4, 3], Adjacency::Six, |x, y, _| x < 3 || y < 2).unwrap();
        let b = g.boundary_cells();
        let i = g.interior_cells();
        assert!(b.iter().all(|c| !i.contains(c)));
        let mut all: Vec<_> = b.iter().chain(&i).copied().collect();
        all.sort_unstable();
        assert_eq!(all, g.occupied_cells());
    }

    #[test]
    fn neighbor_counts_are_bounded() {
        for mode in [Adjacency::Six, Adjacency::TwentySix] {
            let g = VolumeGrid::full([3, 3, 3], mode).unwrap();
            let max = (0..27).map(|i| g.neighbors(i).len()).max().unwrap();
            assert_eq!(max, mode.max_neighbors());
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            VolumeGrid::parse("VOX 2 2 2\n1 1 1\n"),
            Err(Error::InvalidVolume(_))
        ));
        assert!(matches!(
            VolumeGrid::parse("VOX 1 1 2\n0 0\n"),
            Err(Error::InvalidVolume(_))
        ));
        assert!(VolumeGrid::parse("VOX 1 1 1\n2\n").is_err());
        let g = VolumeGrid::parse("VOX 2 1 1\n1 0\n").unwrap();
        assert_eq!(VolumeGrid::parse(&g.to_vox()).unwrap(), g);
    }
}
