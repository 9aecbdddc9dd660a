//! Sample sets, level chains and the fields defined over vertices or cells.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Known values at guiding vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    entries: BTreeMap<usize, T>,
}

impl<T: Scalar> SampleSet<T> {
    /// Validates that every key is below `vertex_count`, values are finite and
    /// the set is non-empty.
    pub fn new(entries: BTreeMap<usize, T>, vertex_count: usize) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("sample set is empty".into()));
        }
        if let Some((&v, _)) = entries.iter().find(|(&v, _)| v >= vertex_count) {
            return Err(Error::InvalidInput(format!(
                "sample vertex {v} is not in the mesh ({vertex_count} vertices)"
            )));
        }
        if let Some((&v, _)) = entries.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample at vertex {v} is not finite"
            )));
        }
        Ok(SampleSet { entries })
    }

    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (usize, T)>,
        vertex_count: usize,
    ) -> Result<Self> {
        Self::new(pairs.into_iter().collect(), vertex_count)
    }

    pub fn load(path: impl AsRef<Path>, vertex_count: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::new(parse_index_value_csv(&text)?, vertex_count)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<usize, T> {
        &self.entries
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, v: usize) -> Option<T> {
        self.entries.get(&v).copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.entries.contains_key(&v)
    }
}

/// Parses `index,value` lines; `#` starts a comment line.
pub fn parse_index_value_csv<T: Scalar>(text: &str) -> Result<BTreeMap<usize, T>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 1, "expected `index,value`"))?;
        let idx: usize = a
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("bad index `{}`", a.trim())))?;
        let val: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("bad value `{}`", b.trim())))?;
        if out.insert(idx, T::of(val)).is_some() {
            return Err(Error::parse(i + 1, format!("index {idx} listed twice")));
        }
    }
    Ok(out)
}

/// Strictly increasing level chain `A_1 < ... < A_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSequence<T> {
    levels: Vec<T>,
    spacing: T,
}

impl<T: Scalar> LevelSequence<T> {
    pub fn new(levels: Vec<T>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("level sequence is empty".into()));
        }
        if levels.iter().any(|l| !l.is_finite()) || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "levels must be finite and strictly increasing".into(),
            ));
        }
        let spacing = if levels.len() > 1 {
            levels[1] - levels[0]
        } else {
            T::one()
        };
        Ok(LevelSequence { levels, spacing })
    }

    /// `count` levels `start, start + spacing, ...`.
    pub fn uniform(start: T, spacing: T, count: usize) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::InvalidInput(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let levels = (0..count).map(|k| start + spacing * T::count(k)).collect();
        let mut seq = Self::new(levels)?;
        seq.spacing = spacing;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// Value of the 1-based level `index`.
    pub fn value(&self, index: u32) -> Option<T> {
        (index as usize)
            .checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .copied()
    }
}

/// 1-based level index per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LevelField {
    pub assignment: BTreeMap<usize, u32>,
}

impl LevelField {
    pub fn get(&self, v: usize) -> Option<u32> {
        self.assignment.get(&v).copied()
    }

    /// Whether every edge of `graph` with both ends assigned changes by at most one level.
    pub fn is_gradually_varied(&self, graph: &Graph) -> bool {
        graph
            .edges()
            .all(|(a, b)| match (self.get(a), self.get(b)) {
                (Some(x), Some(y)) => x.abs_diff(y) <= 1,
                _ => true,
            })
    }
}

/// What a field's keys index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldDomain {
    SurfaceVertices,
    CurveVertices,
    VolumeCells,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub domain: FieldDomain,
    pub values: BTreeMap<usize, T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(domain: FieldDomain, values: BTreeMap<usize, T>) -> Self {
        ScalarField { domain, values }
    }

    pub fn get(&self, k: usize) -> Option<T> {
        self.values.get(&k).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.values().all(|v| v.is_finite())
    }

    /// `index,value` lines in index order, values with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k},{:.16e}", v.as_f64());
        }
        s
    }

    pub fn from_csv(domain: FieldDomain, text: &str) -> Result<Self> {
        Ok(ScalarField::new(domain, parse_index_value_csv(text)?))
    }
}
