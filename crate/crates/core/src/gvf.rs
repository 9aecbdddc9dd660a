//! Gradually varied functions: level quantization, the existence test
//! `d(x, y) >= |i - j|`, and envelope extensions over graphs and cycles.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::field::{FieldDomain, LevelField, LevelSequence, SampleSet, ScalarField};
use crate::graph::Graph;
use crate::metric::DistanceMatrix;
use crate::scalar::Scalar;

/// Samples snapped onto a uniform level chain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedSamples<T> {
    pub levels: LevelSequence<T>,
    /// 1-based level index per sample vertex.
    pub indices: BTreeMap<usize, u32>,
    /// `value - level value` per sample vertex.
    pub residuals: BTreeMap<usize, T>,
}

impl<T: Scalar> QuantizedSamples<T> {
    /// Wraps explicit level indices (no residuals). Indices must lie in `1..=levels.len()`.
    pub fn from_indices(levels: LevelSequence<T>, indices: BTreeMap<usize, u32>) -> Result<Self> {
        if let Some((v, i)) = indices
            .iter()
            .find(|(_, &i)| i == 0 || i as usize > levels.len())
        {
            return Err(Error::InvalidInput(format!(
                "level index {i} at vertex {v} outside 1..={}",
                levels.len()
            )));
        }
        let residuals = indices.keys().map(|&v| (v, T::zero())).collect();
        Ok(QuantizedSamples {
            levels,
            indices,
            residuals,
        })
    }

    pub fn level_count(&self) -> u32 {
        self.levels.len() as u32
    }
}

/// A sample pair breaking `d(x, y) >= |i - j|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub x: usize,
    pub y: usize,
    pub level_gap: u32,
    pub distance: f64,
}

impl Violation {
    pub fn excess(&self) -> f64 {
        self.level_gap as f64 - self.distance
    }

    pub fn into_error(self) -> Error {
        Error::Infeasible {
            x: self.x,
            y: self.y,
            level_gap: self.level_gap,
            distance: self.distance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// The pair with the largest `|i - j| - d(x, y)`, when infeasible.
    pub worst: Option<Violation>,
}

/// Checks the existence condition for a gradually varied extension: every
/// pair of samples must be at least as far apart as their level gap.
/// Pairs at infinite distance impose no constraint.
pub fn gvf_feasible<T: Scalar>(
    quantized: &QuantizedSamples<T>,
    distances: &DistanceMatrix<T>,
) -> Result<Feasibility> {
    let verts: Vec<(usize, u32)> = quantized.indices.iter().map(|(&v, &i)| (v, i)).collect();
    let mut worst: Option<Violation> = None;
    for (a, &(x, ix)) in verts.iter().enumerate() {
        for &(y, iy) in &verts[a + 1..] {
            let d = distances
                .between(x, y)
                .ok_or_else(|| Error::InvalidInput(format!("no distance for samples {x} and {y}")))?
                .as_f64();
            let gap = ix.abs_diff(iy);
            if (gap as f64) > d {
                let v = Violation {
                    x,
                    y,
                    level_gap: gap,
                    distance: d,
                };
                if worst.is_none_or(|w| v.excess() > w.excess()) {
                    worst = Some(v);
                }
            }
        }
    }
    Ok(Feasibility {
        feasible: worst.is_none(),
        worst,
    })
}

/// Snaps samples onto a uniform level chain starting at the smallest sample.
///
/// Without `spacing`, the step is the largest `|f(x) - f(y)| / d(x, y)` over
/// sample pairs (the discrete Lipschitz constant), which makes the result
/// feasible. A user spacing is accepted only if it passes [`gvf_feasible`].
/// Ties between two levels round down.
pub fn quantize<T: Scalar>(
    samples: &SampleSet<T>,
    distances: &DistanceMatrix<T>,
    spacing: Option<T>,
) -> Result<QuantizedSamples<T>> {
    let entries: Vec<(usize, T)> = samples.entries().iter().map(|(&v, &x)| (v, x)).collect();
    for &(v, _) in &entries {
        if distances.between(v, v).is_none() {
            return Err(Error::InvalidInput(format!(
                "distance matrix lacks sample {v}"
            )));
        }
    }
    let lo = entries.iter().map(|e| e.1).fold(T::infinity(), T::min);
    let hi = entries.iter().map(|e| e.1).fold(T::neg_infinity(), T::max);

    match spacing {
        Some(s) => {
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "spacing must be positive, got {s}"
                )));
            }
            let q = snap(&entries, lo, hi, s)?;
            let f = gvf_feasible(&q, distances)?;
            match f.worst {
                Some(v) => Err(v.into_error()),
                None => Ok(q),
            }
        }
        None => {
            let mut s = lipschitz_spacing(&entries, distances, hi - lo);
            // Rounding can push a pair sitting exactly on the bound over it.
            for _ in 0..8 {
                let q = snap(&entries, lo, hi, s)?;
                let f = gvf_feasible(&q, distances)?;
                match f.worst {
                    None => return Ok(q),
                    Some(v) if s >= (hi - lo) * T::of(2.0) => return Err(v.into_error()),
                    Some(_) => s = s * T::of(1.0 + 1e-9),
                }
            }
            let q = snap(&entries, lo, hi, s)?;
            match gvf_feasible(&q, distances)?.worst {
                None => Ok(q),
                Some(v) => Err(v.into_error()),
            }
        }
    }
}

/// `max |f(x) - f(y)| / floor(d(x, y))`; 1 when all samples agree. A pair
/// closer than one unit with different values forces a single level.
fn lipschitz_spacing<T: Scalar>(
    entries: &[(usize, T)],
    distances: &DistanceMatrix<T>,
    range: T,
) -> T {
    let mut s = T::zero();
    for (a, &(x, fx)) in entries.iter().enumerate() {
        for &(y, fy) in &entries[a + 1..] {
            let df = (fx - fy).abs();
            if df == T::zero() {
                continue;
            }
            let d = distances.between(x, y).unwrap_or(T::infinity());
            if !d.is_finite() {
                continue;
            }
            let steps = d.floor();
            let need = if steps >= T::one() {
                df / steps
            } else {
                range * T::of(2.0)
            };
            s = s.max(need);
        }
    }
    if s > T::zero() {
        s
    } else {
        T::one()
    }
}

fn snap<T: Scalar>(entries: &[(usize, T)], lo: T, hi: T, s: T) -> Result<QuantizedSamples<T>> {
    let nearest = |x: T| -> u32 {
        let t = (x - lo) / s;
        let k = t.floor();
        let k = if t - k > T::of(0.5) { k + T::one() } else { k };
        k.to_u32().unwrap_or(u32::MAX) + 1
    };
    let top = nearest(hi);
    if top == u32::MAX || top > 10_000_000 {
        return Err(Error::InvalidInput(format!(
            "spacing {s} yields too many levels for range [{lo}, {hi}]"
        )));
    }
    let levels = LevelSequence::uniform(lo, s, top as usize)?;
    let mut indices = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    for &(v, x) in entries {
        let i = nearest(x);
        indices.insert(v, i);
        residuals.insert(v, x - levels.value(i).expect("index within chain"));
    }
    Ok(QuantizedSamples {
        levels,
        indices,
        residuals,
    })
}

/// Which gradually varied extension to build when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionRule {
    /// `min_j(i_j + d(b, x_j))`: the pointwise largest extension.
    #[default]
    Upper,
    /// `max_j(i_j - d(b, x_j))`: the pointwise smallest extension.
    Lower,
    /// `floor((upper + lower) / 2)`.
    Midpoint,
}

/// Multi-source unit-weight Dijkstra: `min over seeds s of (potential(s) + hops(s, b))`.
fn min_plus_hops(graph: &Graph, seeds: &[(usize, i64)]) -> Vec<Option<i64>> {
    let mut best: Vec<Option<i64>> = vec![None; graph.len()];
    let mut heap = BinaryHeap::new();
    for &(s, p) in seeds {
        if best[s].is_none_or(|b| p < b) {
            best[s] = Some(p);
            heap.push(Reverse((p, s)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if best[v] != Some(d) {
            continue;
        }
        for &w in graph.neighbors(v) {
            if best[w].is_none_or(|b| d + 1 < b) {
                best[w] = Some(d + 1);
                heap.push(Reverse((d + 1, w)));
            }
        }
    }
    best
}

/// Envelope extension of `seeds` over every vertex reachable from them,
/// clamped into `1..=levels`. Produces a gradually varied field that agrees
/// with the seeds whenever the seeds are feasible; no feasibility check here.
pub fn envelope_fill(
    graph: &Graph,
    seeds: &BTreeMap<usize, u32>,
    levels: u32,
    rule: ExtensionRule,
) -> LevelField {
    let n = levels as i64;
    let upper = || {
        let s: Vec<(usize, i64)> = seeds.iter().map(|(&v, &i)| (v, i as i64)).collect();
        min_plus_hops(graph, &s)
    };
    let lower = || {
        // max_j(i_j - d) = -(min_j(-i_j + d))
        let s: Vec<(usize, i64)> = seeds.iter().map(|(&v, &i)| (v, -(i as i64))).collect();
        min_plus_hops(graph, &s)
            .into_iter()
            .map(|x| x.map(|y| -y))
            .collect::<Vec<_>>()
    };
    let values: Vec<Option<i64>> = match rule {
        ExtensionRule::Upper => upper(),
        ExtensionRule::Lower => lower(),
        ExtensionRule::Midpoint => upper()
            .into_iter()
            .zip(lower())
            .map(|(u, l)| Some((u? + l?).div_euclid(2)))
            .collect(),
    };
    let assignment = values
        .into_iter()
        .enumerate()
        .filter_map(|(v, x)| x.map(|x| (v, x.clamp(1, n) as u32)))
        .collect();
    LevelField { assignment }
}

/// Hop distances between sample vertices inside `graph`.
fn sample_hops(graph: &Graph, samples: &[usize]) -> Vec<Vec<Option<u32>>> {
    samples
        .iter()
        .map(|&s| {
            let d = graph.hop_distances([s], |_| true);
            samples.iter().map(|&t| d[t]).collect()
        })
        .collect()
}

/// Gradually varied extension of the quantized samples over the connected
/// component of `graph` that contains them.
pub fn gvf_extend<T: Scalar>(
    graph: &Graph,
    quantized: &QuantizedSamples<T>,
    rule: ExtensionRule,
) -> Result<LevelField> {
    let verts: Vec<usize> = quantized.indices.keys().copied().collect();
    if verts.is_empty() {
        return Err(Error::InvalidInput("no samples to extend".into()));
    }
    if let Some(&v) = verts.iter().find(|&&v| v >= graph.len()) {
        return Err(Error::InvalidInput(format!(
            "sample vertex {v} is not in the graph"
        )));
    }
    let hops = sample_hops(graph, &verts);
    let mut worst: Option<Violation> = None;
    for a in 0..verts.len() {
        for b in a + 1..verts.len() {
            let Some(d) = hops[a][b] else {
                return Err(Error::InvalidInput(format!(
                    "samples {} and {} lie in different components",
                    verts[a], verts[b]
                )));
            };
            let gap = quantized.indices[&verts[a]].abs_diff(quantized.indices[&verts[b]]);
            if gap > d {
                let v = Violation {
                    x: verts[a],
                    y: verts[b],
                    level_gap: gap,
                    distance: d as f64,
                };
                if worst.is_none_or(|w| v.excess() > w.excess()) {
                    worst = Some(v);
                }
            }
        }
    }
    if let Some(v) = worst {
        return Err(v.into_error());
    }
    let field = envelope_fill(graph, &quantized.indices, quantized.level_count(), rule);
    debug_assert!(field.is_gradually_varied(graph));
    Ok(field)
}

/// Gradually varied interpolation around a closed curve given as its vertex
/// sequence (the last vertex connects back to the first).
pub fn gvf_on_cycle<T: Scalar>(
    cycle: &[usize],
    quantized: &QuantizedSamples<T>,
    rule: ExtensionRule,
) -> Result<LevelField> {
    if cycle.len() < 3 {
        return Err(Error::InvalidInput(
            "a closed curve needs at least three vertices".into(),
        ));
    }
    let local: BTreeMap<usize, usize> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if local.len() != cycle.len() {
        return Err(Error::InvalidInput(
            "curve revisits a vertex; it is not simple".into(),
        ));
    }
    let mut local_indices = BTreeMap::new();
    for (&v, &i) in &quantized.indices {
        let &p = local
            .get(&v)
            .ok_or_else(|| Error::InvalidInput(format!("sample vertex {v} is not on the curve")))?;
        local_indices.insert(p, i);
    }
    let q = QuantizedSamples::from_indices(quantized.levels.clone(), local_indices)?;
    let field = gvf_extend(&Graph::cycle(cycle.len()), &q, rule).map_err(|e| match e {
        Error::Infeasible {
            x,
            y,
            level_gap,
            distance,
        } => Error::Infeasible {
            x: cycle[x],
            y: cycle[y],
            level_gap,
            distance,
        },
        e => e,
    })?;
    Ok(LevelField {
        assignment: field
            .assignment
            .into_iter()
            .map(|(p, i)| (cycle[p], i))
            .collect(),
    })
}

/// Maps level indices to their real values.
pub fn realize_levels<T: Scalar>(
    field: &LevelField,
    levels: &LevelSequence<T>,
    domain: FieldDomain,
) -> Result<ScalarField<T>> {
    let values = field
        .assignment
        .iter()
        .map(|(&v, &i)| {
            levels.value(i).map(|x| (v, x)).ok_or_else(|| {
                Error::InvalidInput(format!("level index {i} at vertex {v} out of range"))
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScalarField::new(domain, values))
}
