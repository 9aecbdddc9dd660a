//! Discrete Dirichlet problems: assembly of the graph Laplacian system and
//! three ways to solve it (in-place relaxation, conjugate gradients, dense
//! elimination).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldDomain, ScalarField};
use crate::graph::Graph;
use crate::scalar::{max_of, min_of, Scalar};
use crate::volume::VolumeGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot<T> {
    Unknown(usize),
    Known(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term<T> {
    vertex: usize,
    slot: Slot<T>,
}

/// Unknown vertices `x_1 .. x_N` with fixed values on their remaining neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletProblem<T> {
    unknowns: Vec<usize>,
    boundary: BTreeMap<usize, T>,
    rows: Vec<Vec<Term<T>>>,
}

impl<T: Scalar> DirichletProblem<T> {
    /// Sets up the problem on `graph`. Neighbors that are neither unknown nor
    /// in `boundary` are outside the domain and ignored.
    ///
    /// Rejects overlapping unknown/boundary sets, non-finite boundary values,
    /// unknowns without neighbors and unknowns with no path to the boundary.
    pub fn new(
        graph: &Graph,
        unknowns: impl IntoIterator<Item = usize>,
        boundary: BTreeMap<usize, T>,
    ) -> Result<Self> {
        let unknowns: Vec<usize> = unknowns
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if let Some(&v) = unknowns
            .iter()
            .chain(boundary.keys())
            .find(|&&v| v >= graph.len())
        {
            return Err(Error::InvalidInput(format!(
                "vertex {v} is outside the domain graph"
            )));
        }
        if let Some(&v) = unknowns.iter().find(|v| boundary.contains_key(v)) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} is both unknown and a boundary vertex"
            )));
        }
        if let Some((&v, _)) = boundary.iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "boundary value at {v} is not finite"
            )));
        }
        let row_of: BTreeMap<usize, usize> =
            unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rows = Vec::with_capacity(unknowns.len());
        for &u in &unknowns {
            let terms: Vec<Term<T>> = graph
                .neighbors(u)
                .iter()
                .filter_map(|&w| {
                    let slot = match (row_of.get(&w), boundary.get(&w)) {
                        (Some(&r), _) => Slot::Unknown(r),
                        (None, Some(&x)) => Slot::Known(x),
                        (None, None) => return None,
                    };
                    Some(Term { vertex: w, slot })
                })
                .collect();
            if terms.is_empty() {
                return Err(Error::Singular(format!(
                    "unknown vertex {u} has no neighbors"
                )));
            }
            rows.push(terms);
        }

        // Every unknown must reach a boundary value.
        let mut reached = vec![false; unknowns.len()];
        let mut queue: VecDeque<usize> = (0..unknowns.len())
            .filter(|&i| rows[i].iter().any(|t| matches!(t.slot, Slot::Known(_))))
            .collect();
        for &i in &queue {
            reached[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for t in &rows[i] {
                if let Slot::Unknown(j) = t.slot {
                    if !reached[j] {
                        reached[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if let Some(i) = reached.iter().position(|r| !r) {
            return Err(Error::Singular(format!(
                "unknown vertex {} is not connected to any boundary vertex",
                unknowns[i]
            )));
        }
        Ok(DirichletProblem {
            unknowns,
            boundary,
            rows,
        })
    }

    /// Every vertex of `graph` not in `boundary` is unknown.
    pub fn complement(graph: &Graph, boundary: BTreeMap<usize, T>) -> Result<Self> {
        let unknowns: Vec<usize> = (0..graph.len())
            .filter(|v| !boundary.contains_key(v))
            .collect();
        Self::new(graph, unknowns, boundary)
    }

    pub fn unknowns(&self) -> &[usize] {
        &self.unknowns
    }

    pub fn boundary(&self) -> &BTreeMap<usize, T> {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// Number of in-domain neighbors of unknown row `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    /// Boundary values adjacent to at least one unknown (all of them if none are).
    fn active_boundary(&self) -> Vec<T> {
        let vals: Vec<T> = self
            .rows
            .iter()
            .flatten()
            .filter_map(|t| match t.slot {
                Slot::Known(x) => Some(x),
                Slot::Unknown(_) => None,
            })
            .collect();
        if vals.is_empty() {
            self.boundary.values().copied().collect()
        } else {
            vals
        }
    }

    /// Smallest and largest boundary value seen by the unknowns.
    pub fn boundary_range(&self) -> Option<(T, T)> {
        let vals = self.active_boundary();
        Some((min_of(vals.iter().copied())?, max_of(vals.iter().copied())?))
    }

    fn mean_at(&self, i: usize, x: &[T]) -> T {
        let row = &self.rows[i];
        let sum: T = row
            .iter()
            .map(|t| match t.slot {
                Slot::Unknown(j) => x[j],
                Slot::Known(v) => v,
            })
            .sum();
        sum / T::count(row.len())
    }

    /// Max over unknowns of `|x_i - mean of neighbors|`.
    pub fn residual_of(&self, x: &[T]) -> T {
        (0..self.len())
            .map(|i| (x[i] - self.mean_at(i, x)).abs())
            .fold(T::zero(), T::max)
    }

    /// Dirichlet energy: sum of squared differences over every edge that
    /// touches an unknown.
    pub fn energy_of(&self, x: &[T]) -> T {
        let mut e = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for t in row {
                let d = match t.slot {
                    Slot::Unknown(j) if j > i => x[i] - x[j],
                    Slot::Unknown(_) => continue,
                    Slot::Known(v) => x[i] - v,
                };
                e = e + d * d;
            }
        }
        e
    }

    /// Field over unknowns and boundary from per-row unknown values.
    pub fn field_from(&self, x: &[T], domain: FieldDomain) -> ScalarField<T> {
        let mut values = self.boundary.clone();
        values.extend(self.unknowns.iter().copied().zip(x.iter().copied()));
        ScalarField::new(domain, values)
    }
}

/// Sparse system `A x = C` with one row per unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    pub n: usize,
    /// Row entries `(column, coefficient)` sorted by column, diagonal included.
    pub rows: Vec<Vec<(usize, T)>>,
    pub rhs: Vec<T>,
    /// Row `i` solves for vertex `index_map[i]`.
    pub index_map: Vec<usize>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn diagonal(&self, i: usize) -> T {
        self.rows[i]
            .iter()
            .find(|&&(c, _)| c == i)
            .map_or(T::zero(), |&(_, a)| a)
    }

    pub fn coefficient(&self, i: usize, j: usize) -> T {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map_or(T::zero(), |k| self.rows[i][k].1)
    }

    pub fn multiply(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * x[c]).sum())
            .collect()
    }

    /// Checks that the diagonal is the integer degree, off-diagonals are 0 or
    /// -1, the matrix is symmetric and diagonally dominant.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Singular(m));
        if self.rows.len() != self.n || self.rhs.len() != self.n || self.index_map.len() != self.n {
            return fail("system dimensions disagree".into());
        }
        for (i, row) in self.rows.iter().enumerate() {
            let diag = self.diagonal(i);
            let mut off = T::zero();
            let mut neighbours = 0usize;
            for &(j, a) in row {
                if j == i {
                    continue;
                }
                if a != -T::one() {
                    return fail(format!("a[{i}][{j}] = {a}, expected -1"));
                }
                if self.coefficient(j, i) != a {
                    return fail(format!("a[{i}][{j}] != a[{j}][{i}]"));
                }
                off = off + a.abs();
                neighbours += 1;
            }
            if diag != diag.round() || diag < T::one() {
                return fail(format!(
                    "a[{i}][{i}] = {diag} is not a positive integer degree"
                ));
            }
            if diag < off || neighbours > diag.to_usize().unwrap_or(0) {
                return fail(format!("row {i} is not diagonally dominant"));
            }
        }
        Ok(())
    }
}

/// Builds `a_ii = degree`, `a_ik = -1` for unknown neighbors and `C_i` = sum of
/// known neighbor values.
pub fn assemble_system<T: Scalar>(problem: &DirichletProblem<T>) -> Result<LinearSystem<T>> {
    let n = problem.len();
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for (i, terms) in problem.rows.iter().enumerate() {
        let mut row = vec![(i, T::count(terms.len()))];
        let mut c = T::zero();
        for t in terms {
            match t.slot {
                Slot::Unknown(j) => row.push((j, -T::one())),
                Slot::Known(v) => c = c + v,
            }
        }
        row.sort_unstable_by_key(|&(j, _)| j);
        rows.push(row);
        rhs.push(c);
    }
    let sys = LinearSystem {
        n,
        rows,
        rhs,
        index_map: problem.unknowns.clone(),
    };
    sys.check_invariants()?;
    Ok(sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Repeated neighbor-averaging sweeps.
    #[default]
    Relaxation,
    /// Jacobi-preconditioned conjugate gradients on the assembled system.
    ConjugateGradient,
    /// Dense Gaussian elimination; meant for small problems and tests.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// Start from a supplied gradually varied field (boundary mean if none given).
    #[default]
    Gvf,
    /// Uniform in the boundary value range.
    Random {
        seed: u64,
    },
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    /// In-place updates in ascending unknown order.
    #[default]
    GaussSeidel,
    /// Simultaneous updates from the previous sweep's values.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Target max mean-value residual.
    pub tolerance: T,
    /// Defaults to `100 * N` when `None`.
    pub max_iterations: Option<usize>,
    pub scheme: Scheme,
    pub init: Init,
    pub sweep: SweepOrder,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            tolerance: T::of(1e-8),
            max_iterations: None,
            scheme: Scheme::Relaxation,
            init: Init::Gvf,
            sweep: SweepOrder::GaussSeidel,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidInput(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| (100 * n).max(100))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    /// Values on unknowns and boundary.
    pub field: ScalarField<T>,
    pub iterations: usize,
    /// Final max mean-value residual.
    pub residual: T,
    pub converged: bool,
}

impl<T: Scalar> Solution<T> {
    /// Turns a capped run into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.residual.as_f64(),
            })
        }
    }
}

/// Initial unknown values for the iterative schemes.
pub fn initial_values<T: Scalar>(
    problem: &DirichletProblem<T>,
    init: Init,
    guess: Option<&BTreeMap<usize, T>>,
) -> Vec<T> {
    let n = problem.len();
    let (lo, hi) = problem.boundary_range().unwrap_or((T::zero(), T::zero()));
    match init {
        Init::Zeros => vec![T::zero(); n],
        Init::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| lo + (hi - lo) * T::of(rng.gen::<f64>()))
                .collect()
        }
        Init::Gvf => {
            let vals = problem.active_boundary();
            let mean = if vals.is_empty() {
                T::zero()
            } else {
                vals.iter().copied().sum::<T>() / T::count(vals.len())
            };
            problem
                .unknowns
                .iter()
                .map(|v| {
                    guess
                        .and_then(|g| g.get(v))
                        .copied()
                        .filter(|x| x.is_finite())
                        .unwrap_or(mean)
                })
                .collect()
        }
    }
}

/// Iterative neighbor averaging, one sweep at a time.
pub struct Relaxation<'a, T> {
    problem: &'a DirichletProblem<T>,
    x: Vec<T>,
    scratch: Vec<T>,
}

impl<'a, T: Scalar> Relaxation<'a, T> {
    pub fn new(problem: &'a DirichletProblem<T>, x0: Vec<T>) -> Self {
        assert_eq!(x0.len(), problem.len());
        Relaxation {
            problem,
            scratch: x0.clone(),
            x: x0,
        }
    }

    pub fn sweep(&mut self, order: SweepOrder) {
        match order {
            SweepOrder::GaussSeidel => {
                for i in 0..self.problem.len() {
                    self.x[i] = self.problem.mean_at(i, &self.x);
                }
            }
            SweepOrder::Jacobi => {
                for i in 0..self.problem.len() {
                    self.scratch[i] = self.problem.mean_at(i, &self.x);
                }
                std::mem::swap(&mut self.x, &mut self.scratch);
            }
        }
    }

    pub fn residual(&self) -> T {
        self.problem.residual_of(&self.x)
    }

    pub fn energy(&self) -> T {
        self.problem.energy_of(&self.x)
    }

    pub fn values(&self) -> &[T] {
        &self.x
    }

    pub fn into_values(self) -> Vec<T> {
        self.x
    }
}

/// Sweeps until the residual drops below tolerance or the iteration cap hits.
pub fn solve_relaxation<T: Scalar>(
    problem: &DirichletProblem<T>,
    config: &SolverConfig<T>,
    guess: Option<&BTreeMap<usize, T>>,
) -> Result<Solution<T>> {
    config.validate()?;
    let cap = config.iteration_cap(problem.len());
    let mut state = Relaxation::new(problem, initial_values(problem, config.init, guess));
    let mut residual = state.residual();
    let mut iterations = 0;
    while residual >= config.tolerance && iterations < cap {
        state.sweep(config.sweep);
        iterations += 1;
        residual = state.residual();
    }
    Ok(Solution {
        field: problem.field_from(state.values(), FieldDomain::SurfaceVertices),
        iterations,
        residual,
        converged: residual < config.tolerance,
    })
}

/// Mean-value residual of `A x - C`, i.e. `max |r_i| / a_ii`.
fn scaled_residual<T: Scalar>(sys: &LinearSystem<T>, x: &[T]) -> (Vec<T>, T) {
    let ax = sys.multiply(x);
    let r: Vec<T> = sys.rhs.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
    let m = r
        .iter()
        .enumerate()
        .map(|(i, &ri)| ri.abs() / sys.diagonal(i))
        .fold(T::zero(), T::max);
    (r, m)
}

/// Preconditioned conjugate gradients on the assembled system, stopping on
/// the same mean-value residual as relaxation.
pub fn solve_conjugate<T: Scalar>(
    problem: &DirichletProblem<T>,
    config: &SolverConfig<T>,
    guess: Option<&BTreeMap<usize, T>>,
) -> Result<Solution<T>> {
    config.validate()?;
    let sys = assemble_system(problem)?;
    let n = sys.n;
    let cap = config.iteration_cap(n);
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let inv_diag: Vec<T> = (0..n).map(|i| T::one() / sys.diagonal(i)).collect();

    let mut x = initial_values(problem, config.init, guess);
    let (mut r, mut residual) = scaled_residual(&sys, &x);
    let mut iterations = 0;
    'restart: while residual >= config.tolerance && iterations < cap {
        let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&a, &d)| a * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        // Recompute the true residual periodically to shed recurrence drift.
        for _ in 0..(n.max(10) * 2) {
            if iterations >= cap {
                break;
            }
            let ap = sys.multiply(&p);
            let pap = dot(&p, &ap);
            if !(pap > T::zero()) {
                if rz == T::zero() {
                    break;
                }
                return Err(Error::Breakdown(format!(
                    "p^T A p = {pap} at iteration {iterations}"
                )));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] = x[i] + alpha * p[i];
                r[i] = r[i] - alpha * ap[i];
            }
            iterations += 1;
            let recurrence = r
                .iter()
                .enumerate()
                .map(|(i, &ri)| ri.abs() * inv_diag[i])
                .fold(T::zero(), T::max);
            if recurrence < config.tolerance {
                let (r_true, m) = scaled_residual(&sys, &x);
                residual = m;
                r = r_true;
                continue 'restart;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let (r_true, m) = scaled_residual(&sys, &x);
        r = r_true;
        residual = m;
    }
    let residual = problem.residual_of(&x);
    Ok(Solution {
        field: problem.field_from(&x, FieldDomain::SurfaceVertices),
        iterations,
        residual,
        converged: residual < config.tolerance,
    })
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_direct_oracle<T: Scalar>(system: &LinearSystem<T>) -> Result<Vec<T>> {
    let n = system.n;
    let mut a = vec![T::zero(); n * n];
    for (i, row) in system.rows.iter().enumerate() {
        for &(j, v) in row {
            a[i * n + j] = v;
        }
    }
    let mut b = system.rhs.clone();
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny = T::epsilon() * scale * T::count(n.max(1));
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().partial_cmp(&a[j * n + k].abs()).unwrap())
            .unwrap();
        if a[piv * n + k].abs() <= tiny {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                a[i * n + j] = a[i * n + j] - f * a[k * n + j];
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| a[k * n + j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k * n + k];
    }
    Ok(x)
}

/// Assembles and solves densely.
pub fn solve_direct<T: Scalar>(problem: &DirichletProblem<T>) -> Result<Solution<T>> {
    let sys = assemble_system(problem)?;
    let x = solve_direct_oracle(&sys)?;
    let residual = problem.residual_of(&x);
    Ok(Solution {
        field: problem.field_from(&x, FieldDomain::SurfaceVertices),
        iterations: 1,
        residual,
        converged: true,
    })
}

/// Dispatches on `config.scheme`.
pub fn solve<T: Scalar>(
    problem: &DirichletProblem<T>,
    config: &SolverConfig<T>,
    guess: Option<&BTreeMap<usize, T>>,
) -> Result<Solution<T>> {
    match config.scheme {
        Scheme::Relaxation => solve_relaxation(problem, config, guess),
        Scheme::ConjugateGradient => solve_conjugate(problem, config, guess),
        Scheme::Direct => {
            config.validate()?;
            let mut s = solve_direct(problem)?;
            s.converged = s.residual < config.tolerance;
            Ok(s)
        }
    }
}

/// Max over unknowns of `|f(x) - mean of neighbors' f|`, reading every value
/// (boundary included) from `field`.
pub fn harmonic_residual<T: Scalar>(
    field: &ScalarField<T>,
    problem: &DirichletProblem<T>,
) -> Result<T> {
    let get = |v: usize| field.get(v).ok_or(Error::MissingValue(v));
    let mut worst = T::zero();
    for (i, &u) in problem.unknowns.iter().enumerate() {
        let fu = get(u)?;
        let mut sum = T::zero();
        for t in &problem.rows[i] {
            sum = sum + get(t.vertex)?;
        }
        let mean = sum / T::count(problem.rows[i].len());
        worst = worst.max((fu - mean).abs());
    }
    Ok(worst)
}

/// Dirichlet problem for the interior cells of `grid` with values on its boundary cells.
pub fn volume_problem<T: Scalar>(
    grid: &VolumeGrid,
    boundary_field: &ScalarField<T>,
) -> Result<DirichletProblem<T>> {
    let boundary_cells = grid.boundary_cells();
    let missing: Vec<usize> = boundary_cells
        .iter()
        .copied()
        .filter(|c| boundary_field.get(*c).is_none())
        .collect();
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(20).map(|c| c.to_string()).collect();
        return Err(Error::InvalidInput(format!(
            "{} boundary cells have no value: {}{}",
            missing.len(),
            shown.join(", "),
            if missing.len() > 20 { ", ..." } else { "" }
        )));
    }
    let boundary: BTreeMap<usize, T> = boundary_cells
        .iter()
        .map(|&c| (c, boundary_field.get(c).unwrap()))
        .collect();
    DirichletProblem::new(&grid.graph(), grid.interior_cells(), boundary)
}

/// Harmonic fill of a voxel solid's interior from its boundary cells.
pub fn fill_volume<T: Scalar>(
    grid: &VolumeGrid,
    boundary_field: &ScalarField<T>,
    config: &SolverConfig<T>,
    guess: Option<&BTreeMap<usize, T>>,
) -> Result<Solution<T>> {
    let problem = volume_problem(grid, boundary_field)?;
    let mut s = solve(&problem, config, guess)?;
    s.field.domain = FieldDomain::VolumeCells;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Adjacency;

    fn star(values: &[f64]) -> DirichletProblem<f64> {
        // Vertex 0 is unknown, 1..=k carry values.
        let g = Graph::from_edges(values.len() + 1, (1..=values.len()).map(|i| (0, i))).unwrap();
        let b = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i + 1, v))
            .collect();
        DirichletProblem::new(&g, [0], b).unwrap()
    }

    #[test]
    fn one_unknown_four_neighbors() {
        let sys = assemble_system(&star(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(sys.rows, vec![vec![(0, 4.0)]]);
        assert_eq!(sys.rhs, vec![10.0]);
    }

    #[test]
    fn two_adjacent_unknowns() {
        // i = 0, k = 1, each with three more boundary neighbors.
        let edges = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)];
        let g = Graph::from_edges(8, edges).unwrap();
        let b = (2..8).map(|v| (v, v as f64)).collect();
        let sys = assemble_system(&DirichletProblem::new(&g, [0, 1], b).unwrap()).unwrap();
        assert_eq!(sys.coefficient(0, 1), -1.0);
        assert_eq!(sys.coefficient(1, 0), -1.0);
        assert_eq!((sys.diagonal(0), sys.diagonal(1)), (4.0, 4.0));
    }

    #[test]
    fn empty_problem() {
        let g = Graph::path(2);
        let p = DirichletProblem::new(&g, [], [(0, 1.0), (1, 2.0)].into()).unwrap();
        let sys = assemble_system(&p).unwrap();
        assert_eq!(sys.n, 0);
        assert!(solve_direct_oracle(&sys).unwrap().is_empty());
    }

    #[test]
    fn singular_problems_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            DirichletProblem::new(&g, [2, 3], [(0, 1.0)].into()),
            Err(Error::Singular(_))
        ));
        let g = Graph::empty(2);
        assert!(matches!(
            DirichletProblem::new(&g, [0], [(1, 1.0)].into()),
            Err(Error::Singular(_))
        ));
        assert!(DirichletProblem::new(&Graph::path(2), [0], [(0, 1.0)].into()).is_err());
    }

    #[test]
    fn path_midpoint() {
        let p = DirichletProblem::new(&Graph::path(3), [1], [(0, 0.0), (2, 1.0)].into()).unwrap();
        let s = solve_relaxation(&p, &SolverConfig::default(), None).unwrap();
        assert!(s.converged);
        assert_eq!(s.field.get(1), Some(0.5));
    }

    #[test]
    fn direct_two_by_two() {
        let sys = LinearSystem {
            n: 2,
            rows: vec![vec![(0, 4.0), (1, -1.0)], vec![(0, -1.0), (1, 4.0)]],
            rhs: vec![10.0, 10.0],
            index_map: vec![0, 1],
        };
        let x: Vec<f64> = solve_direct_oracle(&sys).unwrap();
        assert!((x[0] - 10.0 / 3.0).abs() < 1e-14 && (x[1] - 10.0 / 3.0).abs() < 1e-14);

        let one = LinearSystem {
            n: 1,
            rows: vec![vec![(0, 1.0)]],
            rhs: vec![3.0],
            index_map: vec![0],
        };
        assert_eq!(solve_direct_oracle(&one).unwrap(), vec![3.0]);
    }

    #[test]
    fn conjugate_small_cases() {
        let cfg = SolverConfig::default().with_scheme(Scheme::ConjugateGradient);
        let s = solve_conjugate(&star(&[1.0, 2.0, 3.0, 4.0]), &cfg, None).unwrap();
        assert!((s.field.get(0).unwrap() - 2.5).abs() < 1e-12);

        let g = crate::shapes::grid::<f64>(5, 5);
        let b = (0..25).filter(|v| v % 5 == 0 || v % 5 == 4 || v / 5 == 0 || v / 5 == 4);
        let p = DirichletProblem::complement(g.graph(), b.map(|v| (v, 0.0)).collect()).unwrap();
        let s = solve_conjugate(&p, &cfg.with_init(Init::Random { seed: 3 }), None).unwrap();
        assert!(s.converged);
        assert!(s.field.values.values().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn residual_examples() {
        let g = crate::shapes::grid::<f64>(4, 4);
        let f = ScalarField::new(
            FieldDomain::SurfaceVertices,
            (0..16).map(|v| (v, (v % 4) as f64)).collect(),
        );
        let boundary = (0..16)
            .filter(|v| ![5, 6, 9, 10].contains(v))
            .map(|v| (v, (v % 4) as f64))
            .collect();
        let p = DirichletProblem::complement(g.graph(), boundary).unwrap();
        assert_eq!(harmonic_residual(&f, &p).unwrap(), 0.0);
        let c = ScalarField::new(
            FieldDomain::SurfaceVertices,
            (0..16).map(|v| (v, 7.0)).collect(),
        );
        assert_eq!(harmonic_residual(&c, &p).unwrap(), 0.0);
        let mut partial = f.clone();
        partial.values.remove(&6);
        assert!(matches!(
            harmonic_residual(&partial, &p),
            Err(Error::MissingValue(6))
        ));
    }

    #[test]
    fn four_by_four_linear_boundary() {
        let g = crate::shapes::grid::<f64>(4, 4);
        let boundary = (0..16)
            .filter(|v| ![5, 6, 9, 10].contains(v))
            .map(|v| (v, (v % 4) as f64))
            .collect();
        let p = DirichletProblem::complement(g.graph(), boundary).unwrap();
        let s =
            solve_relaxation(&p, &SolverConfig::default().with_init(Init::Zeros), None).unwrap();
        for v in [5, 6, 9, 10] {
            assert!((s.field.get(v).unwrap() - (v % 4) as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn volume_center_of_linear_cube() {
        for mode in [Adjacency::Six, Adjacency::TwentySix] {
            let grid = VolumeGrid::full([3, 3, 3], mode).unwrap();
            let b = grid
                .boundary_cells()
                .into_iter()
                .map(|c| (c, grid.coords(c)[2] as f64))
                .collect();
            let f = ScalarField::new(FieldDomain::VolumeCells, b);
            let s = fill_volume(&grid, &f, &SolverConfig::default(), None).unwrap();
            assert!((s.field.get(13).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn volume_missing_boundary_listed() {
        let grid = VolumeGrid::full([3, 3, 3], Adjacency::Six).unwrap();
        let f = ScalarField::new(FieldDomain::VolumeCells, [(0, 1.0)].into());
        let err = fill_volume(&grid, &f, &SolverConfig::default(), None).unwrap_err();
        assert!(err.to_string().contains("25 boundary cells"), "{err}");
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = crate::shapes::grid::<f64>(6, 6);
        let boundary = (0..36)
            .filter(|v| v % 6 == 0)
            .map(|v| (v, v as f64))
            .collect();
        let p = DirichletProblem::complement(g.graph(), boundary).unwrap();
        let cfg = SolverConfig {
            max_iterations: Some(2),
            ..SolverConfig::default()
        };
        let s = solve_relaxation(&p, &cfg, None).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 2);
        assert!(matches!(
            s.require_converged(),
            Err(Error::NotConverged { iterations: 2, .. })
        ));
    }

    #[test]
    fn invalid_tolerance() {
        let cfg = SolverConfig::default().with_tolerance(0.0);
        assert!(solve_relaxation(&star(&[1.0]), &cfg, None).is_err());
    }
}
