//! End-to-end reconstruction: levels, partition, curve interpolation, patch
//! solves and the optional volume fill, plus configuration, reporting and export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::field::{FieldDomain, SampleSet, ScalarField};
use crate::gvf::{self, ExtensionRule, QuantizedSamples};
use crate::harmonic::{self, DirichletProblem, Init, Scheme, SolverConfig, SweepOrder};
use crate::mesh::Mesh;
use crate::metric::{pairwise_distances, DistanceMatrix, DistanceMode};
use crate::partition::{self, CurveNetwork, Partition, PartitionAlgorithm};
use crate::scalar::Scalar;
use crate::volume::{Adjacency, VolumeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageOrder {
    /// Partition, then interpolate along the curves, then solve patches.
    #[default]
    PartitionFirst,
    /// Gradually varied fill of the whole surface first; curves take their
    /// values from it.
    GvfFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Ply,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig<T> {
    pub distance: DistanceMode,
    /// Level step; derived from the samples when `None`.
    pub spacing: Option<T>,
    pub partition: PartitionAlgorithm,
    pub extension: ExtensionRule,
    /// Add quantization residuals back at the sample vertices.
    pub keep_residuals: bool,
    pub order: StageOrder,
    pub surface_solver: SolverConfig<T>,
    pub volume_solver: SolverConfig<T>,
    pub adjacency: Adjacency,
    /// Base seed for random initialization; patch `c` uses `seed + c`.
    pub seed: u64,
    pub out_field: Option<PathBuf>,
    pub out_ply: Option<PathBuf>,
    pub out_volume: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        PipelineConfig {
            distance: DistanceMode::Hop,
            spacing: None,
            partition: PartitionAlgorithm::LinkCycle,
            extension: ExtensionRule::Upper,
            keep_residuals: false,
            order: StageOrder::PartitionFirst,
            surface_solver: SolverConfig::default(),
            volume_solver: SolverConfig::default(),
            adjacency: Adjacency::Six,
            seed: 0,
            out_field: None,
            out_ply: None,
            out_volume: None,
            report: None,
        }
    }
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::InvalidInput(format!("invalid value `{value}` for `{key}`"))
}

fn parse_scalar<T: Scalar>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(T::of)
        .ok_or_else(|| bad_value(key, value))
}

impl<T: Scalar> PipelineConfig<T> {
    /// Applies one `key = value` setting. Keys match the long CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let both = |cfg: &mut Self, f: &dyn Fn(&mut SolverConfig<T>)| {
            f(&mut cfg.surface_solver);
            f(&mut cfg.volume_solver);
        };
        match key {
            "partition" => {
                self.partition = match value {
                    "link" => PartitionAlgorithm::LinkCycle,
                    "geodesic" => PartitionAlgorithm::Geodesic,
                    _ => return Err(bad_value(key, value)),
                }
            }
            "distance" => {
                self.distance = match value {
                    "hop" => DistanceMode::Hop,
                    "euclid" => DistanceMode::EuclideanEdgeWeight,
                    _ => return Err(bad_value(key, value)),
                }
            }
            "spacing" => {
                let s: T = parse_scalar(key, value)?;
                if !(s > T::zero()) {
                    return Err(bad_value(key, value));
                }
                self.spacing = Some(s);
            }
            "extension" => {
                self.extension = match value {
                    "upper" => ExtensionRule::Upper,
                    "lower" => ExtensionRule::Lower,
                    "midpoint" => ExtensionRule::Midpoint,
                    _ => return Err(bad_value(key, value)),
                }
            }
            "keep-residuals" => {
                self.keep_residuals = value.parse().map_err(|_| bad_value(key, value))?;
            }
            "order" => {
                self.order = match value {
                    "partition-first" => StageOrder::PartitionFirst,
                    "gvf-first" => StageOrder::GvfFirst,
                    _ => return Err(bad_value(key, value)),
                }
            }
            "solver" => {
                let scheme = match value {
                    "relax" => Scheme::Relaxation,
                    "cg" => Scheme::ConjugateGradient,
                    "direct" => Scheme::Direct,
                    _ => return Err(bad_value(key, value)),
                };
                both(self, &|c| c.scheme = scheme);
            }
            "sweep" => {
                let sweep = match value {
                    "gauss-seidel" => SweepOrder::GaussSeidel,
                    "jacobi" => SweepOrder::Jacobi,
                    _ => return Err(bad_value(key, value)),
                };
                both(self, &|c| c.sweep = sweep);
            }
            "tol" => {
                let tol: T = parse_scalar(key, value)?;
                both(self, &|c| c.tolerance = tol);
            }
            "max-iters" => {
                let n: usize = value.parse().map_err(|_| bad_value(key, value))?;
                both(self, &|c| c.max_iterations = Some(n));
            }
            "init" => {
                let seed = self.seed;
                let init = match value {
                    "gvf" => Init::Gvf,
                    "zeros" => Init::Zeros,
                    "random" => Init::Random { seed },
                    _ => return Err(bad_value(key, value)),
                };
                both(self, &|c| c.init = init);
            }
            "seed" => {
                let seed: u64 = value.parse().map_err(|_| bad_value(key, value))?;
                both(self, &|c| {
                    if let Init::Random { .. } = c.init {
                        c.init = Init::Random { seed };
                    }
                });
                self.seed = seed;
            }
            "adjacency" => {
                self.adjacency = match value {
                    "6" | "six" => Adjacency::Six,
                    "26" | "twenty-six" => Adjacency::TwentySix,
                    _ => return Err(bad_value(key, value)),
                }
            }
            "out-field" => self.out_field = Some(value.into()),
            "out-ply" => self.out_ply = Some(value.into()),
            "out-volume" => self.out_volume = Some(value.into()),
            "report" => self.report = Some(value.into()),
            _ => return Err(Error::InvalidInput(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file (`#` comments allowed).
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_settings(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.surface_solver.validate()?;
        self.volume_solver.validate()?;
        let paths: Vec<&PathBuf> = [
            &self.out_field,
            &self.out_ply,
            &self.out_volume,
            &self.report,
        ]
        .into_iter()
        .flatten()
        .collect();
        let distinct: BTreeSet<&PathBuf> = paths.iter().copied().collect();
        if distinct.len() != paths.len() {
            return Err(Error::InvalidInput("output paths must be distinct".into()));
        }
        Ok(())
    }
}

/// Splits `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_settings(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, format!("expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::parse(
                i + 1,
                format!("expected `key = value`, got `{line}`"),
            ));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub vertices: usize,
    pub boundary_vertices: usize,
    pub euler: Option<i64>,
    pub iterations: usize,
    /// Mean-value residual recomputed on the final field.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineReport {
    pub timings: Vec<(&'static str, Duration)>,
    pub level_count: Option<u32>,
    pub spacing: Option<f64>,
    pub feasible: Option<bool>,
    pub tolerance: f64,
    pub components: Vec<ComponentReport>,
    /// Interior-cell solve, when a volume was filled.
    pub volume: Option<ComponentReport>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl PipelineReport {
    pub fn converged(&self) -> bool {
        self.components
            .iter()
            .chain(&self.volume)
            .all(|c| c.converged)
    }

    fn time<R>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<R>) -> Result<R> {
        let start = Instant::now();
        let r = f().map_err(|e| e.in_stage(stage));
        self.timings.push((stage, start.elapsed()));
        r
    }

    /// Line-oriented text. Only the `time.` lines vary between identical runs.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "levels: {}",
            opt(self.level_count.map(|m| m.to_string()))
        );
        let _ = writeln!(
            s,
            "spacing: {}",
            opt(self.spacing.map(|x| format!("{x:.16e}")))
        );
        let verdict = self
            .feasible
            .map(|f| if f { "feasible" } else { "infeasible" }.to_string());
        let _ = writeln!(s, "feasibility: {}", opt(verdict));
        let _ = writeln!(s, "tolerance: {:.3e}", self.tolerance);
        let _ = writeln!(s, "components: {}", self.components.len());
        for (i, c) in self.components.iter().enumerate() {
            let _ =
                writeln!(
                s,
                "component {i}: vertices={} boundary={} euler={} iterations={} residual={:.6e} {}",
                c.vertices,
                c.boundary_vertices,
                opt(c.euler.map(|e| e.to_string())),
                c.iterations,
                c.residual,
                if c.converged { "converged" } else { "NOT CONVERGED" }
            );
        }
        if let Some(v) = &self.volume {
            let _ = writeln!(
                s,
                "volume: interior={} boundary={} iterations={} residual={:.6e} {}",
                v.vertices,
                v.boundary_vertices,
                v.iterations,
                v.residual,
                if v.converged {
                    "converged"
                } else {
                    "NOT CONVERGED"
                }
            );
        }
        let _ = writeln!(
            s,
            "status: {}",
            if self.converged() {
                "ok"
            } else {
                "not converged"
            }
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        for (stage, d) in &self.timings {
            let _ = writeln!(s, "time.{stage}: {:.3} ms", d.as_secs_f64() * 1e3);
        }
        s
    }

    /// Appends another report's stages, components, volume result and messages.
    pub fn absorb(&mut self, other: PipelineReport) {
        self.timings.extend(other.timings);
        self.components.extend(other.components);
        if other.volume.is_some() {
            self.volume = other.volume;
        }
        self.warnings.extend(other.warnings);
        self.notes.extend(other.notes);
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceResult<T> {
    pub field: ScalarField<T>,
    pub partition: Partition,
    pub quantized: QuantizedSamples<T>,
    pub report: PipelineReport,
}

const SUBDIVISION_NOTE: &str =
    "patches are solved on the input mesh as given; no smoothing subdivision applied";

/// Hop distances between samples along the network edges only.
fn network_distances<T: Scalar>(
    graph: &crate::graph::Graph,
    samples: &[usize],
) -> Result<DistanceMatrix<T>> {
    let rows = samples
        .iter()
        .map(|&s| {
            let d = graph.hop_distances([s], |_| true);
            samples
                .iter()
                .map(|&t| d[t].map_or(T::infinity(), |h| T::count(h as usize)))
                .collect()
        })
        .collect();
    DistanceMatrix::from_rows(samples.to_vec(), rows)
}

fn sample_values<T: Scalar>(
    levels: &ScalarField<T>,
    samples: &SampleSet<T>,
    keep_residuals: bool,
) -> BTreeMap<usize, T> {
    let mut values = levels.values.clone();
    if keep_residuals {
        for (&v, &x) in samples.entries() {
            values.insert(v, x);
        }
    }
    values
}

/// Surface reconstruction from sparse samples: levels, curve network,
/// interpolation along the curves, then one Dirichlet solve per patch.
pub fn run_surface_pipeline<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &SampleSet<T>,
    config: &PipelineConfig<T>,
) -> Result<SurfaceResult<T>> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let mut report = PipelineReport {
        tolerance: config.surface_solver.tolerance.as_f64(),
        ..Default::default()
    };
    report.time("input", || {
        mesh.require_connected()?;
        if samples.vertices().iter().any(|&v| v >= mesh.vertex_count()) {
            return Err(Error::InvalidInput(
                "sample index beyond mesh vertex count".into(),
            ));
        }
        Ok(())
    })?;
    report.notes.push(SUBDIVISION_NOTE.into());
    let n = mesh.vertex_count();

    if samples.len() == 1 {
        return single_sample(mesh, samples, config, report);
    }

    let (partition, quantized, curve_levels) = match config.order {
        StageOrder::PartitionFirst => {
            let network = report.time("partition", || {
                partition::build_network(mesh, samples, config.distance, config.partition)
            })?;
            let partition = report.time("components", || {
                partition::extract_components(mesh, &network)
            })?;
            let net_graph = partition.network.graph(n);
            let quantized = report.time("quantize", || {
                let d = network_distances(&net_graph, &samples.vertices())?;
                gvf::quantize(samples, &d, config.spacing)
            })?;
            let levels = report.time("curves", || {
                let lf = gvf::gvf_extend(&net_graph, &quantized, config.extension)?;
                let mut lf = lf;
                lf.assignment.retain(|v, _| partition.network.contains(*v));
                Ok(lf)
            })?;
            (partition, quantized, levels)
        }
        StageOrder::GvfFirst => {
            let quantized = report.time("quantize", || {
                let d = pairwise_distances(mesh, &samples.vertices(), DistanceMode::Hop)?;
                gvf::quantize(samples, &d, config.spacing)
            })?;
            let whole = report.time("surface-gvf", || {
                gvf::gvf_extend(mesh.graph(), &quantized, config.extension)
            })?;
            let network = report.time("partition", || {
                partition::build_network(mesh, samples, config.distance, config.partition)
            })?;
            let partition = report.time("components", || {
                partition::extract_components(mesh, &network)
            })?;
            let mut levels = whole;
            levels
                .assignment
                .retain(|v, _| partition.network.contains(*v));
            (partition, quantized, levels)
        }
    };
    report.level_count = Some(quantized.level_count());
    report.spacing = Some(quantized.levels.spacing().as_f64());
    report.feasible = Some(true);
    report.warnings.extend(partition.warnings.iter().cloned());

    let curve_field =
        gvf::realize_levels(&curve_levels, &quantized.levels, FieldDomain::CurveVertices)
            .map_err(|e| e.in_stage("curves"))?;
    let boundary = sample_values(&curve_field, samples, config.keep_residuals);

    // Initial guess for the patch solves: the level envelope spread over the mesh.
    let guess_levels = gvf::envelope_fill(
        mesh.graph(),
        &curve_levels.assignment,
        quantized.level_count(),
        config.extension,
    );
    let guess: BTreeMap<usize, T> = gvf::realize_levels(
        &guess_levels,
        &quantized.levels,
        FieldDomain::SurfaceVertices,
    )
    .map_err(|e| e.in_stage("harmonic"))?
    .values;

    let mut values = boundary.clone();
    let start = Instant::now();
    for (c, comp) in partition.components.iter().enumerate() {
        let ring = partition.ring(mesh, c);
        let local: BTreeMap<usize, T> = ring.iter().map(|&v| (v, boundary[&v])).collect();
        let problem = DirichletProblem::new(mesh.graph(), comp.iter().copied(), local)
            .map_err(|e| e.in_stage("harmonic"))?;
        let cfg = component_config(&config.surface_solver, config.seed, c);
        let sol =
            harmonic::solve(&problem, &cfg, Some(&guess)).map_err(|e| e.in_stage("harmonic"))?;
        let residual = harmonic::harmonic_residual(&sol.field, &problem)
            .map_err(|e| e.in_stage("harmonic"))?;
        for &v in comp {
            values.insert(v, sol.field.values[&v]);
        }
        report.components.push(ComponentReport {
            vertices: comp.len(),
            boundary_vertices: ring.len(),
            euler: partition.euler[c],
            iterations: sol.iterations,
            residual: residual.as_f64(),
            converged: sol.converged,
        });
    }
    report.timings.push(("harmonic", start.elapsed()));
    for (c, r) in report.components.iter().enumerate() {
        if !r.converged {
            report.warnings.push(format!(
                "component {c} stopped after {} iterations",
                r.iterations
            ));
        }
    }
    if values.len() != n {
        return Err(
            Error::InvalidInput(format!("field covers {} of {n} vertices", values.len()))
                .in_stage("harmonic"),
        );
    }
    Ok(SurfaceResult {
        field: ScalarField::new(FieldDomain::SurfaceVertices, values),
        partition,
        quantized,
        report,
    })
}

fn component_config<T: Scalar>(base: &SolverConfig<T>, seed: u64, c: usize) -> SolverConfig<T> {
    let mut cfg = *base;
    if let Init::Random { .. } = cfg.init {
        cfg.init = Init::Random {
            seed: seed.wrapping_add(c as u64),
        };
    }
    cfg
}

/// One sample: no curves can be drawn, and the only harmonic function
/// pinned at a single vertex of a connected mesh is the constant.
fn single_sample<T: Scalar>(
    mesh: &Mesh<T>,
    samples: &SampleSet<T>,
    config: &PipelineConfig<T>,
    mut report: PipelineReport,
) -> Result<SurfaceResult<T>> {
    let (&s, &x) = samples.entries().iter().next().expect("one sample");
    let levels = crate::field::LevelSequence::new(vec![x]).map_err(|e| e.in_stage("quantize"))?;
    let quantized = QuantizedSamples::from_indices(levels, [(s, 1)].into())
        .map_err(|e| e.in_stage("quantize"))?;
    let network = CurveNetwork::from_segments(mesh, [s], vec![vec![s]])
        .map_err(|e| e.in_stage("partition"))?;
    let comp: Vec<usize> = (0..mesh.vertex_count()).filter(|&v| v != s).collect();
    let mut partition = Partition {
        network,
        components: Vec::new(),
        component_boundaries: Vec::new(),
        euler: Vec::new(),
        warnings: vec!["single sample; surface not partitioned".into()],
    };
    let mut values = BTreeMap::from([(s, x)]);
    if !comp.is_empty() {
        let problem =
            DirichletProblem::new(mesh.graph(), comp.iter().copied(), BTreeMap::from([(s, x)]))
                .map_err(|e| e.in_stage("harmonic"))?;
        let cfg = component_config(&config.surface_solver, config.seed, 0);
        let sol = harmonic::solve(&problem, &cfg, None).map_err(|e| e.in_stage("harmonic"))?;
        let residual = harmonic::harmonic_residual(&sol.field, &problem)
            .map_err(|e| e.in_stage("harmonic"))?;
        values.extend(sol.field.values.iter().map(|(&k, &v)| (k, v)));
        report.components.push(ComponentReport {
            vertices: comp.len(),
            boundary_vertices: 1,
            euler: None,
            iterations: sol.iterations,
            residual: residual.as_f64(),
            converged: sol.converged,
        });
        partition.component_boundaries.push(vec![vec![s]]);
        partition.euler.push(None);
        partition.components.push(comp);
    }
    report.level_count = Some(1);
    report.spacing = Some(quantized.levels.spacing().as_f64());
    report.feasible = Some(true);
    report.warnings.extend(partition.warnings.iter().cloned());
    Ok(SurfaceResult {
        field: ScalarField::new(FieldDomain::SurfaceVertices, values),
        partition,
        quantized,
        report,
    })
}

/// Values for the boundary cells of `grid`, each taken from the mesh vertex
/// nearest to the cell center (cell units; ties go to the lower vertex).
pub fn surface_to_cells<T: Scalar>(
    mesh: &Mesh<T>,
    surface: &ScalarField<T>,
    grid: &VolumeGrid,
) -> Result<ScalarField<T>> {
    let positions = mesh.positions().ok_or_else(|| {
        Error::InvalidInput("mesh has no vertex positions to map onto cells".into())
    })?;
    let mut values = BTreeMap::new();
    for c in grid.boundary_cells() {
        let p = grid.center(c);
        let mut best: Option<(f64, usize)> = None;
        for (v, q) in positions.iter().enumerate() {
            let d: f64 = (0..3).map(|k| (q[k].as_f64() - p[k]).powi(2)).sum();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        let (_, v) = best.ok_or_else(|| Error::InvalidInput("mesh has no vertices".into()))?;
        let x = surface.get(v).ok_or(Error::MissingValue(v))?;
        values.insert(c, x);
    }
    Ok(ScalarField::new(FieldDomain::VolumeCells, values))
}

#[derive(Debug, Clone)]
pub struct VolumeResult<T> {
    pub field: ScalarField<T>,
    pub report: PipelineReport,
}

/// Harmonic fill of the interior cells from values on every boundary cell.
pub fn run_volume_pipeline<T: Scalar>(
    grid: &VolumeGrid,
    boundary: &ScalarField<T>,
    config: &PipelineConfig<T>,
) -> Result<VolumeResult<T>> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let mut report = PipelineReport {
        tolerance: config.volume_solver.tolerance.as_f64(),
        ..Default::default()
    };
    let problem = report.time("volume", || harmonic::volume_problem(grid, boundary))?;
    let cfg = component_config(&config.volume_solver, config.seed, 0);
    let sol = report.time("volume-solve", || harmonic::solve(&problem, &cfg, None))?;
    let residual =
        harmonic::harmonic_residual(&sol.field, &problem).map_err(|e| e.in_stage("volume"))?;
    if !sol.converged {
        report.warnings.push(format!(
            "volume solve stopped after {} iterations",
            sol.iterations
        ));
    }
    report.volume = Some(ComponentReport {
        vertices: problem.len(),
        boundary_vertices: problem.boundary().len(),
        euler: None,
        iterations: sol.iterations,
        residual: residual.as_f64(),
        converged: sol.converged,
    });
    let mut field = sol.field;
    field.domain = FieldDomain::VolumeCells;
    Ok(VolumeResult { field, report })
}

/// What an exported field lives on.
#[derive(Debug, Clone, Copy)]
pub enum ExportDomain<'a, T> {
    Mesh(&'a Mesh<T>),
    Grid(&'a VolumeGrid),
}

/// ASCII PLY with one `quality` value per vertex (mesh) or per listed cell (grid).
pub fn to_ply<T: Scalar>(domain: ExportDomain<'_, T>, field: &ScalarField<T>) -> Result<String> {
    let mut s = String::from("ply\nformat ascii 1.0\n");
    match domain {
        ExportDomain::Mesh(mesh) => {
            let n = mesh.vertex_count();
            if let Some(v) = (0..n).find(|&v| field.get(v).is_none()) {
                return Err(Error::MissingValue(v));
            }
            let _ = writeln!(s, "element vertex {n}");
            s.push_str(
                "property float x\nproperty float y\nproperty float z\nproperty float quality\n",
            );
            let _ = writeln!(s, "element face {}", mesh.face_count());
            s.push_str("property list uchar int vertex_indices\nend_header\n");
            for v in 0..n {
                let p = mesh.position(v).map_or([0.0; 3], |p| p.map(|x| x.as_f64()));
                let _ = writeln!(
                    s,
                    "{} {} {} {}",
                    p[0] as f32,
                    p[1] as f32,
                    p[2] as f32,
                    field.values[&v].as_f64() as f32
                );
            }
            for f in mesh.faces() {
                let idx: Vec<String> = f.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "{} {}", f.len(), idx.join(" "));
            }
        }
        ExportDomain::Grid(grid) => {
            let cells = grid.occupied_cells();
            if let Some(&c) = cells.iter().find(|&&c| field.get(c).is_none()) {
                return Err(Error::MissingValue(c));
            }
            let _ = writeln!(s, "element vertex {}", cells.len());
            s.push_str("property float x\nproperty float y\nproperty float z\nproperty float quality\nend_header\n");
            for c in cells {
                let p = grid.center(c);
                let _ = writeln!(
                    s,
                    "{} {} {} {}",
                    p[0] as f32,
                    p[1] as f32,
                    p[2] as f32,
                    field.values[&c].as_f64() as f32
                );
            }
        }
    }
    Ok(s)
}

pub fn export_field<T: Scalar>(
    domain: ExportDomain<'_, T>,
    field: &ScalarField<T>,
    format: ExportFormat,
    path: &Path,
) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => {
            let n = match domain {
                ExportDomain::Mesh(m) => (0..m.vertex_count()).collect::<Vec<_>>(),
                ExportDomain::Grid(g) => g.occupied_cells(),
            };
            if let Some(&v) = n.iter().find(|&&v| field.get(v).is_none()) {
                return Err(Error::MissingValue(v));
            }
            field.to_csv()
        }
        ExportFormat::Ply => to_ply(domain, field)?,
    };
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
