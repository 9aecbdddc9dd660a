use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use surfharm::field::parse_index_value_csv;
use surfharm::gvf;
use surfharm::harmonic;
use surfharm::metric::pairwise_distances;
use surfharm::partition;
use surfharm::pipeline::{self, ExportDomain, ExportFormat};
use surfharm::{
    DirichletProblem, Error, FieldDomain, Mesh, MeshFormat, PipelineConfig, Result, SampleSet,
    ScalarField, VolumeGrid,
};

type F = f64;

#[derive(Parser)]
#[command(
    name = "surfharm",
    version,
    about = "Harmonic reconstruction of scalar fields on meshes and voxel solids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full run: levels, curve network, patch solves, optional volume fill.
    Reconstruct(ReconstructArgs),
    /// Quantize samples and write a gradually varied fill of the whole mesh.
    Gvf(GvfArgs),
    /// Build the curve network and list the patches it cuts out.
    Partition(PartitionArgs),
    /// Solve the Dirichlet problem on a mesh with the given known values.
    Harmonic(HarmonicArgs),
    /// Fill the interior cells of a voxel solid from its boundary cells.
    Fill3d(Fill3dArgs),
    /// Print mesh, sample and volume diagnostics.
    Check(CheckArgs),
}

#[derive(Args, Default)]
struct SolverArgs {
    #[arg(long, value_parser = ["relax", "cg", "direct"])]
    solver: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long, value_parser = ["gvf", "random", "zeros"])]
    init: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_parser = ["gauss-seidel", "jacobi"])]
    sweep: Option<String>,
}

#[derive(Args, Default)]
struct RouteArgs {
    #[arg(long, value_parser = ["link", "geodesic"])]
    partition: Option<String>,
    #[arg(long, value_parser = ["hop", "euclid"])]
    distance: Option<String>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// CSV of `vertex,value` lines.
    #[arg(long)]
    samples: PathBuf,
    /// Voxel solid to fill from the surface field.
    #[arg(long)]
    volume: Option<PathBuf>,
    /// `key = value` settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    route: RouteArgs,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long, value_parser = ["upper", "lower", "midpoint"])]
    extension: Option<String>,
    #[arg(long, value_parser = ["true", "false"])]
    keep_residuals: Option<String>,
    #[arg(long, value_parser = ["partition-first", "gvf-first"])]
    order: Option<String>,
    #[arg(long, value_parser = ["6", "26"])]
    adjacency: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out_field: Option<String>,
    #[arg(long)]
    out_ply: Option<String>,
    #[arg(long)]
    out_volume: Option<String>,
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args)]
struct GvfArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long, value_parser = ["upper", "lower", "midpoint"])]
    extension: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[command(flatten)]
    route: RouteArgs,
    /// One network segment per line, vertex ids separated by spaces.
    #[arg(long)]
    out_network: Option<PathBuf>,
    /// `vertex,component` lines; network vertices get -1.
    #[arg(long)]
    out_components: Option<PathBuf>,
}

#[derive(Args)]
struct HarmonicArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// CSV of known `vertex,value` pairs; every other vertex is solved for.
    #[arg(long)]
    boundary: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Fill3dArgs {
    #[arg(long)]
    volume: PathBuf,
    /// CSV of `cell,value` for every boundary cell.
    #[arg(long)]
    boundary: PathBuf,
    #[arg(long, value_parser = ["6", "26"])]
    adjacency: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    out_ply: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long, requires = "mesh")]
    samples: Option<PathBuf>,
    #[arg(long)]
    volume: Option<PathBuf>,
}

fn apply(cfg: &mut PipelineConfig<F>, key: &str, value: &Option<String>) -> Result<()> {
    match value {
        Some(v) => cfg.set(key, v),
        None => Ok(()),
    }
}

impl SolverArgs {
    fn apply(&self, cfg: &mut PipelineConfig<F>) -> Result<()> {
        // seed before init so either order in a config file is honored
        apply(cfg, "seed", &self.seed)?;
        apply(cfg, "solver", &self.solver)?;
        apply(cfg, "tol", &self.tol)?;
        apply(cfg, "max-iters", &self.max_iters)?;
        apply(cfg, "init", &self.init)?;
        apply(cfg, "sweep", &self.sweep)
    }
}

impl RouteArgs {
    fn apply(&self, cfg: &mut PipelineConfig<F>) -> Result<()> {
        apply(cfg, "partition", &self.partition)?;
        apply(cfg, "distance", &self.distance)
    }
}

fn load_mesh(path: &Path) -> Result<Mesh<F>> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        Error::InvalidInput(format!(
            "{}: unknown mesh extension (want .off or .obj)",
            path.display()
        ))
    })?;
    Mesh::load(path, format)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn load_csv(path: &Path) -> Result<BTreeMap<usize, F>> {
    parse_index_value_csv(&read(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => {
            Error::InvalidInput(format!("{}:{line}: {msg}", path.display()))
        }
        e => e,
    })
}

fn reconstruct(a: ReconstructArgs) -> Result<bool> {
    let mut cfg = PipelineConfig::<F>::default();
    if let Some(p) = &a.config {
        let text = read(p)?;
        cfg.apply_text(&text)?;
    }
    a.route.apply(&mut cfg)?;
    apply(&mut cfg, "spacing", &a.spacing)?;
    apply(&mut cfg, "extension", &a.extension)?;
    apply(&mut cfg, "keep-residuals", &a.keep_residuals)?;
    apply(&mut cfg, "order", &a.order)?;
    apply(&mut cfg, "adjacency", &a.adjacency)?;
    a.solver.apply(&mut cfg)?;
    apply(&mut cfg, "out-field", &a.out_field)?;
    apply(&mut cfg, "out-ply", &a.out_ply)?;
    apply(&mut cfg, "out-volume", &a.out_volume)?;
    apply(&mut cfg, "report", &a.report)?;
    cfg.validate()?;

    let mesh = load_mesh(&a.mesh)?;
    let samples = SampleSet::load(&a.samples, mesh.vertex_count())?;
    let surface = pipeline::run_surface_pipeline(&mesh, &samples, &cfg)?;
    let mut report = surface.report;
    log::info!("surface: {} patches", surface.partition.components.len());

    if let Some(p) = &cfg.out_field {
        pipeline::export_field(
            ExportDomain::Mesh(&mesh),
            &surface.field,
            ExportFormat::Csv,
            p,
        )?;
    }
    if let Some(p) = &cfg.out_ply {
        pipeline::export_field(
            ExportDomain::Mesh(&mesh),
            &surface.field,
            ExportFormat::Ply,
            p,
        )?;
    }
    if let Some(vp) = &a.volume {
        let grid = VolumeGrid::load(vp)?.with_adjacency(cfg.adjacency);
        let cells = pipeline::surface_to_cells(&mesh, &surface.field, &grid)?;
        let vol = pipeline::run_volume_pipeline(&grid, &cells, &cfg)?;
        report.absorb(vol.report);
        if let Some(p) = &cfg.out_volume {
            pipeline::export_field(ExportDomain::Grid(&grid), &vol.field, ExportFormat::Csv, p)?;
        }
    }
    let text = report.to_text();
    match &cfg.report {
        Some(p) => pipeline::write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(report.converged())
}

fn gvf_cmd(a: GvfArgs) -> Result<bool> {
    let mut cfg = PipelineConfig::<F>::default();
    apply(&mut cfg, "spacing", &a.spacing)?;
    apply(&mut cfg, "extension", &a.extension)?;
    let mesh = load_mesh(&a.mesh)?;
    mesh.require_connected()?;
    let samples = SampleSet::load(&a.samples, mesh.vertex_count())?;
    let d = pairwise_distances(&mesh, &samples.vertices(), surfharm::DistanceMode::Hop)?;
    let q = gvf::quantize(&samples, &d, cfg.spacing)?;
    let lf = gvf::gvf_extend(mesh.graph(), &q, cfg.extension)?;
    let field = gvf::realize_levels(&lf, &q.levels, FieldDomain::SurfaceVertices)?;
    pipeline::write_text(&a.out, &field.to_csv())?;
    println!("levels: {}", q.level_count());
    println!("spacing: {:.16e}", q.levels.spacing());
    Ok(true)
}

fn partition_cmd(a: PartitionArgs) -> Result<bool> {
    let mut cfg = PipelineConfig::<F>::default();
    a.route.apply(&mut cfg)?;
    let mesh = load_mesh(&a.mesh)?;
    mesh.require_connected()?;
    let samples = SampleSet::load(&a.samples, mesh.vertex_count())?;
    let net = partition::build_network(&mesh, &samples, cfg.distance, cfg.partition)?;
    let part = partition::extract_components(&mesh, &net)?;
    if let Some(p) = &a.out_network {
        let text: String = net
            .segments()
            .iter()
            .map(|s| {
                s.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
                    + "\n"
            })
            .collect();
        pipeline::write_text(p, &text)?;
    }
    if let Some(p) = &a.out_components {
        let text: String = part
            .labels(mesh.vertex_count())
            .iter()
            .enumerate()
            .map(|(v, c)| format!("{v},{}\n", c.map_or(-1, |c| c as i64)))
            .collect();
        pipeline::write_text(p, &text)?;
    }
    println!("segments: {}", net.segments().len());
    println!("network vertices: {}", net.boundary_vertices().len());
    println!("components: {}", part.components.len());
    for (c, comp) in part.components.iter().enumerate() {
        let chi = part.euler[c].map_or("-".to_string(), |e| e.to_string());
        println!("component {c}: vertices={} euler={chi}", comp.len());
    }
    for w in &part.warnings {
        println!("warning: {w}");
    }
    Ok(true)
}

fn print_solution(s: &harmonic::Solution<F>) {
    println!("iterations: {}", s.iterations);
    println!("residual: {:.6e}", s.residual);
    println!(
        "status: {}",
        if s.converged { "ok" } else { "not converged" }
    );
}

fn harmonic_cmd(a: HarmonicArgs) -> Result<bool> {
    let mut cfg = PipelineConfig::<F>::default();
    a.solver.apply(&mut cfg)?;
    let mesh = load_mesh(&a.mesh)?;
    let known = SampleSet::new(load_csv(&a.boundary)?, mesh.vertex_count())?;
    let problem = DirichletProblem::complement(mesh.graph(), known.entries().clone())?;
    let s = harmonic::solve(&problem, &cfg.surface_solver, None)?;
    pipeline::write_text(&a.out, &s.field.to_csv())?;
    print_solution(&s);
    Ok(s.converged)
}

fn fill3d_cmd(a: Fill3dArgs) -> Result<bool> {
    let mut cfg = PipelineConfig::<F>::default();
    apply(&mut cfg, "adjacency", &a.adjacency)?;
    a.solver.apply(&mut cfg)?;
    let grid = VolumeGrid::load(&a.volume)?.with_adjacency(cfg.adjacency);
    let boundary = ScalarField::new(FieldDomain::VolumeCells, load_csv(&a.boundary)?);
    let r = pipeline::run_volume_pipeline(&grid, &boundary, &cfg)?;
    pipeline::export_field(
        ExportDomain::Grid(&grid),
        &r.field,
        ExportFormat::Csv,
        &a.out,
    )?;
    if let Some(p) = &a.out_ply {
        pipeline::export_field(ExportDomain::Grid(&grid), &r.field, ExportFormat::Ply, p)?;
    }
    print!("{}", r.report.to_text());
    Ok(r.report.converged())
}

fn check_cmd(a: CheckArgs) -> Result<bool> {
    if let Some(mp) = &a.mesh {
        let mesh = load_mesh(mp)?;
        println!("vertices: {}", mesh.vertex_count());
        println!("edges: {}", mesh.edge_count());
        println!("faces: {}", mesh.face_count());
        if mesh.has_faces() {
            println!("euler: {}", mesh.euler_characteristic_all()?);
        }
        println!("connected: {}", mesh.is_connected());
        if let Some(sp) = &a.samples {
            let samples = SampleSet::load(sp, mesh.vertex_count())?;
            println!("samples: {}", samples.len());
            let d = pairwise_distances(&mesh, &samples.vertices(), surfharm::DistanceMode::Hop)?;
            let q = gvf::quantize(&samples, &d, None)?;
            println!("levels: {}", q.level_count());
            println!("spacing: {:.16e}", q.levels.spacing());
        }
    }
    if let Some(vp) = &a.volume {
        let grid = VolumeGrid::load(vp)?;
        let [x, y, z] = grid.dims();
        println!("dims: {x} {y} {z}");
        println!("occupied: {}", grid.occupied_cells().len());
        println!("boundary cells: {}", grid.boundary_cells().len());
        println!("interior cells: {}", grid.interior_cells().len());
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Reconstruct(a) => reconstruct(a),
        Command::Gvf(a) => gvf_cmd(a),
        Command::Partition(a) => partition_cmd(a),
        Command::Harmonic(a) => harmonic_cmd(a),
        Command::Fill3d(a) => fill3d_cmd(a),
        Command::Check(a) => check_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: solver did not converge");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
