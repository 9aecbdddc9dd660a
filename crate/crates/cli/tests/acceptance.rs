//! Acceptance suite: one line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfharm::gvf::{self, ExtensionRule};
use surfharm::harmonic::{self, Relaxation};
use surfharm::metric::pairwise_distances;
use surfharm::pipeline;
use surfharm::{
    Adjacency, DirichletProblem, DistanceMode, FieldDomain, Graph, Init, Mesh, MeshFormat,
    PipelineConfig, SampleSet, ScalarField, Scheme, SolverConfig, SweepOrder, VolumeGrid,
};

use common::*;

const EPS: f64 = 1e-8;

type Check = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_diff(a: &ScalarField<f64>, b: &ScalarField<f64>, keys: &[usize]) -> f64 {
    keys.iter()
        .map(|k| (a.values[k] - b.values[k]).abs())
        .fold(0.0, f64::max)
}

fn c1_feasibility() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut yes, mut no) = (0, 0);
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=4);
        let p = rng.gen_range(0.0..0.5);
        let g = random_connected_graph(&mut rng, n, p);
        let levels = random_levels(&mut rng, n, m);
        let verts: Vec<usize> = levels.keys().copied().collect();
        let d = pairwise_distances(
            &Mesh::<f64>::from_graph(g.clone()),
            &verts,
            DistanceMode::Hop,
        )
        .map_err(|e| e.to_string())?;
        let got = gvf::gvf_feasible(&quantized(levels.clone(), m), &d)
            .map_err(|e| e.to_string())?
            .feasible;
        let want = gvf_exists(&g, &levels, m);
        ensure(got == want, || {
            format!("case {case}: feasible={got}, enumeration says {want}")
        })?;
        if want {
            yes += 1
        } else {
            no += 1
        }
    }
    Ok(format!("1000/1000 agree ({yes} feasible, {no} infeasible)"))
}

/// Feasible by construction: min of shifted distance functions, clamped.
fn planted_instance(rng: &mut ChaCha8Rng) -> (Graph, BTreeMap<usize, u32>, u32) {
    let n = rng.gen_range(2..=40);
    let m = rng.gen_range(1..=8);
    let p = rng.gen_range(0.0..0.15);
    let g = random_connected_graph(rng, n, p);
    let roots: Vec<(Vec<Option<u32>>, u32)> = (0..rng.gen_range(1..=3))
        .map(|_| (bfs(&g, rng.gen_range(0..n)), rng.gen_range(1..=m)))
        .collect();
    let f = |v: usize| {
        roots
            .iter()
            .map(|(d, a)| a + d[v].unwrap())
            .min()
            .unwrap()
            .clamp(1, m)
    };
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    let k = rng.gen_range(1..=n);
    (g, vs[..k].iter().map(|&v| (v, f(v))).collect(), m)
}

fn c2_gvf_validity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let (g, levels, m) = planted_instance(&mut rng);
        for rule in [
            ExtensionRule::Upper,
            ExtensionRule::Lower,
            ExtensionRule::Midpoint,
        ] {
            let f = gvf::gvf_extend(&g, &quantized(levels.clone(), m), rule)
                .map_err(|e| format!("case {case}: {e}"))?;
            ensure(f.assignment.len() == g.len(), || {
                format!("case {case}: partial field")
            })?;
            for (v, l) in &levels {
                ensure(f.assignment[v] == *l, || {
                    format!("case {case} {rule:?}: sample {v} moved")
                })?;
            }
            for (a, b) in g.edges() {
                ensure(f.assignment[&a].abs_diff(f.assignment[&b]) <= 1, || {
                    format!("case {case} {rule:?}: edge ({a},{b}) jumps")
                })?;
            }
            ensure(f.assignment.values().all(|&l| (1..=m).contains(&l)), || {
                format!("case {case}: level out of range")
            })?;
        }
    }
    Ok("200 planted instances x 3 rules valid".into())
}

fn grid_problem(n: usize, seed: u64) -> DirichletProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = grid_ring(n, n)
        .into_iter()
        .map(|v| (v, rng.gen_range(-1.0..1.0)))
        .collect();
    DirichletProblem::complement(&grid_graph(n, n), b).unwrap()
}

fn spread(p: &DirichletProblem<f64>, scheme: Scheme) -> Result<f64, String> {
    let sols: Vec<ScalarField<f64>> = (0..10)
        .map(|seed| {
            let cfg = SolverConfig::default()
                .with_scheme(scheme)
                .with_init(Init::Random { seed });
            harmonic::solve(p, &cfg, None)
                .and_then(|s| s.require_converged())
                .map(|s| s.field)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for a in &sols {
        for b in &sols {
            worst = worst.max(max_diff(a, b, p.unknowns()));
        }
    }
    Ok(worst)
}

fn c3_uniqueness() -> Check {
    let p = grid_problem(20, 3);
    let cg = spread(&p, Scheme::ConjugateGradient)?;
    let relax = spread(&p, Scheme::Relaxation)?;
    ensure(cg <= 10.0 * EPS, || {
        format!("conjugate gradient spread {cg:.3e} > {:.0e}", 10.0 * EPS)
    })?;
    Ok(format!(
        "conjugate gradient spread {cg:.3e} <= 1e-7 (relaxation at the same residual tolerance: {relax:.3e})"
    ))
}

fn c4_maximum_principle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest = 0;
    for case in 0..100 {
        let (g, unknowns, boundary) = random_problem(&mut rng, 1000);
        largest = largest.max(unknowns.len());
        let p = DirichletProblem::new(&g, unknowns, boundary).map_err(|e| e.to_string())?;
        let (lo, hi) = p.boundary_range().unwrap();
        let s = harmonic::solve(&p, &SolverConfig::default(), None)
            .and_then(|s| s.require_converged())
            .map_err(|e| format!("case {case}: {e}"))?;
        for &u in p.unknowns() {
            let x = s.field.values[&u];
            ensure(lo <= x && x <= hi, || {
                format!("case {case}: {x} outside [{lo}, {hi}] at {u}")
            })?;
        }
    }
    Ok(format!(
        "100 problems (up to {largest} unknowns) within boundary range"
    ))
}

fn c5_linear() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let [a, b, c, d]: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let (nx, ny) = (rng.gen_range(3..=12), rng.gen_range(3..=12));
        let f2 = |v: usize| a * (v % nx) as f64 + b * (v / nx) as f64 + d;
        let bnd = grid_ring(nx, ny).into_iter().map(|v| (v, f2(v))).collect();
        let p = DirichletProblem::complement(&grid_graph(nx, ny), bnd).unwrap();
        let s = harmonic::solve(&p, &SolverConfig::default(), None).map_err(|e| e.to_string())?;
        for &u in p.unknowns() {
            worst = worst.max((s.field.values[&u] - f2(u)).abs());
        }
        for adj in [Adjacency::Six, Adjacency::TwentySix] {
            let dims = [
                rng.gen_range(3..=8),
                rng.gen_range(3..=8),
                rng.gen_range(3..=8),
            ];
            let grid = VolumeGrid::full(dims, adj).unwrap();
            let f3 = |i: usize| {
                let [x, y, z] = grid.coords(i);
                a * x as f64 + b * y as f64 + c * z as f64 + d
            };
            let bf = ScalarField::new(
                FieldDomain::VolumeCells,
                grid.boundary_cells()
                    .into_iter()
                    .map(|i| (i, f3(i)))
                    .collect(),
            );
            let s = harmonic::fill_volume(&grid, &bf, &SolverConfig::default(), None)
                .map_err(|e| e.to_string())?;
            for i in grid.interior_cells() {
                worst = worst.max((s.field.values[&i] - f3(i)).abs());
            }
        }
    }
    ensure(worst < 1e-6, || format!("max error {worst:.3e}"))?;
    Ok(format!(
        "20 draws, 2D grids and 3D grids (6 and 26 adjacency), max error {worst:.3e}"
    ))
}

fn c6_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let (g, unknowns, boundary) = random_problem(&mut rng, 500);
        let oracle = dense_harmonic(&g, &unknowns, &boundary);
        let p = DirichletProblem::new(&g, unknowns.clone(), boundary).map_err(|e| e.to_string())?;
        let sols: Vec<ScalarField<f64>> = [
            Scheme::Relaxation,
            Scheme::ConjugateGradient,
            Scheme::Direct,
        ]
        .into_iter()
        .map(|sc| {
            harmonic::solve(&p, &SolverConfig::default().with_scheme(sc), None).map(|s| s.field)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| format!("case {case}: {e}"))?;
        for a in &sols {
            for b in &sols {
                worst = worst.max(max_diff(a, b, &unknowns));
            }
            for (i, u) in unknowns.iter().enumerate() {
                worst = worst.max((a.values[u] - oracle[i]).abs());
            }
        }
    }
    ensure(worst < 1e-5, || format!("max disagreement {worst:.3e}"))?;
    Ok(format!(
        "50 problems, 3 schemes + test oracle, max disagreement {worst:.3e}"
    ))
}

fn c7_energy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sweeps = 0;
    for case in 0..20 {
        let (g, unknowns, boundary) = random_problem(&mut rng, 500);
        // Rounding bound for summing the per-edge terms; true increases are far larger.
        let slack = g.edge_count() as f64 * f64::EPSILON;
        let p = DirichletProblem::new(&g, unknowns, boundary).map_err(|e| e.to_string())?;
        let x0 = harmonic::initial_values(&p, Init::Random { seed: case }, None);
        let mut r = Relaxation::new(&p, x0);
        let mut e = r.energy();
        let mut k = 0;
        while r.residual() >= EPS && k < 100 * p.len() {
            r.sweep(SweepOrder::GaussSeidel);
            let next = r.energy();
            ensure(next <= e * (1.0 + slack), || {
                format!("case {case} sweep {k}: {e:e} -> {next:e}")
            })?;
            e = next;
            k += 1;
        }
        sweeps += k;
    }
    Ok(format!("20 problems, {sweeps} sweeps, energy non-increasing on every sweep (up to summation rounding)"))
}

fn surface_checks(
    mesh: &Mesh<f64>,
    samples: &SampleSet<f64>,
    r: &pipeline::SurfaceResult<f64>,
) -> Result<(), String> {
    let part = &r.partition;
    for v in samples.vertices() {
        ensure(part.network.contains(v), || {
            format!("sample {v} is off the network")
        })?;
    }
    ensure(part.network.is_connected(mesh.vertex_count()), || {
        "network is disconnected".into()
    })?;
    ensure(part.euler.iter().all(|&e| e == Some(1)), || {
        format!("euler {:?}", part.euler)
    })?;
    for (c, comp) in part.components.iter().enumerate() {
        let ring = part.ring(mesh, c);
        let b: BTreeMap<usize, f64> = ring.iter().map(|&v| (v, r.field.values[&v])).collect();
        let (lo, hi) = b
            .values()
            .fold((f64::MAX, f64::MIN), |(a, z), &x| (a.min(x), z.max(x)));
        for v in comp {
            let x = r.field.values[v];
            ensure(lo <= x && x <= hi, || {
                format!("component {c}: {x} outside [{lo}, {hi}]")
            })?;
        }
        let p = DirichletProblem::new(mesh.graph(), comp.iter().copied(), b)
            .map_err(|e| e.to_string())?;
        let res = harmonic::harmonic_residual(&r.field, &p).map_err(|e| e.to_string())?;
        ensure(res < EPS, || format!("component {c}: residual {res:e}"))?;
        ensure(r.report.components[c].converged, || {
            format!("component {c} did not converge")
        })?;
    }
    Ok(())
}

fn c8_five_samples() -> Check {
    let mesh =
        Mesh::<f64>::load(fixture("sphere66.off"), MeshFormat::Off).map_err(|e| e.to_string())?;
    let s = SampleSet::load(fixture("sphere66_five.csv"), mesh.vertex_count())
        .map_err(|e| e.to_string())?;
    ensure(mesh.vertex_count() == 66 && s.len() == 5, || {
        "fixture shape".into()
    })?;
    let r = pipeline::run_surface_pipeline(&mesh, &s, &PipelineConfig::default())
        .map_err(|e| e.to_string())?;
    let k = r.partition.components.len();
    ensure(k == 2, || format!("{k} components, want 2"))?;
    surface_checks(&mesh, &s, &r)?;
    Ok(format!(
        "2 components ({} + {} vertices), euler 1 each, residuals {:.2e} / {:.2e}",
        r.partition.components[0].len(),
        r.partition.components[1].len(),
        r.report.components[0].residual,
        r.report.components[1].residual
    ))
}

fn c9_twelve_samples() -> Check {
    let mesh =
        Mesh::<f64>::load(fixture("sphere258.off"), MeshFormat::Off).map_err(|e| e.to_string())?;
    let s = SampleSet::load(fixture("sphere258_twelve.csv"), mesh.vertex_count())
        .map_err(|e| e.to_string())?;
    ensure(s.len() == 12, || "fixture shape".into())?;
    let mut summary = Vec::new();
    for algo in ["link", "geodesic"] {
        let mut cfg = PipelineConfig::default();
        cfg.set("partition", algo).map_err(|e| e.to_string())?;
        let r =
            pipeline::run_surface_pipeline(&mesh, &s, &cfg).map_err(|e| format!("{algo}: {e}"))?;
        let k = r.partition.components.len();
        ensure(k >= 2, || format!("{algo}: {k} components"))?;
        surface_checks(&mesh, &s, &r).map_err(|e| format!("{algo}: {e}"))?;
        summary.push(format!("{algo}: {k} components"));
    }
    Ok(format!(
        "{}; all simply connected and converged",
        summary.join(", ")
    ))
}

fn c10_volume() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = VolumeGrid::full([4, 4, 4], Adjacency::Six).unwrap();
    let b: BTreeMap<usize, f64> = grid
        .boundary_cells()
        .into_iter()
        .map(|c| (c, rng.gen_range(-1.0..1.0)))
        .collect();
    let bf = ScalarField::new(FieldDomain::VolumeCells, b.clone());
    let s = harmonic::fill_volume(&grid, &bf, &SolverConfig::default(), None)
        .map_err(|e| e.to_string())?;
    let unknowns = grid.interior_cells();
    let exact = dense_harmonic(&grid.graph(), &unknowns, &b);
    let e4 = unknowns
        .iter()
        .zip(&exact)
        .map(|(c, x)| (s.field.values[c] - x).abs())
        .fold(0.0, f64::max);
    ensure(e4 < 1e-6, || format!("4^3 oracle error {e4:e}"))?;

    let grid = VolumeGrid::full([8, 8, 8], Adjacency::Six).unwrap();
    let z = |c: usize| grid.coords(c)[2] as f64;
    let bf = ScalarField::new(
        FieldDomain::VolumeCells,
        grid.boundary_cells()
            .into_iter()
            .map(|c| (c, z(c)))
            .collect(),
    );
    let s = harmonic::fill_volume(&grid, &bf, &SolverConfig::default(), None)
        .map_err(|e| e.to_string())?;
    let e8 = grid
        .interior_cells()
        .iter()
        .map(|&c| (s.field.values[&c] - z(c)).abs())
        .fold(0.0, f64::max);
    ensure(e8 < 1e-6, || format!("8^3 z-linear error {e8:e}"))?;

    let grid = VolumeGrid::load(fixture("lshape.vox")).map_err(|e| e.to_string())?;
    let b: BTreeMap<usize, f64> = grid
        .boundary_cells()
        .into_iter()
        .map(|c| (c, rng.gen_range(-1.0..1.0)))
        .collect();
    let (lo, hi) = b
        .values()
        .fold((f64::MAX, f64::MIN), |(a, z), &x| (a.min(x), z.max(x)));
    let s = harmonic::fill_volume(
        &grid,
        &ScalarField::new(FieldDomain::VolumeCells, b),
        &SolverConfig::default(),
        None,
    )
    .and_then(|s| s.require_converged())
    .map_err(|e| format!("L-shape: {e}"))?;
    for c in grid.interior_cells() {
        let x = s.field.values[&c];
        ensure(lo <= x && x <= hi, || {
            format!("L-shape cell {c}: {x} outside [{lo}, {hi}]")
        })?;
    }
    Ok(format!(
        "4^3 oracle error {e4:.2e}, 8^3 z-linear error {e8:.2e}, L-shape converged in {} sweeps within range",
        s.iterations
    ))
}

fn run_cli(dir: &Path, tag: &str) -> Result<(Vec<u8>, String), String> {
    let field = dir.join(format!("{tag}.csv"));
    let report = dir.join(format!("{tag}.txt"));
    let out = Command::new(env!("CARGO_BIN_EXE_surfharm"))
        .arg("reconstruct")
        .arg("--mesh")
        .arg(fixture("sphere258.off"))
        .arg("--samples")
        .arg(fixture("sphere258_twelve.csv"))
        .args(["--init", "random", "--seed", "42"])
        .arg("--out-field")
        .arg(&field)
        .arg("--report")
        .arg(&report)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let csv = std::fs::read(&field).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(&report).map_err(|e| e.to_string())?;
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("time.")).collect();
    Ok((csv, kept.join("\n")))
}

fn c11_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (f1, r1) = run_cli(dir.path(), "a")?;
    let (f2, r2) = run_cli(dir.path(), "b")?;
    ensure(f1 == f2, || "field CSVs differ".into())?;
    ensure(r1 == r2, || "reports differ".into())?;
    let lines = f1.iter().filter(|&&b| b == b'\n').count();
    Ok(format!(
        "two runs byte-identical ({lines} field lines, {} report lines)",
        r1.lines().count()
    ))
}

fn main() {
    let criteria: [(&str, &str, u64, fn() -> Check); 11] = [
        ("1", "gvf feasibility vs enumeration", 30, c1_feasibility),
        ("2", "gvf extension validity", 5, c2_gvf_validity),
        ("3", "harmonic uniqueness", 5, c3_uniqueness),
        ("4", "maximum principle", 30, c4_maximum_principle),
        ("5", "linear reproduction", 10, c5_linear),
        ("6", "solver equivalence", 60, c6_equivalence),
        ("7", "energy monotonicity", 10, c7_energy),
        ("8", "five samples on a sphere", 5, c8_five_samples),
        ("9", "twelve samples", 10, c9_twelve_samples),
        ("10", "volume fill", 10, c10_volume),
        ("11", "determinism", 5, c11_determinism),
    ];
    let mut failed = BTreeSet::new();
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let over = took > Duration::from_secs(budget);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; took longer than {budget} s")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed.insert(id);
        }
        println!(
            "[{status}] C{id} {name}: {detail} ({:.2} s)",
            took.as_secs_f64()
        );
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failing {:?}", failed);
        std::process::exit(1);
    }
}
