//! Piecewise harmonic reconstruction of scalar fields on discrete surfaces.
//!
//! Sparse samples on a closed surface mesh are joined by curves that cut the
//! surface into disk-like patches. Values along the curves are filled in as a
//! gradually varied (discrete 1-Lipschitz) function, and each patch interior
//! is then the solution of the discrete Dirichlet problem: every interior
//! vertex equals the average of its neighbors. A voxelized solid bounded by
//! the surface can be filled the same way from its boundary cells.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below pin the common choices.

pub mod error;
pub mod field;
pub mod graph;
pub mod gvf;
pub mod harmonic;
pub mod mesh;
pub mod metric;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod shapes;
pub mod volume;

pub use error::{Error, Result};
pub use field::{FieldDomain, LevelField, LevelSequence, SampleSet, ScalarField};
pub use graph::Graph;
pub use gvf::{ExtensionRule, QuantizedSamples};
pub use harmonic::{
    DirichletProblem, Init, LinearSystem, Scheme, Solution, SolverConfig, SweepOrder,
};
pub use mesh::{Mesh, MeshFormat};
pub use metric::{DistanceMatrix, DistanceMode};
pub use partition::{CurveNetwork, Partition, PartitionAlgorithm};
pub use pipeline::{ExportDomain, ExportFormat, PipelineConfig, PipelineReport, StageOrder};
pub use scalar::Scalar;
pub use volume::{Adjacency, VolumeGrid};

pub type Mesh64 = Mesh<f64>;
pub type Mesh32 = Mesh<f32>;
pub type SampleSet64 = SampleSet<f64>;
pub type SampleSet32 = SampleSet<f32>;
pub type ScalarField64 = ScalarField<f64>;
pub type ScalarField32 = ScalarField<f32>;
pub type DirichletProblem64 = DirichletProblem<f64>;
pub type DirichletProblem32 = DirichletProblem<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type PipelineConfig64 = PipelineConfig<f64>;
pub type PipelineConfig32 = PipelineConfig<f32>;
