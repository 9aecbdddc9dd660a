use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-manifold edge ({0}, {1}) borders more than two faces")]
    NonManifoldEdge(usize, usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("no path between vertices {from} and {to}")]
    NoPath { from: usize, to: usize },

    /// A pair of samples violates `d(x, y) >= |i - j|`.
    #[error(
        "no gradually varied extension exists: samples {x} and {y} are {distance} apart but {level_gap} levels apart"
    )]
    Infeasible {
        x: usize,
        y: usize,
        level_gap: u32,
        distance: f64,
    },

    #[error("pathological curve: {0}")]
    Pathological(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("singular Dirichlet problem: {0}")]
    Singular(String),

    #[error("no value for vertex {0}")]
    MissingValue(usize),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("solver breakdown: {0}")]
    Breakdown(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code for the CLI: 2 infeasible levels, 3 topology or
    /// pathological curve, 4 non-convergence, 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Infeasible { .. } => 2,
            Error::Topology(_) | Error::Pathological(_) => 3,
            Error::NotConverged { .. } => 4,
            _ => 1,
        }
    }
}
