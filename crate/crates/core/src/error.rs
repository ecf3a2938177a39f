//! One error type for the whole crate. Variants mirror the failure modes of
//! the individual operations; `exit_code` groups them the way the command
//! line tool reports them (2 = rejected input, 3 = numerical failure).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("dilation too large: {0}")]
    DeltaTooLarge(String),

    #[error("degenerate endpoints: points coincide within 1e-12")]
    DegenerateEndpoints,

    #[error("point outside the lattice box: {0}")]
    OutOfBox(String),

    #[error("cost matrix is not square: {rows} rows, {cols} cols")]
    NonSquare { rows: usize, cols: usize },

    #[error("cost matrix has a negative or non-finite entry at ({row},{col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("dual potential gap is positive ({gap:.3e}); input connection is not optimal")]
    GapPositive { gap: f64 },

    #[error("potential is infeasible: {0}")]
    InfeasiblePotential(String),

    #[error("the compact set touches a singularity: {0}")]
    KTouchesSingularity(String),

    #[error("mollifier radius {t:.3e} exceeds the available margin {margin:.3e}")]
    KernelWiderThanMargin { t: f64, margin: f64 },

    #[error("cannot meet the requested eta budget: {0}")]
    EtaBudgetInfeasible(String),

    #[error("marked point must lie in the domain and off the axis segment: {0}")]
    MOnAxis(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),

    #[error("regression degenerate: {0}")]
    FitDegenerate(String),

    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("boundary trace is not unimodular: {0}")]
    TraceNotUnimodular(String),

    #[error("tube radius overlaps neighbouring curves: {0}")]
    TubesOverlap(String),

    #[error("strip condition failed: {0}")]
    StripConditionFailed(String),

    #[error("radial profile unavailable: {0}")]
    ProfileUnavailable(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code the CLI uses for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence(_) | Error::EtaBudgetInfeasible(_) | Error::FitDegenerate(_) => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable kind tag (used in the CLI's error JSON).
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidScene(_) => "invalid_scene",
            Error::DeltaTooLarge(_) => "delta_too_large",
            Error::DegenerateEndpoints => "degenerate_endpoints",
            Error::OutOfBox(_) => "out_of_box",
            Error::NonSquare { .. } => "non_square",
            Error::NegativeEntry { .. } => "negative_entry",
            Error::GapPositive { .. } => "gap_positive",
            Error::InfeasiblePotential(_) => "infeasible_potential",
            Error::KTouchesSingularity(_) => "k_touches_singularity",
            Error::KernelWiderThanMargin { .. } => "kernel_wider_than_margin",
            Error::EtaBudgetInfeasible(_) => "eta_budget_infeasible",
            Error::MOnAxis(_) => "m_on_axis",
            Error::NoConvergence(_) => "no_convergence",
            Error::MeshTooCoarse(_) => "mesh_too_coarse",
            Error::FitDegenerate(_) => "fit_degenerate",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::TraceNotUnimodular(_) => "trace_not_unimodular",
            Error::TubesOverlap(_) => "tubes_overlap",
            Error::StripConditionFailed(_) => "strip_condition_failed",
            Error::ProfileUnavailable(_) => "profile_unavailable",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}
