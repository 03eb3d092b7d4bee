//! Gauge potentials, their field strength 2-form, its rank, null space and
//! pseudo-inverse θ.

mod chart;
mod field;
mod potential;

use thiserror::Error;

pub use chart::{Chart, ChartPoint};
pub(crate) use field::sorted_svd;
pub use field::{
    default_fd_step, field_strength, null_space, orient_last_positive, pseudo_inverse_theta, rank_f, FieldMethod,
    FieldStrengthMatrix, ThetaMatrix, DEFAULT_RANK_TOL,
};
pub use potential::{
    evaluate_potential, potential_jacobian, potential_jacobian_fd, Monomial, PolynomialPotential, PotentialSpec,
    RhoProfile,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point {coords:?} lies on the excluded set of chart {chart}: {reason}")]
    ExcludedPoint {
        chart: Chart,
        coords: Vec<f64>,
        reason: &'static str,
    },
    #[error("preset {preset} is not defined on chart {chart}")]
    UnsupportedChart { preset: &'static str, chart: Chart },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid potential: {0}")]
    InvalidSpec(String),
    #[error("finite-difference stencil with step {step} leaves chart {chart} (distance to excluded set {distance})")]
    StencilOutsideChart { chart: Chart, step: f64, distance: f64 },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}
