//! Weighted Fock spaces of holomorphic functions for radially symmetric
//! Kähler weights, their ladder and Toeplitz operators, and the su(2)
//! structure of the monopole space.

mod json17;
mod operators;
mod semiclassical;
mod space;
mod su2;
mod weight;

use thiserror::Error;

use crate::quadrature::QuadratureError;

pub use json17::to_json_17;
pub use operators::{
    commutator_matrix, lowering_matrix, raising_matrix, toeplitz_matrix, toeplitz_monomial, OperatorMatrix, Symbol,
    SymbolTerm, C64,
};
pub use semiclassical::{
    monopole_check, semiclassical_check, semiclassical_trend, sphere_coordinate_operators, toeplitz_commutator_norm,
    MonopoleCheck, PlaneCheck, SemiclassicalReport, TrendReport, PLANE_HBARS, TREND_RANGE,
};
pub use space::{
    build_space, build_space_with, BuildOptions, CnMethod, WeightedFockSpace, CROSS_CHECK_TOL, DEFAULT_TRUNCATION,
};
pub use su2::{spin_operators, su2_report, Su2Report, Su2Residuals, LADDER_TOL, LAMBDA_FIT_LIMIT};
pub use weight::{cn_closed_form, cn_quadrature, moment_quadrature, KahlerWeight, WeightKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("divergent integral: {what}")]
    Divergent { what: String },
    #[error("divergent Toeplitz moment: {what}")]
    DivergentMoment { what: String },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("c_{n}: closed form {closed_form:e} and quadrature {quadrature:e} differ by {relative:e} (relative)")]
    CrossCheck {
        n: usize,
        closed_form: f64,
        quadrature: f64,
        relative: f64,
    },
    #[error("c_{n} = {value} is not a positive finite number")]
    NonPositive { n: usize, value: f64 },
    #[error("monopole exponent M = {0} is not an integer: the finite-dimensional representation needs integer M")]
    NonIntegerExponent(f64),
    #[error("truncation K = {k} exceeds the last normalizable index {k_max}")]
    TruncationTooLarge { k: usize, k_max: usize },
    #[error("a single state carries no ladder operators")]
    NoLadder,
    #[error("no prefactor closes su(2): best residual {residual:e}")]
    NoLambda { residual: f64 },
    #[error("{0}")]
    Unsupported(String),
}
