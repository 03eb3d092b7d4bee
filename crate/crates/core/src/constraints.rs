//! Primary constraints κ_i = p_i − A_i, their brackets, the first/second-class
//! split and Dirac brackets of coordinates and momenta.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::geometry::{
    default_fd_step, evaluate_potential, field_strength, null_space, potential_jacobian, pseudo_inverse_theta, rank_f,
    ChartPoint, FieldMethod, GeometryError, PotentialSpec, ThetaMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(
        "rank of F changes from {rank} to {perturbed_rank} within {distance:e} along axis {axis}: the Dirac bracket is not defined at a rank jump"
    )]
    RankBoundary {
        axis: usize,
        rank: usize,
        perturbed_rank: usize,
        distance: f64,
    },
    #[error("Dirac bracket has non-finite entries")]
    NonFinite,
    #[error("invalid Darboux table: {0}")]
    InvalidDarboux(String),
}

/// Position and canonical momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    position: ChartPoint,
    momentum: Vec<f64>,
}

impl PhasePoint {
    pub fn new(position: ChartPoint, momentum: Vec<f64>) -> Result<Self, GeometryError> {
        if momentum.len() != position.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: position.dim(),
                got: momentum.len(),
            });
        }
        if momentum.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::InvalidPoint("momenta must be finite".into()));
        }
        Ok(Self { position, momentum })
    }

    pub fn position(&self) -> &ChartPoint {
        &self.position
    }

    pub fn momentum(&self) -> &[f64] {
        &self.momentum
    }
}

/// κ_i = p_i − A_i(x).
pub fn constraint_values(spec: &PotentialSpec, pp: &PhasePoint) -> Result<DVector<f64>, GeometryError> {
    spec.check_point(pp.position())?;
    let a = evaluate_potential(spec, pp.position())?;
    Ok(DVector::from_column_slice(pp.momentum()) - a)
}

/// {κ_i, κ_j} in the convention −F_ij.
///
/// With {x^i, p_j} = δ^i_j the direct computation gives +F_ij; the matrix
/// returned here carries the opposite sign. Only the rank enters the
/// classification, so nothing downstream depends on the choice.
pub fn constraint_bracket_matrix(spec: &PotentialSpec, x: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
    spec.check_point(x)?;
    let f = field_strength(spec, x, FieldMethod::Exact)?;
    Ok(-f.entries())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintClassification {
    pub rank: usize,
    pub second_class: usize,
    pub first_class: usize,
    /// Orthonormal basis of the null space of F: the gauge directions.
    pub gauge_directions: Vec<Vec<f64>>,
}

pub fn classify_constraints(
    spec: &PotentialSpec,
    x: &ChartPoint,
    tol: f64,
) -> Result<ConstraintClassification, GeometryError> {
    spec.check_point(x)?;
    let f = field_strength(spec, x, FieldMethod::Exact)?;
    let rank = rank_f(&f, tol);
    Ok(ConstraintClassification {
        rank,
        second_class: rank,
        first_class: x.dim() - rank,
        gauge_directions: null_space(&f, tol)
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
    })
}

/// Dirac brackets {x,x} = θ, {x,p} and {p,p} at one point of one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracBracketTable {
    pub point: ChartPoint,
    pub theta: ThetaMatrix,
    pub xp: DMatrix<f64>,
    pub pp: DMatrix<f64>,
    pub classification: ConstraintClassification,
    /// F vanishes at the point: θ = 0 and the brackets are the Poisson ones.
    pub degenerate: bool,
}

impl DiracBracketTable {
    /// {x^i, x^j}_DB
    pub fn xx(&self, i: usize, j: usize) -> f64 {
        self.theta.entries[(i, j)]
    }

    /// {x^i, p_j}_DB
    pub fn xp(&self, i: usize, j: usize) -> f64 {
        self.xp[(i, j)]
    }

    /// {p_i, p_j}_DB
    pub fn pp(&self, i: usize, j: usize) -> f64 {
        self.pp[(i, j)]
    }

    pub fn to_json(&self) -> String {
        let value = json!({
            "point": self.point.coords(),
            "chart": self.point.chart().name(),
            "theta": rows(&self.theta.entries),
            "xp": rows(&self.xp),
            "pp": rows(&self.pp),
            "classification": {
                "second_class": self.classification.second_class,
                "first_class": self.classification.first_class,
            },
            "degenerate": self.degenerate,
        });
        serde_json::to_string_pretty(&value).expect("table serializes")
    }
}

pub(crate) fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Refuses points where the rank of F changes under a shift of ten
/// finite-difference steps along any axis. Shifted points outside the chart
/// are skipped.
fn check_rank_stable(spec: &PotentialSpec, x: &ChartPoint, rank: usize, tol: f64) -> Result<(), ConstraintError> {
    let distance = 10.0 * default_fd_step(x);
    for axis in 0..x.dim() {
        for sign in [-1.0, 1.0] {
            let shifted = x.shifted(axis, sign * distance);
            if spec.check_point(&shifted).is_err() {
                continue;
            }
            let Ok(f) = field_strength(spec, &shifted, FieldMethod::Exact) else {
                continue;
            };
            let perturbed_rank = rank_f(&f, tol);
            if perturbed_rank != rank {
                return Err(ConstraintError::RankBoundary {
                    axis,
                    rank,
                    perturbed_rank,
                    distance,
                });
            }
        }
    }
    Ok(())
}

/// Dirac bracket table with θ the pseudo-inverse of F on its symplectic block:
///
/// {x^i,x^j} = θ^{ij}, {x^i,p_j} = δ^i_j + θ^{ik}∂_jA_k, {p_i,p_j} = θ^{kl}∂_iA_k ∂_jA_l.
pub fn dirac_bracket_table(
    spec: &PotentialSpec,
    x: &ChartPoint,
    tol: f64,
) -> Result<DiracBracketTable, ConstraintError> {
    spec.check_point(x)?;
    let n = x.dim();
    let f = field_strength(spec, x, FieldMethod::Exact)?;
    let rank = rank_f(&f, tol);
    check_rank_stable(spec, x, rank, tol)?;
    let classification = classify_constraints(spec, x, tol)?;
    let theta = pseudo_inverse_theta(&f, tol);
    let jac = potential_jacobian(spec, x)?;
    let xp = DMatrix::identity(n, n) + &theta.entries * jac.transpose();
    let pp = &jac * &theta.entries * jac.transpose();
    let pp = (&pp - pp.transpose()) * 0.5;
    let finite = theta
        .entries
        .iter()
        .chain(xp.iter())
        .chain(pp.iter())
        .all(|v| v.is_finite());
    if !finite {
        return Err(ConstraintError::NonFinite);
    }
    Ok(DiracBracketTable {
        point: x.clone(),
        degenerate: theta.degenerate,
        theta,
        xp,
        pp,
        classification,
    })
}

/// Closed-form table for the Darboux potential A_j = ½F_ij x^i with
/// F = Σ_k dx^{2k} ∧ dx^{2k+1} on the first 2p coordinates.
pub fn darboux_bracket_table(p: usize, n: usize, x: &[f64]) -> Result<DiracBracketTable, ConstraintError> {
    if p == 0 {
        return Err(ConstraintError::InvalidDarboux("p = 0 has no symplectic block".into()));
    }
    if 2 * p > n {
        return Err(ConstraintError::InvalidDarboux(format!(
            "2p = {} exceeds n = {n}",
            2 * p
        )));
    }
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            got: x.len(),
        }
        .into());
    }
    let point = ChartPoint::cartesian(x.to_vec())?;
    let mut theta = DMatrix::zeros(n, n);
    let mut xp = DMatrix::identity(n, n);
    let mut pp = DMatrix::zeros(n, n);
    for k in 0..p {
        let (a, b) = (2 * k, 2 * k + 1);
        theta[(a, b)] = -1.0;
        theta[(b, a)] = 1.0;
        xp[(a, a)] = 0.5;
        xp[(b, b)] = 0.5;
        pp[(a, b)] = -0.25;
        pp[(b, a)] = 0.25;
    }
    let gauge_directions = (2 * p..n)
        .map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
        .collect();
    Ok(DiracBracketTable {
        point,
        theta: ThetaMatrix {
            entries: theta,
            rank_used: 2 * p,
            tolerance: 0.0,
            degenerate: false,
            smallest_inverted: 1.0,
        },
        xp,
        pp,
        classification: ConstraintClassification {
            rank: 2 * p,
            second_class: 2 * p,
            first_class: n - 2 * p,
            gauge_directions,
        },
        degenerate: false,
    })
}

/// max_{ijk} |θ^{il}∂_lθ^{jk} + θ^{jl}∂_lθ^{ki} + θ^{kl}∂_lθ^{ij}| with ∂θ by
/// central differences of step `h`.
pub fn jacobi_residual(spec: &PotentialSpec, x: &ChartPoint, tol: f64, h: f64) -> Result<f64, ConstraintError> {
    let n = x.dim();
    let theta_at = |p: &ChartPoint| -> Result<DMatrix<f64>, ConstraintError> {
        let f = field_strength(spec, p, FieldMethod::Exact)?;
        Ok(pseudo_inverse_theta(&f, tol).entries)
    };
    let theta = theta_at(x)?;
    let mut grads = Vec::with_capacity(n);
    for l in 0..n {
        let plus = theta_at(&x.shifted(l, h))?;
        let minus = theta_at(&x.shifted(l, -h))?;
        grads.push((plus - minus) / (2.0 * h));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s: f64 = (0..n)
                    .map(|l| {
                        theta[(i, l)] * grads[l][(j, k)]
                            + theta[(j, l)] * grads[l][(k, i)]
                            + theta[(k, l)] * grads[l][(i, j)]
                    })
                    .sum();
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}
