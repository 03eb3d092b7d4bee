use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::potential::{potential_jacobian, potential_jacobian_fd};
use super::{Chart, ChartPoint, GeometryError, PotentialSpec};

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum FieldMethod {
    Exact,
    FiniteDifference { step: f64 },
}

impl FieldMethod {
    /// Central differences with the default step h = 1e-5·(1 + ‖p‖).
    pub fn finite_difference_at(p: &ChartPoint) -> Self {
        FieldMethod::FiniteDifference {
            step: default_fd_step(p),
        }
    }
}

pub fn default_fd_step(p: &ChartPoint) -> f64 {
    1e-5 * (1.0 + p.norm())
}

/// Antisymmetric field strength F_ij = ∂_i A_j − ∂_j A_i at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrengthMatrix {
    entries: DMatrix<f64>,
    point: ChartPoint,
    method: FieldMethod,
}

fn antisymmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

impl FieldStrengthMatrix {
    /// Wraps `entries`, replacing them with their antisymmetric part.
    pub fn new(entries: DMatrix<f64>, point: ChartPoint, method: FieldMethod) -> Self {
        assert!(entries.is_square(), "field strength must be square");
        Self {
            entries: antisymmetrize(&entries),
            point,
            method,
        }
    }

    /// A field strength not tied to a potential, attached to the Cartesian origin.
    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        let n = entries.nrows();
        let origin = ChartPoint::new(Chart::Cartesian, vec![0.0; n.max(2)]).expect("origin is a valid point");
        Self::new(entries, origin, FieldMethod::Exact)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn point(&self) -> &ChartPoint {
        &self.point
    }

    pub fn method(&self) -> FieldMethod {
        self.method
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

fn closed_form_field(spec: &PotentialSpec, p: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
    spec.check_point(p)?;
    let x = p.coords();
    let n = spec.dimension();
    let mut f = DMatrix::zeros(n, n);
    let mut set = |i: usize, j: usize, v: f64| {
        f[(i, j)] = v;
        f[(j, i)] = -v;
    };
    match spec {
        PotentialSpec::Disc { r0, rho } => match p.chart() {
            Chart::Polar => {
                if x[0] <= *r0 {
                    set(0, 1, rho.derivative(x[0]));
                }
            }
            _ => {
                let r = x[0].hypot(x[1]);
                if r <= *r0 {
                    set(0, 1, rho.cartesian_field(r));
                }
            }
        },
        PotentialSpec::Stack => set(0, 1, 1.0),
        PotentialSpec::Monopole { charge } => {
            let half_n = 0.5 * *charge as f64;
            if p.chart().is_spherical() {
                set(1, 2, half_n * x[1].sin());
            } else {
                // F_jk = (N/2) ε_ijk x^i / r³
                let r3 = p.norm().powi(3);
                set(0, 1, half_n * x[2] / r3);
                set(1, 2, half_n * x[0] / r3);
                set(2, 0, half_n * x[1] / r3);
            }
        }
        PotentialSpec::Darboux { pairs, .. } => {
            for k in 0..*pairs {
                set(2 * k, 2 * k + 1, 1.0);
            }
        }
        PotentialSpec::Custom(_) => {
            let j = potential_jacobian(spec, p)?;
            return Ok(&j - j.transpose());
        }
    }
    Ok(f)
}

/// Field strength at `p`, either from the closed form of the preset or by
/// central differences of the potential.
pub fn field_strength(
    spec: &PotentialSpec,
    p: &ChartPoint,
    method: FieldMethod,
) -> Result<FieldStrengthMatrix, GeometryError> {
    let raw = match method {
        FieldMethod::Exact => closed_form_field(spec, p)?,
        FieldMethod::FiniteDifference { step } => {
            let j = potential_jacobian_fd(spec, p, step)?;
            &j - j.transpose()
        }
    };
    Ok(FieldStrengthMatrix::new(raw, p.clone(), method))
}

/// Singular values in descending order with the matching right singular vectors
/// (as columns) and left singular vectors (as columns).
pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let n = m.nrows();
    let mut sigma = Vec::with_capacity(n);
    let mut left = DMatrix::zeros(n, n);
    let mut right = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        sigma.push(svd.singular_values[k]);
        left.set_column(col, &u.column(k));
        right.set_column(col, &v_t.row(k).transpose());
    }
    (sigma, left, right)
}

fn rank_from_singular_values(sigma: &[f64], tol: f64) -> usize {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max.max(1.0);
    let count = sigma.iter().filter(|&&s| s > threshold).count();
    count - count % 2
}

/// Even rank of F: singular values above tol·max(1, σ_max), rounded down to even.
pub fn rank_f(f: &FieldStrengthMatrix, tol: f64) -> usize {
    let (sigma, _, _) = sorted_svd(f.entries());
    rank_from_singular_values(&sigma, tol)
}

const AXIS_TIE: f64 = 1e-12;

/// Orthonormal basis of the null space of F, n − rank vectors.
///
/// The basis is canonical: coordinate axes are projected onto the null space,
/// taken in order of decreasing projected length (ties by axis index),
/// Gram–Schmidt orthonormalized, and each vector is oriented so that its last
/// non-zero component is positive.
pub fn null_space(f: &FieldStrengthMatrix, tol: f64) -> Vec<DVector<f64>> {
    let n = f.dim();
    let (sigma, _, right) = sorted_svd(f.entries());
    let rank = rank_from_singular_values(&sigma, tol);
    let nullity = n - rank;
    if nullity == 0 {
        return Vec::new();
    }
    let kernel = right.columns(rank, nullity).into_owned();
    let projector = &kernel * kernel.transpose();

    let mut axes: Vec<(usize, f64)> = (0..n).map(|k| (k, projector.column(k).norm())).collect();
    axes.sort_by(|a, b| {
        if (a.1 - b.1).abs() <= AXIS_TIE {
            a.0.cmp(&b.0)
        } else {
            b.1.total_cmp(&a.1)
        }
    });

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(nullity);
    for (k, _) in axes {
        if basis.len() == nullity {
            break;
        }
        let mut v: DVector<f64> = projector.column(k).into_owned();
        for u in &basis {
            let overlap = u.dot(&v);
            v.axpy(-overlap, u, 1.0);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    for v in &mut basis {
        orient_last_positive(v);
    }
    basis
}

/// Flip `v` so its last component with |c| > 1e-12 is positive.
pub fn orient_last_positive(v: &mut DVector<f64>) {
    if let Some(&c) = v.iter().rev().find(|c| c.abs() > AXIS_TIE) {
        if c < 0.0 {
            v.neg_mut();
        }
    }
}

/// Pseudo-inverse of F restricted to its symplectic block.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    pub entries: DMatrix<f64>,
    pub rank_used: usize,
    pub tolerance: f64,
    /// Set when F has rank 0 and θ is identically zero.
    pub degenerate: bool,
    /// Smallest singular value of F that was inverted (0 when degenerate).
    pub smallest_inverted: f64,
}

impl ThetaMatrix {
    /// max(‖θFθ − θ‖, ‖FθF − F‖) in the entrywise max norm.
    pub fn moore_penrose_residual(&self, f: &FieldStrengthMatrix) -> f64 {
        let t = &self.entries;
        let fm = f.entries();
        let r1 = (t * fm * t - t).amax();
        let r2 = (fm * t * fm - fm).amax();
        r1.max(r2)
    }
}

/// θ with θF = projector onto the symplectic block and θ vanishing on the
/// null space of F.
pub fn pseudo_inverse_theta(f: &FieldStrengthMatrix, tol: f64) -> ThetaMatrix {
    let n = f.dim();
    let (sigma, left, right) = sorted_svd(f.entries());
    let rank = rank_from_singular_values(&sigma, tol);
    let mut theta = DMatrix::zeros(n, n);
    for k in 0..rank {
        theta += right.column(k) * left.column(k).transpose() / sigma[k];
    }
    ThetaMatrix {
        entries: antisymmetrize(&theta),
        rank_used: rank,
        tolerance: tol,
        degenerate: rank == 0,
        smallest_inverted: if rank == 0 { 0.0 } else { sigma[rank - 1] },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RhoProfile;

    fn stack_f() -> FieldStrengthMatrix {
        let p = ChartPoint::cartesian(vec![0.3, -1.0, 2.0]).unwrap();
        field_strength(&PotentialSpec::Stack, &p, FieldMethod::Exact).unwrap()
    }

    #[test]
    fn stack_field_is_dx_wedge_dy() {
        let f = stack_f();
        let mut expected = DMatrix::zeros(3, 3);
        expected[(0, 1)] = 1.0;
        expected[(1, 0)] = -1.0;
        assert_eq!(f.entries(), &expected);
        assert_eq!(rank_f(&f, DEFAULT_RANK_TOL), 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero_and_full_null_space() {
        let f = FieldStrengthMatrix::from_entries(DMatrix::zeros(3, 3));
        assert_eq!(rank_f(&f, DEFAULT_RANK_TOL), 0);
        let f2 = FieldStrengthMatrix::from_entries(DMatrix::zeros(2, 2));
        let basis = null_space(&f2, DEFAULT_RANK_TOL);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0].as_slice(), &[1.0, 0.0]);
        assert_eq!(basis[1].as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn stack_null_space_is_positive_z() {
        let basis = null_space(&stack_f(), DEFAULT_RANK_TOL);
        assert_eq!(basis.len(), 1);
        assert!((basis[0].clone() - DVector::from_vec(vec![0.0, 0.0, 1.0])).amax() < 1e-15);
    }

    #[test]
    fn monopole_null_space_is_radial() {
        let spec = PotentialSpec::monopole(1).unwrap();
        let p = ChartPoint::new(Chart::North, vec![1.0, 0.0, 0.0]).unwrap();
        let f = field_strength(&spec, &p, FieldMethod::Exact).unwrap();
        assert_eq!(rank_f(&f, DEFAULT_RANK_TOL), 2);
        let basis = null_space(&f, DEFAULT_RANK_TOL);
        assert_eq!(basis.len(), 1);
        assert!((basis[0].clone() - DVector::from_vec(vec![1.0, 0.0, 0.0])).amax() < 1e-15);
        assert!((f.entries() * &basis[0]).amax() < 1e-15);
    }

    #[test]
    fn theta_of_canonical_block() {
        let f = FieldStrengthMatrix::from_entries(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let theta = pseudo_inverse_theta(&f, DEFAULT_RANK_TOL);
        assert_eq!(theta.entries, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert!(!theta.degenerate);
    }

    #[test]
    fn theta_of_stack_is_block_inverse() {
        let f = stack_f();
        let theta = pseudo_inverse_theta(&f, DEFAULT_RANK_TOL);
        let projector = &theta.entries * f.entries();
        let mut expected = DMatrix::zeros(3, 3);
        expected[(0, 0)] = 1.0;
        expected[(1, 1)] = 1.0;
        assert!((projector - expected).amax() < 1e-15);
        assert!(theta.moore_penrose_residual(&f) < 1e-15);
        assert_eq!(theta.entries[(0, 1)], -1.0);
    }

    #[test]
    fn theta_of_zero_is_degenerate() {
        let f = FieldStrengthMatrix::from_entries(DMatrix::zeros(3, 3));
        let theta = pseudo_inverse_theta(&f, DEFAULT_RANK_TOL);
        assert!(theta.degenerate);
        assert_eq!(theta.entries, DMatrix::zeros(3, 3));
    }

    #[test]
    fn disc_interior_and_exterior_ranks() {
        let spec = PotentialSpec::disc(1.0, RhoProfile::default()).unwrap();
        let inside = ChartPoint::cartesian(vec![0.2, 0.3]).unwrap();
        let outside = ChartPoint::cartesian(vec![1.2, 0.3]).unwrap();
        let f_in = field_strength(&spec, &inside, FieldMethod::Exact).unwrap();
        let f_out = field_strength(&spec, &outside, FieldMethod::Exact).unwrap();
        assert_eq!(f_in.entries()[(0, 1)], 1.0);
        assert_eq!(rank_f(&f_in, DEFAULT_RANK_TOL), 2);
        assert_eq!(rank_f(&f_out, DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn stencil_crossing_dirac_string_is_refused() {
        let spec = PotentialSpec::monopole(1).unwrap();
        let p = ChartPoint::new(Chart::North, vec![1e-6, 0.0, -1.0]).unwrap();
        let err = field_strength(&spec, &p, FieldMethod::FiniteDifference { step: 1e-5 }).unwrap_err();
        assert!(matches!(err, GeometryError::StencilOutsideChart { .. }));
    }
}
