use nalgebra::DMatrix;
use serde::Serialize;

use super::operators::{commutator, max_abs, toeplitz_matrix, Symbol, C64};
use super::space::{build_space, WeightedFockSpace};
use super::weight::{KahlerWeight, WeightKind};
use super::FockError;
use crate::quadrature::QuadratureOptions;

pub const PLANE_HBARS: [f64; 3] = [1.0, 0.5, 0.1];
pub const PLANE_RATIO_TOL: f64 = 1e-12;
/// Accepted range for the ratio of closure deviations when M doubles.
pub const TREND_RANGE: (f64, f64) = (0.3, 0.7);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneCheck {
    pub hbars: Vec<f64>,
    /// max over ħ and n of |[â,â†]_nn / ħ + 1|
    pub max_ratio_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonopoleCheck {
    pub m: f64,
    /// ‖Q(X)² + Q(Y)² + Q(Z)² − I‖_max: first-order failure of the sphere relation.
    pub closure_deviation: f64,
    /// max over cyclic pairs of ‖[Q(X),Q(Y)] − α Q(Z)‖_F / ‖[Q(X),Q(Y)]‖_F with the best α.
    pub commutator_deviation: f64,
    /// |α| for the (X, Y) pair, to compare with 2/M.
    pub commutator_coefficient: f64,
    pub expected_coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiclassicalReport {
    pub weight: String,
    pub plane: Option<PlaneCheck>,
    pub monopole: Option<MonopoleCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub m_small: f64,
    pub m_large: f64,
    pub deviation_small: f64,
    pub deviation_large: f64,
    pub ratio: f64,
    pub passed: bool,
}

/// Toeplitz images of the unit-sphere coordinates X, Y, Z.
pub fn sphere_coordinate_operators(
    space: &WeightedFockSpace,
    opts: &QuadratureOptions,
) -> Result<[DMatrix<C64>; 3], FockError> {
    Ok([
        toeplitz_matrix(space, &Symbol::sphere_x(), opts)?.entries,
        toeplitz_matrix(space, &Symbol::sphere_y(), opts)?.entries,
        toeplitz_matrix(space, &Symbol::sphere_z(), opts)?.entries,
    ])
}

fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Best α with [A,B] ≈ α C, and the relative Frobenius residual.
fn proportionality(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>) -> (C64, f64) {
    let comm = commutator(a, b);
    let den: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let num: C64 = c.iter().zip(comm.iter()).map(|(x, y)| x.conj() * y).sum();
    let alpha = num / den;
    let scale = frobenius(&comm);
    let rel = if scale == 0.0 {
        0.0
    } else {
        frobenius(&(&comm - c * alpha)) / scale
    };
    (alpha, rel)
}

pub fn monopole_check(space: &WeightedFockSpace, opts: &QuadratureOptions) -> Result<MonopoleCheck, FockError> {
    let WeightKind::Monopole { m } = space.weight().kind else {
        return Err(FockError::Unsupported("monopole check needs a monopole space".into()));
    };
    let [x, y, z] = sphere_coordinate_operators(space, opts)?;
    let d = space.dim();
    let closure = &x * &x + &y * &y + &z * &z - DMatrix::<C64>::identity(d, d);
    let (alpha, dev_xy) = proportionality(&x, &y, &z);
    let (_, dev_yz) = proportionality(&y, &z, &x);
    let (_, dev_zx) = proportionality(&z, &x, &y);
    Ok(MonopoleCheck {
        m,
        closure_deviation: max_abs(&closure),
        commutator_deviation: dev_xy.max(dev_yz).max(dev_zx),
        commutator_coefficient: alpha.norm(),
        expected_coefficient: 2.0 / m,
    })
}

/// First-order classical-limit checks. Plane: [â,â†]/ħ = −1 for every ħ in
/// [`PLANE_HBARS`] and the space's own ħ. Monopole: the Toeplitz-quantized
/// sphere coordinates close up to O(1/M).
pub fn semiclassical_check(space: &WeightedFockSpace) -> Result<SemiclassicalReport, FockError> {
    let opts = QuadratureOptions::default();
    match space.weight().kind {
        WeightKind::Plane => {
            let mut hbars = PLANE_HBARS.to_vec();
            if !hbars.contains(&space.weight().hbar) {
                hbars.push(space.weight().hbar);
            }
            let mut worst: f64 = 0.0;
            for &h in &hbars {
                let s = build_space(KahlerWeight::plane(h)?, Some(space.truncation()))?;
                for d in s.commutator_diagonal() {
                    worst = worst.max((d / h + 1.0).abs());
                }
            }
            Ok(SemiclassicalReport {
                weight: "plane".into(),
                plane: Some(PlaneCheck {
                    hbars,
                    max_ratio_deviation: worst,
                }),
                monopole: None,
                passed: worst < PLANE_RATIO_TOL,
            })
        }
        WeightKind::Monopole { .. } => {
            let check = monopole_check(space, &opts)?;
            let passed = check.closure_deviation < 1.0 && check.commutator_deviation < 1e-6;
            Ok(SemiclassicalReport {
                weight: "monopole".into(),
                plane: None,
                monopole: Some(check),
                passed,
            })
        }
        WeightKind::Disc { .. } => Err(FockError::Unsupported(
            "semiclassical check covers plane and monopole spaces".into(),
        )),
    }
}

/// Closure deviation of the quantized sphere at M and 2M-style pairs; the
/// ratio should be near ½ for first-order convergence.
pub fn semiclassical_trend(m_small: f64, m_large: f64) -> Result<TrendReport, FockError> {
    let opts = QuadratureOptions::default();
    let small = monopole_check(&build_space(KahlerWeight::monopole(m_small, 1.0)?, None)?, &opts)?;
    let large = monopole_check(&build_space(KahlerWeight::monopole(m_large, 1.0)?, None)?, &opts)?;
    let ratio = large.closure_deviation / small.closure_deviation;
    Ok(TrendReport {
        m_small,
        m_large,
        deviation_small: small.closure_deviation,
        deviation_large: large.closure_deviation,
        ratio,
        passed: (TREND_RANGE.0..=TREND_RANGE.1).contains(&ratio),
    })
}

/// ‖[Q(f), Q(g)]‖_max.
pub fn toeplitz_commutator_norm(space: &WeightedFockSpace, f: &Symbol, g: &Symbol) -> Result<f64, FockError> {
    let opts = QuadratureOptions::default();
    let qf = toeplitz_matrix(space, f, &opts)?.entries;
    let qg = toeplitz_matrix(space, g, &opts)?.entries;
    Ok(max_abs(&commutator(&qf, &qg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_ratio_is_minus_one() {
        let s = build_space(KahlerWeight::plane(0.5).unwrap(), Some(10)).unwrap();
        for d in s.commutator_diagonal() {
            assert_eq!(d / 0.5, -1.0);
        }
        let r = semiclassical_check(&s).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn quantized_sphere_is_scaled_spin() {
        let s = build_space(KahlerWeight::monopole(8.0, 1.0).unwrap(), None).unwrap();
        let c = monopole_check(&s, &QuadratureOptions::default()).unwrap();
        assert!((c.closure_deviation - 0.25).abs() < 1e-8, "{c:?}");
        assert!(c.commutator_deviation < 1e-8);
        assert!((c.commutator_coefficient - 0.25).abs() < 1e-8);
    }

    #[test]
    fn trend_halves() {
        let t = semiclassical_trend(8.0, 16.0).unwrap();
        assert!((t.ratio - 0.5).abs() < 1e-6, "{t:?}");
        assert!(t.passed);
    }

    #[test]
    fn constants_commute() {
        let s = build_space(KahlerWeight::monopole(5.0, 1.0).unwrap(), None).unwrap();
        let norm = toeplitz_commutator_norm(&s, &Symbol::constant(2.0), &Symbol::sphere_x()).unwrap();
        assert!(norm < 1e-12);
    }
}
