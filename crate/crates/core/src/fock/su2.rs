use nalgebra::DMatrix;
use serde::Serialize;

use super::json17::to_json_17;
use super::operators::{commutator, max_abs, OperatorMatrix, C64};
use super::space::WeightedFockSpace;
use super::weight::WeightKind;
use super::FockError;

/// Residual above which no prefactor is accepted.
pub const LAMBDA_FIT_LIMIT: f64 = 1e-6;
/// Agreement required of the fitted ladder with √(J(J+1) − m(m+1)).
pub const LADDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2Residuals {
    /// max(‖[J_z,J_+] − J_+‖, ‖[J_z,J_−] + J_−‖)
    pub z_ladder: f64,
    /// ‖[J_+,J_−] − 2J_z‖
    pub plus_minus: f64,
    /// ‖J_z² + ½(J_+J_− + J_−J_+) − J(J+1)·I‖
    pub casimir: f64,
}

impl Su2Residuals {
    pub fn max(&self) -> f64 {
        self.z_ladder.max(self.plus_minus).max(self.casimir)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Report {
    pub m: f64,
    pub dimension: usize,
    pub spin: f64,
    /// Least-squares prefactor of J_± = λ·â†(1+ââ†)^{−1}, λ·(1+ââ†)^{−1}â.
    pub lambda_fit: f64,
    pub residuals_fit: Su2Residuals,
    /// The prefactor N/ħ = M.
    pub lambda_nominal: f64,
    pub residuals_nominal: Su2Residuals,
    /// Dimension implied by N/ħ = 2J + 1, to compare with `dimension`.
    pub nominal_dimension: f64,
    /// max |(J_+)_{n−1,n} − √(J(J+1) − m(m+1))| at λ_fit, m = J − n.
    pub ladder_element_error: f64,
    /// Diagonal of 1 + ââ†.
    pub one_plus_aadag: Vec<f64>,
    /// Fitted residuals and ladder elements both within [`LADDER_TOL`].
    pub passed: bool,
}

impl Su2Report {
    /// JSON with every float printed to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json_17(&serde_json::to_value(self).expect("report serializes"))
    }
}

/// J_+, J_−, J_z on the monopole space for prefactor `lambda`.
pub fn spin_operators(space: &WeightedFockSpace, lambda: f64) -> Result<[OperatorMatrix; 3], FockError> {
    let (jp, jm, jz) = spin_matrices(space, lambda)?;
    Ok([
        OperatorMatrix::new("J_plus", jp),
        OperatorMatrix::new("J_minus", jm),
        OperatorMatrix::new("J_z", jz),
    ])
}

fn one_plus_aadag(space: &WeightedFockSpace) -> Vec<f64> {
    let c = space.c();
    (0..space.dim())
        .map(|n| if n == 0 { 1.0 } else { 1.0 + c[n] / c[n - 1] })
        .collect()
}

type Triple = (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>);

fn spin_matrices(space: &WeightedFockSpace, lambda: f64) -> Result<Triple, FockError> {
    if !matches!(space.weight().kind, WeightKind::Monopole { .. }) {
        return Err(FockError::Unsupported("spin operators need a monopole space".into()));
    }
    let d = space.dim();
    if d < 2 {
        return Err(FockError::NoLadder);
    }
    let c = space.c();
    let diag = one_plus_aadag(space);
    let spin = (d as f64 - 1.0) / 2.0;
    let mut jp = DMatrix::<C64>::zeros(d, d);
    let mut jm = DMatrix::<C64>::zeros(d, d);
    let mut jz = DMatrix::<C64>::zeros(d, d);
    for n in 0..d {
        jz[(n, n)] = C64::new(spin - n as f64, 0.0);
        if n >= 1 {
            // (1+ââ†)^{−1} at n, then â† φ_n = √(c_n/c_{n−1}) φ_{n−1}
            jp[(n - 1, n)] = C64::new(lambda * (c[n] / c[n - 1]).sqrt() / diag[n], 0.0);
        }
        if n + 1 < d {
            jm[(n + 1, n)] = C64::new(lambda * (c[n + 1] / c[n]).sqrt() / diag[n + 1], 0.0);
        }
    }
    Ok((jp, jm, jz))
}

fn residuals(jp: &DMatrix<C64>, jm: &DMatrix<C64>, jz: &DMatrix<C64>, spin: f64) -> Su2Residuals {
    let d = jp.nrows();
    let z_plus = max_abs(&(commutator(jz, jp) - jp));
    let z_minus = max_abs(&(commutator(jz, jm) + jm));
    let plus_minus = max_abs(&(commutator(jp, jm) - jz * C64::new(2.0, 0.0)));
    let casimir = jz * jz + (jp * jm + jm * jp) * C64::new(0.5, 0.0)
        - DMatrix::<C64>::identity(d, d) * C64::new(spin * (spin + 1.0), 0.0);
    Su2Residuals {
        z_ladder: z_plus.max(z_minus),
        plus_minus,
        casimir: max_abs(&casimir),
    }
}

/// su(2) check of the monopole space. λ is fitted by least squares of
/// λ²·[Ĵ_+, Ĵ_−] against 2J_z, with Ĵ_± the λ = 1 operators and
/// J_z = diag(J − n).
pub fn su2_report(space: &WeightedFockSpace) -> Result<Su2Report, FockError> {
    let WeightKind::Monopole { m } = space.weight().kind else {
        return Err(FockError::Unsupported("su(2) report needs a monopole space".into()));
    };
    let (jp1, jm1, jz) = spin_matrices(space, 1.0)?;
    let d = space.dim();
    let spin = (d as f64 - 1.0) / 2.0;

    let unit = commutator(&jp1, &jm1);
    let target = &jz * C64::new(2.0, 0.0);
    let num: f64 = unit.iter().zip(target.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let den: f64 = unit.iter().map(|a| a.norm_sqr()).sum();
    if !(num > 0.0 && den > 0.0) {
        return Err(FockError::NoLambda {
            residual: f64::INFINITY,
        });
    }
    let lambda_fit = (num / den).sqrt();

    let (jp, jm, _) = spin_matrices(space, lambda_fit)?;
    let residuals_fit = residuals(&jp, &jm, &jz, spin);
    if residuals_fit.max() > LAMBDA_FIT_LIMIT {
        return Err(FockError::NoLambda {
            residual: residuals_fit.max(),
        });
    }
    let ladder_element_error = (1..d)
        .map(|n| {
            let mq = spin - n as f64;
            let expected = (spin * (spin + 1.0) - mq * (mq + 1.0)).sqrt();
            (jp[(n - 1, n)].re - expected).abs()
        })
        .fold(0.0, f64::max);

    let (jp_nominal, jm_nominal, _) = spin_matrices(space, m)?;
    Ok(Su2Report {
        m,
        dimension: d,
        spin,
        lambda_fit,
        residuals_fit,
        lambda_nominal: m,
        residuals_nominal: residuals(&jp_nominal, &jm_nominal, &jz, spin),
        nominal_dimension: m,
        ladder_element_error,
        one_plus_aadag: one_plus_aadag(space),
        passed: residuals_fit.max() < LADDER_TOL && ladder_element_error < LADDER_TOL,
    })
}
