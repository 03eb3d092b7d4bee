use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Chart, ChartPoint, GeometryError};

/// Radial profile ρ(r) = coeff·r^exponent of the disc potential A = ρ(r) dφ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoProfile {
    pub coeff: f64,
    pub exponent: f64,
}

impl Default for RhoProfile {
    /// ρ = r²/2, the flat form dx∧dy inside the disc.
    fn default() -> Self {
        Self {
            coeff: 0.5,
            exponent: 2.0,
        }
    }
}

impl RhoProfile {
    pub fn value(&self, r: f64) -> f64 {
        self.coeff * r.powf(self.exponent)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.coeff * self.exponent * r.powf(self.exponent - 1.0)
    }

    /// ρ(r)/r², the Cartesian prefactor of (−y, x).
    fn cartesian_factor(&self, r: f64) -> f64 {
        self.coeff * r.powf(self.exponent - 2.0)
    }

    /// ρ′(r)/r, the Cartesian field strength F_xy.
    pub(crate) fn cartesian_field(&self, r: f64) -> f64 {
        self.coeff * self.exponent * r.powf(self.exponent - 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

impl Monomial {
    fn eval(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .fold(self.coeff, |acc, (&e, &xi)| acc * xi.powi(e as i32))
    }

    fn partial(&self, axis: usize, x: &[f64]) -> f64 {
        let e = self.exponents[axis];
        if e == 0 {
            return 0.0;
        }
        self.exponents
            .iter()
            .zip(x)
            .enumerate()
            .fold(self.coeff * e as f64, |acc, (i, (&ei, &xi))| {
                let power = if i == axis { ei - 1 } else { ei };
                acc * xi.powi(power as i32)
            })
    }
}

/// User potential: one monomial list per component A_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialPotential {
    pub dimension: usize,
    pub components: Vec<Vec<Monomial>>,
}

impl PolynomialPotential {
    pub fn zero(dimension: usize) -> Self {
        Self {
            dimension,
            components: vec![Vec::new(); dimension],
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let poly: Self = serde_json::from_str(text)
            .map_err(|e| GeometryError::InvalidSpec(format!("custom potential JSON: {e}")))?;
        poly.validate()?;
        Ok(poly)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial potential serializes")
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.dimension < 2 {
            return Err(GeometryError::InvalidSpec(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        if self.components.len() != self.dimension {
            return Err(GeometryError::InvalidSpec(format!(
                "{} components for dimension {}",
                self.components.len(),
                self.dimension
            )));
        }
        for m in self.components.iter().flatten() {
            if m.exponents.len() != self.dimension {
                return Err(GeometryError::InvalidSpec(format!(
                    "monomial has {} exponents, expected {}",
                    m.exponents.len(),
                    self.dimension
                )));
            }
            if !m.coeff.is_finite() {
                return Err(GeometryError::InvalidSpec("non-finite coefficient".into()));
            }
        }
        Ok(())
    }
}

/// A gauge potential A_i together with the charts it is defined on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    /// A = ρ(r) dφ for r ≤ r0, zero outside.
    Disc {
        r0: f64,
        rho: RhoProfile,
    },
    /// A = −(y/2) dx + (x/2) dy on ℝ³.
    Stack,
    /// Dirac monopole of integer charge N on ℝ³ \ {0}.
    Monopole {
        charge: i64,
    },
    /// A_j = ½ F_ij x^i with F = Σ dx^{2k} ∧ dx^{2k+1}, k < pairs.
    Darboux {
        pairs: usize,
        dim: usize,
    },
    Custom(PolynomialPotential),
}

impl PotentialSpec {
    pub fn disc(r0: f64, rho: RhoProfile) -> Result<Self, GeometryError> {
        let spec = PotentialSpec::Disc { r0, rho };
        spec.validate()?;
        Ok(spec)
    }

    pub fn monopole(charge: i64) -> Result<Self, GeometryError> {
        let spec = PotentialSpec::Monopole { charge };
        spec.validate()?;
        Ok(spec)
    }

    pub fn darboux(pairs: usize, dim: usize) -> Result<Self, GeometryError> {
        let spec = PotentialSpec::Darboux { pairs, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(poly: PolynomialPotential) -> Result<Self, GeometryError> {
        poly.validate()?;
        Ok(PotentialSpec::Custom(poly))
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            PotentialSpec::Disc { r0, rho } => {
                if !(r0.is_finite() && *r0 > 0.0) {
                    return Err(GeometryError::InvalidSpec(format!(
                        "disc radius must be positive, got {r0}"
                    )));
                }
                if !(rho.coeff.is_finite() && rho.coeff != 0.0) {
                    return Err(GeometryError::InvalidSpec(
                        "ρ coefficient must be finite and non-zero".into(),
                    ));
                }
                if !(rho.exponent.is_finite() && rho.exponent >= 2.0) {
                    return Err(GeometryError::InvalidSpec(format!(
                        "ρ exponent must be at least 2 for a regular potential at the origin, got {}",
                        rho.exponent
                    )));
                }
                Ok(())
            }
            PotentialSpec::Stack => Ok(()),
            PotentialSpec::Monopole { charge } => {
                if *charge == 0 {
                    Err(GeometryError::InvalidSpec(
                        "monopole charge must be a non-zero integer".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            PotentialSpec::Darboux { pairs, dim } => {
                if *dim < 2 || 2 * pairs > *dim {
                    Err(GeometryError::InvalidSpec(format!(
                        "darboux needs 2p <= n and n >= 2, got p = {pairs}, n = {dim}"
                    )))
                } else {
                    Ok(())
                }
            }
            PotentialSpec::Custom(poly) => poly.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Disc { .. } => "disc",
            PotentialSpec::Stack => "stack",
            PotentialSpec::Monopole { .. } => "monopole",
            PotentialSpec::Darboux { .. } => "darboux",
            PotentialSpec::Custom(_) => "custom",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            PotentialSpec::Disc { .. } => 2,
            PotentialSpec::Stack | PotentialSpec::Monopole { .. } => 3,
            PotentialSpec::Darboux { dim, .. } => *dim,
            PotentialSpec::Custom(poly) => poly.dimension,
        }
    }

    pub fn charts(&self) -> &'static [Chart] {
        match self {
            PotentialSpec::Disc { .. } => &[Chart::Cartesian, Chart::Polar],
            PotentialSpec::Monopole { .. } => {
                &[Chart::North, Chart::South, Chart::SphericalNorth, Chart::SphericalSouth]
            }
            _ => &[Chart::Cartesian],
        }
    }

    pub fn default_chart(&self) -> Chart {
        self.charts()[0]
    }

    /// Checks that `p` is a valid point of one of this potential's charts.
    pub fn check_point(&self, p: &ChartPoint) -> Result<(), GeometryError> {
        if !self.charts().contains(&p.chart()) {
            return Err(GeometryError::UnsupportedChart {
                preset: self.name(),
                chart: p.chart(),
            });
        }
        if p.dim() != self.dimension() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dimension(),
                got: p.dim(),
            });
        }
        let x = p.coords();
        let excluded = |reason: &'static str| {
            Err(GeometryError::ExcludedPoint {
                chart: p.chart(),
                coords: x.to_vec(),
                reason,
            })
        };
        match p.chart() {
            Chart::Cartesian => Ok(()),
            Chart::Polar if x[0] < 0.0 => excluded("negative radius"),
            Chart::Polar => Ok(()),
            Chart::North if x[0] == 0.0 && x[1] == 0.0 && x[2] <= 0.0 => excluded("z + r = 0"),
            Chart::South if x[0] == 0.0 && x[1] == 0.0 && x[2] >= 0.0 => excluded("z - r = 0"),
            Chart::North | Chart::South => Ok(()),
            Chart::SphericalNorth | Chart::SphericalSouth => {
                if x[0] <= 0.0 {
                    excluded("r must be positive")
                } else if !(0.0..=PI).contains(&x[1]) {
                    excluded("polar angle outside [0, π]")
                } else if p.chart() == Chart::SphericalNorth && x[1] == PI {
                    excluded("south pole lies outside the north patch")
                } else if p.chart() == Chart::SphericalSouth && x[1] == 0.0 {
                    excluded("north pole lies outside the south patch")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Euclidean coordinate distance from `p` to the excluded set of its chart.
    pub fn distance_to_excluded(&self, p: &ChartPoint) -> f64 {
        let x = p.coords();
        let planar = || x[0].hypot(x[1]);
        match p.chart() {
            Chart::Cartesian => f64::INFINITY,
            Chart::Polar => x[0],
            Chart::North => {
                if x[2] <= 0.0 {
                    planar()
                } else {
                    p.norm()
                }
            }
            Chart::South => {
                if x[2] >= 0.0 {
                    planar()
                } else {
                    p.norm()
                }
            }
            Chart::SphericalNorth | Chart::SphericalSouth => x[0].min(x[1]).min(PI - x[1]),
        }
    }
}

fn monopole_half_charge(charge: i64) -> f64 {
    0.5 * charge as f64
}

/// Components A_i(p) in the coordinates of p's chart.
pub fn evaluate_potential(spec: &PotentialSpec, p: &ChartPoint) -> Result<DVector<f64>, GeometryError> {
    spec.check_point(p)?;
    let x = p.coords();
    let n = spec.dimension();
    let mut a = DVector::zeros(n);
    match spec {
        PotentialSpec::Disc { r0, rho } => match p.chart() {
            Chart::Polar => {
                if x[0] <= *r0 {
                    a[1] = rho.value(x[0]);
                }
            }
            _ => {
                let r = x[0].hypot(x[1]);
                if r <= *r0 {
                    let g = rho.cartesian_factor(r);
                    a[0] = -x[1] * g;
                    a[1] = x[0] * g;
                }
            }
        },
        PotentialSpec::Stack => {
            a[0] = -0.5 * x[1];
            a[1] = 0.5 * x[0];
        }
        PotentialSpec::Monopole { charge } => {
            let half_n = monopole_half_charge(*charge);
            match p.chart() {
                Chart::SphericalNorth => a[2] = half_n * (1.0 - x[1].cos()),
                Chart::SphericalSouth => a[2] = half_n * (-1.0 - x[1].cos()),
                chart => {
                    let r = p.norm();
                    let sign = if chart == Chart::North { 1.0 } else { -1.0 };
                    let h = half_n / (r * (x[2] + sign * r));
                    a[0] = -x[1] * h;
                    a[1] = x[0] * h;
                }
            }
        }
        PotentialSpec::Darboux { pairs, .. } => {
            for k in 0..*pairs {
                a[2 * k] = -0.5 * x[2 * k + 1];
                a[2 * k + 1] = 0.5 * x[2 * k];
            }
        }
        PotentialSpec::Custom(poly) => {
            for (i, comp) in poly.components.iter().enumerate() {
                a[i] = comp.iter().map(|m| m.eval(x)).sum();
            }
        }
    }
    Ok(a)
}

/// Exact Jacobian J with J[(i, k)] = ∂_i A_k.
pub fn potential_jacobian(spec: &PotentialSpec, p: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
    spec.check_point(p)?;
    let x = p.coords();
    let n = spec.dimension();
    let mut j = DMatrix::zeros(n, n);
    match spec {
        PotentialSpec::Disc { r0, rho } => match p.chart() {
            Chart::Polar => {
                if x[0] <= *r0 {
                    j[(0, 1)] = rho.derivative(x[0]);
                }
            }
            _ => {
                let (px, py) = (x[0], x[1]);
                let r = px.hypot(py);
                if r <= *r0 {
                    // A = g(r)(−y, x), g = c r^{k−2}; g′(r)/r = c(k−2) r^{k−4}
                    let g = rho.cartesian_factor(r);
                    let dg_over_r = if rho.exponent == 2.0 || r == 0.0 {
                        0.0
                    } else {
                        rho.coeff * (rho.exponent - 2.0) * r.powf(rho.exponent - 4.0)
                    };
                    j[(0, 0)] = -py * px * dg_over_r;
                    j[(1, 0)] = -g - py * py * dg_over_r;
                    j[(0, 1)] = g + px * px * dg_over_r;
                    j[(1, 1)] = px * py * dg_over_r;
                }
            }
        },
        PotentialSpec::Stack => {
            j[(0, 1)] = 0.5;
            j[(1, 0)] = -0.5;
        }
        PotentialSpec::Monopole { charge } => {
            let half_n = monopole_half_charge(*charge);
            match p.chart() {
                Chart::SphericalNorth | Chart::SphericalSouth => {
                    j[(1, 2)] = half_n * x[1].sin();
                }
                chart => {
                    let (px, py, pz) = (x[0], x[1], x[2]);
                    let r = p.norm();
                    let s = if chart == Chart::North { 1.0 } else { -1.0 };
                    // h = N/2 / q with q = r z + s r²
                    let q = r * pz + s * r * r;
                    let h = half_n / q;
                    let dq = [
                        pz * px / r + 2.0 * s * px,
                        pz * py / r + 2.0 * s * py,
                        pz * pz / r + r + 2.0 * s * pz,
                    ];
                    for i in 0..3 {
                        let dh = -h * dq[i] / q;
                        j[(i, 0)] = -py * dh;
                        j[(i, 1)] = px * dh;
                    }
                    j[(1, 0)] -= h;
                    j[(0, 1)] += h;
                }
            }
        }
        PotentialSpec::Darboux { pairs, .. } => {
            for k in 0..*pairs {
                j[(2 * k, 2 * k + 1)] = 0.5;
                j[(2 * k + 1, 2 * k)] = -0.5;
            }
        }
        PotentialSpec::Custom(poly) => {
            for (k, comp) in poly.components.iter().enumerate() {
                for i in 0..n {
                    j[(i, k)] = comp.iter().map(|m| m.partial(i, x)).sum();
                }
            }
        }
    }
    Ok(j)
}

/// Central-difference Jacobian of `evaluate_potential`, J[(i, k)] ≈ ∂_i A_k.
pub fn potential_jacobian_fd(spec: &PotentialSpec, p: &ChartPoint, step: f64) -> Result<DMatrix<f64>, GeometryError> {
    spec.check_point(p)?;
    let distance = spec.distance_to_excluded(p);
    if !(step > 0.0) || distance <= 2.0 * step {
        return Err(GeometryError::StencilOutsideChart {
            chart: p.chart(),
            step,
            distance,
        });
    }
    let n = spec.dimension();
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let plus = evaluate_potential(spec, &p.shifted(i, step))?;
        let minus = evaluate_potential(spec, &p.shifted(i, -step))?;
        for k in 0..n {
            j[(i, k)] = (plus[k] - minus[k]) / (2.0 * step);
        }
    }
    Ok(j)
}
