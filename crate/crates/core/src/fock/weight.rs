use serde::{Deserialize, Serialize};

use super::FockError;
use crate::quadrature::{integrate, integrate_semi_infinite, QuadratureOptions};
use crate::special::{beta, gamma, ln_gamma, lower_incomplete_gamma};

/// Radial profile of the Kähler weight e^{−2φ(x)/ħ}, x = aā.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// φ = x/2, weight e^{−x/ħ}.
    Plane,
    /// φ = x/2 on [0, r0²], weight 0 beyond.
    Disc { r0: f64 },
    /// weight (1+x)^{−M}.
    Monopole { m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KahlerWeight {
    pub kind: WeightKind,
    pub hbar: f64,
}

impl KahlerWeight {
    pub fn plane(hbar: f64) -> Result<Self, FockError> {
        Self::new(WeightKind::Plane, hbar)
    }

    pub fn disc(r0: f64, hbar: f64) -> Result<Self, FockError> {
        Self::new(WeightKind::Disc { r0 }, hbar)
    }

    /// Monopole weight with exponent M = N/ħ.
    pub fn monopole(m: f64, hbar: f64) -> Result<Self, FockError> {
        Self::new(WeightKind::Monopole { m }, hbar)
    }

    pub fn new(kind: WeightKind, hbar: f64) -> Result<Self, FockError> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(FockError::InvalidWeight(format!(
                "ħ must be positive and finite, got {hbar}"
            )));
        }
        match kind {
            WeightKind::Plane => {}
            WeightKind::Disc { r0 } => {
                if !(r0 > 0.0 && r0.is_finite()) {
                    return Err(FockError::InvalidWeight(format!(
                        "r0 must be positive and finite, got {r0}"
                    )));
                }
            }
            WeightKind::Monopole { m } => {
                if !m.is_finite() {
                    return Err(FockError::InvalidWeight(format!("M must be finite, got {m}")));
                }
                if m <= 2.0 {
                    return Err(FockError::Divergent {
                        what: format!("monopole weight with M = {m}: c_1 diverges, no excited normalizable state"),
                    });
                }
            }
        }
        Ok(Self { kind, hbar })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WeightKind::Plane => "plane",
            WeightKind::Disc { .. } => "disc",
            WeightKind::Monopole { .. } => "monopole",
        }
    }

    /// Largest n with convergent c_n, `None` when all converge.
    pub fn k_max(&self) -> Option<usize> {
        match self.kind {
            WeightKind::Monopole { m } => Some((m.ceil() as usize).saturating_sub(2)),
            _ => None,
        }
    }

    /// Whether ∫ w(x) x^s (1+x)^{−k} dx over the support converges.
    pub fn moment_converges(&self, s: f64, k: f64) -> bool {
        if s <= -1.0 {
            return false;
        }
        match self.kind {
            WeightKind::Monopole { m } => s - m - k < -1.0,
            _ => true,
        }
    }

    fn log_weight(&self, x: f64) -> f64 {
        match self.kind {
            WeightKind::Plane => -x / self.hbar,
            WeightKind::Disc { r0 } => {
                if x <= r0 * r0 {
                    -x / self.hbar
                } else {
                    f64::NEG_INFINITY
                }
            }
            WeightKind::Monopole { m } => -m * x.ln_1p(),
        }
    }
}

/// Rescaled integrand in log form: the integral is returned as exp(shift)·I.
fn log_integrand(weight: &KahlerWeight, s: f64, k: f64, x: f64) -> f64 {
    let mut v = weight.log_weight(x);
    if s != 0.0 {
        v += s * x.ln();
    }
    if k != 0.0 {
        v -= k * x.ln_1p();
    }
    v
}

/// ∫ w(x) x^s (1+x)^{−k} dx by adaptive Gauss–Kronrod quadrature.
///
/// Convergence is decided from the tail exponent before integrating. The
/// integrand is divided by its maximum on a coarse sample so that the absolute
/// tolerance acts on an O(1) quantity.
pub fn moment_quadrature(weight: &KahlerWeight, s: f64, k: f64, opts: &QuadratureOptions) -> Result<f64, FockError> {
    if !weight.moment_converges(s, k) {
        return Err(FockError::Divergent {
            what: format!("moment x^{s}(1+x)^-{k} of the {} weight", weight.name()),
        });
    }
    let scale = match weight.kind {
        WeightKind::Plane | WeightKind::Disc { .. } => weight.hbar * s.max(1.0),
        WeightKind::Monopole { .. } => 1.0,
    };
    let upper = match weight.kind {
        WeightKind::Disc { r0 } => Some(r0 * r0),
        _ => None,
    };
    let sample = |x: f64| log_integrand(weight, s, k, x);
    let shift = (1..256)
        .map(|j| {
            let t = j as f64 / 256.0;
            match upper {
                Some(b) => sample(b * t),
                None => sample(scale * t / (1.0 - t)),
            }
        })
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(FockError::Divergent {
            what: format!("moment x^{s}(1+x)^-{k} has no finite sample"),
        });
    }
    let f = |x: f64| {
        let v = sample(x) - shift;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let value = match upper {
        Some(b) => integrate(f, 0.0, b, opts)?.value,
        None => scale * integrate_semi_infinite(|u| f(scale * u), 0.0, opts)?.value,
    };
    Ok(value * shift.exp())
}

/// c_n = ∫₀^∞ e^{−2φ(x)/ħ} xⁿ dx by quadrature.
pub fn cn_quadrature(weight: &KahlerWeight, n: u32, opts: &QuadratureOptions) -> Result<f64, FockError> {
    if !weight.moment_converges(n as f64, 0.0) {
        return Err(FockError::Divergent {
            what: format!("c_{n} of the {} weight", weight.name()),
        });
    }
    moment_quadrature(weight, n as f64, 0.0, opts)
}

/// c_n in closed form: Γ(n+1)ħ^{n+1} (plane), ħ^{n+1}γ(n+1, r0²/ħ) (disc),
/// B(n+1, M−n−1) (monopole).
pub fn cn_closed_form(weight: &KahlerWeight, n: u32) -> Result<f64, FockError> {
    let a = n as f64 + 1.0;
    let h = weight.hbar;
    let value = match weight.kind {
        WeightKind::Plane => {
            let direct = gamma(a) * h.powi(n as i32 + 1);
            if direct.is_finite() && direct > 0.0 {
                direct
            } else {
                (ln_gamma(a) + a * h.ln()).exp()
            }
        }
        WeightKind::Disc { r0 } => h.powi(n as i32 + 1) * lower_incomplete_gamma(a, r0 * r0 / h),
        WeightKind::Monopole { m } => {
            if a >= m {
                return Err(FockError::Divergent {
                    what: format!(
                        "c_{n} of the monopole weight: pole of B(n+1, M−n−1) at n ≥ M−1 = {}",
                        m - 1.0
                    ),
                });
            }
            beta(a, m - a)
        }
    };
    Ok(value)
}
