use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::weight::{cn_closed_form, cn_quadrature, KahlerWeight, WeightKind};
use super::FockError;
use crate::quadrature::QuadratureOptions;

pub const DEFAULT_TRUNCATION: usize = 32;
/// Relative agreement required between closed-form and quadrature c_n.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CnMethod {
    ClosedForm,
    Quadrature,
}

impl CnMethod {
    pub fn name(self) -> &'static str {
        match self {
            CnMethod::ClosedForm => "closed_form",
            CnMethod::Quadrature => "quadrature",
        }
    }
}

/// Span of φ_n = aⁿ/√(πc_n), n = 0..=K.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFockSpace {
    weight: KahlerWeight,
    k: usize,
    c: Vec<f64>,
    methods: Vec<CnMethod>,
    /// c_{K+1} when it converges; needed for the last commutator entry.
    c_next: Option<f64>,
    /// Largest relative closed-form/quadrature mismatch seen while building.
    cross_check_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub quadrature: QuadratureOptions,
    pub cross_check_tol: f64,
    /// Test hook: multiply the closed-form c_n at this index by (1 + ε)
    /// before the cross-check.
    pub perturb_closed_form: Option<(usize, f64)>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureOptions::default(),
            cross_check_tol: CROSS_CHECK_TOL,
            perturb_closed_form: None,
        }
    }
}

/// Build with default options.
pub fn build_space(weight: KahlerWeight, k: Option<usize>) -> Result<WeightedFockSpace, FockError> {
    build_space_with(weight, k, &BuildOptions::default())
}

pub fn build_space_with(
    weight: KahlerWeight,
    k: Option<usize>,
    opts: &BuildOptions,
) -> Result<WeightedFockSpace, FockError> {
    if let WeightKind::Monopole { m } = weight.kind {
        if (m - m.round()).abs() > 1e-12 {
            return Err(FockError::NonIntegerExponent(m));
        }
    }
    let k_max = weight.k_max();
    let k = k.unwrap_or(k_max.unwrap_or(DEFAULT_TRUNCATION));
    if let Some(k_max) = k_max {
        if k > k_max {
            return Err(FockError::TruncationTooLarge { k, k_max });
        }
    }
    let last = if k_max.is_some_and(|km| k + 1 > km) { k } else { k + 1 };

    let checked: Vec<(f64, f64)> = (0..=last)
        .into_par_iter()
        .map(|n| {
            let mut closed = cn_closed_form(&weight, n as u32)?;
            if let Some((index, eps)) = opts.perturb_closed_form {
                if index == n {
                    closed *= 1.0 + eps;
                }
            }
            let quad = cn_quadrature(&weight, n as u32, &opts.quadrature)?;
            if !(closed.is_finite() && closed > 0.0) {
                return Err(FockError::NonPositive { n, value: closed });
            }
            let rel = ((closed - quad) / closed).abs();
            if !(rel <= opts.cross_check_tol) {
                return Err(FockError::CrossCheck {
                    n,
                    closed_form: closed,
                    quadrature: quad,
                    relative: rel,
                });
            }
            Ok((closed, rel))
        })
        .collect::<Result<_, _>>()?;

    let cross_check_error = checked.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let mut c: Vec<f64> = checked.into_iter().map(|(v, _)| v).collect();
    let c_next = if last > k { c.pop() } else { None };
    Ok(WeightedFockSpace {
        weight,
        k,
        methods: vec![CnMethod::ClosedForm; c.len()],
        c,
        c_next,
        cross_check_error,
    })
}

impl WeightedFockSpace {
    pub fn weight(&self) -> &KahlerWeight {
        &self.weight
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn c_next(&self) -> Option<f64> {
        self.c_next
    }

    pub fn methods(&self) -> &[CnMethod] {
        &self.methods
    }

    pub fn cross_check_error(&self) -> f64 {
        self.cross_check_error
    }

    /// Test hook: a copy with c_n scaled by (1 + ε), bypassing the cross-check.
    pub fn perturb_cn(&self, n: usize, eps: f64) -> Self {
        let mut out = self.clone();
        if n < out.c.len() {
            out.c[n] *= 1.0 + eps;
        } else if n == out.c.len() {
            if let Some(c) = out.c_next.as_mut() {
                *c *= 1.0 + eps;
            }
        }
        out
    }

    /// Diagonal of [â, â†]: entry n = c_n/c_{n−1} − c_{n+1}/c_n, entry 0 = −c_1/c_0.
    /// Entries 0..K, plus entry K when c_{K+1} converges.
    pub fn commutator_diagonal(&self) -> Vec<f64> {
        let c = &self.c;
        let mut full = c.clone();
        if let Some(next) = self.c_next {
            full.push(next);
        }
        (0..full.len() - 1)
            .map(|n| {
                let down = if n == 0 { 0.0 } else { full[n] / full[n - 1] };
                down - full[n + 1] / full[n]
            })
            .collect()
    }

    /// CSV `n,c_n,method,commutator_entry`; the commutator column is empty
    /// where truncation leaves it undefined.
    pub fn to_csv(&self) -> String {
        let diag = self.commutator_diagonal();
        let mut out = String::from("n,c_n,method,commutator_entry\n");
        for (n, (c, m)) in self.c.iter().zip(&self.methods).enumerate() {
            let entry = diag.get(n).map(|d| format!("{d:?}")).unwrap_or_default();
            let _ = writeln!(out, "{n},{c:?},{},{entry}", m.name());
        }
        out
    }
}
