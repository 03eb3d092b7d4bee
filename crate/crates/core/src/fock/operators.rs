use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use serde_json::json;

use super::space::WeightedFockSpace;
use super::weight::moment_quadrature;
use super::FockError;
use crate::quadrature::QuadratureOptions;

pub type C64 = Complex<f64>;

/// Dense complex matrix on span{φ_0..φ_K}, with a label.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: String,
    pub entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(label: impl Into<String>, entries: DMatrix<C64>) -> Self {
        Self {
            label: label.into(),
            entries,
        }
    }

    pub fn from_real(label: impl Into<String>, entries: &DMatrix<f64>) -> Self {
        Self::new(label, entries.map(|v| C64::new(v, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self, label: impl Into<String>) -> Self {
        Self::new(label, self.entries.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.entries)
    }

    /// `{"label": .., "dim": D, "re": [[..]], "im": [[..]]}`
    pub fn to_json(&self) -> String {
        let n = self.dim();
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&self.entries[(i, j)])).collect())
                .collect()
        };
        let value = json!({
            "label": self.label,
            "dim": n,
            "re": part(|z| z.re),
            "im": part(|z| z.im),
        });
        serde_json::to_string_pretty(&value).expect("operator serializes")
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

/// â: φ_n ↦ √(c_{n+1}/c_n) φ_{n+1}; the image of φ_K is dropped.
pub fn raising_matrix(space: &WeightedFockSpace) -> OperatorMatrix {
    let d = space.dim();
    let c = space.c();
    let mut m = DMatrix::zeros(d, d);
    for n in 0..d.saturating_sub(1) {
        m[(n + 1, n)] = (c[n + 1] / c[n]).sqrt();
    }
    OperatorMatrix::from_real("raising", &m)
}

/// â†, the adjoint of [`raising_matrix`].
pub fn lowering_matrix(space: &WeightedFockSpace) -> OperatorMatrix {
    raising_matrix(space).adjoint("lowering")
}

/// [â, â†] from the truncated matrices. Its last diagonal entry is a
/// truncation artefact.
pub fn commutator_matrix(space: &WeightedFockSpace) -> OperatorMatrix {
    let a = raising_matrix(space).entries;
    let ad = lowering_matrix(space).entries;
    OperatorMatrix::new("commutator", commutator(&a, &ad))
}

/// coeff · a^p ā^q (1 + aā)^{−k}
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolTerm {
    pub coeff: C64,
    pub p: u32,
    pub q: u32,
    pub k: u32,
}

/// A finite sum of radially weighted monomials in a, ā.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Symbol {
    pub terms: Vec<SymbolTerm>,
}

impl Symbol {
    pub fn constant(c: f64) -> Self {
        Self::term(C64::new(c, 0.0), 0, 0, 0)
    }

    pub fn monomial(p: u32, q: u32) -> Self {
        Self::term(C64::new(1.0, 0.0), p, q, 0)
    }

    pub fn term(coeff: C64, p: u32, q: u32, k: u32) -> Self {
        Self {
            terms: vec![SymbolTerm { coeff, p, q, k }],
        }
    }

    pub fn plus(mut self, other: Symbol) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Cartesian coordinates of the unit sphere through stereographic
    /// projection from the south pole: X = (a+ā)/(1+aā),
    /// Y = −i(a−ā)/(1+aā), Z = (1−aā)/(1+aā).
    pub fn sphere_x() -> Self {
        let one = C64::new(1.0, 0.0);
        Self::term(one, 1, 0, 1).plus(Self::term(one, 0, 1, 1))
    }

    pub fn sphere_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::term(-i, 1, 0, 1).plus(Self::term(i, 0, 1, 1))
    }

    pub fn sphere_z() -> Self {
        let one = C64::new(1.0, 0.0);
        Self::term(one, 0, 0, 1).plus(Self::term(-one, 1, 1, 1))
    }
}

/// Toeplitz matrix Q(f)_{nm} = ⟨φ_n, f φ_m⟩. A term a^p ā^q (1+aā)^{−k}
/// contributes only on the band n = m + p − q, with the radial moment
/// ∫ w(x) x^{m+p} (1+x)^{−k} dx computed by quadrature.
pub fn toeplitz_matrix(
    space: &WeightedFockSpace,
    symbol: &Symbol,
    opts: &QuadratureOptions,
) -> Result<OperatorMatrix, FockError> {
    let d = space.dim() as i64;
    let c = space.c();
    let mut moments: HashMap<(u32, u32), f64> = HashMap::new();
    let mut out = DMatrix::<C64>::zeros(d as usize, d as usize);
    for term in &symbol.terms {
        for m in 0..d {
            let n = m + term.p as i64 - term.q as i64;
            if !(0..d).contains(&n) {
                continue;
            }
            let s = (m + term.p as i64) as u32;
            let moment = match moments.get(&(s, term.k)) {
                Some(&v) => v,
                None => {
                    let v = moment_quadrature(space.weight(), s as f64, term.k as f64, opts).map_err(|e| match e {
                        FockError::Divergent { what } => FockError::DivergentMoment { what },
                        other => other,
                    })?;
                    moments.insert((s, term.k), v);
                    v
                }
            };
            out[(n as usize, m as usize)] += term.coeff * (moment / (c[n as usize] * c[m as usize]).sqrt());
        }
    }
    Ok(OperatorMatrix::new("toeplitz", out))
}

/// Q(a^p ā^q).
pub fn toeplitz_monomial(space: &WeightedFockSpace, p: u32, q: u32) -> Result<OperatorMatrix, FockError> {
    toeplitz_matrix(space, &Symbol::monomial(p, q), &QuadratureOptions::default())
}
