use nalgebra::DVector;
use serde::Serialize;

use super::FoliationError;
use crate::geometry::{
    field_strength, null_space, rank_f, sorted_svd, ChartPoint, FieldMethod, GeometryError, PotentialSpec,
};

/// Why a leaf trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxSteps,
    RankChange,
    ChartBoundary,
}

/// Polyline approximation of a leaf of the null foliation of F.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafPath {
    pub points: Vec<ChartPoint>,
    pub step: f64,
    pub termination: Termination,
}

impl LeafPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

enum StepFailure {
    Rank,
    Chart,
}

struct NullField<'a> {
    spec: &'a PotentialSpec,
    rank: usize,
    tol: f64,
    /// Stages closer than this to the excluded set end the trace.
    margin: f64,
}

impl NullField<'_> {
    /// Unit null vector at `x`, oriented along `reference`. For a null space
    /// of dimension > 1 this is the normalized projection of `reference`.
    fn tangent(
        &self,
        template: &ChartPoint,
        x: &DVector<f64>,
        reference: &DVector<f64>,
    ) -> Result<DVector<f64>, StepFailure> {
        let point = ChartPoint::new(template.chart(), x.iter().copied().collect()).map_err(|_| StepFailure::Chart)?;
        self.spec.check_point(&point).map_err(|_| StepFailure::Chart)?;
        if self.spec.distance_to_excluded(&point) < self.margin {
            return Err(StepFailure::Chart);
        }
        let f = field_strength(self.spec, &point, FieldMethod::Exact).map_err(|_| StepFailure::Chart)?;
        if rank_f(&f, self.tol) != self.rank {
            return Err(StepFailure::Rank);
        }
        let basis = null_space(&f, self.tol);
        if basis.len() == 1 {
            let mut t = basis[0].clone();
            if t.dot(reference) < 0.0 {
                t.neg_mut();
            }
            return Ok(t);
        }
        let v = project(&basis, reference);
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(StepFailure::Rank);
        }
        Ok(v / norm)
    }
}

fn project(basis: &[DVector<f64>], v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for b in basis {
        out.axpy(b.dot(v), b, 1.0);
    }
    out
}

/// Trace the leaf through `start` with fixed-step RK4 on the unit null vector
/// field. Requires a one-dimensional null space at `start`. The trace stops
/// with [`Termination::ChartBoundary`] once a stage comes within `h` of the
/// excluded set of the chart.
pub fn trace_leaf(
    spec: &PotentialSpec,
    start: &ChartPoint,
    h: f64,
    max_steps: usize,
    tol: f64,
) -> Result<LeafPath, FoliationError> {
    trace_leaf_with_direction(spec, start, h, max_steps, tol, None)
}

/// As [`trace_leaf`], with an initial direction that selects the curve when
/// the null space has dimension > 1. Subsequent tangents are the previous
/// tangent projected onto the local null space.
pub fn trace_leaf_with_direction(
    spec: &PotentialSpec,
    start: &ChartPoint,
    h: f64,
    max_steps: usize,
    tol: f64,
    direction: Option<&[f64]>,
) -> Result<LeafPath, FoliationError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(FoliationError::InvalidStep(h));
    }
    spec.check_point(start)?;
    let n = start.dim();
    let f0 = field_strength(spec, start, FieldMethod::Exact)?;
    let rank = rank_f(&f0, tol);
    if rank == 0 {
        return Err(FoliationError::RankZero);
    }
    if rank == n {
        return Err(FoliationError::FullRank);
    }
    let basis = null_space(&f0, tol);
    let initial = match (basis.len(), direction) {
        (1, None) => basis[0].clone(),
        (d, None) => return Err(FoliationError::AmbiguousNullSpace { dim: d }),
        (_, Some(dir)) => {
            if dir.len() != n {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: dir.len(),
                }
                .into());
            }
            let v = project(&basis, &DVector::from_column_slice(dir));
            let norm = v.norm();
            if !(norm > 1e-10) {
                return Err(FoliationError::DirectionOutsideNullSpace);
            }
            v / norm
        }
    };

    let field = NullField {
        spec,
        rank,
        tol,
        margin: h,
    };
    let mut points = vec![start.clone()];
    let mut x = start.to_vector();
    let mut previous = initial;
    let mut termination = Termination::MaxSteps;
    for _ in 0..max_steps {
        let step = (|| {
            let k1 = field.tangent(start, &x, &previous)?;
            let k2 = field.tangent(start, &(&x + &k1 * (h / 2.0)), &k1)?;
            let k3 = field.tangent(start, &(&x + &k2 * (h / 2.0)), &k1)?;
            let k4 = field.tangent(start, &(&x + &k3 * h), &k1)?;
            let next = &x + (k1.clone() + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            // the endpoint must itself be admissible
            field.tangent(start, &next, &k1)?;
            Ok::<_, StepFailure>((next, k1))
        })();
        match step {
            Ok((next, k1)) => {
                points.push(start.with_coords(next.iter().copied().collect()));
                x = next;
                previous = k1;
            }
            Err(StepFailure::Rank) => {
                termination = Termination::RankChange;
                break;
            }
            Err(StepFailure::Chart) => {
                termination = Termination::ChartBoundary;
                break;
            }
        }
    }
    Ok(LeafPath {
        points,
        step: h,
        termination,
    })
}

/// max over interior points of ‖F ẋ‖ / (‖F‖₂ ‖ẋ‖), ẋ by central differences.
/// Points where F vanishes contribute 0.
pub fn eom_residual(spec: &PotentialSpec, path: &LeafPath) -> Result<f64, FoliationError> {
    if path.points.len() < 3 {
        return Err(FoliationError::PathTooShort { len: path.points.len() });
    }
    let mut worst: f64 = 0.0;
    for k in 1..path.points.len() - 1 {
        let velocity = (path.points[k + 1].to_vector() - path.points[k - 1].to_vector()) / 2.0;
        let speed = velocity.norm();
        if !(speed > 0.0) {
            return Err(FoliationError::DegeneratePath { index: k });
        }
        let f = field_strength(spec, &path.points[k], FieldMethod::Exact)?;
        let (sigma, _, _) = sorted_svd(f.entries());
        let sigma_max = sigma.first().copied().unwrap_or(0.0);
        if sigma_max == 0.0 {
            continue;
        }
        let r = (f.entries() * &velocity).norm() / (sigma_max * speed);
        worst = worst.max(r);
    }
    Ok(worst)
}
