use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::union_find::DisjointSet;
use super::FoliationError;
use crate::geometry::{field_strength, rank_f, Chart, ChartPoint, FieldMethod, PotentialSpec};

/// One axis of a grid, parsed from `min:max:cells`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl FromStr for GridAxis {
    type Err = FoliationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FoliationError::InvalidGrid(format!("expected min:max:cells, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let max = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let cells = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Ok(Self { min, max, cells })
    }
}

/// Regular cell grid over a bounding box of one chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    axes: Vec<GridAxis>,
    exclude_radius: f64,
    chart: Chart,
}

impl GridSpec {
    pub fn new(axes: Vec<GridAxis>, exclude_radius: f64, chart: Chart) -> Result<Self, FoliationError> {
        if axes.len() < 2 {
            return Err(FoliationError::InvalidGrid("grid needs at least two axes".into()));
        }
        for (k, a) in axes.iter().enumerate() {
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(FoliationError::InvalidGrid(format!(
                    "axis {k}: need finite min < max, got {}..{}",
                    a.min, a.max
                )));
            }
            if a.cells < 2 {
                return Err(FoliationError::InvalidGrid(format!("axis {k}: need at least 2 cells")));
            }
        }
        if !(exclude_radius >= 0.0 && exclude_radius.is_finite()) {
            return Err(FoliationError::InvalidGrid(format!(
                "excluded radius must be finite and non-negative, got {exclude_radius}"
            )));
        }
        Ok(Self {
            axes,
            exclude_radius,
            chart,
        })
    }

    /// The same `min:max:cells` axis repeated `dim` times.
    pub fn uniform(dim: usize, min: f64, max: f64, cells: usize, chart: Chart) -> Result<Self, FoliationError> {
        Self::new(vec![GridAxis { min, max, cells }; dim], 0.0, chart)
    }

    pub fn with_exclude_radius(mut self, radius: f64) -> Result<Self, FoliationError> {
        self.exclude_radius = radius;
        Self::new(self.axes, radius, self.chart)
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn exclude_radius(&self) -> f64 {
        self.exclude_radius
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.cells).product()
    }

    /// Row-major strides: the last axis varies fastest.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for k in (0..self.dim() - 1).rev() {
            strides[k] = strides[k + 1] * self.axes[k + 1].cells;
        }
        strides
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        self.strides()
            .iter()
            .zip(&self.axes)
            .map(|(&s, a)| (flat / s) % a.cells)
            .collect()
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.min + (i as f64 + 0.5) * (a.max - a.min) / a.cells as f64)
            .collect()
    }
}

/// Per-region summary entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub label: usize,
    pub rank: usize,
    pub cells: usize,
}

/// Cell ranks and face-connected equal-rank region labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    grid: GridSpec,
    /// `None` marks an excluded cell.
    ranks: Vec<Option<usize>>,
    labels: Vec<Option<usize>>,
    regions: Vec<RegionSummary>,
    touches_boundary: Vec<bool>,
}

impl RegionMap {
    /// Labels face-connected cells of equal rank. Labels are contiguous and
    /// assigned in row-major order of first appearance.
    pub fn from_ranks(grid: GridSpec, ranks: Vec<Option<usize>>) -> Self {
        assert_eq!(ranks.len(), grid.cell_count(), "one rank per cell");
        let strides = grid.strides();
        let dims: Vec<usize> = grid.axes.iter().map(|a| a.cells).collect();
        let mut sets = DisjointSet::new(ranks.len());
        for (flat, rank) in ranks.iter().enumerate() {
            let Some(rank) = rank else { continue };
            let index = grid.multi_index(flat);
            for axis in 0..dims.len() {
                if index[axis] + 1 < dims[axis] {
                    let neighbour = flat + strides[axis];
                    if ranks[neighbour] == Some(*rank) {
                        sets.union(flat, neighbour);
                    }
                }
            }
        }

        let mut root_label: Vec<Option<usize>> = vec![None; ranks.len()];
        let mut labels = vec![None; ranks.len()];
        let mut regions: Vec<RegionSummary> = Vec::new();
        let mut touches_boundary: Vec<bool> = Vec::new();
        for (flat, rank) in ranks.iter().enumerate() {
            let Some(rank) = rank else { continue };
            let root = sets.find(flat);
            let label = *root_label[root].get_or_insert_with(|| {
                regions.push(RegionSummary {
                    label: regions.len(),
                    rank: *rank,
                    cells: 0,
                });
                touches_boundary.push(false);
                regions.len() - 1
            });
            labels[flat] = Some(label);
            regions[label].cells += 1;
            let on_boundary = grid
                .multi_index(flat)
                .iter()
                .zip(&dims)
                .any(|(&i, &d)| i == 0 || i + 1 == d);
            touches_boundary[label] |= on_boundary;
        }

        Self {
            grid,
            ranks,
            labels,
            regions,
            touches_boundary,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ranks(&self) -> &[Option<usize>] {
        &self.ranks
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn regions(&self) -> &[RegionSummary] {
        &self.regions
    }

    /// Whether region `label` contains a cell on the outer face of the grid.
    pub fn touches_boundary(&self, label: usize) -> bool {
        self.touches_boundary[label]
    }

    pub fn excluded_cells(&self) -> usize {
        self.ranks.iter().filter(|r| r.is_none()).count()
    }

    /// CSV with header `i,j[,k],x,y[,z],rank,region` in row-major cell order.
    pub fn to_csv(&self) -> String {
        let dim = self.grid.dim();
        let (index_names, coord_names): (Vec<String>, Vec<String>) = if dim <= 3 {
            (
                ["i", "j", "k"][..dim].iter().map(|s| s.to_string()).collect(),
                ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect(),
            )
        } else {
            (
                (0..dim).map(|k| format!("i{k}")).collect(),
                (0..dim).map(|k| format!("x{k}")).collect(),
            )
        };
        let mut out = String::new();
        let _ = writeln!(out, "{},{},rank,region", index_names.join(","), coord_names.join(","));
        for flat in 0..self.ranks.len() {
            let index = self.grid.multi_index(flat);
            let center = self.grid.cell_center(flat);
            for i in &index {
                let _ = write!(out, "{i},");
            }
            for c in &center {
                let _ = write!(out, "{c:?},");
            }
            match (self.ranks[flat], self.labels[flat]) {
                (Some(rank), Some(label)) => {
                    let _ = writeln!(out, "{rank},{label}");
                }
                _ => out.push_str("excluded,-1\n"),
            }
        }
        out
    }

    /// `{"regions":[{"label":..,"rank":..,"cells":..}]}`
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            regions: &'a [RegionSummary],
        }
        serde_json::to_string_pretty(&Summary { regions: &self.regions }).expect("summary serializes")
    }
}

/// Rank of the exact field strength at every cell centre, grouped into
/// connected constant-rank regions.
///
/// Cells whose centre lies inside the excluded ball around the origin, or on
/// the excluded set of the grid's chart, get no rank.
pub fn rank_map(spec: &PotentialSpec, grid: &GridSpec, tol: f64) -> Result<RegionMap, FoliationError> {
    if grid.dim() != spec.dimension() {
        return Err(FoliationError::InvalidGrid(format!(
            "grid has {} axes, potential has dimension {}",
            grid.dim(),
            spec.dimension()
        )));
    }
    if !spec.charts().contains(&grid.chart()) {
        return Err(FoliationError::InvalidGrid(format!(
            "{} potential is not defined on chart {}",
            spec.name(),
            grid.chart()
        )));
    }
    let ranks: Vec<Option<usize>> = (0..grid.cell_count())
        .into_par_iter()
        .map(|flat| {
            let center = grid.cell_center(flat);
            let norm = center.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < grid.exclude_radius() {
                return None;
            }
            let point = ChartPoint::new(grid.chart(), center).ok()?;
            let f = field_strength(spec, &point, FieldMethod::Exact).ok()?;
            Some(rank_f(&f, tol))
        })
        .collect();
    Ok(RegionMap::from_ranks(grid.clone(), ranks))
}
