use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Coordinate chart a point is expressed in.
///
/// `North`/`South` are the two Cartesian patches of the monopole bundle
/// (ℝ³ minus the negative resp. positive z half-axis). The spherical charts use
/// coordinates (r, ϑ, φ) with the matching patch gauge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Cartesian,
    Polar,
    North,
    South,
    SphericalNorth,
    SphericalSouth,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Cartesian => "cartesian",
            Chart::Polar => "polar",
            Chart::North => "north",
            Chart::South => "south",
            Chart::SphericalNorth => "spherical-north",
            Chart::SphericalSouth => "spherical-south",
        }
    }

    pub fn is_spherical(self) -> bool {
        matches!(self, Chart::SphericalNorth | Chart::SphericalSouth)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Chart {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cartesian" => Ok(Chart::Cartesian),
            "polar" => Ok(Chart::Polar),
            "north" => Ok(Chart::North),
            "south" => Ok(Chart::South),
            "spherical-north" | "spherical" => Ok(Chart::SphericalNorth),
            "spherical-south" => Ok(Chart::SphericalSouth),
            other => Err(GeometryError::InvalidPoint(format!("unknown chart `{other}`"))),
        }
    }
}

/// A point of configuration space in a named chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    chart: Chart,
    coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: Chart, coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.len() < 2 {
            return Err(GeometryError::InvalidPoint(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Self { chart, coords })
    }

    pub fn cartesian(coords: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(Chart::Cartesian, coords)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Same chart, new coordinates. Finite values are the caller's responsibility.
    pub(crate) fn with_coords(&self, coords: Vec<f64>) -> Self {
        Self {
            chart: self.chart,
            coords,
        }
    }

    /// Point displaced by `delta` along coordinate axis `axis`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Self {
        let mut coords = self.coords.clone();
        coords[axis] += delta;
        self.with_coords(coords)
    }

    /// Pairs (x⁰, x¹), (x², x³), … into complex coordinates a = x + iy.
    /// A trailing unpaired coordinate is ignored.
    pub fn complex_pairs(&self) -> Vec<Complex<f64>> {
        self.coords
            .chunks_exact(2)
            .map(|pair| Complex::new(pair[0], pair[1]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_or_non_finite_points() {
        assert!(ChartPoint::cartesian(vec![1.0]).is_err());
        assert!(ChartPoint::cartesian(vec![1.0, f64::NAN]).is_err());
        assert!(ChartPoint::cartesian(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn complex_view_pairs_consecutive_coordinates() {
        let p = ChartPoint::cartesian(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let a = p.complex_pairs();
        assert_eq!(a, vec![Complex::new(1.0, 2.0), Complex::new(3.0, 4.0)]);
    }

    #[test]
    fn chart_names_round_trip() {
        for chart in [
            Chart::Cartesian,
            Chart::Polar,
            Chart::North,
            Chart::South,
            Chart::SphericalNorth,
            Chart::SphericalSouth,
        ] {
            assert_eq!(chart.name().parse::<Chart>().unwrap(), chart);
        }
    }
}
