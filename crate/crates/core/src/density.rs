//! Densities sampled on a uniform grid, shared by every solver.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Density values at uniformly spaced points (cell centers for LDG and
/// histograms, nodes for finite differences), each point standing for a
/// cell of width `spacing()`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
}

impl DensityField {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, time: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidInput(
                "a density grid needs at least two points".into(),
            ));
        }
        Ok(Self { grid, values, time })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: &[f64], time: f64, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: grid.to_vec(),
            values: grid.iter().map(|&x| f(x)).collect(),
            time,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for (x, p) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{x},{p}").unwrap();
        }
        out
    }

    /// `density_t<time>.csv`, e.g. `density_t0.5.csv`.
    pub fn csv_file_name(&self) -> String {
        format!("density_t{}.csv", self.time)
    }

    /// Writes the CSV into `dir` and returns the file path.
    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.csv_file_name());
        std::fs::write(&path, self.to_csv()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Snapshots of a solver run plus the mass history.
#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    pub snapshots: Vec<DensityField>,
    /// `∫ p dx` at each snapshot.
    pub mass: Vec<f64>,
    pub initial_mass: f64,
    /// Time steps taken.
    pub steps: usize,
    /// Smallest step actually used.
    pub min_step: f64,
}

impl DensityTrajectory {
    pub fn max_mass_drift(&self) -> f64 {
        self.mass
            .iter()
            .map(|m| (m - self.initial_mass).abs())
            .fold(0.0, f64::max)
    }

    pub fn at_time(&self, t: f64) -> Option<&DensityField> {
        self.snapshots
            .iter()
            .find(|s| (s.time - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Cell-centered grid of `n` points covering `[a, b]`.
pub fn midpoint_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..n).map(|i| a + (i as f64 + 0.5) * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema() {
        let d = DensityField::new(vec![0.0, 0.5], vec![1.0, 0.25], 0.5).unwrap();
        assert_eq!(d.to_csv(), "x,p\n0,1\n0.5,0.25\n");
        assert_eq!(d.csv_file_name(), "density_t0.5.csv");
        let d30 = DensityField::new(vec![0.0, 1.0], vec![0.0, 0.0], 30.0).unwrap();
        assert_eq!(d30.csv_file_name(), "density_t30.csv");
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(DensityField::new(vec![0.0, 1.0], vec![0.0], 0.0).is_err());
    }
}
