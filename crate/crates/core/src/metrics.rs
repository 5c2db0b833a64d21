//! Error norms between densities on a shared grid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::density::DensityField;
use crate::error::{Error, Result};

fn check_grids(a: &DensityField, b: &DensityField) -> Result<()> {
    if a.grid.len() != b.grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            a.grid.len(),
            b.grid.len()
        )));
    }
    let tol = 1e-9 * a.spacing().abs();
    if let Some((i, (x, y))) = a
        .grid
        .iter()
        .zip(&b.grid)
        .enumerate()
        .find(|(_, (x, y))| (*x - *y).abs() > tol)
    {
        return Err(Error::GridMismatch(format!("point {i}: {x} vs {y}")));
    }
    Ok(())
}

/// `(∫ |P̂ - P̃|² dx)^{1/2}` by the composite trapezoid rule on the grid.
pub fn l2_error(phat: &DensityField, ptilde: &DensityField) -> Result<f64> {
    check_grids(phat, ptilde)?;
    let n = phat.len();
    let dx = phat.spacing();
    let s: f64 = phat
        .values
        .iter()
        .zip(&ptilde.values)
        .enumerate()
        .map(|(i, (a, b))| {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            w * (a - b) * (a - b)
        })
        .sum();
    Ok((dx * s).sqrt())
}

/// `max |P̂ - P̃|` over the grid.
pub fn linf_error(phat: &DensityField, ptilde: &DensityField) -> Result<f64> {
    check_grids(phat, ptilde)?;
    Ok(phat
        .values
        .iter()
        .zip(&ptilde.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `Δx Σ p`.
pub fn total_mass(field: &DensityField) -> f64 {
    field.spacing() * field.values.iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub method: String,
    pub reference: String,
    pub time: f64,
    pub l2: f64,
    pub linf: f64,
    pub n_points: usize,
    pub spacing: f64,
}

impl ErrorReport {
    pub fn compare(
        method: impl Into<String>,
        phat: &DensityField,
        reference: impl Into<String>,
        ptilde: &DensityField,
    ) -> Result<Self> {
        Ok(Self {
            method: method.into(),
            reference: reference.into(),
            time: phat.time,
            l2: l2_error(phat, ptilde)?,
            linf: linf_error(phat, ptilde)?,
            n_points: phat.len(),
            spacing: phat.spacing(),
        })
    }
}

/// `method,time,l2,linf` rows.
pub fn error_table_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from("method,time,l2,linf\n");
    for r in reports {
        writeln!(out, "{},{},{:e},{:e}", r.method, r.time, r.l2, r.linf).unwrap();
    }
    out
}

pub fn write_error_table(dir: &Path, reports: &[ErrorReport]) -> Result<PathBuf> {
    let path = dir.join("errors.csv");
    std::fs::write(&path, error_table_csv(reports)).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
