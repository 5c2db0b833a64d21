use crate::density::{midpoint_grid, DensityField};
use crate::error::{Error, Result};

/// Histogram bins: `n_bins` equal cells covering `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSpec {
    pub a: f64,
    pub b: f64,
    pub n_bins: usize,
}

impl BinSpec {
    pub fn new(a: f64, b: f64, n_bins: usize) -> Result<Self> {
        if n_bins < 10 {
            return Err(Error::InvalidInput(format!(
                "need at least 10 bins, got {n_bins}"
            )));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bin range needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b, n_bins })
    }

    pub fn width(&self) -> f64 {
        (self.b - self.a) / self.n_bins as f64
    }
}

/// Normalized histogram: `Δx · Σ values` equals the fraction of samples
/// falling in `[a, b]`. The right edge `b` belongs to the last bin.
pub fn estimate_density(samples: &[f64], bins: BinSpec, time: f64) -> Result<DensityField> {
    let BinSpec { a, b, n_bins } = bins;
    let width = bins.width();
    let mut counts = vec![0u64; n_bins];
    let mut inside = 0u64;
    for &x in samples {
        if !(a..=b).contains(&x) {
            continue;
        }
        let i = (((x - a) / width) as usize).min(n_bins - 1);
        counts[i] += 1;
        inside += 1;
    }
    if inside == 0 {
        return Err(Error::InvalidInput(format!(
            "none of the {} samples fall inside [{a}, {b}]",
            samples.len()
        )));
    }
    let scale = 1.0 / (samples.len() as f64 * width);
    let values = counts.iter().map(|&c| c as f64 * scale).collect();
    DensityField::new(midpoint_grid(a, b, n_bins), values, time)
}
