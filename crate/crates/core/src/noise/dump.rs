//! Binary ensemble dump.
//!
//! Layout, all little-endian:
//!
//! | offset | size | field            |
//! |--------|------|------------------|
//! | 0      | 4    | magic `FPE1`     |
//! | 4      | 8    | H (f64)          |
//! | 12     | 8    | dt (f64)         |
//! | 20     | 8    | n_steps (u64)    |
//! | 28     | 8    | n_paths (u64)    |
//! | 36     | 8    | seed (u64)       |
//! | 44     | 8·n  | increments (f64), row-major `[n_paths × n_steps]` |
//!
//! The kind is not stored: `H = 1/2` decodes as Brownian, anything else as fBm.

use std::io::Write;
use std::path::Path;

use super::{HurstParameter, NoiseKind, NoiseSpec, PathEnsemble};
use crate::error::{Error, Result};

pub const ENSEMBLE_MAGIC: &[u8; 4] = b"FPE1";
pub const ENSEMBLE_HEADER_LEN: usize = 44;

impl PathEnsemble {
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let spec = self.spec();
        w.write_all(ENSEMBLE_MAGIC)?;
        w.write_all(&spec.hurst.value().to_le_bytes())?;
        w.write_all(&spec.dt.to_le_bytes())?;
        w.write_all(&(spec.n_steps as u64).to_le_bytes())?;
        w.write_all(&(spec.n_paths as u64).to_le_bytes())?;
        w.write_all(&spec.seed.to_le_bytes())?;
        for v in self.increments() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(ENSEMBLE_HEADER_LEN + 8 * self.increments().len());
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    /// Decodes a dump, rejecting truncated, oversized or non-finite input.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < ENSEMBLE_HEADER_LEN {
            return Err(Error::Format(format!(
                "{} bytes is shorter than the {ENSEMBLE_HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if &bytes[..4] != ENSEMBLE_MAGIC {
            return Err(Error::Format("bad magic, expected FPE1".into()));
        }
        let word = |offset: usize| -> [u8; 8] { bytes[offset..offset + 8].try_into().unwrap() };
        let h = f64::from_le_bytes(word(4));
        let dt = f64::from_le_bytes(word(12));
        let n_steps = u64::from_le_bytes(word(20));
        let n_paths = u64::from_le_bytes(word(28));
        let seed = u64::from_le_bytes(word(36));

        let hurst = HurstParameter::new(h).map_err(|e| Error::Format(e.to_string()))?;
        let n_steps = usize::try_from(n_steps)
            .map_err(|_| Error::Format("n_steps overflows usize".into()))?;
        let n_paths = usize::try_from(n_paths)
            .map_err(|_| Error::Format("n_paths overflows usize".into()))?;
        let spec = NoiseSpec::new(hurst, dt, n_steps, n_paths, seed)
            .map_err(|e| Error::Format(e.to_string()))?;

        let payload = &bytes[ENSEMBLE_HEADER_LEN..];
        let expected = n_steps
            .checked_mul(n_paths)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Format("declared ensemble size overflows".into()))?;
        if payload.len() != expected {
            return Err(Error::Format(format!(
                "payload holds {} bytes, header declares {expected}",
                payload.len()
            )));
        }
        let increments = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect::<Vec<_>>();
        if let Some(i) = increments.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!("increment {i} is not finite")));
        }
        let kind = if hurst.is_brownian() {
            NoiseKind::Bm
        } else {
            NoiseKind::Fbm
        };
        Ok(PathEnsemble::from_parts(spec, kind, increments))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::generate_paths;

    fn sample() -> PathEnsemble {
        let spec = NoiseSpec::new(HurstParameter::new(0.8).unwrap(), 0.01, 5, 3, 42).unwrap();
        generate_paths(spec, NoiseKind::Fbm).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"FPE1");
        assert_eq!(f64::from_le_bytes(bytes[4..12].try_into().unwrap()), 0.8);
        assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(bytes[28..36].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[36..44].try_into().unwrap()), 42);
        assert_eq!(bytes.len(), ENSEMBLE_HEADER_LEN + 15 * 8);
    }

    #[test]
    fn roundtrip() {
        let ens = sample();
        assert_eq!(PathEnsemble::from_bytes(&ens.to_bytes()).unwrap(), ens);
    }

    #[test]
    fn rejects_truncation_and_garbage() {
        let bytes = sample().to_bytes();
        assert!(PathEnsemble::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(PathEnsemble::from_bytes(&bytes[..10]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(PathEnsemble::from_bytes(&bad).is_err());
        let mut huge = bytes.clone();
        huge[20..28].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(PathEnsemble::from_bytes(&huge).is_err());
        let mut nan = bytes;
        nan[44..52].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(PathEnsemble::from_bytes(&nan).is_err());
    }
}
