//! Binary field dumps: magic `NSF1`, four little-endian `u32` dimensions
//! `(nx, ny, components, nt)`, the row-major little-endian `f64` payload
//! (time slowest, then component, then `x`, then `y`), and a trailing
//! little-endian `u64` FNV-1a checksum of the payload bytes.

use std::path::Path;

use crate::error::{NsfError, Result};

pub const MAGIC: &[u8; 4] = b"NSF1";
const HEADER: usize = 4 + 16;

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub nx: u32,
    pub ny: u32,
    pub components: u32,
    pub nt: u32,
    pub data: Vec<f64>,
}

impl FieldDump {
    pub fn new(nx: u32, ny: u32, components: u32, nt: u32, data: Vec<f64>) -> Result<Self> {
        let want = nx as usize * ny as usize * components as usize * nt as usize;
        if data.len() != want {
            return Err(NsfError::Format(format!("payload has {} values, dimensions need {want}", data.len())));
        }
        Ok(Self { nx, ny, components, nt, data })
    }

    pub fn index(&self, t: usize, c: usize, i: usize, j: usize) -> usize {
        ((t * self.components as usize + c) * self.nx as usize + i) * self.ny as usize + j
    }

    pub fn get(&self, t: usize, c: usize, i: usize, j: usize) -> f64 {
        self.data[self.index(t, c, i, j)]
    }

    /// One `nx x ny` slab as a row-major slice.
    pub fn slab(&self, t: usize, c: usize) -> &[f64] {
        let start = self.index(t, c, 0, 0);
        &self.data[start..start + self.nx as usize * self.ny as usize]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 8 * self.data.len() + 8);
        out.extend_from_slice(MAGIC);
        for d in [self.nx, self.ny, self.components, self.nt] {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        let sum = fnv1a64(&out[HEADER..]);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER + 8 {
            return Err(NsfError::Format(format!("dump too short: {} bytes", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(NsfError::Format("bad magic, expected NSF1".into()));
        }
        let dim = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().expect("4 bytes"));
        let (nx, ny, components, nt) = (dim(0), dim(1), dim(2), dim(3));
        let count = nx as u64 * ny as u64 * components as u64 * nt as u64;
        let expected = HEADER as u64 + 8 * count + 8;
        if bytes.len() as u64 != expected {
            return Err(NsfError::Format(format!("dump length {} does not match dimensions ({expected} bytes)", bytes.len())));
        }
        let payload = &bytes[HEADER..bytes.len() - 8];
        let stored = u64::from_le_bytes(bytes[bytes.len() - 8..].try_into().expect("8 bytes"));
        let computed = fnv1a64(payload);
        if stored != computed {
            return Err(NsfError::Checksum { stored, computed });
        }
        let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Self::new(nx, ny, components, nt, data)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let data: Vec<f64> = (0..24).map(|k| (k as f64).sin() * 1e-300 + k as f64).collect();
        let d = FieldDump::new(2, 3, 2, 2, data).unwrap();
        let bytes = d.to_bytes();
        assert_eq!(&bytes[..4], b"NSF1");
        let back = FieldDump::from_bytes(&bytes).unwrap();
        assert!(back.data.iter().zip(&d.data).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(back.get(1, 1, 1, 2), d.data[23]);
        let mut bad = bytes.clone();
        bad[HEADER + 3] ^= 0x10;
        assert!(matches!(FieldDump::from_bytes(&bad), Err(NsfError::Checksum { .. })));
        assert!(matches!(FieldDump::from_bytes(&bytes[..30]), Err(NsfError::Format(_))));
        assert!(FieldDump::new(2, 2, 1, 1, vec![0.0; 3]).is_err());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }
}
