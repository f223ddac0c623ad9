//! Serialization of fields: normalized 8-bit rasters and raw float grids.
//!
//! The raw format is the ASCII magic `MGF1`, then width and height as
//! little-endian `u32`, then `width · height` little-endian `f32` samples in
//! row-major order.

use std::io::{self, Read, Write};

use crate::field::ScalarField;

const MAGIC: &[u8; 4] = b"MGF1";

/// Maps `|f|` linearly onto `0..=255` with the largest magnitude at 255.
/// An all-zero field maps to all zeros.
pub fn magnitude_to_gray8(f: &ScalarField) -> Vec<u8> {
    let peak = f.max_abs();
    f.data()
        .iter()
        .map(|v| if peak > 0.0 { (255.0 * v.abs() / peak).round().clamp(0.0, 255.0) as u8 } else { 0 })
        .collect()
}

/// Clamps values to `0..=255` and rounds to the nearest integer.
pub fn intensities_to_gray8(f: &ScalarField) -> Vec<u8> {
    f.data().iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect()
}

pub fn write_raw_f32(f: &ScalarField, mut out: impl Write) -> io::Result<()> {
    let (w, h) = f.dims();
    let dim =
        |n: usize| u32::try_from(n).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "dimension exceeds u32"));
    out.write_all(MAGIC)?;
    out.write_all(&dim(w)?.to_le_bytes())?;
    out.write_all(&dim(h)?.to_le_bytes())?;
    let mut buf = Vec::with_capacity(4 * f.len());
    for v in f.data() {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_raw_f32(mut input: impl Read) -> io::Result<ScalarField> {
    let invalid = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut head = [0u8; 12];
    input.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(invalid("not an MGF1 float grid"));
    }
    let w = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes")) as usize;
    let h = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    let n = w.checked_mul(h).ok_or_else(|| invalid("dimensions overflow"))?;
    let mut bytes = vec![0u8; 4 * n];
    input.read_exact(&mut bytes)?;
    let data = bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    ScalarField::new(w, h, data).map_err(|e| invalid(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray8_scales_by_peak_magnitude() {
        let f = ScalarField::new(3, 1, vec![0.0, -2.0, 1.0]).unwrap();
        assert_eq!(magnitude_to_gray8(&f), vec![0, 255, 128]);
        assert_eq!(magnitude_to_gray8(&ScalarField::zeros(2, 2)), vec![0; 4]);
        let g = ScalarField::new(3, 1, vec![-3.0, 100.4, 300.0]).unwrap();
        assert_eq!(intensities_to_gray8(&g), vec![0, 100, 255]);
    }

    #[test]
    fn raw_round_trip() {
        let f = ScalarField::from_fn(5, 3, |x, y| x as f64 * 0.5 - y as f64);
        let mut buf = Vec::new();
        write_raw_f32(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 12 + 4 * 15);
        assert_eq!(read_raw_f32(buf.as_slice()).unwrap(), f);
        buf[0] = b'X';
        assert!(read_raw_f32(buf.as_slice()).is_err());
        assert!(read_raw_f32(&b"MGF1"[..]).is_err());
    }
}
