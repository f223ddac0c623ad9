//! Grayscale image input and output (binary PGM and PNG).

use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageFormat};
use monogenic_core::field::ScalarField;

use crate::error::{CliError, Result};

/// Output raster format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Pgm,
    Png,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Pgm => "pgm",
            Format::Png => "png",
        }
    }
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

// Rec. 601 luma weights
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Reads a PGM (P5, maxval ≤ 255) or PNG image as intensities in `[0, 255]`.
/// Colour is reduced to luminance; 16-bit samples are rescaled.
pub fn read_image(path: &Path) -> Result<ScalarField> {
    let bytes = fs::read(path).map_err(|e| CliError::UnreadableInput { path: path.into(), reason: e.to_string() })?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes).map_err(|reason| CliError::UnreadableInput { path: path.into(), reason })
    } else if bytes.starts_with(PNG_SIGNATURE) {
        let img = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
            .map_err(|e| CliError::UnreadableInput { path: path.into(), reason: e.to_string() })?;
        png_intensities(img)
    } else {
        Err(CliError::UnsupportedFormat(format!("{} is neither binary PGM nor PNG", path.display())))
    }
}

fn png_intensities(img: DynamicImage) -> Result<ScalarField> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let field = match img {
        DynamicImage::ImageLuma8(g) => ScalarField::new(w, h, g.into_raw().into_iter().map(f64::from).collect()),
        DynamicImage::ImageLuma16(g) => {
            ScalarField::new(w, h, g.into_raw().into_iter().map(|v| f64::from(v) / 257.0).collect())
        }
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => {
            let rgb = img.to_rgb8();
            ScalarField::new(w, h, rgb.pixels().map(|p| (0..3).map(|c| LUMA[c] * f64::from(p[c])).sum()).collect())
        }
        other => {
            return Err(CliError::UnsupportedFormat(format!("PNG colour type {:?}", other.color())));
        }
    };
    field.map_err(CliError::from)
}

/// Parses a binary PGM with maxval ≤ 255, rescaling samples to `[0, 255]`.
pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<ScalarField, String> {
    let mut pos = 2;
    let mut header = [0usize; 3];
    for slot in &mut header {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let text = std::str::from_utf8(&bytes[start..pos]).map_err(|e| e.to_string())?;
        *slot = text.parse().map_err(|_| format!("malformed PGM header near byte {start}"))?;
    }
    let [w, h, maxval] = header;
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("malformed PGM header".into());
    }
    pos += 1;
    if maxval == 0 || maxval > 255 {
        return Err(format!("PGM maxval {maxval} is not supported (need 1..=255)"));
    }
    let n = w.checked_mul(h).ok_or("PGM dimensions overflow")?;
    let data = bytes.get(pos..pos + n).ok_or("PGM raster is truncated")?;
    let scale = 255.0 / maxval as f64;
    ScalarField::new(w, h, data.iter().map(|&b| f64::from(b) * scale).collect()).map_err(|e| e.to_string())
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Writes 8-bit gray pixels in `format`.
pub fn write_gray8(path: &Path, width: usize, height: usize, pixels: &[u8], format: Format) -> Result<()> {
    let fail = |reason: String| CliError::Write { path: path.into(), reason };
    match format {
        Format::Pgm => fs::write(path, encode_pgm(width, height, pixels)).map_err(|e| fail(e.to_string())),
        Format::Png => {
            let buf = image::GrayImage::from_raw(width as u32, height as u32, pixels.to_vec())
                .ok_or_else(|| fail("pixel count does not match dimensions".into()))?;
            buf.save_with_format(path, ImageFormat::Png).map_err(|e| fail(e.to_string()))
        }
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::Write { path: path.into(), reason: e.to_string() })
}
