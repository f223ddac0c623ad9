//! Deterministic synthetic test images.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::scalespace::Spectrum;

use num_complex::Complex64;

/// Vertical step: `low` left of `column`, `high` right of it, and the midpoint
/// on `column` itself, so the edge is centred on that pixel column.
pub fn vertical_step(width: usize, height: usize, column: usize, low: f64, high: f64) -> ScalarField {
    ScalarField::from_fn(width, height, |x, _| match x.cmp(&column) {
        std::cmp::Ordering::Less => low,
        std::cmp::Ordering::Equal => 0.5 * (low + high),
        std::cmp::Ordering::Greater => high,
    })
}

/// `f(x) = x1`.
pub fn ramp(width: usize, height: usize) -> ScalarField {
    ScalarField::from_fn(width, height, |x, _| x as f64)
}

/// Gaussian blob of width `sigma` centred on the grid.
pub fn radial_blob(width: usize, height: usize, sigma: f64) -> ScalarField {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    ScalarField::from_fn(width, height, |x, y| {
        let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
        (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

/// Periodic plane wave `cos(2π (k1 x / W + k2 y / H) + phase)`.
pub fn plane_wave(width: usize, height: usize, k1: i32, k2: i32, phase: f64) -> ScalarField {
    ScalarField::from_fn(width, height, |x, y| {
        let t = 2.0 * PI * (k1 as f64 * x as f64 / width as f64 + k2 as f64 * y as f64 / height as f64);
        (t + phase).cos()
    })
}

/// A random periodic field whose spectrum is supported on `0 < |k| ≤ max_cycles`
/// (in cycles per image), plus `offset`. Sample standard deviation is 1 before
/// the offset is added.
pub fn band_limited_random(width: usize, height: usize, max_cycles: f64, offset: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = max_cycles.floor() as i32;
    let phase = Uniform::new(0.0, 2.0 * PI).expect("valid range");
    let mut modes = Vec::new();
    for k2 in -kmax..=kmax {
        for k1 in 0..=kmax {
            // one representative per conjugate pair
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            if ((k1 * k1 + k2 * k2) as f64).sqrt() > max_cycles {
                continue;
            }
            let amp: f64 = StandardNormal.sample(&mut rng);
            modes.push((k1, k2, amp, phase.sample(&mut rng)));
        }
    }
    let raw = ScalarField::from_fn(width, height, |x, y| {
        modes
            .iter()
            .map(|&(k1, k2, a, p)| {
                let t = 2.0 * PI * (k1 as f64 * x as f64 / width as f64 + k2 as f64 * y as f64 / height as f64);
                a * (t + p).cos()
            })
            .sum()
    });
    standardize(&raw).map(|v| v + offset)
}

/// White Gaussian noise smoothed by a periodic Gaussian of width `sigma`,
/// standardized to zero mean and unit variance.
pub fn smoothed_noise(width: usize, height: usize, sigma: f64, seed: u64) -> ScalarField {
    let noise = white_noise(width, height, 1.0, seed);
    let spectrum = Spectrum::of(&noise);
    let grid = spectrum.grid().clone();
    let smooth = spectrum
        .filter(|a, b| {
            let r = grid.xi(a, b).2;
            let nyquist = grid.is_nyquist_x(a) || grid.is_nyquist_y(b);
            if nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((-0.5 * sigma * sigma * r * r).exp(), 0.0)
            }
        })
        .expect("real multiplier");
    standardize(&smooth)
}

/// I.i.d. Gaussian samples with standard deviation `std`.
pub fn white_noise(width: usize, height: usize, std: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("valid deviation");
    ScalarField::from_fn(width, height, |_, _| normal.sample(&mut rng))
}

/// A step from 0.25 to 0.75 at `column` with additive Gaussian noise.
pub fn noisy_step(width: usize, height: usize, column: usize, noise_std: f64, seed: u64) -> ScalarField {
    let step = vertical_step(width, height, column, 0.25, 0.75);
    let noise = white_noise(width, height, noise_std, seed);
    step.zip_map(&noise, |a, b| a + b).expect("same grid")
}

fn standardize(f: &ScalarField) -> ScalarField {
    let mean = f.mean();
    let var = f.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / f.len() as f64;
    let sd = var.sqrt();
    if sd > 0.0 {
        f.map(|v| (v - mean) / sd)
    } else {
        f.map(|v| v - mean)
    }
}

/// Named fixtures, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Step,
    Ramp,
    Blob,
    PlaneWave,
    Noise,
    NoisyStep,
    Blank,
}

impl Fixture {
    pub const ALL: [Fixture; 7] = [
        Fixture::Step,
        Fixture::Ramp,
        Fixture::Blob,
        Fixture::PlaneWave,
        Fixture::Noise,
        Fixture::NoisyStep,
        Fixture::Blank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Step => "step",
            Fixture::Ramp => "ramp",
            Fixture::Blob => "blob",
            Fixture::PlaneWave => "plane-wave",
            Fixture::Noise => "noise",
            Fixture::NoisyStep => "noisy-step",
            Fixture::Blank => "blank",
        }
    }

    /// The fixture rendered as 8-bit intensities in `[0, 255]`.
    pub fn generate(self, width: usize, height: usize, seed: u64) -> ScalarField {
        let to_range = |f: ScalarField, lo: f64, hi: f64| f.map(|v| 255.0 * ((v - lo) / (hi - lo)).clamp(0.0, 1.0));
        match self {
            Fixture::Step => vertical_step(width, height, width / 2, 64.0, 191.0),
            Fixture::Ramp => {
                let w = (width.max(2) - 1) as f64;
                ramp(width, height).map(|v| 255.0 * v / w)
            }
            Fixture::Blob => radial_blob(width, height, width.min(height) as f64 / 8.0).map(|v| 255.0 * v),
            Fixture::PlaneWave => to_range(plane_wave(width, height, 4, 0, 0.0), -1.0, 1.0),
            Fixture::Noise => to_range(smoothed_noise(width, height, 2.0, seed), -3.0, 3.0),
            Fixture::NoisyStep => to_range(noisy_step(width, height, width / 2, 0.1, seed), -0.25, 1.25),
            Fixture::Blank => ScalarField::zeros(width, height),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown fixture '{s}'")))
    }
}
