//! Frequency-domain monogenic scale space.
//!
//! Every filter here is a Fourier multiplier applied on the periodic grid.
//! The forward transform uses the kernel `e^{−i<x,ξ>}` and frequencies follow
//! the usual DFT layout, `ξ = 2πk/N` for `k < N/2` and `2π(k − N)/N` above.
//!
//! Multipliers:
//!
//! | operator                    | multiplier                    |
//! |-----------------------------|-------------------------------|
//! | Riesz `R_j`                 | `−i ξ_j / |ξ|`                |
//! | Poisson `P_s`               | `e^{−s|ξ|}`                   |
//! | conjugate Poisson, comp. j  | `+i ξ_j / |ξ| · e^{−s|ξ|}`    |
//! | `∂/∂x_j`                    | `i ξ_j`                       |
//!
//! The conjugate Poisson filter is the isotropic Hilbert transform `−Σ R_j e_j`
//! of the Poisson-filtered signal, which makes `u + v1 e1 + v2 e2` a
//! null solution of `∂/∂s + e1 ∂/∂x1 + e2 ∂/∂x2`.
//!
//! The DC bin of every Riesz-type multiplier is 0. On even-sized axes the
//! Nyquist bin of the matching component is also 0, since an odd imaginary
//! multiplier cannot be Hermitian there.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};

/// Largest tolerated imaginary residue after an inverse transform, relative to
/// `max(1, max |real part|)`.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Angular frequency coordinates of a `width × height` transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    width: usize,
    height: usize,
    xi1: Vec<f64>,
    xi2: Vec<f64>,
}

fn axis_frequencies(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * k / n as f64
        })
        .collect()
}

impl SpectralGrid {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, xi1: axis_frequencies(width), xi2: axis_frequencies(height) }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// `(ξ1, ξ2, |ξ|)` of bin `(k1, k2)`.
    #[inline]
    pub fn xi(&self, k1: usize, k2: usize) -> (f64, f64, f64) {
        let (a, b) = (self.xi1[k1], self.xi2[k2]);
        (a, b, a.hypot(b))
    }

    #[inline]
    pub fn is_nyquist_x(&self, k1: usize) -> bool {
        self.width.is_multiple_of(2) && k1 == self.width / 2
    }

    #[inline]
    pub fn is_nyquist_y(&self, k2: usize) -> bool {
        self.height.is_multiple_of(2) && k2 == self.height / 2
    }
}

/// Per-call FFT plans for one grid size.
struct Plans {
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }
}

fn transform_2d(data: &mut [Complex64], width: usize, height: usize, rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
    rows.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = data[y * width + x];
        }
        cols.process(&mut column);
        for (y, c) in column.iter().enumerate() {
            data[y * width + x] = *c;
        }
    }
}

/// The 2D discrete Fourier transform of a real field, kept for repeated
/// filtering with different multipliers.
pub struct Spectrum {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
    plans: Plans,
}

impl Spectrum {
    pub fn of(f: &ScalarField) -> Self {
        let (width, height) = f.dims();
        let plans = Plans::new(width, height);
        let mut coeffs: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform_2d(&mut coeffs, width, height, plans.row_fwd.as_ref(), plans.col_fwd.as_ref());
        Self { grid: SpectralGrid::new(width, height), coeffs, plans }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Multiplies the spectrum by `m(k1, k2)` and returns the real inverse
    /// transform.
    pub fn filter(&self, m: impl Fn(usize, usize) -> Complex64) -> Result<ScalarField> {
        let (width, height) = self.grid.dims();
        let mut buf = Vec::with_capacity(self.coeffs.len());
        for k2 in 0..height {
            for k1 in 0..width {
                buf.push(self.coeffs[k2 * width + k1] * m(k1, k2));
            }
        }
        transform_2d(&mut buf, width, height, self.plans.row_inv.as_ref(), self.plans.col_inv.as_ref());
        let norm = 1.0 / (width * height) as f64;
        let mut peak: f64 = 0.0;
        let mut residue: f64 = 0.0;
        let data: Vec<f64> = buf
            .iter()
            .map(|c| {
                let re = c.re * norm;
                peak = peak.max(re.abs());
                residue = residue.max((c.im * norm).abs());
                re
            })
            .collect();
        if !(residue <= IMAGINARY_TOLERANCE * peak.max(1.0)) {
            return Err(Error::NonRealOutput { residue });
        }
        ScalarField::new(width, height, data)
    }

    fn riesz_multiplier(&self, k1: usize, k2: usize, component: usize) -> Complex64 {
        let (x1, x2, r) = self.grid.xi(k1, k2);
        let (xi, nyquist) = match component {
            0 => (x1, self.grid.is_nyquist_x(k1)),
            _ => (x2, self.grid.is_nyquist_y(k2)),
        };
        if r == 0.0 || nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -xi / r)
        }
    }

    pub fn riesz(&self) -> Result<VectorField> {
        VectorField::new(
            self.filter(|a, b| self.riesz_multiplier(a, b, 0))?,
            self.filter(|a, b| self.riesz_multiplier(a, b, 1))?,
        )
    }

    pub fn poisson(&self, s: f64) -> Result<ScalarField> {
        check_scale(s)?;
        self.filter(|a, b| Complex64::new((-s * self.grid.xi(a, b).2).exp(), 0.0))
    }

    pub fn conjugate_poisson(&self, s: f64) -> Result<VectorField> {
        check_scale(s)?;
        let comp =
            |j: usize| self.filter(move |a, b| -self.riesz_multiplier(a, b, j) * (-s * self.grid.xi(a, b).2).exp());
        VectorField::new(comp(0)?, comp(1)?)
    }

    pub fn monogenic(&self, s: f64) -> Result<MonogenicField> {
        check_positive_scale(s)?;
        Ok(MonogenicField { u: self.poisson(s)?, v: self.conjugate_poisson(s)?, scale: s })
    }

    /// `∂u/∂s` and `∂v/∂s` at scale `s`.
    pub fn scale_derivative(&self, s: f64, mode: ScaleDerivativeMode) -> Result<ScaleDerivatives> {
        check_positive_scale(s)?;
        match mode {
            ScaleDerivativeMode::Analytic => {
                let du = self.filter(|a, b| {
                    let r = self.grid.xi(a, b).2;
                    Complex64::new(-r * (-s * r).exp(), 0.0)
                })?;
                let comp = |j: usize| {
                    self.filter(move |a, b| {
                        let r = self.grid.xi(a, b).2;
                        self.riesz_multiplier(a, b, j) * (r * (-s * r).exp())
                    })
                };
                Ok(ScaleDerivatives { du_ds: du, dv_ds: VectorField::new(comp(0)?, comp(1)?)? })
            }
            ScaleDerivativeMode::FiniteDifference { step } => {
                let delta = step.unwrap_or_else(|| default_scale_step(s));
                if !(delta > 0.0 && delta < s) {
                    return Err(Error::BadScaleStep { step: delta, scale: s });
                }
                let hi = self.monogenic(s + delta)?;
                let lo = self.monogenic(s - delta)?;
                let d =
                    |a: &ScalarField, b: &ScalarField| a.zip_map(b, |p, q| (p - q) / (2.0 * delta)).expect("same grid");
                Ok(ScaleDerivatives {
                    du_ds: d(&hi.u, &lo.u),
                    dv_ds: VectorField { v1: d(&hi.v.v1, &lo.v.v1), v2: d(&hi.v.v2, &lo.v.v2) },
                })
            }
        }
    }

    /// Periodic spectral derivative `(∂f/∂x1, ∂f/∂x2)`.
    pub fn gradient(&self) -> Result<VectorField> {
        let comp = |j: usize| {
            self.filter(move |a, b| {
                let (x1, x2, _) = self.grid.xi(a, b);
                let (xi, nyquist) =
                    if j == 0 { (x1, self.grid.is_nyquist_x(a)) } else { (x2, self.grid.is_nyquist_y(b)) };
                if nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi)
                }
            })
        };
        VectorField::new(comp(0)?, comp(1)?)
    }
}

fn check_scale(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::NegativeScale(s));
    }
    Ok(())
}

fn check_positive_scale(s: f64) -> Result<()> {
    check_scale(s)?;
    if s == 0.0 {
        return Err(Error::NonPositiveScale(s));
    }
    Ok(())
}

/// Default finite-difference step in scale, `1e−3 · max(s, 1)`.
pub fn default_scale_step(s: f64) -> f64 {
    1e-3 * s.max(1.0)
}

/// The pair `(u, v)` of a monogenic scale-space at a fixed scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MonogenicField {
    pub u: ScalarField,
    pub v: VectorField,
    pub scale: f64,
}

impl MonogenicField {
    pub fn new(u: ScalarField, v: VectorField, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let (w, h) = v.dims();
        if u.dims() != (w, h) {
            return Err(Error::DimensionMismatch(u.width(), u.height(), w, h));
        }
        Ok(Self { u, v, scale })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.u.dims()
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { u: self.u.crop(x0, y0, width, height), v: self.v.crop(x0, y0, width, height), scale: self.scale }
    }
}

/// Scale derivatives `∂u/∂s` and `∂v/∂s` of a monogenic field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleDerivatives {
    pub du_ds: ScalarField,
    pub dv_ds: VectorField,
}

impl ScaleDerivatives {
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { du_ds: self.du_ds.crop(x0, y0, width, height), dv_ds: self.dv_ds.crop(x0, y0, width, height) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScaleDerivativeMode {
    /// Multiply the spectrum by `∂/∂s` of the filter multipliers.
    #[default]
    Analytic,
    /// Central difference in `s`; `None` uses [`default_scale_step`].
    FiniteDifference { step: Option<f64> },
}

/// How spatial derivatives are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivative {
    /// [`spatial_gradient`]: central differences, one-sided at the border.
    #[default]
    Central,
    /// [`spectral_gradient`]: exact for band-limited periodic fields.
    Spectral,
}

/// Riesz transforms `(R1 f, R2 f)`.
pub fn riesz_transform(f: &ScalarField) -> Result<VectorField> {
    Spectrum::of(f).riesz()
}

/// Isotropic Hilbert transform `−(R1 f) e1 − (R2 f) e2`, as its two coefficients.
pub fn isotropic_hilbert(f: &ScalarField) -> Result<VectorField> {
    Ok(riesz_transform(f)?.negated())
}

pub fn poisson_filter(f: &ScalarField, s: f64) -> Result<ScalarField> {
    check_scale(s)?;
    if s == 0.0 {
        return Ok(f.clone());
    }
    Spectrum::of(f).poisson(s)
}

pub fn conjugate_poisson_filter(f: &ScalarField, s: f64) -> Result<VectorField> {
    Spectrum::of(f).conjugate_poisson(s)
}

pub fn monogenic_scale(f: &ScalarField, s: f64) -> Result<MonogenicField> {
    Spectrum::of(f).monogenic(s)
}

pub fn scale_derivative(f: &ScalarField, s: f64, mode: ScaleDerivativeMode) -> Result<ScaleDerivatives> {
    Spectrum::of(f).scale_derivative(s, mode)
}

/// Central-difference gradient; second-order one-sided differences on the border.
pub fn spatial_gradient(f: &ScalarField) -> Result<VectorField> {
    let (w, h) = f.dims();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall { width: w, height: h, min: 3 });
    }
    let d1 = ScalarField::from_fn(w, h, |x, y| {
        let g = |i: usize| f.get(i, y);
        match x {
            0 => (-3.0 * g(0) + 4.0 * g(1) - g(2)) / 2.0,
            _ if x == w - 1 => (3.0 * g(x) - 4.0 * g(x - 1) + g(x - 2)) / 2.0,
            _ => (g(x + 1) - g(x - 1)) / 2.0,
        }
    });
    let d2 = ScalarField::from_fn(w, h, |x, y| {
        let g = |j: usize| f.get(x, j);
        match y {
            0 => (-3.0 * g(0) + 4.0 * g(1) - g(2)) / 2.0,
            _ if y == h - 1 => (3.0 * g(y) - 4.0 * g(y - 1) + g(y - 2)) / 2.0,
            _ => (g(y + 1) - g(y - 1)) / 2.0,
        }
    });
    VectorField::new(d1, d2)
}

pub fn spectral_gradient(f: &ScalarField) -> Result<VectorField> {
    Spectrum::of(f).gradient()
}

pub fn gradient(f: &ScalarField, scheme: Derivative) -> Result<VectorField> {
    match scheme {
        Derivative::Central => spatial_gradient(f),
        Derivative::Spectral => spectral_gradient(f),
    }
}
