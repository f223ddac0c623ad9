//! Sampled image-domain fields on a unit-spaced grid.
//!
//! Samples are stored row-major; `x` is the column index (first coordinate,
//! `x1`) and `y` the row index (`x2`).

use crate::error::{Error, Result};

/// A real-valued field on a `width × height` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        let expected = width * height;
        if expected == 0 || data.len() != expected {
            return Err(Error::BadSampleCount { expected, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { width, height, data })
    }

    /// Builds a field by evaluating `f(x, y)` at every pixel.
    ///
    /// # Panics
    /// If the grid is empty or `f` returns a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width * height > 0, "empty field");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v.is_finite(), "non-finite sample at ({x}, {y})");
                data.push(v);
            }
        }
        Self { width, height, data }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::constant(width, height, 0.0)
    }

    /// Wraps samples that are known to be finite.
    pub(crate) fn from_vec_unchecked(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Sample with coordinates clamped to the grid.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec_unchecked(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two fields of equal size.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_vec_unchecked(self.width, self.height, data))
    }

    pub fn scaled(&self, k: f64) -> Self {
        self.map(|v| v * k)
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(self.width, self.height, other.width, other.height));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Supremum norm of `self − other`.
    pub fn sup_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Extends the field by `margin` pixels on every side, mirroring about the
    /// edge samples (`… 2 1 0 | 0 1 2 …`).
    pub fn mirror_pad(&self, margin: usize) -> Self {
        if margin == 0 {
            return self.clone();
        }
        let reflect = |i: isize, n: usize| -> usize {
            let n = n as isize;
            let period = 2 * n;
            let mut k = i.rem_euclid(period);
            if k >= n {
                k = period - 1 - k;
            }
            k as usize
        };
        let m = margin as isize;
        Self::from_fn(self.width + 2 * margin, self.height + 2 * margin, |x, y| {
            let sx = reflect(x as isize - m, self.width);
            let sy = reflect(y as isize - m, self.height);
            self.get(sx, sy)
        })
    }

    /// The `width × height` window starting at `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        assert!(x0 + width <= self.width && y0 + height <= self.height, "crop window out of range");
        Self::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// A field with two real components, the `e1` and `e2` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub v1: ScalarField,
    pub v2: ScalarField,
}

impl VectorField {
    pub fn new(v1: ScalarField, v2: ScalarField) -> Result<Self> {
        v1.check_same_dims(&v2)?;
        Ok(Self { v1, v2 })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self { v1: ScalarField::zeros(width, height), v2: ScalarField::zeros(width, height) }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.v1.dims()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f64; 2] {
        [self.v1.get(x, y), self.v2.get(x, y)]
    }

    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField {
        self.v1.zip_map(&self.v2, f64::hypot).expect("components share dimensions")
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { v1: self.v1.scaled(k), v2: self.v2.scaled(k) }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        self.v1.sup_diff(&other.v1).max(self.v2.sup_diff(&other.v2))
    }

    pub fn max_abs(&self) -> f64 {
        self.v1.max_abs().max(self.v2.max_abs())
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self { v1: self.v1.crop(x0, y0, width, height), v2: self.v2.crop(x0, y0, width, height) }
    }
}

/// Per-pixel validity flags; `true` marks a pixel where a feature is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    valid: Vec<bool>,
}

impl Mask {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut valid = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                valid.push(f(x, y));
            }
        }
        Self { width, height, valid }
    }

    pub fn all(width: usize, height: usize) -> Self {
        Self { width, height, valid: vec![true; width * height] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.valid
    }

    pub fn count_valid(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn and(&self, other: &Mask) -> Mask {
        assert_eq!(self.dims(), other.dims());
        Mask {
            width: self.width,
            height: self.height,
            valid: self.valid.iter().zip(&other.valid).map(|(a, b)| *a && *b).collect(),
        }
    }

    /// Invalidates pixels closer than `margin` to the grid border.
    pub fn with_border(&self, margin: usize) -> Mask {
        Mask::from_fn(self.width, self.height, |x, y| {
            self.is_valid(x, y) && x >= margin && y >= margin && x + margin < self.width && y + margin < self.height
        })
    }
}
