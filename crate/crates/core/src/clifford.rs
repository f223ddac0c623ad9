//! Arithmetic in the Clifford algebra Cl(0,2).
//!
//! Basis `{1, e1, e2, e12}` with `e1² = e2² = −1` and `e1 e2 = −e2 e1 = e12`,
//! so `e12² = −1` as well. A paravector is an element with zero bivector part,
//! `x0 + x1 e1 + x2 e2`; pixel values of a monogenic field are paravectors.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default threshold below which a norm counts as zero.
pub const DEFAULT_EPS: f64 = 1e-12;

/// An element `s + c1 e1 + c2 e2 + c12 e12` of Cl(0,2).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Multivector2 {
    pub s0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c12: f64,
}

impl Multivector2 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const E1: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const E12: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(s0: f64, c1: f64, c2: f64, c12: f64) -> Self {
        Self { s0, c1, c2, c12 }
    }

    pub const fn scalar(s0: f64) -> Self {
        Self::new(s0, 0.0, 0.0, 0.0)
    }

    pub const fn vector(c1: f64, c2: f64) -> Self {
        Self::new(0.0, c1, c2, 0.0)
    }

    pub const fn paravector(s0: f64, c1: f64, c2: f64) -> Self {
        Self::new(s0, c1, c2, 0.0)
    }

    pub const fn bivector(c12: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, c12)
    }

    pub fn is_finite(&self) -> bool {
        self.s0.is_finite() && self.c1.is_finite() && self.c2.is_finite() && self.c12.is_finite()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.s0 * self.s0 + self.c1 * self.c1 + self.c2 * self.c2 + self.c12 * self.c12
    }

    /// Clifford conjugation: negates the vector and bivector parts.
    pub fn conjugate(&self) -> Self {
        Self::new(self.s0, -self.c1, -self.c2, -self.c12)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.s0 * k, self.c1 * k, self.c2 * k, self.c12 * k)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.s0 - other.s0)
            .abs()
            .max((self.c1 - other.c1).abs())
            .max((self.c2 - other.c2).abs())
            .max((self.c12 - other.c12).abs())
    }
}

/// The geometric product `a b`.
pub fn geometric_product(a: Multivector2, b: Multivector2) -> Multivector2 {
    Multivector2 {
        s0: a.s0 * b.s0 - a.c1 * b.c1 - a.c2 * b.c2 - a.c12 * b.c12,
        c1: a.s0 * b.c1 + a.c1 * b.s0 + a.c2 * b.c12 - a.c12 * b.c2,
        c2: a.s0 * b.c2 + a.c2 * b.s0 - a.c1 * b.c12 + a.c12 * b.c1,
        c12: a.s0 * b.c12 + a.c12 * b.s0 + a.c1 * b.c2 - a.c2 * b.c1,
    }
}

pub fn scalar_part(m: Multivector2) -> f64 {
    m.s0
}

pub fn vector_part(m: Multivector2) -> Multivector2 {
    Multivector2::vector(m.c1, m.c2)
}

pub fn bivector_part(m: Multivector2) -> Multivector2 {
    Multivector2::bivector(m.c12)
}

/// Inverse of a paravector, `conj(m) / |m|²`.
///
/// Fails with [`Error::ZeroNorm`] when `|m| < eps`. Elements carrying a
/// bivector part are rejected as invalid input.
pub fn paravector_inverse(m: Multivector2, eps: f64) -> Result<Multivector2> {
    if m.c12 != 0.0 {
        return Err(Error::InvalidConfig(format!("paravector_inverse needs a zero bivector part (got {})", m.c12)));
    }
    let n2 = m.norm_squared();
    let n = n2.sqrt();
    if !(n >= eps) {
        return Err(Error::ZeroNorm { norm: n, eps });
    }
    Ok(m.conjugate().scale(1.0 / n2))
}

/// `exp(θ v/|v|) = cos θ + (v/|v|) sin θ` for a pure vector `v`.
///
/// The direction is normalized internally; only the vector part of `v` is read.
pub fn exp_vector(v: Multivector2, theta: f64, eps: f64) -> Result<Multivector2> {
    let n = v.c1.hypot(v.c2);
    if !(n >= eps) {
        return Err(Error::ZeroNorm { norm: n, eps });
    }
    let (sin, cos) = theta.sin_cos();
    Ok(Multivector2::paravector(cos, sin * v.c1 / n, sin * v.c2 / n))
}

impl Mul for Multivector2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        geometric_product(self, rhs)
    }
}

impl Mul<f64> for Multivector2 {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Add for Multivector2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.s0 + rhs.s0, self.c1 + rhs.c1, self.c2 + rhs.c2, self.c12 + rhs.c12)
    }
}

impl AddAssign for Multivector2 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Multivector2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.s0 - rhs.s0, self.c1 - rhs.c1, self.c2 - rhs.c2, self.c12 - rhs.c12)
    }
}

impl Neg for Multivector2 {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}
