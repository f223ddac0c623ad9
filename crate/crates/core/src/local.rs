//! Per-pixel first-order jets of a monogenic field.
//!
//! Derivatives of the nonlinear features (attenuation, phase angle,
//! orientation) are assembled from the derivatives of the linear fields
//! `u, v1, v2` by the chain rule. The orientation `n = v/|v|` jumps where `v`
//! changes sign, so differencing `n` directly would put spikes on every zero
//! crossing; its derivative is instead `∂n = (∂v − n <n, ∂v>) / |v|`.

use crate::clifford::Multivector2;
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::scalespace::{gradient, Derivative, MonogenicField, ScaleDerivatives};

/// Values and first derivatives of `(u, v)` at one pixel.
///
/// `du[j] = ∂u/∂x_j`, `dv[i][j] = ∂v_i/∂x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PixelJet {
    pub u: f64,
    pub v: [f64; 2],
    pub du: [f64; 2],
    pub dv: [[f64; 2]; 2],
    pub du_ds: f64,
    pub dv_ds: [f64; 2],
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl PixelJet {
    pub fn amplitude_squared(&self) -> f64 {
        self.u * self.u + dot(self.v, self.v)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude_squared().sqrt()
    }

    pub fn vector_norm(&self) -> f64 {
        self.v[0].hypot(self.v[1])
    }

    pub fn attenuation(&self) -> f64 {
        0.5 * self.amplitude_squared().ln()
    }

    /// Phase angle in `[0, π]`.
    pub fn theta(&self) -> f64 {
        self.vector_norm().atan2(self.u)
    }

    pub fn orientation(&self) -> [f64; 2] {
        let n = self.vector_norm();
        [self.v[0] / n, self.v[1] / n]
    }

    /// `∂v/∂x_j` as a vector.
    fn dv_dx(&self, j: usize) -> [f64; 2] {
        [self.dv[0][j], self.dv[1][j]]
    }

    /// Derivative of the unit vector `v/|v|` given the derivative of `v`.
    fn unit_derivative(&self, dv: [f64; 2]) -> [f64; 2] {
        let n = self.orientation();
        let along = dot(n, dv);
        let norm = self.vector_norm();
        [(dv[0] - n[0] * along) / norm, (dv[1] - n[1] * along) / norm]
    }

    /// `∂|v|/∂x_j`.
    pub fn grad_vector_norm(&self) -> [f64; 2] {
        let n = self.orientation();
        [dot(n, self.dv_dx(0)), dot(n, self.dv_dx(1))]
    }

    /// `∂a/∂x_j = (u ∂u + <v, ∂v>) / A²`.
    pub fn grad_attenuation(&self) -> [f64; 2] {
        let a2 = self.amplitude_squared();
        let g = |j: usize| (self.u * self.du[j] + dot(self.v, self.dv_dx(j))) / a2;
        [g(0), g(1)]
    }

    /// `∂θ/∂x_j = (u ∂|v| − |v| ∂u) / A²`.
    pub fn grad_theta(&self) -> [f64; 2] {
        let a2 = self.amplitude_squared();
        let norm = self.vector_norm();
        let gn = self.grad_vector_norm();
        [(self.u * gn[0] - norm * self.du[0]) / a2, (self.u * gn[1] - norm * self.du[1]) / a2]
    }

    /// `[∂n/∂x_1, ∂n/∂x_2]`.
    pub fn grad_orientation(&self) -> [[f64; 2]; 2] {
        [self.unit_derivative(self.dv_dx(0)), self.unit_derivative(self.dv_dx(1))]
    }

    pub fn ds_attenuation(&self) -> f64 {
        (self.u * self.du_ds + dot(self.v, self.dv_ds)) / self.amplitude_squared()
    }

    pub fn ds_theta(&self) -> f64 {
        let norm = self.vector_norm();
        let ds_norm = dot(self.orientation(), self.dv_ds);
        (self.u * ds_norm - norm * self.du_ds) / self.amplitude_squared()
    }

    pub fn ds_orientation(&self) -> [f64; 2] {
        self.unit_derivative(self.dv_ds)
    }

    /// `∂r/∂s` for `r = n θ`.
    pub fn ds_phase_vector(&self) -> [f64; 2] {
        let n = self.orientation();
        let dn = self.ds_orientation();
        let theta = self.theta();
        let dt = self.ds_theta();
        [dn[0] * theta + n[0] * dt, dn[1] * theta + n[1] * dt]
    }

    /// `(u ∂v/∂s − v ∂u/∂s) / (u² + |v|²)`.
    pub fn differential_phase_congruency(&self) -> [f64; 2] {
        let a2 = self.amplitude_squared();
        [(self.u * self.dv_ds[0] - self.v[0] * self.du_ds) / a2, (self.u * self.dv_ds[1] - self.v[1] * self.du_ds) / a2]
    }

    /// `D n = Σ e_j ∂n/∂x_j`, a scalar plus bivector.
    pub fn dirac_orientation(&self) -> Multivector2 {
        let dn = self.grad_orientation();
        Multivector2::E1 * Multivector2::vector(dn[0][0], dn[0][1])
            + Multivector2::E2 * Multivector2::vector(dn[1][0], dn[1][1])
    }

    /// `D θ = Σ e_j ∂θ/∂x_j`.
    pub fn dirac_theta(&self) -> Multivector2 {
        let g = self.grad_theta();
        Multivector2::vector(g[0], g[1])
    }

    /// `Vec[(D n) n] sin²θ`, the orientation-curvature term.
    pub fn orientation_curvature(&self) -> [f64; 2] {
        let n = self.orientation();
        let prod = self.dirac_orientation() * Multivector2::vector(n[0], n[1]);
        let sin2 = dot(self.v, self.v) / self.amplitude_squared();
        [prod.c1 * sin2, prod.c2 * sin2]
    }
}

/// A monogenic field together with the spatial (and optionally scale)
/// derivatives of its components.
#[derive(Debug, Clone)]
pub struct MonogenicJet {
    pub field: MonogenicField,
    pub du: VectorField,
    pub dv1: VectorField,
    pub dv2: VectorField,
    pub ds: Option<ScaleDerivatives>,
}

impl MonogenicJet {
    pub fn new(field: &MonogenicField, ds: Option<&ScaleDerivatives>, scheme: Derivative) -> Result<Self> {
        Ok(Self {
            du: gradient(&field.u, scheme)?,
            dv1: gradient(&field.v.v1, scheme)?,
            dv2: gradient(&field.v.v2, scheme)?,
            field: field.clone(),
            ds: ds.cloned(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.field.dims()
    }

    pub fn pixel(&self, x: usize, y: usize) -> PixelJet {
        let (du_ds, dv_ds) = match &self.ds {
            Some(d) => (d.du_ds.get(x, y), d.dv_ds.get(x, y)),
            None => (0.0, [0.0; 2]),
        };
        PixelJet {
            u: self.field.u.get(x, y),
            v: self.field.v.get(x, y),
            du: self.du.get(x, y),
            dv: [self.dv1.get(x, y), self.dv2.get(x, y)],
            du_ds,
            dv_ds,
        }
    }

    /// Evaluates `f` at every pixel; `None` results become 0.
    pub fn map_scalar(&self, f: impl Fn(&PixelJet) -> Option<f64>) -> ScalarField {
        let (w, h) = self.dims();
        ScalarField::from_fn(w, h, |x, y| f(&self.pixel(x, y)).unwrap_or(0.0))
    }

    pub fn map_vector(&self, f: impl Fn(&PixelJet) -> Option<[f64; 2]>) -> VectorField {
        let (w, h) = self.dims();
        let values: Vec<[f64; 2]> = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| f(&self.pixel(x, y)).unwrap_or([0.0; 2]))
            .collect();
        VectorField {
            v1: ScalarField::from_fn(w, h, |x, y| values[y * w + x][0]),
            v2: ScalarField::from_fn(w, h, |x, y| values[y * w + x][1]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet() -> PixelJet {
        PixelJet {
            u: 0.7,
            v: [0.4, -0.9],
            du: [0.11, -0.05],
            dv: [[0.2, 0.03], [-0.07, 0.13]],
            du_ds: -0.08,
            dv_ds: [0.06, 0.02],
        }
    }

    /// Evaluates `(u, v)` of the jet's first-order Taylor model at offset `t`
    /// along direction `dir` (0, 1 spatial; 2 scale).
    fn taylor(j: &PixelJet, dir: usize, t: f64) -> PixelJet {
        let mut p = *j;
        match dir {
            2 => {
                p.u += t * j.du_ds;
                p.v = [j.v[0] + t * j.dv_ds[0], j.v[1] + t * j.dv_ds[1]];
            }
            d => {
                p.u += t * j.du[d];
                p.v = [j.v[0] + t * j.dv[0][d], j.v[1] + t * j.dv[1][d]];
            }
        }
        p
    }

    fn fd(j: &PixelJet, dir: usize, f: impl Fn(&PixelJet) -> f64) -> f64 {
        let h = 1e-6;
        (f(&taylor(j, dir, h)) - f(&taylor(j, dir, -h))) / (2.0 * h)
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let j = jet();
        for d in 0..2 {
            assert!((j.grad_attenuation()[d] - fd(&j, d, PixelJet::attenuation)).abs() < 1e-8);
            assert!((j.grad_theta()[d] - fd(&j, d, PixelJet::theta)).abs() < 1e-8);
            assert!((j.grad_vector_norm()[d] - fd(&j, d, PixelJet::vector_norm)).abs() < 1e-8);
            for i in 0..2 {
                let num = fd(&j, d, |p| p.orientation()[i]);
                assert!((j.grad_orientation()[d][i] - num).abs() < 1e-8);
            }
        }
        assert!((j.ds_attenuation() - fd(&j, 2, PixelJet::attenuation)).abs() < 1e-8);
        assert!((j.ds_theta() - fd(&j, 2, PixelJet::theta)).abs() < 1e-8);
        for i in 0..2 {
            let num = fd(&j, 2, |p| p.orientation()[i] * p.theta());
            assert!((j.ds_phase_vector()[i] - num).abs() < 1e-8);
        }
    }

    #[test]
    fn dirac_of_orientation_has_no_vector_part() {
        let d = jet().dirac_orientation();
        assert_eq!(d.c1, 0.0);
        assert_eq!(d.c2, 0.0);
    }
}
