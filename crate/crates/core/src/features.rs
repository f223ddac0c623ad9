//! Local features of a monogenic field: amplitude, attenuation, phase angle,
//! orientation, phase vector and instantaneous frequency.
//!
//! Features that are undefined at a pixel (zero amplitude, or zero vector part
//! for the orientation) are flagged in a [`Mask`] instead of failing.

use crate::clifford::{geometric_product, paravector_inverse, scalar_part, Multivector2};
use crate::error::Result;
use crate::field::{Mask, ScalarField, VectorField};
use crate::local::MonogenicJet;
use crate::scalespace::{Derivative, MonogenicField};

/// Relative mask threshold: `ε = 1e−8 · max amplitude`.
pub const RELATIVE_MASK_EPS: f64 = 1e-8;

/// The default mask threshold for `f`.
pub fn default_mask_eps(f: &MonogenicField) -> f64 {
    let peak = local_amplitude(f).max_abs();
    if peak > 0.0 {
        RELATIVE_MASK_EPS * peak
    } else {
        f64::MIN_POSITIVE
    }
}

/// All feature maps of one monogenic field.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFeatures {
    pub amplitude: ScalarField,
    pub attenuation: ScalarField,
    pub phase_angle: ScalarField,
    pub orientation: VectorField,
    pub phase_vector: VectorField,
    /// Pixels with amplitude above the threshold.
    pub amplitude_mask: Mask,
    /// Pixels where `|v|` is above the threshold; orientation and phase
    /// vector are defined there.
    pub orientation_mask: Mask,
}

impl LocalFeatures {
    pub fn compute(f: &MonogenicField, eps: f64) -> Self {
        let (attenuation, amplitude_mask) = local_attenuation(f, eps);
        let (orientation, orientation_mask) = local_orientation(f, eps);
        let (phase_angle, _) = phase_angle(f);
        let phase_vector = phase_vector_from(&orientation, &orientation_mask, &phase_angle);
        Self {
            amplitude: local_amplitude(f),
            attenuation,
            phase_angle,
            orientation,
            phase_vector,
            amplitude_mask,
            orientation_mask,
        }
    }

    /// `e^{a} (cos θ + n sin θ)`; reproduces `(u, v)` on the orientation mask.
    pub fn polar_reconstruction(&self) -> MonogenicField {
        let (w, h) = self.amplitude.dims();
        let scale = |x: usize, y: usize| self.attenuation.get(x, y).exp();
        let u = ScalarField::from_fn(w, h, |x, y| scale(x, y) * self.phase_angle.get(x, y).cos());
        let comp = |c: &ScalarField| {
            ScalarField::from_fn(w, h, |x, y| scale(x, y) * self.phase_angle.get(x, y).sin() * c.get(x, y))
        };
        MonogenicField {
            u,
            v: VectorField { v1: comp(&self.orientation.v1), v2: comp(&self.orientation.v2) },
            scale: 0.0,
        }
    }
}

/// `A = √(u² + |v|²)`.
pub fn local_amplitude(f: &MonogenicField) -> ScalarField {
    let (w, h) = f.dims();
    ScalarField::from_fn(w, h, |x, y| {
        let [a, b] = f.v.get(x, y);
        let u = f.u.get(x, y);
        (u * u + a * a + b * b).sqrt()
    })
}

/// `a = ½ ln(u² + |v|²)`; pixels with amplitude `≤ eps` are masked and hold `ln eps`.
pub fn local_attenuation(f: &MonogenicField, eps: f64) -> (ScalarField, Mask) {
    let amp = local_amplitude(f);
    let (w, h) = amp.dims();
    let mask = Mask::from_fn(w, h, |x, y| amp.get(x, y) > eps);
    let floor = eps.ln();
    let att = ScalarField::from_fn(w, h, |x, y| {
        if mask.is_valid(x, y) {
            let a = amp.get(x, y);
            0.5 * (a * a).ln()
        } else {
            floor
        }
    });
    (att, mask)
}

/// `θ = atan2(|v|, u) ∈ [0, π]`; pixels with zero amplitude are masked.
pub fn phase_angle(f: &MonogenicField) -> (ScalarField, Mask) {
    let (w, h) = f.dims();
    let theta = ScalarField::from_fn(w, h, |x, y| {
        let [a, b] = f.v.get(x, y);
        a.hypot(b).atan2(f.u.get(x, y))
    });
    let mask = Mask::from_fn(w, h, |x, y| {
        let [a, b] = f.v.get(x, y);
        f.u.get(x, y) != 0.0 || a != 0.0 || b != 0.0
    });
    (theta, mask)
}

/// `v / |v|` where `|v| > eps`; masked pixels hold `(0, 0)`.
pub fn local_orientation(f: &MonogenicField, eps: f64) -> (VectorField, Mask) {
    let norm = f.v.norm();
    let (w, h) = norm.dims();
    let mask = Mask::from_fn(w, h, |x, y| norm.get(x, y) > eps);
    let comp = |c: &ScalarField| {
        ScalarField::from_fn(w, h, |x, y| if mask.is_valid(x, y) { c.get(x, y) / norm.get(x, y) } else { 0.0 })
    };
    (VectorField { v1: comp(&f.v.v1), v2: comp(&f.v.v2) }, mask)
}

fn phase_vector_from(orientation: &VectorField, mask: &Mask, theta: &ScalarField) -> VectorField {
    let (w, h) = theta.dims();
    let comp = |c: &ScalarField| {
        ScalarField::from_fn(w, h, |x, y| if mask.is_valid(x, y) { c.get(x, y) * theta.get(x, y) } else { 0.0 })
    };
    VectorField { v1: comp(&orientation.v1), v2: comp(&orientation.v2) }
}

/// `r = (v/|v|) θ` on the orientation mask, `(0, 0)` elsewhere.
pub fn local_phase_vector(f: &MonogenicField, eps: f64) -> (VectorField, Mask) {
    let (orientation, mask) = local_orientation(f, eps);
    let (theta, _) = phase_angle(f);
    (phase_vector_from(&orientation, &mask, &theta), mask)
}

/// `Sc[(D F) F⁻¹]` with `F = u + v1 e1 + v2 e2` and `D F = Σ e_j ∂F/∂x_j`.
///
/// Pixels with amplitude `≤ eps` are masked and hold 0.
pub fn instantaneous_frequency(f: &MonogenicField, eps: f64, scheme: Derivative) -> Result<(ScalarField, Mask)> {
    let jet = MonogenicJet::new(f, None, scheme)?;
    let (w, h) = f.dims();
    let mask = Mask::from_fn(w, h, |x, y| jet.pixel(x, y).amplitude() > eps);
    let freq = ScalarField::from_fn(w, h, |x, y| {
        if !mask.is_valid(x, y) {
            return 0.0;
        }
        let p = jet.pixel(x, y);
        let value = Multivector2::paravector(p.u, p.v[0], p.v[1]);
        let d1 = Multivector2::paravector(p.du[0], p.dv[0][0], p.dv[1][0]);
        let d2 = Multivector2::paravector(p.du[1], p.dv[0][1], p.dv[1][1]);
        let dirac = Multivector2::E1 * d1 + Multivector2::E2 * d2;
        match paravector_inverse(value, eps) {
            Ok(inv) => scalar_part(geometric_product(dirac, inv)),
            Err(_) => 0.0,
        }
    });
    Ok((freq, mask))
}

/// The polar expansion `Sc[(D n) sinθ cosθ] + Sc[(D θ) n]` of the
/// instantaneous frequency, evaluated where both amplitude and `|v|` exceed
/// `eps`. The second term is the directional phase derivative.
pub fn instantaneous_frequency_expanded(
    f: &MonogenicField,
    eps: f64,
    scheme: Derivative,
) -> Result<(ScalarField, Mask)> {
    let jet = MonogenicJet::new(f, None, scheme)?;
    let (w, h) = f.dims();
    let mask = Mask::from_fn(w, h, |x, y| {
        let p = jet.pixel(x, y);
        p.amplitude() > eps && p.vector_norm() > eps
    });
    let freq = ScalarField::from_fn(w, h, |x, y| {
        if !mask.is_valid(x, y) {
            return 0.0;
        }
        let p = jet.pixel(x, y);
        let theta = p.theta();
        let n = p.orientation();
        let directional = scalar_part(p.dirac_theta() * Multivector2::vector(n[0], n[1]));
        scalar_part(p.dirac_orientation()) * theta.sin() * theta.cos() + directional
    });
    Ok((freq, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalespace::{monogenic_scale, ScaleDerivativeMode, Spectrum};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn uniform(u: f64, v1: f64, v2: f64) -> MonogenicField {
        MonogenicField::new(
            ScalarField::constant(4, 4, u),
            VectorField::new(ScalarField::constant(4, 4, v1), ScalarField::constant(4, 4, v2)).unwrap(),
            1.0,
        )
        .unwrap()
    }

    /// Cauchy kernel `E(s + x) = (s − x)/|s + x|³` sampled on a grid whose
    /// pixel `(1, 1)` sits at `x = (1, 0)`.
    fn cauchy_patch(s: f64) -> MonogenicField {
        let at = |x: usize, y: usize| (x as f64, y as f64 - 1.0);
        let r3 = |x: usize, y: usize| {
            let (a, b) = at(x, y);
            (s * s + a * a + b * b).powf(1.5)
        };
        MonogenicField::new(
            ScalarField::from_fn(3, 3, |x, y| s / r3(x, y)),
            VectorField::new(
                ScalarField::from_fn(3, 3, |x, y| -at(x, y).0 / r3(x, y)),
                ScalarField::from_fn(3, 3, |x, y| -at(x, y).1 / r3(x, y)),
            )
            .unwrap(),
            s,
        )
        .unwrap()
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(local_amplitude(&uniform(3.0, 4.0, 0.0)).get(0, 0), 5.0);
        assert_eq!(local_amplitude(&uniform(0.0, 0.0, 0.0)).get(1, 1), 0.0);
        assert!((local_amplitude(&cauchy_patch(1.0)).get(1, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn attenuation_examples() {
        let (a, m) = local_attenuation(&uniform(1.0, 0.0, 0.0), 1e-12);
        assert_eq!(a.get(2, 2), 0.0);
        assert!(m.is_valid(2, 2));
        let (a, _) = local_attenuation(&cauchy_patch(1.0), 1e-12);
        assert!((a.get(1, 1) + 2f64.ln()).abs() < 1e-15);
        let (a, m) = local_attenuation(&uniform(0.0, 0.0, 0.0), 1e-6);
        assert!(!m.is_valid(0, 0));
        assert_eq!(a.get(0, 0), 1e-6f64.ln());
    }

    #[test]
    fn phase_angle_examples() {
        assert_eq!(phase_angle(&uniform(1.0, 0.0, 0.0)).0.get(0, 0), 0.0);
        assert!((phase_angle(&uniform(0.0, 1.0, 0.0)).0.get(0, 0) - FRAC_PI_2).abs() < 1e-15);
        assert!((phase_angle(&uniform(-1.0, 1e-9, 0.0)).0.get(0, 0) - PI).abs() < 1e-8);
        assert!(!phase_angle(&uniform(0.0, 0.0, 0.0)).1.is_valid(0, 0));
    }

    #[test]
    fn orientation_examples() {
        let (o, m) = local_orientation(&uniform(0.0, 3.0, 4.0), 1e-12);
        assert_eq!(o.get(1, 1), [0.6, 0.8]);
        assert!(m.is_valid(1, 1));
        assert!(!local_orientation(&uniform(1.0, 0.0, 0.0), 1e-12).1.is_valid(0, 0));
        for s in [0.2, 1.0, 7.0] {
            let (o, _) = local_orientation(&cauchy_patch(s), 1e-12);
            let [a, b] = o.get(1, 1);
            assert!((a + 1.0).abs() < 1e-15 && b.abs() < 1e-15);
        }
    }

    #[test]
    fn phase_vector_examples() {
        let (r, m) = local_phase_vector(&uniform(1.0, 0.0, 0.0), 1e-12);
        assert_eq!(r.get(0, 0), [0.0, 0.0]);
        assert!(!m.is_valid(0, 0));
        let (r, _) = local_phase_vector(&uniform(1.0, 1.0, 0.0), 1e-12);
        assert!((r.get(0, 0)[0] - FRAC_PI_4).abs() < 1e-15);
        let (r, _) = local_phase_vector(&cauchy_patch(1.0), 1e-12);
        let [a, b] = r.get(1, 1);
        assert!((a + FRAC_PI_4).abs() < 1e-15 && b.abs() < 1e-15);
    }

    fn plane_wave(n: usize, k: usize) -> (f64, ScalarField) {
        let omega = 2.0 * PI * k as f64 / n as f64;
        (omega, ScalarField::from_fn(n, n, |x, _| (omega * x as f64).cos()))
    }

    #[test]
    fn instantaneous_frequency_of_plane_wave() {
        let (omega, f) = plane_wave(64, 1);
        let m = monogenic_scale(&f, 0.5).unwrap();
        let (freq, mask) = instantaneous_frequency(&m, 1e-12, Derivative::Central).unwrap();
        for y in 0..64 {
            for x in 1..63 {
                assert!(mask.is_valid(x, y));
                // central differences see sin(ω) instead of ω
                assert!((freq.get(x, y) - omega.sin()).abs() < 1e-12);
                assert!((freq.get(x, y) - omega).abs() < omega.powi(3) / 6.0 + 1e-12);
            }
        }
        let (freq, _) = instantaneous_frequency(&m, 1e-12, Derivative::Spectral).unwrap();
        assert!(freq.sup_diff(&ScalarField::constant(64, 64, omega)) < 1e-12);

        let (freq, _) = instantaneous_frequency(&uniform(2.0, 0.0, 0.0), 1e-12, Derivative::Central).unwrap();
        assert_eq!(freq.max_abs(), 0.0);
    }

    fn smooth_field() -> MonogenicField {
        let n = 64;
        let w = 2.0 * PI / n as f64;
        let f = ScalarField::from_fn(n, n, |x, y| {
            let (x, y) = (x as f64, y as f64);
            (w * x + 0.3).cos() + 0.6 * (w * (x + 2.0 * y)).sin() + 0.4 * (2.0 * w * y).cos()
        });
        monogenic_scale(&f, 0.5).unwrap()
    }

    #[test]
    fn expansion_matches_clifford_form() {
        let m = smooth_field();
        for scheme in [Derivative::Central, Derivative::Spectral] {
            let (a, ma) = instantaneous_frequency(&m, 1e-8, scheme).unwrap();
            let (b, mb) = instantaneous_frequency_expanded(&m, 1e-8, scheme).unwrap();
            let mask = ma.and(&mb);
            assert!(mask.count_valid() > 4000);
            let mut worst: f64 = 0.0;
            for y in 0..64 {
                for x in 0..64 {
                    if mask.is_valid(x, y) {
                        worst = worst.max((a.get(x, y) - b.get(x, y)).abs());
                    }
                }
            }
            assert!(worst <= 1e-6, "sup difference {worst}");
        }
    }

    #[test]
    fn polar_form_reconstructs_field() {
        let m = smooth_field();
        let feats = LocalFeatures::compute(&m, default_mask_eps(&m));
        let back = feats.polar_reconstruction();
        for y in 0..64 {
            for x in 0..64 {
                if feats.orientation_mask.is_valid(x, y) {
                    assert!((back.u.get(x, y) - m.u.get(x, y)).abs() < 1e-8);
                    assert!((back.v.v1.get(x, y) - m.v.v1.get(x, y)).abs() < 1e-8);
                    assert!((back.v.v2.get(x, y) - m.v.v2.get(x, y)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn features_invariants() {
        let m = smooth_field();
        let eps = default_mask_eps(&m);
        let feats = LocalFeatures::compute(&m, eps);
        for y in 0..64 {
            for x in 0..64 {
                let u = m.u.get(x, y);
                let [a, b] = m.v.get(x, y);
                let amp = feats.amplitude.get(x, y);
                assert!((amp * amp - (u * u + a * a + b * b)).abs() < 1e-10);
                let t = feats.phase_angle.get(x, y);
                assert!((0.0..=PI).contains(&t));
                if feats.orientation_mask.is_valid(x, y) {
                    let [o1, o2] = feats.orientation.get(x, y);
                    assert!((o1.hypot(o2) - 1.0).abs() < 1e-12);
                    let [r1, r2] = feats.phase_vector.get(x, y);
                    assert!((r1 - o1 * t).abs() < 1e-15 && (r2 - o2 * t).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn positive_scaling() {
        let m = smooth_field();
        let k = 3.5;
        let scaled = MonogenicField::new(m.u.scaled(k), m.v.scaled(k), m.scale).unwrap();
        let (t0, _) = phase_angle(&m);
        let (t1, _) = phase_angle(&scaled);
        assert!(t0.sup_diff(&t1) < 1e-14);
        let (a0, _) = local_attenuation(&m, 1e-12);
        let (a1, _) = local_attenuation(&scaled, 1e-12);
        assert!(a1.sup_diff(&a0.map(|v| v + k.ln())) < 1e-12);
    }

    #[test]
    fn frequency_is_minus_scale_derivative_of_attenuation() {
        let n = 64;
        let w = 2.0 * PI / n as f64;
        let f = ScalarField::from_fn(n, n, |x, y| {
            let (x, y) = (x as f64, y as f64);
            1.5 + (w * x).cos() + 0.5 * (w * (x + y)).sin()
        });
        let spec = Spectrum::of(&f);
        let s = 0.5;
        let m = spec.monogenic(s).unwrap();
        let ds = spec.scale_derivative(s, ScaleDerivativeMode::Analytic).unwrap();
        let (freq, mask) = instantaneous_frequency(&m, 1e-8, Derivative::Spectral).unwrap();
        let jet = MonogenicJet::new(&m, Some(&ds), Derivative::Spectral).unwrap();
        let mut rel = Vec::new();
        for y in 0..n {
            for x in 0..n {
                if mask.is_valid(x, y) {
                    let da = jet.pixel(x, y).ds_attenuation();
                    rel.push((freq.get(x, y) + da).abs() / da.abs().max(1e-12));
                }
            }
        }
        rel.sort_by(f64::total_cmp);
        assert!(rel[rel.len() / 2] <= 1e-3, "median relative error {}", rel[rel.len() / 2]);
    }
}
