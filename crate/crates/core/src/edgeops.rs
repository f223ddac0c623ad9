//! Edge-gradient operators and the thinning/linking pipeline.
//!
//! Phase-based responses (all vector valued, masked pixels respond 0):
//!
//! - DPC: `(u ∂v/∂s − v ∂u/∂s) / (u² + |v|²)`
//! - LA: `D a = (u D u + |v| D|v|) / (u² + |v|²)`
//! - MDPC: `DPC − Vec[(D n) n] sin²θ`, `n = v/|v|`
//! - LA+MDPC: `MDPC − D a`
//!
//! Sobel and Gaussian-derivative (Canny) gradients serve as baselines. Every
//! method goes through the same non-maximum suppression and hysteresis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::default_mask_eps;
use crate::field::{ScalarField, VectorField};
use crate::local::MonogenicJet;
use crate::scalespace::{
    spatial_gradient, Derivative, MonogenicField, ScaleDerivativeMode, ScaleDerivatives, Spectrum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Canny,
    Sobel,
    Dpc,
    La,
    Mdpc,
    LaMdpc,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Canny, Method::Sobel, Method::Dpc, Method::La, Method::Mdpc, Method::LaMdpc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Canny => "canny",
            Method::Sobel => "sobel",
            Method::Dpc => "dpc",
            Method::La => "la",
            Method::Mdpc => "mdpc",
            Method::LaMdpc => "la_mdpc",
        }
    }

    pub fn is_phase_based(self) -> bool {
        !matches!(self, Method::Canny | Method::Sobel)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "canny" => Ok(Method::Canny),
            "sobel" => Ok(Method::Sobel),
            "dpc" => Ok(Method::Dpc),
            "la" => Ok(Method::La),
            "mdpc" => Ok(Method::Mdpc),
            "la_mdpc" | "la+mdpc" | "mixed" => Ok(Method::LaMdpc),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// A vector-valued edge response with its pointwise magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMap {
    pub g1: ScalarField,
    pub g2: ScalarField,
    pub magnitude: ScalarField,
    pub method: Method,
    pub scale: Option<f64>,
}

impl GradientMap {
    pub fn new(g1: ScalarField, g2: ScalarField, method: Method, scale: Option<f64>) -> Result<Self> {
        let magnitude = g1.zip_map(&g2, f64::hypot)?;
        Ok(Self { g1, g2, magnitude, method, scale })
    }

    fn from_vector(v: VectorField, method: Method, scale: Option<f64>) -> Self {
        Self::new(v.v1, v.v2, method, scale).expect("vector components share dimensions")
    }

    pub fn dims(&self) -> (usize, usize) {
        self.g1.dims()
    }

    pub fn as_vector(&self) -> VectorField {
        VectorField { v1: self.g1.clone(), v2: self.g2.clone() }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            g1: self.g1.scaled(k),
            g2: self.g2.scaled(k),
            magnitude: self.magnitude.scaled(k.abs()),
            method: self.method,
            scale: self.scale,
        }
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Self {
        Self {
            g1: self.g1.crop(x0, y0, width, height),
            g2: self.g2.crop(x0, y0, width, height),
            magnitude: self.magnitude.crop(x0, y0, width, height),
            method: self.method,
            scale: self.scale,
        }
    }
}

/// Parameters an edge map was produced with.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub method: Method,
    pub scale: Option<f64>,
    pub nms_radius: Option<f64>,
    pub low: f64,
    pub high: f64,
}

/// Binary edge mask.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    edges: Vec<bool>,
    pub provenance: Provenance,
}

impl EdgeMap {
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.edges[y * self.width + x]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.edges
    }

    /// 0 for background, 255 for edges.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.edges.iter().map(|&e| if e { 255 } else { 0 }).collect()
    }
}

/// Full configuration of one detector run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub method: Method,
    /// Poisson scale `s` of the phase-based methods.
    pub scale: f64,
    pub scale_derivative: ScaleDerivativeMode,
    /// Amplitude threshold below which pixels are masked; `None` means
    /// `1e−8 · max amplitude`.
    pub mask_eps: Option<f64>,
    pub nms_radius: f64,
    pub low: f64,
    pub high: f64,
    /// Mirror padding (pixels) applied before frequency-domain filtering.
    pub pad: usize,
    /// Gaussian σ of the Canny baseline.
    pub canny_sigma: f64,
    /// The magnitude percentile that is mapped to [`Self::normalized_level`].
    pub normalize_percentile: f64,
    pub normalized_level: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            method: Method::Mdpc,
            scale: 0.5,
            scale_derivative: ScaleDerivativeMode::Analytic,
            mask_eps: None,
            nms_radius: 1.5,
            low: 1.0,
            high: 3.5,
            pad: 16,
            canny_sigma: 1.0,
            normalize_percentile: 0.99,
            normalized_level: 10.0,
        }
    }
}

impl DetectorConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale must be positive (got {})", self.scale));
        }
        if let ScaleDerivativeMode::FiniteDifference { step: Some(d) } = self.scale_derivative {
            if !(d > 0.0 && d < self.scale) {
                return Err(Error::BadScaleStep { step: d, scale: self.scale });
            }
        }
        if let Some(e) = self.mask_eps {
            if !(e > 0.0) {
                return bad(format!("mask epsilon must be positive (got {e})"));
            }
        }
        if !(self.nms_radius > 0.0 && self.nms_radius.is_finite()) {
            return bad(format!("NMS radius must be positive (got {})", self.nms_radius));
        }
        if !(self.low < self.high) {
            return Err(Error::BadThresholds { low: self.low, high: self.high });
        }
        if !(self.canny_sigma > 0.0) {
            return bad(format!("Canny sigma must be positive (got {})", self.canny_sigma));
        }
        if !(self.normalize_percentile > 0.0 && self.normalize_percentile <= 1.0) {
            return bad(format!("percentile must lie in (0, 1] (got {})", self.normalize_percentile));
        }
        if !(self.normalized_level > 0.0) {
            return bad(format!("normalized level must be positive (got {})", self.normalized_level));
        }
        Ok(())
    }
}

/// DPC response `(u ∂v/∂s − v ∂u/∂s) / (u² + |v|²)`.
pub fn dpc_gradient(f: &MonogenicField, ds: &ScaleDerivatives, eps: f64) -> GradientMap {
    let (w, h) = f.dims();
    let value = |x: usize, y: usize, c: usize| {
        let u = f.u.get(x, y);
        let v = f.v.get(x, y);
        let a2 = u * u + v[0] * v[0] + v[1] * v[1];
        if a2.sqrt() <= eps {
            return 0.0;
        }
        (u * ds.dv_ds.get(x, y)[c] - v[c] * ds.du_ds.get(x, y)) / a2
    };
    let g1 = ScalarField::from_fn(w, h, |x, y| value(x, y, 0));
    let g2 = ScalarField::from_fn(w, h, |x, y| value(x, y, 1));
    GradientMap::new(g1, g2, Method::Dpc, Some(f.scale)).expect("same grid")
}

/// LA response `(u D u + |v| D|v|) / (u² + |v|²)` from central differences
/// of `u` and `|v|`.
pub fn la_gradient(f: &MonogenicField, eps: f64) -> Result<GradientMap> {
    let norm = f.v.norm();
    let du = spatial_gradient(&f.u)?;
    let dn = spatial_gradient(&norm)?;
    let (w, h) = f.dims();
    let value = |x: usize, y: usize, c: usize| {
        let u = f.u.get(x, y);
        let n = norm.get(x, y);
        let a2 = u * u + n * n;
        if a2.sqrt() <= eps {
            return 0.0;
        }
        (u * du.get(x, y)[c] + n * dn.get(x, y)[c]) / a2
    };
    GradientMap::new(
        ScalarField::from_fn(w, h, |x, y| value(x, y, 0)),
        ScalarField::from_fn(w, h, |x, y| value(x, y, 1)),
        Method::La,
        Some(f.scale),
    )
}

/// The orientation-curvature term `Vec[(D n) n] sin²θ`, with `D n` built from
/// central differences of `v`. Zero where amplitude or `|v|` is `≤ eps`.
pub fn orientation_curvature(f: &MonogenicField, eps: f64) -> Result<VectorField> {
    let jet = MonogenicJet::new(f, None, Derivative::Central)?;
    Ok(jet.map_vector(|p| (p.amplitude() > eps && p.vector_norm() > eps).then(|| p.orientation_curvature())))
}

/// MDPC response `DPC − Vec[(D n) n] sin²θ`.
pub fn mdpc_gradient(f: &MonogenicField, ds: &ScaleDerivatives, eps: f64) -> Result<GradientMap> {
    let dpc = dpc_gradient(f, ds, eps);
    let corr = orientation_curvature(f, eps)?;
    let g1 = dpc.g1.zip_map(&corr.v1, |a, b| a - b)?;
    let g2 = dpc.g2.zip_map(&corr.v2, |a, b| a - b)?;
    GradientMap::new(g1, g2, Method::Mdpc, Some(f.scale))
}

/// LA+MDPC response `DPC − D a − Vec[(D n) n] sin²θ`.
pub fn mixed_gradient(f: &MonogenicField, ds: &ScaleDerivatives, eps: f64) -> Result<GradientMap> {
    let mdpc = mdpc_gradient(f, ds, eps)?;
    let la = la_gradient(f, eps)?;
    let g1 = mdpc.g1.zip_map(&la.g1, |a, b| a - b)?;
    let g2 = mdpc.g2.zip_map(&la.g2, |a, b| a - b)?;
    GradientMap::new(g1, g2, Method::LaMdpc, Some(f.scale))
}

/// Unnormalized 3×3 Sobel responses, replicating border pixels.
pub fn sobel_gradient(img: &ScalarField) -> Result<GradientMap> {
    let (w, h) = img.dims();
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall { width: w, height: h, min: 3 });
    }
    let p = |x: usize, y: usize, dx: isize, dy: isize| img.get_clamped(x as isize + dx, y as isize + dy);
    let g1 = ScalarField::from_fn(w, h, |x, y| {
        (p(x, y, 1, -1) + 2.0 * p(x, y, 1, 0) + p(x, y, 1, 1))
            - (p(x, y, -1, -1) + 2.0 * p(x, y, -1, 0) + p(x, y, -1, 1))
    });
    let g2 = ScalarField::from_fn(w, h, |x, y| {
        (p(x, y, -1, 1) + 2.0 * p(x, y, 0, 1) + p(x, y, 1, 1))
            - (p(x, y, -1, -1) + 2.0 * p(x, y, 0, -1) + p(x, y, 1, -1))
    });
    GradientMap::new(g1, g2, Method::Sobel, None)
}

/// Separable Gaussian blur with a kernel truncated at `3σ`, replicating border pixels.
pub fn gaussian_blur(img: &ScalarField, sigma: f64) -> Result<ScalarField> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("Gaussian sigma must be positive (got {sigma})")));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);
    let (w, h) = img.dims();
    let rows = ScalarField::from_fn(w, h, |x, y| {
        kernel.iter().zip(-radius..=radius).map(|(k, i)| k * img.get_clamped(x as isize + i, y as isize)).sum()
    });
    Ok(ScalarField::from_fn(w, h, |x, y| {
        kernel.iter().zip(-radius..=radius).map(|(k, i)| k * rows.get_clamped(x as isize, y as isize + i)).sum()
    }))
}

/// Central-difference gradient of the Gaussian-smoothed image.
pub fn canny_gradient(img: &ScalarField, sigma: f64) -> Result<GradientMap> {
    let smooth = gaussian_blur(img, sigma)?;
    let g = spatial_gradient(&smooth)?;
    Ok(GradientMap::from_vector(g, Method::Canny, None))
}

fn bilinear(f: &ScalarField, x: f64, y: f64) -> f64 {
    let (w, h) = f.dims();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let (tx, ty) = (x - x0 as f64, y - y0 as f64);
    let top = f.get(x0, y0) * (1.0 - tx) + f.get(x1, y0) * tx;
    let bottom = f.get(x0, y1) * (1.0 - tx) + f.get(x1, y1) * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Keeps a pixel only if its magnitude is at least the bilinearly
/// interpolated magnitude `radius` pixels ahead and behind along the gradient.
pub fn non_maximum_suppression(g: &GradientMap, radius: f64) -> Result<GradientMap> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("NMS radius must be positive (got {radius})")));
    }
    let (w, h) = g.dims();
    let keep: Vec<bool> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let m = g.magnitude.get(x, y);
            if m <= 0.0 {
                return false;
            }
            let (dx, dy) = (g.g1.get(x, y) / m * radius, g.g2.get(x, y) / m * radius);
            let (px, py) = (x as f64, y as f64);
            m >= bilinear(&g.magnitude, px + dx, py + dy) && m >= bilinear(&g.magnitude, px - dx, py - dy)
        })
        .collect();
    let pick = |f: &ScalarField| ScalarField::from_fn(w, h, |x, y| if keep[y * w + x] { f.get(x, y) } else { 0.0 });
    Ok(GradientMap {
        g1: pick(&g.g1),
        g2: pick(&g.g2),
        magnitude: pick(&g.magnitude),
        method: g.method,
        scale: g.scale,
    })
}

/// Two-threshold linking: pixels `≥ high` seed edges, which grow through
/// 8-connected pixels `≥ low`.
pub fn hysteresis_threshold(g: &GradientMap, low: f64, high: f64) -> Result<EdgeMap> {
    if !(low < high) {
        return Err(Error::BadThresholds { low, high });
    }
    let (w, h) = g.dims();
    let mag = &g.magnitude;
    let mut edges = vec![false; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if mag.get(x, y) >= high && !edges[y * w + x] {
                edges[y * w + x] = true;
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for ny in cy.saturating_sub(1)..=(cy + 1).min(h - 1) {
                        for nx in cx.saturating_sub(1)..=(cx + 1).min(w - 1) {
                            let i = ny * w + nx;
                            if !edges[i] && mag.get(nx, ny) >= low {
                                edges[i] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(EdgeMap {
        width: w,
        height: h,
        edges,
        provenance: Provenance { method: g.method, scale: g.scale, nms_radius: None, low, high },
    })
}

/// Nearest-rank percentile `q ∈ (0, 1]` of the magnitudes.
pub fn magnitude_percentile(g: &GradientMap, q: f64) -> f64 {
    let mut values = g.magnitude.data().to_vec();
    values.sort_by(f64::total_cmp);
    let rank = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[rank - 1]
}

/// Rescales `g` so that its `percentile` magnitude equals `level`. Falls back
/// to the maximum when the percentile is zero; an all-zero map is returned
/// unchanged.
pub fn normalize_magnitude(g: &GradientMap, percentile: f64, level: f64) -> GradientMap {
    let mut reference = magnitude_percentile(g, percentile);
    if reference <= 0.0 {
        reference = g.magnitude.max_abs();
    }
    if reference <= 0.0 {
        return g.clone();
    }
    g.scaled(level / reference)
}

/// Output of [`detect`].
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Normalized gradient map before thinning.
    pub gradient: GradientMap,
    pub suppressed: GradientMap,
    pub edges: EdgeMap,
}

/// The gradient map of `cfg.method` on `img`, before normalization.
pub fn method_gradient(img: &ScalarField, cfg: &DetectorConfig) -> Result<GradientMap> {
    cfg.validate()?;
    match cfg.method {
        Method::Sobel => sobel_gradient(img),
        Method::Canny => canny_gradient(img, cfg.canny_sigma),
        method => {
            let (w, h) = img.dims();
            let padded = img.mirror_pad(cfg.pad);
            let spectrum = Spectrum::of(&padded);
            let field = spectrum.monogenic(cfg.scale)?;
            let eps = cfg.mask_eps.unwrap_or_else(|| default_mask_eps(&field));
            let needs_ds = method != Method::La;
            let ds = if needs_ds { Some(spectrum.scale_derivative(cfg.scale, cfg.scale_derivative)?) } else { None };
            let ds = ds.as_ref();
            let g = match method {
                Method::Dpc => dpc_gradient(&field, ds.expect("computed"), eps),
                Method::La => la_gradient(&field, eps)?,
                Method::Mdpc => mdpc_gradient(&field, ds.expect("computed"), eps)?,
                Method::LaMdpc => mixed_gradient(&field, ds.expect("computed"), eps)?,
                Method::Canny | Method::Sobel => unreachable!(),
            };
            Ok(g.crop(cfg.pad, cfg.pad, w, h))
        }
    }
}

/// Runs the whole pipeline: gradient map, magnitude normalization,
/// non-maximum suppression and hysteresis.
pub fn detect(img: &ScalarField, cfg: &DetectorConfig) -> Result<Detection> {
    let raw = method_gradient(img, cfg)?;
    let gradient = normalize_magnitude(&raw, cfg.normalize_percentile, cfg.normalized_level);
    let suppressed = non_maximum_suppression(&gradient, cfg.nms_radius)?;
    let mut edges = hysteresis_threshold(&suppressed, cfg.low, cfg.high)?;
    edges.provenance.nms_radius = Some(cfg.nms_radius);
    if !cfg.method.is_phase_based() {
        edges.provenance.scale = None;
    }
    Ok(Detection { gradient, suppressed, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{geometric_product, vector_part, Multivector2};
    use crate::features::local_attenuation;
    use crate::fixtures::{band_limited_random, plane_wave, radial_blob, ramp, vertical_step};
    use crate::scalespace::{monogenic_scale, scale_derivative};

    fn phase_inputs(img: &ScalarField, s: f64) -> (MonogenicField, ScaleDerivatives) {
        (monogenic_scale(img, s).unwrap(), scale_derivative(img, s, ScaleDerivativeMode::Analytic).unwrap())
    }

    fn assert_magnitude_consistent(g: &GradientMap) {
        let m = g.g1.zip_map(&g.g2, f64::hypot).unwrap();
        assert!(m.sup_diff(&g.magnitude) <= 1e-10);
    }

    #[test]
    fn constant_image_gives_zero_response_everywhere() {
        let img = ScalarField::constant(24, 20, 3.0);
        let (f, ds) = phase_inputs(&img, 0.5);
        let eps = default_mask_eps(&f);
        let maps = [
            dpc_gradient(&f, &ds, eps),
            la_gradient(&f, eps).unwrap(),
            mdpc_gradient(&f, &ds, eps).unwrap(),
            mixed_gradient(&f, &ds, eps).unwrap(),
            sobel_gradient(&img).unwrap(),
            canny_gradient(&img, 1.0).unwrap(),
        ];
        for g in &maps {
            assert!(g.magnitude.max_abs() <= 1e-10, "{}", g.method);
            assert_magnitude_consistent(g);
        }
    }

    #[test]
    fn sobel_on_unit_ramp() {
        let g = sobel_gradient(&ramp(8, 6)).unwrap();
        for y in 1..5 {
            for x in 1..7 {
                assert_eq!(g.g1.get(x, y), 8.0);
                assert_eq!(g.g2.get(x, y), 0.0);
            }
        }
        assert!(matches!(sobel_gradient(&ScalarField::zeros(2, 5)), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn canny_is_linear() {
        let a = band_limited_random(20, 18, 4.0, 0.0, 1);
        let b = band_limited_random(20, 18, 4.0, 0.0, 2);
        let combo = a.zip_map(&b, |p, q| 2.0 * p - 0.5 * q).unwrap();
        let (ga, gb, gc) =
            (canny_gradient(&a, 1.3).unwrap(), canny_gradient(&b, 1.3).unwrap(), canny_gradient(&combo, 1.3).unwrap());
        let expect = ga.g1.zip_map(&gb.g1, |p, q| 2.0 * p - 0.5 * q).unwrap();
        assert!(expect.sup_diff(&gc.g1) <= 1e-10);
    }

    #[test]
    fn canny_response_widens_with_sigma() {
        let img = vertical_step(40, 4, 20, 0.0, 1.0);
        let width = |sigma: f64| {
            let g = canny_gradient(&img, sigma).unwrap();
            let peak = (0..40).map(|x| g.magnitude.get(x, 2)).fold(0.0, f64::max);
            assert_eq!(g.magnitude.get(20, 2), peak);
            (0..40).filter(|&x| g.magnitude.get(x, 2) > 0.5 * peak).count()
        };
        assert!(width(3.0) > width(1.0));
    }

    /// Per-row argmax of the magnitude lies within one pixel of `column`.
    fn peaks_near(g: &GradientMap, column: usize) -> bool {
        let (w, h) = g.dims();
        (0..h).all(|y| {
            let best = (0..w).max_by(|&a, &b| g.magnitude.get(a, y).total_cmp(&g.magnitude.get(b, y))).unwrap();
            best.abs_diff(column) <= 1
        })
    }

    #[test]
    fn responses_peak_at_the_step() {
        let img = vertical_step(48, 16, 24, 0.25, 0.75);
        for method in Method::ALL {
            let g = method_gradient(&img, &DetectorConfig::with_method(method)).unwrap();
            assert!(peaks_near(&g, 24), "{method}");
            assert_magnitude_consistent(&g);
        }
    }

    #[test]
    fn dpc_is_invariant_under_positive_scaling() {
        let img = band_limited_random(32, 32, 5.0, 0.3, 4);
        let (f, ds) = phase_inputs(&img, 0.5);
        let (f3, ds3) = phase_inputs(&img.scaled(3.0), 0.5);
        let a = dpc_gradient(&f, &ds, 0.0);
        let b = dpc_gradient(&f3, &ds3, 0.0);
        assert!(a.as_vector().sup_diff(&b.as_vector()) <= 1e-10);
    }

    #[test]
    fn mdpc_minus_dpc_is_the_curvature_term() {
        let img = band_limited_random(32, 32, 5.0, 0.0, 5);
        let (f, ds) = phase_inputs(&img, 0.5);
        let eps = default_mask_eps(&f);
        let diff = mdpc_gradient(&f, &ds, eps).unwrap().as_vector();
        let dpc = dpc_gradient(&f, &ds, eps).as_vector();
        let corr = orientation_curvature(&f, eps).unwrap();
        let lhs = VectorField::new(
            diff.v1.zip_map(&dpc.v1, |a, b| a - b).unwrap(),
            diff.v2.zip_map(&dpc.v2, |a, b| a - b).unwrap(),
        )
        .unwrap();
        assert!(lhs.sup_diff(&corr.negated()) <= 1e-12);
        assert!(corr.max_abs() > 1e-3, "fixture must exercise the correction");
    }

    #[test]
    fn mixed_is_mdpc_minus_la() {
        let img = band_limited_random(24, 24, 4.0, 0.0, 6);
        let (f, ds) = phase_inputs(&img, 0.5);
        let eps = default_mask_eps(&f);
        let mixed = mixed_gradient(&f, &ds, eps).unwrap();
        let mdpc = mdpc_gradient(&f, &ds, eps).unwrap();
        let la = la_gradient(&f, eps).unwrap();
        assert!(mixed.g1.sup_diff(&mdpc.g1.zip_map(&la.g1, |a, b| a - b).unwrap()) <= 1e-12);
        assert!(mixed.g2.sup_diff(&mdpc.g2.zip_map(&la.g2, |a, b| a - b).unwrap()) <= 1e-12);
    }

    #[test]
    fn plane_signal_has_no_orientation_correction() {
        let img = plane_wave(64, 16, 3, 0, 0.4).zip_map(&plane_wave(64, 16, 5, 0, 1.1), |a, b| a + 0.5 * b).unwrap();
        let (f, ds) = phase_inputs(&img, 0.5);
        let eps = default_mask_eps(&f);
        let mdpc = mdpc_gradient(&f, &ds, eps).unwrap();
        let dpc = dpc_gradient(&f, &ds, eps);
        assert!(mdpc.as_vector().sup_diff(&dpc.as_vector()) <= 1e-3);
    }

    #[test]
    fn curvature_closed_form_matches_clifford_product() {
        let img = band_limited_random(24, 24, 4.0, 0.0, 8);
        let (f, _) = phase_inputs(&img, 0.5);
        let jet = MonogenicJet::new(&f, None, Derivative::Central).unwrap();
        let (w, h) = f.dims();
        for y in 0..h {
            for x in 0..w {
                let p = jet.pixel(x, y);
                let n = p.orientation();
                let dn = p.grad_orientation();
                let sin2 = (p.v[0] * p.v[0] + p.v[1] * p.v[1]) / p.amplitude_squared();
                // D n = -div n + curl n e12
                let div = dn[0][0] + dn[1][1];
                let curl = dn[0][1] - dn[1][0];
                let closed = [(-div * n[0] - curl * n[1]) * sin2, (-div * n[1] + curl * n[0]) * sin2];
                let generic = vector_part(geometric_product(p.dirac_orientation(), Multivector2::vector(n[0], n[1])));
                let generic = [generic.c1 * sin2, generic.c2 * sin2];
                let lib = p.orientation_curvature();
                for i in 0..2 {
                    assert!((closed[i] - generic[i]).abs() <= 1e-10);
                    assert!((closed[i] - lib[i]).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn la_matches_gradient_of_attenuation_on_smooth_field() {
        // central differences of a nonlinear function only agree with the
        // chain rule up to O(h²), so the field has to be very gentle
        let img = band_limited_random(128, 128, 1.0, 40.0, 9);
        let (f, _) = phase_inputs(&img, 2.0);
        let eps = default_mask_eps(&f);
        let la = la_gradient(&f, eps).unwrap();
        let (a, _) = local_attenuation(&f, eps);
        let ga = spatial_gradient(&a).unwrap();
        let inner = |g: &ScalarField| g.crop(2, 2, 124, 124);
        assert!(inner(&la.g1).sup_diff(&inner(&ga.v1)) <= 1e-6);
        assert!(inner(&la.g2).sup_diff(&inner(&ga.v2)) <= 1e-6);
    }

    #[test]
    fn la_points_radially_on_a_blob() {
        let img = radial_blob(128, 128, 12.0);
        let (f, _) = phase_inputs(&img, 0.5);
        let la = la_gradient(&f, default_mask_eps(&f)).unwrap();
        let mut worst: f64 = 0.0;
        for y in 0..128 {
            for x in 0..128 {
                let (dx, dy) = (x as f64 - 64.0, y as f64 - 64.0);
                let r = dx.hypot(dy);
                let m = la.magnitude.get(x, y);
                // |v| has a cone point at the centre where central differences
                // lose isotropy; far out the periodic copies bend v.
                if !(10.0..=18.0).contains(&r) || m == 0.0 {
                    continue;
                }
                let cross = (la.g1.get(x, y) * dy - la.g2.get(x, y) * dx) / (r * m);
                worst = worst.max(cross.abs());
            }
        }
        assert!(worst <= 1e-3, "max normalized cross product {worst}");
    }

    fn map_from(values: Vec<Vec<f64>>) -> GradientMap {
        let (h, w) = (values.len(), values[0].len());
        let g1 = ScalarField::from_fn(w, h, |x, y| values[y][x]);
        GradientMap::new(g1, ScalarField::zeros(w, h), Method::Sobel, None).unwrap()
    }

    #[test]
    fn nms_keeps_an_isolated_pixel() {
        let mut rows = vec![vec![0.0; 5]; 5];
        rows[2][2] = 4.0;
        let g = map_from(rows);
        assert_eq!(non_maximum_suppression(&g, 1.5).unwrap(), g);
    }

    #[test]
    fn nms_thins_a_ridge_to_its_crest() {
        let profile = [0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        let g = map_from(vec![profile.to_vec(); 4]);
        let once = non_maximum_suppression(&g, 1.5).unwrap();
        for y in 0..4 {
            for x in 0..9 {
                assert_eq!(once.magnitude.get(x, y) > 0.0, x == 4, "({x},{y})");
            }
        }
        let twice = non_maximum_suppression(&once, 1.5).unwrap();
        assert_eq!(once, twice);
        assert!(non_maximum_suppression(&g, 0.0).is_err());
    }

    #[test]
    fn nms_is_idempotent_on_real_responses() {
        let img = band_limited_random(32, 32, 6.0, 0.0, 10);
        let g = normalize_magnitude(&sobel_gradient(&img).unwrap(), 0.99, 10.0);
        let once = non_maximum_suppression(&g, 1.5).unwrap();
        assert_eq!(once, non_maximum_suppression(&once, 1.5).unwrap());
    }

    #[test]
    fn hysteresis_follows_a_connected_chain() {
        let mut rows = vec![vec![0.0; 5]; 5];
        rows[0][0] = 5.0;
        for (x, y) in [(1, 1), (2, 2), (3, 2), (4, 3)] {
            rows[y][x] = 1.5;
        }
        rows[4][0] = 2.0; // weak and unconnected
        let e = hysteresis_threshold(&map_from(rows), 1.0, 3.5).unwrap();
        assert_eq!(e.edge_count(), 5);
        assert!(e.is_edge(4, 3) && !e.is_edge(0, 4));
    }

    #[test]
    fn hysteresis_without_seeds_is_empty() {
        let mut rows = vec![vec![0.0; 6]; 6];
        rows[0][0] = 2.0;
        rows[0][1] = 2.0;
        rows[4][4] = 3.0;
        let g = map_from(rows);
        assert_eq!(hysteresis_threshold(&g, 1.0, 3.5).unwrap().edge_count(), 0);
        assert_eq!(hysteresis_threshold(&g, 5.0, 6.0).unwrap().edge_count(), 0);
        assert!(matches!(hysteresis_threshold(&g, 3.5, 3.5), Err(Error::BadThresholds { .. })));
    }

    #[test]
    fn raising_low_never_adds_edges() {
        let img = band_limited_random(40, 40, 8.0, 0.0, 11);
        let g = normalize_magnitude(&canny_gradient(&img, 1.0).unwrap(), 0.99, 10.0);
        let thin = non_maximum_suppression(&g, 1.5).unwrap();
        let mut prev = hysteresis_threshold(&thin, 0.1, 3.5).unwrap();
        for low in [0.5, 1.0, 2.0, 3.0] {
            let next = hysteresis_threshold(&thin, low, 3.5).unwrap();
            assert!(next.as_slice().iter().zip(prev.as_slice()).all(|(&n, &p)| !n || p));
            prev = next;
        }
    }

    fn is_thin_step_edge(e: &EdgeMap, column: usize) -> bool {
        let (w, h) = e.dims();
        (0..h).all(|y| {
            let xs: Vec<usize> = (0..w).filter(|&x| e.is_edge(x, y)).collect();
            !xs.is_empty() && xs.iter().all(|x| x.abs_diff(column) <= 1) && xs.windows(2).all(|p| p[1] > p[0] + 1)
        })
    }

    #[test]
    fn every_method_finds_a_thin_step_edge() {
        let img = vertical_step(64, 64, 32, 0.25, 0.75);
        for method in Method::ALL {
            let d = detect(&img, &DetectorConfig::with_method(method)).unwrap();
            assert!(is_thin_step_edge(&d.edges, 32), "{method}: {} edge pixels", d.edges.edge_count());
            assert_eq!(d.edges.provenance.method, method);
        }
    }

    #[test]
    fn blank_image_has_no_edges() {
        let img = ScalarField::zeros(32, 32);
        for method in Method::ALL {
            let d = detect(&img, &DetectorConfig::with_method(method)).unwrap();
            assert_eq!(d.edges.edge_count(), 0, "{method}");
        }
    }

    #[test]
    fn dpc_edges_ignore_contrast_doubling() {
        let img = band_limited_random(48, 48, 6.0, 0.5, 12);
        let cfg = DetectorConfig::with_method(Method::Dpc);
        let a = detect(&img, &cfg).unwrap().edges;
        let b = detect(&img.scaled(2.0), &cfg).unwrap().edges;
        assert!(a.edge_count() > 0);
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let ok = DetectorConfig::default();
        assert!(ok.validate().is_ok());
        assert!(DetectorConfig { scale: -1.0, ..ok.clone() }.validate().is_err());
        assert!(DetectorConfig { low: 4.0, ..ok.clone() }.validate().is_err());
        assert!(DetectorConfig { nms_radius: 0.0, ..ok.clone() }.validate().is_err());
        let fd = ScaleDerivativeMode::FiniteDifference { step: Some(0.5) };
        assert!(DetectorConfig { scale_derivative: fd, ..ok.clone() }.validate().is_err());
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("prewitt".parse::<Method>().is_err());
    }
}
