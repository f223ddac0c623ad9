use std::f64::consts::PI;

use monogenic_core::edgeops::{detect, DetectorConfig, Method};
use monogenic_core::export::{read_raw_f32, write_raw_f32};
use monogenic_core::features::{default_mask_eps, instantaneous_frequency, LocalFeatures};
use monogenic_core::field::ScalarField;
use monogenic_core::fixtures::{plane_wave, vertical_step};
use monogenic_core::scalespace::{monogenic_scale, Derivative};

#[test]
fn oblique_plane_wave_features() {
    let (n, k1, k2, s) = (64, 3, -2, 0.8);
    let img = plane_wave(n, n, k1, k2, 0.4);
    let omega = 2.0 * PI * ((k1 * k1 + k2 * k2) as f64).sqrt() / n as f64;
    let f = monogenic_scale(&img, s).unwrap();
    let feats = LocalFeatures::compute(&f, default_mask_eps(&f));

    let amp = (-s * omega).exp();
    assert!(feats.amplitude.data().iter().all(|a| (a - amp).abs() < 1e-12));
    // orientation is ± the wave vector wherever it is defined
    let dir = [k1 as f64, k2 as f64].map(|c| c / ((k1 * k1 + k2 * k2) as f64).sqrt());
    for y in 0..n {
        for x in 0..n {
            if feats.orientation_mask.is_valid(x, y) {
                let [o1, o2] = feats.orientation.get(x, y);
                assert!((o1 * dir[1] - o2 * dir[0]).abs() < 1e-9);
            }
        }
    }
    let back = feats.polar_reconstruction();
    assert!(back.u.sup_diff(&f.u) < 1e-12);

    let (freq, mask) = instantaneous_frequency(&f, default_mask_eps(&f), Derivative::Spectral).unwrap();
    for (i, ok) in mask.as_slice().iter().enumerate() {
        if *ok {
            assert!((freq.data()[i] - omega).abs() < 1e-9);
        }
    }
}

#[test]
fn horizontal_step_gives_a_horizontal_edge() {
    let img = vertical_step(48, 48, 24, 0.25, 0.75);
    let rotated = ScalarField::from_fn(48, 48, |x, y| img.get(y, x));
    for method in [Method::Dpc, Method::Mdpc, Method::Canny] {
        let edges = detect(&rotated, &DetectorConfig::with_method(method)).unwrap().edges;
        for x in 0..48 {
            let rows: Vec<usize> = (0..48).filter(|&y| edges.is_edge(x, y)).collect();
            assert!(!rows.is_empty() && rows.iter().all(|y| y.abs_diff(24) <= 1), "{method} column {x}: {rows:?}");
        }
    }
}

#[test]
fn gradient_survives_a_raw_round_trip() {
    let d = detect(&vertical_step(32, 24, 10, 0.25, 0.75), &DetectorConfig::default()).unwrap();
    let mut buf = Vec::new();
    write_raw_f32(&d.gradient.magnitude, &mut buf).unwrap();
    let back = read_raw_f32(buf.as_slice()).unwrap();
    assert_eq!(back.dims(), (32, 24));
    let tol = 1e-6 * d.gradient.magnitude.max_abs();
    assert!(back.sup_diff(&d.gradient.magnitude) <= tol);
}
