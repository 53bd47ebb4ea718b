mod common;

use common::{constant_image, sample, sup_distance, BetaCdf};
use mixc::augment::{
    hflip_image, mixup_batch, mixup_pair, rotate_image, sample_lambda, shift_image, AugmentConfig, Pipeline,
};
use mixc::rng::stream;
use mixc::synthgen::{render_spray, SprayParams};
use mixc::{Class, ImageTensor, Sample, SoftLabel};
use proptest::prelude::*;

const DRAWS: usize = 100_000;

fn draws(alpha: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[]);
    let mut v: Vec<f64> = (0..DRAWS).map(|_| sample_lambda(alpha, &mut rng).unwrap()).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn quadrature_oracle_sanity() {
    // Beta(1,1) is uniform; Beta(a,a) is symmetric
    let u = BetaCdf::new(1.0);
    for x in [0.1, 0.25, 0.5, 0.9] {
        assert!((u.cdf(x) - x).abs() < 1e-9);
    }
    for a in [0.2, 0.4, 0.6] {
        let b = BetaCdf::new(a);
        assert!((b.cdf(0.5) - 0.5).abs() < 1e-12);
        assert!((b.cdf(0.3) + b.cdf(0.7) - 1.0).abs() < 1e-12);
    }
    // Beta(1/2,1/2) is the arcsine law
    let arcsine = BetaCdf::new(0.5);
    for x in [0.05f64, 0.2, 0.4] {
        let exact = 2.0 / std::f64::consts::PI * x.sqrt().asin();
        assert!((arcsine.cdf(x) - exact).abs() < 1e-6, "{x}");
    }
}

#[test]
fn beta_ecdf_matches_quadrature() {
    for (k, alpha) in [0.2, 0.4, 0.6, 1.0].into_iter().enumerate() {
        let v = draws(alpha, 100 + k as u64);
        let d = sup_distance(&v, &BetaCdf::new(alpha));
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!(d < 0.01, "alpha {alpha}: sup distance {d}");
        assert!((mean - 0.5).abs() < 0.005, "alpha {alpha}: mean {mean}");
    }
}

#[test]
fn central_mass_grows_with_alpha() {
    let mut prev = 0.0;
    for (k, alpha) in [0.2, 0.4, 0.6, 1.0].into_iter().enumerate() {
        let v = draws(alpha, 200 + k as u64);
        let central = v.iter().filter(|&&l| l > 0.4 && l < 0.6).count() as f64 / v.len() as f64;
        assert!(central > prev, "alpha {alpha}: {central} <= {prev}");
        prev = central;
    }
}

#[test]
fn interval_mass_alpha_02() {
    let v = draws(0.2, 7);
    let inside = v.iter().filter(|&&l| l > 0.2 && l < 0.8).count() as f64 / v.len() as f64;
    let expected = BetaCdf::new(0.2).mass(0.2, 0.8);
    assert!((inside - expected).abs() < 0.01, "{inside} vs {expected}");
}

fn gray_batch(n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = stream(seed, &[1]);
    (0..n)
        .map(|i| {
            use rand::Rng;
            let values: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            Sample {
                image: ImageTensor::from_values(4, 4, 1, values).unwrap(),
                label: SoftLabel::one_hot(Class::from_index(i % 4).unwrap()),
            }
        })
        .collect()
}

#[test]
fn tiny_alpha_almost_never_interpolates() {
    let batch = gray_batch(64, 3);
    let mut endpoint = 0;
    let mut total = 0;
    for b in 0..20 {
        let (out, records) = mixup_batch(&batch, 1e-6, &mut stream(11, &[b])).unwrap();
        for (o, r) in out.iter().zip(&records) {
            let near = |src: &Sample| {
                o.image
                    .values()
                    .iter()
                    .zip(src.image.values())
                    .all(|(x, y)| (x - y).abs() <= 1e-3)
            };
            if near(&batch[r.index_a]) || near(&batch[r.index_b]) {
                endpoint += 1;
            }
            total += 1;
        }
    }
    assert!(endpoint as f64 >= 0.99 * total as f64, "{endpoint}/{total}");
}

#[test]
fn blended_fraction_tracks_beta_mass() {
    let batch = gray_batch(32, 4);
    let mut blended = 0;
    let mut total = 0;
    for b in 0..400 {
        let (_, records) = mixup_batch(&batch, 0.2, &mut stream(12, &[b])).unwrap();
        blended += records.iter().filter(|r| r.lambda > 0.1 && r.lambda < 0.9).count();
        total += records.len();
    }
    let frac = blended as f64 / total as f64;
    let expected = BetaCdf::new(0.2).mass(0.1, 0.9);
    assert!((frac - expected).abs() < 0.02, "{frac} vs {expected}");
}

#[test]
fn seeded_batches_repeat() {
    let batch = gray_batch(8, 5);
    let a = mixup_batch(&batch, 0.4, &mut stream(9, &[0])).unwrap();
    let b = mixup_batch(&batch, 0.4, &mut stream(9, &[0])).unwrap();
    assert_eq!(a, b);
}

#[test]
fn endpoints_are_bitwise() {
    let batch = gray_batch(2, 6);
    let (a, b) = (&batch[0], &batch[1]);
    assert_eq!(&mixup_pair(a, b, 1.0).unwrap(), a);
    assert_eq!(&mixup_pair(a, b, 0.0).unwrap(), b);
}

#[test]
fn mixup_arithmetic() {
    let a = sample(constant_image(2, 2, 1, 0.2), [1.0, 0.0, 0.0, 0.0]);
    let b = sample(constant_image(2, 2, 1, 0.6), [0.0, 0.0, 1.0, 0.0]);
    let m = mixup_pair(&a, &b, 0.5).unwrap();
    assert!(m.image.values().iter().all(|&v| (v - 0.4).abs() < 1e-15));
    assert_eq!(m.label.probs(), &[0.5, 0.0, 0.5, 0.0]);
}

proptest! {
    #[test]
    fn convexity_closure(
        xa in prop::collection::vec(0.0f64..=1.0, 12),
        xb in prop::collection::vec(0.0f64..=1.0, 12),
        ca in 0usize..4, cb in 0usize..4,
        lambda in 0.0f64..=1.0,
    ) {
        let a = Sample { image: ImageTensor::from_values(2, 2, 3, xa.clone()).unwrap(), label: Class::from_index(ca).unwrap().into() };
        let b = Sample { image: ImageTensor::from_values(2, 2, 3, xb.clone()).unwrap(), label: Class::from_index(cb).unwrap().into() };
        let m = mixup_pair(&a, &b, lambda).unwrap();
        for (i, &v) in m.image.values().iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= xa[i].min(xb[i]) - 1e-15 && v <= xa[i].max(xb[i]) + 1e-15);
        }
        let sum: f64 = m.label.probs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        if ca == cb {
            prop_assert_eq!(m.label, a.label);
        }
    }
}

#[test]
fn geometric_identities() {
    let img = gray_batch(1, 8).remove(0).image;
    assert_eq!(rotate_image(&img, 0.0), img);
    assert_eq!(hflip_image(&hflip_image(&img)), img);
    let mut dot = ImageTensor::zeros(8, 8, 1);
    dot.set(0, 3, 2, 1.0);
    let moved = shift_image(&dot, 0.25, 0.0);
    assert_eq!(moved.get(0, 3, 4), 1.0);
    assert_eq!(moved.values().iter().sum::<f64>(), 1.0);
}

#[test]
fn mixup_only_pipeline_equals_mixup_batch() {
    let batch = gray_batch(6, 9);
    let pipeline = Pipeline::new(AugmentConfig::mixup(0.4)).unwrap();
    let out = pipeline.run(&batch, 21, 3).unwrap();
    let (samples, records) = mixup_batch(&batch, 0.4, &mut stream(21, &[3, u64::MAX])).unwrap();
    assert_eq!(out.samples, samples);
    assert_eq!(out.records, records);
}

#[test]
fn alpha_zero_pipeline_passes_sources_through() {
    let batch = gray_batch(5, 10);
    let out = Pipeline::new(AugmentConfig::default()).unwrap().run(&batch, 1, 0).unwrap();
    assert_eq!(out.samples, batch);
    assert!(out.records.is_empty());
}

#[test]
fn description_lists_mixup_first() {
    for (rot, shift, hflip) in [(0.0, 0.0, false), (20.0, 0.0, false), (0.0, 0.2, true), (10.0, 0.1, true)] {
        for alpha in [0.0, 0.2] {
            let p = Pipeline::new(AugmentConfig {
                alpha,
                rotation_max: rot,
                shift_max: shift,
                hflip,
                extended_range: false,
            })
            .unwrap();
            let d = p.describe();
            assert!(d.starts_with("[mixup("), "{d}");
            let pos = |s: &str| d.find(s);
            let order: Vec<usize> = ["rotate", "shift", "hflip"].iter().filter_map(|s| pos(s)).collect();
            assert!(order.windows(2).all(|w| w[0] < w[1]), "{d}");
        }
    }
}

/// Bright local maxima in the brightest row of the tip region.
fn tip_peaks(img: &ImageTensor) -> usize {
    let w = img.width();
    let rows = 2..img.height() / 6;
    let profile: Vec<f64> = (0..w)
        .map(|x| rows.clone().map(|y| img.get(0, y, x)).fold(0.0, f64::max))
        .collect();
    let peak = profile.iter().cloned().fold(0.0, f64::max);
    (1..w - 1)
        .filter(|&x| profile[x] > 0.5 * peak && profile[x] > profile[x - 1] && profile[x] >= profile[x + 1])
        .count()
}

#[test]
fn mixing_after_geometry_would_show_two_tips() {
    let params = SprayParams {
        noise_sigma: 0.0,
        ..Default::default()
    };
    let a = render_spray(&params, 64, 1).unwrap();
    let b = render_spray(&SprayParams { collapse: 0.5, ..params }, 64, 2).unwrap();
    let label = SoftLabel::one_hot(Class::NoCollapse);
    let sa = Sample { image: a.clone(), label };
    assert_eq!(tip_peaks(&a), 1);

    // forbidden order: shift one source, then mix
    let shifted = Sample { image: shift_image(&b, 0.2, 0.0), label };
    let wrong = mixup_pair(&sa, &shifted, 0.5).unwrap();
    assert_eq!(tip_peaks(&wrong.image), 2);

    // compliant order: mix, then shift the result
    let mixed = mixup_pair(&sa, &Sample { image: b, label }, 0.5).unwrap();
    assert_eq!(tip_peaks(&shift_image(&mixed.image, 0.2, 0.0)), 1);
}
