//! Oracles shared by integration tests.

#![allow(dead_code)]

use mixc::netcore::{LayerSpec, ModelSpec};
use mixc::{ImageTensor, Sample, SoftLabel, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// CDF of Beta(a, a) by Simpson quadrature, independent of any sampler.
///
/// The substitution t = u^(1/a) removes the endpoint singularity:
/// ∫₀ˣ t^(a-1) (1-t)^(a-1) dt = (1/a) ∫₀^(x^a) (1 - u^(1/a))^(a-1) du,
/// whose integrand is smooth for x ≤ 1/2. Symmetry covers x > 1/2.
pub struct BetaCdf {
    a: f64,
    half_mass: f64,
}

impl BetaCdf {
    pub fn new(a: f64) -> Self {
        let mut cdf = BetaCdf { a, half_mass: 1.0 };
        cdf.half_mass = cdf.partial(0.5);
        cdf
    }

    fn partial(&self, x: f64) -> f64 {
        let a = self.a;
        let upper = x.powf(a);
        let n = 4000;
        let h = upper / n as f64;
        let f = |u: f64| (1.0 - u.powf(1.0 / a)).powf(a - 1.0);
        let mut s = f(0.0) + f(upper);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0 / a
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else if x <= 0.5 {
            0.5 * self.partial(x) / self.half_mass
        } else {
            1.0 - self.cdf(1.0 - x)
        }
    }

    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf(lo)
    }
}

/// Kolmogorov distance between sorted draws and `cdf`, evaluated on a grid
/// dense in probability (not in x), so steep tails are resolved.
pub fn sup_distance(sorted: &[f64], cdf: &BetaCdf) -> f64 {
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let steps = 2000;
    for j in 1..steps {
        let q = j as f64 / steps as f64;
        // grid point x with u = x^a spread uniformly, mirrored for the upper half
        let x = if q <= 0.5 {
            (2.0 * q * 0.5f64.powf(cdf.a)).powf(1.0 / cdf.a)
        } else {
            1.0 - (2.0 * (1.0 - q) * 0.5f64.powf(cdf.a)).powf(1.0 / cdf.a)
        };
        let below = sorted.partition_point(|&v| v <= x) as f64 / n;
        worst = worst.max((below - cdf.cdf(x)).abs());
    }
    worst
}

pub fn constant_image(h: usize, w: usize, channels: usize, v: f64) -> ImageTensor {
    ImageTensor::from_values(h, w, channels, vec![v; h * w * channels]).unwrap()
}

pub fn sample(image: ImageTensor, probs: [f64; 4]) -> Sample {
    Sample {
        image,
        label: SoftLabel::new(probs).unwrap(),
    }
}

pub fn random_batch(seed: u64, shape: &[usize]) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

pub fn random_targets(seed: u64, n: usize) -> Vec<SoftLabel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    (0..n)
        .map(|_| {
            let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 0.05);
            let s: f64 = raw.iter().sum();
            let mut p = raw.map(|v| v / s);
            p[3] = 1.0 - p[0] - p[1] - p[2];
            SoftLabel::new(p).unwrap()
        })
        .collect()
}

/// One small model per layer type, plus the full SprayNet, on 8x8 inputs.
pub fn layer_models(channels: usize) -> Vec<(&'static str, ModelSpec)> {
    let conv = |i, o| LayerSpec::Conv2d { in_channels: i, out_channels: o };
    let head = |i| LayerSpec::Dense { inputs: i, outputs: 4 };
    let mk = |layers| ModelSpec { input_channels: channels, input_height: 8, input_width: 8, layers };
    vec![
        ("dense", mk(vec![LayerSpec::GlobalAvgPool, head(channels)])),
        ("conv2d", mk(vec![conv(channels, 3), LayerSpec::GlobalAvgPool, head(3)])),
        ("relu", mk(vec![conv(channels, 3), LayerSpec::Relu, LayerSpec::GlobalAvgPool, head(3)])),
        ("max_pool", mk(vec![conv(channels, 3), LayerSpec::MaxPool, LayerSpec::GlobalAvgPool, head(3)])),
        (
            "two_conv",
            mk(vec![
                conv(channels, 4),
                LayerSpec::Relu,
                LayerSpec::MaxPool,
                conv(4, 5),
                LayerSpec::Relu,
                LayerSpec::GlobalAvgPool,
                head(5),
            ]),
        ),
        ("spray_net", ModelSpec::spray_net(channels, 8, 8)),
    ]
}

