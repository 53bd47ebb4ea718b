//! Symmetric Beta sampling for the mixup coefficient.
//!
//! `lambda = X / (X + Y)` with `X, Y ~ Gamma(alpha, 1)` drawn by the
//! Marsaglia–Tsang squeeze method. Shapes below one use the boost
//! `Gamma(a) = Gamma(a + 1) * U^(1/a)`, evaluated in log space so that very
//! small shapes do not underflow to `0 / 0`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `ln G` for `G ~ Gamma(shape, 1)`, `shape > 0`.
pub fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = open01(rng);
        return ln_gamma_variate(shape + 1.0, rng) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = open01(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return (d * v).ln();
        }
    }
}

/// `G ~ Gamma(shape, 1)`.
pub fn gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    ln_gamma_variate(shape, rng).exp()
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Draws `lambda ~ Beta(alpha, alpha)`.
///
/// `alpha = 0` is the degenerate no-mixup case: `lambda` is 0 or 1 with equal
/// probability. Negative or non-finite `alpha` is rejected.
pub fn sample_lambda<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(if rng.random::<bool>() { 1.0 } else { 0.0 });
    }
    let ln_x = ln_gamma_variate(alpha, rng);
    let ln_y = ln_gamma_variate(alpha, rng);
    // x / (x + y) = 1 / (1 + exp(ln y - ln x))
    Ok((1.0 / (1.0 + (ln_y - ln_x).exp())).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn negative_alpha_rejected() {
        let mut rng = stream(0, &[]);
        assert!(sample_lambda(-0.1, &mut rng).is_err());
        assert!(sample_lambda(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn zero_alpha_picks_an_endpoint() {
        let mut rng = stream(0, &[]);
        let draws: Vec<f64> = (0..1000).map(|_| sample_lambda(0.0, &mut rng).unwrap()).collect();
        assert!(draws.iter().all(|&l| l == 0.0 || l == 1.0));
        let ones = draws.iter().filter(|&&l| l == 1.0).count();
        assert!((400..600).contains(&ones));
    }

    #[test]
    fn gamma_mean_matches_shape() {
        for shape in [0.2, 1.0, 3.5] {
            let mut rng = stream(11, &[]);
            let n = 100_000;
            let mean = (0..n).map(|_| gamma_variate(shape, &mut rng)).sum::<f64>() / n as f64;
            // sd of the mean is sqrt(shape / n)
            assert!((mean - shape).abs() < 5.0 * (shape / n as f64).sqrt(), "{shape}: {mean}");
        }
    }

    #[test]
    fn tiny_alpha_stays_finite() {
        let mut rng = stream(3, &[]);
        for _ in 0..1000 {
            let l = sample_lambda(1e-6, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&l));
        }
    }
}
