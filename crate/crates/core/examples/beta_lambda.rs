//! Histogram of mixing coefficients for several Beta shapes.
//!
//! cargo run --release --example beta_lambda -- [alpha...]

use mixc::augment::sample_lambda;
use mixc::rng::stream;

const DRAWS: usize = 100_000;
const BINS: usize = 10;

fn main() -> mixc::Result<()> {
    let mut alphas: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if alphas.is_empty() {
        alphas = vec![0.2, 0.4, 0.6, 1.0];
    }
    for (k, &alpha) in alphas.iter().enumerate() {
        let mut rng = stream(0, &[k as u64]);
        let mut hist = [0usize; BINS];
        let mut sum = 0.0;
        for _ in 0..DRAWS {
            let l = sample_lambda(alpha, &mut rng)?;
            sum += l;
            hist[((l * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        println!("alpha={alpha}: mean {:.4}", sum / DRAWS as f64);
        for (b, &n) in hist.iter().enumerate() {
            let share = n as f64 / DRAWS as f64;
            println!("  [{:.1},{:.1}) {:>6.3} {}", b as f64 / BINS as f64, (b + 1) as f64 / BINS as f64, share, "#".repeat((share * 100.0) as usize));
        }
    }
    Ok(())
}
