//! Finite-difference check of SprayNet's analytic gradients.
//!
//! cargo run --release --example gradient_check -- [seed]

use mixc::netcore::{check_gradients, Model, ModelSpec};
use mixc::rng::stream;
use mixc::{Class, SoftLabel, Tensor};
use rand::Rng;

fn main() -> mixc::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut rng = stream(seed, &[]);
    let model = Model::new(ModelSpec::spray_net(3, 8, 8), seed)?;
    let batch = Tensor::from_vec(&[2, 3, 8, 8], (0..2 * 3 * 64).map(|_| rng.random()).collect())?;
    let targets = [
        SoftLabel::one_hot(Class::PrePost).mix(&SoftLabel::one_hot(Class::Collapse), 0.3),
        SoftLabel::one_hot(Class::Transitional),
    ];
    let report = check_gradients(&model, &batch, &targets, 1e-5)?;
    for (i, err) in report.per_tensor.iter().enumerate() {
        println!("param {i:>2}: max relative error {err:.2e}");
    }
    println!("checked {} entries, worst {:.2e}", report.checked, report.max_rel_error);
    Ok(())
}
