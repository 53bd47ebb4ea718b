//! Central finite-difference verification of [`Model::backward`].

use super::loss::soft_cross_entropy;
use super::model::Model;
use crate::error::Result;
use crate::label::SoftLabel;
use crate::tensor::Tensor;

/// Gradient magnitudes below this are compared absolutely rather than relatively.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Worst relative error per parameter tensor.
    pub per_tensor: Vec<f64>,
    pub max_rel_error: f64,
    pub checked: usize,
}

/// `|a - b| / max(|a|, |b|, REL_ERROR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERROR_FLOOR)
}

/// Compares every analytic gradient entry with `(L(p + h) - L(p - h)) / 2h`.
pub fn check_gradients(model: &Model, batch: &Tensor, targets: &[SoftLabel], h: f64) -> Result<GradCheckReport> {
    let (_, grads) = model.backward(batch, targets)?;
    let mut probe = model.clone();
    let mut per_tensor = Vec::with_capacity(grads.len());
    let mut checked = 0;
    for (t, grad) in grads.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for j in 0..grad.len() {
            let orig = probe.params()[t].data()[j];
            probe.params_mut()[t].data_mut()[j] = orig + h;
            let plus = soft_cross_entropy(&probe.forward(batch)?, targets)?;
            probe.params_mut()[t].data_mut()[j] = orig - h;
            let minus = soft_cross_entropy(&probe.forward(batch)?, targets)?;
            probe.params_mut()[t].data_mut()[j] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            worst = worst.max(relative_error(grad.data()[j], numeric));
            checked += 1;
        }
        per_tensor.push(worst);
    }
    let max_rel_error = per_tensor.iter().copied().fold(0.0, f64::max);
    Ok(GradCheckReport {
        per_tensor,
        max_rel_error,
        checked,
    })
}
