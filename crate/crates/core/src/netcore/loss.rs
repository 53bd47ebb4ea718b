use crate::error::{Error, Result};
use crate::label::{SoftLabel, NUM_CLASSES};
use crate::tensor::Tensor;

/// Probabilities are clipped to this value before taking logs.
pub const LOG_CLIP: f64 = 1e-12;

pub(crate) fn check_targets(targets: &[[f64; NUM_CLASSES]]) -> Result<()> {
    for (i, t) in targets.iter().enumerate() {
        SoftLabel::new(*t).map_err(|e| Error::InvalidLabel(format!("target {i}: {e}")))?;
    }
    Ok(())
}

/// Mean over rows of `-sum_c target_c * ln(max(pred_c, LOG_CLIP))`.
///
/// Targets may be arbitrary probability vectors; each is checked for the
/// sum-to-one invariant before use.
pub fn soft_cross_entropy_raw(pred: &Tensor, targets: &[[f64; NUM_CLASSES]]) -> Result<f64> {
    if pred.shape().len() != 2 || pred.shape()[1] != NUM_CLASSES || pred.shape()[0] != targets.len() {
        return Err(Error::Shape(format!(
            "predictions {:?} vs {} targets",
            pred.shape(),
            targets.len()
        )));
    }
    check_targets(targets)?;
    let mut total = 0.0;
    for (i, t) in targets.iter().enumerate() {
        let row = pred.row(i);
        for c in 0..NUM_CLASSES {
            total -= t[c] * row[c].max(LOG_CLIP).ln();
        }
    }
    Ok(total / targets.len() as f64)
}

pub fn soft_cross_entropy(pred: &Tensor, targets: &[SoftLabel]) -> Result<f64> {
    let raw: Vec<[f64; NUM_CLASSES]> = targets.iter().map(|t| *t.probs()).collect();
    soft_cross_entropy_raw(pred, &raw)
}
