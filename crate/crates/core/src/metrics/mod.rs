//! Confusion matrices, per-class reports and run comparison tables.

pub mod compare;
pub mod confusion;

use serde::{Deserialize, Serialize};

pub use compare::{compare_runs, ComparisonRow, ComparisonTable, NamedRun};
pub use confusion::{ClassMetrics, ClassReport, ClassRow, ConfusionMatrix};

use crate::error::{Error, Result};
use crate::netcore::{argmax_rows, Model};
use crate::trainer::stack_images;
use crate::{Class, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub matrix: ConfusionMatrix,
    pub report: ClassReport,
}

/// Scores `model` against the argmax of each sample's label.
pub fn evaluate(model: &Model, samples: &[Sample]) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty sample set".into()));
    }
    let mut matrix = ConfusionMatrix::default();
    for chunk in samples.chunks(64) {
        let preds = argmax_rows(&model.forward(&stack_images(chunk)?)?);
        for (s, p) in chunk.iter().zip(preds) {
            matrix.record(s.label.argmax(), Class::from_index(p).expect("four outputs"));
        }
    }
    let report = ClassReport::from_matrix(&matrix)?;
    Ok(Evaluation { matrix, report })
}
