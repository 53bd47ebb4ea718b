use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{Class, NUM_CLASSES};

/// Counts indexed `[true][predicted]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Class, Class)>) -> Self {
        let mut m = ConfusionMatrix::default();
        for (t, p) in pairs {
            m.record(t, p);
        }
        m
    }

    pub fn from_counts(counts: [[u64; NUM_CLASSES]; NUM_CLASSES]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn record(&mut self, truth: Class, predicted: Class) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn support(&self, class: Class) -> u64 {
        self.counts[class.index()].iter().sum()
    }

    pub fn predicted(&self, class: Class) -> u64 {
        self.counts.iter().map(|row| row[class.index()]).sum()
    }

    pub fn accuracy(&self) -> Result<f64> {
        match self.total() {
            0 => Err(Error::InvalidArgument("empty confusion matrix".into())),
            n => Ok(self.trace() as f64 / n as f64),
        }
    }
}

/// Metrics for a class with at least one reference sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: Class,
    pub support: u64,
    /// `None` when the class has no reference samples: the measures are not
    /// available.
    pub metrics: Option<ClassMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub rows: Vec<ClassRow>,
    pub accuracy: f64,
    pub total: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassReport {
    pub fn from_matrix(m: &ConfusionMatrix) -> Result<Self> {
        let accuracy = m.accuracy()?;
        let rows = Class::ALL
            .iter()
            .map(|&class| {
                let support = m.support(class);
                let metrics = (support > 0).then(|| {
                    let tp = m.counts[class.index()][class.index()];
                    let precision = ratio(tp, m.predicted(class));
                    let recall = ratio(tp, support);
                    let f1 = if precision + recall == 0.0 {
                        0.0
                    } else {
                        2.0 * precision * recall / (precision + recall)
                    };
                    ClassMetrics { precision, recall, f1 }
                });
                ClassRow { class, support, metrics }
            })
            .collect();
        Ok(ClassReport {
            rows,
            accuracy,
            total: m.total(),
        })
    }

    pub fn row(&self, class: Class) -> &ClassRow {
        &self.rows[class.index()]
    }

    /// Aligned text table; percentages to one decimal, `N/A` for classes
    /// without reference samples.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<14} {:>9} {:>9} {:>9} {:>8}\n",
            "Class", "Precision", "Recall", "F1", "Support"
        );
        for row in &self.rows {
            let cells = match row.metrics {
                Some(m) => [m.precision, m.recall, m.f1].map(|v| format!("{:.1}%", 100.0 * v)),
                None => ["N/A", "N/A", "N/A"].map(String::from),
            };
            out.push_str(&format!(
                "{:<14} {:>9} {:>9} {:>9} {:>8}\n",
                row.class.name(),
                cells[0],
                cells[1],
                cells[2],
                row.support
            ));
        }
        out.push_str(&format!(
            "{:<14} {:>9} {:>9} {:>9} {:>8}\n",
            "Accuracy",
            "",
            "",
            format!("{:.1}%", 100.0 * self.accuracy),
            self.total
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let m = ConfusionMatrix::from_pairs(Class::ALL.iter().flat_map(|&c| [(c, c), (c, c)]));
        let r = ClassReport::from_matrix(&m).unwrap();
        assert_eq!(r.accuracy, 1.0);
        for row in &r.rows {
            assert_eq!(row.metrics, Some(ClassMetrics { precision: 1.0, recall: 1.0, f1: 1.0 }));
        }
    }

    #[test]
    fn degenerate_predictor() {
        let pairs = [(Class::NoCollapse, Class::Collapse), (Class::Collapse, Class::Collapse), (Class::Collapse, Class::Collapse)];
        let r = ClassReport::from_matrix(&ConfusionMatrix::from_pairs(pairs)).unwrap();
        assert_eq!(r.row(Class::Collapse).metrics.unwrap().recall, 1.0);
        assert_eq!(r.row(Class::NoCollapse).metrics.unwrap().recall, 0.0);
        assert_eq!(r.row(Class::NoCollapse).metrics.unwrap().f1, 0.0);
        assert_eq!(r.accuracy, 2.0 / 3.0);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(ClassReport::from_matrix(&ConfusionMatrix::default()).is_err());
    }
}
