use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trainer::{train_val_gap, RunHistory};

/// One condition of a comparison table. Fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub train_acc: f64,
    pub gap: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// A finished run: its history and the held-out accuracy of its chosen weights.
#[derive(Debug, Clone)]
pub struct NamedRun<'a> {
    pub name: &'a str,
    pub history: &'a RunHistory,
    pub test_acc: f64,
}

/// Builds rows of last-window train accuracy, train/val gap and test accuracy.
pub fn compare_runs(runs: &[NamedRun<'_>], last_n: usize) -> Result<ComparisonTable> {
    if runs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "comparison needs at least 2 runs, got {}",
            runs.len()
        )));
    }
    let rows = runs
        .iter()
        .map(|r| {
            if r.history.epochs.is_empty() {
                return Err(Error::InvalidArgument(format!("run {:?} has no epochs", r.name)));
            }
            Ok(ComparisonRow {
                name: r.name.to_string(),
                train_acc: r.history.mean_train_acc(last_n),
                gap: train_val_gap(r.history, last_n),
                test_acc: r.test_acc,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonTable { rows })
}

fn pct(v: f64) -> String {
    format!("{:.1}%", 100.0 * v)
}

impl ComparisonTable {
    pub fn from_rows(rows: Vec<ComparisonRow>) -> Self {
        ComparisonTable { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,train_acc,gap,test_acc\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:?},{:?},{:?}\n", r.name, r.train_acc, r.gap, r.test_acc));
        }
        out
    }

    /// Percentages to one decimal, columns padded to the widest cell.
    pub fn to_text(&self) -> String {
        let header = ["Condition", "Training Acc.", "Gap", "Test Acc."];
        let body: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| [r.name.clone(), pct(r.train_acc), pct(r.gap), pct(r.test_acc)])
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 4]| {
            let mut s = format!("{:<w$}", cells[0], w = widths[0]);
            for i in 1..4 {
                s.push_str(&format!("  {:>w$}", cells[i], w = widths[i]));
            }
            s.push('\n');
            s
        };
        let mut out = line(header);
        for row in &body {
            out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
        }
        out
    }
}
