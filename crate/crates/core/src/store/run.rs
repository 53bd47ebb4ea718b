use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::canonical::to_canonical_string;
use super::checkpoint::save_checkpoint;
use crate::error::{Error, Result};
use crate::metrics::Evaluation;
use crate::netcore::Model;
use crate::trainer::{EpochRecord, RunHistory, StopReason, TrainConfig};

pub const CONFIG_FILE: &str = "config.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const CHECKPOINT_FILE: &str = "best.mxc";
pub const METRICS_FILE: &str = "metrics.json";
pub const REPORT_JSON_FILE: &str = "report.json";
pub const REPORT_TEXT_FILE: &str = "report.txt";

/// Everything needed to re-run a training job: the dataset it read and the
/// full configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: String,
    pub train: TrainConfig,
}

/// Summary numbers written next to the checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub epochs: usize,
    pub stop_reason: String,
    pub best_epoch: usize,
    pub gap: f64,
    pub train_acc: f64,
    pub test_acc: f64,
}

/// A written run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifact {
    pub run_id: String,
    pub dir: PathBuf,
    pub config: PathBuf,
    pub history: PathBuf,
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
    pub reports: Vec<PathBuf>,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

impl RunArtifact {
    /// Writes the run directory, creating it if needed. The run id is the
    /// directory name.
    pub fn write(
        dir: &Path,
        config: &RunConfig,
        history: &RunHistory,
        best: &Model,
        metrics: &RunMetrics,
        evaluation: Option<&Evaluation>,
    ) -> Result<RunArtifact> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let artifact = RunArtifact {
            run_id: dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into()),
            dir: dir.to_path_buf(),
            config: dir.join(CONFIG_FILE),
            history: dir.join(HISTORY_FILE),
            checkpoint: dir.join(CHECKPOINT_FILE),
            metrics: dir.join(METRICS_FILE),
            reports: match evaluation {
                Some(_) => vec![dir.join(REPORT_JSON_FILE), dir.join(REPORT_TEXT_FILE)],
                None => Vec::new(),
            },
        };
        write(&artifact.config, to_canonical_string(config)? + "\n")?;
        write(&artifact.history, history.to_csv())?;
        save_checkpoint(best, &artifact.checkpoint)?;
        write(&artifact.metrics, to_canonical_string(metrics)? + "\n")?;
        if let Some(ev) = evaluation {
            write_report(ev, dir)?;
        }
        Ok(artifact)
    }

    pub fn read_config(&self) -> Result<RunConfig> {
        read_run_config(&self.config)
    }
}

pub fn read_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_run_metrics(path: &Path) -> Result<RunMetrics> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads a run directory's `history.csv`, taking the stop reason and best
/// epoch from its `metrics.json`.
pub fn read_history(dir: &Path) -> Result<RunHistory> {
    let path = dir.join(HISTORY_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let bad = |line: usize| Error::Parse {
        path: path.clone(),
        detail: format!("bad history row {line}"),
    };
    let mut epochs = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad(n + 1));
        }
        let num = |i: usize| f[i].parse::<f64>().map_err(|_| bad(n + 1));
        epochs.push(EpochRecord {
            epoch: f[0].parse().map_err(|_| bad(n + 1))?,
            train_loss: num(1)?,
            train_acc: num(2)?,
            val_loss: num(3)?,
            val_acc: num(4)?,
            lr: num(5)?,
        });
    }
    let metrics = read_run_metrics(&dir.join(METRICS_FILE))?;
    Ok(RunHistory {
        epochs,
        stop_reason: if metrics.stop_reason == StopReason::EarlyStopping.as_str() {
            StopReason::EarlyStopping
        } else {
            StopReason::MaxEpochs
        },
        best_epoch: metrics.best_epoch,
    })
}

/// Writes `report.json` and `report.txt` into `dir`.
pub fn write_report(evaluation: &Evaluation, dir: &Path) -> Result<()> {
    write(&dir.join(REPORT_JSON_FILE), to_canonical_string(evaluation)? + "\n")?;
    write(&dir.join(REPORT_TEXT_FILE), evaluation.report.to_text())
}
