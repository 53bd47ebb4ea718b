use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{DatasetManifest, Split, COLLAPSE_THRESHOLD, TRANSITIONAL_THRESHOLD};
use super::render::Phase;
use crate::error::{Error, Result};
use crate::label::{Class, SoftLabel};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CorruptionMode {
    /// Relabel active-phase samples within `delta` of a class threshold to the
    /// class across that threshold.
    Boundary { fraction: f64, delta: f64 },
    /// Relabel a uniform fraction of samples to a uniformly random other class.
    Random { fraction: f64 },
}

impl fmt::Display for CorruptionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorruptionMode::Boundary { fraction, delta } => {
                write!(f, "boundary(fraction={fraction}, delta={delta})")
            }
            CorruptionMode::Random { fraction } => write!(f, "random(fraction={fraction})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionReport {
    /// Samples the fraction applies to.
    pub population: usize,
    pub eligible: usize,
    pub requested: usize,
    pub corrupted: usize,
    /// `corrupted / population`.
    pub achieved_fraction: f64,
}

/// Corrupts labels across every split.
pub fn corrupt_labels(
    manifest: &DatasetManifest,
    mode: CorruptionMode,
    seed: u64,
) -> Result<(DatasetManifest, CorruptionReport)> {
    corrupt_labels_in(manifest, mode, seed, &Split::ALL)
}

/// Corrupts labels of entries in `splits` only. In boundary mode the fraction
/// is of the active-phase entries in scope; when too few samples are eligible,
/// all eligible ones are corrupted and the achieved fraction is reported.
pub fn corrupt_labels_in(
    manifest: &DatasetManifest,
    mode: CorruptionMode,
    seed: u64,
    splits: &[Split],
) -> Result<(DatasetManifest, CorruptionReport)> {
    let fraction = match mode {
        CorruptionMode::Boundary { fraction, delta } => {
            if !(delta > 0.0) {
                return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
            }
            fraction
        }
        CorruptionMode::Random { fraction } => fraction,
    };
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("fraction {fraction} outside [0,1]")));
    }
    let in_scope: Vec<usize> = (0..manifest.entries.len())
        .filter(|&i| splits.contains(&manifest.entries[i].split))
        .collect();
    let mut rng = stream(seed, &[0x434f_5252]);
    let mut out = manifest.clone();

    let (population, mut eligible): (usize, Vec<(usize, Class)>) = match mode {
        CorruptionMode::Boundary { delta, .. } => {
            let active: Vec<usize> = in_scope
                .iter()
                .copied()
                .filter(|&i| manifest.entries[i].meta.phase == Phase::Active)
                .collect();
            let eligible = active
                .iter()
                .filter_map(|&i| {
                    let meta = &manifest.entries[i].meta;
                    let c = meta.true_collapse?;
                    let (t, below, above) = if (c - TRANSITIONAL_THRESHOLD).abs()
                        <= (c - COLLAPSE_THRESHOLD).abs()
                    {
                        (TRANSITIONAL_THRESHOLD, Class::NoCollapse, Class::Transitional)
                    } else {
                        (COLLAPSE_THRESHOLD, Class::Transitional, Class::Collapse)
                    };
                    if (c - t).abs() >= delta {
                        return None;
                    }
                    let target = if meta.original_class == below { above } else { below };
                    Some((i, target))
                })
                .collect();
            (active.len(), eligible)
        }
        CorruptionMode::Random { .. } => {
            let eligible = in_scope
                .iter()
                .map(|&i| {
                    let current = manifest.entries[i].meta.assigned_class;
                    let others: Vec<Class> = Class::ALL.iter().copied().filter(|&c| c != current).collect();
                    (i, others[rng.random_range(0..others.len())])
                })
                .collect();
            (in_scope.len(), eligible)
        }
    };

    let requested = (fraction * population as f64).round() as usize;
    let n_eligible = eligible.len();
    eligible.shuffle(&mut rng);
    eligible.truncate(requested);
    eligible.sort_by_key(|(i, _)| *i);
    for &(i, class) in &eligible {
        let entry = &mut out.entries[i];
        entry.meta.assigned_class = class;
        entry.meta.corrupted = true;
        entry.label = SoftLabel::one_hot(class);
    }
    let report = CorruptionReport {
        population,
        eligible: n_eligible,
        requested,
        corrupted: eligible.len(),
        achieved_fraction: if population == 0 {
            0.0
        } else {
            eligible.len() as f64 / population as f64
        },
    };
    let scope: Vec<String> = splits.iter().map(|s| s.to_string()).collect();
    out.provenance.push(format!(
        "corrupt_labels {mode} seed={seed} splits=[{}]: {}/{} corrupted ({} eligible, achieved fraction {:.4})",
        scope.join(","),
        report.corrupted,
        report.population,
        report.eligible,
        report.achieved_fraction
    ));
    Ok((out, report))
}
