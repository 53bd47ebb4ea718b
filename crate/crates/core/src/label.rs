use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 4;

/// Spray morphology class, in label-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    PrePost,
    NoCollapse,
    Transitional,
    Collapse,
}

impl Class {
    pub const ALL: [Class; NUM_CLASSES] = [
        Class::PrePost,
        Class::NoCollapse,
        Class::Transitional,
        Class::Collapse,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Class> {
        Class::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::PrePost => "Pre/Post",
            Class::NoCollapse => "No collapse",
            Class::Transitional => "Transitional",
            Class::Collapse => "Collapse",
        }
    }

    /// Whether two active-phase regimes border each other on the collapse axis.
    pub fn is_adjacent(self, other: Class) -> bool {
        matches!(
            (self, other),
            (Class::NoCollapse, Class::Transitional)
                | (Class::Transitional, Class::NoCollapse)
                | (Class::Transitional, Class::Collapse)
                | (Class::Collapse, Class::Transitional)
        )
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Probability vector over the four classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; NUM_CLASSES]", into = "[f64; NUM_CLASSES]")]
pub struct SoftLabel([f64; NUM_CLASSES]);

impl SoftLabel {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: [f64; NUM_CLASSES]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidLabel(format!("entry outside [0,1]: {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidLabel(format!("entries sum to {sum}")));
        }
        Ok(SoftLabel(probs))
    }

    pub fn one_hot(class: Class) -> Self {
        let mut probs = [0.0; NUM_CLASSES];
        probs[class.index()] = 1.0;
        SoftLabel(probs)
    }

    pub fn probs(&self) -> &[f64; NUM_CLASSES] {
        &self.0
    }

    /// Dominant class; ties go to the first-listed class.
    pub fn argmax(&self) -> Class {
        let mut best = 0;
        for i in 1..NUM_CLASSES {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        Class::ALL[best]
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &SoftLabel, lambda: f64) -> SoftLabel {
        let mut out = [0.0; NUM_CLASSES];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = (lambda * a + (1.0 - lambda) * b).clamp(0.0, 1.0);
        }
        SoftLabel(out)
    }
}

impl TryFrom<[f64; NUM_CLASSES]> for SoftLabel {
    type Error = Error;

    fn try_from(probs: [f64; NUM_CLASSES]) -> Result<Self> {
        SoftLabel::new(probs)
    }
}

impl From<SoftLabel> for [f64; NUM_CLASSES] {
    fn from(label: SoftLabel) -> Self {
        label.0
    }
}

impl From<Class> for SoftLabel {
    fn from(class: Class) -> Self {
        SoftLabel::one_hot(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sums_and_ranges() {
        assert!(SoftLabel::new([0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(SoftLabel::new([0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(SoftLabel::new([1.5, -0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_toward_first_class() {
        let l = SoftLabel::new([0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(l.argmax(), Class::NoCollapse);
    }

    #[test]
    fn adjacency_is_symmetric_and_excludes_pre_post() {
        for a in Class::ALL {
            for b in Class::ALL {
                assert_eq!(a.is_adjacent(b), b.is_adjacent(a));
            }
            assert!(!a.is_adjacent(Class::PrePost));
        }
        assert!(!Class::NoCollapse.is_adjacent(Class::Collapse));
    }
}
