use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::beta::sample_lambda;
use crate::error::{Error, Result};
use crate::Sample;

/// Provenance of one mixed sample: `lambda * batch[index_a] + (1 - lambda) * batch[index_b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixupRecord {
    pub lambda: f64,
    pub index_a: usize,
    pub index_b: usize,
}

/// Convex combination of two samples, applied identically to pixels and labels.
pub fn mixup_pair(a: &Sample, b: &Sample, lambda: f64) -> Result<Sample> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0,1]")));
    }
    if !a.image.same_shape(&b.image) {
        return Err(Error::Shape(format!(
            "cannot mix {}x{}x{} with {}x{}x{}",
            a.image.height(),
            a.image.width(),
            a.image.channels(),
            b.image.height(),
            b.image.width(),
            b.image.channels()
        )));
    }
    let other = b.image.values();
    let image = a
        .image
        .map_values(|i, x| (lambda * x + (1.0 - lambda) * other[i]).clamp(0.0, 1.0));
    let label = if a.label == b.label {
        a.label
    } else {
        a.label.mix(&b.label, lambda)
    };
    Ok(Sample { image, label })
}

/// Mixes every sample with a partner drawn through a seeded permutation,
/// with a fresh `lambda` per pair.
pub fn mixup_batch<R: Rng + ?Sized>(
    batch: &[Sample],
    alpha: f64,
    rng: &mut R,
) -> Result<(Vec<Sample>, Vec<MixupRecord>)> {
    if batch.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "mixup needs at least 2 samples, got {}",
            batch.len()
        )));
    }
    let mut partner: Vec<usize> = (0..batch.len()).collect();
    partner.shuffle(rng);
    let mut out = Vec::with_capacity(batch.len());
    let mut records = Vec::with_capacity(batch.len());
    for (i, &j) in partner.iter().enumerate() {
        let lambda = sample_lambda(alpha, rng)?;
        out.push(mixup_pair(&batch[i], &batch[j], lambda)?);
        records.push(MixupRecord {
            lambda,
            index_a: i,
            index_b: j,
        });
    }
    Ok((out, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{Class, SoftLabel};
    use crate::ImageTensor;

    fn flat(v: f64, class: Class) -> Sample {
        Sample {
            image: ImageTensor::from_values(2, 2, 1, vec![v; 4]).unwrap(),
            label: SoftLabel::one_hot(class),
        }
    }

    #[test]
    fn half_mix_arithmetic() {
        let out = mixup_pair(&flat(0.2, Class::PrePost), &flat(0.6, Class::Transitional), 0.5).unwrap();
        assert!(out.image.values().iter().all(|v| (v - 0.4).abs() < 1e-15));
        assert_eq!(out.label.probs(), &[0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn endpoints_are_exact() {
        let a = flat(0.3, Class::Collapse);
        let b = flat(0.7, Class::NoCollapse);
        assert_eq!(mixup_pair(&a, &b, 1.0).unwrap(), a);
        assert_eq!(mixup_pair(&a, &b, 0.0).unwrap(), b);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = flat(0.3, Class::Collapse);
        let b = Sample {
            image: ImageTensor::zeros(3, 2, 1),
            label: SoftLabel::one_hot(Class::Collapse),
        };
        assert!(mixup_pair(&a, &b, 0.5).is_err());
    }

    #[test]
    fn batch_needs_two_samples() {
        let mut rng = crate::rng::stream(0, &[]);
        assert!(mixup_batch(&[flat(0.1, Class::Collapse)], 0.2, &mut rng).is_err());
    }
}
