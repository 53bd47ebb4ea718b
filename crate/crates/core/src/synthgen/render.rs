//! Procedural spray images over a continuous collapse parameter.
//!
//! Liquid is bright, background dark. Plumes leave an injector tip at the
//! top centre along axes that fan out by the cone half-angle; as the collapse
//! parameter `c` goes from 0 to 1 the axes are pulled toward the centreline,
//! plumes widen and penetrate further, until a single central plume remains.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::ImageTensor;

pub const MIN_IMAGE_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Before or after injection; plume fields are ignored.
    PrePost,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    None,
    RedSolidBox,
    WhiteDottedBox,
    TextGlyphs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprayParams {
    pub n_plumes: usize,
    /// Collapse parameter in `[0, 1]`.
    pub collapse: f64,
    /// Degrees.
    pub cone_half_angle: f64,
    /// Plume length as a fraction of image height, in `(0, 1]`.
    pub penetration: f64,
    /// Plume cross-section width as a fraction of image width.
    pub plume_width: f64,
    /// Installation angle in degrees.
    pub tilt: f64,
    pub intensity_gain: f64,
    pub noise_sigma: f64,
    pub annotate: Annotation,
    pub phase: Phase,
}

impl Default for SprayParams {
    fn default() -> Self {
        SprayParams {
            n_plumes: 6,
            collapse: 0.0,
            cone_half_angle: 40.0,
            penetration: 0.7,
            plume_width: 0.03,
            tilt: 0.0,
            intensity_gain: 0.8,
            noise_sigma: 0.02,
            annotate: Annotation::None,
            phase: Phase::Active,
        }
    }
}

impl SprayParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidArgument(what));
        if !(0.0..=1.0).contains(&self.collapse) {
            return bad(format!("collapse {} outside [0,1]", self.collapse));
        }
        if !(self.penetration > 0.0 && self.penetration <= 1.0) {
            return bad(format!("penetration {} outside (0,1]", self.penetration));
        }
        if self.phase == Phase::Active {
            if self.n_plumes == 0 {
                return bad("n_plumes must be >= 1".into());
            }
            if !(self.plume_width > 0.0) || !(self.intensity_gain > 0.0) {
                return bad("plume_width and intensity_gain must be positive".into());
            }
            if !(0.0..90.0).contains(&self.cone_half_angle) {
                return bad(format!("cone_half_angle {} outside [0,90)", self.cone_half_angle));
            }
        }
        if !(self.noise_sigma >= 0.0) {
            return bad(format!("noise_sigma {} must be >= 0", self.noise_sigma));
        }
        Ok(())
    }

    /// Plume axis angles in degrees from vertical, before tilt.
    pub fn plume_axes(&self) -> Vec<f64> {
        let n = self.n_plumes;
        (0..n)
            .map(|k| {
                let base = if n == 1 {
                    0.0
                } else {
                    self.cone_half_angle * (2.0 * k as f64 / (n - 1) as f64 - 1.0)
                };
                base * (1.0 - self.collapse)
            })
            .collect()
    }

    /// Spread between the outermost plume axes, in degrees.
    pub fn angular_spread(&self) -> f64 {
        if self.phase == Phase::PrePost {
            return 0.0;
        }
        let axes = self.plume_axes();
        let max = axes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = axes.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Rectangle outline drawn by an annotation, in pixel coordinates (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationBox {
    pub kind: Annotation,
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

const NOISE_STREAM: u64 = 1;
const BLOB_STREAM: u64 = 2;
const ANNOTATION_STREAM: u64 = 3;

/// Renders a grayscale spray image. The red box annotation lives in a colour
/// channel and is not drawn here; see [`annotation_box`] and
/// [`apply_color_annotation`].
pub fn render_spray(params: &SprayParams, size: usize, seed: u64) -> Result<ImageTensor> {
    if size < MIN_IMAGE_SIZE {
        return Err(Error::InvalidArgument(format!(
            "size {size} < {MIN_IMAGE_SIZE}"
        )));
    }
    params.validate()?;
    let mut field = vec![0.0; size * size];
    match params.phase {
        Phase::Active => draw_plumes(params, size, &mut field),
        Phase::PrePost => draw_residual_blobs(size, seed, &mut field),
    }
    let mut img = ImageTensor::from_values(size, size, 1, field.iter().map(|v| v.clamp(0.0, 1.0)).collect())?;
    if params.noise_sigma > 0.0 {
        let mut rng = stream(seed, &[NOISE_STREAM]);
        for y in 0..size {
            for x in 0..size {
                let n: f64 = rng.sample(StandardNormal);
                img.set(0, y, x, img.get(0, y, x) + params.noise_sigma * n);
            }
        }
    }
    if let Some(b) = annotation_box(params, size, seed) {
        match b.kind {
            Annotation::WhiteDottedBox => draw_box(&mut img, &b, 0, true),
            Annotation::TextGlyphs => draw_glyphs(&mut img, size, seed),
            Annotation::RedSolidBox | Annotation::None => {}
        }
    }
    Ok(img)
}

fn draw_plumes(params: &SprayParams, size: usize, field: &mut [f64]) {
    let s = size as f64;
    let c = params.collapse;
    let tip_x = (s - 1.0) / 2.0;
    let tip_y = 0.06 * s;
    let length = (params.penetration * (1.0 + 0.25 * c)).min(1.0) * s;
    let base_sigma = params.plume_width * s;
    let tail = 0.08 * s;
    let dirs: Vec<(f64, f64)> = params
        .plume_axes()
        .iter()
        .map(|a| {
            let (sin, cos) = (a + params.tilt).to_radians().sin_cos();
            (sin, cos)
        })
        .collect();
    for y in 0..size {
        for x in 0..size {
            let px = x as f64 - tip_x;
            let py = y as f64 - tip_y;
            let mut total = 0.0;
            for &(sin, cos) in &dirs {
                // along-axis distance and perpendicular offset
                let t = px * sin + py * cos;
                if t <= 0.0 {
                    continue;
                }
                let d = px * cos - py * sin;
                let frac = (t / length).min(1.0);
                let sigma = base_sigma * (0.5 + 1.5 * frac) * (1.0 + 1.2 * c);
                let ramp = (t / (0.04 * s)).min(1.0);
                let fade = if t > length {
                    (-((t - length) / tail).powi(2)).exp()
                } else {
                    1.0
                };
                total += params.intensity_gain * ramp * fade * (-d * d / (2.0 * sigma * sigma)).exp();
            }
            field[y * size + x] = total;
        }
    }
}

fn draw_residual_blobs(size: usize, seed: u64, field: &mut [f64]) {
    let s = size as f64;
    let mut rng = stream(seed, &[BLOB_STREAM]);
    field.iter_mut().for_each(|v| *v = 0.02);
    let blobs = rng.random_range(0..=3);
    for _ in 0..blobs {
        let cx = s / 2.0 + rng.random_range(-0.15..0.15) * s;
        let cy = rng.random_range(0.03..0.3) * s;
        let amp = rng.random_range(0.015..0.045);
        let sigma = rng.random_range(0.02..0.06) * s;
        for y in 0..size {
            for x in 0..size {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                field[y * size + x] += amp * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
        }
    }
}

/// Geometry of the annotation drawn on this image, if any.
pub fn annotation_box(params: &SprayParams, size: usize, seed: u64) -> Option<AnnotationBox> {
    if params.annotate == Annotation::None {
        return None;
    }
    let s = size as f64;
    let mut rng = stream(seed, &[ANNOTATION_STREAM]);
    let x0 = (rng.random_range(0.04..0.2) * s) as usize;
    let x1 = (rng.random_range(0.8..0.96) * s) as usize;
    let y0 = (rng.random_range(0.02..0.1) * s) as usize;
    let y1 = (rng.random_range(0.7..0.95) * s) as usize;
    Some(AnnotationBox {
        kind: params.annotate,
        x0,
        y0,
        x1: x1.min(size - 1),
        y1: y1.min(size - 1),
    })
}

fn draw_box(img: &mut ImageTensor, b: &AnnotationBox, channel: usize, dotted: bool) {
    let on = |i: usize| !dotted || (i / 2).is_multiple_of(2);
    for x in b.x0..=b.x1 {
        if on(x) {
            img.set(channel, b.y0, x, 1.0);
            img.set(channel, b.y1, x, 1.0);
        }
    }
    for y in b.y0..=b.y1 {
        if on(y) {
            img.set(channel, y, b.x0, 1.0);
            img.set(channel, y, b.x1, 1.0);
        }
    }
}

/// Overlays a colour annotation on a three-channel image: the red box is drawn
/// at full intensity in channel 0 only. Other annotation kinds are already part
/// of the grayscale rendering and are left untouched.
pub fn apply_color_annotation(img: &mut ImageTensor, annotation: &AnnotationBox) {
    if annotation.kind == Annotation::RedSolidBox && img.channels() == 3 {
        draw_box(img, annotation, 0, false);
    }
}

// 3x5 digit bitmaps, row-major, MSB = left column
const DIGITS: [[u8; 5]; 10] = [
    [7, 5, 5, 5, 7],
    [2, 6, 2, 2, 7],
    [7, 1, 7, 4, 7],
    [7, 1, 3, 1, 7],
    [5, 5, 7, 1, 1],
    [7, 4, 7, 1, 7],
    [7, 4, 7, 5, 7],
    [7, 1, 1, 1, 1],
    [7, 5, 7, 5, 7],
    [7, 5, 7, 1, 7],
];

fn draw_glyphs(img: &mut ImageTensor, size: usize, seed: u64) {
    let mut rng = stream(seed, &[ANNOTATION_STREAM, 1]);
    let digits = rng.random_range(3..=5);
    let scale = (size / 64).max(1);
    let y0 = size - 7 * scale;
    for k in 0..digits {
        let glyph = DIGITS[rng.random_range(0..10)];
        let x0 = 2 * scale + k * 4 * scale;
        for (row, bits) in glyph.iter().enumerate() {
            for col in 0..3 {
                if bits & (4 >> col) != 0 {
                    for dy in 0..scale {
                        for dx in 0..scale {
                            let (y, x) = (y0 + row * scale + dy, x0 + col * scale + dx);
                            if y < size && x < size {
                                img.set(0, y, x, 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
}
