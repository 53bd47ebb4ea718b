use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Image with intensities in `[0, 1]`, stored channel-planar
/// (`values[c * height * width + y * width + x]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f64>,
}

impl ImageTensor {
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        ImageTensor {
            height,
            width,
            channels,
            values: vec![0.0; height * width * channels],
        }
    }

    pub fn from_values(height: usize, width: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if !(channels == 1 || channels == 3) {
            return Err(Error::InvalidArgument(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if height == 0 || width == 0 || values.len() != height * width * channels {
            return Err(Error::Shape(format!(
                "{height}x{width}x{channels} image needs {} values, got {}",
                height * width * channels,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("pixel value {v} outside [0,1]")));
        }
        Ok(ImageTensor {
            height,
            width,
            channels,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_shape(&self, other: &ImageTensor) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.values[(c * self.height + y) * self.width + x]
    }

    /// Writes `v` clamped to `[0, 1]`.
    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f64) {
        let i = (c * self.height + y) * self.width + x;
        self.values[i] = v.clamp(0.0, 1.0);
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.values[c * n..(c + 1) * n]
    }

    /// Copies a single-channel image into three identical channels.
    pub fn triplicate(&self) -> ImageTensor {
        if self.channels == 3 {
            return self.clone();
        }
        let mut values = Vec::with_capacity(self.values.len() * 3);
        for _ in 0..3 {
            values.extend_from_slice(&self.values);
        }
        ImageTensor {
            height: self.height,
            width: self.width,
            channels: 3,
            values,
        }
    }

    /// Channel mean, as a single-channel image.
    pub fn to_gray(&self) -> ImageTensor {
        if self.channels == 1 {
            return self.clone();
        }
        let n = self.height * self.width;
        let values = (0..n)
            .map(|i| (0..self.channels).map(|c| self.values[c * n + i]).sum::<f64>() / self.channels as f64)
            .collect();
        ImageTensor {
            height: self.height,
            width: self.width,
            channels: 1,
            values,
        }
    }

    pub(crate) fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> ImageTensor {
        ImageTensor {
            height: self.height,
            width: self.width,
            channels: self.channels,
            values: self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
        }
    }

    /// Resamples every channel to `height x width` with bilinear interpolation
    /// (pixel-center aligned).
    pub fn resize(&self, height: usize, width: usize) -> Result<ImageTensor> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("resize target must be non-empty".into()));
        }
        if height == self.height && width == self.width {
            return Ok(self.clone());
        }
        let mut out = ImageTensor::zeros(height, width, self.channels);
        let sy = self.height as f64 / height as f64;
        let sx = self.width as f64 / width as f64;
        for c in 0..self.channels {
            for y in 0..height {
                let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
                let y0 = fy.floor() as usize;
                let y1 = (y0 + 1).min(self.height - 1);
                let wy = fy - y0 as f64;
                for x in 0..width {
                    let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                    let x0 = fx.floor() as usize;
                    let x1 = (x0 + 1).min(self.width - 1);
                    let wx = fx - x0 as f64;
                    let top = self.get(c, y0, x0) * (1.0 - wx) + self.get(c, y0, x1) * wx;
                    let bottom = self.get(c, y1, x0) * (1.0 - wx) + self.get(c, y1, x1) * wx;
                    out.set(c, y, x, top * (1.0 - wy) + bottom * wy);
                }
            }
        }
        Ok(out)
    }
}
