//! 8-bit grayscale image files: binary PGM (`P5`) and PNG.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ImageTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    #[default]
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }
}

/// Options applied after decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Bilinear resize to `(height, width)`.
    pub resize: Option<(usize, usize)>,
    /// Copy the gray plane into three channels.
    pub triplicate: bool,
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes the channel mean of `img` as 8-bit grayscale; the format follows
/// the file extension.
pub fn write_image(img: &ImageTensor, path: &Path) -> Result<()> {
    let format = ImageFormat::from_path(path).ok_or_else(|| {
        Error::InvalidArgument(format!("unsupported image extension: {}", path.display()))
    })?;
    let gray = img.to_gray();
    let bytes: Vec<u8> = gray.values().iter().map(|&v| quantize(v)).collect();
    match format {
        ImageFormat::Pgm => {
            let mut out = format!("P5\n{} {}\n255\n", gray.width(), gray.height()).into_bytes();
            out.extend_from_slice(&bytes);
            fs::write(path, out).map_err(|e| Error::io(path, e))
        }
        ImageFormat::Png => write_png(path, gray.width(), gray.height(), png::ColorType::Grayscale, &bytes),
    }
}

/// Writes an RGB PNG from a three-channel image.
pub fn write_rgb_png(img: &ImageTensor, path: &Path) -> Result<()> {
    let rgb = img.triplicate();
    let (h, w) = (rgb.height(), rgb.width());
    let mut bytes = Vec::with_capacity(h * w * 3);
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                bytes.push(quantize(rgb.get(c, y, x)));
            }
        }
    }
    write_png(path, w, h, png::ColorType::Rgb, &bytes)
}

fn write_png(path: &Path, width: usize, height: usize, color: png::ColorType, bytes: &[u8]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| Error::Png(e.to_string()))?;
    writer.write_image_data(bytes).map_err(|e| Error::Png(e.to_string()))?;
    writer.finish().map_err(|e| Error::Png(e.to_string()))
}

pub fn read_image(path: &Path, options: LoadOptions) -> Result<ImageTensor> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut img = match ImageFormat::from_path(path) {
        Some(ImageFormat::Png) => decode_png(path, &bytes)?,
        _ => decode_pgm(path, &bytes)?,
    };
    if let Some((h, w)) = options.resize {
        img = img.resize(h, w)?;
    }
    if options.triplicate {
        img = img.triplicate();
    }
    Ok(img)
}

fn decode_pgm(path: &Path, bytes: &[u8]) -> Result<ImageTensor> {
    let malformed = |detail: &str| Error::MalformedHeader {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(malformed("missing P5 magic"));
    }
    // three whitespace-separated header fields, '#' comments allowed
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|b| *b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(malformed("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed("expected a decimal header field"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(malformed("missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(malformed("zero image dimension"));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            detail: format!("maxval {maxval}, only 255 is supported"),
        });
    }
    let expected = width * height;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedImage {
            path: path.to_path_buf(),
            expected,
            found: payload.len(),
        });
    }
    let values = payload[..expected].iter().map(|&b| b as f64 / 255.0).collect();
    ImageTensor::from_values(height, width, 1, values)
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<ImageTensor> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::MalformedHeader {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let info = reader.info();
    let (width, height) = (info.width as usize, info.height as usize);
    if info.bit_depth != png::BitDepth::Eight || info.color_type != png::ColorType::Grayscale {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            detail: format!("{:?} {:?}, only 8-bit grayscale is supported", info.color_type, info.bit_depth),
        });
    }
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(width * height)];
    let frame = reader.next_frame(&mut buf).map_err(|_| Error::TruncatedImage {
        path: path.to_path_buf(),
        expected: width * height,
        found: bytes.len(),
    })?;
    let values = buf[..frame.buffer_size()].iter().map(|&b| b as f64 / 255.0).collect();
    ImageTensor::from_values(height, width, 1, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_image() -> ImageTensor {
        let v = (0..20 * 12).map(|i| (i % 256) as f64 / 255.0).collect();
        ImageTensor::from_values(12, 20, 1, v).unwrap()
    }

    #[test]
    fn round_trips_on_8bit_grid() {
        let dir = tempfile::tempdir().unwrap();
        for ext in ["pgm", "png"] {
            let path = dir.path().join(format!("a.{ext}"));
            let img = grid_image();
            write_image(&img, &path).unwrap();
            assert_eq!(read_image(&path, LoadOptions::default()).unwrap(), img);
        }
    }

    #[test]
    fn pgm_errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.pgm");
        fs::write(&p, b"P6\n2 2\n255\n1234").unwrap();
        assert!(matches!(read_image(&p, LoadOptions::default()), Err(Error::MalformedHeader { .. })));
        fs::write(&p, b"P5\n2 2\n65535\n12345678").unwrap();
        assert!(matches!(read_image(&p, LoadOptions::default()), Err(Error::UnsupportedBitDepth { .. })));
        fs::write(&p, b"P5\n2 2\n255\n123").unwrap();
        assert!(matches!(
            read_image(&p, LoadOptions::default()),
            Err(Error::TruncatedImage { expected: 4, found: 3, .. })
        ));
        fs::write(&p, b"P5\n# comment\n2 1\n255\n\x00\xff").unwrap();
        let img = read_image(&p, LoadOptions::default()).unwrap();
        assert_eq!(img.values(), &[0.0, 1.0]);
    }

    #[test]
    fn load_options_resize_and_triplicate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.png");
        write_image(&grid_image(), &p).unwrap();
        let img = read_image(
            &p,
            LoadOptions {
                resize: Some((6, 10)),
                triplicate: true,
            },
        )
        .unwrap();
        assert_eq!((img.height(), img.width(), img.channels()), (6, 10, 3));
        assert_eq!(img.plane(0), img.plane(2));
    }
}
