//! Geometric augmentations: rotation, whole-pixel shift and horizontal flip.
//! Out-of-frame pixels are filled with 0 (dark background). There is no
//! vertical flip; an upside-down spray is not a physical image.

use crate::ImageTensor;

/// Rotates about the image centre (counter-clockwise as displayed) with
/// bilinear sampling.
pub fn rotate_image(img: &ImageTensor, degrees: f64) -> ImageTensor {
    if degrees == 0.0 {
        return img.clone();
    }
    let (h, w) = (img.height(), img.width());
    let mut out = ImageTensor::zeros(h, w, img.channels());
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cy = (h as f64 - 1.0) / 2.0;
    let cx = (w as f64 - 1.0) / 2.0;
    for y in 0..h {
        for x in 0..w {
            // inverse map: output pixel -> source position
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = cos * dx - sin * dy + cx;
            let sy = sin * dx + cos * dy + cy;
            let x0 = sx.floor();
            let y0 = sy.floor();
            let fx = sx - x0;
            let fy = sy - y0;
            for c in 0..img.channels() {
                let tap = |yy: f64, xx: f64| -> f64 {
                    if yy < 0.0 || xx < 0.0 || yy >= h as f64 || xx >= w as f64 {
                        0.0
                    } else {
                        img.get(c, yy as usize, xx as usize)
                    }
                };
                let v = tap(y0, x0) * (1.0 - fx) * (1.0 - fy)
                    + tap(y0, x0 + 1.0) * fx * (1.0 - fy)
                    + tap(y0 + 1.0, x0) * (1.0 - fx) * fy
                    + tap(y0 + 1.0, x0 + 1.0) * fx * fy;
                out.set(c, y, x, v);
            }
        }
    }
    out
}

/// Translates by `round(dx_frac * width)` columns (positive = right) and
/// `round(dy_frac * height)` rows (positive = down).
pub fn shift_image(img: &ImageTensor, dx_frac: f64, dy_frac: f64) -> ImageTensor {
    let (h, w) = (img.height(), img.width());
    let dx = (dx_frac * w as f64).round() as isize;
    let dy = (dy_frac * h as f64).round() as isize;
    if dx == 0 && dy == 0 {
        return img.clone();
    }
    let mut out = ImageTensor::zeros(h, w, img.channels());
    for c in 0..img.channels() {
        for y in 0..h as isize {
            let sy = y - dy;
            if sy < 0 || sy >= h as isize {
                continue;
            }
            for x in 0..w as isize {
                let sx = x - dx;
                if sx < 0 || sx >= w as isize {
                    continue;
                }
                out.set(c, y as usize, x as usize, img.get(c, sy as usize, sx as usize));
            }
        }
    }
    out
}

/// Mirrors columns.
pub fn hflip_image(img: &ImageTensor) -> ImageTensor {
    let w = img.width();
    let mut out = img.clone();
    for c in 0..img.channels() {
        for y in 0..img.height() {
            for x in 0..w {
                out.set(c, y, x, img.get(c, y, w - 1 - x));
            }
        }
    }
    out
}
