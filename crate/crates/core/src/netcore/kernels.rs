//! Low-level per-sample kernels. All buffers are channel-planar.

/// `c = alpha * a * b + beta * c` with explicit row/column strides.
#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    assert!(m == 0 || k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len());
    assert!(k == 0 || n == 0 || (k - 1) * rsb + (n - 1) * csb < b.len());
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Unfolds 3x3 zero-padded neighbourhoods into `cols[(c*9 + ky*3 + kx), y*w + x]`.
pub(crate) fn im2col(input: &[f64], channels: usize, h: usize, w: usize, cols: &mut [f64]) {
    let hw = h * w;
    for c in 0..channels {
        let plane = &input[c * hw..(c + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &mut cols[(c * 9 + ky * 3 + kx) * hw..][..hw];
                let x_lo = 1usize.saturating_sub(kx);
                let x_hi = (w + 1 - kx).min(w);
                for y in 0..h {
                    let dst = &mut row[y * w..(y + 1) * w];
                    let sy = y + ky;
                    if sy < 1 || sy > h {
                        dst.fill(0.0);
                        continue;
                    }
                    let src = &plane[(sy - 1) * w..sy * w];
                    dst[..x_lo].fill(0.0);
                    dst[x_hi..].fill(0.0);
                    dst[x_lo..x_hi].copy_from_slice(&src[x_lo + kx - 1..x_hi + kx - 1]);
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: accumulates columns back into `out` (which is overwritten).
pub(crate) fn col2im(cols: &[f64], channels: usize, h: usize, w: usize, out: &mut [f64]) {
    let hw = h * w;
    out[..channels * hw].fill(0.0);
    for c in 0..channels {
        let plane = &mut out[c * hw..(c + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &cols[(c * 9 + ky * 3 + kx) * hw..][..hw];
                let x_lo = 1usize.saturating_sub(kx);
                let x_hi = (w + 1 - kx).min(w);
                for y in 0..h {
                    let sy = y + ky;
                    if sy < 1 || sy > h {
                        continue;
                    }
                    let src = &row[y * w + x_lo..y * w + x_hi];
                    let dst = &mut plane[(sy - 1) * w + x_lo + kx - 1..(sy - 1) * w + x_hi + kx - 1];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s;
                    }
                }
            }
        }
    }
}

/// 2x2 stride-2 max pooling; records the flat input index of each maximum
/// (first maximum wins on ties).
pub(crate) fn max_pool(
    input: &[f64],
    channels: usize,
    h: usize,
    w: usize,
    out: &mut [f64],
    argmax: &mut [usize],
) {
    let (oh, ow) = (h / 2, w / 2);
    for c in 0..channels {
        for oy in 0..oh {
            for ox in 0..ow {
                let base = c * h * w + 2 * oy * w + 2 * ox;
                let mut best = base;
                for idx in [base + 1, base + w, base + w + 1] {
                    if input[idx] > input[best] {
                        best = idx;
                    }
                }
                let o = (c * oh + oy) * ow + ox;
                out[o] = input[best];
                argmax[o] = best;
            }
        }
    }
}

/// Numerically stable softmax.
pub(crate) fn softmax(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &z) in out.iter_mut().zip(logits) {
        *o = (z - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}
