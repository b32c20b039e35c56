//! Square convolution kernels and 2D convolution with mirrored borders.

use crate::error::{Error, Result};
use crate::image::Image;

/// Square kernel of side `2*radius + 1`, taps row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    radius: usize,
    taps: Vec<f64>,
}

impl Kernel2D {
    pub fn new(radius: usize, taps: Vec<f64>) -> Result<Self> {
        let side = 2 * radius + 1;
        if taps.len() != side * side {
            return Err(Error::ShapeMismatch(format!(
                "kernel needs {} taps for radius {radius}, got {}",
                side * side,
                taps.len()
            )));
        }
        Ok(Kernel2D { radius, taps })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    #[inline]
    pub fn tap(&self, dy: isize, dx: isize) -> f64 {
        let side = self.side() as isize;
        let r = self.radius as isize;
        self.taps[((dy + r) * side + (dx + r)) as usize]
    }
}

/// Normalized 1D Gaussian taps for offsets `-radius ..= radius`.
fn gaussian_taps_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut taps: Vec<f64> = (-(radius as isize)..=radius as isize)
        .map(|i| (-(i * i) as f64 * inv).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Truncated Gaussian smoothing kernel, normalized to sum 1.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Result<Kernel2D> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if radius < 1 {
        return Err(Error::InvalidParameter("kernel radius must be at least 1".into()));
    }
    // Separable product of normalized 1D taps; the 2D grid then sums to 1.
    let t1 = gaussian_taps_1d(sigma, radius);
    let side = 2 * radius + 1;
    let mut taps = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            taps.push(t1[i] * t1[j]);
        }
    }
    Kernel2D::new(radius, taps)
}

/// Mirror (symmetric) index: reflections repeat the edge sample and fold as
/// many times as needed, so any radius is valid for any image size.
#[inline]
pub(crate) fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Row of samples extended by `pad` mirrored samples on each side.
fn padded_row(src: impl Fn(isize) -> f64, n: usize, pad: usize, out: &mut Vec<f64>) {
    out.clear();
    for i in -(pad as isize)..(n + pad) as isize {
        out.push(src(mirror(i, n) as isize));
    }
}

/// Full 2D convolution, each channel independently, mirrored borders.
///
/// Output orientation is true convolution: an impulse reproduces the kernel
/// taps around the impulse site.
pub fn convolve(img: &Image, kernel: &Kernel2D) -> Image {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let r = kernel.radius() as isize;
    let mut out = vec![0.0; h * w * ch];
    for c in 0..ch {
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for dy in -r..=r {
                    let sy = mirror(y as isize - dy, h);
                    for dx in -r..=r {
                        let sx = mirror(x as isize - dx, w);
                        acc += kernel.tap(dy, dx) * img.get(sy, sx, c);
                    }
                }
                out[(y * w + x) * ch + c] = acc;
            }
        }
    }
    finish_in_range(img, out)
}

/// Guards against float overshoot: a unit-sum nonnegative kernel keeps
/// samples inside the input interval, so clamping only trims rounding.
fn finish_in_range(img: &Image, mut out: Vec<f64>) -> Image {
    if let Some((lo, hi)) = img.range().interval() {
        for v in &mut out {
            *v = v.clamp(lo, hi);
        }
    }
    Image::new(img.height(), img.width(), img.channels(), img.range(), out)
        .expect("convolution preserves shape")
}

/// Gaussian smoothing via two separable passes; numerically equal to
/// `convolve` with `gaussian_kernel(sigma, radius)` up to rounding, and fast
/// enough for the large radii the mask generator asks for.
pub fn gaussian_blur(img: &Image, sigma: f64, radius: usize) -> Result<Image> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if radius < 1 {
        return Err(Error::InvalidParameter("kernel radius must be at least 1".into()));
    }
    let taps = gaussian_taps_1d(sigma, radius);
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let mut mid = vec![0.0; h * w * ch];
    let mut buf = Vec::new();
    // Horizontal pass.
    for c in 0..ch {
        for y in 0..h {
            padded_row(|x| img.get(y, x as usize, c), w, radius, &mut buf);
            for x in 0..w {
                let window = &buf[x..x + taps.len()];
                let mut acc = 0.0;
                for (t, v) in taps.iter().zip(window) {
                    acc += t * v;
                }
                mid[(y * w + x) * ch + c] = acc;
            }
        }
    }
    // Vertical pass over the horizontal result.
    let mut out = vec![0.0; h * w * ch];
    let mut col = Vec::new();
    for c in 0..ch {
        for x in 0..w {
            padded_row(|y| mid[(y as usize * w + x) * ch + c], h, radius, &mut col);
            for y in 0..h {
                let window = &col[y..y + taps.len()];
                let mut acc = 0.0;
                for (t, v) in taps.iter().zip(window) {
                    acc += t * v;
                }
                out[(y * w + x) * ch + c] = acc;
            }
        }
    }
    Ok(finish_in_range(img, out))
}
