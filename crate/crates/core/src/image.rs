//! Raster type shared by every module: row-major interleaved `f64` samples
//! with an explicit value-range tag.

use crate::error::{Error, Result};

/// Declared domain of the samples.
///
/// `Unit` and `Byte` are display ranges and are enforced on construction.
/// `Real` is for intermediate rasters (noise fields, smoothed fields) whose
/// samples are unbounded; only finiteness is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    Unit,
    Byte,
    Real,
}

impl Range {
    /// Inclusive value interval, if bounded.
    pub fn interval(self) -> Option<(f64, f64)> {
        match self {
            Range::Unit => Some((0.0, 1.0)),
            Range::Byte => Some((0.0, 255.0)),
            Range::Real => None,
        }
    }
}

/// H x W x C raster, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    range: Range,
    data: Vec<f64>,
}

impl Image {
    /// Builds an image, checking the length and range invariants.
    pub fn new(height: usize, width: usize, channels: usize, range: Range, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParameter("image dimensions must be nonzero".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParameter(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "data length {} != {height}x{width}x{channels}",
                data.len()
            )));
        }
        let img = Image { height, width, channels, range, data };
        img.check_range()?;
        Ok(img)
    }

    fn check_range(&self) -> Result<()> {
        match self.range.interval() {
            Some((lo, hi)) => {
                if self.data.iter().any(|v| !(*v >= lo && *v <= hi)) {
                    return Err(Error::InvalidParameter(format!(
                        "sample outside {:?} range [{lo}, {hi}]",
                        self.range
                    )));
                }
            }
            None => {
                if self.data.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numerical("non-finite sample in image".into()));
                }
            }
        }
        Ok(())
    }

    pub fn constant(height: usize, width: usize, channels: usize, range: Range, value: f64) -> Result<Self> {
        Image::new(height, width, channels, range, vec![value; height * width * channels])
    }

    /// Builds from a per-sample closure `f(y, x, c)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        range: Range,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Image::new(height, width, channels, range, data)
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

    pub fn range(&self) -> Range {
        self.range
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Rescales to the unit range. Byte images divide by 255; real images
    /// are clamped into [0, 1].
    pub fn to_unit(&self) -> Image {
        match self.range {
            Range::Unit => self.clone(),
            Range::Byte => Image {
                range: Range::Unit,
                data: self.data.iter().map(|v| v / 255.0).collect(),
                ..*self
            },
            Range::Real => Image {
                range: Range::Unit,
                data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
                ..*self
            },
        }
    }

    /// Rescales to the byte range.
    pub fn to_byte(&self) -> Image {
        match self.range {
            Range::Byte => self.clone(),
            _ => Image {
                range: Range::Byte,
                data: self.data.iter().map(|v| v * 255.0).collect(),
                ..*self
            },
        }
    }

    /// Per-channel spatial mean and standard deviation (population, 1/N).
    ///
    /// Fails on single-pixel images, where a spread is meaningless.
    pub fn channel_stats(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.height * self.width;
        if n < 2 {
            return Err(Error::DegenerateStats("channel_stats requires at least 2 pixels".into()));
        }
        let mut means = vec![0.0; self.channels];
        for px in self.data.chunks_exact(self.channels) {
            for (m, v) in means.iter_mut().zip(px) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n as f64;
        }
        // Second pass over centered values keeps the variance accurate when
        // the spread is small relative to the mean.
        let mut vars = vec![0.0; self.channels];
        for px in self.data.chunks_exact(self.channels) {
            for ((s, v), m) in vars.iter_mut().zip(px).zip(&means) {
                let d = v - m;
                *s += d * d;
            }
        }
        let stds = vars.iter().map(|v| (v / n as f64).sqrt()).collect();
        Ok((means, stds))
    }

    /// Rec. 601 luma of an RGB image; keeps the range tag.
    pub fn to_grayscale(&self) -> Result<Image> {
        if self.channels != 3 {
            return Err(Error::InvalidParameter(format!(
                "to_grayscale expects 3 channels, got {}",
                self.channels
            )));
        }
        let data = self
            .data
            .chunks_exact(3)
            .map(|px| 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2])
            .collect();
        Image::new(self.height, self.width, 1, self.range, data)
    }

    pub fn flip_horizontal(&self) -> Image {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                for c in 0..self.channels {
                    out.set(y, x, c, self.get(y, self.width - 1 - x, c));
                }
            }
        }
        out
    }

    /// Bilinear resample with half-pixel center alignment.
    pub fn resize_bilinear(&self, new_height: usize, new_width: usize) -> Result<Image> {
        if new_height == 0 || new_width == 0 {
            return Err(Error::InvalidParameter("resize target must be nonzero".into()));
        }
        let sy = self.height as f64 / new_height as f64;
        let sx = self.width as f64 / new_width as f64;
        Image::from_fn(new_height, new_width, self.channels, self.range, |y, x, c| {
            let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
            let y0 = fy.floor() as usize;
            let x0 = fx.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let x1 = (x0 + 1).min(self.width - 1);
            let (wy, wx) = (fy - y0 as f64, fx - x0 as f64);
            let top = self.get(y0, x0, c) * (1.0 - wx) + self.get(y0, x1, c) * wx;
            let bot = self.get(y1, x0, c) * (1.0 - wx) + self.get(y1, x1, c) * wx;
            top * (1.0 - wy) + bot * wy
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(h: usize, w: usize) -> Image {
        Image::from_fn(h, w, 1, Range::Unit, |y, x, _| {
            (y * w + x) as f64 / ((h * w - 1) as f64)
        })
        .unwrap()
    }

    #[test]
    fn rejects_wrong_data_length() {
        assert!(matches!(
            Image::new(2, 2, 1, Range::Unit, vec![0.0; 5]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_samples() {
        assert!(Image::new(1, 2, 1, Range::Unit, vec![0.5, 1.5]).is_err());
        assert!(Image::new(1, 2, 1, Range::Byte, vec![0.0, 256.0]).is_err());
        assert!(Image::new(1, 2, 1, Range::Real, vec![0.0, f64::NAN]).is_err());
        assert!(Image::new(1, 2, 1, Range::Real, vec![-3.0, 1e9]).is_ok());
    }

    #[test]
    fn rejects_unsupported_channel_counts() {
        assert!(Image::new(1, 1, 2, Range::Unit, vec![0.0; 2]).is_err());
    }

    #[test]
    fn stats_constant_image() {
        let img = Image::constant(4, 4, 3, Range::Unit, 0.5).unwrap();
        let (means, stds) = img.channel_stats().unwrap();
        for c in 0..3 {
            assert_eq!(means[c], 0.5);
            assert_eq!(stds[c], 0.0);
        }
    }

    #[test]
    fn stats_two_pixel_closed_form() {
        let img = Image::new(1, 2, 1, Range::Unit, vec![0.0, 1.0]).unwrap();
        let (means, stds) = img.channel_stats().unwrap();
        assert_eq!(means[0], 0.5);
        assert_eq!(stds[0], 0.5);
    }

    #[test]
    fn stats_single_pixel_is_degenerate() {
        let img = Image::constant(1, 1, 1, Range::Unit, 0.3).unwrap();
        assert!(matches!(img.channel_stats(), Err(Error::DegenerateStats(_))));
    }

    #[test]
    fn stats_match_two_pass_oracle() {
        let mut rng = crate::rng::RngStream::new(21);
        let img = Image::from_fn(13, 17, 3, Range::Unit, |_, _, _| rng.next_f64()).unwrap();
        let (means, stds) = img.channel_stats().unwrap();
        let n = 13 * 17;
        for c in 0..3 {
            let mut sum = 0.0;
            for y in 0..13 {
                for x in 0..17 {
                    sum += img.get(y, x, c);
                }
            }
            let mean = sum / n as f64;
            let mut sq = 0.0;
            for y in 0..13 {
                for x in 0..17 {
                    let d = img.get(y, x, c) - mean;
                    sq += d * d;
                }
            }
            let std = (sq / n as f64).sqrt();
            assert!((means[c] - mean).abs() < 1e-12);
            assert!((stds[c] - std).abs() < 1e-12);
        }
    }

    #[test]
    fn stats_translation_covariance() {
        let mut rng = crate::rng::RngStream::new(8);
        let img = Image::from_fn(9, 9, 1, Range::Unit, |_, _, _| rng.next_f64() * 0.5).unwrap();
        let shifted = Image::new(
            9,
            9,
            1,
            Range::Unit,
            img.data().iter().map(|v| v + 0.25).collect(),
        )
        .unwrap();
        let (m0, s0) = img.channel_stats().unwrap();
        let (m1, s1) = shifted.channel_stats().unwrap();
        assert!((m1[0] - m0[0] - 0.25).abs() < 1e-12);
        assert!((s1[0] - s0[0]).abs() < 1e-12);
    }

    #[test]
    fn grayscale_known_colors() {
        let white = Image::constant(2, 2, 3, Range::Byte, 255.0).unwrap();
        assert_eq!(white.to_grayscale().unwrap().get(0, 0, 0), 255.0);

        let red = Image::from_fn(2, 2, 3, Range::Byte, |_, _, c| if c == 0 { 255.0 } else { 0.0 }).unwrap();
        let luma = red.to_grayscale().unwrap().get(1, 1, 0);
        assert!((luma - 76.245).abs() < 1e-9, "luma {luma}");
    }

    #[test]
    fn grayscale_matches_per_pixel_formula() {
        let mut rng = crate::rng::RngStream::new(4);
        let img = Image::from_fn(5, 7, 3, Range::Unit, |_, _, _| rng.next_f64()).unwrap();
        let g = img.to_grayscale().unwrap();
        for y in 0..5 {
            for x in 0..7 {
                let want = 0.299 * img.get(y, x, 0) + 0.587 * img.get(y, x, 1) + 0.114 * img.get(y, x, 2);
                assert!((g.get(y, x, 0) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grayscale_rejects_single_channel() {
        let img = Image::constant(2, 2, 1, Range::Unit, 0.0).unwrap();
        assert!(img.to_grayscale().is_err());
    }

    #[test]
    fn unit_byte_round_trip() {
        let img = Image::new(1, 3, 1, Range::Byte, vec![0.0, 128.0, 255.0]).unwrap();
        let back = img.to_unit().to_byte();
        for (a, b) in back.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn resize_identity_and_constant() {
        let img = ramp(8, 8);
        let same = img.resize_bilinear(8, 8).unwrap();
        for (a, b) in same.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = Image::constant(6, 9, 3, Range::Unit, 0.7).unwrap();
        let r = c.resize_bilinear(13, 4).unwrap();
        assert!(r.data().iter().all(|v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn flip_is_involutive() {
        let img = ramp(5, 6);
        assert_eq!(img.flip_horizontal().flip_horizontal(), img);
    }
}
