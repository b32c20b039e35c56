//! Local texture randomization: random-boundary binary masks carved from
//! smoothed Gaussian noise, and pixel-exact mixing of a raw image with its
//! globally stylized counterpart.

pub mod erf;

use crate::error::{Error, Result};
use crate::gtr::{gtr_stylize, Codec};
use crate::image::{Image, Range};
use crate::kernel::gaussian_blur;
use crate::rng::{child_seed, RngStream};

pub use erf::{erf as erf_fn, erf_inv};

/// How a generated mask came to be; enough to regenerate it bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskProvenance {
    pub lambda_used: f64,
    pub p: f64,
    pub seed: u64,
}

/// Binary mask. A `1` bit selects the stylized image in [`mix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    height: usize,
    width: usize,
    bits: Vec<u8>,
    /// Present on generated masks; absent when loaded from a file.
    pub provenance: Option<MaskProvenance>,
}

impl Mask {
    pub fn from_bits(height: usize, width: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "mask bits length {} != {height}x{width}",
                bits.len()
            )));
        }
        if bits.iter().any(|b| *b > 1) {
            return Err(Error::InvalidParameter("mask bits must be 0 or 1".into()));
        }
        Ok(Mask { height, width, bits, provenance: None })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn white_fraction(&self) -> f64 {
        self.bits.iter().map(|&b| b as usize).sum::<usize>() as f64 / self.bits.len() as f64
    }

    /// Renders to a byte image (white = 255), the on-disk representation.
    pub fn to_image(&self) -> Image {
        let data = self.bits.iter().map(|&b| if b == 1 { 255.0 } else { 0.0 }).collect();
        Image::new(self.height, self.width, 1, Range::Byte, data).expect("mask shape is valid")
    }

    /// Reads a mask from a single-channel image; samples at or above half
    /// range become white.
    pub fn from_image(img: &Image) -> Result<Self> {
        if img.channels() != 1 {
            return Err(Error::InvalidParameter("mask images must be single-channel".into()));
        }
        let mid = match img.range() {
            Range::Byte => 127.5,
            _ => 0.5,
        };
        let bits = img.data().iter().map(|&v| (v >= mid) as u8).collect();
        Mask::from_bits(img.height(), img.width(), bits)
    }
}

/// Mask generation parameters.
#[derive(Debug, Clone, Copy)]
pub struct LtrConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Target white (stylized) proportion.
    pub p: f64,
    /// Base of the logarithm mapping lambda to the smoothing bandwidth.
    pub log_base: f64,
    /// Override for the smoothing kernel radius; `None` picks `ceil(3*gamma)`,
    /// which truncates the Gaussian at three standard deviations.
    pub kernel_radius: Option<usize>,
}

impl Default for LtrConfig {
    fn default() -> Self {
        LtrConfig { lambda_min: 4.0, lambda_max: 16.0, p: 0.5, log_base: 2.0, kernel_radius: None }
    }
}

impl LtrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max) {
            return Err(Error::InvalidParameter(format!(
                "lambda range must satisfy 0 < min <= max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "white proportion must lie strictly inside (0, 1), got {}",
                self.p
            )));
        }
        if !(self.log_base > 1.0) || !self.log_base.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "log base must be a finite value above 1, got {}",
                self.log_base
            )));
        }
        if self.kernel_radius == Some(0) {
            return Err(Error::InvalidParameter("kernel radius override must be >= 1".into()));
        }
        Ok(())
    }
}

/// Smoothing bandwidth from the sampled lambda: `exp(log_base(lambda))`.
pub fn gamma_from_lambda(lambda: f64, log_base: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    Ok((lambda.ln() / log_base.ln()).exp())
}

/// Threshold alpha such that the fraction of samples at or above alpha is
/// `p`, assuming the field is Gaussian: `alpha = mu + sqrt(2)*sigma*erfinv(1-2p)`.
///
/// White is the upper tail, so the quantile argument is `1-2p` rather than
/// `2p-1`; the sort-based ranking oracle fixes this orientation.
pub fn threshold_for_proportion(s: &Image, p: f64) -> Result<f64> {
    if s.channels() != 1 {
        return Err(Error::InvalidParameter("threshold needs a single-channel field".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "proportion must lie strictly inside (0, 1), got {p}"
        )));
    }
    let (means, stds) = s.channel_stats()?;
    if stds[0] == 0.0 {
        return Err(Error::DegenerateStats("field has zero variance, threshold undefined".into()));
    }
    Ok(means[0] + std::f64::consts::SQRT_2 * stds[0] * erf_inv(1.0 - 2.0 * p)?)
}

const MIN_MASK_SIDE: usize = 32;
const MAX_REGENERATIONS: u32 = 3;

/// Generates a mask by drawing a fresh seed from `rng`; see
/// [`generate_mask_seeded`] for the deterministic core.
pub fn generate_mask(height: usize, width: usize, cfg: &LtrConfig, rng: &mut RngStream) -> Result<Mask> {
    let seed = rng.next_u64();
    generate_mask_seeded(height, width, cfg, seed)
}

/// Deterministic mask generation: lambda is drawn uniformly from the
/// configured range, i.i.d. unit normal noise is smoothed with a Gaussian of
/// sigma `gamma(lambda)`, and the field is binarized at the erf-based
/// threshold. The same `(height, width, cfg, seed)` always yields the same
/// bits; the seed recorded in the mask's provenance replays it.
pub fn generate_mask_seeded(height: usize, width: usize, cfg: &LtrConfig, seed: u64) -> Result<Mask> {
    cfg.validate()?;
    if height < MIN_MASK_SIDE || width < MIN_MASK_SIDE {
        return Err(Error::InvalidParameter(format!(
            "mask must be at least {MIN_MASK_SIDE}x{MIN_MASK_SIDE}, got {height}x{width}"
        )));
    }
    let mut attempt_seed = seed;
    for attempt in 0..=MAX_REGENERATIONS {
        let mut stream = RngStream::new(attempt_seed);
        let lambda = stream.uniform(cfg.lambda_min, cfg.lambda_max);
        let gamma = gamma_from_lambda(lambda, cfg.log_base)?;
        let radius = cfg.kernel_radius.unwrap_or(((3.0 * gamma).ceil() as usize).max(1));

        let mut noise = vec![0.0; height * width];
        stream.fill_normal(&mut noise);
        let field = Image::new(height, width, 1, Range::Real, noise)?;
        let smoothed = gaussian_blur(&field, gamma, radius)?;

        match threshold_for_proportion(&smoothed, cfg.p) {
            Ok(alpha) => {
                let bits = smoothed.data().iter().map(|&v| (v >= alpha) as u8).collect();
                return Ok(Mask {
                    height,
                    width,
                    bits,
                    provenance: Some(MaskProvenance { lambda_used: lambda, p: cfg.p, seed: attempt_seed }),
                });
            }
            // A flat smoothed field cannot be thresholded; retry with a
            // derived seed a bounded number of times.
            Err(Error::DegenerateStats(_)) if attempt < MAX_REGENERATIONS => {
                attempt_seed = child_seed(attempt_seed, attempt as u64 + 1);
            }
            Err(Error::DegenerateStats(msg)) => {
                return Err(Error::Numerical(format!(
                    "smoothed field stayed degenerate after {MAX_REGENERATIONS} regenerations: {msg}"
                )));
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop either returns a mask or an error")
}

/// Pixel-exact mix: where the mask is 0 the source pixel is taken, where it
/// is 1 the stylized pixel is taken. No blending.
pub fn mix(x: &Image, x_gtr: &Image, m: &Mask) -> Result<Image> {
    if x.height() != x_gtr.height()
        || x.width() != x_gtr.width()
        || x.channels() != x_gtr.channels()
        || x.range() != x_gtr.range()
    {
        return Err(Error::ShapeMismatch(
            "mix inputs must share dimensions, channels and range".into(),
        ));
    }
    if x.height() != m.height() || x.width() != m.width() {
        return Err(Error::ShapeMismatch(format!(
            "mask {}x{} does not match image {}x{}",
            m.height(),
            m.width(),
            x.height(),
            x.width()
        )));
    }
    let ch = x.channels();
    let mut data = Vec::with_capacity(x.data().len());
    for (i, &bit) in m.bits().iter().enumerate() {
        let src = if bit == 1 { x_gtr.data() } else { x.data() };
        data.extend_from_slice(&src[i * ch..(i + 1) * ch]);
    }
    Image::new(x.height(), x.width(), ch, x.range(), data)
}

/// Complete local randomization: stylize globally, generate a mask, mix.
pub fn ltr_randomize(
    x: &Image,
    t: &Image,
    codec: &Codec,
    cfg: &LtrConfig,
    rng: &mut RngStream,
) -> Result<Image> {
    let stylized = gtr_stylize(x, t, codec)?;
    let mask = generate_mask(x.height(), x.width(), cfg, rng)?;
    mix(&x.to_unit(), &stylized, &mask)
}
