//! Global texture randomization: re-statistics a content image with a style
//! image's per-channel feature moments between an encoder and a decoder.
//!
//! Two codec backends exist. `Identity` treats RGB pixels as the feature
//! space, which makes the whole transform analytic; it is what the training
//! pipeline uses. `Conv` is a small fixed encoder/decoder whose weights load
//! from a TXRW file; any weights matching the architecture are accepted.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Image, Range};
use crate::rng::RngStream;
use crate::tensorfile::{read_tensors, write_tensors, Tensor};

/// Dense feature map, row-major with interleaved channels (H x W x C).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "feature data length {} != {height}x{width}x{channels}",
                data.len()
            )));
        }
        Ok(FeatureMap { height, width, channels, data })
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Per-channel spatial mean and standard deviation (population).
    pub fn channel_stats(&self) -> (Vec<f64>, Vec<f64>) {
        let n = (self.height * self.width) as f64;
        let mut means = vec![0.0; self.channels];
        for px in self.data.chunks_exact(self.channels) {
            for (m, v) in means.iter_mut().zip(px) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; self.channels];
        for px in self.data.chunks_exact(self.channels) {
            for ((s, v), m) in vars.iter_mut().zip(px).zip(&means) {
                let d = v - m;
                *s += d * d;
            }
        }
        let stds = vars.iter().map(|v| (v / n).sqrt()).collect();
        (means, stds)
    }
}

/// Adaptive instance normalization: renormalizes each content channel to the
/// style channel's spatial mean and standard deviation.
///
/// Spatial sizes may differ; channel counts must match. A content channel
/// with stddev at or below 1e-8 is rejected rather than epsilon-patched. A
/// constant style channel is fine and collapses that channel to its mean.
pub fn adain(content: &FeatureMap, style: &FeatureMap) -> Result<FeatureMap> {
    if content.channels != style.channels {
        return Err(Error::ShapeMismatch(format!(
            "adain channel mismatch: content {} vs style {}",
            content.channels, style.channels
        )));
    }
    let (c_mean, c_std) = content.channel_stats();
    let (s_mean, s_std) = style.channel_stats();
    for (c, std) in c_std.iter().enumerate() {
        if *std <= 1e-8 {
            return Err(Error::DegenerateStats(format!(
                "content channel {c} has stddev {std:.3e}; adain needs spread to normalize"
            )));
        }
    }
    let mut data = Vec::with_capacity(content.data.len());
    for px in content.data.chunks_exact(content.channels) {
        for (c, v) in px.iter().enumerate() {
            data.push(s_std[c] * ((v - c_mean[c]) / c_std[c]) + s_mean[c]);
        }
    }
    FeatureMap::new(content.height, content.width, content.channels, data)
}

/// Encoder/decoder pair used around the AdaIN fusion.
#[derive(Debug, Clone)]
pub enum Codec {
    /// Pixels are the features; encode/decode are exact inverses.
    Identity,
    /// Small convolutional codec with loadable weights.
    Conv(Box<CodecWeights>),
}

impl Codec {
    /// Extracts features from an image. Inputs are taken to unit range first,
    /// so stylization is independent of the storage range.
    pub fn encode(&self, img: &Image) -> Result<FeatureMap> {
        let unit = img.to_unit();
        match self {
            Codec::Identity => FeatureMap::new(
                unit.height(),
                unit.width(),
                unit.channels(),
                unit.data().to_vec(),
            ),
            Codec::Conv(w) => w.encode(&unit),
        }
    }

    /// Inverts a feature map to a unit-range image, clamped to [0, 1].
    pub fn decode(&self, f: &FeatureMap) -> Result<Image> {
        match self {
            Codec::Identity => {
                let data = f.data.iter().map(|v| v.clamp(0.0, 1.0)).collect();
                Image::new(f.height, f.width, f.channels, Range::Unit, data)
            }
            Codec::Conv(w) => w.decode(f),
        }
    }
}

/// Full global texture randomization: re-statistics `x`'s features with
/// `t`'s and decodes back to an image.
pub fn gtr_stylize(x: &Image, t: &Image, codec: &Codec) -> Result<Image> {
    let fx = codec.encode(x)?;
    let ft = codec.encode(t)?;
    let fused = adain(&fx, &ft)?;
    codec.decode(&fused)
}

/// Layer shapes of the fixed conv codec: 3x3 kernels, encoder channels
/// 3 -> 16 -> 32 -> 64 with stride 2 on the last two convs, decoder mirrored
/// with nearest-neighbor upsampling.
const LAYERS: [(&str, usize, usize); 6] = [
    ("enc.conv1", 3, 16),
    ("enc.conv2", 16, 32),
    ("enc.conv3", 32, 64),
    ("dec.conv1", 64, 32),
    ("dec.conv2", 32, 16),
    ("dec.conv3", 16, 3),
];

/// Encoder total downsampling factor.
pub const CODEC_STRIDE: usize = 4;

#[derive(Debug, Clone)]
pub struct CodecWeights {
    // weight layout: [out_c][in_c][ky][kx], one Vec per layer in LAYERS order
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl CodecWeights {
    /// Loads and validates a TXRW weights file against the architecture.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let tensors = read_tensors(path)?;
        let find = |name: &str| -> Result<&Tensor> {
            tensors
                .iter()
                .find(|t| t.name == name)
                .ok_or_else(|| Error::CorruptWeights(format!("missing tensor '{name}'")))
        };
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (name, in_c, out_c) in LAYERS {
            let w = find(&format!("{name}.weight"))?;
            let want = vec![out_c as u64, in_c as u64, 3, 3];
            if w.dims != want {
                return Err(Error::CorruptWeights(format!(
                    "tensor '{name}.weight' dims {:?}, expected {:?}",
                    w.dims, want
                )));
            }
            let b = find(&format!("{name}.bias"))?;
            if b.dims != vec![out_c as u64] {
                return Err(Error::CorruptWeights(format!(
                    "tensor '{name}.bias' dims {:?}, expected [{out_c}]",
                    b.dims
                )));
            }
            weights.push(w.data.clone());
            biases.push(b.data.clone());
        }
        Ok(CodecWeights { weights, biases })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut tensors = Vec::new();
        for (i, (name, in_c, out_c)) in LAYERS.iter().enumerate() {
            tensors.push(Tensor::new(
                format!("{name}.weight"),
                vec![*out_c as u64, *in_c as u64, 3, 3],
                self.weights[i].clone(),
            )?);
            tensors.push(Tensor::new(
                format!("{name}.bias"),
                vec![*out_c as u64],
                self.biases[i].clone(),
            )?);
        }
        write_tensors(path, &tensors)
    }

    /// Random He-scaled weights; handy for smoke tests and demos, since
    /// training the codec is out of scope.
    pub fn seeded(seed: u64) -> Self {
        let mut rng = RngStream::new(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (_, in_c, out_c) in LAYERS {
            let fan_in = (in_c * 9) as f64;
            let scale = (2.0 / fan_in).sqrt();
            let mut w = vec![0.0; out_c * in_c * 9];
            rng.fill_normal(&mut w);
            for v in &mut w {
                *v *= scale;
            }
            weights.push(w);
            // A small positive bias keeps ReLU channels from dying outright,
            // which AdaIN would reject as degenerate.
            biases.push(vec![0.05; out_c]);
        }
        CodecWeights { weights, biases }
    }

    fn encode(&self, img: &Image) -> Result<FeatureMap> {
        if img.channels() != 3 {
            return Err(Error::InvalidParameter("conv codec expects 3-channel input".into()));
        }
        if img.height() % CODEC_STRIDE != 0 || img.width() % CODEC_STRIDE != 0 {
            return Err(Error::ShapeMismatch(format!(
                "conv codec needs spatial dims divisible by {CODEC_STRIDE}, got {}x{}",
                img.height(),
                img.width()
            )));
        }
        let f0 = FeatureMap::new(img.height(), img.width(), 3, img.data().to_vec())?;
        let f1 = conv_layer(&f0, &self.weights[0], &self.biases[0], 1, true);
        let f2 = conv_layer(&f1, &self.weights[1], &self.biases[1], 2, true);
        Ok(conv_layer(&f2, &self.weights[2], &self.biases[2], 2, true))
    }

    fn decode(&self, f: &FeatureMap) -> Result<Image> {
        if f.channels != 64 {
            return Err(Error::ShapeMismatch(format!(
                "decoder expects 64-channel features, got {}",
                f.channels
            )));
        }
        let u1 = upsample_nearest(f);
        let d1 = conv_layer(&u1, &self.weights[3], &self.biases[3], 1, true);
        let u2 = upsample_nearest(&d1);
        let d2 = conv_layer(&u2, &self.weights[4], &self.biases[4], 1, true);
        let d3 = conv_layer(&d2, &self.weights[5], &self.biases[5], 1, false);
        let data = d3.data.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Image::new(d3.height, d3.width, 3, Range::Unit, data)
    }
}

/// 3x3 convolution, zero padding 1, given stride, optional ReLU.
fn conv_layer(input: &FeatureMap, weight: &[f64], bias: &[f64], stride: usize, relu: bool) -> FeatureMap {
    let in_c = input.channels;
    let out_c = bias.len();
    let (h, w) = (input.height, input.width);
    let (oh, ow) = (h.div_ceil(stride), w.div_ceil(stride));
    let mut data = vec![0.0; oh * ow * out_c];
    for oy in 0..oh {
        for ox in 0..ow {
            let cy = (oy * stride) as isize;
            let cx = (ox * stride) as isize;
            for oc in 0..out_c {
                let mut acc = bias[oc];
                for ic in 0..in_c {
                    let wbase = ((oc * in_c) + ic) * 9;
                    for ky in 0..3isize {
                        let sy = cy + ky - 1;
                        if sy < 0 || sy >= h as isize {
                            continue;
                        }
                        for kx in 0..3isize {
                            let sx = cx + kx - 1;
                            if sx < 0 || sx >= w as isize {
                                continue;
                            }
                            acc += weight[wbase + (ky * 3 + kx) as usize]
                                * input.get(sy as usize, sx as usize, ic);
                        }
                    }
                }
                if relu && acc < 0.0 {
                    acc = 0.0;
                }
                data[(oy * ow + ox) * out_c + oc] = acc;
            }
        }
    }
    FeatureMap { height: oh, width: ow, channels: out_c, data }
}

fn upsample_nearest(f: &FeatureMap) -> FeatureMap {
    let (h, w, c) = (f.height * 2, f.width * 2, f.channels);
    let mut data = vec![0.0; h * w * c];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                data[(y * w + x) * c + ch] = f.get(y / 2, x / 2, ch);
            }
        }
    }
    FeatureMap { height: h, width: w, channels: c, data }
}
