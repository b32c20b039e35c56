//! Toy segmentation network: two 3x3 conv layers with ReLU and a 1x1 logits
//! head, spatial dims preserved throughout (padding 1, stride 1).
//!
//! Forward and backward passes are written by hand over channel-plane
//! buffers; inner loops run over contiguous rows so they autovectorize.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gtr::FeatureMap;
use crate::image::Image;
use crate::rng::RngStream;
use crate::tensorfile::{read_tensors, write_tensors, Tensor};

/// Channel-major planes: `data[c * h * w + y * w + x]`.
#[derive(Debug, Clone)]
pub struct Planes {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Planes {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Planes { channels, height, width, data: vec![0.0; channels * height * width] }
    }

    #[inline]
    fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn from_image(img: &Image) -> Self {
        let (h, w, ch) = (img.height(), img.width(), img.channels());
        let mut p = Planes::zeros(ch, h, w);
        for y in 0..h {
            for x in 0..w {
                for c in 0..ch {
                    p.data[c * h * w + y * w + x] = img.get(y, x, c);
                }
            }
        }
        p
    }

    pub fn to_feature_map(&self) -> FeatureMap {
        let (h, w, ch) = (self.height, self.width, self.channels);
        let mut data = vec![0.0; h * w * ch];
        for c in 0..ch {
            let plane = self.plane(c);
            for i in 0..h * w {
                data[i * ch + c] = plane[i];
            }
        }
        FeatureMap { height: h, width: w, channels: ch, data }
    }

    pub fn from_feature_map(f: &FeatureMap) -> Self {
        let (h, w, ch) = (f.height, f.width, f.channels);
        let mut p = Planes::zeros(ch, h, w);
        for c in 0..ch {
            for i in 0..h * w {
                p.data[c * h * w + i] = f.data[i * ch + c];
            }
        }
        p
    }
}

/// One convolution layer (3x3 padded, or 1x1 for the head).
#[derive(Debug, Clone)]
struct ConvLayer {
    in_c: usize,
    out_c: usize,
    weight: Vec<f64>, // [out_c][in_c][k][k]
    bias: Vec<f64>,
}

impl ConvLayer {
    fn he_init(in_c: usize, out_c: usize, k: usize, rng: &mut RngStream) -> Self {
        let mut weight = vec![0.0; out_c * in_c * k * k];
        rng.fill_normal(&mut weight);
        let scale = (2.0 / (in_c * k * k) as f64).sqrt();
        for w in &mut weight {
            *w *= scale;
        }
        ConvLayer { in_c, out_c, weight, bias: vec![0.0; out_c] }
    }
}

/// Zero-padded copy of the planes, one pixel of border on each side.
fn pad1(input: &Planes) -> Planes {
    let (h, w) = (input.height, input.width);
    let (ph, pw) = (h + 2, w + 2);
    let mut out = Planes::zeros(input.channels, ph, pw);
    for c in 0..input.channels {
        for y in 0..h {
            let src = &input.data[c * h * w + y * w..c * h * w + (y + 1) * w];
            let dst = &mut out.data[c * ph * pw + (y + 1) * pw + 1..];
            dst[..w].copy_from_slice(src);
        }
    }
    out
}

/// Sum with eight independent partial lanes so the reduction vectorizes;
/// the lane order is fixed, keeping results bitwise reproducible.
#[inline]
fn sum_lanes(a: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let mut chunks = a.chunks_exact(8);
    for c in &mut chunks {
        for j in 0..8 {
            acc[j] += c[j];
        }
    }
    let mut tail = 0.0;
    for v in chunks.remainder() {
        tail += v;
    }
    acc.iter().sum::<f64>() + tail
}

/// Dot product with eight partial lanes; see [`sum_lanes`].
#[inline]
fn dot_lanes(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        for j in 0..8 {
            acc[j] += xa[j] * xb[j];
        }
    }
    let mut tail = 0.0;
    for (xa, xb) in ca.remainder().iter().zip(cb.remainder()) {
        tail += xa * xb;
    }
    acc.iter().sum::<f64>() + tail
}

/// Core of the 3x3 convolution: `out[oc] = sum_ic w[oc][ic] * padded[ic]`,
/// given an already padded input. The output is produced in register tiles
/// (two output channels by sixteen pixels) so the whole reduction over
/// input channels and taps accumulates without touching memory.
fn conv3_core(padded: &Planes, weight: &[f64], in_c: usize, out_c: usize, out: &mut Planes) {
    const TILE: usize = 16;
    let (h, w) = (out.height, out.width);
    let pw = w + 2;
    let mut oc = 0;
    while oc < out_c {
        let pair = (out_c - oc).min(2);
        for y in 0..h {
            let mut x0 = 0;
            while x0 < w {
                let tile = (w - x0).min(TILE);
                let mut acc = [0.0f64; 2 * TILE];
                for ic in 0..in_c {
                    let pad_plane = &padded.data[ic * (h + 2) * pw..(ic + 1) * (h + 2) * pw];
                    let w0 = &weight[(oc * in_c + ic) * 9..(oc * in_c + ic) * 9 + 9];
                    let w1 = if pair == 2 {
                        &weight[((oc + 1) * in_c + ic) * 9..((oc + 1) * in_c + ic) * 9 + 9]
                    } else {
                        w0
                    };
                    for ky in 0..3 {
                        let row = &pad_plane[(y + ky) * pw + x0..(y + ky) * pw + x0 + tile + 2];
                        if tile == TILE {
                            for kx in 0..3 {
                                let (t0, t1) = (w0[ky * 3 + kx], w1[ky * 3 + kx]);
                                let src = &row[kx..kx + TILE];
                                for j in 0..TILE {
                                    acc[j] += t0 * src[j];
                                    acc[TILE + j] += t1 * src[j];
                                }
                            }
                        } else {
                            for kx in 0..3 {
                                let (t0, t1) = (w0[ky * 3 + kx], w1[ky * 3 + kx]);
                                let src = &row[kx..kx + tile];
                                for j in 0..tile {
                                    acc[j] += t0 * src[j];
                                    acc[TILE + j] += t1 * src[j];
                                }
                            }
                        }
                    }
                }
                let dst = oc * h * w + y * w + x0;
                out.data[dst..dst + tile].copy_from_slice(&acc[..tile]);
                if pair == 2 {
                    let dst = (oc + 1) * h * w + y * w + x0;
                    out.data[dst..dst + tile].copy_from_slice(&acc[TILE..TILE + tile]);
                }
                x0 += tile;
            }
        }
        oc += pair;
    }
}

/// 3x3 convolution forward, stride 1, zero padding 1.
fn conv3_forward(input: &Planes, layer: &ConvLayer, relu: bool) -> Planes {
    let (h, w) = (input.height, input.width);
    let padded = pad1(input);
    let mut out = Planes::zeros(layer.out_c, h, w);
    conv3_core(&padded, &layer.weight, layer.in_c, layer.out_c, &mut out);
    for oc in 0..layer.out_c {
        let plane = &mut out.data[oc * h * w..(oc + 1) * h * w];
        let b = layer.bias[oc];
        for v in plane.iter_mut() {
            *v += b;
            if relu && *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    out
}

/// 3x3 convolution backward: fills weight/bias gradients and, when
/// `dinput` is given, the gradient w.r.t. the layer input.
///
/// Weight gradients accumulate all nine taps of an `(oc, ic)` pair in one
/// pass over the rows. The input gradient is a stride-1 convolution of the
/// zero-padded output gradient with the spatially rotated, transposed
/// kernel, so it reuses the forward core.
fn conv3_backward(
    input: &Planes,
    layer: &ConvLayer,
    dout: &Planes,
    dweight: &mut [f64],
    dbias: &mut [f64],
    dinput: Option<&mut Planes>,
) {
    let (h, w) = (input.height, input.width);
    let pw = w + 2;
    let padded = pad1(input);
    for oc in 0..layer.out_c {
        let dplane = &dout.data[oc * h * w..(oc + 1) * h * w];
        dbias[oc] += sum_lanes(dplane);
        for ic in 0..layer.in_c {
            let pad_plane = &padded.data[ic * (h + 2) * pw..(ic + 1) * (h + 2) * pw];
            let mut taps = [0.0f64; 9];
            for y in 0..h {
                let dz = &dplane[y * w..(y + 1) * w];
                for ky in 0..3 {
                    let row = &pad_plane[(y + ky) * pw..(y + ky) * pw + pw];
                    for kx in 0..3 {
                        taps[ky * 3 + kx] += dot_lanes(&row[kx..kx + w], dz);
                    }
                }
            }
            let wbase = (oc * layer.in_c + ic) * 9;
            for k in 0..9 {
                dweight[wbase + k] += taps[k];
            }
        }
    }
    if let Some(dinput) = dinput {
        let mut rotated = vec![0.0; layer.weight.len()];
        for oc in 0..layer.out_c {
            for ic in 0..layer.in_c {
                for k in 0..9 {
                    rotated[(ic * layer.out_c + oc) * 9 + (8 - k)] =
                        layer.weight[(oc * layer.in_c + ic) * 9 + k];
                }
            }
        }
        let dpad = pad1(dout);
        conv3_core(&dpad, &rotated, layer.out_c, layer.in_c, dinput);
    }
}

fn conv1_forward(input: &Planes, layer: &ConvLayer) -> Planes {
    let n = input.height * input.width;
    let mut out = Planes::zeros(layer.out_c, input.height, input.width);
    for oc in 0..layer.out_c {
        let out_plane = &mut out.data[oc * n..(oc + 1) * n];
        out_plane.fill(layer.bias[oc]);
        for ic in 0..layer.in_c {
            let tap = layer.weight[oc * layer.in_c + ic];
            let in_plane = &input.data[ic * n..(ic + 1) * n];
            for (d, s) in out_plane.iter_mut().zip(in_plane) {
                *d += tap * s;
            }
        }
    }
    out
}

fn conv1_backward(
    input: &Planes,
    layer: &ConvLayer,
    dout: &Planes,
    dweight: &mut [f64],
    dbias: &mut [f64],
    dinput: &mut Planes,
) {
    let n = input.height * input.width;
    for oc in 0..layer.out_c {
        let dplane = &dout.data[oc * n..(oc + 1) * n];
        dbias[oc] += sum_lanes(dplane);
        for ic in 0..layer.in_c {
            let in_plane = &input.data[ic * n..(ic + 1) * n];
            dweight[oc * layer.in_c + ic] += dot_lanes(in_plane, dplane);
            let tap = layer.weight[oc * layer.in_c + ic];
            let din_plane = &mut dinput.data[ic * n..(ic + 1) * n];
            for (d, s) in din_plane.iter_mut().zip(dplane) {
                *d += tap * s;
            }
        }
    }
}

/// Architecture constants: channels 3 -> 16 -> 32 -> num_classes.
const C1: usize = 16;
const C2: usize = 32;

#[derive(Debug, Clone)]
pub struct SegModel {
    num_classes: usize,
    conv1: ConvLayer,
    conv2: ConvLayer,
    head: ConvLayer,
}

/// Cached activations of one forward pass, enough to backpropagate.
pub struct Trace {
    input: Planes,
    a1: Planes,
    a2: Planes,
    /// Pre-softmax logits, interleaved H x W x C.
    pub logits: FeatureMap,
}

/// Parameter gradients, same layout as the model tensors.
#[derive(Debug, Clone)]
pub struct Grads {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub wh: Vec<f64>,
    pub bh: Vec<f64>,
}

impl Grads {
    pub fn zeros_like(model: &SegModel) -> Self {
        Grads {
            w1: vec![0.0; model.conv1.weight.len()],
            b1: vec![0.0; model.conv1.bias.len()],
            w2: vec![0.0; model.conv2.weight.len()],
            b2: vec![0.0; model.conv2.bias.len()],
            wh: vec![0.0; model.head.weight.len()],
            bh: vec![0.0; model.head.bias.len()],
        }
    }

    pub fn add_scaled(&mut self, other: &Grads, scale: f64) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn tensors(&self) -> [&[f64]; 6] {
        [&self.w1, &self.b1, &self.w2, &self.b2, &self.wh, &self.bh]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 6] {
        [
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
            &mut self.wh,
            &mut self.bh,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

impl SegModel {
    /// He-initialized model from a seeded stream.
    pub fn init(num_classes: usize, rng: &mut RngStream) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidParameter("need at least 2 classes".into()));
        }
        Ok(SegModel {
            num_classes,
            conv1: ConvLayer::he_init(3, C1, 3, rng),
            conv2: ConvLayer::he_init(C1, C2, 3, rng),
            head: ConvLayer::he_init(C2, num_classes, 1, rng),
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn parameter_count(&self) -> usize {
        [&self.conv1, &self.conv2, &self.head]
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    /// Inference: pre-softmax logits as an H x W x C feature map.
    pub fn forward(&self, img: &Image) -> Result<FeatureMap> {
        Ok(self.forward_trace(img)?.logits)
    }

    /// Forward pass that keeps the activations needed for [`Self::backward`].
    pub fn forward_trace(&self, img: &Image) -> Result<Trace> {
        if img.channels() != 3 {
            return Err(Error::InvalidParameter("segmentation input must have 3 channels".into()));
        }
        let input = Planes::from_image(img);
        let a1 = conv3_forward(&input, &self.conv1, true);
        let a2 = conv3_forward(&a1, &self.conv2, true);
        let logits = conv1_forward(&a2, &self.head).to_feature_map();
        Ok(Trace { input, a1, a2, logits })
    }

    /// Backpropagates a logits gradient, accumulating into `grads`.
    pub fn backward(&self, trace: &Trace, dlogits: &FeatureMap, grads: &mut Grads) {
        let dlog = Planes::from_feature_map(dlogits);
        let mut da2 = Planes::zeros(C2, trace.a2.height, trace.a2.width);
        conv1_backward(&trace.a2, &self.head, &dlog, &mut grads.wh, &mut grads.bh, &mut da2);

        // ReLU gate: a > 0 iff the pre-activation was positive.
        for (d, a) in da2.data.iter_mut().zip(&trace.a2.data) {
            if *a <= 0.0 {
                *d = 0.0;
            }
        }
        let mut da1 = Planes::zeros(C1, trace.a1.height, trace.a1.width);
        conv3_backward(&trace.a1, &self.conv2, &da2, &mut grads.w2, &mut grads.b2, Some(&mut da1));

        for (d, a) in da1.data.iter_mut().zip(&trace.a1.data) {
            if *a <= 0.0 {
                *d = 0.0;
            }
        }
        conv3_backward(&trace.input, &self.conv1, &da1, &mut grads.w1, &mut grads.b1, None);
    }

    /// Applies `f` to each parameter tensor, identified by the same slot
    /// indices `Grads::tensors` uses; the optimizer and the gradient checks
    /// are built on this.
    pub fn visit_params(&mut self, mut f: impl FnMut(usize, &mut [f64])) {
        f(0, &mut self.conv1.weight);
        f(1, &mut self.conv1.bias);
        f(2, &mut self.conv2.weight);
        f(3, &mut self.conv2.bias);
        f(4, &mut self.head.weight);
        f(5, &mut self.head.bias);
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let c = self.num_classes as u64;
        let tensors = vec![
            Tensor::new("conv1.weight", vec![C1 as u64, 3, 3, 3], self.conv1.weight.clone())?,
            Tensor::new("conv1.bias", vec![C1 as u64], self.conv1.bias.clone())?,
            Tensor::new("conv2.weight", vec![C2 as u64, C1 as u64, 3, 3], self.conv2.weight.clone())?,
            Tensor::new("conv2.bias", vec![C2 as u64], self.conv2.bias.clone())?,
            Tensor::new("head.weight", vec![c, C2 as u64, 1, 1], self.head.weight.clone())?,
            Tensor::new("head.bias", vec![c], self.head.bias.clone())?,
        ];
        write_tensors(path, &tensors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let tensors = read_tensors(path)?;
        let take = |name: &str| -> Result<&Tensor> {
            tensors
                .iter()
                .find(|t| t.name == name)
                .ok_or_else(|| Error::CorruptWeights(format!("missing tensor '{name}'")))
        };
        let head_w = take("head.weight")?;
        if head_w.dims.len() != 4 || head_w.dims[1] != C2 as u64 {
            return Err(Error::CorruptWeights(format!(
                "head.weight dims {:?} do not match the architecture",
                head_w.dims
            )));
        }
        let num_classes = head_w.dims[0] as usize;
        let expect = |t: &Tensor, dims: Vec<u64>| -> Result<Vec<f64>> {
            if t.dims != dims {
                return Err(Error::CorruptWeights(format!(
                    "tensor '{}' dims {:?}, expected {:?}",
                    t.name, t.dims, dims
                )));
            }
            Ok(t.data.clone())
        };
        Ok(SegModel {
            num_classes,
            conv1: ConvLayer {
                in_c: 3,
                out_c: C1,
                weight: expect(take("conv1.weight")?, vec![C1 as u64, 3, 3, 3])?,
                bias: expect(take("conv1.bias")?, vec![C1 as u64])?,
            },
            conv2: ConvLayer {
                in_c: C1,
                out_c: C2,
                weight: expect(take("conv2.weight")?, vec![C2 as u64, C1 as u64, 3, 3])?,
                bias: expect(take("conv2.bias")?, vec![C2 as u64])?,
            },
            head: ConvLayer {
                in_c: C2,
                out_c: num_classes,
                weight: expect(take("head.weight")?, vec![num_classes as u64, C2 as u64, 1, 1])?,
                bias: expect(take("head.bias")?, vec![num_classes as u64])?,
            },
        })
    }

    /// Scales the head weights/bias; test hook for linearity checks.
    #[cfg(test)]
    fn scale_head(&mut self, s: f64) {
        for v in self.head.weight.iter_mut().chain(self.head.bias.iter_mut()) {
            *v *= s;
        }
    }

    #[cfg(test)]
    fn zero_all_weights(&mut self) {
        for l in [&mut self.conv1, &mut self.conv2, &mut self.head] {
            l.weight.fill(0.0);
        }
    }

    #[cfg(test)]
    fn set_head_bias(&mut self, bias: &[f64]) {
        self.head.bias.copy_from_slice(bias);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Range;

    fn random_image(seed: u64, h: usize, w: usize) -> Image {
        let mut rng = RngStream::new(seed);
        Image::from_fn(h, w, 3, Range::Unit, |_, _, _| rng.next_f64()).unwrap()
    }

    #[test]
    fn parameter_count_matches_architecture() {
        let mut rng = RngStream::new(0);
        let m = SegModel::init(4, &mut rng).unwrap();
        // conv1: 16*3*9+16, conv2: 32*16*9+32, head: 4*32+4
        assert_eq!(m.parameter_count(), 448 + 4640 + 132);
    }

    #[test]
    fn forward_preserves_spatial_dims() {
        let mut rng = RngStream::new(1);
        let m = SegModel::init(4, &mut rng).unwrap();
        let img = random_image(2, 17, 23);
        let logits = m.forward(&img).unwrap();
        assert_eq!((logits.height, logits.width, logits.channels), (17, 23, 4));
    }

    #[test]
    fn zero_weights_give_bias_logits() {
        let mut rng = RngStream::new(3);
        let mut m = SegModel::init(4, &mut rng).unwrap();
        m.zero_all_weights();
        m.set_head_bias(&[0.1, -0.2, 0.3, 0.7]);
        let logits = m.forward(&random_image(4, 8, 8)).unwrap();
        for px in logits.data.chunks_exact(4) {
            for (c, v) in px.iter().enumerate() {
                assert!((v - [0.1, -0.2, 0.3, 0.7][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn head_is_linear_in_its_weights() {
        let mut rng = RngStream::new(5);
        let mut m = SegModel::init(4, &mut rng).unwrap();
        let img = random_image(6, 8, 8);
        let before = m.forward(&img).unwrap();
        m.scale_head(2.0);
        let after = m.forward(&img).unwrap();
        for (a, b) in after.data.iter().zip(&before.data) {
            assert!((a - 2.0 * b).abs() < 1e-12, "doubling head params doubles logits");
        }
    }

    /// Naive per-pixel forward oracle, independent loop structure.
    fn naive_forward(m: &SegModel, img: &Image) -> Vec<f64> {
        let (h, w) = (img.height(), img.width());
        let at = |buf: &Vec<Vec<Vec<f64>>>, c: usize, y: isize, x: isize| -> f64 {
            if y < 0 || x < 0 || y >= h as isize || x >= w as isize {
                0.0
            } else {
                buf[c][y as usize][x as usize]
            }
        };
        let mut cur: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|c| (0..h).map(|y| (0..w).map(|x| img.get(y, x, c)).collect()).collect())
            .collect();
        for (layer, relu) in [(&m.conv1, true), (&m.conv2, true)] {
            let mut next = vec![vec![vec![0.0; w]; h]; layer.out_c];
            for oc in 0..layer.out_c {
                for y in 0..h {
                    for x in 0..w {
                        let mut acc = layer.bias[oc];
                        for ic in 0..layer.in_c {
                            for ky in 0..3isize {
                                for kx in 0..3isize {
                                    acc += layer.weight[((oc * layer.in_c + ic) * 3 + ky as usize) * 3 + kx as usize]
                                        * at(&cur, ic, y as isize + ky - 1, x as isize + kx - 1);
                                }
                            }
                        }
                        next[oc][y][x] = if relu { acc.max(0.0) } else { acc };
                    }
                }
            }
            cur = next;
        }
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                for oc in 0..m.head.out_c {
                    let mut acc = m.head.bias[oc];
                    for ic in 0..m.head.in_c {
                        acc += m.head.weight[oc * m.head.in_c + ic] * cur[ic][y][x];
                    }
                    out.push(acc);
                }
            }
        }
        out
    }

    #[test]
    fn forward_matches_naive_oracle() {
        let mut rng = RngStream::new(7);
        let m = SegModel::init(4, &mut rng).unwrap();
        let img = random_image(8, 9, 11);
        let fast = m.forward(&img).unwrap();
        let want = naive_forward(&m, &img);
        for (a, b) in fast.data.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let mut rng = RngStream::new(9);
        let m = SegModel::init(4, &mut rng).unwrap();
        m.save(&path).unwrap();
        let loaded = SegModel::load(&path).unwrap();
        assert_eq!(loaded.num_classes(), 4);
        let img = random_image(10, 8, 8);
        assert_eq!(m.forward(&img).unwrap().data, loaded.forward(&img).unwrap().data);
    }

    #[test]
    fn planes_feature_map_round_trip() {
        let mut rng = RngStream::new(11);
        let img = random_image(12, 5, 6);
        let p = Planes::from_image(&img);
        let f = p.to_feature_map();
        assert_eq!(f.data, img.data());
        let back = Planes::from_feature_map(&f);
        assert_eq!(back.data, p.data);
    }
}
