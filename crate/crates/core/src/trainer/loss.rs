//! Training losses: per-pixel weighted cross entropy, the L1 consistency
//! term between the stylized streams, and their combination
//! `(1 - beta) * L_seg + beta * L_con` with gradients through every stream.

use crate::error::{Error, Result};
use crate::gtr::FeatureMap;
use crate::trainer::model::{Grads, SegModel, Trace};
use crate::trainer::TrainConfig;

/// Per-pixel class ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub height: usize,
    pub width: usize,
    pub ids: Vec<u8>,
}

impl LabelMap {
    pub fn new(height: usize, width: usize, ids: Vec<u8>) -> Result<Self> {
        if ids.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "label length {} != {height}x{width}",
                ids.len()
            )));
        }
        Ok(LabelMap { height, width, ids })
    }

    pub fn flip_horizontal(&self) -> LabelMap {
        let mut ids = vec![0; self.ids.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                ids[y * self.width + x] = self.ids[y * self.width + (self.width - 1 - x)];
            }
        }
        LabelMap { height: self.height, width: self.width, ids }
    }
}

/// Mean over pixels of `w[y] * (-log softmax(logits)[y])`, log-sum-exp
/// stabilized, with the gradient w.r.t. the logits.
pub fn weighted_ce(
    logits: &FeatureMap,
    label: &LabelMap,
    class_weights: &[f64],
) -> Result<(f64, FeatureMap)> {
    let c = logits.channels;
    if label.height != logits.height || label.width != logits.width {
        return Err(Error::ShapeMismatch("label and logits spatial dims differ".into()));
    }
    if class_weights.len() != c {
        return Err(Error::ShapeMismatch(format!(
            "{} class weights for {c} classes",
            class_weights.len()
        )));
    }
    if class_weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidParameter("class weights must be positive".into()));
    }
    let n = (logits.height * logits.width) as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; logits.data.len()];
    for (px, (lg, y)) in logits.data.chunks_exact(c).zip(&label.ids).enumerate() {
        let y = *y as usize;
        if y >= c {
            return Err(Error::InvalidParameter(format!(
                "label id {y} outside {c} classes"
            )));
        }
        let max = lg.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = lg.iter().map(|v| (v - max).exp()).sum();
        let lse = sum.ln() + max;
        let w = class_weights[y];
        loss += w * (lse - lg[y]);
        let g = &mut grad[px * c..(px + 1) * c];
        for (k, v) in lg.iter().enumerate() {
            let softmax = (v - max).exp() / sum;
            g[k] = w * (softmax - if k == y { 1.0 } else { 0.0 }) / n;
        }
    }
    Ok((loss / n, FeatureMap::new(logits.height, logits.width, c, grad)?))
}

/// Mean absolute difference between two equally-shaped feature maps, with
/// gradients for both arguments. The subgradient at exact ties is zero.
pub fn cgl_loss(a: &FeatureMap, b: &FeatureMap) -> Result<(f64, FeatureMap, FeatureMap)> {
    if a.height != b.height || a.width != b.width || a.channels != b.channels {
        return Err(Error::ShapeMismatch("consistency features must have equal shapes".into()));
    }
    let n = a.data.len() as f64;
    let mut loss = 0.0;
    let mut da = vec![0.0; a.data.len()];
    let mut db = vec![0.0; b.data.len()];
    for (i, (x, y)) in a.data.iter().zip(&b.data).enumerate() {
        let d = x - y;
        loss += d.abs();
        let s = if d > 0.0 {
            1.0
        } else if d < 0.0 {
            -1.0
        } else {
            0.0
        };
        da[i] = s / n;
        db[i] = -s / n;
    }
    Ok((
        loss / n,
        FeatureMap::new(a.height, a.width, a.channels, da)?,
        FeatureMap::new(b.height, b.width, b.channels, db)?,
    ))
}

/// The three forwarded streams of one sample. `gtr`/`ltr` are optional so
/// ablation configurations reuse the same loss path.
pub struct StreamSet<'a> {
    pub raw: &'a Trace,
    pub gtr: Option<&'a Trace>,
    pub ltr: Option<&'a Trace>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LossBreakdown {
    pub total: f64,
    pub seg: f64,
    pub con: f64,
}

/// Combined objective over the forwarded streams:
/// `(1 - beta) * (sum of per-stream weighted CE) + beta * L1(gtr, ltr)`,
/// with parameter gradients accumulated across the shared-weight streams.
///
/// The consistency term is active only when both stylized streams exist and
/// `cfg.cgl` is set; it compares the pre-softmax logits.
pub fn total_loss(
    model: &SegModel,
    streams: &StreamSet,
    label: &LabelMap,
    cfg: &TrainConfig,
) -> Result<(LossBreakdown, Grads)> {
    let beta = cfg.beta;
    let mut grads = Grads::zeros_like(model);
    let mut seg = 0.0;

    let mut backprop = |trace: &Trace, mut dlogits: FeatureMap, extra: Option<&FeatureMap>| {
        if let Some(e) = extra {
            for (d, x) in dlogits.data.iter_mut().zip(&e.data) {
                *d += x;
            }
        }
        model.backward(trace, &dlogits, &mut grads);
    };

    // Raw stream.
    let (l_raw, mut d_raw) = weighted_ce(&streams.raw.logits, label, &cfg.class_weights)?;
    seg += l_raw;
    for v in &mut d_raw.data {
        *v *= 1.0 - beta;
    }
    backprop(streams.raw, d_raw, None);

    // Consistency gradients are computed before the stylized streams are
    // backpropagated so each stream's logits gradient is assembled once.
    let mut con = 0.0;
    let mut d_con: Option<(FeatureMap, FeatureMap)> = None;
    if cfg.cgl {
        if let (Some(g), Some(l)) = (streams.gtr, streams.ltr) {
            let (c, mut dg, mut dl) = cgl_loss(&g.logits, &l.logits)?;
            con = c;
            for v in dg.data.iter_mut().chain(dl.data.iter_mut()) {
                *v *= beta;
            }
            d_con = Some((dg, dl));
        }
    }
    let (d_con_g, d_con_l) = match &d_con {
        Some((g, l)) => (Some(g), Some(l)),
        None => (None, None),
    };

    if let Some(trace) = streams.gtr {
        let (l, mut d) = weighted_ce(&trace.logits, label, &cfg.class_weights)?;
        seg += l;
        for v in &mut d.data {
            *v *= 1.0 - beta;
        }
        backprop(trace, d, d_con_g);
    }
    if let Some(trace) = streams.ltr {
        let (l, mut d) = weighted_ce(&trace.logits, label, &cfg.class_weights)?;
        seg += l;
        for v in &mut d.data {
            *v *= 1.0 - beta;
        }
        backprop(trace, d, d_con_l);
    }

    let total = (1.0 - beta) * seg + beta * con;
    Ok((LossBreakdown { total, seg, con }, grads))
}
