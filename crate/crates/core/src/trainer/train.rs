//! The training loop: three-stream augmentation wiring, loss, SGD updates,
//! and evaluation helpers.

use crate::error::{Error, Result};
use crate::gtr::{gtr_stylize, Codec};
use crate::image::Image;
use crate::kernel::gaussian_blur;
use crate::ltr::{generate_mask, mix};
use crate::tcps::{sample_painting, PaintingRecord};
use crate::trainer::loss::{total_loss, LabelMap, StreamSet};
use crate::trainer::metrics::{ConfusionMatrix, IouReport};
use crate::trainer::model::{Grads, SegModel};
use crate::trainer::sgd::{poly_lr, sgd_step, SgdState};
use crate::trainer::toydata::ToySample;
use crate::trainer::TrainConfig;

/// One CSV log record, emitted every hundred iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub iter: u64,
    pub lr: f64,
    pub l_seg: f64,
    pub l_con: f64,
}

impl LogEntry {
    pub fn csv_header() -> &'static str {
        "iter,lr,l_seg,l_con"
    }

    pub fn to_csv(&self) -> String {
        format!("{},{:.12e},{:.12e},{:.12e}", self.iter, self.lr, self.l_seg, self.l_con)
    }
}

pub struct TrainOutput {
    pub model: SegModel,
    pub log: Vec<LogEntry>,
}

/// Nudges near-constant channels so AdaIN's normalization stays defined;
/// draws from the augmentation stream, so it is deterministic.
fn dither_if_flat(img: &Image, rng: &mut crate::rng::RngStream) -> Result<Image> {
    let (_, stds) = img.channel_stats()?;
    if stds.iter().all(|&s| s > 1e-7) {
        return Ok(img.clone());
    }
    let mut out = img.clone();
    for v in out.data_mut() {
        *v = (*v + rng.uniform(-0.004, 0.004)).clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Trains the toy segmentation network.
///
/// Seed derivation from `cfg.seed`: child 0 initializes weights, child 1
/// draws batches, child 2 samples paintings, child 3 feeds every stochastic
/// augmentation (masks, mirror/blur coins, dither). Single-threaded and
/// bitwise reproducible for a fixed configuration.
pub fn train(cfg: &TrainConfig, pool: &[PaintingRecord], data: &[ToySample]) -> Result<TrainOutput> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidParameter("training set is empty".into()));
    }
    let needs_style = cfg.gtr || cfg.ltr;
    if needs_style && pool.is_empty() {
        return Err(Error::EmptyPool);
    }

    let mut init_stream = crate::rng::RngStream::new(crate::rng::child_seed(cfg.seed, 0));
    let mut batch_stream = crate::rng::RngStream::new(crate::rng::child_seed(cfg.seed, 1));
    let mut painting_stream = crate::rng::RngStream::new(crate::rng::child_seed(cfg.seed, 2));
    let mut aug_stream = crate::rng::RngStream::new(crate::rng::child_seed(cfg.seed, 3));

    let mut model = SegModel::init(cfg.num_classes, &mut init_stream)?;
    let mut state = SgdState::new(&model);
    let codec = Codec::Identity;
    let mut log = Vec::new();

    for t in 0..cfg.iterations {
        // One painting per iteration, shared by the batch.
        let painting = if needs_style {
            Some(&sample_painting(pool, &mut painting_stream)?.image)
        } else {
            None
        };

        let mut grads = Grads::zeros_like(&model);
        let mut seg_sum = 0.0;
        let mut con_sum = 0.0;
        let inv_batch = 1.0 / cfg.batch_size as f64;

        for _ in 0..cfg.batch_size {
            let idx = batch_stream.below(data.len() as u64) as usize;
            let sample = &data[idx];
            let (img, label) = preprocess(sample, cfg, &mut aug_stream)?;

            let stylized = match painting {
                Some(p) => {
                    let content = dither_if_flat(&img, &mut aug_stream)?;
                    Some(gtr_stylize(&content, p, &codec)?)
                }
                None => None,
            };
            let ltr_img = if cfg.ltr {
                let stylized = stylized.as_ref().expect("ltr requires a stylized image");
                let mask = generate_mask(img.height(), img.width(), &cfg.ltr_cfg, &mut aug_stream)?;
                Some(mix(&img, stylized, &mask)?)
            } else {
                None
            };

            let trace_raw = model.forward_trace(&img)?;
            let trace_gtr = match (&stylized, cfg.gtr) {
                (Some(s), true) => Some(model.forward_trace(s)?),
                _ => None,
            };
            let trace_ltr = match &ltr_img {
                Some(l) => Some(model.forward_trace(l)?),
                None => None,
            };

            let streams = StreamSet {
                raw: &trace_raw,
                gtr: trace_gtr.as_ref(),
                ltr: trace_ltr.as_ref(),
            };
            let (breakdown, sample_grads) = total_loss(&model, &streams, &label, cfg)?;
            if !breakdown.total.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite loss at iteration {t}: seg {} con {}",
                    breakdown.seg, breakdown.con
                )));
            }
            grads.add_scaled(&sample_grads, inv_batch);
            seg_sum += breakdown.seg * inv_batch;
            con_sum += breakdown.con * inv_batch;
        }

        if !grads.is_finite() {
            return Err(Error::Numerical(format!("non-finite gradients at iteration {t}")));
        }
        sgd_step(&mut model, &mut state, &grads, t, cfg);

        if t % 100 == 0 {
            log.push(LogEntry {
                iter: t,
                lr: poly_lr(cfg.lr0, cfg.poly_power, t, cfg.iterations),
                l_seg: seg_sum,
                l_con: con_sum,
            });
        }
    }
    Ok(TrainOutput { model, log })
}

/// Optional mirror/blur preprocessing (both off by default).
fn preprocess(
    sample: &ToySample,
    cfg: &TrainConfig,
    aug: &mut crate::rng::RngStream,
) -> Result<(Image, LabelMap)> {
    let mut img = sample.image.clone();
    let mut label = sample.label.clone();
    if cfg.mirror && aug.next_f64() < 0.5 {
        img = img.flip_horizontal();
        label = label.flip_horizontal();
    }
    if cfg.blur && aug.next_f64() < 0.5 {
        let radius = aug.uniform(0.0, 1.0);
        if radius > 1e-3 {
            img = gaussian_blur(&img, radius, ((3.0 * radius).ceil() as usize).max(1))?;
        }
    }
    Ok((img, label))
}

/// Argmax class prediction.
pub fn predict_labels(model: &SegModel, img: &Image) -> Result<LabelMap> {
    let logits = model.forward(img)?;
    let c = logits.channels;
    let ids = logits
        .data
        .chunks_exact(c)
        .map(|px| {
            let mut best = 0usize;
            for k in 1..c {
                if px[k] > px[best] {
                    best = k;
                }
            }
            best as u8
        })
        .collect();
    LabelMap::new(logits.height, logits.width, ids)
}

/// Dataset-level mIoU of a model.
pub fn evaluate(model: &SegModel, samples: &[ToySample]) -> Result<IouReport> {
    let mut cm = ConfusionMatrix::new(model.num_classes());
    for s in samples {
        let pred = predict_labels(model, &s.image)?;
        cm.add(&pred, &s.label)?;
    }
    cm.iou()
}
