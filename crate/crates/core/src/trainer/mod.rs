//! Toy segmentation trainer: network, losses, optimizer, metrics, the
//! procedural benchmark data, and the training loop wiring them together.

pub mod loss;
pub mod metrics;
pub mod model;
pub mod paintings;
pub mod sgd;
pub mod toydata;
pub mod train;

pub use loss::{cgl_loss, total_loss, weighted_ce, LabelMap, LossBreakdown, StreamSet};
pub use metrics::{miou, ConfusionMatrix, IouReport};
pub use model::{Grads, SegModel, Trace};
pub use paintings::generate_painting_candidates;
pub use sgd::{poly_lr, sgd_step, SgdState};
pub use toydata::{gen_toy_dataset, Domain, ToySample, TOY_CLASSES, TOY_SIZE};
pub use train::{evaluate, predict_labels, train, LogEntry, TrainOutput};

use crate::error::{Error, Result};
use crate::ltr::LtrConfig;

/// Every knob of the training objective and schedule.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Consistency trade-off in `(1-beta)*L_seg + beta*L_con`.
    pub beta: f64,
    pub class_weights: Vec<f64>,
    pub lr0: f64,
    pub poly_power: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub iterations: u64,
    pub batch_size: usize,
    pub seed: u64,
    pub num_classes: usize,
    /// Stream toggles.
    pub gtr: bool,
    pub ltr: bool,
    pub cgl: bool,
    /// Preprocessing toggles (50% trigger probability each).
    pub mirror: bool,
    pub blur: bool,
    pub ltr_cfg: LtrConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            beta: 1e-5,
            class_weights: vec![1.0; 4],
            lr0: 1e-5,
            poly_power: 0.9,
            momentum: 0.9,
            weight_decay: 5e-4,
            iterations: 200_000,
            batch_size: 2,
            seed: 0,
            num_classes: 4,
            gtr: false,
            ltr: false,
            cgl: false,
            mirror: false,
            blur: false,
            ltr_cfg: LtrConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if self.class_weights.len() != self.num_classes {
            return Err(Error::InvalidParameter(format!(
                "{} class weights for {} classes",
                self.class_weights.len(),
                self.num_classes
            )));
        }
        if self.class_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("class weights must be positive".into()));
        }
        if self.batch_size == 0 || self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "batch size and iteration count must be positive".into(),
            ));
        }
        if self.cgl && !(self.gtr && self.ltr) {
            return Err(Error::InvalidParameter(
                "the consistency loss needs both the gtr and ltr streams enabled".into(),
            ));
        }
        self.ltr_cfg.validate()
    }
}
