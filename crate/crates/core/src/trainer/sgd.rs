//! SGD with momentum, decoupled-from-nothing weight decay (decay joins the
//! gradient before the momentum update) and the poly learning-rate schedule.

use crate::trainer::model::{Grads, SegModel};
use crate::trainer::TrainConfig;

/// `lr0 * (1 - t/T)^power`, strictly decreasing in `t` for positive `lr0`.
pub fn poly_lr(lr0: f64, power: f64, iteration: u64, total: u64) -> f64 {
    let t = iteration.min(total) as f64 / total as f64;
    lr0 * (1.0 - t).powf(power)
}

/// Momentum buffers, one per parameter tensor.
pub struct SgdState {
    velocity: Vec<Vec<f64>>,
}

impl SgdState {
    pub fn new(model: &SegModel) -> Self {
        let grads = Grads::zeros_like(model);
        SgdState { velocity: grads.tensors().iter().map(|t| vec![0.0; t.len()]).collect() }
    }
}

/// One update: `v = momentum*v + g + weight_decay*param; param -= lr*v`.
pub fn sgd_step(
    model: &mut SegModel,
    state: &mut SgdState,
    grads: &Grads,
    iteration: u64,
    cfg: &TrainConfig,
) {
    let lr = poly_lr(cfg.lr0, cfg.poly_power, iteration, cfg.iterations);
    let tensors = grads.tensors();
    model.visit_params(|slot, params| {
        let v = &mut state.velocity[slot];
        let g = tensors[slot];
        for i in 0..params.len() {
            v[i] = cfg.momentum * v[i] + g[i] + cfg.weight_decay * params[i];
            params[i] -= lr * v[i];
        }
    });
}
