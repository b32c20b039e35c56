//! Flat `key=value` training configuration files.
//!
//! Lines are `key = value` (whitespace optional); `#` starts a comment.
//! Unknown keys are rejected so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use texrand_core::trainer::TrainConfig;

/// Dataset parameters that live alongside the optimizer settings.
#[derive(Debug, Clone)]
pub struct DataSpec {
    pub train_samples: usize,
    pub data_seed: u64,
}

pub fn load_train_config(path: &Path) -> Result<(TrainConfig, DataSpec)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    parse_train_config(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn parse_train_config(text: &str) -> Result<(TrainConfig, DataSpec)> {
    let mut kv = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key = value, got '{raw}'", lineno + 1);
        };
        if kv.insert(key.trim().to_string(), value.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{}'", lineno + 1, key.trim());
        }
    }

    let mut cfg = TrainConfig::default();
    let mut data = DataSpec { train_samples: 500, data_seed: 1 };
    for (key, value) in &kv {
        let v = value.as_str();
        match key.as_str() {
            "beta" => cfg.beta = parse(key, v)?,
            "class_weights" => {
                cfg.class_weights = v
                    .split(',')
                    .map(|w| w.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .with_context(|| format!("key class_weights: '{v}'"))?;
            }
            "lr0" => cfg.lr0 = parse(key, v)?,
            "poly_power" => cfg.poly_power = parse(key, v)?,
            "momentum" => cfg.momentum = parse(key, v)?,
            "weight_decay" => cfg.weight_decay = parse(key, v)?,
            "iterations" => cfg.iterations = parse(key, v)?,
            "batch_size" => cfg.batch_size = parse(key, v)?,
            "seed" => cfg.seed = parse(key, v)?,
            "num_classes" => cfg.num_classes = parse(key, v)?,
            "gtr" => cfg.gtr = parse_bool(key, v)?,
            "ltr" => cfg.ltr = parse_bool(key, v)?,
            "cgl" => cfg.cgl = parse_bool(key, v)?,
            "mirror" => cfg.mirror = parse_bool(key, v)?,
            "blur" => cfg.blur = parse_bool(key, v)?,
            "lambda_min" => cfg.ltr_cfg.lambda_min = parse(key, v)?,
            "lambda_max" => cfg.ltr_cfg.lambda_max = parse(key, v)?,
            "p" => cfg.ltr_cfg.p = parse(key, v)?,
            "log_base" => cfg.ltr_cfg.log_base = parse(key, v)?,
            "train_samples" => data.train_samples = parse(key, v)?,
            "data_seed" => data.data_seed = parse(key, v)?,
            other => bail!("unknown config key '{other}'"),
        }
    }
    // Uniform weights track a non-default class count automatically.
    if !kv.contains_key("class_weights") && cfg.class_weights.len() != cfg.num_classes {
        cfg.class_weights = vec![1.0; cfg.num_classes];
    }
    Ok((cfg, data))
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.parse::<T>().with_context(|| format!("key {key}: cannot parse '{v}'"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "on" | "yes" => Ok(true),
        "false" | "0" | "off" | "no" => Ok(false),
        other => bail!("key {key}: expected a boolean, got '{other}'"),
    }
}
