//! Runs the texture-shift ablation: source-only baseline, +GTR, and the
//! full method (+GTR+LTR+CGL), training on procedural source data and
//! evaluating target mIoU.
//!
//! Usage: `cargo run --release --example ablation [iterations] [seeds]`
//! for example `cargo run --release --example ablation 5000 1,2,3`.

use texrand_core::tcps::{texture_complexity, PaintingRecord, SelectionConfig};
use texrand_core::trainer::{
    evaluate, gen_toy_dataset, generate_painting_candidates, train, Domain, TrainConfig,
};

fn build_pool(k: usize) -> Vec<PaintingRecord> {
    let cfg = SelectionConfig::default();
    let mut pool: Vec<PaintingRecord> = generate_painting_candidates(100, 2024)
        .into_iter()
        .enumerate()
        .filter_map(|(i, image)| {
            let t = texture_complexity(&image, cfg.epsilon).ok()?;
            (cfg.band_min..=cfg.band_max).contains(&t).then(|| PaintingRecord {
                path: format!("candidate_{i:03}").into(),
                image,
                texture_complexity: t,
                accepted: true,
            })
        })
        .collect();
    assert!(pool.len() >= k, "only {} in-band candidates", pool.len());
    pool.truncate(k);
    pool
}

fn benchmark_config(iterations: u64, seed: u64) -> TrainConfig {
    TrainConfig { iterations, lr0: 0.03, seed, ..TrainConfig::default() }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let iterations: u64 = args.get(1).map(|s| s.parse().expect("iterations")).unwrap_or(5000);
    let seeds: Vec<u64> = args
        .get(2)
        .map(|s| s.split(',').map(|x| x.parse().expect("seed")).collect())
        .unwrap_or_else(|| vec![1, 2, 3]);

    let train_data = gen_toy_dataset(Domain::Source, 500, 1000).unwrap();
    let test_data = gen_toy_dataset(Domain::Target, 200, 5000).unwrap();
    let source_holdout = gen_toy_dataset(Domain::Source, 100, 9000).unwrap();
    let pool = build_pool(15);

    let configs: [(&str, bool, bool, bool); 4] = [
        ("baseline", false, false, false),
        ("+GTR", true, false, false),
        ("+GTR+LTR", true, true, false),
        ("+GTR+LTR+CGL", true, true, true),
    ];
    println!("{:<14} {:>6} {:>10} {:>10}  per-seed target", "config", "seeds", "src mIoU", "tgt mIoU");
    for (name, gtr, ltr, cgl) in configs {
        let mut tgt = Vec::new();
        let mut src = Vec::new();
        for &seed in &seeds {
            let cfg = TrainConfig { gtr, ltr, cgl, ..benchmark_config(iterations, seed) };
            let out = train(&cfg, &pool, &train_data).unwrap();
            tgt.push(evaluate(&out.model, &test_data).unwrap().mean);
            src.push(evaluate(&out.model, &source_holdout).unwrap().mean);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!(
            "{:<14} {:>6} {:>10.1} {:>10.1}  {:?}",
            name,
            seeds.len(),
            100.0 * mean(&src),
            100.0 * mean(&tgt),
            tgt.iter().map(|v| (v * 1000.0).round() / 10.0).collect::<Vec<_>>()
        );
    }
}
