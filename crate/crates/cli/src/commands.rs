//! Subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use texrand_core::gtr::{gtr_stylize, Codec, CodecWeights};
use texrand_core::image::Image;
use texrand_core::io::{read_image, write_image};
use texrand_core::ltr::{generate_mask_seeded, mix, LtrConfig, Mask};
use texrand_core::rng::child_seed;
use texrand_core::tcps::{
    select_paintings, texture_complexity, PaintingRecord, SelectionConfig,
};
use texrand_core::trainer::{
    evaluate, gen_toy_dataset, generate_painting_candidates, train as run_train, Domain, LogEntry,
    SegModel,
};

use crate::config::load_train_config;
use crate::output::{note, Report};
use crate::Global;

/// One pool manifest entry, as written by `tcps select`.
#[derive(Serialize, Deserialize)]
struct PoolEntry {
    path: PathBuf,
    texture_complexity: f64,
}

fn write_pool_manifest(path: &Path, pool: &[PaintingRecord]) -> Result<()> {
    let entries: Vec<PoolEntry> = pool
        .iter()
        .map(|r| PoolEntry { path: r.path.clone(), texture_complexity: r.texture_complexity })
        .collect();
    std::fs::write(path, serde_json::to_string_pretty(&entries)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_pool_manifest(path: &Path) -> Result<Vec<PaintingRecord>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading pool manifest {}", path.display()))?;
    let entries: Vec<PoolEntry> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if entries.is_empty() {
        return Err(anyhow!(texrand_core::Error::EmptyPool));
    }
    entries
        .into_iter()
        .map(|e| {
            let image = read_image(&e.path)?;
            Ok(PaintingRecord {
                path: e.path,
                image,
                texture_complexity: e.texture_complexity,
                accepted: true,
            })
        })
        .collect()
}

fn parse_band(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("band must look like 0.55:0.65, got '{s}'"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| anyhow!("size must look like 640x640, got '{s}'"))?;
    Ok((w.trim().parse()?, h.trim().parse()?))
}

// ---------------------------------------------------------------- tcps score

#[derive(Args)]
pub struct ScoreArgs {
    /// Image to score.
    image: PathBuf,
    /// Gradient-magnitude threshold on the byte scale.
    #[arg(long, default_value_t = 20.0)]
    epsilon: f64,
}

pub fn score(args: &ScoreArgs, _global: Global) -> Result<Report> {
    let img = read_image(&args.image)?;
    let t = texture_complexity(&img, args.epsilon)?;
    Ok(Report::ok(
        json!({
            "path": args.image,
            "epsilon": args.epsilon,
            "texture_complexity": t,
        }),
        vec![format!("{t:.4}")],
    ))
}

// --------------------------------------------------------------- tcps select

#[derive(Args)]
pub struct SelectArgs {
    /// Directory of candidate paintings (png/ppm/pgm).
    #[arg(long)]
    dir: PathBuf,
    /// Pool size.
    #[arg(long, default_value_t = 15)]
    k: usize,
    /// Complexity band, inclusive, as min:max.
    #[arg(long, default_value = "0.55:0.65")]
    band: String,
    /// Gradient threshold.
    #[arg(long, default_value_t = 20.0)]
    epsilon: f64,
    /// Output manifest path.
    #[arg(long)]
    out: PathBuf,
}

pub fn select(args: &SelectArgs, global: Global) -> Result<Report> {
    let (band_min, band_max) = parse_band(&args.band)?;
    let cfg = SelectionConfig {
        epsilon: args.epsilon,
        band_min,
        band_max,
        k: args.k,
        seed: global.seed,
    };
    let pool = select_paintings(&args.dir, &cfg)?;
    write_pool_manifest(&args.out, &pool)?;
    note(global, format!("selected {} paintings into {}", pool.len(), args.out.display()));
    let mut lines: Vec<String> = pool
        .iter()
        .map(|r| format!("{:.4}  {}", r.texture_complexity, r.path.display()))
        .collect();
    lines.push(format!("wrote {}", args.out.display()));
    Ok(Report::ok(
        json!({
            "k": args.k,
            "band": [band_min, band_max],
            "seed": global.seed,
            "out": args.out,
            "pool": pool.iter().map(|r| json!({
                "path": r.path,
                "texture_complexity": r.texture_complexity,
            })).collect::<Vec<_>>(),
        }),
        lines,
    ))
}

// ----------------------------------------------------------------------- gtr

#[derive(Args)]
pub struct GtrArgs {
    /// Content image.
    #[arg(long)]
    content: PathBuf,
    /// Style image.
    #[arg(long)]
    style: PathBuf,
    /// Codec backend.
    #[arg(long, default_value = "identity", value_parser = ["identity", "conv"])]
    backend: String,
    /// TXRW weights file, required by the conv backend.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Output image path.
    #[arg(long)]
    out: PathBuf,
}

fn make_codec(backend: &str, weights: Option<&Path>) -> Result<Codec> {
    match backend {
        "identity" => Ok(Codec::Identity),
        "conv" => {
            let path = weights.ok_or_else(|| {
                anyhow!(texrand_core::Error::InvalidParameter(
                    "the conv backend needs --weights".into()
                ))
            })?;
            Ok(Codec::Conv(Box::new(CodecWeights::load(path)?)))
        }
        other => bail!("unknown backend '{other}'"),
    }
}

pub fn gtr(args: &GtrArgs, _global: Global) -> Result<Report> {
    let content = read_image(&args.content)?;
    let style = read_image(&args.style)?;
    let codec = make_codec(&args.backend, args.weights.as_deref())?;
    let out = gtr_stylize(&content, &style, &codec)?;
    write_image(&args.out, &out)?;
    Ok(Report::ok(
        json!({
            "content": args.content,
            "style": args.style,
            "backend": args.backend,
            "out": args.out,
        }),
        vec![format!("wrote {}", args.out.display())],
    ))
}

// ------------------------------------------------------------------ ltr mask

#[derive(Args)]
pub struct MaskArgs {
    /// Mask size as WxH.
    #[arg(long)]
    size: String,
    /// Fixed lambda (mutually exclusive with --lambda-range).
    #[arg(long, conflicts_with = "lambda_range")]
    lambda: Option<f64>,
    /// Lambda range as min:max.
    #[arg(long)]
    lambda_range: Option<String>,
    /// Target white proportion.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Base of the lambda-to-bandwidth logarithm.
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
    /// Override the smoothing kernel radius (default: ceil(3*gamma)).
    #[arg(long)]
    kernel_radius: Option<usize>,
    /// Output PNG (0/255).
    #[arg(long)]
    out: PathBuf,
}

pub fn mask(args: &MaskArgs, global: Global) -> Result<Report> {
    let (w, h) = parse_size(&args.size)?;
    let (lambda_min, lambda_max) = match (&args.lambda, &args.lambda_range) {
        (Some(l), None) => (*l, *l),
        (None, Some(range)) => parse_band(range)?,
        (None, None) => (4.0, 16.0),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let cfg = LtrConfig {
        lambda_min,
        lambda_max,
        p: args.p,
        log_base: args.log_base,
        kernel_radius: args.kernel_radius,
    };
    let mask = generate_mask_seeded(h, w, &cfg, global.seed)?;
    write_image(&args.out, &mask.to_image())?;
    let prov = mask.provenance.expect("generated masks carry provenance");
    Ok(Report::ok(
        json!({
            "out": args.out,
            "width": w,
            "height": h,
            "lambda": prov.lambda_used,
            "p": prov.p,
            "seed": prov.seed,
            "white_fraction": mask.white_fraction(),
        }),
        vec![format!(
            "wrote {} (lambda {:.3}, white fraction {:.4})",
            args.out.display(),
            prov.lambda_used,
            mask.white_fraction()
        )],
    ))
}

// ----------------------------------------------------------------- ltr apply

#[derive(Args)]
pub struct ApplyArgs {
    /// Raw content image.
    #[arg(long)]
    content: PathBuf,
    /// Stylized image of the same size.
    #[arg(long)]
    stylized: PathBuf,
    /// Mask file; values at or above half range select the stylized pixel.
    #[arg(long)]
    mask: PathBuf,
    /// Output image path.
    #[arg(long)]
    out: PathBuf,
}

pub fn apply(args: &ApplyArgs, _global: Global) -> Result<Report> {
    let content = read_image(&args.content)?;
    let stylized = read_image(&args.stylized)?;
    let mask = Mask::from_image(&read_image(&args.mask)?)?;
    let out = mix(&content, &stylized, &mask)?;
    write_image(&args.out, &out)?;
    Ok(Report::ok(
        json!({ "out": args.out }),
        vec![format!("wrote {}", args.out.display())],
    ))
}

// ------------------------------------------------------------------- dataset

#[derive(Args)]
pub struct DatasetArgs {
    /// What to generate: a toy segmentation domain or painting candidates.
    #[arg(long, value_parser = ["source", "target", "paintings"])]
    kind: String,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

pub fn dataset(args: &DatasetArgs, global: Global) -> Result<Report> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut files = Vec::new();
    if args.kind == "paintings" {
        for (i, img) in generate_painting_candidates(args.n, global.seed).iter().enumerate() {
            let path = args.out.join(format!("painting_{i:04}.png"));
            write_image(&path, img)?;
            files.push(path);
        }
    } else {
        let domain: Domain = args.kind.parse()?;
        for (i, sample) in gen_toy_dataset(domain, args.n, global.seed)?.iter().enumerate() {
            let img_path = args.out.join(format!("{i:04}.png"));
            write_image(&img_path, &sample.image)?;
            let label_img = Image::new(
                sample.label.height,
                sample.label.width,
                1,
                texrand_core::Range::Byte,
                sample.label.ids.iter().map(|&v| v as f64).collect(),
            )
            .map_err(anyhow::Error::from)?;
            let label_path = args.out.join(format!("{i:04}.labels.pgm"));
            write_image(&label_path, &label_img)?;
            files.push(img_path);
        }
    }
    note(global, format!("wrote {} files under {}", files.len(), args.out.display()));
    Ok(Report::ok(
        json!({
            "kind": args.kind,
            "n": args.n,
            "seed": global.seed,
            "out": args.out,
            "count": files.len(),
        }),
        vec![format!("wrote {} {} samples to {}", args.n, args.kind, args.out.display())],
    ))
}

// --------------------------------------------------------------------- train

#[derive(Args)]
pub struct TrainArgs {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Painting pool manifest (required when gtr/ltr streams are on).
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Output model path (TXRW).
    #[arg(long)]
    out: PathBuf,
    /// Output CSV log path.
    #[arg(long)]
    log: PathBuf,
    /// Override the configured iteration count.
    #[arg(long)]
    iterations: Option<u64>,
    /// Override the configured seed (flags win over the file).
    #[arg(long)]
    train_seed: Option<u64>,
}

pub fn train(args: &TrainArgs, global: Global) -> Result<Report> {
    let (mut cfg, data_spec) = load_train_config(&args.config)?;
    if let Some(it) = args.iterations {
        cfg.iterations = it;
    }
    if let Some(seed) = args.train_seed {
        cfg.seed = seed;
    }
    let pool = match &args.pool {
        Some(path) => load_pool_manifest(path)?,
        None => Vec::new(),
    };
    let data = gen_toy_dataset(Domain::Source, data_spec.train_samples, data_spec.data_seed)?;
    note(
        global,
        format!(
            "training {} iterations on {} samples (gtr={}, ltr={}, cgl={})",
            cfg.iterations, data.len(), cfg.gtr, cfg.ltr, cfg.cgl
        ),
    );
    let out = run_train(&cfg, &pool, &data)?;
    out.model.save(&args.out)?;
    let mut csv = String::from(LogEntry::csv_header());
    for entry in &out.log {
        csv.push('\n');
        csv.push_str(&entry.to_csv());
    }
    csv.push('\n');
    std::fs::write(&args.log, csv).with_context(|| format!("writing {}", args.log.display()))?;
    let last = out.log.last();
    Ok(Report::ok(
        json!({
            "model": args.out,
            "log": args.log,
            "iterations": cfg.iterations,
            "final_l_seg": last.map(|e| e.l_seg),
            "final_l_con": last.map(|e| e.l_con),
        }),
        vec![format!(
            "trained {} iterations; model {}, log {}",
            cfg.iterations,
            args.out.display(),
            args.log.display()
        )],
    ))
}

// ---------------------------------------------------------------------- eval

#[derive(Args)]
pub struct EvalArgs {
    /// Trained model (TXRW).
    #[arg(long)]
    model: PathBuf,
    /// Domain to evaluate on.
    #[arg(long, value_parser = ["source", "target"])]
    dataset: String,
    /// Number of evaluation samples.
    #[arg(long, default_value_t = 200)]
    n: usize,
}

const CLASS_NAMES: [&str; 4] = ["background", "circle", "rectangle", "triangle"];

pub fn eval(args: &EvalArgs, global: Global) -> Result<Report> {
    let model = SegModel::load(&args.model)?;
    let domain: Domain = args.dataset.parse()?;
    let samples = gen_toy_dataset(domain, args.n, global.seed)?;
    let report = evaluate(&model, &samples)?;
    let mut lines = Vec::new();
    let mut per_class = Vec::new();
    for (k, iou) in report.per_class.iter().enumerate() {
        let name = CLASS_NAMES.get(k).copied().unwrap_or("class");
        match iou {
            Some(v) => {
                lines.push(format!("iou[{k}] {name:<10} {v:.4}"));
                per_class.push(json!({ "class": k, "name": name, "iou": v }));
            }
            None => {
                lines.push(format!("iou[{k}] {name:<10} absent"));
                per_class.push(json!({ "class": k, "name": name, "iou": null }));
            }
        }
    }
    lines.push(format!("mIoU {:.4}", report.mean));
    Ok(Report::ok(
        json!({
            "model": args.model,
            "dataset": args.dataset,
            "n": args.n,
            "seed": global.seed,
            "per_class": per_class,
            "miou": report.mean,
        }),
        lines,
    ))
}

// ------------------------------------------------------------------- augment

#[derive(Args)]
pub struct AugmentArgs {
    /// Directory of input images.
    #[arg(long)]
    in_dir: PathBuf,
    /// Painting pool manifest.
    #[arg(long)]
    pool: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
    /// Lambda range as min:max.
    #[arg(long, default_value = "4:16")]
    lambda_range: String,
    /// Target white (stylized) proportion of the masks.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

#[derive(Serialize)]
struct AugmentEntry {
    input: PathBuf,
    gtr: PathBuf,
    ltr: PathBuf,
    mask: PathBuf,
    painting: PathBuf,
    seed: u64,
    lambda: f64,
    p: f64,
}

pub fn augment(args: &AugmentArgs, global: Global) -> Result<Report> {
    let pool = load_pool_manifest(&args.pool)?;
    let (lambda_min, lambda_max) = parse_band(&args.lambda_range)?;
    let ltr_cfg = LtrConfig { lambda_min, lambda_max, p: args.p, ..LtrConfig::default() };
    ltr_cfg.validate()?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let mut inputs: Vec<PathBuf> = std::fs::read_dir(&args.in_dir)
        .with_context(|| format!("reading {}", args.in_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
                Some("png" | "ppm" | "pgm")
            )
        })
        .collect();
    inputs.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let codec = Codec::Identity;
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (index, input) in inputs.iter().enumerate() {
        // Per-file child seed: outputs depend only on (root seed, position).
        let file_seed = child_seed(global.seed, index as u64);
        match augment_one(input, &pool, &ltr_cfg, &codec, file_seed, &args.out_dir) {
            Ok(entry) => {
                note(global, format!("augmented {}", input.display()));
                entries.push(entry);
            }
            Err(err) => failures.push(json!({
                "input": input,
                "error": format!("{err:#}"),
            })),
        }
    }

    let manifest = json!({
        "seed": global.seed,
        "p": args.p,
        "lambda_range": [lambda_min, lambda_max],
        "outputs": entries,
        "failures": failures,
    });
    let manifest_path = args.out_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    let ok = failures.is_empty();
    let lines = vec![format!(
        "augmented {} images, {} failures; manifest {}",
        entries.len(),
        failures.len(),
        manifest_path.display()
    )];
    let mut report = Report::ok(manifest, lines);
    if !ok {
        report.exit_code = 3;
    }
    Ok(report)
}

fn augment_one(
    input: &Path,
    pool: &[PaintingRecord],
    ltr_cfg: &LtrConfig,
    codec: &Codec,
    file_seed: u64,
    out_dir: &Path,
) -> Result<AugmentEntry> {
    let img = read_image(input)?;
    let mut stream = texrand_core::RngStream::new(file_seed);
    let painting = texrand_core::tcps::sample_painting(pool, &mut stream)?;
    let stylized = gtr_stylize(&img, &painting.image, codec)?;
    let mask = texrand_core::ltr::generate_mask(img.height(), img.width(), ltr_cfg, &mut stream)?;
    let mixed = mix(&img.to_unit(), &stylized, &mask)?;

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| anyhow!("{} has no usable stem", input.display()))?;
    let gtr_path = out_dir.join(format!("{stem}.gtr.png"));
    let ltr_path = out_dir.join(format!("{stem}.ltr.png"));
    let mask_path = out_dir.join(format!("{stem}.mask.png"));
    write_image(&gtr_path, &stylized)?;
    write_image(&ltr_path, &mixed)?;
    write_image(&mask_path, &mask.to_image())?;
    let prov = mask.provenance.expect("generated masks carry provenance");
    Ok(AugmentEntry {
        input: input.to_path_buf(),
        gtr: gtr_path,
        ltr: ltr_path,
        mask: mask_path,
        painting: painting.path.clone(),
        seed: file_seed,
        lambda: prov.lambda_used,
        p: prov.p,
    })
}
