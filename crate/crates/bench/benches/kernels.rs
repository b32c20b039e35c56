//! Criterion benchmarks for the hot kernels: smoothing, mask generation,
//! AdaIN, complexity scoring, and the training network.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use texrand_core::gtr::{adain, FeatureMap};
use texrand_core::image::{Image, Range};
use texrand_core::kernel::{convolve, gaussian_blur, gaussian_kernel};
use texrand_core::ltr::{erf_inv, generate_mask_seeded, LtrConfig};
use texrand_core::rng::RngStream;
use texrand_core::tcps::texture_complexity;
use texrand_core::trainer::{weighted_ce, Grads, LabelMap, SegModel};

fn noise_image(seed: u64, h: usize, w: usize) -> Image {
    let mut rng = RngStream::new(seed);
    let mut data = vec![0.0; h * w];
    rng.fill_normal(&mut data);
    Image::new(h, w, 1, Range::Real, data).unwrap()
}

fn rgb_image(seed: u64, h: usize, w: usize) -> Image {
    let mut rng = RngStream::new(seed);
    Image::from_fn(h, w, 3, Range::Unit, |_, _, _| rng.next_f64()).unwrap()
}

fn bench_smoothing(c: &mut Criterion) {
    let field = noise_image(1, 640, 640);
    c.bench_function("gaussian_blur_640_sigma7.4", |b| {
        b.iter(|| gaussian_blur(black_box(&field), 7.39, 23).unwrap())
    });
    let small = rgb_image(2, 64, 64);
    let kernel = gaussian_kernel(2.0, 6).unwrap();
    c.bench_function("convolve_64_full_2d_r6", |b| {
        b.iter(|| convolve(black_box(&small), black_box(&kernel)))
    });
}

fn bench_mask(c: &mut Criterion) {
    let cfg = LtrConfig::default();
    c.bench_function("generate_mask_640", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            generate_mask_seeded(640, 640, black_box(&cfg), seed).unwrap()
        })
    });
}

fn bench_adain(c: &mut Criterion) {
    let content = FeatureMap::new(64, 64, 3, rgb_image(3, 64, 64).data().to_vec()).unwrap();
    let style = FeatureMap::new(64, 64, 3, rgb_image(4, 64, 64).data().to_vec()).unwrap();
    c.bench_function("adain_64x64x3", |b| {
        b.iter(|| adain(black_box(&content), black_box(&style)).unwrap())
    });
}

fn bench_complexity(c: &mut Criterion) {
    let img = rgb_image(5, 96, 96);
    c.bench_function("texture_complexity_96", |b| {
        b.iter(|| texture_complexity(black_box(&img), 20.0).unwrap())
    });
}

fn bench_erf_inv(c: &mut Criterion) {
    c.bench_function("erf_inv_grid", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for k in -999..=999i64 {
                acc += erf_inv(black_box(k as f64 / 1000.0)).unwrap();
            }
            acc
        })
    });
}

fn bench_model(c: &mut Criterion) {
    let mut rng = RngStream::new(6);
    let model = SegModel::init(4, &mut rng).unwrap();
    let img = rgb_image(7, 64, 64);
    c.bench_function("segmodel_forward_64", |b| {
        b.iter(|| model.forward(black_box(&img)).unwrap())
    });
    let label = LabelMap::new(64, 64, vec![0; 64 * 64]).unwrap();
    c.bench_function("segmodel_forward_backward_64", |b| {
        b.iter_batched(
            || Grads::zeros_like(&model),
            |mut grads| {
                let trace = model.forward_trace(&img).unwrap();
                let (_, dlogits) = weighted_ce(&trace.logits, &label, &[1.0; 4]).unwrap();
                model.backward(&trace, &dlogits, &mut grads);
                grads
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_smoothing,
    bench_mask,
    bench_adain,
    bench_complexity,
    bench_erf_inv,
    bench_model
);
criterion_main!(benches);
