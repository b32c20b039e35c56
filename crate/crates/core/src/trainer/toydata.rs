//! Procedural texture-shift benchmark: two domains that share geometry and
//! label statistics but render region fills with disjoint texture families
//! and different global color statistics.
//!
//! Each class carries a stable local signature across both domains (fine
//! high-contrast pattern for circles, dense speckle for rectangles, smooth
//! fill for triangles, coarse low-contrast pattern for background), while
//! absolute colors are reliable only in the source domain; the target domain
//! rescales every channel by a random per-image affine map.

use crate::error::{Error, Result};
use crate::image::{Image, Range};
use crate::rng::{child_seed, RngStream};
use crate::trainer::loss::LabelMap;

pub const TOY_SIZE: usize = 64;
pub const TOY_CLASSES: usize = 4;

/// Mean base color per class (background, circle, rectangle, triangle).
const BASE_COLORS: [[f64; 3]; 4] = [
    [0.50, 0.50, 0.50],
    [0.80, 0.35, 0.30],
    [0.30, 0.75, 0.35],
    [0.30, 0.40, 0.85],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Source,
    Target,
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Domain::Source),
            "target" => Ok(Domain::Target),
            other => Err(Error::InvalidParameter(format!(
                "domain must be 'source' or 'target', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ToySample {
    pub image: Image,
    pub label: LabelMap,
}

/// Per-image global tone map; near-identity for the source domain, a random
/// per-channel squeeze for the target domain.
fn domain_affine(domain: Domain, tex: &mut RngStream) -> ([f64; 3], [f64; 3]) {
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    for c in 0..3 {
        match domain {
            Domain::Source => {
                a[c] = tex.uniform(0.95, 1.05);
                b[c] = tex.uniform(-0.02, 0.02);
            }
            Domain::Target => {
                a[c] = tex.uniform(0.25, 0.80);
                b[c] = tex.uniform(0.02, 0.15);
            }
        }
    }
    (a, b)
}

/// Fills `region` of `img` with the class texture for `domain`.
///
/// Texture set A (source): stripes, dots, flat. Set B (target): checker,
/// noise grain, gradient. The assignment is class-locked so the local
/// contrast signature of a class survives the domain change.
fn fill_region(
    img: &mut Image,
    region: &[usize],
    class: usize,
    domain: Domain,
    affine: ([f64; 3], [f64; 3]),
    tex: &mut RngStream,
) {
    let w = img.width();
    let h = img.height();
    let mut col = BASE_COLORS[class];
    for c in col.iter_mut() {
        *c += tex.uniform(-0.04, 0.04);
    }
    let (a, b) = affine;

    // Per-pixel modulation added identically to all channels.
    let modulation: Box<dyn Fn(usize, usize, &mut RngStream) -> f64> = match (domain, class) {
        (Domain::Source, 0) => {
            // Coarse, low-amplitude diagonal stripes.
            let period = 12.0;
            let amp = 0.07;
            let phase = tex.uniform(0.0, period);
            Box::new(move |y, x, _| {
                amp * ((std::f64::consts::TAU * ((x + y) as f64 + phase) / period).sin()).signum()
            })
        }
        (Domain::Source, 1) => {
            // Fine, high-amplitude stripes, horizontal or vertical.
            let period = 4.0;
            let amp = 0.20;
            let phase = tex.uniform(0.0, period);
            let vertical = tex.below(2) == 0;
            Box::new(move |y, x, _| {
                let t = if vertical { x } else { y } as f64;
                amp * ((std::f64::consts::TAU * (t + phase) / period).sin()).signum()
            })
        }
        (Domain::Source, 2) => {
            // Dense dot lattice.
            let spacing = 3;
            let amp = 0.18;
            let oy = tex.below(spacing as u64) as usize;
            let ox = tex.below(spacing as u64) as usize;
            Box::new(move |y, x, _| {
                if y % spacing == oy && x % spacing == ox {
                    amp * 1.5
                } else {
                    -amp * 0.4
                }
            })
        }
        (Domain::Source, _) => {
            // Flat with faint grain.
            Box::new(move |_, _, r: &mut RngStream| r.uniform(-0.02, 0.02))
        }
        (Domain::Target, 0) => {
            // Coarse, low-amplitude checkerboard.
            let cell = 8;
            let amp = 0.07;
            Box::new(move |y, x, _| if (y / cell + x / cell) % 2 == 0 { amp } else { -amp })
        }
        (Domain::Target, 1) => {
            // Fine, high-amplitude checkerboard.
            let cell = 2;
            let amp = 0.20;
            Box::new(move |y, x, _| if (y / cell + x / cell) % 2 == 0 { amp } else { -amp })
        }
        (Domain::Target, 2) => {
            // Per-pixel noise grain.
            let amp = 0.18;
            Box::new(move |_, _, r: &mut RngStream| r.uniform(-amp, amp))
        }
        (Domain::Target, _) => {
            // Smooth gradient across the region's bounding box.
            let amp = 0.05;
            let horizontal = tex.below(2) == 0;
            let hf = h as f64;
            let wf = w as f64;
            Box::new(move |y, x, _| {
                let t = if horizontal { x as f64 / wf } else { y as f64 / hf };
                (t - 0.5) * 2.0 * amp
            })
        }
    };

    for &i in region {
        let (y, x) = (i / w, i % w);
        let m = modulation(y, x, tex);
        for c in 0..3 {
            let v = (col[c] + m).clamp(0.02, 0.98);
            img.set(y, x, c, (v * a[c] + b[c]).clamp(0.0, 1.0));
        }
    }
}

struct Shape {
    kind: usize, // 0 circle, 1 rectangle, 2 triangle
    pixels: Vec<usize>,
}

/// Rasterizes 1-3 shapes from the geometry stream. Only this stream decides
/// geometry, so source and target datasets built from the same seed have
/// identical label maps.
fn draw_shapes(geo: &mut RngStream, h: usize, w: usize) -> Vec<Shape> {
    let count = 1 + geo.below(3) as usize;
    let mut shapes = Vec::with_capacity(count);
    for _ in 0..count {
        // Triangles cover the least area per unit radius; drawing them a
        // little more often keeps the class pixel frequencies comparable.
        let kind = match geo.below(10) {
            0..=2 => 0,
            3..=5 => 1,
            _ => 2,
        } as usize;
        let cx = geo.uniform(12.0, (w - 12) as f64);
        let cy = geo.uniform(12.0, (h - 12) as f64);
        let mut pixels = Vec::new();
        match kind {
            0 => {
                let r = geo.uniform(8.0, 16.0);
                for y in 0..h {
                    for x in 0..w {
                        let (dy, dx) = (y as f64 - cy, x as f64 - cx);
                        if dy * dy + dx * dx <= r * r {
                            pixels.push(y * w + x);
                        }
                    }
                }
            }
            1 => {
                let hw = geo.uniform(7.0, 15.0);
                let hh = geo.uniform(7.0, 15.0);
                for y in 0..h {
                    for x in 0..w {
                        if (x as f64 - cx).abs() <= hw && (y as f64 - cy).abs() <= hh {
                            pixels.push(y * w + x);
                        }
                    }
                }
            }
            _ => {
                let r = geo.uniform(12.0, 20.0);
                let theta = geo.uniform(0.0, std::f64::consts::TAU);
                let v: Vec<(f64, f64)> = (0..3)
                    .map(|k| {
                        let ang = theta + k as f64 * std::f64::consts::TAU / 3.0;
                        (cx + r * ang.cos(), cy + r * ang.sin())
                    })
                    .collect();
                let sign = |p: (f64, f64), q: (f64, f64), s: (f64, f64)| {
                    (p.0 - s.0) * (q.1 - s.1) - (q.0 - s.0) * (p.1 - s.1)
                };
                for y in 0..h {
                    for x in 0..w {
                        let p = (x as f64, y as f64);
                        let d1 = sign(p, v[0], v[1]);
                        let d2 = sign(p, v[1], v[2]);
                        let d3 = sign(p, v[2], v[0]);
                        let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
                        let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
                        if !(neg && pos) {
                            pixels.push(y * w + x);
                        }
                    }
                }
            }
        }
        shapes.push(Shape { kind, pixels });
    }
    shapes
}

/// One sample; `geo` decides geometry, `tex` decides appearance.
fn gen_sample(domain: Domain, geo: &mut RngStream, tex: &mut RngStream) -> ToySample {
    let (h, w) = (TOY_SIZE, TOY_SIZE);
    let mut img = Image::constant(h, w, 3, Range::Unit, 0.0).expect("valid shape");
    let mut ids = vec![0u8; h * w];
    let affine = domain_affine(domain, tex);

    let all: Vec<usize> = (0..h * w).collect();
    fill_region(&mut img, &all, 0, domain, affine, tex);
    for shape in draw_shapes(geo, h, w) {
        fill_region(&mut img, &shape.pixels, shape.kind + 1, domain, affine, tex);
        for &i in &shape.pixels {
            ids[i] = (shape.kind + 1) as u8;
        }
    }
    ToySample { image: img, label: LabelMap::new(h, w, ids).expect("valid shape") }
}

/// Deterministic dataset: sample `i` uses child streams `2i` (geometry) and
/// `2i + 1` (texture) of `seed`.
pub fn gen_toy_dataset(domain: Domain, n: usize, seed: u64) -> Result<Vec<ToySample>> {
    if n == 0 {
        return Err(Error::InvalidParameter("dataset size must be at least 1".into()));
    }
    Ok((0..n)
        .map(|i| {
            let mut geo = RngStream::new(child_seed(seed, 2 * i as u64));
            let mut tex = RngStream::new(child_seed(seed, 2 * i as u64 + 1));
            gen_sample(domain, &mut geo, &mut tex)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_domain_is_identical() {
        let a = gen_toy_dataset(Domain::Source, 5, 42).unwrap();
        let b = gen_toy_dataset(Domain::Source, 5, 42).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.image.data(), y.image.data());
            assert_eq!(x.label, y.label);
        }
    }

    #[test]
    fn domains_share_labels_but_not_pixels() {
        let src = gen_toy_dataset(Domain::Source, 8, 7).unwrap();
        let tgt = gen_toy_dataset(Domain::Target, 8, 7).unwrap();
        let mut identical_pixels = true;
        for (s, t) in src.iter().zip(&tgt) {
            assert_eq!(s.label, t.label, "geometry must match across domains");
            if s.image.data() != t.image.data() {
                identical_pixels = false;
            }
        }
        assert!(!identical_pixels, "texture sets must differ");

        // Target images are globally darker/compressed on average.
        let mean = |xs: &[ToySample]| {
            xs.iter().flat_map(|s| s.image.data()).sum::<f64>()
                / xs.iter().map(|s| s.image.data().len()).sum::<usize>() as f64
        };
        assert!(mean(&src) > mean(&tgt) + 0.05, "domain statistics should differ");
    }

    #[test]
    fn class_frequencies_are_reasonable() {
        let samples = gen_toy_dataset(Domain::Source, 1000, 99).unwrap();
        let mut counts = [0usize; TOY_CLASSES];
        let mut total = 0usize;
        for s in &samples {
            for &id in &s.label.ids {
                counts[id as usize] += 1;
                total += 1;
            }
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        assert!(freq[0] > 0.5, "background should be the majority, got {freq:?}");
        for k in 1..TOY_CLASSES {
            assert!(freq[k] >= 0.05, "class {k} frequency {} below 5%", freq[k]);
        }
    }

    #[test]
    fn labels_round_trip_and_images_are_unit_range() {
        let samples = gen_toy_dataset(Domain::Target, 10, 3).unwrap();
        for s in &samples {
            assert_eq!(s.image.range(), Range::Unit);
            assert_eq!(s.image.height(), TOY_SIZE);
            assert!(s.label.ids.iter().all(|&id| (id as usize) < TOY_CLASSES));
        }
    }

    #[test]
    fn rejects_empty_request() {
        assert!(gen_toy_dataset(Domain::Source, 0, 1).is_err());
    }
}
