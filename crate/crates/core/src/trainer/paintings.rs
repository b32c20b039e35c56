//! Procedural "painting" candidates for the texture randomization pool.
//!
//! Each candidate is a cell mosaic: a fraction of cells carries a fine
//! two-tone pattern (which drives the gradient-based complexity score up),
//! the rest stays smooth. Busy fractions are spread widely so a selection
//! band keeps a useful subset, and per-channel tone/contrast vary so the
//! pool provides diverse style statistics.

use crate::image::{Image, Range};
use crate::rng::{child_seed, RngStream};

pub const PAINTING_SIZE: usize = 96;
const CELL: usize = 8;

fn candidate(rng: &mut RngStream) -> Image {
    let n = PAINTING_SIZE;
    let cells = n / CELL;
    let busy_fraction = rng.uniform(0.30, 0.95);
    let busy: Vec<bool> = (0..cells * cells).map(|_| rng.next_f64() < busy_fraction).collect();

    // Per-channel tone and contrast; keeps pool statistics diverse.
    let mut mean = [0.0; 3];
    let mut amp = [0.0; 3];
    for c in 0..3 {
        mean[c] = rng.uniform(0.25, 0.75);
        amp[c] = rng.uniform(0.07, 0.18);
    }
    // Per-cell pattern orientation and phase.
    let orient: Vec<u8> = (0..cells * cells).map(|_| rng.below(3) as u8).collect();
    let phase: Vec<usize> = (0..cells * cells).map(|_| rng.below(4) as usize).collect();

    Image::from_fn(n, n, 3, Range::Unit, |y, x, c| {
        let cell_idx = (y / CELL) * cells + x / CELL;
        let v = if busy[cell_idx] {
            // Width-2 two-tone stripes; every interior pixel sits next to an
            // edge, so the cell scores as unsmooth.
            let t = match orient[cell_idx] {
                0 => x,
                1 => y,
                _ => x + y,
            } + phase[cell_idx];
            if (t / 2) % 2 == 0 {
                mean[c] + amp[c]
            } else {
                mean[c] - amp[c]
            }
        } else {
            // Smooth: gentle ramp across the image, well under any
            // reasonable gradient threshold.
            mean[c] + 0.02 * (x as f64 / n as f64 - 0.5)
        };
        v.clamp(0.0, 1.0)
    })
    .expect("painting construction is in range")
}

/// `n` deterministic candidates; candidate `i` uses child stream `i`.
pub fn generate_painting_candidates(n: usize, seed: u64) -> Vec<Image> {
    (0..n)
        .map(|i| candidate(&mut RngStream::new(child_seed(seed, i as u64))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcps::texture_complexity;

    #[test]
    fn candidates_are_deterministic() {
        let a = generate_painting_candidates(3, 5);
        let b = generate_painting_candidates(3, 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.data(), y.data());
        }
    }

    #[test]
    fn complexity_spread_covers_the_selection_band() {
        let candidates = generate_painting_candidates(100, 12345);
        let scores: Vec<f64> = candidates
            .iter()
            .map(|img| texture_complexity(img, 20.0).unwrap())
            .collect();
        let in_band = scores.iter().filter(|&&t| (0.55..=0.65).contains(&t)).count();
        assert!(
            in_band >= 15,
            "need at least 15 in-band candidates out of 100, got {in_band} (scores span {:.2}..{:.2})",
            scores.iter().cloned().fold(f64::INFINITY, f64::min),
            scores.iter().cloned().fold(0.0, f64::max),
        );
    }

    #[test]
    fn channel_statistics_are_diverse() {
        let candidates = generate_painting_candidates(30, 777);
        let mut means = Vec::new();
        for img in &candidates {
            let (m, s) = img.channel_stats().unwrap();
            means.push(m[0]);
            assert!(s.iter().all(|&v| v > 0.0), "paintings must not be flat");
        }
        let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = means.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi - lo > 0.2, "pool means should span a wide range, got [{lo}, {hi}]");
    }
}
