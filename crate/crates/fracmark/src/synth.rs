//! Deterministic synthetic test images.
//!
//! Benchmarking the pipeline needs a reproducible "desk corpus". These
//! images mix smooth gradients, low-frequency waves, soft blobs and mild
//! texture, and keep values away from full saturation so that embedding
//! headroom always exists, like a typical photograph.

use image::{Rgb, RgbImage};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One synthetic image of the given square side; the seed fixes content.
pub fn synthetic_image(side: u32, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = side as f64;

    // low-frequency luminance waves
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.5..2.5) * std::f64::consts::TAU / s,
                rng.random_range(0.5..2.5) * std::f64::consts::TAU / s,
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(12.0..30.0),
            )
        })
        .collect();

    // soft elliptical blobs
    let blobs: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.1..0.9) * s,
                rng.random_range(0.1..0.9) * s,
                rng.random_range(0.08..0.3) * s,
                rng.random_range(-35.0..35.0),
            )
        })
        .collect();

    let base = rng.random_range(90.0..150.0);
    let grad_x = rng.random_range(-40.0..40.0);
    let grad_y = rng.random_range(-40.0..40.0);
    let tint: [f64; 3] = [
        rng.random_range(-18.0..18.0),
        rng.random_range(-18.0..18.0),
        rng.random_range(-18.0..18.0),
    ];
    let texture_amp = rng.random_range(2.0..7.0);

    let mut img = RgbImage::new(side, side);
    for y in 0..side {
        for x in 0..side {
            let xf = x as f64;
            let yf = y as f64;
            let mut v = base + grad_x * (xf / s - 0.5) + grad_y * (yf / s - 0.5);
            for &(fx, fy, phase, amp) in &waves {
                v += amp * (fx * xf + fy * yf + phase).sin();
            }
            for &(cx, cy, radius, amp) in &blobs {
                let d2 = ((xf - cx) * (xf - cx) + (yf - cy) * (yf - cy)) / (radius * radius);
                v += amp * (-d2).exp();
            }
            let texture = texture_amp * rng.random_range(-1.0..1.0);
            let mut px = [0u8; 3];
            for ch in 0..3 {
                px[ch] = (v + tint[ch] + texture).clamp(16.0, 240.0) as u8;
            }
            img.put_pixel(x, y, Rgb(px));
        }
    }
    img
}

/// A corpus of `count` synthetic images, seeds `base_seed..base_seed+count`.
pub fn synthetic_corpus(count: usize, side: u32, base_seed: u64) -> Vec<RgbImage> {
    (0..count)
        .map(|i| synthetic_image(side, base_seed + i as u64))
        .collect()
}
