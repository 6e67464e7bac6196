//! Image quality metrics: PSNR over RGB, SSIM over luminance.

use image::RgbImage;

use crate::error::{Error, Result};

fn check_same_size(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::dimension(format!(
            "images are {}x{} and {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB, `10 * log10(255^2 / MSE)` with the
/// MSE taken over all pixels and channels. Identical images yield
/// `f64::INFINITY`.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_same_size(a, b)?;
    let mut sum_sq = 0.0f64;
    for (pa, pb) in a.pixels().zip(b.pixels()) {
        for ch in 0..3 {
            let d = pa[ch] as f64 - pb[ch] as f64;
            sum_sq += d * d;
        }
    }
    let mse = sum_sq / (a.width() as f64 * a.height() as f64 * 3.0);
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

const SSIM_WINDOW: u32 = 8;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Mean structural similarity over sliding 8x8 luminance windows with
/// uniform weights and the standard constants.
pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_same_size(a, b)?;
    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        return Err(Error::dimension(format!(
            "images must be at least {SSIM_WINDOW}x{SSIM_WINDOW} for SSIM"
        )));
    }
    let luma_plane = |img: &RgbImage| -> Vec<f64> {
        img.pixels()
            .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
            .collect()
    };
    let la = luma_plane(a);
    let lb = luma_plane(b);
    let w = a.width() as usize;
    let h = a.height() as usize;
    let win = SSIM_WINDOW as usize;
    let count = (win * win) as f64;

    let mut total = 0.0f64;
    let mut windows = 0usize;
    for y0 in 0..=(h - win) {
        for x0 in 0..=(w - win) {
            let mut sa = 0.0;
            let mut sb = 0.0;
            let mut saa = 0.0;
            let mut sbb = 0.0;
            let mut sab = 0.0;
            for y in y0..y0 + win {
                let row = y * w;
                for x in x0..x0 + win {
                    let va = la[row + x];
                    let vb = lb[row + x];
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            }
            let mu_a = sa / count;
            let mu_b = sb / count;
            let var_a = saa / count - mu_a * mu_a;
            let var_b = sbb / count - mu_b * mu_b;
            let cov = sab / count - mu_a * mu_b;
            let numerator = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2);
            let denominator = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2);
            total += numerator / denominator;
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}
