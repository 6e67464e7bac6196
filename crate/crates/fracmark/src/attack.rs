//! Benign image operations and tamper proxies with pinned parameters.
//!
//! Every attack is a pure function of the image and its spec, stochastic
//! ones included (they carry explicit seeds), and always preserves the
//! image dimensions. `CropPatches` and `Splice` additionally report the
//! exact set of patch coordinates they destroyed so localization can be
//! scored against ground truth.

use std::collections::BTreeSet;

use image::codecs::jpeg::JpegEncoder;
use image::imageops::{self, FilterType};
use image::{ExtendedColorType, ImageFormat, Rgb, RgbImage};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::embed::PATCH_SIZE;
use crate::error::{Error, Result};

/// Axis-aligned rectangle in patch units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl PatchRect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        PatchRect { x, y, w, h }
    }

    fn validate(&self, grid: u32) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::parameter("patch rectangle is empty".to_string()));
        }
        if self.x + self.w > grid || self.y + self.h > grid {
            return Err(Error::parameter(format!(
                "patch rectangle {}+{}x{}+{} exceeds the {grid}x{grid} patch grid",
                self.x, self.w, self.y, self.h
            )));
        }
        Ok(())
    }

    fn patches(&self) -> BTreeSet<(u32, u32)> {
        let mut set = BTreeSet::new();
        for py in self.y..self.y + self.h {
            for px in self.x..self.x + self.w {
                set.insert((px, py));
            }
        }
        set
    }
}

/// A named image manipulation with fully specified parameters.
#[derive(Debug, Clone)]
pub enum AttackSpec {
    Identity,
    /// Real JPEG encode/decode round trip.
    Jpeg { quality: u8 },
    /// Additive per-channel Gaussian noise, clamped to `[0, 255]`.
    GaussianNoise { sigma: f64, seed: u64 },
    /// Convolution with a `kernel x kernel` Gaussian, replicate padding.
    GaussianBlur { kernel: u8, sigma: f64 },
    /// Per-channel `kernel x kernel` median filter, replicate padding.
    MedianBlur { kernel: u8 },
    /// Bilinear downscale to `scale` then bilinear back to the original.
    Resize { scale: f64 },
    /// Blacks out a patch-aligned rectangle.
    CropPatches { rect: PatchRect },
    /// Pastes the same rectangle of a donor image over the target.
    Splice { rect: PatchRect, donor: RgbImage },
    /// Whole-frame change: light blur plus a seeded 1-2 pixel translation.
    GlobalPerturb { strength: f64, seed: u64 },
}

impl AttackSpec {
    /// Stable lowercase name for CSV output and CLI parsing.
    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::Identity => "identity",
            AttackSpec::Jpeg { .. } => "jpeg",
            AttackSpec::GaussianNoise { .. } => "gaussian_noise",
            AttackSpec::GaussianBlur { .. } => "gaussian_blur",
            AttackSpec::MedianBlur { .. } => "median_blur",
            AttackSpec::Resize { .. } => "resize",
            AttackSpec::CropPatches { .. } => "crop_patches",
            AttackSpec::Splice { .. } => "splice",
            AttackSpec::GlobalPerturb { .. } => "global_perturb",
        }
    }

    /// Parameter summary for CSV output.
    pub fn params_string(&self) -> String {
        match self {
            AttackSpec::Identity => String::new(),
            AttackSpec::Jpeg { quality } => format!("quality={quality}"),
            AttackSpec::GaussianNoise { sigma, seed } => format!("sigma={sigma};seed={seed}"),
            AttackSpec::GaussianBlur { kernel, sigma } => format!("kernel={kernel};sigma={sigma}"),
            AttackSpec::MedianBlur { kernel } => format!("kernel={kernel}"),
            AttackSpec::Resize { scale } => format!("scale={scale}"),
            AttackSpec::CropPatches { rect } => {
                format!("x={};y={};w={};h={}", rect.x, rect.y, rect.w, rect.h)
            }
            AttackSpec::Splice { rect, donor } => format!(
                "x={};y={};w={};h={};donor={}x{}",
                rect.x,
                rect.y,
                rect.w,
                rect.h,
                donor.width(),
                donor.height()
            ),
            AttackSpec::GlobalPerturb { strength, seed } => {
                format!("strength={strength};seed={seed}")
            }
        }
    }

    fn validate(&self, img: &RgbImage) -> Result<()> {
        match self {
            AttackSpec::Identity => Ok(()),
            AttackSpec::Jpeg { quality } => {
                if !(1..=100).contains(quality) {
                    return Err(Error::parameter(format!(
                        "jpeg quality {quality} outside [1, 100]"
                    )));
                }
                Ok(())
            }
            AttackSpec::GaussianNoise { sigma, .. } => {
                if !(*sigma > 0.0 && *sigma <= 64.0) {
                    return Err(Error::parameter(format!(
                        "noise sigma {sigma} outside (0, 64]"
                    )));
                }
                Ok(())
            }
            AttackSpec::GaussianBlur { kernel, sigma } => {
                check_kernel(*kernel)?;
                if !(*sigma > 0.0 && *sigma <= 16.0) {
                    return Err(Error::parameter(format!(
                        "blur sigma {sigma} outside (0, 16]"
                    )));
                }
                Ok(())
            }
            AttackSpec::MedianBlur { kernel } => check_kernel(*kernel),
            AttackSpec::Resize { scale } => {
                if !(*scale > 0.0 && *scale < 1.0) {
                    return Err(Error::parameter(format!(
                        "resize scale {scale} outside (0, 1)"
                    )));
                }
                Ok(())
            }
            AttackSpec::CropPatches { rect } => rect.validate(img.width() / PATCH_SIZE),
            AttackSpec::Splice { rect, donor } => {
                if donor.dimensions() != img.dimensions() {
                    return Err(Error::dimension(format!(
                        "donor is {}x{}, target is {}x{}",
                        donor.width(),
                        donor.height(),
                        img.width(),
                        img.height()
                    )));
                }
                rect.validate(img.width() / PATCH_SIZE)
            }
            AttackSpec::GlobalPerturb { strength, .. } => {
                if !(*strength > 0.0 && *strength <= 16.0) {
                    return Err(Error::parameter(format!(
                        "perturb strength {strength} outside (0, 16]"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn check_kernel(kernel: u8) -> Result<()> {
    if kernel.is_multiple_of(2) || !(3..=15).contains(&kernel) {
        return Err(Error::parameter(format!(
            "kernel size {kernel} must be odd and in [3, 15]"
        )));
    }
    Ok(())
}

/// Result of applying an attack: the manipulated image plus, for the
/// tamper proxies with exact ground truth (crop, splice), the destroyed
/// patch coordinates.
#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub image: RgbImage,
    pub tampered_patches: Option<BTreeSet<(u32, u32)>>,
}

impl AttackOutcome {
    fn clean(image: RgbImage) -> Self {
        AttackOutcome {
            image,
            tampered_patches: None,
        }
    }

    pub fn into_image(self) -> RgbImage {
        self.image
    }
}

/// Apply an attack. The output image always has the input's dimensions.
pub fn apply(img: &RgbImage, spec: &AttackSpec) -> Result<AttackOutcome> {
    spec.validate(img)?;
    match spec {
        AttackSpec::Identity => Ok(AttackOutcome::clean(img.clone())),
        AttackSpec::Jpeg { quality } => jpeg_round_trip(img, *quality),
        AttackSpec::GaussianNoise { sigma, seed } => Ok(AttackOutcome::clean(add_noise(
            img, *sigma, *seed,
        ))),
        AttackSpec::GaussianBlur { kernel, sigma } => Ok(AttackOutcome::clean(gaussian_blur(
            img, *kernel, *sigma,
        ))),
        AttackSpec::MedianBlur { kernel } => Ok(AttackOutcome::clean(median_blur(img, *kernel))),
        AttackSpec::Resize { scale } => Ok(AttackOutcome::clean(resize_round_trip(img, *scale))),
        AttackSpec::CropPatches { rect } => {
            let mut out = img.clone();
            for py in rect.y * PATCH_SIZE..(rect.y + rect.h) * PATCH_SIZE {
                for px in rect.x * PATCH_SIZE..(rect.x + rect.w) * PATCH_SIZE {
                    out.put_pixel(px, py, Rgb([0, 0, 0]));
                }
            }
            Ok(AttackOutcome {
                image: out,
                tampered_patches: Some(rect.patches()),
            })
        }
        AttackSpec::Splice { rect, donor } => {
            let mut out = img.clone();
            for py in rect.y * PATCH_SIZE..(rect.y + rect.h) * PATCH_SIZE {
                for px in rect.x * PATCH_SIZE..(rect.x + rect.w) * PATCH_SIZE {
                    out.put_pixel(px, py, *donor.get_pixel(px, py));
                }
            }
            Ok(AttackOutcome {
                image: out,
                tampered_patches: Some(rect.patches()),
            })
        }
        AttackSpec::GlobalPerturb { strength, seed } => {
            let blurred = gaussian_blur(img, 3, *strength);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let magnitude_x = rng.random_range(1..=2i64);
            let magnitude_y = rng.random_range(1..=2i64);
            let dx = if rng.random_bool(0.5) { magnitude_x } else { -magnitude_x };
            let dy = if rng.random_bool(0.5) { magnitude_y } else { -magnitude_y };
            Ok(AttackOutcome::clean(translate(&blurred, dx, dy)))
        }
    }
}

fn jpeg_round_trip(img: &RgbImage, quality: u8) -> Result<AttackOutcome> {
    let mut buffer = Vec::new();
    JpegEncoder::new_with_quality(&mut buffer, quality).encode(
        img.as_raw(),
        img.width(),
        img.height(),
        ExtendedColorType::Rgb8,
    )?;
    let decoded = image::load_from_memory_with_format(&buffer, ImageFormat::Jpeg)?.into_rgb8();
    Ok(AttackOutcome::clean(decoded))
}

fn add_noise(img: &RgbImage, sigma: f64, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma validated positive");
    let mut out = img.clone();
    for p in out.pixels_mut() {
        for ch in 0..3 {
            let noisy = p[ch] as f64 + normal.sample(&mut rng);
            p[ch] = noisy.round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

fn gaussian_kernel(size: u8, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as i64;
    let mut weights: Vec<f64> = (-half..=half)
        .map(|i| (-(i as f64 * i as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

fn clamp_coord(v: i64, max: u32) -> u32 {
    v.clamp(0, max as i64 - 1) as u32
}

fn gaussian_blur(img: &RgbImage, kernel: u8, sigma: f64) -> RgbImage {
    let weights = gaussian_kernel(kernel, sigma);
    let half = (kernel / 2) as i64;
    let (w, h) = img.dimensions();

    // horizontal pass into f64 planes, then vertical
    let mut horizontal = vec![0.0f64; (w * h * 3) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (i, weight) in weights.iter().enumerate() {
                let sx = clamp_coord(x as i64 + i as i64 - half, w);
                let p = img.get_pixel(sx, y);
                for ch in 0..3 {
                    acc[ch] += weight * p[ch] as f64;
                }
            }
            let base = ((y * w + x) * 3) as usize;
            horizontal[base..base + 3].copy_from_slice(&acc);
        }
    }
    let mut out = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (i, weight) in weights.iter().enumerate() {
                let sy = clamp_coord(y as i64 + i as i64 - half, h);
                let base = ((sy * w + x) * 3) as usize;
                for ch in 0..3 {
                    acc[ch] += weight * horizontal[base + ch];
                }
            }
            let px = out.get_pixel_mut(x, y);
            for ch in 0..3 {
                px[ch] = acc[ch].round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}

fn median_blur(img: &RgbImage, kernel: u8) -> RgbImage {
    let half = (kernel / 2) as i64;
    let (w, h) = img.dimensions();
    let mut out = RgbImage::new(w, h);
    let mut window = Vec::with_capacity((kernel as usize) * (kernel as usize));
    for y in 0..h {
        for x in 0..w {
            let px = out.get_pixel_mut(x, y);
            for ch in 0..3 {
                window.clear();
                for dy in -half..=half {
                    for dx in -half..=half {
                        let sx = clamp_coord(x as i64 + dx, w);
                        let sy = clamp_coord(y as i64 + dy, h);
                        window.push(img.get_pixel(sx, sy)[ch]);
                    }
                }
                window.sort_unstable();
                px[ch] = window[window.len() / 2];
            }
        }
    }
    out
}

fn resize_round_trip(img: &RgbImage, scale: f64) -> RgbImage {
    let (w, h) = img.dimensions();
    let down_w = ((w as f64 * scale).round() as u32).max(1);
    let down_h = ((h as f64 * scale).round() as u32).max(1);
    let down = imageops::resize(img, down_w, down_h, FilterType::Triangle);
    imageops::resize(&down, w, h, FilterType::Triangle)
}

fn translate(img: &RgbImage, dx: i64, dy: i64) -> RgbImage {
    let (w, h) = img.dimensions();
    let mut out = RgbImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let sx = clamp_coord(x as i64 - dx, w);
            let sy = clamp_coord(y as i64 - dy, h);
            out.put_pixel(x, y, *img.get_pixel(sx, sy));
        }
    }
    out
}
