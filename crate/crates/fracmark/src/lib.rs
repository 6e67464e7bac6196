//! Semi-fragile fractal watermarking toolkit.
//!
//! A small parameter key selects a space-filling curve variant and a
//! chaotic encryption stream; together they regenerate an encrypted 4-bit
//! watermark matrix on demand. Each entry is embedded into the 32x32
//! image patch at the matching grid position, so benign processing
//! (JPEG, mild noise, light blur) leaves the watermark readable while
//! content replacement destroys exactly the entries of the touched
//! patches. Comparing the extracted watermark against the key-regenerated
//! one yields recovery rates, a real/fake verdict and a per-patch tamper
//! localization map.

pub mod attack;
pub mod chaos;
pub mod curve;
pub mod detect;
mod dct;
pub mod embed;
pub mod error;
pub mod keyfile;
pub mod metrics;
pub mod synth;
pub mod watermark;

pub use attack::{apply, AttackOutcome, AttackSpec, PatchRect};
pub use chaos::{digit_extract, logistic_step, ChaosParams, DigitKeystream};
pub use curve::{
    enumerate_variants, CurveKind, CurveTraversal, Mirror, OrderMod, Rotation, VariationParams,
};
pub use detect::{
    auc, compare, cropping_correctness, cumulative_heatmap, decide, localization_map,
    render_overlay, HeatmapGrid, Label, LocalizationMask, RecoveryReport, Verdict,
};
pub use embed::{embed, extract, EmbedConfig, SoftRecovery, PATCH_SIZE};
pub use error::{Error, Result};
pub use keyfile::KeyFile;
pub use metrics::{psnr, ssim};
pub use watermark::{encrypt, raw_matrix, ChannelwiseWatermark, WatermarkKey, WatermarkMatrix};

/// Image side length required by a key of the given order.
pub fn required_side(order: u8) -> u32 {
    PATCH_SIZE * (1 << order)
}
