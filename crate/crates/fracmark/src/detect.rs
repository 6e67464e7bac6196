//! Verification: recovery rates, verdicts, localization, heatmaps, AUC.

use std::collections::BTreeSet;

use image::{Rgb, RgbImage};

use crate::embed::{SoftRecovery, PATCH_SIZE};
use crate::error::{Error, Result};
use crate::watermark::WatermarkMatrix;

/// Default patch-rate threshold separating Real from Fake. Benign
/// processing keeps the rate near 1.0 while content manipulation pulls it
/// toward chance level, so the verdict is insensitive to the exact value.
pub const DEFAULT_TAU: f64 = 0.85;

/// Outcome of comparing a recovered watermark against the expected one.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    order: u8,
    /// true = all 4 bits of the entry recovered correctly
    mask: Vec<bool>,
    bit_rate: f64,
    patch_rate: f64,
}

impl RecoveryReport {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn side(&self) -> u32 {
        1 << self.order
    }

    /// Fraction of correctly recovered bits.
    pub fn bit_rate(&self) -> f64 {
        self.bit_rate
    }

    /// Fraction of patches whose full 4-bit entry is correct.
    pub fn patch_rate(&self) -> f64 {
        self.patch_rate
    }

    pub fn matches(&self, x: u32, y: u32) -> bool {
        self.mask[(y * self.side() + x) as usize]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Count matching bits and fully matching patches.
pub fn compare(expected: &WatermarkMatrix, recovered: &SoftRecovery) -> Result<RecoveryReport> {
    if expected.order() != recovered.order() {
        return Err(Error::dimension(format!(
            "expected watermark order {} but recovery has order {}",
            expected.order(),
            recovered.order()
        )));
    }
    let side = expected.side();
    let mut mask = Vec::with_capacity((side * side) as usize);
    let mut correct_bits = 0usize;
    for y in 0..side {
        for x in 0..side {
            let mut patch_ok = true;
            for plane in 0..4 {
                if expected.entry_bit(plane, x, y) == recovered.hard_bit(plane, x, y) {
                    correct_bits += 1;
                } else {
                    patch_ok = false;
                }
            }
            mask.push(patch_ok);
        }
    }
    let cells = (side * side) as f64;
    let matched = mask.iter().filter(|&&m| m).count() as f64;
    Ok(RecoveryReport {
        order: expected.order(),
        mask,
        bit_rate: correct_bits as f64 / (4.0 * cells),
        patch_rate: matched / cells,
    })
}

/// Real/fake decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Real,
    Fake,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Real => "real",
            Label::Fake => "fake",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub label: Label,
    /// The patch-wise recovery rate the decision was made on.
    pub score: f64,
    pub tau: f64,
}

/// Real iff `patch_rate >= tau`.
pub fn decide(report: &RecoveryReport, tau: f64) -> Result<Verdict> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::parameter(format!("tau = {tau} outside (0, 1)")));
    }
    let score = report.patch_rate();
    Ok(Verdict {
        label: if score >= tau { Label::Real } else { Label::Fake },
        score,
        tau,
    })
}

/// Per-patch tamper flags: the negation of the match mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizationMask {
    order: u8,
    flags: Vec<bool>,
}

impl LocalizationMask {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn side(&self) -> u32 {
        1 << self.order
    }

    pub fn is_tampered(&self, x: u32, y: u32) -> bool {
        self.flags[(y * self.side() + x) as usize]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn tampered_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Tampered patch coordinates in row-major order.
    pub fn tampered_patches(&self) -> BTreeSet<(u32, u32)> {
        let side = self.side();
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| (i as u32 % side, i as u32 / side))
            .collect()
    }

    /// Compact row-major '0'/'1' string, used in the report CSV.
    pub fn to_bit_string(&self) -> String {
        self.flags.iter().map(|&f| if f { '1' } else { '0' }).collect()
    }

    /// Parse the CSV bit-string form. Length must be a power-of-four cell
    /// count (`4^n`).
    pub fn from_bit_string(bits: &str) -> Result<Self> {
        let len = bits.len();
        let order = match len {
            4 => 1,
            16 => 2,
            64 => 3,
            256 => 4,
            1024 => 5,
            4096 => 6,
            16384 => 7,
            65536 => 8,
            _ => {
                return Err(Error::parameter(format!(
                    "mask length {len} is not 4^n for n in [1, 8]"
                )))
            }
        };
        let mut flags = Vec::with_capacity(len);
        for ch in bits.chars() {
            match ch {
                '0' => flags.push(false),
                '1' => flags.push(true),
                other => {
                    return Err(Error::parameter(format!(
                        "mask may only contain 0/1, found {other:?}"
                    )))
                }
            }
        }
        Ok(LocalizationMask { order, flags })
    }
}

/// Tamper map from a recovery report.
pub fn localization_map(report: &RecoveryReport) -> LocalizationMask {
    LocalizationMask {
        order: report.order,
        flags: report.mask.iter().map(|&m| !m).collect(),
    }
}

/// Paint tampered patches with a 50%-alpha red overlay.
pub fn render_overlay(img: &RgbImage, mask: &LocalizationMask) -> Result<RgbImage> {
    let side = mask.side() * PATCH_SIZE;
    if img.width() != side || img.height() != side {
        return Err(Error::dimension(format!(
            "image is {}x{}, mask expects {side}x{side}",
            img.width(),
            img.height()
        )));
    }
    let mut out = img.clone();
    for py in 0..mask.side() {
        for px in 0..mask.side() {
            if !mask.is_tampered(px, py) {
                continue;
            }
            for dy in 0..PATCH_SIZE {
                for dx in 0..PATCH_SIZE {
                    let p = out.get_pixel_mut(px * PATCH_SIZE + dx, py * PATCH_SIZE + dy);
                    p[0] = ((p[0] as u16 + 255) / 2) as u8;
                    p[1] /= 2;
                    p[2] /= 2;
                }
            }
        }
    }
    Ok(out)
}

/// Per-position mismatch counts over a corpus, normalized by the maximum
/// count. All-zero when nothing mismatched anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    order: u8,
    values: Vec<f64>,
}

impl HeatmapGrid {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn side(&self) -> u32 {
        1 << self.order
    }

    pub fn value(&self, x: u32, y: u32) -> f64 {
        self.values[(y * self.side() + x) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Render as an image, `cell_px` pixels per grid cell, black-red-yellow
    /// ramp.
    pub fn render(&self, cell_px: u32) -> RgbImage {
        let side = self.side();
        let mut img = RgbImage::new(side * cell_px.max(1), side * cell_px.max(1));
        let cell = cell_px.max(1);
        for y in 0..side {
            for x in 0..side {
                let v = self.value(x, y).clamp(0.0, 1.0);
                // 0 -> black, 0.5 -> red, 1 -> yellow
                let r = (v * 2.0).min(1.0);
                let g = ((v - 0.5).max(0.0) * 2.0).min(1.0);
                let color = Rgb([(r * 255.0) as u8, (g * 255.0) as u8, 0]);
                for dy in 0..cell {
                    for dx in 0..cell {
                        img.put_pixel(x * cell + dx, y * cell + dy, color);
                    }
                }
            }
        }
        img
    }
}

/// Aggregate localization results: mismatch count per position divided by
/// the maximum count.
pub fn cumulative_heatmap(reports: &[RecoveryReport]) -> Result<HeatmapGrid> {
    let first = reports
        .first()
        .ok_or_else(|| Error::parameter("heatmap needs at least one report".to_string()))?;
    let order = first.order;
    let cells = first.mask.len();
    let mut counts = vec![0u64; cells];
    for report in reports {
        if report.order != order {
            return Err(Error::dimension(format!(
                "mixed report orders {} and {order}",
                report.order
            )));
        }
        for (count, &matched) in counts.iter_mut().zip(&report.mask) {
            if !matched {
                *count += 1;
            }
        }
    }
    let max = *counts.iter().max().expect("non-empty counts");
    let values = if max == 0 {
        vec![0.0; cells]
    } else {
        counts.iter().map(|&c| c as f64 / max as f64).collect()
    };
    Ok(HeatmapGrid { order, values })
}

/// Same aggregation for masks parsed back from CSV rows.
pub fn cumulative_heatmap_from_masks(masks: &[LocalizationMask]) -> Result<HeatmapGrid> {
    let first = masks
        .first()
        .ok_or_else(|| Error::parameter("heatmap needs at least one mask".to_string()))?;
    let order = first.order;
    let cells = first.flags.len();
    let mut counts = vec![0u64; cells];
    for mask in masks {
        if mask.order != order {
            return Err(Error::dimension(format!(
                "mixed mask orders {} and {order}",
                mask.order
            )));
        }
        for (count, &flag) in counts.iter_mut().zip(&mask.flags) {
            if flag {
                *count += 1;
            }
        }
    }
    let max = *counts.iter().max().expect("non-empty counts");
    let values = if max == 0 {
        vec![0.0; cells]
    } else {
        counts.iter().map(|&c| c as f64 / max as f64).collect()
    };
    Ok(HeatmapGrid { order, values })
}

/// Probability that a random real score exceeds a random fake score, ties
/// counted half (Mann-Whitney).
pub fn auc(real_scores: &[f64], fake_scores: &[f64]) -> Result<f64> {
    if real_scores.is_empty() || fake_scores.is_empty() {
        return Err(Error::parameter(
            "auc needs at least one score on each side".to_string(),
        ));
    }
    let mut favourable = 0.0f64;
    for &real in real_scores {
        for &fake in fake_scores {
            if real > fake {
                favourable += 1.0;
            } else if real == fake {
                favourable += 0.5;
            }
        }
    }
    Ok(favourable / (real_scores.len() as f64 * fake_scores.len() as f64))
}

/// Fraction of patches behaving as a crop demands: cropped patches must
/// mismatch, untouched ones must match.
pub fn cropping_correctness(report: &RecoveryReport, cropped: &BTreeSet<(u32, u32)>) -> f64 {
    let side = report.side();
    let mut correct = 0usize;
    for y in 0..side {
        for x in 0..side {
            let should_mismatch = cropped.contains(&(x, y));
            if report.matches(x, y) != should_mismatch {
                correct += 1;
            }
        }
    }
    correct as f64 / (side * side) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::ChaosParams;
    use crate::curve::{CurveKind, VariationParams};
    use crate::embed::{embed, extract, EmbedConfig};
    use crate::watermark::WatermarkKey;

    fn key(order: u8) -> WatermarkKey {
        WatermarkKey::new(
            CurveKind::Hilbert,
            order,
            VariationParams::from_codes(2, 6, 1).unwrap(),
            ChaosParams::new(0.41, 3.87, 300, 5).unwrap(),
        )
        .unwrap()
    }

    fn perfect_report(order: u8) -> RecoveryReport {
        let key = key(order);
        let matrix = key.generate().unwrap();
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(crate::required_side(order), 40);
        let marked = embed(&img, &matrix.to_channelwise(), &cfg).unwrap();
        compare(&matrix, &extract(&marked, order, &cfg).unwrap()).unwrap()
    }

    #[test]
    fn perfect_recovery_scores_one() {
        let report = perfect_report(2);
        assert_eq!(report.bit_rate(), 1.0);
        assert_eq!(report.patch_rate(), 1.0);
        assert!(report.mask().iter().all(|&m| m));
    }

    #[test]
    fn single_bit_error_counts() {
        // compare a perfect recovery against an expectation altered in
        // exactly one bit: 255/256 bits, 63/64 patches
        let key = key(3);
        let matrix = key.generate().unwrap();
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(256, 41);
        let marked = embed(&img, &matrix.to_channelwise(), &cfg).unwrap();
        let recovery = extract(&marked, 3, &cfg).unwrap();

        let mut entries = matrix.entries().to_vec();
        entries[10] ^= 0b0100;
        let altered = WatermarkMatrix::from_entries(3, entries).unwrap();
        let report = compare(&altered, &recovery).unwrap();
        assert!((report.bit_rate() - 255.0 / 256.0).abs() < 1e-12);
        assert!((report.patch_rate() - 63.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_thresholding() {
        let report = perfect_report(2);
        let verdict = decide(&report, 0.85).unwrap();
        assert_eq!(verdict.label, Label::Real);
        assert_eq!(verdict.score, 1.0);
        assert!(decide(&report, 0.0).is_err());
        assert!(decide(&report, 1.0).is_err());
    }

    #[test]
    fn verdict_boundary_is_real_at_exact_tau() {
        // score == tau decides Real under the >= rule
        let key = key(3);
        let matrix = key.generate().unwrap();
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(256, 43);
        let marked = embed(&img, &matrix.to_channelwise(), &cfg).unwrap();
        let mut entries = matrix.entries().to_vec();
        entries[0] ^= 0b1111;
        let altered = WatermarkMatrix::from_entries(3, entries).unwrap();
        let report = compare(&altered, &extract(&marked, 3, &cfg).unwrap()).unwrap();
        assert_eq!(report.patch_rate(), 63.0 / 64.0);
        assert_eq!(
            decide(&report, 63.0 / 64.0).unwrap().label,
            Label::Real
        );
        assert_eq!(
            decide(&report, 63.0 / 64.0 + 1e-9).unwrap().label,
            Label::Fake
        );
    }

    #[test]
    fn random_expectations_match_at_chance_level() {
        // Monte-Carlo check of the rate definitions: against uniformly
        // random 4-bit expectations, a fixed recovery matches ~1/16 of
        // patches and ~1/2 of bits.
        use rand::{Rng, SeedableRng};
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(256, 44);
        let recovery = extract(&img, 3, &cfg).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut patch_sum = 0.0;
        let mut bit_sum = 0.0;
        let trials = 200;
        for _ in 0..trials {
            let entries: Vec<u8> = (0..64).map(|_| rng.random_range(0..16)).collect();
            let expected = WatermarkMatrix::from_entries(3, entries).unwrap();
            let report = compare(&expected, &recovery).unwrap();
            patch_sum += report.patch_rate();
            bit_sum += report.bit_rate();
        }
        let patch_mean = patch_sum / trials as f64;
        let bit_mean = bit_sum / trials as f64;
        assert!(
            (patch_mean - 1.0 / 16.0).abs() < 0.015,
            "patch mean {patch_mean:.4}"
        );
        assert!((bit_mean - 0.5).abs() < 0.02, "bit mean {bit_mean:.4}");
    }

    #[test]
    fn localization_flags_nothing_on_match() {
        let report = perfect_report(2);
        let mask = localization_map(&report);
        assert_eq!(mask.tampered_count(), 0);
        let img = crate::synth::synthetic_image(128, 42);
        let overlay = render_overlay(&img, &mask).unwrap();
        assert_eq!(overlay.as_raw(), img.as_raw());
    }

    #[test]
    fn mask_bit_string_round_trip() {
        let report = perfect_report(2);
        let mask = localization_map(&report);
        let text = mask.to_bit_string();
        assert_eq!(text.len(), 16);
        let parsed = LocalizationMask::from_bit_string(&text).unwrap();
        assert_eq!(parsed, mask);
        assert!(LocalizationMask::from_bit_string("0101").is_ok());
        assert!(LocalizationMask::from_bit_string("01x1").is_err());
        assert!(LocalizationMask::from_bit_string("010").is_err());
    }

    #[test]
    fn splice_flags_only_spliced_patches() {
        let key = key(2);
        let matrix = key.generate().unwrap();
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(128, 50);
        let donor = crate::synth::synthetic_image(128, 51);
        let marked = embed(&img, &matrix.to_channelwise(), &cfg).unwrap();
        let outcome = crate::attack::apply(
            &marked,
            &crate::attack::AttackSpec::Splice {
                rect: crate::attack::PatchRect::new(1, 1, 2, 2),
                donor,
            },
        )
        .unwrap();
        let truth = outcome.tampered_patches.unwrap();
        let report = compare(&matrix, &extract(&outcome.image, 2, &cfg).unwrap()).unwrap();
        let flagged = localization_map(&report).tampered_patches();
        // strict locality: nothing outside the spliced block may flag;
        // inside, a spliced patch eludes detection only by re-encoding
        // its entry (chance 1/16 per patch)
        assert!(flagged.is_subset(&truth), "flagged {flagged:?}");
        assert!(flagged.len() >= 3, "flagged only {flagged:?}");
    }

    #[test]
    fn mask_and_patch_rate_are_consistent() {
        let key = key(2);
        let matrix = key.generate().unwrap();
        let cfg = EmbedConfig::default();
        let img = crate::synth::synthetic_image(128, 52);
        let report = compare(&matrix, &extract(&img, 2, &cfg).unwrap()).unwrap();
        let mask = localization_map(&report);
        let expected = 1.0 - mask.tampered_count() as f64 / 16.0;
        assert!((report.patch_rate() - expected).abs() < 1e-12);
    }

    #[test]
    fn heatmap_normalizes_by_max() {
        let report = perfect_report(2);
        let grid = cumulative_heatmap(std::slice::from_ref(&report)).unwrap();
        assert!(grid.values().iter().all(|&v| v == 0.0));

        // two masks sharing one mismatch position
        let a = LocalizationMask::from_bit_string("1000000000000000").unwrap();
        let b = LocalizationMask::from_bit_string("1100000000000000").unwrap();
        let grid = cumulative_heatmap_from_masks(&[a, b]).unwrap();
        assert_eq!(grid.value(0, 0), 1.0);
        assert_eq!(grid.value(1, 0), 0.5);
        assert_eq!(grid.value(2, 0), 0.0);
    }

    #[test]
    fn heatmap_rejects_empty_input() {
        assert!(cumulative_heatmap(&[]).is_err());
    }

    #[test]
    fn central_splices_heat_the_center() {
        let cfg = EmbedConfig::default();
        let mut reports = Vec::new();
        for seed in 0..6u64 {
            let key = key(3);
            let matrix = key.generate().unwrap();
            let img = crate::synth::synthetic_image(256, 70 + seed);
            let donor = crate::synth::synthetic_image(256, 90 + seed);
            let marked = embed(&img, &matrix.to_channelwise(), &cfg).unwrap();
            let spliced = crate::attack::apply(
                &marked,
                &crate::attack::AttackSpec::Splice {
                    rect: crate::attack::PatchRect::new(2, 2, 4, 4),
                    donor,
                },
            )
            .unwrap()
            .image;
            reports.push(compare(&matrix, &extract(&spliced, 3, &cfg).unwrap()).unwrap());
        }
        let grid = cumulative_heatmap(&reports).unwrap();
        let mut center = 0.0;
        let mut border = 0.0;
        for y in 0..8u32 {
            for x in 0..8u32 {
                if (2..6).contains(&x) && (2..6).contains(&y) {
                    center += grid.value(x, y) / 16.0;
                } else {
                    border += grid.value(x, y) / 48.0;
                }
            }
        }
        assert!(center > border + 0.5, "center {center:.3} border {border:.3}");
    }

    #[test]
    fn auc_matches_pair_enumeration() {
        assert_eq!(auc(&[1.0, 0.9], &[0.2, 0.1]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.5);
        // reals {0.9, 0.8}, fakes {0.85, 0.1}: wins 0.9>0.85, 0.9>0.1,
        // 0.8>0.1; loss 0.8<0.85 -> 3/4
        assert_eq!(auc(&[0.9, 0.8], &[0.85, 0.1]).unwrap(), 0.75);
        assert!(auc(&[], &[0.1]).is_err());
    }

    #[test]
    fn auc_is_invariant_under_monotone_transforms() {
        let real = [0.97, 0.94, 0.99, 0.90];
        let fake = [0.30, 0.45, 0.10, 0.62];
        let base = auc(&real, &fake).unwrap();
        let squash = |v: f64| (v * 3.0).tanh();
        let real_t: Vec<f64> = real.iter().map(|&v| squash(v)).collect();
        let fake_t: Vec<f64> = fake.iter().map(|&v| squash(v)).collect();
        assert!((auc(&real_t, &fake_t).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn cropping_correctness_counts_expectations() {
        let report = perfect_report(2);
        // nothing cropped, all matched -> 1.0
        assert_eq!(cropping_correctness(&report, &BTreeSet::new()), 1.0);
        // claim 4 patches were cropped: they matched, so 4 wrong
        let cropped: BTreeSet<_> = [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().collect();
        let correctness = cropping_correctness(&report, &cropped);
        assert!((correctness - 12.0 / 16.0).abs() < 1e-12);
    }
}
