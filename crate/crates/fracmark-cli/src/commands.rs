//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use image::RgbImage;
use rayon::prelude::*;

use fracmark::{
    apply, compare, decide, extract, localization_map, psnr, render_overlay, ssim, ChaosParams,
    CurveKind, EmbedConfig, KeyFile, Label, LocalizationMask, VariationParams, WatermarkKey,
};

use crate::attack_arg;
use crate::CliError;

const CSV_HEADER: [&str; 7] = [
    "image",
    "attack",
    "params",
    "bit_rate",
    "patch_rate",
    "verdict",
    "mask",
];

/// Benign attack grid used when evaluate gets no --attacks.
const DEFAULT_ATTACKS: &str =
    "identity;jpeg:quality=80;noise:sigma=5,seed=17;blur:kernel=3,sigma=1.0;median:kernel=3;resize:scale=0.5";

fn load_rgb(path: &Path) -> Result<RgbImage, CliError> {
    let img = image::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(img.into_rgb8())
}

fn save_png(img: &RgbImage, path: &Path) -> Result<(), CliError> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_key(path: &Path) -> Result<WatermarkKey, CliError> {
    Ok(KeyFile::load(path)?.to_key()?)
}

fn config(delta: Option<f64>) -> Result<EmbedConfig, CliError> {
    let cfg = match delta {
        Some(delta) => EmbedConfig::with_delta(delta),
        None => EmbedConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn format_rate(rate: f64) -> String {
    format!("{rate:.6}")
}

fn format_psnr(value: f64) -> String {
    if value.is_infinite() {
        "identical".to_string()
    } else {
        format!("{value:.3} dB")
    }
}

fn check_corpus_side(size: u32) -> Result<u8, CliError> {
    let patches = size / fracmark::PATCH_SIZE;
    if size.is_multiple_of(fracmark::PATCH_SIZE) && patches.is_power_of_two() && patches >= 2 {
        let order = patches.trailing_zeros() as u8;
        if order <= 8 {
            return Ok(order);
        }
    }
    Err(CliError::Validation(format!(
        "size {size} is not 32 * 2^n for n in [1, 8]"
    )))
}

#[allow(clippy::too_many_arguments)]
pub fn keygen(
    out: &Path,
    seed: Option<u64>,
    kind: Option<&str>,
    n: u8,
    r: u8,
    m: u8,
    o: u8,
    x0: Option<f64>,
    a: Option<f64>,
    k: Option<u32>,
    d: Option<u8>,
) -> Result<ExitCode, CliError> {
    let key = match seed {
        Some(seed) => fracmark::keyfile::random_key(seed),
        None => {
            let missing = |flag: &str| {
                CliError::Validation(format!("--{flag} is required without --seed"))
            };
            let kind = CurveKind::from_name(kind.ok_or_else(|| missing("kind"))?)?;
            let chaos = ChaosParams::new(
                x0.ok_or_else(|| missing("x0"))?,
                a.ok_or_else(|| missing("a"))?,
                k.ok_or_else(|| missing("k"))?,
                d.ok_or_else(|| missing("d"))?,
            )?;
            WatermarkKey::new(kind, n, VariationParams::from_codes(r, m, o)?, chaos)?
        }
    };
    let file = KeyFile::from_key(&key);
    file.save(out)?;
    println!("key: {}", out.display());
    println!("fingerprint: {}", file.fingerprint());
    Ok(ExitCode::SUCCESS)
}

pub fn embed(
    input: &Path,
    key_path: &Path,
    out: &Path,
    delta: Option<f64>,
) -> Result<ExitCode, CliError> {
    let key = load_key(key_path)?;
    let cfg = config(delta)?;
    let img = load_rgb(input)?;
    let matrix = key.generate()?;
    let marked = fracmark::embed(&img, &matrix.to_channelwise(), &cfg)?;
    save_png(&marked, out)?;
    println!("embedded: {}", out.display());
    println!("psnr: {}", format_psnr(psnr(&img, &marked)?));
    println!("ssim: {:.4}", ssim(&img, &marked)?);
    Ok(ExitCode::SUCCESS)
}

pub fn verify(
    input: &Path,
    key_path: &Path,
    tau: f64,
    delta: Option<f64>,
    overlay: Option<&Path>,
    csv: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let key = load_key(key_path)?;
    let cfg = config(delta)?;
    let img = load_rgb(input)?;
    let matrix = key.generate()?;
    let recovered = extract(&img, key.order, &cfg)?;
    let report = compare(&matrix, &recovered)?;
    let verdict = decide(&report, tau)?;
    let mask = localization_map(&report);

    println!("bit_rate: {}", format_rate(report.bit_rate()));
    println!("patch_rate: {}", format_rate(report.patch_rate()));
    println!("verdict: {} (tau {:.2})", verdict.label, verdict.tau);
    println!("tampered_patches: {}", mask.tampered_count());

    if let Some(path) = overlay {
        save_png(&render_overlay(&img, &mask)?, path)?;
        println!("overlay: {}", path.display());
    }
    if let Some(path) = csv {
        let image_name = input
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| input.display().to_string());
        append_csv_row(
            path,
            &[
                image_name,
                String::new(),
                String::new(),
                format_rate(report.bit_rate()),
                format_rate(report.patch_rate()),
                verdict.label.to_string(),
                mask.to_bit_string(),
            ],
        )?;
        println!("csv: {}", path.display());
    }
    Ok(match verdict.label {
        Label::Real => ExitCode::SUCCESS,
        Label::Fake => ExitCode::from(1),
    })
}

pub fn attack(
    input: &Path,
    out: &Path,
    spec: &str,
    donor: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let img = load_rgb(input)?;
    let donor = donor.map(load_rgb).transpose()?;
    let spec = attack_arg::parse(spec, donor)?;
    let outcome = apply(&img, &spec)?;
    save_png(&outcome.image, out)?;
    println!("attacked: {} ({})", out.display(), spec.name());
    if let Some(patches) = outcome.tampered_patches {
        let coords: Vec<String> = patches.iter().map(|(x, y)| format!("({x},{y})")).collect();
        println!("destroyed_patches: {}", coords.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}

struct EvalRow {
    image: String,
    attack: String,
    params: String,
    bit_rate: f64,
    patch_rate: f64,
    verdict: Label,
    mask: String,
}

pub fn evaluate(
    corpus: &Path,
    key_path: &Path,
    attacks: Option<&str>,
    csv_path: &Path,
    tau: f64,
    delta: Option<f64>,
) -> Result<ExitCode, CliError> {
    let key = load_key(key_path)?;
    let cfg = config(delta)?;

    let mut paths: Vec<PathBuf> = fs::read_dir(corpus)
        .map_err(|e| CliError::Io(format!("{}: {e}", corpus.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|ext| ext.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Validation(format!(
            "no PNG images in corpus directory {}",
            corpus.display()
        )));
    }
    let images: Vec<(String, RgbImage)> = paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            load_rgb(p).map(|img| (name, img))
        })
        .collect::<Result<_, _>>()?;

    let spec_strings = attack_arg::parse_spec_list(attacks.unwrap_or(DEFAULT_ATTACKS));
    if spec_strings.is_empty() {
        return Err(CliError::Validation("empty attack list".to_string()));
    }

    let matrix = key.generate()?;
    let planes = matrix.to_channelwise();

    let rows: Vec<Vec<EvalRow>> = images
        .par_iter()
        .enumerate()
        .map(|(i, (name, img))| -> Result<Vec<EvalRow>, CliError> {
            let marked = fracmark::embed(img, &planes, &cfg)?;
            let mut rows = Vec::with_capacity(spec_strings.len());
            for spec_str in &spec_strings {
                // splice donors come from the next corpus image, cyclically
                let donor = Some(images[(i + 1) % images.len()].1.clone());
                let spec = attack_arg::parse(spec_str, donor)?;
                let outcome = apply(&marked, &spec)?;
                let report = compare(&matrix, &extract(&outcome.image, key.order, &cfg)?)?;
                let verdict = decide(&report, tau)?;
                rows.push(EvalRow {
                    image: name.clone(),
                    attack: spec.name().to_string(),
                    params: spec.params_string(),
                    bit_rate: report.bit_rate(),
                    patch_rate: report.patch_rate(),
                    verdict: verdict.label,
                    mask: localization_map(&report).to_bit_string(),
                });
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;

    let mut writer = csv::Writer::from_path(csv_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    writer.write_record(CSV_HEADER)?;
    for row in rows.iter().flatten() {
        writer.write_record([
            row.image.as_str(),
            row.attack.as_str(),
            row.params.as_str(),
            &format_rate(row.bit_rate),
            &format_rate(row.patch_rate),
            &row.verdict.to_string(),
            row.mask.as_str(),
        ])?;
    }
    writer.flush().map_err(CliError::from)?;

    // per-attack mean summary
    println!(
        "{:<16} {:<28} {:>10} {:>12} {:>6}",
        "attack", "params", "bit_rate", "patch_rate", "real"
    );
    for spec_idx in 0..spec_strings.len() {
        let per_attack: Vec<&EvalRow> = rows.iter().map(|r| &r[spec_idx]).collect();
        let count = per_attack.len() as f64;
        let bit_mean = per_attack.iter().map(|r| r.bit_rate).sum::<f64>() / count;
        let patch_mean = per_attack.iter().map(|r| r.patch_rate).sum::<f64>() / count;
        let real = per_attack
            .iter()
            .filter(|r| r.verdict == Label::Real)
            .count();
        println!(
            "{:<16} {:<28} {:>9.2}% {:>11.2}% {:>3}/{}",
            per_attack[0].attack,
            per_attack[0].params,
            bit_mean * 100.0,
            patch_mean * 100.0,
            real,
            per_attack.len()
        );
    }
    println!("csv: {}", csv_path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn heatmap(inputs: &[PathBuf], out: &Path, cell: u32) -> Result<ExitCode, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Validation(
            "heatmap needs at least one report CSV".to_string(),
        ));
    }
    let mut masks = Vec::new();
    for path in inputs {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let headers = reader.headers()?.clone();
        let mask_idx = headers
            .iter()
            .position(|h| h == "mask")
            .ok_or_else(|| {
                CliError::Validation(format!("{}: no mask column", path.display()))
            })?;
        for record in reader.records() {
            let record = record?;
            let bits = record.get(mask_idx).unwrap_or("");
            if bits.is_empty() {
                continue;
            }
            masks.push(LocalizationMask::from_bit_string(bits)?);
        }
    }
    if masks.is_empty() {
        return Err(CliError::Validation(
            "report CSVs contain no masks".to_string(),
        ));
    }
    let grid = fracmark::detect::cumulative_heatmap_from_masks(&masks)?;
    save_png(&grid.render(cell), out)?;
    println!("heatmap: {} ({} masks)", out.display(), masks.len());
    Ok(ExitCode::SUCCESS)
}

pub fn prepare(inputs: &[PathBuf], out_dir: &Path, size: u32) -> Result<ExitCode, CliError> {
    check_corpus_side(size)?;
    if inputs.is_empty() {
        return Err(CliError::Validation("no input images".to_string()));
    }
    fs::create_dir_all(out_dir)?;
    for input in inputs {
        let img = load_rgb(input)?;
        let side = img.width().min(img.height());
        let x0 = (img.width() - side) / 2;
        let y0 = (img.height() - side) / 2;
        let cropped = image::imageops::crop_imm(&img, x0, y0, side, side).to_image();
        let resized =
            image::imageops::resize(&cropped, size, size, image::imageops::FilterType::Lanczos3);
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".to_string());
        let out = out_dir.join(format!("{stem}.png"));
        save_png(&resized, &out)?;
        println!("prepared: {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn synth(out_dir: &Path, count: usize, size: u32, seed: u64) -> Result<ExitCode, CliError> {
    check_corpus_side(size)?;
    if count == 0 {
        return Err(CliError::Validation("count must be >= 1".to_string()));
    }
    fs::create_dir_all(out_dir)?;
    for i in 0..count {
        let img = fracmark::synth::synthetic_image(size, seed + i as u64);
        let out = out_dir.join(format!("synth_{i:03}.png"));
        save_png(&img, &out)?;
    }
    println!("synthesized {count} images in {}", out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn append_csv_row(path: &Path, fields: &[String; 7]) -> Result<(), CliError> {
    let new_file = !path.exists();
    let file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut writer = csv::WriterBuilder::new().from_writer(file);
    if new_file {
        writer.write_record(CSV_HEADER)?;
    }
    writer.write_record(fields)?;
    writer.flush()?;
    Ok(())
}
