//! Textual attack specs: `name` or `name:key=value,key=value`.

use std::collections::BTreeMap;

use fracmark::{AttackSpec, PatchRect};
use image::RgbImage;

use crate::CliError;

/// Parse one spec string. `donor` is consumed only by `splice`.
pub fn parse(spec: &str, donor: Option<RgbImage>) -> Result<AttackSpec, CliError> {
    let (name, params) = match spec.split_once(':') {
        Some((name, rest)) => (name.trim(), parse_params(rest)?),
        None => (spec.trim(), BTreeMap::new()),
    };
    let mut params = Params {
        map: params,
        spec: spec.to_string(),
    };
    let attack = match name {
        "identity" => AttackSpec::Identity,
        "jpeg" => AttackSpec::Jpeg {
            quality: params.take("quality", 80u32)? as u8,
        },
        "gaussian_noise" | "noise" => AttackSpec::GaussianNoise {
            sigma: params.take("sigma", 5.0f64)?,
            seed: params.take("seed", 17u64)?,
        },
        "gaussian_blur" | "blur" => AttackSpec::GaussianBlur {
            kernel: params.take("kernel", 3u32)? as u8,
            sigma: params.take("sigma", 1.0f64)?,
        },
        "median_blur" | "median" => AttackSpec::MedianBlur {
            kernel: params.take("kernel", 3u32)? as u8,
        },
        "resize" => AttackSpec::Resize {
            scale: params.take("scale", 0.5f64)?,
        },
        "crop_patches" | "crop" => AttackSpec::CropPatches {
            rect: params.rect()?,
        },
        "splice" => {
            let rect = params.rect()?;
            let donor = donor.ok_or_else(|| {
                CliError::Validation("splice needs a donor image (--donor)".to_string())
            })?;
            AttackSpec::Splice { rect, donor }
        }
        "global_perturb" | "perturb" => AttackSpec::GlobalPerturb {
            strength: params.take("strength", 1.0f64)?,
            seed: params.take("seed", 9u64)?,
        },
        other => {
            return Err(CliError::Validation(format!(
                "unknown attack {other:?} (identity, jpeg, noise, blur, median, resize, crop, splice, perturb)"
            )))
        }
    };
    params.finish()?;
    Ok(attack)
}

/// Attack specs may carry commas inside (crop:x=0,y=0,...), so evaluate
/// lists are separated by semicolons or whitespace instead.
pub fn parse_spec_list(list: &str) -> Vec<String> {
    list.split([';', ' '])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse_params(rest: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for pair in rest.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("attack parameter {pair:?} is not key=value"))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Params {
    map: BTreeMap<String, String>,
    spec: String,
}

impl Params {
    fn take<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        match self.map.remove(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                CliError::Validation(format!("bad value {raw:?} for {key} in {:?}", self.spec))
            }),
        }
    }

    fn rect(&mut self) -> Result<PatchRect, CliError> {
        Ok(PatchRect::new(
            self.take("x", 0u32)?,
            self.take("y", 0u32)?,
            self.take("w", 1u32)?,
            self.take("h", 1u32)?,
        ))
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some(key) = self.map.keys().next() {
            return Err(CliError::Validation(format!(
                "unknown parameter {key:?} in attack {:?}",
                self.spec
            )));
        }
        Ok(())
    }
}
