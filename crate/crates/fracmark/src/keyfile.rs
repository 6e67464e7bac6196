//! Key file: the JSON form of a watermark key.
//!
//! The two real-valued parameters are serialized as exact decimal strings
//! with 18 significant digits so that a key file read back on any machine
//! reproduces bit-identical binary64 values, which the keystream
//! regeneration contract depends on. Loading accepts plain JSON numbers
//! too (hand-written keys); saving always writes the exact-string form.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::chaos::ChaosParams;
use crate::curve::{CurveKind, VariationParams};
use crate::error::{Error, Result};
use crate::watermark::WatermarkKey;

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized key schema. Field order is the canonical serialization
/// order; the fingerprint hashes exactly these bytes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KeyFile {
    pub schema_version: u32,
    pub kind: String,
    pub n: u8,
    pub r: u8,
    pub m: u8,
    pub o: u8,
    #[serde(serialize_with = "serialize_exact", deserialize_with = "deserialize_real")]
    pub x0: f64,
    #[serde(serialize_with = "serialize_exact", deserialize_with = "deserialize_real")]
    pub a: f64,
    pub k: u32,
    pub d: u8,
}

fn serialize_exact<S: Serializer>(value: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&format!("{value:.17e}"))
}

fn deserialize_real<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<f64, D::Error> {
    use serde::de::Error as DeError;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Real {
        Number(f64),
        Text(String),
    }

    match Real::deserialize(deserializer)? {
        Real::Number(v) => Ok(v),
        Real::Text(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| DeError::custom(format!("invalid real {s:?}: {e}"))),
    }
}

impl KeyFile {
    pub fn from_key(key: &WatermarkKey) -> Self {
        let (r, m, o) = key.variation.codes();
        KeyFile {
            schema_version: SCHEMA_VERSION,
            kind: key.kind.name().to_string(),
            n: key.order,
            r,
            m,
            o,
            x0: key.chaos.x0(),
            a: key.chaos.a(),
            k: key.chaos.warmup(),
            d: key.chaos.digit(),
        }
    }

    /// Validate every field and build the in-memory key.
    pub fn to_key(&self) -> Result<WatermarkKey> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::parameter(format!(
                "unsupported key schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let kind = CurveKind::from_name(&self.kind)?;
        let variation = VariationParams::from_codes(self.r, self.m, self.o)?;
        let chaos = ChaosParams::new(self.x0, self.a, self.k, self.d)?;
        WatermarkKey::new(kind, self.n, variation, chaos)
    }

    /// Canonical JSON bytes: compact, fixed field order, exact reals.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("key file serialization cannot fail")
    }

    /// SHA-256 of the canonical serialization, hex.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let pretty =
            serde_json::to_string_pretty(self).expect("key file serialization cannot fail");
        std::fs::write(path, pretty + "\n")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parameter(format!("cannot read key file {path:?}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::parameter(format!("cannot parse key file {path:?}: {e}")))
    }
}

/// Sample a valid key uniformly within the documented parameter ranges.
/// Hilbert and Z-order are equally likely, Z-order keys always carry
/// `o = 0`, and the curve order is fixed at 3 (256x256 images).
pub fn random_key(seed: u64) -> WatermarkKey {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let kind = if rng.random_bool(0.5) {
            CurveKind::Hilbert
        } else {
            CurveKind::ZOrder
        };
        let order = 3u8;
        let r = rng.random_range(0..4u8);
        let m = rng.random_range(0..9u8);
        let o = match kind {
            CurveKind::Hilbert => rng.random_range(0..4u8),
            CurveKind::ZOrder => 0,
        };
        let x0 = rng.random_range(0.1..=0.9f64);
        let a = rng.random_range(3.7..4.0f64);
        let k = rng.random_range(100..=1000u32);
        let d = rng.random_range(2..=20u8);
        let variation = VariationParams::from_codes(r, m, o).expect("codes in range");
        let Ok(chaos) = ChaosParams::new(x0, a, k, d) else {
            continue; // resample the measure-zero fixed-point draw
        };
        // a draw inside one of the map's periodic windows can yield a
        // constant digit stream; resample those too so sampled keys are
        // always usable
        if chaos.keystream(1 << (2 * order)).is_err() {
            continue;
        }
        let Ok(key) = WatermarkKey::new(kind, order, variation, chaos) else {
            continue;
        };
        return key;
    }
}
