//! Watermark matrices: curve encoding, chaotic encryption, bit-plane layout.
//!
//! A watermark is never stored. It regenerates on demand from a
//! [`WatermarkKey`]: build the curve variant, rank-encode it into a 4-bit
//! matrix, then add the chaotic digit stream modulo 16 along the curve.

use crate::chaos::{ChaosParams, DigitKeystream};
use crate::curve::{CurveKind, CurveTraversal, VariationParams};
use crate::error::{Error, Result};

/// The confidential parameter tuple from which a watermark regenerates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WatermarkKey {
    pub kind: CurveKind,
    pub order: u8,
    pub variation: VariationParams,
    pub chaos: ChaosParams,
}

impl WatermarkKey {
    pub fn new(
        kind: CurveKind,
        order: u8,
        variation: VariationParams,
        chaos: ChaosParams,
    ) -> Result<Self> {
        crate::curve::validate_order(order)?;
        // Surface the z-order / order-modification clash at key construction
        // rather than first use.
        CurveTraversal::base(kind, order)?.apply_variation(&variation)?;
        Ok(WatermarkKey {
            kind,
            order,
            variation,
            chaos,
        })
    }

    /// Grid side `2^n`; the watermarked image side is `32 * 2^n`.
    pub fn side(&self) -> u32 {
        1 << self.order
    }

    /// The curve variant selected by this key.
    pub fn traversal(&self) -> Result<CurveTraversal> {
        CurveTraversal::base(self.kind, self.order)?.apply_variation(&self.variation)
    }

    /// Regenerate the encrypted watermark matrix. Pure function of the key.
    pub fn generate(&self) -> Result<WatermarkMatrix> {
        let traversal = self.traversal()?;
        let raw = raw_matrix(&traversal);
        let keystream = self.chaos.keystream(traversal.len())?;
        encrypt(&raw, &traversal, &keystream)
    }
}

/// `2^n x 2^n` grid of 4-bit entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkMatrix {
    order: u8,
    entries: Vec<u8>,
}

impl WatermarkMatrix {
    /// Build from row-major 4-bit entries. Mostly useful for tests; real
    /// watermarks come from [`WatermarkKey::generate`].
    pub fn from_entries(order: u8, entries: Vec<u8>) -> Result<Self> {
        crate::curve::validate_order(order)?;
        let side = 1usize << order;
        if entries.len() != side * side {
            return Err(Error::dimension(format!(
                "expected {} entries for order {order}, got {}",
                side * side,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&e| e > 15) {
            return Err(Error::parameter(format!(
                "entry value {bad} does not fit in 4 bits"
            )));
        }
        Ok(WatermarkMatrix { order, entries })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn side(&self) -> u32 {
        1 << self.order
    }

    /// Entry at grid position, in `0..=15`.
    pub fn entry(&self, x: u32, y: u32) -> u8 {
        self.entries[self.index(x, y)]
    }

    /// Bit `plane` of the entry, MSB first: plane 0 is bit 3.
    pub fn entry_bit(&self, plane: usize, x: u32, y: u32) -> u8 {
        (self.entry(x, y) >> (3 - plane)) & 1
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.side() && y < self.side());
        (y * self.side() + x) as usize
    }

    /// Split into four binary planes, MSB first.
    pub fn to_channelwise(&self) -> ChannelwiseWatermark {
        let cells = self.entries.len();
        let mut planes = std::array::from_fn::<Vec<u8>, 4, _>(|_| Vec::with_capacity(cells));
        for &entry in &self.entries {
            for (plane, store) in planes.iter_mut().enumerate() {
                store.push((entry >> (3 - plane)) & 1);
            }
        }
        ChannelwiseWatermark {
            order: self.order,
            planes,
        }
    }
}

/// Four binary planes of a watermark matrix, MSB first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelwiseWatermark {
    order: u8,
    planes: [Vec<u8>; 4],
}

impl ChannelwiseWatermark {
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn side(&self) -> u32 {
        1 << self.order
    }

    /// Bit of `plane` at grid position; plane 0 carries the MSB.
    pub fn bit(&self, plane: usize, x: u32, y: u32) -> u8 {
        self.planes[plane][(y * self.side() + x) as usize]
    }

    pub fn plane(&self, plane: usize) -> &[u8] {
        &self.planes[plane]
    }

    /// Reassemble the 4-bit matrix. Exact inverse of
    /// [`WatermarkMatrix::to_channelwise`].
    pub fn to_matrix(&self) -> WatermarkMatrix {
        let side = self.side();
        let cells = (side * side) as usize;
        let mut entries = Vec::with_capacity(cells);
        for i in 0..cells {
            let mut value = 0u8;
            for plane in 0..4 {
                value = (value << 1) | self.planes[plane][i];
            }
            entries.push(value);
        }
        WatermarkMatrix {
            order: self.order,
            entries,
        }
    }
}

/// Rank-encode a traversal: the cell visited at index `i` holds `i mod 16`,
/// so the matrix captures both the shape and the walk direction.
pub fn raw_matrix(traversal: &CurveTraversal) -> WatermarkMatrix {
    let side = traversal.side();
    let mut entries = vec![0u8; (side * side) as usize];
    for (i, &(x, y)) in traversal.coords().iter().enumerate() {
        entries[(y * side + x) as usize] = (i % 16) as u8;
    }
    WatermarkMatrix {
        order: traversal.order(),
        entries,
    }
}

/// One-way encryption: entry at the i-th visited cell becomes
/// `(raw + digit_i) mod 16`. Without the keystream the raw ranks cannot
/// be recovered.
pub fn encrypt(
    raw: &WatermarkMatrix,
    traversal: &CurveTraversal,
    keystream: &DigitKeystream,
) -> Result<WatermarkMatrix> {
    if traversal.order() != raw.order {
        return Err(Error::dimension(format!(
            "traversal order {} does not match matrix order {}",
            traversal.order(),
            raw.order
        )));
    }
    if keystream.len() != traversal.len() {
        return Err(Error::dimension(format!(
            "keystream length {} does not match traversal length {}",
            keystream.len(),
            traversal.len()
        )));
    }
    let side = raw.side();
    let mut entries = raw.entries.clone();
    for (i, &(x, y)) in traversal.coords().iter().enumerate() {
        let idx = (y * side + x) as usize;
        entries[idx] = (entries[idx] + keystream.digits()[i]) % 16;
    }
    Ok(WatermarkMatrix {
        order: raw.order,
        entries,
    })
}
