//! Space-filling curve traversals and their shape variations.
//!
//! A traversal is an ordered visit of every cell of a `2^n x 2^n` grid.
//! Two curve families are supported: the Hilbert curve (continuous,
//! unit-step) and the Z-order / Morton curve (bit interleaving). A
//! traversal can be reshaped by a rotation, a half- or quadrant-local
//! mirror, and an order modification; together these span the variant
//! family used for watermark generation.

mod hilbert;
mod variation;
mod zorder;

pub use variation::{Mirror, OrderMod, Rotation, VariationParams};

use crate::error::{Error, Result};

/// Smallest supported curve order.
pub const MIN_ORDER: u8 = 1;
/// Largest supported curve order (grid side 256).
pub const MAX_ORDER: u8 = 8;
/// Smallest order for which the variant family is guaranteed distinct.
pub const MIN_VARIANT_ORDER: u8 = 2;

/// The curve family a traversal was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Hilbert,
    ZOrder,
}

impl CurveKind {
    /// Stable lowercase name used in key files and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Hilbert => "hilbert",
            CurveKind::ZOrder => "zorder",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "hilbert" => Ok(CurveKind::Hilbert),
            "zorder" => Ok(CurveKind::ZOrder),
            other => Err(Error::parameter(format!(
                "unknown curve kind {other:?} (expected \"hilbert\" or \"zorder\")"
            ))),
        }
    }
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered, bijective visit of every cell of a `2^n x 2^n` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveTraversal {
    kind: CurveKind,
    order: u8,
    coords: Vec<(u32, u32)>,
}

pub(crate) fn validate_order(order: u8) -> Result<()> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::parameter(format!(
            "curve order {order} out of range [{MIN_ORDER}, {MAX_ORDER}]"
        )));
    }
    Ok(())
}

impl CurveTraversal {
    /// Hilbert curve of the given order.
    ///
    /// Base orientation convention: the order-1 seed is the "U" opening
    /// to the right, `(0,0) -> (0,1) -> (1,1) -> (1,0)`; higher orders
    /// follow the classic quadrant recursion, always starting at `(0,0)`
    /// and ending at `(2^n - 1, 0)`.
    pub fn hilbert(order: u8) -> Result<Self> {
        validate_order(order)?;
        Ok(CurveTraversal {
            kind: CurveKind::Hilbert,
            order,
            coords: hilbert::traversal(order),
        })
    }

    /// Z-order (Morton) curve of the given order, row-major convention:
    /// x is read from the even index bits and y from the odd ones.
    pub fn z_order(order: u8) -> Result<Self> {
        validate_order(order)?;
        Ok(CurveTraversal {
            kind: CurveKind::ZOrder,
            order,
            coords: zorder::traversal(order),
        })
    }

    /// Base traversal for `kind`.
    pub fn base(kind: CurveKind, order: u8) -> Result<Self> {
        match kind {
            CurveKind::Hilbert => Self::hilbert(order),
            CurveKind::ZOrder => Self::z_order(order),
        }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Grid side length `2^n`.
    pub fn side(&self) -> u32 {
        1 << self.order
    }

    /// Number of visited cells, `2^(2n)`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    /// First visited cell.
    pub fn start(&self) -> (u32, u32) {
        self.coords[0]
    }

    /// Last visited cell.
    pub fn end(&self) -> (u32, u32) {
        *self.coords.last().expect("traversal is never empty")
    }

    /// Reshape by rotation, then mirroring, then order modification.
    ///
    /// `(R0, None, None)` returns the traversal unchanged. The result
    /// visits the same grid, still exactly once per cell.
    pub fn apply_variation(&self, variation: &VariationParams) -> Result<CurveTraversal> {
        variation.check_compatible(self.kind)?;
        let side = self.side();
        let mut coords: Vec<(u32, u32)> = self
            .coords
            .iter()
            .map(|&p| variation.mirror.apply(variation.rotation.apply(p, side), side))
            .collect();
        variation.order_mod.apply(&mut coords, side);
        Ok(CurveTraversal {
            kind: self.kind,
            order: self.order,
            coords,
        })
    }

    /// Canonical text form: one `x,y` pair per line, traversal order.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::with_capacity(self.coords.len() * 6);
        for &(x, y) in &self.coords {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    /// True when every cell of the grid appears exactly once.
    pub fn is_bijective(&self) -> bool {
        let side = self.side() as usize;
        let mut seen = vec![false; side * side];
        for &(x, y) in &self.coords {
            let idx = y as usize * side + x as usize;
            if x as usize >= side || y as usize >= side || seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
        self.coords.len() == side * side
    }
}

/// All shape variants of the base curve, enumerated in `(r, m, o)` code
/// order: 144 for Hilbert (4 x 9 x 4), 36 for Z-order (4 x 9, no order
/// modifications).
///
/// Requires `order >= 2`; on the 2x2 grid the half-band mirrors collapse
/// and the family is no longer distinct.
pub fn enumerate_variants(
    kind: CurveKind,
    order: u8,
) -> Result<Vec<(VariationParams, CurveTraversal)>> {
    validate_order(order)?;
    if order < MIN_VARIANT_ORDER {
        return Err(Error::parameter(format!(
            "variant enumeration requires order >= {MIN_VARIANT_ORDER}, got {order}"
        )));
    }
    let base = CurveTraversal::base(kind, order)?;
    let order_codes: &[u8] = match kind {
        CurveKind::Hilbert => &[0, 1, 2, 3],
        CurveKind::ZOrder => &[0],
    };
    let mut variants = Vec::with_capacity(4 * 9 * order_codes.len());
    for r in 0..4u8 {
        for m in 0..9u8 {
            for &o in order_codes {
                let params = VariationParams::from_codes(r, m, o)?;
                let traversal = base.apply_variation(&params)?;
                variants.push((params, traversal));
            }
        }
    }
    Ok(variants)
}
