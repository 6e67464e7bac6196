//! Shape variations: rotation, mirroring, and order modification codes.

use crate::curve::CurveKind;
use crate::error::{Error, Result};

/// Whole-grid rotation, clockwise. Code values 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rotation {
    R0 = 0,
    R90 = 1,
    R180 = 2,
    R270 = 3,
}

impl Rotation {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Rotation::R0),
            1 => Ok(Rotation::R90),
            2 => Ok(Rotation::R180),
            3 => Ok(Rotation::R270),
            _ => Err(Error::parameter(format!(
                "rotation code {code} out of range [0, 3]"
            ))),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub(super) fn apply(self, (x, y): (u32, u32), side: u32) -> (u32, u32) {
        match self {
            Rotation::R0 => (x, y),
            Rotation::R90 => (side - 1 - y, x),
            Rotation::R180 => (side - 1 - x, side - 1 - y),
            Rotation::R270 => (y, side - 1 - x),
        }
    }
}

/// Local mirror of one half-band or quadrant of the grid. Code values 0..=8.
///
/// Half-band codes flip the named half in place along its short axis
/// (Top flips the top rows upside down, Left flips the left columns
/// left-to-right); corner codes rotate the named quadrant by 180°. Every
/// code is an involution and a bijection of the grid. Whole-grid
/// reflections are deliberately not in this set: composed with the
/// rotations and the Reverse order modification they would duplicate
/// other variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mirror {
    None = 0,
    Top = 1,
    Bottom = 2,
    Left = 3,
    Right = 4,
    TopLeft = 5,
    TopRight = 6,
    BottomLeft = 7,
    BottomRight = 8,
}

impl Mirror {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Mirror::None),
            1 => Ok(Mirror::Top),
            2 => Ok(Mirror::Bottom),
            3 => Ok(Mirror::Left),
            4 => Ok(Mirror::Right),
            5 => Ok(Mirror::TopLeft),
            6 => Ok(Mirror::TopRight),
            7 => Ok(Mirror::BottomLeft),
            8 => Ok(Mirror::BottomRight),
            _ => Err(Error::parameter(format!(
                "mirror code {code} out of range [0, 8]"
            ))),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub(super) fn apply(self, (x, y): (u32, u32), side: u32) -> (u32, u32) {
        let half = side / 2;
        match self {
            Mirror::None => (x, y),
            Mirror::Top if y < half => (x, half - 1 - y),
            Mirror::Bottom if y >= half => (x, half + (side - 1 - y)),
            Mirror::Left if x < half => (half - 1 - x, y),
            Mirror::Right if x >= half => (half + (side - 1 - x), y),
            Mirror::TopLeft | Mirror::TopRight | Mirror::BottomLeft | Mirror::BottomRight => {
                let qx = if matches!(self, Mirror::TopLeft | Mirror::BottomLeft) {
                    0
                } else {
                    half
                };
                let qy = if matches!(self, Mirror::TopLeft | Mirror::TopRight) {
                    0
                } else {
                    half
                };
                if (qx..qx + half).contains(&x) && (qy..qy + half).contains(&y) {
                    (qx + half - 1 - (x - qx), qy + half - 1 - (y - qy))
                } else {
                    (x, y)
                }
            }
            _ => (x, y),
        }
    }
}

/// Reordering of the visit sequence. Code values 0..=3.
///
/// - `Reverse` walks the curve backwards.
/// - `Zigzag` splits the sequence into `2^n` runs of `2^n` indices and
///   reverses every odd run (boustrophedon over runs).
/// - `CrossFlip` swaps the two halves of the sequence and then the two
///   quarters inside each half, i.e. the four quarter blocks end up in
///   reverse block order with their interiors intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderMod {
    None = 0,
    Reverse = 1,
    Zigzag = 2,
    CrossFlip = 3,
}

impl OrderMod {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(OrderMod::None),
            1 => Ok(OrderMod::Reverse),
            2 => Ok(OrderMod::Zigzag),
            3 => Ok(OrderMod::CrossFlip),
            _ => Err(Error::parameter(format!(
                "order modification code {code} out of range [0, 3]"
            ))),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub(super) fn apply(self, coords: &mut [(u32, u32)], side: u32) {
        match self {
            OrderMod::None => {}
            OrderMod::Reverse => coords.reverse(),
            OrderMod::Zigzag => {
                let run = side as usize;
                for (j, chunk) in coords.chunks_mut(run).enumerate() {
                    if j % 2 == 1 {
                        chunk.reverse();
                    }
                }
            }
            OrderMod::CrossFlip => {
                let quarter = coords.len() / 4;
                let original = coords.to_vec();
                for (block, src) in [3, 2, 1, 0].into_iter().enumerate() {
                    coords[block * quarter..(block + 1) * quarter]
                        .copy_from_slice(&original[src * quarter..(src + 1) * quarter]);
                }
            }
        }
    }
}

/// The `(r, m, o)` variation triple applied to a base curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariationParams {
    pub rotation: Rotation,
    pub mirror: Mirror,
    pub order_mod: OrderMod,
}

impl VariationParams {
    pub fn identity() -> Self {
        VariationParams {
            rotation: Rotation::R0,
            mirror: Mirror::None,
            order_mod: OrderMod::None,
        }
    }

    /// Build from the numeric `(r, m, o)` codes of a key file.
    pub fn from_codes(r: u8, m: u8, o: u8) -> Result<Self> {
        Ok(VariationParams {
            rotation: Rotation::from_code(r)?,
            mirror: Mirror::from_code(m)?,
            order_mod: OrderMod::from_code(o)?,
        })
    }

    pub fn codes(&self) -> (u8, u8, u8) {
        (
            self.rotation.code(),
            self.mirror.code(),
            self.order_mod.code(),
        )
    }

    /// Z-order curves omit order modifications.
    pub(super) fn check_compatible(&self, kind: CurveKind) -> Result<()> {
        if kind == CurveKind::ZOrder && self.order_mod != OrderMod::None {
            return Err(Error::parameter(
                "z-order curves do not support order modifications (o must be 0)".to_string(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for r in 0..4 {
            for m in 0..9 {
                for o in 0..4 {
                    let v = VariationParams::from_codes(r, m, o).unwrap();
                    assert_eq!(v.codes(), (r, m, o));
                }
            }
        }
        assert!(VariationParams::from_codes(4, 0, 0).is_err());
        assert!(VariationParams::from_codes(0, 9, 0).is_err());
        assert!(VariationParams::from_codes(0, 0, 4).is_err());
    }

    #[test]
    fn mirrors_are_involutions() {
        let side = 8;
        for code in 0..9 {
            let m = Mirror::from_code(code).unwrap();
            for x in 0..side {
                for y in 0..side {
                    let once = m.apply((x, y), side);
                    assert_eq!(m.apply(once, side), (x, y), "mirror {code} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn rotations_compose_to_identity() {
        let side = 8;
        for x in 0..side {
            for y in 0..side {
                let mut p = (x, y);
                for _ in 0..4 {
                    p = Rotation::R90.apply(p, side);
                }
                assert_eq!(p, (x, y));
            }
        }
    }

    #[test]
    fn zigzag_reverses_odd_runs() {
        let mut seq: Vec<(u32, u32)> = (0..16).map(|i| (i, 0)).collect();
        OrderMod::Zigzag.apply(&mut seq, 4);
        let order: Vec<u32> = seq.iter().map(|p| p.0).collect();
        assert_eq!(
            order,
            vec![0, 1, 2, 3, 7, 6, 5, 4, 8, 9, 10, 11, 15, 14, 13, 12]
        );
    }

    #[test]
    fn cross_flip_reverses_quarter_blocks() {
        let mut seq: Vec<(u32, u32)> = (0..16).map(|i| (i, 0)).collect();
        OrderMod::CrossFlip.apply(&mut seq, 4);
        let order: Vec<u32> = seq.iter().map(|p| p.0).collect();
        assert_eq!(
            order,
            vec![12, 13, 14, 15, 8, 9, 10, 11, 4, 5, 6, 7, 0, 1, 2, 3]
        );
    }
}
