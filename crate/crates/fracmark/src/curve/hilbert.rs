//! Hilbert curve index-to-coordinate mapping.

/// Full traversal of the `2^n x 2^n` grid in Hilbert order.
pub(super) fn traversal(order: u8) -> Vec<(u32, u32)> {
    let side = 1u32 << order;
    let cells = (side as usize) * (side as usize);
    (0..cells).map(|i| index_to_xy(i as u32, side)).collect()
}

/// Classic quadrant-recursion decode of a Hilbert index.
fn index_to_xy(index: u32, side: u32) -> (u32, u32) {
    let (mut x, mut y) = (0u32, 0u32);
    let mut t = index;
    let mut s = 1u32;
    while s < side {
        let rx = 1 & (t >> 1);
        let ry = 1 & (t ^ rx);
        rotate_quadrant(s, rx, ry, &mut x, &mut y);
        x += s * rx;
        y += s * ry;
        t >>= 2;
        s <<= 1;
    }
    (x, y)
}

fn rotate_quadrant(s: u32, rx: u32, ry: u32, x: &mut u32, y: &mut u32) {
    if ry == 0 {
        if rx == 1 {
            *x = s - 1 - *x;
            *y = s - 1 - *y;
        }
        std::mem::swap(x, y);
    }
}
