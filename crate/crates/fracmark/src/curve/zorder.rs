//! Z-order (Morton) curve: coordinates from interleaved index bits.

/// Full traversal of the `2^n x 2^n` grid in Morton order.
pub(super) fn traversal(order: u8) -> Vec<(u32, u32)> {
    let side = 1u32 << order;
    let cells = (side as usize) * (side as usize);
    (0..cells)
        .map(|i| deinterleave(i as u32, order))
        .collect()
}

/// x from even bits, y from odd bits (row-major: index 1 -> (1, 0)).
fn deinterleave(index: u32, order: u8) -> (u32, u32) {
    let mut x = 0u32;
    let mut y = 0u32;
    for b in 0..order as u32 {
        x |= ((index >> (2 * b)) & 1) << b;
        y |= ((index >> (2 * b + 1)) & 1) << b;
    }
    (x, y)
}
