//! Orthonormal 2D DCT over 32x32 patches, via a precomputed basis matrix.
//!
//! The transform is evaluated as plain matrix products in binary64, which
//! keeps coefficient values reproducible run to run without depending on
//! an FFT plan.

use std::sync::OnceLock;

pub const N: usize = 32;

struct Basis {
    // basis[k][x] = c(k) * cos(pi * (2x + 1) * k / (2N))
    rows: [[f64; N]; N],
}

fn basis() -> &'static Basis {
    static BASIS: OnceLock<Basis> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut rows = [[0.0f64; N]; N];
        let n = N as f64;
        for (k, row) in rows.iter_mut().enumerate() {
            let scale = if k == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            for (x, value) in row.iter_mut().enumerate() {
                let angle = std::f64::consts::PI * (2.0 * x as f64 + 1.0) * k as f64 / (2.0 * n);
                *value = scale * angle.cos();
            }
        }
        Basis { rows }
    })
}

/// Forward 2D DCT-II of a row-major 32x32 block.
pub fn forward(block: &[f64; N * N]) -> [f64; N * N] {
    transform(block, false)
}

/// Inverse (DCT-III) of [`forward`].
pub fn inverse(coeffs: &[f64; N * N]) -> [f64; N * N] {
    transform(coeffs, true)
}

fn transform(input: &[f64; N * N], inverse: bool) -> [f64; N * N] {
    let b = basis();
    let mut rows_done = [0.0f64; N * N];
    // transform rows
    for y in 0..N {
        for k in 0..N {
            let mut acc = 0.0;
            for x in 0..N {
                let w = if inverse { b.rows[x][k] } else { b.rows[k][x] };
                acc += w * input[y * N + x];
            }
            rows_done[y * N + k] = acc;
        }
    }
    // transform columns
    let mut out = [0.0f64; N * N];
    for x in 0..N {
        for k in 0..N {
            let mut acc = 0.0;
            for y in 0..N {
                let w = if inverse { b.rows[y][k] } else { b.rows[k][y] };
                acc += w * rows_done[y * N + x];
            }
            out[k * N + x] = acc;
        }
    }
    out
}
