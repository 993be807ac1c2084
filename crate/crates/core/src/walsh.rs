//! In-place Walsh–Hadamard butterflies.

/// Unnormalized Walsh–Hadamard transform: `out[y] = Σ_x (-1)^{x·y} in[x]`.
///
/// Arithmetic wraps modulo 2^64, so any output whose true value fits in an
/// `i64` is exact.
pub fn fwht(data: &mut [i64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "transform length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x.wrapping_add(y);
                *b = x.wrapping_sub(y);
            }
        }
        h *= 2;
    }
}
