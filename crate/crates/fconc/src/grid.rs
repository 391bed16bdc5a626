//! Deterministic sample grids.

/// n points geometrically spaced from lo to hi inclusive.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (ratio * i as f64).exp() })
        .collect()
}

/// n points evenly spaced from lo to hi inclusive.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
        .collect()
}

/// Radical-inverse (van der Corput) sequence in the given prime base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Point `i` of the Halton sequence in [0,1)^dim, skipping `seed` leading points.
pub fn halton(i: u64, dim: usize, seed: u64) -> Vec<f64> {
    (0..dim).map(|k| radical_inverse(i + 1 + seed, PRIMES[k])).collect()
}
