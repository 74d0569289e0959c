//! Deterministic low-discrepancy samplers for spheres, balls and shells.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Offset into the Halton sequence; skips the degenerate leading points.
const HALTON_SKIP: u64 = 17;

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += (index % b) as f64 * f;
        index /= b;
        f *= inv;
    }
    r
}

/// The `i`-th Halton point in `[0,1)^dim`.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|d| radical_inverse(i + HALTON_SKIP, PRIMES[d % PRIMES.len()]))
        .collect()
}

/// Number of sphere directions used per radius: 2 in ℝ¹, 256 in ℝ², 1024 above.
pub fn default_direction_count(dim: usize) -> usize {
    match dim {
        0 | 1 => 2,
        2 => 256,
        _ => 1024,
    }
}

/// Deterministic, well-spread unit directions in ℝⁿ.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => alloc::vec![alloc::vec![1.0], alloc::vec![-1.0]],
        2 => {
            // equally spaced angles, rotated by a fixed irrational offset
            let offset = 0.618_033_988_749_894_9 * 2.0 * PI / count as f64;
            (0..count)
                .map(|i| {
                    let th = offset + 2.0 * PI * i as f64 / count as f64;
                    alloc::vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            // Halton → Box–Muller Gaussians → normalise
            let pairs = dim.div_ceil(2);
            (0..count as u64)
                .map(|i| {
                    let u = halton(i, 2 * pairs);
                    let mut g = Vec::with_capacity(2 * pairs);
                    for p in 0..pairs {
                        let r = (-2.0 * (1.0 - u[2 * p]).ln()).sqrt();
                        let th = 2.0 * PI * u[2 * p + 1];
                        g.push(r * th.cos());
                        g.push(r * th.sin());
                    }
                    g.truncate(dim);
                    let n = crate::linalg::norm(&g);
                    g.into_iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}

/// `count` points in the closed ball of radius `radius` about `center`,
/// by rejection from Halton points in the enclosing cube. The centre itself
/// is never returned.
pub fn ball_samples(center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    let dim = center.len();
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        let u = halton(i, dim);
        i += 1;
        let y: Vec<f64> = u.iter().map(|&t| 2.0 * t - 1.0).collect();
        let n2: f64 = y.iter().map(|t| t * t).sum();
        if n2 > 1.0 || n2 == 0.0 {
            continue;
        }
        out.push(center.iter().zip(&y).map(|(c, t)| c + radius * t).collect());
    }
    out
}

/// Ball samples on geometric shells `radius · 2^{-j}`, `j < shells`, each
/// shell contributing `per_shell` points from the ball of that radius.
pub fn shell_samples(center: &[f64], radius: f64, shells: usize, per_shell: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(shells * per_shell);
    let mut r = radius;
    for _ in 0..shells {
        out.extend(ball_samples(center, r, per_shell));
        r *= 0.5;
    }
    out
}

/// Geometric radius schedule `2^{-from}, …, 2^{-to}`.
pub fn dyadic_radii(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn directions_are_unit() {
        for dim in 1..=4 {
            for d in sphere_directions(dim, default_direction_count(dim)) {
                assert!((crate::linalg::norm(&d) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ball_samples_inside() {
        let c = [0.3, -0.2];
        for p in ball_samples(&c, 0.5, 500) {
            assert!(crate::linalg::dist(&p, &c) <= 0.5 + 1e-15);
            assert!(p != c);
        }
    }
}
