//! Slopes, limiting slopes and moduli of identifiability.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::ClosedSet;
use crate::model::{ExtReal, FunctionModel};
use crate::polytope::{MinNorm, Polytope};
use crate::sampling;

pub use crate::polytope::maxfn_modulus;

/// Nearest point of `conv(P)` to the origin.
pub fn minnorm(p: &Polytope) -> Result<MinNorm> {
    p.min_norm()
}

/// `dist(0, ∂f(x))`; `+∞` outside the domain.
pub fn limiting_slope(f: &FunctionModel, x: &[f64]) -> Result<f64> {
    check_dim(f, x)?;
    f.limiting_slope(x)
}

pub(crate) fn check_dim(f: &FunctionModel, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Default radius schedule `2^{-3}, …, 2^{-12}`.
pub fn default_radii() -> Vec<f64> {
    sampling::dyadic_radii(3, 12)
}

/// Numerical slope from sphere sampling.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SlopeEstimate {
    /// Extrapolation to `r = 0` of the ratios at the last three radii when
    /// they lie close to a line in `r`; otherwise the largest of them.
    pub value: f64,
    pub radius_schedule: Vec<f64>,
    /// `(radius, sup ratio)` per radius.
    pub per_radius: Vec<(f64, f64)>,
}

/// `sup_{|z−x| = r} (f(x) − f(z))⁺ / r` for each radius, over a deterministic
/// low-discrepancy set of sphere directions refined by a local pattern search
/// around the best one.
pub fn slope_estimate(f: &FunctionModel, x: &[f64], radii: &[f64]) -> Result<SlopeEstimate> {
    check_dim(f, x)?;
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] < w[0])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let fx = match f.value(x) {
        ExtReal::Finite(v) => v,
        ExtReal::PosInf => return Err(Error::InvalidParameter("slope requested outside the domain".into())),
    };
    let count = sampling::default_direction_count(f.dim());
    let dirs = sampling::sphere_directions(f.dim(), count);
    let spacing = if f.dim() > 1 {
        (count as f64).powf(-1.0 / (f.dim() as f64 - 1.0))
    } else {
        0.0
    };
    let ratio = |d: &[f64], r: f64| match f.value(&linalg::axpy(x, r, d)) {
        ExtReal::Finite(fz) => Some((fx - fz) / r),
        ExtReal::PosInf => None,
    };
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut best = f64::NEG_INFINITY;
        let mut best_dir: Option<&[f64]> = None;
        for d in &dirs {
            if let Some(q) = ratio(d, r) {
                if q > best {
                    best = q;
                    best_dir = Some(d);
                }
            }
        }
        let Some(start) = best_dir else {
            return Err(Error::InsufficientDomain { radius: r });
        };
        if spacing > 0.0 && best > 0.0 {
            best = refine_direction(&ratio, start, r, best, spacing);
        }
        per_radius.push((r, best.max(0.0)));
    }
    let tail = per_radius.len().saturating_sub(3);
    let mut value = per_radius[tail..].iter().map(|p| p.1).fold(0.0, f64::max);
    // Bias from curvature: once the last three ratios are in the asymptotic
    // regime q(r) ≈ s + c·r + O(r²), extrapolate them to r = 0.
    if let [.., (r0, q0), (r1, q1), (r2, q2)] = per_radius[..] {
        let (d1, d2) = ((q1 - q0) / (r0 - r1), (q2 - q1) / (r1 - r2));
        if q0 > 0.0 && d1 * d2 > 0.0 && (d2 / d1 - 1.0).abs() <= 0.25 {
            // Lagrange interpolation through the three ratios, evaluated at 0
            let l0 = r1 * r2 / ((r0 - r1) * (r0 - r2));
            let l1 = r0 * r2 / ((r1 - r0) * (r1 - r2));
            let l2 = r0 * r1 / ((r2 - r0) * (r2 - r1));
            value = (l0 * q0 + l1 * q1 + l2 * q2).max(0.0);
        }
    }
    Ok(SlopeEstimate {
        value,
        radius_schedule: radii.to_vec(),
        per_radius,
    })
}

/// Coordinate pattern search on the unit sphere around the best sampled
/// direction; the sweep alone cannot resolve narrow descent valleys such as
/// the one along a kink manifold.
fn refine_direction(
    ratio: &dyn Fn(&[f64], f64) -> Option<f64>,
    start: &[f64],
    r: f64,
    mut best: f64,
    mut step: f64,
) -> f64 {
    let mut dir = start.to_vec();
    let floor = step * 1e-9;
    while step > floor {
        let mut moved = false;
        for i in 0..dir.len() {
            for sgn in [1.0, -1.0] {
                let mut cand = dir.clone();
                cand[i] += sgn * step;
                let n = linalg::norm(&cand);
                cand.iter_mut().for_each(|c| *c /= n);
                if let Some(q) = ratio(&cand, r) {
                    if q > best {
                        best = q;
                        dir = cand;
                        moved = true;
                    }
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// Value window coefficient: samples satisfy `|f(x) − f(x̄)| ≤ 10 r`.
pub const VALUE_WINDOW_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModulusSample {
    pub point: Vec<f64>,
    pub value: f64,
    pub slope: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModulusReport {
    /// Least limiting slope over admissible samples at `finest_radius`.
    pub estimate: f64,
    pub finest_radius: f64,
    /// Value interval around `f(x̄)` used at `finest_radius`.
    pub value_window: (f64, f64),
    pub tube: f64,
    pub radii: Vec<f64>,
    /// `(radius, least slope, admissible count)`; radii without admissible
    /// samples are omitted.
    pub per_radius: Vec<(f64, f64, usize)>,
    pub samples: Vec<ModulusSample>,
}

/// Default probe radii `2^{-1}, …, 2^{-8}`.
pub fn default_probe_radii() -> Vec<f64> {
    sampling::dyadic_radii(1, 8)
}

fn probe_sample_count(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 2048,
        _ => 4096,
    }
}

/// Ball samples plus their projections onto the registered strata of `f`:
/// slopes drop on kinks, which ball samples alone never hit.
fn probe_points(f: &FunctionModel, xbar: &[f64], r: f64, count: usize) -> Vec<Vec<f64>> {
    let ball = sampling::ball_samples(xbar, r, count);
    let mut out = ball.clone();
    for s in f.strata() {
        let m = &s.manifold;
        if m.dim() == 0 || m.codim() == 0 {
            continue;
        }
        out.extend(
            ball.iter()
                .filter_map(|z| m.project(z).ok())
                .filter(|p| linalg::dist(p, xbar) <= r),
        );
    }
    out
}

/// Samples the ball of each radius about `x̄` (and the registered strata of
/// `f` within it) for points outside the `tube` around `set` whose values lie
/// within `10 r` of `f(x̄)`, and reports the least limiting slope at the
/// finest radius that has admissible samples.
pub fn modulus_probe(
    f: &FunctionModel,
    set: &dyn ClosedSet,
    xbar: &[f64],
    radii: &[f64],
    tube: f64,
) -> Result<ModulusReport> {
    check_dim(f, xbar)?;
    let fbar = f
        .value(xbar)
        .finite()
        .ok_or_else(|| Error::InvalidParameter("f(xbar) must be finite".into()))?;
    if set.distance(xbar)? > 1e-8 {
        return Err(Error::InvalidParameter("xbar must lie in the set".into()));
    }
    if !(tube > 0.0) {
        return Err(Error::InvalidParameter("tube must be positive".into()));
    }
    let count = probe_sample_count(f.dim());
    let mut samples = Vec::new();
    let mut per_radius = Vec::new();
    let mut finest: Option<(f64, f64)> = None;
    for &r in radii {
        let window = VALUE_WINDOW_SCALE * r;
        let mut least = f64::INFINITY;
        let mut n = 0usize;
        for z in probe_points(f, xbar, r, count) {
            let fz = match f.value(&z) {
                ExtReal::Finite(v) => v,
                ExtReal::PosInf => continue,
            };
            if (fz - fbar).abs() > window || set.distance(&z)? <= tube {
                continue;
            }
            let s = f.limiting_slope(&z)?;
            least = least.min(s);
            n += 1;
            samples.push(ModulusSample {
                point: z,
                value: fz,
                slope: s,
                radius: r,
            });
        }
        if n > 0 {
            per_radius.push((r, least, n));
            if finest.is_none_or(|(fr, _)| r < fr) {
                finest = Some((r, least));
            }
        }
    }
    let (finest_radius, estimate) = finest.ok_or(Error::EmptyProbe)?;
    let w = VALUE_WINDOW_SCALE * finest_radius;
    Ok(ModulusReport {
        estimate,
        finest_radius,
        value_window: (fbar - w, fbar + w),
        tube,
        radii: radii.to_vec(),
        per_radius,
        samples,
    })
}
