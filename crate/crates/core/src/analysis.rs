//! Sampling checks for growth, optimality, sharpness, the KL property and
//! the primal-lower-nice inequality. Every liminf or infimum is replaced by a
//! minimum over deterministic samples at a stated radius.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::desing::DesingularizerSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::Manifold;
use crate::model::{ExtReal, FunctionModel, SmoothFunction};
use crate::sampling;
use crate::slope::check_dim;

/// Margins at or above this count as nonnegative.
pub const MARGIN_TOL: f64 = 1e-9;

fn finite_value(f: &FunctionModel, x: &[f64]) -> Result<f64> {
    f.value(x)
        .finite()
        .ok_or_else(|| Error::InvalidParameter("reference point lies outside the domain".into()))
}

fn ball_count(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 2048,
        _ => 4096,
    }
}

/// Points of `M` within `r` of `x̄` (excluding `x̄`): projections of ball
/// samples, or the reference point alone for zero-dimensional manifolds.
pub fn manifold_samples(m: &Manifold, xbar: &[f64], r: f64, count: usize) -> Vec<Vec<f64>> {
    if m.dim() == 0 {
        return Vec::new();
    }
    if m.codim() == 0 {
        return sampling::ball_samples(xbar, r, count);
    }
    sampling::ball_samples(xbar, r, count)
        .into_iter()
        .filter_map(|z| m.project(&z).ok())
        .filter(|p| {
            let d = linalg::dist(p, xbar);
            d > 0.0 && d <= r
        })
        .collect()
}

/// Outcome of a growth inequality checked along samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GrowthReport {
    pub eps: f64,
    /// Distance of each tested point (or shell radius) from `x̄`.
    pub radii: Vec<f64>,
    /// Worst margin per point or shell; negative means violated.
    pub margins: Vec<f64>,
    /// Index from which every margin is at least `−1e−9`.
    pub from_index: usize,
    /// Every margin is at least `−1e−9`.
    pub pass: bool,
}

impl GrowthReport {
    fn from_margins(eps: f64, radii: Vec<f64>, margins: Vec<f64>) -> Self {
        let mut from_index = margins.len();
        for (k, m) in margins.iter().enumerate().rev() {
            if *m < -MARGIN_TOL {
                break;
            }
            from_index = k;
        }
        let pass = from_index == 0;
        Self {
            eps,
            radii,
            margins,
            from_index,
            pass,
        }
    }
}

/// Checks `f(v_r) + ε|v_r − x_r| ≤ f(x_r)` with `v_r = proj_M(x_r)` along a
/// sequence approaching `x̄`. The report also gives the index from which the
/// inequality holds throughout.
pub fn linear_growth_witness(f: &FunctionModel, m: &Manifold, xs: &[Vec<f64>], eps: f64) -> Result<GrowthReport> {
    let mut radii = Vec::with_capacity(xs.len());
    let mut margins = Vec::with_capacity(xs.len());
    for x in xs {
        check_dim(f, x)?;
        let v = m.project(x)?;
        let fx = f.eval(x);
        let fv = f.eval(&v);
        radii.push(linalg::dist(x, m.reference()));
        margins.push(fx - fv - eps * linalg::dist(&v, x));
    }
    Ok(GrowthReport::from_margins(eps, radii, margins))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OptimalityReport {
    pub radius: f64,
    pub fbar: f64,
    pub full_min: f64,
    pub manifold_min: f64,
    pub minimizer_full: bool,
    pub minimizer_on_manifold: bool,
    pub agree: bool,
    pub strict_full: bool,
    pub strict_on_manifold: bool,
    pub strict_agree: bool,
}

/// Compares sample-minimality of `x̄` in the full ball and within `M`, for
/// both plain and strict local minimality.
pub fn optimality_transfer(f: &FunctionModel, m: &Manifold, xbar: &[f64], r: f64) -> Result<OptimalityReport> {
    check_dim(f, xbar)?;
    let fbar = finite_value(f, xbar)?;
    let count = ball_count(f.dim());
    let full: Vec<f64> = sampling::shell_samples(xbar, r, 8, count / 4)
        .iter()
        .map(|z| f.eval(z))
        .collect();
    let on_m: Vec<f64> = (0..8)
        .flat_map(|j| manifold_samples(m, xbar, r * 0.5f64.powi(j), count / 4))
        .map(|z| f.eval(&z))
        .collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let (full_min, manifold_min) = (min(&full), min(&on_m));
    let minimizer_full = full_min >= fbar;
    let minimizer_on_manifold = manifold_min >= fbar;
    let strict_full = full_min > fbar;
    let strict_on_manifold = manifold_min > fbar;
    Ok(OptimalityReport {
        radius: r,
        fbar,
        full_min,
        manifold_min,
        minimizer_full,
        minimizer_on_manifold,
        agree: minimizer_full == minimizer_on_manifold,
        strict_full,
        strict_on_manifold,
        strict_agree: strict_full == strict_on_manifold,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadraticGrowthReport {
    /// `min (f(x) − f(x̄))/|x − x̄|²` over the ball at the finest radius.
    pub alpha: f64,
    /// Same minimum over points of `M`.
    pub beta: f64,
    pub gap: f64,
    pub finest_radius: f64,
    /// `(radius, alpha, beta)`
    pub per_radius: Vec<(f64, f64, f64)>,
}

/// Quadratic growth rates of `f` at `x̄` in the full space and along `M`. The
/// ball contains `M`, so the full-space rate ranges over ball samples and
/// manifold samples together.
pub fn quadratic_growth_rates(
    f: &FunctionModel,
    m: &Manifold,
    xbar: &[f64],
    radii: &[f64],
) -> Result<QuadraticGrowthReport> {
    check_dim(f, xbar)?;
    let fbar = finite_value(f, xbar)?;
    let count = ball_count(f.dim());
    let ratio = |z: &[f64]| {
        let d = linalg::dist(z, xbar);
        (f.eval(z) - fbar) / (d * d)
    };
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let on_m = manifold_samples(m, xbar, r, count);
        let beta = on_m.iter().map(|z| ratio(z)).fold(f64::INFINITY, f64::min);
        let ball = sampling::ball_samples(xbar, r, count);
        let alpha = ball.iter().map(|z| ratio(z)).fold(beta, f64::min);
        per_radius.push((r, alpha, beta));
    }
    let &(finest_radius, alpha, beta) = per_radius
        .iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal))
        .ok_or(Error::EmptyProbe)?;
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::EmptyProbe);
    }
    Ok(QuadraticGrowthReport {
        alpha,
        beta,
        gap: (alpha - beta).abs(),
        finest_radius,
        per_radius,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SharpReport {
    /// `f(x) − f(x̄) − ε|x − x̄|` per shell.
    pub sharp: GrowthReport,
    /// `f(x) − f(x̄) − ε·dist(x, L)` per shell.
    pub weak_sharp: GrowthReport,
}

const SHARP_SHELLS: usize = 8;

/// Worst margin of `f(x) − f(x̄) − ε·g(x)` over each of eight dyadic shells.
fn shell_margins(
    f: &FunctionModel,
    xbar: &[f64],
    fbar: f64,
    eps: f64,
    r: f64,
    dist: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<GrowthReport> {
    let count = ball_count(f.dim()) / 4;
    let mut radii = Vec::with_capacity(SHARP_SHELLS);
    let mut margins = Vec::with_capacity(SHARP_SHELLS);
    let mut rad = r;
    for _ in 0..SHARP_SHELLS {
        let mut worst = f64::INFINITY;
        for z in sampling::ball_samples(xbar, rad, count) {
            worst = worst.min(f.eval(&z) - fbar - eps * dist(&z)?);
        }
        radii.push(rad);
        margins.push(worst);
        rad *= 0.5;
    }
    Ok(GrowthReport::from_margins(eps, radii, margins))
}

/// Sharp and weak-sharp minimality of `x̄` at rate `ε` on the ball of radius
/// `r`. The weak-sharp test needs the registered level set `{f ≤ f(x̄)}`.
pub fn sharp_checks(f: &FunctionModel, xbar: &[f64], eps: f64, r: f64) -> Result<SharpReport> {
    check_dim(f, xbar)?;
    let fbar = finite_value(f, xbar)?;
    let level = f.level_set().ok_or(Error::MissingLevelSet)?;
    let sharp = shell_margins(f, xbar, fbar, eps, r, &|z| Ok(linalg::dist(z, xbar)))?;
    let weak_sharp = shell_margins(f, xbar, fbar, eps, r, &|z| level.distance(z))?;
    Ok(SharpReport { sharp, weak_sharp })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KlSample {
    pub point: Vec<f64>,
    /// `f(x) − f(x̄)`
    pub gap: f64,
    pub slope: f64,
    /// `φ′(f(x) − f(x̄)) · slope`
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KlReport {
    pub delta: f64,
    /// `min φ′(f − f̄) · slope` over admissible samples; `+∞` when the
    /// window holds no point above the critical value.
    pub modulus: f64,
    /// Fitted exponent and RMS residual of the log-log regression.
    pub exponent: Option<(f64, f64)>,
    pub samples: Vec<KlSample>,
}

/// Where KL samples are drawn and which slope they use.
pub enum KlDomain<'a> {
    /// Ball samples with the limiting slope of `f`.
    Ambient,
    /// Points of `M` with the Riemannian slope `|∇_M f|` from a smooth
    /// extension of `f|_M`.
    OnManifold {
        manifold: &'a Manifold,
        extension: &'a SmoothFunction,
    },
}

const KL_SHELLS: usize = 10;
const KL_PER_SHELL: usize = 256;

fn kl_samples(f: &FunctionModel, xbar: &[f64], delta: f64, domain: &KlDomain<'_>) -> Result<Vec<(Vec<f64>, f64, f64)>> {
    check_dim(f, xbar)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let fbar = finite_value(f, xbar)?;
    let radius = delta * (1.0 - 1e-9);
    let points: Vec<Vec<f64>> = match domain {
        KlDomain::Ambient => sampling::shell_samples(xbar, radius, KL_SHELLS, KL_PER_SHELL),
        KlDomain::OnManifold { manifold, .. } => (0..KL_SHELLS)
            .flat_map(|j| manifold_samples(manifold, xbar, radius * 0.5f64.powi(j as i32), KL_PER_SHELL))
            .collect(),
    };
    let mut out = Vec::new();
    for z in points {
        let fz = match f.value(&z) {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => continue,
        };
        let gap = fz - fbar;
        if !(gap > 0.0 && gap < delta) {
            continue;
        }
        let slope = match domain {
            KlDomain::Ambient => f.limiting_slope(&z)?,
            KlDomain::OnManifold { manifold, extension } => {
                linalg::norm(&manifold.riem_grad(&|p: &[f64]| extension.grad(p), &z)?)
            }
        };
        out.push((z, gap, slope));
    }
    Ok(out)
}

fn fit_exponent(samples: &[(Vec<f64>, f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.2 > 0.0 && s.2.is_finite())
        .map(|s| (s.1.ln(), s.2.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::TooFewSamples {
            found: pts.len(),
            needed: 10,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all samples share one value gap".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum();
    Ok((slope, (rss / n).sqrt()))
}

/// Samples `0 < f(x) − f(x̄) < δ`, `|x − x̄| < δ`, and reports the least value
/// of `φ′(f(x) − f(x̄))` times the slope.
pub fn kl_probe_in(
    f: &FunctionModel,
    xbar: &[f64],
    phi: &DesingularizerSpec,
    delta: f64,
    domain: &KlDomain<'_>,
) -> Result<KlReport> {
    let raw = kl_samples(f, xbar, delta, domain)?;
    if raw.is_empty() {
        return Err(Error::EmptyProbe);
    }
    let exponent = fit_exponent(&raw).ok();
    let samples: Vec<KlSample> = raw
        .into_iter()
        .map(|(point, gap, slope)| KlSample {
            score: phi.derivative(gap) * slope,
            point,
            gap,
            slope,
        })
        .collect();
    let modulus = samples.iter().map(|s| s.score).fold(f64::INFINITY, f64::min);
    Ok(KlReport {
        delta,
        modulus,
        exponent,
        samples,
    })
}

/// Full-space KL probe.
pub fn kl_probe(f: &FunctionModel, xbar: &[f64], phi: &DesingularizerSpec, delta: f64) -> Result<KlReport> {
    kl_probe_in(f, xbar, phi, delta, &KlDomain::Ambient)
}

/// Least-squares slope of `log(slope)` against `log(f − f̄)`: the KL exponent.
pub fn kl_exponent_estimate(f: &FunctionModel, xbar: &[f64], delta: f64, domain: &KlDomain<'_>) -> Result<(f64, f64)> {
    fit_exponent(&kl_samples(f, xbar, delta, domain)?)
}

/// Moduli below this count as zero when comparing KL verdicts.
pub const KL_AGREEMENT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KlEquivalenceReport {
    pub full_modulus: f64,
    /// `+∞` when `M` is a single point (the restricted property is vacuous).
    pub restricted_modulus: f64,
    pub full_positive: bool,
    pub restricted_positive: bool,
    pub agree: bool,
}

/// Smooth extension of `f` registered on `M` (by manifold name).
pub fn extension_on(f: &FunctionModel, m: &Manifold) -> Option<SmoothFunction> {
    f.critical_points()
        .iter()
        .filter(|c| c.manifold.as_ref().is_some_and(|cm| cm.name() == m.name()))
        .find_map(|c| c.extension.clone())
        .or_else(|| {
            f.strata()
                .iter()
                .find(|s| s.manifold.name() == m.name())
                .map(|s| s.extension.clone())
        })
}

/// Runs the KL probe on the full space and along `M` and compares verdicts.
pub fn kl_equivalence_check(
    f: &FunctionModel,
    m: &Manifold,
    xbar: &[f64],
    phi: &DesingularizerSpec,
    delta: f64,
) -> Result<KlEquivalenceReport> {
    let full = kl_probe(f, xbar, phi, delta)?;
    let restricted_modulus = if m.dim() == 0 {
        f64::INFINITY
    } else {
        let ext = extension_on(f, m)
            .ok_or_else(|| Error::MissingMetadata(alloc::format!("no smooth extension on {}", m.name())))?;
        let dom = KlDomain::OnManifold {
            manifold: m,
            extension: &ext,
        };
        kl_probe_in(f, xbar, phi, delta, &dom)?.modulus
    };
    let full_positive = full.modulus > KL_AGREEMENT_THRESHOLD;
    let restricted_positive = restricted_modulus > KL_AGREEMENT_THRESHOLD;
    Ok(KlEquivalenceReport {
        full_modulus: full.modulus,
        restricted_modulus,
        full_positive,
        restricted_positive,
        agree: full_positive == restricted_positive,
    })
}

/// `ρ = (f(x) + ⟨y, x′ − x⟩ − f(x′)) / ((1 + |y|) |x′ − x|²)`
pub fn pln_ratio(f: &FunctionModel, x: &[f64], x2: &[f64], y: &[f64]) -> f64 {
    let d = linalg::sub(x2, x);
    let dd = linalg::dot(&d, &d);
    (f.eval(x) + linalg::dot(y, &d) - f.eval(x2)) / ((1.0 + linalg::norm(y)) * dd)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PlnReport {
    pub center: Vec<f64>,
    pub radius: f64,
    pub triples: usize,
    pub max_rho: f64,
    /// `(|x′ − x|, max ρ)` per step scale, coarsest first.
    pub per_scale: Vec<(f64, f64)>,
    /// `max ρ` is finite and does not grow by more than a factor 2 (or
    /// beyond `1e−9` when nonpositive) from the coarsest to the finest scale.
    pub pass: bool,
}

const PLN_POINTS: usize = 512;
const PLN_SCALES: usize = 7;
const PLN_DIRECTIONS: usize = 4;

/// Samples triples `(x, x′, y)` with `x` in the ball, `y` a vertex of `∂f(x)`
/// and `|x′ − x| = r·2^{−j}`, and reports the largest PLN ratio per scale.
pub fn pln_check(f: &FunctionModel, center: &[f64], radius: f64) -> Result<PlnReport> {
    check_dim(f, center)?;
    let n = f.dim();
    let dirs = sampling::sphere_directions(n, if n == 1 { 2 } else { PLN_DIRECTIONS });
    let xs = sampling::ball_samples(center, radius, PLN_POINTS);
    let mut per_scale = Vec::with_capacity(PLN_SCALES);
    let mut triples = 0usize;
    for j in 0..PLN_SCALES {
        let step = radius * 0.5f64.powi(j as i32);
        let mut worst = f64::NEG_INFINITY;
        for (i, x) in xs.iter().enumerate() {
            if !f.in_domain(x) {
                continue;
            }
            let sub = f.subdiff(x);
            // rotate the direction set per point so all directions get used
            for k in 0..dirs.len().min(PLN_DIRECTIONS) {
                let d = &dirs[(i + k) % dirs.len()];
                let x2 = linalg::axpy(x, step, d);
                if !f.in_domain(&x2) {
                    continue;
                }
                for y in sub.vertices() {
                    worst = worst.max(pln_ratio(f, x, &x2, y));
                    triples += 1;
                }
            }
        }
        per_scale.push((step, worst));
    }
    let max_rho = per_scale.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let first = per_scale.first().map_or(0.0, |p| p.1);
    let last = per_scale.last().map_or(0.0, |p| p.1);
    let pass = max_rho.is_finite() && last <= (2.0 * first).max(MARGIN_TOL);
    Ok(PlnReport {
        center: center.to_vec(),
        radius,
        triples,
        max_rho,
        per_scale,
        pass,
    })
}

/// Ratios along explicit triples `(x, x′, y)`.
pub fn pln_along(f: &FunctionModel, triples: &[(Vec<f64>, Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    triples.iter().map(|(x, x2, y)| pln_ratio(f, x, x2, y)).collect()
}

/// The `√|x|` triples `x = t², x′ = 4t², y = 1/(2t)`.
pub fn sqrt_abs_triples(ts: &[f64]) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    ts.iter()
        .map(|&t| (vec![t * t], vec![4.0 * t * t], vec![0.5 / t]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_get;

    #[test]
    fn growth_report_tail_index() {
        let r = GrowthReport::from_margins(0.5, vec![3.0, 2.0, 1.0, 0.5], vec![-1.0, 0.1, 0.0, 0.2]);
        assert_eq!(r.from_index, 1);
        assert!(!r.pass);
        let r = GrowthReport::from_margins(0.5, vec![1.0; 3], vec![0.1, -1e-10, 0.0]);
        assert_eq!(r.from_index, 0);
        assert!(r.pass);
    }

    #[test]
    fn pln_ratio_of_convex_is_nonpositive() {
        let f = catalog_get("abs-plus-square").unwrap();
        assert!(pln_ratio(&f, &[0.3, 0.2], &[-0.1, 0.4], &[1.0, 0.4]) <= 0.0);
    }

    #[test]
    fn sqrt_abs_construction() {
        let f = catalog_get("sqrt-abs").unwrap();
        let rho = pln_along(&f, &sqrt_abs_triples(&[0.1, 0.01]));
        assert!(rho[1] > 50.0 * rho[0]);
    }

    #[test]
    fn exponent_needs_samples() {
        assert!(matches!(fit_exponent(&[]), Err(Error::TooFewSamples { .. })));
    }
}
