//! Proximal operators backed by a deterministic global grid search, proximal
//! sequences and their diagnostics.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::desing::DesingularizerSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{FunctionModel, Stratum};
use crate::slope::check_dim;

/// Minimum number of refinement levels of the grid oracle.
pub const MIN_LEVELS: usize = 8;
const MAX_LEVELS: usize = 30;
const POLISH_STEPS: usize = 50;
const STRATUM_STEPS: usize = 200;

fn initial_points_per_dim(dim: usize) -> usize {
    match dim {
        1 => 257,
        2 => 65,
        _ => 33,
    }
}

fn kept_cells(dim: usize) -> usize {
    match dim {
        1 => 8,
        2 => 16,
        _ => 8,
    }
}

/// Bounded list of the `cap` lowest values seen so far. Insertion after
/// equal values keeps the earliest-visited point first among ties.
struct TopK {
    cap: usize,
    items: Vec<(f64, Vec<f64>)>,
}

impl TopK {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn offer(&mut self, value: f64, point: &[f64]) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if self.items.len() == self.cap && value >= self.items[self.cap - 1].0 {
            return;
        }
        let pos = self.items.partition_point(|(v, _)| *v <= value);
        self.items.insert(pos, (value, point.to_vec()));
        self.items.truncate(self.cap);
    }
}

/// Visits the lattice `center + h·(j − half)` for `j ∈ [0, per_dim)ⁿ` in
/// lexicographic order.
fn for_each_lattice_point(center: &[f64], h: f64, per_dim: usize, mut visit: impl FnMut(&[f64])) {
    let n = center.len();
    let half = (per_dim - 1) as f64 / 2.0;
    let mut idx = vec![0usize; n];
    let mut p = center.to_vec();
    loop {
        for d in 0..n {
            p[d] = center[d] + h * (idx[d] as f64 - half);
        }
        visit(&p);
        let mut d = n;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < per_dim {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Global minimiser of `objective` over the box `center ± radius` by
/// multi-level grid refinement: a coarse lattice, then repeated ×4
/// refinement around the best cells. Runs at least eight levels and stops
/// once the lattice spacing falls below `tol`. Ties between equal values go
/// to the lexicographically first cell. Dimensions 1 to 3 only.
pub fn global_min_oracle(objective: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64, tol: f64) -> Result<Vec<f64>> {
    let n = center.len();
    if n == 0 || n > 3 {
        return Err(Error::InvalidParameter(alloc::format!(
            "grid oracle supports dimensions 1 to 3, got {n}"
        )));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(
            "box radius must be finite and nonnegative".into(),
        ));
    }
    if radius == 0.0 {
        return if objective(center) < f64::INFINITY {
            Ok(center.to_vec())
        } else {
            Err(Error::OracleFailure)
        };
    }
    let per_dim = initial_points_per_dim(n);
    let keep = kept_cells(n);
    let mut h = 2.0 * radius / (per_dim - 1) as f64;
    let mut top = TopK::new(keep);
    for_each_lattice_point(center, h, per_dim, |p| top.offer(objective(p), p));
    if !(top.items[0].0 < f64::INFINITY) {
        return Err(Error::OracleFailure);
    }
    for level in 1..=MAX_LEVELS {
        if level > MIN_LEVELS && h <= tol {
            break;
        }
        h /= 4.0;
        let mut next = TopK::new(keep);
        for (_, c) in &top.items {
            for_each_lattice_point(c, h, 9, |p| next.offer(objective(p), p));
        }
        top = next;
    }
    Ok(top.items.swap_remove(0).1)
}

fn prox_objective(f: &FunctionModel, x: &[f64], alpha: f64, y: &[f64]) -> f64 {
    let d = linalg::dist(y, x);
    f.eval(y) + alpha * d * d
}

/// Radius of a ball about `x` certain to contain every minimiser of
/// `f + α|·−x|²`, from a lower bound (`α|y−x|² ≤ f(x) − inf f`) or a
/// Lipschitz constant (`α|y−x|² ≤ L|y−x|`).
pub fn prox_search_radius(f: &FunctionModel, x: &[f64], alpha: f64) -> f64 {
    let fx = f.eval(x);
    let mut r = f64::INFINITY;
    if let (Some(lb), true) = (f.lower_bound(), fx.is_finite()) {
        r = r.min(((fx - lb).max(0.0) / alpha).sqrt());
    }
    if let Some(l) = f.lipschitz() {
        r = r.min(l / alpha);
    }
    if r.is_finite() {
        r * 1.05 + 1e-12
    } else {
        1.0 + linalg::norm(x)
    }
}

/// Accepts a trial point on strict decrease, or on a value tie at rounding
/// level when the (sub)gradient norm shrinks; near smooth minimisers values
/// stop resolving the iterate long before gradients do.
fn accept(cand_val: f64, val: f64, cand_grad: impl FnOnce() -> f64, grad_norm: f64) -> bool {
    cand_val < val || cand_val <= val + 4.0 * f64::EPSILON * val.abs().max(1e-300) && cand_grad() < grad_norm
}

fn prox_subgradient(f: &FunctionModel, x: &[f64], alpha: f64, y: &[f64]) -> Option<Vec<f64>> {
    let sub = f.subdiff(y);
    if sub.is_empty() {
        return None;
    }
    let shift = linalg::scale(&linalg::sub(y, x), 2.0 * alpha);
    sub.translate(&shift).min_norm().ok().map(|m| m.point)
}

/// Descent with minimal-norm subgradients of `f + α|·−x|²`, Barzilai–Borwein
/// step lengths and step halving.
fn polish(f: &FunctionModel, x: &[f64], alpha: f64, start: Vec<f64>) -> Vec<f64> {
    let phi = |y: &[f64]| prox_objective(f, x, alpha, y);
    let mut y = start;
    let mut val = phi(&y);
    let mut g = match prox_subgradient(f, x, alpha, &y) {
        Some(g) => g,
        None => return y,
    };
    let mut t = 0.25 / alpha;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..POLISH_STEPS {
        let gn = linalg::norm(&g);
        if gn == 0.0 {
            break;
        }
        if let Some((py, pg)) = &prev {
            let s = linalg::sub(&y, py);
            let d = linalg::sub(&g, pg);
            let sd = linalg::dot(&s, &d);
            if sd > 0.0 {
                t = linalg::dot(&s, &s) / sd;
            }
        }
        let mut accepted = false;
        for _ in 0..60 {
            let cand = linalg::axpy(&y, -t, &g);
            let cv = phi(&cand);
            let mut cg = None;
            if accept(
                cv,
                val,
                || {
                    cg = prox_subgradient(f, x, alpha, &cand);
                    cg.as_ref().map_or(f64::INFINITY, |v| linalg::norm(v))
                },
                gn,
            ) {
                let new_g = match cg {
                    Some(v) => v,
                    None => match prox_subgradient(f, x, alpha, &cand) {
                        Some(v) => v,
                        None => break,
                    },
                };
                prev = Some((core::mem::replace(&mut y, cand), core::mem::replace(&mut g, new_g)));
                val = cv;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    y
}

/// Riemannian descent of `ext + α|·−x|²` on the stratum's manifold, starting
/// from the projection of `start`.
fn stratum_candidate(s: &Stratum, x: &[f64], alpha: f64, start: &[f64]) -> Option<Vec<f64>> {
    let m = &s.manifold;
    let mut p = m.project(start).ok()?;
    if m.dim() == 0 {
        return Some(p);
    }
    let psi = |q: &[f64]| {
        let d = linalg::dist(q, x);
        s.extension.value(q) + alpha * d * d
    };
    let grad = |q: &[f64]| -> Option<Vec<f64>> {
        let g = linalg::axpy(&s.extension.grad(q), 2.0 * alpha, &linalg::sub(q, x));
        m.tangent_unchecked(q, &g).ok()
    };
    let mut val = psi(&p);
    let mut t = 0.25 / alpha;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..STRATUM_STEPS {
        let g = grad(&p)?;
        let gn = linalg::norm(&g);
        if gn <= 1e-15 * (1.0 + linalg::norm(&p)) {
            break;
        }
        if let Some((pp, pg)) = &prev {
            let sd_s = linalg::sub(&p, pp);
            let sd_g = linalg::sub(&g, pg);
            let sd = linalg::dot(&sd_s, &sd_g);
            if sd > 0.0 {
                t = linalg::dot(&sd_s, &sd_s) / sd;
            }
        }
        let mut accepted = false;
        for _ in 0..60 {
            let cand = match m.project(&linalg::axpy(&p, -t, &g)) {
                Ok(c) => c,
                Err(_) => {
                    t *= 0.5;
                    continue;
                }
            };
            let cv = psi(&cand);
            if accept(cv, val, || grad(&cand).map_or(f64::INFINITY, |v| linalg::norm(&v)), gn) {
                prev = Some((core::mem::replace(&mut p, cand), g.clone()));
                val = cv;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some(p)
}

/// A global minimiser of `f + α|·−x|²`: grid oracle, then subgradient
/// polish, then a comparison against minimisers restricted to each
/// registered stratum and against registered critical points. The true
/// objective decides; ties go to the stratum candidate.
pub fn prox(f: &FunctionModel, x: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_dim(f, x)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let radius = prox_search_radius(f, x, alpha);
    let phi = |y: &[f64]| prox_objective(f, x, alpha, y);
    let tol = 1e-6 * radius.max(1e-300);
    let grid = global_min_oracle(&phi, x, radius, tol)?;
    let mut best = polish(f, x, alpha, grid);
    let mut best_val = phi(&best);
    let tie = |v: f64, b: f64| v <= b + 1e-14 * b.abs().max(1.0);
    for s in f.strata() {
        if let Some(c) = stratum_candidate(s, x, alpha, &best) {
            let v = phi(&c);
            if tie(v, best_val) {
                best_val = v.min(best_val);
                best = c;
            }
        }
    }
    for cp in f.critical_points() {
        let v = phi(&cp.point);
        if v < best_val {
            best_val = v;
            best = cp.point.clone();
        }
    }
    if !best_val.is_finite() {
        return Err(Error::OracleFailure);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProxSequence {
    pub points: Vec<Vec<f64>>,
    pub alpha: f64,
    pub values: Vec<f64>,
    /// `|x_{k+1} − x_k|`, one shorter than `points`.
    pub steps: Vec<f64>,
    /// Limiting slope at each point.
    pub slopes: Vec<f64>,
}

impl ProxSequence {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `k` proximal steps from `x0`. `alpha` must exceed the quadratic-minorant
/// constant of the critical point nearest to `x0`.
pub fn prox_sequence(f: &FunctionModel, x0: &[f64], alpha: f64, k: usize) -> Result<ProxSequence> {
    check_dim(f, x0)?;
    if let Some(cp) = f.nearest_critical_point(x0) {
        if !(alpha > cp.prox_threshold) {
            return Err(Error::InvalidParameter(alloc::format!(
                "alpha = {alpha} must exceed the registered threshold {}",
                cp.prox_threshold
            )));
        }
    }
    if !f.in_domain(x0) {
        return Err(Error::InvalidParameter("x0 lies outside the domain".into()));
    }
    let bound = 10.0 * (linalg::norm(x0) + 1.0);
    let mut points = vec![x0.to_vec()];
    let mut values = vec![f.eval(x0)];
    let mut slopes = vec![f.limiting_slope(x0)?];
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let cur = points.last().expect("nonempty");
        let next = prox(f, cur, alpha)?;
        let nn = linalg::norm(&next);
        if nn > bound {
            return Err(Error::Divergence { norm: nn, bound });
        }
        steps.push(linalg::dist(cur, &next));
        values.push(f.eval(&next));
        slopes.push(f.limiting_slope(&next)?);
        points.push(next);
    }
    Ok(ProxSequence {
        points,
        alpha,
        values,
        steps,
        slopes,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProxLemmaReport {
    pub x: Vec<f64>,
    pub alpha: f64,
    pub y: Vec<f64>,
    /// Limiting slope at the proximal point.
    pub lhs: f64,
    /// `2α|y − x|`
    pub rhs: f64,
    pub pass: bool,
}

/// Slack allowed in `lhs ≤ rhs`.
pub const PROX_LEMMA_SLACK: f64 = 1e-6;

/// Checks that the slope at a proximal point is at most `2α` times the step.
pub fn check_prox_lemma(f: &FunctionModel, x: &[f64], alpha: f64) -> Result<ProxLemmaReport> {
    let y = prox(f, x, alpha)?;
    let lhs = f.limiting_slope(&y)?;
    let rhs = 2.0 * alpha * linalg::dist(&y, x);
    Ok(ProxLemmaReport {
        x: x.to_vec(),
        alpha,
        pass: lhs <= rhs + PROX_LEMMA_SLACK,
        y,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LengthBoundReport {
    pub steps: Vec<f64>,
    /// `φ(f(x_k) − inf f) − φ(f(x_{k+1}) − inf f)`
    pub drops: Vec<f64>,
    /// `drops[k] − steps[k]`
    pub margins: Vec<f64>,
    pub per_step_pass: bool,
    pub total_length: f64,
    /// `φ(f(x_0) − inf f)`
    pub total_bound: f64,
    pub total_pass: bool,
    pub slack: f64,
}

/// Verifies `|x_k − x_{k+1}| ≤ φ(f(x_k) − inf f) − φ(f(x_{k+1}) − inf f)`
/// for every step and the resulting bound on total length.
pub fn check_length_bound(
    seq: &ProxSequence,
    f: &FunctionModel,
    phi: &DesingularizerSpec,
    slack: f64,
) -> Result<LengthBoundReport> {
    let inf = f.infimum().ok_or(Error::UnknownInfimum)?;
    let shifted: Vec<f64> = seq.values.iter().map(|v| phi.value((v - inf).max(0.0))).collect();
    let drops: Vec<f64> = shifted.windows(2).map(|w| w[0] - w[1]).collect();
    let margins: Vec<f64> = drops.iter().zip(&seq.steps).map(|(d, s)| d - s).collect();
    let total_length: f64 = seq.steps.iter().sum();
    let total_bound = shifted.first().copied().unwrap_or(0.0);
    Ok(LengthBoundReport {
        per_step_pass: margins.iter().all(|&m| m >= -slack),
        total_pass: total_length <= total_bound + slack,
        steps: seq.steps.clone(),
        drops,
        margins,
        total_length,
        total_bound,
        slack,
    })
}
