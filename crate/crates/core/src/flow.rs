//! Subgradient curves `x′ ∈ −∂f(x)`, Riemannian gradient flows and
//! identification diagnostics.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{ClosedSet, Manifold};
use crate::model::{FunctionModel, SmoothFunction};
use crate::prox::prox;
use crate::slope::check_dim;

/// Largest accepted step size.
pub const MAX_STEP: f64 = 0.1;
/// Largest accepted horizon.
pub const MAX_HORIZON: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scheme {
    /// `x_{k+1} = prox(f, x_k, 1/(2h))`
    Implicit,
    /// `x_{k+1} = x_k − h · (minimal-norm subgradient at x_k)`
    Explicit,
}

/// Time-stamped points on a uniform grid with derived series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Finite-difference speed: backward difference, forward at `k = 0`.
    pub speeds: Vec<f64>,
    /// Cumulative `Σ |x′|² h`.
    pub energy: Vec<f64>,
}

impl Trajectory {
    /// Builds the derived series from points sampled every `h`, starting at `t0`.
    pub fn from_points(h: f64, t0: f64, points: Vec<Vec<f64>>, values: Vec<f64>) -> Self {
        let n = points.len();
        let times: Vec<f64> = (0..n).map(|k| t0 + k as f64 * h).collect();
        let mut speeds = vec![0.0; n];
        for k in 1..n {
            speeds[k] = linalg::dist(&points[k], &points[k - 1]) / h;
        }
        if n > 1 {
            speeds[0] = speeds[1];
        }
        let mut energy = vec![0.0; n];
        for k in 1..n {
            energy[k] = energy[k - 1] + speeds[k] * speeds[k] * h;
        }
        Self {
            h,
            times,
            points,
            values,
            speeds,
            energy,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn final_point(&self) -> &[f64] {
        self.points.last().map_or(&[], |p| p)
    }

    pub fn total_energy(&self) -> f64 {
        self.energy.last().copied().unwrap_or(0.0)
    }
}

fn step_count(h: f64, horizon: f64) -> Result<usize> {
    if !(h > 0.0 && h <= MAX_STEP) {
        return Err(Error::InvalidParameter(alloc::format!(
            "step h = {h} must lie in (0, {MAX_STEP}]"
        )));
    }
    if !(horizon > 0.0 && horizon <= MAX_HORIZON) {
        return Err(Error::InvalidParameter(alloc::format!(
            "horizon T = {horizon} must lie in (0, {MAX_HORIZON}]"
        )));
    }
    let n = horizon / h;
    let k = libm::round(n);
    if (n - k).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "horizon T = {horizon} is not a multiple of h = {h}"
        )));
    }
    Ok(k as usize)
}

/// Discretised subgradient curve from `x0` over `[0, T]`.
pub fn integrate_flow(f: &FunctionModel, x0: &[f64], h: f64, horizon: f64, scheme: Scheme) -> Result<Trajectory> {
    check_dim(f, x0)?;
    let steps = step_count(h, horizon)?;
    if !f.in_domain(x0) {
        return Err(Error::InvalidParameter("x0 lies outside the domain".into()));
    }
    let mut points = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    points.push(x0.to_vec());
    values.push(f.eval(x0));
    let alpha = 1.0 / (2.0 * h);
    for _ in 0..steps {
        let cur = points.last().expect("nonempty");
        let next = match scheme {
            Scheme::Implicit => prox(f, cur, alpha)?,
            Scheme::Explicit => {
                let g = f.min_norm_subgradient(cur)?;
                let next = linalg::axpy(cur, -h, &g);
                if next.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("explicit step produced a non-finite iterate".into()));
                }
                next
            }
        };
        values.push(f.eval(&next));
        points.push(next);
    }
    Ok(Trajectory::from_points(h, 0.0, points, values))
}

fn riem_field(m: &Manifold, ext: &SmoothFunction, x: &[f64]) -> Result<Vec<f64>> {
    let g = m.tangent_unchecked(x, &ext.grad(x))?;
    Ok(linalg::scale(&g, -1.0))
}

fn rk4_on_manifold(m: &Manifold, ext: &SmoothFunction, x0: &[f64], h: f64, steps: usize) -> Result<Vec<Vec<f64>>> {
    let mut points = Vec::with_capacity(steps + 1);
    points.push(x0.to_vec());
    for _ in 0..steps {
        let x = points.last().expect("nonempty");
        let k1 = riem_field(m, ext, x)?;
        let k2 = riem_field(m, ext, &linalg::axpy(x, 0.5 * h, &k1))?;
        let k3 = riem_field(m, ext, &linalg::axpy(x, 0.5 * h, &k2))?;
        let k4 = riem_field(m, ext, &linalg::axpy(x, h, &k3))?;
        let incr: Vec<f64> = (0..x.len())
            .map(|i| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let next = m.project(&linalg::add(x, &incr))?;
        points.push(next);
    }
    Ok(points)
}

/// Classical RK4 for `x′ = −∇_M h(x)`, projecting back onto `M` after each
/// step. Values come from the smooth extension.
pub fn integrate_riemannian(
    m: &Manifold,
    ext: &SmoothFunction,
    x0: &[f64],
    h: f64,
    horizon: f64,
) -> Result<Trajectory> {
    let steps = step_count(h, horizon)?;
    riemannian_from(m, ext, x0, h, 0.0, steps)
}

fn riemannian_from(
    m: &Manifold,
    ext: &SmoothFunction,
    x0: &[f64],
    h: f64,
    t0: f64,
    steps: usize,
) -> Result<Trajectory> {
    if x0.len() != m.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.ambient_dim(),
            found: x0.len(),
        });
    }
    let r = m.residual(x0);
    if r > crate::manifold::ON_MANIFOLD_TOL {
        return Err(Error::InvalidParameter(alloc::format!(
            "x0 is off the manifold (|G| = {r:e})"
        )));
    }
    let points = rk4_on_manifold(m, ext, x0, h, steps)?;
    let values = points.iter().map(|p| ext.value(p)).collect();
    Ok(Trajectory::from_points(h, t0, points, values))
}

/// Smallest grid time after which every point stays within `tube` of the set.
pub fn identification_time(traj: &Trajectory, set: &dyn ClosedSet, tube: f64) -> Result<Option<f64>> {
    let mut first_inside = traj.len();
    for k in (0..traj.len()).rev() {
        if set.distance(&traj.points[k])? > tube {
            break;
        }
        first_inside = k;
    }
    Ok((first_inside < traj.len()).then(|| traj.times[first_inside]))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VelocityReport {
    pub energy: f64,
    /// Largest speed over the last 10% of steps.
    pub tail_speed: f64,
    pub tail_start_time: f64,
    pub eps: f64,
    /// `tail_speed ≤ eps`
    pub essentially_converged: bool,
}

pub fn velocity_diagnostics(traj: &Trajectory, eps: f64) -> Result<VelocityReport> {
    let n = traj.len();
    if n < 11 {
        return Err(Error::TooFewSamples { found: n, needed: 11 });
    }
    let tail = ((n - 1) / 10).max(1);
    let start = n - tail;
    let tail_speed = traj.speeds[start..].iter().copied().fold(0.0, f64::max);
    Ok(VelocityReport {
        energy: traj.total_energy(),
        tail_speed,
        tail_start_time: traj.times[start],
        eps,
        essentially_converged: tail_speed <= eps,
    })
}

/// Default constant in the post-identification gap test `gap ≤ C h`.
pub const GAP_CONSTANT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompareReport {
    pub identification_time: f64,
    /// Sup-norm distance on `[T*, T]` between the trajectory and the
    /// Riemannian flow restarted from the projection of `x(T*)`.
    pub gap: f64,
    pub h: f64,
    /// `gap / h`
    pub constant: f64,
    pub pass: bool,
}

/// Restarts the Riemannian flow on `M` from `proj_M(x(T*))` and measures the
/// sup-norm gap to the trajectory after `T*`. The smooth extension is taken
/// from the stratum of `f` registered on `M`.
pub fn compare_after_identification(
    f: &FunctionModel,
    m: &Manifold,
    traj: &Trajectory,
    tube: f64,
) -> Result<CompareReport> {
    let ext = f
        .strata()
        .iter()
        .find(|s| s.manifold.name() == m.name())
        .map(|s| s.extension.clone())
        .ok_or_else(|| Error::MissingMetadata(alloc::format!("no stratum registered on {}", m.name())))?;
    let t_star = identification_time(traj, m, tube)?.ok_or(Error::MissingIdentification)?;
    let k0 = traj
        .times
        .iter()
        .position(|&t| t == t_star)
        .expect("identification time is a grid time");
    let start = m.project(&traj.points[k0])?;
    let steps = traj.len() - 1 - k0;
    let reference = riemannian_from(m, &ext, &start, traj.h, t_star, steps)?;
    let gap = traj.points[k0..]
        .iter()
        .zip(&reference.points)
        .map(|(a, b)| linalg::dist(a, b))
        .fold(0.0, f64::max);
    Ok(CompareReport {
        identification_time: t_star,
        gap,
        h: traj.h,
        constant: gap / traj.h,
        pass: gap <= GAP_CONSTANT * traj.h,
    })
}
