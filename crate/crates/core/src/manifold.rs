//! Embedded submanifolds given locally by a defining map `G` with surjective
//! Jacobian, together with projection, tangent spaces and Riemannian
//! gradients.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;
pub type ProjectFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Residual accepted for points returned by [`Manifold::project`].
pub const PROJECTION_RESIDUAL: f64 = 1e-10;
/// Tangential stationarity accepted for the iterative projection.
pub const PROJECTION_STATIONARITY: f64 = 1e-8;
/// Residual below which a point counts as lying on the manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-9;

/// Anything with a Euclidean distance function.
pub trait ClosedSet {
    fn distance(&self, x: &[f64]) -> Result<f64>;

    fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }
}

/// Global chart of a one-dimensional manifold, used for arc-length
/// computations.
#[derive(Clone)]
pub struct CurveChart {
    pub point: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
    pub speed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub param: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

/// A manifold `{x : G(x) = 0}` around a reference point.
#[derive(Clone)]
pub struct Manifold {
    name: String,
    ambient_dim: usize,
    codim: usize,
    map: MapFn,
    jacobian: JacobianFn,
    reference: Vec<f64>,
    radius: f64,
    projector: Option<ProjectFn>,
    chart: Option<CurveChart>,
}

impl fmt::Debug for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manifold")
            .field("name", &self.name)
            .field("ambient_dim", &self.ambient_dim)
            .field("codim", &self.codim)
            .field("reference", &self.reference)
            .field("radius", &self.radius)
            .finish()
    }
}

impl Manifold {
    /// Manifold from a defining map. Fails when `G(reference) ≠ 0` or the
    /// Jacobian there is not surjective.
    pub fn from_map(
        name: impl Into<String>,
        ambient_dim: usize,
        codim: usize,
        map: MapFn,
        jacobian: JacobianFn,
        reference: Vec<f64>,
        radius: f64,
    ) -> Result<Self> {
        if reference.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: reference.len(),
            });
        }
        let m = Self {
            name: name.into(),
            ambient_dim,
            codim,
            map,
            jacobian,
            reference,
            radius,
            projector: None,
            chart: None,
        };
        let g = m.residual(&m.reference);
        if g > ON_MANIFOLD_TOL {
            return Err(Error::InvalidParameter(alloc::format!(
                "reference point is off the manifold (|G| = {g:e})"
            )));
        }
        m.row_basis(&m.reference)?;
        Ok(m)
    }

    pub fn with_projector(mut self, projector: ProjectFn) -> Self {
        self.projector = Some(projector);
        self
    }

    pub fn with_chart(mut self, chart: CurveChart) -> Self {
        self.chart = Some(chart);
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    /// The parabola `x₂ = x₁²` in ℝ², reference point 0.
    pub fn parabola() -> Self {
        Self::from_map(
            "parabola",
            2,
            1,
            Arc::new(|x: &[f64]| vec![x[1] - x[0] * x[0]]),
            Arc::new(|x: &[f64]| Matrix::from_rows(&[vec![-2.0 * x[0], 1.0]])),
            vec![0.0, 0.0],
            1.0,
        )
        .expect("parabola is a manifold at 0")
        .with_projector(Arc::new(|x: &[f64]| {
            let s = nearest_on_parabola(1.0, x[1], x[0]);
            vec![s, s * s]
        }))
        .with_chart(CurveChart {
            point: Arc::new(|s| vec![s, s * s]),
            speed: Arc::new(|s| (1.0 + 4.0 * s * s).sqrt()),
            param: Arc::new(|x: &[f64]| x[0]),
        })
    }

    /// Affine hyperplane `{x : ⟨normal, x⟩ = offset}` with reference point
    /// the foot of the perpendicular from the origin.
    pub fn hyperplane(name: impl Into<String>, normal: Vec<f64>, offset: f64) -> Self {
        let n = normal.len();
        let nn = linalg::dot(&normal, &normal);
        let reference = linalg::scale(&normal, offset / nn);
        let (nm, nj, np) = (normal.clone(), normal.clone(), normal.clone());
        let mut m = Self::from_map(
            name,
            n,
            1,
            Arc::new(move |x: &[f64]| vec![linalg::dot(&nm, x) - offset]),
            Arc::new(move |_x: &[f64]| Matrix::from_rows(core::slice::from_ref(&nj))),
            reference,
            f64::INFINITY,
        )
        .expect("nonzero normal defines a hyperplane")
        .with_projector(Arc::new(move |x: &[f64]| {
            let c = (linalg::dot(&np, x) - offset) / nn;
            let mut p = linalg::axpy(x, -c, &np);
            // exact zeros on coordinate hyperplanes keep the kink exactly hit
            for (pi, ni) in p.iter_mut().zip(&np) {
                if *ni != 0.0 && np.iter().filter(|v| **v != 0.0).count() == 1 {
                    *pi = offset / ni;
                }
            }
            p
        }));
        if n == 2 {
            let dir = [-normal[1] / nn.sqrt(), normal[0] / nn.sqrt()];
            let base = m.reference.clone();
            let base2 = base.clone();
            m = m.with_chart(CurveChart {
                point: Arc::new(move |s| vec![base[0] + s * dir[0], base[1] + s * dir[1]]),
                speed: Arc::new(|_| 1.0),
                param: Arc::new(move |x: &[f64]| (x[0] - base2[0]) * dir[0] + (x[1] - base2[1]) * dir[1]),
            });
        }
        m
    }

    /// Coordinate hyperplane `{x : x_axis = 0}` in ℝⁿ.
    pub fn coordinate_hyperplane(dim: usize, axis: usize) -> Self {
        let mut normal = vec![0.0; dim];
        normal[axis] = 1.0;
        Self::hyperplane(alloc::format!("x{}=0", axis + 1), normal, 0.0)
    }

    /// The zero-dimensional manifold `{p}`.
    pub fn point(p: Vec<f64>) -> Self {
        let n = p.len();
        let (pm, pp) = (p.clone(), p.clone());
        Self::from_map(
            "point",
            n,
            n,
            Arc::new(move |x: &[f64]| linalg::sub(x, &pm)),
            Arc::new(move |_x: &[f64]| Matrix::identity(n)),
            p,
            f64::INFINITY,
        )
        .expect("identity Jacobian is surjective")
        .with_projector(Arc::new(move |_x: &[f64]| pp.clone()))
    }

    /// All of ℝⁿ (codimension zero).
    pub fn whole_space(dim: usize) -> Self {
        Self::from_map(
            "whole-space",
            dim,
            0,
            Arc::new(|_x: &[f64]| Vec::new()),
            Arc::new(move |_x: &[f64]| Matrix::zeros(0, dim)),
            vec![0.0; dim],
            f64::INFINITY,
        )
        .expect("empty map")
        .with_projector(Arc::new(|x: &[f64]| x.to_vec()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// Intrinsic dimension `n − m`.
    pub fn dim(&self) -> usize {
        self.ambient_dim - self.codim
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn has_closed_form_projection(&self) -> bool {
        self.projector.is_some()
    }

    pub fn chart(&self) -> Option<&CurveChart> {
        self.chart.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.map)(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix {
        (self.jacobian)(x)
    }

    /// `|G(x)|`
    pub fn residual(&self, x: &[f64]) -> f64 {
        linalg::norm(&self.eval(x))
    }

    fn row_basis(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        let j = self.jacobian(p);
        let rows: Vec<Vec<f64>> = (0..j.rows).map(|i| j.row(i).to_vec()).collect();
        let (basis, deficient) = linalg::orthonormal_basis(&rows, RANK_TOL);
        if deficient || basis.len() != self.codim {
            return Err(Error::RankDeficient);
        }
        Ok(basis)
    }

    /// Nearest point of the manifold to `x`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.len(),
            });
        }
        if let Some(p) = &self.projector {
            return Ok(p(x));
        }
        self.project_iterative(x)
    }

    /// Alternates Newton steps onto `G = 0` with tangential corrections
    /// towards `x` until the KKT conditions `G(p) = 0`, `x − p ⊥ T(p)` hold.
    pub fn project_iterative(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut p = x.to_vec();
        let mut residual = f64::INFINITY;
        let mut stationarity = f64::INFINITY;
        for it in 0..100 {
            for _ in 0..20 {
                let g = self.eval(&p);
                residual = linalg::norm(&g);
                if residual <= PROJECTION_RESIDUAL * 1e-2 {
                    break;
                }
                let j = self.jacobian(&p);
                let mut jjt = Matrix::zeros(j.rows, j.rows);
                for a in 0..j.rows {
                    for b in 0..j.rows {
                        jjt.set(a, b, linalg::dot(j.row(a), j.row(b)));
                    }
                }
                let lam = linalg::solve(&jjt, &g, 1e-14).ok_or(Error::RankDeficient)?;
                let step = j.tr_mul_vec(&lam);
                for (pi, si) in p.iter_mut().zip(&step) {
                    *pi -= si;
                }
            }
            let t = self.tangent_unchecked(&p, &linalg::sub(x, &p))?;
            stationarity = linalg::norm(&t);
            if residual <= PROJECTION_RESIDUAL && stationarity <= PROJECTION_STATIONARITY {
                return Ok(p);
            }
            if it < 99 {
                for (pi, ti) in p.iter_mut().zip(&t) {
                    *pi += ti;
                }
            }
        }
        Err(Error::ProjectionFailure {
            iterations: 100,
            residual,
            stationarity,
        })
    }

    /// Orthogonal projection of `v` onto the tangent space at `p` without
    /// checking that `p` lies on the manifold. The formula is smooth in a
    /// neighbourhood, which integrators rely on for intermediate stages.
    pub fn tangent_unchecked(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let basis = self.row_basis(p)?;
        let mut out = v.to_vec();
        for q in &basis {
            let c = linalg::dot(&out, q);
            for (o, qi) in out.iter_mut().zip(q) {
                *o -= c * qi;
            }
        }
        Ok(out)
    }

    /// Orthogonal projection of `v` onto `T_M(p)`.
    pub fn tangent_project(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let r = self.residual(p);
        if r > ON_MANIFOLD_TOL {
            return Err(Error::InvalidParameter(alloc::format!(
                "tangent projection requested off the manifold (|G| = {r:e})"
            )));
        }
        self.tangent_unchecked(p, v)
    }

    /// Riemannian gradient of any function whose smooth extension has
    /// gradient `ext_grad`.
    pub fn riem_grad(&self, ext_grad: &dyn Fn(&[f64]) -> Vec<f64>, p: &[f64]) -> Result<Vec<f64>> {
        self.tangent_project(p, &ext_grad(p))
    }

    /// Largest ratio of intrinsic (arc-length) to Euclidean distance over
    /// point pairs of the manifold within `r` of the reference point.
    pub fn intrinsic_ratio(&self, r: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::UnsupportedManifoldDimension(self.dim()));
        }
        let chart = self
            .chart
            .as_ref()
            .ok_or_else(|| Error::MissingMetadata("manifold has no curve chart".to_string()))?;
        let s0 = (chart.param)(&self.reference);
        // parameter interval covering the part of M inside the ball
        let mut lo = s0;
        let mut hi = s0;
        let step = r / 64.0;
        while linalg::dist(&(chart.point)(lo - step), &self.reference) <= r {
            lo -= step;
        }
        while linalg::dist(&(chart.point)(hi + step), &self.reference) <= r {
            hi += step;
        }
        let n = 65;
        let params: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .filter(|&s| linalg::dist(&(chart.point)(s), &self.reference) <= r)
            .collect();
        let mut best: f64 = 1.0;
        for (i, &a) in params.iter().enumerate() {
            for &b in &params[i + 1..] {
                let d = linalg::dist(&(chart.point)(a), &(chart.point)(b));
                if d == 0.0 {
                    continue;
                }
                let arc = gauss_legendre(&*chart.speed, a, b, 16);
                best = best.max(arc / d);
            }
        }
        Ok(best)
    }
}

impl ClosedSet for Manifold {
    fn distance(&self, x: &[f64]) -> Result<f64> {
        if self.codim == 0 {
            return Ok(0.0);
        }
        let p = self.project(x)?;
        Ok(linalg::dist(x, &p))
    }
}

/// The closed region `{(u, v) : |u| ≤ α v²}` of ℝ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspRegion {
    pub alpha: f64,
}

impl CuspRegion {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter("cusp region needs alpha > 0".into()));
        }
        Ok(Self { alpha })
    }
}

impl ClosedSet for CuspRegion {
    fn distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: x.len(),
            });
        }
        let (u, v) = (x[0].abs(), x[1]);
        if u <= self.alpha * v * v {
            return Ok(0.0);
        }
        let s = nearest_on_parabola(self.alpha, u, v);
        let du = u - self.alpha * s * s;
        let dv = v - s;
        Ok((du * du + dv * dv).sqrt())
    }
}

/// Parameter `s` of the point `(s, a s²)` nearest to `(lateral, along)`
/// measured as `(along − s)² + (lateral − a s²)²`. Ties go to the larger `s`.
pub(crate) fn nearest_on_parabola(a: f64, lateral: f64, along: f64) -> f64 {
    // stationarity: 4a² s³ + (2 − 4a·lateral) s − 2·along = 0
    let p = (2.0 - 4.0 * a * lateral) / (4.0 * a * a);
    let q = -2.0 * along / (4.0 * a * a);
    let obj = |s: f64| {
        let d1 = along - s;
        let d2 = lateral - a * s * s;
        d1 * d1 + d2 * d2
    };
    let roots = depressed_cubic_roots(p, q);
    let mut best = roots[0];
    let mut best_val = obj(best);
    for &s in &roots[1..] {
        let val = obj(s);
        let tie = (val - best_val).abs() <= 1e-12 * best_val.abs().max(1e-300);
        if val < best_val && !tie || tie && s > best {
            best = s;
            best_val = val;
        }
    }
    best
}

/// Real roots of `s³ + p s + q = 0`, Newton-polished.
pub(crate) fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let mut roots = Vec::with_capacity(3);
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if p < 0.0 && disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            roots.push(m * (theta - 2.0 * core::f64::consts::PI * k as f64 / 3.0).cos());
        }
    } else {
        let d = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        roots.push(libm::cbrt(-q / 2.0 + d) + libm::cbrt(-q / 2.0 - d));
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = *r * *r * *r + p * *r + q;
            let df = 3.0 * *r * *r + p;
            if df == 0.0 {
                break;
            }
            let nr = *r - f / df;
            if !nr.is_finite() {
                break;
            }
            *r = nr;
        }
    }
    roots
}

/// Composite Gauss–Legendre quadrature (5 nodes per panel).
pub(crate) fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}
