//! Function models: value and subdifferential oracles plus metadata.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::manifold::{ClosedSet, Manifold};
use crate::polytope::Polytope;

/// A value in `(−∞, +∞]`. `PosInf` marks points outside the domain and is
/// kept distinct from an overflowing finite computation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// `f64` view with `+∞` for points outside the domain.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

pub type ValueFn = Arc<dyn Fn(&[f64]) -> ExtReal + Send + Sync>;
pub type SubdiffFn = Arc<dyn Fn(&[f64]) -> Polytope + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A C² function with its gradient.
#[derive(Clone)]
pub struct SmoothFunction {
    pub value: ScalarFn,
    pub grad: GradFn,
}

impl SmoothFunction {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(|_| 0.0, move |_| vec![0.0; dim])
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (self.grad)(x)
    }

    pub fn sum(&self, other: &SmoothFunction) -> SmoothFunction {
        let (a, b) = (self.clone(), other.clone());
        let (c, d) = (self.clone(), other.clone());
        SmoothFunction::new(
            move |x| a.value(x) + b.value(x),
            move |x| linalg::add(&c.grad(x), &d.grad(x)),
        )
    }
}

/// A smooth map `ℝⁿ → ℝᵐ` with its Jacobian.
#[derive(Clone)]
pub struct SmoothMap {
    pub dim_in: usize,
    pub dim_out: usize,
    pub eval: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    pub jacobian: Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>,
}

impl SmoothMap {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        jacobian: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim_in,
            dim_out,
            eval: Arc::new(eval),
            jacobian: Arc::new(jacobian),
        }
    }
}

/// A manifold on which the function agrees with a smooth extension.
#[derive(Clone)]
pub struct Stratum {
    pub manifold: Manifold,
    pub extension: SmoothFunction,
}

/// A known critical point with optional identifiable manifold.
#[derive(Clone)]
pub struct CriticalPoint {
    pub point: Vec<f64>,
    pub manifold: Option<Manifold>,
    /// Smooth function agreeing with `f` on `manifold`.
    pub extension: Option<SmoothFunction>,
    /// Quadratic-minorant constant: `f(y) ≥ f(x̄) − ᾱ|y − x̄|²` near `x̄`.
    pub prox_threshold: f64,
}

impl fmt::Debug for CriticalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CriticalPoint")
            .field("point", &self.point)
            .field("manifold", &self.manifold.as_ref().map(Manifold::name))
            .field("prox_threshold", &self.prox_threshold)
            .finish()
    }
}

/// A closed function on ℝⁿ described by exact oracles.
#[derive(Clone)]
pub struct FunctionModel {
    name: String,
    dim: usize,
    value: ValueFn,
    subdiff: SubdiffFn,
    analytic_slope: Option<ScalarFn>,
    critical_points: Vec<CriticalPoint>,
    strata: Vec<Stratum>,
    level_set: Option<Arc<dyn ClosedSet + Send + Sync>>,
    convex: bool,
    pln: bool,
    infimum: Option<f64>,
    lower_bound: Option<f64>,
    lipschitz: Option<f64>,
    notes: Vec<String>,
}

impl fmt::Debug for FunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("critical_points", &self.critical_points)
            .field("convex", &self.convex)
            .field("pln", &self.pln)
            .finish()
    }
}

impl FunctionModel {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> ExtReal + Send + Sync + 'static,
        subdiff: impl Fn(&[f64]) -> Polytope + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            subdiff: Arc::new(subdiff),
            analytic_slope: None,
            critical_points: Vec::new(),
            strata: Vec::new(),
            level_set: None,
            convex: false,
            pln: false,
            infimum: None,
            lower_bound: None,
            lipschitz: None,
            notes: Vec::new(),
        }
    }

    /// Model of a smooth function; the subdifferential is the gradient.
    pub fn smooth(name: impl Into<String>, dim: usize, g: SmoothFunction) -> Self {
        let (gv, gg) = (g.clone(), g.clone());
        let gs = g.clone();
        Self::new(
            name,
            dim,
            move |x| ExtReal::Finite(gv.value(x)),
            move |x| Polytope::singleton(gg.grad(x)),
        )
        .with_analytic_slope(move |x| linalg::norm(&gs.grad(x)))
        .with_pln(true)
        .with_stratum(Stratum {
            manifold: Manifold::whole_space(dim),
            extension: g,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_analytic_slope(mut self, slope: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.analytic_slope = Some(Arc::new(slope));
        self
    }

    pub fn with_critical_point(mut self, cp: CriticalPoint) -> Self {
        self.critical_points.push(cp);
        self
    }

    pub fn with_stratum(mut self, s: Stratum) -> Self {
        self.strata.push(s);
        self
    }

    pub fn with_level_set(mut self, l: Arc<dyn ClosedSet + Send + Sync>) -> Self {
        self.level_set = Some(l);
        self
    }

    pub fn with_convex(mut self, convex: bool) -> Self {
        self.convex = convex;
        if convex {
            self.pln = true;
        }
        self
    }

    pub fn with_pln(mut self, pln: bool) -> Self {
        self.pln = pln;
        self
    }

    /// Registers `inf f`, which is also a lower bound.
    pub fn with_infimum(mut self, inf: f64) -> Self {
        self.infimum = Some(inf);
        self.lower_bound = Some(inf);
        self
    }

    pub fn with_lower_bound(mut self, lb: f64) -> Self {
        self.lower_bound = Some(lb);
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> ExtReal {
        debug_assert_eq!(x.len(), self.dim);
        (self.value)(x)
    }

    /// Value as `f64`, `+∞` outside the domain.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.value(x).to_f64()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.value(x).is_finite()
    }

    /// Vertex description of `∂f(x)`; empty outside the domain.
    pub fn subdiff(&self, x: &[f64]) -> Polytope {
        debug_assert_eq!(x.len(), self.dim);
        (self.subdiff)(x)
    }

    pub fn analytic_slope(&self, x: &[f64]) -> Option<f64> {
        self.analytic_slope.as_ref().map(|s| s(x))
    }

    pub fn has_analytic_slope(&self) -> bool {
        self.analytic_slope.is_some()
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical_points
    }

    /// Registered critical point nearest to `x`.
    pub fn nearest_critical_point(&self, x: &[f64]) -> Option<&CriticalPoint> {
        self.critical_points.iter().min_by(|a, b| {
            linalg::dist(&a.point, x)
                .partial_cmp(&linalg::dist(&b.point, x))
                .unwrap_or(core::cmp::Ordering::Equal)
        })
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn level_set(&self) -> Option<&(dyn ClosedSet + Send + Sync)> {
        self.level_set.as_deref()
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn is_pln(&self) -> bool {
        self.pln
    }

    pub fn infimum(&self) -> Option<f64> {
        self.infimum
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.lower_bound
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// `limiting slope = dist(0, ∂f(x))`, `+∞` outside the domain.
    pub fn limiting_slope(&self, x: &[f64]) -> Result<f64> {
        if !self.in_domain(x) {
            return Ok(f64::INFINITY);
        }
        let p = self.subdiff(x);
        if p.is_empty() {
            return Ok(f64::INFINITY);
        }
        p.distance_to_origin()
    }

    /// Minimal-norm element of `∂f(x)`.
    pub fn min_norm_subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.subdiff(x).min_norm()?.point)
    }
}

/// `f(u) = Σ wᵢ|uᵢ| + Σ cᵢuᵢ` on ℝᵐ, convex with polytopal subdifferential.
pub fn weighted_abs_linear(name: impl Into<String>, abs_weights: Vec<f64>, linear: Vec<f64>) -> FunctionModel {
    let m = abs_weights.len();
    assert_eq!(m, linear.len());
    let (w1, c1) = (abs_weights.clone(), linear.clone());
    let (w2, c2) = (abs_weights.clone(), linear.clone());
    FunctionModel::new(
        name,
        m,
        move |u| ExtReal::Finite(u.iter().zip(&w1).zip(&c1).map(|((x, w), c)| w * x.abs() + c * x).sum()),
        move |u| {
            // product of intervals; each kink coordinate doubles the vertex list
            let mut verts: Vec<Vec<f64>> = vec![Vec::with_capacity(m)];
            for i in 0..m {
                let opts: Vec<f64> = if w2[i] == 0.0 {
                    vec![c2[i]]
                } else if u[i] > 0.0 {
                    vec![c2[i] + w2[i]]
                } else if u[i] < 0.0 {
                    vec![c2[i] - w2[i]]
                } else {
                    vec![c2[i] - w2[i], c2[i] + w2[i]]
                };
                let mut next = Vec::with_capacity(verts.len() * opts.len());
                for v in &verts {
                    for &o in &opts {
                        let mut w = v.clone();
                        w.push(o);
                        next.push(w);
                    }
                }
                verts = next;
            }
            Polytope::new(m, verts)
        },
    )
    .with_convex(true)
}

/// Convex-composite model `g ∘ F` with the chain rule `∂(g∘F)(x) = ∇F(x)ᵀ ∂g(F(x))`.
/// Transversality is assumed at evaluated points.
pub fn compose_amenable(g: &FunctionModel, map: &SmoothMap) -> Result<FunctionModel> {
    if map.dim_out != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: map.dim_out,
        });
    }
    let n = map.dim_in;
    let (g1, f1) = (g.clone(), map.clone());
    let (g2, f2) = (g.clone(), map.clone());
    let mut out = FunctionModel::new(
        alloc::format!("{}∘F", g.name()),
        n,
        move |x| g1.value(&(f1.eval)(x)),
        move |x| {
            let y = (f2.eval)(x);
            let sub = g2.subdiff(&y);
            if sub.is_empty() {
                return Polytope::empty(n);
            }
            let j = (f2.jacobian)(x);
            Polytope::new(n, sub.vertices().iter().map(|v| j.tr_mul_vec(v)).collect())
        },
    )
    .with_pln(g.is_convex() || g.is_pln());
    if let Some(lb) = g.lower_bound() {
        out = out.with_lower_bound(lb);
    }
    Ok(out)
}

/// Sum `f + g` with `g` smooth; values and subdifferentials add exactly.
/// Strata carry over with summed extensions, and critical points of `f`
/// where `∇g` vanishes stay critical.
pub fn add_smooth(f: &FunctionModel, g: &SmoothFunction) -> FunctionModel {
    let n = f.dim();
    let (f1, g1) = (f.clone(), g.clone());
    let (f2, g2) = (f.clone(), g.clone());
    let mut out = FunctionModel::new(
        f.name(),
        n,
        move |x| match f1.value(x) {
            ExtReal::Finite(v) => ExtReal::Finite(v + g1.value(x)),
            ExtReal::PosInf => ExtReal::PosInf,
        },
        move |x| {
            let p = f2.subdiff(x);
            if p.is_empty() {
                p
            } else {
                p.translate(&g2.grad(x))
            }
        },
    )
    .with_pln(f.is_pln());
    for s in f.strata() {
        out = out.with_stratum(Stratum {
            manifold: s.manifold.clone(),
            extension: s.extension.sum(g),
        });
    }
    for cp in f.critical_points() {
        if linalg::norm(&g.grad(&cp.point)) <= 1e-12 {
            out = out.with_critical_point(CriticalPoint {
                point: cp.point.clone(),
                manifold: cp.manifold.clone(),
                extension: cp.extension.as_ref().map(|e| e.sum(g)),
                prox_threshold: cp.prox_threshold,
            });
        }
    }
    out
}

/// Localising bump: `0` on `|x| ≤ δ`, `(|x|²−δ²)³/(4δ²−|x|²)` for
/// `δ < |x| < 2δ`, `+∞` beyond.
pub fn bump(delta: f64, x: &[f64]) -> ExtReal {
    let r2 = linalg::dot(x, x);
    let d2 = delta * delta;
    if r2 <= d2 {
        ExtReal::Finite(0.0)
    } else if r2 < 4.0 * d2 {
        let a = r2 - d2;
        ExtReal::Finite(a * a * a / (4.0 * d2 - r2))
    } else {
        ExtReal::PosInf
    }
}

/// Gradient of [`bump`] on `|x| < 2δ`.
pub fn bump_grad(delta: f64, x: &[f64]) -> Vec<f64> {
    let r2 = linalg::dot(x, x);
    let d2 = delta * delta;
    if r2 <= d2 {
        return vec![0.0; x.len()];
    }
    let a = r2 - d2;
    let b = 4.0 * d2 - r2;
    // d/d(r²) of a³/b = 3a²/b + a³/b²
    let c = 3.0 * a * a / b + a * a * a / (b * b);
    linalg::scale(x, 2.0 * c)
}

/// `f + g` with `g` the localising bump of radius `δ` about the origin; equal
/// to `f` on the closed `δ`-ball, `+∞` outside the open `2δ`-ball.
pub fn localize(f: &FunctionModel, delta: f64) -> Result<FunctionModel> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("localize needs delta > 0".into()));
    }
    let n = f.dim();
    let (f1, f2) = (f.clone(), f.clone());
    let mut out = FunctionModel::new(
        alloc::format!("{}+bump", f.name()),
        n,
        move |x| match (f1.value(x), bump(delta, x)) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        },
        move |x| {
            if !bump(delta, x).is_finite() {
                return Polytope::empty(n);
            }
            let p = f2.subdiff(x);
            if p.is_empty() {
                p
            } else {
                p.translate(&bump_grad(delta, x))
            }
        },
    )
    .with_pln(f.is_pln());
    if let Some(lb) = f.lower_bound() {
        out = out.with_lower_bound(lb);
    }
    let bump_fn = SmoothFunction::new(move |x| bump(delta, x).to_f64(), move |x| bump_grad(delta, x));
    for s in f.strata() {
        out = out.with_stratum(Stratum {
            manifold: s.manifold.clone(),
            extension: s.extension.sum(&bump_fn),
        });
    }
    for cp in f.critical_points() {
        if linalg::norm(&cp.point) <= delta {
            out = out.with_critical_point(cp.clone());
        }
    }
    Ok(out)
}
