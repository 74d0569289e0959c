//! Named example functions with exact oracles.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::manifold::Manifold;
use crate::model::{weighted_abs_linear, CriticalPoint, ExtReal, FunctionModel, SmoothFunction, SmoothMap, Stratum};
use crate::polytope::Polytope;

pub const CATALOG_NAMES: [&str; 7] = [
    "paper-main",
    "abs-plus-square",
    "sqrt-quartic",
    "sqrt-abs",
    "min-linear",
    "min-uv",
    "max-affine-demo",
];

/// Closed-form description of each catalog member, in catalog order.
pub const CATALOG_FORMULAS: [&str; 7] = [
    "5|x2 - x1^2| + x1^2",
    "|u| + v^2",
    "sqrt(u^2 + v^4)",
    "sqrt(|x|)",
    "min{0, x}",
    "min{|u| - v, 0}",
    "max{x1, x2, -x1 - x2}",
];

pub fn catalog_get(name: &str) -> Result<FunctionModel> {
    match name {
        "paper-main" => Ok(parabola_kink()),
        "abs-plus-square" => Ok(abs_plus_square()),
        "sqrt-quartic" => Ok(sqrt_quartic()),
        "sqrt-abs" => Ok(sqrt_abs()),
        "min-linear" => Ok(min_linear()),
        "min-uv" => Ok(min_uv()),
        "max-affine-demo" => Ok(max_affine()),
        _ => Err(Error::UnknownFunction {
            name: name.to_string(),
            valid: CATALOG_NAMES.join(", "),
        }),
    }
}

pub fn formula(name: &str) -> Option<&'static str> {
    CATALOG_NAMES
        .iter()
        .position(|n| *n == name)
        .map(|i| CATALOG_FORMULAS[i])
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `5|x₂ − x₁²| + x₁²`, kinked along the parabola `x₂ = x₁²`.
fn parabola_kink() -> FunctionModel {
    let ext = SmoothFunction::new(|x| 5.0 * x[1] - 4.0 * x[0] * x[0], |x| vec![-8.0 * x[0], 5.0]);
    let m = Manifold::parabola();
    FunctionModel::new(
        "paper-main",
        2,
        |x| ExtReal::Finite(5.0 * (x[1] - x[0] * x[0]).abs() + x[0] * x[0]),
        |x| {
            let up = vec![-8.0 * x[0], 5.0];
            let down = vec![12.0 * x[0], -5.0];
            let w = x[1] - x[0] * x[0];
            if w > 0.0 {
                Polytope::singleton(up)
            } else if w < 0.0 {
                Polytope::singleton(down)
            } else {
                Polytope::segment(up, down)
            }
        },
    )
    .with_analytic_slope(|x| {
        let w = x[1] - x[0] * x[0];
        let s = x[0];
        if w > 0.0 {
            (64.0 * s * s + 25.0).sqrt()
        } else if w < 0.0 {
            (144.0 * s * s + 25.0).sqrt()
        } else {
            2.0 * s.abs() / (1.0 + 4.0 * s * s).sqrt()
        }
    })
    .with_pln(true)
    .with_infimum(0.0)
    .with_level_set(Arc::new(Manifold::point(vec![0.0, 0.0])))
    .with_stratum(Stratum {
        manifold: m.clone(),
        extension: ext.clone(),
    })
    .with_critical_point(CriticalPoint {
        point: vec![0.0, 0.0],
        manifold: Some(m),
        extension: Some(ext),
        prox_threshold: 0.0,
    })
}

/// Convex-composite decomposition `g ∘ F` of the parabola-kink member, with
/// `F(x) = (x₂ − x₁², x₁)` and `g(u, v) = 5|u| + v²`.
pub fn parabola_kink_decomposition() -> (FunctionModel, SmoothMap) {
    let abs = weighted_abs_linear("5|u|", vec![5.0, 0.0], vec![0.0, 0.0]);
    let sq = SmoothFunction::new(|y| y[1] * y[1], |y| vec![0.0, 2.0 * y[1]]);
    let g = crate::model::add_smooth(&abs, &sq)
        .with_name("5|u|+v^2")
        .with_convex(true);
    let map = SmoothMap::new(
        2,
        2,
        |x| vec![x[1] - x[0] * x[0], x[0]],
        |x| Matrix::from_rows(&[vec![-2.0 * x[0], 1.0], vec![1.0, 0.0]]),
    );
    (g, map)
}

/// `|u| + v²`.
fn abs_plus_square() -> FunctionModel {
    let ext = SmoothFunction::new(|x| x[1] * x[1], |x| vec![0.0, 2.0 * x[1]]);
    let m = Manifold::coordinate_hyperplane(2, 0);
    FunctionModel::new(
        "abs-plus-square",
        2,
        |x| ExtReal::Finite(x[0].abs() + x[1] * x[1]),
        |x| {
            let dv = 2.0 * x[1];
            if x[0] == 0.0 {
                Polytope::segment(vec![-1.0, dv], vec![1.0, dv])
            } else {
                Polytope::singleton(vec![sign(x[0]), dv])
            }
        },
    )
    .with_analytic_slope(|x| {
        if x[0] == 0.0 {
            2.0 * x[1].abs()
        } else {
            (1.0 + 4.0 * x[1] * x[1]).sqrt()
        }
    })
    .with_note("slope on u = 0 is 2|v|, which differs from 2v for v < 0")
    .with_convex(true)
    .with_infimum(0.0)
    .with_level_set(Arc::new(Manifold::point(vec![0.0, 0.0])))
    .with_stratum(Stratum {
        manifold: m.clone(),
        extension: ext.clone(),
    })
    .with_critical_point(CriticalPoint {
        point: vec![0.0, 0.0],
        manifold: Some(m),
        extension: Some(ext),
        prox_threshold: 0.0,
    })
}

/// `√(u² + v⁴)`; every cusp region `{|u| ≤ α v²}` is identifiable at 0 but
/// no minimal identifiable set exists.
fn sqrt_quartic() -> FunctionModel {
    FunctionModel::new(
        "sqrt-quartic",
        2,
        |x| ExtReal::Finite((x[0] * x[0] + x[1].powi(4)).sqrt()),
        |x| {
            let r = (x[0] * x[0] + x[1].powi(4)).sqrt();
            if r == 0.0 {
                Polytope::segment(vec![-1.0, 0.0], vec![1.0, 0.0])
            } else {
                Polytope::singleton(vec![x[0] / r, 2.0 * x[1].powi(3) / r])
            }
        },
    )
    .with_analytic_slope(|x| {
        let den = x[0] * x[0] + x[1].powi(4);
        if den == 0.0 {
            0.0
        } else {
            ((x[0] * x[0] + 4.0 * x[1].powi(6)) / den).sqrt()
        }
    })
    .with_convex(true)
    .with_infimum(0.0)
    .with_level_set(Arc::new(Manifold::point(vec![0.0, 0.0])))
    .with_critical_point(CriticalPoint {
        point: vec![0.0, 0.0],
        manifold: None,
        extension: None,
        prox_threshold: 0.0,
    })
}

/// `√|x|` on ℝ.
fn sqrt_abs() -> FunctionModel {
    let m = Manifold::point(vec![0.0]);
    FunctionModel::new(
        "sqrt-abs",
        1,
        |x| ExtReal::Finite(x[0].abs().sqrt()),
        |x| {
            if x[0] == 0.0 {
                Polytope::singleton(vec![0.0])
            } else {
                Polytope::singleton(vec![sign(x[0]) / (2.0 * x[0].abs().sqrt())])
            }
        },
    )
    .with_analytic_slope(|x| if x[0] == 0.0 { 0.0 } else { 0.5 / x[0].abs().sqrt() })
    .with_infimum(0.0)
    .with_level_set(Arc::new(m.clone()))
    .with_stratum(Stratum {
        manifold: m.clone(),
        extension: SmoothFunction::zero(1),
    })
    .with_critical_point(CriticalPoint {
        point: vec![0.0],
        manifold: Some(m),
        extension: Some(SmoothFunction::zero(1)),
        prox_threshold: 0.0,
    })
}

/// `min{0, x}` on ℝ.
fn min_linear() -> FunctionModel {
    FunctionModel::new(
        "min-linear",
        1,
        |x| ExtReal::Finite(x[0].min(0.0)),
        |x| {
            if x[0] < 0.0 {
                Polytope::singleton(vec![1.0])
            } else if x[0] > 0.0 {
                Polytope::singleton(vec![0.0])
            } else {
                Polytope::new(1, vec![vec![0.0], vec![1.0]])
            }
        },
    )
    .with_analytic_slope(|x| if x[0] <= 0.0 { 1.0 } else { 0.0 })
    .with_lipschitz(1.0)
}

/// `min{|u| − v, 0}`.
fn min_uv() -> FunctionModel {
    let line = Manifold::coordinate_hyperplane(2, 0);
    FunctionModel::new(
        "min-uv",
        2,
        |x| ExtReal::Finite((x[0].abs() - x[1]).min(0.0)),
        |x| {
            let (u, v) = (x[0], x[1]);
            let g = u.abs() - v;
            let zero = vec![0.0, 0.0];
            if g > 0.0 {
                Polytope::singleton(zero)
            } else if g < 0.0 {
                if u == 0.0 {
                    Polytope::segment(vec![-1.0, -1.0], vec![1.0, -1.0])
                } else {
                    Polytope::singleton(vec![sign(u), -1.0])
                }
            } else if u == 0.0 {
                Polytope::new(2, vec![zero, vec![-1.0, -1.0], vec![1.0, -1.0]])
            } else {
                Polytope::new(2, vec![zero, vec![sign(u), -1.0]])
            }
        },
    )
    .with_analytic_slope(|x| {
        let (u, v) = (x[0], x[1]);
        let g = u.abs() - v;
        if g > 0.0 {
            0.0
        } else if u == 0.0 {
            1.0
        } else {
            2f64.sqrt()
        }
    })
    .with_lipschitz(2f64.sqrt())
    .with_stratum(Stratum {
        manifold: line,
        extension: SmoothFunction::new(|x| -x[1], |_| vec![0.0, -1.0]),
    })
}

/// `max{x₁, x₂, −x₁ − x₂}`.
fn max_affine() -> FunctionModel {
    const GRADS: [[f64; 2]; 3] = [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]];
    let pieces = |x: &[f64]| [x[0], x[1], -x[0] - x[1]];
    let origin = Manifold::point(vec![0.0, 0.0]);
    let mut f = FunctionModel::new(
        "max-affine-demo",
        2,
        move |x| ExtReal::Finite(pieces(x).into_iter().fold(f64::NEG_INFINITY, f64::max)),
        move |x| {
            let p = pieces(x);
            let m = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Polytope::new(2, (0..3).filter(|&i| p[i] == m).map(|i| GRADS[i].to_vec()).collect())
        },
    )
    .with_convex(true)
    .with_infimum(0.0)
    .with_lipschitz(2f64.sqrt())
    .with_level_set(Arc::new(origin.clone()))
    .with_stratum(Stratum {
        manifold: origin.clone(),
        extension: SmoothFunction::zero(2),
    })
    .with_critical_point(CriticalPoint {
        point: vec![0.0, 0.0],
        manifold: Some(origin),
        extension: Some(SmoothFunction::zero(2)),
        prox_threshold: 0.0,
    });
    // ridges where two pieces tie
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let normal = linalg::sub(&GRADS[i], &GRADS[j]);
        let gi = GRADS[i];
        f = f.with_stratum(Stratum {
            manifold: Manifold::hyperplane(alloc::format!("ridge{i}{j}"), normal, 0.0),
            extension: SmoothFunction::new(move |x| gi[0] * x[0] + gi[1] * x[1], move |_| gi.to_vec()),
        });
    }
    f
}

/// Machine-readable summary of a catalog member.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CatalogInfo {
    pub name: String,
    pub formula: String,
    pub dim: usize,
    pub convex: bool,
    pub pln: bool,
    pub infimum: Option<f64>,
    pub lipschitz: Option<f64>,
    pub analytic_slope: bool,
    pub critical_points: Vec<CriticalPointInfo>,
    pub strata: Vec<ManifoldInfo>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriticalPointInfo {
    pub point: Vec<f64>,
    pub manifold: Option<ManifoldInfo>,
    pub prox_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ManifoldInfo {
    pub name: String,
    pub ambient_dim: usize,
    pub codim: usize,
    pub reference: Vec<f64>,
    /// `None` encodes an unbounded neighbourhood.
    pub radius: Option<f64>,
}

impl ManifoldInfo {
    pub fn of(m: &Manifold) -> Self {
        Self {
            name: m.name().to_string(),
            ambient_dim: m.ambient_dim(),
            codim: m.codim(),
            reference: m.reference().to_vec(),
            radius: m.radius().is_finite().then_some(m.radius()),
        }
    }
}

pub fn describe(name: &str) -> Result<CatalogInfo> {
    let f = catalog_get(name)?;
    Ok(CatalogInfo {
        name: name.to_string(),
        formula: formula(name).unwrap_or_default().to_string(),
        dim: f.dim(),
        convex: f.is_convex(),
        pln: f.is_pln(),
        infimum: f.infimum(),
        lipschitz: f.lipschitz(),
        analytic_slope: f.has_analytic_slope(),
        critical_points: f
            .critical_points()
            .iter()
            .map(|c| CriticalPointInfo {
                point: c.point.clone(),
                manifold: c.manifold.as_ref().map(ManifoldInfo::of),
                prox_threshold: c.prox_threshold,
            })
            .collect(),
        strata: f.strata().iter().map(|s| ManifoldInfo::of(&s.manifold)).collect(),
        notes: f.notes().to_vec(),
    })
}

/// Summaries of every catalog member.
pub fn manifest() -> Vec<CatalogInfo> {
    CATALOG_NAMES
        .iter()
        .map(|n| describe(n).expect("catalog names resolve"))
        .collect()
}
