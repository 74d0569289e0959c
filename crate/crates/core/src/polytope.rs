//! Convex polytopes in V-representation and exact nearest-point computations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Largest vertex count accepted by the face-enumeration routines.
pub const MAX_VERTICES: usize = 16;

/// Convex hull of a finite vertex list in ℝⁿ. An empty vertex list denotes
/// the empty set (e.g. the subdifferential outside the domain).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

/// Nearest point of a polytope to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNorm {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Convex weights over the canonical vertex list realising `point`.
    pub weights: Vec<f64>,
}

impl Polytope {
    /// Builds a polytope, removing exact duplicate vertices.
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>) -> Self {
        let mut p = Self { dim, vertices };
        p.canonicalize();
        p
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            vertices: Vec::new(),
        }
    }

    pub fn singleton(point: Vec<f64>) -> Self {
        Self {
            dim: point.len(),
            vertices: alloc::vec![point],
        }
    }

    /// Segment `[a, b]`; collapses to a point when `a == b`.
    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self::new(a.len(), alloc::vec![a, b])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    fn canonicalize(&mut self) {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.vertices.len());
        for v in self.vertices.drain(..) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        self.vertices = out;
    }

    /// Image under the linear map `x ↦ Aᵀ x` followed by translation.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let vertices: Vec<Vec<f64>> = self.vertices.iter().map(|v| f(v)).collect();
        let dim = vertices.first().map_or(self.dim, Vec::len);
        Self::new(dim, vertices)
    }

    pub fn translate(&self, shift: &[f64]) -> Self {
        self.map(|v| linalg::add(v, shift))
    }

    /// Minkowski sum (vertex set of the sum is contained in pairwise sums).
    pub fn minkowski_sum(&self, other: &Polytope) -> Self {
        let mut vs = Vec::with_capacity(self.len() * other.len());
        for a in &self.vertices {
            for b in &other.vertices {
                vs.push(linalg::add(a, b));
            }
        }
        Self::new(self.dim, vs)
    }

    /// Exact nearest point of the hull to the origin by enumerating every
    /// affinely independent vertex subset, solving the affine least-squares
    /// problem on it and keeping the feasible solution of least norm.
    pub fn min_norm(&self) -> Result<MinNorm> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        if self.vertices.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices {
                count: self.vertices.len(),
                limit: MAX_VERTICES,
            });
        }
        min_norm_over(&self.vertices, self.dim, None).ok_or_else(|| Error::Degenerate("no feasible face found".into()))
    }

    /// Distance from the origin to the hull (`+inf` for the empty set).
    pub fn distance_to_origin(&self) -> Result<f64> {
        if self.vertices.is_empty() {
            return Ok(f64::INFINITY);
        }
        Ok(self.min_norm()?.distance)
    }
}

/// Feasible least-norm point on the affine hull of `vs[idx]`, or `None` when
/// the subset is affinely dependent or the unconstrained minimiser leaves the
/// simplex.
fn face_min_norm(vs: &[Vec<f64>], idx: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    let base = &vs[idx[0]];
    let m = idx.len() - 1;
    if m == 0 {
        return Some((base.clone(), alloc::vec![1.0]));
    }
    let dirs: Vec<Vec<f64>> = idx[1..].iter().map(|&i| linalg::sub(&vs[i], base)).collect();
    let mut gram = Matrix::zeros(m, m);
    let mut rhs = alloc::vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            gram.set(i, j, linalg::dot(&dirs[i], &dirs[j]));
        }
        rhs[i] = -linalg::dot(&dirs[i], base);
    }
    // Rank test on the directions themselves, not the squared Gram matrix.
    let (basis, deficient) = linalg::orthonormal_basis(&dirs, 1e-10);
    if deficient || basis.len() != m {
        return None;
    }
    let mu = linalg::solve(&gram, &rhs, 1e-15)?;
    let lead = 1.0 - mu.iter().sum::<f64>();
    let tol = 1e-12;
    if lead < -tol || mu.iter().any(|&x| x < -tol) {
        return None;
    }
    let mut point = base.clone();
    for (d, &c) in dirs.iter().zip(&mu) {
        for (p, di) in point.iter_mut().zip(d) {
            *p += c * di;
        }
    }
    let mut weights = alloc::vec![lead];
    weights.extend(mu);
    Some((point, weights))
}

/// Brute-force nearest point over all faces spanned by vertex subsets of the
/// index mask `allowed` (all vertices when `None`).
pub(crate) fn min_norm_over(vs: &[Vec<f64>], dim: usize, allowed: Option<u32>) -> Option<MinNorm> {
    let k = vs.len();
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let allowed = allowed.unwrap_or(full);
    let max_size = (dim + 1).min(k);
    let mut best: Option<MinNorm> = None;
    let mut idx = Vec::with_capacity(max_size);
    for mask in 1..=full {
        if mask & !allowed != 0 || mask.count_ones() as usize > max_size {
            continue;
        }
        idx.clear();
        idx.extend((0..k).filter(|i| mask & (1 << i) != 0));
        if let Some((point, w)) = face_min_norm(vs, &idx) {
            let d = linalg::norm(&point);
            if best.as_ref().is_none_or(|b| d < b.distance) {
                let mut weights = alloc::vec![0.0; k];
                for (&i, &wi) in idx.iter().zip(&w) {
                    weights[i] = wi.max(0.0);
                }
                best = Some(MinNorm {
                    point,
                    distance: d,
                    weights,
                });
            }
        }
    }
    best
}

/// Distance from the origin to the relative boundary of `conv(gradients)`,
/// the modulus of identifiability of a max function whose active gradients
/// are `gradients`. Requires affinely independent vertices with the origin in
/// the relative interior of their hull.
pub fn maxfn_modulus(gradients: &Polytope) -> Result<f64> {
    let vs = gradients.vertices();
    let k = vs.len();
    if k == 0 {
        return Err(Error::EmptyPolytope);
    }
    if k > MAX_VERTICES {
        return Err(Error::TooManyVertices {
            count: k,
            limit: MAX_VERTICES,
        });
    }
    if k < 2 {
        return Err(Error::Degenerate(
            "a single gradient has empty relative boundary".into(),
        ));
    }
    let dirs: Vec<Vec<f64>> = vs[1..].iter().map(|v| linalg::sub(v, &vs[0])).collect();
    let (_, deficient) = linalg::orthonormal_basis(&dirs, 1e-10);
    if deficient {
        return Err(Error::Degenerate("gradients are affinely dependent".into()));
    }
    let all: Vec<usize> = (0..k).collect();
    let scale = vs.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max);
    match face_min_norm(vs, &all) {
        Some((p, w)) if linalg::norm(&p) <= 1e-12 * scale.max(1.0) && w.iter().all(|&x| x > 1e-12) => {}
        _ => {
            return Err(Error::Degenerate(
                "origin is not in the relative interior of the gradient hull".into(),
            ))
        }
    }
    let full: u32 = (1u32 << k) - 1;
    let mut best = f64::INFINITY;
    for drop in 0..k {
        let facet = full & !(1u32 << drop);
        if let Some(mn) = min_norm_over(vs, gradients.dim(), Some(facet)) {
            best = best.min(mn.distance);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn duplicates_are_removed() {
        let p = Polytope::new(2, vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn origin_inside_segment() {
        let p = Polytope::segment(vec![1.0, 0.0], vec![-1.0, 0.0]);
        let mn = p.min_norm().unwrap();
        assert!(mn.distance < 1e-15);
    }

    #[test]
    fn segment_projection() {
        let p = Polytope::segment(vec![-1.0, 2.0], vec![1.0, 2.0]);
        let mn = p.min_norm().unwrap();
        assert!((mn.distance - 2.0).abs() < 1e-12);
        assert!(mn.point[0].abs() < 1e-12 && (mn.point[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_point() {
        let p = Polytope::singleton(vec![0.0, 5.0]);
        assert_eq!(p.min_norm().unwrap().distance, 5.0);
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(Polytope::empty(2).min_norm(), Err(Error::EmptyPolytope));
        assert_eq!(Polytope::empty(2).distance_to_origin(), Ok(f64::INFINITY));
    }

    #[test]
    fn redundant_interior_vertex() {
        // square with its centre listed as an extra vertex
        let p = Polytope::new(
            2,
            vec![
                vec![1.0, 1.0],
                vec![3.0, 1.0],
                vec![1.0, 3.0],
                vec![3.0, 3.0],
                vec![2.0, 2.0],
            ],
        );
        let mn = p.min_norm().unwrap();
        assert!((mn.distance - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn maxfn_segment_and_triangle() {
        let seg = Polytope::segment(vec![1.0, 0.0], vec![-1.0, 0.0]);
        assert_eq!(maxfn_modulus(&seg).unwrap(), 1.0);
        let tri = Polytope::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
        assert!((maxfn_modulus(&tri).unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn maxfn_rejects_origin_outside() {
        let seg = Polytope::segment(vec![1.0, 0.0], vec![2.0, 0.0]);
        assert!(matches!(maxfn_modulus(&seg), Err(Error::Degenerate(_))));
        let dep = Polytope::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![2.0, 0.0]]);
        assert!(matches!(maxfn_modulus(&dep), Err(Error::Degenerate(_))));
    }
}
