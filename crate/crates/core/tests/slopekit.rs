use ident_core::slope::{
    default_probe_radii, default_radii, limiting_slope, maxfn_modulus, minnorm, modulus_probe, slope_estimate,
};
use ident_core::{catalog_get, ClosedSet, CuspRegion, Error, Manifold, Polytope, CATALOG_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_ball_points(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x.iter().map(|c| c * c).sum::<f64>() < 1.0 {
            out.push(x);
        }
    }
    out
}

#[test]
fn minnorm_origin_inside_segment() {
    let m = minnorm(&Polytope::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]])).unwrap();
    assert_eq!(m.distance, 0.0);
    assert!(m.point.iter().all(|c| c.abs() <= 1e-12));
}

#[test]
fn minnorm_projects_onto_segment() {
    let m = minnorm(&Polytope::new(2, vec![vec![-1.0, 2.0], vec![1.0, 2.0]])).unwrap();
    assert!((m.distance - 2.0).abs() <= 1e-12);
    assert!(m.point[0].abs() <= 1e-12 && (m.point[1] - 2.0).abs() <= 1e-12);
}

#[test]
fn minnorm_singleton() {
    let m = minnorm(&Polytope::singleton(vec![0.0, 5.0])).unwrap();
    assert_eq!(m.distance, 5.0);
}

#[test]
fn minnorm_rejects_empty_and_oversized() {
    assert_eq!(minnorm(&Polytope::empty(2)).unwrap_err(), Error::EmptyPolytope);
    let many: Vec<Vec<f64>> = (0..17).map(|k| vec![k as f64, 1.0]).collect();
    assert!(matches!(
        minnorm(&Polytope::new(2, many)),
        Err(Error::TooManyVertices { .. })
    ));
}

#[test]
fn limiting_slopes_by_hand() {
    let f = catalog_get("abs-plus-square").unwrap();
    assert_eq!(limiting_slope(&f, &[0.0, 0.0]).unwrap(), 0.0);
    assert!((limiting_slope(&f, &[0.0, 1.0]).unwrap() - 2.0).abs() <= 1e-12);
    let g = catalog_get("paper-main").unwrap();
    assert!((limiting_slope(&g, &[0.0, 1.0]).unwrap() - 5.0).abs() <= 1e-12);
}

#[test]
fn limiting_slope_is_infinite_off_domain() {
    let f = ident_core::model::localize(&catalog_get("abs-plus-square").unwrap(), 0.5).unwrap();
    assert_eq!(limiting_slope(&f, &[3.0, 0.0]).unwrap(), f64::INFINITY);
}

#[test]
fn slope_of_abs_plus_square_off_the_kink() {
    let f = catalog_get("abs-plus-square").unwrap();
    let s = slope_estimate(&f, &[1.0, 1.0], &default_radii()).unwrap();
    assert!((s.value - 5f64.sqrt()).abs() <= 1e-3 * 5f64.sqrt());
    for (_, ratio) in &s.per_radius {
        assert!(*ratio <= s.value + 1e-2);
    }
}

#[test]
fn slope_of_sqrt_quartic_on_the_axis() {
    let f = catalog_get("sqrt-quartic").unwrap();
    let s = slope_estimate(&f, &[1.0, 0.0], &default_radii()).unwrap();
    assert!((s.value - 1.0).abs() <= 1e-3);
}

#[test]
fn slope_vanishes_at_minimizers() {
    for name in ["abs-plus-square", "paper-main", "sqrt-quartic", "max-affine-demo"] {
        let f = catalog_get(name).unwrap();
        let s = slope_estimate(&f, &[0.0, 0.0], &default_radii()).unwrap();
        assert_eq!(s.value, 0.0, "{name}");
    }
}

#[test]
fn slope_needs_some_domain_at_every_radius() {
    let f = ident_core::model::localize(&catalog_get("sqrt-abs").unwrap(), 0.01).unwrap();
    assert!(matches!(
        slope_estimate(&f, &[0.015], &[0.1]),
        Err(Error::InsufficientDomain { .. })
    ));
}

#[test]
fn numeric_slope_matches_analytic_slope() {
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        if !f.has_analytic_slope() {
            continue;
        }
        for x in unit_ball_points(41, 100, f.dim()) {
            let exact = f.analytic_slope(&x).unwrap();
            let est = slope_estimate(&f, &x, &default_radii()).unwrap().value;
            assert!(
                (est - exact).abs() <= 1e-3 * exact.max(1e-9),
                "{name} at {x:?}: {est} vs {exact}"
            );
        }
    }
}

#[test]
fn limiting_slope_bounded_by_numeric_slope() {
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        let mut pts = unit_ball_points(43, 30, f.dim());
        if f.dim() == 2 {
            pts.extend([vec![0.0, 0.5], vec![0.5, 0.25], vec![0.0, -0.3]]);
        }
        for x in pts {
            let lim = limiting_slope(&f, &x).unwrap();
            let est = slope_estimate(&f, &x, &default_radii()).unwrap().value;
            assert!(lim <= est + 1e-2, "{name} at {x:?}: {lim} > {est}");
        }
    }
}

#[test]
fn modulus_of_abs_plus_square_is_one() {
    let f = catalog_get("abs-plus-square").unwrap();
    let m = Manifold::coordinate_hyperplane(2, 0);
    let rep = modulus_probe(&f, &m, &[0.0, 0.0], &default_probe_radii(), 1e-3).unwrap();
    assert!((rep.estimate - 1.0).abs() <= 5e-2);
    let (lo, hi) = rep.value_window;
    for s in &rep.samples {
        assert!(m.distance(&s.point).unwrap() > rep.tube);
        assert!(s.value >= lo - 10.0 * s.radius && s.value <= hi + 10.0 * s.radius);
    }
}

#[test]
fn sqrt_quartic_axis_is_not_identifiable() {
    let f = catalog_get("sqrt-quartic").unwrap();
    let k = 50.0_f64;
    let last = limiting_slope(&f, &[k.powi(-3), 1.0 / k]).unwrap();
    assert!(last <= 0.05);
    // the probe reaches small slopes near the axis once the tube is thin
    let axis = Manifold::coordinate_hyperplane(2, 0);
    let rep = modulus_probe(&f, &axis, &[0.0, 0.0], &default_probe_radii(), 1e-6).unwrap();
    let least = rep.per_radius.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    assert!(least < 0.1, "{least}");
}

#[test]
fn cusp_regions_have_positive_modulus() {
    let f = catalog_get("sqrt-quartic").unwrap();
    for alpha in [0.5, 1.0, 2.0] {
        let region = CuspRegion::new(alpha).unwrap();
        let bound = alpha * alpha / (1.0 + alpha * alpha);
        for tube in [1e-3, 1e-6] {
            let rep = modulus_probe(&f, &region, &[0.0, 0.0], &default_probe_radii(), tube).unwrap();
            assert!(
                rep.estimate >= 0.9 * bound,
                "alpha {alpha} tube {tube}: {}",
                rep.estimate
            );
        }
    }
}

#[test]
fn parabola_is_identifiable_for_the_kink() {
    let f = catalog_get("paper-main").unwrap();
    let rep = modulus_probe(&f, &Manifold::parabola(), &[0.0, 0.0], &default_probe_radii(), 1e-3).unwrap();
    assert!(rep.estimate >= 1.0);
}

#[test]
fn modulus_shrinks_with_the_tube() {
    let f = catalog_get("sqrt-quartic").unwrap();
    let axis = Manifold::coordinate_hyperplane(2, 0);
    let mut prev = f64::INFINITY;
    for tube in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let est = modulus_probe(&f, &axis, &[0.0, 0.0], &default_probe_radii(), tube)
            .unwrap()
            .estimate;
        assert!(est <= prev + 5e-2, "tube {tube}: {est} after {prev}");
        prev = est;
    }
}

#[test]
fn modulus_probe_rejects_points_off_the_set() {
    let f = catalog_get("abs-plus-square").unwrap();
    let m = Manifold::coordinate_hyperplane(2, 0);
    assert!(modulus_probe(&f, &m, &[0.5, 0.0], &default_probe_radii(), 1e-3).is_err());
}

#[test]
fn max_function_moduli() {
    assert_eq!(
        maxfn_modulus(&Polytope::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]])).unwrap(),
        1.0
    );
    let tri = Polytope::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
    assert!((maxfn_modulus(&tri).unwrap() - 1.0 / 5f64.sqrt()).abs() <= 1e-12);
    for c in [0.1, 2.0, 7.5] {
        let seg = Polytope::new(2, vec![vec![c, 0.0], vec![-c, 0.0]]);
        assert!((maxfn_modulus(&seg).unwrap() - c).abs() <= 1e-15);
    }
}

#[test]
fn max_function_modulus_needs_origin_inside() {
    let off = Polytope::new(2, vec![vec![1.0, 1.0], vec![2.0, 1.0]]);
    assert!(matches!(maxfn_modulus(&off), Err(Error::Degenerate(_))));
}

#[test]
fn probe_agrees_with_the_max_function_formula() {
    let f = catalog_get("max-affine-demo").unwrap();
    let origin = Manifold::point(vec![0.0, 0.0]);
    let rep = modulus_probe(&f, &origin, &[0.0, 0.0], &default_probe_radii(), 1e-3).unwrap();
    let grads = Polytope::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
    assert!(
        (rep.estimate - maxfn_modulus(&grads).unwrap()).abs() <= 1e-9,
        "{}",
        rep.estimate
    );
}
