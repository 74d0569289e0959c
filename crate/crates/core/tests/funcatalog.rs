use ident_core::catalog::{self, parabola_kink_decomposition};
use ident_core::linalg::Matrix;
use ident_core::model::{add_smooth, bump, compose_amenable, localize, weighted_abs_linear, SmoothFunction};
use ident_core::{catalog_get, DesingularizerSpec, Error, ExtReal, FunctionModel, SmoothMap, CATALOG_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(seed: u64, n: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-radius..radius)).collect())
        .collect()
}

fn same_vertex_sets(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let covered = |xs: &[Vec<f64>], ys: &[Vec<f64>]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol)))
    };
    covered(a, b) && covered(b, a)
}

#[test]
fn parabola_kink_value_at_one_one() {
    let f = catalog_get("paper-main").unwrap();
    assert_eq!(f.eval(&[1.0, 1.0]), 1.0);
}

#[test]
fn abs_plus_square_vanishes_at_origin() {
    let f = catalog_get("abs-plus-square").unwrap();
    assert_eq!(f.value(&[0.0, 0.0]), ExtReal::Finite(0.0));
}

#[test]
fn parabola_kink_gradient_above_the_kink() {
    let f = catalog_get("paper-main").unwrap();
    assert_eq!(f.subdiff(&[0.0, 1.0]).vertices(), &[vec![0.0, 5.0]]);
}

#[test]
fn unknown_name_lists_every_member() {
    let Err(Error::UnknownFunction { name, valid }) = catalog_get("nope") else {
        panic!("expected an unknown-function error");
    };
    assert_eq!(name, "nope");
    for n in CATALOG_NAMES {
        assert!(valid.contains(n));
    }
}

#[test]
fn registered_critical_points_are_stationary() {
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        for cp in f.critical_points() {
            assert!(f.limiting_slope(&cp.point).unwrap() <= 1e-12, "{name}");
        }
    }
}

#[test]
fn subdifferential_nonempty_where_slope_finite() {
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        for x in random_points(3, 50, f.dim(), 1.0) {
            if f.in_domain(&x) && f.analytic_slope(&x).is_some_and(f64::is_finite) {
                assert!(!f.subdiff(&x).is_empty(), "{name} at {x:?}");
            }
        }
    }
}

#[test]
fn values_are_lower_semicontinuous_along_sequences() {
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        for x in random_points(5, 20, f.dim(), 1.0) {
            let fx = f.eval(&x);
            let liminf = (30..50)
                .map(|k| {
                    let t = 2f64.powi(-k);
                    let y: Vec<f64> = x.iter().map(|c| c + t).collect();
                    f.eval(&y)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(liminf >= fx - 1e-6, "{name} at {x:?}");
        }
    }
}

#[test]
fn decomposition_matches_parabola_kink() {
    let (g, map) = parabola_kink_decomposition();
    let h = compose_amenable(&g, &map).unwrap();
    let f = catalog_get("paper-main").unwrap();
    let mut pts = random_points(11, 20, 2, 1.5);
    pts.push(vec![0.5, 0.25]);
    for x in pts {
        assert!((h.eval(&x) - f.eval(&x)).abs() <= 1e-12);
        assert!(same_vertex_sets(
            h.subdiff(&x).vertices(),
            f.subdiff(&x).vertices(),
            1e-9
        ));
    }
}

#[test]
fn chain_rule_through_smooth_map_is_its_gradient() {
    let id = weighted_abs_linear("identity", vec![0.0], vec![1.0]);
    let map = SmoothMap::new(
        2,
        1,
        |x| vec![x[0] * x[1] + x[1].sin()],
        |x| Matrix::from_rows(&[vec![x[1], x[0] + x[1].cos()]]),
    );
    let f = compose_amenable(&id, &map).unwrap();
    let x = [0.7, -0.2];
    assert_eq!(f.subdiff(&x).vertices(), &[vec![-0.2, 0.7 + (-0.2f64).cos()]]);
}

#[test]
fn chain_rule_for_absolute_first_coordinate() {
    let g = weighted_abs_linear("|u|", vec![1.0], vec![0.0]);
    let map = SmoothMap::new(2, 1, |x| vec![x[0]], |_| Matrix::from_rows(&[vec![1.0, 0.0]]));
    let f = compose_amenable(&g, &map).unwrap();
    assert!(same_vertex_sets(
        f.subdiff(&[0.0, 3.0]).vertices(),
        &[vec![-1.0, 0.0], vec![1.0, 0.0]],
        0.0
    ));
}

#[test]
fn compose_rejects_range_mismatch() {
    let g = weighted_abs_linear("|u|", vec![1.0], vec![0.0]);
    let map = SmoothMap::new(2, 2, |x| x.to_vec(), |_| Matrix::identity(2));
    assert!(matches!(
        compose_amenable(&g, &map),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn bump_profile() {
    let delta = 0.3;
    assert_eq!(bump(delta, &[delta, 0.0]), ExtReal::Finite(0.0));
    let r = 2f64.sqrt() * delta;
    let b = bump(delta, &[r / 2f64.sqrt(), r / 2f64.sqrt()]).to_f64();
    assert!((b - delta.powi(4) / 2.0).abs() <= 1e-15);
    assert_eq!(bump(delta, &[2.0 * delta, 0.0]), ExtReal::PosInf);
    assert_eq!(bump(delta, &[0.0, 5.0]), ExtReal::PosInf);
}

#[test]
fn localize_keeps_the_ball_and_cuts_outside() {
    let f = catalog_get("paper-main").unwrap();
    let g = localize(&f, 0.5).unwrap();
    for x in random_points(17, 200, 2, 0.5) {
        if x[0].hypot(x[1]) <= 0.5 {
            assert_eq!(g.value(&x), f.value(&x));
            assert_eq!(g.subdiff(&x), f.subdiff(&x));
        }
    }
    assert_eq!(g.value(&[1.0, 0.0]), ExtReal::PosInf);
    assert!(localize(&f, 0.0).is_err());
}

#[test]
fn adding_zero_changes_nothing() {
    let f = catalog_get("abs-plus-square").unwrap();
    let g = add_smooth(&f, &SmoothFunction::zero(2));
    for x in random_points(19, 50, 2, 2.0) {
        assert_eq!(g.value(&x), f.value(&x));
        assert_eq!(g.subdiff(&x), f.subdiff(&x));
    }
    assert_eq!(g.is_pln(), f.is_pln());
}

#[test]
fn abs_plus_smooth_square_is_the_catalog_member() {
    let abs_u = weighted_abs_linear("|u|", vec![1.0, 0.0], vec![0.0, 0.0]);
    let sq = SmoothFunction::new(|x| x[1] * x[1], |x| vec![0.0, 2.0 * x[1]]);
    let g = add_smooth(&abs_u, &sq);
    let f = catalog_get("abs-plus-square").unwrap();
    let mut pts = random_points(23, 20, 2, 1.0);
    pts.push(vec![0.0, 0.4]);
    for x in pts {
        assert!((g.eval(&x) - f.eval(&x)).abs() <= 1e-15);
        assert!(same_vertex_sets(
            g.subdiff(&x).vertices(),
            f.subdiff(&x).vertices(),
            1e-15
        ));
    }
    assert!(same_vertex_sets(
        g.subdiff(&[0.0, 1.0]).vertices(),
        &[vec![-1.0, 2.0], vec![1.0, 2.0]],
        0.0
    ));
    assert!(g.is_pln());
}

#[test]
fn desingularizer_power_form() {
    let phi = DesingularizerSpec::power(0.5).unwrap();
    assert_eq!(phi.value(0.0), 0.0);
    assert!((phi.derivative(0.25) - 0.5 * 0.25f64.powf(-0.5)).abs() <= 1e-15);
    assert!(DesingularizerSpec::power(1.0).is_err());
    assert!(DesingularizerSpec::power(-0.1).is_err());
    assert!(DesingularizerSpec::custom(|t| t + 1.0, |_| 1.0).is_err());
    for k in 1..50 {
        assert!(phi.derivative(k as f64 * 0.1) > 0.0);
    }
}

#[test]
fn manifest_lists_members_and_manifolds() {
    let m = catalog::manifest();
    assert_eq!(m.len(), CATALOG_NAMES.len());
    let main = catalog::describe("paper-main").unwrap();
    assert_eq!(main.dim, 2);
    assert!(!main.critical_points.is_empty());
}

#[test]
fn slope_note_on_abs_plus_square() {
    let f: FunctionModel = catalog_get("abs-plus-square").unwrap();
    assert!((f.analytic_slope(&[0.0, -0.5]).unwrap() - 1.0).abs() <= 1e-15);
    assert!(!f.notes().is_empty());
}
