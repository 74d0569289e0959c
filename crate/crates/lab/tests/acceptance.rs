//! Acceptance suite. Each criterion prints one PASS/FAIL line; the binary
//! exits nonzero when any criterion fails. Tolerances are pinned as stated.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ident_core::analysis::{
    kl_equivalence_check, kl_exponent_estimate, kl_probe, pln_along, pln_check, quadratic_growth_rates,
    sqrt_abs_triples, KlDomain,
};
use ident_core::flow::{compare_after_identification, identification_time, integrate_flow, Scheme};
use ident_core::linalg::{dist, norm};
use ident_core::model::SmoothFunction;
use ident_core::polytope::maxfn_modulus;
use ident_core::prox::{check_length_bound, check_prox_lemma, prox_sequence, ProxSequence};
use ident_core::slope::{default_probe_radii, default_radii, limiting_slope, modulus_probe, slope_estimate};
use ident_core::{
    catalog_get, ClosedSet, CuspRegion, DesingularizerSpec, FunctionModel, Manifold, Polytope, CATALOG_NAMES,
};
use ident_lab::commands::{figure1_runs, FIGURE1_CURVES, FIGURE1_TARGET};
use ident_lab::config::{validate, Command, Settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn ball_points(rng: &mut ChaCha8Rng, n: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if norm(&x) < radius {
            out.push(x);
        }
    }
    out
}

fn rel_err(est: f64, exact: f64) -> f64 {
    (est - exact).abs() / exact.abs().max(1e-300)
}

fn slope_formulas() -> Verdict {
    let clock = Instant::now();
    let abs_sq = catalog_get("abs-plus-square").unwrap();
    let quartic = catalog_get("sqrt-quartic").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for x in ball_points(&mut rng, 100, 2, 1.0) {
        let (u, v) = (x[0], x[1]);
        let exact = (1.0 + 4.0 * v * v).sqrt();
        worst = worst.max(rel_err(
            slope_estimate(&abs_sq, &x, &default_radii()).unwrap().value,
            exact,
        ));
        let exact = ((u * u + 4.0 * v.powi(6)) / (u * u + v.powi(4))).sqrt();
        worst = worst.max(rel_err(
            slope_estimate(&quartic, &x, &default_radii()).unwrap().value,
            exact,
        ));
    }
    let elapsed = clock.elapsed();
    verdict(
        worst <= 1e-3 && elapsed <= Duration::from_secs(10),
        format!("worst relative error {worst:.3e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn non_minimality() -> Verdict {
    let f = catalog_get("sqrt-quartic").unwrap();
    let slopes: Vec<f64> = (2..=50)
        .map(|k| {
            let k = k as f64;
            limiting_slope(&f, &[k.powi(-3), 1.0 / k]).unwrap()
        })
        .collect();
    let decreasing = slopes.windows(2).all(|w| w[1] <= w[0]);
    let last = *slopes.last().unwrap();
    let mut ok = decreasing && last <= 0.05;
    let mut detail = format!("slope at k=50 {last:.4}, monotone {decreasing}");
    for alpha in [0.5, 1.0, 2.0] {
        let region = CuspRegion::new(alpha).unwrap();
        let est = modulus_probe(&f, &region, &[0.0, 0.0], &default_probe_radii(), 1e-3)
            .unwrap()
            .estimate;
        let bound = alpha * alpha / (1.0 + alpha * alpha);
        ok &= est >= 0.9 * bound;
        detail.push_str(&format!("; M_{alpha}: {est:.4} vs bound {bound:.4}"));
    }
    verdict(ok, detail)
}

/// Distance from the origin to the nearest facet hyperplane of a full
/// dimensional simplex with the origin inside.
fn facet_distance(vs: &[Vec<f64>]) -> f64 {
    let n = vs[0].len();
    let mut best = f64::INFINITY;
    for drop in 0..vs.len() {
        let facet: Vec<&Vec<f64>> = vs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, v)| v)
            .collect();
        let normal = if n == 2 {
            let d = [facet[1][0] - facet[0][0], facet[1][1] - facet[0][1]];
            vec![-d[1], d[0]]
        } else {
            let a: Vec<f64> = (0..3).map(|i| facet[1][i] - facet[0][i]).collect();
            let b: Vec<f64> = (0..3).map(|i| facet[2][i] - facet[0][i]).collect();
            vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        };
        let offset: f64 = normal.iter().zip(facet[0]).map(|(p, q)| p * q).sum();
        best = best.min(offset.abs() / norm(&normal));
    }
    best
}

fn maxfn_moduli() -> Verdict {
    let seg = maxfn_modulus(&Polytope::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    for dim in [2usize, 3] {
        for _ in 0..20 {
            let raw: Vec<Vec<f64>> = (0..=dim)
                .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let w: Vec<f64> = (0..=dim).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let center: Vec<f64> = (0..dim)
                .map(|j| raw.iter().zip(&w).map(|(v, wi)| v[j] * wi).sum::<f64>() / total)
                .collect();
            let vs: Vec<Vec<f64>> = raw
                .iter()
                .map(|v| v.iter().zip(&center).map(|(a, c)| a - c).collect())
                .collect();
            let got = maxfn_modulus(&Polytope::new(dim, vs.clone())).unwrap();
            worst = worst.max((got - facet_distance(&vs)).abs());
            sets += 1;
        }
    }
    verdict(
        seg == 1.0 && worst <= 1e-9,
        format!("segment {seg}, {sets} simplices, worst deviation {worst:.2e}"),
    )
}

fn prox_lemma() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut checked = 0;
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        for x in ball_points(&mut rng, 200, f.dim(), 1.0) {
            let alpha = rng.gen_range(0.5..10.0);
            match check_prox_lemma(&f, &x, alpha) {
                Ok(r) if r.pass => checked += 1,
                Ok(r) => failures.push(format!("{name} {x:?} α={alpha}: {} > {}", r.lhs, r.rhs)),
                Err(e) => failures.push(format!("{name} {x:?} α={alpha}: {e}")),
            }
        }
    }
    let f = catalog_get("abs-plus-square").unwrap();
    let eq = check_prox_lemma(&f, &[0.0, 2.0], 1.0).unwrap();
    let equality = (eq.lhs - 2.0).abs() <= 1e-6 && (eq.rhs - 2.0).abs() <= 1e-6;
    verdict(
        failures.is_empty() && equality,
        format!(
            "{checked} pairs pass, {} fail{}; equality case lhs {} rhs {}",
            failures.len(),
            failures.first().map(|s| format!(" (first: {s})")).unwrap_or_default(),
            eq.lhs,
            eq.rhs
        ),
    )
}

fn prox_identification() -> Verdict {
    let f = catalog_get("paper-main").unwrap();
    let m = Manifold::parabola();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_dist: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for x0 in ball_points(&mut rng, 10, 2, 0.5) {
        let seq = prox_sequence(&f, &x0, 8.0, 30).unwrap();
        for p in &seq.points[11..] {
            worst_dist = worst_dist.max(m.distance(p).unwrap());
        }
        worst_slope = worst_slope.max(seq.slopes[30]);
    }
    verdict(
        worst_dist <= 1e-3 && worst_slope <= 1e-3,
        format!("max dist beyond k=10 {worst_dist:.2e}, max slope at k=30 {worst_slope:.2e}"),
    )
}

fn length_bound() -> Verdict {
    let f = catalog_get("abs-plus-square").unwrap();
    let phi = DesingularizerSpec::power(0.5).unwrap();
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for k in 1..=20 {
        let points: Vec<Vec<f64>> = (0..=k).map(|j| vec![0.0, 2.0 * 0.5f64.powi(j)]).collect();
        let seq = ProxSequence {
            values: points.iter().map(|p| f.eval(p)).collect(),
            steps: points.windows(2).map(|w| dist(&w[0], &w[1])).collect(),
            slopes: points.iter().map(|p| limiting_slope(&f, p).unwrap()).collect(),
            points,
            alpha: 1.0,
        };
        let rep = check_length_bound(&seq, &f, &phi, 1e-9).unwrap();
        ok &= rep.per_step_pass;
        worst = rep.margins.iter().copied().fold(worst, f64::min);
    }
    verdict(ok, format!("k = 1..20, least margin {worst:.3e}"))
}

fn figure1() -> Verdict {
    let clock = Instant::now();
    let cfg = validate(Command::Figure1, Settings::default()).unwrap();
    let summary = figure1_runs(&cfg).unwrap();
    let elapsed = clock.elapsed();
    let worst_norm = summary.curves.iter().map(|c| c.final_norm).fold(0.0, f64::max);
    let worst_shift = summary
        .curves
        .iter()
        .map(|c| match (c.identification_time, c.refined_identification_time) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    verdict(
        summary.curves.len() == FIGURE1_CURVES
            && worst_norm <= FIGURE1_TARGET
            && worst_shift <= 4.0 * cfg.h + 1e-12
            && elapsed <= Duration::from_secs(120),
        format!(
            "{} curves, max |x(T)| {worst_norm:.2e}, max T* shift {worst_shift:.3}, {:.1}s",
            summary.curves.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form_flow() -> Verdict {
    let f = catalog_get("abs-plus-square").unwrap();
    let hs = [0.02, 0.01, 0.005];
    let mut errs = Vec::new();
    let mut t_ok = true;
    let mut times = Vec::new();
    for h in hs {
        let traj = integrate_flow(&f, &[1.0, 1.0], h, 3.0, Scheme::Implicit).unwrap();
        let e = traj
            .times
            .iter()
            .zip(&traj.points)
            .map(|(&t, p)| dist(p, &[(1.0 - t).max(0.0), (-2.0 * t).exp()]))
            .fold(0.0, f64::max);
        errs.push(e);
        let t_star = identification_time(&traj, &Manifold::coordinate_hyperplane(2, 0), 1e-2).unwrap();
        t_ok &= t_star.is_some_and(|t| (t - 1.0).abs() <= 2.0 * h);
        times.push(t_star);
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    verdict(
        orders.iter().all(|&p| p >= 1.0) && t_ok,
        format!("sup errors {errs:.3?}, orders {orders:.4?}, T* {times:?}"),
    )
}

fn restart_after_identification() -> Verdict {
    let f = catalog_get("paper-main").unwrap();
    let m = Manifold::parabola();
    let mut cs = Vec::new();
    for h in [0.02, 0.01] {
        let traj = integrate_flow(&f, &[0.8, 0.9], h, 2.0, Scheme::Implicit).unwrap();
        cs.push(compare_after_identification(&f, &m, &traj, 1e-2).unwrap().constant);
    }
    let ratio = cs[0] / cs[1];
    verdict(
        (0.5..=2.0).contains(&ratio),
        format!("C(h=0.02) {:.4}, C(h=0.01) {:.4}, ratio {ratio:.3}", cs[0], cs[1]),
    )
}

fn quadratic_growth() -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, m) in [
        ("abs-plus-square", Manifold::coordinate_hyperplane(2, 0)),
        ("paper-main", Manifold::parabola()),
    ] {
        let f = catalog_get(name).unwrap();
        let rep = quadratic_growth_rates(&f, &m, &[0.0, 0.0], &[1e-1, 1e-2, 1e-3]).unwrap();
        ok &= rep.finest_radius == 1e-3 && rep.gap <= 5e-2;
        detail.push(format!("{name}: α {:.6} β {:.6}", rep.alpha, rep.beta));
    }
    verdict(ok, detail.join("; "))
}

fn catalog_pairs() -> Vec<(String, FunctionModel, Manifold, Vec<f64>)> {
    let mut out = Vec::new();
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        for cp in f.critical_points() {
            if let Some(m) = &cp.manifold {
                out.push((name.to_string(), f.clone(), m.clone(), cp.point.clone()));
            }
        }
    }
    out
}

fn kl_checks() -> Verdict {
    let sq = FunctionModel::smooth(
        "|x|^2",
        2,
        SmoothFunction::new(|x| x[0] * x[0] + x[1] * x[1], |x| vec![2.0 * x[0], 2.0 * x[1]]),
    );
    let phi = DesingularizerSpec::power(0.5).unwrap();
    let identity = kl_probe(&sq, &[0.0, 0.0], &phi, 1e-2).unwrap().modulus;
    let f = catalog_get("paper-main").unwrap();
    let m = Manifold::parabola();
    let ext = f.strata()[0].extension.clone();
    let (alpha, _) = kl_exponent_estimate(
        &f,
        &[0.0, 0.0],
        1e-2,
        &KlDomain::OnManifold {
            manifold: &m,
            extension: &ext,
        },
    )
    .unwrap();
    let mut all_agree = true;
    let mut pairs = 0;
    for (_, g, m, xbar) in catalog_pairs() {
        let rep = kl_equivalence_check(&g, &m, &xbar, &phi, 1e-2).unwrap();
        all_agree &= rep.agree && rep.full_positive && rep.restricted_positive;
        pairs += 1;
    }
    verdict(
        (identity - 1.0).abs() <= 1e-6 && (alpha - 0.5).abs() <= 0.05 && all_agree,
        format!("identity modulus {identity:.9}, exponent on M {alpha:.5}, {pairs} pairs agree {all_agree}"),
    )
}

fn pln() -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in CATALOG_NAMES {
        let f = catalog_get(name).unwrap();
        if f.is_convex() {
            let rho = pln_check(&f, &vec![0.0; f.dim()], 0.5).unwrap().max_rho;
            ok &= rho <= 1e-9;
            detail.push(format!("{name} {rho:.2e}"));
        }
    }
    let f = catalog_get("paper-main").unwrap();
    let rhos: Vec<f64> = (0..5)
        .map(|k| pln_check(&f, &[0.0, 0.0], 0.5 * 0.5f64.powi(k)).unwrap().max_rho)
        .collect();
    let bounded = rhos.iter().all(|r| r.is_finite() && *r <= rhos[0] * (1.0 + 1e-5));
    ok &= bounded;
    detail.push(format!("paper-main over halvings {rhos:.4?}"));
    let g = catalog_get("sqrt-abs").unwrap();
    let rho = pln_along(&g, &sqrt_abs_triples(&[0.1, 0.01, 0.001]));
    let growth = rho[2] / rho[0];
    ok &= growth >= 10.0;
    detail.push(format!("sqrt-abs ρ(0.001)/ρ(0.1) {growth:.2}"));
    verdict(ok, detail.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("slope formulas", slope_formulas),
        ("non-minimality example", non_minimality),
        ("max-function modulus", maxfn_moduli),
        ("prox slope lemma", prox_lemma),
        ("prox identification", prox_identification),
        ("length bound", length_bound),
        ("figure1 reproduction", figure1),
        ("closed-form inclusion", closed_form_flow),
        ("restart after identification", restart_after_identification),
        ("quadratic growth rates", quadratic_growth),
        ("KL checks", kl_checks),
        ("PLN", pln),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
