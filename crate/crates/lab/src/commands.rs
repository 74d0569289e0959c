//! Command dispatch. Each command writes its artifacts under the output
//! prefix and returns the list of files written.

use std::path::PathBuf;

use ident_core::analysis::{
    kl_equivalence_check, kl_exponent_estimate, kl_probe, linear_growth_witness, optimality_transfer, pln_check,
    quadratic_growth_rates, sharp_checks, GrowthReport, KlDomain, KlEquivalenceReport, KlReport, OptimalityReport,
    PlnReport, QuadraticGrowthReport, SharpReport,
};
use ident_core::catalog::{manifest, CatalogInfo};
use ident_core::flow::{
    identification_time, integrate_flow, integrate_riemannian, velocity_diagnostics, Scheme, Trajectory,
};
use ident_core::linalg::norm;
use ident_core::model::CriticalPoint;
use ident_core::prox::{check_prox_lemma, prox_sequence, ProxLemmaReport};
use ident_core::slope::{
    default_probe_radii, default_radii, limiting_slope, modulus_probe, slope_estimate, ModulusReport, SlopeEstimate,
};
use ident_core::{catalog_get, ClosedSet, DesingularizerSpec, Error, FunctionModel, Manifold, CATALOG_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::LabError;
use crate::output::{
    gnuplot_script, manifold_polyline, registered_manifold, with_suffix, write_json, write_polyline,
    write_prox_sequence, write_summary, write_text, write_trajectory, SummaryRow,
};

/// Radii of the quadratic growth probe; the last is the reported one.
pub const GROWTH_RADII: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Largest accepted `|α − β|` at the finest growth radius.
pub const GROWTH_GAP_TOL: f64 = 5e-2;
/// Tube used when probing the modulus for growth and summary runs.
pub const PROBE_TUBE: f64 = 1e-3;
pub const FIGURE1_CURVES: usize = 10;
/// Final distance to the origin required of every figure1 curve.
pub const FIGURE1_TARGET: f64 = 5e-2;
const DEFAULT_PLN_RADIUS: f64 = 0.5;
const DEFAULT_GROWTH_RADIUS: f64 = 0.1;

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    match cfg.command {
        Command::Flow => flow(cfg),
        Command::RiemFlow => riem_flow(cfg),
        Command::Prox => prox(cfg),
        Command::Slope => slope(cfg),
        Command::Modulus => modulus(cfg),
        Command::Growth => growth(cfg),
        Command::Kl => kl(cfg),
        Command::Pln => pln(cfg),
        Command::Figure1 => figure1(cfg),
        Command::Catalog => catalog(cfg),
        Command::Summary => summary(cfg),
    }
}

fn function(cfg: &RunConfig) -> Result<FunctionModel, LabError> {
    let name = cfg.function.as_deref().expect("validated");
    Ok(catalog_get(name)?)
}

fn start(cfg: &RunConfig) -> Vec<f64> {
    cfg.x0.clone().expect("validated")
}

/// Registered critical point with a manifold, the one nearest `x0` when given.
fn anchor<'f>(f: &'f FunctionModel, x0: Option<&[f64]>) -> Result<&'f CriticalPoint, LabError> {
    let with_m = || f.critical_points().iter().filter(|c| c.manifold.is_some());
    let pick = match x0 {
        Some(x) => with_m().min_by(|a, b| {
            let da = ident_core::linalg::dist(&a.point, x);
            let db = ident_core::linalg::dist(&b.point, x);
            da.total_cmp(&db)
        }),
        None => with_m().next(),
    };
    pick.ok_or_else(|| {
        Error::MissingMetadata(format!("{} has no critical point with a registered manifold", f.name())).into()
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub function: String,
    pub scheme: &'static str,
    pub x0: Vec<f64>,
    pub h: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub tube: f64,
    pub steps: usize,
    pub final_point: Vec<f64>,
    pub final_value: f64,
    pub manifold: Option<String>,
    pub identification_time: Option<f64>,
    pub energy: f64,
    pub tail_speed: f64,
    pub essentially_converged: bool,
}

fn flow_summary(
    f: &FunctionModel,
    scheme: &'static str,
    x0: Vec<f64>,
    cfg: &RunConfig,
    traj: &Trajectory,
    m: Option<&Manifold>,
) -> Result<FlowSummary, LabError> {
    let vel = velocity_diagnostics(traj, cfg.tube)?;
    let t_star = match m {
        Some(m) => identification_time(traj, m, cfg.tube)?,
        None => None,
    };
    Ok(FlowSummary {
        function: f.name().to_string(),
        scheme,
        x0,
        h: cfg.h,
        t: cfg.t,
        tube: cfg.tube,
        steps: traj.len() - 1,
        final_point: traj.final_point().to_vec(),
        final_value: *traj.values.last().expect("nonempty trajectory"),
        manifold: m.map(|m| m.name().to_string()),
        identification_time: t_star,
        energy: vel.energy,
        tail_speed: vel.tail_speed,
        essentially_converged: vel.essentially_converged,
    })
}

fn write_flow_outputs(
    cfg: &RunConfig,
    traj: &Trajectory,
    m: Option<&Manifold>,
    summary: &FlowSummary,
) -> Result<Vec<PathBuf>, LabError> {
    let prefix = cfg.out_prefix();
    let csv = with_suffix(&prefix, ".csv");
    let json = with_suffix(&prefix, ".json");
    write_trajectory(&csv, traj, m)?;
    write_json(&json, summary)?;
    let mut files = vec![csv.clone(), json];
    if cfg.gnuplot {
        let poly = m.map(|m| manifold_polyline(m, 1.5, 0.01)).filter(|p| p.len() > 1);
        let poly_path = with_suffix(&prefix, "_manifold.csv");
        if let Some(p) = &poly {
            write_polyline(&poly_path, p)?;
            files.push(poly_path.clone());
        }
        let gp = with_suffix(&prefix, ".gp");
        let script = gnuplot_script(&summary.function, &[csv], poly.as_ref().map(|_| poly_path.as_path()));
        write_text(&gp, &script)?;
        files.push(gp);
    }
    Ok(files)
}

fn flow(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let x0 = start(cfg);
    let traj = integrate_flow(&f, &x0, cfg.h, cfg.t, Scheme::Implicit)?;
    let m = registered_manifold(&f);
    let summary = flow_summary(&f, "implicit-euler", x0, cfg, &traj, m)?;
    write_flow_outputs(cfg, &traj, m, &summary)
}

fn riem_flow(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let x0 = start(cfg);
    let cp = f
        .critical_points()
        .iter()
        .find(|c| c.manifold.is_some() && c.extension.is_some())
        .ok_or_else(|| Error::MissingMetadata(format!("{} has no manifold with a smooth extension", f.name())))?;
    let (m, ext) = (
        cp.manifold.as_ref().expect("filtered"),
        cp.extension.as_ref().expect("filtered"),
    );
    let on_m = m.project(&x0)?;
    let traj = integrate_riemannian(m, ext, &on_m, cfg.h, cfg.t)?;
    let summary = flow_summary(&f, "riemannian-rk4", on_m, cfg, &traj, Some(m))?;
    write_flow_outputs(cfg, &traj, Some(m), &summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProxSummary {
    pub function: String,
    pub x0: Vec<f64>,
    pub alpha: f64,
    pub steps: usize,
    pub final_point: Vec<f64>,
    pub final_value: f64,
    pub final_slope: f64,
    pub manifold: Option<String>,
    pub tube: f64,
    /// First iteration after which every iterate stays in the tube.
    pub settled_at: Option<usize>,
    pub lemma_at_start: ProxLemmaReport,
}

fn prox(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let x0 = start(cfg);
    let alpha = cfg.alpha.expect("validated");
    let seq = prox_sequence(&f, &x0, alpha, cfg.steps)?;
    let lemma = check_prox_lemma(&f, &x0, alpha)?;
    let m = registered_manifold(&f);
    let settled_at = match m {
        Some(m) => {
            let inside: Vec<bool> = seq
                .points
                .iter()
                .map(|p| m.distance(p).map(|d| d <= cfg.tube))
                .collect::<Result<_, _>>()?;
            let tail_start = inside.iter().rposition(|&b| !b).map_or(0, |k| k + 1);
            (tail_start < inside.len()).then_some(tail_start)
        }
        None => None,
    };
    let summary = ProxSummary {
        function: f.name().to_string(),
        x0,
        alpha,
        steps: cfg.steps,
        final_point: seq.points.last().expect("nonempty").clone(),
        final_value: *seq.values.last().expect("nonempty"),
        final_slope: *seq.slopes.last().expect("nonempty"),
        manifold: m.map(|m| m.name().to_string()),
        tube: cfg.tube,
        settled_at,
        lemma_at_start: lemma.clone(),
    };
    let prefix = cfg.out_prefix();
    let csv = with_suffix(&prefix, ".csv");
    let json = with_suffix(&prefix, ".json");
    write_prox_sequence(&csv, &seq)?;
    write_json(&json, &summary)?;
    if !lemma.pass {
        return Err(LabError::Check(format!(
            "slope bound at the first prox point: {} > {}",
            lemma.lhs, lemma.rhs
        )));
    }
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeOutput {
    pub function: String,
    pub x: Vec<f64>,
    pub estimate: SlopeEstimate,
    pub limiting_slope: f64,
    pub analytic_slope: Option<f64>,
}

fn slope(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let x = start(cfg);
    let out = SlopeOutput {
        function: f.name().to_string(),
        estimate: slope_estimate(&f, &x, &default_radii())?,
        limiting_slope: limiting_slope(&f, &x)?,
        analytic_slope: f.analytic_slope(&x),
        x,
    };
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &out)?;
    Ok(vec![json])
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusOutput {
    pub function: String,
    pub manifold: String,
    pub point: Vec<f64>,
    pub report: ModulusReport,
}

fn modulus(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let cp = anchor(&f, cfg.x0.as_deref())?;
    let m = cp.manifold.as_ref().expect("anchored");
    let out = ModulusOutput {
        function: f.name().to_string(),
        manifold: m.name().to_string(),
        point: cp.point.clone(),
        report: modulus_probe(&f, m, &cp.point, &default_probe_radii(), cfg.tube)?,
    };
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &out)?;
    Ok(vec![json])
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthOutput {
    pub function: String,
    pub manifold: String,
    pub point: Vec<f64>,
    pub eps: f64,
    pub modulus_estimate: f64,
    pub linear_growth: GrowthReport,
    pub quadratic_growth: Option<QuadraticGrowthReport>,
    pub optimality: OptimalityReport,
    pub sharp: Option<SharpReport>,
    pub pass: bool,
}

/// Off-manifold sequences shrinking to `xbar` inside the probed ball.
fn growth_sequences(xbar: &[f64], finest_radius: f64) -> Vec<Vec<f64>> {
    let dirs = ident_core::sampling::sphere_directions(xbar.len(), if xbar.len() == 1 { 2 } else { 5 });
    (1..25)
        .flat_map(|k| {
            let t = finest_radius * 2f64.powi(-k);
            dirs.iter()
                .map(move |d| xbar.iter().zip(d).map(|(c, di)| c + t * di).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        })
        .collect()
}

fn growth_report(
    f: &FunctionModel,
    cp: &CriticalPoint,
    eps: Option<f64>,
    radius: f64,
) -> Result<GrowthOutput, LabError> {
    let m = cp.manifold.as_ref().expect("anchored");
    let xbar = &cp.point;
    let probe = modulus_probe(f, m, xbar, &default_probe_radii(), PROBE_TUBE)?;
    let eps = eps.unwrap_or(0.9 * probe.estimate);
    let linear = linear_growth_witness(f, m, &growth_sequences(xbar, probe.finest_radius), eps)?;
    let quadratic = match quadratic_growth_rates(f, m, xbar, &GROWTH_RADII) {
        Ok(r) => Some(r),
        Err(Error::EmptyProbe) => None,
        Err(e) => return Err(e.into()),
    };
    let optimality = optimality_transfer(f, m, xbar, radius)?;
    let sharp = match sharp_checks(f, xbar, eps, radius) {
        Ok(r) => Some(r),
        Err(Error::MissingLevelSet) => None,
        Err(e) => return Err(e.into()),
    };
    let pass = linear.pass
        && optimality.agree
        && optimality.strict_agree
        && quadratic.as_ref().is_none_or(|q| q.gap <= GROWTH_GAP_TOL);
    Ok(GrowthOutput {
        function: f.name().to_string(),
        manifold: m.name().to_string(),
        point: xbar.clone(),
        eps,
        modulus_estimate: probe.estimate,
        linear_growth: linear,
        quadratic_growth: quadratic,
        optimality,
        sharp,
        pass,
    })
}

fn growth(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let cp = anchor(&f, cfg.x0.as_deref())?;
    let out = growth_report(&f, cp, cfg.eps, cfg.radius.unwrap_or(DEFAULT_GROWTH_RADIUS))?;
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &out)?;
    if !out.pass {
        return Err(LabError::Check(format!(
            "growth checks failed for {} on {}",
            out.function, out.manifold
        )));
    }
    Ok(vec![json])
}

#[derive(Debug, Clone, Serialize)]
pub struct Exponent {
    pub alpha: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KlOutput {
    pub function: String,
    pub manifold: String,
    pub point: Vec<f64>,
    pub delta: f64,
    pub desingularizer: &'static str,
    pub probe: KlReport,
    /// Exponent fitted on the manifold, absent when the fit is impossible.
    pub exponent_on_manifold: Option<Exponent>,
    pub exponent_error: Option<String>,
    pub equivalence: KlEquivalenceReport,
}

fn kl_report(f: &FunctionModel, cp: &CriticalPoint, delta: f64) -> Result<KlOutput, LabError> {
    let m = cp.manifold.as_ref().expect("anchored");
    let phi = DesingularizerSpec::sqrt();
    let probe = kl_probe(f, &cp.point, &phi, delta)?;
    let fit = match &cp.extension {
        Some(ext) => kl_exponent_estimate(
            f,
            &cp.point,
            delta,
            &KlDomain::OnManifold {
                manifold: m,
                extension: ext,
            },
        ),
        None => Err(Error::MissingMetadata(format!("no smooth extension on {}", m.name()))),
    };
    let (exponent_on_manifold, exponent_error) = match fit {
        Ok((alpha, residual)) => (Some(Exponent { alpha, residual }), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(KlOutput {
        function: f.name().to_string(),
        manifold: m.name().to_string(),
        point: cp.point.clone(),
        delta,
        desingularizer: "sqrt",
        probe,
        exponent_on_manifold,
        exponent_error,
        equivalence: kl_equivalence_check(f, m, &cp.point, &phi, delta)?,
    })
}

fn kl(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let cp = anchor(&f, cfg.x0.as_deref())?;
    let out = kl_report(&f, cp, cfg.delta)?;
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &out)?;
    if !out.equivalence.agree {
        return Err(LabError::Check(format!(
            "KL moduli disagree: full {} vs restricted {}",
            out.equivalence.full_modulus, out.equivalence.restricted_modulus
        )));
    }
    Ok(vec![json])
}

#[derive(Debug, Clone, Serialize)]
pub struct PlnOutput {
    pub function: String,
    pub report: PlnReport,
}

fn pln(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let f = function(cfg)?;
    let center = match &cfg.x0 {
        Some(x) => x.clone(),
        None => f
            .critical_points()
            .first()
            .map_or_else(|| vec![0.0; f.dim()], |c| c.point.clone()),
    };
    let report = pln_check(&f, &center, cfg.radius.unwrap_or(DEFAULT_PLN_RADIUS))?;
    let out = PlnOutput {
        function: f.name().to_string(),
        report,
    };
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &out)?;
    if !out.report.pass {
        return Err(LabError::Check(format!(
            "requirement ratio is not bounded near {:?} (max {})",
            out.report.center, out.report.max_rho
        )));
    }
    Ok(vec![json])
}

/// One figure1 curve and its refinement check.
#[derive(Debug, Clone, Serialize)]
pub struct CurveRun {
    pub index: usize,
    pub start: Vec<f64>,
    pub final_point: Vec<f64>,
    pub final_norm: f64,
    pub identification_time: Option<f64>,
    /// Identification time of the same start at step `h/2`.
    pub refined_identification_time: Option<f64>,
    /// Both times exist and differ by at most `4h`.
    pub stable: bool,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Summary {
    pub function: String,
    pub manifold: String,
    pub h: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub tube: f64,
    pub seed: u64,
    pub curves: Vec<CurveRun>,
    pub all_converged: bool,
    pub all_stable: bool,
}

/// Seeded starts, uniform in `[−1, 1]²`.
pub fn figure1_starts(seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..FIGURE1_CURVES)
        .map(|_| vec![rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)])
        .collect()
}

/// Runs the figure1 curves concurrently; results are in start order.
pub fn figure1_runs(cfg: &RunConfig) -> Result<Figure1Summary, LabError> {
    let f = function(cfg)?;
    let m = registered_manifold(&f)
        .ok_or_else(|| Error::MissingMetadata(format!("{} has no registered manifold", f.name())))?;
    let starts = figure1_starts(cfg.seed);
    let results: Vec<Result<CurveRun, LabError>> = std::thread::scope(|s| {
        let handles: Vec<_> = starts
            .iter()
            .enumerate()
            .map(|(index, x0)| {
                let (f, m) = (&f, m);
                s.spawn(move || -> Result<CurveRun, LabError> {
                    let traj = integrate_flow(f, x0, cfg.h, cfg.t, Scheme::Implicit)?;
                    let fine = integrate_flow(f, x0, cfg.h / 2.0, cfg.t, Scheme::Implicit)?;
                    let t1 = identification_time(&traj, m, cfg.tube)?;
                    let t2 = identification_time(&fine, m, cfg.tube)?;
                    let stable = matches!((t1, t2), (Some(a), Some(b)) if (a - b).abs() <= 4.0 * cfg.h + 1e-12);
                    Ok(CurveRun {
                        index,
                        start: x0.clone(),
                        final_point: traj.final_point().to_vec(),
                        final_norm: norm(traj.final_point()),
                        identification_time: t1,
                        refined_identification_time: t2,
                        stable,
                        trajectory: traj,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("figure1 worker panicked"))
            .collect()
    });
    let curves = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Figure1Summary {
        function: f.name().to_string(),
        manifold: m.name().to_string(),
        h: cfg.h,
        t: cfg.t,
        tube: cfg.tube,
        seed: cfg.seed,
        all_converged: curves.iter().all(|c| c.final_norm <= FIGURE1_TARGET),
        all_stable: curves.iter().all(|c| c.stable),
        curves,
    })
}

fn figure1(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let summary = figure1_runs(cfg)?;
    let f = function(cfg)?;
    let m = registered_manifold(&f).expect("checked by figure1_runs");
    let prefix = cfg.out_prefix();
    let mut files = Vec::new();
    let mut curve_files = Vec::new();
    for c in &summary.curves {
        let path = with_suffix(&prefix, &format!("_curve{:02}.csv", c.index));
        write_trajectory(&path, &c.trajectory, Some(m))?;
        curve_files.push(path.clone());
        files.push(path);
    }
    let poly_path = with_suffix(&prefix, "_manifold.csv");
    write_polyline(&poly_path, &manifold_polyline(m, 1.5, 0.01))?;
    files.push(poly_path.clone());
    let gp = with_suffix(&prefix, ".gp");
    write_text(
        &gp,
        &gnuplot_script("subgradient curves", &curve_files, Some(&poly_path)),
    )?;
    files.push(gp);
    let json = with_suffix(&prefix, ".json");
    write_json(&json, &summary)?;
    files.push(json);
    if !summary.all_converged || !summary.all_stable {
        return Err(LabError::Check(format!(
            "figure1: converged {}, stable identification {}",
            summary.all_converged, summary.all_stable
        )));
    }
    Ok(files)
}

fn catalog(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let m: Vec<CatalogInfo> = manifest();
    let json = with_suffix(&cfg.out_prefix(), ".json");
    write_json(&json, &m)?;
    Ok(vec![json])
}

/// Pass/fail of every theorem-level check on every catalog pair.
pub fn summary_rows() -> Result<Vec<SummaryRow>, LabError> {
    let mut rows = Vec::new();
    for name in CATALOG_NAMES {
        let f = catalog_get(name)?;
        for cp in f.critical_points() {
            let Some(m) = &cp.manifold else { continue };
            let row = |check: &str, statistic: f64, pass: bool| SummaryRow {
                function: name.to_string(),
                manifold: m.name().to_string(),
                check: check.to_string(),
                statistic,
                pass,
            };
            let g = growth_report(&f, cp, None, DEFAULT_GROWTH_RADIUS)?;
            rows.push(row("modulus", g.modulus_estimate, g.modulus_estimate > 0.0));
            let worst = g.linear_growth.margins.iter().copied().fold(f64::INFINITY, f64::min);
            rows.push(row("linear-growth", worst, g.linear_growth.pass));
            if let Some(q) = &g.quadratic_growth {
                rows.push(row("quadratic-growth", q.gap, q.gap <= GROWTH_GAP_TOL));
            }
            let o = &g.optimality;
            rows.push(row(
                "optimality-transfer",
                o.full_min - o.fbar,
                o.agree && o.strict_agree,
            ));
            let k = kl_report(&f, cp, crate::config::DEFAULT_DELTA)?;
            rows.push(row("kl-equivalence", k.equivalence.full_modulus, k.equivalence.agree));
        }
        let center = f
            .critical_points()
            .first()
            .map_or_else(|| vec![0.0; f.dim()], |c| c.point.clone());
        let p = pln_check(&f, &center, DEFAULT_PLN_RADIUS)?;
        rows.push(SummaryRow {
            function: name.to_string(),
            manifold: String::new(),
            check: "pln".into(),
            statistic: p.max_rho,
            pass: p.pass,
        });
    }
    Ok(rows)
}

fn summary(cfg: &RunConfig) -> Result<Vec<PathBuf>, LabError> {
    let rows = summary_rows()?;
    let csv = with_suffix(&cfg.out_prefix(), ".csv");
    write_summary(&csv, &rows)?;
    Ok(vec![csv])
}
