//! CSV, JSON and gnuplot writers. Every writer is deterministic: identical
//! inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use ident_core::flow::Trajectory;
use ident_core::prox::ProxSequence;
use ident_core::{ClosedSet, FunctionModel, Manifold};
use serde::Serialize;

use crate::error::LabError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> LabError + '_ {
    move |e| LabError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// `prefix` with `suffix` appended to its file name.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn ensure_parent(path: &Path) -> Result<(), LabError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(io_err(dir)),
        _ => Ok(()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LabError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), LabError> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Shortest round-trip form; exponent notation for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn coord_names(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("x{i}"))
}

/// Columns `t, x1..xn, f, speed[, dist_to_M]`.
pub fn trajectory_header(n: usize, with_manifold: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(coord_names(n));
    h.extend(["f".into(), "speed".into()]);
    if with_manifold {
        h.push("dist_to_M".into());
    }
    h
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, manifold: Option<&Manifold>) -> Result<(), LabError> {
    let n = traj.points.first().map_or(0, Vec::len);
    let rows = (0..traj.len()).map(|k| {
        let mut row = vec![num(traj.times[k])];
        row.extend(traj.points[k].iter().copied().map(num));
        row.push(num(traj.values[k]));
        row.push(num(traj.speeds[k]));
        if let Some(m) = manifold {
            row.push(num(m.distance(&traj.points[k]).unwrap_or(f64::NAN)));
        }
        row
    });
    write_rows(path, &trajectory_header(n, manifold.is_some()), rows)
}

/// Columns `k, x1..xn, f, step, slope`; `step` is the distance from the
/// previous iterate and is 0 at `k = 0`.
pub fn prox_header(n: usize) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    h.extend(coord_names(n));
    h.extend(["f".into(), "step".into(), "slope".into()]);
    h
}

pub fn write_prox_sequence(path: &Path, seq: &ProxSequence) -> Result<(), LabError> {
    let n = seq.points.first().map_or(0, Vec::len);
    let rows = (0..seq.len()).map(|k| {
        let mut row = vec![k.to_string()];
        row.extend(seq.points[k].iter().copied().map(num));
        row.push(num(seq.values[k]));
        row.push(num(if k == 0 { 0.0 } else { seq.steps[k - 1] }));
        row.push(num(seq.slopes[k]));
        row
    });
    write_rows(path, &prox_header(n), rows)
}

/// One row of the analysis summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub function: String,
    pub manifold: String,
    pub check: String,
    pub statistic: f64,
    pub pass: bool,
}

pub const SUMMARY_HEADER: [&str; 5] = ["function", "manifold", "check", "statistic", "pass"];

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), LabError> {
    let header: Vec<String> = SUMMARY_HEADER.iter().map(|s| s.to_string()).collect();
    let body = rows.iter().map(|r| {
        vec![
            r.function.clone(),
            r.manifold.clone(),
            r.check.clone(),
            num(r.statistic),
            r.pass.to_string(),
        ]
    });
    write_rows(path, &header, body)
}

/// Points along a one-dimensional manifold in the plane, traced by stepping
/// along the tangent and projecting back, in both directions from the
/// reference point. Empty for manifolds that are not curves.
pub fn manifold_polyline(m: &Manifold, half_length: f64, step: f64) -> Vec<Vec<f64>> {
    if m.ambient_dim() != 2 || m.dim() != 1 {
        return Vec::new();
    }
    let trace = |sign: f64| {
        let mut out = Vec::new();
        let mut p = m.reference().to_vec();
        let mut heading: Option<Vec<f64>> = None;
        let mut walked = 0.0;
        while walked < half_length {
            let Ok(t) = m.tangent_project(&p, &[1.0, 0.0]).and_then(|t| {
                if t.iter().map(|c| c * c).sum::<f64>() > 1e-12 {
                    Ok(t)
                } else {
                    m.tangent_project(&p, &[0.0, 1.0])
                }
            }) else {
                break;
            };
            let len = t[0].hypot(t[1]);
            let mut dir = [t[0] / len, t[1] / len];
            let keep = match &heading {
                Some(hd) => dir[0] * hd[0] + dir[1] * hd[1] >= 0.0,
                None => sign > 0.0,
            };
            if !keep {
                dir = [-dir[0], -dir[1]];
            }
            let Ok(next) = m.project(&[p[0] + step * dir[0], p[1] + step * dir[1]]) else {
                break;
            };
            heading = Some(dir.to_vec());
            walked += step;
            out.push(next.clone());
            p = next;
        }
        out
    };
    let mut back = trace(-1.0);
    back.reverse();
    back.push(m.reference().to_vec());
    back.extend(trace(1.0));
    back
}

pub fn write_polyline(path: &Path, pts: &[Vec<f64>]) -> Result<(), LabError> {
    let header = vec!["x1".to_string(), "x2".to_string()];
    write_rows(path, &header, pts.iter().map(|p| p.iter().copied().map(num).collect()))
}

/// A gnuplot script drawing the curves over the manifold polyline.
pub fn gnuplot_script(title: &str, curves: &[PathBuf], manifold: Option<&Path>) -> String {
    let file = |p: &Path| {
        p.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let mut s = String::new();
    s.push_str("# run from the directory holding the CSV files\n");
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str("set xlabel 'x1'\nset ylabel 'x2'\nset size ratio -1\nset key off\n");
    let mut parts: Vec<String> = curves
        .iter()
        .map(|c| format!("'{}' skip 1 using 2:3 with lines lw 1.5", file(c)))
        .collect();
    if let Some(m) = manifold {
        parts.push(format!("'{}' skip 1 using 1:2 with lines dt 2 lc rgb 'black'", file(m)));
    }
    s.push_str("plot ");
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), LabError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(io_err(path))
}

/// Manifold used for `dist_to_M`: the one registered at the first critical
/// point that has one.
pub fn registered_manifold(f: &FunctionModel) -> Option<&Manifold> {
    f.critical_points().iter().find_map(|c| c.manifold.as_ref())
}
