//! Run results and their files: CSV tables with fixed headers, SVG plots and
//! a JSON summary echoing the configuration.
//!
//! | file | columns |
//! |---|---|
//! | `steps.csv` | step, time, friction, min_film, max_pressure, max_contact |
//! | `stribeck.csv` | u_eta, friction, min_film, max_pressure, max_contact |
//! | `profiles_step_NNNN.csv` | node, x, y, p, lambda_n, h |

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::Config;
use crate::plot::{line_plot, Axis, Series};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: usize,
    pub time: f64,
    pub friction: f64,
    pub min_film: f64,
    pub max_pressure: f64,
    pub max_contact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StribeckRow {
    /// [N/m]
    pub u_eta: f64,
    pub friction: f64,
    pub min_film: f64,
    pub max_pressure: f64,
    pub max_contact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub lambda_n: f64,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub rows: Vec<ProfileRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    /// Step number, or sweep point index for sweeps.
    pub at: usize,
    pub time: f64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunArtifacts {
    pub steps: Vec<StepRow>,
    pub stribeck: Option<Vec<StribeckRow>>,
    pub snapshots: Vec<Snapshot>,
    pub failures: Vec<Failure>,
    pub newton_iterations: usize,
    pub max_halvings: usize,
}

impl RunArtifacts {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every emitted number must be finite.
    pub fn all_finite(&self) -> bool {
        let steps = self
            .steps
            .iter()
            .all(|r| [r.time, r.friction, r.min_film, r.max_pressure, r.max_contact].iter().all(|v| v.is_finite()));
        let strib = self.stribeck.iter().flatten().all(|r| {
            [r.u_eta, r.friction, r.min_film, r.max_pressure, r.max_contact]
                .iter()
                .all(|v| v.is_finite())
        });
        let prof = self
            .snapshots
            .iter()
            .flat_map(|s| &s.rows)
            .all(|r| [r.x, r.y, r.p, r.lambda_n, r.h].iter().all(|v| v.is_finite()));
        steps && strib && prof
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush()
}

/// Header-only files still need the column names.
fn write_table<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> io::Result<()> {
    if rows.is_empty() {
        let mut w = csv::Writer::from_path(path).map_err(io_err)?;
        w.write_record(header).map_err(io_err)?;
        return w.flush();
    }
    write_csv(path, rows)
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> io::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(io_err)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(io_err)
}

fn io_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn profile_name(step: usize) -> String {
    format!("profiles_step_{step:04}.csv")
}

/// Writes the summary and, for non-empty runs, all tables and plots.
/// Returns the written file names.
pub fn emit(dir: &Path, cfg: &Config, arts: &RunArtifacts, status: &str) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    if !arts.is_empty() {
        let p = |name: &str| -> PathBuf { dir.join(name) };
        write_table(
            &p("steps.csv"),
            &["step", "time", "friction", "min_film", "max_pressure", "max_contact"],
            &arts.steps,
        )?;
        files.push("steps.csv".to_string());
        if let Some(rows) = &arts.stribeck {
            write_table(
                &p("stribeck.csv"),
                &["u_eta", "friction", "min_film", "max_pressure", "max_contact"],
                rows,
            )?;
            fs::write(p("stribeck.svg"), stribeck_svg(rows))?;
            files.push("stribeck.csv".into());
            files.push("stribeck.svg".into());
        }
        for s in &arts.snapshots {
            let name = profile_name(s.step);
            write_table(&p(&name), &["node", "x", "y", "p", "lambda_n", "h"], &s.rows)?;
            files.push(name);
        }
        if !arts.snapshots.is_empty() {
            fs::write(p("profiles.svg"), profiles_svg(&arts.snapshots))?;
            files.push("profiles.svg".into());
        }
        fs::write(p("steps.svg"), steps_svg(&arts.steps))?;
        files.push("steps.svg".into());
    }
    files.push("summary.json".into());
    let summary = json!({
        "status": status,
        "config": cfg,
        "converged_steps": arts.steps.len(),
        "newton_iterations": arts.newton_iterations,
        "max_halvings": arts.max_halvings,
        "failures": arts.failures,
        "files": files,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(io::Error::other)?;
    fs::write(dir.join("summary.json"), text + "\n")?;
    Ok(files)
}

fn stribeck_svg(rows: &[StribeckRow]) -> String {
    let pts = rows
        .iter()
        .filter(|r| r.friction > 0.0)
        .map(|r| (r.u_eta, r.friction))
        .collect();
    line_plot(
        "Stribeck curve",
        Axis::log("U eta [N/m]"),
        Axis::log("friction coefficient"),
        &[Series::new("friction", pts)],
    )
}

fn steps_svg(rows: &[StepRow]) -> String {
    let pts = rows.iter().map(|r| (r.time, r.friction)).collect();
    line_plot(
        "Friction history",
        Axis::linear("time [s]"),
        Axis::linear("friction coefficient"),
        &[Series::new("friction", pts)],
    )
}

fn profiles_svg(snaps: &[Snapshot]) -> String {
    let mut series = Vec::new();
    for s in snaps {
        let h_max = s.rows.iter().fold(0.0f64, |m, r| m.max(r.h));
        let p_max = s.rows.iter().fold(0.0f64, |m, r| m.max(r.p).max(r.lambda_n));
        let norm = |v: f64, m: f64| if m > 0.0 { v / m } else { 0.0 };
        series.push(Series::new(
            &format!("h, step {}", s.step),
            s.rows.iter().map(|r| (r.x, norm(r.h, h_max))).collect(),
        ));
        series.push(Series::new(
            &format!("p, step {}", s.step),
            s.rows.iter().map(|r| (r.x, norm(r.p, p_max))).collect(),
        ));
        series.push(Series::new(
            &format!("lambda_n, step {}", s.step),
            s.rows.iter().map(|r| (r.x, norm(r.lambda_n, p_max))).collect(),
        ));
    }
    line_plot(
        "Interface profiles (scaled to their maxima)",
        Axis::linear("x [mm]"),
        Axis::linear("scaled value"),
        &series,
    )
}
