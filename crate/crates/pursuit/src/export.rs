//! CSV and JSON output.
//!
//! Floats are written in `{:.16e}` form so that reading a file back yields
//! the exact values that were simulated.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use pursuit_core::{Trajectory, Vec2};

use crate::error::{Error, Result};
use crate::run::{IntervalPrediction, RunOutput};

pub const TRAJECTORY_HEADER: [&str; 6] = ["t", "agent", "x", "y", "vx", "vy"];

/// One CSV row. `agent` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub agent: usize,
    pub position: Vec2,
    pub velocity: Vec2,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Finite-difference velocities: central inside, one-sided at the ends.
fn velocities(traj: &Trajectory, agent: usize) -> Vec<Vec2> {
    let s = traj.samples();
    let m = s.len();
    (0..m)
        .map(|i| {
            if m < 2 {
                return [0.0, 0.0];
            }
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == m - 1 => (m - 2, m - 1),
                _ => (i - 1, i + 1),
            };
            let (p, q) = (s[a].position(agent), s[b].position(agent));
            let h = s[b].t() - s[a].t();
            [(q[0] - p[0]) / h, (q[1] - p[1]) / h]
        })
        .collect()
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    let n = traj.n();
    let vel: Vec<Vec<Vec2>> = (0..n).map(|k| velocities(traj, k)).collect();
    let mut rows = Vec::with_capacity(traj.samples().len() * n);
    for (i, s) in traj.samples().iter().enumerate() {
        for (k, v) in vel.iter().enumerate() {
            rows.push(TrajectoryRow {
                t: s.t(),
                agent: k + 1,
                position: s.position(k),
                velocity: v[i],
            });
        }
    }
    rows
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in trajectory_rows(traj) {
        w.write_record([
            fmt(r.t),
            r.agent.to_string(),
            fmt(r.position[0]),
            fmt(r.position[1]),
            fmt(r.velocity[0]),
            fmt(r.velocity[1]),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(Error::MalformedCsv(format!(
            "expected header {}, found {}",
            TRAJECTORY_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::MalformedCsv(format!("row {}: bad {what}", line + 1));
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(TRAJECTORY_HEADER[i]))
        };
        let agent = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .filter(|&a: &usize| a >= 1)
            .ok_or_else(|| bad("agent"))?;
        rows.push(TrajectoryRow {
            t: num(0)?,
            agent,
            position: [num(2)?, num(3)?],
            velocity: [num(4)?, num(5)?],
        });
    }
    Ok(rows)
}

/// Per-agent polyline for plotting: `t,x,y`.
pub fn write_agent_track<W: Write>(traj: &Trajectory, agent: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for s in traj.samples() {
        let p = s.position(agent);
        w.write_record([fmt(s.t()), fmt(p[0]), fmt(p[1])])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Predicted deviation scalars and offsets for one interval.
pub fn write_deviations<W: Write>(pred: &IntervalPrediction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["agent", "sigma", "offset_x", "offset_y"])?;
    if let Ok(p) = &pred.outcome {
        for (k, (s, o)) in p.sigma.iter().zip(&p.offsets).enumerate() {
            w.write_record([(k + 1).to_string(), fmt(*s), fmt(o[0]), fmt(o[1])])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| Error::Write {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Write {
        path: path.to_owned(),
        source,
    })
}

/// Writes trajectories, plot series and the report under `dir`. Returns the
/// files written.
pub fn write_outputs(run: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    let plot = dir.join("plot");
    create_dir(&plot)?;
    let mut written = Vec::new();
    for traj in &run.trajectories {
        let path = dir.join(format!("trajectory_{}.csv", traj.source.as_str()));
        write_trajectory(traj, create(&path)?)?;
        written.push(path);
    }
    let primary = run.primary();
    for agent in 0..primary.n() {
        let path = plot.join(format!("agent_{}.csv", agent + 1));
        write_agent_track(primary, agent, create(&path)?)?;
        written.push(path);
    }
    for pred in &run.predictions {
        let path = plot.join(format!("deviations_{}.csv", pred.index));
        write_deviations(pred, create(&path)?)?;
        written.push(path);
    }
    let path = dir.join("report.json");
    write_text(&path, &run.report.to_json())?;
    written.push(path);
    Ok(written)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|source| Error::Write {
            path: path.to_owned(),
            source,
        })
}
