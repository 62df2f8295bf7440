//! Scenario documents: parsing, validation and serialization.

use std::fmt;
use std::path::Path;

use pursuit_core::{ControlInput, ControlInterval, LeaderSet, Method, Schedule, SwarmState};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = pursuit_core::dynamics::DEFAULT_DT;
pub const DEFAULT_T_MAX: f64 = pursuit_core::dynamics::DEFAULT_T_MAX;

/// Which solver(s) a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    #[default]
    Integrator,
    Exact,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Integrator => vec![Method::Integrator],
            MethodChoice::Exact => vec![Method::ExactPropagator],
            MethodChoice::Both => vec![Method::Integrator, Method::ExactPropagator],
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::Integrator => "integrator",
            MethodChoice::Exact => "exact",
            MethodChoice::Both => "both",
        })
    }
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}

/// One schedule entry as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDocument {
    pub t_start: f64,
    pub u_c: [f64; 2],
    pub leaders: Vec<u8>,
}

/// Scenario file contents before validation. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub n: usize,
    pub theta_deg: f64,
    pub initial_positions: Vec<[f64; 2]>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default)]
    pub method: MethodChoice,
    pub schedule: Vec<IntervalDocument>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub theta_deg: Option<f64>,
    pub method: Option<MethodChoice>,
}

impl Overrides {
    pub fn apply(&self, doc: &mut ScenarioDocument) {
        if let Some(v) = self.dt {
            doc.dt = v;
        }
        if let Some(v) = self.t_max {
            doc.t_max = v;
        }
        if let Some(v) = self.theta_deg {
            doc.theta_deg = v;
        }
        if let Some(v) = self.method {
            doc.method = v;
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub theta_deg: f64,
    /// `theta_deg` in radians, converted once.
    pub theta: f64,
    pub initial: SwarmState,
    pub schedule: Schedule,
    pub dt: f64,
    pub t_max: f64,
    pub method: MethodChoice,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.initial.n()
    }

    pub fn to_document(&self) -> ScenarioDocument {
        ScenarioDocument {
            name: self.name.clone(),
            n: self.n(),
            theta_deg: self.theta_deg,
            initial_positions: self.initial.positions().to_vec(),
            dt: self.dt,
            t_max: self.t_max,
            method: self.method,
            schedule: self
                .schedule
                .intervals()
                .iter()
                .map(|iv| IntervalDocument {
                    t_start: iv.t_start,
                    u_c: iv.input.u_c,
                    leaders: iv.input.leaders.indicator(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scenario documents serialize")
    }

    pub fn with_overrides(&self, overrides: &Overrides) -> Result<Scenario> {
        let mut doc = self.to_document();
        overrides.apply(&mut doc);
        validate(doc)
    }
}

/// Parses and validates a JSON scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_with_overrides(text, &Overrides::default())
}

/// Parses a document and applies command-line overrides before validation,
/// so flag values are checked exactly like file values.
pub fn parse_with_overrides(text: &str, overrides: &Overrides) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut doc: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." {
            "document".to_owned()
        } else {
            path
        };
        Error::invalid(path, e.into_inner().to_string())
    })?;
    overrides.apply(&mut doc);
    validate(doc)
}

pub fn load_scenario(path: &Path, overrides: &Overrides) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_with_overrides(&text, overrides)
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            path,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

/// Checks a document and builds the scenario.
pub fn validate(doc: ScenarioDocument) -> Result<Scenario> {
    let n = doc.n;
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("cyclic pursuit needs at least 2 agents, got {n}"),
        ));
    }
    if !doc.theta_deg.is_finite() {
        return Err(Error::invalid("theta_deg", "must be finite"));
    }
    positive("dt", doc.dt)?;
    positive("t_max", doc.t_max)?;
    if doc.initial_positions.len() != n {
        return Err(Error::invalid(
            "initial_positions",
            format!("expected {n} points, got {}", doc.initial_positions.len()),
        ));
    }
    for (i, p) in doc.initial_positions.iter().enumerate() {
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid(
                format!("initial_positions[{i}]"),
                "coordinates must be finite",
            ));
        }
    }
    if doc.schedule.is_empty() {
        return Err(Error::invalid("schedule", "needs at least one interval"));
    }
    if doc.schedule[0].t_start != 0.0 {
        return Err(Error::invalid(
            "schedule[0].t_start",
            format!(
                "the first interval must start at 0, got {}",
                doc.schedule[0].t_start
            ),
        ));
    }
    let mut intervals = Vec::with_capacity(doc.schedule.len());
    for (i, iv) in doc.schedule.iter().enumerate() {
        if !iv.t_start.is_finite() {
            return Err(Error::invalid(
                format!("schedule[{i}].t_start"),
                "must be finite",
            ));
        }
        if i > 0 && iv.t_start <= doc.schedule[i - 1].t_start {
            return Err(Error::invalid(
                format!("schedule[{i}].t_start"),
                format!(
                    "schedule[{}] (t_start {}) and schedule[{i}] (t_start {}) overlap; starts must increase",
                    i - 1,
                    doc.schedule[i - 1].t_start,
                    iv.t_start
                ),
            ));
        }
        if iv.t_start >= doc.t_max {
            return Err(Error::invalid(
                format!("schedule[{i}].t_start"),
                format!(
                    "starts at {} which is not before t_max {}",
                    iv.t_start, doc.t_max
                ),
            ));
        }
        if !iv.u_c.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid(
                format!("schedule[{i}].u_c"),
                "must be finite",
            ));
        }
        if iv.leaders.len() != n {
            return Err(Error::invalid(
                format!("schedule[{i}].leaders"),
                format!("expected {n} entries, got {}", iv.leaders.len()),
            ));
        }
        if let Some(j) = iv.leaders.iter().position(|&b| b > 1) {
            return Err(Error::invalid(
                format!("schedule[{i}].leaders[{j}]"),
                format!("must be 0 or 1, got {}", iv.leaders[j]),
            ));
        }
        let leaders = LeaderSet::from_indicator(&iv.leaders)?;
        intervals.push(ControlInterval {
            t_start: iv.t_start,
            input: ControlInput::new(iv.u_c, leaders)?,
        });
    }
    let schedule = Schedule::new(intervals, doc.t_max)?;
    for i in 0..schedule.len() {
        schedule.steps(i, doc.dt).map_err(|_| {
            Error::invalid(
                format!("schedule[{i}]"),
                format!(
                    "interval [{}, {}] is not a whole number of dt = {} steps",
                    schedule.intervals()[i].t_start,
                    schedule.interval_end(i),
                    doc.dt
                ),
            )
        })?;
    }
    Ok(Scenario {
        name: doc.name,
        theta_deg: doc.theta_deg,
        theta: doc.theta_deg.to_radians(),
        initial: SwarmState::new(0.0, doc.initial_positions)?,
        schedule,
        dt: doc.dt,
        t_max: doc.t_max,
        method: doc.method,
    })
}
