//! Scenario execution and the prediction-versus-simulation report.
//!
//! Every measurement here is taken from trajectory samples only, so each
//! verdict can be recomputed from the exported CSV files.

use std::f64::consts::PI;

use pursuit_core::fit::{fit_drifting_circle, tail_velocity, wrap_positive};
use pursuit_core::predictor::centroid;
use pursuit_core::{
    classify_regime, predict, simulate_schedule, AsymptoticPrediction, Handedness, PursuitError,
    Regime, SwarmState, Trajectory, Vec2,
};
use serde::Serialize;

use crate::error::Result;
use crate::scenario::{MethodChoice, Scenario};

/// Pass/fail thresholds used by the report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Largest integrator-versus-exact coordinate gap.
    pub method_gap: f64,
    /// Tail velocity against the predicted drift.
    pub velocity: f64,
    /// Measured against predicted deviation offsets (or orbit centres).
    pub offsets: f64,
    /// Relative error of the fitted orbit radius.
    pub radius_rel: f64,
    /// Phase spacing between consecutive agents, radians.
    pub spacing: f64,
    /// Fitted angular rate against `2 sin(π/n)`.
    pub rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            method_gap: 1e-8,
            velocity: 1e-3,
            offsets: 1e-3,
            radius_rel: 1e-3,
            spacing: 1e-3,
            rate: 1e-3,
        }
    }
}

/// Fraction of an interval, counted from its end, used for tail measurements.
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            error,
            tolerance,
            pass: error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub method: String,
    pub t: f64,
    pub magnitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalReport {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub n_leaders: usize,
    pub u_c: Vec2,
    /// `predicted`, `refused` or `not_reached`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<Vec2>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub n: usize,
    pub theta_deg: f64,
    pub regime: String,
    pub dt: f64,
    pub t_max: f64,
    pub methods: Vec<String>,
    pub truncations: Vec<TruncationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method_gap: Option<GapReport>,
    pub intervals: Vec<IntervalReport>,
    pub checks: Vec<Check>,
    pub tolerances: Tolerances,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .chain(self.intervals.iter().flat_map(|i| i.checks.iter()))
    }
}

/// Prediction for one interval, or why there is none.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPrediction {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub outcome: std::result::Result<AsymptoticPrediction, String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectories: Vec<Trajectory>,
    pub predictions: Vec<IntervalPrediction>,
    pub report: ComparisonReport,
}

impl RunOutput {
    /// The trajectory used for measurements: the integrator run when present.
    pub fn primary(&self) -> &Trajectory {
        &self.trajectories[0]
    }

    pub fn truncated(&self) -> bool {
        self.trajectories.iter().any(|t| t.truncated.is_some())
    }
}

/// Predictions for every interval, each from the state at which the interval
/// starts in `traj`.
pub fn predictions_for(scenario: &Scenario, traj: &Trajectory) -> Vec<IntervalPrediction> {
    let sched = &scenario.schedule;
    sched
        .intervals()
        .iter()
        .enumerate()
        .map(|(k, iv)| {
            let t_end = sched.interval_end(k);
            let outcome = match traj.boundaries().get(k) {
                None => Err("run was truncated before this interval".to_owned()),
                Some(&idx) => {
                    let start = traj.samples()[idx].clone().with_time(0.0);
                    predict(&start, scenario.theta, &iv.input).map_err(|e| e.to_string())
                }
            };
            IntervalPrediction {
                index: k,
                t_start: iv.t_start,
                t_end,
                outcome,
            }
        })
        .collect()
}

/// Runs the selected solvers, predicts every interval and compares.
pub fn run_scenario(scenario: &Scenario, tol: &Tolerances) -> Result<RunOutput> {
    let methods = scenario.method.methods();
    let trajectories = methods
        .iter()
        .map(|&m| {
            simulate_schedule(
                &scenario.initial,
                scenario.theta,
                &scenario.schedule,
                scenario.dt,
                m,
            )
        })
        .collect::<std::result::Result<Vec<_>, PursuitError>>()?;
    let regime = classify_regime(scenario.n(), scenario.theta)?;
    let predictions = predictions_for(scenario, &trajectories[0]);

    let mut checks = Vec::new();
    let method_gap = (trajectories.len() == 2).then(|| {
        let gap = method_gap(&trajectories[0], &trajectories[1]);
        checks.push(Check::new("method_gap", gap.max, tol.method_gap));
        gap
    });
    let truncations = trajectories
        .iter()
        .filter_map(|t| {
            t.truncated.map(|c| TruncationReport {
                method: t.source.as_str().to_owned(),
                t: c.t,
                magnitude: c.magnitude.is_finite().then_some(c.magnitude),
            })
        })
        .collect();

    let intervals = predictions
        .iter()
        .map(|p| interval_report(scenario, &trajectories[0], p, tol))
        .collect();

    let mut report = ComparisonReport {
        scenario: scenario.name.clone(),
        n: scenario.n(),
        theta_deg: scenario.theta_deg,
        regime: regime.as_str().to_owned(),
        dt: scenario.dt,
        t_max: scenario.t_max,
        methods: methods.iter().map(|m| m.as_str().to_owned()).collect(),
        truncations,
        method_gap,
        intervals,
        checks,
        tolerances: *tol,
        pass: false,
    };
    let pass = report.all_checks().all(|c| c.pass);
    report.pass = pass;
    Ok(RunOutput {
        trajectories,
        predictions,
        report,
    })
}

/// Same as [`run_scenario`] with both solvers forced on.
pub fn compare_scenario(scenario: &Scenario, tol: &Tolerances) -> Result<RunOutput> {
    let mut s = scenario.clone();
    s.method = MethodChoice::Both;
    run_scenario(&s, tol)
}

fn method_gap(a: &Trajectory, b: &Trajectory) -> GapReport {
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (x, y) in a.samples().iter().zip(b.samples()) {
        let g = x
            .positions()
            .iter()
            .zip(y.positions())
            .flat_map(|(p, q)| [(p[0] - q[0]).abs(), (p[1] - q[1]).abs()])
            .fold(0.0f64, f64::max);
        max = max.max(g);
        sum += g;
        count += 1;
    }
    GapReport {
        max,
        mean: if count > 0 { sum / count as f64 } else { 0.0 },
    }
}

fn track(samples: &[SwarmState], agent: usize) -> Vec<Vec2> {
    samples.iter().map(|s| s.position(agent)).collect()
}

fn interval_report(
    scenario: &Scenario,
    traj: &Trajectory,
    pred: &IntervalPrediction,
    tol: &Tolerances,
) -> IntervalReport {
    let input = &scenario.schedule.intervals()[pred.index].input;
    let mut report = IntervalReport {
        index: pred.index,
        t_start: pred.t_start,
        t_end: pred.t_end,
        n_leaders: input.leaders.count(),
        u_c: input.u_c,
        status: "predicted".to_owned(),
        refusal: None,
        drift: None,
        checks: Vec::new(),
        notes: Vec::new(),
    };
    let p = match &pred.outcome {
        Ok(p) => p,
        Err(reason) => {
            report.status = if traj.boundaries().len() > pred.index {
                "refused"
            } else {
                "not_reached"
            }
            .to_owned();
            report.refusal = Some(reason.clone());
            return report;
        }
    };
    report.drift = Some(p.drift);
    if !traj.interval_complete(pred.index) {
        report
            .notes
            .push("interval cut short; no measurements".to_owned());
        return report;
    }
    let range = traj
        .interval_samples(pred.index)
        .expect("interval was reached");
    let samples = &traj.samples()[range];
    let ts: Vec<f64> = samples.iter().map(|s| s.t() - pred.t_start).collect();
    let elapsed = ts[ts.len() - 1];

    let circling = p.orbit.as_ref().is_some_and(|o| o.circle_phases.is_some());
    if circling {
        orbit_checks(p, samples, &ts, tol, &mut report);
    } else {
        let mut verr = 0.0f64;
        let mut oerr = 0.0f64;
        for agent in 0..p.n {
            let pts = track(samples, agent);
            match tail_velocity(&ts, &pts, TAIL_FRACTION) {
                Ok(v) => verr = verr.max((v[0] - p.drift[0]).abs().max((v[1] - p.drift[1]).abs())),
                Err(e) => report.notes.push(format!("agent {}: {e}", agent + 1)),
            }
            let q = pts[pts.len() - 1];
            let c = p.center_at(agent, elapsed);
            oerr = oerr.max((q[0] - c[0]).abs().max((q[1] - c[1]).abs()));
        }
        report
            .checks
            .push(Check::new("tail_velocity", verr, tol.velocity));
        report.checks.push(Check::new("offsets", oerr, tol.offsets));
    }
    report
}

fn orbit_checks(
    p: &AsymptoticPrediction,
    samples: &[SwarmState],
    ts: &[f64],
    tol: &Tolerances,
    report: &mut IntervalReport,
) {
    let orbit = p.orbit.as_ref().expect("critical prediction");
    let elapsed = ts[ts.len() - 1];
    // at least two revolutions, or the tail fraction if that is longer
    let period = 2.0 * PI / orbit.omega;
    let window = (TAIL_FRACTION * elapsed).max(2.0 * period).min(elapsed);
    let first = ts.partition_point(|&t| t < elapsed - window);
    let tw = &ts[first..];

    let mut center_v = 0.0f64;
    let mut center_off = 0.0f64;
    let mut radius = 0.0f64;
    let mut rate = 0.0f64;
    let mut phases = Vec::with_capacity(p.n);
    for agent in 0..p.n {
        let pts = track(&samples[first..], agent);
        let fit = match fit_drifting_circle(tw, &pts) {
            Ok(f) => f,
            Err(e) => {
                report.notes.push(format!("agent {}: {e}", agent + 1));
                return;
            }
        };
        center_v = center_v.max(
            (fit.velocity[0] - p.drift[0])
                .abs()
                .max((fit.velocity[1] - p.drift[1]).abs()),
        );
        let c = fit.center_at(elapsed);
        let want = p.center_at(agent, elapsed);
        center_off = center_off.max((c[0] - want[0]).abs().max((c[1] - want[1]).abs()));
        radius = radius.max((fit.radius() - orbit.circle_radius).abs() / orbit.circle_radius);
        rate = rate.max((fit.omega - orbit.omega).abs());
        // direction of travel from the fitted ellipse: cross(A, B) > 0 is
        // counterclockwise
        let a = fit.cos_coef;
        let b = fit.sin_coef;
        let hand = if a[0] * b[1] - a[1] * b[0] > 0.0 {
            Handedness::CounterClockwise
        } else {
            Handedness::Clockwise
        };
        let q = pts[pts.len() - 1];
        phases.push(hand.phase([q[0] - c[0], q[1] - c[1]]));
    }
    let step = 2.0 * PI / p.n as f64;
    let spacing = (0..p.n)
        .map(|k| {
            let d = wrap_positive(phases[(k + 1) % p.n] - phases[k] - step);
            d.min(2.0 * PI - d)
        })
        .fold(0.0f64, f64::max);
    report
        .checks
        .push(Check::new("center_velocity", center_v, tol.velocity));
    report
        .checks
        .push(Check::new("center_offsets", center_off, tol.offsets));
    report
        .checks
        .push(Check::new("orbit_radius", radius, tol.radius_rel));
    report.checks.push(Check::new("orbit_rate", rate, tol.rate));
    report
        .checks
        .push(Check::new("orbit_spacing", spacing, tol.spacing));
}

/// Start state of every interval, chained through the exact solution. Used
/// when only predictions are wanted.
pub fn interval_start_states(scenario: &Scenario) -> Result<Vec<SwarmState>> {
    let sched = &scenario.schedule;
    let mut states = vec![scenario.initial.clone()];
    for (k, iv) in sched.intervals().iter().enumerate().take(sched.len() - 1) {
        let len = sched.interval_end(k) - iv.t_start;
        let last = states.last().expect("non-empty");
        states.push(pursuit_core::exact_interval_solution(
            last,
            scenario.theta,
            &iv.input,
            len,
        )?);
    }
    Ok(states)
}

/// Predictions without simulating the sample grid. Fails on the first
/// refused interval.
pub fn predict_scenario(scenario: &Scenario) -> Result<Vec<AsymptoticPrediction>> {
    let regime = classify_regime(scenario.n(), scenario.theta)?;
    if regime == Regime::Unstable {
        return Err(PursuitError::UnstableRegime {
            theta: scenario.theta,
            critical: pursuit_core::critical_angle(scenario.n()),
        }
        .into());
    }
    let starts = interval_start_states(scenario)?;
    starts
        .iter()
        .zip(scenario.schedule.intervals())
        .map(|(s, iv)| {
            Ok(predict(
                &s.clone().with_time(0.0),
                scenario.theta,
                &iv.input,
            )?)
        })
        .collect()
}

/// Centroid of a trajectory's final state; convenience for reports and tests.
pub fn final_centroid(traj: &Trajectory) -> Vec2 {
    centroid(traj.final_state())
}
