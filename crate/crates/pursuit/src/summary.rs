//! Serializable views of predictions and spectra for command output.

use pursuit_core::{classify_regime, critical_angle, mhat_spectrum, AsymptoticPrediction, Vec2};
use serde::Serialize;

use crate::error::Result;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSummary {
    pub omega: f64,
    pub period: f64,
    pub handedness: &'static str,
    /// Radius of the homogeneous orbit set by the start positions.
    pub r: f64,
    /// Radius of the input-induced velocity circle.
    pub r_v: f64,
    /// Radius of the combined circle traced by each agent.
    pub circle_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSummary {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub regime: &'static str,
    pub p_c: Vec2,
    pub drift: Vec2,
    pub sigma: Vec<f64>,
    pub offsets: Vec<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionSummary {
    pub scenario: String,
    pub n: usize,
    pub theta_deg: f64,
    pub critical_angle_deg: f64,
    pub intervals: Vec<IntervalSummary>,
}

fn interval(index: usize, t_start: f64, t_end: f64, p: &AsymptoticPrediction) -> IntervalSummary {
    IntervalSummary {
        index,
        t_start,
        t_end,
        regime: p.regime.as_str(),
        p_c: p.p_c,
        drift: p.drift,
        sigma: p.sigma.clone(),
        offsets: p.offsets.clone(),
        orbit: p.orbit.as_ref().map(|o| OrbitSummary {
            omega: o.omega,
            period: 2.0 * std::f64::consts::PI / o.omega,
            handedness: o.handedness.as_str(),
            r: o.position.r,
            r_v: o.velocity.r,
            circle_radius: o.circle_radius,
        }),
    }
}

pub fn summarize_predictions(
    scenario: &Scenario,
    preds: &[AsymptoticPrediction],
) -> PredictionSummary {
    let sched = &scenario.schedule;
    PredictionSummary {
        scenario: scenario.name.clone(),
        n: scenario.n(),
        theta_deg: scenario.theta_deg,
        critical_angle_deg: critical_angle(scenario.n()).to_degrees(),
        intervals: preds
            .iter()
            .zip(sched.intervals())
            .enumerate()
            .map(|(k, (p, iv))| interval(k, iv.t_start, sched.interval_end(k), p))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub k: usize,
    pub sign: char,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub n: usize,
    pub theta_deg: f64,
    pub critical_angle_deg: f64,
    pub regime: &'static str,
    /// Largest real part over the non-zero eigenvalues.
    pub max_real_part: f64,
    pub eigenvalues: Vec<Eigenvalue>,
}

pub fn summarize_spectrum(n: usize, theta_deg: f64) -> Result<SpectrumSummary> {
    let theta = theta_deg.to_radians();
    let spectrum = mhat_spectrum(n, theta)?;
    Ok(SpectrumSummary {
        n,
        theta_deg,
        critical_angle_deg: critical_angle(n).to_degrees(),
        regime: classify_regime(n, theta)?.as_str(),
        max_real_part: spectrum.max_nonzero_real_part(),
        eigenvalues: spectrum
            .pairs()
            .iter()
            .map(|p| Eigenvalue {
                k: p.k,
                sign: p.sign.as_char(),
                re: p.mu.re,
                im: p.mu.im,
            })
            .collect(),
    })
}
