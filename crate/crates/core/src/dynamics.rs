//! Time-domain evolution of the swarm.
//!
//! Two independent routes: a classical RK4 integrator of the agent equations
//! `ṗ_i = R(θ)(p_{i+1} - p_i) + b_i U_c`, and the exact interval solution
//! assembled from the spectral decomposition. The integrator shares no code
//! with the spectral path.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::control::ControlInput;
use crate::error::{PursuitError, Result, ScheduleError};
use crate::linalg::{max_abs, Mat2, Vec2};
use crate::spectral::{check_agents, mhat_spectrum, rotation_matrix};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 60.0;

/// Runs abort once any coordinate magnitude exceeds this.
pub const OVERFLOW_CAP: f64 = 1e12;

/// Relative tolerance when checking that an interval is a whole number of
/// steps.
const GRID_TOLERANCE: f64 = 1e-9;

/// Timestamp plus the positions of all agents.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    t: f64,
    positions: Vec<Vec2>,
}

impl SwarmState {
    pub fn new(t: f64, positions: Vec<Vec2>) -> Result<Self> {
        check_agents(positions.len())?;
        if !t.is_finite() {
            return Err(PursuitError::NonFinite("state time"));
        }
        if !positions.iter().flatten().all(|x| x.is_finite()) {
            return Err(PursuitError::NonFinite("agent position"));
        }
        Ok(Self { t, positions })
    }

    /// Builds a state from stacked coordinates `(x_1, y_1, x_2, y_2, …)`.
    pub fn from_stacked(t: f64, stacked: &[f64]) -> Result<Self> {
        if !stacked.len().is_multiple_of(2) {
            return Err(PursuitError::DimensionMismatch {
                expected: stacked.len() + 1,
                got: stacked.len(),
            });
        }
        Self::new(t, stacked.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn position(&self, agent: usize) -> Vec2 {
        self.positions[agent]
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.positions.iter().flatten().copied().collect()
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn max_abs_coordinate(&self) -> f64 {
        self.positions
            .iter()
            .flatten()
            .fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    /// Largest pairwise distance between agents.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                d = d.max(libm::hypot(a[0] - b[0], a[1] - b[1]));
            }
        }
        d
    }
}

fn check_input(n: usize, input: &ControlInput) -> Result<()> {
    if input.leaders.len() != n {
        return Err(PursuitError::DimensionMismatch {
            expected: n,
            got: input.leaders.len(),
        });
    }
    Ok(())
}

fn derivative_into(x: &[f64], rot: &Mat2, bu: &[f64], out: &mut [f64]) {
    let n = x.len() / 2;
    for i in 0..n {
        let j = (i + 1) % n;
        let dx = x[2 * j] - x[2 * i];
        let dy = x[2 * j + 1] - x[2 * i + 1];
        out[2 * i] = rot[0][0] * dx + rot[0][1] * dy + bu[2 * i];
        out[2 * i + 1] = rot[1][0] * dx + rot[1][1] * dy + bu[2 * i + 1];
    }
}

/// Stacked velocities `ṗ_i = R(θ)(p_{i+1} - p_i) + b_i U_c`, indices mod n.
pub fn derivative(state: &SwarmState, theta: f64, input: &ControlInput) -> Result<Vec<f64>> {
    check_input(state.n(), input)?;
    let mut out = vec![0.0; 2 * state.n()];
    derivative_into(
        &state.stacked(),
        &rotation_matrix(theta),
        &input.leaders.broadcast(input.u_c),
        &mut out,
    );
    Ok(out)
}

/// Reusable RK4 work buffers for one `(θ, input)` pair.
struct Rk4 {
    rot: Mat2,
    bu: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize, theta: f64, input: &ControlInput) -> Self {
        let z = vec![0.0; 2 * n];
        Self {
            rot: rotation_matrix(theta),
            bu: input.leaders.broadcast(input.u_c),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn step(&mut self, x: &mut [f64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        derivative_into(x, &self.rot, &self.bu, k1);
        for ((t, a), k) in self.tmp.iter_mut().zip(x.iter()).zip(k1.iter()) {
            *t = a + 0.5 * dt * k;
        }
        derivative_into(&self.tmp, &self.rot, &self.bu, k2);
        for ((t, a), k) in self.tmp.iter_mut().zip(x.iter()).zip(k2.iter()) {
            *t = a + 0.5 * dt * k;
        }
        derivative_into(&self.tmp, &self.rot, &self.bu, k3);
        for ((t, a), k) in self.tmp.iter_mut().zip(x.iter()).zip(k3.iter()) {
            *t = a + dt * k;
        }
        derivative_into(&self.tmp, &self.rot, &self.bu, k4);
        for (i, a) in x.iter_mut().enumerate() {
            *a += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

fn overflow_check(t: f64, x: &[f64]) -> Result<()> {
    let magnitude = max_abs(x);
    if !magnitude.is_finite() || magnitude > OVERFLOW_CAP || x.iter().any(|v| v.is_nan()) {
        Err(PursuitError::Overflow { t, magnitude })
    } else {
        Ok(())
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn step_rk4(
    state: &SwarmState,
    theta: f64,
    input: &ControlInput,
    dt: f64,
) -> Result<SwarmState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PursuitError::InvalidStep(dt));
    }
    check_input(state.n(), input)?;
    let mut x = state.stacked();
    Rk4::new(state.n(), theta, input).step(&mut x, dt);
    let t = state.t + dt;
    overflow_check(t, &x)?;
    SwarmState::from_stacked(t, &x)
}

/// Exact state after relative time `t` of one constant-control interval.
pub fn exact_interval_solution(
    p0: &SwarmState,
    theta: f64,
    input: &ControlInput,
    t: f64,
) -> Result<SwarmState> {
    check_input(p0.n(), input)?;
    let spectrum = mhat_spectrum(p0.n(), theta)?;
    let x = spectrum
        .interval_solution(&p0.stacked(), &input.leaders, input.u_c)?
        .at(t)?;
    overflow_check(p0.t + t, &x)?;
    SwarmState::from_stacked(p0.t + t, &x)
}

/// One piecewise-constant segment, in effect from `t_start` until the next
/// interval's start (or the schedule end).
#[derive(Debug, Clone, PartialEq)]
pub struct ControlInterval {
    pub t_start: f64,
    pub input: ControlInput,
}

/// Contiguous, ordered control intervals covering `[t_start(0), t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    intervals: Vec<ControlInterval>,
    t_end: f64,
}

impl Schedule {
    pub fn new(intervals: Vec<ControlInterval>, t_end: f64) -> Result<Self> {
        let first = intervals.first().ok_or(ScheduleError::Empty)?;
        let n = first.input.leaders.len();
        for (i, iv) in intervals.iter().enumerate() {
            if !iv.t_start.is_finite() {
                return Err(PursuitError::NonFinite("interval start"));
            }
            if iv.input.leaders.len() != n {
                return Err(ScheduleError::LeaderLength {
                    index: i,
                    expected: n,
                    got: iv.input.leaders.len(),
                }
                .into());
            }
            if i > 0 && intervals[i - 1].t_start >= iv.t_start {
                return Err(ScheduleError::Overlap {
                    first: i - 1,
                    second: i,
                    t_first: intervals[i - 1].t_start,
                    t_second: iv.t_start,
                }
                .into());
            }
        }
        let last = intervals.len() - 1;
        if intervals[last].t_start.partial_cmp(&t_end) != Some(core::cmp::Ordering::Less) {
            return Err(ScheduleError::PastEnd {
                index: last,
                start: intervals[last].t_start,
                end: t_end,
            }
            .into());
        }
        Ok(Self { intervals, t_end })
    }

    /// A single interval `[t_start, t_end]`.
    pub fn single(input: ControlInput, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(vec![ControlInterval { t_start, input }], t_end)
    }

    pub fn intervals(&self) -> &[ControlInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.intervals[0].t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn interval_end(&self, k: usize) -> f64 {
        self.intervals
            .get(k + 1)
            .map_or(self.t_end, |next| next.t_start)
    }

    /// Number of `dt` steps in interval `k`, or an alignment error.
    pub fn steps(&self, k: usize, dt: f64) -> Result<usize> {
        let length = self.interval_end(k) - self.intervals[k].t_start;
        let steps = libm::round(length / dt);
        if steps < 1.0 || (steps * dt - length).abs() > GRID_TOLERANCE * length.max(1.0) {
            return Err(ScheduleError::Misaligned {
                index: k,
                length,
                dt,
            }
            .into());
        }
        Ok(steps as usize)
    }
}

/// Which route produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Integrator,
    ExactPropagator,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Integrator => "integrator",
            Method::ExactPropagator => "exact",
        }
    }
}

/// Where and why a run was cut short.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub t: f64,
    pub magnitude: f64,
}

/// Uniformly sampled run over a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub source: Method,
    pub theta: f64,
    pub dt: f64,
    pub schedule: Schedule,
    samples: Vec<SwarmState>,
    /// Sample index at which each interval starts.
    boundaries: Vec<usize>,
    pub truncated: Option<Truncation>,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.samples.first().map_or(0, SwarmState::n)
    }

    pub fn samples(&self) -> &[SwarmState] {
        &self.samples
    }

    pub fn final_state(&self) -> &SwarmState {
        self.samples
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Sample indices of interval `k`, both boundary samples included. `None`
    /// if the run was truncated before the interval started.
    pub fn interval_samples(&self, k: usize) -> Option<RangeInclusive<usize>> {
        let start = *self.boundaries.get(k)?;
        let end = self
            .boundaries
            .get(k + 1)
            .copied()
            .unwrap_or(self.samples.len() - 1);
        Some(start..=end)
    }

    /// Whether interval `k` ran to its end.
    pub fn interval_complete(&self, k: usize) -> bool {
        match self.truncated {
            None => k < self.boundaries.len(),
            Some(_) => k + 1 < self.boundaries.len(),
        }
    }
}

/// Runs a whole schedule, chaining intervals so each starts from the end
/// state of the previous one. Samples lie on a `dt` grid aligned to every
/// boundary; a boundary is sampled once.
///
/// A run that exceeds [`OVERFLOW_CAP`] stops early and is returned with
/// `truncated` set.
pub fn simulate_schedule(
    p0: &SwarmState,
    theta: f64,
    schedule: &Schedule,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PursuitError::InvalidStep(dt));
    }
    if !theta.is_finite() {
        return Err(PursuitError::NonFinite("deviation angle"));
    }
    let n = p0.n();
    if (schedule.t_start() - p0.t).abs() > GRID_TOLERANCE * p0.t.abs().max(1.0) {
        return Err(ScheduleError::StartMismatch {
            start: schedule.t_start(),
            state_t: p0.t,
        }
        .into());
    }
    let steps = (0..schedule.len())
        .map(|k| schedule.steps(k, dt))
        .collect::<Result<Vec<_>>>()?;
    for iv in schedule.intervals() {
        check_input(n, &iv.input)?;
    }
    let spectrum = match method {
        Method::ExactPropagator => Some(mhat_spectrum(n, theta)?),
        Method::Integrator => None,
    };

    let total: usize = steps.iter().sum();
    let mut samples = Vec::with_capacity(total + 1);
    samples.push(p0.clone().with_time(schedule.t_start()));
    let mut boundaries = Vec::with_capacity(schedule.len());
    let mut truncated = None;

    'intervals: for (k, iv) in schedule.intervals().iter().enumerate() {
        boundaries.push(samples.len() - 1);
        let t0 = iv.t_start;
        let t1 = schedule.interval_end(k);
        let start = samples.last().unwrap().stacked();
        let time_at = |i: usize| {
            if i == steps[k] {
                t1
            } else {
                t0 + i as f64 * dt
            }
        };
        match &spectrum {
            None => {
                let mut rk = Rk4::new(n, theta, &iv.input);
                let mut x = start;
                for i in 1..=steps[k] {
                    rk.step(&mut x, dt);
                    let t = time_at(i);
                    if let Err(PursuitError::Overflow { t, magnitude }) = overflow_check(t, &x) {
                        truncated = Some(Truncation { t, magnitude });
                        break 'intervals;
                    }
                    samples.push(SwarmState::from_stacked(t, &x)?);
                }
            }
            Some(spectrum) => {
                let sol = spectrum.interval_solution(&start, &iv.input.leaders, iv.input.u_c)?;
                for i in 1..=steps[k] {
                    let t = time_at(i);
                    let rel = if i == steps[k] {
                        t1 - t0
                    } else {
                        i as f64 * dt
                    };
                    let x = match sol.at(rel) {
                        Ok(x) => x,
                        // the residue guard also trips once modes blow up
                        Err(PursuitError::ImaginaryResidue { .. })
                            if spectrum.max_nonzero_real_part() > 0.0 =>
                        {
                            truncated = Some(Truncation {
                                t,
                                magnitude: f64::INFINITY,
                            });
                            break 'intervals;
                        }
                        Err(e) => return Err(e),
                    };
                    if let Err(PursuitError::Overflow { t, magnitude }) = overflow_check(t, &x) {
                        truncated = Some(Truncation { t, magnitude });
                        break 'intervals;
                    }
                    samples.push(SwarmState::from_stacked(t, &x)?);
                }
            }
        }
    }

    Ok(Trajectory {
        source: method,
        theta,
        dt,
        schedule: schedule.clone(),
        samples,
        boundaries,
        truncated,
    })
}
