//! Deviated linear cyclic pursuit with broadcast control.
//!
//! `n` planar agents obey `ṗ_i = R(θ)(p_{i+1} - p_i) + b_i U_c`: each agent
//! chases the next around a ring with its line of sight rotated by `θ`, and
//! the agents with `b_i = 1` also hear a common velocity command `U_c`.
//!
//! The crate provides the closed-form spectrum of the system matrix
//! `M ⊗ R(θ)`, exact and RK4 time evolution over piecewise-constant control
//! schedules, and the asymptotic predictions (drift, deviations, critical
//! orbits) that the spectrum implies. It is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod control;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod predictor;
pub mod spectral;

pub use control::{ControlInput, LeaderSet};
pub use dynamics::{
    derivative, exact_interval_solution, simulate_schedule, step_rk4, ControlInterval, Method,
    Schedule, SwarmState, Trajectory, Truncation,
};
pub use error::{PursuitError, Result, ScheduleError};
pub use linalg::{Vec2, C64};
pub use predictor::{predict, AsymptoticPrediction, Handedness, Orbit, OrbitParameters};
pub use spectral::{
    classify_regime, critical_angle, mhat_spectrum, rotation_matrix, PursuitSpectrum, Regime, Sign,
};
