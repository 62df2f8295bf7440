use thiserror::Error;

/// Errors raised by the pursuit core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PursuitError {
    #[error("cyclic pursuit needs at least 2 agents, got {0}")]
    TooFewAgents(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("leader indicator entry {index} is {value}, expected 0 or 1")]
    InvalidLeaderEntry { index: usize, value: u8 },

    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),

    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e} in {context}")]
    ImaginaryResidue {
        context: &'static str,
        residue: f64,
        tolerance: f64,
    },

    #[error("state overflow at t = {t}: coordinate magnitude {magnitude:e} exceeds cap")]
    Overflow { t: f64, magnitude: f64 },

    #[error(
        "no asymptotic prediction for unstable regime (|theta| = {theta} > pi/n = {critical})"
    )]
    UnstableRegime { theta: f64, critical: f64 },

    #[error("invalid schedule: {0}")]
    Schedule(ScheduleError),

    #[error("fit failed: {0}")]
    Fit(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("schedule is empty")]
    Empty,
    #[error("first interval starts at {start} but the initial state is at t = {state_t}")]
    StartMismatch { start: f64, state_t: f64 },
    #[error(
        "intervals {first} and {second} overlap or are out of order ({t_first} >= {t_second})"
    )]
    Overlap {
        first: usize,
        second: usize,
        t_first: f64,
        t_second: f64,
    },
    #[error("interval {index} starts at {start}, not before the schedule end {end}")]
    PastEnd { index: usize, start: f64, end: f64 },
    #[error("interval {index} has length {length}, not a multiple of dt = {dt}")]
    Misaligned { index: usize, length: f64, dt: f64 },
    #[error("interval {index} has {got} leader entries, expected {expected}")]
    LeaderLength {
        index: usize,
        expected: usize,
        got: usize,
    },
}

impl From<ScheduleError> for PursuitError {
    fn from(e: ScheduleError) -> Self {
        PursuitError::Schedule(e)
    }
}

pub type Result<T> = core::result::Result<T, PursuitError>;
