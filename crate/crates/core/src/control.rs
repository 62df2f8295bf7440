//! Broadcast control inputs: the common velocity signal and the set of agents
//! that detect it.

use alloc::vec::Vec;

use crate::error::{PursuitError, Result};
use crate::linalg::Vec2;

/// 0/1 detection indicator, one entry per agent (0-based internally).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderSet(Vec<bool>);

impl LeaderSet {
    /// Builds the set from 0/1 entries; anything else is rejected.
    pub fn from_indicator(entries: &[u8]) -> Result<Self> {
        entries
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(PursuitError::InvalidLeaderEntry { index, value }),
            })
            .collect::<Result<Vec<_>>>()
            .map(LeaderSet)
    }

    pub fn from_bools(entries: Vec<bool>) -> Self {
        LeaderSet(entries)
    }

    pub fn all(n: usize) -> Self {
        LeaderSet(alloc::vec![true; n])
    }

    pub fn none(n: usize) -> Self {
        LeaderSet(alloc::vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of leaders, `n_l`.
    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_leader(&self, agent: usize) -> bool {
        self.0[agent]
    }

    pub fn is_all(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn indicator(&self) -> Vec<u8> {
        self.0.iter().map(|&b| u8::from(b)).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Relabels agents cyclically: agent `i` of the result is agent `i + shift`
    /// of `self`.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.0.len();
        LeaderSet((0..n).map(|i| self.0[(i + shift) % n]).collect())
    }

    /// Stacked `(B ⊗ I₂) U_c`, length `2n`.
    pub fn broadcast(&self, u_c: Vec2) -> Vec<f64> {
        self.0
            .iter()
            .flat_map(|&b| if b { u_c } else { [0.0, 0.0] })
            .collect()
    }
}

/// Piecewise-constant control in effect during one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlInput {
    pub u_c: Vec2,
    pub leaders: LeaderSet,
}

impl ControlInput {
    pub fn new(u_c: Vec2, leaders: LeaderSet) -> Result<Self> {
        if !u_c.iter().all(|x| x.is_finite()) {
            return Err(PursuitError::NonFinite("broadcast velocity"));
        }
        Ok(Self { u_c, leaders })
    }

    /// No broadcast signal at all.
    pub fn autonomous(n: usize) -> Self {
        Self {
            u_c: [0.0, 0.0],
            leaders: LeaderSet::none(n),
        }
    }
}
