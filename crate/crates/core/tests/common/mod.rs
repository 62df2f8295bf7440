#![allow(dead_code)]

use nalgebra::DMatrix;
use pursuit_core::{rotation_matrix, LeaderSet, SwarmState, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense_mhat(n: usize, theta: f64) -> DMatrix<f64> {
    let r = rotation_matrix(theta);
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        for p in 0..2 {
            for q in 0..2 {
                m[(2 * i + p, 2 * i + q)] -= r[p][q];
                m[(2 * i + p, 2 * j + q)] += r[p][q];
            }
        }
    }
    m
}

/// Truncated Taylor series with scaling and squaring.
pub fn expm_taylor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().row_sum().max();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(s);
    let n = a.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn random_positions(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<Vec2> {
    (0..n)
        .map(|_| {
            [
                rng.gen_range(-spread..spread),
                rng.gen_range(-spread..spread),
            ]
        })
        .collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> SwarmState {
    SwarmState::new(0.0, random_positions(rng, n, 5.0)).unwrap()
}

pub fn random_leaders(rng: &mut ChaCha8Rng, n: usize) -> LeaderSet {
    LeaderSet::from_bools((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

/// Fixed five-agent start used wherever a concrete swarm is needed.
pub fn five_agents() -> SwarmState {
    SwarmState::new(
        0.0,
        vec![[2.0, 1.0], [9.0, 3.0], [3.0, 4.0], [7.0, 8.0], [1.0, 7.0]],
    )
    .unwrap()
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
