//! Closed-form spectral decomposition of the cyclic-pursuit system matrix
//! `M̂ = M ⊗ R(θ)` and the exact propagators built from it.
//!
//! `M = circ[-1, 1, 0, …, 0]` has the Fourier eigenpairs
//! `λ_k = -1 + e^{-2πjk/n}`, `v_k[l] = e^{-2πjkl/n}/√n`, and `R(θ)` has
//! eigenpairs `e^{±jθ}`, `(1, ±j)`. Hence `M̂` has the `2n` eigenpairs
//! `μ_k^± = λ_k e^{±jθ}`, `ζ_k^± = v_k ⊗ (1, ±j)`. Every `ζ` is stored with
//! norm `√2`; projections carry an explicit `1/2` so that
//! `½ Σ ζζ* = I`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex;

use crate::control::LeaderSet;
use crate::error::{PursuitError, Result};
use crate::linalg::{cdot_real, max_abs, Mat2, RealMatrix, Vec2, C64};

/// Equality tolerance (radians) when comparing `|θ|` with `π/n`.
pub const REGIME_TOLERANCE: f64 = 1e-12;

/// Largest imaginary residue tolerated on a quantity that must be real,
/// relative to `max(1, |result|∞)`.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// `R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn rotation_matrix(theta: f64) -> Mat2 {
    let (s, c) = libm::sincos(theta);
    [[c, s], [-s, c]]
}

/// The critical deviation `π/n`. Use this value when constructing a
/// critical-angle run so classification sees the identical float.
pub fn critical_angle(n: usize) -> f64 {
    PI / n as f64
}

/// Maps an angle into `(-π, π]`. Angles already in range are returned
/// unchanged, bit for bit.
pub fn normalize_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * libm::round(theta / two_pi);
    if t <= -PI {
        t += two_pi;
    }
    t
}

pub(crate) fn check_agents(n: usize) -> Result<()> {
    if n < 2 {
        Err(PursuitError::TooFewAgents(n))
    } else {
        Ok(())
    }
}

/// `circ[-1, 1, 0, …, 0]`: row `i` has `-1` at `i` and `1` at `i+1 mod n`.
pub fn pursuit_matrix(n: usize) -> Result<RealMatrix> {
    check_agents(n)?;
    let mut m = RealMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] -= 1.0;
        m[(i, (i + 1) % n)] += 1.0;
    }
    Ok(m)
}

/// Dense `M ⊗ R(θ)`, size `2n x 2n`.
pub fn system_matrix(n: usize, theta: f64) -> Result<RealMatrix> {
    Ok(pursuit_matrix(n)?.kron(&RealMatrix::from_mat2(&rotation_matrix(theta))))
}

/// Asymptotic regime of the swarm, decided by `|θ|` against `π/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `|θ| < π/n`: all nonzero modes decay.
    Gather,
    /// `|θ| = π/n`: one conjugate pair sits on the imaginary axis.
    CriticalCircle,
    /// `|θ| > π/n`: at least one conjugate pair grows.
    Unstable,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Gather => "gather",
            Regime::CriticalCircle => "critical_circle",
            Regime::Unstable => "unstable",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_regime(n: usize, theta: f64) -> Result<Regime> {
    check_agents(n)?;
    if !theta.is_finite() {
        return Err(PursuitError::NonFinite("deviation angle"));
    }
    let a = normalize_angle(theta).abs();
    let c = critical_angle(n);
    Ok(if (a - c).abs() <= REGIME_TOLERANCE {
        Regime::CriticalCircle
    } else if a < c {
        Regime::Gather
    } else {
        Regime::Unstable
    })
}

fn fourier_entry(n: usize, k: usize, l: usize) -> C64 {
    // reduce k*l first so v_{n-k} is the conjugate of v_k to rounding
    let m = (k * l) % n;
    Complex::from_polar(1.0 / libm::sqrt(n as f64), -2.0 * PI * m as f64 / n as f64)
}

/// Eigenstructure of the circulant pursuit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpectrum {
    n: usize,
    lambdas: Vec<C64>,
    fourier_vectors: Vec<Vec<C64>>,
}

impl CirculantSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn lambda(&self, k: usize) -> C64 {
        self.lambdas[k]
    }

    pub fn fourier_vectors(&self) -> &[Vec<C64>] {
        &self.fourier_vectors
    }

    pub fn fourier_vector(&self, k: usize) -> &[C64] {
        &self.fourier_vectors[k]
    }

    /// `λ_k` as `(2 sin(πk/n), -(π/2 + πk/n))`.
    pub fn lambda_polar(&self, k: usize) -> (f64, f64) {
        let x = PI * k as f64 / self.n as f64;
        (2.0 * libm::sin(x), -(PI / 2.0 + x))
    }
}

pub fn circulant_spectrum(n: usize) -> Result<CirculantSpectrum> {
    check_agents(n)?;
    let lambdas = (0..n)
        .map(|k| {
            let m = k % n;
            Complex::from_polar(1.0, -2.0 * PI * m as f64 / n as f64) - 1.0
        })
        .collect();
    let fourier_vectors = (0..n)
        .map(|k| (0..n).map(|l| fourier_entry(n, k, l)).collect())
        .collect();
    Ok(CirculantSpectrum {
        n,
        lambdas,
        fourier_vectors,
    })
}

/// Which eigenvector of `R(θ)` a pair is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One eigenpair `(μ_k^±, ζ_k^±)` of `M̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub k: usize,
    pub sign: Sign,
    pub mu: C64,
    /// `v_k ⊗ (1, ±j)`, norm `√2`.
    pub zeta: Vec<C64>,
}

impl EigenPair {
    pub fn is_zero(&self) -> bool {
        self.k == 0
    }
}

/// All `2n` eigenpairs of `M̂` for a given `(n, θ)`, ordered by `(k, sign)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PursuitSpectrum {
    n: usize,
    theta: f64,
    regime: Regime,
    circulant: CirculantSpectrum,
    pairs: Vec<EigenPair>,
}

pub fn mhat_spectrum(n: usize, theta: f64) -> Result<PursuitSpectrum> {
    let regime = classify_regime(n, theta)?;
    let circulant = circulant_spectrum(n)?;
    let mut pairs = Vec::with_capacity(2 * n);
    for k in 0..n {
        let v = circulant.fourier_vector(k);
        let lambda = circulant.lambda(k);
        for sign in [Sign::Plus, Sign::Minus] {
            let s = sign.value();
            let mu = lambda * Complex::from_polar(1.0, s * theta);
            let r = [Complex::new(1.0, 0.0), Complex::new(0.0, s)];
            let zeta = v.iter().flat_map(|&vl| [vl * r[0], vl * r[1]]).collect();
            pairs.push(EigenPair { k, sign, mu, zeta });
        }
    }
    Ok(PursuitSpectrum {
        n,
        theta,
        regime,
        circulant,
        pairs,
    })
}

impl PursuitSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn circulant(&self) -> &CirculantSpectrum {
        &self.circulant
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn pair(&self, k: usize, sign: Sign) -> &EigenPair {
        let idx = 2 * k + if sign == Sign::Plus { 0 } else { 1 };
        &self.pairs[idx]
    }

    /// `μ_k^±` in polar form `(2 sin(πk/n), -(π/2 + πk/n ∓ θ))`.
    pub fn mu_polar(&self, k: usize, sign: Sign) -> (f64, f64) {
        let (mag, phase) = self.circulant.lambda_polar(k);
        (mag, phase + sign.value() * self.theta)
    }

    /// Labels `(k, sign)` of the conjugate pair that reaches the imaginary
    /// axis at `|θ| = π/n`: `(1,+), (n-1,-)` for positive deviation,
    /// `(1,-), (n-1,+)` for negative.
    pub fn critical_labels(&self) -> [(usize, Sign); 2] {
        if normalize_angle(self.theta) >= 0.0 {
            [(1, Sign::Plus), (self.n - 1, Sign::Minus)]
        } else {
            [(1, Sign::Minus), (self.n - 1, Sign::Plus)]
        }
    }

    pub fn is_critical_pair(&self, pair: &EigenPair) -> bool {
        self.critical_labels()
            .iter()
            .any(|&(k, s)| pair.k == k && pair.sign == s)
    }

    /// Largest real part over the nonzero eigenvalues.
    pub fn max_nonzero_real_part(&self) -> f64 {
        self.pairs
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| p.mu.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != 2 * self.n {
            Err(PursuitError::DimensionMismatch {
                expected: 2 * self.n,
                got: len,
            })
        } else {
            Ok(())
        }
    }

    /// Modal coefficients `ζ* x` for every pair.
    pub fn modal_coefficients(&self, x: &[f64]) -> Result<Vec<C64>> {
        self.check_len(x.len())?;
        Ok(self.pairs.iter().map(|p| cdot_real(&p.zeta, x)).collect())
    }

    /// `½ Σ w_p ζ_p c_p` with the imaginary-residue guard.
    pub fn synthesize(
        &self,
        context: &'static str,
        mut term: impl FnMut(usize, &EigenPair) -> C64,
    ) -> Result<Vec<f64>> {
        let mut acc = alloc::vec![Complex::new(0.0, 0.0); 2 * self.n];
        for (idx, p) in self.pairs.iter().enumerate() {
            let w = term(idx, p);
            if w == Complex::new(0.0, 0.0) {
                continue;
            }
            let w = w * 0.5;
            for (a, z) in acc.iter_mut().zip(&p.zeta) {
                *a += z * w;
            }
        }
        real_part_checked(context, &acc)
    }

    /// `e^{M̂t} x` as the spectral sum `½ Σ ζ e^{μt} ζ* x`.
    pub fn propagator_apply(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        check_time(t)?;
        let c = self.modal_coefficients(x)?;
        self.synthesize("propagator", |i, p| (p.mu * t).exp() * c[i])
    }

    /// `∫₀ᵗ e^{M̂(t-τ)} (B ⊗ I) U_c dτ`, integrated per eigenpair in closed
    /// form: `t` for `μ = 0`, `(e^{μt} - 1)/μ` otherwise.
    pub fn forced_response(&self, t: f64, leaders: &LeaderSet, u_c: Vec2) -> Result<Vec<f64>> {
        check_time(t)?;
        if leaders.len() != self.n {
            return Err(PursuitError::DimensionMismatch {
                expected: self.n,
                got: leaders.len(),
            });
        }
        let d = self.modal_coefficients(&leaders.broadcast(u_c))?;
        self.synthesize("forced response", |i, p| phi1(p.mu, t) * d[i])
    }

    /// Precomputes the modal coefficients of one piecewise-constant interval
    /// so the exact solution can be sampled cheaply at many times.
    pub fn interval_solution(
        &self,
        x0: &[f64],
        leaders: &LeaderSet,
        u_c: Vec2,
    ) -> Result<ModalSolution<'_>> {
        if leaders.len() != self.n {
            return Err(PursuitError::DimensionMismatch {
                expected: self.n,
                got: leaders.len(),
            });
        }
        Ok(ModalSolution {
            spectrum: self,
            state: self.modal_coefficients(x0)?,
            input: self.modal_coefficients(&leaders.broadcast(u_c))?,
        })
    }
}

/// Exact solution of one LTI interval in modal coordinates.
#[derive(Debug, Clone)]
pub struct ModalSolution<'a> {
    spectrum: &'a PursuitSpectrum,
    state: Vec<C64>,
    input: Vec<C64>,
}

impl ModalSolution<'_> {
    /// `P(t) = e^{M̂t} P(0) + ∫₀ᵗ e^{M̂(t-τ)} B̂ U_c dτ`, `t` relative to the
    /// interval start.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        self.spectrum.synthesize("interval solution", |i, p| {
            (p.mu * t).exp() * self.state[i] + phi1(p.mu, t) * self.input[i]
        })
    }
}

/// `(e^{μt} - 1)/μ`, continuous at `μ = 0` where it equals `t`.
pub fn phi1(mu: C64, t: f64) -> C64 {
    let z = mu * t;
    if mu == Complex::new(0.0, 0.0) {
        Complex::new(t, 0.0)
    } else if z.norm() < 1e-4 {
        // series keeps relative accuracy where exp(z) - 1 cancels
        Complex::new(t, 0.0) * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    } else {
        (z.exp() - 1.0) / mu
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(PursuitError::InvalidTime(t))
    }
}

pub(crate) fn real_part_checked(context: &'static str, v: &[C64]) -> Result<Vec<f64>> {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let residue = v.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let tolerance = IMAG_TOLERANCE * max_abs(&re).max(1.0);
    // non-finite results are left to the caller's overflow handling
    if residue > tolerance {
        return Err(PursuitError::ImaginaryResidue {
            context,
            residue,
            tolerance,
        });
    }
    Ok(re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mat2_det, mat2_mul_vec};

    #[test]
    fn rotation_identity_and_quarter_turn() {
        assert_eq!(rotation_matrix(0.0), [[1.0, 0.0], [-0.0, 1.0]]);
        let q = rotation_matrix(PI / 2.0);
        assert!((q[0][0]).abs() < 1e-16 && (q[1][1]).abs() < 1e-16);
        assert_eq!(q[0][1], 1.0);
        assert_eq!(q[1][0], -1.0);
        assert!((mat2_det(&rotation_matrix(0.7)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotated_broadcast_slope() {
        let d = mat2_mul_vec(&rotation_matrix(-20f64.to_radians()), [2.0, 3.0]);
        assert!((d[1] / d[0] - 4.1053).abs() < 1e-4);
    }

    #[test]
    fn pursuit_matrix_shapes() {
        let m2 = pursuit_matrix(2).unwrap();
        assert_eq!(m2.as_slice(), &[-1.0, 1.0, 1.0, -1.0]);
        let m3 = pursuit_matrix(3).unwrap();
        assert_eq!(m3.row(1), &[0.0, -1.0, 1.0]);
        for n in 2..9 {
            let m = pursuit_matrix(n).unwrap();
            let ones = alloc::vec![1.0; n];
            assert!(m.mul_vec(&ones).iter().all(|&x| x == 0.0));
            assert!(m.transpose().mul_vec(&ones).iter().all(|&x| x == 0.0));
        }
        assert_eq!(pursuit_matrix(1), Err(PursuitError::TooFewAgents(1)));
    }

    #[test]
    fn circulant_small_cases() {
        let s2 = circulant_spectrum(2).unwrap();
        assert_eq!(s2.lambda(0), Complex::new(0.0, 0.0));
        assert!((s2.lambda(1) - Complex::new(-2.0, 0.0)).norm() < 1e-15);
        let s4 = circulant_spectrum(4).unwrap();
        assert!((s4.lambda(1) - Complex::new(-1.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn lambda_polar_matches_cartesian() {
        let s = circulant_spectrum(7).unwrap();
        for k in 0..7 {
            let (m, ph) = s.lambda_polar(k);
            assert!((Complex::from_polar(m, ph) - s.lambda(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn regimes_for_five_agents() {
        let deg = |d: f64| d.to_radians();
        assert_eq!(classify_regime(5, deg(20.0)).unwrap(), Regime::Gather);
        assert_eq!(
            classify_regime(5, deg(36.0)).unwrap(),
            Regime::CriticalCircle
        );
        assert_eq!(
            classify_regime(5, -critical_angle(5)).unwrap(),
            Regime::CriticalCircle
        );
        assert_eq!(classify_regime(5, deg(72.0)).unwrap(), Regime::Unstable);
        assert_eq!(
            classify_regime(5, deg(36.0) + 1e-9).unwrap(),
            Regime::Unstable
        );
        assert_eq!(
            classify_regime(5, deg(36.0) - 1e-9).unwrap(),
            Regime::Gather
        );
    }

    #[test]
    fn unstable_has_growing_mode() {
        let s = mhat_spectrum(5, 72f64.to_radians()).unwrap();
        assert!(s.max_nonzero_real_part() > 0.0);
    }

    #[test]
    fn zero_modes_are_exact() {
        let s = mhat_spectrum(6, 0.4).unwrap();
        assert_eq!(s.pair(0, Sign::Plus).mu, Complex::new(0.0, 0.0));
        assert_eq!(s.pair(0, Sign::Minus).mu, Complex::new(0.0, 0.0));
    }

    #[test]
    fn critical_pair_sits_on_imaginary_axis() {
        let n = 5;
        let w = 2.0 * libm::sin(PI / n as f64);
        let s = mhat_spectrum(n, critical_angle(n)).unwrap();
        let a = s.pair(1, Sign::Plus).mu;
        let b = s.pair(n - 1, Sign::Minus).mu;
        assert!(a.re.abs() < 1e-12 && (a.im + w).abs() < 1e-12);
        assert!(b.re.abs() < 1e-12 && (b.im - w).abs() < 1e-12);
        let s = mhat_spectrum(n, -critical_angle(n)).unwrap();
        let a = s.pair(1, Sign::Minus).mu;
        assert!(a.re.abs() < 1e-12 && (a.im + w).abs() < 1e-12);
    }

    #[test]
    fn propagator_identity_at_zero_and_fixed_point() {
        let s = mhat_spectrum(4, 0.3).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0, -1.5, 0.25, 2.0, 2.0];
        let y = s.propagator_apply(0.0, &x).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = [1.5, -0.5, 1.5, -0.5, 1.5, -0.5, 1.5, -0.5];
        for t in [0.5, 3.0, 20.0] {
            let y = s.propagator_apply(t, &c).unwrap();
            for (a, b) in c.iter().zip(&y) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forced_response_trivial_cases() {
        let s = mhat_spectrum(5, 0.35).unwrap();
        let b = LeaderSet::from_indicator(&[0, 1, 0, 0, 1]).unwrap();
        assert!(s
            .forced_response(0.0, &b, [2.0, 3.0])
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-15));
        assert!(s
            .forced_response(4.0, &b, [0.0, 0.0])
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        assert!(matches!(
            s.forced_response(-1.0, &b, [1.0, 0.0]),
            Err(PursuitError::InvalidTime(_))
        ));
    }

    #[test]
    fn phi1_is_continuous_near_zero() {
        let t = 2.0;
        let mu = Complex::new(-1e-6, 2e-6);
        let series = phi1(mu, t);
        let direct = ((mu * t).exp() - 1.0) / mu;
        assert!((series - direct).norm() < 1e-9);
        assert_eq!(phi1(Complex::new(0.0, 0.0), t), Complex::new(t, 0.0));
    }

    #[test]
    fn normalize_wraps_into_half_open_range() {
        assert_eq!(normalize_angle(0.3), 0.3);
        assert!((normalize_angle(2.0 * PI + 0.3) - 0.3).abs() < 1e-15);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-15);
    }
}
