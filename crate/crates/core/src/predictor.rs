//! Closed-form asymptotic predictions: centroid, drift velocity, per-agent
//! deviations and, at the critical angle, the circular orbit.
//!
//! Deviations are computed two ways. The closed form uses
//! `γ = Σ_{k≥1} v_k v_k*/|λ_k|²` and the offsets `-γMᵀB ⊗ R(-θ)U_c`. The
//! direct form is the constant term of the forced response,
//! `-½ Σ_{μ≠0} (1/μ) ζζ* B̂U_c`. They agree in every non-unstable regime.
//! At the critical angle the imaginary-axis pair must stay in the sum: its
//! `-1/μ` term belongs to the orbit centre, and its `e^{μt}/μ` term to the
//! circle.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex;

use crate::control::{ControlInput, LeaderSet};
use crate::dynamics::SwarmState;
use crate::error::{PursuitError, Result};
use crate::linalg::{mat2_mul_vec, max_abs, Vec2, C64};
use crate::spectral::{
    circulant_spectrum, classify_regime, critical_angle, mhat_spectrum, normalize_angle,
    real_part_checked, rotation_matrix, PursuitSpectrum, Regime, IMAG_TOLERANCE,
};

/// Arithmetic mean of the agent positions.
pub fn centroid(state: &SwarmState) -> Vec2 {
    let n = state.n() as f64;
    let s = state
        .positions()
        .iter()
        .fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
    [s[0] / n, s[1] / n]
}

/// `(n_l/n) U_c`.
pub fn drift_velocity(leaders: &LeaderSet, u_c: Vec2) -> Vec2 {
    let f = leaders.count() as f64 / leaders.len() as f64;
    [f * u_c[0], f * u_c[1]]
}

/// `MᵀB`: entry `i` is `b_{i-1} - b_i`.
fn mt_b(leaders: &LeaderSet) -> Vec<f64> {
    let b = leaders.as_f64();
    let n = b.len();
    (0..n).map(|i| b[(i + n - 1) % n] - b[i]).collect()
}

/// `Σ_{k≥1} v_k v_k*/|λ_k|²` applied to a real vector, optionally leaving out
/// the `k = 1` term.
fn gamma_apply(n: usize, x: &[f64], drop_first: bool) -> Result<Vec<C64>> {
    let circ = circulant_spectrum(n)?;
    let mut out = vec![Complex::new(0.0, 0.0); n];
    let first = if drop_first { 2 } else { 1 };
    for k in first..n {
        let v = circ.fourier_vector(k);
        let w = crate::linalg::cdot_real(v, x) / circ.lambda(k).norm_sqr();
        for (o, vi) in out.iter_mut().zip(v) {
            *o += vi * w;
        }
    }
    Ok(out)
}

fn reject_unstable(n: usize, theta: f64) -> Result<Regime> {
    match classify_regime(n, theta)? {
        Regime::Unstable => Err(PursuitError::UnstableRegime {
            theta,
            critical: critical_angle(n),
        }),
        r => Ok(r),
    }
}

fn check_leaders(n: usize, leaders: &LeaderSet) -> Result<()> {
    if leaders.len() != n {
        return Err(PursuitError::DimensionMismatch {
            expected: n,
            got: leaders.len(),
        });
    }
    Ok(())
}

/// Deviation scalars `σ = -γMᵀB` (closed form). Offsets are
/// `σ_i R(-θ) U_c`.
pub fn deviation_sigma(n: usize, theta: f64, leaders: &LeaderSet) -> Result<Vec<f64>> {
    reject_unstable(n, theta)?;
    check_leaders(n, leaders)?;
    let g = gamma_apply(n, &mt_b(leaders), false)?;
    let neg: Vec<C64> = g.into_iter().map(|z| -z).collect();
    real_part_checked("deviation sigma", &neg)
}

/// Constant term of the forced response, `-½ Σ_{μ≠0} (1/μ) ζζ* B̂U_c`,
/// as stacked offsets.
pub fn direct_offsets(
    spectrum: &PursuitSpectrum,
    leaders: &LeaderSet,
    u_c: Vec2,
) -> Result<Vec<Vec2>> {
    if spectrum.regime() == Regime::Unstable {
        return Err(PursuitError::UnstableRegime {
            theta: spectrum.theta(),
            critical: critical_angle(spectrum.n()),
        });
    }
    check_leaders(spectrum.n(), leaders)?;
    let d = spectrum.modal_coefficients(&leaders.broadcast(u_c))?;
    let x = spectrum.synthesize("direct offsets", |i, p| {
        if p.is_zero() {
            Complex::new(0.0, 0.0)
        } else {
            -d[i] / p.mu
        }
    })?;
    Ok(x.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
}

/// Deviation scalars from the direct eigenpair route, by projecting the
/// offsets for `U_c = (1, 0)` onto `R(-θ)(1, 0)`. Also returns the largest
/// off-line component, which must vanish.
pub fn projected_sigma(spectrum: &PursuitSpectrum, leaders: &LeaderSet) -> Result<(Vec<f64>, f64)> {
    let offsets = direct_offsets(spectrum, leaders, [1.0, 0.0])?;
    let dir = mat2_mul_vec(&rotation_matrix(-spectrum.theta()), [1.0, 0.0]);
    let mut off_line = 0.0f64;
    let sigma = offsets
        .iter()
        .map(|o| {
            off_line = off_line.max((o[0] * dir[1] - o[1] * dir[0]).abs());
            o[0] * dir[0] + o[1] * dir[1]
        })
        .collect();
    Ok((sigma, off_line))
}

/// `σ_i R(-θ) U_c` for every agent.
pub fn deviation_offsets(sigma: &[f64], theta: f64, u_c: Vec2) -> Vec<Vec2> {
    let d = mat2_mul_vec(&rotation_matrix(-theta), u_c);
    sigma.iter().map(|&s| [s * d[0], s * d[1]]).collect()
}

/// How the literal critical-angle shortcuts compare with the full deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalDiagnostic {
    /// Largest imaginary part of `(γ - v_1 v_1*/|λ_1|²) MᵀB`.
    pub gamma_tilde_imag: f64,
    /// Largest gap between the real part of that product (negated) and σ.
    pub gamma_tilde_gap: f64,
    /// Largest gap between the sum with the imaginary-axis pair removed and
    /// the full offsets, for `U_c = (1, 0)`.
    pub stable_only_gap: f64,
    /// Largest imaginary residue of that truncated sum.
    pub stable_only_imag: f64,
}

pub fn critical_diagnostic(
    n: usize,
    theta: f64,
    leaders: &LeaderSet,
) -> Result<CriticalDiagnostic> {
    let sigma = deviation_sigma(n, theta, leaders)?;
    let tilde = gamma_apply(n, &mt_b(leaders), true)?;
    let gamma_tilde_imag = tilde.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let gamma_tilde_gap = tilde
        .iter()
        .zip(&sigma)
        .fold(0.0f64, |m, (z, s)| m.max((-z.re - s).abs()));

    let spectrum = mhat_spectrum(n, theta)?;
    let full = direct_offsets(&spectrum, leaders, [1.0, 0.0])?;
    let d = spectrum.modal_coefficients(&leaders.broadcast([1.0, 0.0]))?;
    let mut acc = vec![Complex::new(0.0, 0.0); 2 * n];
    for (i, p) in spectrum.pairs().iter().enumerate() {
        if p.is_zero() || spectrum.is_critical_pair(p) {
            continue;
        }
        let w = -d[i] / p.mu * 0.5;
        for (a, z) in acc.iter_mut().zip(&p.zeta) {
            *a += z * w;
        }
    }
    let stable_only_imag = acc.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let stable_only_gap = acc
        .iter()
        .zip(full.iter().flatten())
        .fold(0.0f64, |m, (z, f)| m.max((z.re - f).abs()));
    Ok(CriticalDiagnostic {
        gamma_tilde_imag,
        gamma_tilde_gap,
        stable_only_gap,
        stable_only_imag,
    })
}

/// Direction of travel around a critical-angle orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    /// `θ = -π/n`: `[r sin φ, r cos φ]`.
    Clockwise,
    /// `θ = +π/n`: `[r sin φ, -r cos φ]`.
    CounterClockwise,
}

impl Handedness {
    pub fn from_theta(theta: f64) -> Self {
        if normalize_angle(theta) >= 0.0 {
            Handedness::CounterClockwise
        } else {
            Handedness::Clockwise
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Handedness::Clockwise => "clockwise",
            Handedness::CounterClockwise => "counterclockwise",
        }
    }

    fn mirror(self, p: Vec2) -> Vec2 {
        match self {
            Handedness::Clockwise => p,
            Handedness::CounterClockwise => [p[0], -p[1]],
        }
    }

    /// Point at travel phase `phi` on a circle of radius `r` about the origin.
    pub fn point(self, r: f64, phi: f64) -> Vec2 {
        let (s, c) = libm::sincos(phi);
        self.mirror([r * s, r * c])
    }

    /// Travel phase of a point relative to the centre; inverse of
    /// [`Handedness::point`].
    pub fn phase(self, rel: Vec2) -> f64 {
        let q = self.mirror(rel);
        libm::atan2(q[0], q[1])
    }
}

/// Fourier sums `c_1, c_2` and per-agent `(a_k, b_k)` of the orbit
/// construction, for points already in the clockwise frame.
fn orbit_sums(points: &[Vec2]) -> ((f64, f64), Vec<(f64, f64)>) {
    let n = points.len();
    let nf = n as f64;
    let step = 2.0 * PI / nf;
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    for (l, p) in points.iter().enumerate() {
        // agents are 1-based in the sums
        let (s, c) = libm::sincos(step * (l + 1) as f64);
        c1 += c * p[0] - s * p[1];
        c2 += s * p[0] + c * p[1];
    }
    let ab = (0..n)
        .map(|k| {
            let mut a = 0.0;
            let mut b = 0.0;
            for (l, p) in points.iter().enumerate() {
                let m = (k + n - l) % n;
                let (s, c) = libm::sincos(step * m as f64);
                a += c * p[0] + s * p[1];
                b += -s * p[0] + c * p[1];
            }
            (a / nf, b / nf)
        })
        .collect();
    ((c1 / nf, c2 / nf), ab)
}

/// One family of equally spaced circular motions.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub r: f64,
    /// Per-agent radii `√(a_k² + b_k²)`; all equal to `r`.
    pub radii: Vec<f64>,
    /// Travel phases `α_k`; `None` when the orbit is degenerate.
    pub alphas: Option<Vec<f64>>,
}

impl Orbit {
    pub fn is_degenerate(&self) -> bool {
        self.alphas.is_none()
    }
}

fn orbit_from_points(points: &[Vec2], handedness: Handedness) -> Orbit {
    let mirrored: Vec<Vec2> = points.iter().map(|&p| handedness.mirror(p)).collect();
    let ((c1, c2), ab) = orbit_sums(&mirrored);
    let r = libm::hypot(c1, c2);
    let scale = points.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let radii = ab.iter().map(|&(a, b)| libm::hypot(a, b)).collect();
    let alphas = (r > 1e-12 * scale).then(|| ab.iter().map(|&(a, b)| libm::atan2(a, b)).collect());
    Orbit { r, radii, alphas }
}

/// Orbit of the zero-input critical-angle motion starting from `p0`.
pub fn orbit_params(p0: &SwarmState, theta: f64) -> Orbit {
    orbit_from_points(p0.positions(), Handedness::from_theta(theta))
}

/// Circular velocity component induced by the broadcast at the critical
/// angle: the same construction applied to `b_l U_c`.
pub fn velocity_orbit_params(theta: f64, leaders: &LeaderSet, u_c: Vec2) -> Orbit {
    let points: Vec<Vec2> = leaders
        .as_f64()
        .iter()
        .map(|&b| [b * u_c[0], b * u_c[1]])
        .collect();
    orbit_from_points(&points, Handedness::from_theta(theta))
}

/// Full critical-angle orbit description.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitParameters {
    /// `2 sin(π/n)`.
    pub omega: f64,
    pub handedness: Handedness,
    pub position: Orbit,
    pub velocity: Orbit,
    /// Radius of the circle each agent actually traces: the homogeneous
    /// orbit plus the integral of the velocity orbit.
    pub circle_radius: f64,
    /// Travel phases of that combined circle; `None` when it is a point.
    pub circle_phases: Option<Vec<f64>>,
}

impl OrbitParameters {
    pub fn new(p0: &SwarmState, theta: f64, leaders: &LeaderSet, u_c: Vec2) -> Self {
        let n = p0.n();
        let omega = 2.0 * libm::sin(PI / n as f64);
        let handedness = Handedness::from_theta(theta);
        let position = orbit_params(p0, theta);
        let velocity = velocity_orbit_params(theta, leaders, u_c);
        let phasors: Vec<C64> = (0..n)
            .map(|k| {
                let mut z = Complex::new(0.0, 0.0);
                if let Some(a) = &position.alphas {
                    z += Complex::from_polar(position.r, a[k]);
                }
                if let Some(a) = &velocity.alphas {
                    z += Complex::from_polar(velocity.r / omega, a[k] - PI / 2.0);
                }
                z
            })
            .collect();
        let circle_radius = phasors[0].norm();
        let scale = p0.max_abs_coordinate().max(max_abs(&u_c)).max(1.0);
        let circle_phases =
            (circle_radius > 1e-12 * scale).then(|| phasors.iter().map(|z| z.arg()).collect());
        Self {
            omega,
            handedness,
            position,
            velocity,
            circle_radius,
            circle_phases,
        }
    }

    /// Circle displacement of agent `k` at relative time `t`.
    pub fn displacement(&self, k: usize, t: f64) -> Vec2 {
        match &self.circle_phases {
            Some(a) => self
                .handedness
                .point(self.circle_radius, self.omega * t + a[k]),
            None => [0.0, 0.0],
        }
    }
}

/// Asymptotic description of one constant-control interval, in time relative
/// to the interval start.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPrediction {
    pub regime: Regime,
    pub n: usize,
    pub theta: f64,
    pub p_c: Vec2,
    pub drift: Vec2,
    pub sigma: Vec<f64>,
    pub offsets: Vec<Vec2>,
    pub orbit: Option<OrbitParameters>,
}

impl AsymptoticPrediction {
    /// Centre of agent `k`'s asymptotic motion at relative time `t`.
    pub fn center_at(&self, k: usize, t: f64) -> Vec2 {
        [
            self.p_c[0] + self.drift[0] * t + self.offsets[k][0],
            self.p_c[1] + self.drift[1] * t + self.offsets[k][1],
        ]
    }

    /// Predicted position of agent `k` at relative time `t`.
    pub fn position_at(&self, k: usize, t: f64) -> Vec2 {
        let c = self.center_at(k, t);
        let d = self
            .orbit
            .as_ref()
            .map_or([0.0, 0.0], |o| o.displacement(k, t));
        [c[0] + d[0], c[1] + d[1]]
    }

    pub fn positions_at(&self, t: f64) -> Vec<Vec2> {
        (0..self.n).map(|k| self.position_at(k, t)).collect()
    }
}

/// Assembles the asymptotic prediction for an interval starting at `p0`.
/// The unstable regime is refused.
pub fn predict(p0: &SwarmState, theta: f64, input: &ControlInput) -> Result<AsymptoticPrediction> {
    let n = p0.n();
    let regime = reject_unstable(n, theta)?;
    check_leaders(n, &input.leaders)?;
    let sigma = deviation_sigma(n, theta, &input.leaders)?;
    let offsets = deviation_offsets(&sigma, theta, input.u_c);
    let orbit = (regime == Regime::CriticalCircle)
        .then(|| OrbitParameters::new(p0, theta, &input.leaders, input.u_c));
    Ok(AsymptoticPrediction {
        regime,
        n,
        theta,
        p_c: centroid(p0),
        drift: drift_velocity(&input.leaders, input.u_c),
        sigma,
        offsets,
        orbit,
    })
}

/// Largest gap between two deviation vectors, the tolerance used by the
/// two-route self-test.
pub fn sigma_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Whether both σ routes agree within the residue tolerance.
pub fn sigma_routes_agree(n: usize, theta: f64, leaders: &LeaderSet) -> Result<bool> {
    let a = deviation_sigma(n, theta, leaders)?;
    let (b, off) = projected_sigma(&mhat_spectrum(n, theta)?, leaders)?;
    Ok(sigma_gap(&a, &b) < IMAG_TOLERANCE && off < IMAG_TOLERANCE)
}
