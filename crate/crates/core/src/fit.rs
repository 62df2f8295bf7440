//! Measurement helpers used to compare simulated trajectories with
//! predictions: circle fits, drifting-circle fits, line slopes and tail
//! velocities.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{PursuitError, Result};
use crate::linalg::{solve, Vec2};

/// Algebraic (Kåsa) least-squares circle through planar points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

pub fn fit_circle(points: &[Vec2]) -> Result<Circle> {
    if points.len() < 3 {
        return Err(PursuitError::Fit("circle fit needs at least three points"));
    }
    // shift to the mean for conditioning
    let m = mean(points);
    let mut a = [0.0; 9];
    let mut rhs = [0.0; 3];
    for p in points {
        let x = p[0] - m[0];
        let y = p[1] - m[1];
        let row = [x, y, 1.0];
        let z = x * x + y * y;
        for i in 0..3 {
            for j in 0..3 {
                a[3 * i + j] += row[i] * row[j];
            }
            rhs[i] += row[i] * z;
        }
    }
    let s = solve(a.to_vec(), rhs.to_vec()).ok_or(PursuitError::Fit("collinear points"))?;
    let cx = s[0] / 2.0;
    let cy = s[1] / 2.0;
    let radius = libm::sqrt(s[2] + cx * cx + cy * cy);
    Ok(Circle {
        center: [cx + m[0], cy + m[1]],
        radius,
    })
}

fn mean(points: &[Vec2]) -> Vec2 {
    let n = points.len() as f64;
    let s = points
        .iter()
        .fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
    [s[0] / n, s[1] / n]
}

/// Least-squares slope of `y = a + b x`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(PursuitError::Fit("slope needs two or more paired samples"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(PursuitError::Fit("all abscissae equal"));
    }
    Ok(sxy / sxx)
}

/// Slope of the total-least-squares line through planar points.
pub fn tls_slope(points: &[Vec2]) -> Result<f64> {
    if points.len() < 2 {
        return Err(PursuitError::Fit("line fit needs at least two points"));
    }
    let m = mean(points);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let x = p[0] - m[0];
        let y = p[1] - m[1];
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    if sxx == 0.0 && syy == 0.0 {
        return Err(PursuitError::Fit("all points coincide"));
    }
    let angle = 0.5 * libm::atan2(2.0 * sxy, sxx - syy);
    Ok(libm::tan(angle))
}

/// Adds multiples of `2π` so consecutive angles differ by less than `π`.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    for (i, &a) in angles.iter().enumerate() {
        if i > 0 {
            let d = a + offset - out[i - 1];
            if d > PI {
                offset -= 2.0 * PI * libm::round(d / (2.0 * PI));
            } else if d < -PI {
                offset += 2.0 * PI * libm::round(-d / (2.0 * PI));
            }
        }
        out.push(a + offset);
    }
    out
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_positive(a: f64) -> f64 {
    let w = a - 2.0 * PI * libm::floor(a / (2.0 * PI));
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Circle whose centre moves at constant velocity:
/// `p(t) = c + v (t - t_ref) + A cos(ω t') + B sin(ω t')`, `t' = t - t_ref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftingCircle {
    pub t_ref: f64,
    pub center: Vec2,
    pub velocity: Vec2,
    pub omega: f64,
    pub cos_coef: Vec2,
    pub sin_coef: Vec2,
    /// Root-mean-square residual of the fit.
    pub rms: f64,
}

impl DriftingCircle {
    pub fn center_at(&self, t: f64) -> Vec2 {
        let dt = t - self.t_ref;
        [
            self.center[0] + self.velocity[0] * dt,
            self.center[1] + self.velocity[1] * dt,
        ]
    }

    /// Mean radius of the (generally elliptic) fitted oscillation.
    pub fn radius(&self) -> f64 {
        let a = self.cos_coef;
        let b = self.sin_coef;
        libm::sqrt(0.5 * (a[0] * a[0] + a[1] * a[1] + b[0] * b[0] + b[1] * b[1]))
    }
}

fn drifting_fit_at(ts: &[f64], points: &[Vec2], t_ref: f64, omega: f64) -> Option<DriftingCircle> {
    let mut a = [0.0; 16];
    let mut rx = [0.0; 4];
    let mut ry = [0.0; 4];
    let basis = |t: f64| {
        let s = t - t_ref;
        let (sn, cs) = libm::sincos(omega * s);
        [1.0, s, cs, sn]
    };
    for (&t, p) in ts.iter().zip(points) {
        let row = basis(t);
        for i in 0..4 {
            for j in 0..4 {
                a[4 * i + j] += row[i] * row[j];
            }
            rx[i] += row[i] * p[0];
            ry[i] += row[i] * p[1];
        }
    }
    let cx = solve(a.to_vec(), rx.to_vec())?;
    let cy = solve(a.to_vec(), ry.to_vec())?;
    let mut ss = 0.0;
    for (&t, p) in ts.iter().zip(points) {
        let row = basis(t);
        let fx: f64 = row.iter().zip(&cx).map(|(r, c)| r * c).sum();
        let fy: f64 = row.iter().zip(&cy).map(|(r, c)| r * c).sum();
        ss += (fx - p[0]) * (fx - p[0]) + (fy - p[1]) * (fy - p[1]);
    }
    Some(DriftingCircle {
        t_ref,
        center: [cx[0], cy[0]],
        velocity: [cx[1], cy[1]],
        omega,
        cos_coef: [cx[2], cy[2]],
        sin_coef: [cx[3], cy[3]],
        rms: libm::sqrt(ss / ts.len() as f64),
    })
}

/// Fits a drifting circle to a sampled track. The angular rate is found by a
/// golden-section search around an estimate from the rotation of the
/// finite-difference velocity.
pub fn fit_drifting_circle(ts: &[f64], points: &[Vec2]) -> Result<DriftingCircle> {
    if ts.len() != points.len() || ts.len() < 8 {
        return Err(PursuitError::Fit(
            "drifting circle fit needs eight or more samples",
        ));
    }
    let t_ref = 0.5 * (ts[0] + ts[ts.len() - 1]);
    let omega0 = rotation_rate_estimate(ts, points)?;
    let cost = |w: f64| drifting_fit_at(ts, points, t_ref, w).map_or(f64::INFINITY, |f| f.rms);
    let omega = golden_section(cost, 0.8 * omega0, 1.2 * omega0, 1e-12);
    drifting_fit_at(ts, points, t_ref, omega)
        .ok_or(PursuitError::Fit("singular drifting-circle fit"))
}

/// Magnitude of the average turning rate of the velocity after its mean is
/// removed.
fn rotation_rate_estimate(ts: &[f64], points: &[Vec2]) -> Result<f64> {
    let v: Vec<Vec2> = ts
        .windows(2)
        .zip(points.windows(2))
        .map(|(t, p)| {
            let h = t[1] - t[0];
            [(p[1][0] - p[0][0]) / h, (p[1][1] - p[0][1]) / h]
        })
        .collect();
    let mv = mean(&v);
    let angles: Vec<f64> = v
        .iter()
        .map(|q| libm::atan2(q[1] - mv[1], q[0] - mv[0]))
        .collect();
    let un = unwrap_angles(&angles);
    let mid: Vec<f64> = ts.windows(2).map(|t| 0.5 * (t[0] + t[1])).collect();
    let w = linear_slope(&mid, &un)?.abs();
    if !(w.is_finite() && w > 0.0) {
        return Err(PursuitError::Fit("track does not rotate"));
    }
    Ok(w)
}

/// Minimiser of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Mean finite-difference velocity over the final `fraction` of a uniformly
/// sampled track. The mean of the differences telescopes to the end-point
/// secant.
pub fn tail_velocity(ts: &[f64], points: &[Vec2], fraction: f64) -> Result<Vec2> {
    if ts.len() != points.len() || ts.len() < 2 {
        return Err(PursuitError::Fit("tail velocity needs two or more samples"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(PursuitError::Fit("tail fraction must lie in (0, 1]"));
    }
    let last = ts.len() - 1;
    let span = libm::round(last as f64 * fraction).max(1.0) as usize;
    let first = last - span;
    let h = ts[last] - ts[first];
    Ok([
        (points[last][0] - points[first][0]) / h,
        (points[last][1] - points[first][1]) / h,
    ])
}
