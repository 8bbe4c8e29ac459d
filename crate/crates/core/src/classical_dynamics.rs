//! A classical charged particle in the field of a magnetic monopole.
//!
//! The equation of motion is the Lorentz force of the monopole field
//! `B = q r / r^3`, `m r'' = (mu / r^3) r' x r` with `mu = e q`. The force is
//! perpendicular to both `r` and the velocity, so the speed is constant and
//! `|r|^2 = b^2 + v^2 t^2` about the point of closest approach. The total
//! angular momentum `J = m r x v - mu r_hat` is conserved and `r_hat` moves on
//! a cone about `J` with `r_hat . J_hat = -mu / |J|`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::unwrap_phase;
use crate::tolerances::ORIGIN_APPROACH;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("trajectory came within {distance:.2e} of the monopole at t = {t}")]
    OriginApproach { t: f64, distance: f64 },
    #[error("azimuth {phi} is beyond the asymptote at {limit}")]
    OutOfRange { phi: f64, limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargedParticleState {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub m: f64,
    pub mu: f64,
}

impl ChargedParticleState {
    pub fn new(r: Vector3<f64>, v: Vector3<f64>, m: f64, mu: f64) -> Result<Self, DynamicsError> {
        if !(m > 0.0) {
            return Err(DynamicsError::BadArgument(format!("mass must be positive, got {m}")));
        }
        if !(r.norm() > 0.0) {
            return Err(DynamicsError::BadArgument("initial position must be nonzero".into()));
        }
        if !r.iter().chain(v.iter()).all(|x| x.is_finite()) || !mu.is_finite() {
            return Err(DynamicsError::BadArgument("state must be finite".into()));
        }
        Ok(Self { r, v, m, mu })
    }

    /// The state at closest approach: `r = (b, 0, 0)`, `v = (0, v, 0)`.
    pub fn perihelion(b: f64, v: f64, m: f64, mu: f64) -> Result<Self, DynamicsError> {
        if !(b > 0.0) {
            return Err(DynamicsError::BadArgument(format!("impact parameter must be positive, got {b}")));
        }
        Self::new(Vector3::new(b, 0.0, 0.0), Vector3::new(0.0, v, 0.0), m, mu)
    }

    pub fn acceleration(&self) -> Vector3<f64> {
        accel(&self.r, &self.v, self.m, self.mu)
    }

    /// Time since closest approach, `(r . v) / v^2`. Zero for a particle at
    /// rest.
    pub fn time_since_perihelion(&self) -> f64 {
        let v2 = self.v.norm_squared();
        if v2 > 0.0 {
            self.r.dot(&self.v) / v2
        } else {
            0.0
        }
    }

    /// Distance of closest approach, `|r x v| / |v|`.
    pub fn impact_parameter(&self) -> f64 {
        let v = self.v.norm();
        if v > 0.0 {
            self.r.cross(&self.v).norm() / v
        } else {
            self.r.norm()
        }
    }
}

fn accel(r: &Vector3<f64>, v: &Vector3<f64>, m: f64, mu: f64) -> Vector3<f64> {
    let rn = r.norm();
    v.cross(r) * (mu / (m * rn * rn * rn))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedSet {
    /// Total angular momentum `J = L_g - mu r_hat`.
    pub j: Vector3<f64>,
    /// Gauge-invariant (mechanical) angular momentum `m r x v`.
    pub lg: Vector3<f64>,
    pub energy: f64,
    /// `cos theta_0 = mu / |J|`.
    pub cos_cone: f64,
    pub cone_angle: f64,
}

pub fn conserved_quantities(s: &ChargedParticleState) -> ConservedSet {
    let lg = s.r.cross(&s.v) * s.m;
    let j = lg - s.r.normalize() * s.mu;
    let jn = j.norm();
    let cos_cone = if jn > 0.0 { (s.mu / jn).clamp(-1.0, 1.0) } else { 1.0 };
    ConservedSet {
        j,
        lg,
        energy: 0.5 * s.m * s.v.norm_squared(),
        cos_cone,
        cone_angle: cos_cone.acos(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ChargedParticleState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &ChargedParticleState {
        self.states.last().expect("a trajectory holds at least its initial state")
    }
}

/// Default step `1e-3 b / v`.
pub fn default_dt(b: f64, v: f64) -> f64 {
    1e-3 * b / v
}

/// Fixed-step RK4 from `t_span.0` to `t_span.1`. The step is shrunk so that
/// a whole number of steps spans the interval; `t1 < t0` integrates backwards.
pub fn integrate_orbit(
    s0: &ChargedParticleState,
    t_span: (f64, f64),
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DynamicsError::BadArgument(format!("time step must be positive, got {dt}")));
    }
    let (t0, t1) = t_span;
    let span = t1 - t0;
    let steps = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let (m, mu) = (s0.m, s0.mu);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let (mut r, mut v) = (s0.r, s0.v);
    times.push(t0);
    states.push(*s0);
    for k in 1..=steps {
        let k1r = v;
        let k1v = accel(&r, &v, m, mu);
        let r2 = r + k1r * (0.5 * h);
        let v2 = v + k1v * (0.5 * h);
        let k2r = v2;
        let k2v = accel(&r2, &v2, m, mu);
        let r3 = r + k2r * (0.5 * h);
        let v3 = v + k2v * (0.5 * h);
        let k3r = v3;
        let k3v = accel(&r3, &v3, m, mu);
        let r4 = r + k3r * h;
        let v4 = v + k3v * h;
        let k4r = v4;
        let k4v = accel(&r4, &v4, m, mu);
        r += (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);

        let t = t0 + h * k as f64;
        let distance = r.norm();
        if !(distance >= ORIGIN_APPROACH) {
            return Err(DynamicsError::OriginApproach { t, distance });
        }
        times.push(t);
        states.push(ChargedParticleState { r, v, m, mu });
    }
    Ok(Trajectory { times, states })
}

/// `r(phi) = b / cos((L_g / J) phi)` with `L_g = m v b`, `J = sqrt(L_g^2 + mu^2)`.
pub fn analytic_orbit(b: f64, v: f64, mu: f64, m: f64, phi: f64) -> Result<f64, DynamicsError> {
    let lg = m * v * b;
    let j = lg.hypot(mu);
    let ratio = lg / j;
    let limit = std::f64::consts::FRAC_PI_2 / ratio;
    if !(phi.abs() < limit) {
        return Err(DynamicsError::OutOfRange { phi, limit });
    }
    Ok(b / (ratio * phi).cos())
}

/// Azimuth of `r_hat` about the cone axis `J_hat`, measured from the first
/// state and unwrapped along the trajectory.
pub fn cone_azimuth(states: &[ChargedParticleState]) -> Vec<f64> {
    let Some(first) = states.first() else {
        return Vec::new();
    };
    let axis = conserved_quantities(first).j.normalize();
    let e1 = {
        let p = first.r - axis * first.r.dot(&axis);
        p.normalize()
    };
    let e2 = axis.cross(&e1);
    let raw: Vec<f64> = states.iter().map(|s| s.r.dot(&e2).atan2(s.r.dot(&e1))).collect();
    // consecutive samples are far closer than pi apart for any sane step
    unwrap_phase(&raw).unwrap_or(raw)
}

/// Whether `2 mu` is an integer, the Dirac quantization condition.
pub fn dirac_quantized(mu: f64) -> bool {
    let twice = 2.0 * mu;
    (twice - twice.round()).abs() <= 1e-12 * twice.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_particle_moves_straight() {
        let s0 = ChargedParticleState::new(Vector3::new(1.0, 2.0, -0.5), Vector3::new(0.3, -0.1, 0.2), 1.5, 0.0).unwrap();
        let traj = integrate_orbit(&s0, (0.0, 4.0), 1e-2).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.r - (s0.r + s0.v * *t)).norm() < 1e-10);
        }
    }

    #[test]
    fn radius_follows_hyperbola() {
        let (b, v) = (1.0, 0.8);
        let s0 = ChargedParticleState::perihelion(b, v, 1.0, 0.7).unwrap();
        let traj = integrate_orbit(&s0, (0.0, 6.0), default_dt(b, v)).unwrap();
        let worst = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, s)| (s.r.norm() - (v * v * t * t + b * b).sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        let e0 = conserved_quantities(&s0).energy;
        assert!(traj.states.iter().all(|s| (conserved_quantities(s).energy - e0).abs() < 1e-10));
    }

    #[test]
    fn free_cone_is_flat() {
        let s0 = ChargedParticleState::perihelion(1.0, 1.0, 1.0, 0.0).unwrap();
        let c = conserved_quantities(&s0);
        assert_eq!(c.j, c.lg);
        assert_eq!(c.cos_cone, 0.0);
    }

    #[test]
    fn analytic_orbit_examples() {
        assert_eq!(analytic_orbit(2.0, 1.0, 0.5, 1.0, 0.0).unwrap(), 2.0);
        assert_abs_diff_eq!(analytic_orbit(1.0, 1.0, 0.0, 1.0, 0.5).unwrap(), 1.0 / 0.5_f64.cos(), epsilon = 1e-15);
        assert!(matches!(analytic_orbit(1.0, 1.0, 0.0, 1.0, 1.6), Err(DynamicsError::OutOfRange { .. })));
    }

    #[test]
    fn head_on_is_refused() {
        let s0 = ChargedParticleState::new(Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 0.0, 0.0), 1.0, 0.5).unwrap();
        // a step that lands exactly on the origin
        assert!(matches!(
            integrate_orbit(&s0, (0.0, 1.0), 0.25),
            Err(DynamicsError::OriginApproach { .. })
        ));
    }

    #[test]
    fn quantization_predicate() {
        assert!(dirac_quantized(0.5));
        assert!(dirac_quantized(-1.0));
        assert!(!dirac_quantized(0.3));
    }

    #[test]
    fn bad_arguments() {
        assert!(ChargedParticleState::new(Vector3::x(), Vector3::y(), 0.0, 0.0).is_err());
        assert!(ChargedParticleState::new(Vector3::zeros(), Vector3::y(), 1.0, 0.0).is_err());
        let s0 = ChargedParticleState::perihelion(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(integrate_orbit(&s0, (0.0, 1.0), 0.0).is_err());
    }
}
