//! Qubit coupled to a resonator mode.
//!
//! The quantum model is represented by its closed-form quasienergies. The
//! semiclassical model replaces the field by a coherent amplitude `alpha`,
//! which turns it into a rotating-wave qubit with coupling `kappa = alpha lambda`.
//!
//! Labels follow the quantum model: `+` is the lower quasienergy
//! `(n + 1/2) w_r - Omega_n / 2`. In the semiclassical Floquet spectrum this
//! is the lower rotating-wave band.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::floquet::{DriveGeometry, PeriodicHamiltonian};
use crate::models::rwa::{rwa_qubit, RwaQubitParams};
use crate::models::ModelError;
use crate::numerics::c64;
use crate::two_level::BandIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitResonatorParams {
    pub omega_q: f64,
    pub omega_r: f64,
    pub lambda: f64,
    pub n: u32,
    pub alpha: f64,
}

impl QubitResonatorParams {
    /// `Omega_n = sqrt((n + 1) lambda^2 + (w_q - w_r)^2)`.
    pub fn rabi_n(&self) -> f64 {
        ((self.n as f64 + 1.0) * self.lambda * self.lambda + (self.omega_q - self.omega_r).powi(2)).sqrt()
    }

    /// `cos theta_n = (w_r - w_q) / Omega_n`.
    pub fn cos_theta_n(&self) -> f64 {
        let r = self.rabi_n();
        if r > 0.0 {
            (self.omega_r - self.omega_q) / r
        } else {
            1.0
        }
    }

    /// `beta_{+-,n} = sqrt((Omega_n +- w_q -+ w_r) / (2 Omega_n))`.
    pub fn beta(&self, band: BandIndex) -> f64 {
        let r = self.rabi_n();
        (0.5 * (r + band.sign() * (self.omega_q - self.omega_r)) / r).sqrt()
    }

    /// Quasienergy of the quantum model, `(n + 1/2) w_r -+ Omega_n / 2`.
    pub fn quasienergy(&self, band: BandIndex) -> f64 {
        (self.n as f64 + 0.5) * self.omega_r - band.sign() * 0.5 * self.rabi_n()
    }

    /// `gamma_{+-,n} = +- pi cos theta_n - 2 pi (n + 1/2)`.
    pub fn geometric_phase(&self, band: BandIndex) -> f64 {
        band.sign() * PI * self.cos_theta_n() - 2.0 * PI * (self.n as f64 + 0.5)
    }

    pub fn kappa(&self) -> f64 {
        self.alpha * self.lambda
    }

    /// `Omega = sqrt(kappa^2 + (w_q - w_r)^2)`.
    pub fn rabi_semiclassical(&self) -> f64 {
        self.kappa().hypot(self.omega_q - self.omega_r)
    }

    pub fn cos_theta_semiclassical(&self) -> f64 {
        let r = self.rabi_semiclassical();
        if r > 0.0 {
            (self.omega_r - self.omega_q) / r
        } else {
            1.0
        }
    }

    /// `gamma = -pi (1 -+ cos theta)`.
    pub fn semiclassical_phase(&self, band: BandIndex) -> f64 {
        -PI * (1.0 - band.sign() * self.cos_theta_semiclassical())
    }

    /// Adiabatic limit of [`Self::semiclassical_phase`]: `cos theta` tends to
    /// `-w_q / sqrt(kappa^2 + w_q^2)` as `w_r -> 0`.
    pub fn berry_limit(&self, band: BandIndex) -> f64 {
        let c = -self.omega_q / self.kappa().hypot(self.omega_q);
        -PI * (1.0 - band.sign() * c)
    }

    /// `w_r / sqrt(kappa^2 + w_q^2)`, small in the adiabatic regime.
    pub fn adiabaticity(&self) -> f64 {
        self.omega_r / self.kappa().hypot(self.omega_q)
    }

    /// The semiclassical substitution needs a large coherent amplitude.
    pub fn weak_coherent_state(&self) -> bool {
        self.alpha < 5.0
    }

    /// The semiclassical model as a rotating-wave qubit.
    pub fn as_rwa(&self) -> RwaQubitParams {
        RwaQubitParams {
            e1: 0.5 * self.omega_q,
            e2: -0.5 * self.omega_q,
            v0: c64(self.kappa(), 0.0),
            lambda: 1.0,
            omega: self.omega_r,
        }
    }

    /// The rotating-wave band carrying label `band`.
    pub fn rwa_band(band: BandIndex) -> BandIndex {
        match band {
            BandIndex::Plus => BandIndex::Minus,
            BandIndex::Minus => BandIndex::Plus,
        }
    }

    /// `S . R_hat` with `R_hat` at polar angle `theta_n`, which points
    /// against the rotating-wave field. The `+` state then projects to `+1/2`.
    pub fn geometry(&self) -> DriveGeometry {
        DriveGeometry {
            sign: -1.0,
            ..self.as_rwa().geometry()
        }
    }
}

/// `(epsilon_+, epsilon_-)` of photon sector `n`.
pub fn qubit_resonator_quasienergies(p: &QubitResonatorParams) -> (f64, f64) {
    (p.quasienergy(BandIndex::Plus), p.quasienergy(BandIndex::Minus))
}

/// `H_q = (1/2) [[w_q, kappa e^{-i w_r t}], [kappa e^{i w_r t}, -w_q]]`.
pub fn qubit_resonator_semiclassical(p: &QubitResonatorParams) -> Result<PeriodicHamiltonian, ModelError> {
    if !(p.alpha >= 1.0) {
        return Err(ModelError::BadArgument(format!(
            "coherent amplitude must be at least 1, got {}",
            p.alpha
        )));
    }
    Ok(rwa_qubit(&p.as_rwa())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::angular_distance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn resonant_uncoupled_is_degenerate() {
        let p = QubitResonatorParams {
            omega_q: 1.0,
            omega_r: 1.0,
            lambda: 0.0,
            n: 0,
            alpha: 10.0,
        };
        let (a, b) = qubit_resonator_quasienergies(&p);
        assert_eq!(a, 0.5);
        assert_eq!(b, 0.5);
    }

    #[test]
    fn closed_form_phase_is_frequency_derivative() {
        let p = QubitResonatorParams {
            omega_q: 1.1,
            omega_r: 0.9,
            lambda: 0.2,
            n: 3,
            alpha: 10.0,
        };
        for band in BandIndex::BOTH {
            let e = |w: f64| QubitResonatorParams { omega_r: w, ..p }.quasienergy(band);
            let h = 1e-5;
            let slope = (e(p.omega_r + h) - e(p.omega_r - h)) / (2.0 * h);
            assert_abs_diff_eq!(-2.0 * PI * slope, p.geometric_phase(band), epsilon = 1e-8);
        }
    }

    #[test]
    fn quantum_phase_reduces_to_semiclassical_branch() {
        let p = QubitResonatorParams {
            omega_q: 1.1,
            omega_r: 0.9,
            lambda: 0.2,
            n: 0,
            alpha: 1.0,
        };
        // with alpha^2 = n + 1 the two mixing angles coincide
        for band in BandIndex::BOTH {
            assert!(angular_distance(p.geometric_phase(band), p.semiclassical_phase(band)) < 1e-12);
        }
    }

    #[test]
    fn beta_normalized() {
        let p = QubitResonatorParams {
            omega_q: 1.3,
            omega_r: 0.8,
            lambda: 0.4,
            n: 2,
            alpha: 6.0,
        };
        assert_abs_diff_eq!(p.beta(BandIndex::Plus).powi(2) + p.beta(BandIndex::Minus).powi(2), 1.0, epsilon = 1e-14);
        assert!(!p.weak_coherent_state());
    }

    #[test]
    fn small_alpha_is_refused() {
        let p = QubitResonatorParams {
            omega_q: 1.0,
            omega_r: 1.0,
            lambda: 0.1,
            n: 0,
            alpha: 0.5,
        };
        assert!(qubit_resonator_semiclassical(&p).is_err());
    }
}
