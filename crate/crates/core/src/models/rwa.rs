//! Two-level system under a rotating drive,
//! `H(t) = diag(E1, E2) + (lambda / 2) [[0, V0 e^{-i w t}], [V0* e^{i w t}, 0]]`.
//!
//! Harmonic `p` of level 1 pairs with harmonic `p + 1` of level 2, so the
//! Floquet matrix splits into exact 2x2 blocks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::floquet::{DriveGeometry, FloquetError, PeriodicHamiltonian};
use crate::models::spin_j::spin_matrices;
use crate::numerics::{c64, cis, ComplexMatrix, StateVector, C64};
use crate::tolerances::NEAR_DEGENERATE;
use crate::two_level::BandIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaQubitParams {
    pub e1: f64,
    pub e2: f64,
    pub v0: C64,
    pub lambda: f64,
    pub omega: f64,
}

impl RwaQubitParams {
    pub fn e0(&self) -> f64 {
        0.5 * (self.e1 + self.e2)
    }

    pub fn omega0(&self) -> f64 {
        self.e1 - self.e2
    }

    pub fn detuning(&self) -> f64 {
        self.omega0() - self.omega
    }

    /// `R = sqrt(lambda^2 |V0|^2 + delta^2)`.
    pub fn rabi(&self) -> f64 {
        (self.lambda * self.v0.norm()).hypot(self.detuning())
    }

    pub fn cos_theta(&self) -> f64 {
        let r = self.rabi();
        if r > 0.0 {
            self.detuning() / r
        } else {
            1.0
        }
    }

    pub fn theta(&self) -> f64 {
        self.cos_theta().clamp(-1.0, 1.0).acos()
    }

    /// Azimuth of the effective field at `theta = 0`, `arg(lambda V0*)`.
    pub fn azimuth(&self) -> f64 {
        (self.v0.conj() * self.lambda).arg()
    }

    /// The two bands touch (`R = 0`).
    pub fn at_dp(&self) -> bool {
        self.rabi() < NEAR_DEGENERATE
    }

    /// `E0 + p w + (w +- R) / 2`.
    pub fn quasienergy(&self, band: BandIndex, p: i64) -> f64 {
        self.e0() + p as f64 * self.omega + 0.5 * (self.omega + band.sign() * self.rabi())
    }

    /// `-2 pi d epsilon / d omega` on the representative `p`.
    pub fn geometric_phase(&self, band: BandIndex, p: i64) -> f64 {
        let c = 1.0 - self.cos_theta();
        match band {
            BandIndex::Plus => -PI * c - 2.0 * PI * p as f64,
            BandIndex::Minus => PI * c - 2.0 * PI * (p + 1) as f64,
        }
    }

    /// `chi = +- lambda |V0|^2 / (2 R)`.
    pub fn susceptibility(&self, band: BandIndex) -> f64 {
        let v2 = self.v0.norm_sqr();
        band.sign() * self.lambda * v2 / (2.0 * self.rabi())
    }

    /// `Phi(theta)` of the representative `p`, in the gauge with real first
    /// component for the upper band.
    pub fn mode(&self, band: BandIndex, p: i64, theta: f64) -> StateVector {
        let (s, c) = (0.5 * self.theta()).sin_cos();
        let phase = cis(p as f64 * theta);
        let az = cis(theta + self.azimuth());
        match band {
            BandIndex::Plus => StateVector::from_vec(vec![phase * c, phase * az * s]),
            BandIndex::Minus => StateVector::from_vec(vec![-phase * az.conj() * s * cis(theta), phase * c * cis(theta)]),
        }
    }

    pub fn geometry(&self) -> DriveGeometry {
        DriveGeometry {
            polar: self.theta(),
            phase0: self.azimuth(),
            sign: 1.0,
            spin: spin_matrices(0.5).expect("spin one half").components(),
        }
    }
}

pub fn rwa_qubit(p: &RwaQubitParams) -> Result<PeriodicHamiltonian, FloquetError> {
    let z = c64(0.0, 0.0);
    let mut blocks = BTreeMap::new();
    blocks.insert(0, ComplexMatrix::from_row_slice(2, 2, &[c64(p.e1, 0.0), z, z, c64(p.e2, 0.0)]));
    blocks.insert(-1, ComplexMatrix::from_row_slice(2, 2, &[z, p.v0 * (0.5 * p.lambda), z, z]));
    PeriodicHamiltonian::new(2, p.omega, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{build_floquet_matrix, fold, quasienergies};
    use approx::assert_abs_diff_eq;

    fn params() -> RwaQubitParams {
        RwaQubitParams {
            e1: 0.9,
            e2: -0.4,
            v0: c64(0.3, 0.4),
            lambda: 0.8,
            omega: 1.1,
        }
    }

    #[test]
    fn explicit_floquet_matrix() {
        let p = params();
        let f = build_floquet_matrix(&rwa_qubit(&p).unwrap(), 2).unwrap();
        // |1, p = 0> and |2, p = 1>
        let (a, b) = (2 * 2, 3 * 2 + 1);
        assert_abs_diff_eq!(f[(a, a)].re, p.e1, epsilon = 1e-15);
        assert_abs_diff_eq!(f[(b, b)].re, p.e2 + p.omega, epsilon = 1e-15);
        assert_eq!(f[(a, b)], p.v0 * (0.5 * p.lambda));
        assert_eq!(f[(b, a)], (p.v0 * (0.5 * p.lambda)).conj());
    }

    #[test]
    fn spectrum_matches_closed_form() {
        let p = params();
        let spec = quasienergies(&rwa_qubit(&p).unwrap(), 6).unwrap();
        for band in BandIndex::BOTH {
            let e = fold(p.quasienergy(band, 0), p.omega);
            let k = spec.nearest(e);
            assert_abs_diff_eq!(spec.modes[k].folded, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn modes_match_closed_form() {
        let p = params();
        let spec = quasienergies(&rwa_qubit(&p).unwrap(), 6).unwrap();
        for band in BandIndex::BOTH {
            let m = &spec.modes[spec.nearest(p.quasienergy(band, 0))];
            let shift = (m.energy - p.quasienergy(band, 0)) / p.omega;
            let q = shift.round() as i64;
            let num: C64 = (0..64)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / 64.0;
                    p.mode(band, q, t).dotc(&m.at_phase(t))
                })
                .sum::<C64>()
                / 64.0;
            assert!((num.norm() - 1.0).abs() < 1e-10, "{band:?}: {}", num.norm());
        }
    }

    #[test]
    fn undriven_gives_bare_levels() {
        let p = RwaQubitParams { lambda: 0.0, ..params() };
        let spec = quasienergies(&rwa_qubit(&p).unwrap(), 4).unwrap();
        let mut got = spec.quasienergies();
        got.sort_by(f64::total_cmp);
        let mut want = vec![fold(p.e1, p.omega), fold(p.e2, p.omega)];
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn dp_flag() {
        let p = RwaQubitParams {
            lambda: 0.0,
            omega: 1.3,
            ..params()
        };
        assert!(p.at_dp());
        assert!(!params().at_dp());
    }
}
