//! Spin `j` in a circularly polarized field.
//!
//! States are ordered by descending `m`: basis index `k` holds `m = j - k`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::floquet::{DriveGeometry, PeriodicHamiltonian};
use crate::models::ModelError;
use crate::numerics::{c64, ComplexMatrix, C64};
use crate::tolerances::NEAR_DEGENERATE;

/// Angular momentum matrices of one spin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinMatrices {
    pub j: f64,
    pub j1: ComplexMatrix,
    pub j2: ComplexMatrix,
    pub j3: ComplexMatrix,
    pub raise: ComplexMatrix,
    pub lower: ComplexMatrix,
}

impl SpinMatrices {
    pub fn dim(&self) -> usize {
        self.j3.nrows()
    }

    pub fn components(&self) -> [ComplexMatrix; 3] {
        [self.j1.clone(), self.j2.clone(), self.j3.clone()]
    }

    /// `m` of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        self.j - k as f64
    }
}

fn twice_spin(j: f64) -> Result<usize, ModelError> {
    let twice = 2.0 * j;
    if !(j >= 0.5) || (twice - twice.round()).abs() > 1e-12 || twice > 1e6 {
        return Err(ModelError::BadSpin(j));
    }
    Ok(twice.round() as usize)
}

/// `J_3`, `J_+-` with `<m+-1|J_+-|m> = sqrt(j(j+1) - m(m+-1))`, and
/// `J_1 = (J_+ + J_-)/2`, `J_2 = (J_+ - J_-)/2i`.
pub fn spin_matrices(j: f64) -> Result<SpinMatrices, ModelError> {
    let dim = twice_spin(j)? + 1;
    let mut j3 = ComplexMatrix::zeros(dim, dim);
    let mut raise = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        let m = j - k as f64;
        j3[(k, k)] = c64(m, 0.0);
        if k > 0 {
            // |m> -> |m + 1>, which sits one index up
            raise[(k - 1, k)] = c64((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let j1 = (&raise + &lower) * c64(0.5, 0.0);
    let j2 = (&raise - &lower) * c64(0.0, -0.5);
    Ok(SpinMatrices {
        j,
        j1,
        j2,
        j3,
        raise,
        lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinJParams {
    pub j: f64,
    pub omega0: f64,
    pub v: C64,
    pub omega: f64,
}

impl SpinJParams {
    pub fn new(j: f64, omega0: f64, v: C64, omega: f64) -> Result<Self, ModelError> {
        twice_spin(j)?;
        if !(omega > 0.0) {
            return Err(ModelError::BadArgument(format!("drive frequency must be positive, got {omega}")));
        }
        Ok(Self { j, omega0, v, omega })
    }

    pub fn dim(&self) -> usize {
        (2.0 * self.j).round() as usize + 1
    }

    /// `Delta = omega0 - omega`.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// `Omega = sqrt(Delta^2 + |V|^2)`.
    pub fn rabi(&self) -> f64 {
        self.detuning().hypot(self.v.norm())
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

    /// At `Omega = 0` all `2j + 1` quasienergies coincide.
    pub fn at_dp(&self) -> bool {
        self.rabi() < NEAR_DEGENERATE
    }

    /// `epsilon_m = -j omega + m Omega`.
    pub fn quasienergy(&self, m: f64) -> f64 {
        -self.j * self.omega + m * self.rabi()
    }

    /// `gamma_m = 2 pi (j + m cos theta)`.
    pub fn geometric_phase(&self, m: f64) -> f64 {
        TAU * (self.j + m * self.cos_theta())
    }

    /// Allowed `m`, descending.
    pub fn projections(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.j - k as f64).collect()
    }

    pub fn geometry(&self) -> Result<DriveGeometry, ModelError> {
        Ok(DriveGeometry {
            polar: self.theta(),
            phase0: self.v.arg(),
            sign: 1.0,
            spin: spin_matrices(self.j)?.components(),
        })
    }

    /// `S . R_hat` in the central block.
    pub fn s_dot_r(&self) -> Result<ComplexMatrix, ModelError> {
        let s = spin_matrices(self.j)?;
        let (st, ct) = self.theta().sin_cos();
        let (sp, cp) = self.v.arg().sin_cos();
        Ok(&s.j1 * c64(st * cp, 0.0) + &s.j2 * c64(st * sp, 0.0) + &s.j3 * c64(ct, 0.0))
    }
}

/// `H^(0) = omega0 J_3`, `H^(-1) = (V*/2) J_+`, `H^(+1) = (V/2) J_-`, the
/// Fourier blocks whose Floquet matrix has the elements
/// `(m omega0 + p omega) delta + (V*<m|J_+|n> delta_{p,q-1} + V<m|J_-|n> delta_{p,q+1}) / 2`.
pub fn spin_j_periodic(p: &SpinJParams) -> Result<PeriodicHamiltonian, ModelError> {
    let s = spin_matrices(p.j)?;
    let mut blocks = BTreeMap::new();
    blocks.insert(0, &s.j3 * c64(p.omega0, 0.0));
    blocks.insert(-1, &s.raise * (p.v.conj() * 0.5));
    blocks.insert(1, &s.lower * (p.v * 0.5));
    Ok(PeriodicHamiltonian::new(p.dim(), p.omega, blocks)?)
}

/// The central block on `{|j, m; -m - j>}`:
/// `H_j = -j omega + Re V J_1 + Im V J_2 + Delta J_3 = -j omega + Omega S . R_hat`.
pub fn spin_j_floquet_block(p: &SpinJParams) -> Result<ComplexMatrix, ModelError> {
    let s = spin_matrices(p.j)?;
    let n = p.dim();
    Ok(ComplexMatrix::identity(n, n) * c64(-p.j * p.omega, 0.0)
        + &s.j1 * c64(p.v.re, 0.0)
        + &s.j2 * c64(p.v.im, 0.0)
        + &s.j3 * c64(p.detuning(), 0.0))
}
