//! Curvature flux and Chern numbers over a parameter sphere.
//!
//! The grid uses latitudes `theta_k = k pi / n_theta` including both poles and
//! `n_phi` uniform longitudes. Interior rows are quadrilateral plaquettes; the
//! two polar rows are triangles closed on a single pole sample. Plaquettes
//! are traversed with `theta` increasing first, so `d theta ^ d phi` (the
//! outward normal) is positive.
//!
//! Each plaquette contributes the Berry phase `-arg(U1 U2 U3 U4)` of its
//! boundary, with links `U = <psi(a)|psi(b)>`. On a closed surface every
//! link appears twice with opposite orientation, so the total is an integer
//! multiple of `2 pi` up to rounding.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{pairwise_sum, StateVector};
use crate::su3_lambda::{ratio_to_f64, ChargeMatrix};
use crate::tolerances::CHERN_INTEGER;

/// Smallest normalized link overlap accepted.
const MIN_LINK: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChernError {
    #[error("grid {n_theta}x{n_phi} is too coarse (need n_theta >= 32, n_phi >= 64)")]
    BadGrid { n_theta: usize, n_phi: usize },
    #[error("flux / 2 pi = {value} is {residual:.3e} away from an integer")]
    NonConvergent { value: f64, residual: f64 },
    #[error("link overlap {overlap:.2e} near theta = {theta:.4}, phi = {phi:.4}; the state is discontinuous or under-resolved")]
    DiscontinuousState { overlap: f64, theta: f64, phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, ChernError> {
        if n_theta < 32 || n_phi < 64 {
            return Err(ChernError::BadGrid { n_theta, n_phi });
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn theta(&self, k: usize) -> f64 {
        if k == self.n_theta {
            PI
        } else {
            PI * k as f64 / self.n_theta as f64
        }
    }

    pub fn phi(&self, l: usize) -> f64 {
        TAU * (l % self.n_phi) as f64 / self.n_phi as f64
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_phi: 2 * self.n_phi,
        }
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self {
            n_theta: 100,
            n_phi: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernResult {
    pub flux: f64,
    pub chern: f64,
    pub integer_residual: f64,
}

impl ChernResult {
    pub fn nearest(&self) -> i64 {
        self.chern.round() as i64
    }
}

fn link(a: &StateVector, b: &StateVector) -> num_complex::Complex64 {
    a.dotc(b)
}

/// Berry phase of a closed loop of states, failing on a weak link.
fn loop_phase(states: &[&StateVector], at: (f64, f64)) -> Result<f64, ChernError> {
    let n = states.len();
    let mut prod = num_complex::Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (a, b) = (states[k], states[(k + 1) % n]);
        let u = link(a, b);
        let overlap = u.norm() / (a.norm() * b.norm());
        if !(overlap >= MIN_LINK) {
            return Err(ChernError::DiscontinuousState {
                overlap,
                theta: at.0,
                phi: at.1,
            });
        }
        prod *= u;
    }
    Ok(-prod.arg())
}

/// Total curvature flux of `state_fn` over the sphere by plaquette products.
pub fn sphere_flux<F>(state_fn: F, grid: &SphereGrid) -> Result<f64, ChernError>
where
    F: Fn(f64, f64) -> StateVector + Sync,
{
    let (nt, np) = (grid.n_theta, grid.n_phi);
    let north = state_fn(0.0, 0.0);
    let south = state_fn(PI, 0.0);
    // interior latitudes 1..nt-1, stored at index k - 1
    let rows: Vec<Vec<StateVector>> = (1..nt)
        .into_par_iter()
        .map(|k| (0..np).map(|l| state_fn(grid.theta(k), grid.phi(l))).collect())
        .collect();

    let row_flux: Vec<Result<f64, ChernError>> = (0..nt)
        .into_par_iter()
        .map(|r| {
            let phases: Result<Vec<f64>, ChernError> = (0..np)
                .map(|l| {
                    let l1 = (l + 1) % np;
                    let at = (grid.theta(r), grid.phi(l));
                    if r == 0 {
                        let ring = &rows[0];
                        loop_phase(&[&north, &ring[l], &ring[l1]], at)
                    } else if r == nt - 1 {
                        let ring = &rows[nt - 2];
                        loop_phase(&[&ring[l], &south, &ring[l1]], at)
                    } else {
                        let (lo, hi) = (&rows[r - 1], &rows[r]);
                        loop_phase(&[&lo[l], &hi[l], &hi[l1], &lo[l1]], at)
                    }
                })
                .collect();
            phases.map(|p| pairwise_sum(&p))
        })
        .collect();
    let row_flux: Vec<f64> = row_flux.into_iter().collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&row_flux))
}

/// Chern number `flux / 2 pi` of a band given as a state function on the
/// sphere `(theta, phi)`.
pub fn chern_number<F>(state_fn: F, grid: &SphereGrid) -> Result<ChernResult, ChernError>
where
    F: Fn(f64, f64) -> StateVector + Sync,
{
    let flux = sphere_flux(state_fn, grid)?;
    let chern = flux / TAU;
    let integer_residual = (chern - chern.round()).abs();
    if integer_residual > CHERN_INTEGER {
        return Err(ChernError::NonConvergent {
            value: chern,
            residual: integer_residual,
        });
    }
    Ok(ChernResult {
        flux,
        chern,
        integer_residual,
    })
}

/// Holonomy `oint A_phi d phi` on the latitude `theta`.
pub fn latitude_holonomy<F>(a_phi: &F, theta: f64, grid: &SphereGrid) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let dphi = TAU / grid.n_phi as f64;
    let terms: Vec<f64> = (0..grid.n_phi).map(|l| a_phi(theta, grid.phi(l)) * dphi).collect();
    pairwise_sum(&terms)
}

/// Total flux of the connection `A_phi(theta, phi) d phi` as the sum of
/// holonomy differences between successive latitudes, poles included.
pub fn flux_of_connection<F>(a_phi: F, grid: &SphereGrid) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let hol: Vec<f64> = (0..=grid.n_theta)
        .into_par_iter()
        .map(|k| latitude_holonomy(&a_phi, grid.theta(k), grid))
        .collect();
    let diffs: Vec<f64> = hol.windows(2).map(|w| w[1] - w[0]).collect();
    pairwise_sum(&diffs)
}

/// Flux of each component of the diagonal curvature `Q sin theta dtheta ^ dphi`,
/// through the connection `Q (1 - cos theta) d phi`.
pub fn diagonal_flux(q: &ChargeMatrix, grid: &SphereGrid) -> Vec<f64> {
    q.diag()
        .iter()
        .map(|&qi| {
            let c = ratio_to_f64(qi);
            flux_of_connection(|theta: f64, _| c * (1.0 - theta.cos()), grid)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use crate::two_level::{analytic_eigvec, BandIndex};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_level_bands() {
        let grid = SphereGrid::default();
        let plus = chern_number(|t, p| analytic_eigvec(BandIndex::Plus, t, p), &grid).unwrap();
        let minus = chern_number(|t, p| analytic_eigvec(BandIndex::Minus, t, p), &grid).unwrap();
        assert_eq!(plus.nearest(), -1);
        assert_eq!(minus.nearest(), 1);
        assert!(plus.integer_residual < 1e-9 && minus.integer_residual < 1e-9);
    }

    #[test]
    fn constant_state_is_trivial() {
        let grid = SphereGrid::new(32, 64).unwrap();
        let r = chern_number(|_, _| StateVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]), &grid).unwrap();
        assert_eq!(r.flux, 0.0);
    }

    #[test]
    fn coarse_grid_refused() {
        assert!(matches!(SphereGrid::new(10, 64), Err(ChernError::BadGrid { .. })));
    }

    #[test]
    fn connection_flux_examples() {
        let grid = SphereGrid::default();
        let q = 0.7;
        assert_abs_diff_eq!(
            flux_of_connection(|t: f64, _| q * (1.0 - t.cos()), &grid),
            4.0 * PI * q,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            flux_of_connection(|t: f64, _| -0.5 * (1.0 - t.cos()), &grid),
            -TAU,
            epsilon = 1e-12
        );
        assert_eq!(flux_of_connection(|_, _| 0.0, &grid), 0.0);
    }

    #[test]
    fn discontinuous_state_is_reported() {
        let grid = SphereGrid::new(32, 64).unwrap();
        // the phase winds at the south pole without the amplitude vanishing
        let bad = |t: f64, p: f64| {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let _ = t;
            StateVector::from_vec(vec![c64(h, 0.0), crate::numerics::cis(p) * h])
        };
        assert!(matches!(chern_number(bad, &grid), Err(ChernError::DiscontinuousState { .. })));
    }
}
