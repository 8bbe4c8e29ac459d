//! Dense linear algebra and scalar kernels shared by every other module.
//!
//! Matrices are plain `nalgebra` dense complex matrices. Whether a matrix is
//! meant to be Hermitian or unitary is checked at the point of use with
//! [`is_hermitian`] / [`is_unitary`] rather than carried in the type.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::tolerances::{DEGENERACY_GAP, HERMITICITY};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("function evaluation is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
    #[error("phase jump of {jump:.4} rad at index {index} exceeds the unwrap limit {limit:.4}")]
    JumpTooLarge { index: usize, jump: f64, limit: f64 },
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` belongs to `values[k]`.
/// Each column is gauge-fixed so that its largest-magnitude entry is real and
/// nonnegative. `degenerate` is raised when two adjacent eigenvalues are closer
/// than `1e-9` times the spectral range, in which case the individual vectors
/// (and their phase fix) are not unique.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub degenerate: bool,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> StateVector {
        self.vectors.column(k).into_owned()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i x}`.
pub fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_deviation(m) <= tol
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square() && max_abs(&(u.adjoint() * u - ComplexMatrix::identity(u.nrows(), u.ncols()))) <= tol
}

/// Rotate `v` by a global phase so that its largest-magnitude component is
/// real and nonnegative. Ties are resolved towards the lowest index, with a
/// relative slack so that the choice is stable under rounding.
pub fn fix_phase(v: &mut StateVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v[pivot] = c64(v[pivot].re, 0.0);
}

/// Hermitian eigensolve with ascending eigenvalues and phase-fixed vectors.
pub fn eigensolve_hermitian(m: &ComplexMatrix) -> Result<EigenSystem, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let deviation = hermiticity_deviation(m);
    if deviation > HERMITICITY * max_abs(m).max(1.0) {
        return Err(NumericsError::NotHermitian { deviation });
    }
    let n = m.nrows();
    let symmetric = (m + m.adjoint()).scale(0.5);
    let eig = symmetric.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let norm = v.norm();
        if norm > 0.0 {
            v /= C64::from(norm);
        }
        fix_phase(&mut v);
        vectors.set_column(dst, &v);
    }

    let range = match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    let degenerate = n > 1
        && values
            .windows(2)
            .any(|w| w[1] - w[0] < DEGENERACY_GAP * range.max(f64::MIN_POSITIVE));

    Ok(EigenSystem {
        values,
        vectors,
        degenerate,
    })
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn matrix_exp(m: &ComplexMatrix) -> ComplexMatrix {
    m.clone().exp()
}

/// Default central-difference step: `max(1e-6, 1e-6 |x|)`.
pub fn default_step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-6)
}

/// Symmetric difference quotient `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F>(f: F, x: f64, h: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0) {
        return Err(NumericsError::BadStep(h));
    }
    let ahead = f(x + h);
    if !ahead.is_finite() {
        return Err(NumericsError::NonFinite { x: x + h });
    }
    let behind = f(x - h);
    if !behind.is_finite() {
        return Err(NumericsError::NonFinite { x: x - h });
    }
    Ok((ahead - behind) / (2.0 * h))
}

/// Fallible variant of [`central_diff`] for evaluations that can fail.
pub fn try_central_diff<F, E>(f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    if !(h > 0.0) {
        return Err(NumericsError::BadStep(h).into());
    }
    let ahead = f(x + h)?;
    let behind = f(x - h)?;
    if !ahead.is_finite() {
        return Err(NumericsError::NonFinite { x: x + h }.into());
    }
    if !behind.is_finite() {
        return Err(NumericsError::NonFinite { x: x - h }.into());
    }
    Ok((ahead - behind) / (2.0 * h))
}

/// Reduce an angle to `[-pi, pi)`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y >= PI {
        y - TAU
    } else {
        y
    }
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Unwrap a sequence of angles onto a continuous branch.
///
/// The first element is kept; every later element is shifted by a multiple
/// of `2 pi` so that successive differences lie in `[-pi, pi)`.
pub fn unwrap_phase(angles: &[f64]) -> Result<Vec<f64>, NumericsError> {
    unwrap_phase_with_limit(angles, PI)
}

/// [`unwrap_phase`] with a caller-chosen bound on the reduced step. A reduced
/// step whose magnitude reaches `limit` is reported as under-sampling.
pub fn unwrap_phase_with_limit(angles: &[f64], limit: f64) -> Result<Vec<f64>, NumericsError> {
    let mut out = Vec::with_capacity(angles.len());
    let mut iter = angles.iter().copied();
    let Some(first) = iter.next() else {
        return Ok(out);
    };
    out.push(first);
    let mut prev_raw = first;
    let mut acc = first;
    for (offset, raw) in iter.enumerate() {
        let step = wrap_pi(raw - prev_raw);
        if step.abs() >= limit {
            return Err(NumericsError::JumpTooLarge {
                index: offset + 1,
                jump: step,
                limit,
            });
        }
        acc += step;
        out.push(acc);
        prev_raw = raw;
    }
    Ok(out)
}

/// A phase reported both on its continuous (unreduced) branch and reduced
/// into `(-2 pi, 2 pi)` by truncated division, which keeps the sign.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Phase {
    pub unreduced: f64,
    pub reduced: f64,
}

impl Phase {
    pub fn new(unreduced: f64) -> Self {
        Self {
            unreduced,
            reduced: unreduced % TAU,
        }
    }

    /// Circular distance to another phase, modulo `2 pi`.
    pub fn distance_mod_2pi(&self, other: f64) -> f64 {
        angular_distance(self.unreduced, other)
    }
}

/// Sum the principal arguments of the nearest-neighbour overlaps
/// `<v_k | v_{k+1}>` around a closed loop of states (the last state connects
/// back to the first). Returns `-sum arg`, i.e. the discrete Berry phase on
/// its unreduced branch, together with the largest single step.
pub fn loop_overlap_phase(states: &[StateVector]) -> (f64, f64) {
    let n = states.len();
    let mut total = 0.0;
    let mut largest = 0.0_f64;
    for k in 0..n {
        let a = &states[k];
        let b = &states[(k + 1) % n];
        let arg = a.dotc(b).arg();
        largest = largest.max(arg.abs());
        total += arg;
    }
    (-total, largest)
}

/// Pairwise (tree) summation. The reduction order depends only on the slice
/// length, so results are bit-reproducible regardless of how the terms were
/// produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_eigensystem_is_identity() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]));
        let eig = eigensolve_hermitian(&m).unwrap();
        assert_eq!(eig.values, vec![-1.0, 1.0]);
        assert_abs_diff_eq!(eig.vectors[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eig.vectors[(1, 0)].re, 1.0, epsilon = 1e-15);
        assert!(!eig.degenerate);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert!(matches!(eigensolve_hermitian(&m), Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_spectrum_is_flagged() {
        let m = ComplexMatrix::identity(3, 3);
        assert!(eigensolve_hermitian(&m).unwrap().degenerate);
    }

    #[test]
    fn phase_fix_is_idempotent() {
        let mut v = StateVector::from_vec(vec![c64(0.3, -0.4), c64(0.1, 0.8), c64(-0.2, 0.2)]);
        fix_phase(&mut v);
        let once = v.clone();
        fix_phase(&mut v);
        assert_eq!(once, v);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_abs_diff_eq!(max_abs(&(matrix_exp(&z) - ComplexMatrix::identity(3, 3))), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_of_diagonal_pauli() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c64(0.0, PI / 2.0), c64(0.0, -PI / 2.0)]));
        let e = matrix_exp(&m);
        assert_abs_diff_eq!((e[(0, 0)] - cis(PI / 2.0)).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!((e[(1, 1)] - cis(-PI / 2.0)).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn central_diff_examples() {
        let d = central_diff(|x| x * x, 3.0, default_step(3.0)).unwrap();
        assert_abs_diff_eq!(d, 6.0, epsilon = 1e-6);
        assert_eq!(central_diff(|_| 4.2, 1.0, 1e-3).unwrap(), 0.0);
        assert!(matches!(
            central_diff(|x| if x > 0.0 { f64::NAN } else { 0.0 }, 0.0, 1e-3),
            Err(NumericsError::NonFinite { .. })
        ));
        assert!(matches!(central_diff(|x| x, 0.0, 0.0), Err(NumericsError::BadStep(_))));
    }

    #[test]
    fn unwrap_crosses_branch_cut() {
        let out = unwrap_phase(&[0.1, 6.2, 0.2]).unwrap();
        assert_abs_diff_eq!(out[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 6.2 - TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(out[2], 0.2, epsilon = 1e-12);
        assert_eq!(unwrap_phase(&[0.0, 1.0, 2.0, 3.0]).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn unwrap_linear_ramp() {
        let n = 1000;
        let raw: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                (4.0 * PI * t).rem_euclid(TAU)
            })
            .collect();
        let out = unwrap_phase(&raw).unwrap();
        assert_abs_diff_eq!(*out.last().unwrap(), 4.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn unwrap_rejects_large_steps() {
        let err = unwrap_phase_with_limit(&[0.0, 1.0], 0.5).unwrap_err();
        assert!(matches!(err, NumericsError::JumpTooLarge { index: 1, .. }));
    }

    #[test]
    fn phase_reduction_keeps_sign() {
        let p = Phase::new(-1.5 * PI - TAU);
        assert_abs_diff_eq!(p.reduced, -1.5 * PI, epsilon = 1e-12);
        assert!(p.distance_mod_2pi(0.5 * PI) < 1e-12);
    }
}
