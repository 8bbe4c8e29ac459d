//! Floquet engine for time-periodic Hamiltonians.
//!
//! `H(t) = sum_k H^(k) e^{i k omega t}` is lifted to the extended space of
//! periodic functions of `theta = omega t` with the Fourier basis `e^{i p theta}`,
//! `p = -P..=P`. The Floquet matrix has blocks `H^(p-q) + p omega delta_pq`.
//! Basis index of component `i` in harmonic `p` is `(p + P) N + i`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    self, c64, cis, eigensolve_hermitian, wrap_pi, ComplexMatrix, EigenSystem, NumericsError, Phase, StateVector,
};
use crate::tolerances::{BRANCH_OVERLAP, CUTOFF_CONVERGENCE, HERMITICITY, OMEGA_STEP, UNDERSAMPLED_ARG};

/// Samples per period used for direct phases unless the caller asks otherwise.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Fewest samples accepted by [`geometric_phase_direct`].
pub const MIN_SAMPLES: usize = 256;
pub const DEFAULT_CUTOFF: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloquetError {
    #[error("cutoff {cutoff} is below the highest harmonic {harmonic}")]
    CutoffTooSmall { cutoff: usize, harmonic: usize },
    #[error("quasienergies moved by {shift:.3e} between cutoffs {cutoff} and {}", cutoff + 2)]
    ConvergenceFail { cutoff: usize, shift: f64 },
    #[error("adjacent mode samples differ by a phase of {arg:.3} rad; increase the sample count")]
    UnderSampled { arg: f64 },
    #[error("branch continuation lost the state (best overlap {overlap:.3})")]
    BranchJump { overlap: f64 },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `H(t) = sum_k H^(k) e^{i k omega t}` with `H^(-k) = (H^(k))^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicHamiltonian {
    dim: usize,
    blocks: BTreeMap<i32, ComplexMatrix>,
    omega: f64,
}

impl PeriodicHamiltonian {
    /// Blocks given for only one of `k`, `-k` get their Hermitian partner
    /// filled in; blocks given for both must already be partners.
    pub fn new(dim: usize, omega: f64, blocks: BTreeMap<i32, ComplexMatrix>) -> Result<Self, FloquetError> {
        if dim == 0 {
            return Err(FloquetError::BadArgument("dimension must be positive".into()));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(FloquetError::BadArgument(format!("drive frequency must be positive, got {omega}")));
        }
        for (k, b) in &blocks {
            if b.nrows() != dim || b.ncols() != dim {
                return Err(FloquetError::BadArgument(format!(
                    "block {k} is {}x{}, expected {dim}x{dim}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        let mut full = blocks.clone();
        for (&k, b) in &blocks {
            match blocks.get(&-k) {
                Some(partner) => {
                    let scale = numerics::max_abs(b).max(1.0);
                    let dev = numerics::max_abs(&(partner - b.adjoint()));
                    if dev > HERMITICITY * scale {
                        return Err(NumericsError::NotHermitian { deviation: dev }.into());
                    }
                }
                None => {
                    full.insert(-k, b.adjoint());
                }
            }
        }
        full.retain(|_, b| numerics::max_abs(b) > 0.0);
        Ok(Self {
            dim,
            blocks: full,
            omega,
        })
    }

    /// A time-independent Hamiltonian.
    pub fn static_hamiltonian(h: ComplexMatrix, omega: f64) -> Result<Self, FloquetError> {
        let dim = h.nrows();
        Self::new(dim, omega, BTreeMap::from([(0, h)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn blocks(&self) -> &BTreeMap<i32, ComplexMatrix> {
        &self.blocks
    }

    pub fn block(&self, k: i32) -> ComplexMatrix {
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.dim, self.dim))
    }

    pub fn max_harmonic(&self) -> usize {
        self.blocks.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Same Fourier blocks at another drive frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self, FloquetError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(FloquetError::BadArgument(format!("drive frequency must be positive, got {omega}")));
        }
        Ok(Self { omega, ..self.clone() })
    }

    /// `H(theta)` at phase `theta = omega t`.
    pub fn at_phase(&self, theta: f64) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.dim, self.dim);
        for (&k, b) in &self.blocks {
            h += b * cis(k as f64 * theta);
        }
        h
    }
}

/// The truncated Floquet matrix of size `(2P+1) N`.
pub fn build_floquet_matrix(h: &PeriodicHamiltonian, cutoff: usize) -> Result<ComplexMatrix, FloquetError> {
    let harmonic = h.max_harmonic();
    if cutoff < harmonic {
        return Err(FloquetError::CutoffTooSmall { cutoff, harmonic });
    }
    let n = h.dim;
    let zones = 2 * cutoff + 1;
    let p0 = cutoff as i64;
    let mut f = ComplexMatrix::zeros(zones * n, zones * n);
    for a in 0..zones {
        for b in 0..zones {
            let k = a as i64 - b as i64;
            if let Some(block) = h.blocks.get(&(k as i32)) {
                f.view_mut((a * n, b * n), (n, n)).copy_from(block);
            }
        }
        let p = a as i64 - p0;
        for i in 0..n {
            f[(a * n + i, a * n + i)] += c64(p as f64 * h.omega, 0.0);
        }
    }
    Ok(f)
}

/// Fold into `[-omega/2, omega/2)`.
pub fn fold(e: f64, omega: f64) -> f64 {
    let y = (e + 0.5 * omega).rem_euclid(omega) - 0.5 * omega;
    if y >= 0.5 * omega {
        y - omega
    } else {
        y
    }
}

/// One physical Floquet state.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMode {
    /// Eigenvalue of the truncated matrix (the representative in the zone
    /// where the state was selected).
    pub energy: f64,
    pub folded: f64,
    /// Mean harmonic `sum_p p |c_p|^2`, equal to `d energy / d omega`.
    pub mean_harmonic: f64,
    cutoff: usize,
    /// Extended-space eigenvector, normalized.
    vector: StateVector,
    dim: usize,
}

impl FloquetMode {
    pub fn vector(&self) -> &StateVector {
        &self.vector
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// N-component Fourier coefficient of harmonic `p`.
    pub fn coefficient(&self, p: i64) -> StateVector {
        let a = (p + self.cutoff as i64) as usize;
        self.vector.rows(a * self.dim, self.dim).into_owned()
    }

    /// `Phi(theta) = sum_p c_p e^{i p theta}`.
    pub fn at_phase(&self, theta: f64) -> StateVector {
        let mut out = StateVector::zeros(self.dim);
        let p0 = self.cutoff as i64;
        for a in 0..(2 * self.cutoff + 1) {
            let p = a as i64 - p0;
            let c = self.vector.rows(a * self.dim, self.dim);
            out += c * cis(p as f64 * theta);
        }
        out
    }

    /// `samples` uniform points on `[0, 2 pi)`.
    pub fn samples(&self, samples: usize) -> Vec<StateVector> {
        (0..samples)
            .map(|k| self.at_phase(TAU * k as f64 / samples as f64))
            .collect()
    }
}

/// Extended-space product `<<a|b>> = int dtheta / 2 pi <a(theta)|b(theta)>`.
pub fn extended_inner(a: &FloquetMode, b: &FloquetMode) -> numerics::C64 {
    a.vector.dotc(&b.vector)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSpectrum {
    pub omega: f64,
    pub cutoff: usize,
    /// Physical states, ascending in folded quasienergy.
    pub modes: Vec<FloquetMode>,
}

impl FloquetSpectrum {
    pub fn quasienergies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.folded).collect()
    }

    pub fn unfolded(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.energy).collect()
    }

    /// Index of the mode whose folded quasienergy is closest (on the zone
    /// circle) to `e`.
    pub fn nearest(&self, e: f64) -> usize {
        let target = fold(e, self.omega);
        let dist = |m: &FloquetMode| {
            let d = (m.folded - target).rem_euclid(self.omega);
            d.min(self.omega - d)
        };
        (0..self.modes.len())
            .min_by(|&a, &b| dist(&self.modes[a]).total_cmp(&dist(&self.modes[b])))
            .unwrap_or(0)
    }
}

fn mean_harmonic(v: &StateVector, n: usize, cutoff: usize) -> f64 {
    let p0 = cutoff as i64;
    (0..(2 * cutoff + 1))
        .map(|a| (a as i64 - p0) as f64 * v.rows(a * n, n).norm_squared())
        .sum()
}

struct Truncated {
    eig: EigenSystem,
    selected: Vec<usize>,
}

fn solve_truncated(h: &PeriodicHamiltonian, cutoff: usize) -> Result<Truncated, FloquetError> {
    let f = build_floquet_matrix(h, cutoff)?;
    let eig = eigensolve_hermitian(&f)?;
    let n = h.dim;
    let keys: Vec<f64> = (0..eig.len())
        .map(|k| mean_harmonic(&eig.vector(k), n, cutoff) + 1e-9)
        .collect();
    // every Floquet class has exactly one copy whose mean harmonic lies in a
    // given half-open unit interval
    let mut selected: Vec<usize> = (0..eig.len()).filter(|&k| (-0.5..0.5).contains(&keys[k])).collect();
    if selected.len() != n {
        selected = (0..eig.len()).collect();
        selected.sort_by(|&a, &b| keys[a].abs().total_cmp(&keys[b].abs()));
        selected.truncate(n);
    }
    Ok(Truncated { eig, selected })
}

fn spectrum_from(h: &PeriodicHamiltonian, cutoff: usize, t: &Truncated) -> FloquetSpectrum {
    let mut modes: Vec<FloquetMode> = t
        .selected
        .iter()
        .map(|&k| {
            let vector = t.eig.vector(k);
            let energy = t.eig.values[k];
            FloquetMode {
                energy,
                folded: fold(energy, h.omega),
                mean_harmonic: mean_harmonic(&vector, h.dim, cutoff),
                cutoff,
                vector,
                dim: h.dim,
            }
        })
        .collect();
    modes.sort_by(|a, b| a.folded.total_cmp(&b.folded));
    FloquetSpectrum {
        omega: h.omega,
        cutoff,
        modes,
    }
}

/// Largest circular distance between two folded spectra, matched in sorted
/// order around the zone.
fn spectrum_shift(a: &[f64], b: &[f64], omega: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let circ = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(omega);
        d.min(omega - d)
    };
    let mut best = f64::INFINITY;
    // allow a cyclic relabelling for states sitting on the zone edge
    for s in 0..a.len() {
        let worst = (0..a.len())
            .map(|i| circ(a[i], b[(i + s) % b.len()]))
            .fold(0.0, f64::max);
        best = best.min(worst);
    }
    best
}

/// Quasienergies and modes without the convergence check.
pub fn quasienergies_unchecked(h: &PeriodicHamiltonian, cutoff: usize) -> Result<FloquetSpectrum, FloquetError> {
    let t = solve_truncated(h, cutoff)?;
    Ok(spectrum_from(h, cutoff, &t))
}

/// Quasienergies and modes at cutoff `P`, checked against cutoff `P + 2`.
pub fn quasienergies(h: &PeriodicHamiltonian, cutoff: usize) -> Result<FloquetSpectrum, FloquetError> {
    let spec = quasienergies_unchecked(h, cutoff)?;
    let wider = quasienergies_unchecked(h, cutoff + 2)?;
    let shift = spectrum_shift(&spec.quasienergies(), &wider.quasienergies(), h.omega);
    if !(shift <= CUTOFF_CONVERGENCE) {
        return Err(FloquetError::ConvergenceFail { cutoff, shift });
    }
    Ok(spec)
}

/// `gamma = i oint <Phi|d Phi>` from overlap products around one period.
/// Samples are taken at uniform phases on `[0, 2 pi)`.
pub fn geometric_phase_direct(samples: &[StateVector]) -> Result<Phase, FloquetError> {
    if samples.len() < MIN_SAMPLES {
        return Err(FloquetError::BadArgument(format!(
            "need at least {MIN_SAMPLES} samples per period, got {}",
            samples.len()
        )));
    }
    let (gamma, largest) = numerics::loop_overlap_phase(samples);
    if largest >= UNDERSAMPLED_ARG {
        return Err(FloquetError::UnderSampled { arg: largest });
    }
    Ok(Phase::new(gamma))
}

/// Follow `target` (an extended-space vector at cutoff `cutoff`) into the
/// truncated spectrum of `h` and return the matched unfolded eigenvalue.
fn track(h: &PeriodicHamiltonian, cutoff: usize, target: &StateVector) -> Result<(f64, StateVector), FloquetError> {
    let f = build_floquet_matrix(h, cutoff)?;
    let eig = eigensolve_hermitian(&f)?;
    let (best, overlap) = (0..eig.len())
        .map(|k| (k, eig.vectors.column(k).dotc(target).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty spectrum");
    if overlap < BRANCH_OVERLAP {
        return Err(FloquetError::BranchJump { overlap });
    }
    Ok((eig.values[best], eig.vector(best)))
}

/// `gamma = -2 pi d epsilon / d omega` by a central difference with step
/// `1e-5 omega`, following the state by maximal overlap.
pub fn geometric_phase_hf(h: &PeriodicHamiltonian, state: usize, cutoff: usize) -> Result<Phase, FloquetError> {
    let spec = quasienergies(h, cutoff)?;
    let mode = spec
        .modes
        .get(state)
        .ok_or_else(|| FloquetError::BadArgument(format!("state index {state} out of range")))?;
    geometric_phase_hf_mode(h, mode)
}

/// [`geometric_phase_hf`] for an already selected mode.
pub fn geometric_phase_hf_mode(h: &PeriodicHamiltonian, mode: &FloquetMode) -> Result<Phase, FloquetError> {
    let w = h.omega;
    let step = OMEGA_STEP * w;
    let cutoff = mode.cutoff;
    let (up, _) = track(&h.with_omega(w + step)?, cutoff, &mode.vector)?;
    let (down, _) = track(&h.with_omega(w - step)?, cutoff, &mode.vector)?;
    let slope = (up - down) / (2.0 * step);
    Ok(Phase::new(-TAU * slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    /// `d epsilon / d lambda`.
    pub chi: f64,
    /// `<<Phi| lambda V |Phi>>` with `lambda V = H(lambda) - H(0)`.
    pub matrix_element: f64,
    pub quasienergy: f64,
}

/// Generalized susceptibility of a state of the family `lambda -> H(lambda)`.
/// The state is chosen from the spectrum at `lambda` by index and followed by
/// overlap to `lambda +- h`.
pub fn susceptibility<F>(family: F, state: usize, lambda: f64, cutoff: usize) -> Result<Susceptibility, FloquetError>
where
    F: Fn(f64) -> Result<PeriodicHamiltonian, FloquetError>,
{
    if !(lambda >= 0.0) {
        return Err(FloquetError::BadArgument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let h = family(lambda)?;
    let spec = quasienergies(&h, cutoff)?;
    let mode = spec
        .modes
        .get(state)
        .ok_or_else(|| FloquetError::BadArgument(format!("state index {state} out of range")))?;
    let step = numerics::default_step(lambda);
    let (up, _) = track(&family(lambda + step)?, cutoff, &mode.vector)?;
    let (down, _) = track(&family(lambda - step)?, cutoff, &mode.vector)?;
    let chi = (up - down) / (2.0 * step);

    // omega p on the diagonal cancels in the difference
    let perturbation = build_floquet_matrix(&h, cutoff)? - build_floquet_matrix(&family(0.0)?, cutoff)?;
    let matrix_element = mode.vector.dotc(&(perturbation * &mode.vector)).re;
    Ok(Susceptibility {
        chi,
        matrix_element,
        quasienergy: mode.energy,
    })
}

/// Direction of the rotating effective field, `S . R_hat(theta)` with
/// `R_hat = sign (sin t cos(theta + phi0), sin t sin(theta + phi0), cos t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveGeometry {
    pub polar: f64,
    pub phase0: f64,
    pub sign: f64,
    /// `(S_1, S_2, S_3)` on the N-dimensional space.
    pub spin: [ComplexMatrix; 3],
}

impl DriveGeometry {
    pub fn operator(&self, theta: f64) -> ComplexMatrix {
        let (st, ct) = self.polar.sin_cos();
        let (sa, ca) = (theta + self.phase0).sin_cos();
        (&self.spin[0] * c64(st * ca, 0.0) + &self.spin[1] * c64(st * sa, 0.0) + &self.spin[2] * c64(ct, 0.0))
            * c64(self.sign, 0.0)
    }
}

/// `<Phi|S . R_hat|Phi>` averaged over `samples` uniform phases.
pub fn monopole_spin_projection(mode: &FloquetMode, geometry: &DriveGeometry, samples: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..samples {
        let theta = TAU * k as f64 / samples as f64;
        let phi = mode.at_phase(theta);
        let norm = phi.norm_squared();
        total += phi.dotc(&(geometry.operator(theta) * &phi)).re / norm;
    }
    total / samples as f64
}

/// Residual `|H_F v - epsilon v|` of a mode against the truncated matrix.
pub fn mode_residual(h: &PeriodicHamiltonian, mode: &FloquetMode) -> Result<f64, FloquetError> {
    let f = build_floquet_matrix(h, mode.cutoff)?;
    Ok((f * &mode.vector - &mode.vector * c64(mode.energy, 0.0)).norm())
}

/// Phase distance modulo `2 pi`.
pub fn phase_gap(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// `-2 pi p` for a pure harmonic winding, the trivial static value.
pub fn trivial_phase(p: i64) -> f64 {
    -2.0 * PI * p as f64
}
