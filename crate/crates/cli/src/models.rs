//! Model parameter records as they appear in config files, and the numerical
//! observables computed from them. Every record is flat so that a sweep can
//! address any numeric field by name.

use std::f64::consts::{PI, TAU};

use monopole_core::chern::{chern_number, ChernResult, SphereGrid};
use monopole_core::classical_dynamics::{conserved_quantities, default_dt, integrate_orbit, ChargedParticleState, Trajectory};
use monopole_core::floquet::{
    geometric_phase_direct, geometric_phase_hf_mode, monopole_spin_projection, quasienergies, susceptibility,
    DriveGeometry, FloquetMode, FloquetSpectrum, PeriodicHamiltonian, DEFAULT_SAMPLES, MIN_SAMPLES,
};
use monopole_core::models::{
    qubit_resonator_semiclassical, rwa_qubit, spin_j_periodic, spin_matrices, QubitResonatorParams, RwaQubitParams,
    SpinJParams,
};
use monopole_core::numerics::{c64, matrix_exp, StateVector};
use monopole_core::parameter_space::{latitude_contour, solid_angle};
use monopole_core::su3_lambda::{LambdaState, OamBeams};
use monopole_core::two_level::{analytic_eigvec, berry_phase_contour, BandIndex};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FLOQUET_CUTOFF: usize = 8;
const PROJECTION_SAMPLES: usize = 64;

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(message()))
    }
}

fn check_floquet(cutoff: usize, samples: usize) -> Result<(), CliError> {
    check(cutoff >= 1, || format!("cutoff must be at least 1, got {cutoff}"))?;
    check(samples >= MIN_SAMPLES, || format!("samples must be at least {MIN_SAMPLES}, got {samples}"))
}

fn check_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid, CliError> {
    Ok(SphereGrid::new(n_theta, n_phi)?)
}

pub fn band_label(b: BandIndex) -> &'static str {
    match b {
        BandIndex::Plus => "+",
        BandIndex::Minus => "-",
    }
}

/// Numerical properties of one Floquet mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeReport {
    pub quasienergy: f64,
    pub mean_harmonic: f64,
    pub gamma_direct: f64,
    pub gamma_hf: f64,
    pub spin_projection: f64,
}

pub fn mode_report(
    h: &PeriodicHamiltonian,
    mode: &FloquetMode,
    geometry: &DriveGeometry,
    samples: usize,
) -> Result<ModeReport, CliError> {
    Ok(ModeReport {
        quasienergy: mode.folded,
        mean_harmonic: mode.mean_harmonic,
        gamma_direct: geometric_phase_direct(&mode.samples(samples))?.unreduced,
        gamma_hf: geometric_phase_hf_mode(h, mode)?.unreduced,
        spin_projection: monopole_spin_projection(mode, geometry, PROJECTION_SAMPLES),
    })
}

/// Match each target quasienergy to a distinct mode, nearest first on the
/// zone circle. At exact Floquet degeneracies two targets would otherwise
/// land on one mode.
fn assign(spec: &FloquetSpectrum, targets: &[f64]) -> Vec<usize> {
    let w = spec.omega;
    let dist = |m: &FloquetMode, e: f64| {
        let d = (m.folded - e).rem_euclid(w);
        d.min(w - d)
    };
    let mut used = vec![false; spec.modes.len()];
    targets
        .iter()
        .map(|&e| {
            let k = (0..spec.modes.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| dist(&spec.modes[a], e).total_cmp(&dist(&spec.modes[b], e)))
                .expect("one mode per target");
            used[k] = true;
            k
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RwaConfig {
    /// Mean level energy `(E1 + E2) / 2`.
    pub e0: f64,
    /// Detuning `E1 - E2 - omega`.
    pub delta: f64,
    pub v0_re: f64,
    pub v0_im: f64,
    pub lambda: f64,
    pub omega: f64,
    pub cutoff: usize,
    pub samples: usize,
}

impl Default for RwaConfig {
    fn default() -> Self {
        Self {
            e0: 0.0,
            delta: 0.3,
            v0_re: 0.5,
            v0_im: 0.0,
            lambda: 1.0,
            omega: 1.0,
            cutoff: FLOQUET_CUTOFF,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl RwaConfig {
    pub fn params(&self) -> Result<RwaQubitParams, CliError> {
        check_floquet(self.cutoff, self.samples)?;
        check(self.omega > 0.0, || format!("omega must be positive, got {}", self.omega))?;
        check(self.lambda >= 0.0, || format!("lambda must be nonnegative, got {}", self.lambda))?;
        let split = 0.5 * (self.delta + self.omega);
        Ok(RwaQubitParams {
            e1: self.e0 + split,
            e2: self.e0 - split,
            v0: c64(self.v0_re, self.v0_im),
            lambda: self.lambda,
            omega: self.omega,
        })
    }
}

/// Per-band rows of the RWA model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaBand {
    pub band: BandIndex,
    pub mode: ModeReport,
    /// Finite-difference `d epsilon / d lambda` of the Floquet mode.
    pub chi: f64,
    pub matrix_element: f64,
}

pub fn rwa_bands(c: &RwaConfig, with_chi: bool) -> Result<Vec<RwaBand>, CliError> {
    let p = c.params()?;
    if p.at_dp() {
        return Err(CliError::Numerical("parameters sit on the diabolical point".into()));
    }
    let family = |l: f64| rwa_qubit(&RwaQubitParams { lambda: l, ..p });
    let h = family(p.lambda)?;
    let spec = quasienergies(&h, c.cutoff)?;
    let picks = assign(&spec, &BandIndex::BOTH.map(|b| p.quasienergy(b, 0)));
    BandIndex::BOTH
        .iter()
        .zip(picks)
        .map(|(&band, k)| {
            let mode = mode_report(&h, &spec.modes[k], &p.geometry(), c.samples)?;
            let (chi, matrix_element) = if with_chi {
                let s = susceptibility(family, k, p.lambda, c.cutoff)?;
                (s.chi, s.matrix_element)
            } else {
                (0.0, 0.0)
            };
            Ok(RwaBand {
                band,
                mode,
                chi,
                matrix_element,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JaynesConfig {
    pub omega_q: f64,
    pub omega_r: f64,
    pub lambda: f64,
    /// Photon number of the quantized sector.
    pub n: u32,
    /// Coherent amplitude of the semiclassical drive.
    pub alpha: f64,
    pub cutoff: usize,
    pub samples: usize,
}

impl Default for JaynesConfig {
    fn default() -> Self {
        Self {
            omega_q: 1.1,
            omega_r: 0.9,
            lambda: 0.05,
            n: 35,
            alpha: 6.0,
            cutoff: FLOQUET_CUTOFF,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl JaynesConfig {
    pub fn params(&self) -> Result<QubitResonatorParams, CliError> {
        check_floquet(self.cutoff, self.samples)?;
        check(self.omega_r > 0.0, || format!("omega_r must be positive, got {}", self.omega_r))?;
        check(self.lambda >= 0.0, || format!("lambda must be nonnegative, got {}", self.lambda))?;
        Ok(QubitResonatorParams {
            omega_q: self.omega_q,
            omega_r: self.omega_r,
            lambda: self.lambda,
            n: self.n,
            alpha: self.alpha,
        })
    }
}

/// Floquet modes of the semiclassical model, labelled by the quantized band
/// they correspond to.
pub fn jaynes_bands(c: &JaynesConfig) -> Result<Vec<(BandIndex, ModeReport)>, CliError> {
    let q = c.params()?;
    let h = qubit_resonator_semiclassical(&q)?;
    let spec = quasienergies(&h, c.cutoff)?;
    let rwa = q.as_rwa();
    let picks = assign(&spec, &BandIndex::BOTH.map(|b| rwa.quasienergy(QubitResonatorParams::rwa_band(b), 0)));
    BandIndex::BOTH
        .iter()
        .zip(picks)
        .map(|(&band, k)| Ok((band, mode_report(&h, &spec.modes[k], &q.geometry(), c.samples)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinjConfig {
    pub j: f64,
    /// `omega0 - omega`.
    pub delta: f64,
    pub v_re: f64,
    pub v_im: f64,
    pub omega: f64,
    pub cutoff: usize,
    pub samples: usize,
}

impl Default for SpinjConfig {
    fn default() -> Self {
        Self {
            j: 1.0,
            delta: 0.37,
            v_re: 0.31,
            v_im: -0.22,
            omega: 1.0,
            cutoff: FLOQUET_CUTOFF,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl SpinjConfig {
    pub fn params(&self) -> Result<SpinJParams, CliError> {
        check_floquet(self.cutoff, self.samples)?;
        check(self.omega > 0.0, || format!("omega must be positive, got {}", self.omega))?;
        Ok(SpinJParams::new(self.j, self.omega + self.delta, c64(self.v_re, self.v_im), self.omega)?)
    }
}

pub fn spinj_levels(c: &SpinjConfig) -> Result<Vec<(f64, ModeReport)>, CliError> {
    let p = c.params()?;
    if p.at_dp() {
        return Err(CliError::Numerical("parameters sit on the diabolical point".into()));
    }
    let h = spin_j_periodic(&p)?;
    let spec = quasienergies(&h, c.cutoff)?;
    let geometry = p.geometry()?;
    let ms = p.projections();
    let targets: Vec<f64> = ms.iter().map(|&m| p.quasienergy(m)).collect();
    ms.into_iter()
        .zip(assign(&spec, &targets))
        .map(|(m, k)| Ok((m, mode_report(&h, &spec.modes[k], &geometry, c.samples)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoLevelConfig {
    /// Polar angles of the latitude contours.
    pub theta: Vec<f64>,
    pub radius: f64,
    pub samples: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        Self {
            theta: vec![PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0],
            radius: 1.0,
            samples: 10_000,
            n_theta: 100,
            n_phi: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    pub theta: f64,
    pub band: BandIndex,
    pub solid_angle: f64,
    pub gamma: f64,
}

pub fn two_level_holonomies(c: &TwoLevelConfig) -> Result<Vec<Holonomy>, CliError> {
    check(!c.theta.is_empty(), || "theta needs at least one angle".into())?;
    let mut out = Vec::new();
    for &theta in &c.theta {
        let contour = latitude_contour(c.radius, theta, c.samples)?;
        let omega = solid_angle(&contour)?;
        for band in BandIndex::BOTH {
            out.push(Holonomy {
                theta,
                band,
                solid_angle: omega,
                gamma: berry_phase_contour(band, &contour)?.unreduced,
            });
        }
    }
    Ok(out)
}

pub fn two_level_chern(c: &TwoLevelConfig, band: BandIndex) -> Result<ChernResult, CliError> {
    let grid = check_grid(c.n_theta, c.n_phi)?;
    Ok(chern_number(|t, p| analytic_eigvec(band, t, p), &grid)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    /// Impact parameter.
    pub b: f64,
    /// Speed.
    pub v: f64,
    pub m: f64,
    /// `e q`.
    pub mu: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Step; `1e-3 b / v` when absent.
    pub dt: Option<f64>,
    /// Keep every `stride`-th step in the printed trajectory.
    pub stride: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            b: 1.0,
            v: 1.0,
            m: 1.0,
            mu: 0.5,
            t_start: -10.0,
            t_end: 10.0,
            dt: None,
            stride: 100,
        }
    }
}

/// Perihelion at `t = 0`, integrated out to both ends of the span.
pub struct OrbitRun {
    pub initial: ChargedParticleState,
    pub times: Vec<f64>,
    pub states: Vec<ChargedParticleState>,
    pub dt: f64,
}

pub fn run_orbit(c: &OrbitConfig) -> Result<OrbitRun, CliError> {
    check(c.stride >= 1, || "stride must be at least 1".into())?;
    check(c.t_start <= 0.0 && c.t_end >= 0.0, || {
        format!("the span [{}, {}] must contain the perihelion time 0", c.t_start, c.t_end)
    })?;
    check(c.v > 0.0, || format!("speed must be positive, got {}", c.v))?;
    let s0 = ChargedParticleState::perihelion(c.b, c.v, c.m, c.mu)?;
    let dt = c.dt.unwrap_or_else(|| default_dt(c.b, c.v));
    let back = integrate_orbit(&s0, (0.0, c.t_start), dt)?;
    let ahead = integrate_orbit(&s0, (0.0, c.t_end), dt)?;
    let Trajectory { times: bt, states: bs } = back;
    let mut times: Vec<f64> = bt.into_iter().skip(1).rev().collect();
    let mut states: Vec<ChargedParticleState> = bs.into_iter().skip(1).rev().collect();
    times.extend(ahead.times);
    states.extend(ahead.states);
    Ok(OrbitRun {
        initial: s0,
        times,
        states,
        dt,
    })
}

/// Residuals of one state against the conserved set and the radial law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitResidual {
    /// `|J(t) - J(0)| / |J(0)|`, absolute when `J(0) = 0`.
    pub j: f64,
    /// `|r(t) - sqrt(v^2 t^2 + b^2)|`.
    pub radius: f64,
    /// `r_hat . J_hat`.
    pub cone_cos: f64,
}

pub fn orbit_residual(run: &OrbitRun, c: &OrbitConfig, t: f64, s: &ChargedParticleState) -> OrbitResidual {
    let j0 = conserved_quantities(&run.initial).j;
    let scale = if j0.norm() > 0.0 { j0.norm() } else { 1.0 };
    let j = conserved_quantities(s).j;
    let cone_cos = if j.norm() > 0.0 { s.r.normalize().dot(&j.normalize()) } else { 0.0 };
    OrbitResidual {
        j: (j - j0).norm() / scale,
        radius: (s.r.norm() - (c.v * c.v * t * t + c.b * c.b).sqrt()).abs(),
        cone_cos,
    }
}

/// Worst residuals over a run plus the closure of integrating back from the
/// final state to perihelion.
pub fn orbit_summary(c: &OrbitConfig) -> Result<[f64; 3], CliError> {
    let run = run_orbit(c)?;
    let (mut j, mut radius) = (0.0_f64, 0.0_f64);
    for (t, s) in run.times.iter().zip(&run.states) {
        let r = orbit_residual(&run, c, *t, s);
        j = j.max(r.j);
        radius = radius.max(r.radius);
    }
    let end = run.states.last().expect("nonempty");
    let back = integrate_orbit(end, (c.t_end, 0.0), run.dt)?;
    let b = back.last();
    let reversal = (b.r - run.initial.r).norm().max((b.v - run.initial.v).norm());
    Ok([j, radius, reversal])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaConfig {
    pub l_p: i64,
    pub l_c: i64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self {
            l_p: 1,
            l_c: 0,
            n_theta: 100,
            n_phi: 200,
        }
    }
}

impl LambdaConfig {
    pub fn beams(&self) -> OamBeams {
        OamBeams {
            l_p: self.l_p,
            l_c: self.l_c,
        }
    }

    pub fn grid(&self) -> Result<SphereGrid, CliError> {
        check_grid(self.n_theta, self.n_phi)
    }
}

/// Chern number of the dark state. The bright combinations depend on the
/// azimuth at the south pole and carry none.
pub fn lambda_dark_chern(c: &LambdaConfig) -> Result<ChernResult, CliError> {
    let beams = c.beams();
    Ok(chern_number(|t, p| beams.state(LambdaState::Dark, t, p), &c.grid()?)?)
}

/// `exp(-i phi J3) exp(-i theta J2) |m>` for level `k` (m descending).
pub fn spin_coherent_state(j: f64, k: usize) -> Result<impl Fn(f64, f64) -> StateVector + Sync, CliError> {
    let s = spin_matrices(j)?;
    let n = s.dim();
    check(k < n, || format!("level {k} out of range for j = {j}"))?;
    Ok(move |theta: f64, phi: f64| {
        let rot = matrix_exp(&(&s.j3 * c64(0.0, -phi))) * matrix_exp(&(&s.j2 * c64(0.0, -theta)));
        let mut e = StateVector::zeros(n);
        e[k] = c64(1.0, 0.0);
        rot * e
    })
}

/// The representative of `folded` in the zone of width `omega` centred on
/// `reference`.
pub fn same_zone(folded: f64, reference: f64, omega: f64) -> f64 {
    let d = (folded - reference).rem_euclid(omega);
    reference + if d > 0.5 * omega { d - omega } else { d }
}

/// Closed-form latitude holonomy `-+ pi (1 - cos theta)`.
pub fn latitude_phase(band: BandIndex, theta: f64) -> f64 {
    -band.sign() * 0.5 * TAU * (1.0 - theta.cos())
}
