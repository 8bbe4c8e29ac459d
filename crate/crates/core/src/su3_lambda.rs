//! The resonant Lambda system and its SU(3) monopole.
//!
//! Basis order is `(|1>, |2>, |e>)`. The chart on the sphere of Rabi
//! frequencies uses `tan(theta/2) = |Omega_p| / |Omega_c|`,
//! `phi = phi_p - phi_c` and `psi = phi_p + phi_c`.
//!
//! Charges are exact rationals. Hypercharge coefficients carry a factor of
//! `sqrt 3`, so they are stored as the rational multiplying it.

use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::{c64, cis, max_abs, ComplexMatrix, StateVector, C64};
use crate::tolerances::CHART_POLE;
use crate::two_level;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LambdaError {
    #[error("both Rabi frequencies vanish; the dark and bright states are undefined")]
    ZeroField,
    #[error("closed-form states need two-photon resonance (delta = 0), got delta = {0}")]
    NotResonant(f64),
    #[error("chart is singular at theta = {0} (within 1e-6 of a pole)")]
    ChartSingular(f64),
    #[error("charge matrix has nonzero trace {0}")]
    NotTraceless(Rational64),
    #[error("matrix is not in the Cartan span of su(3): {0}")]
    NotInCartanSpan(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaParams {
    pub omega_p: C64,
    pub omega_c: C64,
    pub delta: f64,
}

impl LambdaParams {
    /// Resonant parameters from the sphere chart at radius `r`.
    pub fn from_chart(r: f64, theta: f64, phi_p: f64, phi_c: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self {
            omega_p: cis(phi_p) * (r * s),
            omega_c: cis(phi_c) * (r * c),
            delta: 0.0,
        }
    }

    pub fn rabi(&self) -> f64 {
        self.omega_p.norm().hypot(self.omega_c.norm())
    }

    pub fn theta(&self) -> f64 {
        2.0 * self.omega_p.norm().atan2(self.omega_c.norm())
    }

    pub fn phi_p(&self) -> f64 {
        self.omega_p.arg()
    }

    pub fn phi_c(&self) -> f64 {
        self.omega_c.arg()
    }

    pub fn phi(&self) -> f64 {
        self.phi_p() - self.phi_c()
    }

    pub fn psi(&self) -> f64 {
        self.phi_p() + self.phi_c()
    }
}

pub fn lambda_hamiltonian(p: &LambdaParams) -> ComplexMatrix {
    let z = c64(0.0, 0.0);
    let a = p.omega_p * 0.5;
    let b = p.omega_c * 0.5;
    ComplexMatrix::from_row_slice(
        3,
        3,
        &[
            c64(-0.5 * p.delta, 0.0),
            z,
            a.conj(),
            z,
            c64(0.5 * p.delta, 0.0),
            b.conj(),
            a,
            b,
            z,
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaState {
    Dark,
    Plus,
    Minus,
}

impl LambdaState {
    pub const ALL: [LambdaState; 3] = [LambdaState::Dark, LambdaState::Plus, LambdaState::Minus];

    /// Coefficient of `(d psi - cos theta d phi)` in the connection of the state.
    pub fn connection_coefficient(self) -> Rational64 {
        match self {
            LambdaState::Dark => Rational64::new(-1, 2),
            LambdaState::Plus | LambdaState::Minus => Rational64::new(1, 4),
        }
    }

    pub fn energy(self, rabi: f64) -> f64 {
        match self {
            LambdaState::Dark => 0.0,
            LambdaState::Plus => 0.5 * rabi,
            LambdaState::Minus => -0.5 * rabi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaStates {
    pub dark: StateVector,
    pub bright: StateVector,
    pub plus: StateVector,
    pub minus: StateVector,
}

impl LambdaStates {
    pub fn get(&self, s: LambdaState) -> &StateVector {
        match s {
            LambdaState::Dark => &self.dark,
            LambdaState::Plus => &self.plus,
            LambdaState::Minus => &self.minus,
        }
    }
}

/// `|D> = (-e^{i phi_c} cos, e^{i phi_p} sin, 0)`,
/// `|B> = (e^{-i phi_p} sin, e^{-i phi_c} cos, 0)`, `|+-> = (|B> +- |e>)/sqrt 2`.
pub fn dark_bright_states(p: &LambdaParams) -> Result<LambdaStates, LambdaError> {
    if p.delta != 0.0 {
        return Err(LambdaError::NotResonant(p.delta));
    }
    if !(p.rabi() > 0.0) {
        return Err(LambdaError::ZeroField);
    }
    let (s, c) = (0.5 * p.theta()).sin_cos();
    let (ep, ec) = (cis(p.phi_p()), cis(p.phi_c()));
    let z = c64(0.0, 0.0);
    let dark = StateVector::from_vec(vec![-ec * c, ep * s, z]);
    let bright = StateVector::from_vec(vec![ep.conj() * s, ec.conj() * c, z]);
    let e = StateVector::from_vec(vec![z, z, c64(1.0, 0.0)]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = (&bright + &e) * c64(h, 0.0);
    let minus = (&bright - &e) * c64(h, 0.0);
    Ok(LambdaStates {
        dark,
        bright,
        plus,
        minus,
    })
}

/// A point of the sphere chart.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChartPoint {
    pub theta: f64,
    pub phi_p: f64,
    pub phi_c: f64,
}

impl ChartPoint {
    pub fn params(&self) -> LambdaParams {
        LambdaParams::from_chart(1.0, self.theta, self.phi_p, self.phi_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConnectionSample {
    pub t: f64,
    pub state: LambdaState,
    /// `Re i <s|ds/dt>` by central differences of the closed-form states.
    pub numerical: f64,
    /// `c (psi' - cos theta phi')` from the closed form.
    pub closed_form: f64,
}

/// Connection of each state along `path`, sampled at `ts`, both numerically
/// and from the closed form.
pub fn induced_connection<F>(path: F, ts: &[f64]) -> Result<Vec<ConnectionSample>, LambdaError>
where
    F: Fn(f64) -> ChartPoint,
{
    let h = 1e-6;
    let mut out = Vec::with_capacity(3 * ts.len());
    for &t in ts {
        let (a, here, b) = (path(t - h), path(t), path(t + h));
        for p in [a, here, b] {
            if p.theta < CHART_POLE || p.theta > std::f64::consts::PI - CHART_POLE {
                return Err(LambdaError::ChartSingular(p.theta));
            }
        }
        let sa = dark_bright_states(&a.params())?;
        let s0 = dark_bright_states(&here.params())?;
        let sb = dark_bright_states(&b.params())?;
        let dphi_p = (b.phi_p - a.phi_p) / (2.0 * h);
        let dphi_c = (b.phi_c - a.phi_c) / (2.0 * h);
        let rate = (dphi_p + dphi_c) - here.theta.cos() * (dphi_p - dphi_c);
        for state in LambdaState::ALL {
            let d = (sb.get(state) - sa.get(state)) / c64(2.0 * h, 0.0);
            let numerical = (c64(0.0, 1.0) * s0.get(state).dotc(&d)).re;
            let coef = ratio_to_f64(state.connection_coefficient());
            out.push(ConnectionSample {
                t,
                state,
                numerical,
                closed_form: coef * rate,
            });
        }
    }
    Ok(out)
}

/// Beams with orbital angular momenta, `phi_p = l_p phi`, `phi_c = l_c phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OamBeams {
    pub l_p: i64,
    pub l_c: i64,
}

impl OamBeams {
    pub fn l(&self) -> i64 {
        self.l_p - self.l_c
    }

    /// State `s` at the point `(theta, phi)` of the parameter sphere.
    pub fn state(&self, s: LambdaState, theta: f64, phi: f64) -> StateVector {
        let p = LambdaParams::from_chart(1.0, theta, self.l_p as f64 * phi, self.l_c as f64 * phi);
        dark_bright_states(&p).expect("unit radius, resonant").get(s).clone()
    }

    /// Azimuthal connection `A_phi` of state `s` at `(theta, phi)` by a
    /// central difference in `phi`.
    pub fn connection_phi(&self, s: LambdaState, theta: f64, phi: f64) -> f64 {
        let h = 1e-6;
        let here = self.state(s, theta, phi);
        let d = (self.state(s, theta, phi + h) - self.state(s, theta, phi - h)) / c64(2.0 * h, 0.0);
        (c64(0.0, 1.0) * here.dotc(&d)).re
    }
}

/// A diagonal traceless charge with rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeMatrix {
    diag: Vec<Rational64>,
}

impl ChargeMatrix {
    pub fn new(diag: Vec<Rational64>) -> Result<Self, LambdaError> {
        if diag.is_empty() {
            return Err(LambdaError::BadArgument("charge matrix needs at least one entry".into()));
        }
        let trace: Rational64 = diag.iter().copied().sum();
        if !trace.is_zero() {
            return Err(LambdaError::NotTraceless(trace));
        }
        Ok(Self { diag })
    }

    pub fn diag(&self) -> &[Rational64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> Rational64 {
        self.diag.iter().copied().sum()
    }

    pub fn scaled(&self, k: Rational64) -> Self {
        Self {
            diag: self.diag.iter().map(|q| q * k).collect(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.diag.iter().map(|q| ratio_to_f64(*q)).collect()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.to_f64().into_iter().map(|x| c64(x, 0.0)).collect();
        ComplexMatrix::from_diagonal(&StateVector::from_vec(d))
    }

    /// `exp(i 4 pi Q)`. Entries are reduced modulo 1 before exponentiating so
    /// that integers map to exactly `1`.
    pub fn exp_i4pi(&self) -> ComplexMatrix {
        let d: Vec<C64> = self
            .diag
            .iter()
            .map(|q| {
                let twice = q * Rational64::from_integer(2);
                let frac = twice - twice.floor();
                cis(std::f64::consts::TAU * ratio_to_f64(frac))
            })
            .collect();
        ComplexMatrix::from_diagonal(&StateVector::from_vec(d))
    }

    /// Entries `q_i` of `Q = -(1/2) diag(q_i)`.
    pub fn q_values(&self) -> Vec<Rational64> {
        self.diag.iter().map(|d| d * Rational64::from_integer(-2)).collect()
    }

    /// SU(n) quantization: every `q_i` is an integer.
    pub fn su_n_quantized(&self) -> bool {
        self.q_values().iter().all(|q| q.is_integer())
    }

    /// SU(n)/Z_n quantization: `q_i = p/n + integer` with a common integer `p`.
    pub fn su_n_mod_center_quantized(&self) -> bool {
        let q = self.q_values();
        let n = Rational64::from_integer(q.len() as i64);
        (q[0] * n).is_integer() && q.iter().all(|x| (x - q[0]).is_integer())
    }
}

impl fmt::Display for ChargeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.diag.iter().map(|q| q.to_string()).collect();
        write!(f, "diag({})", parts.join(", "))
    }
}

impl Serialize for ChargeMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.diag.iter().map(|q| q.to_string()).collect();
        parts.serialize(serializer)
    }
}

pub fn ratio_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// `Q_0 = (1/2) diag(-1, 1/2, 1/2)`.
pub fn charge_matrix_basic() -> ChargeMatrix {
    ChargeMatrix::new(vec![r(-1, 2), r(1, 4), r(1, 4)]).expect("traceless")
}

/// `Q_l = (1/2) diag(-l, l/2, l/2)` with `l = l_p - l_c`.
pub fn charge_matrix_oam(b: &OamBeams) -> ChargeMatrix {
    let l = b.l();
    ChargeMatrix::new(vec![r(-l, 2), r(l, 4), r(l, 4)]).expect("traceless")
}

/// `Q = (1/2) diag(n1, n2 - n1, -n2)`.
pub fn cartan_charge(n1: i64, n2: i64) -> ChargeMatrix {
    ChargeMatrix::new(vec![r(n1, 2), r(n2 - n1, 2), r(-n2, 2)]).expect("traceless")
}

/// The same Cartan form with prefactor `1/4`, the general Lambda-type charge.
/// Equal to half of [`cartan_charge`].
pub fn cartan_charge_quarter(n1: i64, n2: i64) -> ChargeMatrix {
    cartan_charge(n1, n2).scaled(r(1, 2))
}

/// `Gamma_1 = (1/2) diag(1, -1, 0)`.
pub fn gamma1() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&StateVector::from_vec(vec![c64(0.5, 0.0), c64(-0.5, 0.0), c64(0.0, 0.0)]))
}

/// `Gamma_2 = diag(1, 1, -2) / (2 sqrt 3)`.
pub fn gamma2() -> ComplexMatrix {
    let k = 1.0 / (2.0 * 3.0_f64.sqrt());
    ComplexMatrix::from_diagonal(&StateVector::from_vec(vec![c64(k, 0.0), c64(k, 0.0), c64(-2.0 * k, 0.0)]))
}

/// `Q = spin Gamma_1 + hyper sqrt(3) Gamma_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CartanDecomposition {
    /// Coefficient of `Gamma_1`, which becomes `S . R_hat` after rotation.
    #[serde(serialize_with = "ser_ratio")]
    pub spin: Rational64,
    /// The `Gamma_2` coefficient divided by `sqrt 3`.
    #[serde(serialize_with = "ser_ratio")]
    pub hyper_over_sqrt3: Rational64,
}

fn ser_ratio<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl CartanDecomposition {
    pub fn hypercharge(&self) -> f64 {
        ratio_to_f64(self.hyper_over_sqrt3) * 3.0_f64.sqrt()
    }

    /// Rebuild the diagonal: `spin (1/2, -1/2, 0) + (hyper/2) (1, 1, -2)`.
    pub fn reassemble(&self) -> ChargeMatrix {
        let h = self.hyper_over_sqrt3 * r(1, 2);
        let s = self.spin * r(1, 2);
        ChargeMatrix::new(vec![s + h, -s + h, h * Rational64::from_integer(-2)]).expect("traceless")
    }
}

/// Coefficients on `Gamma_1` and `Gamma_2` by trace inner products,
/// `spin = 2 tr(Q Gamma_1)`, `hyper = 2 tr(Q Gamma_2)`.
pub fn spin_hypercharge_decomposition(q: &ChargeMatrix) -> Result<CartanDecomposition, LambdaError> {
    if q.dim() != 3 {
        return Err(LambdaError::NotInCartanSpan(format!("expected a 3x3 charge, got {}x{}", q.dim(), q.dim())));
    }
    let [a, b, c] = [q.diag[0], q.diag[1], q.diag[2]];
    Ok(CartanDecomposition {
        spin: a - b,
        hyper_over_sqrt3: (a + b - c * Rational64::from_integer(2)) / Rational64::from_integer(3),
    })
}

/// Floating-point decomposition of a general 3x3 matrix, refusing anything
/// outside the Cartan span.
pub fn decompose_matrix(m: &ComplexMatrix) -> Result<(f64, f64), LambdaError> {
    if m.nrows() != 3 || m.ncols() != 3 {
        return Err(LambdaError::NotInCartanSpan("expected a 3x3 matrix".into()));
    }
    let spin = 2.0 * (m * gamma1()).trace().re;
    let hyper = 2.0 * (m * gamma2()).trace().re;
    let rebuilt = gamma1() * c64(spin, 0.0) + gamma2() * c64(hyper, 0.0);
    let residual = max_abs(&(m - rebuilt));
    if residual > 1e-12 * max_abs(m).max(1.0) {
        return Err(LambdaError::NotInCartanSpan(format!("residual {residual:.3e}")));
    }
    Ok((spin, hyper))
}

/// The rotation acting on the `(|1>, |2>)` block,
/// `[[c e^{-i phi/2}, s e^{i phi/2}, 0], [-s e^{-i phi/2}, c e^{i phi/2}, 0], [0, 0, 1]]`.
pub fn su3_gauge_transform(theta: f64, phi: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(3, 3);
    // the upper block is the two-level rotation with phi reversed
    let block = two_level::spin_gauge_transform(theta, -phi);
    u.view_mut((0, 0), (2, 2)).copy_from(&block);
    u
}

/// `S . R_hat` on the `(|1>, |2>)` block at polar angle `theta` and azimuth `phi`.
pub fn embedded_spin_projection(theta: f64, phi: f64) -> ComplexMatrix {
    let [s1, s2, s3] = two_level::spin_half_operators();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let block = s1 * c64(st * cp, 0.0) + s2 * c64(st * sp, 0.0) + s3 * c64(ct, 0.0);
    let mut m = ComplexMatrix::zeros(3, 3);
    m.view_mut((0, 0), (2, 2)).copy_from(&block);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eigensolve_hermitian, is_unitary};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn resonant_spectrum() {
        let p = LambdaParams {
            omega_p: c64(0.3, 0.4),
            omega_c: c64(-0.6, 0.2),
            delta: 0.0,
        };
        let eig = eigensolve_hermitian(&lambda_hamiltonian(&p)).unwrap();
        let r = p.rabi();
        assert_abs_diff_eq!(eig.values[0], -0.5 * r, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[2], 0.5 * r, epsilon = 1e-12);
        let s = dark_bright_states(&p).unwrap();
        assert!((eig.vector(1).dotc(&s.dark).norm() - 1.0).abs() < 1e-10);
        assert!((lambda_hamiltonian(&p) * &s.dark).norm() < 1e-12);
        for (st, k) in [(LambdaState::Plus, 2), (LambdaState::Minus, 0)] {
            assert!((eig.vector(k).dotc(s.get(st)).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dark_state_examples() {
        let p = LambdaParams {
            omega_p: c64(0.0, 0.0),
            omega_c: c64(1.0, 0.0),
            delta: 0.0,
        };
        let d = dark_bright_states(&p).unwrap().dark;
        assert_abs_diff_eq!(d[0].norm(), 1.0, epsilon = 1e-15);
        let p = LambdaParams {
            omega_p: c64(1.0, 0.0),
            omega_c: c64(1.0, 0.0),
            delta: 0.0,
        };
        let d = dark_bright_states(&p).unwrap().dark;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!((d[0] - c64(-h, 0.0)).norm() + (d[1] - c64(h, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let zero = LambdaParams {
            omega_p: c64(0.0, 0.0),
            omega_c: c64(0.0, 0.0),
            delta: 0.0,
        };
        assert_eq!(dark_bright_states(&zero), Err(LambdaError::ZeroField));
        assert!(matches!(
            dark_bright_states(&LambdaParams { delta: 0.1, ..p }),
            Err(LambdaError::NotResonant(_))
        ));
    }

    #[test]
    fn psi_loop_holonomy() {
        // psi runs 0 -> 2 pi with phi fixed: phi_p = phi_c = t / 2
        let n = 2000;
        let ts: Vec<f64> = (0..n).map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64).collect();
        let samples = induced_connection(
            |t| ChartPoint {
                theta: 1.1,
                phi_p: 0.5 * t,
                phi_c: 0.5 * t,
            },
            &ts,
        )
        .unwrap();
        let dt = 2.0 * PI / n as f64;
        let hol = |s: LambdaState| -> f64 { samples.iter().filter(|x| x.state == s).map(|x| x.numerical * dt).sum() };
        assert_abs_diff_eq!(hol(LambdaState::Dark), -PI, epsilon = 1e-8);
        assert_abs_diff_eq!(hol(LambdaState::Plus), 0.5 * PI, epsilon = 1e-8);
        assert_abs_diff_eq!(hol(LambdaState::Minus), 0.5 * PI, epsilon = 1e-8);
    }

    #[test]
    fn chart_poles_are_refused() {
        let err = induced_connection(
            |t| ChartPoint {
                theta: 0.0,
                phi_p: t,
                phi_c: 0.0,
            },
            &[0.1],
        );
        assert!(matches!(err, Err(LambdaError::ChartSingular(_))));
    }

    #[test]
    fn basic_charge() {
        let q = charge_matrix_basic();
        assert!(q.trace().is_zero());
        let e = q.exp_i4pi();
        let want = [1.0, -1.0, -1.0];
        for (k, w) in want.iter().enumerate() {
            assert!((e[(k, k)] - c64(*w, 0.0)).norm() < 1e-12);
        }
        assert_eq!(q, charge_matrix_oam(&OamBeams { l_p: 1, l_c: 0 }));
        assert!(!q.su_n_quantized());
        assert!(!q.su_n_mod_center_quantized());
    }

    #[test]
    fn oam_charge_l2() {
        let q = charge_matrix_oam(&OamBeams { l_p: 3, l_c: 1 });
        assert_eq!(q.diag(), &[r(-1, 1), r(1, 2), r(1, 2)]);
    }

    #[test]
    fn cartan_examples() {
        assert!(cartan_charge(0, 0).diag().iter().all(|q| q.is_zero()));
        assert_eq!(cartan_charge(1, 0).diag(), &[r(1, 2), r(-1, 2), r(0, 1)]);
        for n1 in -5..=5 {
            for n2 in -5..=5 {
                let q = cartan_charge(n1, n2);
                assert!(q.su_n_quantized());
                let e = q.exp_i4pi();
                assert!(max_abs(&(e - ComplexMatrix::identity(3, 3))) < 1e-12);
            }
        }
    }

    #[test]
    fn cartan_reproduces_oam_charge() {
        for l in -3..=3 {
            let b = OamBeams { l_p: l, l_c: 0 };
            assert_eq!(cartan_charge_quarter(-2 * l, -l), charge_matrix_oam(&b));
            assert_eq!(cartan_charge(-2 * l, -l), charge_matrix_oam(&b).scaled(r(2, 1)));
        }
    }

    #[test]
    fn decomposition_round_trip() {
        for l in [1, 2, -3] {
            let d = spin_hypercharge_decomposition(&cartan_charge(-2 * l, -l)).unwrap();
            assert_eq!(d.spin, r(-3 * l, 2));
            assert_eq!(d.hyper_over_sqrt3, r(-l, 2));
        }
        let d = spin_hypercharge_decomposition(&cartan_charge(2, 0)).unwrap();
        assert!(d.hyper_over_sqrt3.is_zero());
        let q = cartan_charge(3, -2);
        assert_eq!(spin_hypercharge_decomposition(&q).unwrap().reassemble(), q);
    }

    #[test]
    fn float_decomposition_refuses_off_diagonal() {
        let mut m = gamma1();
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(decompose_matrix(&m), Err(LambdaError::NotInCartanSpan(_))));
        let (s, h) = decompose_matrix(&(gamma1() * c64(2.0, 0.0) + gamma2() * c64(-0.5, 0.0))).unwrap();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h, -0.5, epsilon = 1e-14);
    }

    #[test]
    fn traceless_is_enforced() {
        assert!(matches!(ChargeMatrix::new(vec![r(1, 2), r(1, 2)]), Err(LambdaError::NotTraceless(_))));
    }

    #[test]
    fn gauge_transform_maps_to_spin_form() {
        let u = su3_gauge_transform(0.0, 0.8);
        assert!(u.iter().enumerate().all(|(k, z)| k % 4 == 0 || z.norm() == 0.0));
        let (theta, phi) = (1.2, 0.7);
        let u = su3_gauge_transform(theta, phi);
        assert!(is_unitary(&u, 1e-12));
        let q = cartan_charge(-4, -2);
        let d = spin_hypercharge_decomposition(&q).unwrap();
        let rotated = u.adjoint() * q.to_matrix() * &u;
        let want = embedded_spin_projection(theta, -phi) * c64(ratio_to_f64(d.spin), 0.0)
            + gamma2() * c64(d.hypercharge(), 0.0);
        assert!(max_abs(&(rotated - want)) < 1e-10);
    }
}
