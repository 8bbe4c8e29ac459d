//! The two-level diabolical point: eigen-structure, Berry connection and
//! curvature, string-gauge vector potentials, the spin-frame rotation and
//! Bloch precession.
//!
//! The Hamiltonian is `H = (lambda0 + R . sigma) / 2`. The band `+` is the
//! upper level and carries monopole charge `-1/2`; the band `-` carries
//! `+1/2`. The analytic eigenvectors put the Dirac string on the negative
//! `z` axis (`theta = pi`).

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, c64, cis, ComplexMatrix, NumericsError, Phase, StateVector};
use crate::parameter_space::{Contour, GeometryError, ParamPoint};
use crate::tolerances::{DP_EXCLUSION, NEAR_DEGENERATE, ON_STRING, STRING_EXCLUSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoLevelError {
    #[error("contour sample {index} is within {distance:.2e} rad of the Dirac string")]
    StringCrossing { index: usize, distance: f64 },
    #[error("point lies on the string of the vector potential")]
    OnString,
    #[error("point is within the exclusion radius of the diabolical point (r = {0:.2e})")]
    AtDiabolicalPoint(f64),
    #[error("band gap {0:.2e} is too small for the curvature sum")]
    NearDegenerate(f64),
    #[error("string direction must be a nonzero vector")]
    BadDirection,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandIndex {
    Plus,
    Minus,
}

impl BandIndex {
    pub const BOTH: [BandIndex; 2] = [BandIndex::Plus, BandIndex::Minus];

    /// Monopole charge `q = -1/2` for the upper band, `+1/2` for the lower.
    pub fn charge(self) -> f64 {
        match self {
            BandIndex::Plus => -0.5,
            BandIndex::Minus => 0.5,
        }
    }

    /// `+1` for the upper band, `-1` for the lower.
    pub fn sign(self) -> f64 {
        match self {
            BandIndex::Plus => 1.0,
            BandIndex::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub lambda0: f64,
    pub point: ParamPoint,
}

impl TwoLevelParams {
    pub fn new(lambda0: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            lambda0,
            point: ParamPoint::from_cartesian(x, y, z),
        }
    }

    pub fn energy(&self, band: BandIndex) -> f64 {
        0.5 * (self.lambda0 + band.sign() * self.point.r())
    }
}

pub fn hamiltonian(p: &TwoLevelParams) -> ComplexMatrix {
    let (x, y, z) = (p.point.x(), p.point.y(), p.point.z());
    let l = p.lambda0;
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            c64(0.5 * (l + z), 0.0),
            c64(0.5 * x, -0.5 * y),
            c64(0.5 * x, 0.5 * y),
            c64(0.5 * (l - z), 0.0),
        ],
    )
}

/// Derivatives `dH/dX`, `dH/dY`, `dH/dZ`, i.e. `sigma_i / 2`.
pub fn hamiltonian_gradient() -> [ComplexMatrix; 3] {
    let [sx, sy, sz] = spin_half_operators();
    [sx, sy, sz]
}

/// `S = sigma / 2`.
pub fn spin_half_operators() -> [ComplexMatrix; 3] {
    let z = c64(0.0, 0.0);
    let h = c64(0.5, 0.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[z, h, h, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, c64(0.0, -0.5), c64(0.0, 0.5), z]),
        ComplexMatrix::from_row_slice(2, 2, &[h, z, z, -h]),
    ]
}

/// `|u+> = (cos theta/2, e^{i phi} sin theta/2)`,
/// `|u-> = (-e^{-i phi} sin theta/2, cos theta/2)`.
pub fn analytic_eigvec(band: BandIndex, theta: f64, phi: f64) -> StateVector {
    let (s, c) = (0.5 * theta).sin_cos();
    match band {
        BandIndex::Plus => StateVector::from_vec(vec![c64(c, 0.0), cis(phi) * s]),
        BandIndex::Minus => StateVector::from_vec(vec![-cis(-phi) * s, c64(c, 0.0)]),
    }
}

/// Coefficient of `d phi` in the connection of the analytic eigenvectors.
pub fn berry_connection_angular(band: BandIndex, theta: f64) -> f64 {
    band.charge() * (1.0 - theta.cos())
}

fn check_string(c: &Contour) -> Result<(), TwoLevelError> {
    for (index, p) in c.points().iter().enumerate() {
        let distance = PI - p.theta();
        if distance < STRING_EXCLUSION {
            return Err(TwoLevelError::StringCrossing { index, distance });
        }
    }
    Ok(())
}

/// Berry phase of `band` around `c` from the discrete overlap product of the
/// analytic eigenvectors, `gamma = -arg prod <u_k|u_{k+1}>`.
///
/// The unreduced value is the sum of the per-segment arguments, which in the
/// analytic gauge is the discretized line integral of the connection.
pub fn berry_phase_contour(band: BandIndex, c: &Contour) -> Result<Phase, TwoLevelError> {
    check_string(c)?;
    let states: Vec<StateVector> = c
        .points()
        .iter()
        .map(|p| analytic_eigvec(band, p.theta(), p.phi()))
        .collect();
    let (gamma, _) = numerics::loop_overlap_phase(&states);
    Ok(Phase::new(gamma))
}

/// A unit vector fixing the direction of a Dirac string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringDirection(Vector3<f64>);

impl StringDirection {
    pub fn new(v: Vector3<f64>) -> Result<Self, TwoLevelError> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(TwoLevelError::BadDirection);
        }
        Ok(Self(v / norm))
    }

    /// The string along the negative `z` axis, matching the analytic
    /// eigenvectors.
    pub fn south() -> Self {
        Self(-Vector3::z())
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    pub fn flipped(&self) -> Self {
        Self(-self.0)
    }
}

impl Default for StringDirection {
    fn default() -> Self {
        Self::south()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StringScheme {
    /// Semi-infinite string along `n`.
    Dirac,
    /// Infinite string along `+n` and `-n`, each carrying half the flux.
    Schwinger,
}

/// Monopole vector potential of charge `q` with a string along `n`.
pub fn string_potential(
    q: f64,
    n: &StringDirection,
    p: &Vector3<f64>,
    scheme: StringScheme,
) -> Result<Vector3<f64>, TwoLevelError> {
    let r = p.norm();
    if !(r > 0.0) {
        return Err(TwoLevelError::OnString);
    }
    let n = n.vector();
    let along = n.dot(p);
    let cross = p.cross(&n);
    match scheme {
        StringScheme::Dirac => {
            let gap = r - along;
            if gap < ON_STRING * r {
                return Err(TwoLevelError::OnString);
            }
            Ok(cross * (q / (r * gap)))
        }
        StringScheme::Schwinger => {
            let gap = r * r - along * along;
            if gap < ON_STRING * r * r {
                return Err(TwoLevelError::OnString);
            }
            Ok(cross * (q * along / (r * gap)))
        }
    }
}

/// Line integral of the Dirac potential of `band` along the chords joining
/// consecutive contour samples (three-point Gauss rule per chord). On a
/// sphere about the monopole each chord carries the same flux as the
/// geodesic arc it subtends.
pub fn dirac_line_integral(band: BandIndex, c: &Contour, n: &StringDirection) -> Result<f64, TwoLevelError> {
    const NODES: [(f64, f64); 3] = [
        (-0.774_596_669_241_483_4, 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        (0.774_596_669_241_483_4, 5.0 / 9.0),
    ];
    let q = band.charge();
    let mut total = 0.0;
    for (a, b) in c.segments() {
        let (a, b) = (a.vector(), b.vector());
        let chord = b - a;
        let mut seg = 0.0;
        for (x, w) in NODES {
            let t = 0.5 * (1.0 + x);
            let at = a + chord * t;
            seg += 0.5 * w * string_potential(q, n, &at, StringScheme::Dirac)?.dot(&chord);
        }
        total += seg;
    }
    Ok(total)
}

/// Berry curvature of `band` from the sum over the other level:
///
/// `F_ab = -2 Im sum_m <n|dH_a|m><m|dH_b|n> / (E_m - E_n)^2`.
///
/// The sign makes `F = dA` for `A = i <n|dn>`, so that the upper band gives
/// `F_xy = -Z / (2 r^3)`. Returned as an antisymmetric matrix.
pub fn curvature_from_sum(p: &TwoLevelParams, band: BandIndex) -> Result<Matrix3<f64>, TwoLevelError> {
    let r = p.point.r();
    if r <= DP_EXCLUSION {
        return Err(TwoLevelError::AtDiabolicalPoint(r));
    }
    let eig = numerics::eigensolve_hermitian(&hamiltonian(p))?;
    let gap = eig.values[1] - eig.values[0];
    if gap < NEAR_DEGENERATE {
        return Err(TwoLevelError::NearDegenerate(gap));
    }
    let (n, m) = match band {
        BandIndex::Plus => (1, 0),
        BandIndex::Minus => (0, 1),
    };
    let vn = eig.vector(n);
    let vm = eig.vector(m);
    let grad = hamiltonian_gradient();
    // <n|dH_a|m> for each direction
    let elems: Vec<_> = grad.iter().map(|g| vn.dotc(&(g * &vm))).collect();
    let denom = (eig.values[m] - eig.values[n]).powi(2);
    let mut f = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                let prod = elems[a] * elems[b].conj();
                f[(a, b)] = -2.0 * prod.im / denom;
            }
        }
    }
    Ok(f)
}

/// Closed-form curvature `F_ij = q eps_ijk R_k / r^3`.
pub fn curvature_closed_form(p: &ParamPoint, band: BandIndex) -> Matrix3<f64> {
    let r3 = p.r().powi(3);
    let b = p.vector() * (band.charge() / r3);
    Matrix3::new(0.0, b.z, -b.y, -b.z, 0.0, b.x, b.y, -b.x, 0.0)
}

/// The rotation `U(theta, phi)` with
/// `U^dagger (lambda0/2 + R S_3) U = lambda0/2 + R . S`.
pub fn spin_gauge_transform(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = cis(0.5 * phi);
    let ec = e.conj();
    ComplexMatrix::from_row_slice(2, 2, &[e * c, ec * s, -e * s, ec * c])
}

/// Rotate the diagonal form `lambda0/2 + R S_3` with [`spin_gauge_transform`].
pub fn rotate_diagonal_form(p: &TwoLevelParams) -> ComplexMatrix {
    let u = spin_gauge_transform(p.point.theta(), p.point.phi());
    let [_, _, s3] = spin_half_operators();
    let diag = ComplexMatrix::identity(2, 2).scale(0.5 * p.lambda0) + s3.scale(p.point.r());
    u.adjoint() * diag * u
}

/// RK4 integration of the Bloch equation `dS/dt = S x R`. The returned
/// trajectory includes the initial vector.
pub fn bloch_evolution(s0: Vector3<f64>, r: Vector3<f64>, t_final: f64, dt: f64) -> Vec<Vector3<f64>> {
    let rhs = |s: &Vector3<f64>| s.cross(&r);
    let steps = (t_final / dt).round().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(s);
    for _ in 0..steps {
        let k1 = rhs(&s);
        let k2 = rhs(&(s + k1 * (0.5 * dt)));
        let k3 = rhs(&(s + k2 * (0.5 * dt)));
        let k4 = rhs(&(s + k3 * dt));
        s += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        out.push(s);
    }
    out
}
