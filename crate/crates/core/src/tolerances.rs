//! Numerical thresholds in one place.
//!
//! The `const` items are algorithmic guards used inside the kernels. The
//! [`Tolerances`] record holds the pass/fail thresholds of the verification
//! suite; it can be deserialized from a config file (missing keys fall back to
//! the defaults) and uniformly scaled from the command line.

use serde::{Deserialize, Serialize};

/// Max entrywise `|M - M^dagger|`, relative to `max(1, max|M|)`.
pub const HERMITICITY: f64 = 1e-10;
/// Adjacent eigenvalue gap, relative to the spectral range, below which an
/// eigensystem is flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Exclusion radius around a diabolical point.
pub const DP_EXCLUSION: f64 = 1e-6;
/// Angular distance to the Dirac string below which contours are rejected.
pub const STRING_EXCLUSION: f64 = 1e-6;
/// Relative denominator size below which a string potential is undefined.
pub const ON_STRING: f64 = 1e-10;
/// Band gap below which the curvature-as-sum is refused.
pub const NEAR_DEGENERATE: f64 = 1e-8;
/// Minimum mode overlap accepted when following a quasienergy branch.
pub const BRANCH_OVERLAP: f64 = 0.9;
/// Largest quasienergy shift tolerated between cutoffs `P` and `P + 2`.
pub const CUTOFF_CONVERGENCE: f64 = 1e-8;
/// Relative step for derivatives with respect to the drive frequency.
pub const OMEGA_STEP: f64 = 1e-5;
/// Largest per-sample overlap argument accepted by the direct phase.
pub const UNDERSAMPLED_ARG: f64 = std::f64::consts::FRAC_PI_4;
/// Distance to the nearest integer above which a Chern sum is rejected.
pub const CHERN_INTEGER: f64 = 1e-3;
/// Closest approach to the monopole allowed in the orbit integrator.
pub const ORIGIN_APPROACH: f64 = 1e-9;
/// Chart exclusion around the poles of the Lambda-system sphere.
pub const CHART_POLE: f64 = 1e-6;

/// Acceptance thresholds. Field names follow the criterion they gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub holonomy: f64,
    pub holonomy_runtime_s: f64,
    pub chern_integer: f64,
    pub chern_runtime_s: f64,
    pub floquet_identity: f64,
    pub floquet_spectrum: f64,
    pub susceptibility: f64,
    pub matrix_element: f64,
    pub spin_projection: f64,
    pub resonator_floquet: f64,
    pub resonator_closed_form: f64,
    pub adiabatic_relative: f64,
    pub spin_j: f64,
    pub commutator: f64,
    pub center_element: f64,
    pub sphere_flux: f64,
    pub lambda_connection: f64,
    pub orbit_j: f64,
    pub orbit_radius: f64,
    pub orbit_cone: f64,
    pub orbit_reversal: f64,
    pub orbit_runtime_s: f64,
    pub string_gauge: f64,
    pub string_curl: f64,
    pub suite_runtime_s: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            holonomy: 1e-6,
            holonomy_runtime_s: 1.0,
            chern_integer: 1e-9,
            chern_runtime_s: 2.0,
            floquet_identity: 1e-5,
            floquet_spectrum: 1e-10,
            susceptibility: 1e-6,
            matrix_element: 1e-6,
            spin_projection: 1e-8,
            resonator_floquet: 1e-5,
            resonator_closed_form: 1e-8,
            adiabatic_relative: 2e-2,
            spin_j: 1e-9,
            commutator: 1e-12,
            center_element: 1e-12,
            sphere_flux: 1e-8,
            lambda_connection: 1e-8,
            orbit_j: 1e-8,
            orbit_radius: 1e-6,
            orbit_cone: 1e-8,
            orbit_reversal: 1e-8,
            orbit_runtime_s: 1.0,
            string_gauge: 1e-10,
            string_curl: 1e-6,
            suite_runtime_s: 60.0,
        }
    }
}

impl Tolerances {
    /// Multiply every accuracy threshold by `factor`. Runtime budgets are
    /// left alone.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |x: f64| x * factor;
        Self {
            holonomy: s(self.holonomy),
            chern_integer: s(self.chern_integer),
            floquet_identity: s(self.floquet_identity),
            floquet_spectrum: s(self.floquet_spectrum),
            susceptibility: s(self.susceptibility),
            matrix_element: s(self.matrix_element),
            spin_projection: s(self.spin_projection),
            resonator_floquet: s(self.resonator_floquet),
            resonator_closed_form: s(self.resonator_closed_form),
            adiabatic_relative: s(self.adiabatic_relative),
            spin_j: s(self.spin_j),
            commutator: s(self.commutator),
            center_element: s(self.center_element),
            sphere_flux: s(self.sphere_flux),
            lambda_connection: s(self.lambda_connection),
            orbit_j: s(self.orbit_j),
            orbit_radius: s(self.orbit_radius),
            orbit_cone: s(self.orbit_cone),
            orbit_reversal: s(self.orbit_reversal),
            string_gauge: s(self.string_gauge),
            string_curl: s(self.string_curl),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_falls_back_to_defaults() {
        let t: Tolerances = serde_json::from_str(r#"{"holonomy": 1e-3}"#).unwrap();
        assert_eq!(t.holonomy, 1e-3);
        assert_eq!(t.chern_integer, Tolerances::default().chern_integer);
    }

    #[test]
    fn scaling_leaves_runtimes() {
        let t = Tolerances::default().scaled(0.01);
        assert_eq!(t.suite_runtime_s, 60.0);
        assert!((t.holonomy - 1e-8).abs() < 1e-20);
    }
}
