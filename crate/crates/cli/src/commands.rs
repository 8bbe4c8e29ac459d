//! One function per subcommand, each producing a [`Table`].

use clap::Args;
use monopole_core::chern::{chern_number, diagonal_flux, flux_of_connection, ChernResult, SphereGrid};
use monopole_core::floquet::{mode_residual, phase_gap, quasienergies, PeriodicHamiltonian};
use monopole_core::models::{qubit_resonator_semiclassical, rwa_qubit, spin_j_periodic};
use monopole_core::su3_lambda::{charge_matrix_oam, LambdaState};
use monopole_core::two_level::BandIndex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{resolve, Config};
use crate::error::CliError;
use crate::models::{
    band_label, same_zone, jaynes_bands, lambda_dark_chern, latitude_phase, mode_report, run_orbit, rwa_bands, spin_coherent_state,
    spinj_levels, two_level_chern, two_level_holonomies, orbit_residual, JaynesConfig, LambdaConfig, OrbitConfig,
    RwaConfig, SpinjConfig, TwoLevelConfig,
};
use crate::output::{Cell, Table};

fn echo<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

// Flag records serialize only what was given, so that they can be laid over
// the defaults.

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct TwoLevelArgs {
    /// Contour polar angle in radians; repeat for several contours
    #[arg(long = "theta", allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Points per contour
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn two_level(args: &TwoLevelArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: TwoLevelConfig = resolve(TwoLevelConfig::default(), args, config, "two_level")?;
    let mut t = Table::new(
        "two-level",
        &["theta", "band", "solid_angle", "gamma", "gamma_closed", "residual"],
        echo(&c),
    );
    for h in two_level_holonomies(&c)? {
        let closed = latitude_phase(h.band, h.theta);
        t.push(vec![
            h.theta.into(),
            band_label(h.band).into(),
            h.solid_angle.into(),
            h.gamma.into(),
            closed.into(),
            phase_gap(h.gamma, closed).into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct OrbitArgs {
    /// Impact parameter
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Speed
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Mass
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Product of electric and magnetic charge
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Print every n-th step
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

pub fn orbit(args: &OrbitArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: OrbitConfig = resolve(OrbitConfig::default(), args, config, "orbit")?;
    let run = run_orbit(&c)?;
    let mut t = Table::new(
        "orbit",
        &["t", "x", "y", "z", "vx", "vy", "vz", "r", "radius_residual", "j_residual", "cone_cos"],
        echo(&c),
    );
    let last = run.states.len() - 1;
    for (i, (time, s)) in run.times.iter().zip(&run.states).enumerate() {
        if i % c.stride != 0 && i != last {
            continue;
        }
        let res = orbit_residual(&run, &c, *time, s);
        t.push(vec![
            (*time).into(),
            s.r.x.into(),
            s.r.y.into(),
            s.r.z.into(),
            s.v.x.into(),
            s.v.y.into(),
            s.v.z.into(),
            s.r.norm().into(),
            res.radius.into(),
            res.j.into(),
            res.cone_cos.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FloquetModel {
    Rwa,
    Jaynes,
    Spinj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FloquetConfig {
    model: FloquetModel,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FloquetArgs {
    /// Model whose config section supplies the parameters
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<FloquetModel>,
}

/// Every physical Floquet mode of a model, straight from the truncated matrix.
pub fn floquet(args: &FloquetArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let f: FloquetConfig = resolve(FloquetConfig { model: FloquetModel::Rwa }, args, config, "floquet")?;
    let none = serde_json::Map::new();
    let (h, geometry, cutoff, samples, params): (PeriodicHamiltonian, _, _, _, Value) = match f.model {
        FloquetModel::Rwa => {
            let c: RwaConfig = resolve(RwaConfig::default(), &none, config, "rwa")?;
            let p = c.params()?;
            (rwa_qubit(&p)?, p.geometry(), c.cutoff, c.samples, echo(&c))
        }
        FloquetModel::Jaynes => {
            let c: JaynesConfig = resolve(JaynesConfig::default(), &none, config, "jaynes")?;
            let q = c.params()?;
            (qubit_resonator_semiclassical(&q)?, q.geometry(), c.cutoff, c.samples, echo(&c))
        }
        FloquetModel::Spinj => {
            let c: SpinjConfig = resolve(SpinjConfig::default(), &none, config, "spinj")?;
            let p = c.params()?;
            (spin_j_periodic(&p)?, p.geometry()?, c.cutoff, c.samples, echo(&c))
        }
    };
    let spec = quasienergies(&h, cutoff)?;
    let mut t = Table::new(
        "floquet",
        &[
            "mode",
            "quasienergy",
            "folded",
            "mean_harmonic",
            "gamma_direct",
            "gamma_hf",
            "spin_projection",
            "residual",
        ],
        serde_json::json!({ "model": f.model, "model_params": params }),
    );
    for (k, mode) in spec.modes.iter().enumerate() {
        let r = mode_report(&h, mode, &geometry, samples)?;
        t.push(vec![
            (k as i64).into(),
            mode.energy.into(),
            r.quasienergy.into(),
            r.mean_harmonic.into(),
            r.gamma_direct.into(),
            r.gamma_hf.into(),
            r.spin_projection.into(),
            mode_residual(&h, mode)?.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct RwaArgs {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    /// Detuning from resonance
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_im: Option<f64>,
    /// Coupling strength
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Drive frequency
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn rwa(args: &RwaArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: RwaConfig = resolve(RwaConfig::default(), args, config, "rwa")?;
    let p = c.params()?;
    let mut t = Table::new(
        "rwa",
        &[
            "band",
            "quasienergy",
            "quasienergy_floquet",
            "gamma",
            "gamma_hf",
            "gamma_direct",
            "chi",
            "chi_floquet",
            "matrix_element",
            "spin_projection",
        ],
        echo(&c),
    );
    for b in rwa_bands(&c, true)? {
        t.push(vec![
            band_label(b.band).into(),
            p.quasienergy(b.band, 0).into(),
            same_zone(b.mode.quasienergy, p.quasienergy(b.band, 0), p.omega).into(),
            p.geometric_phase(b.band, 0).into(),
            b.mode.gamma_hf.into(),
            b.mode.gamma_direct.into(),
            p.susceptibility(b.band).into(),
            b.chi.into(),
            b.matrix_element.into(),
            b.mode.spin_projection.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct JaynesArgs {
    /// Qubit splitting
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_q: Option<f64>,
    /// Resonator frequency
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Photon number
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Coherent amplitude of the semiclassical drive
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn jaynes(args: &JaynesArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: JaynesConfig = resolve(JaynesConfig::default(), args, config, "jaynes")?;
    let q = c.params()?;
    let mut t = Table::new(
        "jaynes",
        &[
            "band",
            "n",
            "quasienergy",
            "gamma",
            "gamma_semiclassical",
            "gamma_floquet",
            "berry_limit",
            "spin_projection",
            "adiabaticity",
        ],
        echo(&c),
    );
    if q.weak_coherent_state() {
        eprintln!("warning: alpha = {} is small for the semiclassical substitution", q.alpha);
    }
    for (band, r) in jaynes_bands(&c)? {
        t.push(vec![
            band_label(band).into(),
            i64::from(q.n).into(),
            q.quasienergy(band).into(),
            q.geometric_phase(band).into(),
            q.semiclassical_phase(band).into(),
            r.gamma_hf.into(),
            q.berry_limit(band).into(),
            r.spin_projection.into(),
            q.adiabaticity().into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct SpinjArgs {
    /// Spin, a positive half-integer
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_im: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

pub fn spinj(args: &SpinjArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: SpinjConfig = resolve(SpinjConfig::default(), args, config, "spinj")?;
    let p = c.params()?;
    let mut t = Table::new(
        "spinj",
        &["m", "quasienergy", "quasienergy_floquet", "gamma", "gamma_hf", "spin_projection"],
        echo(&c),
    );
    for (m, r) in spinj_levels(&c)? {
        t.push(vec![
            m.into(),
            p.quasienergy(m).into(),
            same_zone(r.quasienergy, p.quasienergy(m), p.omega).into(),
            p.geometric_phase(m).into(),
            r.gamma_hf.into(),
            r.spin_projection.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct LambdaArgs {
    /// Orbital angular momentum of the pump beam
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_p: Option<i64>,
    /// Orbital angular momentum of the control beam
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_c: Option<i64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_phi: Option<usize>,
}

fn state_label(s: LambdaState) -> &'static str {
    match s {
        LambdaState::Dark => "dark",
        LambdaState::Plus => "plus",
        LambdaState::Minus => "minus",
    }
}

/// Connection coefficients, charges and sphere fluxes of the three states.
pub fn lambda(args: &LambdaArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: LambdaConfig = resolve(LambdaConfig::default(), args, config, "lambda")?;
    let grid = c.grid()?;
    let beams = c.beams();
    let q = charge_matrix_oam(&beams);
    let charge_flux = diagonal_flux(&q, &grid);
    let dark = lambda_dark_chern(&c)?;
    let mut t = Table::new(
        "lambda",
        &["state", "coefficient", "charge", "flux_connection", "flux_charge", "chern"],
        echo(&c),
    );
    for (i, s) in LambdaState::ALL.into_iter().enumerate() {
        let flux = flux_of_connection(|th, ph| beams.connection_phi(s, th, ph), &grid);
        let chern = if s == LambdaState::Dark { Cell::Int(dark.nearest()) } else { Cell::Empty };
        t.push(vec![
            state_label(s).into(),
            s.connection_coefficient().to_string().into(),
            q.diag()[i].to_string().into(),
            flux.into(),
            charge_flux[i].into(),
            chern,
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ChernModel {
    #[value(name = "two-level")]
    TwoLevel,
    Spinj,
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ChernConfig {
    model: ChernModel,
    j: f64,
    l_p: i64,
    l_c: i64,
    n_theta: usize,
    n_phi: usize,
}

impl Default for ChernConfig {
    fn default() -> Self {
        Self {
            model: ChernModel::TwoLevel,
            j: 1.0,
            l_p: 1,
            l_c: 0,
            n_theta: 100,
            n_phi: 200,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ChernArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ChernModel>,
    /// Spin of the spinj bands
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_p: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_c: Option<i64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_phi: Option<usize>,
}

/// Link-variable Chern numbers of every band of a model.
pub fn chern(args: &ChernArgs, config: Option<&Config>) -> Result<Table, CliError> {
    let c: ChernConfig = resolve(ChernConfig::default(), args, config, "chern")?;
    let grid = SphereGrid::new(c.n_theta, c.n_phi)?;
    let bands: Vec<(String, ChernResult)> = match c.model {
        ChernModel::TwoLevel => {
            let tl = TwoLevelConfig {
                n_theta: c.n_theta,
                n_phi: c.n_phi,
                ..TwoLevelConfig::default()
            };
            BandIndex::BOTH
                .iter()
                .map(|&b| Ok((band_label(b).to_string(), two_level_chern(&tl, b)?)))
                .collect::<Result<_, CliError>>()?
        }
        ChernModel::Spinj => {
            let dim = monopole_core::models::spin_matrices(c.j)?.dim();
            (0..dim)
                .map(|k| {
                    let m = c.j - k as f64;
                    Ok((format!("{m}"), chern_number(spin_coherent_state(c.j, k)?, &grid)?))
                })
                .collect::<Result<_, CliError>>()?
        }
        ChernModel::Lambda => {
            let l = LambdaConfig {
                l_p: c.l_p,
                l_c: c.l_c,
                n_theta: c.n_theta,
                n_phi: c.n_phi,
            };
            vec![("dark".to_string(), lambda_dark_chern(&l)?)]
        }
    };
    let mut t = Table::new("chern", &["band", "flux", "chern", "integer_residual"], echo(&c));
    for (label, r) in bands {
        t.push(vec![label.into(), r.flux.into(), Cell::Int(r.nearest()), r.integer_residual.into()]);
    }
    Ok(t)
}
