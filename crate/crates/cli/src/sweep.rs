//! Parameter sweeps over one or two fields of a model record.
//!
//! Points are evaluated concurrently on the global rayon pool; rows come out
//! in grid order (first parameter outermost). A point that fails keeps its
//! row, with the error in the `status` column, and the run exits with the
//! numerical-failure status after the table is written.

use clap::Args;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{resolve, Config};
use crate::error::CliError;
use crate::models::{
    band_label, jaynes_bands, lambda_dark_chern, orbit_summary, rwa_bands, spinj_levels, two_level_chern,
    two_level_holonomies, JaynesConfig, LambdaConfig, OrbitConfig, RwaConfig, SpinjConfig, TwoLevelConfig,
};
use crate::output::{Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Quasienergy,
    GammaDirect,
    GammaHf,
    Chi,
    SpinProjection,
    Chern,
    SolidAngle,
    Orbit,
}

impl Observable {
    pub const ALL: [Observable; 8] = [
        Observable::Quasienergy,
        Observable::GammaDirect,
        Observable::GammaHf,
        Observable::Chi,
        Observable::SpinProjection,
        Observable::Chern,
        Observable::SolidAngle,
        Observable::Orbit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Quasienergy => "quasienergy",
            Observable::GammaDirect => "gamma_direct",
            Observable::GammaHf => "gamma_hf",
            Observable::Chi => "chi",
            Observable::SpinProjection => "spin_projection",
            Observable::Chern => "chern",
            Observable::SolidAngle => "solid_angle",
            Observable::Orbit => "orbit",
        }
    }

    /// Output columns of the observable.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::Orbit => &["orbit_j_residual", "orbit_radius_residual", "orbit_reversal"],
            Observable::Quasienergy => &["quasienergy"],
            Observable::GammaDirect => &["gamma_direct"],
            Observable::GammaHf => &["gamma_hf"],
            Observable::Chi => &["chi"],
            Observable::SpinProjection => &["spin_projection"],
            Observable::Chern => &["chern"],
            Observable::SolidAngle => &["solid_angle"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepModel {
    Rwa,
    Jaynes,
    Spinj,
    TwoLevel,
    Orbit,
    Lambda,
}

impl SweepModel {
    fn section(self) -> &'static str {
        match self {
            SweepModel::Rwa => "rwa",
            SweepModel::Jaynes => "jaynes",
            SweepModel::Spinj => "spinj",
            SweepModel::TwoLevel => "two_level",
            SweepModel::Orbit => "orbit",
            SweepModel::Lambda => "lambda",
        }
    }

    fn supports(self, o: Observable) -> bool {
        use Observable::*;
        match self {
            SweepModel::Rwa => matches!(o, Quasienergy | GammaDirect | GammaHf | Chi | SpinProjection),
            SweepModel::Jaynes | SweepModel::Spinj => matches!(o, Quasienergy | GammaDirect | GammaHf | SpinProjection),
            SweepModel::TwoLevel => matches!(o, SolidAngle | GammaDirect | Chern),
            SweepModel::Orbit => o == Orbit,
            SweepModel::Lambda => o == Chern,
        }
    }

    fn defaults(self) -> Value {
        let v = match self {
            SweepModel::Rwa => serde_json::to_value(RwaConfig::default()),
            SweepModel::Jaynes => serde_json::to_value(JaynesConfig::default()),
            SweepModel::Spinj => serde_json::to_value(SpinjConfig::default()),
            SweepModel::TwoLevel => serde_json::to_value(TwoLevelConfig::default()),
            SweepModel::Orbit => serde_json::to_value(OrbitConfig::default()),
            SweepModel::Lambda => serde_json::to_value(LambdaConfig::default()),
        };
        v.expect("plain records serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub model: SweepModel,
    pub parameter: String,
    /// `(start, stop, count)`, endpoints included.
    pub range: (f64, f64, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range2: Option<(f64, f64, usize)>,
    pub outputs: Vec<Observable>,
    /// Overrides the global output format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            model: SweepModel::Rwa,
            parameter: "delta".into(),
            range: (-2.0, 2.0, 11),
            parameter2: None,
            range2: None,
            outputs: vec![Observable::Quasienergy, Observable::GammaHf],
            format: None,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct SweepArgs {
    /// rwa, jaynes, spinj, two_level, orbit or lambda
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Field of the model record to vary
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    /// start,stop,count
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_range")]
    pub range: Option<String>,
    /// Optional second field, swept inside the first
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter2: Option<String>,
    /// start,stop,count for the second field
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_range")]
    pub range2: Option<String>,
    /// Comma-separated observables
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

/// `"a,b,n"` as the array `[a, b, n]`; anything unparsable is passed through
/// as a string so that deserialization reports it.
fn ser_range<S: serde::Serializer>(r: &Option<String>, s: S) -> Result<S::Ok, S::Error> {
    let text = r.as_deref().unwrap_or_default();
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let parsed = match parts.as_slice() {
        [a, b, n] => match (a.parse::<f64>(), b.parse::<f64>(), n.parse::<u64>()) {
            (Ok(a), Ok(b), Ok(n)) => Some(serde_json::json!([a, b, n])),
            _ => None,
        },
        _ => None,
    };
    parsed.unwrap_or_else(|| Value::from(text)).serialize(s)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

fn check_range(name: &str, r: (f64, f64, usize)) -> Result<(), CliError> {
    if r.2 < 2 {
        return Err(CliError::Validation(format!("{name}: count must be at least 2, got {}", r.2)));
    }
    if !(r.0.is_finite() && r.1.is_finite()) {
        return Err(CliError::Validation(format!("{name}: endpoints must be finite")));
    }
    Ok(())
}

/// Set `field` of the record `base` to `x`. Integer fields take rounded
/// values (and refuse fractional ones); list fields become one-element lists.
fn set_field(base: &mut Value, field: &str, x: f64) -> Result<(), CliError> {
    let obj = base.as_object_mut().expect("records are objects");
    let slot = obj
        .get_mut(field)
        .ok_or_else(|| CliError::Validation(format!("unknown sweep parameter `{field}`")))?;
    let integral = || {
        if x.fract() == 0.0 {
            Ok(Value::from(x as i64))
        } else {
            Err(CliError::Validation(format!("`{field}` takes integers, got {x}")))
        }
    };
    *slot = match slot {
        Value::Array(_) => Value::Array(vec![Value::from(x)]),
        Value::Number(n) if n.is_i64() || n.is_u64() => integral()?,
        Value::Number(_) | Value::Null => Value::from(x),
        _ => return Err(CliError::Validation(format!("`{field}` is not numeric"))),
    };
    Ok(())
}

fn record<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Validation(e.to_string()))
}

type Rows = Vec<(String, Vec<Cell>)>;

/// Pick the requested observables out of a full set of named values.
fn select(outputs: &[Observable], values: &[(Observable, Vec<Cell>)]) -> Vec<Cell> {
    outputs
        .iter()
        .flat_map(|o| values.iter().find(|(k, _)| k == o).map(|(_, v)| v.clone()).expect("supported"))
        .collect()
}

fn evaluate(model: SweepModel, record_value: Value, outputs: &[Observable]) -> Result<Rows, CliError> {
    use Observable::*;
    let wants = |o: Observable| outputs.contains(&o);
    let mut rows = Vec::new();
    match model {
        SweepModel::Rwa => {
            let c: RwaConfig = record(record_value)?;
            for b in rwa_bands(&c, wants(Chi))? {
                let values = [
                    (Quasienergy, vec![b.mode.quasienergy.into()]),
                    (GammaDirect, vec![b.mode.gamma_direct.into()]),
                    (GammaHf, vec![b.mode.gamma_hf.into()]),
                    (Chi, vec![b.chi.into()]),
                    (SpinProjection, vec![b.mode.spin_projection.into()]),
                ];
                rows.push((band_label(b.band).to_string(), select(outputs, &values)));
            }
        }
        SweepModel::Jaynes | SweepModel::Spinj => {
            let modes: Vec<(String, _)> = if model == SweepModel::Jaynes {
                let c: JaynesConfig = record(record_value)?;
                jaynes_bands(&c)?.into_iter().map(|(b, r)| (band_label(b).to_string(), r)).collect()
            } else {
                let c: SpinjConfig = record(record_value)?;
                spinj_levels(&c)?.into_iter().map(|(m, r)| (format!("{m}"), r)).collect()
            };
            for (label, r) in modes {
                let values = [
                    (Quasienergy, vec![r.quasienergy.into()]),
                    (GammaDirect, vec![r.gamma_direct.into()]),
                    (GammaHf, vec![r.gamma_hf.into()]),
                    (SpinProjection, vec![r.spin_projection.into()]),
                ];
                rows.push((label, select(outputs, &values)));
            }
        }
        SweepModel::TwoLevel => {
            let c: TwoLevelConfig = record(record_value)?;
            let holonomies = if wants(SolidAngle) || wants(GammaDirect) {
                two_level_holonomies(&c)?
            } else {
                Vec::new()
            };
            for band in monopole_core::two_level::BandIndex::BOTH {
                let h = holonomies.iter().find(|h| h.band == band);
                let chern = if wants(Chern) { Cell::Int(two_level_chern(&c, band)?.nearest()) } else { Cell::Empty };
                let values = [
                    (SolidAngle, vec![h.map_or(Cell::Empty, |h| h.solid_angle.into())]),
                    (GammaDirect, vec![h.map_or(Cell::Empty, |h| h.gamma.into())]),
                    (Chern, vec![chern]),
                ];
                rows.push((band_label(band).to_string(), select(outputs, &values)));
            }
        }
        SweepModel::Orbit => {
            let c: OrbitConfig = record(record_value)?;
            let [j, radius, reversal] = orbit_summary(&c)?;
            rows.push((String::new(), vec![j.into(), radius.into(), reversal.into()]));
        }
        SweepModel::Lambda => {
            let c: LambdaConfig = record(record_value)?;
            rows.push(("dark".into(), vec![Cell::Int(lambda_dark_chern(&c)?.nearest())]));
        }
    }
    Ok(rows)
}

pub struct SweepOutcome {
    pub table: Table,
    pub format: Option<Format>,
    /// First failing point, if any.
    pub failure: Option<String>,
}

pub fn sweep(args: &SweepArgs, config: Option<&Config>) -> Result<SweepOutcome, CliError> {
    let spec: SweepSpec = resolve(SweepSpec::default(), args, config, "sweep")?;
    check_range("range", spec.range)?;
    if spec.outputs.is_empty() {
        return Err(CliError::Validation("outputs: at least one observable is required".into()));
    }
    for o in &spec.outputs {
        if !spec.model.supports(*o) {
            let supported: Vec<&str> =
                Observable::ALL.iter().filter(|x| spec.model.supports(**x)).map(|x| x.name()).collect();
            return Err(CliError::Validation(format!(
                "outputs: `{}` is not available for model `{}` (choose from {})",
                o.name(),
                spec.model.section(),
                supported.join(", ")
            )));
        }
    }
    let second = match (&spec.parameter2, spec.range2) {
        (Some(p), Some(r)) => {
            check_range("range2", r)?;
            if *p == spec.parameter {
                return Err(CliError::Validation("parameter2 must differ from parameter".into()));
            }
            Some((p.clone(), r))
        }
        (None, None) => None,
        _ => return Err(CliError::Validation("parameter2 and range2 go together".into())),
    };

    // the base record: model defaults overlaid with its config section
    let base: Value = {
        let none = Map::new();
        let v: Value = resolve(spec.model.defaults(), &none, config, spec.model.section())?;
        // round-trip through the typed record to reject unknown fields early
        validate_record(spec.model, v.clone())?;
        v
    };
    let xs = linspace(spec.range.0, spec.range.1, spec.range.2);
    let ys = second.as_ref().map(|(_, r)| linspace(r.0, r.1, r.2));
    let mut points: Vec<(f64, Option<f64>, Value)> = Vec::new();
    for &x in &xs {
        let mut rec = base.clone();
        set_field(&mut rec, &spec.parameter, x)?;
        match (&second, &ys) {
            (Some((p2, _)), Some(ys)) => {
                for &y in ys {
                    let mut r2 = rec.clone();
                    set_field(&mut r2, p2, y)?;
                    points.push((x, Some(y), r2));
                }
            }
            _ => points.push((x, None, rec)),
        }
    }

    let results: Vec<Result<Rows, CliError>> = points
        .par_iter()
        .map(|(_, _, rec)| evaluate(spec.model, rec.clone(), &spec.outputs))
        .collect();

    let mut columns: Vec<&str> = vec![spec.parameter.as_str()];
    if let Some((p2, _)) = &second {
        columns.push(p2.as_str());
    }
    columns.push("label");
    let width: usize = spec.outputs.iter().map(|o| o.columns().len()).sum();
    columns.extend(spec.outputs.iter().flat_map(|o| o.columns().iter().copied()));
    columns.push("status");

    let params = serde_json::json!({ "spec": spec, "base": base });
    let mut table = Table::new("sweep", &columns, params);
    let mut failure = None;
    for ((x, y, _), result) in points.iter().zip(results) {
        let lead = |row: &mut Vec<Cell>| {
            row.push((*x).into());
            if let Some(y) = y {
                row.push((*y).into());
            }
        };
        match result {
            Ok(rows) => {
                for (label, values) in rows {
                    let mut row = Vec::new();
                    lead(&mut row);
                    row.push(label.into());
                    let bad = values.iter().any(|c| matches!(c, Cell::Num(v) if !v.is_finite()));
                    if bad {
                        failure.get_or_insert_with(|| format!("non-finite observable at {} = {x}", spec.parameter));
                        row.extend(values.into_iter().map(|c| match c {
                            Cell::Num(v) if !v.is_finite() => Cell::Empty,
                            other => other,
                        }));
                        row.push("non_finite".into());
                    } else {
                        row.extend(values);
                        row.push("ok".into());
                    }
                    table.push(row);
                }
            }
            Err(e) => {
                failure.get_or_insert_with(|| format!("{} at {} = {x}", e.message(), spec.parameter));
                let mut row = Vec::new();
                lead(&mut row);
                row.push(Cell::Empty);
                row.extend(std::iter::repeat_n(Cell::Empty, width));
                row.push(format!("error: {}", e.message()).into());
                table.push(row);
            }
        }
    }
    Ok(SweepOutcome {
        table,
        format: spec.format,
        failure,
    })
}

fn validate_record(model: SweepModel, v: Value) -> Result<(), CliError> {
    match model {
        SweepModel::Rwa => record::<RwaConfig>(v).map(|_| ()),
        SweepModel::Jaynes => record::<JaynesConfig>(v).map(|_| ()),
        SweepModel::Spinj => record::<SpinjConfig>(v).map(|_| ()),
        SweepModel::TwoLevel => record::<TwoLevelConfig>(v).map(|_| ()),
        SweepModel::Orbit => record::<OrbitConfig>(v).map(|_| ()),
        SweepModel::Lambda => record::<LambdaConfig>(v).map(|_| ()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let xs = linspace(-2.0, 2.0, 11);
        assert_eq!(xs.len(), 11);
        assert_eq!(xs[0], -2.0);
        assert_eq!(xs[10], 2.0);
        assert!((xs[5]).abs() < 1e-15);
    }

    #[test]
    fn integer_fields_refuse_fractions() {
        let mut v = serde_json::to_value(LambdaConfig::default()).unwrap();
        set_field(&mut v, "l_p", 2.0).unwrap();
        assert_eq!(v["l_p"], Value::from(2));
        assert!(set_field(&mut v, "l_p", 2.5).is_err());
        assert!(set_field(&mut v, "nope", 1.0).is_err());
    }

    #[test]
    fn list_fields_take_one_value() {
        let mut v = serde_json::to_value(TwoLevelConfig::default()).unwrap();
        set_field(&mut v, "theta", 0.7).unwrap();
        assert_eq!(v["theta"], serde_json::json!([0.7]));
    }
}
