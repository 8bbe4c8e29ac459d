//! Parameter resolution. Every command starts from its defaults, applies the
//! flags given on the command line, then applies the matching section of the
//! config file. Config values win.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Top-level keys that are not sections.
pub const GLOBAL_KEYS: [&str; 4] = ["format", "out", "tol_scale", "workers"];
pub const SECTIONS: [&str; 10] = [
    "chern", "floquet", "jaynes", "lambda", "orbit", "rwa", "spinj", "sweep", "tolerances", "two_level",
];

#[derive(Debug, Clone)]
pub struct Config {
    path: PathBuf,
    text: String,
    root: Map<String, Value>,
}

impl Config {
    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::parse(path, text)
    }

    pub fn parse(path: &Path, text: String) -> Result<Self, CliError> {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let value: Value = if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        };
        let Value::Object(root) = value else {
            return Err(CliError::Validation(format!("{}: expected a table at the top level", path.display())));
        };
        let config = Self {
            path: path.to_path_buf(),
            text,
            root,
        };
        for key in config.root.keys() {
            if !GLOBAL_KEYS.contains(&key.as_str()) && !SECTIONS.contains(&key.as_str()) {
                return Err(config.field_error("", key, &format!("unknown key `{key}`")));
            }
        }
        Ok(config)
    }

    pub fn section(&self, name: &str) -> Option<&Value> {
        self.root.get(name)
    }

    /// The global keys as one object.
    pub fn globals(&self) -> Value {
        let obj: Map<String, Value> = self
            .root
            .iter()
            .filter(|(k, _)| GLOBAL_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Value::Object(obj)
    }

    /// 1-based line of the first assignment to `key` at or after the header
    /// of `section`.
    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let quoted = format!("\"{key}\"");
        let header = format!("[{section}]");
        let json_header = format!("\"{section}\"");
        let start = if section.is_empty() {
            0
        } else {
            self.text
                .lines()
                .position(|l| l.trim() == header || l.contains(&json_header))
                .unwrap_or(0)
        };
        self.text.lines().skip(start).position(|line| {
            let t = line.trim_start();
            let rest = t
                .strip_prefix(quoted.as_str())
                .or_else(|| t.strip_prefix(key).filter(|r| !r.starts_with(|c: char| c.is_alphanumeric() || c == '_')));
            rest.is_some_and(|r| {
                let r = r.trim_start();
                r.starts_with('=') || r.starts_with(':')
            })
        })
        .map(|i| start + i + 1)
    }

    fn field_error(&self, section: &str, key: &str, message: &str) -> CliError {
        match self.line_of(section, key) {
            Some(line) => CliError::Validation(format!("{}:{line}: {message}", self.path.display())),
            None => CliError::Validation(format!("{}: {message}", self.path.display())),
        }
    }
}

/// Shallow merge of `src`'s keys into `dst`.
fn overlay(dst: &mut Value, src: Value) {
    if let (Value::Object(d), Value::Object(s)) = (dst, src) {
        for (k, v) in s {
            d.insert(k, v);
        }
    }
}

/// Defaults, then flags, then the config section `section`.
pub fn resolve<P, F>(defaults: P, flags: &F, config: Option<&Config>, section: &str) -> Result<P, CliError>
where
    P: Serialize + DeserializeOwned,
    F: Serialize,
{
    let mut merged = serde_json::to_value(defaults)?;
    overlay(&mut merged, serde_json::to_value(flags)?);
    let mut from_config = Map::new();
    if let Some(c) = config {
        let part = if section.is_empty() { Some(c.globals()) } else { c.section(section).cloned() };
        if let Some(part) = part {
            let Value::Object(obj) = part else {
                return Err(c.field_error("", section, &format!("`{section}` must be a table")));
            };
            from_config = obj;
        }
    }
    overlay(&mut merged, Value::Object(from_config.clone()));
    serde_path_to_error::deserialize(merged).map_err(|e| {
        let path = e.path().to_string();
        let field = path.split('.').next().unwrap_or_default().split('[').next().unwrap_or_default().to_string();
        let inner = e.into_inner().to_string();
        // unknown fields are reported with an empty path
        let field = if field.is_empty() || field == "?" {
            inner.split('`').nth(1).unwrap_or_default().to_string()
        } else {
            field
        };
        let scope = if section.is_empty() { String::new() } else { format!("{section}.") };
        let message = format!("{scope}{field}: {inner}");
        match config {
            Some(c) if from_config.contains_key(&field) => c.field_error(section, &field, &message),
            _ => CliError::Validation(format!("--{}: {inner}", field.replace('_', "-"))),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct P {
        a: f64,
        b: u32,
    }

    #[derive(Serialize)]
    struct Flags {
        #[serde(skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        b: Option<u32>,
    }

    fn toml(text: &str) -> Config {
        Config::parse(Path::new("c.toml"), text.to_string()).unwrap()
    }

    #[test]
    fn config_beats_flags_beats_defaults() {
        let flags = Flags { a: Some(2.0), b: Some(7) };
        let c = toml("[orbit]\nb = 9\n");
        let p = resolve(P { a: 1.0, b: 1 }, &flags, Some(&c), "orbit").unwrap();
        assert_eq!(p, P { a: 2.0, b: 9 });
        let p = resolve(P { a: 1.0, b: 1 }, &Flags { a: None, b: None }, None, "orbit").unwrap();
        assert_eq!(p, P { a: 1.0, b: 1 });
    }

    #[test]
    fn errors_point_at_the_config_line() {
        let c = toml("format = \"csv\"\n\n[orbit]\na = 1.0\nzeta = 3\n");
        let e = resolve(P { a: 1.0, b: 1 }, &Flags { a: None, b: None }, Some(&c), "orbit").unwrap_err();
        assert!(matches!(&e, CliError::Validation(m) if m.starts_with("c.toml:5:")), "{e}");
        let c = toml("[orbit]\nb = \"x\"\n");
        let e = resolve(P { a: 1.0, b: 1 }, &Flags { a: None, b: None }, Some(&c), "orbit").unwrap_err();
        assert!(matches!(&e, CliError::Validation(m) if m.starts_with("c.toml:2:")), "{e}");
    }

    #[test]
    fn unknown_sections_are_refused() {
        let e = Config::parse(Path::new("c.toml"), "[orbitt]\n".into()).unwrap_err();
        assert!(matches!(e, CliError::Validation(_)));
    }
}
