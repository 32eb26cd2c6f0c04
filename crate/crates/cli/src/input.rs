//! Parsing of `--params`, `--timescale` and scenario files.

use std::path::Path;

use dynphase::verify::Budget;
use dynphase::{ModelParams, State, TimeScale};
use serde::Deserialize;

use crate::CliError;

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The argument itself when it looks like JSON, else the file it names
/// (if it exists).
fn json_source(arg: &str) -> Result<Option<String>, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(Some(arg.to_string()));
    }
    let path = Path::new(arg);
    if path.is_file() {
        return read_file(path).map(Some);
    }
    Ok(None)
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

/// `k=v` pairs separated by commas.
fn key_values(s: &str) -> Result<Vec<(String, f64)>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got {part:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{k}: not a number: {v:?}")))?;
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

/// `r=..,s=..,alpha=..,beta=..,K=..,L=..`, inline JSON, or a JSON file.
pub fn params(arg: &str) -> Result<ModelParams, CliError> {
    if let Some(text) = json_source(arg)? {
        return parse_json(&text, "params");
    }
    let kv = key_values(arg)?;
    let get = |names: &[&str]| -> Result<f64, CliError> {
        kv.iter()
            .find(|(k, _)| names.contains(&k.as_str()))
            .map(|(_, v)| *v)
            .ok_or_else(|| CliError::Config(format!("params: missing {}", names[0])))
    };
    for (k, _) in &kv {
        if !["r", "s", "alpha", "beta", "K", "L"].contains(&k.as_str()) {
            return Err(CliError::Config(format!("params: unknown key {k:?}")));
        }
    }
    Ok(ModelParams::new(
        get(&["r"])?,
        get(&["s"])?,
        get(&["alpha"])?,
        get(&["beta"])?,
        get(&["K"])?,
        get(&["L"])?,
    )?)
}

/// `reals`, `integers`, `point_interval`, `lattice:h=..,origin=..`,
/// `quantum:q=..,start=..`, inline JSON, or a JSON file.
pub fn timescale(arg: &str) -> Result<TimeScale, CliError> {
    if let Some(text) = json_source(arg)? {
        return parse_json(&text, "timescale");
    }
    let (kind, rest) = arg.split_once(':').unwrap_or((arg, ""));
    let kv = key_values(rest)?;
    let get = |name: &str, default: Option<f64>| -> Result<f64, CliError> {
        kv.iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .or(default)
            .ok_or_else(|| CliError::Config(format!("timescale: missing {name}")))
    };
    Ok(match kind.trim() {
        "reals" => TimeScale::Reals,
        "integers" => TimeScale::integers(),
        "point_interval" => TimeScale::point_interval_alternating(),
        "lattice" => TimeScale::lattice(get("h", None)?, get("origin", Some(0.0))?)?,
        "quantum" => TimeScale::quantum(get("q", None)?, get("start", Some(1.0))?)?,
        other => return Err(CliError::Config(format!("unknown time scale {other:?}"))),
    })
}

/// `x,y`
pub fn state(arg: &str) -> Result<State, CliError> {
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    match nums.as_deref() {
        Ok([x, y]) => Ok(State::new(*x, *y)),
        _ => Err(CliError::Config(format!("expected x,y, got {arg:?}"))),
    }
}

/// Comma-separated numbers.
pub fn numbers(arg: &str) -> Result<Vec<f64>, CliError> {
    arg.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Config(format!("not a number: {p:?}")))
        })
        .collect()
}

/// A bare step count, or `{max_steps, horizon}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ScenarioBudget {
    Steps(usize),
    Full(Budget),
}

impl ScenarioBudget {
    pub fn resolve(self) -> Budget {
        match self {
            ScenarioBudget::Steps(n) => Budget {
                max_steps: n,
                ..Budget::default()
            },
            ScenarioBudget::Full(b) => b,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub timescale: TimeScale,
    pub params: ModelParams,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default)]
    pub x0: Option<f64>,
    #[serde(default)]
    pub y0: Option<f64>,
    #[serde(default)]
    pub initial: Vec<State>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub budget: Option<ScenarioBudget>,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        parse_json(&read_file(path)?, "scenario")
    }

    /// `x0`/`y0` (if given) followed by `initial`.
    pub fn starts(&self) -> Result<Vec<State>, CliError> {
        let mut out = Vec::new();
        match (self.x0, self.y0) {
            (Some(x), Some(y)) => out.push(State::new(x, y)),
            (None, None) => {}
            _ => return Err(CliError::Config("scenario: x0 and y0 go together".into())),
        }
        out.extend(self.initial.iter().copied());
        if out.is_empty() {
            return Err(CliError::Config("scenario: no initial state".into()));
        }
        Ok(out)
    }
}
