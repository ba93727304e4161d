//! Scenario files: flat `key = value` lines with dotted keys.
//!
//! ```text
//! # thermal figure
//! model = thermal
//! params.T = 1
//! sweep.Bt.min = 0
//! sweep.Bt.max = 2pi
//! sweep.Bt.steps = 101
//! ```
//!
//! `#` starts a comment. Reals accept plain numbers and multiples of `pi`
//! (`pi`, `2pi`, `pi/2`, `0.5*pi`). Unknown and duplicate keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qfikit::generator::Backend;
use qfikit::spin::{EstimatedParam, RING_POINTS};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Key/value pairs in file order, consumed while building a [`ScenarioConfig`].
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Parse {
                    line,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || key.split('.').any(str::is_empty) {
                return Err(CliError::Parse {
                    line,
                    message: format!("malformed key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(CliError::Config {
                    key: key.to_string(),
                    line,
                    message: "missing value".into(),
                });
            }
            let entry = Entry {
                value: value.to_string(),
                line,
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(CliError::Config {
                    key: key.to_string(),
                    line,
                    message: format!("duplicate key (first set on line {})", prev.line),
                });
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn take_real(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|e| parse_real(&e.value).map_err(|message| config_error(key, &e, message)))
            .transpose()
    }

    fn take_parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        self.take(key)
            .map(|e| {
                e.value
                    .parse::<T>()
                    .map_err(|_| config_error(key, &e, format!("expected {what}, found `{}`", e.value)))
            })
            .transpose()
    }

    /// Keys starting with `prefix`, ordered by line.
    fn keys_with_prefix(&self, prefix: &str) -> Vec<(String, usize)> {
        let mut keys: Vec<(String, usize)> = self
            .entries
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(k, e)| (k.clone(), e.line))
            .collect();
        keys.sort_by_key(|(_, line)| *line);
        keys
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn finish(self) -> Result<()> {
        let mut leftovers: Vec<(String, Entry)> = self.entries.into_iter().collect();
        leftovers.sort_by_key(|(_, e)| e.line);
        match leftovers.into_iter().next() {
            Some((key, e)) => Err(config_error(&key, &e, "unknown key".into())),
            None => Ok(()),
        }
    }
}

fn config_error(key: &str, e: &Entry, message: String) -> CliError {
    CliError::Config {
        key: key.to_string(),
        line: e.line,
        message,
    }
}

/// Plain float or a multiple of `pi`.
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = s.parse::<f64>() {
        return if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("non-finite number `{text}`"))
        };
    }
    let bad = || format!("expected a real number, found `{text}`");
    let (head, divisor) = match s.split_once('/') {
        Some((h, d)) => (h, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let coeff = head.strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let factor = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    if divisor == 0.0 {
        return Err(bad());
    }
    Ok(factor * std::f64::consts::PI / divisor)
}

/// Parses `a b; c d` (entries separated by spaces or commas, rows by `;`).
pub fn parse_rows(text: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    text.split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(parse_real)
                .collect::<std::result::Result<Vec<f64>, String>>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    SpinTheta,
    SpinB,
    Thermal,
    TwoParam,
    CustomMatrix,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::SpinTheta => "spin_theta",
            Model::SpinB => "spin_B",
            Model::Thermal => "thermal",
            Model::TwoParam => "two_param",
            Model::CustomMatrix => "custom_matrix",
        }
    }
}

impl FromStr for Model {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        [
            Model::SpinTheta,
            Model::SpinB,
            Model::Thermal,
            Model::TwoParam,
            Model::CustomMatrix,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format `{other}` (csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Initial-state choice for the spin models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    N0,
    N0Prime,
    N1,
    N2,
    X,
    Y,
    Z,
    /// Explicit Bloch vector; shorter than 1 means mixed (qubit only).
    Bloch([f64; 3]),
}

/// Names accepted after `sweep.`.
pub const SWEEP_NAMES: [&str; 6] = ["B", "theta", "t", "beta", "Bt", "alpha"];

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn value(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64
        }
    }
}

/// Fixed parameter values before sweeps are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseParams {
    pub b: f64,
    pub theta: f64,
    pub t: f64,
    pub beta: f64,
    pub two_j: u32,
    pub alpha: f64,
}

impl Default for BaseParams {
    fn default() -> Self {
        Self {
            b: 1.0,
            theta: 0.0,
            t: 1.0,
            beta: 1.0,
            two_j: 1,
            alpha: 0.0,
        }
    }
}

/// Complex square matrix given as real and imaginary row lists.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CustomState {
    Pure { re: Vec<f64>, im: Option<Vec<f64>> },
    Mixed(MatrixSpec),
}

/// `H(α) = h0 + α h1 + α² h2` and the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSpec {
    pub coefficients: Vec<MatrixSpec>,
    pub state: CustomState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: Model,
    pub params: BaseParams,
    pub state: StateSpec,
    pub sweeps: Vec<Sweep>,
    pub backends: Vec<Backend>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub ring_points: usize,
    pub ring_param: Option<EstimatedParam>,
    pub custom: Option<CustomSpec>,
}

pub fn parse_backends(text: &str) -> std::result::Result<Vec<Backend>, String> {
    let mut out = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let b: Backend = name.parse().map_err(|_| {
            format!("unknown backend `{name}` (closed_form, series, quadrature, finite_difference)")
        })?;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    if out.is_empty() {
        return Err("no backend given".into());
    }
    Ok(out)
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    fn from_raw(mut raw: RawConfig) -> Result<Self> {
        let model_entry = raw.take("model").ok_or_else(|| CliError::Config {
            key: "model".into(),
            line: 0,
            message: "required key missing".into(),
        })?;
        let model: Model = model_entry.value.parse().map_err(|_| {
            config_error(
                "model",
                &model_entry,
                format!(
                    "unknown model `{}` (spin_theta, spin_B, thermal, two_param, custom_matrix)",
                    model_entry.value
                ),
            )
        })?;

        let mut params = BaseParams::default();
        if let Some(b) = raw.take_real("params.B")? {
            params.b = b;
        }
        if let Some(theta) = raw.take_real("params.theta")? {
            params.theta = theta;
        }
        if let Some(t) = raw.take_real("params.t")? {
            params.t = t;
        }
        if let Some(alpha) = raw.take_real("params.alpha")? {
            params.alpha = alpha;
        }
        let beta_line = raw.line_of("params.beta");
        let beta = raw.take_real("params.beta")?;
        let temp_line = raw.line_of("params.T");
        let temperature = raw.take_real("params.T")?;
        match (beta, temperature) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config {
                    key: "params.T".into(),
                    line: temp_line,
                    message: "give either params.beta or params.T, not both".into(),
                })
            }
            (Some(b), None) => {
                if b < 0.0 {
                    return Err(CliError::Config {
                        key: "params.beta".into(),
                        line: beta_line,
                        message: "inverse temperature must be >= 0".into(),
                    });
                }
                params.beta = b;
            }
            (None, Some(t)) => {
                if t <= 0.0 {
                    return Err(CliError::Config {
                        key: "params.T".into(),
                        line: temp_line,
                        message: "temperature must be > 0".into(),
                    });
                }
                params.beta = 1.0 / t;
            }
            (None, None) => {}
        }
        let j_line = raw.line_of("params.j");
        if let Some(j) = raw.take_real("params.j")? {
            let two_j = 2.0 * j;
            if two_j < 1.0 || (two_j - two_j.round()).abs() > 1e-12 {
                return Err(CliError::Config {
                    key: "params.j".into(),
                    line: j_line,
                    message: format!("spin j must be a positive half-integer, found {j}"),
                });
            }
            params.two_j = two_j.round() as u32;
        }

        let state = Self::take_state(&mut raw)?;
        let sweeps = Self::take_sweeps(&mut raw, model)?;

        let backends = match raw.take("backends") {
            Some(e) => parse_backends(&e.value).map_err(|m| config_error("backends", &e, m))?,
            None => vec![Backend::Series],
        };
        let output_path = raw.take("output.path").map(|e| PathBuf::from(e.value));
        let format = raw
            .take("output.format")
            .map(|e| e.value.parse::<Format>().map_err(|m| config_error("output.format", &e, m)))
            .transpose()?;
        let ring_line = raw.line_of("ring.points");
        let ring_points = raw.take_parsed::<usize>("ring.points", "a positive integer")?.unwrap_or(RING_POINTS);
        if ring_points == 0 {
            return Err(CliError::Config {
                key: "ring.points".into(),
                line: ring_line,
                message: "ring needs at least one point".into(),
            });
        }
        let ring_param = raw
            .take("ring.param")
            .map(|e| match e.value.as_str() {
                "B" => Ok(EstimatedParam::B),
                "theta" => Ok(EstimatedParam::Theta),
                other => Err(config_error("ring.param", &e, format!("expected B or theta, found `{other}`"))),
            })
            .transpose()?;

        let custom = if model == Model::CustomMatrix {
            Some(Self::take_custom(&mut raw)?)
        } else {
            None
        };
        raw.finish()?;

        Ok(Self {
            model,
            params,
            state,
            sweeps,
            backends,
            output_path,
            format,
            ring_points,
            ring_param,
            custom,
        })
    }

    fn take_state(raw: &mut RawConfig) -> Result<StateSpec> {
        let Some(e) = raw.take("state") else {
            if raw.keys_with_prefix("state.").is_empty() {
                return Ok(StateSpec::N0);
            }
            let (key, line) = raw.keys_with_prefix("state.").remove(0);
            return Err(CliError::Config {
                key,
                line,
                message: "Bloch components require `state = bloch`".into(),
            });
        };
        let spec = match e.value.as_str() {
            "n0" => StateSpec::N0,
            "n0p" => StateSpec::N0Prime,
            "n1" => StateSpec::N1,
            "n2" => StateSpec::N2,
            "x" => StateSpec::X,
            "y" => StateSpec::Y,
            "z" => StateSpec::Z,
            "bloch" => {
                let mut r = [0.0; 3];
                for (i, c) in ["x", "y", "z"].into_iter().enumerate() {
                    r[i] = raw.take_real(&format!("state.{c}"))?.unwrap_or(0.0);
                }
                let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                if len > 1.0 + 1e-12 {
                    return Err(config_error("state", &e, format!("Bloch vector length {len} exceeds 1")));
                }
                StateSpec::Bloch(r)
            }
            other => {
                return Err(config_error(
                    "state",
                    &e,
                    format!("unknown state `{other}` (n0, n0p, n1, n2, x, y, z, bloch)"),
                ))
            }
        };
        Ok(spec)
    }

    fn take_sweeps(raw: &mut RawConfig, model: Model) -> Result<Vec<Sweep>> {
        let mut names: Vec<(String, usize)> = Vec::new();
        for (key, line) in raw.keys_with_prefix("sweep.") {
            let parts: Vec<&str> = key.split('.').collect();
            if parts.len() != 3 || !["min", "max", "steps"].contains(&parts[2]) {
                return Err(CliError::Config {
                    key,
                    line,
                    message: "expected sweep.<name>.min|max|steps".into(),
                });
            }
            if !SWEEP_NAMES.contains(&parts[1]) {
                return Err(CliError::Config {
                    key: key.clone(),
                    line,
                    message: format!("cannot sweep `{}` (B, theta, t, beta, Bt, alpha)", parts[1]),
                });
            }
            if !names.iter().any(|(n, _)| n == parts[1]) {
                names.push((parts[1].to_string(), line));
            }
        }
        let mut sweeps = Vec::new();
        for (name, line) in names {
            let key = |f: &str| format!("sweep.{name}.{f}");
            let min = raw.take_real(&key("min"))?;
            let max = raw.take_real(&key("max"))?;
            let steps_line = raw.line_of(&key("steps"));
            let steps = raw.take_parsed::<usize>(&key("steps"), "a positive integer")?.unwrap_or(1);
            let min = min.ok_or_else(|| CliError::Config {
                key: key("min"),
                line,
                message: "sweep needs a minimum".into(),
            })?;
            let max = max.unwrap_or(min);
            if steps == 0 {
                return Err(CliError::Config {
                    key: key("steps"),
                    line: steps_line,
                    message: "steps must be >= 1".into(),
                });
            }
            if min > max {
                return Err(CliError::Config {
                    key: key("min"),
                    line,
                    message: format!("min {min} exceeds max {max}"),
                });
            }
            sweeps.push(Sweep { name, min, max, steps });
        }
        if sweeps.len() > 2 {
            return Err(CliError::Validation(format!(
                "at most 2 swept parameters per run, found {}",
                sweeps.len()
            )));
        }
        if sweeps.iter().any(|s| s.name == "Bt") && sweeps.iter().any(|s| s.name == "t" || s.name == "B") {
            return Err(CliError::Validation("sweeping Bt excludes sweeping B or t".into()));
        }
        if sweeps.is_empty() && model == Model::Thermal {
            let full = |name: &str| Sweep {
                name: name.into(),
                min: 0.0,
                max: 2.0 * std::f64::consts::PI,
                steps: 101,
            };
            sweeps = vec![full("Bt"), full("theta")];
        }
        Ok(sweeps)
    }

    fn take_matrix(raw: &mut RawConfig, key: &str) -> Result<Option<MatrixSpec>> {
        let Some(e) = raw.take(key) else {
            if let Some(im) = raw.take(&format!("{key}.im")) {
                return Err(config_error(&format!("{key}.im"), &im, format!("`{key}` is missing")));
            }
            return Ok(None);
        };
        let re = parse_rows(&e.value).map_err(|m| config_error(key, &e, m))?;
        let im = match raw.take(&format!("{key}.im")) {
            Some(ie) => Some(parse_rows(&ie.value).map_err(|m| config_error(&format!("{key}.im"), &ie, m))?),
            None => None,
        };
        Ok(Some(MatrixSpec { re, im }))
    }

    fn take_custom(raw: &mut RawConfig) -> Result<CustomSpec> {
        let mut coefficients = Vec::new();
        for k in ["custom.h0", "custom.h1", "custom.h2"] {
            if let Some(m) = Self::take_matrix(raw, k)? {
                coefficients.push((k, m));
            }
        }
        let Some((first, _)) = coefficients.first() else {
            return Err(CliError::Config {
                key: "custom.h0".into(),
                line: 0,
                message: "custom_matrix needs at least custom.h0".into(),
            });
        };
        if *first != "custom.h0" {
            return Err(CliError::Config {
                key: "custom.h0".into(),
                line: 0,
                message: "custom.h0 is required".into(),
            });
        }
        let coefficients: Vec<MatrixSpec> = {
            // keep positions: a missing h1 between h0 and h2 becomes zero
            let mut slots: Vec<Option<MatrixSpec>> = vec![None, None, None];
            for (k, m) in coefficients {
                let idx = k.as_bytes()[k.len() - 1] - b'0';
                slots[idx as usize] = Some(m);
            }
            let last = slots.iter().rposition(Option::is_some).unwrap_or(0);
            slots
                .into_iter()
                .take(last + 1)
                .map(|m| {
                    m.unwrap_or(MatrixSpec {
                        re: Vec::new(),
                        im: None,
                    })
                })
                .collect()
        };
        let psi_line = raw.line_of("custom.psi");
        let psi = raw.take("custom.psi");
        let rho = Self::take_matrix(raw, "custom.rho")?;
        let state = match (psi, rho) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config {
                    key: "custom.psi".into(),
                    line: psi_line,
                    message: "give either custom.psi or custom.rho".into(),
                })
            }
            (Some(e), None) => {
                let parse_vec = |e: &Entry, key: &str| -> Result<Vec<f64>> {
                    let rows = parse_rows(&e.value).map_err(|m| config_error(key, e, m))?;
                    Ok(rows.into_iter().flatten().collect())
                };
                let re = parse_vec(&e, "custom.psi")?;
                let im = match raw.take("custom.psi.im") {
                    Some(ie) => Some(parse_vec(&ie, "custom.psi.im")?),
                    None => None,
                };
                CustomState::Pure { re, im }
            }
            (None, Some(m)) => CustomState::Mixed(m),
            (None, None) => {
                return Err(CliError::Config {
                    key: "custom.psi".into(),
                    line: 0,
                    message: "custom_matrix needs custom.psi or custom.rho".into(),
                })
            }
        };
        Ok(CustomSpec { coefficients, state })
    }

    /// Output format from the config, else the file extension, else CSV.
    pub fn resolved_format(&self) -> Format {
        self.format.unwrap_or_else(|| {
            match self.output_path.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("json") => Format::Json,
                _ => Format::Csv,
            }
        })
    }
}

impl FromStr for ScenarioConfig {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }
}
