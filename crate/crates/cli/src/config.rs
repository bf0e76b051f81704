//! Sectioned `key = value` configuration with unit suffixes.
//!
//! ```text
//! # comment
//! [harvester]
//! p_max = 20 mW
//! ```
//!
//! Every key has a default, so an empty file is the baseline scenario.
//! Values are converted to SI on parse and [`Config::render`] writes them back
//! in canonical SI units with round-trip float formatting, so rendering and
//! re-parsing reproduces the configuration bit for bit.

use std::fmt;

use ris_core::channel::{FadingParams, PhaseModel, Placement, RisGeometry};
use ris_core::energy::{HarvesterModel, RisPowerModel};
use ris_core::link::{noise_power, NoiseModel};
use ris_core::montecarlo::{ExperimentConfig, Scenario};
use ris_core::policies::{BruteForceOptions, PolicyId, ProblemKind};
use ris_core::tracking::TrackingScenario;
use ris_core::units::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(origin: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.origin, l, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Count,
    Seed,
    Float,
    Power,
    InvPower,
    Gain,
    Decibel,
    Frequency,
    Length,
    Angle,
    Temperature,
    Speed,
    PowerList,
    TimeList,
    Problem,
    Policies,
    Phase,
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    kind: Kind,
    default: &'static str,
}

const fn k(section: &'static str, key: &'static str, kind: Kind, default: &'static str) -> KeySpec {
    KeySpec {
        section,
        key,
        kind,
        default,
    }
}

const SCHEMA: &[KeySpec] = &[
    k("run", "problem", Kind::Problem, "A"),
    k("run", "trials", Kind::Count, "10000"),
    k("run", "seed", Kind::Seed, "1"),
    k("run", "policies", Kind::Policies, "auto"),
    k("run", "gamma_0", Kind::Gain, "20 dB"),
    k("run", "brute_force_cap", Kind::Count, "22"),
    k("geometry", "m_x", Kind::Count, "5"),
    k("geometry", "m_y", Kind::Count, "2"),
    k("geometry", "d_x", Kind::Length, "0.5 lambda"),
    k("geometry", "d_y", Kind::Length, "0.5 lambda"),
    k("geometry", "frequency", Kind::Frequency, "28 GHz"),
    k("placement", "d_t", Kind::Length, "17 m"),
    k("placement", "d_r", Kind::Length, "20 m"),
    k("placement", "theta_inc", Kind::Angle, "45 deg"),
    k("placement", "theta_dep", Kind::Angle, "60 deg"),
    k("placement", "g_t", Kind::Gain, "40 dBi"),
    k("placement", "g_r", Kind::Gain, "22 dBi"),
    k("placement", "phase_model", Kind::Phase, "plane-wave"),
    k("fading", "sigma_t_sq", Kind::Float, "0.1"),
    k("fading", "sigma_r_sq", Kind::Float, "0.3"),
    k("harvester", "a", Kind::InvPower, "120 /W"),
    k("harvester", "b", Kind::Power, "1 mW"),
    k("harvester", "p_max", Kind::Power, "20 mW"),
    k("harvester", "eta_rf", Kind::Float, "0.5"),
    k("power", "p_static", Kind::Power, "2 uW"),
    k("power", "p_dynamic", Kind::Power, "10 mW"),
    k("power", "alpha", Kind::Float, "0.8"),
    k("power", "p_r", Kind::Float, "0.001"),
    k("noise", "bandwidth", Kind::Frequency, "1 GHz"),
    k("noise", "noise_figure", Kind::Decibel, "10 dB"),
    k("noise", "temperature", Kind::Temperature, "290 K"),
    k("link", "p_t", Kind::Power, "1 W"),
    k("tracking", "tx_height", Kind::Length, "3 m"),
    k("tracking", "rx_height", Kind::Length, "1.5 m"),
    k("tracking", "path_start", Kind::Length, "-40 m"),
    k("tracking", "path_end", Kind::Length, "40 m"),
    k("tracking", "user_speed", Kind::Speed, "1.4 m/s"),
    k("tracking", "ris_to_path_ground_distance", Kind::Length, "17 m"),
    k("tracking", "tx_to_ris_ground_distance", Kind::Length, "17 m"),
    k("tracking", "tx_ris_distance", Kind::Length, "19 m"),
    k("tracking", "tx_lateral_offset", Kind::Length, "0 m"),
    k("tracking", "threshold", Kind::Decibel, "3 dB"),
    k("tracking", "alpha", Kind::Float, "1"),
    k("tracking", "step", Kind::Length, "0.01 m"),
    k("tracking", "phase_model", Kind::Phase, "exact"),
    k("tracking", "reconfig_durations", Kind::TimeList, "100 us, 1 us"),
    k("tracking", "p_dynamic_grid", Kind::PowerList, "1 mW, 10 mW, 100 mW, 1 W"),
    k("tracking", "near_limit", Kind::Length, "5 m"),
    k("tracking", "far_min", Kind::Length, "30 m"),
    k("tracking", "far_max", Kind::Length, "40 m"),
];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Count(usize),
    Seed(u64),
    /// SI (or linear) scalar.
    Scalar(f64),
    Wavelengths(f64),
    List(Vec<f64>),
    Problem(ProblemKind),
    Policies(Option<Vec<PolicyId>>),
    Phase(PhaseModel),
}

/// Splits `"20 mW"` or `"20mW"` into the number and the trimmed unit.
fn split_number(s: &str) -> Option<(f64, &str)> {
    let s = s.trim();
    let mut ends: Vec<usize> = s.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(s.len());
    for &end in ends.iter().rev() {
        if let Ok(v) = s[..end].trim().parse::<f64>() {
            if v.is_nan() {
                return None;
            }
            return Some((v, s[end..].trim()));
        }
    }
    None
}

fn scale(kind: Kind, v: f64, unit: &str) -> Result<Value, String> {
    let lin = |db: f64| 10f64.powf(db / 10.0);
    let bad = || {
        let expected = match kind {
            Kind::Power | Kind::PowerList => "W, kW, mW, uW, nW, dBm or dBW",
            Kind::InvPower => "/W",
            Kind::Gain => "dB, dBi or a bare linear value",
            Kind::Decibel => "dB",
            Kind::Frequency => "Hz, kHz, MHz or GHz",
            Kind::Length => "m, cm, mm, km or lambda",
            Kind::Angle => "rad or deg",
            Kind::TimeList => "s, ms, us or ns",
            Kind::Temperature => "K",
            Kind::Speed => "m/s or km/h",
            _ => "no unit",
        };
        format!("unit '{unit}' not accepted here (expected {expected})")
    };
    let x = match kind {
        Kind::Float => match unit {
            "" => v,
            _ => return Err(bad()),
        },
        Kind::Power | Kind::PowerList => match unit {
            "" | "W" => v,
            "kW" => v * 1e3,
            "mW" => v / 1e3,
            "uW" | "µW" | "μW" => v / 1e6,
            "nW" => v / 1e9,
            "dBm" => lin(v - 30.0),
            "dBW" => lin(v),
            _ => return Err(bad()),
        },
        Kind::InvPower => match unit {
            "" | "/W" | "1/W" | "W^-1" => v,
            _ => return Err(bad()),
        },
        Kind::Gain => match unit {
            "" => v,
            "dB" | "dBi" => lin(v),
            _ => return Err(bad()),
        },
        Kind::Decibel => match unit {
            "" | "dB" => v,
            _ => return Err(bad()),
        },
        Kind::Frequency => match unit {
            "" | "Hz" => v,
            "kHz" => v * 1e3,
            "MHz" => v * 1e6,
            "GHz" => v * 1e9,
            _ => return Err(bad()),
        },
        Kind::Length => match unit {
            "" | "m" => v,
            "cm" => v / 1e2,
            "mm" => v / 1e3,
            "km" => v * 1e3,
            "lambda" | "λ" => return Ok(Value::Wavelengths(v)),
            _ => return Err(bad()),
        },
        Kind::Angle => match unit {
            "" | "rad" => v,
            "deg" | "°" => v.to_radians(),
            _ => return Err(bad()),
        },
        Kind::TimeList => match unit {
            "" | "s" => v,
            "ms" => v / 1e3,
            "us" | "µs" | "μs" => v / 1e6,
            "ns" => v / 1e9,
            _ => return Err(bad()),
        },
        Kind::Temperature => match unit {
            "" | "K" => v,
            _ => return Err(bad()),
        },
        Kind::Speed => match unit {
            "" | "m/s" => v,
            "km/h" => v / 3.6,
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    };
    Ok(Value::Scalar(x))
}

fn number(s: &str) -> Result<(f64, &str), String> {
    split_number(s).ok_or_else(|| format!("'{}' is not a number", s.trim()))
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("missing value".into());
    }
    match kind {
        Kind::Count => raw
            .parse::<usize>()
            .map(Value::Count)
            .map_err(|_| format!("'{raw}' is not a non-negative integer")),
        Kind::Seed => raw
            .parse::<u64>()
            .map(Value::Seed)
            .map_err(|_| format!("'{raw}' is not an unsigned 64-bit integer")),
        Kind::Problem => raw.parse::<ProblemKind>().map(Value::Problem).map_err(|e| e.to_string()),
        Kind::Phase => raw.parse::<PhaseModel>().map(Value::Phase).map_err(|e| e.to_string()),
        Kind::Policies => {
            if raw.eq_ignore_ascii_case("auto") {
                return Ok(Value::Policies(None));
            }
            let list = raw
                .split(',')
                .map(|p| p.parse::<PolicyId>().map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Policies(Some(list)))
        }
        Kind::PowerList | Kind::TimeList => {
            let mut out = Vec::new();
            for item in raw.split(',') {
                let (v, unit) = number(item)?;
                match scale(kind, v, unit)? {
                    Value::Scalar(x) => out.push(x),
                    _ => unreachable!("list kinds scale to scalars"),
                }
            }
            Ok(Value::List(out))
        }
        _ => {
            let (v, unit) = number(raw)?;
            scale(kind, v, unit)
        }
    }
}

fn render_value(kind: Kind, value: &Value) -> String {
    let list = |v: &[f64], unit: &str| v.iter().map(|x| format!("{x:?} {unit}")).collect::<Vec<_>>().join(", ");
    match value {
        Value::Count(n) => n.to_string(),
        Value::Seed(s) => s.to_string(),
        Value::Problem(p) => p.to_string(),
        Value::Phase(p) => p.to_string(),
        Value::Policies(None) => "auto".into(),
        Value::Policies(Some(v)) => v.iter().map(|p| p.name()).collect::<Vec<_>>().join(", "),
        Value::Wavelengths(w) => format!("{w:?} lambda"),
        Value::List(v) => match kind {
            Kind::TimeList => list(v, "s"),
            _ => list(v, "W"),
        },
        Value::Scalar(x) => {
            let unit = match kind {
                Kind::Power => " W",
                Kind::InvPower => " /W",
                Kind::Decibel => " dB",
                Kind::Frequency => " Hz",
                Kind::Length => " m",
                Kind::Angle => " rad",
                Kind::Temperature => " K",
                Kind::Speed => " m/s",
                _ => "",
            };
            format!("{x:?}{unit}")
        }
    }
}

/// Fully resolved configuration: one value per schema key.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: Vec<Value>,
}

impl Default for Config {
    fn default() -> Self {
        let values = SCHEMA
            .iter()
            .map(|s| parse_value(s.kind, s.default).unwrap_or_else(|e| panic!("bad default for {}.{}: {e}", s.section, s.key)))
            .collect();
        Self { values }
    }
}

fn find(section: &str, key: &str) -> Option<usize> {
    SCHEMA.iter().position(|s| s.section == section && s.key == key)
}

/// Resolves `key` or `section.key` to a schema index. A plain key must be
/// unique across sections.
pub fn resolve_key(name: &str) -> Result<usize, String> {
    let name = name.trim();
    if let Some((section, key)) = name.split_once('.') {
        return find(section.trim(), key.trim()).ok_or_else(|| format!("unknown key '{name}'"));
    }
    let hits: Vec<usize> = SCHEMA.iter().enumerate().filter(|(_, s)| s.key == name).map(|(i, _)| i).collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        [] => Err(format!("unknown key '{name}'")),
        many => Err(format!(
            "key '{name}' is ambiguous; use one of {}",
            many.iter()
                .map(|&i| format!("{}.{}", SCHEMA[i].section, SCHEMA[i].key))
                .collect::<Vec<_>>()
                .join(", ")
        )),
    }
}

/// Splits a `key=value` override.
pub fn parse_override(text: &str) -> Result<(String, String), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("override '{text}' is not of the form key=value"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("override '{text}' has an empty key"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl Config {
    /// Parses `text` on top of the defaults.
    pub fn from_text(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_text(text, origin)?;
        Ok(c)
    }

    /// Applies a config file on top of the current values.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        let mut section: Option<&str> = None;
        let mut seen = vec![false; SCHEMA.len()];
        for (n, raw_line) in text.lines().enumerate() {
            let line_no = Some(n + 1);
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(origin, line_no, format!("unterminated section header '{line}'")))?
                    .trim();
                if !SCHEMA.iter().any(|s| s.section == name) {
                    return Err(ConfigError::new(origin, line_no, format!("unknown section [{name}]")));
                }
                section = Some(SCHEMA.iter().find(|s| s.section == name).map(|s| s.section).unwrap_or_default());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(origin, line_no, format!("expected 'key = value', found '{line}'")))?;
            let key = key.trim();
            let sec = section.ok_or_else(|| ConfigError::new(origin, line_no, format!("key '{key}' appears before any section header")))?;
            let idx = find(sec, key).ok_or_else(|| ConfigError::new(origin, line_no, format!("unknown key '{key}' in section [{sec}]")))?;
            if seen[idx] {
                return Err(ConfigError::new(
                    origin,
                    line_no,
                    format!("duplicate key '{key}' in section [{sec}]"),
                ));
            }
            seen[idx] = true;
            self.values[idx] =
                parse_value(SCHEMA[idx].kind, value).map_err(|e| ConfigError::new(origin, line_no, format!("{sec}.{key}: {e}")))?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, text: &str) -> Result<(), ConfigError> {
        let origin = "--set";
        let (key, value) = parse_override(text).map_err(|e| ConfigError::new(origin, None, e))?;
        let idx = resolve_key(&key).map_err(|e| ConfigError::new(origin, None, e))?;
        let spec = &SCHEMA[idx];
        self.values[idx] =
            parse_value(spec.kind, &value).map_err(|e| ConfigError::new(origin, None, format!("{}.{}: {e}", spec.section, spec.key)))?;
        Ok(())
    }

    /// Canonical text with every key, SI units and round-trip floats.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        for (spec, value) in SCHEMA.iter().zip(&self.values) {
            if spec.section != current {
                if !current.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{}]\n", spec.section));
                current = spec.section;
            }
            out.push_str(&format!("{} = {}\n", spec.key, render_value(spec.kind, value)));
        }
        out
    }

    fn value(&self, section: &str, key: &str) -> &Value {
        &self.values[find(section, key).unwrap_or_else(|| panic!("schema lacks {section}.{key}"))]
    }

    fn scalar(&self, section: &str, key: &str) -> f64 {
        match self.value(section, key) {
            Value::Scalar(x) => *x,
            other => panic!("{section}.{key} is not a scalar: {other:?}"),
        }
    }

    fn count(&self, section: &str, key: &str) -> usize {
        match self.value(section, key) {
            Value::Count(n) => *n,
            other => panic!("{section}.{key} is not a count: {other:?}"),
        }
    }

    fn list(&self, section: &str, key: &str) -> Vec<f64> {
        match self.value(section, key) {
            Value::List(v) => v.clone(),
            other => panic!("{section}.{key} is not a list: {other:?}"),
        }
    }

    fn phase(&self, section: &str) -> PhaseModel {
        match self.value(section, "phase_model") {
            Value::Phase(p) => *p,
            other => panic!("{section}.phase_model is not a phase model: {other:?}"),
        }
    }

    fn length(&self, section: &str, key: &str) -> f64 {
        match self.value(section, key) {
            Value::Scalar(x) => *x,
            Value::Wavelengths(w) => w * SPEED_OF_LIGHT / self.scalar("geometry", "frequency"),
            other => panic!("{section}.{key} is not a length: {other:?}"),
        }
    }

    pub fn seed(&self) -> u64 {
        match self.value("run", "seed") {
            Value::Seed(s) => *s,
            other => panic!("run.seed is not a seed: {other:?}"),
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        let idx = find("run", "seed").expect("schema has run.seed");
        self.values[idx] = Value::Seed(seed);
    }

    pub fn problem_kind(&self) -> ProblemKind {
        match self.value("run", "problem") {
            Value::Problem(p) => *p,
            other => panic!("run.problem is not a problem kind: {other:?}"),
        }
    }

    /// Requested policies; `auto` expands to the exhaustive search followed
    /// by the four heuristics of the configured problem.
    pub fn policies(&self) -> Vec<PolicyId> {
        match self.value("run", "policies") {
            Value::Policies(Some(v)) => v.clone(),
            Value::Policies(None) => match self.problem_kind() {
                ProblemKind::ProblemA => vec![PolicyId::BruteForceA, PolicyId::A1, PolicyId::A2, PolicyId::A3, PolicyId::A4],
                ProblemKind::ProblemB => vec![PolicyId::BruteForceB, PolicyId::B1, PolicyId::B2, PolicyId::B3, PolicyId::B4],
            },
            other => panic!("run.policies is not a policy list: {other:?}"),
        }
    }

    /// SNR target, linear.
    pub fn gamma_0(&self) -> f64 {
        self.scalar("run", "gamma_0")
    }

    pub fn geometry(&self) -> ris_core::Result<RisGeometry> {
        RisGeometry::new(
            self.count("geometry", "m_x"),
            self.count("geometry", "m_y"),
            self.length("geometry", "d_x"),
            self.length("geometry", "d_y"),
            self.scalar("geometry", "frequency"),
        )
    }

    pub fn noise(&self) -> ris_core::Result<NoiseModel> {
        NoiseModel::with_temperature(
            self.scalar("noise", "bandwidth"),
            self.scalar("noise", "noise_figure"),
            self.scalar("noise", "temperature"),
        )
    }

    pub fn scenario(&self) -> ris_core::Result<Scenario> {
        let placement = Placement::new(
            self.length("placement", "d_t"),
            self.length("placement", "d_r"),
            self.scalar("placement", "theta_inc"),
            self.scalar("placement", "theta_dep"),
            self.scalar("placement", "g_t"),
            self.scalar("placement", "g_r"),
        )?
        .with_phase_model(self.phase("placement"));
        let p_t = self.scalar("link", "p_t");
        if !(p_t > 0.0) || !p_t.is_finite() {
            return Err(ris_core::Error::Domain("link.p_t must be positive".into()));
        }
        Ok(Scenario {
            geometry: self.geometry()?,
            placement,
            fading: FadingParams::new(self.scalar("fading", "sigma_t_sq"), self.scalar("fading", "sigma_r_sq"))?,
            harvester: HarvesterModel::new(
                self.scalar("harvester", "a"),
                self.scalar("harvester", "b"),
                self.scalar("harvester", "p_max"),
                self.scalar("harvester", "eta_rf"),
            )?,
            power: RisPowerModel::new(
                self.scalar("power", "p_static"),
                self.scalar("power", "p_dynamic"),
                self.scalar("power", "alpha"),
                self.scalar("power", "p_r"),
            )?,
            noise: self.noise()?,
            p_t,
        })
    }

    pub fn experiment(&self) -> ris_core::Result<ExperimentConfig> {
        let scenario = self.scenario()?;
        let problem = scenario.problem(self.problem_kind(), self.scalar("run", "gamma_0"))?;
        let config = ExperimentConfig {
            trials: self.count("run", "trials"),
            master_seed: self.seed(),
            scenario,
            problem,
            policies: self.policies(),
            brute_force: BruteForceOptions {
                cap: self.count("run", "brute_force_cap"),
                ..BruteForceOptions::default()
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn brute_force_options(&self) -> BruteForceOptions {
        BruteForceOptions {
            cap: self.count("run", "brute_force_cap"),
            ..BruteForceOptions::default()
        }
    }

    pub fn tracking(&self) -> ris_core::Result<TrackingScenario> {
        let s = TrackingScenario {
            tx_height: self.length("tracking", "tx_height"),
            rx_height: self.length("tracking", "rx_height"),
            path_start: self.length("tracking", "path_start"),
            path_end: self.length("tracking", "path_end"),
            user_speed: self.scalar("tracking", "user_speed"),
            ris_to_path_ground_distance: self.length("tracking", "ris_to_path_ground_distance"),
            tx_to_ris_ground_distance: self.length("tracking", "tx_to_ris_ground_distance"),
            tx_ris_distance: self.length("tracking", "tx_ris_distance"),
            tx_lateral_offset: self.length("tracking", "tx_lateral_offset"),
            snr_drop_threshold_db: self.scalar("tracking", "threshold"),
            alpha: self.scalar("tracking", "alpha"),
            geometry: self.geometry()?,
            step: self.length("tracking", "step"),
            g_t: self.scalar("placement", "g_t"),
            g_r: self.scalar("placement", "g_r"),
            p_t: self.scalar("link", "p_t"),
            sigma_sq: noise_power(&self.noise()?),
            phase_model: self.phase("tracking"),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn reconfig_durations(&self) -> Vec<f64> {
        self.list("tracking", "reconfig_durations")
    }

    pub fn p_dynamic_grid(&self) -> Vec<f64> {
        self.list("tracking", "p_dynamic_grid")
    }

    /// Near limit and far range for cadence summaries, m.
    pub fn cadence_regions(&self) -> (f64, (f64, f64)) {
        (
            self.length("tracking", "near_limit"),
            (self.length("tracking", "far_min"), self.length("tracking", "far_max")),
        )
    }
}

/// Drops a `#` or `;` comment that starts the line or follows whitespace.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'#' || b == b';') && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_baseline() {
        let c = Config::default();
        let s = c.scenario().unwrap();
        assert_eq!(s.geometry.num_cells(), 10);
        assert_eq!(s.placement.g_t, 10f64.powf(4.0));
        assert_eq!(s.harvester.p_max, 20e-3);
        assert_eq!(s.power.p_d_avg(), 0.8 * 1e-3 * 10e-3);
        assert!((s.geometry.d_x - s.geometry.wavelength() / 2.0).abs() < 1e-15);
        assert_eq!(c.policies().len(), 5);
        assert_eq!(c.seed(), 1);
    }

    #[test]
    fn units() {
        let c = Config::from_text(
            "[harvester]\np_max = 13 dBm\nb = 1000 uW\n[placement]\ntheta_inc = 0.5 rad\ng_r = 3\n",
            "t",
        )
        .unwrap();
        let s = c.scenario().unwrap();
        assert!((s.harvester.p_max - 10f64.powf(-1.7)).abs() < 1e-15);
        assert!((s.harvester.b - 1e-3).abs() < 1e-18);
        assert_eq!(s.placement.theta_inc, 0.5);
        assert_eq!(s.placement.g_r, 3.0);
        assert_eq!(split_number("20mW"), Some((20.0, "mW")));
        assert_eq!(split_number("-1.5e-3 s"), Some((-1.5e-3, "s")));
        assert_eq!(split_number("abc"), None);
    }

    #[test]
    fn render_round_trip() {
        let mut c = Config::from_text("[geometry]\nm_x = 4\nm_y = 3\n[tracking]\nreconfig_durations = 5 ms\n", "t").unwrap();
        c.set("g_r=21.5 dBi").unwrap();
        let text = c.render();
        let back = Config::from_text(&text, "rendered").unwrap();
        assert_eq!(back, c);
        assert_eq!(back.render(), text);
        assert!(text.contains("m_x = 4\n"));
    }

    #[test]
    fn line_numbered_errors() {
        let e = Config::from_text("[run]\n\ntrials = many\n", "cfg.ini").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.to_string().starts_with("cfg.ini:3: run.trials"));
        let e = Config::from_text("[nowhere]\n", "x").unwrap_err();
        assert!(e.to_string().contains("unknown section"));
        let e = Config::from_text("trials = 3\n", "x").unwrap_err();
        assert!(e.to_string().contains("before any section"));
        let e = Config::from_text("[run]\nfoo = 3\n", "x").unwrap_err();
        assert!(e.to_string().contains("unknown key 'foo'"));
        let e = Config::from_text("[link]\np_t = 3 parsecs\n", "x").unwrap_err();
        assert!(e.to_string().contains("unit 'parsecs'"));
        let e = Config::from_text("[run]\nseed = 1\nseed = 2\n", "x").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = Config::from_text("[run]\npolicies = A1, Z9\n", "x").unwrap_err();
        assert!(e.to_string().contains("valid policies"));
    }

    #[test]
    fn comments_ignored() {
        let c = Config::from_text("# header\n[run] ; trailing\ntrials = 7 # seven\n", "x").unwrap();
        assert_eq!(c.count("run", "trials"), 7);
    }

    #[test]
    fn overrides_resolve_uniquely() {
        let mut c = Config::default();
        c.set("sigma_t_sq = 0").unwrap();
        assert_eq!(c.scenario().unwrap().fading.sigma_t_sq, 0.0);
        let e = c.set("alpha=1").unwrap_err();
        assert!(e.message.contains("power.alpha") && e.message.contains("tracking.alpha"));
        c.set("tracking.alpha=0.5").unwrap();
        assert_eq!(c.tracking().unwrap().alpha, 0.5);
        assert!(c.set("nokey").is_err());
        assert!(c.set("=3").is_err());
        assert!(c.set("bogus=3").is_err());
    }

    #[test]
    fn experiment_validation_surfaces() {
        let mut c = Config::default();
        c.set("policies=B1").unwrap();
        assert!(c.experiment().is_err());
        c.set("problem=B").unwrap();
        assert_eq!(c.experiment().unwrap().problem.kind, ProblemKind::ProblemB);
    }
}
