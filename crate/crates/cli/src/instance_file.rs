//! JSON instance files.
//!
//! A file gives `frame_time`, `wavelengths` and either an explicit `stations`
//! list or a `generator` block that derives every station parameter from a
//! rule. The published schema lives in `instances/schema.json`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wdm_revenue::rng::substream;
use wdm_revenue::{Instance, StationParams, TrafficClass};

pub const SCHEMA: &str = include_str!("../instances/schema.json");

/// Where a file went wrong and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// `line L, column C` for syntax and type errors, a field path otherwise.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ParseError {}

fn field_error(location: impl Into<String>, message: impl fmt::Display) -> ParseError {
    ParseError {
        location: location.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub frame_time: f64,
    pub wavelengths: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stations: Vec<StationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationEntry {
    /// Defaults to the position in the list, starting at 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<TrafficClass>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub nu: f64,
    pub mu: f64,
    pub switchover: f64,
}

/// Parameter rule for generated stations; `i` runs from 1 to `count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Rule {
    Constant {
        value: f64,
    },
    /// `intercept + slope · i`.
    Linear {
        slope: f64,
        #[serde(default)]
        intercept: f64,
    },
    /// Uniform on `[low, high)`; needs the generator seed.
    Uniform { low: f64, high: f64 },
}

impl Rule {
    fn is_random(&self) -> bool {
        matches!(self, Rule::Uniform { .. })
    }

    fn validate(&self, path: &str) -> Result<(), ParseError> {
        let finite = match *self {
            Rule::Constant { value } => value.is_finite(),
            Rule::Linear { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            Rule::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite()) {
                    false
                } else if low > high {
                    return Err(field_error(path, format!("low {low} exceeds high {high}")));
                } else {
                    true
                }
            }
        };
        if finite {
            Ok(())
        } else {
            Err(field_error(path, "rule parameters must be finite"))
        }
    }

    fn draw(&self, i: usize, rng: &mut impl Rng) -> f64 {
        match *self {
            Rule::Constant { value } => value,
            Rule::Linear { slope, intercept } => intercept + slope * i as f64,
            Rule::Uniform { low, high } if low == high => low,
            Rule::Uniform { low, high } => rng.random_range(low..high),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub gamma: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Rule>,
    pub nu: Rule,
    pub mu: Rule,
    pub switchover: Rule,
}

impl Generator {
    /// Draws stations in order; within a station the fields are drawn as
    /// gamma, theta, nu, mu, switchover from one stream of the seed.
    fn stations(&self) -> Result<Vec<StationEntry>, ParseError> {
        if self.count == 0 {
            return Err(field_error("generator.count", "at least one station is required"));
        }
        let theta = self.theta.unwrap_or(Rule::Constant { value: 0.0 });
        let rules = [
            ("gamma", self.gamma),
            ("theta", theta),
            ("nu", self.nu),
            ("mu", self.mu),
            ("switchover", self.switchover),
        ];
        for (name, rule) in &rules {
            rule.validate(&format!("generator.{name}"))?;
            if rule.is_random() && self.seed.is_none() {
                return Err(field_error(
                    format!("generator.{name}"),
                    "uniform rules need generator.seed",
                ));
            }
        }
        let mut rng = substream(self.seed.unwrap_or(0), 0);
        Ok((1..=self.count)
            .map(|i| {
                let [gamma, theta, nu, mu, switchover] = rules.map(|(_, rule)| rule.draw(i, &mut rng));
                StationEntry {
                    id: Some(i),
                    gamma: Some(gamma),
                    classes: None,
                    theta: Some(theta),
                    nu,
                    mu,
                    switchover,
                }
            })
            .collect())
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| {
            let location = if e.line() > 0 {
                format!("line {}, column {}", e.line(), e.column())
            } else {
                "document".to_string()
            };
            // serde_json appends the position to its message; keep only the cause.
            let message = e.to_string();
            let message = message
                .rsplit_once(" at line ")
                .map_or(message.as_str(), |(head, _)| head)
                .to_string();
            field_error(location, message)
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance files always serialize");
        text.push('\n');
        text
    }

    /// Explicit-station file describing `instance`.
    pub fn from_instance(instance: &Instance) -> Self {
        let stations = instance
            .stations
            .iter()
            .map(|s| {
                let explicit_classes = !s.classes.is_empty();
                StationEntry {
                    id: Some(s.station_id),
                    gamma: (!explicit_classes).then_some(s.gamma),
                    classes: explicit_classes.then(|| s.classes.clone()),
                    theta: (!explicit_classes && s.theta != 0.0).then_some(s.theta),
                    nu: s.retry_rate,
                    mu: s.drop_decay,
                    switchover: s.switchover,
                }
            })
            .collect();
        Self {
            frame_time: instance.frame_time,
            wavelengths: instance.wavelengths,
            stations,
            generator: None,
        }
    }

    pub fn to_instance(&self) -> Result<Instance, ParseError> {
        if !(self.frame_time.is_finite() && self.frame_time > 0.0) {
            return Err(field_error("frame_time", format!("must be positive, got {}", self.frame_time)));
        }
        if self.wavelengths == 0 {
            return Err(field_error("wavelengths", "must be at least 1"));
        }
        let (entries, prefix) = match (&self.generator, self.stations.is_empty()) {
            (Some(_), false) => {
                return Err(field_error("generator", "give either stations or generator, not both"));
            }
            (Some(generator), true) => (generator.stations()?, "generator.station"),
            (None, true) => return Err(field_error("stations", "at least one station is required")),
            (None, false) => (self.stations.clone(), "stations"),
        };
        let mut stations = Vec::with_capacity(entries.len());
        for (n, entry) in entries.iter().enumerate() {
            let path = format!("{prefix}[{n}]");
            let station = entry_to_station(entry, n + 1, &path)?;
            if station.switchover >= self.frame_time {
                return Err(field_error(
                    format!("{path}.switchover"),
                    format!("{} does not fit in frame time {}", station.switchover, self.frame_time),
                ));
            }
            if let Some(first) = stations.iter().position(|s: &StationParams| s.station_id == station.station_id) {
                return Err(field_error(
                    format!("{path}.id"),
                    format!("id {} already used by {prefix}[{first}]", station.station_id),
                ));
            }
            stations.push(station);
        }
        Instance::new(stations, self.wavelengths, self.frame_time).map_err(|e| field_error("instance", e))
    }
}

fn entry_to_station(entry: &StationEntry, position: usize, path: &str) -> Result<StationParams, ParseError> {
    let id = entry.id.unwrap_or(position);
    let check = |name: &str, value: f64, ok: bool, rule: &str| {
        if ok {
            Ok(())
        } else {
            Err(field_error(format!("{path}.{name}"), format!("{rule}, got {value}")))
        }
    };
    if id == 0 {
        return Err(field_error(format!("{path}.id"), "ids start at 1"));
    }
    check("nu", entry.nu, entry.nu.is_finite() && entry.nu > 0.0, "must be positive")?;
    check("mu", entry.mu, entry.mu.is_finite() && entry.mu >= 0.0, "must be nonnegative")?;
    check(
        "switchover",
        entry.switchover,
        entry.switchover.is_finite() && entry.switchover >= 0.0,
        "must be nonnegative",
    )?;
    match (&entry.gamma, &entry.classes) {
        (Some(_), Some(_)) => Err(field_error(path, "give either gamma or classes, not both")),
        (None, None) => Err(field_error(path, "missing gamma or classes")),
        (Some(gamma), None) => {
            let theta = entry.theta.unwrap_or(0.0);
            check("gamma", *gamma, gamma.is_finite() && *gamma >= 0.0, "must be nonnegative")?;
            check("theta", theta, theta.is_finite() && theta >= 0.0, "must be nonnegative")?;
            StationParams::new(id, *gamma, theta, entry.nu, entry.mu, entry.switchover).map_err(|e| field_error(path, e))
        }
        (None, Some(classes)) => {
            if entry.theta.is_some() {
                return Err(field_error(
                    format!("{path}.theta"),
                    "theta is derived from the classes and cannot be given",
                ));
            }
            if classes.is_empty() {
                return Err(field_error(format!("{path}.classes"), "at least one class is required"));
            }
            for (c, class) in classes.iter().enumerate() {
                class
                    .validate()
                    .map_err(|e| field_error(format!("{path}.classes[{c}]"), e))?;
            }
            StationParams::from_classes(id, classes.clone(), entry.nu, entry.mu, entry.switchover)
                .map_err(|e| field_error(path, e))
        }
    }
}

/// A parsed instance together with the digest of the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub file: InstanceFile,
    /// `sha256:` followed by the hex digest of the source bytes.
    pub digest: String,
}

pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn load_str(text: &str) -> Result<LoadedInstance, ParseError> {
    let file = InstanceFile::parse(text)?;
    let instance = file.to_instance()?;
    Ok(LoadedInstance {
        instance,
        file,
        digest: digest(text),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "frame_time": 2,
  "wavelengths": 2,
  "stations": [
    {"gamma": 1, "nu": 0.5, "mu": 0.5, "switchover": 0.2},
    {"gamma": 2, "theta": 0.5, "nu": 0.5, "mu": 0.5, "switchover": 0.2}
  ]
}"#;

    #[test]
    fn explicit_stations() {
        let loaded = load_str(SMALL).unwrap();
        let inst = loaded.instance;
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.stations[1].station_id, 2);
        assert_eq!(inst.stations[1].theta, 0.5);
        assert_eq!(inst.stations[0].theta, 0.0);
        assert!(loaded.digest.starts_with("sha256:"));
        assert_eq!(loaded.digest.len(), 7 + 64);
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = load_str("{\n  \"frame_time\": 2,\n  \"wavelengths\": ,\n}").unwrap_err();
        assert!(err.location.starts_with("line 3"), "{err}");
        let err = load_str("{\"frame_time\": 2, \"wavelengths\": 1, \"stations\": [], \"extra\": 1}").unwrap_err();
        assert!(err.message.contains("extra"), "{err}");
    }

    #[test]
    fn field_errors_carry_a_path() {
        let text = SMALL.replace("\"gamma\": 2, \"theta\": 0.5, \"nu\": 0.5", "\"gamma\": 2, \"theta\": 0.5, \"nu\": -1");
        let err = load_str(&text).unwrap_err();
        assert_eq!(err.location, "stations[1].nu");
        let err = load_str(r#"{"frame_time": 2, "wavelengths": 1, "stations": []}"#).unwrap_err();
        assert_eq!(err.location, "stations");
        let text = SMALL.replace("\"switchover\": 0.2}\n  ]", "\"switchover\": 2.5}\n  ]");
        assert_eq!(load_str(&text).unwrap_err().location, "stations[1].switchover");
    }

    #[test]
    fn classes_aggregate() {
        let text = r#"{"frame_time": 2, "wavelengths": 1, "stations": [
            {"classes": [{"arrival_rate": 2, "profit_per_packet": 1, "penalty_per_packet": 0.5},
                         {"arrival_rate": 1, "profit_per_packet": 3, "penalty_per_packet": 0}],
             "nu": 0.5, "mu": 0.5, "switchover": 0.1}]}"#;
        let s = &load_str(text).unwrap().instance.stations[0];
        assert!((s.gamma - 6.0).abs() < 1e-12);
        assert!((s.theta - 1.0).abs() < 1e-12);
        let both = text.replace("\"nu\": 0.5", "\"theta\": 1, \"nu\": 0.5");
        assert_eq!(load_str(&both).unwrap_err().location, "stations[0].theta");
    }

    #[test]
    fn generator_rules() {
        let text = r#"{"frame_time": 8, "wavelengths": 4, "generator": {"count": 16,
            "gamma": {"kind": "linear", "slope": 0.5},
            "nu": {"kind": "constant", "value": 0.5},
            "mu": {"kind": "linear", "slope": 0.05, "intercept": 0.1},
            "switchover": {"kind": "constant", "value": 0.2}}}"#;
        let inst = load_str(text).unwrap().instance;
        assert_eq!(inst.len(), 16);
        assert_eq!(inst.stations[3].gamma, 2.0);
        assert!((inst.stations[0].drop_decay - 0.15).abs() < 1e-12);
        let random = text.replace(r#"{"kind": "constant", "value": 0.5}"#, r#"{"kind": "uniform", "low": 0.1, "high": 1}"#);
        assert_eq!(load_str(&random).unwrap_err().location, "generator.nu");
        let seeded = random.replace("\"count\": 16,", "\"count\": 16, \"seed\": 3,");
        let a = load_str(&seeded).unwrap().instance;
        let b = load_str(&seeded).unwrap().instance;
        assert_eq!(a, b);
        assert!(a.stations.iter().all(|s| (0.1..1.0).contains(&s.retry_rate)));
    }

    #[test]
    fn serialize_round_trip() {
        let inst = load_str(SMALL).unwrap().instance;
        let text = InstanceFile::from_instance(&inst).to_json();
        assert_eq!(load_str(&text).unwrap().instance, inst);
    }
}
