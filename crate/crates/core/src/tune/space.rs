//! Mixed numeric / categorical search spaces and points within them.

use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("dimension `{0}`: lower bound must be below upper bound")]
    InvalidRange(String),
    #[error("dimension `{0}`: log scale needs a positive lower bound")]
    LogNonPositive(String),
    #[error("dimension `{0}`: categorical choices must be non-empty and distinct")]
    BadChoices(String),
    #[error("dimension `{0}` declared twice")]
    DuplicateName(String),
    #[error("integer dimension `{0}` contains no integer")]
    NoInteger(String),
    #[error("search space has no dimensions")]
    Empty,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("configuration has no value for `{0}`")]
    MissingValue(String),
    #[error("value of `{0}` has the wrong kind")]
    WrongKind(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimKind {
    Numeric {
        lo: f64,
        hi: f64,
        integer: bool,
        log_scale: bool,
    },
    Categorical {
        choices: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dim {
    pub name: String,
    pub kind: DimKind,
}

impl Dim {
    pub fn float(name: &str, lo: f64, hi: f64) -> Self {
        Self::numeric(name, lo, hi, false, false)
    }

    pub fn log_float(name: &str, lo: f64, hi: f64) -> Self {
        Self::numeric(name, lo, hi, false, true)
    }

    pub fn int(name: &str, lo: i64, hi: i64) -> Self {
        Self::numeric(name, lo as f64, hi as f64, true, false)
    }

    pub fn numeric(name: &str, lo: f64, hi: f64, integer: bool, log_scale: bool) -> Self {
        Self {
            name: name.to_string(),
            kind: DimKind::Numeric {
                lo,
                hi,
                integer,
                log_scale,
            },
        }
    }

    pub fn categorical(name: &str, choices: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            kind: DimKind::Categorical {
                choices: choices.iter().map(|c| c.to_string()).collect(),
            },
        }
    }

    fn validate(&self) -> Result<(), SpaceError> {
        match &self.kind {
            DimKind::Numeric {
                lo,
                hi,
                integer,
                log_scale,
            } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(SpaceError::InvalidRange(self.name.clone()));
                }
                if *log_scale && *lo <= 0.0 {
                    return Err(SpaceError::LogNonPositive(self.name.clone()));
                }
                if *integer && lo.ceil() > hi.floor() {
                    return Err(SpaceError::NoInteger(self.name.clone()));
                }
            }
            DimKind::Categorical { choices } => {
                let mut sorted = choices.clone();
                sorted.sort();
                sorted.dedup();
                if choices.is_empty() || sorted.len() != choices.len() {
                    return Err(SpaceError::BadChoices(self.name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Maps a unit-interval position onto the dimension's range (log-aware,
    /// integer dims rounded to nearest and clamped).
    pub fn value_at(&self, t: f64) -> Value {
        match &self.kind {
            DimKind::Numeric {
                lo,
                hi,
                integer,
                log_scale,
            } => {
                let (a, b) = transformed(*lo, *hi, *log_scale);
                let x = untransform(a + t * (b - a), *log_scale).clamp(*lo, *hi);
                if *integer {
                    Value::Int(round_int(x, *lo, *hi))
                } else {
                    Value::Float(x)
                }
            }
            DimKind::Categorical { choices } => {
                let i = ((t * choices.len() as f64) as usize).min(choices.len() - 1);
                Value::Choice(choices[i].clone())
            }
        }
    }

    /// Position of a numeric value within the (transformed) range, in [0, 1].
    pub fn unit_position(&self, value: &Value) -> Option<f64> {
        match (&self.kind, value.as_f64()) {
            (
                DimKind::Numeric {
                    lo, hi, log_scale, ..
                },
                Some(x),
            ) => {
                let (a, b) = transformed(*lo, *hi, *log_scale);
                Some((transform(x, *log_scale) - a) / (b - a))
            }
            _ => None,
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (&self.kind, value) {
            (DimKind::Numeric { lo, hi, integer, .. }, Value::Int(i)) => {
                *integer && (*i as f64) >= *lo && (*i as f64) <= *hi
            }
            (DimKind::Numeric { lo, hi, integer, .. }, Value::Float(x)) => {
                !*integer && x >= lo && x <= hi
            }
            (DimKind::Categorical { choices }, Value::Choice(c)) => choices.contains(c),
            _ => false,
        }
    }

    fn center(&self) -> Value {
        match &self.kind {
            DimKind::Numeric { .. } => self.value_at(0.5),
            DimKind::Categorical { choices } => Value::Choice(choices[0].clone()),
        }
    }
}

pub(crate) fn transform(x: f64, log_scale: bool) -> f64 {
    if log_scale {
        x.ln()
    } else {
        x
    }
}

pub(crate) fn untransform(x: f64, log_scale: bool) -> f64 {
    if log_scale {
        x.exp()
    } else {
        x
    }
}

pub(crate) fn transformed(lo: f64, hi: f64, log_scale: bool) -> (f64, f64) {
    (transform(lo, log_scale), transform(hi, log_scale))
}

pub(crate) fn round_int(x: f64, lo: f64, hi: f64) -> i64 {
    (x.round().clamp(lo.ceil(), hi.floor())) as i64
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperparameterSpace {
    dims: Vec<Dim>,
}

impl HyperparameterSpace {
    pub fn new(dims: Vec<Dim>) -> Result<Self, SpaceError> {
        if dims.is_empty() {
            return Err(SpaceError::Empty);
        }
        for (i, d) in dims.iter().enumerate() {
            d.validate()?;
            if dims[..i].iter().any(|o| o.name == d.name) {
                return Err(SpaceError::DuplicateName(d.name.clone()));
            }
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn dim(&self, name: &str) -> Option<&Dim> {
        self.dims.iter().find(|d| d.name == name)
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        config.entries.len() == self.dims.len()
            && self
                .dims
                .iter()
                .zip(&config.entries)
                .all(|(d, (name, v))| &d.name == name && d.contains(v))
    }

    /// Midpoint of every numeric range, first choice of every categorical.
    pub fn center(&self) -> Configuration {
        Configuration::from_entries(
            self.dims
                .iter()
                .map(|d| (d.name.clone(), d.center()))
                .collect(),
        )
    }

    /// Independent uniform draw per dimension (log-uniform on log dims).
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> Configuration {
        Configuration::from_entries(
            self.dims
                .iter()
                .map(|d| (d.name.clone(), d.value_at(rng.gen::<f64>())))
                .collect(),
        )
    }

    /// Moves every numeric value into range and onto the integer grid; picks
    /// the first choice for unknown categorical values.
    pub fn clamp(&self, config: &Configuration) -> Configuration {
        Configuration::from_entries(
            self.dims
                .iter()
                .map(|d| {
                    let v = config.get(&d.name);
                    let value = match (&d.kind, v) {
                        (DimKind::Numeric { lo, hi, integer, .. }, Some(v)) if v.as_f64().is_some() => {
                            let x = v.as_f64().unwrap().clamp(*lo, *hi);
                            if *integer {
                                Value::Int(round_int(x, *lo, *hi))
                            } else {
                                Value::Float(x)
                            }
                        }
                        (DimKind::Categorical { choices }, Some(Value::Choice(c))) if choices.contains(c) => {
                            Value::Choice(c.clone())
                        }
                        _ => d.center(),
                    };
                    (d.name.clone(), value)
                })
                .collect(),
        )
    }

    /// Parses the space file format:
    ///
    /// ```text
    /// name num lo hi [int] [log]
    /// name int lo hi [log]
    /// name cat c1,c2,...
    /// ```
    pub fn parse(text: &str) -> Result<Self, SpaceError> {
        let mut dims = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            let err = |reason: &str| SpaceError::Parse {
                line: lineno,
                reason: reason.to_string(),
            };
            if fields.len() < 3 {
                return Err(err("expected `name type ...`"));
            }
            let name = fields[0];
            let dim = match fields[1] {
                "cat" => {
                    if fields.len() != 3 {
                        return Err(err("categorical dims take one comma-separated choice list"));
                    }
                    let choices: Vec<&str> = fields[2].split(',').collect();
                    Dim::categorical(name, &choices)
                }
                kind @ ("num" | "float" | "real" | "int") => {
                    if fields.len() < 4 {
                        return Err(err("numeric dims need `lo hi`"));
                    }
                    let lo: f64 = fields[2].parse().map_err(|_| err("lower bound is not a number"))?;
                    let hi: f64 = fields[3].parse().map_err(|_| err("upper bound is not a number"))?;
                    let mut integer = kind == "int";
                    let mut log_scale = false;
                    for flag in &fields[4..] {
                        match *flag {
                            "int" => integer = true,
                            "log" => log_scale = true,
                            other => return Err(err(&format!("unknown flag `{other}`"))),
                        }
                    }
                    Dim::numeric(name, lo, hi, integer, log_scale)
                }
                other => return Err(err(&format!("unknown dimension type `{other}`"))),
            };
            dims.push(dim);
        }
        Self::new(dims)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.dims {
            match &d.kind {
                DimKind::Numeric {
                    lo,
                    hi,
                    integer,
                    log_scale,
                } => {
                    write!(out, "{} num {lo} {hi}", d.name)?;
                    if *integer {
                        write!(out, " int")?;
                    }
                    if *log_scale {
                        write!(out, " log")?;
                    }
                    writeln!(out)?;
                }
                DimKind::Categorical { choices } => {
                    writeln!(out, "{} cat {}", d.name, choices.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Choice(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::Choice(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Choice(c) => f.write_str(c),
        }
    }
}

/// A point in a search space: one named value per dimension, in space order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Configuration {
    entries: Vec<(String, Value)>,
}

impl Configuration {
    pub fn from_entries(entries: Vec<(String, Value)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn set(&mut self, name: &str, value: Value) {
        match self.entries.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((name.to_string(), value)),
        }
    }

    pub fn float(&self, name: &str) -> Result<f64, SpaceError> {
        self.get(name)
            .ok_or_else(|| SpaceError::MissingValue(name.to_string()))?
            .as_f64()
            .ok_or_else(|| SpaceError::WrongKind(name.to_string()))
    }

    pub fn int(&self, name: &str) -> Result<i64, SpaceError> {
        match self.get(name) {
            Some(Value::Int(i)) => Ok(*i),
            Some(Value::Float(x)) if x.fract() == 0.0 => Ok(*x as i64),
            Some(_) => Err(SpaceError::WrongKind(name.to_string())),
            None => Err(SpaceError::MissingValue(name.to_string())),
        }
    }

    pub fn choice(&self, name: &str) -> Result<&str, SpaceError> {
        match self.get(name) {
            Some(Value::Choice(c)) => Ok(c),
            Some(_) => Err(SpaceError::WrongKind(name.to_string())),
            None => Err(SpaceError::MissingValue(name.to_string())),
        }
    }

    /// `key=value` lines, the plugin configuration format.
    pub fn to_key_values(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            match v {
                Value::Int(i) => map.serialize_entry(k, i)?,
                Value::Float(x) => map.serialize_entry(k, x)?,
                Value::Choice(c) => map.serialize_entry(k, c)?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ConfigVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Choice(String),
        }

        impl<'de> Visitor<'de> for ConfigVisitor {
            type Value = Configuration;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of hyperparameter values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Configuration, A::Error> {
                let mut entries = Vec::new();
                while let Some((k, raw)) = access.next_entry::<String, Raw>()? {
                    let v = match raw {
                        Raw::Int(i) => Value::Int(i),
                        Raw::Float(x) => Value::Float(x),
                        Raw::Choice(c) => Value::Choice(c),
                    };
                    entries.push((k, v));
                }
                Ok(Configuration { entries })
            }
        }

        deserializer.deserialize_map(ConfigVisitor)
    }
}
