//! Flat `key = value` configuration files.
//!
//! Every key lives in a static registry that fixes its external unit, its
//! default and a one-line description. Values are stored exactly as written
//! (in external units) so that an echoed configuration re-ingests to the same
//! canonical numbers bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use superlab_core::params::{derive_model_params, AMU};
use superlab_core::{ExperimentConfig, ModelParams, KHZ};

/// External unit of a numeric key and its conversion to SI / rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    /// Frequencies: value × 2π × 10³ rad/s.
    KHz,
    /// Squared frequencies: value × (2π × 10³)².
    KHz2,
    MicroKelvin,
    Nanometre,
    Amu,
    Millisecond,
    Microsecond,
    Plain,
}

impl Unit {
    pub fn factor(self) -> f64 {
        match self {
            Unit::KHz => KHZ,
            Unit::KHz2 => KHZ * KHZ,
            Unit::MicroKelvin => 1e-6,
            Unit::Nanometre => 1e-9,
            Unit::Amu => AMU,
            Unit::Millisecond => 1e-3,
            Unit::Microsecond => 1e-6,
            Unit::Plain => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Unit::KHz => "kHz",
            Unit::KHz2 => "kHz^2",
            Unit::MicroKelvin => "uK",
            Unit::Nanometre => "nm",
            Unit::Amu => "amu",
            Unit::Millisecond => "ms",
            Unit::Microsecond => "us",
            Unit::Plain => "1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number(Unit),
    /// Non-negative integer.
    Count,
    Flag,
    Choice(&'static [&'static str]),
    /// Comma-separated subset of the given names.
    Names(&'static [&'static str]),
    /// Comma-separated plain numbers.
    Numbers,
}

impl Kind {
    fn describe(self) -> String {
        match self {
            Kind::Number(u) => format!("a number in {}", u.label()),
            Kind::Count => "a non-negative integer".into(),
            Kind::Flag => "true or false".into(),
            Kind::Choice(c) => format!("one of {}", c.join(", ")),
            Kind::Names(c) => format!("a comma-separated list from {}", c.join(", ")),
            Kind::Numbers => "a comma-separated list of numbers".into(),
        }
    }

    fn unit_label(self) -> &'static str {
        match self {
            Kind::Number(u) => u.label(),
            Kind::Count => "count",
            Kind::Flag => "flag",
            Kind::Choice(_) => "choice",
            Kind::Names(_) => "list",
            Kind::Numbers => "list",
        }
    }
}

pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    /// Default in external units; `None` means the value is derived.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const MODES: &[&str] = &[
    "threshold_vs_omega0",
    "threshold_vs_omega",
    "single_beam_vs_detuning",
    "coprop_gap",
    "pulse_trace",
    "spectrum",
];

pub const MODELS: &[&str] = &[
    "ideal",
    "decay",
    "doppler",
    "single_beam",
    "pole_single",
    "pole_coprop",
    "pole_counterprop",
];

const fn key(
    name: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    help: &'static str,
) -> KeySpec {
    KeySpec { name, kind, default, help }
}

use Kind::*;
use Unit::*;

pub static REGISTRY: &[KeySpec] = &[
    // Experimental settings.
    key("g_avg", Number(KHz), Some("1100"), "thermally averaged atom-cavity coupling"),
    key("g2_avg", Number(KHz2), Some("1210000"), "thermal average of g squared"),
    key("kappa", Number(KHz), Some("100"), "cavity field decay rate"),
    key("gamma_a", Number(KHz), Some("3000"), "atomic dipole decay rate"),
    key("Delta", Number(KHz), Some("-127000000"), "excited-state detuning"),
    key("Omega_r", Number(KHz), Some("250000"), "Rabi frequency of the r drive"),
    key("Omega_s", Number(KHz), Some("250000"), "Rabi frequency of the s drive"),
    key("omega_1", Number(KHz), Some("6834700"), "hyperfine splitting"),
    key("N", Count, Some("100000"), "atom number"),
    key("carrier_detuning", Number(KHz), Some("735"), "cavity minus mean drive frequency"),
    key("eom_half_split", Number(KHz), Some("6834485"), "half the drive frequency difference"),
    key("theta_r", Number(Plain), Some("0"), "phase of the r drive (rad)"),
    key("theta_s", Number(Plain), Some("0"), "phase of the s drive (rad)"),
    key("trap_depth", Number(MicroKelvin), Some("219"), "intracavity lattice depth"),
    key("trap_freq", Number(KHz), Some("50"), "trap frequency along the drives"),
    key("wavelength", Number(Nanometre), Some("780"), "drive wavelength"),
    key("atom_mass", Number(Amu), Some("86.909180527"), "atomic mass"),
    key("temperature_ratio", Number(Plain), Some("0.1"), "atomic temperature over lattice depth"),
    // Model-level overrides; derived from the settings above when absent.
    key("omega", Number(KHz), None, "effective cavity detuning"),
    key("omega_0", Number(KHz), None, "effective spin splitting"),
    key("delta", Number(KHz), None, "dispersive nonlinearity"),
    key("gamma_d", Number(KHz), None, "rms Doppler width"),
    key("gamma", Number(KHz), Some("0"), "collective spin decay rate"),
    key("sigma_z0", Number(Plain), Some("-0.5"), "initial spin inversion per atom"),
    // Run selection.
    key("mode", Choice(MODES), None, "what to compute"),
    key("models", Names(MODELS), None, "threshold models evaluated per sweep point"),
    key("sweep_start", Number(KHz), None, "first sweep value"),
    key("sweep_stop", Number(KHz), None, "last sweep value"),
    key("sweep_points", Count, Some("50"), "number of sweep points"),
    // Dynamics.
    key("lambda_r_max", Number(KHz), None, "final coupling of the r beam"),
    key("lambda_s_max", Number(KHz), None, "final coupling of the s beam"),
    key("ramp_time", Number(Millisecond), Some("3"), "linear ramp duration"),
    key("hold_time", Number(Millisecond), Some("7"), "hold at the final coupling"),
    key("n_classes", Count, Some("15"), "velocity classes (odd)"),
    key("modulated", Flag, Some("false"), "oscillate the Doppler shifts at the trap frequency"),
    key("alpha_seed", Number(Plain), Some("0.0001"), "initial cavity amplitude per sqrt(N)"),
    key("seed_floor", Flag, Some("true"), "keep the seed as a weak coherent drive"),
    key("sample_dt", Number(Microsecond), Some("1"), "output sampling interval"),
    key("rtol", Number(Plain), Some("0.0000000000001"), "integrator relative tolerance"),
    key("count_threshold", Number(Plain), Some("10"), "photon counts per bin that mark detection"),
    // Spectrum.
    key("lambda_frac", Numbers, Some("0.5, 0.8, 0.95"), "couplings as fractions of threshold"),
    key("probe_points", Count, Some("801"), "probe detuning grid size"),
    key("use_doppler", Flag, Some("true"), "include Doppler broadening"),
];

pub fn spec(name: &str) -> Option<&'static KeySpec> {
    REGISTRY.iter().find(|k| k.name == name)
}

/// Closest registered key by normalised edit distance.
pub fn nearest_key(name: &str) -> &'static str {
    REGISTRY
        .iter()
        .map(|k| (strsim::normalized_damerau_levenshtein(name, k.name), k.name))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, n)| n)
        .unwrap_or("")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(u64),
    Flag(bool),
    Text(String),
    Names(Vec<String>),
    Numbers(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Count(v) => write!(f, "{v}"),
            Value::Flag(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
            Value::Names(v) => f.write_str(&v.join(", ")),
            Value::Numbers(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

fn parse_value(kind: Kind, raw: &str) -> Result<Value, String> {
    let number = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{}` is not finite", s.trim()))
        }
    };
    match kind {
        Kind::Number(_) => number(raw).map(Value::Number),
        Kind::Count => {
            let v = number(raw)?;
            if v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
                return Err(format!("`{raw}` is not a non-negative integer"));
            }
            Ok(Value::Count(v as u64))
        }
        Kind::Flag => match raw.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(Value::Flag(true)),
            "false" | "no" | "off" | "0" => Ok(Value::Flag(false)),
            _ => Err(format!("`{raw}` is not true or false")),
        },
        Kind::Choice(choices) => {
            if choices.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(format!("`{raw}` is not {}", kind.describe()))
            }
        }
        Kind::Names(choices) => {
            let mut out: Vec<String> = Vec::new();
            for part in raw.split(',').map(str::trim) {
                if !choices.contains(&part) {
                    return Err(format!("`{part}` is not one of {}", choices.join(", ")));
                }
                if !out.iter().any(|p| p == part) {
                    out.push(part.to_string());
                }
            }
            Ok(Value::Names(out))
        }
        Kind::Numbers => raw
            .split(',')
            .map(number)
            .collect::<Result<Vec<_>, _>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err("empty list".into())
                } else {
                    Ok(Value::Numbers(v))
                }
            })
            .map_err(|e| format!("{e} in list `{raw}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Default,
    User,
    Derived,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Default => "default",
            Provenance::User => "user",
            Provenance::Derived => "derived",
        }
    }
}

/// Every problem found in a configuration, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem", self.problems.len())?;
        if self.problems.len() != 1 {
            f.write_str("s")?;
        }
        f.write_str("):")?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Parsed configuration: user-set and defaulted values keyed by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, (Value, Provenance)>,
}

impl Default for Config {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        for k in REGISTRY {
            if let Some(d) = k.default {
                let v = parse_value(k.kind, d).expect("registry default parses");
                values.insert(k.name, (v, Provenance::Default));
            }
        }
        Self { values }
    }
}

impl Config {
    /// Parses a configuration text and checks every invariant, collecting all
    /// problems before failing.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        let mut problems = Vec::new();
        let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                problems.push(format!("line {lineno}: expected `key = value`, got `{line}`"));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let Some(spec) = spec(k) else {
                problems.push(format!(
                    "line {lineno}: unknown key `{k}` (did you mean `{}`?)",
                    nearest_key(k)
                ));
                continue;
            };
            if let Some(first) = seen.insert(spec.name, lineno) {
                problems.push(format!(
                    "line {lineno}: `{k}` already set on line {first}"
                ));
                continue;
            }
            match parse_value(spec.kind, v) {
                Ok(val) => {
                    cfg.values.insert(spec.name, (val, Provenance::User));
                }
                Err(e) => problems.push(format!(
                    "line {lineno}: `{k}` expects {}: {e}",
                    spec.kind.describe()
                )),
            }
        }
        if problems.is_empty() {
            problems = cfg.violations();
        }
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { problems })
        }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            problems: vec![format!("cannot read {}: {e}", path.display())],
        })?;
        Self::parse(&text)
    }

    pub fn provenance(&self, name: &str) -> Provenance {
        self.values.get(name).map(|v| v.1).unwrap_or(Provenance::Derived)
    }

    pub fn is_set(&self, name: &str) -> bool {
        self.provenance(name) == Provenance::User
    }

    pub fn raw(&self, name: &str) -> Option<&Value> {
        self.values.get(name).map(|v| &v.0)
    }

    /// Value in external units, if present.
    pub fn external(&self, name: &str) -> Option<f64> {
        match self.raw(name)? {
            Value::Number(v) => Some(*v),
            Value::Count(v) => Some(*v as f64),
            _ => None,
        }
    }

    /// Value converted to SI / rad/s, if present.
    pub fn canonical(&self, name: &str) -> Option<f64> {
        let spec = spec(name)?;
        let v = self.external(name)?;
        Some(match spec.kind {
            Kind::Number(u) => v * u.factor(),
            _ => v,
        })
    }

    pub fn count(&self, name: &str) -> Option<u64> {
        match self.raw(name)? {
            Value::Count(v) => Some(*v),
            _ => None,
        }
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        match self.raw(name)? {
            Value::Flag(v) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.raw(name)? {
            Value::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn names(&self, name: &str) -> Option<&[String]> {
        match self.raw(name)? {
            Value::Names(v) => Some(v),
            _ => None,
        }
    }

    pub fn numbers(&self, name: &str) -> Option<&[f64]> {
        match self.raw(name)? {
            Value::Numbers(v) => Some(v),
            _ => None,
        }
    }

    /// Sets a value as if it had been written in the file.
    pub fn set(&mut self, name: &str, raw: &str) -> Result<(), ConfigError> {
        let spec = spec(name).ok_or_else(|| ConfigError {
            problems: vec![format!("unknown key `{name}` (did you mean `{}`?)", nearest_key(name))],
        })?;
        let v = parse_value(spec.kind, raw).map_err(|e| ConfigError {
            problems: vec![format!("`{name}` expects {}: {e}", spec.kind.describe())],
        })?;
        self.values.insert(spec.name, (v, Provenance::User));
        Ok(())
    }

    pub fn experiment(&self) -> ExperimentConfig {
        let c = |n: &str| self.canonical(n).expect("experiment keys have defaults");
        ExperimentConfig {
            g_avg: c("g_avg"),
            g2_avg: c("g2_avg"),
            kappa: c("kappa"),
            gamma_a: c("gamma_a"),
            Delta: c("Delta"),
            Omega_r: c("Omega_r"),
            Omega_s: c("Omega_s"),
            omega_1: c("omega_1"),
            N: self.count("N").expect("N has a default"),
            carrier_detuning: c("carrier_detuning"),
            eom_half_split: c("eom_half_split"),
            theta_r: c("theta_r"),
            theta_s: c("theta_s"),
            trap_depth: c("trap_depth"),
            trap_freq: c("trap_freq"),
            wavelength: c("wavelength"),
            atom_mass: c("atom_mass"),
            temperature_ratio: c("temperature_ratio"),
        }
    }

    /// Effective model parameters: derived from the experimental settings,
    /// then overridden by any model-level keys.
    pub fn model_params(&self) -> superlab_core::Result<ModelParams> {
        let mut mp = derive_model_params(&self.experiment())?;
        let overrides: [(&str, &mut f64); 6] = [
            ("omega", &mut mp.omega),
            ("omega_0", &mut mp.omega_0),
            ("delta", &mut mp.delta),
            ("gamma_d", &mut mp.gamma_d),
            ("gamma", &mut mp.gamma),
            ("sigma_z0", &mut mp.sigma_z0),
        ];
        for (name, slot) in overrides {
            if let Some(v) = self.canonical(name) {
                *slot = v;
            }
        }
        Ok(mp)
    }

    pub fn mode(&self) -> Option<&str> {
        self.text("mode")
    }

    fn violations(&self) -> Vec<String> {
        let mut out = self.experiment().violations();
        if out.is_empty() {
            if let Err(e) = self.model_params() {
                out.push(e.to_string());
            }
        }
        let nonneg = ["gamma", "gamma_d", "lambda_r_max", "lambda_s_max", "ramp_time", "hold_time"];
        for name in nonneg {
            if matches!(self.external(name), Some(v) if v < 0.0) {
                out.push(format!("{name} must be non-negative"));
            }
        }
        let positive = ["sample_dt", "rtol", "alpha_seed", "count_threshold"];
        for name in positive {
            if matches!(self.external(name), Some(v) if !(v > 0.0)) {
                out.push(format!("{name} must be positive"));
            }
        }
        if let Some(s) = self.external("sigma_z0") {
            if s.abs() > 0.5 {
                out.push(format!("sigma_z0 must lie in [-0.5, 0.5], got {s}"));
            }
        }
        if let Some(n) = self.count("n_classes") {
            if n % 2 == 0 {
                out.push(format!("n_classes must be odd, got {n}"));
            }
        }
        if let Some(n) = self.count("sweep_points") {
            if n < 2 {
                out.push(format!("sweep_points must be at least 2, got {n}"));
            }
        }
        if let Some(n) = self.count("probe_points") {
            if n < 2 {
                out.push(format!("probe_points must be at least 2, got {n}"));
            }
        }
        if let Some(fracs) = self.numbers("lambda_frac") {
            for f in fracs {
                if !(0.0..1.0).contains(f) {
                    out.push(format!("lambda_frac entries must lie in [0, 1), got {f}"));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.external("sweep_start"), self.external("sweep_stop")) {
            if a == b {
                out.push("sweep_start and sweep_stop must differ".into());
            }
        }
        out
    }

    /// Every key with its resolved value, unit and provenance, as a valid
    /// configuration file. Derived values appear as comments.
    pub fn echo(&self) -> String {
        let mp = self.model_params().ok();
        let width = REGISTRY.iter().map(|k| k.name.len()).max().unwrap_or(0);
        let mut out = String::from("# resolved configuration\n");
        for k in REGISTRY {
            let unit = k.kind.unit_label();
            match self.values.get(k.name) {
                Some((v, p)) => {
                    let body = format!("{:width$} = {v}", k.name);
                    out.push_str(&format!("{body:<40} # {unit} [{}] {}\n", p.as_str(), k.help));
                }
                None => {
                    let derived = mp.as_ref().and_then(|mp| derived_external(k.name, mp));
                    let shown = derived.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
                    out.push_str(&format!(
                        "# {:width$} = {shown} # {unit} [derived] {}\n",
                        k.name, k.help
                    ));
                }
            }
        }
        out
    }
}

fn derived_external(name: &str, mp: &ModelParams) -> Option<f64> {
    let v = match name {
        "omega" => mp.omega,
        "omega_0" => mp.omega_0,
        "delta" => mp.delta,
        "gamma_d" => mp.gamma_d,
        "lambda_r_max" => mp.lambda_r,
        "lambda_s_max" => mp.lambda_s,
        _ => return None,
    };
    Some(v / KHZ)
}
