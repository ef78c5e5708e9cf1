use std::fmt;

use atomlight::field::FieldSpec;
use atomlight::perturbative::DecayParams;
use atomlight::schemes::Preset;
use atomlight::C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PptSweep,
    Rabi,
    Ladder,
    Herald,
    OracleCompare,
    Covariance,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::PptSweep,
        Scenario::Rabi,
        Scenario::Ladder,
        Scenario::Herald,
        Scenario::OracleCompare,
        Scenario::Covariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PptSweep => "ppt-sweep",
            Scenario::Rabi => "rabi",
            Scenario::Ladder => "ladder",
            Scenario::Herald => "herald",
            Scenario::OracleCompare => "oracle-compare",
            Scenario::Covariance => "covariance",
        }
    }

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|s| s.name() == name).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|s| s.name()).collect();
            ConfigError(format!("unknown scenario `{name}` (expected one of {})", known.join(", ")))
        })
    }
}

/// Validation failure in the configuration document.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[cli] invalid configuration: {}", self.0)
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Raw configuration document: `{"scenario": <name>, "parameters": {...}}`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub scenario: Option<String>,
    #[serde(default)]
    pub parameters: Option<Value>,
}

/// Validated scenario with its resolved parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scenario", content = "parameters", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    PptSweep(PptSweep),
    Rabi(Rabi),
    Ladder(Ladder),
    Herald(Herald),
    OracleCompare(OracleCompare),
    Covariance(Covariance),
}

impl ScenarioConfig {
    /// Resolves the scenario (`override_name` wins over the document) and
    /// validates its parameters. Missing parameters take their defaults.
    pub fn resolve(doc: ConfigDocument, override_name: Option<&str>) -> Result<Self, ConfigError> {
        let name = override_name
            .map(str::to_owned)
            .or(doc.scenario)
            .ok_or_else(|| invalid("no scenario given in the config or on the command line"))?;
        let scenario = Scenario::parse(&name)?;
        let params = doc.parameters.unwrap_or_else(|| Value::Object(Default::default()));
        let cfg = match scenario {
            Scenario::PptSweep => ScenarioConfig::PptSweep(parse(params)?),
            Scenario::Rabi => ScenarioConfig::Rabi(parse(params)?),
            Scenario::Ladder => ScenarioConfig::Ladder(parse(params)?),
            Scenario::Herald => ScenarioConfig::Herald(parse(params)?),
            Scenario::OracleCompare => ScenarioConfig::OracleCompare(parse(params)?),
            Scenario::Covariance => ScenarioConfig::Covariance(parse(params)?),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scenario(&self) -> Scenario {
        match self {
            ScenarioConfig::PptSweep(_) => Scenario::PptSweep,
            ScenarioConfig::Rabi(_) => Scenario::Rabi,
            ScenarioConfig::Ladder(_) => Scenario::Ladder,
            ScenarioConfig::Herald(_) => Scenario::Herald,
            ScenarioConfig::OracleCompare(_) => Scenario::OracleCompare,
            ScenarioConfig::Covariance(_) => Scenario::Covariance,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ScenarioConfig::PptSweep(p) => {
                nonempty("r_values", p.r_values.len())?;
                for &r in &p.r_values {
                    positive("r", r)?;
                }
                positive("n_s", p.n_s)?;
                nonnegative("threshold_c", p.threshold_c)
            }
            ScenarioConfig::Rabi(p) => {
                at_least_one("n_atoms", p.n_atoms)?;
                nonnegative("g", p.g)?;
                p.decay.validate()?;
                p.t_grid.validate("t_grid")?;
                qubit("initial", p.photon, p.atoms)
            }
            ScenarioConfig::Ladder(p) => {
                at_least_one("n_atoms", p.n_atoms)?;
                if p.h > p.n_atoms {
                    return Err(invalid(format!("h = {} exceeds n_atoms = {}", p.h, p.n_atoms)));
                }
                p.tf_grid.validate("tf_grid")?;
                qubit("initial", p.alpha, p.beta)
            }
            ScenarioConfig::Herald(p) => {
                at_least_one("n_atoms", p.n_atoms)?;
                qubit("pair", p.a, p.b)?;
                p.validate_network()
            }
            ScenarioConfig::OracleCompare(p) => {
                at_least_one("n_atoms", p.n_atoms)?;
                nonnegative("g", p.g)?;
                nonnegative("t", p.t)?;
                nonnegative("rel_tol", p.rel_tol)?;
                nonnegative("abs_floor", p.abs_floor)?;
                if p.n_max == Some(0) {
                    return Err(invalid("n_max must be >= 1"));
                }
                p.decay.validate()
            }
            ScenarioConfig::Covariance(p) => {
                nonnegative("g", p.g)?;
                finite("mu", p.mu)?;
                finite("theta", p.theta)?;
                p.decay.validate()?;
                p.t_grid.validate("t_grid")
            }
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, ConfigError> {
    serde_json::from_value(v).map_err(|e| invalid(format!("parameters: {e}")))
}

fn finite(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must be finite")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must be finite and >= 0")))
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must be finite and > 0")))
    }
}

fn at_least_one(name: &str, n: usize) -> Result<(), ConfigError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be >= 1")))
    }
}

fn nonempty(name: &str, len: usize) -> Result<(), ConfigError> {
    if len >= 1 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must hold at least one value")))
    }
}

fn qubit(name: &str, a: C64, b: C64) -> Result<(), ConfigError> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(invalid(format!("{name} amplitudes have squared norm {norm}, expected 1")))
    }
}

/// Uniform grid of `points` values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn validate(&self, name: &str) -> Result<(), ConfigError> {
        nonnegative(&format!("{name}.start"), self.start)?;
        nonnegative(&format!("{name}.stop"), self.stop)?;
        if self.stop < self.start {
            return Err(invalid(format!("{name}.stop must not precede {name}.start")));
        }
        at_least_one(&format!("{name}.points"), self.points)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }
}

/// Decay rates in units of the coupling time scale; `gamma_perp = (gamma_down + gamma_up)/2 + kappa_deph`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decay {
    #[serde(default)]
    pub gamma_down: f64,
    #[serde(default)]
    pub gamma_up: f64,
    #[serde(default)]
    pub kappa_deph: f64,
}

impl Decay {
    pub fn none() -> Self {
        Decay { gamma_down: 0.0, gamma_up: 0.0, kappa_deph: 0.0 }
    }

    pub fn unit_radiative() -> Self {
        Decay { gamma_down: 2.0, ..Self::none() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        nonnegative("decay.gamma_down", self.gamma_down)?;
        nonnegative("decay.gamma_up", self.gamma_up)?;
        nonnegative("decay.kappa_deph", self.kappa_deph)
    }

    pub fn params(&self) -> atomlight::Result<DecayParams> {
        DecayParams::new(self.gamma_down, self.gamma_up, self.kappa_deph)
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PptSweep {
    pub r_values: Vec<f64>,
    pub n_s: f64,
    /// Multiplier `C` of the verdict threshold `C * validity^2`.
    pub threshold_c: f64,
}

impl Default for PptSweep {
    fn default() -> Self {
        PptSweep { r_values: (1..=10).map(|k| k as f64 / 100.0).collect(), n_s: 100.0, threshold_c: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Rabi {
    pub n_atoms: usize,
    pub g: f64,
    /// Amplitude of `|1>|D_0>`.
    pub photon: C64,
    /// Amplitude of `|0>|D_1>`.
    pub atoms: C64,
    pub t_grid: Grid,
    /// Also integrate the master equation with `decay`.
    pub oracle: bool,
    pub decay: Decay,
}

impl Default for Rabi {
    fn default() -> Self {
        Rabi {
            n_atoms: 4,
            g: 1.0,
            photon: one(),
            atoms: zero(),
            t_grid: Grid { start: 0.0, stop: std::f64::consts::PI, points: 101 },
            oracle: false,
            decay: Decay::none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ladder {
    pub n_atoms: usize,
    pub h: usize,
    /// Amplitude of `|01>|D_h>`.
    pub alpha: C64,
    /// Amplitude of `|10>|D_h>`.
    pub beta: C64,
    pub tf_grid: Grid,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder {
            n_atoms: 4,
            h: 1,
            alpha: one(),
            beta: zero(),
            tf_grid: Grid { start: 0.0, stop: 2.0, points: 101 },
        }
    }
}

/// Splitter chain given by at most one of a preset, explicit angles or
/// target heralded coefficients; none selects the W preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Herald {
    pub n_atoms: usize,
    /// Vacuum amplitude of each pair.
    pub a: C64,
    /// One-photon amplitude of each pair.
    pub b: C64,
    pub preset: Option<Preset>,
    pub angles: Option<Vec<f64>>,
    pub target: Option<Vec<f64>>,
}

impl Default for Herald {
    fn default() -> Self {
        Herald { n_atoms: 1, a: C64::new(0.8, 0.0), b: C64::new(0.6, 0.0), preset: None, angles: None, target: None }
    }
}

impl Herald {
    fn validate_network(&self) -> Result<(), ConfigError> {
        let given = [self.preset.is_some(), self.angles.is_some(), self.target.is_some()];
        if given.iter().filter(|&&b| b).count() > 1 {
            return Err(invalid("give at most one of preset, angles, target"));
        }
        for v in self.angles.iter().chain(self.target.iter()).flatten() {
            finite("network entry", *v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleCompare {
    pub n_atoms: usize,
    pub field: FieldSpec,
    pub g: f64,
    pub t: f64,
    pub decay: Decay,
    /// Fock cutoff; defaults to the field's suggested cutoff.
    pub n_max: Option<usize>,
    pub rel_tol: f64,
    pub abs_floor: f64,
}

impl Default for OracleCompare {
    fn default() -> Self {
        OracleCompare {
            n_atoms: 2,
            field: FieldSpec::SqueezedVacuum { r: 0.1 },
            g: 0.025,
            t: 5.0,
            decay: Decay::unit_radiative(),
            n_max: None,
            rel_tol: 0.05,
            abs_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Covariance {
    pub field: FieldSpec,
    pub g: f64,
    pub mu: f64,
    /// Quadrature angle of the normally ordered variance.
    pub theta: f64,
    pub decay: Decay,
    pub t_grid: Grid,
}

impl Default for Covariance {
    fn default() -> Self {
        Covariance {
            field: FieldSpec::SqueezedVacuum { r: 0.2 },
            g: 0.02,
            mu: 1.0,
            theta: 0.0,
            decay: Decay::unit_radiative(),
            t_grid: Grid { start: 0.0, stop: 10.0, points: 51 },
        }
    }
}
