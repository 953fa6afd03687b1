use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::conserved::Sign;
use crate::data;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flows::{Equation, FlowSpec};
use crate::grid::GridSpec;
use crate::norms::ModulationParams;

pub const CONFIG_VERSION: u32 = 1;

/// Length in config files: a number or a multiple of pi such as `"32pi"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Length(pub f64);

impl Length {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        let bad = || format!("invalid length {s:?}, expected a number or a multiple of pi");
        let coefficient = match t.strip_suffix("pi") {
            Some(c) => {
                let c = c.trim().trim_end_matches('*').trim();
                if c.is_empty() {
                    PI
                } else {
                    c.parse::<f64>().map_err(|_| bad())? * PI
                }
            }
            None => t.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(Length(coefficient))
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.0 / PI;
        if m == m.round() && m != 0.0 {
            s.serialize_str(&format!("{m}pi"))
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Length;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"32pi\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Length, E> {
                Ok(Length(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Length, E> {
                Ok(Length(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Length, E> {
                Ok(Length(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Length, E> {
                Length::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub l: Length,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1024, l: Length(32.0 * PI) }
    }
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.l.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub equation: Equation,
    pub sign: Sign,
    pub dt: f64,
    pub horizon: f64,
    /// Observer times are `horizon * i / snapshots` for `i = 0..=snapshots`.
    pub snapshots: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { equation: Equation::Mkdv, sign: Sign::Defocusing, dt: 1e-3, horizon: 1.0, snapshots: 10 }
    }
}

impl FlowConfig {
    pub fn spec(&self) -> Result<FlowSpec> {
        FlowSpec::new(self.equation, self.sign, self.dt, self.horizon)
    }

    pub fn times(&self) -> Vec<f64> {
        crate::flows::uniform_times(self.horizon, self.snapshots.max(1))
    }
}

/// Initial-data family. `amplitude` is the smallness parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataFamily {
    /// `amplitude e^{-x^2 / (2 width^2)} e^{i k0 x}`.
    Gaussian { width: f64, amplitude: f64, k0: f64 },
    /// `amplitude sech(x)`.
    Soliton { amplitude: f64 },
    /// Spectral indicator of the unit band `k`, scaled to L^2 norm `amplitude`.
    BandIndicator { k: i64, amplitude: f64 },
    /// `count` random fields over `bands` bands, L^2 norm `amplitude`, seeded from the run seed.
    RandomBand { bands: i64, amplitude: f64, count: usize },
}

impl Default for DataFamily {
    fn default() -> Self {
        DataFamily::Gaussian { width: 1.0, amplitude: 0.3, k0: 0.0 }
    }
}

impl DataFamily {
    pub fn amplitude(&self) -> f64 {
        match *self {
            DataFamily::Gaussian { amplitude, .. }
            | DataFamily::Soliton { amplitude }
            | DataFamily::BandIndicator { amplitude, .. }
            | DataFamily::RandomBand { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(self, a: f64) -> Self {
        match self {
            DataFamily::Gaussian { width, k0, .. } => DataFamily::Gaussian { width, amplitude: a, k0 },
            DataFamily::Soliton { .. } => DataFamily::Soliton { amplitude: a },
            DataFamily::BandIndicator { k, .. } => DataFamily::BandIndicator { k, amplitude: a },
            DataFamily::RandomBand { bands, count, .. } => DataFamily::RandomBand { bands, amplitude: a, count },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.amplitude();
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("data amplitude must be finite and nonnegative, got {a}")));
        }
        match *self {
            DataFamily::Gaussian { width, k0, .. } if !(width > 0.0 && k0.is_finite()) => {
                Err(Error::Config(format!("gaussian needs width > 0 and finite k0, got {width}, {k0}")))
            }
            DataFamily::RandomBand { bands, count, .. } if bands < 0 || count == 0 => {
                Err(Error::Config(format!("random_band needs bands >= 0 and count >= 1, got {bands}, {count}")))
            }
            _ => Ok(()),
        }
    }

    pub fn members(&self, grid: GridSpec, seed: u64) -> Vec<Field> {
        match *self {
            DataFamily::Gaussian { width, amplitude, k0 } => vec![data::gaussian(grid, width, amplitude, k0)],
            DataFamily::Soliton { amplitude } => vec![data::sech(grid).scaled(amplitude.into())],
            DataFamily::BandIndicator { k, amplitude } => {
                let f = data::band_indicator(grid, k);
                let norm = f.l2_norm();
                vec![if norm > 0.0 { f.scaled((amplitude / norm).into()) } else { f }]
            }
            DataFamily::RandomBand { bands, amplitude, count } => {
                (0..count as u64).map(|i| data::random_band(grid, seed.wrapping_add(i), bands, amplitude)).collect()
            }
        }
    }
}

/// Pass/fail thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Max relative drift of `alpha` and `beta` over the run.
    pub drift: f64,
    /// Accepted range of the drift ratio under `dt` halving.
    pub drift_ratio_min: f64,
    pub drift_ratio_max: f64,
    /// Bound on both `C` and `1/c` for the two-sided norm-equivalence ratio.
    pub equivalence: f64,
    /// Max relative variation of the equivalence ratio along a trajectory.
    pub equivalence_time: f64,
    /// Share of the modulation norm carried by bands outside the boost list.
    pub truncation: f64,
    /// Bound on the a priori constant.
    pub apriori: f64,
    /// `|sup_t ||u||_{L^2} / ||u_0||_{L^2} - 1|` for NLS.
    pub mass: f64,
    /// Two-path distance for boosts of mKdV and mixed flows.
    pub galilei_mkdv: f64,
    /// Two-path distance for NLS boosts.
    pub galilei_nls: f64,
    /// Distances below this count as resolved to round-off, so refinement may not shrink them.
    pub galilei_floor: f64,
    /// Bound on scaling and embedding constants.
    pub scaling: f64,
    /// Max relative change of a homogeneity ratio across the amplitude sweep.
    pub homogeneity: f64,
    /// Bound on `sup_f ||f||_weighted / A`.
    pub aksup: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            drift: 1e-5,
            drift_ratio_min: 3.0,
            drift_ratio_max: 5.0,
            equivalence: 10.0,
            equivalence_time: 0.01,
            truncation: 1e-3,
            apriori: 10.0,
            mass: 1e-8,
            galilei_mkdv: 1e-5,
            galilei_nls: 1e-6,
            galilei_floor: 1e-9,
            scaling: 10.0,
            homogeneity: 0.25,
            aksup: 2.0,
        }
    }
}

fn default_kappas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_boosts() -> Vec<i64> {
    (-8..=8).collect()
}

fn default_galilei_boosts() -> Vec<i64> {
    vec![0, 1]
}

fn default_params() -> Vec<ModulationParams> {
    [(1.0, 0.0), (2.0, 0.0), (2.0, 0.5), (4.0, 1.0)].iter().map(|&(p, s)| ModulationParams { p, s }).collect()
}

fn default_lambdas() -> Vec<f64> {
    vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
}

fn default_amplitudes() -> Vec<f64> {
    vec![0.1, 0.2, 0.4]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub data: DataFamily,
    /// Amplitude sweep for homogeneity and a priori experiments.
    #[serde(default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
    #[serde(default = "default_kappas")]
    pub kappas: Vec<f64>,
    /// Integer boosts for the boosted sums over `k`.
    #[serde(default = "default_boosts")]
    pub boosts: Vec<i64>,
    /// Integer boosts for the two-path Galilei check.
    #[serde(default = "default_galilei_boosts")]
    pub galilei_boosts: Vec<i64>,
    #[serde(default = "default_params")]
    pub params: Vec<ModulationParams>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    /// Size of the random suite for scaling and embedding.
    #[serde(default = "default_suite")]
    pub suite: usize,
    /// Build weights from the family instead of using `c = 1`.
    #[serde(default)]
    pub weighted: bool,
    /// Operator lattice size; `None` uses the grid default.
    #[serde(default)]
    pub operator_size: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_suite() -> usize {
    50
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            grid: GridConfig::default(),
            flow: FlowConfig::default(),
            data: DataFamily::default(),
            amplitudes: default_amplitudes(),
            kappas: default_kappas(),
            boosts: default_boosts(),
            galilei_boosts: default_galilei_boosts(),
            params: default_params(),
            lambdas: default_lambdas(),
            suite: default_suite(),
            weighted: false,
            operator_size: None,
            output: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        self.grid.spec()?;
        self.flow.spec()?;
        self.data.validate()?;
        for mp in &self.params {
            mp.validate().map_err(|e| Error::Config(format!("params: {e}")))?;
        }
        if let Some(k) = self.kappas.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::Config(format!("kappas must be positive, got {k}")));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::Config(format!("lambdas must be positive, got {l}")));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("amplitudes must be nonnegative, got {a}")));
        }
        if self.suite == 0 {
            return Err(Error::Config("suite must hold at least one field".into()));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid.spec()
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_parse() {
        assert_eq!(Length::parse("32pi").unwrap(), Length(32.0 * PI));
        assert_eq!(Length::parse("2 * pi").unwrap(), Length(2.0 * PI));
        assert_eq!(Length::parse("pi").unwrap(), Length(PI));
        assert_eq!(Length::parse("12.5").unwrap(), Length(12.5));
        assert!(Length::parse("tau").is_err());
    }

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"version": 1}"#).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn full_config_parses() {
        let text = r#"{
            "version": 1,
            "seed": 7,
            "grid": {"n": 512, "l": "16pi"},
            "flow": {"equation": {"mkdv_nls": {"k": 1.0}}, "sign": "focusing", "dt": 0.002},
            "data": {"kind": "random_band", "bands": 3, "amplitude": 0.2, "count": 4},
            "kappas": [1.0],
            "params": [{"p": 2.0, "s": 0.5}],
            "tolerances": {"drift": 1e-6}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.grid.n, 512);
        assert_eq!(cfg.grid.l, Length(16.0 * PI));
        assert_eq!(cfg.flow.equation, Equation::MkdvNls { k: 1.0 });
        assert_eq!(cfg.flow.horizon, 1.0);
        assert_eq!(cfg.tolerances.drift, 1e-6);
        assert_eq!(cfg.tolerances.galilei_nls, 1e-6);
        assert_eq!(cfg.data.members(cfg.grid_spec().unwrap(), cfg.seed).len(), 4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"version": 1, "kapas": [1.0]}"#,
            r#"{"version": 1, "grid": {"n": 64, "l": 10, "m": 1}}"#,
            r#"{"version": 1, "tolerances": {"drift": 1e-6, "drfit": 1}}"#,
            r#"{"version": 1, "data": {"kind": "soliton", "amplitude": 1, "width": 2}}"#,
        ] {
            let err = ExperimentConfig::from_json(text).unwrap_err().to_string();
            assert!(err.contains("unknown field"), "{err}");
        }
    }

    #[test]
    fn diagnostics_carry_position() {
        let err = ExperimentConfig::from_json("{\n  \"version\": 1,\n  \"seed\": \"x\"\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            r#"{"version": 2}"#,
            r#"{"version": 1, "grid": {"n": 100, "l": "pi"}}"#,
            r#"{"version": 1, "flow": {"dt": -1}}"#,
            r#"{"version": 1, "params": [{"p": 0.5, "s": 0}]}"#,
            r#"{"version": 1, "kappas": [0]}"#,
            r#"{"version": 1, "lambdas": [-1]}"#,
        ] {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
        assert!(ExperimentConfig::from_json("{}").is_err());
    }
}
