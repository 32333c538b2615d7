//! Study configuration: TOML or JSON by file extension, unknown keys rejected,
//! defaults filled, validated with the offending field path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gas::{GasParams, State};
use crate::hugoniot::{solve_for_strength, solve_left_state, ShockWave};
use crate::solver::{default_margin, InitialData, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub gas: GasParams,
    /// State ahead of the shock (the `+` state).
    pub right: State,
    /// Left volume; exactly one of `v_minus` and `delta` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_minus: Option<f64>,
    /// Target strength `|p- - p+|`, solved for by bisection on `v_minus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub tau_end: f64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub profile: ProfileSettings,
    #[serde(default)]
    pub epsilon_sweep: EpsilonSweep,
    #[serde(default)]
    pub delta_sweep: DeltaSweep,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub bands: Bands,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "one")]
    pub jobs: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub dy: f64,
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtau: Option<f64>,
    /// Defaults to `tau_end / 20`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_interval: Option<f64>,
    /// Defaults to `max(50, 40/delta)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub h_exclusion: f64,
    pub initial: InitialData,
    pub ledger: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            dy: 0.1,
            cfl_advective: 0.5,
            cfl_diffusive: 0.4,
            dtau: None,
            output_interval: None,
            margin: None,
            h_exclusion: 1.0,
            initial: InitialData::Riemann,
            ledger: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSettings {
    pub eps: f64,
    /// Defaults to `nu * eps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub points: usize,
    /// Defaults to the half-width where the linearized tails reach `1e-8`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        ProfileSettings {
            eps: 1.0,
            kappa: None,
            points: 4001,
            half_width: None,
        }
    }
}

/// Physical viscosities realized as scaled horizons `T/eps` and windows `h/eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonSweep {
    pub values: Vec<f64>,
    pub horizon: f64,
    pub window: f64,
    pub output_interval: f64,
}

impl Default for EpsilonSweep {
    fn default() -> Self {
        EpsilonSweep {
            values: vec![0.1, 0.05, 0.025],
            horizon: 1.0,
            window: 0.5,
            output_interval: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeltaSweep {
    pub values: Vec<f64>,
}

impl Default for DeltaSweep {
    fn default() -> Self {
        DeltaSweep {
            values: vec![0.2, 0.1, 0.05, 0.025],
        }
    }
}

/// Joint `(dy, dtau)` halving on smooth data (profile plus a Gaussian bump).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Refinement {
    pub dy: f64,
    pub dtau: f64,
    pub levels: usize,
    /// Keep `dtau` fixed and refine only in space.
    pub fixed_dtau: bool,
    pub tau_end: f64,
    pub output_interval: f64,
    pub amplitude: f64,
    pub width: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            dy: 0.2,
            dtau: 0.002,
            levels: 3,
            fixed_dtau: false,
            tau_end: 2.0,
            output_interval: 0.5,
            amplitude: 0.05,
            width: 3.0,
        }
    }
}

/// Pass/fail bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bands {
    pub residual_slope: (f64, f64),
    pub decay_slope: (f64, f64),
    pub refinement_ratio: (f64, f64),
    /// Required `final / first` bound on the away-from-shock error.
    pub epsilon_error_ratio: f64,
    pub conservation_drift: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Bands {
            residual_slope: (1.6, 2.4),
            decay_slope: (0.75, 1.25),
            refinement_ratio: (2.8, 5.2),
            epsilon_error_ratio: 0.5,
            conservation_drift: 1e-10,
        }
    }
}

fn check_axis(path: &str, values: &[f64], min_len: usize) -> Result<()> {
    if values.len() < min_len {
        return Err(Error::validation(
            path,
            format!("need at least {min_len} values, got {}", values.len()),
        ));
    }
    if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::validation(path, "values must be positive"));
    }
    let inc = values.windows(2).all(|w| w[1] > w[0]);
    let dec = values.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(Error::validation(path, "values must be strictly monotone"));
    }
    Ok(())
}

fn check_band(path: &str, b: (f64, f64)) -> Result<()> {
    if !(b.0 < b.1) {
        return Err(Error::validation(
            path,
            format!("empty band [{}, {}]", b.0, b.1),
        ));
    }
    Ok(())
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, format!("{x} must be positive")))
    }
}

fn prefix(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => {
            Error::validation(format!("{path}.{name}"), reason)
        }
        Error::Validation { path: p, message } => Error::validation(format!("{path}.{p}"), message),
        other => other,
    }
}

impl StudyConfig {
    /// Minimal config; everything else takes its default.
    pub fn new(gas: GasParams, right: State, v_minus: f64, tau_end: f64) -> Self {
        StudyConfig {
            gas,
            right,
            v_minus: Some(v_minus),
            delta: None,
            tau_end,
            solver: SolverSettings::default(),
            profile: ProfileSettings::default(),
            epsilon_sweep: EpsilonSweep::default(),
            delta_sweep: DeltaSweep::default(),
            refinement: Refinement::default(),
            bands: Bands::default(),
            output_dir: None,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate().map_err(|e| prefix("gas", e))?;
        self.right.validate().map_err(|e| prefix("right", e))?;
        match (self.v_minus, self.delta) {
            (Some(v), None) => positive("v_minus", v)?,
            (None, Some(d)) => {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::validation(
                        "delta",
                        format!("{d} must be non-negative"),
                    ));
                }
            }
            _ => {
                return Err(Error::validation(
                    "v_minus",
                    "give exactly one of `v_minus` and `delta`",
                ))
            }
        }
        positive("tau_end", self.tau_end)?;
        let s = &self.solver;
        positive("solver.dy", s.dy)?;
        positive("solver.h_exclusion", s.h_exclusion)?;
        for (p, c) in [
            ("solver.cfl_advective", s.cfl_advective),
            ("solver.cfl_diffusive", s.cfl_diffusive),
        ] {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::validation(p, format!("{c} must lie in (0, 1)")));
            }
        }
        if let Some(x) = s.dtau {
            positive("solver.dtau", x)?;
        }
        if let Some(x) = s.output_interval {
            positive("solver.output_interval", x)?;
        }
        if let Some(x) = s.margin {
            positive("solver.margin", x)?;
        }
        let p = &self.profile;
        positive("profile.eps", p.eps)?;
        if let Some(k) = p.kappa {
            positive("profile.kappa", k)?;
        }
        if p.points < 2 {
            return Err(Error::validation(
                "profile.points",
                "need at least 2 points",
            ));
        }
        if let Some(l) = p.half_width {
            positive("profile.half_width", l)?;
        }
        let e = &self.epsilon_sweep;
        check_axis("epsilon_sweep.values", &e.values, 3)?;
        positive("epsilon_sweep.horizon", e.horizon)?;
        positive("epsilon_sweep.window", e.window)?;
        positive("epsilon_sweep.output_interval", e.output_interval)?;
        check_axis("delta_sweep.values", &self.delta_sweep.values, 3)?;
        let r = &self.refinement;
        positive("refinement.dy", r.dy)?;
        positive("refinement.dtau", r.dtau)?;
        positive("refinement.tau_end", r.tau_end)?;
        positive("refinement.output_interval", r.output_interval)?;
        positive("refinement.width", r.width)?;
        if r.levels < 3 {
            return Err(Error::validation(
                "refinement.levels",
                format!("need at least 3 levels, got {}", r.levels),
            ));
        }
        let b = &self.bands;
        check_band("bands.residual_slope", b.residual_slope)?;
        check_band("bands.decay_slope", b.decay_slope)?;
        check_band("bands.refinement_ratio", b.refinement_ratio)?;
        positive("bands.epsilon_error_ratio", b.epsilon_error_ratio)?;
        positive("bands.conservation_drift", b.conservation_drift)?;
        if self.jobs == 0 {
            return Err(Error::validation("jobs", "must be at least 1"));
        }
        Ok(())
    }

    /// The configured shock, from `v_minus` or from the strength.
    pub fn shock(&self) -> Result<ShockWave> {
        self.shock_with_strength(self.delta)
    }

    /// Shock of the given strength on the Hugoniot locus of `right`, or the
    /// configured `v_minus` shock when `delta` is `None`.
    pub fn shock_with_strength(&self, delta: Option<f64>) -> Result<ShockWave> {
        match (delta, self.v_minus) {
            (Some(0.0), _) => Ok(ShockWave::trivial(self.right, &self.gas)),
            (Some(d), _) => solve_for_strength(&self.right, d, &self.gas),
            (None, Some(v)) if v == self.right.v => Ok(ShockWave::trivial(self.right, &self.gas)),
            (None, Some(v)) => solve_left_state(&self.right, v, &self.gas),
            (None, None) => Err(Error::validation(
                "v_minus",
                "give exactly one of `v_minus` and `delta`",
            )),
        }
    }

    /// Solver configuration for `shock` with horizon `tau_end`.
    pub fn solver_config(&self, shock: ShockWave, tau_end: f64) -> SolverConfig {
        let s = &self.solver;
        let margin = s.margin.unwrap_or_else(|| default_margin(shock.delta));
        SolverConfig {
            gas: self.gas,
            shock,
            dy: s.dy,
            margin_left: margin,
            margin_right: margin,
            cfl_advective: s.cfl_advective,
            cfl_diffusive: s.cfl_diffusive,
            dtau: s.dtau,
            tau_end,
            output_interval: s.output_interval.unwrap_or(tau_end / 20.0),
            h_exclusion: s.h_exclusion,
            initial: s.initial,
            ledger: s.ledger,
        }
    }

    /// First 12 hex digits of the SHA-256 of the canonical JSON encoding,
    /// ignoring settings that cannot change any number (`jobs`, `output_dir`).
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.jobs = 1;
        canon.output_dir = None;
        let json = serde_json::to_string(&canon).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Domain(format!("toml encoding: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parse and validate config text; the format follows the extension of `path`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let cfg: StudyConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(text).map_err(|e| parse_err(e.to_string()))?,
            Some("json") => serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?,
            other => {
                return Err(parse_err(format!(
                    "unsupported config extension {other:?} (use .toml or .json)"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<StudyConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    StudyConfig::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
tau_end = 10.0
v_minus = 0.9

[gas]
gamma = 1.4
r = 1.0

[right]
v = 1.0
u = 0.0
theta = 1.0
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = StudyConfig::parse(MINIMAL, Path::new("c.toml")).unwrap();
        assert_eq!(c.gas.nu, 1.0);
        assert_eq!(c.solver, SolverSettings::default());
        assert_eq!(c.jobs, 1);
        assert_eq!(c, StudyConfig::new(c.gas, c.right, 0.9, 10.0));
    }

    #[test]
    fn bad_gamma_names_the_field() {
        let text = MINIMAL.replace("gamma = 1.4", "gamma = 0.9");
        match StudyConfig::parse(&text, Path::new("c.toml")) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "gas.gamma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\n[solver]\nmystery = 1\n");
        assert!(matches!(
            StudyConfig::parse(&text, Path::new("c.toml")),
            Err(Error::Parse { .. })
        ));
        let text = MINIMAL.replace("tau_end", "tau_fin");
        assert!(matches!(
            StudyConfig::parse(&text, Path::new("c.toml")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn round_trips_through_both_formats() {
        let mut c = StudyConfig::parse(MINIMAL, Path::new("c.toml")).unwrap();
        c.solver.initial = InitialData::PerturbedProfile {
            amplitude: 0.1,
            width: 2.0,
            center: -1.0,
        };
        c.solver.dtau = Some(1e-3);
        let t = StudyConfig::parse(&c.to_toml().unwrap(), Path::new("x.toml")).unwrap();
        assert_eq!(t, c);
        let j = StudyConfig::parse(&c.to_json(), Path::new("x.json")).unwrap();
        assert_eq!(j, c);
        assert_eq!(j.hash(), c.hash());
    }

    #[test]
    fn axis_checks() {
        let mut c = StudyConfig::parse(MINIMAL, Path::new("c.toml")).unwrap();
        c.epsilon_sweep.values = vec![0.1, 0.05];
        assert!(c.validate().is_err());
        c.epsilon_sweep.values = vec![0.1, 0.05, 0.07];
        assert!(c.validate().is_err());
        c.epsilon_sweep.values = vec![0.1, 0.05, 0.025];
        c.v_minus = None;
        assert!(c.validate().is_err());
        c.delta = Some(0.2);
        c.validate().unwrap();
    }

    #[test]
    fn extension_decides_format() {
        assert!(matches!(
            StudyConfig::parse(MINIMAL, Path::new("c.yaml")),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            StudyConfig::parse(MINIMAL, Path::new("c.json")),
            Err(Error::Parse { .. })
        ));
    }
}
