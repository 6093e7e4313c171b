//! Experiment configuration files.
//!
//! A config is TOML with four tables. Times and frequencies are strings
//! with a unit suffix (`"1 ns"`, `"100 kHz"`); a bare number is rejected.
//!
//! ```toml
//! preset = "fig1-d2"          # optional: start from a built-in preset
//!
//! [system]
//! omegas = ["30 kHz", "20 kHz", "10 kHz"]
//! coupling = "100 kHz"
//! initial_state = "entangled_default"   # or [a1, a2]
//!
//! [distribution]
//! kind = "discrete"
//! values = ["1 ns", "3 ns"]
//! probs = [0.3, 0.7]
//!
//! [run]
//! experiment = "m_sweep"
//! m_values = [100, 200, 400]
//! realizations = 101
//! seed = 1
//!
//! [output]
//! csv = "fig1.csv"
//! svg = "fig1.svg"
//! ```
//!
//! With `preset`, the remaining tables override the preset key by key.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use zeno_core::intervals::DistributionSpec;
use zeno_core::units::{parse_angular_frequency, parse_time};
use zeno_core::{Complex64, Hamiltonian, IntervalDistribution, PureState};

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    #[serde(default)]
    pub system: SystemSpec,
    pub distribution: Option<DistributionSpec>,
    pub run: RunSpec,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub omegas: Vec<String>,
    pub coupling: String,
    #[serde(default)]
    pub initial_state: InitialState,
}

impl Default for SystemSpec {
    fn default() -> Self {
        Self {
            omegas: vec!["30 kHz".into(), "20 kHz".into(), "10 kHz".into()],
            coupling: "100 kHz".into(),
            initial_state: InitialState::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(String),
    Amplitudes([f64; 2]),
}

impl Default for InitialState {
    fn default() -> Self {
        Self::Named("entangled_default".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `(m, log_P_typical, log_P_star)` over `m_values`.
    MSweep,
    /// One row per realization at fixed `m` or fixed `t_total`.
    Realizations,
    /// `(p1, log_P_typical, log_P_star)` for a two-atom law.
    P1Sweep,
    /// Random versus equally spaced protocol over `p1`.
    DisorderP1,
    /// Random versus equally spaced protocol over the short atom `mu1`.
    DisorderMu1,
    /// Analytic and histogram rate functions at fixed `m`.
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    FixedM,
    FixedT,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSweep {
    pub start: String,
    pub stop: String,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub mode: ModeSpec,
    pub m: Option<usize>,
    pub m_values: Option<Vec<usize>>,
    pub t_total: Option<String>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    pub workers: Option<usize>,
    /// Power-law exponents; one output file per value.
    pub alphas: Option<Vec<f64>>,
    pub p1: Option<f64>,
    pub p1_sweep: Option<Sweep>,
    pub mu1: Option<String>,
    pub mu1_sweep: Option<TimeSweep>,
    pub mu_bar: Option<String>,
    /// `mu_bar / mu1`, used when `mu1` is swept.
    pub mu_bar_ratio: Option<f64>,
    pub bins: Option<usize>,
    pub grid_points: Option<usize>,
}

fn default_realizations() -> usize {
    101
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Parses a config, layering it over its preset when one is named.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let user: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let merged = match user.get("preset") {
            Some(toml::Value::String(name)) => {
                let base = presets::find(name)?;
                let mut base: toml::Table = base
                    .toml
                    .parse()
                    .map_err(|e| CliError::Config(format!("preset {name}: {e}")))?;
                merge(&mut base, user);
                base
            }
            Some(_) => return Err(CliError::Config("preset must be a string".into())),
            None => user,
        };
        let cfg: ExperimentConfig = merged
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let run = &self.run;
        let need = |what: &str| {
            CliError::Config(format!(
                "run.{what} is required for experiment {:?}",
                run.experiment
            ))
        };
        match run.experiment {
            ExperimentKind::MSweep => {
                if run.m_values.as_ref().is_none_or(|v| v.is_empty()) {
                    return Err(need("m_values"));
                }
            }
            ExperimentKind::Realizations => match run.mode {
                ModeSpec::FixedM if run.m.is_none() => return Err(need("m")),
                ModeSpec::FixedT if run.t_total.is_none() => return Err(need("t_total")),
                _ => {}
            },
            ExperimentKind::P1Sweep => {
                run.m.ok_or_else(|| need("m"))?;
                run.p1_sweep.as_ref().ok_or_else(|| need("p1_sweep"))?;
            }
            ExperimentKind::DisorderP1 => {
                run.m.ok_or_else(|| need("m"))?;
                run.p1_sweep.as_ref().ok_or_else(|| need("p1_sweep"))?;
                run.mu1.as_ref().ok_or_else(|| need("mu1"))?;
                run.mu_bar.as_ref().ok_or_else(|| need("mu_bar"))?;
            }
            ExperimentKind::DisorderMu1 => {
                run.m.ok_or_else(|| need("m"))?;
                run.p1.ok_or_else(|| need("p1"))?;
                run.mu1_sweep.as_ref().ok_or_else(|| need("mu1_sweep"))?;
                run.mu_bar_ratio.ok_or_else(|| need("mu_bar_ratio"))?;
            }
            ExperimentKind::Rate => {
                run.m.ok_or_else(|| need("m"))?;
            }
        }
        let needs_distribution = !matches!(
            run.experiment,
            ExperimentKind::DisorderP1 | ExperimentKind::DisorderMu1
        );
        if needs_distribution && self.distribution.is_none() {
            return Err(CliError::Config(format!(
                "a [distribution] table is required for experiment {:?}",
                run.experiment
            )));
        }
        if run.realizations == 0 {
            return Err(CliError::Config(
                "run.realizations must be at least 1".into(),
            ));
        }
        // resolve units and build objects once so errors surface as config errors
        self.hamiltonian()?;
        self.initial_state()?;
        if let Some(d) = &self.distribution {
            d.build().map_err(CliError::from_config)?;
        }
        for t in [&run.t_total, &run.mu1, &run.mu_bar].into_iter().flatten() {
            parse_time(t).map_err(CliError::from_config)?;
        }
        if let Some(s) = &run.mu1_sweep {
            parse_time(&s.start).map_err(CliError::from_config)?;
            parse_time(&s.stop).map_err(CliError::from_config)?;
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        let omegas = self
            .system
            .omegas
            .iter()
            .map(|s| parse_angular_frequency(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::from_config)?;
        let coupling =
            parse_angular_frequency(&self.system.coupling).map_err(CliError::from_config)?;
        Hamiltonian::chain(&omegas, coupling).map_err(CliError::from_config)
    }

    pub fn initial_state(&self) -> Result<PureState, CliError> {
        let dim = self.system.omegas.len();
        let state = match &self.system.initial_state {
            InitialState::Named(n) if n == "entangled_default" => PureState::entangled_default(),
            InitialState::Named(n) => {
                return Err(CliError::Config(format!(
                    "unknown initial_state {n:?}; use \"entangled_default\" or [a1, a2]"
                )))
            }
            InitialState::Amplitudes([a1, a2]) => {
                PureState::edge_superposition(Complex64::new(*a1, 0.0), Complex64::new(*a2, 0.0))
                    .map_err(CliError::from_config)?
            }
        };
        if state.dim() != dim {
            return Err(CliError::Config(format!(
                "initial state lives on 3 levels but the chain has {dim}"
            )));
        }
        Ok(state)
    }

    pub fn distribution(&self) -> Result<IntervalDistribution, CliError> {
        self.distribution
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [distribution]".into()))?
            .build()
            .map_err(CliError::from_config)
    }
}

/// Overlays `top` onto `base`, recursing into tables.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) if k != "distribution" => {
                merge(b, t)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [distribution]
        kind = "discrete"
        values = ["1 ns", "3 ns"]
        probs = [0.3, 0.7]

        [run]
        experiment = "realizations"
        m = 10
        realizations = 5

        [output]
        csv = "out.csv"
    "#;

    #[test]
    fn minimal_config_uses_reference_system() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.system.omegas.len(), 3);
        assert_eq!(cfg.run.seed, 0);
        assert_eq!(cfg.initial_state().unwrap(), PureState::entangled_default());
    }

    #[test]
    fn missing_unit_is_a_config_error() {
        let text = MINIMAL.replace("\"3 ns\"", "\"3\"");
        assert!(matches!(
            ExperimentConfig::from_toml(&text),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("realizations = 5", "realizations = 5\nbogus = 1");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn required_fields_per_experiment() {
        let text = MINIMAL.replace("m = 10", "");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("run.m"));
    }

    #[test]
    fn preset_layering() {
        let text = r#"
            preset = "fig2"
            [run]
            seed = 17
            [output]
            csv = "mine.csv"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.run.seed, 17);
        assert_eq!(cfg.run.m, Some(2000));
        assert_eq!(cfg.output.csv, PathBuf::from("mine.csv"));
    }

    #[test]
    fn unknown_preset_suggests() {
        let err = ExperimentConfig::from_toml("preset = \"fig7\"").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("fig"));
    }

    #[test]
    fn custom_amplitudes() {
        let text = format!("[system]\nomegas = [\"30 kHz\", \"20 kHz\", \"10 kHz\"]\ncoupling = \"100 kHz\"\ninitial_state = [0.6, 0.8]\n{MINIMAL}");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert!((cfg.initial_state().unwrap().amplitudes()[2].re - 0.8).abs() < 1e-15);
        let bad = text.replace("[0.6, 0.8]", "[0.6, 0.6]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn sweep_values() {
        let s = Sweep {
            start: 0.0,
            stop: 1.0,
            points: 5,
        };
        assert_eq!(s.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
