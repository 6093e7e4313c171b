//! Command-line front end: experiment configs, built-in presets, CSV and
//! SVG output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{execute, Report, RunOptions};

/// Env var naming the default directory for relative output paths.
pub const OUT_DIR_ENV: &str = "ZENO_OUT_DIR";

/// Loads a built-in preset as a config.
pub fn preset_config(name: &str) -> Result<ExperimentConfig, CliError> {
    let p = presets::find(name)?;
    let mut cfg = ExperimentConfig::from_toml(p.toml)?;
    cfg.preset = Some(p.name.to_string());
    Ok(cfg)
}

/// Reinterprets any config as a rate-function run at its `m` (or the
/// largest of its `m_values`).
pub fn as_rate_config(mut cfg: ExperimentConfig) -> Result<ExperimentConfig, CliError> {
    let m = cfg
        .run
        .m
        .or_else(|| {
            cfg.run
                .m_values
                .as_ref()
                .and_then(|v| v.iter().copied().max())
        })
        .ok_or_else(|| CliError::Config("rate needs run.m or run.m_values".into()))?;
    if cfg.distribution.is_none() {
        return Err(CliError::Config("rate needs a [distribution] table".into()));
    }
    cfg.run.experiment = config::ExperimentKind::Rate;
    cfg.run.m = Some(m);
    Ok(cfg)
}
