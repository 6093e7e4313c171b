//! Unit-suffixed quantities used at the configuration boundary.
//!
//! Internally every time is in seconds and every frequency is angular
//! (rad/s, with hbar = 1). Ordinary frequencies convert via `omega = 2 pi f`.

use std::f64::consts::TAU;

use crate::error::{Result, ZenoError};

pub fn angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

fn split(input: &str) -> Result<(f64, &str)> {
    let s = input.trim();
    let idx = s
        .char_indices()
        .find(|&(i, ch)| {
            !(ch.is_ascii_digit()
                || ch == '.'
                || ch == '+'
                || ch == '-'
                || ((ch == 'e' || ch == 'E')
                    && i > 0
                    && s[i + 1..]
                        .starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(idx);
    let value: f64 = num.trim().parse().map_err(|_| ZenoError::Unit {
        input: input.to_string(),
        reason: "missing or malformed number".into(),
    })?;
    if !value.is_finite() {
        return Err(ZenoError::Unit {
            input: input.to_string(),
            reason: "value is not finite".into(),
        });
    }
    Ok((value, unit.trim()))
}

/// Parses a duration such as `"2.4 ns"`, `"10us"` or `"1e-3 s"` into seconds.
pub fn parse_time(input: &str) -> Result<f64> {
    let (value, unit) = split(input)?;
    let scale = match unit {
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" | "μs" => 1e-6,
        "ns" => 1e-9,
        "ps" => 1e-12,
        "" => {
            return Err(ZenoError::Unit {
                input: input.to_string(),
                reason: "time needs a unit suffix (s, ms, us, ns, ps)".into(),
            })
        }
        other => {
            return Err(ZenoError::Unit {
                input: input.to_string(),
                reason: format!("unknown time unit {other:?}"),
            })
        }
    };
    Ok(value * scale)
}

/// Parses a frequency into rad/s. Ordinary units (`Hz`, `kHz`, `MHz`, `GHz`)
/// are multiplied by 2 pi; `rad/s` is taken as already angular.
pub fn parse_angular_frequency(input: &str) -> Result<f64> {
    let (value, unit) = split(input)?;
    let hz = match unit {
        "rad/s" => return Ok(value),
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "" => {
            return Err(ZenoError::Unit {
                input: input.to_string(),
                reason: "frequency needs a unit (Hz, kHz, MHz, GHz, rad/s)".into(),
            })
        }
        other => {
            return Err(ZenoError::Unit {
                input: input.to_string(),
                reason: format!("unknown frequency unit {other:?}"),
            })
        }
    };
    Ok(angular(value * hz))
}
