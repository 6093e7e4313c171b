//! Built-in experiment presets for the reference three-level chain.

use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "fig1-d2",
        summary: "m-sweep, Bernoulli p=(0.3,0.7), mu=(1,3) ns",
        toml: include_str!("../presets/fig1-d2.toml"),
    },
    Preset {
        name: "fig1-d3",
        summary: "m-sweep, Bernoulli p=(0.3,0.2,0.5), mu=(1,3,2) ns",
        toml: include_str!("../presets/fig1-d3.toml"),
    },
    Preset {
        name: "fig1-d4",
        summary: "m-sweep, Bernoulli p=(0.3,0.2,0.05,0.45), mu=(1,3,2,0.5) ns",
        toml: include_str!("../presets/fig1-d4.toml"),
    },
    Preset {
        name: "fig2",
        summary: "100 realizations at m=2000, Bernoulli p=(0.3,0.7), mu=(1,3) ns",
        toml: include_str!("../presets/fig2.toml"),
    },
    Preset {
        name: "fig3",
        summary: "p1-sweep at m=6400, mu=(1,3) ns",
        toml: include_str!("../presets/fig3.toml"),
    },
    Preset {
        name: "fig4",
        summary: "m-sweep, power law mu0=1 ns, alpha in {2.5, 3, 4}",
        toml: include_str!("../presets/fig4.toml"),
    },
    Preset {
        name: "fig5",
        summary: "random vs equal spacing, mu_bar=2.4 mu0, mu1=mu0=10 us, m=100, p1-sweep",
        toml: include_str!("../presets/fig5.toml"),
    },
    Preset {
        name: "fig6",
        summary: "random vs equal spacing, p1=0.99, mu_bar=2.4 mu1, m=100, mu1 in [1, 250] ns",
        toml: include_str!("../presets/fig6.toml"),
    },
];

pub fn find(name: &str) -> Result<&'static Preset, CliError> {
    if let Some(p) = PRESETS.iter().find(|p| p.name == name) {
        return Ok(p);
    }
    let mut ranked: Vec<(usize, &str)> = PRESETS
        .iter()
        .map(|p| (strsim::levenshtein(name, p.name), p.name))
        .collect();
    ranked.sort();
    let close: Vec<&str> = ranked
        .iter()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, n)| *n)
        .take(3)
        .collect();
    let hint = if close.is_empty() {
        format!("available: {}", names().join(", "))
    } else {
        format!("did you mean {}?", close.join(", "))
    };
    Err(CliError::Config(format!("unknown preset {name:?}; {hint}")))
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

/// Name/summary table for the `presets` subcommand.
pub fn table() -> String {
    let width = PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for p in &PRESETS {
        out.push_str(&format!("{:width$}  {}\n", p.name, p.summary));
    }
    out
}
