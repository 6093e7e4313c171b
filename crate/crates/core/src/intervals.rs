//! Waiting-time distributions `p(mu)` between consecutive measurements.
//!
//! Three families ship: a finite set of atoms ("d-dimensional Bernoulli"),
//! a Pareto power law on `[mu0, inf)`, and a point mass for equally spaced
//! sequences. All times are in seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::quadrature::{self, QuadConfig};
use crate::rng::DrawStream;
use crate::units::parse_time;

const PROB_SUM_TOL: f64 = 1e-12;

/// Atoms `mu^(alpha)` with probabilities `p^(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteIntervals {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteIntervals {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(ZenoError::InvalidDistribution(format!(
                "need matching non-empty value/probability lists, got {} and {}",
                values.len(),
                probs.len()
            )));
        }
        for &v in &values {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ZenoError::InvalidInterval {
                    value: v,
                    reason: "waiting times must be strictly positive",
                });
            }
        }
        for (i, a) in values.iter().enumerate() {
            if values[i + 1..].contains(a) {
                return Err(ZenoError::InvalidDistribution(format!(
                    "duplicate atom {a:e}"
                )));
            }
        }
        for &p in &probs {
            if !(p > 0.0 && p <= 1.0) {
                return Err(ZenoError::InvalidDistribution(format!(
                    "probability {p} outside (0, 1]"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(ZenoError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self {
            values,
            probs,
            cumulative,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Atom index for `u` in `(0, 1]`: the first `alpha` with
    /// `u <= sum_{beta <= alpha} p^(beta)` (right-closed cells).
    pub fn index_for(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u <= c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

/// `p(mu) = alpha / (mu0 (mu/mu0)^(1+alpha))` on `[mu0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawIntervals {
    mu0: f64,
    alpha: f64,
}

impl PowerLawIntervals {
    pub fn new(mu0: f64, alpha: f64) -> Result<Self> {
        if !(mu0 > 0.0) || !mu0.is_finite() {
            return Err(ZenoError::InvalidInterval {
                value: mu0,
                reason: "power-law scale must be strictly positive",
            });
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ZenoError::InvalidDistribution(format!(
                "power-law exponent {alpha} must be positive"
            )));
        }
        Ok(Self { mu0, alpha })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pdf(&self, mu: f64) -> f64 {
        if mu < self.mu0 {
            0.0
        } else {
            self.alpha / (self.mu0 * (mu / self.mu0).powf(1.0 + self.alpha))
        }
    }

    pub fn cdf(&self, mu: f64) -> f64 {
        if mu <= self.mu0 {
            0.0
        } else {
            1.0 - (self.mu0 / mu).powf(self.alpha)
        }
    }

    /// Inverse CDF on `u` in `(0, 1]`: `mu0 u^(-1/alpha)`.
    pub fn quantile(&self, u: f64) -> f64 {
        self.mu0 * u.powf(-1.0 / self.alpha)
    }
}

/// Point mass at `mu_bar`: equally spaced measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateInterval {
    mu_bar: f64,
}

impl DegenerateInterval {
    pub fn new(mu_bar: f64) -> Result<Self> {
        if !(mu_bar > 0.0) || !mu_bar.is_finite() {
            return Err(ZenoError::InvalidInterval {
                value: mu_bar,
                reason: "waiting times must be strictly positive",
            });
        }
        Ok(Self { mu_bar })
    }

    pub fn mu_bar(&self) -> f64 {
        self.mu_bar
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntervalDistribution {
    Discrete(DiscreteIntervals),
    PowerLaw(PowerLawIntervals),
    Degenerate(DegenerateInterval),
}

impl From<DiscreteIntervals> for IntervalDistribution {
    fn from(d: DiscreteIntervals) -> Self {
        Self::Discrete(d)
    }
}

impl From<PowerLawIntervals> for IntervalDistribution {
    fn from(d: PowerLawIntervals) -> Self {
        Self::PowerLaw(d)
    }
}

impl From<DegenerateInterval> for IntervalDistribution {
    fn from(d: DegenerateInterval) -> Self {
        Self::Degenerate(d)
    }
}

impl IntervalDistribution {
    pub fn discrete(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        DiscreteIntervals::new(values, probs).map(Self::Discrete)
    }

    pub fn power_law(mu0: f64, alpha: f64) -> Result<Self> {
        PowerLawIntervals::new(mu0, alpha).map(Self::PowerLaw)
    }

    pub fn degenerate(mu_bar: f64) -> Result<Self> {
        DegenerateInterval::new(mu_bar).map(Self::Degenerate)
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            Self::Degenerate(_) => true,
            Self::Discrete(d) => d.len() == 1,
            Self::PowerLaw(_) => false,
        }
    }

    /// One draw; consumes exactly one 64-bit word of the stream (none for
    /// the point mass).
    pub fn sample_one(&self, stream: &mut DrawStream) -> f64 {
        match self {
            Self::Degenerate(d) => d.mu_bar,
            Self::Discrete(d) => d.values[d.index_for(stream.uniform_open_closed())],
            Self::PowerLaw(p) => p.quantile(stream.uniform_open_closed()),
        }
    }

    pub fn sample(&self, stream: &mut DrawStream, m: usize) -> Vec<f64> {
        (0..m).map(|_| self.sample_one(stream)).collect()
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            Self::Degenerate(d) => Ok(d.mu_bar),
            Self::Discrete(d) => Ok(d.values.iter().zip(&d.probs).map(|(v, p)| v * p).sum()),
            Self::PowerLaw(p) => {
                if p.alpha <= 1.0 {
                    Err(ZenoError::InfiniteMean { alpha: p.alpha })
                } else {
                    Ok(p.alpha * p.mu0 / (p.alpha - 1.0))
                }
            }
        }
    }

    pub fn second_moment(&self) -> Result<f64> {
        match self {
            Self::Degenerate(d) => Ok(d.mu_bar * d.mu_bar),
            Self::Discrete(d) => Ok(d.values.iter().zip(&d.probs).map(|(v, p)| v * v * p).sum()),
            Self::PowerLaw(p) => {
                if p.alpha <= 2.0 {
                    Err(ZenoError::InfiniteSecondMoment { alpha: p.alpha })
                } else {
                    Ok(p.alpha * p.mu0 * p.mu0 / (p.alpha - 2.0))
                }
            }
        }
    }

    /// `int dmu p(mu) g(mu)`. Exact weighted sum for atoms; for the power
    /// law the substitution `u = (mu0/mu)^alpha` maps the half line onto
    /// `(0, 1]`, integrated adaptively on the dyadic pieces
    /// `[2^-(k+1), 2^-k]`. Near `u = 0` the integrand of an oscillating `g`
    /// oscillates without bound, so pieces are added until the remaining
    /// `[0, u_k]` is negligible against the running total.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, cfg: &QuadConfig) -> Result<f64> {
        match self {
            Self::Degenerate(d) => Ok(g(d.mu_bar)),
            Self::Discrete(d) => Ok(d.values.iter().zip(&d.probs).map(|(&v, p)| p * g(v)).sum()),
            Self::PowerLaw(p) => {
                let p = *p;
                let h = |u: f64| g(p.quantile(u));
                let mut total = 0.0f64;
                let mut error = 0.0;
                let mut hi = 1.0f64;
                for _ in 0..MAX_DYADIC_PIECES {
                    let lo = 0.5 * hi;
                    let piece_cfg = QuadConfig {
                        abs_tol: cfg.abs_tol.max(0.1 * cfg.rel_tol * total.abs()),
                        ..*cfg
                    };
                    let r = quadrature::integrate(h, lo, hi, &piece_cfg)?;
                    total += r.value;
                    error += r.error;
                    // mean |g| over the last piece stands in for its size on [0, lo]
                    let tail = lo * (r.value.abs() / (hi - lo)).max(h(lo).abs());
                    hi = lo;
                    if tail <= cfg.abs_tol.max(1e-3 * cfg.rel_tol * total.abs()) {
                        return Ok(total);
                    }
                }
                Err(ZenoError::QuadratureNoConvergence {
                    estimate: total,
                    error,
                    subdivisions: MAX_DYADIC_PIECES,
                })
            }
        }
    }
}

const MAX_DYADIC_PIECES: usize = 400;

/// Configuration-file form of a distribution, with unit-suffixed times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Discrete {
        values: Vec<String>,
        probs: Vec<f64>,
    },
    Powerlaw {
        mu0: String,
        alpha: f64,
    },
    Degenerate {
        mu_bar: String,
    },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<IntervalDistribution> {
        match self {
            Self::Discrete { values, probs } => {
                let values = values
                    .iter()
                    .map(|v| parse_time(v))
                    .collect::<Result<Vec<_>>>()?;
                IntervalDistribution::discrete(values, probs.clone())
            }
            Self::Powerlaw { mu0, alpha } => {
                IntervalDistribution::power_law(parse_time(mu0)?, *alpha)
            }
            Self::Degenerate { mu_bar } => IntervalDistribution::degenerate(parse_time(mu_bar)?),
        }
    }
}
