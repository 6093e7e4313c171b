//! Monte Carlo ensembles over realizations of the measurement sequence.
//!
//! Realization `r` draws its waiting times from its own stream
//! `DrawStream::new(master_seed, r)`, so the ensemble is a pure function of
//! the configuration and does not depend on how rayon schedules the work.

use rayon::prelude::*;

use crate::dynamics::{Hamiltonian, PureState, SurvivalKernel};
use crate::error::{Result, ZenoError};
use crate::intervals::IntervalDistribution;
use crate::rng::DrawStream;

/// Relative slack on the fixed-time budget so that e.g. 100 equal spacings
/// of `T/100` are not lost to round-off in the running sum.
pub const FIXED_T_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleMode {
    FixedM(usize),
    /// Total time in seconds. Intervals are applied while they fit; the
    /// first one that would overshoot is discarded.
    FixedT(f64),
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub mode: EnsembleMode,
    pub realizations: usize,
    pub master_seed: u64,
    pub dist: IntervalDistribution,
    pub hamiltonian: Hamiltonian,
    pub state: PureState,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Keep every realization's waiting times (memory grows as `N m`).
    pub keep_traces: bool,
}

impl EnsembleConfig {
    pub fn new(
        mode: EnsembleMode,
        realizations: usize,
        master_seed: u64,
        dist: IntervalDistribution,
        hamiltonian: Hamiltonian,
        state: PureState,
    ) -> Self {
        Self {
            mode,
            realizations,
            master_seed,
            dist,
            hamiltonian,
            state,
            workers: None,
            keep_traces: false,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_traces(mut self, keep: bool) -> Self {
        self.keep_traces = keep;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(ZenoError::InvalidConfig(
                "at least one realization is required".into(),
            ));
        }
        match self.mode {
            EnsembleMode::FixedM(0) => {
                return Err(ZenoError::InvalidConfig("m must be at least 1".into()));
            }
            EnsembleMode::FixedT(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(ZenoError::InvalidConfig(format!(
                    "total time {t} must be positive"
                )));
            }
            _ => {}
        }
        if self.workers == Some(0) {
            return Err(ZenoError::InvalidConfig(
                "worker count must be positive".into(),
            ));
        }
        if self.hamiltonian.dim() != self.state.dim() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                actual: self.state.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalRecord {
    pub m: usize,
    pub total_time: f64,
    pub log_survival: f64,
}

#[derive(Debug, Clone)]
pub struct SurvivalEnsemble {
    pub records: Vec<SurvivalRecord>,
    /// Waiting times per realization when traces were requested.
    pub traces: Option<Vec<Vec<f64>>>,
    pub mode: EnsembleMode,
    pub master_seed: u64,
}

impl SurvivalEnsemble {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn log_survivals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.log_survival).collect()
    }

    /// Index of the realization taken as "typical": the lower median of
    /// `log_survival` (ties broken by index).
    pub fn typical_index(&self) -> usize {
        let mut idx: Vec<usize> = (0..self.records.len()).collect();
        idx.sort_by(|&a, &b| {
            self.records[a]
                .log_survival
                .total_cmp(&self.records[b].log_survival)
                .then(a.cmp(&b))
        });
        idx[(idx.len() - 1) / 2]
    }

    pub fn typical(&self) -> &SurvivalRecord {
        &self.records[self.typical_index()]
    }
}

enum Sampler<'a> {
    /// Discrete law with `ln q` tabulated per atom.
    Table {
        dist: &'a crate::intervals::DiscreteIntervals,
        logq: Vec<f64>,
    },
    General(&'a IntervalDistribution),
}

impl Sampler<'_> {
    fn draw(&self, kernel: &SurvivalKernel, stream: &mut DrawStream) -> Result<(f64, f64)> {
        match self {
            Sampler::Table { dist, logq } => {
                let k = dist.index_for(stream.uniform_open_closed());
                Ok((dist.values()[k], logq[k]))
            }
            Sampler::General(d) => {
                let mu = d.sample_one(stream);
                Ok((mu, kernel.log_q(mu)?))
            }
        }
    }
}

fn realize(
    cfg: &EnsembleConfig,
    kernel: &SurvivalKernel,
    sampler: &Sampler,
    index: usize,
) -> Result<(SurvivalRecord, Option<Vec<f64>>)> {
    let mut stream = DrawStream::new(cfg.master_seed, index as u64);
    let mut trace = cfg.keep_traces.then(Vec::new);
    let mut log_survival = 0.0;
    let mut total_time = 0.0;
    let mut m = 0;
    match cfg.mode {
        EnsembleMode::FixedM(target) => {
            for _ in 0..target {
                let (mu, lq) = sampler.draw(kernel, &mut stream)?;
                log_survival += lq;
                total_time += mu;
                if let Some(t) = trace.as_mut() {
                    t.push(mu);
                }
            }
            m = target;
        }
        EnsembleMode::FixedT(budget) => {
            let limit = budget * (1.0 + FIXED_T_SLACK);
            loop {
                let (mu, lq) = sampler.draw(kernel, &mut stream)?;
                if total_time + mu > limit {
                    break;
                }
                log_survival += lq;
                total_time += mu;
                m += 1;
                if let Some(t) = trace.as_mut() {
                    t.push(mu);
                }
            }
        }
    }
    Ok((
        SurvivalRecord {
            m,
            total_time,
            log_survival,
        },
        trace,
    ))
}

/// Runs `cfg.realizations` independent measurement sequences.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<SurvivalEnsemble> {
    cfg.validate()?;
    let kernel = SurvivalKernel::new(&cfg.hamiltonian, &cfg.state)?;
    let sampler = match &cfg.dist {
        IntervalDistribution::Discrete(d) => Sampler::Table {
            dist: d,
            logq: d
                .values()
                .iter()
                .map(|&mu| kernel.log_q(mu))
                .collect::<Result<_>>()?,
        },
        other => Sampler::General(other),
    };

    let work = || -> Result<Vec<(SurvivalRecord, Option<Vec<f64>>)>> {
        (0..cfg.realizations)
            .into_par_iter()
            .map(|i| realize(cfg, &kernel, &sampler, i))
            .collect()
    };
    let out = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ZenoError::InvalidConfig(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut records = Vec::with_capacity(out.len());
    let mut traces = cfg.keep_traces.then(|| Vec::with_capacity(out.len()));
    for (rec, trace) in out {
        records.push(rec);
        if let (Some(all), Some(t)) = (traces.as_mut(), trace) {
            all.push(t);
        }
    }
    Ok(SurvivalEnsemble {
        records,
        traces,
        mode: cfg.mode,
        master_seed: cfg.master_seed,
    })
}

/// Histogram estimate of the rate function of `L/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRate {
    /// Centres of the occupied bins.
    pub xs: Vec<f64>,
    /// `-(1/m) ln(density)`, shifted so the minimum is zero.
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
    pub bin_width: f64,
}

/// `bins` equal-width bins over the observed range of `L/m`. Empty bins are
/// left out rather than reported as infinite.
pub fn empirical_rate(ens: &SurvivalEnsemble, bins: usize) -> Result<EmpiricalRate> {
    let m = match ens.mode {
        EnsembleMode::FixedM(m) => m,
        EnsembleMode::FixedT(_) => {
            return Err(ZenoError::InvalidConfig(
                "empirical rate needs a fixed-m ensemble".into(),
            ))
        }
    };
    let need = 10 * bins.max(1);
    if ens.len() < need {
        return Err(ZenoError::InsufficientSamples {
            have: ens.len(),
            need,
        });
    }
    let xs: Vec<f64> = ens
        .records
        .iter()
        .map(|r| r.log_survival / m as f64)
        .collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    if !(width > 0.0) {
        return Ok(EmpiricalRate {
            xs: vec![lo],
            values: vec![0.0],
            counts: vec![xs.len()],
            bin_width: 0.0,
        });
    }
    let mut counts = vec![0usize; bins];
    for &x in &xs {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let norm = xs.len() as f64 * width;
    let mut out = EmpiricalRate {
        xs: Vec::new(),
        values: Vec::new(),
        counts: Vec::new(),
        bin_width: width,
    };
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        out.xs.push(lo + (k as f64 + 0.5) * width);
        out.values.push(-(c as f64 / norm).ln() / m as f64);
        out.counts.push(c);
    }
    let floor = out.values.iter().copied().fold(f64::INFINITY, f64::min);
    for v in out.values.iter_mut() {
        *v -= floor;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSummary {
    /// `ln` of the sample mean of `P`.
    pub log_mean_survival: f64,
    /// Delta-method standard error of `log_mean_survival`.
    pub log_mean_std_error: f64,
    /// Sample mean of `ln P`; the geometric mean is its exponential.
    pub mean_log_survival: f64,
    pub mean_log_std_error: f64,
    /// `ln P` of the typical (median) realization.
    pub median_log_survival: f64,
    /// Sample variance of `ln P / m`.
    pub variance_of_intensive_log: f64,
    pub mean_total_time: f64,
    pub total_time_std_error: f64,
    pub mean_m: f64,
}

impl EnsembleSummary {
    pub fn mean_survival(&self) -> f64 {
        self.log_mean_survival.exp()
    }

    pub fn geometric_mean_survival(&self) -> f64 {
        self.mean_log_survival.exp()
    }

    pub fn median_survival(&self) -> f64 {
        self.median_log_survival.exp()
    }
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (mean, var)
}

pub fn ensemble_summary(ens: &SurvivalEnsemble) -> Result<EnsembleSummary> {
    let n = ens.len();
    if n < 2 {
        return Err(ZenoError::InsufficientSamples { have: n, need: 2 });
    }
    let logs = ens.log_survivals();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // P / P_max keeps the average representable when every P underflows
    let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let (mean_scaled, var_scaled) = mean_and_var(&scaled);
    let (mean_log, var_log) = mean_and_var(&logs);
    let intensive: Vec<f64> = ens
        .records
        .iter()
        .map(|r| {
            if r.m > 0 {
                r.log_survival / r.m as f64
            } else {
                0.0
            }
        })
        .collect();
    let (_, var_intensive) = mean_and_var(&intensive);
    let times: Vec<f64> = ens.records.iter().map(|r| r.total_time).collect();
    let (mean_time, var_time) = mean_and_var(&times);
    let mean_m = compensated_sum(ens.records.iter().map(|r| r.m as f64)) / n as f64;
    let sqrt_n = (n as f64).sqrt();

    Ok(EnsembleSummary {
        log_mean_survival: top + mean_scaled.ln(),
        log_mean_std_error: var_scaled.sqrt() / (mean_scaled * sqrt_n),
        mean_log_survival: mean_log,
        mean_log_std_error: var_log.sqrt() / sqrt_n,
        median_log_survival: ens.typical().log_survival,
        variance_of_intensive_log: var_intensive,
        mean_total_time: mean_time,
        total_time_std_error: var_time.sqrt() / sqrt_n,
        mean_m,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
