//! Large-deviation statistics of the log-survival `L = ln P = sum_j ln q(mu_j)`.
//!
//! For atoms `mu^(alpha)` with probabilities `p^(alpha)` the intensive
//! variable `x = L/m` obeys `Prob(L/m = x) ~ exp(-m I(x))`, where the rate
//! function is the relative entropy between an occupation vector `f` and
//! `p`. Two constructions are provided:
//!
//! * [`rate_function_i`]: the closed-form occupation vector that splits the
//!   constraint `sum f ln q = x` uniformly over the first `d - 1` atoms
//!   against the last one (the last listed atom is the reference atom);
//! * [`cramer_rate`]: the Legendre transform of the cumulant generating
//!   function of `ln q`, i.e. the KL minimum over *all* occupation vectors
//!   meeting the constraint.
//!
//! They coincide for two atoms; for more atoms the tilted minimum is a lower
//! bound on the closed form. Survival probabilities are carried in the log
//! domain throughout since `m` in the thousands underflows `f64`.

use crate::dynamics::{energy_variance, Hamiltonian, PureState, SurvivalKernel};
use crate::error::{Result, ZenoError};
use crate::intervals::{DiscreteIntervals, IntervalDistribution};
use crate::quadrature::QuadConfig;

/// Atoms whose `ln q` differ by less than this are merged before the
/// closed-form construction.
pub const MERGE_TOL: f64 = 1e-14;
/// Occupation entries below `-NEGATIVE_F_TOL` mean `x` is out of range.
pub const NEGATIVE_F_TOL: f64 = 1e-12;
pub const DEFAULT_GRID_POINTS: usize = 200;
/// Lower cut on `ln q` inside expectation integrals.
pub const LOG_Q_FLOOR: f64 = -700.0;

/// Discrete large-deviation problem: probabilities, `ln q` per atom and the
/// number of measurements. Waiting times are kept when known; the joint
/// (fixed total time) quantities need them.
#[derive(Debug, Clone, PartialEq)]
pub struct LdProblem {
    probs: Vec<f64>,
    logq: Vec<f64>,
    waits: Option<Vec<f64>>,
    m: usize,
}

impl LdProblem {
    pub fn new(probs: Vec<f64>, logq: Vec<f64>, m: usize) -> Result<Self> {
        if probs.is_empty() || probs.len() != logq.len() {
            return Err(ZenoError::InvalidDistribution(format!(
                "{} probabilities for {} log-factors",
                probs.len(),
                logq.len()
            )));
        }
        if let Some(&l) = logq.iter().find(|l| !l.is_finite() || **l > 0.0) {
            return Err(ZenoError::InvalidDistribution(format!(
                "ln q = {l} must be finite and <= 0 (q in (0, 1])"
            )));
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(p > 0.0 && p <= 1.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(ZenoError::InvalidDistribution(
                "probabilities must lie in (0, 1] and sum to 1".into(),
            ));
        }
        Ok(Self {
            probs,
            logq,
            waits: None,
            m,
        })
    }

    /// Builds the problem for a discrete waiting-time law on a given system.
    pub fn from_system(
        h: &Hamiltonian,
        psi0: &PureState,
        dist: &DiscreteIntervals,
        m: usize,
    ) -> Result<Self> {
        let kernel = SurvivalKernel::new(h, psi0)?;
        Self::from_kernel(&kernel, dist, m)
    }

    pub fn from_kernel(
        kernel: &SurvivalKernel,
        dist: &DiscreteIntervals,
        m: usize,
    ) -> Result<Self> {
        let logq = dist
            .values()
            .iter()
            .map(|&mu| kernel.log_q(mu))
            .collect::<Result<Vec<_>>>()?;
        let mut prob = Self::new(dist.probs().to_vec(), logq, m)?;
        prob.waits = Some(dist.values().to_vec());
        Ok(prob)
    }

    pub fn with_waiting_times(mut self, waits: Vec<f64>) -> Result<Self> {
        if waits.len() != self.probs.len() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.probs.len(),
                actual: waits.len(),
            });
        }
        self.waits = Some(waits);
        Ok(self)
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn logq(&self) -> &[f64] {
        &self.logq
    }

    pub fn waiting_times(&self) -> Option<&[f64]> {
        self.waits.as_deref()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atoms(&self) -> usize {
        self.probs.len()
    }

    /// `[min ln q, max ln q]`: the attainable range of `x = L/m`.
    pub fn range(&self) -> (f64, f64) {
        let lo = self.logq.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.logq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// `L*/m = sum_alpha p^(alpha) ln q(mu^(alpha))`.
    pub fn typical_x(&self) -> f64 {
        self.probs.iter().zip(&self.logq).map(|(p, l)| p * l).sum()
    }

    /// `Var_p[ln q]`.
    pub fn logq_variance(&self) -> f64 {
        let mean = self.typical_x();
        self.probs
            .iter()
            .zip(&self.logq)
            .map(|(p, l)| p * (l - mean) * (l - mean))
            .sum()
    }

    /// Atoms with coincident `ln q` merged into the last occurrence, so the
    /// reference (last) atom keeps its position.
    fn merged(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.atoms();
        let mut probs = Vec::with_capacity(d);
        let mut logq = Vec::with_capacity(d);
        for a in 0..d {
            let l = self.logq[a];
            if self.logq[a + 1..]
                .iter()
                .any(|&o| (o - l).abs() < MERGE_TOL)
            {
                continue;
            }
            let p: f64 = (0..=a)
                .filter(|&b| (self.logq[b] - l).abs() < MERGE_TOL)
                .map(|b| self.probs[b])
                .sum();
            probs.push(p);
            logq.push(l);
        }
        (probs, logq)
    }
}

/// KL divergence `sum f ln(f/p)` with `0 ln 0 = 0`.
pub fn kl_divergence(f: &[f64], p: &[f64]) -> f64 {
    f.iter()
        .zip(p)
        .map(|(&fi, &pi)| if fi > 0.0 { fi * (fi / pi).ln() } else { 0.0 })
        .sum()
}

fn check_in_range(prob: &LdProblem, x: f64) -> Result<()> {
    let (lo, hi) = prob.range();
    let slack = NEGATIVE_F_TOL * (hi - lo).max(lo.abs());
    if !x.is_finite() || x < lo - slack || x > hi + slack {
        return Err(ZenoError::OutOfRange {
            x,
            reason: format!("attainable interval is [{lo:e}, {hi:e}]"),
        });
    }
    Ok(())
}

fn clean_simplex(mut v: Vec<f64>, x: f64, what: &str) -> Result<Vec<f64>> {
    if v.iter()
        .any(|e| !e.is_finite() || *e < -NEGATIVE_F_TOL || *e > 1.0 + NEGATIVE_F_TOL)
    {
        return Err(ZenoError::OutOfRange {
            x,
            reason: format!("{what} vector {v:?} is not a probability vector"),
        });
    }
    for e in v.iter_mut() {
        *e = e.clamp(0.0, 1.0);
    }
    Ok(v)
}

/// Closed-form occupation vector `f` for `x`, after merging coincident atoms.
/// Returns it together with the merged probabilities.
pub fn occupation_f(prob: &LdProblem, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_in_range(prob, x)?;
    let (probs, logq) = prob.merged();
    let d = probs.len();
    if d == 1 {
        return Ok((vec![1.0], probs));
    }
    let ld = logq[d - 1];
    let mut f: Vec<f64> = logq[..d - 1]
        .iter()
        .map(|&la| (ld - x) / ((d - 1) as f64 * (ld - la)))
        .collect();
    let rest: f64 = f.iter().sum();
    f.push(1.0 - rest);
    let f = clean_simplex(f, x, "occupation")?;
    Ok((f, probs))
}

/// Rate function `I(x)` from the closed-form occupation vector.
pub fn rate_function_i(prob: &LdProblem, x: f64) -> Result<f64> {
    let (f, p) = occupation_f(prob, x)?;
    Ok(kl_divergence(&f, &p))
}

/// `J(P) = I(ln P)`: the constraint `L = m ln P` pins `L/m` to a point.
pub fn rate_function_j(prob: &LdProblem, survival: f64) -> Result<f64> {
    if !(survival > 0.0 && survival <= 1.0) {
        return Err(ZenoError::OutOfRange {
            x: survival,
            reason: "survival probability must lie in (0, 1]".into(),
        });
    }
    // ln P of a linear-domain P carries ~1 ulp of absolute error, which is
    // not small against the attainable range when q ~ 1 - 1e-7
    let (lo, hi) = prob.range();
    let x = survival.ln();
    let slack = 4.0 * f64::EPSILON;
    let x = if x > hi && x <= hi + slack {
        hi
    } else if x < lo && x >= lo - slack {
        lo
    } else {
        x
    };
    rate_function_i(prob, x)
}

/// Cramer rate `sup_t [t x - ln sum_alpha p_alpha exp(t ln q_alpha)]`.
///
/// The tilt is found by bisection on the tilted mean after mapping `ln q`
/// affinely onto `[0, 1]`, which leaves the rate unchanged and keeps the
/// tilt of order one even when all `ln q` are ~1e-7. At the closed
/// endpoints the limiting value `-ln P(extreme atom)` is returned.
pub fn cramer_rate(prob: &LdProblem, x: f64) -> Result<f64> {
    check_in_range(prob, x)?;
    let (lo, hi) = prob.range();
    let width = hi - lo;
    if width <= MERGE_TOL {
        return Ok(0.0);
    }
    let s: Vec<f64> = prob.logq.iter().map(|&l| (l - lo) / width).collect();
    let z = ((x - lo) / width).clamp(0.0, 1.0);
    let p = &prob.probs;

    let edge_mass = |target: f64| -> f64 {
        s.iter()
            .zip(p)
            .filter(|(&si, _)| (si - target).abs() * width < MERGE_TOL)
            .map(|(_, &pi)| pi)
            .sum()
    };
    if z == 0.0 {
        return Ok(-edge_mass(0.0).ln());
    }
    if z == 1.0 {
        return Ok(-edge_mass(1.0).ln());
    }

    let log_mgf = |t: f64| -> f64 {
        let top = s.iter().map(|&si| t * si).fold(f64::NEG_INFINITY, f64::max);
        top + s
            .iter()
            .zip(p)
            .map(|(&si, &pi)| pi * (t * si - top).exp())
            .sum::<f64>()
            .ln()
    };
    let tilted_mean = |t: f64| -> f64 {
        let top = s.iter().map(|&si| t * si).fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for (&si, &pi) in s.iter().zip(p) {
            let w = pi * (t * si - top).exp();
            num += w * si;
            den += w;
        }
        num / den
    };

    let (mut a, mut b) = (-1.0, 1.0);
    while tilted_mean(a) > z {
        a *= 2.0;
        if a < -1e8 {
            return Err(ZenoError::RootBracketFailure { x });
        }
    }
    while tilted_mean(b) < z {
        b *= 2.0;
        if b > 1e8 {
            return Err(ZenoError::RootBracketFailure { x });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if tilted_mean(mid) < z {
            a = mid;
        } else {
            b = mid;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t * z - log_mgf(t)).max(0.0))
}

/// Sampled rate curve on a uniform grid in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl RateCurve {
    /// Grid with `points` nodes over `[lo + eps, hi - eps]`, `eps = 1e-9 (hi - lo)`.
    pub fn grid(prob: &LdProblem, points: usize) -> Vec<f64> {
        let (lo, hi) = prob.range();
        let eps = 1e-9 * (hi - lo);
        let (a, b) = (lo + eps, hi - eps);
        if points < 2 {
            return vec![0.5 * (a + b)];
        }
        (0..points)
            .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
            .collect()
    }

    /// Evaluates `rate` on the grid; grid points where the closed form is
    /// not a probability vector (possible for more than two atoms) are skipped.
    pub fn sample<F: Fn(&LdProblem, f64) -> Result<f64>>(
        prob: &LdProblem,
        points: usize,
        rate: F,
    ) -> Self {
        let mut xs = Vec::with_capacity(points);
        let mut values = Vec::with_capacity(points);
        for x in Self::grid(prob, points) {
            if let Ok(v) = rate(prob, x) {
                xs.push(x);
                values.push(v);
            }
        }
        Self { xs, values }
    }

    pub fn argmin(&self) -> Option<(f64, f64)> {
        self.xs
            .iter()
            .zip(&self.values)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&x, &v)| (x, v))
    }
}

/// Most probable and mean survival, both in the log domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalEstimates {
    /// `ln P* = m <ln q>`.
    pub log_p_star: f64,
    /// `ln <P> = m ln <q>`.
    pub log_mean: f64,
}

impl SurvivalEstimates {
    pub fn p_star(&self) -> f64 {
        self.log_p_star.exp()
    }

    pub fn mean(&self) -> f64 {
        self.log_mean.exp()
    }

    /// `ln <P> - ln P* >= 0`.
    pub fn jensen_gap(&self) -> f64 {
        self.log_mean - self.log_p_star
    }
}

/// `L* = m sum_alpha p^(alpha) ln q(mu^(alpha))`.
pub fn most_probable_log_survival(prob: &LdProblem) -> f64 {
    prob.m as f64 * prob.typical_x()
}

/// `P*` and `<P>` for a discrete problem. `ln sum p q` is evaluated as
/// `ln_1p(sum p expm1(ln q))` to keep the gap to `P*` resolvable when
/// every `q` is within 1e-7 of one.
pub fn survival_estimates(prob: &LdProblem) -> SurvivalEstimates {
    let m = prob.m as f64;
    let excess: f64 = prob
        .probs
        .iter()
        .zip(&prob.logq)
        .map(|(p, l)| p * l.exp_m1())
        .sum();
    SurvivalEstimates {
        log_p_star: m * prob.typical_x(),
        log_mean: m * excess.ln_1p(),
    }
}

/// `m int p(mu) ln q(mu)`.
pub fn most_probable_log_survival_continuous(
    kernel: &SurvivalKernel,
    dist: &IntervalDistribution,
    m: usize,
    cfg: &QuadConfig,
) -> Result<f64> {
    // q has isolated zeros for generic states; the logarithmic singularity
    // is integrable but a node landing on it must stay finite
    let log_q = dist.expect(
        |mu| {
            kernel
                .log_q(mu)
                .unwrap_or(f64::NEG_INFINITY)
                .max(LOG_Q_FLOOR)
        },
        cfg,
    )?;
    Ok(m as f64 * log_q)
}

/// `P*` and `<P>` for any waiting-time law: `m <ln q>` and `m ln(1 - <delta>)`.
pub fn survival_estimates_continuous(
    kernel: &SurvivalKernel,
    dist: &IntervalDistribution,
    m: usize,
    cfg: &QuadConfig,
) -> Result<SurvivalEstimates> {
    let log_p_star = most_probable_log_survival_continuous(kernel, dist, m, cfg)?;
    let mean_delta = dist.expect(|mu| kernel.delta(mu), cfg)?;
    Ok(SurvivalEstimates {
        log_p_star,
        log_mean: m as f64 * (-mean_delta).ln_1p(),
    })
}

/// Joint rate function of `(x, y) = (L/m, T/m)` from the closed-form
/// occupation vector `g`:
///
/// ```text
/// g_alpha = mu_d (ln q_d - x) / ((ln q_d - x)(mu_d - mu_alpha) + y (d-1) ln(q_d/q_alpha))
/// ```
///
/// for `alpha < d` and `g_d = 1 - sum g_alpha`.
// NOTE: the published numerator reads `m ln q_d - x`, mixing an extensive
// and an intensive term; the intensive form used here is the one for which
// g reduces to the occupation vector f on the line y = sum_alpha f_alpha mu_alpha.
pub fn joint_rate_function(prob: &LdProblem, x: f64, y: f64) -> Result<f64> {
    let g = occupation_g(prob, x, y)?;
    Ok(kl_divergence(&g, &prob.probs))
}

pub fn occupation_g(prob: &LdProblem, x: f64, y: f64) -> Result<Vec<f64>> {
    let waits = prob.waits.as_ref().ok_or_else(|| {
        ZenoError::InvalidConfig("joint rate function needs the atoms' waiting times".into())
    })?;
    check_in_range(prob, x)?;
    let d = prob.atoms();
    if d == 1 {
        return Ok(vec![1.0]);
    }
    let (ld, mud) = (prob.logq[d - 1], waits[d - 1]);
    let a = ld - x;
    let mut g: Vec<f64> = (0..d - 1)
        .map(|k| {
            let den = a * (mud - waits[k]) + y * (d - 1) as f64 * (ld - prob.logq[k]);
            if a == 0.0 {
                0.0
            } else {
                mud * a / den
            }
        })
        .collect();
    let rest: f64 = g.iter().sum();
    g.push(1.0 - rest);
    clean_simplex(g, x, "joint occupation")
}

/// `T/m` implied by the closed-form occupation vector at `x`:
/// `sum_alpha f_alpha mu_alpha`. For two atoms `g(x, y) = f(x)` exactly here.
pub fn consistent_time_per_measurement(prob: &LdProblem, x: f64) -> Result<f64> {
    let waits = prob
        .waits
        .as_ref()
        .ok_or_else(|| ZenoError::InvalidConfig("needs the atoms' waiting times".into()))?;
    let (f, _) = occupation_f(prob, x)?;
    if f.len() != waits.len() {
        return Err(ZenoError::InvalidConfig(
            "atoms with coincident q were merged; waiting times are ambiguous".into(),
        ));
    }
    Ok(f.iter().zip(waits).map(|(f, mu)| f * mu).sum())
}

/// `min_y I(x, y)` over the supplied `y` grid, skipping points where `g`
/// leaves the simplex. Returns `(min, argmin)`.
pub fn contract_over_time(prob: &LdProblem, x: f64, ys: &[f64]) -> Result<(f64, f64)> {
    ys.iter()
        .filter_map(|&y| joint_rate_function(prob, x, y).ok().map(|v| (v, y)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| ZenoError::OutOfRange {
            x,
            reason: "no y on the grid gives a valid joint occupation vector".into(),
        })
}

/// Two-atom counts recovered from a fixed `(L, T)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedTimeCounts {
    pub n1: f64,
    pub n2: f64,
    pub m_real: f64,
    /// Nearest non-negative integer pair.
    pub nearest: (u64, u64),
    pub m: u64,
}

/// Solves `n1 ln q1 + n2 ln q2 = L`, `n1 mu1 + n2 mu2 = T` for a two-atom law.
pub fn fixed_t_solve_m(
    prob: &LdProblem,
    log_survival: f64,
    total_time: f64,
) -> Result<FixedTimeCounts> {
    let waits = prob
        .waits
        .as_ref()
        .ok_or_else(|| ZenoError::InvalidConfig("needs the atoms' waiting times".into()))?;
    if prob.atoms() != 2 {
        return Err(ZenoError::InvalidConfig(format!(
            "fixed-time inversion needs exactly two atoms, got {}",
            prob.atoms()
        )));
    }
    let (l1, l2) = (prob.logq[0], prob.logq[1]);
    let (mu1, mu2) = (waits[0], waits[1]);
    let det = l1 * mu2 - l2 * mu1;
    let scale = (l1.abs() * mu2).max(l2.abs() * mu1);
    if det.abs() <= 1e-14 * scale {
        return Err(ZenoError::Inconsistent(
            "ln q / mu is the same for both atoms; counts are not identifiable".into(),
        ));
    }
    let n1 = (log_survival * mu2 - l2 * total_time) / det;
    let n2 = (l1 * total_time - log_survival * mu1) / det;
    let tol = 1e-9 * (n1.abs() + n2.abs()).max(1.0);
    if n1 < -tol || n2 < -tol || !n1.is_finite() || !n2.is_finite() {
        return Err(ZenoError::Inconsistent(format!(
            "solution n = ({n1:.6}, {n2:.6}) has a negative count"
        )));
    }
    let nearest = (n1.max(0.0).round() as u64, n2.max(0.0).round() as u64);
    Ok(FixedTimeCounts {
        n1,
        n2,
        m_real: n1 + n2,
        nearest,
        m: nearest.0 + nearest.1,
    })
}

/// Equally spaced protocol at fixed total time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquallySpaced {
    pub m: u64,
    /// `m ln q(mu_bar)`.
    pub log_exact: f64,
    /// `-T mu_bar Var(H)`.
    pub log_zeno: f64,
    /// `|P_zeno - P_exact| / P_exact`.
    pub relative_difference: f64,
}

impl EquallySpaced {
    pub fn exact(&self) -> f64 {
        self.log_exact.exp()
    }

    pub fn zeno(&self) -> f64 {
        self.log_zeno.exp()
    }
}

/// Survival after `T / mu_bar` equally spaced measurements (rounded down)
/// and its short-interval approximation `exp(-T mu_bar Var H)`.
pub fn equally_spaced_survival(
    h: &Hamiltonian,
    psi0: &PureState,
    mu_bar: f64,
    total_time: f64,
) -> Result<EquallySpaced> {
    if !(mu_bar > 0.0) || !(total_time > 0.0) {
        return Err(ZenoError::InvalidInterval {
            value: mu_bar.min(total_time),
            reason: "spacing and total time must be positive",
        });
    }
    let kernel = SurvivalKernel::new(h, psi0)?;
    let m = (total_time / mu_bar * (1.0 + 1e-12)).floor() as u64;
    let log_exact = m as f64 * kernel.log_q(mu_bar)?;
    let log_zeno = -total_time * mu_bar * energy_variance(h, psi0)?;
    Ok(EquallySpaced {
        m,
        log_exact,
        log_zeno,
        relative_difference: (log_zeno - log_exact).exp_m1().abs(),
    })
}

/// Stochastic Zeno indicator `<delta> = <mu^2> / tau_Z^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QzeCondition {
    pub mean_delta: f64,
    pub second_moment: f64,
    pub energy_variance: f64,
}

impl QzeCondition {
    /// Shared leading-order `ln P* ~ ln <P> ~ -m <delta>`.
    pub fn leading_log_survival(&self, m: usize) -> f64 {
        -(m as f64) * self.mean_delta
    }

    pub fn leading_survival(&self, m: usize) -> f64 {
        self.leading_log_survival(m).exp()
    }
}

pub fn qze_condition(
    dist: &IntervalDistribution,
    h: &Hamiltonian,
    psi0: &PureState,
) -> Result<QzeCondition> {
    let second_moment = dist.second_moment()?;
    let var = energy_variance(h, psi0)?;
    Ok(QzeCondition {
        mean_delta: second_moment * var,
        second_moment,
        energy_variance: var,
    })
}

/// Random versus equally spaced protocol at a common mean spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderGain {
    pub mu2: f64,
    pub log_p_star: f64,
    pub log_p_equal: f64,
}

impl DisorderGain {
    pub fn log_ratio(&self) -> f64 {
        self.log_p_star - self.log_p_equal
    }

    pub fn ratio(&self) -> f64 {
        self.log_ratio().exp()
    }
}

/// Two-atom law `(mu1, mu2)` with weights `(p1, 1 - p1)` and mean `mu_bar`,
/// so `mu2 = (mu_bar - p1 mu1) / (1 - p1)`; compares `P*` against `q(mu_bar)^m`.
pub fn disorder_gain(
    h: &Hamiltonian,
    psi0: &PureState,
    p1: f64,
    mu1: f64,
    mu_bar: f64,
    m: usize,
) -> Result<DisorderGain> {
    let kernel = SurvivalKernel::new(h, psi0)?;
    disorder_gain_with(&kernel, p1, mu1, mu_bar, m)
}

pub fn disorder_gain_with(
    kernel: &SurvivalKernel,
    p1: f64,
    mu1: f64,
    mu_bar: f64,
    m: usize,
) -> Result<DisorderGain> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(ZenoError::InvalidDistribution(format!(
            "p1 = {p1} must lie in (0, 1)"
        )));
    }
    if !(mu1 > 0.0) || !(mu_bar > 0.0) {
        return Err(ZenoError::InvalidInterval {
            value: mu1.min(mu_bar),
            reason: "waiting times must be strictly positive",
        });
    }
    let mu2 = (mu_bar - p1 * mu1) / (1.0 - p1);
    if !(mu2 > 0.0) || !mu2.is_finite() {
        return Err(ZenoError::InvalidMean { mu2 });
    }
    let m = m as f64;
    Ok(DisorderGain {
        mu2,
        log_p_star: m * (p1 * kernel.log_q(mu1)? + (1.0 - p1) * kernel.log_q(mu2)?),
        log_p_equal: m * kernel.log_q(mu_bar)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_atom() -> LdProblem {
        LdProblem::new(vec![0.3, 0.7], vec![-0.2, -1.1], 50)
            .unwrap()
            .with_waiting_times(vec![1.0, 3.0])
            .unwrap()
    }

    #[test]
    fn rate_vanishes_at_typical_point() {
        let p = two_atom();
        assert!(rate_function_i(&p, p.typical_x()).unwrap().abs() < 1e-15);
        assert!(cramer_rate(&p, p.typical_x()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn boundary_values() {
        let p = two_atom();
        let i1 = rate_function_i(&p, -0.2).unwrap();
        assert!((i1 + 0.3f64.ln()).abs() < 1e-14);
        let i2 = rate_function_i(&p, -1.1).unwrap();
        assert!((i2 + 0.7f64.ln()).abs() < 1e-14);
        assert!((cramer_rate(&p, -0.2).unwrap() + 0.3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn out_of_range() {
        let p = two_atom();
        assert!(matches!(
            rate_function_i(&p, 0.1),
            Err(ZenoError::OutOfRange { .. })
        ));
        assert!(matches!(
            cramer_rate(&p, -1.5),
            Err(ZenoError::OutOfRange { .. })
        ));
        assert!(rate_function_j(&p, 0.0).is_err());
        assert!(rate_function_j(&p, 1.5).is_err());
    }

    #[test]
    fn rate_j_matches_i() {
        let p = two_atom();
        let x: f64 = -0.5;
        assert_eq!(
            rate_function_j(&p, x.exp()).unwrap(),
            rate_function_i(&p, x).unwrap()
        );
    }

    #[test]
    fn coincident_atoms_are_merged() {
        let p = LdProblem::new(vec![0.2, 0.3, 0.5], vec![-0.4, -1.0, -0.4], 10).unwrap();
        // behaves like the two-atom law {-1.0: 0.3, -0.4: 0.7}
        let q = LdProblem::new(vec![0.3, 0.7], vec![-1.0, -0.4], 10).unwrap();
        for x in [-0.9, -0.7, -0.5] {
            let a = rate_function_i(&p, x).unwrap();
            let b = rate_function_i(&q, x).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn single_atom_is_degenerate() {
        let p = LdProblem::new(vec![1.0], vec![-0.3], 10).unwrap();
        assert_eq!(rate_function_i(&p, -0.3).unwrap(), 0.0);
        assert_eq!(cramer_rate(&p, -0.3).unwrap(), 0.0);
        let est = survival_estimates(&p);
        assert!((est.log_mean - est.log_p_star).abs() < 1e-12);
    }

    #[test]
    fn invalid_problems() {
        assert!(LdProblem::new(vec![0.5, 0.5], vec![-0.1], 1).is_err());
        assert!(LdProblem::new(vec![0.5, 0.5], vec![-0.1, f64::NEG_INFINITY], 1).is_err());
        assert!(LdProblem::new(vec![0.5, 0.6], vec![-0.1, -0.2], 1).is_err());
    }

    #[test]
    fn joint_rate_needs_times() {
        let p = LdProblem::new(vec![0.3, 0.7], vec![-0.2, -1.1], 50).unwrap();
        assert!(joint_rate_function(&p, -0.5, 2.0).is_err());
    }

    #[test]
    fn joint_rate_reduces_on_consistent_line() {
        let p = two_atom();
        for x in [-1.0, -0.8, -0.5, -0.3] {
            let y = consistent_time_per_measurement(&p, x).unwrap();
            let joint = joint_rate_function(&p, x, y).unwrap();
            assert!((joint - rate_function_i(&p, x).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn typical_point_of_joint_rate() {
        let p = two_atom();
        let mean_wait = 0.3 * 1.0 + 0.7 * 3.0;
        assert!(
            joint_rate_function(&p, p.typical_x(), mean_wait)
                .unwrap()
                .abs()
                < 1e-14
        );
    }

    #[test]
    fn fixed_time_inversion() {
        let p = two_atom();
        let l = 50.0 * (-0.2) + 50.0 * (-1.1);
        let sol = fixed_t_solve_m(&p, l, 200.0).unwrap();
        assert!((sol.m_real - 100.0).abs() < 1e-9);
        assert_eq!(sol.m, 100);
        assert_eq!(sol.nearest, (50, 50));

        let sol = fixed_t_solve_m(&p, 40.0 * -1.1, 40.0 * 3.0).unwrap();
        assert_eq!(sol.nearest, (0, 40));

        let bad = fixed_t_solve_m(&p, l, 80.0 * 1.0 + 20.0 * 3.0);
        assert!(matches!(bad, Err(ZenoError::Inconsistent(_))));
    }

    #[test]
    fn fixed_time_needs_two_atoms() {
        let p = LdProblem::new(vec![0.2, 0.3, 0.5], vec![-0.1, -0.2, -0.3], 5)
            .unwrap()
            .with_waiting_times(vec![1.0, 2.0, 3.0])
            .unwrap();
        assert!(fixed_t_solve_m(&p, -1.0, 10.0).is_err());
    }

    #[test]
    fn grid_excludes_endpoints() {
        let p = two_atom();
        let g = RateCurve::grid(&p, DEFAULT_GRID_POINTS);
        assert_eq!(g.len(), 200);
        assert!(g[0] > -1.1 && g[199] < -0.2);
        let curve = RateCurve::sample(&p, 50, rate_function_i);
        let (xmin, vmin) = curve.argmin().unwrap();
        assert!(vmin >= 0.0);
        assert!((xmin - p.typical_x()).abs() < 0.9 / 49.0);
    }
}
