//! Unitary evolution interrupted by projective measurements.
//!
//! With the rank-1 projector `P = |psi0><psi0|` the survival probability of a
//! measurement sequence factorizes into per-interval factors
//! `q(mu) = |<psi0| exp(-i H mu) |psi0>|^2`. The fast path evaluates `q` from
//! the spectral weights `w_k = |<v_k|psi0>|^2`:
//!
//! ```text
//! 1 - q(mu) = sum_{k<l} 4 w_k w_l sin^2((lambda_k - lambda_l) mu / 2)
//! ```
//!
//! which keeps full relative precision of `1 - q` in the Zeno regime where
//! `q` is within 1e-7 of one. The explicit matrix chain
//! `(P U_m) ... (P U_1) rho0 (...)^H` is kept as an independent path.

use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::linalg::{self, ComplexMatrix, SpectralDecomposition, DEFAULT_HERMITIAN_TOL};
use crate::units::angular;

/// Round-off below this magnitude in `q` is clamped to zero.
pub const NEGATIVE_Q_CLAMP: f64 = 1e-15;
const NORMALIZATION_TOL: f64 = 1e-12;
const UNDERFLOW_THRESHOLD: f64 = 1e-300;

/// Reference three-level chain: coupling `f = 100 kHz`, level frequencies
/// 30, 20 and 10 kHz.
pub mod reference {
    pub const COUPLING_HZ: f64 = 100e3;
    pub const LEVEL_FREQUENCIES_HZ: [f64; 3] = [30e3, 20e3, 10e3];
}

#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let spectrum = linalg::hermitian_eig(&matrix, DEFAULT_HERMITIAN_TOL)?;
        Ok(Self { matrix, spectrum })
    }

    /// Nearest-neighbour chain with on-site energies `omegas` and uniform
    /// hopping `coupling`, both in rad/s.
    pub fn chain(omegas: &[f64], coupling: f64) -> Result<Self> {
        if omegas.is_empty() {
            return Err(ZenoError::EmptySpectrum);
        }
        let n = omegas.len();
        let mut m = ComplexMatrix::zeros(n);
        for (j, &w) in omegas.iter().enumerate() {
            m[(j, j)] = Complex64::new(w, 0.0);
            if j + 1 < n {
                m[(j, j + 1)] = Complex64::new(coupling, 0.0);
                m[(j + 1, j)] = Complex64::new(coupling, 0.0);
            }
        }
        let m = ComplexMatrix::from_row_major(n, m.as_slice().to_vec())?;
        Self::new(m)
    }

    /// Same as [`Hamiltonian::chain`] with ordinary frequencies in Hz.
    pub fn chain_from_frequencies(level_hz: &[f64], coupling_hz: f64) -> Result<Self> {
        let omegas: Vec<f64> = level_hz.iter().map(|&f| angular(f)).collect();
        Self::chain(&omegas, angular(coupling_hz))
    }

    pub fn reference_chain() -> Self {
        Self::chain_from_frequencies(&reference::LEVEL_FREQUENCIES_HZ, reference::COUPLING_HZ)
            .expect("reference chain is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn propagator(&self, mu: f64) -> Result<ComplexMatrix> {
        linalg::propagator(&self.spectrum, mu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(ZenoError::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !((norm_sq - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(ZenoError::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(ZenoError::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes: amps }
    }

    /// `a1 |100> + a2 |001>` in the three-level basis.
    pub fn edge_superposition(a1: Complex64, a2: Complex64) -> Result<Self> {
        Self::new(vec![a1, Complex64::new(0.0, 0.0), a2])
    }

    /// `(|100> + |001>) / sqrt(2)`, entangled across the 1|23 bipartition.
    pub fn entangled_default() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: vec![a, Complex64::new(0.0, 0.0), a],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    fn expect(&self, op: &ComplexMatrix) -> Complex64 {
        let v = op.mul_vec(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Orthogonal projector `P = P^2 = P^H`.
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: ComplexMatrix,
}

impl Projector {
    pub fn rank_one(state: &PureState) -> Self {
        Self {
            matrix: state.density_matrix(),
        }
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermitian_deviation();
        if herm > 1e-12 {
            return Err(ZenoError::NotProjector {
                reason: format!("||P - P^H|| = {herm:e}"),
            });
        }
        let idem = (&(&matrix * &matrix) - &matrix).frobenius_norm();
        if idem > 1e-10 {
            return Err(ZenoError::NotProjector {
                reason: format!("||P^2 - P|| = {idem:e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }
}

/// Outcome of evolving one measurement sequence.
#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub survival: f64,
    /// Always finite unless some factor is exactly zero; use this when
    /// `underflowed` is set.
    pub log_survival: f64,
    pub total_time: f64,
    pub final_state: PureState,
    pub factors: Vec<f64>,
    /// Set when the linear-domain survival dropped below 1e-300.
    pub underflowed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionPath {
    /// Product of scalar overlaps (rank-1 projector onto the initial state).
    #[default]
    Product,
    /// Explicit chain of projected propagators and trace of the density matrix.
    MatrixChain,
}

/// Precomputed spectral weights of `psi0` for repeated evaluation of `q(mu)`.
#[derive(Debug, Clone)]
pub struct SurvivalKernel {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl SurvivalKernel {
    pub fn new(h: &Hamiltonian, psi0: &PureState) -> Result<Self> {
        check_dims(h, psi0)?;
        let spec = h.spectrum();
        let mut weights: Vec<f64> = (0..spec.dim())
            .map(|k| {
                let v = spec.eigenvector(k);
                v.iter()
                    .zip(psi0.amplitudes())
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            eigenvalues: spec.eigenvalues.clone(),
            weights,
        })
    }

    /// `1 - q(mu)`, evaluated without cancellation.
    pub fn delta(&self, mu: f64) -> f64 {
        let n = self.weights.len();
        let mut acc = 0.0;
        for k in 0..n {
            for l in k + 1..n {
                let s = (0.5 * (self.eigenvalues[k] - self.eigenvalues[l]) * mu).sin();
                acc += 4.0 * self.weights[k] * self.weights[l] * s * s;
            }
        }
        acc
    }

    pub fn q(&self, mu: f64) -> Result<f64> {
        let q = 1.0 - self.delta(mu);
        clamp_q(q)
    }

    /// `ln q(mu)`; `-inf` when `q` is exactly zero.
    pub fn log_q(&self, mu: f64) -> Result<f64> {
        let d = self.delta(mu);
        if d < 1.0 {
            Ok((-d).ln_1p())
        } else {
            clamp_q(1.0 - d).map(f64::ln)
        }
    }
}

fn clamp_q(q: f64) -> Result<f64> {
    if q >= 0.0 {
        Ok(q.min(1.0))
    } else if q >= -NEGATIVE_Q_CLAMP {
        Ok(0.0)
    } else {
        Err(ZenoError::NegativeSurvival { value: q })
    }
}

fn check_dims(h: &Hamiltonian, psi0: &PureState) -> Result<()> {
    if h.dim() != psi0.dim() {
        return Err(ZenoError::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    Ok(())
}

fn check_interval(mu: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(ZenoError::InvalidInterval {
            value: mu,
            reason: "waiting times must be finite and non-negative",
        });
    }
    Ok(())
}

/// Single-interval survival factor `q(mu) = |<psi0|U(mu)|psi0>|^2`.
pub fn survival_factor(h: &Hamiltonian, psi0: &PureState, mu: f64) -> Result<f64> {
    check_interval(mu)?;
    SurvivalKernel::new(h, psi0)?.q(mu)
}

/// `delta(mu) = 1 - q(mu)`.
pub fn delta_of_mu(h: &Hamiltonian, psi0: &PureState, mu: f64) -> Result<f64> {
    check_interval(mu)?;
    Ok(SurvivalKernel::new(h, psi0)?.delta(mu))
}

/// Energy variance `<H^2> - <H>^2`, computed as `||(H - <H>) psi0||^2`.
pub fn energy_variance(h: &Hamiltonian, psi0: &PureState) -> Result<f64> {
    check_dims(h, psi0)?;
    let mean = psi0.expect(h.matrix()).re;
    let h_psi = h.matrix().mul_vec(psi0.amplitudes());
    Ok(h_psi
        .iter()
        .zip(psi0.amplitudes())
        .map(|(hp, p)| (hp - p * mean).norm_sqr())
        .sum())
}

/// Zeno time `tau_Z = (<H^2> - <H>^2)^(-1/2)`.
pub fn zeno_time(h: &Hamiltonian, psi0: &PureState) -> Result<f64> {
    let var = energy_variance(h, psi0)?;
    let scale = 1e-10 * h.matrix().frobenius_norm();
    if var <= scale * scale {
        return Err(ZenoError::ZeroVariance);
    }
    Ok(var.powf(-0.5))
}

/// Evolves `psi0` through the measurement sequence using the product path.
pub fn evolve_sequence(
    h: &Hamiltonian,
    psi0: &PureState,
    intervals: &[f64],
) -> Result<SequenceResult> {
    evolve_sequence_with(h, psi0, intervals, EvolutionPath::Product)
}

pub fn evolve_sequence_with(
    h: &Hamiltonian,
    psi0: &PureState,
    intervals: &[f64],
    path: EvolutionPath,
) -> Result<SequenceResult> {
    check_dims(h, psi0)?;
    if intervals.is_empty() {
        return Err(ZenoError::InvalidConfig(
            "measurement sequence is empty".into(),
        ));
    }
    intervals.iter().try_for_each(|&mu| check_interval(mu))?;
    match path {
        EvolutionPath::Product => evolve_product(h, psi0, intervals),
        EvolutionPath::MatrixChain => {
            evolve_with_projector(h, psi0, &Projector::rank_one(psi0), intervals)
        }
    }
}

fn evolve_product(h: &Hamiltonian, psi0: &PureState, intervals: &[f64]) -> Result<SequenceResult> {
    let kernel = SurvivalKernel::new(h, psi0)?;
    let mut factors = Vec::with_capacity(intervals.len());
    let mut survival = 1.0;
    let mut log_survival = 0.0;
    let mut total_time = 0.0;
    for &mu in intervals {
        let q = kernel.q(mu)?;
        survival *= q;
        log_survival += kernel.log_q(mu)?;
        total_time += mu;
        factors.push(q);
    }
    Ok(SequenceResult {
        survival,
        log_survival,
        total_time,
        final_state: psi0.clone(),
        factors,
        underflowed: survival < UNDERFLOW_THRESHOLD,
    })
}

/// Trace formula `Tr[K rho0 K^H]` with `K = (P U_m) ... (P U_1)`, for any
/// projector whose range contains `psi0`. The chain is renormalized after
/// every step and the scale accumulated in the log domain.
pub fn evolve_with_projector(
    h: &Hamiltonian,
    psi0: &PureState,
    projector: &Projector,
    intervals: &[f64],
) -> Result<SequenceResult> {
    check_dims(h, psi0)?;
    if projector.matrix().dim() != h.dim() {
        return Err(ZenoError::DimensionMismatch {
            expected: h.dim(),
            actual: projector.matrix().dim(),
        });
    }
    let projected = projector.matrix().mul_vec(psi0.amplitudes());
    let leak: f64 = projected
        .iter()
        .zip(psi0.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if leak > 1e-10 {
        return Err(ZenoError::NotProjector {
            reason: format!("initial state lies outside the projected subspace (leak {leak:e})"),
        });
    }

    let p = projector.matrix();
    let rho0 = psi0.density_matrix();
    let mut chain = ComplexMatrix::identity(h.dim());
    let mut log_scale = 0.0;
    let mut log_prev = 0.0;
    let mut factors = Vec::with_capacity(intervals.len());
    let mut total_time = 0.0;
    let mut survival = 1.0;

    for &mu in intervals {
        let step = p * &h.propagator(mu)?;
        chain = &step * &chain;
        total_time += mu;
        let norm = chain.frobenius_norm();
        if norm == 0.0 {
            factors.push(0.0);
            return Ok(SequenceResult {
                survival: 0.0,
                log_survival: f64::NEG_INFINITY,
                total_time: total_time + intervals[factors.len()..].iter().sum::<f64>(),
                final_state: psi0.clone(),
                factors,
                underflowed: true,
            });
        }
        chain = chain.scale(Complex64::new(1.0 / norm, 0.0));
        log_scale += norm.ln();

        let w = &(&chain * &rho0) * &chain.dagger();
        let log_tr = w.trace().re.ln() + 2.0 * log_scale;
        let factor = (log_tr - log_prev).exp();
        factors.push(factor);
        survival *= factor;
        log_prev = log_tr;
    }

    let final_state = PureState::normalized(chain.mul_vec(psi0.amplitudes()))?;
    Ok(SequenceResult {
        survival: log_prev.exp(),
        log_survival: log_prev,
        total_time,
        final_state,
        factors,
        underflowed: survival < UNDERFLOW_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rabi(omega: f64) -> Hamiltonian {
        Hamiltonian::chain(&[0.0, 0.0], omega).unwrap()
    }

    #[test]
    fn single_level_chain() {
        let h = Hamiltonian::chain(&[4.2], 99.0).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.matrix()[(0, 0)].re, 4.2);
    }

    #[test]
    fn empty_chain_rejected() {
        assert_eq!(
            Hamiltonian::chain(&[], 1.0).unwrap_err(),
            ZenoError::EmptySpectrum
        );
    }

    #[test]
    fn reference_chain_entries() {
        let h = Hamiltonian::reference_chain();
        let m = h.matrix();
        let tau = std::f64::consts::TAU;
        assert_eq!(m[(0, 0)].re, tau * 30e3);
        assert_eq!(m[(1, 1)].re, tau * 20e3);
        assert_eq!(m[(2, 2)].re, tau * 10e3);
        assert_eq!(m[(0, 1)].re, tau * 100e3);
        assert_eq!(m[(1, 2)].re, tau * 100e3);
        assert_eq!(m[(0, 2)].norm(), 0.0);
    }

    #[test]
    fn symmetric_two_level_spectrum() {
        let h = rabi(3.0);
        let ev = &h.spectrum().eigenvalues;
        assert!((ev[0] + 3.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn initial_states() {
        let psi = PureState::entangled_default();
        assert_eq!(psi.amplitudes()[0].re, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(psi.amplitudes()[1].norm(), 0.0);
        assert_eq!(psi.amplitudes()[2].re, std::f64::consts::FRAC_1_SQRT_2);

        let sep = PureState::edge_superposition(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .unwrap();
        assert_eq!(sep, PureState::basis(3, 0));

        let s = PureState::edge_superposition(Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0))
            .unwrap();
        assert_eq!(s.amplitudes()[0].re, 0.6);
        assert_eq!(s.amplitudes()[2].re, 0.8);

        assert!(matches!(
            PureState::edge_superposition(Complex64::new(0.6, 0.0), Complex64::new(0.7, 0.0)),
            Err(ZenoError::NotNormalized { .. })
        ));
    }

    #[test]
    fn q_at_zero_is_one() {
        let h = Hamiltonian::reference_chain();
        let psi = PureState::entangled_default();
        assert_eq!(survival_factor(&h, &psi, 0.0).unwrap(), 1.0);
        assert_eq!(delta_of_mu(&h, &psi, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rabi_survival_factor() {
        let omega = 1.7;
        let h = rabi(omega);
        let psi = PureState::basis(2, 0);
        for i in 0..50 {
            let mu = 0.05 * i as f64;
            let q = survival_factor(&h, &psi, mu).unwrap();
            assert!((q - (omega * mu).cos().powi(2)).abs() < 1e-13);
            let d = delta_of_mu(&h, &psi, mu).unwrap();
            assert!((d - (omega * mu).sin().powi(2)).abs() < 1e-13);
        }
    }

    #[test]
    fn rabi_zeno_time() {
        let h = rabi(2.0);
        let tau = zeno_time(&h, &PureState::basis(2, 0)).unwrap();
        assert!((tau - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_has_zero_variance() {
        let h = Hamiltonian::reference_chain();
        let v = PureState::new(h.spectrum().eigenvector(1)).unwrap();
        assert_eq!(zeno_time(&h, &v).unwrap_err(), ZenoError::ZeroVariance);
    }

    #[test]
    fn dimension_mismatch() {
        let h = rabi(1.0);
        let psi = PureState::entangled_default();
        assert!(matches!(
            survival_factor(&h, &psi, 0.1),
            Err(ZenoError::DimensionMismatch {
                expected: 2,
                actual: 3
            })
        ));
        assert!(evolve_sequence(&h, &psi, &[0.1]).is_err());
    }

    #[test]
    fn zero_intervals_survive() {
        let h = Hamiltonian::reference_chain();
        let psi = PureState::entangled_default();
        let r = evolve_sequence(&h, &psi, &[0.0; 5]).unwrap();
        assert_eq!(r.survival, 1.0);
        assert_eq!(r.total_time, 0.0);
        assert_eq!(r.log_survival, 0.0);
    }

    #[test]
    fn negative_or_empty_sequences() {
        let h = rabi(1.0);
        let psi = PureState::basis(2, 0);
        assert!(evolve_sequence(&h, &psi, &[]).is_err());
        assert!(evolve_sequence(&h, &psi, &[0.1, -0.1]).is_err());
    }

    #[test]
    fn rabi_two_measurements() {
        let omega = 1.3;
        let mu = 0.4;
        let h = rabi(omega);
        let psi = PureState::basis(2, 0);
        for path in [EvolutionPath::Product, EvolutionPath::MatrixChain] {
            let r = evolve_sequence_with(&h, &psi, &[mu, mu], path).unwrap();
            let expected = (omega * mu).cos().powi(4);
            assert!((r.survival - expected).abs() < 1e-14, "{path:?}");
        }
    }

    #[test]
    fn long_sequences_stay_in_log_domain() {
        let h = rabi(1.0);
        let psi = PureState::basis(2, 0);
        let intervals = vec![1.0; 2000];
        let expected = 2000.0 * 1f64.cos().powi(2).ln();
        let prod = evolve_sequence(&h, &psi, &intervals).unwrap();
        assert!(prod.underflowed);
        assert!(((prod.log_survival - expected) / expected).abs() < 1e-12);
        let chain = evolve_sequence_with(&h, &psi, &intervals, EvolutionPath::MatrixChain).unwrap();
        assert!(((chain.log_survival - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn projector_validation() {
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(Projector::from_matrix(bad).is_err());
        let two = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let p = Projector::from_matrix(two).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(
            Projector::rank_one(&PureState::entangled_default()).rank(),
            1
        );
    }

    #[test]
    fn state_outside_projector_rejected() {
        let h = Hamiltonian::reference_chain();
        let p = Projector::rank_one(&PureState::basis(3, 1));
        let res = evolve_with_projector(&h, &PureState::entangled_default(), &p, &[1e-9]);
        assert!(matches!(res, Err(ZenoError::NotProjector { .. })));
    }

    #[test]
    fn small_mu_law_converges_monotonically() {
        let h = Hamiltonian::reference_chain();
        let psi = PureState::entangled_default();
        let tau = zeno_time(&h, &psi).unwrap();
        let omega = std::f64::consts::TAU * reference::COUPLING_HZ;
        let errs: Vec<f64> = (4..=10)
            .map(|k| {
                let mu = 2f64.powi(-k) / omega;
                (delta_of_mu(&h, &psi, mu).unwrap() * tau * tau / (mu * mu) - 1.0).abs()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[errs.len() - 1] < 1e-4);
    }

    proptest! {
        #[test]
        fn q_stays_in_unit_interval(x in 0.0f64..10.0) {
            let h = Hamiltonian::reference_chain();
            let psi = PureState::entangled_default();
            let omega = std::f64::consts::TAU * reference::COUPLING_HZ;
            let q = survival_factor(&h, &psi, x / omega).unwrap();
            prop_assert!((0.0..=1.0).contains(&q));
        }

        #[test]
        fn product_is_permutation_invariant(
            raw in prop::collection::vec(0.0f64..1e-6, 1..40),
            seed in any::<u64>(),
        ) {
            let h = Hamiltonian::reference_chain();
            let psi = PureState::entangled_default();
            let a = evolve_sequence(&h, &psi, &raw).unwrap();
            let mut shuffled = raw.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let b = evolve_sequence(&h, &psi, &shuffled).unwrap();
            prop_assert!(((a.survival - b.survival) / a.survival).abs() <= 1e-12);
        }

        #[test]
        fn chain_final_state_matches_initial_up_to_phase(raw in prop::collection::vec(1e-9f64..5e-6, 1..20)) {
            let h = Hamiltonian::reference_chain();
            let psi = PureState::entangled_default();
            let r = evolve_sequence_with(&h, &psi, &raw, EvolutionPath::MatrixChain).unwrap();
            prop_assert!((psi.inner(&r.final_state).norm() - 1.0).abs() <= 1e-10);
            let prod: f64 = r.factors.iter().product();
            prop_assert!(((prod - r.survival) / r.survival).abs() <= 1e-10);
        }
    }
}
