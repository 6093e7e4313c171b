//! Stochastic quantum Zeno dynamics: survival of a pure state under
//! projective measurements separated by random waiting times, with
//! large-deviation statistics of the survival probability and seeded
//! Monte Carlo ensembles.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod intervals;
pub mod ld;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod units;

pub use dynamics::{
    energy_variance, evolve_sequence, evolve_sequence_with, survival_factor, zeno_time,
    EvolutionPath, Hamiltonian, Projector, PureState, SequenceResult, SurvivalKernel,
};
pub use ensemble::{
    empirical_rate, ensemble_summary, run_ensemble, EmpiricalRate, EnsembleConfig, EnsembleMode,
    EnsembleSummary, SurvivalEnsemble, SurvivalRecord,
};
pub use error::{Result, ZenoError};
pub use intervals::{
    DegenerateInterval, DiscreteIntervals, DistributionSpec, IntervalDistribution,
    PowerLawIntervals,
};
pub use ld::{LdProblem, RateCurve, SurvivalEstimates};
pub use linalg::{ComplexMatrix, SpectralDecomposition};
pub use num_complex::Complex64;
pub use quadrature::QuadConfig;
pub use rng::DrawStream;
