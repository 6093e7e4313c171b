#![allow(dead_code)]

use zeno_core::{DiscreteIntervals, Hamiltonian, PureState, SurvivalKernel};

pub const NS: f64 = 1e-9;

pub fn system() -> (Hamiltonian, PureState) {
    (
        Hamiltonian::reference_chain(),
        PureState::entangled_default(),
    )
}

pub fn kernel() -> SurvivalKernel {
    let (h, psi) = system();
    SurvivalKernel::new(&h, &psi).unwrap()
}

/// Bernoulli waiting-time laws used for the m-sweeps, d = 2, 3, 4.
pub fn bernoulli(d: usize) -> DiscreteIntervals {
    let (values, probs) = match d {
        2 => (vec![1.0, 3.0], vec![0.3, 0.7]),
        3 => (vec![1.0, 3.0, 2.0], vec![0.3, 0.2, 0.5]),
        4 => (vec![1.0, 3.0, 2.0, 0.5], vec![0.3, 0.2, 0.05, 0.45]),
        _ => panic!("no parameter set for d = {d}"),
    };
    DiscreteIntervals::new(values.into_iter().map(|v| v * NS).collect(), probs).unwrap()
}
