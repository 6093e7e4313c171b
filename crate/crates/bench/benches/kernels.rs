use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zeno_core::ld::{cramer_rate, rate_function_i, survival_estimates_continuous};
use zeno_core::{
    run_ensemble, DiscreteIntervals, EnsembleConfig, EnsembleMode, Hamiltonian,
    IntervalDistribution, LdProblem, PureState, QuadConfig, SurvivalKernel,
};

const NS: f64 = 1e-9;

fn bernoulli() -> DiscreteIntervals {
    DiscreteIntervals::new(vec![NS, 3.0 * NS], vec![0.3, 0.7]).unwrap()
}

fn dynamics(c: &mut Criterion) {
    let h = Hamiltonian::reference_chain();
    let psi = PureState::entangled_default();
    let k = SurvivalKernel::new(&h, &psi).unwrap();
    c.bench_function("propagator", |b| {
        b.iter(|| h.propagator(black_box(2.0 * NS)).unwrap())
    });
    c.bench_function("log_q", |b| {
        b.iter(|| k.log_q(black_box(2.0 * NS)).unwrap())
    });
}

fn rates(c: &mut Criterion) {
    let h = Hamiltonian::reference_chain();
    let psi = PureState::entangled_default();
    let k = SurvivalKernel::new(&h, &psi).unwrap();
    let p = LdProblem::from_kernel(&k, &bernoulli(), 100).unwrap();
    let (lo, hi) = p.range();
    let x = lo + 0.37 * (hi - lo);
    c.bench_function("rate_closed_form", |b| {
        b.iter(|| rate_function_i(&p, black_box(x)).unwrap())
    });
    c.bench_function("rate_tilted", |b| {
        b.iter(|| cramer_rate(&p, black_box(x)).unwrap())
    });
    let pl = IntervalDistribution::power_law(NS, 3.0).unwrap();
    c.bench_function("power_law_estimates", |b| {
        b.iter(|| survival_estimates_continuous(&k, &pl, 100, &QuadConfig::default()).unwrap())
    });
}

fn ensemble(c: &mut Criterion) {
    let cfg = EnsembleConfig::new(
        EnsembleMode::FixedM(2000),
        100,
        1,
        bernoulli().into(),
        Hamiltonian::reference_chain(),
        PureState::entangled_default(),
    );
    c.bench_function("ensemble_m2000_n100", |b| {
        b.iter(|| run_ensemble(&cfg).unwrap())
    });
}

criterion_group!(benches, dynamics, rates, ensemble);
criterion_main!(benches);
