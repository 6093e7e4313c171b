//! Independent oracles for the spectral machinery: a double-double Taylor
//! series for the propagator, closed-form cubic roots for the 3x3 spectrum
//! and the analytic two-level Rabi problem.

use std::f64::consts::PI;

use num_complex::Complex64;
use twofloat::TwoFloat;
use zeno_core::dynamics::{energy_variance, survival_factor, zeno_time};
use zeno_core::linalg::hermitian_eig;
use zeno_core::{ComplexMatrix, DrawStream, Hamiltonian, PureState};

#[derive(Clone, Copy)]
struct DdComplex {
    re: TwoFloat,
    im: TwoFloat,
}

impl DdComplex {
    fn zero() -> Self {
        Self {
            re: TwoFloat::from(0.0),
            im: TwoFloat::from(0.0),
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }
}

/// `exp(-i H mu)` by 40 Taylor terms in double-double arithmetic.
fn taylor_propagator(h: &ComplexMatrix, mu: f64) -> Vec<Complex64> {
    let n = h.dim();
    let mu = TwoFloat::from(mu);
    // A = -i H mu, entrywise
    let a: Vec<DdComplex> = h
        .as_slice()
        .iter()
        .map(|z| DdComplex {
            re: TwoFloat::from(z.im) * mu,
            im: -(TwoFloat::from(z.re) * mu),
        })
        .collect();
    let mut term: Vec<DdComplex> = (0..n * n)
        .map(|k| {
            if k / n == k % n {
                DdComplex {
                    re: TwoFloat::from(1.0),
                    im: TwoFloat::from(0.0),
                }
            } else {
                DdComplex::zero()
            }
        })
        .collect();
    let mut sum = term.clone();
    for k in 1..=40 {
        let mut next = vec![DdComplex::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = DdComplex::zero();
                for l in 0..n {
                    acc = acc.add(term[i * n + l].mul(a[l * n + j]));
                }
                let inv = TwoFloat::from(1.0) / TwoFloat::from(k as f64);
                next[i * n + j] = DdComplex {
                    re: acc.re * inv,
                    im: acc.im * inv,
                };
            }
        }
        term = next;
        for (s, t) in sum.iter_mut().zip(&term) {
            *s = s.add(*t);
        }
    }
    sum.into_iter().map(DdComplex::to_c64).collect()
}

#[test]
fn propagator_matches_taylor_series() {
    let h = Hamiltonian::reference_chain();
    let mut stream = DrawStream::new(2024, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let mu = 10e-9 * stream.uniform_open_closed();
        let u = h.propagator(mu).unwrap();
        let oracle = taylor_propagator(h.matrix(), mu);
        for (x, y) in u.as_slice().iter().zip(&oracle) {
            worst = worst.max((x - y).norm());
        }
    }
    assert!(worst <= 1e-12, "max entrywise deviation {worst:e}");
}

#[test]
fn propagator_matches_taylor_at_longer_times() {
    // |H mu| ~ 2 at 2 us; 40 terms still converge far below 1e-12
    let h = Hamiltonian::reference_chain();
    for mu in [1e-7, 5e-7, 2e-6] {
        let u = h.propagator(mu).unwrap();
        let oracle = taylor_propagator(h.matrix(), mu);
        for (x, y) in u.as_slice().iter().zip(&oracle) {
            assert!((x - y).norm() <= 1e-12, "mu = {mu:e}");
        }
    }
}

/// Eigenvalues of a real symmetric 3x3 matrix by the trigonometric formula.
fn symmetric_cubic_roots(a: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

#[test]
fn reference_spectrum_matches_cubic_roots() {
    let h = Hamiltonian::reference_chain();
    let mut a = [[0.0; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = h.matrix()[(i, j)].re;
        }
    }
    let roots = symmetric_cubic_roots(a);
    let scale = h.matrix().frobenius_norm();
    for (x, y) in h.spectrum().eigenvalues.iter().zip(&roots) {
        assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
    }
    // equally spaced levels put the middle eigenvalue on the middle level
    assert!((h.spectrum().eigenvalues[1] - 2.0 * PI * 20e3).abs() <= 1e-12 * scale);
}

#[test]
fn random_symmetric_matrices_match_cubic_roots() {
    let mut s = DrawStream::new(5, 5);
    for _ in 0..50 {
        let mut v = || 2.0 * s.uniform_open_closed() - 1.0;
        let (d0, d1, d2, o01, o02, o12) = (v(), v(), v(), v(), v(), v());
        let a = [[d0, o01, o02], [o01, d1, o12], [o02, o12, d2]];
        let m = ComplexMatrix::from_real_rows(&[
            vec![d0, o01, o02],
            vec![o01, d1, o12],
            vec![o02, o12, d2],
        ])
        .unwrap();
        let eig = hermitian_eig(&m, 1e-12).unwrap();
        for (x, y) in eig.eigenvalues.iter().zip(symmetric_cubic_roots(a)) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
    }
}

fn two_level(omega: f64) -> Hamiltonian {
    let m = ComplexMatrix::from_real_rows(&[vec![0.0, omega], vec![omega, 0.0]]).unwrap();
    Hamiltonian::new(m).unwrap()
}

#[test]
fn rabi_survival_factor() {
    let omega = 2.0 * PI * 100e3;
    let h = two_level(omega);
    let psi = PureState::basis(2, 0);
    for k in 0..100 {
        let mu = k as f64 * 5e-8;
        let q = survival_factor(&h, &psi, mu).unwrap();
        let exact = (omega * mu).cos().powi(2);
        assert!((q - exact).abs() <= 1e-12, "mu = {mu:e}: {q} vs {exact}");
    }
    let tz = zeno_time(&h, &psi).unwrap();
    assert!((tz * omega - 1.0).abs() <= 1e-12);
}

#[test]
fn detuned_rabi_survival_factor() {
    // H = [[D, g], [g, -D]]: q = 1 - (g/W)^2 sin^2(W mu), W = sqrt(D^2 + g^2)
    let (d, g) = (3.0e5, 4.0e5);
    let m = ComplexMatrix::from_real_rows(&[vec![d, g], vec![g, -d]]).unwrap();
    let h = Hamiltonian::new(m).unwrap();
    let psi = PureState::basis(2, 0);
    let w = (d * d + g * g).sqrt();
    for k in 0..60 {
        let mu = k as f64 * 1e-7;
        let exact = 1.0 - (g / w).powi(2) * (w * mu).sin().powi(2);
        assert!((survival_factor(&h, &psi, mu).unwrap() - exact).abs() <= 1e-12);
    }
    assert!((energy_variance(&h, &psi).unwrap() - g * g).abs() <= 1e-12 * g * g);
}
