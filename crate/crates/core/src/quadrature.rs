//! Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, ZenoError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    // segments that can no longer be bisected in f64 are retired with their error
    let mut retired_value = 0.0;
    let mut retired_error = 0.0;
    let mut total_value = value;
    let mut total_error = error;
    let mut subdivisions = 0;

    loop {
        if !total_value.is_finite() || !total_error.is_finite() {
            return Err(ZenoError::QuadratureNoConvergence {
                estimate: total_value,
                error: total_error,
                subdivisions,
            });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= target {
            total_value = retired_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_error = retired_error + heap.iter().map(|s| s.error).sum::<f64>();
            if total_error <= cfg.abs_tol.max(cfg.rel_tol * total_value.abs()) {
                break;
            }
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            return Err(ZenoError::QuadratureNoConvergence {
                estimate: total_value,
                error: total_error,
                subdivisions,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            retired_value += worst.value;
            retired_error += worst.error;
            continue;
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        subdivisions += 1;
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });

        if subdivisions % 128 == 0 {
            // periodic re-sum so the running totals do not drift
            total_value = retired_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_error = retired_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }

    total_value = retired_value + heap.iter().map(|s| s.value).sum::<f64>();
    total_error = retired_error + heap.iter().map(|s| s.error).sum::<f64>();
    let target = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
    if total_error > target {
        return Err(ZenoError::QuadratureNoConvergence {
            estimate: total_value,
            error: total_error,
            subdivisions,
        });
    }
    Ok(QuadResult {
        value: total_value,
        error: total_error,
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x| (50.0 * x).cos(), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 50f64.sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn reports_failure() {
        let cfg = QuadConfig {
            max_subdivisions: 3,
            ..Default::default()
        };
        assert!(matches!(
            integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &cfg),
            Err(ZenoError::QuadratureNoConvergence { .. })
        ));
    }
}
