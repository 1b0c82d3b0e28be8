//! Globally adaptive Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 16-point rule and with the same rule on its
//! two halves; the difference is the panel error estimate. The panel with the
//! largest estimate is bisected until the total meets the tolerance.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const GAUSS_LEGENDRE_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-10), rel_tol: T::lit(1e-10), max_subdivisions: 64 }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || !(self.rel_tol > T::zero()) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub subdivisions: usize,
}

/// Nodes and weights on [−1, 1], computed once by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre_f64() -> &'static ([f64; GAUSS_LEGENDRE_ORDER], [f64; GAUSS_LEGENDRE_ORDER]) {
    static RULE: OnceLock<([f64; GAUSS_LEGENDRE_ORDER], [f64; GAUSS_LEGENDRE_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_LEGENDRE_ORDER;
        let mut nodes = [0.0; GAUSS_LEGENDRE_ORDER];
        let mut weights = [0.0; GAUSS_LEGENDRE_ORDER];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}

/// Fixed 16-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> T {
    let (nodes, weights) = gauss_legendre_f64();
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = T::zero();
    for (x, w) in nodes.iter().zip(weights) {
        acc += T::lit(*w) * f(mid + half * T::lit(*x));
    }
    acc * half
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    left: T,
    right: T,
}

fn make_panel<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T, coarse: T) -> Panel<T> {
    let mid = (a + b) * T::lit(0.5);
    let left = gauss_legendre(f, a, mid);
    let right = gauss_legendre(f, mid, b);
    let value = left + right;
    Panel { a, b, value, error: (value - coarse).abs(), left, right }
}

/// Integrates `f` over `[a, b]` (either orientation), starting from
/// `initial_panels` equal panels.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    config: &QuadratureConfig<T>,
    initial_panels: usize,
) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral { value: T::zero(), error: T::zero(), subdivisions: 0 });
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / T::from_usize_lossy(n0);
    let mut panels: Vec<Panel<T>> = (0..n0)
        .map(|i| {
            let pa = a + width * T::from_usize_lossy(i);
            let pb = if i + 1 == n0 { b } else { pa + width };
            let coarse = gauss_legendre(&mut f, pa, pb);
            make_panel(&mut f, pa, pb, coarse)
        })
        .collect();
    let mut subdivisions = 0;
    loop {
        let total: T = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
        let err: T = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
        let tol = config.abs_tol.max(config.rel_tol * total.abs());
        if err <= tol {
            return Ok(Integral { value: total, error: err, subdivisions });
        }
        if subdivisions >= config.max_subdivisions {
            return Err(Error::QuadratureFailure { subdivisions, estimate: err.to_f64_lossy() });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * T::lit(0.5);
        panels.push(make_panel(&mut f, p.a, mid, p.left));
        panels.push(make_panel(&mut f, mid, p.b, p.right));
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_high_degree_polynomials_exactly() {
        // 16 points are exact through degree 31.
        let mut f = |x: f64| x.powi(30) + 3.0 * x.powi(7) - 1.0;
        let v = gauss_legendre(&mut f, -1.0, 1.0);
        assert!((v - (2.0 / 31.0 - 2.0)).abs() < 1e-14);
        let (_, w) = gauss_legendre_f64();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillatory_integrand() {
        let cfg = QuadratureConfig::<f64>::default();
        let r = integrate(|x: f64| (20.0 * x).sin() * x.exp(), 0.0, 3.0, &cfg, 1).unwrap();
        // ∫ e^x sin(20x) = e^x (sin 20x − 20 cos 20x)/401
        let prim = |x: f64| x.exp() * ((20.0 * x).sin() - 20.0 * (20.0 * x).cos()) / 401.0;
        assert!((r.value - (prim(3.0) - prim(0.0))).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let cfg = QuadratureConfig::<f64>::default();
        let fwd = integrate(|x: f64| x.cos(), 0.0, 2.0, &cfg, 1).unwrap().value;
        let rev = integrate(|x: f64| x.cos(), 2.0, 0.0, &cfg, 1).unwrap().value;
        assert!((fwd + rev).abs() < 1e-14);
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, &cfg, 1).unwrap().value, 0.0);
    }

    #[test]
    fn exhausted_budget_reports_failure() {
        let cfg = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-14, max_subdivisions: 2 };
        let r = integrate(|x: f64| (200.0 * x).sin() / (1e-3 + x), 0.0, 10.0, &cfg, 1);
        assert!(matches!(r, Err(Error::QuadratureFailure { subdivisions: 2, .. })));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::<f64>::default().validate().is_ok());
        let bad = QuadratureConfig { abs_tol: 0.0, rel_tol: 1e-10, max_subdivisions: 4 };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { abs_tol: 1e-3, rel_tol: 1e-10, max_subdivisions: 0 };
        assert!(bad.validate().is_err());
    }
}
