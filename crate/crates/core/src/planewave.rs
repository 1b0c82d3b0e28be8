//! Plane-wave solutions `φ(x,t) = a(t)·k(t)·e^{2πi k(t)·x}` with
//! `a′ = m(k)·a` and `k′ = −Fᵀk`, and the plane-wave stability verdict.
//!
//! Everything here is written against [`LinearModel`], so the same code serves
//! LSG (`F = S`) and LQG (`F = M`).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RegimeLabel, SpectrumKind};
use crate::io::format_real;
use crate::linalg::Vec3;
use crate::model::{LinearModel, ModeTrajectory};
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::symbols::{initial_panels, SymbolEvaluator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave<T> {
    a0: T,
    k0: Vec3<T>,
}

impl<T: Real> PlaneWave<T> {
    pub fn new(a0: T, k0: Vec3<T>) -> Result<Self> {
        if !a0.is_finite() || a0 == T::zero() {
            return Err(Error::InvalidArgument("plane-wave amplitude must be finite and nonzero".into()));
        }
        if !k0.is_finite() || k0.is_zero() {
            return Err(Error::InvalidArgument("plane-wave frequency must be finite and nonzero".into()));
        }
        Ok(Self { a0, k0 })
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    pub fn k0(&self) -> Vec3<T> {
        self.k0
    }

    pub fn initial_state(&self) -> PlaneWaveState<T> {
        PlaneWaveState::new(T::zero(), self.a0, self.k0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveState<T> {
    pub t: T,
    pub a_t: T,
    pub k_t: Vec3<T>,
    /// `|a_t|·‖k_t‖`.
    pub sup_norm: T,
}

impl<T: Real> PlaneWaveState<T> {
    pub fn new(t: T, a_t: T, k_t: Vec3<T>) -> Self {
        Self { t, a_t, k_t, sup_norm: a_t.abs() * k_t.norm() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    StablePlaneWave,
    UnstablePlaneWave,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict<T> {
    pub verdict: Verdict,
    /// Exponentially growing plane wave (unstable case only).
    pub witness: Option<PlaneWave<T>>,
    /// Exponential rate of `sup_norm` along the witness; 0 when stable.
    pub growth_rate: T,
    /// Uniform bound on `sup_norm / |a0|` for unit `k0` when stable; `+∞`
    /// when unstable.
    pub bound: T,
}

/// `(a(t), k(t))` with `a(t) = a0·M̃(t;k0)` and `k(t) = e^{−tFᵀ}k0`.
pub fn evolve<T: Real>(ev: &SymbolEvaluator<'_, T>, pw: &PlaneWave<T>, t: T) -> Result<PlaneWaveState<T>> {
    let a_t = pw.a0 * ev.multiplier_m_tilde(t, pw.k0)?;
    Ok(PlaneWaveState::new(t, a_t, ev.frequency(t, pw.k0)))
}

/// States at each of `times` (any order). The log-amplitude is accumulated
/// interval by interval in ascending time, so long horizons cost one pass.
pub fn evolve_trajectory<T: Real>(
    ev: &SymbolEvaluator<'_, T>,
    pw: &PlaneWave<T>,
    times: &[T],
) -> Result<Vec<PlaneWaveState<T>>> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].partial_cmp(&times[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = vec![pw.initial_state(); times.len()];
    // Walk outward from t = 0 in both directions.
    let split = order.partition_point(|&i| times[i] < T::zero());
    let mut sweep = |idx: &mut dyn Iterator<Item = &usize>| -> Result<()> {
        let (mut prev, mut log_a) = (T::zero(), T::zero());
        for &i in idx {
            let t = times[i];
            if !t.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite time {t}")));
            }
            log_a += ev.m_tilde_integral_between(prev, t, pw.k0)?;
            prev = t;
            out[i] = PlaneWaveState::new(t, pw.a0 * log_a.exp(), ev.frequency(t, pw.k0));
        }
        Ok(())
    };
    sweep(&mut order[split..].iter())?;
    sweep(&mut order[..split].iter().rev())?;
    Ok(out)
}

/// Classical RK4 on `a′ = m(k)a`, `k′ = −Fᵀk` with step at most `h`; the
/// independent check of [`evolve`].
pub fn evolve_rk4<T: Real>(model: &LinearModel<T>, pw: &PlaneWave<T>, t: T, h: T) -> Result<PlaneWaveState<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("RK4 step must be positive".into()));
    }
    let steps = (t.abs() / h).ceil().to_usize().unwrap_or(0).max(1);
    let dt = t / T::from_usize_lossy(steps);
    let ft = model.flow().matrix().transpose();
    let rhs = |a: T, k: Vec3<T>| (model.symbol(k) * a, -ft.mul_vec(k));
    let (mut a, mut k) = (pw.a0, pw.k0);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    for _ in 0..steps {
        let (a1, k1) = rhs(a, k);
        let (a2, k2) = rhs(a + a1 * dt * half, k + k1.scale(dt * half));
        let (a3, k3) = rhs(a + a2 * dt * half, k + k2.scale(dt * half));
        let (a4, k4) = rhs(a + a3 * dt, k + k3.scale(dt));
        a += dt * sixth * (a1 + T::lit(2.0) * (a2 + a3) + a4);
        k += (k1 + (k2 + k3).scale(T::lit(2.0)) + k4).scale(dt * sixth);
    }
    Ok(PlaneWaveState::new(t, a, k))
}

/// `∫₀^τ m(e^{−rFᵀ}k0) dr` over one period `τ = 2π/λ` of an elliptic flow.
pub fn period_integral<T: Real>(ev: &SymbolEvaluator<'_, T>, k0: Vec3<T>) -> Result<T> {
    let flow = ev.model().flow();
    let Some(tau) = flow.period() else {
        return Err(Error::NotElliptic { mu: ev.model().mu().to_f64_lossy() });
    };
    if ev.model().degenerate_multiplier() || k0.is_zero() {
        return Ok(T::zero());
    }
    let traj = ModeTrajectory::new(ev.model(), k0);
    // A single period needs only a few panels; start with eight for safety.
    let panels = initial_panels(ev.model(), tau).max(8);
    let r = integrate(
        |r: T| {
            let (al, be) = flow.exp_coefficients(-r);
            traj.symbol_at(al, be)
        },
        T::zero(),
        tau,
        ev.quadrature(),
        panels,
    )?;
    Ok(r.value)
}

/// `max_{r∈[0,τ]} ‖e^{−rFᵀ}k0‖` for an elliptic flow.
///
/// `‖k(r)‖²` is a trigonometric polynomial of degree 2 in `λr`; it is
/// sampled densely and each local maximum polished by golden-section search.
pub fn max_frequency_norm_over_period<T: Real>(model: &LinearModel<T>, k0: Vec3<T>) -> Result<T> {
    let Some(tau) = model.flow().period() else {
        return Err(Error::NotElliptic { mu: model.mu().to_f64_lossy() });
    };
    let norm_at = |r: T| model.frequency(r, k0).norm();
    const SAMPLES: usize = 512;
    let h = tau / T::from_usize_lossy(SAMPLES);
    let vals: Vec<T> = (0..SAMPLES).map(|i| norm_at(h * T::from_usize_lossy(i))).collect();
    let mut best = vals.iter().copied().fold(T::zero(), T::max);
    for i in 0..SAMPLES {
        let (l, c, r) = (vals[(i + SAMPLES - 1) % SAMPLES], vals[i], vals[(i + 1) % SAMPLES]);
        if c >= l && c >= r {
            let center = h * T::from_usize_lossy(i);
            best = best.max(golden_max(&norm_at, center - h, center + h));
        }
    }
    Ok(best)
}

fn golden_max<T: Real, F: Fn(T) -> T>(f: &F, mut lo: T, mut hi: T) -> T {
    let g = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Elliptic sup-norm bound `max_{[0,τ]}‖k‖ · |a0| · e^{τ‖m‖_∞}`.
pub fn elliptic_bound<T: Real>(ev: &SymbolEvaluator<'_, T>, pw: &PlaneWave<T>) -> Result<T> {
    let tau = ev
        .model()
        .flow()
        .period()
        .ok_or_else(|| Error::NotElliptic { mu: ev.model().mu().to_f64_lossy() })?;
    let kmax = max_frequency_norm_over_period(ev.model(), pw.k0)?;
    Ok(kmax * pw.a0.abs() * (tau * ev.sup_bound()).exp())
}

/// Plane-wave stability of the model's steady state.
///
/// Hyperbolic flows are unstable: along an eigenvector `k±` of `Fᵀ` with
/// eigenvalue `±λ`, `sup_norm ∝ e^{(m(k±) ∓ λ)t}`, and the direction with the
/// larger rate is returned. Elliptic flows are stable, with the bound of
/// [`elliptic_bound`] for a unit wave; since `k(t)` is periodic and the
/// log-amplitude has zero mean over a period, the bound is `max ‖k‖ · e^{τ‖m‖_∞}`
/// maximised over unit `k0`, i.e. `‖e^{−rFᵀ}‖₂` maximised over the period.
pub fn classify_stability<T: Real>(ev: &SymbolEvaluator<'_, T>) -> Result<StabilityVerdict<T>> {
    let model = ev.model();
    match (model.label(), model.flow().kind()) {
        (RegimeLabel::HyperbolicPlus, SpectrumKind::Hyperbolic { lambda }) => {
            let mut best: Option<(T, Vec3<T>)> = None;
            for sign in [T::one(), -T::one()] {
                let Some(k) = model.flow().transpose_eigenvector(sign * lambda) else {
                    continue;
                };
                let rate = model.symbol(k) - sign * lambda;
                if best.is_none_or(|(r, _)| rate > r) {
                    best = Some((rate, k));
                }
            }
            let (rate, k) = best.ok_or_else(|| {
                Error::InvalidArgument("could not resolve an eigenvector of the transposed flow matrix".into())
            })?;
            Ok(StabilityVerdict {
                verdict: Verdict::UnstablePlaneWave,
                witness: Some(PlaneWave::new(T::one(), k)?),
                growth_rate: rate,
                bound: T::infinity(),
            })
        }
        (RegimeLabel::EllipticMinus, SpectrumKind::Elliptic { .. }) => {
            let tau = model.flow().period().expect("elliptic flow has a period");
            let norm_at = |r: T| model.flow().exp(-r).spectral_norm();
            const SAMPLES: usize = 256;
            let h = tau / T::from_usize_lossy(SAMPLES);
            let mut kmax = T::zero();
            for i in 0..SAMPLES {
                let c = h * T::from_usize_lossy(i);
                kmax = kmax.max(golden_max(&norm_at, c - h, c + h));
            }
            Ok(StabilityVerdict {
                verdict: Verdict::StablePlaneWave,
                witness: None,
                growth_rate: T::zero(),
                bound: kmax * (tau * ev.sup_bound()).exp(),
            })
        }
        _ => Err(Error::DegenerateFlow { mu: model.mu().to_f64_lossy(), eps: model.eps().to_f64_lossy() }),
    }
}

/// Empirical confirmation of a verdict over the scan horizon: 50 periods
/// (elliptic) or `[0, 10/λ]` (hyperbolic).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCheck<T> {
    pub horizon: T,
    /// `max sup_norm(t) / sup_norm(0)` over the horizon.
    pub max_ratio: T,
    /// Least-squares slope of `log sup_norm` against `t` (witness only).
    pub observed_rate: T,
    pub consistent: bool,
}

pub fn empirical_check<T: Real>(
    ev: &SymbolEvaluator<'_, T>,
    verdict: &StabilityVerdict<T>,
    probe: &PlaneWave<T>,
    samples: usize,
) -> Result<EmpiricalCheck<T>> {
    let model = ev.model();
    let samples = samples.max(2);
    let (pw, horizon) = match verdict.verdict {
        Verdict::UnstablePlaneWave => {
            let w = verdict.witness.unwrap_or(*probe);
            (w, T::lit(10.0) / model.flow().lambda())
        }
        Verdict::StablePlaneWave => (*probe, T::lit(50.0) * model.flow().period().unwrap_or(T::one())),
    };
    let times: Vec<T> = (0..samples)
        .map(|i| horizon * T::from_usize_lossy(i) / T::from_usize_lossy(samples - 1))
        .collect();
    let states = evolve_trajectory(ev, &pw, &times)?;
    let s0 = states[0].sup_norm;
    let max_ratio = states.iter().fold(T::zero(), |m, s| m.max(s.sup_norm / s0));
    let n = T::from_usize_lossy(samples);
    let (mut st, mut sy, mut stt, mut sty) = (T::zero(), T::zero(), T::zero(), T::zero());
    for s in &states {
        let y = s.sup_norm.ln();
        st += s.t;
        sy += y;
        stt += s.t * s.t;
        sty += s.t * y;
    }
    let observed_rate = (n * sty - st * sy) / (n * stt - st * st);
    let consistent = match verdict.verdict {
        Verdict::UnstablePlaneWave => {
            (observed_rate - verdict.growth_rate).abs() <= T::lit(1e-6) * verdict.growth_rate.max(T::one())
        }
        Verdict::StablePlaneWave => {
            let unit_bound = elliptic_bound(ev, &pw)? / s0;
            max_ratio <= unit_bound * (T::one() + T::lit(1e-12))
        }
    };
    Ok(EmpiricalCheck { horizon, max_ratio, observed_rate, consistent })
}

/// CSV with columns `t,a_t,k1,k2,k3,sup_norm`.
pub fn write_trajectory_csv<T: Real, W: Write>(mut w: W, states: &[PlaneWaveState<T>]) -> Result<()> {
    writeln!(w, "t,a_t,k1,k2,k3,sup_norm")?;
    for s in states {
        let k = s.k_t.0;
        let cols = [s.t, s.a_t, k[0], k[1], k[2], s.sup_norm].map(format_real);
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}
