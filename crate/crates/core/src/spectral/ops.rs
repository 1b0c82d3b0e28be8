//! Grid realisations of the generator `ℒ`, the solution operator
//! `G(t) = T₁T₂T₃` and its adjoint `F(t)`, plus the per-mode RK4 oracle.
//!
//! ```text
//! G(t)φ(x) = e^{−tFᵀ} Φ(e^{−tF}x),   Φ̂(ξ) = M̃(t;ξ) φ̂(ξ)
//! F(t)ψ(x) = e^{−tF}  Ψ(e^{+tF}x),   Ψ̂(ξ) = M̄(t;ξ) ψ̂(ξ)
//! ℒφ       = −(ū·∇)φ − Fᵀφ + m(D)φ,  ū(x) = Fx
//! ```
//!
//! Since `M̃(t; e^{tFᵀ}η) = M̄(t; η)`, the warp and the multiplier can be
//! swapped:
//!
//! ```text
//! G(t)φ = e^{−tFᵀ} · M̄(t;D)[φ∘e^{−tF}]
//! F(t)ψ = e^{−tF}  · M̃(t;D)[ψ∘e^{+tF}]
//! ```
//!
//! The grid operators use this order. `M̃` and `M̄` are discontinuous at
//! `ξ = 0`, so the multiplied field has algebraic tails; warping it about the
//! origin of a periodic box would fold those tails back in. Warping first
//! only ever moves the (localised) input.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::model::{LinearModel, ModeTrajectory};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;
use crate::symbols::{symbol_sup_bound, SymbolEvaluator};

use super::fft::Fft3;
use super::field::{czero, GridField, Rep};
use super::grid::GridSpec;
use super::warp::{pullback_flow, Interpolation};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverConfig<T> {
    pub interpolation: Interpolation,
    pub quadrature: QuadratureConfig<T>,
    /// Largest `|t|` accepted by a single apply.
    pub clamp_time: T,
    /// Largest `‖tF‖_F` per spectral-resample substep.
    pub max_substep: T,
    /// Fourier coefficients below this fraction of the largest one are
    /// ignored by the Nyquist clamp.
    pub significance: T,
}

impl<T: Real> Default for EvolverConfig<T> {
    fn default() -> Self {
        Self {
            interpolation: Interpolation::SpectralResample,
            quadrature: QuadratureConfig::default(),
            clamp_time: T::lit(10.0),
            max_substep: T::lit(0.5),
            significance: T::lit(1e-8),
        }
    }
}

impl<T: Real> EvolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if !(self.clamp_time > T::zero()) {
            return Err(Error::InvalidArgument("clamp_time must be positive".into()));
        }
        if !(self.max_substep > T::zero()) {
            return Err(Error::InvalidArgument("max_substep must be positive".into()));
        }
        if !(self.significance >= T::zero()) || self.significance >= T::one() {
            return Err(Error::InvalidArgument("significance must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Which grid operator a clamp check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// `G(t)`: frequencies move by `e^{−tFᵀ}`.
    Evolution,
    /// `F(t)`: frequencies move by `e^{+tFᵀ}`.
    Adjoint,
}

/// Which of the two symbol families a multiplier table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `M̃`, used by `G(t)`.
    Tilde,
    /// `M̄`, used by `F(t)`.
    Bar,
}

/// Grid evolution for one model on one grid.
pub struct Evolver<'m, T: Real> {
    model: &'m LinearModel<T>,
    spec: GridSpec<T>,
    config: EvolverConfig<T>,
    plan: Fft3<T>,
}

impl<'m, T: Real> Evolver<'m, T> {
    pub fn new(model: &'m LinearModel<T>, spec: GridSpec<T>, config: EvolverConfig<T>) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        Ok(Self { model, spec, config, plan: Fft3::new(spec.n) })
    }

    pub fn model(&self) -> &'m LinearModel<T> {
        self.model
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn config(&self) -> &EvolverConfig<T> {
        &self.config
    }

    pub fn plan(&self) -> &Fft3<T> {
        &self.plan
    }

    fn check_input(&self, field: &GridField<T>) -> Result<()> {
        field.expect_rep(Rep::Physical)?;
        if *field.spec() != self.spec {
            return Err(Error::InvalidGrid("field grid differs from the evolver grid".into()));
        }
        Ok(())
    }

    /// `ℒφ`.
    pub fn apply_l(&self, field: &GridField<T>) -> Result<GridField<T>> {
        self.check_input(field)?;
        let spec = self.spec;
        let n = spec.n;
        let f = self.model.flow().matrix();
        let ft = f.transpose();
        let fourier = field.to_fourier_with(&self.plan)?;
        let two_pi_i = Complex::new(T::zero(), T::two_pi());
        let symbols: Vec<T> = (0..spec.len()).map(|idx| self.model.symbol(spec.wavevector(idx))).collect();
        let mut out = GridField::zeros(spec, Rep::Physical);
        let velocity: Vec<Vec3<T>> = (0..spec.len()).map(|idx| f.mul_vec(spec.point(idx))).collect();
        for c in 0..3 {
            let hat = &fourier.components()[c];
            // m(D)φ_c
            let mut acc: Vec<Complex<T>> = hat.iter().zip(&symbols).map(|(v, m)| v * *m).collect();
            self.plan.inverse(&mut acc);
            for axis in 0..3 {
                let mut d = hat.clone();
                for (idx, v) in d.iter_mut().enumerate() {
                    let (i, j, l) = spec.unravel(idx);
                    let k = [i, j, l][axis];
                    *v = if k == n / 2 { czero() } else { *v * two_pi_i * spec.frequency(k) };
                }
                self.plan.inverse(&mut d);
                for idx in 0..spec.len() {
                    acc[idx] -= d[idx] * velocity[idx].0[axis];
                }
            }
            out.components_mut()[c] = acc;
        }
        // −Fᵀφ
        let mt = ft.0;
        for idx in 0..spec.len() {
            let v = field.value(idx);
            for (r, row) in mt.iter().enumerate() {
                out.components_mut()[r][idx] -= v[0] * row[0] + v[1] * row[1] + v[2] * row[2];
            }
        }
        Ok(out)
    }

    /// Per-mode `M̃(t;ξ)` or `M̄(t;ξ)`, exploiting evenness in `ξ`.
    pub fn multiplier_table(&self, t: T, family: Family) -> Result<Vec<T>> {
        let spec = self.spec;
        let mut table = vec![T::one(); spec.len()];
        if t == T::zero() || self.model.degenerate_multiplier() {
            return Ok(table);
        }
        let ev = SymbolEvaluator::new(self.model, self.config.quadrature);
        for idx in 0..spec.len() {
            let mirror = spec.mirror(idx);
            if mirror < idx {
                table[idx] = table[mirror];
                continue;
            }
            let xi = spec.wavevector(idx);
            table[idx] = match family {
                Family::Tilde => ev.multiplier_m_tilde(t, xi)?,
                Family::Bar => ev.multiplier_m_bar(t, xi)?,
            };
        }
        Ok(table)
    }

    /// `M̃(t;ξ)` or `M̄(t;ξ)` for every mode by classical RK4 on
    /// `y′ = m̃(r;ξ)y` (resp. `m̄`), `y(0) = 1`, with step at most `h`.
    pub fn oracle_multiplier_table(&self, t: T, h: T, family: Family) -> Result<Vec<T>> {
        if !(h > T::zero()) {
            return Err(Error::InvalidArgument("oracle step must be positive".into()));
        }
        let spec = self.spec;
        let mut table = vec![T::one(); spec.len()];
        if t == T::zero() {
            return Ok(table);
        }
        let steps = (t.abs() / h).ceil().to_usize().unwrap_or(1).max(1);
        let dt = t / T::from_usize_lossy(steps);
        let half = dt * T::lit(0.5);
        // (α, β) at every half step, shared by all modes.
        let sign = match family {
            Family::Tilde => -T::one(),
            Family::Bar => T::one(),
        };
        let coeffs: Vec<(T, T)> = (0..=2 * steps)
            .map(|i| self.model.flow().exp_coefficients(sign * half * T::from_usize_lossy(i)))
            .collect();
        let sixth = dt / T::lit(6.0);
        for idx in 0..spec.len() {
            let mirror = spec.mirror(idx);
            if mirror < idx {
                table[idx] = table[mirror];
                continue;
            }
            let traj = ModeTrajectory::new(self.model, spec.wavevector(idx));
            let mut y = T::one();
            let mut g0 = traj.symbol_at(coeffs[0].0, coeffs[0].1);
            for s in 0..steps {
                let (am, bm) = coeffs[2 * s + 1];
                let (a1, b1) = coeffs[2 * s + 2];
                let gm = traj.symbol_at(am, bm);
                let g1 = traj.symbol_at(a1, b1);
                let k1 = g0;
                let k2 = gm * (T::one() + half * k1);
                let k3 = gm * (T::one() + half * k2);
                let k4 = g1 * (T::one() + dt * k3);
                y *= T::one() + sixth * (k1 + T::lit(2.0) * (k2 + k3) + k4);
                g0 = g1;
            }
            table[idx] = y;
        }
        Ok(table)
    }

    fn check_time(&self, t: T, fourier: &GridField<T>, op: Operator) -> Result<()> {
        let max_frequency = self.evolved_max_frequency(t, fourier, op)?;
        let nyquist = self.spec.nyquist();
        let too_long = t.abs() > self.config.clamp_time || !t.is_finite();
        if too_long || max_frequency > nyquist * (T::one() + T::lit(1e-12)) {
            return Err(Error::TimeClamp {
                t: t.to_f64_lossy(),
                max_frequency: max_frequency.to_f64_lossy(),
                nyquist: nyquist.to_f64_lossy(),
                clamp: self.config.clamp_time.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Largest `‖·‖_∞` of the evolved frequency over significant modes.
    pub fn evolved_max_frequency(&self, t: T, fourier: &GridField<T>, op: Operator) -> Result<T> {
        fourier.expect_rep(Rep::Fourier)?;
        let spec = self.spec;
        let mag = |idx: usize| fourier.value(idx).iter().fold(T::zero(), |a, v| a + v.norm_sqr()).sqrt();
        let peak = (0..spec.len()).map(mag).fold(T::zero(), T::max);
        let threshold = peak * self.config.significance;
        let carry = match op {
            Operator::Evolution => self.model.flow().exp(-t).transpose(),
            Operator::Adjoint => self.model.flow().exp(t).transpose(),
        };
        let mut best = T::zero();
        for idx in 0..spec.len() {
            if mag(idx) > threshold {
                best = best.max(carry.mul_vec(spec.wavevector(idx)).max_abs());
            }
        }
        Ok(best)
    }

    /// `G(t)φ`.
    pub fn apply_g(&self, t: T, field: &GridField<T>) -> Result<GridField<T>> {
        self.evolve_with(t, field, Operator::Evolution, |ev| ev.multiplier_table(t, Family::Bar))
    }

    /// `F(t)ψ`, the adjoint of `G(t)`.
    pub fn apply_f(&self, t: T, field: &GridField<T>) -> Result<GridField<T>> {
        self.evolve_with(t, field, Operator::Adjoint, |ev| ev.multiplier_table(t, Family::Bar))
    }

    /// `G(t)φ` with the multiplier taken from the RK4 oracle.
    pub fn oracle_evolve(&self, t: T, field: &GridField<T>, h: T) -> Result<GridField<T>> {
        self.evolve_with(t, field, Operator::Evolution, |ev| ev.oracle_multiplier_table(t, h, Family::Bar))
    }

    fn evolve_with(
        &self,
        t: T,
        field: &GridField<T>,
        op: Operator,
        table: impl FnOnce(&Self) -> Result<Vec<T>>,
    ) -> Result<GridField<T>> {
        self.check_input(field)?;
        self.check_time(t, &field.to_fourier_with(&self.plan)?, op)?;
        if t == T::zero() {
            return Ok(field.clone());
        }
        let flow = self.model.flow();
        let (matrix, warp_time) = match op {
            Operator::Evolution => (flow.exp(-t).transpose(), -t),
            Operator::Adjoint => (flow.exp(-t), t),
        };
        if op == Operator::Adjoint {
            let mut fourier = field.to_fourier_with(&self.plan)?;
            self.apply_table(&mut fourier, &table(self)?);
            let p = fourier.to_physical_with(&self.plan)?.left_multiply(&matrix);
            return pullback_flow(&p, flow, warp_time, self.config.interpolation, self.config.max_substep, &self.plan);
        }
        let warped =
            pullback_flow(field, flow, warp_time, self.config.interpolation, self.config.max_substep, &self.plan)?;
        let mut fourier = warped.to_fourier_with(&self.plan)?;
        self.apply_table(&mut fourier, &table(self)?);
        Ok(fourier.to_physical_with(&self.plan)?.left_multiply(&matrix))
    }

    fn apply_table(&self, fourier: &mut GridField<T>, table: &[T]) {
        for c in fourier.components_mut().iter_mut() {
            for (v, m) in c.iter_mut().zip(table) {
                *v *= *m;
            }
        }
    }

    /// `e^{|t|(‖m‖_∞ + ‖F‖₂)}`, the a-priori bound on `‖G(t)‖`.
    pub fn norm_bound(&self, t: T) -> T {
        (t.abs() * (symbol_sup_bound(self.model) + self.model.flow().matrix().spectral_norm())).exp()
    }
}

/// Largest relative difference between two multiplier tables.
pub fn max_relative_delta<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).abs() / y.abs().max(T::min_positive_value()))
        .fold(T::zero(), T::max)
}

/// `∇f` of a scalar given by its Fourier data, returned in Physical rep.
pub fn gradient_field<T: Real>(spec: GridSpec<T>, scalar_hat: &[Complex<T>]) -> Result<GridField<T>> {
    spec.validate()?;
    if scalar_hat.len() != spec.len() {
        return Err(Error::InvalidGrid(format!("scalar needs n³ = {} coefficients", spec.len())));
    }
    let plan = Fft3::new(spec.n);
    let two_pi_i = Complex::new(T::zero(), T::two_pi());
    let mut out = GridField::zeros(spec, Rep::Physical);
    for axis in 0..3 {
        let mut d: Vec<Complex<T>> = scalar_hat.to_vec();
        for (idx, v) in d.iter_mut().enumerate() {
            let (i, j, l) = spec.unravel(idx);
            let k = [i, j, l][axis];
            *v = if spec.is_nyquist(k) { czero() } else { *v * two_pi_i * spec.frequency(k) };
        }
        plan.inverse(&mut d);
        out.components_mut()[axis] = d;
    }
    Ok(out)
}

/// Spectral curl `2πiξ × φ̂`, returned in Physical rep.
pub fn curl<T: Real>(field: &GridField<T>) -> Result<GridField<T>> {
    let spec = *field.spec();
    let plan = Fft3::new(spec.n);
    let hat = match field.rep() {
        Rep::Physical => field.to_fourier_with(&plan)?,
        Rep::Fourier => field.clone(),
    };
    let two_pi_i = Complex::new(T::zero(), T::two_pi());
    let mut out = GridField::zeros(spec, Rep::Fourier);
    for idx in 0..spec.len() {
        let (i, j, l) = spec.unravel(idx);
        let k = [i, j, l].map(|k| if spec.is_nyquist(k) { T::zero() } else { spec.frequency(k) });
        let v = hat.value(idx);
        let c = [v[2] * k[1] - v[1] * k[2], v[0] * k[2] - v[2] * k[0], v[1] * k[0] - v[0] * k[1]];
        for (comp, val) in c.into_iter().enumerate() {
            out.components_mut()[comp][idx] = val * two_pi_i;
        }
    }
    out.to_physical_with(&plan)
}

/// Largest pointwise magnitude of the spectral curl.
pub fn curl_norm<T: Real>(field: &GridField<T>) -> Result<T> {
    Ok(curl(field)?.max_magnitude())
}

/// Fourier data of the scalar `f(x)` sampled on the grid.
pub fn scalar_fourier<T: Real, F: Fn(Vec3<T>) -> T>(spec: GridSpec<T>, f: F) -> Vec<Complex<T>> {
    let mut data: Vec<Complex<T>> = (0..spec.len()).map(|idx| Complex::new(f(spec.point(idx)), T::zero())).collect();
    Fft3::new(spec.n).forward(&mut data);
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SteadyState, SymPosDef3};
    use crate::planewave::{evolve, PlaneWave};
    use crate::spectral::field::gaussian;
    use crate::witnesses;

    fn sg(a: SymPosDef3<f64>) -> LinearModel<f64> {
        LinearModel::sg(&SteadyState::new(a))
    }

    fn small() -> GridSpec<f64> {
        GridSpec::new(32, 16.0).unwrap()
    }

    fn bump(spec: GridSpec<f64>, sigma: f64) -> GridField<f64> {
        GridField::from_real_fn(spec, |x| {
            let g = gaussian(x, Vec3::zero(), sigma);
            Vec3::new(g, -0.5 * g, 0.25 * g)
        })
    }

    #[test]
    fn identity_steady_state_is_trivial() {
        let m = sg(SymPosDef3::identity());
        let ev = Evolver::new(&m, small(), Default::default()).unwrap();
        let f = bump(small(), 1.5);
        assert_eq!(ev.apply_l(&f).unwrap().norm(), 0.0);
        assert!(ev.apply_g(3.0, &f).unwrap().sub(&f).unwrap().norm() < 1e-14 * f.norm());
        assert_eq!(ev.apply_g(0.0, &f).unwrap(), f);
    }

    #[test]
    fn generator_on_degenerate_set_has_no_multiplier_term() {
        let m = sg(SymPosDef3::scaled_identity(2.0));
        let spec = small();
        let ev = Evolver::new(&m, spec, Default::default()).unwrap();
        let f = bump(spec, 1.2);
        let l = ev.apply_l(&f).unwrap();
        // −(ū·∇)φ − Sᵀφ with the analytic gradient of the Gaussian.
        let s = m.flow().matrix();
        let expected = GridField::from_real_fn(spec, |x| {
            let g = gaussian(x, Vec3::zero(), 1.2);
            let amp = Vec3::new(1.0, -0.5, 0.25);
            let adv = -(s.mul_vec(x).dot(x.scale(-1.0 / 1.44))) * g;
            amp.scale(adv) - s.tr_mul_vec(amp.scale(g))
        });
        let err = l.sub(&expected).unwrap().norm() / expected.norm();
        assert!(err < 1e-8, "{err:e}");
    }

    #[test]
    fn generator_matches_plane_wave_derivative() {
        let m = sg(witnesses::a2());
        let spec = small();
        let ev = Evolver::new(&m, spec, Default::default()).unwrap();
        let k0 = Vec3::new(2.0 / 16.0, -1.0 / 16.0, 3.0 / 16.0);
        assert_eq!(spec.box_length, 16.0);
        let pw = PlaneWave::new(1.0, k0).unwrap();
        let wave = |a: f64, k: Vec3<f64>, x: Vec3<f64>| {
            let p = Complex::from_polar(a, std::f64::consts::TAU * k.dot(x));
            k.0.map(|c| p * c)
        };
        let f = GridField::from_fn(spec, |x| wave(1.0, k0, x));
        let l = ev.apply_l(&f).unwrap();
        let se = SymbolEvaluator::new(&m, Default::default());
        let h = 1e-4;
        let (p, q) = (evolve(&se, &pw, h).unwrap(), evolve(&se, &pw, -h).unwrap());
        let fd = GridField::from_fn(spec, |x| {
            let (u, v) = (wave(p.a_t, p.k_t, x), wave(q.a_t, q.k_t, x));
            [0, 1, 2].map(|c| (u[c] - v[c]) / (2.0 * h))
        });
        // Central differences in t are exact to O(h²) relative to a
        // derivative that grows with |x|; compare on the interior.
        let diff = l.sub(&fd).unwrap();
        assert!(diff.norm() < 1e-6 * l.norm(), "{:e}", diff.norm() / l.norm());
    }

    #[test]
    fn oracle_and_quadrature_tables_agree() {
        for m in [sg(witnesses::a4()), LinearModel::qg(&witnesses::a2(), &Default::default())] {
            let ev = Evolver::new(&m, small(), Default::default()).unwrap();
            let q = ev.multiplier_table(0.5, Family::Tilde).unwrap();
            let r = ev.oracle_multiplier_table(0.5, 1e-3, Family::Tilde).unwrap();
            assert!(max_relative_delta(&r, &q) < 1e-10);
        }
    }

    #[test]
    fn gradient_is_curl_free_and_zero_maps_to_zero() {
        let spec = small();
        let hat = scalar_fourier(spec, |x| gaussian(x, Vec3::new(0.5, 0.0, -0.5), 1.5));
        let g = gradient_field(spec, &hat).unwrap();
        assert!(curl_norm(&g).unwrap() < 1e-10);
        let z = gradient_field(spec, &vec![czero(); spec.len()]).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn hyperbolic_long_times_are_clamped() {
        let m = sg(witnesses::a1());
        let spec = small();
        let ev = Evolver::new(&m, spec, Default::default()).unwrap();
        let f = bump(spec, 1.5);
        assert!(matches!(ev.apply_g(2.0, &f), Err(Error::TimeClamp { .. })));
        let cfg = EvolverConfig { clamp_time: 1.0, ..Default::default() };
        let ev = Evolver::new(&m, spec, cfg).unwrap();
        assert!(matches!(ev.apply_g(-1.5, &f), Err(Error::TimeClamp { .. })));
    }

    #[test]
    fn rotation_flow_preserves_norm() {
        // A = 2I: S = J/2 and m ≡ 0, so F(t) is a rotation of values and frame.
        let m = sg(SymPosDef3::scaled_identity(2.0));
        let spec = GridSpec::new(32, 24.0).unwrap();
        let ev = Evolver::new(&m, spec, Default::default()).unwrap();
        let f = bump(spec, 1.6);
        for t in [0.7, 2.0] {
            let g = ev.apply_f(t, &f).unwrap();
            assert!((g.norm() / f.norm() - 1.0).abs() < 1e-10);
            assert!(g.norm() <= ev.norm_bound(t) * f.norm());
        }
    }

    #[test]
    fn config_validation() {
        assert!(EvolverConfig::<f64>::default().validate().is_ok());
        let bad = EvolverConfig { clamp_time: 0.0, ..EvolverConfig::<f64>::default() };
        assert!(bad.validate().is_err());
        let json = serde_json::to_string(&EvolverConfig::<f64>::default()).unwrap();
        assert!(json.contains("spectral-resample"));
    }
}
