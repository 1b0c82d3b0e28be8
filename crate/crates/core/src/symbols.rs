//! Time-dependent symbols built from `m`:
//!
//! * `m̃(t;ξ) = m(e^{−tFᵀ}ξ)` and `M̃(t;ξ) = exp ∫₀ᵗ m̃(r;ξ) dr`
//! * `m̄(t;ξ) = m(e^{+tFᵀ}ξ)` and `M̄(t;ξ) = exp ∫₀ᵗ m̄(r;ξ) dr`
//!
//! `M̃` is the per-mode growth factor of the solution operator and `M̄` that of
//! its adjoint.

use crate::error::Result;
use crate::geometry::SpectrumKind;
use crate::linalg::{symmetric_eigenvalues, Vec3};
use crate::model::{backward_coefficients, LinearModel, ModeTrajectory};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::Real;

/// Relative eigenvector residual below which the closed-form multiplier is used.
const EIGEN_FAST_PATH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct SymbolEvaluator<'m, T> {
    model: &'m LinearModel<T>,
    quadrature: QuadratureConfig<T>,
    sup_bound: T,
}

impl<'m, T: Real> SymbolEvaluator<'m, T> {
    pub fn new(model: &'m LinearModel<T>, quadrature: QuadratureConfig<T>) -> Self {
        Self { model, quadrature, sup_bound: symbol_sup_bound(model) }
    }

    pub fn model(&self) -> &'m LinearModel<T> {
        self.model
    }

    pub fn quadrature(&self) -> &QuadratureConfig<T> {
        &self.quadrature
    }

    /// Bound on `‖m‖_∞`; see [`symbol_sup_bound`].
    pub fn sup_bound(&self) -> T {
        self.sup_bound
    }

    pub fn m(&self, xi: Vec3<T>) -> T {
        self.model.symbol(xi)
    }

    pub fn m_tilde(&self, t: T, xi: Vec3<T>) -> T {
        self.model.symbol(self.model.frequency(t, xi))
    }

    pub fn m_bar(&self, t: T, xi: Vec3<T>) -> T {
        self.model.symbol(self.model.frequency(-t, xi))
    }

    /// `∫₀ᵗ m̃(r;ξ) dr`.
    pub fn m_tilde_integral(&self, t: T, xi: Vec3<T>) -> Result<T> {
        self.log_multiplier(t, xi, T::one())
    }

    /// `∫₀ᵗ m̄(r;ξ) dr`.
    pub fn m_bar_integral(&self, t: T, xi: Vec3<T>) -> Result<T> {
        self.log_multiplier(t, xi, -T::one())
    }

    /// `M̃(t;ξ)`.
    pub fn multiplier_m_tilde(&self, t: T, xi: Vec3<T>) -> Result<T> {
        Ok(self.m_tilde_integral(t, xi)?.exp())
    }

    /// `M̄(t;ξ)`.
    pub fn multiplier_m_bar(&self, t: T, xi: Vec3<T>) -> Result<T> {
        Ok(self.m_bar_integral(t, xi)?.exp())
    }

    /// `∫_{t0}^{t1} m̃(r;ξ) dr`; summing consecutive intervals gives the
    /// integral from 0 without re-integrating the prefix.
    pub fn m_tilde_integral_between(&self, t0: T, t1: T, xi: Vec3<T>) -> Result<T> {
        self.integral_between(t0, t1, xi, T::one())
    }

    fn log_multiplier(&self, t: T, xi: Vec3<T>, direction: T) -> Result<T> {
        self.integral_between(T::zero(), t, xi, direction)
    }

    /// `∫_{t0}^{t1} m(e^{−σrFᵀ}ξ) dr` with `σ = ±1`.
    fn integral_between(&self, t0: T, t1: T, xi: Vec3<T>, direction: T) -> Result<T> {
        if t0 == t1 || xi.is_zero() || self.model.degenerate_multiplier() {
            return Ok(T::zero());
        }
        if self.is_transport_eigenvector(xi) {
            // k(r) stays on the ray through ξ and m is 0-homogeneous.
            return Ok((t1 - t0) * self.model.symbol(xi));
        }
        let traj = ModeTrajectory::new(self.model, xi);
        let flow = self.model.flow();
        let panels = initial_panels(self.model, t1 - t0);
        let integral = integrate(
            |r: T| {
                let (al, be) = backward_coefficients(flow, direction * r);
                traj.symbol_at(al, be)
            },
            t0,
            t1,
            &self.quadrature,
            panels,
        )?;
        Ok(integral.value)
    }

    /// Whether `ξ` is (to the fast-path tolerance) an eigenvector of `Fᵀ`
    /// for one of its real eigenvalues.
    pub fn is_transport_eigenvector(&self, xi: Vec3<T>) -> bool {
        self.transport_eigenvalue(xi).is_some()
    }

    /// The real eigenvalue `μ` with `‖Fᵀξ − μξ‖ < 1e-12‖ξ‖`, if any.
    pub fn transport_eigenvalue(&self, xi: Vec3<T>) -> Option<T> {
        let ft = self.model.flow().matrix().transpose();
        let fx = ft.mul_vec(xi);
        let tol = T::lit(EIGEN_FAST_PATH_TOL) * xi.norm();
        let lambda = self.model.flow().lambda();
        let candidates: &[T] = match self.model.flow().kind() {
            SpectrumKind::Hyperbolic { .. } => &[T::zero(), lambda, -lambda],
            _ => &[T::zero()],
        };
        candidates.iter().copied().find(|&mu| (fx - xi.scale(mu)).norm() < tol)
    }

    /// `e^{−tFᵀ}ξ`, exact along eigenvectors where the matrix route would
    /// lose digits to cancellation between `e^{±λt}` terms.
    pub fn frequency(&self, t: T, xi: Vec3<T>) -> Vec3<T> {
        match self.transport_eigenvalue(xi) {
            Some(mu) => xi.scale((-mu * t).exp()),
            None => self.model.frequency(t, xi),
        }
    }
}

/// Starting panel count for a time integral over `[0, t]`: roughly one panel
/// per unit of `λ|t|`, since that is the time scale of `k(r)`.
pub(crate) fn initial_panels<T: Real>(model: &LinearModel<T>, t: T) -> usize {
    let rate = model.flow().lambda().max(T::lit(0.5));
    let n = (t.abs() * rate).ceil().to_usize().unwrap_or(1);
    n.clamp(1, 1 << 20)
}

/// `2 · max_{|u|=1} |u·Pu| / (u·Qu)`, the exact supremum of `|m|`.
///
/// With `Q = LLᵀ` this is twice the spectral radius of the symmetric matrix
/// `L⁻¹ P_sym L⁻ᵀ`.
pub fn symbol_sup_bound<T: Real>(model: &LinearModel<T>) -> T {
    if model.degenerate_multiplier() {
        return T::zero();
    }
    let Some(l) = model.symbol_denominator().cholesky() else {
        return T::infinity();
    };
    let Some(li) = l.inverse() else {
        return T::infinity();
    };
    let c = li * model.symbol_numerator() * li.transpose();
    let ev = symmetric_eigenvalues(&c.sym());
    T::lit(2.0) * ev[0].abs().max(ev[2].abs())
}

/// Sampled `max |m(u)|` over a Fibonacci lattice of `samples` unit vectors,
/// refined by local coordinate search around the best sample.
pub fn sampled_sup<T: Real>(model: &LinearModel<T>, samples: usize) -> T {
    let n = samples.max(1);
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let point = |theta: T, phi: T| {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    };
    let mut best = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let z = T::one() - T::lit(2.0) * (T::from_usize_lossy(i) + T::lit(0.5)) / T::from_usize_lossy(n);
        let theta = z.max(-T::one()).min(T::one()).acos();
        let phi = golden * T::from_usize_lossy(i);
        let v = model.symbol(point(theta, phi)).abs();
        if v > best.0 {
            best = (v, theta, phi);
        }
    }
    let (mut val, mut theta, mut phi) = best;
    let mut step = T::lit(0.05);
    while step > T::lit(1e-10) {
        let mut improved = false;
        for (dt, dp) in [(step, T::zero()), (-step, T::zero()), (T::zero(), step), (T::zero(), -step)] {
            let v = model.symbol(point(theta + dt, phi + dp)).abs();
            if v > val {
                val = v;
                theta += dt;
                phi += dp;
                improved = true;
            }
        }
        if !improved {
            step *= T::lit(0.5);
        }
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SteadyState, SymPosDef3};
    use crate::linalg::Mat3;
    use crate::witnesses;

    fn sg(a: SymPosDef3<f64>) -> LinearModel<f64> {
        LinearModel::sg(&SteadyState::new(a))
    }

    #[test]
    fn symbol_vanishes_on_degenerate_set_and_along_e3_for_a2() {
        let m = sg(SymPosDef3::scaled_identity(2.0));
        let ev = SymbolEvaluator::new(&m, Default::default());
        assert_eq!(ev.m(Vec3::new(0.4, -2.0, 1.0)), 0.0);
        let m2 = sg(witnesses::a2());
        let ev2 = SymbolEvaluator::new(&m2, Default::default());
        assert_eq!(ev2.m(Vec3::new(0.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn symbol_a1_along_e1_matches_matrix_entries() {
        let a = witnesses::a1::<f64>();
        let m = sg(a);
        let ev = SymbolEvaluator::new(&m, Default::default());
        let inv = a.inverse();
        let aj = inv * crate::geometry::j_matrix();
        let expected = 2.0 * aj.0[0][0] / inv.0[0][0];
        assert!((ev.m(Vec3::new(1.0, 0.0, 0.0)) - expected).abs() < 1e-14);
    }

    #[test]
    fn m_tilde_at_zero_is_m_and_m_bar_is_reflection() {
        let m = sg(witnesses::a3());
        let ev = SymbolEvaluator::new(&m, Default::default());
        let xi = Vec3::new(0.7, 0.1, -0.4);
        assert_eq!(ev.m_tilde(0.0, xi), ev.m(xi));
        for t in [-1.1, 0.35, 2.0] {
            assert!((ev.m_bar(t, xi) - ev.m_tilde(-t, xi)).abs() < 1e-14);
        }
    }

    #[test]
    fn m_tilde_constant_along_hyperbolic_eigenvector() {
        let m = sg(witnesses::a1());
        let ev = SymbolEvaluator::new(&m, Default::default());
        let k = m.flow().transpose_eigenvector(4.0).unwrap();
        for t in [0.0, 0.5, 1.5] {
            assert!((ev.m_tilde(t, k) - 8.0).abs() < 1e-9);
        }
        assert!(ev.is_transport_eigenvector(k));
        let big = ev.multiplier_m_tilde(1.5, k).unwrap();
        assert!((big / (2.0 * 4.0 * 1.5f64).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn m_bar_on_plus_eigenvector_is_plus_two_lambda() {
        // e^{+tSᵀ}k⁺ = e^{tλ}k⁺, and m is 0-homogeneous, so m̄ = m(k⁺) = 2λ and
        // M̄ = e^{2tλ}. The quadrature route must reproduce the same sign.
        let m = sg(witnesses::a1());
        let ev = SymbolEvaluator::new(&m, Default::default());
        let k = m.flow().transpose_eigenvector(4.0).unwrap();
        let t = 0.3;
        assert!((ev.m_bar(t, k) - 8.0).abs() < 1e-9);
        let closed = ev.multiplier_m_bar(t, k).unwrap();
        let quad = integrate(|r| ev.m_bar(r, k), 0.0, t, &QuadratureConfig::default(), 4).unwrap().value.exp();
        assert!((closed / (8.0f64 * t).exp() - 1.0).abs() < 1e-9);
        assert!((quad / closed - 1.0).abs() < 1e-9);
    }

    #[test]
    fn elliptic_m_tilde_is_periodic() {
        let m = sg(witnesses::a4());
        let ev = SymbolEvaluator::new(&m, Default::default());
        let tau = m.flow().period().unwrap();
        let xi = Vec3::new(1.0, -0.5, 0.25);
        for t in [0.0, 0.3, 1.7] {
            assert!((ev.m_tilde(t + tau, xi) - ev.m_tilde(t, xi)).abs() < 1e-10);
        }
    }

    #[test]
    fn multiplier_trivial_cases() {
        let m = sg(witnesses::a2());
        let ev = SymbolEvaluator::new(&m, Default::default());
        assert_eq!(ev.multiplier_m_tilde(0.0, Vec3::new(1.0, 2.0, 3.0)).unwrap(), 1.0);
        assert_eq!(ev.multiplier_m_bar(0.0, Vec3::new(1.0, 2.0, 3.0)).unwrap(), 1.0);
        let b = sg(SymPosDef3::scaled_identity(0.5));
        let evb = SymbolEvaluator::new(&b, Default::default());
        for t in [-2.0, 1.0, 4.0] {
            assert_eq!(evb.multiplier_m_tilde(t, Vec3::new(0.2, -1.0, 0.7)).unwrap(), 1.0);
        }
    }

    #[test]
    fn sup_bound_dominates_samples_and_matches_sampling() {
        for a in witnesses::all::<f64>() {
            let m = sg(a);
            let exact = symbol_sup_bound(&m);
            let sampled = sampled_sup(&m, 4096);
            assert!(sampled <= exact * (1.0 + 1e-12));
            assert!((exact - sampled).abs() <= 1e-6 * exact, "{exact} vs {sampled}");
        }
    }

    #[test]
    fn sup_bound_of_isotropic_denominator() {
        // Q = I, P_sym = diag(1, -3, 0) → max |m| = 2·3.
        let model = LinearModel::from_parts(
            crate::model::ModelKind::Qg,
            *m_a1().flow(),
            Mat3::diag(1.0, -3.0, 0.0),
            Mat3::identity(),
            crate::geometry::RegimeLabel::HyperbolicPlus,
            1.0,
            0.0,
            false,
        );
        assert!((symbol_sup_bound(&model) - 6.0).abs() < 1e-12);
    }

    fn m_a1() -> LinearModel<f64> {
        sg(witnesses::a1())
    }
}
