//! The `(flow matrix, symbol)` pair that drives a linearised model.
//!
//! LSG and LQG share one structure: a traceless singular flow generator `F`
//! (`S` or `M`) and an order-0 symbol `m(ξ) = 2 (ξ·Pξ)/(ξ·Qξ)` with `Q`
//! positive definite. Plane-wave and grid evolutions are written once against
//! this type.

use serde::{Deserialize, Serialize};

use crate::geometry::{j_matrix, FlowMatrix, RegimeLabel, SteadyState};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sg,
    Qg,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearModel<T> {
    kind: ModelKind,
    flow: FlowMatrix<T>,
    /// Symmetric part of the numerator matrix `P`.
    numerator: Mat3<T>,
    /// Positive-definite denominator matrix `Q`.
    denominator: Mat3<T>,
    label: RegimeLabel,
    mu: T,
    eps: T,
    degenerate_multiplier: bool,
}

impl<T: Real> LinearModel<T> {
    /// Assembles a model. `numerator` may carry a skew part; only its
    /// symmetric part enters the symbol.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: ModelKind,
        flow: FlowMatrix<T>,
        numerator: Mat3<T>,
        denominator: Mat3<T>,
        label: RegimeLabel,
        mu: T,
        eps: T,
        degenerate_multiplier: bool,
    ) -> Self {
        Self { kind, flow, numerator: numerator.sym(), denominator, label, mu, eps, degenerate_multiplier }
    }

    /// LSG: `F = S`, `P = A⁻¹J`, `Q = A⁻¹`.
    pub fn sg(steady: &SteadyState<T>) -> Self {
        let inv = steady.matrix().inverse();
        let r = steady.regime();
        Self::from_parts(
            ModelKind::Sg,
            *steady.flow(),
            inv * j_matrix(),
            inv,
            r.label,
            r.mu,
            r.eps,
            r.degenerate_multiplier,
        )
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn flow(&self) -> &FlowMatrix<T> {
        &self.flow
    }

    pub fn label(&self) -> RegimeLabel {
        self.label
    }

    /// Regime discriminant (`μ_A` for SG, `μ_QG` for QG).
    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn degenerate_multiplier(&self) -> bool {
        self.degenerate_multiplier
    }

    pub fn symbol_numerator(&self) -> Mat3<T> {
        self.numerator
    }

    pub fn symbol_denominator(&self) -> Mat3<T> {
        self.denominator
    }

    /// `m(ξ)`, with `m(0) = 0`.
    #[inline]
    pub fn symbol(&self, xi: Vec3<T>) -> T {
        if self.degenerate_multiplier {
            return T::zero();
        }
        let den = self.denominator.quad(xi);
        if den <= T::zero() {
            return T::zero();
        }
        T::lit(2.0) * self.numerator.quad(xi) / den
    }

    /// `e^{−tFᵀ} ξ`, the frequency carried by the flow after time `t`.
    pub fn frequency(&self, t: T, xi: Vec3<T>) -> Vec3<T> {
        self.flow.exp(-t).tr_mul_vec(xi)
    }
}

/// Precomputed quadratic-form coefficients for `r ↦ m(e^{−rFᵀ}ξ)`.
///
/// With `k(r) = ξ + α(r)·Fᵀξ + β(r)·(Fᵀ)²ξ` both forms of `m(k(r))` become
/// quadratics in `(1, α, β)`, so one evaluation is a handful of flops once
/// `(α, β)` is known for `r`.
#[derive(Clone, Copy, Debug)]
pub struct ModeTrajectory<T> {
    num: [T; 6],
    den: [T; 6],
}

impl<T: Real> ModeTrajectory<T> {
    pub fn new(model: &LinearModel<T>, xi: Vec3<T>) -> Self {
        let ft = model.flow().matrix().transpose();
        let v = [xi, ft.mul_vec(xi), ft.mul_vec(ft.mul_vec(xi))];
        let coeffs = |m: &Mat3<T>| {
            let two = T::lit(2.0);
            [
                m.bilinear(v[0], v[0]),
                two * m.bilinear(v[0], v[1]),
                two * m.bilinear(v[0], v[2]),
                m.bilinear(v[1], v[1]),
                two * m.bilinear(v[1], v[2]),
                m.bilinear(v[2], v[2]),
            ]
        };
        Self { num: coeffs(&model.symbol_numerator()), den: coeffs(&model.symbol_denominator()) }
    }

    #[inline]
    fn eval(c: &[T; 6], al: T, be: T) -> T {
        c[0] + al * (c[1] + al * c[3]) + be * (c[2] + be * c[5]) + al * be * c[4]
    }

    /// `m(k)` for `k = ξ + α Fᵀξ + β (Fᵀ)²ξ`.
    #[inline]
    pub fn symbol_at(&self, al: T, be: T) -> T {
        let d = Self::eval(&self.den, al, be);
        if d <= T::zero() {
            return T::zero();
        }
        T::lit(2.0) * Self::eval(&self.num, al, be) / d
    }
}

/// `(α, β)` such that `e^{−rFᵀ}ξ = ξ + αFᵀξ + β(Fᵀ)²ξ`.
#[inline]
pub fn backward_coefficients<T: Real>(flow: &FlowMatrix<T>, r: T) -> (T, T) {
    flow.exp_coefficients(-r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymPosDef3;
    use crate::witnesses;

    #[test]
    fn trajectory_matches_direct_evaluation() {
        let model = LinearModel::sg(&SteadyState::new(witnesses::a3::<f64>()));
        let xi = Vec3::new(0.3, -1.2, 0.8);
        let traj = ModeTrajectory::new(&model, xi);
        for r in [-2.0, -0.3, 0.0, 0.9, 3.1] {
            let (al, be) = backward_coefficients(model.flow(), r);
            let direct = model.symbol(model.frequency(r, xi));
            assert!((traj.symbol_at(al, be) - direct).abs() < 1e-11, "r={r}");
        }
    }

    #[test]
    fn symbol_is_zero_at_origin_and_on_degenerate_set() {
        let model = LinearModel::sg(&SteadyState::new(witnesses::a1::<f64>()));
        assert_eq!(model.symbol(Vec3::zero()), 0.0);
        let b = LinearModel::sg(&SteadyState::new(SymPosDef3::<f64>::scaled_identity(2.0)));
        assert!(b.degenerate_multiplier());
        assert_eq!(b.symbol(Vec3::new(1.0, 2.0, 3.0)), 0.0);
    }
}
