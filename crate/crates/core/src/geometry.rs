//! Steady-state algebra for quadratic geopotentials `P̄(x) = x·Ax/2`.
//!
//! A symmetric positive-definite `A` induces the steady velocity `ū(x) = Sx`
//! with `S = A⁻¹J(A − I)`. `S` is traceless and singular, so its spectrum is
//! `{0, ±λ}` with `λ² = μ_A / det A`; the sign of `μ_A` separates hyperbolic
//! (saddle) from elliptic (rotational) flows.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// The rotation generator `J` with `J₁₂ = −1`, `J₂₁ = 1`.
pub fn j_matrix<T: Real>() -> Mat3<T> {
    let (z, o) = (T::zero(), T::one());
    Mat3([[z, -o, z], [o, z, z], [z, z, z]])
}

/// Six-coefficient serial form `{"a":..,"b":..,"c":..,"d":..,"e":..,"f":..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
}

impl<T: Real> Coefficients<T> {
    pub fn to_array(self) -> [T; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn from_array(v: [T; 6]) -> Self {
        let [a, b, c, d, e, f] = v;
        Self { a, b, c, d, e, f }
    }
}

/// Validated symmetric positive-definite matrix
/// `[[a,b,c],[b,d,e],[c,e,f]]` with cached determinant and inverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Coefficients<T>", into = "Coefficients<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SymPosDef3<T> {
    coeffs: Coefficients<T>,
    matrix: Mat3<T>,
    det: T,
    inverse: Mat3<T>,
}

impl<T: Real> TryFrom<Coefficients<T>> for SymPosDef3<T> {
    type Error = Error;
    fn try_from(c: Coefficients<T>) -> Result<Self> {
        validate_spd(c.a, c.b, c.c, c.d, c.e, c.f)
    }
}

impl<T: Real> From<SymPosDef3<T>> for Coefficients<T> {
    fn from(m: SymPosDef3<T>) -> Self {
        m.coeffs
    }
}

/// Validates six coefficients as a symmetric positive-definite matrix via its
/// leading principal minors.
pub fn validate_spd<T: Real>(a: T, b: T, c: T, d: T, e: T, f: T) -> Result<SymPosDef3<T>> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d), ("e", e), ("f", f)] {
        if !v.is_finite() {
            return Err(Error::NonFinite { name });
        }
    }
    let matrix = Mat3([[a, b, c], [b, d, e], [c, e, f]]);
    let minors = [a, a * d - b * b, matrix.det()];
    for (i, m) in minors.iter().enumerate() {
        if *m <= T::zero() {
            return Err(Error::NotPositiveDefinite { index: i + 1, value: m.to_f64_lossy() });
        }
    }
    let det = minors[2];
    let inverse = matrix.adjugate().scale(T::one() / det);
    Ok(SymPosDef3 { coeffs: Coefficients { a, b, c, d, e, f }, matrix, det, inverse })
}

impl<T: Real> SymPosDef3<T> {
    pub fn new(a: T, b: T, c: T, d: T, e: T, f: T) -> Result<Self> {
        validate_spd(a, b, c, d, e, f)
    }

    pub fn from_array(v: [T; 6]) -> Result<Self> {
        let [a, b, c, d, e, f] = v;
        validate_spd(a, b, c, d, e, f)
    }

    pub fn identity() -> Self {
        let (z, o) = (T::zero(), T::one());
        Self::new(o, z, z, o, z, o).expect("identity is SPD")
    }

    /// `β I`; panics unless `β > 0`.
    pub fn scaled_identity(beta: T) -> Self {
        let z = T::zero();
        Self::new(beta, z, z, beta, z, beta).expect("scaled identity with positive factor")
    }

    pub fn coefficients(&self) -> Coefficients<T> {
        self.coeffs
    }

    pub fn matrix(&self) -> Mat3<T> {
        self.matrix
    }

    pub fn det(&self) -> T {
        self.det
    }

    pub fn inverse(&self) -> Mat3<T> {
        self.inverse
    }

    /// `adf − ae² − b²f + 2bce − c²d`, the explicit polynomial form of det A.
    pub fn det_polynomial(&self) -> T {
        let Coefficients { a, b, c, d, e, f } = self.coeffs;
        let two = T::lit(2.0);
        a * d * f - a * e * e - b * b * f + two * b * c * e - c * c * d
    }
}

/// Flow-regime label shared by the SG and QG classifications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// Real nonzero spectrum, `μ > ε`.
    HyperbolicPlus,
    /// Imaginary nonzero spectrum, `μ < −ε`.
    EllipticMinus,
    /// `|μ| ≤ ε`.
    Degenerate,
}

impl RegimeLabel {
    pub fn from_mu<T: Real>(mu: T, eps: T) -> Self {
        if mu > eps {
            RegimeLabel::HyperbolicPlus
        } else if mu < -eps {
            RegimeLabel::EllipticMinus
        } else {
            RegimeLabel::Degenerate
        }
    }

    pub fn sign_char(self) -> Option<char> {
        match self {
            RegimeLabel::HyperbolicPlus => Some('P'),
            RegimeLabel::EllipticMinus => Some('M'),
            RegimeLabel::Degenerate => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumKind<T> {
    /// Spectrum `{0, ±λ}`, `λ > 0`.
    Hyperbolic { lambda: T },
    /// Spectrum `{0, ±iλ}`, `λ > 0`.
    Elliptic { lambda: T },
    Null,
}

/// A traceless singular 3×3 flow generator with `F³ = σF`.
///
/// Both the SG matrix `S` and the QG matrix `M` have this structure, which
/// gives the exact three-term exponential `e^{tF} = I + a(t)F + b(t)F²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowMatrix<T> {
    matrix: Mat3<T>,
    lambda_sq: T,
    kind: SpectrumKind<T>,
}

/// Order of the Taylor polynomial used by the scaling-and-squaring fallback.
const EXP_SERIES_ORDER: usize = 12;

impl<T: Real> FlowMatrix<T> {
    /// `lambda_sq` is the signed square of the nonzero eigenvalue; `label`
    /// decides the spectrum kind (so callers control the degeneracy band).
    pub fn new(matrix: Mat3<T>, lambda_sq: T, label: RegimeLabel) -> Self {
        let lambda = lambda_sq.abs().sqrt();
        let kind = match label {
            RegimeLabel::HyperbolicPlus => SpectrumKind::Hyperbolic { lambda },
            RegimeLabel::EllipticMinus => SpectrumKind::Elliptic { lambda },
            RegimeLabel::Degenerate => SpectrumKind::Null,
        };
        Self { matrix, lambda_sq, kind }
    }

    pub fn matrix(&self) -> Mat3<T> {
        self.matrix
    }

    pub fn lambda_sq(&self) -> T {
        self.lambda_sq
    }

    /// `sqrt(|λ²|)`; the rate for hyperbolic flows, the angular frequency for
    /// elliptic ones.
    pub fn lambda(&self) -> T {
        self.lambda_sq.abs().sqrt()
    }

    pub fn kind(&self) -> SpectrumKind<T> {
        self.kind
    }

    /// Period `2π/λ` of an elliptic flow.
    pub fn period(&self) -> Option<T> {
        match self.kind {
            SpectrumKind::Elliptic { lambda } => Some(T::two_pi() / lambda),
            _ => None,
        }
    }

    /// `{0, +λ, −λ}` (real) or `{0, +iλ, −iλ}`.
    pub fn eigenvalues(&self) -> [Complex<T>; 3] {
        let z = T::zero();
        let l = self.lambda();
        if self.lambda_sq >= z {
            [Complex::new(z, z), Complex::new(l, z), Complex::new(-l, z)]
        } else {
            [Complex::new(z, z), Complex::new(z, l), Complex::new(z, -l)]
        }
    }

    /// `|χ(z)|` for the characteristic polynomial of the matrix.
    pub fn char_poly_residual(&self, z: Complex<T>) -> T {
        let tr = self.matrix.trace();
        let c2 = self.matrix.principal_minor_sum();
        let det = self.matrix.det();
        let v = z * z * z - z * z * tr + z * c2 - Complex::new(det, T::zero());
        v.norm()
    }

    fn closed_form_ok(&self, t: T) -> bool {
        let s2 = self.matrix.frobenius().powi(2);
        let l = self.lambda();
        self.lambda_sq.abs() > T::lit(1e-10) * s2 && l * t.abs() < T::lit(700.0)
    }

    /// Coefficients `(a, b)` with `e^{tF} = I + aF + bF²`.
    ///
    /// A power series in `z = λ²t²` for `|z| ≤ 1` (this covers the
    /// near-degenerate band), the hyperbolic or trigonometric closed form
    /// otherwise.
    pub fn exp_coefficients(&self, t: T) -> (T, T) {
        let z = self.lambda_sq * t * t;
        if z.abs() > T::one() {
            let l = self.lambda();
            let x = l * t;
            // 1 − cos x = 2 sin²(x/2) and cosh x − 1 = 2 sinh²(x/2).
            let h = x / T::lit(2.0);
            if self.lambda_sq > T::zero() {
                (x.sinh() / l, T::lit(2.0) * h.sinh() * h.sinh() / (l * l))
            } else {
                (x.sin() / l, T::lit(2.0) * h.sin() * h.sin() / (l * l))
            }
        } else {
            let mut a_sum = T::zero();
            let mut b_sum = T::zero();
            let mut term_a = T::one(); // z^j / (2j+1)!
            let mut term_b = T::lit(0.5); // z^j / (2j+2)!
            for j in 0..32 {
                a_sum += term_a;
                b_sum += term_b;
                let jf = T::from_usize_lossy(j);
                let two = T::lit(2.0);
                term_a = term_a * z / ((two * jf + two) * (two * jf + T::lit(3.0)));
                term_b = term_b * z / ((two * jf + T::lit(3.0)) * (two * jf + T::lit(4.0)));
                if term_a.abs() <= T::epsilon() * a_sum.abs() && term_b.abs() <= T::epsilon() * b_sum.abs() {
                    break;
                }
            }
            (t * a_sum, t * t * b_sum)
        }
    }

    /// `e^{tF}`: closed form from the spectrum when `|λ|² > 1e-10‖F‖²` and
    /// `|λt| < 700`, otherwise scaling and squaring.
    pub fn exp(&self, t: T) -> Mat3<T> {
        if self.closed_form_ok(t) {
            let (a, b) = self.exp_coefficients(t);
            let f = self.matrix;
            Mat3::identity() + f.scale(a) + (f * f).scale(b)
        } else {
            scaling_and_squaring(&self.matrix.scale(t))
        }
    }

    /// Unit eigenvector of `Fᵀ` for a real eigenvalue `mu`, from the null
    /// space of `Fᵀ − μI`.
    pub fn transpose_eigenvector(&self, mu: T) -> Option<Vec3<T>> {
        let shifted = self.matrix.transpose() - Mat3::identity().scale(mu);
        let rows = [shifted.row(0), shifted.row(1), shifted.row(2)];
        let candidates = [rows[0].cross(rows[1]), rows[0].cross(rows[2]), rows[1].cross(rows[2])];
        let best = candidates
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sq().partial_cmp(&b.norm_sq()).unwrap_or(std::cmp::Ordering::Equal))?;
        let scale = rows.iter().fold(T::zero(), |acc, r| acc.max(r.norm_sq()));
        if best.norm_sq() > T::lit(1e-20) * scale * scale && best.is_finite() {
            return best.normalized();
        }
        // Rows nearly parallel: fall back to inverse iteration.
        let delta = T::lit(1e-7) * (self.matrix.max_abs() + T::one());
        let inv = (shifted - Mat3::identity().scale(delta)).inverse()?;
        let mut v = Vec3::new(T::one(), T::lit(0.7), T::lit(0.3)).normalized()?;
        for _ in 0..20 {
            v = inv.mul_vec(v).normalized()?;
        }
        Some(v)
    }
}

fn scaling_and_squaring<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let norm = m.frobenius();
    let mut squarings = 0u32;
    let mut scaled = *m;
    if norm > T::lit(0.5) {
        let s = (norm / T::lit(0.5)).log2().ceil();
        squarings = s.to_u32().unwrap_or(0);
        scaled = m.scale(T::lit(0.5).powi(squarings as i32));
    }
    let mut result = Mat3::identity();
    let mut term = Mat3::identity();
    for k in 1..=EXP_SERIES_ORDER {
        term = (term * scaled).scale(T::one() / T::from_usize_lossy(k));
        result = result + term;
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

/// `μ_A = af − c² + df − e² − f − det A`.
pub fn mu_sg<T: Real>(a: &SymPosDef3<T>) -> T {
    let Coefficients { a: ca, c, d, e, f, .. } = a.coefficients();
    ca * f - c * c + d * f - e * e - f - a.det_polynomial()
}

/// Default degeneracy band: `1e-12 · max(1, |af|, |df|, det A)`.
pub fn default_sg_eps<T: Real>(a: &SymPosDef3<T>) -> T {
    let Coefficients { a: ca, d, f, .. } = a.coefficients();
    T::lit(1e-12) * T::one().max((ca * f).abs()).max((d * f).abs()).max(a.det())
}

/// Whether the skew-plus-symmetric matrix `p` has vanishing symmetric part,
/// i.e. the quadratic form `x·p x` is identically zero.
pub(crate) fn quadratic_form_vanishes<T: Real>(p: &Mat3<T>) -> bool {
    let sym = *p + p.transpose();
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * T::one().max(p.max_abs());
    sym.max_abs() <= tol
}

/// `S = A⁻¹J(A − I)`.
pub fn flow_matrix_raw<T: Real>(a: &SymPosDef3<T>) -> Mat3<T> {
    a.inverse() * j_matrix() * (a.matrix() - Mat3::identity())
}

/// SG classification of a steady state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabelSg<T> {
    pub label: RegimeLabel,
    pub mu: T,
    pub eps: T,
    /// `A ∈ 𝓑`: the symbol `m` vanishes identically.
    pub degenerate_multiplier: bool,
}

pub fn classify_sg<T: Real>(a: &SymPosDef3<T>, eps: Option<T>) -> RegimeLabelSg<T> {
    let mu = mu_sg(a);
    let eps = eps.unwrap_or_else(|| default_sg_eps(a));
    RegimeLabelSg {
        label: RegimeLabel::from_mu(mu, eps),
        mu,
        eps,
        degenerate_multiplier: quadratic_form_vanishes(&(a.inverse() * j_matrix())),
    }
}

/// A validated SG steady state with its flow matrix and classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState<T> {
    matrix: SymPosDef3<T>,
    flow: FlowMatrix<T>,
    regime: RegimeLabelSg<T>,
}

impl<T: Real> SteadyState<T> {
    pub fn new(matrix: SymPosDef3<T>) -> Self {
        Self::with_eps(matrix, None)
    }

    pub fn with_eps(matrix: SymPosDef3<T>, eps: Option<T>) -> Self {
        let regime = classify_sg(&matrix, eps);
        let flow = FlowMatrix::new(flow_matrix_raw(&matrix), regime.mu / matrix.det(), regime.label);
        Self { matrix, flow, regime }
    }

    pub fn matrix(&self) -> &SymPosDef3<T> {
        &self.matrix
    }

    pub fn flow(&self) -> &FlowMatrix<T> {
        &self.flow
    }

    pub fn regime(&self) -> &RegimeLabelSg<T> {
        &self.regime
    }

    pub fn mu(&self) -> T {
        self.regime.mu
    }
}

/// `S` with its eigenstructure; see [`FlowMatrix`].
pub fn flow_matrix<T: Real>(a: &SymPosDef3<T>) -> FlowMatrix<T> {
    *SteadyState::new(*a).flow()
}

/// `e^{tS}`.
pub fn matrix_exp<T: Real>(s: &FlowMatrix<T>, t: T) -> Mat3<T> {
    s.exp(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses;

    fn charpoly_oracle(m: &Mat3<f64>, z: Complex<f64>) -> f64 {
        // Independent route: det(zI − M) by explicit complex cofactor expansion.
        let a = |i: usize, j: usize| {
            let d = if i == j { z } else { Complex::new(0.0, 0.0) };
            d - Complex::new(m.0[i][j], 0.0)
        };
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        det.norm()
    }

    fn dense_series_exp(m: &Mat3<f64>) -> Mat3<f64> {
        let mut result = Mat3::identity();
        let mut term = Mat3::identity();
        for k in 1..200 {
            term = (term * *m).scale(1.0 / k as f64);
            result = result + term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        result
    }

    #[test]
    fn validate_identity() {
        let a = validate_spd(1.0, 0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(a.det(), 1.0);
        assert_eq!(a.inverse(), Mat3::identity());
    }

    #[test]
    fn validate_a1_determinant() {
        let a = witnesses::a1::<f64>();
        assert!((a.det() - 0.5).abs() < 1e-14);
        assert!((a.det() - a.det_polynomial()).abs() <= 1e-12 * a.det());
    }

    #[test]
    fn validate_rejects_indefinite_minor() {
        let err = validate_spd(1.0, 2.0, 0.0, 1.0, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { index: 2, .. }));
        assert!(matches!(
            validate_spd(-1.0, 0.0, 0.0, 1.0, 0.0, 1.0),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
        assert!(matches!(
            validate_spd(1.0, 0.0, 0.0, 1.0, 0.0, f64::NAN),
            Err(Error::NonFinite { name: "f" })
        ));
    }

    #[test]
    fn flow_matrix_identity_is_zero() {
        let s = flow_matrix(&SymPosDef3::<f64>::identity());
        assert_eq!(s.matrix().max_abs(), 0.0);
        assert!(matches!(s.kind(), SpectrumKind::Null));
    }

    #[test]
    fn flow_matrix_two_identity_is_half_j() {
        let s = flow_matrix(&SymPosDef3::<f64>::scaled_identity(2.0));
        let expected = j_matrix::<f64>().scale(0.5);
        assert!((s.matrix() - expected).max_abs() < 1e-15);
    }

    #[test]
    fn a1_spectrum_is_zero_plus_minus_four() {
        let s = flow_matrix(&witnesses::a1::<f64>());
        assert!(matches!(s.kind(), SpectrumKind::Hyperbolic { .. }));
        assert!((s.lambda() - 4.0).abs() < 1e-12);
        let scale = s.matrix().frobenius().powi(3);
        for ev in s.eigenvalues() {
            assert!(charpoly_oracle(&s.matrix(), ev) < 1e-10 * scale);
            assert!(s.char_poly_residual(ev) < 1e-10 * scale);
        }
    }

    #[test]
    fn mu_values_for_witnesses() {
        assert_eq!(mu_sg(&SymPosDef3::<f64>::identity()), 0.0);
        assert!((mu_sg(&witnesses::a1::<f64>()) - 8.0).abs() < 1e-12);
        assert!((mu_sg(&witnesses::a2::<f64>()) - 0.25).abs() < 1e-12);
        assert!((mu_sg(&witnesses::a3::<f64>()) + 1.5).abs() < 1e-12);
        assert!((mu_sg(&witnesses::a4::<f64>()) + 1.25).abs() < 1e-12);
    }

    #[test]
    fn mu_matches_principal_minor_route() {
        // λ² = −c₂(S) for traceless singular S.
        for a in witnesses::all::<f64>() {
            let s = flow_matrix_raw(&a);
            let via_minors = -s.principal_minor_sum() * a.det();
            assert!((via_minors - mu_sg(&a)).abs() < 1e-12 * (1.0 + mu_sg(&a).abs()));
            assert!(s.trace().abs() < 1e-12);
            assert!(s.det().abs() < 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        let two = classify_sg(&SymPosDef3::<f64>::scaled_identity(2.0), None);
        assert_eq!(two.label, RegimeLabel::EllipticMinus);
        assert!((two.mu + 2.0).abs() < 1e-12);
        assert!(two.degenerate_multiplier);

        let id = classify_sg(&SymPosDef3::<f64>::identity(), None);
        assert_eq!(id.label, RegimeLabel::Degenerate);
        assert!(id.degenerate_multiplier);

        let a1 = classify_sg(&witnesses::a1::<f64>(), None);
        assert_eq!(a1.label, RegimeLabel::HyperbolicPlus);
        assert!(!a1.degenerate_multiplier);
    }

    #[test]
    fn exp_at_zero_and_for_null_flow() {
        let s = flow_matrix(&witnesses::a1::<f64>());
        assert!((s.exp(0.0) - Mat3::identity()).max_abs() < 1e-15);
        let null = flow_matrix(&SymPosDef3::<f64>::identity());
        for t in [-3.0, 0.5, 10.0] {
            assert_eq!(null.exp(t), Mat3::identity());
        }
    }

    #[test]
    fn exp_half_j_at_pi_is_quarter_turn() {
        let s = flow_matrix(&SymPosDef3::<f64>::scaled_identity(2.0));
        let e = s.exp(std::f64::consts::PI);
        let expected = Mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!((e - expected).max_abs() < 1e-14);
        let oracle = dense_series_exp(&s.matrix().scale(std::f64::consts::PI));
        assert!((e - oracle).max_abs() < 1e-14);
    }

    #[test]
    fn exp_closed_form_matches_series_and_fallback() {
        for a in witnesses::all::<f64>() {
            let s = flow_matrix(&a);
            for t in [-1.3, -0.2, 0.4, 1.1] {
                let e = s.exp(t);
                let oracle = dense_series_exp(&s.matrix().scale(t));
                assert!((e - oracle).max_abs() <= 1e-10 * oracle.max_abs(), "t={t}");
                let fallback = scaling_and_squaring(&s.matrix().scale(t));
                assert!((e - fallback).max_abs() <= 1e-10 * oracle.max_abs());
            }
        }
    }

    #[test]
    fn exp_series_coefficients_match_closed_form_near_degenerate() {
        // Tiny λ² forces the series branch; compare against the dense series.
        let m = Mat3([[0.0, -1e-6, 0.0], [1e-6, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let f = FlowMatrix::new(m, -1e-12, RegimeLabel::EllipticMinus);
        let t = 2.5;
        let (a, b) = f.exp_coefficients(t);
        let via_coeffs = Mat3::identity() + m.scale(a) + (m * m).scale(b);
        let oracle = dense_series_exp(&m.scale(t));
        assert!((via_coeffs - oracle).max_abs() < 1e-15);
        assert!((f.exp(t) - oracle).max_abs() < 1e-15);
    }

    #[test]
    fn exp_derivative_matches_finite_difference() {
        let s = flow_matrix(&witnesses::a3::<f64>());
        let t = 0.7;
        let h = 1e-5;
        let fd = (s.exp(t + h) - s.exp(t - h)).scale(1.0 / (2.0 * h));
        let exact = s.matrix() * s.exp(t);
        assert!((fd - exact).max_abs() < 1e-6 * exact.max_abs());
    }

    #[test]
    fn transpose_eigenvectors_of_a1() {
        let s = flow_matrix(&witnesses::a1::<f64>());
        for mu in [4.0, -4.0, 0.0] {
            let v = s.transpose_eigenvector(mu).unwrap();
            let r = s.matrix().tr_mul_vec(v) - v.scale(mu);
            assert!(r.norm() < 1e-10, "mu={mu} residual {}", r.norm());
        }
    }

    #[test]
    fn serde_json_round_trip_validates() {
        let a = witnesses::a2::<f64>();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"a":2.0,"b":0.0,"c":-1.0,"d":2.0,"e":0.0,"f":0.75}"#);
        let back: SymPosDef3<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<SymPosDef3<f64>>(r#"{"a":1,"b":2,"c":0,"d":1,"e":0,"f":1}"#).is_err());
    }
}
