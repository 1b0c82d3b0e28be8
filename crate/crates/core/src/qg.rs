//! Quasi-geostrophic counterpart of the SG steady-state analysis and the
//! joint SG×QG regime classification.
//!
//! For LQG the flow generator is `M = J(A − B)` with `B = diag(1, 1, N²)`, and
//! the symbol is `m_QG(ξ) = 2 (ξ·MB⁻¹ξ)/(ξ·B⁻¹ξ)`. `M` is traceless and
//! singular with spectrum `{0, ±√μ_QG}`, `μ_QG = b² − (a−1)(d−1)`.

use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_sg, j_matrix, quadratic_form_vanishes, FlowMatrix, RegimeLabel, SymPosDef3};
use crate::io::format_real;
use crate::linalg::{Mat3, Vec3};
use crate::model::{LinearModel, ModelKind};
use crate::planewave::{classify_stability, StabilityVerdict};
use crate::scalar::Real;
use crate::symbols::SymbolEvaluator;
use crate::witnesses;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QgParams<T> {
    /// Brunt–Väisälä frequency `N`.
    pub n: T,
}

impl<T: Real> Default for QgParams<T> {
    fn default() -> Self {
        Self { n: T::one() }
    }
}

impl<T: Real> QgParams<T> {
    pub fn new(n: T) -> Result<Self> {
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("Brunt-Vaisala frequency must be positive and finite, got {n}")));
        }
        Ok(Self { n })
    }

    /// `B = diag(1, 1, N²)`.
    pub fn b_matrix(&self) -> Mat3<T> {
        Mat3::diag(T::one(), T::one(), self.n * self.n)
    }

    pub fn b_inverse(&self) -> Mat3<T> {
        Mat3::diag(T::one(), T::one(), T::one() / (self.n * self.n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QgFlow<T> {
    pub m: Mat3<T>,
    pub mu_qg: T,
    pub eps: T,
    pub label: RegimeLabel,
}

impl<T: Real> QgFlow<T> {
    pub fn flow_matrix(&self) -> FlowMatrix<T> {
        FlowMatrix::new(self.m, self.mu_qg, self.label)
    }
}

/// `μ_QG = b² − (a − 1)(d − 1)`; independent of `N`.
pub fn mu_qg<T: Real>(a: &SymPosDef3<T>) -> T {
    let c = a.coefficients();
    c.b * c.b - (c.a - T::one()) * (c.d - T::one())
}

/// Degeneracy band `1e-12 · max(1, |ad|, b², |a|, |d|)`, the QG analogue of
/// the SG band (the scale of the terms entering `μ_QG`).
pub fn default_qg_eps<T: Real>(a: &SymPosDef3<T>) -> T {
    let c = a.coefficients();
    let scale = T::one().max((c.a * c.d).abs()).max(c.b * c.b).max(c.a.abs()).max(c.d.abs());
    T::lit(1e-12) * scale
}

pub fn qg_flow<T: Real>(a: &SymPosDef3<T>, params: &QgParams<T>, eps: Option<T>) -> QgFlow<T> {
    let m = j_matrix() * (a.matrix() - params.b_matrix());
    let mu = mu_qg(a);
    let eps = eps.unwrap_or_else(|| default_qg_eps(a));
    QgFlow { m, mu_qg: mu, eps, label: RegimeLabel::from_mu(mu, eps) }
}

impl<T: Real> LinearModel<T> {
    /// LQG: `F = M`, `P = MB⁻¹`, `Q = B⁻¹`.
    pub fn qg(a: &SymPosDef3<T>, params: &QgParams<T>) -> Self {
        let flow = qg_flow(a, params, None);
        let p = flow.m * params.b_inverse();
        LinearModel::from_parts(
            ModelKind::Qg,
            flow.flow_matrix(),
            p,
            params.b_inverse(),
            flow.label,
            flow.mu_qg,
            flow.eps,
            quadratic_form_vanishes(&p),
        )
    }
}

/// `m_QG(ξ)`, with `m_QG(0) = 0`.
pub fn symbol_m_qg<T: Real>(a: &SymPosDef3<T>, params: &QgParams<T>, xi: Vec3<T>) -> T {
    LinearModel::qg(a, params).symbol(xi)
}

pub fn classify_qg_stability<T: Real>(a: &SymPosDef3<T>, params: &QgParams<T>) -> Result<StabilityVerdict<T>> {
    let model = LinearModel::qg(a, params);
    classify_stability(&SymbolEvaluator::new(&model, Default::default()))
}

/// Sign quadrant `(SG, QG)`: `P` for hyperbolic, `M` for elliptic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    PP,
    PM,
    MP,
    MM,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::PP, Quadrant::PM, Quadrant::MP, Quadrant::MM];

    /// `None` when either model is degenerate.
    pub fn from_labels(sg: RegimeLabel, qg: RegimeLabel) -> Option<Self> {
        match (sg, qg) {
            (RegimeLabel::HyperbolicPlus, RegimeLabel::HyperbolicPlus) => Some(Quadrant::PP),
            (RegimeLabel::HyperbolicPlus, RegimeLabel::EllipticMinus) => Some(Quadrant::PM),
            (RegimeLabel::EllipticMinus, RegimeLabel::HyperbolicPlus) => Some(Quadrant::MP),
            (RegimeLabel::EllipticMinus, RegimeLabel::EllipticMinus) => Some(Quadrant::MM),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct RegimeReport<T> {
    pub matrix: SymPosDef3<T>,
    pub mu_sg: T,
    pub mu_qg: T,
    /// `null` when either model is degenerate.
    pub quadrant: Option<Quadrant>,
    pub degenerate_sg: bool,
    pub degenerate_qg: bool,
}

pub fn regime_report<T: Real>(a: &SymPosDef3<T>, params: &QgParams<T>) -> RegimeReport<T> {
    let sg = classify_sg(a, None);
    let qg = qg_flow(a, params, None);
    RegimeReport {
        matrix: *a,
        mu_sg: sg.mu,
        mu_qg: qg.mu_qg,
        quadrant: Quadrant::from_labels(sg.label, qg.label),
        degenerate_sg: sg.label == RegimeLabel::Degenerate,
        degenerate_qg: qg.label == RegimeLabel::Degenerate,
    }
}

pub const DEFAULT_SCAN_SEED: u64 = 20_240_601;
/// Ridge `δ` in `A = GᵀG + δI`.
pub const SAMPLER_RIDGE: f64 = 1e-3;

/// SplitMix64 finaliser; decorrelates per-sample seeds derived from one run
/// seed so every sample is reproducible independently of evaluation order.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample `index` of the run: `A = GᵀG + δI` with `G` standard Gaussian.
pub fn sample_matrix<T: Real>(seed: u64, index: u64) -> SymPosDef3<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, index));
    loop {
        let mut g = [[0.0f64; 3]; 3];
        for row in g.iter_mut() {
            for x in row.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
            }
        }
        let g = Mat3::from_f64(g);
        let a: Mat3<f64> = g.transpose() * g + Mat3::identity().scale(SAMPLER_RIDGE);
        let m = a.0;
        let coeffs = [m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]].map(T::lit);
        // Positive definite in exact arithmetic; redraw on round-off failure.
        if let Ok(spd) = SymPosDef3::from_array(coeffs) {
            return spd;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ScanSummary<T> {
    pub seed: u64,
    pub count: usize,
    pub reports: Vec<RegimeReport<T>>,
    /// Indexed by [`Quadrant::index`].
    pub quadrant_counts: [usize; 4],
    pub degenerate: usize,
}

impl<T: Real> ScanSummary<T> {
    pub fn count_of(&self, q: Quadrant) -> usize {
        self.quadrant_counts[q.index()]
    }

    /// First sampled report in quadrant `q`.
    pub fn witness(&self, q: Quadrant) -> Option<&RegimeReport<T>> {
        self.reports.iter().find(|r| r.quadrant == Some(q))
    }

    /// `quadrant,count` rows (plus `degenerate`).
    pub fn write_histogram_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "quadrant,count")?;
        for q in Quadrant::ALL {
            writeln!(w, "{q},{}", self.count_of(q))?;
        }
        writeln!(w, "degenerate,{}", self.degenerate)?;
        Ok(())
    }

    /// One row per sample: `index,a,b,c,d,e,f,mu_sg,mu_qg,quadrant`.
    pub fn write_samples_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,a,b,c,d,e,f,mu_sg,mu_qg,quadrant")?;
        for (i, r) in self.reports.iter().enumerate() {
            let coeffs = r.matrix.coefficients().to_array().map(format_real).join(",");
            let q = r.quadrant.map_or_else(|| "degenerate".to_string(), |q| q.to_string());
            writeln!(w, "{i},{coeffs},{},{},{q}", format_real(r.mu_sg), format_real(r.mu_qg))?;
        }
        Ok(())
    }
}

/// Classifies `count` sampled matrices.
pub fn scan_regimes<T: Real>(seed: u64, count: usize, params: &QgParams<T>) -> ScanSummary<T> {
    let mut summary =
        ScanSummary { seed, count, reports: Vec::with_capacity(count), quadrant_counts: [0; 4], degenerate: 0 };
    for i in 0..count {
        let r = regime_report(&sample_matrix(seed, i as u64), params);
        match r.quadrant {
            Some(q) => summary.quadrant_counts[q.index()] += 1,
            None => summary.degenerate += 1,
        }
        summary.reports.push(r);
    }
    summary
}

/// Reports for the four pinned witnesses `A₁…A₄`.
pub fn witness_reports<T: Real>(params: &QgParams<T>) -> [RegimeReport<T>; 4] {
    witnesses::all().map(|a| regime_report(&a, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b_model(n: f64) -> (SymPosDef3<f64>, QgParams<f64>) {
        let p = QgParams::new(n).unwrap();
        (SymPosDef3::new(1.0, 0.0, 0.0, 1.0, 0.0, n * n).unwrap(), p)
    }

    #[test]
    fn a_equal_b_is_degenerate_with_zero_flow() {
        let (a, p) = b_model(1.5);
        let f = qg_flow(&a, &p, None);
        assert_eq!(f.m, Mat3::zero());
        assert_eq!(f.label, RegimeLabel::Degenerate);
        assert_eq!(symbol_m_qg(&a, &p, Vec3::new(0.3, 1.0, -2.0)), 0.0);
    }

    #[test]
    fn witness_mu_values_and_quadrants() {
        let p = QgParams::default();
        let expected = [(8.0, 2.5, Quadrant::PP), (0.25, -1.0, Quadrant::PM), (-1.5, 2.0, Quadrant::MP), (-1.25, -0.25, Quadrant::MM)];
        for (r, (sg, qg, q)) in witness_reports::<f64>(&p).iter().zip(expected) {
            assert!((r.mu_sg - sg).abs() < 1e-12 * sg.abs());
            assert!((r.mu_qg - qg).abs() < 1e-12 * qg.abs());
            assert_eq!(r.quadrant, Some(q));
        }
    }

    #[test]
    fn symbol_a1_e1_matches_entries() {
        let a = witnesses::a1::<f64>();
        let p = QgParams::default();
        let mb = qg_flow(&a, &p, None).m * p.b_inverse();
        let expected = 2.0 * mb.0[0][0] / p.b_inverse().0[0][0];
        assert!((symbol_m_qg(&a, &p, Vec3::new(1.0, 0.0, 0.0)) - expected).abs() < 1e-14);
    }

    #[test]
    fn qg_stability_verdicts_per_witness() {
        use crate::planewave::Verdict::*;
        let p = QgParams::default();
        let got: Vec<_> = witnesses::all::<f64>().iter().map(|a| classify_qg_stability(a, &p).unwrap().verdict).collect();
        assert_eq!(got, vec![UnstablePlaneWave, StablePlaneWave, UnstablePlaneWave, StablePlaneWave]);
        let (a, p) = b_model(1.0);
        assert!(matches!(classify_qg_stability(&a, &p), Err(Error::DegenerateFlow { .. })));
    }

    #[test]
    fn identity_is_degenerate_in_both_models() {
        let r = regime_report(&SymPosDef3::<f64>::identity(), &QgParams::default());
        assert!(r.degenerate_sg && r.degenerate_qg);
        assert_eq!(r.quadrant, None);
    }

    #[test]
    fn report_json_shape() {
        let r = regime_report(&witnesses::a2::<f64>(), &QgParams::default());
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        assert_eq!(v["quadrant"], "PM");
        assert_eq!(v["matrix"]["f"], 0.75);
        assert_eq!(v["degenerate_sg"], false);
        let back: RegimeReport<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn scan_is_deterministic_and_covers_all_quadrants() {
        let p = QgParams::default();
        let s1 = scan_regimes::<f64>(DEFAULT_SCAN_SEED, 10_000, &p);
        let s2 = scan_regimes::<f64>(DEFAULT_SCAN_SEED, 10_000, &p);
        assert_eq!(s1, s2);
        for q in Quadrant::ALL {
            assert!(s1.count_of(q) > 0, "{q} empty: {:?}", s1.quadrant_counts);
        }
        assert_eq!(s1.quadrant_counts.iter().sum::<usize>() + s1.degenerate, 10_000);
    }
}
