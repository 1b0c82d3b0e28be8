use lsg_core::geometry::{flow_matrix, mu_sg};
use lsg_core::planewave::{self, PlaneWave, Verdict};
use lsg_core::qg::{mu_qg, qg_flow, regime_report, QgParams};
use lsg_core::{j_matrix, LinearModel, Mat3, RegimeLabel, SteadyState, SymPosDef3, SymbolEvaluator, Vec3};
use proptest::prelude::*;

fn spd() -> impl Strategy<Value = SymPosDef3<f64>> {
    prop::array::uniform9(-2.0f64..2.0).prop_filter_map("not positive definite", |g| {
        let g = Mat3::from_f64([[g[0], g[1], g[2]], [g[3], g[4], g[5]], [g[6], g[7], g[8]]]);
        let m = (g.transpose() * g + Mat3::identity().scale(0.1)).0;
        SymPosDef3::from_array([m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]]).ok()
    })
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3<f64>> {
    prop::array::uniform3(-r..r).prop_filter_map("zero vector", |v| {
        let v = Vec3::new(v[0], v[1], v[2]);
        (v.norm() > 1e-3).then_some(v)
    })
}

fn sg(a: &SymPosDef3<f64>) -> LinearModel<f64> {
    LinearModel::sg(&SteadyState::new(*a))
}

/// Taylor series with scaling and squaring; independent of the closed form.
fn expm_series(m: &Mat3<f64>) -> Mat3<f64> {
    let squarings = m.frobenius().log2().ceil().max(0.0) as i32 + 4;
    let a = m.scale(0.5f64.powi(squarings));
    let (mut term, mut sum) = (Mat3::identity(), Mat3::identity());
    for k in 1..30 {
        term = (term * a).scale(1.0 / k as f64);
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

fn mat_rel(a: &Mat3<f64>, b: &Mat3<f64>) -> f64 {
    (*a - *b).frobenius() / b.frobenius().max(1.0)
}

/// Sample time with `|t|·λ ≤ 3` so exponentials stay well conditioned.
fn time_scale(model: &LinearModel<f64>) -> f64 {
    (3.0 / model.flow().lambda().max(1e-12)).min(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivation_identity(a in spd(), xi in vec3(5.0)) {
        let ai = a.inverse();
        let s = flow_matrix(&a).matrix();
        let lhs = xi.dot((s - j_matrix()).mul_vec(ai.mul_vec(xi)));
        let rhs = 2.0 * xi.dot((ai * j_matrix()).mul_vec(xi));
        let scale = ai.max_abs() * xi.norm_sq() * (1.0 + s.max_abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn flow_matrix_is_traceless_singular_with_consistent_lambda(a in spd()) {
        let f = flow_matrix(&a);
        let s = f.matrix();
        let scale = s.max_abs().max(1.0);
        prop_assert!(s.trace().abs() <= 1e-12 * scale);
        prop_assert!(s.det().abs() <= 1e-10 * scale.powi(3));
        let via_minors = -s.principal_minor_sum();
        let via_trace = (s * s).trace() / 2.0;
        let via_mu = mu_sg(&a) / a.det();
        prop_assert!((via_mu - via_minors).abs() <= 1e-9 * scale * scale);
        prop_assert!((via_mu - via_trace).abs() <= 1e-9 * scale * scale);
        prop_assert!((a.det_polynomial() - a.matrix().det()).abs() <= 1e-12 * a.matrix().max_abs().powi(3));
    }

    #[test]
    fn exponential_matches_series_and_is_a_group(a in spd(), t in -1.0f64..1.0, s in -1.0f64..1.0) {
        let model = sg(&a);
        let tau = time_scale(&model);
        let (t, s) = (t * tau, s * tau);
        let f = model.flow();
        prop_assert!(mat_rel(&f.exp(t), &expm_series(&f.matrix().scale(t))) < 1e-11);
        // Products lose accuracy in proportion to the norms of their factors.
        let cond = |u: f64, v: f64| f.exp(u).frobenius() * f.exp(v).frobenius();
        prop_assert!(mat_rel(&(f.exp(t) * f.exp(s)), &f.exp(t + s)) < 1e-12 * cond(t, s));
        prop_assert!(mat_rel(&(f.exp(t) * f.exp(-t)), &Mat3::identity()) < 1e-12 * cond(t, -t));
    }

    #[test]
    fn frequency_trajectory_is_exact(a in spd(), k0 in vec3(2.0), t in -1.0f64..1.0) {
        let model = sg(&a);
        let t = t * time_scale(&model);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let oracle = expm_series(&model.flow().matrix().transpose().scale(-t)).mul_vec(k0);
        prop_assert!((ev.frequency(t, k0) - oracle).norm() <= 1e-11 * oracle.norm().max(k0.norm()));
    }

    #[test]
    fn symbol_is_even_homogeneous_and_bounded(a in spd(), xi in vec3(3.0), c in 0.01f64..100.0, t in -1.0f64..1.0) {
        let model = sg(&a);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let m = ev.m(xi);
        prop_assert!((ev.m(-xi) - m).abs() <= 1e-12 * m.abs().max(1.0));
        prop_assert!((ev.m(xi.scale(c)) - m).abs() <= 1e-12 * m.abs().max(1.0));
        prop_assert!(m.abs() <= ev.sup_bound() * (1.0 + 1e-12));
        let t = t * time_scale(&model);
        let log_m = ev.m_tilde_integral(t, xi).unwrap();
        prop_assert!(log_m.abs() <= t.abs() * ev.sup_bound() * (1.0 + 1e-9) + 1e-12);
        let back = ev.m_tilde_integral(t, -xi).unwrap();
        prop_assert!((back - log_m).abs() <= 1e-10 * log_m.abs().max(1.0));
    }

    #[test]
    fn cocycle(a in spd(), xi in vec3(2.0), t in -1.0f64..1.0, s in -1.0f64..1.0) {
        let model = sg(&a);
        let tau = time_scale(&model);
        let (t, s) = (t * tau, s * tau);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let whole = ev.multiplier_m_tilde(t + s, xi).unwrap();
        let split = ev.multiplier_m_tilde(s, xi).unwrap() * ev.multiplier_m_tilde(t, ev.frequency(s, xi)).unwrap();
        prop_assert!((whole - split).abs() <= 1e-8 * whole.abs(), "{whole} vs {split}");
    }

    #[test]
    fn bar_and_tilde_multipliers_are_related_by_transport(a in spd(), xi in vec3(2.0), t in -1.0f64..1.0) {
        let model = sg(&a);
        let t = t * time_scale(&model);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let bar = ev.multiplier_m_bar(t, xi).unwrap();
        let tilde = ev.multiplier_m_tilde(t, ev.frequency(-t, xi)).unwrap();
        prop_assert!((bar - tilde).abs() <= 1e-8 * bar.abs());
    }

    #[test]
    fn qg_mu_is_n_independent_and_spectrum_matches(a in spd(), n in 0.2f64..5.0) {
        let p = QgParams::new(n).unwrap();
        let r1 = regime_report(&a, &QgParams::new(1.0).unwrap());
        let rn = regime_report(&a, &p);
        prop_assert_eq!(r1.mu_qg, rn.mu_qg);
        prop_assert_eq!(r1.quadrant, rn.quadrant);
        let f = qg_flow(&a, &p, None);
        let scale = f.m.max_abs().max(1.0);
        // Characteristic polynomial z³ − tr·z² + σ₂·z − det with roots {0, ±√μ}.
        prop_assert!(f.m.trace().abs() <= 1e-12 * scale);
        prop_assert!(f.m.det().abs() <= 1e-10 * scale.powi(3));
        prop_assert!((f.m.principal_minor_sum() + mu_qg(&a)).abs() <= 1e-10 * scale * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planewave_closed_form_matches_rk4(a in spd(), k0 in vec3(2.0), a0 in 0.1f64..3.0, t in 0.0f64..1.0, qg in any::<bool>()) {
        let model = if qg { LinearModel::qg(&a, &QgParams::default()) } else { sg(&a) };
        let t = t * time_scale(&model);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let pw = PlaneWave::new(a0, k0).unwrap();
        let closed = planewave::evolve(&ev, &pw, t).unwrap();
        let rk4 = planewave::evolve_rk4(&model, &pw, t, 1e-3).unwrap();
        prop_assert!((closed.a_t - rk4.a_t).abs() <= 1e-6 * closed.a_t.abs());
        prop_assert!((closed.k_t - rk4.k_t).norm() <= 1e-6 * closed.k_t.norm());
    }

    #[test]
    fn hyperbolic_witness_grows_at_rate_lambda(a in spd()) {
        let model = sg(&a);
        prop_assume!(model.label() == RegimeLabel::HyperbolicPlus);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let v = planewave::classify_stability(&ev).unwrap();
        prop_assert_eq!(v.verdict, Verdict::UnstablePlaneWave);
        let w = v.witness.unwrap();
        let lambda = model.flow().lambda();
        for t in [1.0, 2.0, 5.0] {
            let s = planewave::evolve(&ev, &w, t).unwrap();
            let log_ratio = (s.sup_norm / w.initial_state().sup_norm).ln();
            prop_assert!(log_ratio >= 0.99 * lambda * t, "t {t}: log ratio {log_ratio}, lambda {lambda}");
        }
    }

    #[test]
    fn elliptic_sup_norm_respects_bound(a in spd(), k0 in vec3(2.0), qg in any::<bool>()) {
        let model = if qg { LinearModel::qg(&a, &QgParams::default()) } else { sg(&a) };
        prop_assume!(model.label() == RegimeLabel::EllipticMinus);
        let ev = SymbolEvaluator::new(&model, Default::default());
        let pw = PlaneWave::new(1.0, k0).unwrap();
        let tau = model.flow().period().unwrap();
        let period = planewave::period_integral(&ev, k0).unwrap();
        prop_assert!(period.abs() < 1e-8, "period integral {period}");
        let bound = planewave::elliptic_bound(&ev, &pw).unwrap();
        let times: Vec<f64> = (0..10_000).map(|i| 50.0 * tau * i as f64 / 9_999.0).collect();
        let states = planewave::evolve_trajectory(&ev, &pw, &times).unwrap();
        let max = states.iter().map(|s| s.sup_norm).fold(0.0, f64::max);
        prop_assert!(max <= bound * (1.0 + 1e-9), "max {max} bound {bound}");
    }
}
