//! Property tests for the structural invariants: gradient consistency,
//! parameter-region validation, k-invariance and budget exhaustion of the
//! optimum, trajectory convergence bounds, path independence of
//! position-only forces, exchange monotonicity, and fit symmetries.

use proptest::prelude::*;

use crusoe_core::dynamics::{
    integrate_first_order, rate_coefficients, CompanionLaw, IntegratorConfig,
};
use crusoe_core::exchange::{
    exchange_equilibrium, exchange_force, simulate_exchange, ExchangeScenario,
};
use crusoe_core::inference::{
    detect_collinearity, fit_saturation, reconstruct_constraint, SampledSignal,
};
use crusoe_core::mechanics::{path_dependence_probe, ForceSpec, PhaseState};
use crusoe_core::statics::{solve_static_optimum, solve_static_optimum_with};
use crusoe_core::{Bundle, ConsumptionModel, GoodId, UtilitySpec};

fn model(e: f64, p_b: f64, p_c: f64, k: f64) -> ConsumptionModel {
    ConsumptionModel {
        e,
        p_b,
        p_c,
        k,
        m_b: 1.0,
        m_c: 1.0,
        q_b0: 0.0,
        q_c0: 0.0,
    }
}

proptest! {
    /// The exact Cobb-Douglas gradient and the finite-difference path of an
    /// equivalent opaque evaluator agree within 1e-6 relative.
    #[test]
    fn gradient_matches_finite_difference(
        k in 0.1f64..10.0,
        q_b in 0.0f64..100.0,
        q_c in 0.0f64..100.0,
    ) {
        let exact = UtilitySpec::cobb_douglas(k);
        let wrapped = UtilitySpec::custom(move |b: &Bundle| {
            k * b.quantity(&GoodId::b()).unwrap() * b.quantity(&GoodId::c()).unwrap()
        });
        let bundle = Bundle::two_goods(q_b, q_c).unwrap();
        let g_exact = exact.gradient(&bundle).unwrap();
        let g_fd = wrapped.gradient(&bundle).unwrap();
        for good in [GoodId::b(), GoodId::c()] {
            let e = g_exact[&good];
            let f = g_fd[&good];
            prop_assert!((e - f).abs() <= 1e-6 * (1.0 + e.abs()), "{good}: {e} vs {f}");
        }
    }

    /// Validation accepts exactly the region the invariants describe.
    #[test]
    fn validation_matches_parameter_region(
        e in -10.0f64..10.0,
        p_b in -10.0f64..10.0,
        p_c in -10.0f64..10.0,
        k in -10.0f64..10.0,
        m_b in -10.0f64..10.0,
        m_c in -10.0f64..10.0,
        q_b0 in -10.0f64..10.0,
        q_c0 in -10.0f64..10.0,
    ) {
        let m = ConsumptionModel { e, p_b, p_c, k, m_b, m_c, q_b0, q_c0 };
        let should_pass = e > 0.0 && p_b > 0.0 && p_c > 0.0 && k > 0.0
            && m_b > 0.0 && m_c > 0.0 && q_b0 >= 0.0 && q_c0 >= 0.0;
        prop_assert_eq!(m.validate().is_ok(), should_pass);
    }

    /// The optimum location is k-free and exhausts the budget.
    #[test]
    fn optimum_k_free_and_budget_exhausting(
        e in 1.0f64..1000.0,
        p_b in 0.1f64..10.0,
        p_c in 0.1f64..10.0,
        k1 in 0.01f64..100.0,
        k2 in 0.01f64..100.0,
    ) {
        let a = solve_static_optimum(&model(e, p_b, p_c, k1).validate().unwrap());
        let b = solve_static_optimum(&model(e, p_b, p_c, k2).validate().unwrap());
        prop_assert_eq!(&a.bundle, &b.bundle);
        let spent = p_b * a.bundle.quantity(&GoodId::b()).unwrap()
            + p_c * a.bundle.quantity(&GoodId::c()).unwrap();
        prop_assert!((spent - e).abs() <= 1e-12 * e);
    }

    /// The bisection path lands on the closed form within 1e-9 relative.
    #[test]
    fn numeric_optimum_matches_closed_form(
        e in 1.0f64..1000.0,
        p_b in 0.1f64..10.0,
        p_c in 0.1f64..10.0,
        k in 0.01f64..100.0,
    ) {
        let m = model(e, p_b, p_c, k).validate().unwrap();
        let closed = solve_static_optimum(&m);
        let numeric = solve_static_optimum_with(&m, &UtilitySpec::cobb_douglas(k)).unwrap();
        for good in [GoodId::b(), GoodId::c()] {
            let a = closed.bundle.quantity(&good).unwrap();
            let b = numeric.bundle.quantity(&good).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs(), "{good}: {a} vs {b}");
        }
    }

    /// After a long run the trajectory has closed onto the optimum within
    /// the analytic decay envelope (plus a small numerical allowance).
    #[test]
    fn trajectory_obeys_the_decay_envelope(
        e in 10.0f64..500.0,
        p_b in 0.5f64..2.0,
        p_c in 0.5f64..2.0,
        k in 0.5f64..2.0,
        m_b in 0.5f64..2.0,
        m_c in 0.5f64..2.0,
        q_b0 in 0.0f64..100.0,
    ) {
        let m = ConsumptionModel { e, p_b, p_c, k, m_b, m_c, q_b0, q_c0: 0.0 }
            .validate()
            .unwrap();
        let rates = rate_coefficients(&m);
        let t_end = 20.0 / rates.lambda_b;
        let dt = 0.1 / rates.lambda_b.max(rates.lambda_c);
        let cfg = IntegratorConfig::new(dt, t_end).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        let t_last = *traj.times().last().unwrap();
        let attractor = e / (2.0 * p_b);
        let envelope = (-rates.lambda_b * t_last).exp() * (q_b0 - attractor).abs();
        prop_assert!((q[q.len() - 1] - attractor).abs() < envelope + 1e-9);
    }

    /// From zero holdings both asymptotes together exhaust the budget.
    #[test]
    fn asymptotic_budget_exhaustion(
        e in 10.0f64..500.0,
        p_b in 0.5f64..2.0,
        p_c in 0.5f64..2.0,
        k in 0.5f64..2.0,
        m_b in 0.5f64..2.0,
        m_c in 0.5f64..2.0,
    ) {
        let m = ConsumptionModel { e, p_b, p_c, k, m_b, m_c, q_b0: 0.0, q_c0: 0.0 }
            .validate()
            .unwrap();
        let rates = rate_coefficients(&m);
        let slow = rates.lambda_b.min(rates.lambda_c);
        let fast = rates.lambda_b.max(rates.lambda_c);
        let cfg = IntegratorConfig::new(0.1 / fast, 25.0 / slow).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let n = traj.len() - 1;
        let spent = p_b * traj.signal(&GoodId::b()).unwrap()[n]
            + p_c * traj.signal(&GoodId::c()).unwrap()[n];
        prop_assert!((spent - e).abs() < 1e-9 * e, "spent {spent} of {e}");
    }

    /// Trajectories are strictly monotone toward the attractor from either
    /// side.
    #[test]
    fn trajectories_are_monotone(
        e in 10.0f64..500.0,
        p_b in 0.5f64..2.0,
        p_c in 0.5f64..2.0,
        start_above in proptest::bool::ANY,
    ) {
        let attractor = e / (2.0 * p_b);
        let q_b0 = if start_above { attractor * 1.7 } else { attractor * 0.2 };
        let m = ConsumptionModel {
            e, p_b, p_c, k: 1.0, m_b: 1.0, m_c: 1.0, q_b0, q_c0: 0.0,
        }
        .validate()
        .unwrap();
        let rates = rate_coefficients(&m);
        let fast = rates.lambda_b.max(rates.lambda_c);
        let cfg = IntegratorConfig::new(0.2 / fast, 5.0 / rates.lambda_b).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        if start_above {
            prop_assert!(q.windows(2).all(|w| w[1] < w[0]));
        } else {
            prop_assert!(q.windows(2).all(|w| w[1] > w[0]));
        }
    }

    /// The trapezoid line integral of a position-only (affine) force is the
    /// same along any two polylines sharing endpoints.
    #[test]
    fn position_only_forces_are_path_free(
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        qs_a in proptest::collection::vec(-10.0f64..10.0, 0..6),
        qs_b in proptest::collection::vec(-10.0f64..10.0, 0..6),
        vs_a in proptest::collection::vec(-10.0f64..10.0, 6),
        vs_b in proptest::collection::vec(-10.0f64..10.0, 6),
    ) {
        let force = ForceSpec::conservative_only(move |q| a + b * q);
        let start = PhaseState::new(-3.0, 1.0, 1.0);
        let end = PhaseState::new(4.0, -2.0, 1.0);
        let build = |qs: &[f64], vs: &[f64]| {
            let mut path = vec![start];
            for (q, v) in qs.iter().zip(vs) {
                path.push(PhaseState::new(*q, *v, 1.0));
            }
            path.push(end);
            path
        };
        let path_a = build(&qs_a, &vs_a);
        let path_b = build(&qs_b, &vs_b);
        let (i_a, i_b, delta) = path_dependence_probe(&force, &path_a, &path_b).unwrap();
        prop_assert!(
            delta.abs() <= 1e-9 * (1.0 + i_a.abs() + i_b.abs()),
            "delta {delta}"
        );
    }
}

fn feasible_scenario(
    b1: f64,
    c1: f64,
    b2: f64,
    c2: f64,
    k: f64,
    l: f64,
    m: f64,
) -> Option<ExchangeScenario> {
    let mrs1 = b1 / c1;
    let mrs2 = b2 / c2;
    if (mrs1 - mrs2).abs() < 1e-3 {
        return None;
    }
    // RC is the banana-heavy side; r sits strictly inside the band
    let (endow_rc, endow_d, r_max, r_min) = if mrs1 > mrs2 {
        ((b1, c1), (b2, c2), mrs1, mrs2)
    } else {
        ((b2, c2), (b1, c1), mrs2, mrs1)
    };
    Some(ExchangeScenario {
        k,
        l,
        r: (r_max * r_min).sqrt(),
        m,
        endow_rc,
        endow_d,
    })
}

proptest! {
    // 500 random feasible scenarios, per the monotonicity contract
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// Inside the feasibility band neither recorded utility series ever
    /// decreases beyond the monitor tolerance.
    #[test]
    fn feasible_trade_never_lowers_utility(
        b1 in 0.5f64..10.0,
        c1 in 0.5f64..10.0,
        b2 in 0.5f64..10.0,
        c2 in 0.5f64..10.0,
        k in 0.2f64..5.0,
        l in 0.2f64..5.0,
        m in 0.2f64..5.0,
    ) {
        let Some(s) = feasible_scenario(b1, c1, b2, c2, k, l, m) else {
            return Ok(());
        };
        let rate = 2.0 * s.k * s.r / s.m;
        let cfg = IntegratorConfig::new(0.1 / rate, 10.0 / rate).unwrap();
        let traj = simulate_exchange(&s, &cfg).unwrap();
        let tol_rc = 1e-12 * traj.u_rc[0].abs();
        let tol_d = 1e-12 * traj.u_d[0].abs();
        for w in traj.u_rc.windows(2) {
            prop_assert!(w[1] >= w[0] - tol_rc);
        }
        for w in traj.u_d.windows(2) {
            prop_assert!(w[1] >= w[0] - tol_d);
        }
        // the trade line is conserved along the whole path
        let theta = s.theta();
        for i in 0..traj.times.len() {
            let line = traj.q_b_rc[i] + s.r * traj.q_c_rc[i];
            prop_assert!((line - theta).abs() <= 1e-12 * theta.max(1.0));
        }
    }

    /// Without a halt, the simulated path closes onto the static exchange
    /// equilibrium.
    #[test]
    fn simulation_limit_matches_equilibrium(
        b in 2.0f64..10.0,
        c in 0.5f64..2.0,
        k in 0.2f64..5.0,
        m in 0.2f64..5.0,
    ) {
        // a symmetric scenario trades to the contract point without a halt
        let s = ExchangeScenario {
            k,
            l: k,
            r: 1.0,
            m,
            endow_rc: (b, c),
            endow_d: (c, b),
        };
        let rate = 2.0 * s.k * s.r / s.m;
        let cfg = IntegratorConfig::new(0.1 / rate, 20.0 / rate).unwrap();
        let traj = simulate_exchange(&s, &cfg).unwrap();
        let (rc_eq, _) = exchange_equilibrium(&s).unwrap();
        let expect = rc_eq.quantity(&GoodId::c()).unwrap();
        let last = *traj.q_c_rc.last().unwrap();
        prop_assert!((last - expect).abs() < 1e-6, "{last} vs {expect}");
    }

    /// The exchange force is the consumption force with the conserved trade
    /// line standing in for the budget and `r` for the price.
    #[test]
    fn exchange_force_has_the_consumption_form(
        b in 0.5f64..10.0,
        c in 0.5f64..10.0,
        k in 0.2f64..5.0,
        r in 0.2f64..5.0,
        q in 0.0f64..10.0,
    ) {
        let s = ExchangeScenario {
            k,
            l: 1.0,
            r,
            m: 1.0,
            endow_rc: (b, c),
            endow_d: (b, c),
        };
        let reduced = ConsumptionModel {
            e: s.theta(),
            p_b: r,
            p_c: 1.0,
            k,
            m_b: 1.0,
            m_c: 1.0,
            q_b0: 0.0,
            q_c0: 0.0,
        }
        .validate()
        .unwrap();
        let f_exchange = exchange_force(&s, q);
        let f_consumption = crusoe_core::dynamics::consumption_force(&reduced, q);
        prop_assert!((f_exchange - f_consumption).abs() <= 1e-12 * (1.0 + f_exchange.abs()));
    }

    /// Collinearity is symmetric up to slope inversion on proportional
    /// signals.
    #[test]
    fn collinearity_slope_inverts(
        amp in 1.0f64..100.0,
        ratio in 0.05f64..20.0,
        rate in 0.2f64..2.0,
    ) {
        let times: Vec<f64> = (0..80).map(|i| i as f64 * 0.05).collect();
        let base: Vec<f64> = times.iter().map(|t| amp * (1.0 - (-rate * t).exp())).collect();
        let scaled: Vec<f64> = base.iter().map(|v| ratio * v).collect();
        let a = SampledSignal::new(times.clone(), base).unwrap();
        let b = SampledSignal::new(times, scaled).unwrap();
        let ab = detect_collinearity(&a, &b).unwrap();
        let ba = detect_collinearity(&b, &a).unwrap();
        prop_assert!(ab.r_squared > 0.999);
        prop_assert!((ab.slope * ba.slope - 1.0).abs() < 1e-6);
    }

    /// Rescaling both signals by a common factor keeps the reconstructed
    /// constraint residual at numerical zero.
    #[test]
    fn constraint_residual_survives_rescaling(
        e in 10.0f64..200.0,
        p_b in 0.5f64..4.0,
        p_c in 0.5f64..4.0,
    ) {
        let times: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
        let q_b: Vec<f64> = times
            .iter()
            .map(|t| e / (2.0 * p_b) * (1.0 - (-t).exp()))
            .collect();
        let q_c: Vec<f64> = q_b.iter().map(|qb| (e - p_b * qb) / p_c).collect();
        for scale in [1e-3, 1.0, 1e3] {
            let a = SampledSignal::new(
                times.clone(),
                q_b.iter().map(|v| v * scale).collect(),
            )
            .unwrap();
            let b = SampledSignal::new(
                times.clone(),
                q_c.iter().map(|v| v * scale).collect(),
            )
            .unwrap();
            let est = reconstruct_constraint(&a, &b).unwrap();
            let data_scale = scale * e / p_b.min(p_c) + 1.0;
            prop_assert!(est.residual <= 1e-12 * data_scale, "scale {scale}: {}", est.residual);
        }
    }

    /// On nested noiseless sample sets of the exact family the fit stays
    /// numerically exact; densifying the data never degrades it.
    #[test]
    fn nested_noiseless_fits_stay_exact(
        amp in 1.0f64..100.0,
        rate in 0.3f64..2.0,
    ) {
        let times: Vec<f64> = (0..120).map(|i| i as f64 * 5.0 / rate / 119.0).collect();
        let values: Vec<f64> = times.iter().map(|t| amp * (1.0 - (-rate * t).exp())).collect();
        let full = SampledSignal::new(times.clone(), values.clone()).unwrap();
        let half = SampledSignal::new(
            times.iter().step_by(2).copied().collect(),
            values.iter().step_by(2).copied().collect(),
        )
        .unwrap();
        let rss_full = fit_saturation(&full).unwrap().rss;
        let rss_half = fit_saturation(&half).unwrap().rss;
        prop_assert!(rss_full < 1e-12, "full {rss_full}");
        prop_assert!(rss_half < 1e-12, "half {rss_half}");
        prop_assert!(rss_full <= rss_half + 1e-12);
    }
}
