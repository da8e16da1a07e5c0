//! Force-driven consumption dynamics.
//!
//! The consumption rate is proportional to marginal utility through an
//! inertial constant: `m·Q̇ = ∂U/∂Q` evaluated on the budget line. For the
//! Cobb-Douglas model this is a linear restoring law whose solution relaxes
//! exponentially onto the static optimum,
//! `Q_B(t) = b0·exp(-λ_B t) + E/(2 p_B)` with `b0 = Q_B(0) - E/(2 p_B)`.
//! The rate `λ_B = 2 (k/m_B)(p_B/p_C)` is dimensionless in the utility unit:
//! scaling `(k, m)` together leaves every trajectory unchanged.

use std::collections::BTreeMap;

use crate::model::{Trajectory, UtilitySpec, ValidatedModel};
use crate::statics::{substitute_budget_with, ReducedUtility, SubstitutedGood};
use crate::{Error, GoodId, Result};

/// Exponential relaxation rates of the two goods, in 1/time.
///
/// Invariant under `(k, m_B, m_C) -> (c k, c m_B, c m_C)` for any `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCoefficients {
    pub lambda_b: f64,
    pub lambda_c: f64,
}

/// `λ_B = 2 (k/m_B)(p_B/p_C)`, `λ_C = 2 (k/m_C)(p_C/p_B)`.
pub fn rate_coefficients(model: &ValidatedModel) -> RateCoefficients {
    RateCoefficients {
        lambda_b: 2.0 * (model.k / model.m_b) * (model.p_b / model.p_c),
        lambda_c: 2.0 * (model.k / model.m_c) * (model.p_c / model.p_b),
    }
}

/// Fixed-step integration window. The scheme is classical fourth-order
/// Runge-Kutta; fixed steps keep runs deterministic and diff-able.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !dt.is_finite() || !t_end.is_finite() || dt <= 0.0 || dt > t_end {
            return Err(Error::BadIntegratorConfig { dt, t_end });
        }
        Ok(IntegratorConfig { dt, t_end })
    }

    /// Uniform sample times `0, dt, 2 dt, ..` covering `[0, t_end]`.
    pub fn times(&self) -> Vec<f64> {
        let steps = (self.t_end / self.dt).round() as usize;
        let steps = steps.max(1);
        (0..=steps).map(|i| i as f64 * self.dt).collect()
    }

    /// Rejects steps that would leave the stable region of the flow.
    /// Decaying exponentials need `dt * rate < 0.5` to stay accurate and
    /// monotone; violations are an error rather than silent garbage.
    pub fn guard(&self, rate: f64) -> Result<()> {
        if self.dt * rate >= 0.5 {
            return Err(Error::StepTooLarge { dt: self.dt, rate });
        }
        Ok(())
    }
}

/// How the companion good evolves alongside the integrated one.
///
/// `Symmetric` (the default) gives each good its own force law under the
/// mirrored budget substitution; both asymptotes then exhaust the budget.
/// `BudgetResidual` instead pins `Q_C` to the instantaneous budget remainder
/// `(E - p_B Q_B)/p_C`, which forces `Q_C(0) = E/p_C` for `Q_B(0) = 0`; kept
/// for comparison, not as the default reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompanionLaw {
    #[default]
    Symmetric,
    BudgetResidual,
}

/// Marginal utility of bananas on the budget line:
/// `(k/p_C)·(E - 2 p_B Q_B)`, in utils/good.
pub fn consumption_force(model: &ValidatedModel, q_b: f64) -> f64 {
    (model.k / model.p_c) * (model.e - 2.0 * model.p_b * q_b)
}

/// Same force through an arbitrary utility: the (finite-difference) marginal
/// of the budget-substituted utility of the selected good.
pub fn consumption_force_with(
    model: &ValidatedModel,
    utility: &UtilitySpec,
    good: SubstitutedGood,
    q: f64,
) -> f64 {
    substitute_budget_with(model, utility, good).derivative(q)
}

fn two_signals(times: Vec<f64>, q_b: Vec<f64>, q_c: Vec<f64>) -> Result<Trajectory> {
    let mut signals = BTreeMap::new();
    signals.insert(GoodId::b(), q_b);
    signals.insert(GoodId::c(), q_c);
    Trajectory::new(times, signals)
}

/// Closed-form trajectory of the Cobb-Douglas model on the given times.
pub fn analytic_trajectory(
    model: &ValidatedModel,
    times: &[f64],
    companion: CompanionLaw,
) -> Result<Trajectory> {
    let rates = rate_coefficients(model);
    let q_b_inf = model.e / (2.0 * model.p_b);
    let q_c_inf = model.e / (2.0 * model.p_c);
    let b0 = model.q_b0 - q_b_inf;
    let c0 = model.q_c0 - q_c_inf;
    let q_b: Vec<f64> = times
        .iter()
        .map(|t| b0 * (-rates.lambda_b * t).exp() + q_b_inf)
        .collect();
    let q_c: Vec<f64> = match companion {
        CompanionLaw::Symmetric => times
            .iter()
            .map(|t| c0 * (-rates.lambda_c * t).exp() + q_c_inf)
            .collect(),
        CompanionLaw::BudgetResidual => q_b
            .iter()
            .map(|qb| (model.e - model.p_b * qb) / model.p_c)
            .collect(),
    };
    two_signals(times.to_vec(), q_b, q_c)
}

/// One classical RK4 step of the scalar ODE `q' = f(q)`.
fn rk4_step(f: &impl Fn(f64) -> f64, q: f64, dt: f64) -> f64 {
    let k1 = f(q);
    let k2 = f(q + 0.5 * dt * k1);
    let k3 = f(q + 0.5 * dt * k2);
    let k4 = f(q + dt * k3);
    q + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn integrate_scalar(f: impl Fn(f64) -> f64, q0: f64, times: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut q = q0;
    out.push(q);
    for _ in 1..times.len() {
        q = rk4_step(&f, q, dt);
        out.push(q);
    }
    out
}

/// Integrates `m·Q̇ = force(Q)` per good with fixed-step RK4.
pub fn integrate_first_order(
    model: &ValidatedModel,
    cfg: &IntegratorConfig,
    companion: CompanionLaw,
) -> Result<Trajectory> {
    integrate_first_order_with(model, &UtilitySpec::cobb_douglas(model.k), cfg, companion)
}

/// First-order integration through an arbitrary utility.
///
/// The stability guard applies to the Cobb-Douglas rates; opaque utilities
/// carry no closed-form rate, so the caller chooses the step.
pub fn integrate_first_order_with(
    model: &ValidatedModel,
    utility: &UtilitySpec,
    cfg: &IntegratorConfig,
    companion: CompanionLaw,
) -> Result<Trajectory> {
    if let UtilitySpec::CobbDouglas { k } = utility {
        cfg.guard(2.0 * (k / model.m_b) * (model.p_b / model.p_c))?;
        if companion == CompanionLaw::Symmetric {
            cfg.guard(2.0 * (k / model.m_c) * (model.p_c / model.p_b))?;
        }
    }
    let times = cfg.times();
    let force_b = substitute_budget_with(model, utility, SubstitutedGood::B);
    let m_b = model.m_b;
    let q_b = integrate_scalar(|q| force_b.derivative(q) / m_b, model.q_b0, &times, cfg.dt);
    let q_c = match companion {
        CompanionLaw::Symmetric => {
            let force_c: ReducedUtility =
                substitute_budget_with(model, utility, SubstitutedGood::C);
            let m_c = model.m_c;
            integrate_scalar(|q| force_c.derivative(q) / m_c, model.q_c0, &times, cfg.dt)
        }
        CompanionLaw::BudgetResidual => q_b
            .iter()
            .map(|qb| (model.e - model.p_b * qb) / model.p_c)
            .collect(),
    };
    two_signals(times, q_b, q_c)
}

/// Integrates the second-order form `m_B·Q̈_B = -2k(p_B/p_C)·Q̇_B` for good B
/// from `(Q_B(0), v0)`.
///
/// With `v0 = force(Q_B(0))/m_B` this reproduces the first-order trajectory;
/// any other `v0` settles on `Q_B(0) + v0/λ_B` instead: the second-order
/// form carries an extra constant of integration that must be pinned by the
/// initial condition.
pub fn integrate_second_order(
    model: &ValidatedModel,
    v0: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let rates = rate_coefficients(model);
    cfg.guard(rates.lambda_b)?;
    let lambda = rates.lambda_b;
    let times = cfg.times();
    let mut q = model.q_b0;
    let mut v = v0;
    let mut series = Vec::with_capacity(times.len());
    series.push(q);
    for _ in 1..times.len() {
        // RK4 on the pair (q, v) with q' = v, v' = -lambda v
        let dt = cfg.dt;
        let (k1q, k1v) = (v, -lambda * v);
        let (k2q, k2v) = (v + 0.5 * dt * k1v, -lambda * (v + 0.5 * dt * k1v));
        let (k3q, k3v) = (v + 0.5 * dt * k2v, -lambda * (v + 0.5 * dt * k2v));
        let (k4q, k4v) = (v + dt * k3v, -lambda * (v + dt * k3v));
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        series.push(q);
    }
    let mut signals = BTreeMap::new();
    signals.insert(GoodId::b(), series);
    Trajectory::new(times, signals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConsumptionModel;

    fn canonical() -> ValidatedModel {
        ConsumptionModel {
            e: 100.0,
            p_b: 2.0,
            p_c: 4.0,
            k: 1.0,
            m_b: 1.0,
            m_c: 1.0,
            q_b0: 0.0,
            q_c0: 0.0,
        }
        .validate()
        .unwrap()
    }

    fn with_q_b0(q_b0: f64) -> ValidatedModel {
        ConsumptionModel {
            q_b0,
            ..*canonical().params()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn force_values() {
        let m = canonical();
        assert_eq!(consumption_force(&m, 0.0), 25.0);
        assert_eq!(consumption_force(&m, 25.0), 0.0);
        assert_eq!(consumption_force(&m, 50.0), -25.0);
    }

    #[test]
    fn rates() {
        let m = canonical();
        let r = rate_coefficients(&m);
        assert_eq!(r.lambda_b, 1.0);
        assert_eq!(r.lambda_c, 4.0);

        // the common factor of k and m cancels
        for c in [1e-3, 42.0, 1e3] {
            let scaled = ConsumptionModel {
                k: c,
                m_b: c,
                m_c: c,
                ..*m.params()
            }
            .validate()
            .unwrap();
            let rs = rate_coefficients(&scaled);
            assert!((rs.lambda_b - 1.0).abs() < 1e-12);
            assert!((rs.lambda_c - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_values() {
        let m = canonical();
        let traj = analytic_trajectory(&m, &[0.0, 1.0, 40.0], CompanionLaw::Symmetric).unwrap();
        let q_b = traj.signal(&GoodId::b()).unwrap();
        assert_eq!(q_b[0], 0.0);
        assert!((q_b[1] - 15.80301397).abs() < 1e-8);
        assert!((q_b[2] - 25.0).abs() < 1e-12);
    }

    #[test]
    fn companion_laws_differ_at_zero() {
        let m = canonical();
        let sym = analytic_trajectory(&m, &[0.0, 1.0], CompanionLaw::Symmetric).unwrap();
        let res = analytic_trajectory(&m, &[0.0, 1.0], CompanionLaw::BudgetResidual).unwrap();
        assert_eq!(sym.signal(&GoodId::c()).unwrap()[0], 0.0);
        assert_eq!(res.signal(&GoodId::c()).unwrap()[0], 25.0); // E/p_C
    }

    #[test]
    fn rk4_matches_analytic_solution() {
        let m = canonical();
        let cfg = IntegratorConfig::new(1e-3, 10.0).unwrap();
        let numeric = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let exact = analytic_trajectory(&m, numeric.times(), CompanionLaw::Symmetric).unwrap();
        for good in [GoodId::b(), GoodId::c()] {
            let a = numeric.signal(&good).unwrap();
            let b = exact.signal(&good).unwrap();
            let max_err = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            assert!(max_err < 1e-8, "{good}: {max_err}");
        }
    }

    #[test]
    fn fixed_point_stays_constant() {
        let m = with_q_b0(25.0);
        let cfg = IntegratorConfig::new(1e-2, 5.0).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        for q in traj.signal(&GoodId::b()).unwrap() {
            assert_eq!(*q, 25.0);
        }
    }

    #[test]
    fn overshoot_decays_monotonically() {
        let m = with_q_b0(50.0);
        let cfg = IntegratorConfig::new(1e-3, 20.0).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        assert!(q.windows(2).all(|w| w[1] < w[0]));
        assert!((q[q.len() - 1] - 25.0).abs() < 1e-6);
    }

    #[test]
    fn undershoot_grows_monotonically() {
        let m = canonical();
        let cfg = IntegratorConfig::new(1e-3, 10.0).unwrap();
        let traj = integrate_first_order(&m, &cfg, CompanionLaw::Symmetric).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        assert!(q.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn step_guard_rejects_coarse_steps() {
        let m = canonical(); // lambda_C = 4, so dt = 0.2 gives dt*rate = 0.8
        let cfg = IntegratorConfig::new(0.2, 10.0).unwrap();
        assert!(matches!(
            integrate_first_order(&m, &cfg, CompanionLaw::Symmetric),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn second_order_consistent_v0_matches_first_order() {
        let m = canonical();
        let cfg = IntegratorConfig::new(1e-3, 10.0).unwrap();
        let v0 = consumption_force(&m, m.q_b0) / m.m_b;
        assert_eq!(v0, 25.0);
        let second = integrate_second_order(&m, v0, &cfg).unwrap();
        let exact = analytic_trajectory(&m, second.times(), CompanionLaw::Symmetric).unwrap();
        let max_err = second
            .signal(&GoodId::b())
            .unwrap()
            .iter()
            .zip(exact.signal(&GoodId::b()).unwrap())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-8, "{max_err}");
    }

    #[test]
    fn second_order_zero_velocity_is_frozen() {
        let m = canonical();
        let cfg = IntegratorConfig::new(1e-3, 2.0).unwrap();
        let traj = integrate_second_order(&m, 0.0, &cfg).unwrap();
        for q in traj.signal(&GoodId::b()).unwrap() {
            assert_eq!(*q, 0.0);
        }
    }

    #[test]
    fn second_order_inconsistent_v0_settles_elsewhere() {
        let m = canonical();
        let cfg = IntegratorConfig::new(1e-3, 20.0).unwrap();
        let traj = integrate_second_order(&m, 10.0, &cfg).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        // limit is v0 / lambda_B = 10, not the static optimum 25
        assert!((q[q.len() - 1] - 10.0).abs() < 1e-6);
    }

    #[test]
    fn custom_utility_integrates_to_the_same_attractor() {
        let m = canonical();
        let custom = UtilitySpec::custom(|b: &crate::Bundle| {
            b.quantity(&GoodId::b()).unwrap() * b.quantity(&GoodId::c()).unwrap()
        });
        let cfg = IntegratorConfig::new(1e-3, 20.0).unwrap();
        let traj = integrate_first_order_with(&m, &custom, &cfg, CompanionLaw::Symmetric).unwrap();
        let q = traj.signal(&GoodId::b()).unwrap();
        assert!((q[q.len() - 1] - 25.0).abs() < 1e-4);
    }

    #[test]
    fn trajectories_invariant_under_utility_unit_rescaling() {
        let cfg = IntegratorConfig::new(1e-3, 10.0).unwrap();
        let base = integrate_first_order(&canonical(), &cfg, CompanionLaw::Symmetric).unwrap();
        for c in [1e-3, 1e3] {
            let scaled = ConsumptionModel {
                k: c,
                m_b: c,
                m_c: c,
                ..*canonical().params()
            }
            .validate()
            .unwrap();
            let traj = integrate_first_order(&scaled, &cfg, CompanionLaw::Symmetric).unwrap();
            for good in [GoodId::b(), GoodId::c()] {
                let a = base.signal(&good).unwrap();
                let b = traj.signal(&good).unwrap();
                for (x, y) in a.iter().zip(b) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }
}
