//! Two-agent fixed-ratio exchange.
//!
//! Two agents, RC and D, hold endowments of the same two goods and trade at
//! a fixed ratio `r` (bananas per coconut), which plays the role of price.
//! Along such a path `Q_B + r·Q_C` is conserved for each agent, so RC's
//! holdings stay on the line through the endowment with slope `-r`, and the
//! marginal utility of further coconuts generates a force
//! `f = k·(θ - 2r·Q_C)` with `θ = Q_B(0) + r·Q_C(0)`: the same restoring
//! form as the consumption model with `θ` standing in for the budget.
//! Trade is driven by RC's force alone; the other agent's consent is
//! enforced by a Pareto monitor that freezes the state as soon as either
//! utility would fall.

use crate::dynamics::IntegratorConfig;
use crate::model::{Bundle, UtilitySpec};
use crate::{Error, Result};

/// Two agents' utility coefficients, endowments, trade ratio, and the
/// inertial constant of RC's coconut acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeScenario {
    /// RC's utility coefficient.
    pub k: f64,
    /// D's utility coefficient.
    pub l: f64,
    /// Trade ratio, bananas per coconut.
    pub r: f64,
    /// Inertial constant of RC's coconut acquisition.
    pub m: f64,
    /// RC's endowment (bananas, coconuts).
    pub endow_rc: (f64, f64),
    /// D's endowment (bananas, coconuts).
    pub endow_d: (f64, f64),
}

impl ExchangeScenario {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 4] =
            [("k", self.k), ("l", self.l), ("r", self.r), ("m", self.m)];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        let quantities: [(&'static str, f64); 4] = [
            ("endow_RC_B", self.endow_rc.0),
            ("endow_RC_C", self.endow_rc.1),
            ("endow_D_B", self.endow_d.0),
            ("endow_D_C", self.endow_d.1),
        ];
        for (name, v) in quantities {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeInitialQuantity(name));
            }
        }
        if self.endow_rc.0 + self.endow_d.0 <= 0.0 || self.endow_rc.1 + self.endow_d.1 <= 0.0 {
            return Err(Error::NegativeInitialQuantity("total endowment"));
        }
        Ok(())
    }

    /// The conserved combination `θ = Q_B(0) + r·Q_C(0)` of RC's holdings,
    /// in bananas. Plays the role of the budget in the trade dynamics.
    pub fn theta(&self) -> f64 {
        self.endow_rc.0 + self.r * self.endow_rc.1
    }

    /// Total endowment of (bananas, coconuts) across both agents.
    pub fn totals(&self) -> (f64, f64) {
        (
            self.endow_rc.0 + self.endow_d.0,
            self.endow_rc.1 + self.endow_d.1,
        )
    }

    fn mrs_rc(&self) -> Result<f64> {
        if self.endow_rc.1 == 0.0 {
            return Err(Error::DegenerateEndowment("endow_RC_C"));
        }
        Ok(self.endow_rc.0 / self.endow_rc.1)
    }

    fn mrs_d(&self) -> Result<f64> {
        if self.endow_d.1 == 0.0 {
            return Err(Error::DegenerateEndowment("endow_D_C"));
        }
        Ok(self.endow_d.0 / self.endow_d.1)
    }
}

/// The band of trade ratios both agents can gain from, bounded by the two
/// endowment marginal rates of substitution: `(MRS_D, MRS_RC)`.
///
/// For Cobb-Douglas utilities the MRS at a bundle is `Q_B/Q_C`, so the
/// bounds need strictly positive holdings of both goods on both sides.
pub fn feasibility_bounds(s: &ExchangeScenario) -> Result<(f64, f64)> {
    s.validate()?;
    if s.endow_rc.0 == 0.0 {
        return Err(Error::DegenerateEndowment("endow_RC_B"));
    }
    if s.endow_d.0 == 0.0 {
        return Err(Error::DegenerateEndowment("endow_D_B"));
    }
    let r_max = s.mrs_rc()?;
    let r_min = s.mrs_d()?;
    if r_max <= r_min {
        return Err(Error::NoGainsFromTrade { r_min, r_max });
    }
    Ok((r_min, r_max))
}

fn require_feasible(s: &ExchangeScenario) -> Result<()> {
    s.validate()?;
    let r_max = s.mrs_rc()?;
    let r_min = s.mrs_d()?;
    // equality is allowed: at the band edge the force vanishes and the
    // allocation is already a fixed point
    if s.r < r_min || s.r > r_max {
        return Err(Error::InfeasibleRatio {
            r: s.r,
            r_min,
            r_max,
        });
    }
    Ok(())
}

/// Allocations at the trade equilibrium `r = Q_B/Q_C`: RC ends at
/// `(θ/2, θ/(2r))` and D holds the remainder of the total endowment.
pub fn exchange_equilibrium(s: &ExchangeScenario) -> Result<(Bundle, Bundle)> {
    require_feasible(s)?;
    let theta = s.theta();
    let rc_c = theta / (2.0 * s.r);
    let rc_b = theta - s.r * rc_c;
    let (total_b, total_c) = s.totals();
    let rc = Bundle::two_goods(rc_b, rc_c)?;
    let d = Bundle::two_goods(total_b - rc_b, total_c - rc_c)?;
    Ok((rc, d))
}

/// Marginal utility of further coconuts along the trade line:
/// `k·(θ - 2r·Q_C)`.
pub fn exchange_force(s: &ExchangeScenario, q_c: f64) -> f64 {
    s.k * (s.theta() - 2.0 * s.r * q_c)
}

/// Four holding series, the two utility series, and the Pareto monitor's
/// verdict for one simulated trade path.
///
/// Conservation is built in: D's series are defined by subtracting RC's
/// from the totals at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeTrajectory {
    pub times: Vec<f64>,
    pub q_b_rc: Vec<f64>,
    pub q_c_rc: Vec<f64>,
    pub q_b_d: Vec<f64>,
    pub q_c_d: Vec<f64>,
    pub u_rc: Vec<f64>,
    pub u_d: Vec<f64>,
    /// True when trade ran its course without the monitor intervening.
    pub pareto_ok: bool,
    /// Time of the first sample at which the state is frozen, if any.
    pub halt_time: Option<f64>,
}

impl ExchangeTrajectory {
    /// Builds the full trajectory from RC's coconut series, deriving RC's
    /// bananas from the conserved `θ`, D's holdings from the totals, and
    /// both utility series. No Pareto monitoring is applied; run
    /// [`pareto_monitor`] over the result to find violations.
    pub fn from_coconut_path(
        s: &ExchangeScenario,
        times: Vec<f64>,
        q_c_rc: Vec<f64>,
    ) -> Result<Self> {
        s.validate()?;
        if times.len() != q_c_rc.len() {
            return Err(Error::LengthMismatch);
        }
        if times.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: times.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime);
        }
        let theta = s.theta();
        let (total_b, total_c) = s.totals();
        let u_rc_spec = UtilitySpec::cobb_douglas(s.k);
        let u_d_spec = UtilitySpec::cobb_douglas(s.l);
        let n = times.len();
        let mut q_b_rc = Vec::with_capacity(n);
        let mut q_b_d = Vec::with_capacity(n);
        let mut q_c_d = Vec::with_capacity(n);
        let mut u_rc = Vec::with_capacity(n);
        let mut u_d = Vec::with_capacity(n);
        for &qc in &q_c_rc {
            let qb = theta - s.r * qc;
            q_b_rc.push(qb);
            q_b_d.push(total_b - qb);
            q_c_d.push(total_c - qc);
            u_rc.push(u_rc_spec.value(&Bundle::two_goods(qb, qc)?)?);
            u_d.push(u_d_spec.value(&Bundle::two_goods(total_b - qb, total_c - qc)?)?);
        }
        Ok(ExchangeTrajectory {
            times,
            q_b_rc,
            q_c_rc,
            q_b_d,
            q_c_d,
            u_rc,
            u_d,
            pareto_ok: true,
            halt_time: None,
        })
    }
}

/// Integrates `m·Q̇_C = k·(θ - 2r·Q_C)` for RC's coconuts with fixed-step
/// RK4, freezing the state at the first step that would lower either
/// agent's utility (beyond `1e-12` of its starting value).
pub fn simulate_exchange(
    s: &ExchangeScenario,
    cfg: &IntegratorConfig,
) -> Result<ExchangeTrajectory> {
    require_feasible(s)?;
    let rate = 2.0 * s.k * s.r / s.m;
    cfg.guard(rate)?;
    let times = cfg.times();
    let theta = s.theta();
    let force = |qc: f64| s.k * (theta - 2.0 * s.r * qc);
    let step = |qc: f64| {
        let dt = cfg.dt;
        let k1 = force(qc) / s.m;
        let k2 = force(qc + 0.5 * dt * k1) / s.m;
        let k3 = force(qc + 0.5 * dt * k2) / s.m;
        let k4 = force(qc + dt * k3) / s.m;
        qc + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let (total_b, total_c) = s.totals();
    let utilities = |qc: f64| {
        let qb = theta - s.r * qc;
        let u_rc = s.k * qb * qc;
        let u_d = s.l * (total_b - qb) * (total_c - qc);
        (u_rc, u_d)
    };

    let mut q_c = Vec::with_capacity(times.len());
    let mut u_rc = Vec::with_capacity(times.len());
    let mut u_d = Vec::with_capacity(times.len());
    let mut qc = s.endow_rc.1;
    let (mut cur_u_rc, mut cur_u_d) = utilities(qc);
    let tol_rc = 1e-12 * cur_u_rc.abs();
    let tol_d = 1e-12 * cur_u_d.abs();
    q_c.push(qc);
    u_rc.push(cur_u_rc);
    u_d.push(cur_u_d);
    let mut halt_time = None;
    for &t in &times[1..] {
        if halt_time.is_none() {
            let next = step(qc);
            let (next_u_rc, next_u_d) = utilities(next);
            if next_u_rc < cur_u_rc - tol_rc || next_u_d < cur_u_d - tol_d {
                halt_time = Some(t);
            } else {
                qc = next;
                cur_u_rc = next_u_rc;
                cur_u_d = next_u_d;
            }
        }
        q_c.push(qc);
        u_rc.push(cur_u_rc);
        u_d.push(cur_u_d);
    }

    let mut traj = ExchangeTrajectory::from_coconut_path(s, times, q_c)?;
    traj.u_rc = u_rc;
    traj.u_d = u_d;
    traj.pareto_ok = halt_time.is_none();
    traj.halt_time = halt_time;
    Ok(traj)
}

/// First time either utility series strictly decreases beyond `1e-12` of
/// its initial value, if any.
pub fn pareto_monitor(traj: &ExchangeTrajectory) -> Option<f64> {
    let tol_rc = 1e-12 * traj.u_rc[0].abs();
    let tol_d = 1e-12 * traj.u_d[0].abs();
    for i in 1..traj.times.len() {
        if traj.u_rc[i] < traj.u_rc[i - 1] - tol_rc || traj.u_d[i] < traj.u_d[i - 1] - tol_d {
            return Some(traj.times[i]);
        }
    }
    None
}
