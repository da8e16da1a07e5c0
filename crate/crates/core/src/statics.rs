//! Static equilibrium consumption via budget substitution.
//!
//! Substituting the budget into the utility reduces the problem to one
//! variable: `u(Q_B) = (k/p_C)·Q_B·(E - p_B·Q_B)` for the Cobb-Douglas case.
//! The optimum is the zero of `du/dQ_B`, which has the closed form
//! `Q_B* = E/(2 p_B)` (and `Q_C* = E/(2 p_C)` from the budget). For opaque
//! utilities the same zero is found by bisection on the finite-difference
//! derivative; no Lagrange-multiplier machinery is needed for a single
//! constraint this simple.

use crate::model::{fd_step, Bundle, UtilitySpec, ValidatedModel};
use crate::numerics::bisect;
use crate::{Error, Result};

/// Which good the budget substitution solves for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstitutedGood {
    B,
    C,
}

#[derive(Clone)]
enum ReducedKind {
    /// u(q) = coeff * q * (e - p_own * q); derivatives are exact.
    Quadratic { coeff: f64, e: f64, p_own: f64 },
    /// Opaque utility evaluated through the budget; derivatives by central
    /// finite differences.
    Numeric {
        utility: UtilitySpec,
        e: f64,
        p_own: f64,
        p_other: f64,
        good: SubstitutedGood,
    },
}

/// The budget-substituted utility of a single good, with derivatives.
#[derive(Clone)]
pub struct ReducedUtility {
    kind: ReducedKind,
}

impl ReducedUtility {
    fn bundle(&self, q: f64) -> Bundle {
        match &self.kind {
            ReducedKind::Quadratic { .. } => unreachable!("quadratic path never builds bundles"),
            ReducedKind::Numeric {
                e,
                p_own,
                p_other,
                good,
                ..
            } => {
                let other = (e - p_own * q) / p_other;
                let (q_b, q_c) = match good {
                    SubstitutedGood::B => (q, other),
                    SubstitutedGood::C => (other, q),
                };
                // finite-difference probes step just past the feasible box
                Bundle::two_goods_unchecked(q_b, q_c)
            }
        }
    }

    /// u(q), in utils.
    pub fn value(&self, q: f64) -> f64 {
        match &self.kind {
            ReducedKind::Quadratic { coeff, e, p_own } => coeff * q * (e - p_own * q),
            ReducedKind::Numeric { utility, .. } => utility
                .value(&self.bundle(q))
                .expect("two-good bundle by construction"),
        }
    }

    /// du/dq. Exact for the quadratic case, central finite difference with
    /// step `max(1e-6, 1e-6*|q|)` otherwise.
    pub fn derivative(&self, q: f64) -> f64 {
        match &self.kind {
            ReducedKind::Quadratic { coeff, e, p_own } => coeff * (e - 2.0 * p_own * q),
            ReducedKind::Numeric { .. } => {
                let h = fd_step(q);
                (self.value(q + h) - self.value(q - h)) / (2.0 * h)
            }
        }
    }

    /// d2u/dq2. The numeric path uses a wider step (1e-4 scale) than the
    /// gradient: the second difference divides by h^2, and at h = 1e-6 the
    /// round-off term eps/h^2 would swamp desk-scale curvatures.
    pub fn second_derivative(&self, q: f64) -> f64 {
        match &self.kind {
            ReducedKind::Quadratic { coeff, p_own, .. } => -2.0 * coeff * p_own,
            ReducedKind::Numeric { .. } => {
                let h = (1e-4 * q.abs()).max(1e-4);
                (self.value(q + h) - 2.0 * self.value(q) + self.value(q - h)) / (h * h)
            }
        }
    }

    /// Upper end of the feasible interval `[0, E/p_own]`.
    pub fn budget_cap(&self) -> f64 {
        match &self.kind {
            ReducedKind::Quadratic { e, p_own, .. } => e / p_own,
            ReducedKind::Numeric { e, p_own, .. } => e / p_own,
        }
    }
}

/// Budget-substituted Cobb-Douglas utility of `Q_B`, with exact derivatives.
pub fn substitute_budget(model: &ValidatedModel) -> ReducedUtility {
    ReducedUtility {
        kind: ReducedKind::Quadratic {
            coeff: model.k / model.p_c,
            e: model.e,
            p_own: model.p_b,
        },
    }
}

/// Budget substitution for an arbitrary utility and either good.
///
/// A `CobbDouglas` spec yields the exact quadratic reduction; a `Custom`
/// spec is evaluated through the budget with finite-difference derivatives.
pub fn substitute_budget_with(
    model: &ValidatedModel,
    utility: &UtilitySpec,
    good: SubstitutedGood,
) -> ReducedUtility {
    let (p_own, p_other) = match good {
        SubstitutedGood::B => (model.p_b, model.p_c),
        SubstitutedGood::C => (model.p_c, model.p_b),
    };
    match utility {
        UtilitySpec::CobbDouglas { k } => ReducedUtility {
            kind: ReducedKind::Quadratic {
                coeff: k / p_other,
                e: model.e,
                p_own,
            },
        },
        UtilitySpec::Custom { .. } => ReducedUtility {
            kind: ReducedKind::Numeric {
                utility: utility.clone(),
                e: model.e,
                p_own,
                p_other,
                good,
            },
        },
    }
}

/// The utility-maximizing bundle on the budget line.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticOptimum {
    pub bundle: Bundle,
    /// Utility at the optimum, in utils.
    pub objective: f64,
    /// Whether the reduced utility curves downward at the optimum.
    pub second_order_ok: bool,
}

/// Closed-form optimum of the Cobb-Douglas model: `Q* = E/(2p)` per good.
///
/// The utility coefficient `k` scales the objective but not the location of
/// the optimum.
pub fn solve_static_optimum(model: &ValidatedModel) -> StaticOptimum {
    let q_b = model.e / (2.0 * model.p_b);
    let q_c = model.e / (2.0 * model.p_c);
    let bundle = Bundle::two_goods(q_b, q_c).expect("positive parameters");
    let reduced = substitute_budget(model);
    StaticOptimum {
        objective: UtilitySpec::cobb_douglas(model.k)
            .value(&bundle)
            .expect("two-good bundle"),
        second_order_ok: reduced.second_derivative(q_b) < 0.0,
        bundle,
    }
}

/// Generic optimum: bisection on `du/dQ_B` over `[0, E/p_B]`.
///
/// The interval is narrowed to `1e-12 * E/p_B`. Errors with
/// [`Error::NoInteriorOptimum`] when the derivative does not change sign on
/// the open interval (a corner solution).
pub fn solve_static_optimum_with(
    model: &ValidatedModel,
    utility: &UtilitySpec,
) -> Result<StaticOptimum> {
    let reduced = substitute_budget_with(model, utility, SubstitutedGood::B);
    let cap = reduced.budget_cap();
    let q_b =
        bisect(|q| reduced.derivative(q), 0.0, cap, 1e-12 * cap).ok_or(Error::NoInteriorOptimum)?;
    let q_c = (model.e - model.p_b * q_b) / model.p_c;
    let bundle = Bundle::two_goods(q_b, q_c.max(0.0))?;
    Ok(StaticOptimum {
        objective: utility.value(&bundle)?,
        second_order_ok: reduced.second_derivative(q_b) < 0.0,
        bundle,
    })
}
