//! Utility-driven consumption and exchange dynamics.
//!
//! A two-good economy is described by a Cobb-Douglas utility `U = k·Q_B·Q_C`
//! and a linear budget `E = p_B·Q_B + p_C·Q_C`. Treating marginal utility as a
//! generalized force on the consumption rate, `m·Q̇ = ∂U/∂Q`, turns the static
//! optimum into the attractor of a first-order flow. This crate provides:
//!
//! - [`model`]: domain types, validation, utility evaluation and gradients;
//! - [`statics`]: the budget-substituted optimum (closed form and a generic
//!   bisection path for opaque utilities);
//! - [`dynamics`]: the force law, its analytic solution, and fixed-step RK4
//!   integration of the first- and second-order forms;
//! - [`mechanics`]: Lagrangian/Hamiltonian residual diagnostics, dissipative
//!   force classification, path-dependence probes, and an energy audit;
//! - [`exchange`]: a two-agent fixed-ratio trade economy with a Pareto
//!   monitor that halts disadvantageous trade;
//! - [`inference`]: inverse mode: fitting saturation/decay signal forms,
//!   collinearity detection, linear-constraint reconstruction, and parameter
//!   recovery from observed trajectories.
//!
//! All types are immutable values after construction and all operations are
//! pure functions, so everything here is safe to call concurrently.

pub mod dynamics;
pub mod exchange;
pub mod inference;
pub mod mechanics;
pub mod model;
pub mod numerics;
pub mod statics;

pub use model::{Bundle, ConsumptionModel, GoodId, Trajectory, UtilitySpec, ValidatedModel};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by validation and the numerical operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter {0} must be positive and finite")]
    NonPositiveParameter(&'static str),
    #[error("initial quantity {0} must be non-negative and finite")]
    NegativeInitialQuantity(&'static str),
    #[error("bundle is missing good {0}")]
    MissingGood(String),
    #[error("trajectory times must be strictly increasing")]
    NonMonotoneTime,
    #[error("trajectory values must be finite")]
    NonFiniteValue,
    #[error("signal lengths do not match the time grid")]
    LengthMismatch,
    #[error("reduced utility derivative has no sign change on the interior of [0, E/p]")]
    NoInteriorOptimum,
    #[error("integrator window needs 0 < dt <= t_end, got dt={dt}, t_end={t_end}")]
    BadIntegratorConfig { dt: f64, t_end: f64 },
    #[error("step size {dt} is unstable for rate {rate}: dt*rate must stay below 0.5")]
    StepTooLarge { dt: f64, rate: f64 },
    #[error("operation needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("paths must share both endpoints in (Q, v) space")]
    EndpointMismatch,
    #[error("force grid needs at least two distinct positions and velocities")]
    DegenerateGrid,
    #[error("endowment quantity {0} is zero; marginal rate of substitution is undefined")]
    DegenerateEndowment(&'static str),
    #[error("no gains from trade: ratio bounds collapse ({r_min} >= {r_max})")]
    NoGainsFromTrade { r_min: f64, r_max: f64 },
    #[error("trade ratio {r} lies outside the feasible band [{r_min}, {r_max}]")]
    InfeasibleRatio { r: f64, r_min: f64, r_max: f64 },
    #[error("signal is constant; nothing to fit")]
    ConstantSignal,
    #[error("signals are sampled on different time grids")]
    GridMismatch,
    #[error("fit did not converge; cannot recover parameters from it")]
    UnconvergedFit,
}
