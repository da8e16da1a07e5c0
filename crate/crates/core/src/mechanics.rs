//! Lagrangian/Hamiltonian diagnostics over sampled trajectories.
//!
//! Lifting the first-order consumption law to second order gives
//! `m·Q̈ = -2k(p_B/p_C)·Q̇`: a pure drag. The line integral of a
//! velocity-dependent force over position is path-dependent, so no scalar
//! potential exists and the Euler-Lagrange equation must carry the force on
//! the right-hand side, `d/dt(∂L/∂Q̇) - ∂L/∂Q = F_d` with `L = ½·m·Q̇²`.
//! This module checks sampled trajectories against that equation and its
//! Hamiltonian twin, classifies sampled force fields, probes the
//! path-dependence of `-∫F·dQ`, and audits how kinetic energy drains through
//! the drag channel.
//!
//! All derivatives along trajectories are central finite differences
//! (one-sided at the endpoints, still second order), and all line/time
//! integrals are trapezoid sums, so every residual here carries an O(dt^2)
//! truncation budget.

use std::sync::Arc;

use crate::model::{Trajectory, ValidatedModel};
use crate::numerics::{derivative, second_derivative, trapezoid_cumulative};
use crate::{Error, GoodId, Result};

/// A point of phase space for one good: position, velocity, and the
/// conjugate momentum `pi = m·v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: f64,
    pub v: f64,
    pub pi: f64,
}

impl PhaseState {
    pub fn new(q: f64, v: f64, mass: f64) -> Self {
        PhaseState { q, v, pi: mass * v }
    }
}

type PositionForce = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PhaseForce = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A force over phase space split into a position-only (conservative) part
/// and a velocity-dependent (dissipative) part.
///
/// Invariants: `total = conservative + dissipative` pointwise, and the
/// dissipative part vanishes at rest.
#[derive(Clone)]
pub struct ForceSpec {
    conservative: PositionForce,
    dissipative: PhaseForce,
}

impl ForceSpec {
    pub fn new(
        conservative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dissipative: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ForceSpec {
            conservative: Arc::new(conservative),
            dissipative: Arc::new(dissipative),
        }
    }

    /// A purely position-dependent force.
    pub fn conservative_only(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ForceSpec::new(f, |_, _| 0.0)
    }

    pub fn conservative(&self, q: f64) -> f64 {
        (self.conservative)(q)
    }

    pub fn dissipative(&self, q: f64, v: f64) -> f64 {
        (self.dissipative)(q, v)
    }

    pub fn total(&self, q: f64, v: f64) -> f64 {
        self.conservative(q) + self.dissipative(q, v)
    }
}

/// The force of the consumption model in its second-order form: no
/// conservative component at all, and a linear drag
/// `F_d(Q, v) = -2k(p_B/p_C)·v` that opposes the consumption rate.
pub fn build_force_spec(model: &ValidatedModel) -> ForceSpec {
    let coeff = 2.0 * model.k * model.p_b / model.p_c;
    ForceSpec::new(|_| 0.0, move |_, v| -coeff * v)
}

fn require_samples(traj: &Trajectory, needed: usize) -> Result<()> {
    if traj.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: traj.len(),
        });
    }
    Ok(())
}

/// Residual of the dissipative Euler-Lagrange equation along a sampled
/// trajectory of good B:
/// `r(t) = d/dt(∂L/∂Q̇) - ∂L/∂Q - F_d = m·Q̈ - F_c(Q) - F_d(Q, Q̇)`.
///
/// A trajectory that actually solves the dynamics leaves only the
/// finite-difference truncation, O(dt^2).
pub fn lagrangian_residual(
    traj: &Trajectory,
    model: &ValidatedModel,
    force: &ForceSpec,
) -> Result<Vec<f64>> {
    require_samples(traj, 5)?;
    let q = traj.signal(&GoodId::b())?;
    let t = traj.times();
    let v = derivative(t, q);
    let a = second_derivative(t, q);
    Ok((0..q.len())
        .map(|i| model.m_b * a[i] - force.conservative(q[i]) - force.dissipative(q[i], v[i]))
        .collect())
}

/// Hamiltonian of a phase-space state.
///
/// `KineticOnly` is the internally consistent choice for the pure-drag
/// model: with no conservative force there is no potential, so
/// `H = pi^2/(2m)`. `PaperLiteral` additionally carries the linear term
/// `-(k/p_C)·E·Q`, i.e. it treats the marginal-utility coefficient at zero
/// consumption as a potential slope even though the force it encodes is
/// classified as dissipative; it is kept as a diagnostic variant, and its
/// second Hamilton-Jacobi residual is offset by exactly `-(k/p_C)·E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianVariant {
    #[default]
    KineticOnly,
    PaperLiteral,
}

/// Evaluates the selected Hamiltonian variant, in utils.
pub fn hamiltonian(state: &PhaseState, model: &ValidatedModel, variant: HamiltonianVariant) -> f64 {
    let kinetic = state.pi * state.pi / (2.0 * model.m_b);
    match variant {
        HamiltonianVariant::KineticOnly => kinetic,
        HamiltonianVariant::PaperLiteral => kinetic - (model.k / model.p_c) * model.e * state.q,
    }
}

/// Residuals of the Hamilton-Jacobi pair along a sampled trajectory:
/// `r1 = Q̇ - ∂H/∂π` and `r2 = π̇ + ∂H/∂Q - F_d`.
///
/// With only position samples available, `π` is reconstructed as `m·Q̇` from
/// the same finite differences, so `r1` vanishes identically and is reported
/// as a transform-consistency check; `r2` carries the dynamics.
pub fn hamilton_jacobi_residuals(
    traj: &Trajectory,
    model: &ValidatedModel,
    force: &ForceSpec,
    variant: HamiltonianVariant,
) -> Result<(Vec<f64>, Vec<f64>)> {
    require_samples(traj, 5)?;
    let q = traj.signal(&GoodId::b())?;
    let t = traj.times();
    let v = derivative(t, q);
    let a = second_derivative(t, q);
    let dh_dq = match variant {
        HamiltonianVariant::KineticOnly => 0.0,
        HamiltonianVariant::PaperLiteral => -(model.k / model.p_c) * model.e,
    };
    let r1 = (0..q.len())
        .map(|i| {
            let pi = model.m_b * v[i];
            v[i] - pi / model.m_b
        })
        .collect();
    let r2 = (0..q.len())
        .map(|i| model.m_b * a[i] + dh_dq - force.dissipative(q[i], v[i]))
        .collect();
    Ok((r1, r2))
}

/// Line integrals `I = -∫ F·dQ` along two polylines in `(Q, v)` space, by
/// the trapezoid rule over the polyline vertices, plus their difference.
///
/// For a velocity-dependent force the two integrals differ even though the
/// paths share endpoints: the work done depends on how fast each stretch of
/// position was traversed.
pub fn path_dependence_probe(
    force: &ForceSpec,
    path_a: &[PhaseState],
    path_b: &[PhaseState],
) -> Result<(f64, f64, f64)> {
    let ends = |p: &[PhaseState]| -> Result<(PhaseState, PhaseState)> {
        match (p.first(), p.last()) {
            (Some(a), Some(b)) if p.len() >= 2 => Ok((*a, *b)),
            _ => Err(Error::TooFewSamples {
                needed: 2,
                got: p.len(),
            }),
        }
    };
    let (a0, a1) = ends(path_a)?;
    let (b0, b1) = ends(path_b)?;
    let same = |x: PhaseState, y: PhaseState| x.q == y.q && x.v == y.v;
    if !same(a0, b0) || !same(a1, b1) {
        return Err(Error::EndpointMismatch);
    }
    let integral = |path: &[PhaseState]| -> f64 {
        path.windows(2)
            .map(|w| {
                let f0 = force.total(w[0].q, w[0].v);
                let f1 = force.total(w[1].q, w[1].v);
                -0.5 * (f0 + f1) * (w[1].q - w[0].q)
            })
            .sum()
    };
    let i_a = integral(path_a);
    let i_b = integral(path_b);
    Ok((i_a, i_b, i_a - i_b))
}

/// Kinetic energy and dissipation series along a trajectory.
///
/// `balance_residual` tracks `T(t) - T(0) - dissipated(t)`; for a trajectory
/// driven by the dissipative force alone it is bounded by the quadrature
/// truncation, O(dt^2).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAudit {
    /// `T(t) = ½·m·v²` per sample.
    pub kinetic: Vec<f64>,
    /// Cumulative `∫ F_d·v dτ` per sample (negative for a drag).
    pub dissipated: Vec<f64>,
    /// `T(t) - T(0) - dissipated(t)` per sample.
    pub balance_residual: Vec<f64>,
}

/// Audits the kinetic-energy balance of good B along a trajectory.
pub fn energy_audit(
    traj: &Trajectory,
    model: &ValidatedModel,
    force: &ForceSpec,
) -> Result<EnergyAudit> {
    require_samples(traj, 5)?;
    let q = traj.signal(&GoodId::b())?;
    let t = traj.times();
    let v = derivative(t, q);
    let kinetic: Vec<f64> = v.iter().map(|v| 0.5 * model.m_b * v * v).collect();
    let power: Vec<f64> = (0..q.len())
        .map(|i| force.dissipative(q[i], v[i]) * v[i])
        .collect();
    let dissipated = trapezoid_cumulative(t, &power);
    let balance_residual = (0..q.len())
        .map(|i| kinetic[i] - kinetic[0] - dissipated[i])
        .collect();
    Ok(EnergyAudit {
        kinetic,
        dissipated,
        balance_residual,
    })
}

/// Verdict of [`classify_force`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceClass {
    Conservative,
    Dissipative,
    Mixed,
}

impl ForceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForceClass::Conservative => "conservative",
            ForceClass::Dissipative => "dissipative",
            ForceClass::Mixed => "mixed",
        }
    }
}

/// Force samples over a rectangular `(Q, v)` grid.
#[derive(Debug, Clone)]
pub struct ForceGrid {
    q_values: Vec<f64>,
    v_values: Vec<f64>,
    /// Row-major: `samples[i][j] = F(q_values[i], v_values[j])`.
    samples: Vec<Vec<f64>>,
}

impl ForceGrid {
    pub fn new(q_values: Vec<f64>, v_values: Vec<f64>, samples: Vec<Vec<f64>>) -> Result<Self> {
        let distinct = |xs: &[f64]| xs.len() >= 2 && xs.windows(2).all(|w| w[1] > w[0]);
        if !distinct(&q_values) || !distinct(&v_values) {
            return Err(Error::DegenerateGrid);
        }
        if samples.len() != q_values.len() || samples.iter().any(|row| row.len() != v_values.len())
        {
            return Err(Error::DegenerateGrid);
        }
        Ok(ForceGrid {
            q_values,
            v_values,
            samples,
        })
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn v_values(&self) -> &[f64] {
        &self.v_values
    }

    /// Samples a force field on the cartesian product of the given axes.
    pub fn sample(
        force: impl Fn(f64, f64) -> f64,
        q_values: Vec<f64>,
        v_values: Vec<f64>,
    ) -> Result<Self> {
        let samples = q_values
            .iter()
            .map(|&q| v_values.iter().map(|&v| force(q, v)).collect())
            .collect();
        ForceGrid::new(q_values, v_values, samples)
    }
}

/// Classifies a sampled force field.
///
/// Conservative iff the samples carry no velocity dependence; dissipative
/// iff the force vanishes on the `v = 0` axis (interpolated when the grid
/// does not contain it); mixed otherwise. Tolerance is `1e-9` of the largest
/// sampled magnitude.
pub fn classify_force(grid: &ForceGrid) -> ForceClass {
    let scale = grid
        .samples
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return ForceClass::Conservative; // identically zero: position-only
    }
    let tol = 1e-9 * scale;
    let v_independent = grid
        .samples
        .iter()
        .all(|row| row.iter().all(|&f| (f - row[0]).abs() < tol));
    if v_independent {
        return ForceClass::Conservative;
    }
    // force at v = 0 per position row, interpolating between the
    // bracketing velocity samples when the axis is not on the grid
    let at_rest_vanishes = grid.samples.iter().all(|row| {
        let f0 = match grid.v_values.iter().position(|&v| v == 0.0) {
            Some(j) => row[j],
            None => {
                let j = grid.v_values.partition_point(|&v| v < 0.0);
                if j == 0 || j == grid.v_values.len() {
                    // zero lies outside the sampled band; nearest sample
                    let j = j.min(grid.v_values.len() - 1);
                    row[j]
                } else {
                    let (v0, v1) = (grid.v_values[j - 1], grid.v_values[j]);
                    let w = -v0 / (v1 - v0);
                    row[j - 1] * (1.0 - w) + row[j] * w
                }
            }
        };
        f0.abs() < tol
    });
    if at_rest_vanishes {
        ForceClass::Dissipative
    } else {
        ForceClass::Mixed
    }
}
