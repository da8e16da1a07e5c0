//! Inverse mode: recover parametric structure from observed signals.
//!
//! The forward model produces single-rate exponentials, so fitting reduces
//! to separable least squares: for each candidate rate the amplitudes are a
//! closed-form linear solve, and the rate itself is a one-dimensional
//! golden-section search over the residual sum of squares. Beyond curve
//! fits, this module detects when two signals' derivatives are collinear
//! and reconstructs the affine constraint (the budget line) they trace out.

use crate::numerics::{derivative, golden_section_min, smallest_eigenvector_3x3};
use crate::{Error, Result, Trajectory};

/// A single sampled signal on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch);
        }
        if times.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: times.len(),
            });
        }
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime);
        }
        Ok(SampledSignal { times, values })
    }

    /// Extracts one good's series from a trajectory.
    pub fn from_trajectory(traj: &Trajectory, good: &crate::GoodId) -> Result<Self> {
        SampledSignal::new(traj.times().to_vec(), traj.signal(good)?.to_vec())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.times == other.times
    }
}

/// The parametric form recovered by a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitForm {
    /// `Q(t) = amplitude * (1 - exp(-rate * t))`.
    Saturation { amplitude: f64, rate: f64 },
    /// `N(t) = offset + amplitude * exp(-rate * t)`.
    ExponentialAffine {
        offset: f64,
        amplitude: f64,
        rate: f64,
    },
}

/// Outcome of a separable least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub form: FitForm,
    /// Residual sum of squares at the fitted parameters.
    pub rss: f64,
    /// Golden-section shrink steps taken for the rate.
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn rate(&self) -> f64 {
        match self.form {
            FitForm::Saturation { rate, .. } => rate,
            FitForm::ExponentialAffine { rate, .. } => rate,
        }
    }
}

const RATE_FLOOR: f64 = 1e-6;
const RATE_BRACKET_TOL: f64 = 1e-10;

fn rate_ceiling(times: &[f64]) -> f64 {
    10.0 / (times[times.len() - 1] - times[0])
}

/// A fitted rate pinned at the search floor means the window shows no
/// measurable decay (the exponential degenerates to an affine trend), so
/// the parameters are not identifiable and the fit is reported unconverged.
fn rate_identifiable(rate: f64) -> bool {
    rate > 10.0 * RATE_FLOOR
}

/// Fits `Q(t) = j * (1 - exp(-rate * t))` by separable least squares.
///
/// For each candidate rate the optimal amplitude is the closed-form
/// projection onto the basis `1 - exp(-rate*t)`; the rate is found by
/// golden-section search on the RSS over `[1e-6, 10/(t_last - t_first)]`.
pub fn fit_saturation(signal: &SampledSignal) -> Result<FitResult> {
    if signal.times.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: signal.times.len(),
        });
    }
    if signal.is_constant() {
        return Err(Error::ConstantSignal);
    }
    let t = &signal.times;
    let y = &signal.values;
    let solve = |rate: f64| -> (f64, f64) {
        let mut gy = 0.0;
        let mut gg = 0.0;
        for (t, y) in t.iter().zip(y) {
            let g = 1.0 - (-rate * t).exp();
            gy += g * y;
            gg += g * g;
        }
        let amplitude = if gg > 0.0 { gy / gg } else { 0.0 };
        let rss = t
            .iter()
            .zip(y)
            .map(|(t, y)| {
                let g = 1.0 - (-rate * t).exp();
                let r = y - amplitude * g;
                r * r
            })
            .sum();
        (amplitude, rss)
    };
    let min = golden_section_min(
        |rate| solve(rate).1,
        RATE_FLOOR,
        rate_ceiling(t),
        RATE_BRACKET_TOL,
        300,
    );
    let (amplitude, rss) = solve(min.x);
    Ok(FitResult {
        form: FitForm::Saturation {
            amplitude,
            rate: min.x,
        },
        rss,
        iterations: min.iterations,
        converged: min.converged && rate_identifiable(min.x),
    })
}

/// Fits `N(t) = a + b * exp(-rate * t)`: two linear parameters per candidate
/// rate, rate by golden-section search as in [`fit_saturation`].
pub fn fit_exponential_affine(signal: &SampledSignal) -> Result<FitResult> {
    if signal.times.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: signal.times.len(),
        });
    }
    if signal.is_constant() {
        return Err(Error::ConstantSignal);
    }
    let t = &signal.times;
    let y = &signal.values;
    let n = t.len() as f64;
    let solve = |rate: f64| -> (f64, f64, f64) {
        // normal equations for y ~ a + b g with g = exp(-rate t)
        let mut sg = 0.0;
        let mut sgg = 0.0;
        let mut sy = 0.0;
        let mut sgy = 0.0;
        for (t, y) in t.iter().zip(y) {
            let g = (-rate * t).exp();
            sg += g;
            sgg += g * g;
            sy += y;
            sgy += g * y;
        }
        let det = n * sgg - sg * sg;
        let (a, b) = if det.abs() > 1e-300 {
            ((sy * sgg - sg * sgy) / det, (n * sgy - sg * sy) / det)
        } else {
            (sy / n, 0.0)
        };
        let rss = t
            .iter()
            .zip(y)
            .map(|(t, y)| {
                let r = y - a - b * (-rate * t).exp();
                r * r
            })
            .sum();
        (a, b, rss)
    };
    let min = golden_section_min(
        |rate| solve(rate).2,
        RATE_FLOOR,
        rate_ceiling(t),
        RATE_BRACKET_TOL,
        300,
    );
    let (offset, amplitude, rss) = solve(min.x);
    Ok(FitResult {
        form: FitForm::ExponentialAffine {
            offset,
            amplitude,
            rate: min.x,
        },
        rss,
        iterations: min.iterations,
        converged: min.converged && rate_identifiable(min.x),
    })
}

/// Whether the changes of two signals move in lockstep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearityReport {
    /// Slope of the second derivative series on the first, through the
    /// origin.
    pub slope: f64,
    /// Uncentered r-squared of that regression.
    pub r_squared: f64,
    /// Reporting convention: `r_squared > threshold`.
    pub collinear: bool,
}

/// Default reporting threshold for [`detect_collinearity`].
pub const COLLINEARITY_THRESHOLD: f64 = 0.999;

/// Regresses the derivative of `sig_b` on the derivative of `sig_a`
/// (central differences, shared grid) through the origin.
pub fn detect_collinearity(
    sig_a: &SampledSignal,
    sig_b: &SampledSignal,
) -> Result<CollinearityReport> {
    detect_collinearity_with(sig_a, sig_b, COLLINEARITY_THRESHOLD)
}

/// [`detect_collinearity`] with a caller-chosen threshold.
pub fn detect_collinearity_with(
    sig_a: &SampledSignal,
    sig_b: &SampledSignal,
    threshold: f64,
) -> Result<CollinearityReport> {
    if !sig_a.same_grid(sig_b) {
        return Err(Error::GridMismatch);
    }
    if sig_a.times.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: sig_a.times.len(),
        });
    }
    let da = derivative(&sig_a.times, &sig_a.values);
    let db = derivative(&sig_b.times, &sig_b.values);
    let sxx: f64 = da.iter().map(|x| x * x).sum();
    let syy: f64 = db.iter().map(|y| y * y).sum();
    let sxy: f64 = da.iter().zip(&db).map(|(x, y)| x * y).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r_squared = if sxx > 0.0 && syy > 0.0 {
        ((sxy * sxy) / (sxx * syy)).min(1.0)
    } else {
        0.0
    };
    Ok(CollinearityReport {
        slope,
        r_squared,
        collinear: r_squared > threshold,
    })
}

/// The affine relation `w_b·Q_B + w_c·Q_C + w_0 ≈ 0` best supported by two
/// signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintEstimate {
    /// Unit-norm weights `(w_b, w_c, w_0)`; the first nonzero entry is
    /// positive.
    pub weights: [f64; 3],
    /// Largest absolute deviation of the combination over the window.
    pub residual: f64,
}

/// Finds the unit-norm weights minimizing the sum of squared combinations,
/// via the smallest eigendirection of the stacked-sample normal matrix.
///
/// Two identically zero signals carry no constraint information; that
/// degenerate case returns the sentinel weights `(0, 0, 1)` with residual 0.
pub fn reconstruct_constraint(
    sig_a: &SampledSignal,
    sig_b: &SampledSignal,
) -> Result<ConstraintEstimate> {
    if !sig_a.same_grid(sig_b) {
        return Err(Error::GridMismatch);
    }
    if sig_a.times.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: sig_a.times.len(),
        });
    }
    let all_zero = |s: &SampledSignal| s.values.iter().all(|v| *v == 0.0);
    if all_zero(sig_a) && all_zero(sig_b) {
        return Ok(ConstraintEstimate {
            weights: [0.0, 0.0, 1.0],
            residual: 0.0,
        });
    }
    let mut m = [[0.0f64; 3]; 3];
    for (a, b) in sig_a.values.iter().zip(&sig_b.values) {
        let row = [*a, *b, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    let mut w = smallest_eigenvector_3x3(m);
    if let Some(first) = w.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in &mut w {
                *x = -*x;
            }
        }
    }
    let residual = sig_a
        .values
        .iter()
        .zip(&sig_b.values)
        .map(|(a, b)| (w[0] * a + w[1] * b + w[2]).abs())
        .fold(0.0f64, f64::max);
    Ok(ConstraintEstimate {
        weights: w,
        residual,
    })
}

/// Model parameters implied by a pair of saturation fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredParams {
    /// Budget implied by the banana amplitude: `2 p_B j_B`.
    pub e_from_b: f64,
    /// Budget implied by the coconut amplitude: `2 p_C j_C`.
    pub e_from_c: f64,
    /// Dissipative coefficient `k/m_B = rate_B p_C / (2 p_B)`.
    pub k_over_m_b: f64,
    /// Dissipative coefficient `k/m_C = rate_C p_B / (2 p_C)`.
    pub k_over_m_c: f64,
    /// `|e_from_b - e_from_c| / max(e_from_b, e_from_c)`: how consistently
    /// the two signals point at one budget.
    pub consistency_gap: f64,
}

/// Inverts the saturation fits of the two goods into `(E, k/m_B, k/m_C)`.
///
/// The amplitude of each signal is the static optimum `E/(2p)`, and the
/// rate per good is `2 (k/m)(p_own/p_other)`; both invert in closed form.
pub fn recover_model_params(
    fit_b: &FitResult,
    fit_c: &FitResult,
    p_b: f64,
    p_c: f64,
) -> Result<RecoveredParams> {
    let saturation = |fit: &FitResult| -> Result<(f64, f64)> {
        match fit.form {
            FitForm::Saturation { amplitude, rate } if fit.converged => Ok((amplitude, rate)),
            _ => Err(Error::UnconvergedFit),
        }
    };
    let (j_b, rate_b) = saturation(fit_b)?;
    let (j_c, rate_c) = saturation(fit_c)?;
    let e_from_b = 2.0 * p_b * j_b;
    let e_from_c = 2.0 * p_c * j_c;
    let denom = e_from_b.abs().max(e_from_c.abs());
    let consistency_gap = if denom > 0.0 {
        (e_from_b - e_from_c).abs() / denom
    } else {
        0.0
    };
    Ok(RecoveredParams {
        e_from_b,
        e_from_c,
        k_over_m_b: rate_b * p_c / (2.0 * p_b),
        k_over_m_c: rate_c * p_b / (2.0 * p_c),
        consistency_gap,
    })
}
