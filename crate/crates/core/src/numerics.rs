//! Shared numerical helpers: finite differences on sampled grids, trapezoid
//! quadrature, bisection, golden-section search, and a small symmetric
//! eigensolver.
//!
//! All derivative estimates are second-order accurate, including at the grid
//! endpoints, so downstream residual tolerances can assume a uniform O(dt^2)
//! truncation budget.

/// Weights of the first derivative of the Lagrange interpolant through
/// `stencil` evaluated at `at`.
#[allow(clippy::needless_range_loop)] // skip-index products read best indexed
fn first_deriv_weights(stencil: &[f64], at: f64) -> Vec<f64> {
    let n = stencil.len();
    let mut w = vec![0.0; n];
    for j in 0..n {
        let mut denom = 1.0;
        for i in 0..n {
            if i != j {
                denom *= stencil[j] - stencil[i];
            }
        }
        let mut num = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            let mut prod = 1.0;
            for i in 0..n {
                if i != j && i != m {
                    prod *= at - stencil[i];
                }
            }
            num += prod;
        }
        w[j] = num / denom;
    }
    w
}

/// Weights of the second derivative of the Lagrange interpolant through
/// `stencil` evaluated at `at`.
#[allow(clippy::needless_range_loop)]
fn second_deriv_weights(stencil: &[f64], at: f64) -> Vec<f64> {
    let n = stencil.len();
    let mut w = vec![0.0; n];
    for j in 0..n {
        let mut denom = 1.0;
        for i in 0..n {
            if i != j {
                denom *= stencil[j] - stencil[i];
            }
        }
        let mut num = 0.0;
        for m in 0..n {
            if m == j {
                continue;
            }
            for l in 0..n {
                if l == j || l == m {
                    continue;
                }
                let mut prod = 1.0;
                for i in 0..n {
                    if i != j && i != m && i != l {
                        prod *= at - stencil[i];
                    }
                }
                num += prod;
            }
        }
        w[j] = num / denom;
    }
    w
}

fn apply(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

/// First derivative of a sampled signal, per sample.
///
/// Three-point stencils: central in the interior, one-sided at the ends.
/// Handles non-uniform grids. Panics if fewer than 3 samples.
pub fn derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert!(n >= 3, "derivative needs at least 3 samples");
    let mut out = vec![0.0; n];
    for i in 0..n {
        let lo = i.clamp(1, n - 2) - 1;
        let ts = &times[lo..lo + 3];
        let vs = &values[lo..lo + 3];
        out[i] = apply(&first_deriv_weights(ts, times[i]), vs);
    }
    out
}

/// Second derivative of a sampled signal, per sample.
///
/// Three-point central stencils in the interior; the endpoints differentiate
/// the cubic through the four nearest samples, keeping the truncation error
/// O(h^2) there as well. Panics if fewer than 4 samples.
pub fn second_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert!(n >= 4, "second_derivative needs at least 4 samples");
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let ts = &times[i - 1..i + 2];
        let vs = &values[i - 1..i + 2];
        out[i] = apply(&second_deriv_weights(ts, times[i]), vs);
    }
    out[0] = apply(&second_deriv_weights(&times[..4], times[0]), &values[..4]);
    out[n - 1] = apply(
        &second_deriv_weights(&times[n - 4..], times[n - 1]),
        &values[n - 4..],
    );
    out
}

/// Cumulative trapezoid integral of `values` over `times`; entry `i` holds
/// the integral from `times[0]` to `times[i]`.
pub fn trapezoid_cumulative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..times.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
        out.push(acc);
    }
    out
}

/// Root of `f` on `[lo, hi]` by bisection, to an interval shorter than
/// `tol`. Returns `None` when `f` does not change sign across the interval.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let sign_lo = f_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splittable at this precision
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Result of a golden-section minimization.
pub struct GoldenMin {
    pub x: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimum of a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Stops when the bracket is shorter than `rel_tol` relative to its
/// midpoint, or after `max_iter` shrink steps (reported via `converged`).
pub fn golden_section_min(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> GoldenMin {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        if b - a <= rel_tol * 0.5 * (a + b).abs() {
            converged = true;
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    GoldenMin {
        x: 0.5 * (a + b),
        iterations,
        converged,
    }
}

/// Eigenvector of the smallest eigenvalue of a symmetric 3x3 matrix, by
/// cyclic Jacobi rotations. Unit norm; orientation is not normalized here.
#[allow(clippy::needless_range_loop)]
pub fn smallest_eigenvector_3x3(m: [[f64; 3]; 3]) -> [f64; 3] {
    let mut a = m;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-15 * scale {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-18 * scale {
                continue;
            }
            let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for i in 0..3 {
                let aip = a[i][p];
                let aiq = a[i][q];
                a[i][p] = c * aip - s * aiq;
                a[i][q] = s * aip + c * aiq;
            }
            for j in 0..3 {
                let apj = a[p][j];
                let aqj = a[q][j];
                a[p][j] = c * apj - s * aqj;
                a[q][j] = s * apj + c * aqj;
            }
            for i in 0..3 {
                let vip = v[i][p];
                let viq = v[i][q];
                v[i][p] = c * vip - s * viq;
                v[i][q] = s * vip + c * viq;
            }
        }
    }
    let mut idx = 0;
    for i in 1..3 {
        if a[i][i] < a[idx][idx] {
            idx = i;
        }
    }
    let vec = [v[0][idx], v[1][idx], v[2][idx]];
    let norm = (vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2]).sqrt();
    [vec[0] / norm, vec[1] / norm, vec[2] / norm]
}
