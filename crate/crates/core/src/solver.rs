//! Root finding and scalar minimization for the optimal displacement.
//!
//! The optimal displacement at fixed transmittance solves
//! `ξ√T·α = β·tanh(2ηξ√T·αβ)`. The left side is constant and the right side is
//! strictly increasing in `β > 0`, so the root is unique and plain bisection
//! converges unconditionally.
//!
//! At fixed auxiliary amplitude `γ` the transmittance is found by minimizing
//! `p(T)` directly with `β = √(1 − T)·γ`; the closed-form stationarity
//! condition is only evaluated afterwards as a residual check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::receivers::{
    displacement_error, DetectorModel, DiscriminationProblem, DisplacementSetup,
};

/// Residual tolerance for the optimal-displacement condition.
pub const ROOT_TOL: f64 = 1e-10;
/// Argument tolerance for scalar minimization.
pub const ARG_TOL: f64 = 1e-8;
/// Stationarity residual tolerance for the optimal transmittance.
pub const STATIONARITY_TOL: f64 = 1e-8;
/// Iteration cap shared by all solvers.
pub const MAX_ITER: usize = 200;
/// Step used by the local-minimizer postcondition of [`optimal_beta`].
pub const MINIMIZER_PROBE: f64 = 1e-4;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub root: f64,
    /// `|f(root)|` for root finders; half-width of the final bracket for
    /// [`minimize_scalar`]; stationarity residual for [`optimal_transmittance`].
    pub residual: f64,
    pub iterations: usize,
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidBracket { lo, hi })
    }
}

/// Bisection on a continuous `f` with `f(lo)·f(hi) < 0`.
///
/// Stops once the bracket is narrower than `xtol` (or cannot be split any
/// further in floating point) and returns the endpoint with smaller `|f|`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<RootResult>
where
    F: FnMut(f64) -> f64,
{
    check_bracket(lo, hi)?;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(RootResult { root: a, residual: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, residual: 0.0, iterations: 0 });
    }
    if !(fa.signum() != fb.signum() && fa.is_finite() && fb.is_finite()) {
        return Err(Error::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }
    let mut iterations = 0;
    while b - a > xtol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        if iterations > MAX_ITER {
            return Err(Error::NonConvergence {
                what: "bisection",
                iterations,
                residual: fa.abs().min(fb.abs()),
            });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(RootResult { root: mid, residual: 0.0, iterations });
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    let (root, residual) = if fa.abs() <= fb.abs() { (a, fa.abs()) } else { (b, fb.abs()) };
    Ok(RootResult { root, residual, iterations })
}

/// Golden-section minimization of `f` on `[lo, hi]`.
///
/// `f` must be unimodal on the bracket; this is not checked. The result is a
/// deterministic function of `(f, bracket, tol)`.
pub fn minimize_scalar<F>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<RootResult>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    check_bracket(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidBracket { lo: a, hi: b });
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a > 2.0 * tol {
        iterations += 1;
        if iterations > MAX_ITER {
            return Err(Error::NonConvergence {
                what: "golden-section search",
                iterations,
                residual: 0.5 * (b - a),
            });
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let root = if f1 <= f2 { x1 } else { x2 };
    Ok(RootResult {
        root,
        residual: 0.5 * (b - a),
        iterations,
    })
}

fn require_discriminable(problem: &DiscriminationProblem, det: &DetectorModel) -> Result<()> {
    if !problem.has_equal_priors() {
        return Err(Error::InvalidPrior {
            prior_plus: problem.prior_plus(),
        });
    }
    det.validate()?;
    if problem.alpha() == 0.0 {
        return Err(Error::Degenerate(
            "alpha = 0: every displacement gives error 1/2".into(),
        ));
    }
    if det.eta == 0.0 || det.xi == 0.0 {
        return Err(Error::Degenerate(format!(
            "eta = {}, xi = {}: the detector carries no information about the sign",
            det.eta, det.xi
        )));
    }
    Ok(())
}

/// Residual of the optimal-displacement condition, `β·tanh(2ηξ√T·αβ) − ξ√T·α`.
pub fn optimal_beta_residual(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    transmittance: f64,
    beta: f64,
) -> f64 {
    let signal = det.xi * transmittance.sqrt() * problem.alpha();
    beta * (2.0 * det.eta * signal * beta).tanh() - signal
}

/// Error-minimizing displacement `β*` at fixed transmittance.
pub fn optimal_beta(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    transmittance: f64,
) -> Result<RootResult> {
    require_discriminable(problem, det)?;
    DisplacementSetup::new(transmittance, 0.0)?;

    let f = |beta: f64| optimal_beta_residual(problem, det, transmittance, beta);

    let signal = det.xi * transmittance.sqrt() * problem.alpha();
    let mut hi = (2.0 * signal).max(1.0);
    let mut grown = 0;
    while f(hi) < 0.0 {
        grown += 1;
        if grown > MAX_ITER {
            return Err(Error::NonConvergence {
                what: "optimal displacement bracket",
                iterations: grown,
                residual: f(hi).abs(),
            });
        }
        hi *= 2.0;
    }
    let mut result = bisect(f, 0.0, hi, 0.0)?;
    result.iterations += grown;
    if result.residual > ROOT_TOL || result.iterations > MAX_ITER {
        return Err(Error::NonConvergence {
            what: "optimal displacement",
            iterations: result.iterations,
            residual: result.residual,
        });
    }

    let error_at = |beta: f64| -> Result<f64> {
        let setup = DisplacementSetup::new(transmittance, beta)?;
        Ok(displacement_error(problem, det, &setup)?.value())
    };
    let beta = result.root;
    let centre = error_at(beta)?;
    let below = error_at((beta - MINIMIZER_PROBE).max(0.0))?;
    let above = error_at(beta + MINIMIZER_PROBE)?;
    if centre > below || centre > above {
        return Err(Error::Internal(format!(
            "beta* = {beta} is not a local minimizer ({below}, {centre}, {above})"
        )));
    }
    Ok(result)
}

/// Residual of the closed-form stationarity condition for the transmittance
/// at fixed `γ`:
/// `ξαγ(1 − 2T) / ((α² − γ²)√(T(1 − T))) − tanh(2ηξ√(T(1 − T))·αγ)`.
pub fn transmittance_stationarity_residual(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    gamma: f64,
    transmittance: f64,
) -> f64 {
    let alpha = problem.alpha();
    let u = (transmittance * (1.0 - transmittance)).sqrt();
    let lhs = det.xi * alpha * gamma * (1.0 - 2.0 * transmittance)
        / ((alpha * alpha - gamma * gamma) * u);
    lhs - (2.0 * det.eta * det.xi * u * alpha * gamma).tanh()
}

/// `−dp/dT` up to a positive factor, free of the `|α| = |γ|` singularity.
fn descent_direction(problem: &DiscriminationProblem, det: &DetectorModel, gamma: f64, t: f64) -> f64 {
    let alpha = problem.alpha();
    let u = (t * (1.0 - t)).sqrt();
    let coupling = det.eta * det.xi * alpha * gamma;
    coupling * (1.0 - 2.0 * t) / u
        - det.eta * (alpha * alpha - gamma * gamma) * (2.0 * coupling * u).tanh()
}

/// Error-minimizing transmittance `T*` at fixed auxiliary amplitude `γ`.
///
/// The returned residual is that of
/// [`transmittance_stationarity_residual`] at `T*`.
pub fn optimal_transmittance(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    gamma: f64,
) -> Result<RootResult> {
    require_discriminable(problem, det)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            reason: "auxiliary amplitude must be finite and positive",
        });
    }
    let alpha = problem.alpha();
    if (alpha - gamma).abs() <= 1e-12 * alpha.max(gamma) {
        return Err(Error::SingularInput { alpha });
    }

    // The optimal displacement never exceeds this bound; restricting T keeps
    // the bracket free of regions where p(T) underflows to exactly 1/2.
    let beta_cap = 4.0 * alpha.max(1.0).max(det.eta.recip().sqrt());
    let t_lo = (1.0 - (beta_cap / gamma).powi(2)).max(f64::EPSILON);
    let t_hi = 1.0;
    let width = t_hi - t_lo;

    let error_at = |t: f64| -> f64 {
        DisplacementSetup::from_gamma(t, gamma)
            .and_then(|s| displacement_error(problem, det, &s))
            .map(|p| p.value())
            .unwrap_or(f64::INFINITY)
    };
    let coarse = minimize_scalar(error_at, (t_lo, t_hi), ARG_TOL.min(ARG_TOL * width))?;

    // Value comparisons cannot resolve the minimum below ~√ε; polish on the
    // sign of the analytic derivative.
    let slope = |t: f64| descent_direction(problem, det, gamma, t);
    let interior = |t: f64| t.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
    let mut pad = coarse.residual.max(f64::EPSILON) * 4.0;
    let mut extra = 0;
    let (lo, hi) = loop {
        let lo = interior(coarse.root - pad);
        let hi = interior(coarse.root + pad);
        if slope(lo) > 0.0 && slope(hi) < 0.0 {
            break (lo, hi);
        }
        extra += 1;
        if extra > 40 {
            return Err(Error::NonConvergence {
                what: "optimal transmittance bracket",
                iterations: coarse.iterations + extra,
                residual: coarse.residual,
            });
        }
        pad *= 4.0;
    };
    let polished = bisect(slope, lo, hi, 0.0)?;
    let root = polished.root;
    let iterations = coarse.iterations + extra + polished.iterations;
    let residual = transmittance_stationarity_residual(problem, det, gamma, root).abs();
    if !(residual <= STATIONARITY_TOL) || iterations > MAX_ITER {
        return Err(Error::NonConvergence {
            what: "optimal transmittance",
            iterations,
            residual,
        });
    }
    Ok(RootResult {
        root,
        residual,
        iterations,
    })
}
