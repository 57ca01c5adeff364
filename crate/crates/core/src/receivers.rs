//! Closed-form error probabilities for binary coherent-state receivers.
//!
//! The alphabet is `{|+α⟩, |−α⟩}` with real `α ≥ 0` and equal priors. Four
//! receivers are modelled:
//!
//! * the Helstrom bound (quantum-optimal measurement),
//! * the Kennedy receiver (displace `|−α⟩` to vacuum, then on/off detection),
//! * the homodyne receiver (sign of the quadrature along the excitation),
//! * the displacement receiver, a Kennedy receiver with a tunable displacement
//!   `β` realised by a beam splitter of transmittance `T`, including detector
//!   efficiency `η`, dark counts `ν` and interference visibility `ξ`.

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};
use crate::sim::HomodyneModel;

/// Tolerance used when checking that priors are equal.
const PRIOR_TOL: f64 = 1e-12;

/// Signal amplitude and hypothesis priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationProblem {
    alpha: f64,
    prior_plus: f64,
    prior_minus: f64,
}

impl DiscriminationProblem {
    /// Equiprobable hypotheses with amplitude `alpha`.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_priors(alpha, 0.5)
    }

    /// Equiprobable hypotheses with mean photon number `alpha2 = |α|²`.
    pub fn from_mean_photons(alpha2: f64) -> Result<Self> {
        if !(alpha2.is_finite() && alpha2 >= 0.0) {
            return Err(Error::Domain {
                name: "alpha2",
                value: alpha2,
                reason: "mean photon number must be finite and non-negative",
            });
        }
        Self::new(alpha2.sqrt())
    }

    pub fn with_priors(alpha: f64, prior_plus: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Domain {
                name: "alpha",
                value: alpha,
                reason: "amplitude must be real, finite and non-negative",
            });
        }
        if !(0.0..=1.0).contains(&prior_plus) {
            return Err(Error::Domain {
                name: "prior_plus",
                value: prior_plus,
                reason: "prior must lie in [0, 1]",
            });
        }
        Ok(Self {
            alpha,
            prior_plus,
            prior_minus: 1.0 - prior_plus,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Mean photon number `|α|²`.
    pub fn mean_photons(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn prior_plus(&self) -> f64 {
        self.prior_plus
    }

    pub fn prior_minus(&self) -> f64 {
        self.prior_minus
    }

    pub fn has_equal_priors(&self) -> bool {
        (self.prior_plus - 0.5).abs() <= PRIOR_TOL
    }

    fn require_equal_priors(&self) -> Result<()> {
        if self.has_equal_priors() {
            Ok(())
        } else {
            Err(Error::InvalidPrior {
                prior_plus: self.prior_plus,
            })
        }
    }
}

/// On/off detector imperfections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Quantum efficiency.
    pub eta: f64,
    /// Mean dark counts per detection gate.
    pub nu: f64,
    /// Interference visibility of the displacement.
    pub xi: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, nu: f64, xi: f64) -> Result<Self> {
        let det = Self { eta, nu, xi };
        det.validate()?;
        Ok(det)
    }

    pub const fn ideal() -> Self {
        Self {
            eta: 1.0,
            nu: 0.0,
            xi: 1.0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.eta == 1.0 && self.nu == 0.0 && self.xi == 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Domain {
                name: "eta",
                value: self.eta,
                reason: "quantum efficiency must lie in [0, 1]",
            });
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Domain {
                name: "nu",
                value: self.nu,
                reason: "dark counts must be finite and non-negative",
            });
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::Domain {
                name: "xi",
                value: self.xi,
                reason: "visibility must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Beam-splitter transmittance and the displacement it produces.
///
/// The auxiliary oscillator amplitude is `γ = β / √(1 − T)`; it is undefined
/// in the `T = 1` limit where the beam splitter acts as a pure displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSetup {
    transmittance: f64,
    beta: f64,
}

impl DisplacementSetup {
    pub fn new(transmittance: f64, beta: f64) -> Result<Self> {
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(Error::Domain {
                name: "transmittance",
                value: transmittance,
                reason: "transmittance must lie in (0, 1]",
            });
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Domain {
                name: "beta",
                value: beta,
                reason: "displacement must be finite and non-negative",
            });
        }
        Ok(Self {
            transmittance,
            beta,
        })
    }

    /// Pure displacement by `beta` (`T = 1`).
    pub fn displacement(beta: f64) -> Result<Self> {
        Self::new(1.0, beta)
    }

    /// Setup produced by an auxiliary oscillator of amplitude `gamma`.
    pub fn from_gamma(transmittance: f64, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Domain {
                name: "gamma",
                value: gamma,
                reason: "auxiliary amplitude must be finite and non-negative",
            });
        }
        Self::new(transmittance, (1.0 - transmittance).max(0.0).sqrt() * gamma)
    }

    /// Kennedy nulling setup: `β = √T·α` sends `|−α⟩` to vacuum.
    pub fn kennedy(problem: &DiscriminationProblem, transmittance: f64) -> Result<Self> {
        Self::new(transmittance, transmittance.sqrt() * problem.alpha())
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> Option<f64> {
        (self.transmittance < 1.0).then(|| self.beta / (1.0 - self.transmittance).sqrt())
    }
}

/// Average error probability of a receiver.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorProbability(f64);

impl ErrorProbability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Internal(format!(
                "error probability {value} outside [0, 1]"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Range check for equal-prior receivers, which can never do worse than guessing.
    fn at_most_half(value: f64, receiver: &str) -> Result<Self> {
        if (0.0..=0.5).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Internal(format!(
                "{receiver} error probability {value} outside [0, 1/2]"
            )))
        }
    }
}

impl From<ErrorProbability> for f64 {
    fn from(p: ErrorProbability) -> f64 {
        p.0
    }
}

/// Helstrom bound `½(1 − √(1 − e^{−4α²}))`.
pub fn helstrom_error(problem: &DiscriminationProblem) -> Result<ErrorProbability> {
    problem.require_equal_priors()?;
    let overlap = (-4.0 * problem.mean_photons()).exp();
    // 1 − √(1 − x) = x / (1 + √(1 − x)) avoids cancellation at large α.
    let value = 0.5 * overlap / (1.0 + (1.0 - overlap).sqrt());
    ErrorProbability::at_most_half(value, "helstrom")
}

/// Kennedy receiver `½e^{−4α²}`.
pub fn kennedy_error(problem: &DiscriminationProblem) -> Result<ErrorProbability> {
    problem.require_equal_priors()?;
    ErrorProbability::at_most_half(0.5 * (-4.0 * problem.mean_photons()).exp(), "kennedy")
}

/// Ideal homodyne receiver `½(1 − erf(√2·α))`.
pub fn homodyne_error(problem: &DiscriminationProblem) -> Result<ErrorProbability> {
    problem.require_equal_priors()?;
    ErrorProbability::at_most_half(
        0.5 * erfc(std::f64::consts::SQRT_2 * problem.alpha()),
        "homodyne",
    )
}

/// Homodyne receiver with finite efficiency and excess noise.
///
/// The quadrature has mean `√η_HD·α` and variance `¼(1 + excess)`, so the sign
/// decision errs with probability `½ erfc(√(2η_HD/(1 + excess))·α)`.
pub fn homodyne_error_with(
    problem: &DiscriminationProblem,
    model: &HomodyneModel,
) -> Result<ErrorProbability> {
    problem.require_equal_priors()?;
    model.validate()?;
    let scale = (2.0 * model.efficiency / (1.0 + model.excess_noise)).sqrt();
    ErrorProbability::at_most_half(0.5 * erfc(scale * problem.alpha()), "homodyne")
}

/// Mean photon numbers reaching the detector under each hypothesis.
///
/// `n± = T·α² + β² ± 2ξ√T·αβ`. The minus branch is evaluated as
/// `(√T·α − β)² + 2(1 − ξ)√T·αβ`, which is non-negative term by term.
pub fn mean_photons_at_detector(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    setup: &DisplacementSetup,
) -> (f64, f64) {
    let signal = setup.transmittance().sqrt() * problem.alpha();
    let beta = setup.beta();
    let cross = 2.0 * signal * beta;
    let plus = signal * signal + beta * beta + det.xi * cross;
    let minus = (signal - beta).powi(2) + (1.0 - det.xi) * cross;
    (plus, minus)
}

/// Click probabilities of the on/off detector under `|+α⟩` and `|−α⟩`.
pub fn click_probabilities(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    setup: &DisplacementSetup,
) -> Result<(f64, f64)> {
    det.validate()?;
    let (n_plus, n_minus) = mean_photons_at_detector(problem, det, setup);
    if n_minus < 0.0 {
        return Err(Error::Internal(format!(
            "negative mean photon number {n_minus} under the minus hypothesis"
        )));
    }
    let click = |n: f64| -(-det.nu - det.eta * n).exp_m1();
    Ok((click(n_plus), click(n_minus)))
}

/// Displacement receiver error
/// `½ − e^{−ν − η(T·α² + β²)}·sinh(2ηξ√T·αβ)`.
///
/// Evaluated in the algebraically identical form
/// `½ − ½(e^{−ν−η·n₋} − e^{−ν−η·n₊})`, which cannot overflow.
pub fn displacement_error(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    setup: &DisplacementSetup,
) -> Result<ErrorProbability> {
    problem.require_equal_priors()?;
    det.validate()?;
    let (n_plus, n_minus) = mean_photons_at_detector(problem, det, setup);
    let no_click_minus = (-det.nu - det.eta * n_minus).exp();
    let no_click_plus = (-det.nu - det.eta * n_plus).exp();
    ErrorProbability::at_most_half(0.5 - 0.5 * (no_click_minus - no_click_plus), "displacement")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(alpha2: f64) -> DiscriminationProblem {
        DiscriminationProblem::from_mean_photons(alpha2).unwrap()
    }

    #[test]
    fn vacuum_is_indistinguishable() {
        let p = problem(0.0);
        assert_eq!(helstrom_error(&p).unwrap().value(), 0.5);
        assert_eq!(kennedy_error(&p).unwrap().value(), 0.5);
        assert_eq!(homodyne_error(&p).unwrap().value(), 0.5);
        let setup = DisplacementSetup::displacement(0.7).unwrap();
        assert_eq!(
            displacement_error(&p, &DetectorModel::ideal(), &setup)
                .unwrap()
                .value(),
            0.5
        );
    }

    #[test]
    fn unequal_priors_rejected() {
        let p = DiscriminationProblem::with_priors(0.4, 0.3).unwrap();
        assert!(matches!(helstrom_error(&p), Err(Error::InvalidPrior { .. })));
        assert!(matches!(kennedy_error(&p), Err(Error::InvalidPrior { .. })));
        assert!(matches!(homodyne_error(&p), Err(Error::InvalidPrior { .. })));
        let setup = DisplacementSetup::displacement(0.4).unwrap();
        assert!(matches!(
            displacement_error(&p, &DetectorModel::ideal(), &setup),
            Err(Error::InvalidPrior { .. })
        ));
    }

    #[test]
    fn invalid_types_rejected() {
        assert!(DiscriminationProblem::new(-0.1).is_err());
        assert!(DiscriminationProblem::new(f64::NAN).is_err());
        assert!(DiscriminationProblem::with_priors(0.1, 1.5).is_err());
        assert!(DetectorModel::new(1.1, 0.0, 1.0).is_err());
        assert!(DetectorModel::new(1.0, -1e-3, 1.0).is_err());
        assert!(DetectorModel::new(1.0, 0.0, 1.01).is_err());
        assert!(DisplacementSetup::new(0.0, 0.1).is_err());
        assert!(DisplacementSetup::new(1.2, 0.1).is_err());
        assert!(DisplacementSetup::new(0.9, -0.1).is_err());
    }

    #[test]
    fn gamma_round_trip() {
        let setup = DisplacementSetup::from_gamma(0.96, 5.0).unwrap();
        assert!((setup.beta() - 1.0).abs() < 1e-12);
        assert!((setup.gamma().unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(DisplacementSetup::displacement(0.3).unwrap().gamma(), None);
    }

    #[test]
    fn helstrom_vanishes_at_large_amplitude() {
        let p = helstrom_error(&problem(10.0)).unwrap().value();
        assert!(p > 0.0 && p < 1e-9);
    }

    #[test]
    fn zero_displacement_is_a_coin_toss() {
        let det = DetectorModel::new(0.55, 0.01, 0.996).unwrap();
        let setup = DisplacementSetup::new(0.98, 0.0).unwrap();
        for alpha2 in [0.0, 0.16, 1.0, 3.0] {
            let p = displacement_error(&problem(alpha2), &det, &setup).unwrap();
            assert_eq!(p.value(), 0.5);
        }
    }

    #[test]
    fn click_probabilities_without_displacement_are_symmetric() {
        let det = DetectorModel::new(0.7, 0.02, 0.99).unwrap();
        let setup = DisplacementSetup::new(0.9, 0.0).unwrap();
        let p = problem(0.3);
        let (plus, minus) = click_probabilities(&p, &det, &setup).unwrap();
        let expected = 1.0 - (-0.02_f64 - 0.7 * 0.9 * 0.3).exp();
        assert!((plus - expected).abs() < 1e-15);
        assert!((minus - expected).abs() < 1e-15);
    }

    #[test]
    fn kennedy_nulls_the_minus_hypothesis() {
        let p = problem(0.16);
        let setup = DisplacementSetup::displacement(0.4).unwrap();
        let (plus, minus) = click_probabilities(&p, &DetectorModel::ideal(), &setup).unwrap();
        assert!((plus - (1.0 - (-0.64_f64).exp())).abs() < 1e-15);
        assert_eq!(minus, 0.0);
    }

    #[test]
    fn imperfect_homodyne_reduces_to_ideal() {
        let ideal = HomodyneModel::ideal();
        for alpha2 in [0.0, 0.05, 0.16, 1.3] {
            let p = problem(alpha2);
            let a = homodyne_error(&p).unwrap().value();
            let b = homodyne_error_with(&p, &ideal).unwrap().value();
            assert!((a - b).abs() < 1e-15);
        }
    }
}
