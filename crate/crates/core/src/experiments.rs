//! Parameter sweeps over amplitude, displacement and auxiliary power.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::receivers::{
    displacement_error, helstrom_error, homodyne_error, homodyne_error_with, kennedy_error,
    DetectorModel, DiscriminationProblem, DisplacementSetup,
};
use crate::sim::{
    derive_seed, simulate_apd_sequence, simulate_homodyne_sequence, ErrorEstimate, HomodyneModel,
    SimOptions,
};
use crate::solver::{bisect, optimal_beta, optimal_transmittance};

/// Bisection tolerance on `|α|²` for [`crossover_find`].
pub const CROSSOVER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Helstrom,
    Kennedy,
    Homodyne,
    OptDisplacement,
}

impl Receiver {
    pub const ALL: [Receiver; 4] = [
        Receiver::Helstrom,
        Receiver::Kennedy,
        Receiver::Homodyne,
        Receiver::OptDisplacement,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Receiver::Helstrom => "helstrom",
            Receiver::Kennedy => "kennedy",
            Receiver::Homodyne => "homodyne",
            Receiver::OptDisplacement => "opt_displacement",
        }
    }

    fn stream_id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Montecarlo,
    Both,
}

impl Engine {
    pub fn analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn montecarlo(self) -> bool {
        matches!(self, Engine::Montecarlo | Engine::Both)
    }
}

/// Abscissa convention of an amplitude sweep.
///
/// In `Ideal` mode the grid is the mean photon number of the signal. In
/// `Corrected` mode the grid is the detector-referred mean photon number
/// `η·|α|²`, with `η` the efficiency of each receiver's detector, so the
/// curves can be laid over the `η = 1` quantum limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    Ideal,
    Corrected,
}

/// How the displacement receiver chooses its beam-splitter setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum DisplacementPolicy {
    /// Optimal `β` at a fixed transmittance.
    Optimize { transmittance: f64 },
    /// Optimal `T` at a fixed auxiliary-oscillator amplitude.
    FixedGamma { gamma: f64 },
    FixedBeta { beta: f64, transmittance: f64 },
}

impl DisplacementPolicy {
    /// Setting used by the optimized displacement receiver.
    pub fn resolve(
        &self,
        problem: &DiscriminationProblem,
        det: &DetectorModel,
    ) -> Result<DisplacementSetup> {
        match *self {
            DisplacementPolicy::FixedBeta { beta, transmittance } => {
                DisplacementSetup::new(transmittance, beta)
            }
            // Any displacement is optimal for vacuum input.
            _ if problem.alpha() == 0.0 => DisplacementSetup::displacement(0.0),
            DisplacementPolicy::Optimize { transmittance } => {
                let beta = optimal_beta(problem, det, transmittance)?.root;
                DisplacementSetup::new(transmittance, beta)
            }
            DisplacementPolicy::FixedGamma { gamma } => {
                let t = optimal_transmittance(problem, det, gamma)?.root;
                DisplacementSetup::from_gamma(t, gamma)
            }
        }
    }

    /// Setting that nulls `|−α⟩`, i.e. the Kennedy receiver on this hardware.
    pub fn kennedy(&self, problem: &DiscriminationProblem) -> Result<DisplacementSetup> {
        let transmittance = match *self {
            DisplacementPolicy::Optimize { transmittance }
            | DisplacementPolicy::FixedBeta { transmittance, .. } => transmittance,
            DisplacementPolicy::FixedGamma { gamma } => {
                let (a2, g2) = (problem.mean_photons(), gamma * gamma);
                if a2 + g2 == 0.0 {
                    1.0
                } else {
                    g2 / (a2 + g2)
                }
            }
        };
        DisplacementSetup::kennedy(problem, transmittance)
    }
}

impl Default for DisplacementPolicy {
    fn default() -> Self {
        DisplacementPolicy::Optimize { transmittance: 1.0 }
    }
}

/// Monte Carlo settings for a sweep. Each point and receiver gets its own
/// seed derived from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    pub sim: SimOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub series: Vec<Series>,
    pub annotations: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    fn new(axis_name: &str, axis_values: Vec<f64>) -> Self {
        Self {
            axis_name: axis_name.to_string(),
            axis_values,
            series: Vec::new(),
            annotations: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    fn push_analytic(&mut self, name: &str, values: Vec<f64>) {
        self.series.push(Series {
            name: name.to_string(),
            values,
            std_err: None,
        });
    }

    fn push_estimates(&mut self, name: &str, estimates: &[ErrorEstimate]) {
        self.series.push(Series {
            name: name.to_string(),
            values: estimates.iter().map(|e| e.p_hat).collect(),
            std_err: Some(estimates.iter().map(|e| e.std_err).collect()),
        });
    }

    /// Index of the smallest value of a series.
    pub fn argmin(&self, name: &str) -> Option<usize> {
        let s = self.series(name)?;
        s.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    match grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(&bad) => Err(Error::Domain {
            name,
            value: bad,
            reason: "grid values must be finite and non-negative",
        }),
        None if grid.is_empty() => Err(Error::Domain {
            name,
            value: 0.0,
            reason: "grid must not be empty",
        }),
        None => Ok(()),
    }
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Receiver selection and engines for [`amplitude_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSweep {
    pub receivers: Vec<Receiver>,
    pub engine: Engine,
    pub mode: AmplitudeMode,
    pub policy: DisplacementPolicy,
    pub monte_carlo: Option<MonteCarlo>,
}

impl AmplitudeSweep {
    pub fn analytic(receivers: &[Receiver]) -> Self {
        Self {
            receivers: receivers.to_vec(),
            engine: Engine::Analytic,
            mode: AmplitudeMode::Ideal,
            policy: DisplacementPolicy::default(),
            monte_carlo: None,
        }
    }
}

struct AmplitudeContext<'a> {
    det: &'a DetectorModel,
    homodyne: &'a HomodyneModel,
    spec: &'a AmplitudeSweep,
}

impl AmplitudeContext<'_> {
    fn efficiency(&self, receiver: Receiver) -> f64 {
        match receiver {
            Receiver::Helstrom => 1.0,
            Receiver::Kennedy | Receiver::OptDisplacement => self.det.eta,
            Receiver::Homodyne => self.homodyne.efficiency,
        }
    }

    /// Signal-referred problem for a grid value.
    fn problem(&self, receiver: Receiver, x: f64) -> Result<DiscriminationProblem> {
        let alpha2 = match self.spec.mode {
            AmplitudeMode::Ideal => x,
            AmplitudeMode::Corrected if x == 0.0 => 0.0,
            AmplitudeMode::Corrected => {
                let eta = self.efficiency(receiver);
                if eta == 0.0 {
                    return Err(Error::Domain {
                        name: "eta",
                        value: 0.0,
                        reason: "corrected mode needs a non-zero efficiency",
                    });
                }
                x / eta
            }
        };
        DiscriminationProblem::from_mean_photons(alpha2)
    }

    fn analytic(&self, receiver: Receiver, x: f64) -> Result<f64> {
        let problem = self.problem(receiver, x)?;
        let det = self.det;
        let p = match receiver {
            Receiver::Helstrom => helstrom_error(&problem)?,
            Receiver::Kennedy => {
                let setup = self.spec.policy.kennedy(&problem)?;
                if det.is_ideal() && setup.transmittance() == 1.0 {
                    kennedy_error(&problem)?
                } else {
                    displacement_error(&problem, det, &setup)?
                }
            }
            Receiver::Homodyne => {
                if *self.homodyne == HomodyneModel::ideal() {
                    homodyne_error(&problem)?
                } else {
                    homodyne_error_with(&problem, self.homodyne)?
                }
            }
            Receiver::OptDisplacement => {
                let setup = self.spec.policy.resolve(&problem, det)?;
                displacement_error(&problem, det, &setup)?
            }
        };
        Ok(p.value())
    }

    fn montecarlo(&self, receiver: Receiver, x: f64, index: usize, mc: &MonteCarlo) -> Result<ErrorEstimate> {
        let problem = self.problem(receiver, x)?;
        let seed = derive_seed(mc.seed, index as u64, receiver.stream_id());
        match receiver {
            Receiver::Helstrom => Err(Error::Internal("no Monte Carlo model for the Helstrom bound".into())),
            Receiver::Kennedy => {
                let setup = self.spec.policy.kennedy(&problem)?;
                simulate_apd_sequence(&problem, self.det, &setup, mc.trials, seed, &mc.sim)
            }
            Receiver::OptDisplacement => {
                let setup = self.spec.policy.resolve(&problem, self.det)?;
                simulate_apd_sequence(&problem, self.det, &setup, mc.trials, seed, &mc.sim)
            }
            Receiver::Homodyne => {
                simulate_homodyne_sequence(&problem, self.homodyne, mc.trials, seed, &mc.sim)
            }
        }
    }
}

/// Error probability of each selected receiver across a grid of `|α|²`.
///
/// Analytic series are named after the receiver; Monte Carlo series carry a
/// `_mc` suffix and a standard error. The Helstrom bound has no Monte Carlo
/// model and is reported analytically only.
pub fn amplitude_sweep(
    grid: &[f64],
    det: &DetectorModel,
    homodyne: &HomodyneModel,
    spec: &AmplitudeSweep,
) -> Result<SweepResult> {
    check_grid("alpha2", grid)?;
    det.validate()?;
    homodyne.validate()?;
    let axis = match spec.mode {
        AmplitudeMode::Ideal => "alpha2",
        AmplitudeMode::Corrected => "alpha2_corrected",
    };
    let mut result = SweepResult::new(axis, grid.to_vec());
    let ctx = AmplitudeContext { det, homodyne, spec };

    if spec.engine.analytic() {
        for &receiver in &spec.receivers {
            let values = grid
                .par_iter()
                .map(|&x| ctx.analytic(receiver, x))
                .collect::<Result<Vec<_>>>()?;
            result.push_analytic(receiver.label(), values);
        }
    }
    if spec.engine.montecarlo() {
        let mc = spec.monte_carlo.as_ref().ok_or(Error::Domain {
            name: "trials",
            value: 0.0,
            reason: "Monte Carlo engine selected without Monte Carlo settings",
        })?;
        for &receiver in spec.receivers.iter().filter(|r| **r != Receiver::Helstrom) {
            let estimates = grid
                .iter()
                .enumerate()
                .map(|(i, &x)| ctx.montecarlo(receiver, x, i, mc))
                .collect::<Result<Vec<_>>>()?;
            result.push_estimates(&format!("{}_mc", receiver.label()), &estimates);
        }
    }
    Ok(result)
}

/// Transmittance rule for a displacement sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum TransmittancePolicy {
    Fixed { transmittance: f64 },
    /// `T = 1 − β²/γ²`, i.e. the displacement is tuned through `T`.
    FixedGamma { gamma: f64 },
}

impl TransmittancePolicy {
    fn setup(&self, beta: f64) -> Result<DisplacementSetup> {
        match *self {
            TransmittancePolicy::Fixed { transmittance } => DisplacementSetup::new(transmittance, beta),
            TransmittancePolicy::FixedGamma { gamma } => {
                let t = 1.0 - (beta / gamma).powi(2);
                DisplacementSetup::new(t, beta)
            }
        }
    }
}

/// Displacement-receiver error as a function of `|β|²` at fixed `α`.
///
/// Annotations mark the Kennedy point, the solver optimum, the grid minimum
/// and the ideal homodyne and Helstrom levels. A warning is recorded when
/// the grid minimum is more than one grid step away from the optimum.
pub fn beta_sweep(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    policy: TransmittancePolicy,
    beta2_grid: &[f64],
    monte_carlo: Option<&MonteCarlo>,
) -> Result<SweepResult> {
    check_grid("beta2", beta2_grid)?;
    if problem.alpha() <= 0.0 {
        return Err(Error::Degenerate("beta sweep needs alpha > 0".into()));
    }
    let mut axis = Vec::with_capacity(beta2_grid.len());
    let mut setups = Vec::with_capacity(beta2_grid.len());
    let mut warnings = Vec::new();
    for &b2 in beta2_grid {
        match policy.setup(b2.sqrt()) {
            Ok(s) => {
                axis.push(b2);
                setups.push(s);
            }
            Err(e) => warnings.push(format!("beta2 = {b2} skipped: {e}")),
        }
    }
    let mut result = SweepResult::new("beta2", axis);
    result.warnings = warnings;

    let values = setups
        .par_iter()
        .map(|s| displacement_error(problem, det, s).map(|p| p.value()))
        .collect::<Result<Vec<_>>>()?;
    result.push_analytic("displacement", values);
    if let Some(mc) = monte_carlo {
        let estimates = setups
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let seed = derive_seed(mc.seed, i as u64, 0);
                simulate_apd_sequence(problem, det, s, mc.trials, seed, &mc.sim)
            })
            .collect::<Result<Vec<_>>>()?;
        result.push_estimates("displacement_mc", &estimates);
    }

    let (kennedy, optimum) = match policy {
        TransmittancePolicy::Fixed { transmittance } => {
            let kennedy = DisplacementSetup::kennedy(problem, transmittance)?;
            let beta = optimal_beta(problem, det, transmittance)?.root;
            (kennedy, DisplacementSetup::new(transmittance, beta)?)
        }
        TransmittancePolicy::FixedGamma { gamma } => {
            let kennedy = DisplacementPolicy::FixedGamma { gamma }.kennedy(problem)?;
            let t = optimal_transmittance(problem, det, gamma)?.root;
            (kennedy, DisplacementSetup::from_gamma(t, gamma)?)
        }
    };
    let kennedy_error_value = if det.is_ideal() && kennedy.transmittance() == 1.0 {
        kennedy_error(problem)?
    } else {
        displacement_error(problem, det, &kennedy)?
    };
    let optimum_error = displacement_error(problem, det, &optimum)?;
    let notes = &mut result.annotations;
    notes.insert("alpha2".into(), problem.mean_photons());
    notes.insert("kennedy_beta2".into(), kennedy.beta().powi(2));
    notes.insert("kennedy_error".into(), kennedy_error_value.value());
    notes.insert("optimum_beta2".into(), optimum.beta().powi(2));
    notes.insert("optimum_transmittance".into(), optimum.transmittance());
    notes.insert("optimum_error".into(), optimum_error.value());
    notes.insert("homodyne_error".into(), homodyne_error(problem)?.value());
    notes.insert("helstrom_error".into(), helstrom_error(problem)?.value());

    if let Some(i) = result.argmin("displacement") {
        let values = &result.series("displacement").expect("pushed above").values;
        let axis = &result.axis_values;
        let step = [i.checked_sub(1), Some(i + 1).filter(|&j| j < axis.len())]
            .into_iter()
            .flatten()
            .map(|j| (axis[j] - axis[i]).abs())
            .fold(0.0, f64::max);
        let (min_b2, min_p) = (axis[i], values[i]);
        result.annotations.insert("grid_min_beta2".into(), min_b2);
        result.annotations.insert("grid_min_error".into(), min_p);
        result.annotations.insert("grid_step".into(), step);
        let target = optimum.beta().powi(2);
        if (min_b2 - target).abs() > step {
            result.warnings.push(format!(
                "grid minimum at beta2 = {min_b2} is more than one step ({step}) from the optimum {target}"
            ));
        }
    }
    Ok(result)
}

/// Minimal displacement-receiver error versus auxiliary power `|γ|²`, with
/// `T` re-optimized at every point.
///
/// Points with `|γ| = |α|` (singular) or `γ = 0` are skipped and recorded as
/// warnings.
pub fn gamma_sweep(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    gamma2_grid: &[f64],
) -> Result<SweepResult> {
    check_grid("gamma2", gamma2_grid)?;
    if problem.alpha() <= 0.0 {
        return Err(Error::Degenerate("gamma sweep needs alpha > 0".into()));
    }
    let outcomes: Vec<(f64, Result<(f64, f64)>)> = gamma2_grid
        .par_iter()
        .map(|&g2| {
            let gamma = g2.sqrt();
            let out = optimal_transmittance(problem, det, gamma).and_then(|r| {
                let setup = DisplacementSetup::from_gamma(r.root, gamma)?;
                Ok((displacement_error(problem, det, &setup)?.value(), r.root))
            });
            (g2, out)
        })
        .collect();

    let mut axis = Vec::new();
    let mut errors = Vec::new();
    let mut transmittances = Vec::new();
    let mut warnings = Vec::new();
    for (g2, out) in outcomes {
        match out {
            Ok((p, t)) => {
                axis.push(g2);
                errors.push(p);
                transmittances.push(t);
            }
            Err(e @ (Error::SingularInput { .. } | Error::Domain { .. })) => {
                warnings.push(format!("gamma2 = {g2} skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    let mut result = SweepResult::new("gamma2", axis);
    result.warnings = warnings;
    result.push_analytic("opt_displacement", errors);
    result.push_analytic("transmittance", transmittances);

    let beta = optimal_beta(problem, det, 1.0)?.root;
    let plateau = displacement_error(problem, det, &DisplacementSetup::displacement(beta)?)?;
    result.annotations.insert("alpha2".into(), problem.mean_photons());
    result.annotations.insert("fixed_beta_optimum_beta2".into(), beta * beta);
    result.annotations.insert("fixed_beta_optimum_error".into(), plateau.value());
    Ok(result)
}

/// Ideal (`η = 1`, `ν = 0`, `ξ = 1`) error of a receiver at mean photon
/// number `alpha2`. The displacement receiver uses `T = 1` and the optimal `β`.
pub fn ideal_error(receiver: Receiver, alpha2: f64) -> Result<f64> {
    let problem = DiscriminationProblem::from_mean_photons(alpha2)?;
    let det = DetectorModel::ideal();
    let p = match receiver {
        Receiver::Helstrom => helstrom_error(&problem)?,
        Receiver::Kennedy => kennedy_error(&problem)?,
        Receiver::Homodyne => homodyne_error(&problem)?,
        Receiver::OptDisplacement => {
            let setup = DisplacementPolicy::default().resolve(&problem, &det)?;
            displacement_error(&problem, &det, &setup)?
        }
    };
    Ok(p.value())
}

/// Mean photon number at which two ideal receivers perform equally, by
/// bisection on `p_a − p_b` over `bracket`.
pub fn crossover_find(a: Receiver, b: Receiver, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let diff = |x: f64| -> Result<f64> { Ok(ideal_error(a, x)? - ideal_error(b, x)?) };
    let (f_lo, f_hi) = (diff(lo)?, diff(hi)?);
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let mut failure = None;
    let root = bisect(
        |x| {
            diff(x).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        },
        lo,
        hi,
        tol,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(root.root),
    }
}

/// Mutual information in bits of a binary symmetric channel with equal
/// priors and crossover probability `p`: `1 − h₂(p)`.
pub fn mutual_information(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p_error",
            value: p,
            reason: "probability must lie in [0, 1]",
        });
    }
    let plogp = |q: f64| if q == 0.0 { 0.0 } else { q * q.log2() };
    Ok(1.0 + plogp(p) + plogp(1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 2.0, 81);
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], 0.0);
        assert!((g[80] - 2.0).abs() < 1e-15);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn mutual_information_endpoints() {
        assert_eq!(mutual_information(0.0).unwrap(), 1.0);
        assert_eq!(mutual_information(1.0).unwrap(), 1.0);
        assert!(mutual_information(0.5).unwrap().abs() < 1e-15);
        assert!(mutual_information(-0.1).is_err());
        assert!(mutual_information(1.1).is_err());
    }

    #[test]
    fn empty_selection_keeps_axis() {
        let grid = linspace(0.0, 2.0, 5);
        let r = amplitude_sweep(
            &grid,
            &DetectorModel::ideal(),
            &HomodyneModel::ideal(),
            &AmplitudeSweep::analytic(&[]),
        )
        .unwrap();
        assert!(r.series.is_empty());
        assert_eq!(r.axis_values, grid);
    }

    #[test]
    fn bad_grids_rejected() {
        let spec = AmplitudeSweep::analytic(&Receiver::ALL);
        let det = DetectorModel::ideal();
        let hd = HomodyneModel::ideal();
        assert!(amplitude_sweep(&[], &det, &hd, &spec).is_err());
        assert!(amplitude_sweep(&[0.1, -0.2], &det, &hd, &spec).is_err());
        assert!(amplitude_sweep(&[f64::NAN], &det, &hd, &spec).is_err());
    }

    #[test]
    fn kennedy_policy_under_fixed_gamma_nulls_minus() {
        let p = DiscriminationProblem::from_mean_photons(0.16).unwrap();
        let setup = DisplacementPolicy::FixedGamma { gamma: 24.7f64.sqrt() }
            .kennedy(&p)
            .unwrap();
        assert!((setup.gamma().unwrap() - 24.7f64.sqrt()).abs() < 1e-12);
        assert!((setup.beta() - setup.transmittance().sqrt() * 0.4).abs() < 1e-15);
    }

    #[test]
    fn montecarlo_without_settings_is_an_error() {
        let mut spec = AmplitudeSweep::analytic(&[Receiver::Kennedy]);
        spec.engine = Engine::Montecarlo;
        let r = amplitude_sweep(&[0.1], &DetectorModel::ideal(), &HomodyneModel::ideal(), &spec);
        assert!(r.is_err());
    }
}
