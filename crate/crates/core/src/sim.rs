//! Seeded Monte Carlo simulation of pulse sequences.
//!
//! Each pulse draws a hypothesis from the priors, an APD click count from a
//! Poisson distribution with mean `ν + η·n±`, and a homodyne quadrature from a
//! Gaussian with mean `±√η_HD·α` and variance `¼(1 + excess)`. The APD decides
//! `+` iff it registers at least one count; the homodyne receiver decides `+`
//! iff the quadrature is positive.
//!
//! The trial stream is cut into fixed-size chunks. Chunk `k` of a run with
//! master seed `s` draws from ChaCha streams derived only from `(s, k)`, with
//! one stream per random quantity, so the outcome of a run does not depend on
//! the number of worker threads, and the APD-only, homodyne-only and joint
//! simulations see exactly the same draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::receivers::{
    mean_photons_at_detector, DetectorModel, DiscriminationProblem, DisplacementSetup,
};

pub const DEFAULT_CHUNK_SIZE: usize = 1 << 16;

const STREAM_HYPOTHESIS: u64 = 0;
const STREAM_APD: u64 = 1;
const STREAM_HOMODYNE: u64 = 2;

/// Homodyne detector imperfections.
///
/// Quadratures are in shot-noise units where the vacuum variance is `1/4`;
/// `excess_noise` is the additional variance relative to that level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneModel {
    pub efficiency: f64,
    pub excess_noise: f64,
}

impl HomodyneModel {
    pub fn new(efficiency: f64, excess_noise: f64) -> Result<Self> {
        let model = Self {
            efficiency,
            excess_noise,
        };
        model.validate()?;
        Ok(model)
    }

    pub const fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            excess_noise: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::Domain {
                name: "efficiency",
                value: self.efficiency,
                reason: "homodyne efficiency must lie in [0, 1]",
            });
        }
        if !(self.excess_noise.is_finite() && self.excess_noise >= 0.0) {
            return Err(Error::Domain {
                name: "excess_noise",
                value: self.excess_noise,
                reason: "excess noise must be finite and non-negative",
            });
        }
        Ok(())
    }

    /// Quadrature variance of a coherent state.
    pub fn variance(&self) -> f64 {
        0.25 * (1.0 + self.excess_noise)
    }
}

impl Default for HomodyneModel {
    fn default() -> Self {
        Self::ideal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    Plus,
    Minus,
}

impl Hypothesis {
    pub fn sign(self) -> i8 {
        match self {
            Hypothesis::Plus => 1,
            Hypothesis::Minus => -1,
        }
    }
}

/// One simulated pulse, observed by both receivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub trial: u64,
    pub hypothesis: Hypothesis,
    pub apd_counts: u64,
    pub quadrature: f64,
    pub decision_apd: Hypothesis,
    pub decision_homodyne: Hypothesis,
}

impl PulseRecord {
    pub fn apd_correct(&self) -> bool {
        self.decision_apd == self.hypothesis
    }

    pub fn homodyne_correct(&self) -> bool {
        self.decision_homodyne == self.hypothesis
    }
}

/// Decision of the on/off detector: any count means `|+α⟩`.
pub fn decide_apd(counts: u64) -> Hypothesis {
    if counts > 0 {
        Hypothesis::Plus
    } else {
        Hypothesis::Minus
    }
}

pub fn decide_homodyne(quadrature: f64) -> Hypothesis {
    if quadrature > 0.0 {
        Hypothesis::Plus
    } else {
        Hypothesis::Minus
    }
}

/// Empirical error probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub errors: u64,
    pub std_err: f64,
}

impl ErrorEstimate {
    pub fn from_counts(errors: u64, trials: u64) -> Result<Self> {
        if trials == 0 || errors > trials {
            return Err(Error::Domain {
                name: "trials",
                value: trials as f64,
                reason: "need at least one trial and no more errors than trials",
            });
        }
        let p_hat = errors as f64 / trials as f64;
        Ok(Self {
            p_hat,
            trials,
            errors,
            std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        })
    }

    /// `|p̂ − p| ≤ k·σ̂`.
    pub fn agrees_with(&self, p: f64, k: f64) -> bool {
        (self.p_hat - p).abs() <= k * self.std_err
    }
}

/// Execution knobs. Results never depend on `workers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub chunk_size: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            chunk_size: DEFAULT_CHUNK_SIZE,
            workers: None,
        }
    }
}

impl SimOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.chunk_size == 0 {
            return Err(Error::Domain {
                name: "chunk_size",
                value: 0.0,
                reason: "chunk size must be positive",
            });
        }
        if self.workers == Some(0) {
            return Err(Error::Domain {
                name: "workers",
                value: 0.0,
                reason: "worker count must be positive",
            });
        }
        Ok(())
    }

    fn chunks(&self, trials: u64) -> Vec<(u64, u64, usize)> {
        let size = self.chunk_size as u64;
        (0..trials.div_ceil(size))
            .map(|k| {
                let start = k * size;
                (k, start, (trials - start).min(size) as usize)
            })
            .collect()
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Seed for sub-run `(a, b)` of a run with master seed `seed` (SplitMix64 mix).
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    mix(mix(mix(seed.wrapping_add(GOLDEN)) ^ a.wrapping_add(GOLDEN)) ^ b.wrapping_add(GOLDEN))
}

fn stream(seed: u64, chunk: u64, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((chunk << 2) | channel);
    rng
}

/// Poisson sampler tolerating a zero mean.
#[derive(Debug, Clone, Copy)]
struct Counts(Option<Poisson<f64>>);

impl Counts {
    fn new(mean: f64) -> Result<Self> {
        if mean == 0.0 {
            return Ok(Self(None));
        }
        Poisson::new(mean)
            .map(|d| Self(Some(d)))
            .map_err(|_| Error::Domain {
                name: "click_mean",
                value: mean,
                reason: "Poisson mean must be finite and non-negative",
            })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        self.0.map_or(0, |d| d.sample(rng) as u64)
    }
}

#[derive(Debug, Clone, Copy)]
struct ApdModel {
    plus: Counts,
    minus: Counts,
}

impl ApdModel {
    fn new(problem: &DiscriminationProblem, det: &DetectorModel, setup: &DisplacementSetup) -> Result<Self> {
        det.validate()?;
        let (n_plus, n_minus) = mean_photons_at_detector(problem, det, setup);
        Ok(Self {
            plus: Counts::new(det.nu + det.eta * n_plus)?,
            minus: Counts::new(det.nu + det.eta * n_minus)?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct QuadratureModel {
    plus: Normal<f64>,
    minus: Normal<f64>,
}

impl QuadratureModel {
    fn new(problem: &DiscriminationProblem, model: &HomodyneModel) -> Result<Self> {
        model.validate()?;
        let mean = model.efficiency.sqrt() * problem.alpha();
        let sd = model.variance().sqrt();
        let normal = |m: f64| {
            Normal::new(m, sd).map_err(|_| Error::Internal(format!("normal({m}, {sd})")))
        };
        Ok(Self {
            plus: normal(mean)?,
            minus: normal(-mean)?,
        })
    }
}

/// Per-chunk sampler; each random quantity has its own stream.
struct ChunkSampler {
    prior_plus: f64,
    hypotheses: ChaCha8Rng,
    apd: Option<(ChaCha8Rng, ApdModel)>,
    homodyne: Option<(ChaCha8Rng, QuadratureModel)>,
}

impl ChunkSampler {
    fn new(
        prior_plus: f64,
        seed: u64,
        chunk: u64,
        apd: Option<ApdModel>,
        homodyne: Option<QuadratureModel>,
    ) -> Self {
        Self {
            prior_plus,
            hypotheses: stream(seed, chunk, STREAM_HYPOTHESIS),
            apd: apd.map(|m| (stream(seed, chunk, STREAM_APD), m)),
            homodyne: homodyne.map(|m| (stream(seed, chunk, STREAM_HOMODYNE), m)),
        }
    }

    fn hypothesis(&mut self) -> Hypothesis {
        if self.hypotheses.random::<f64>() < self.prior_plus {
            Hypothesis::Plus
        } else {
            Hypothesis::Minus
        }
    }

    fn counts(&mut self, h: Hypothesis) -> u64 {
        let (rng, model) = self.apd.as_mut().expect("apd channel enabled");
        match h {
            Hypothesis::Plus => model.plus.sample(rng),
            Hypothesis::Minus => model.minus.sample(rng),
        }
    }

    fn quadrature(&mut self, h: Hypothesis) -> f64 {
        let (rng, model) = self.homodyne.as_mut().expect("homodyne channel enabled");
        match h {
            Hypothesis::Plus => model.plus.sample(rng),
            Hypothesis::Minus => model.minus.sample(rng),
        }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::Domain {
            name: "trials",
            value: 0.0,
            reason: "at least one trial is required",
        })
    } else {
        Ok(())
    }
}

fn count_errors<F>(trials: u64, opts: &SimOptions, chunk_errors: F) -> Result<ErrorEstimate>
where
    F: Fn(u64, usize) -> u64 + Sync,
{
    check_trials(trials)?;
    opts.validate()?;
    let chunks = opts.chunks(trials);
    let errors: u64 = opts.install(|| {
        chunks
            .par_iter()
            .map(|&(k, _, n)| chunk_errors(k, n))
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    })?;
    ErrorEstimate::from_counts(errors, trials)
}

/// Monte Carlo error rate of the displacement (or Kennedy) receiver.
pub fn simulate_apd_sequence(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    setup: &DisplacementSetup,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<ErrorEstimate> {
    let apd = ApdModel::new(problem, det, setup)?;
    let prior = problem.prior_plus();
    count_errors(trials, opts, |k, n| {
        let mut sampler = ChunkSampler::new(prior, seed, k, Some(apd), None);
        (0..n)
            .filter(|_| {
                let h = sampler.hypothesis();
                decide_apd(sampler.counts(h)) != h
            })
            .count() as u64
    })
}

/// Monte Carlo error rate of the homodyne receiver.
pub fn simulate_homodyne_sequence(
    problem: &DiscriminationProblem,
    model: &HomodyneModel,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<ErrorEstimate> {
    let quad = QuadratureModel::new(problem, model)?;
    let prior = problem.prior_plus();
    count_errors(trials, opts, |k, n| {
        let mut sampler = ChunkSampler::new(prior, seed, k, None, Some(quad));
        (0..n)
            .filter(|_| {
                let h = sampler.hypothesis();
                decide_homodyne(sampler.quadrature(h)) != h
            })
            .count() as u64
    })
}

/// Full per-pulse log with both receivers observing the same hypotheses.
///
/// With the same `seed`, aggregating the APD (homodyne) decisions reproduces
/// [`simulate_apd_sequence`] ([`simulate_homodyne_sequence`]) exactly.
pub fn generate_pulse_log(
    problem: &DiscriminationProblem,
    det: &DetectorModel,
    setup: &DisplacementSetup,
    model: &HomodyneModel,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<PulseRecord>> {
    opts.validate()?;
    let apd = ApdModel::new(problem, det, setup)?;
    let quad = QuadratureModel::new(problem, model)?;
    let prior = problem.prior_plus();
    let chunks = opts.chunks(trials);
    let parts: Vec<Vec<PulseRecord>> = opts.install(|| {
        chunks
            .par_iter()
            .map(|&(k, start, n)| {
                let mut sampler = ChunkSampler::new(prior, seed, k, Some(apd), Some(quad));
                (0..n as u64)
                    .map(|i| {
                        let hypothesis = sampler.hypothesis();
                        let apd_counts = sampler.counts(hypothesis);
                        let quadrature = sampler.quadrature(hypothesis);
                        PulseRecord {
                            trial: start + i,
                            hypothesis,
                            apd_counts,
                            quadrature,
                            decision_apd: decide_apd(apd_counts),
                            decision_homodyne: decide_homodyne(quadrature),
                        }
                    })
                    .collect()
            })
            .collect()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Aggregates a pulse log into `(apd, homodyne)` error estimates.
pub fn summarize_log(log: &[PulseRecord]) -> Result<(ErrorEstimate, ErrorEstimate)> {
    let trials = log.len() as u64;
    check_trials(trials)?;
    let apd_errors = log.iter().filter(|r| !r.apd_correct()).count() as u64;
    let hd_errors = log.iter().filter(|r| !r.homodyne_correct()).count() as u64;
    Ok((
        ErrorEstimate::from_counts(apd_errors, trials)?,
        ErrorEstimate::from_counts(hd_errors, trials)?,
    ))
}
