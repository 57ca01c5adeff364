//! Error-probability models, optimal-displacement solvers and Monte Carlo
//! simulation for receivers that discriminate the binary coherent states
//! `|+α⟩` and `|−α⟩`.
//!
//! * [`receivers`]: closed-form error probabilities (Helstrom bound, Kennedy,
//!   homodyne and displacement receivers with detector imperfections).
//! * [`solver`]: optimal displacement and optimal beam-splitter transmittance.
//! * [`sim`]: seeded, chunk-parallel pulse-sequence simulation.
//! * [`experiments`]: amplitude, displacement and auxiliary-power sweeps.
//! * [`config`], [`output`] and [`cli`]: the command-line front end.



pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;


pub mod receivers;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use receivers::{
    click_probabilities, displacement_error, helstrom_error, homodyne_error, homodyne_error_with,
    kennedy_error, DetectorModel, DiscriminationProblem, DisplacementSetup, ErrorProbability,
};
pub use sim::{
    generate_pulse_log, simulate_apd_sequence, simulate_homodyne_sequence, ErrorEstimate,
    HomodyneModel, PulseRecord, SimOptions,
};
pub use solver::{minimize_scalar, optimal_beta, optimal_transmittance, RootResult};
