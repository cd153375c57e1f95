//! Coincidence measurements on biphoton polarization qutrits, forward and
//! inverse.
//!
//! * [`state`]: amplitude triples, gauge fixing, fidelity.
//! * [`optics`]: Jones matrices of the wave plates and their lift to the
//!   three-level space.
//! * [`measure`]: the five standard plate/basis configurations, ideal
//!   outcome probabilities, and shot-noise sampling.
//! * [`reconstruct`]: recovery of magnitudes and phases from the measured
//!   probabilities.
//! * [`bootstrap`]: resampling error bars for counted data.
//! * [`oracle`]: a brute-force two-photon model used as an independent
//!   cross-check of everything above.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bootstrap;
pub mod measure;
pub mod optics;
pub mod oracle;
pub mod reconstruct;
pub mod state;

pub use bootstrap::{bootstrap, BootstrapSummary, ParamStats, DEFAULT_RESAMPLES};
pub use measure::{
    estimate_probs, outcome_probabilities, run_plan, sample_counts, sample_plan, Basis, ConfigId,
    CountTable, MeasureError, MeasurementConfig, OutcomeProbabilities, Plate,
};
pub use optics::{
    apply_single, induced_qutrit_map, jones, to_diagonal_basis, JonesMatrix, OpticsError, QutritMap,
};
pub use oracle::{Analyzer, OracleError, TwoPhotonAmplitude};
pub use reconstruct::{
    reconstruct, Branch, Magnitudes, ProtocolInput, ReconstructError, ReconstructionReport,
};
pub use state::{
    canonicalize, normalize, wrap_angle, Constraint, PhasePair, QutritState, StateError,
};
