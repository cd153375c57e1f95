//! The five plate/basis configurations of the coincidence protocol, their
//! ideal outcome statistics, and shot-noise sampling.
//!
//! Each configuration sends both photons through at most one eighth-wave
//! plate, splits them on a polarizing beam splitter in either the (H, V) or
//! the (45, 135) basis, and records coincidences in three classes: both
//! photons in the upper arm, one in each, both in the lower arm. For a pure
//! qutrit these classes occur with the squared magnitudes of the transformed
//! amplitudes.

use alloc::collections::BTreeMap;
use alloc::string::String;

use core::f64::consts::FRAC_PI_4;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::optics::{induced_qutrit_map, jones, to_diagonal_basis, JonesMatrix, QutritMap};
use crate::state::QutritState;

/// Tolerance on probability triples: per-class range and total sum.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Odd multiplier used to fan one master seed into per-stream seeds.
pub const SEED_STREAM_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for the `k`-th derived stream of `seed`. Stream 0 is the master
/// stream itself.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(SEED_STREAM_SALT)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    /// A count table with zero total cannot be turned into frequencies.
    #[error("count table is empty")]
    EmptyCounts,
    /// Probabilities out of range or not summing to one.
    #[error("outcome probabilities sum to {sum}, expected 1 within {PROB_SUM_TOL:e}")]
    InvalidProbabilities { sum: f64 },
    /// A configuration label other than A..E.
    #[error("unknown configuration label {label:?}")]
    UnknownConfig { label: String },
}

/// Wave plate inserted before the analyzer, shared by both photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plate {
    None,
    /// Eighth-wave plate, slow axis horizontal.
    EighthAt0,
    /// Eighth-wave plate, slow axis at 45 degrees.
    EighthAt45,
}

/// Analyzer basis of the polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    HV,
    Diag45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementConfig {
    pub plate: Plate,
    pub basis: Basis,
}

/// The five standard configurations, in protocol order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfigId {
    A,
    B,
    C,
    D,
    E,
}

impl ConfigId {
    pub const ALL: [ConfigId; 5] = [
        ConfigId::A,
        ConfigId::B,
        ConfigId::C,
        ConfigId::D,
        ConfigId::E,
    ];

    pub fn config(self) -> MeasurementConfig {
        match self {
            ConfigId::A => MeasurementConfig {
                plate: Plate::None,
                basis: Basis::HV,
            },
            ConfigId::B => MeasurementConfig {
                plate: Plate::None,
                basis: Basis::Diag45,
            },
            ConfigId::C => MeasurementConfig {
                plate: Plate::EighthAt0,
                basis: Basis::Diag45,
            },
            ConfigId::D => MeasurementConfig {
                plate: Plate::EighthAt45,
                basis: Basis::HV,
            },
            ConfigId::E => MeasurementConfig {
                plate: Plate::EighthAt0,
                basis: Basis::HV,
            },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConfigId::A => "A",
            ConfigId::B => "B",
            ConfigId::C => "C",
            ConfigId::D => "D",
            ConfigId::E => "E",
        }
    }

    /// Position in [`ConfigId::ALL`], used to derive per-configuration seeds.
    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfigId {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(ConfigId::A),
            "B" => Ok(ConfigId::B),
            "C" => Ok(ConfigId::C),
            "D" => Ok(ConfigId::D),
            "E" => Ok(ConfigId::E),
            other => Err(MeasureError::UnknownConfig {
                label: String::from(other),
            }),
        }
    }
}

/// Jones matrix of the plate, `None` when no plate is inserted.
pub fn plate_jones(plate: Plate) -> Option<JonesMatrix> {
    match plate {
        Plate::None => None,
        Plate::EighthAt0 => Some(jones(0.0, FRAC_PI_4)),
        Plate::EighthAt45 => Some(jones(FRAC_PI_4, FRAC_PI_4)),
    }
}

/// Qutrit-space unitary of a full configuration (plate, then basis change).
pub fn config_map(config: MeasurementConfig) -> QutritMap {
    let plate = match plate_jones(config.plate) {
        Some(j) => induced_qutrit_map(&j),
        None => QutritMap::identity(),
    };
    match config.basis {
        Basis::HV => plate,
        Basis::Diag45 => induced_qutrit_map(&crate::optics::diag45_rotation()) * plate,
    }
}

/// Probabilities of the three coincidence classes: both photons in the
/// upper analyzer arm, one in each, both in the lower arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbabilities {
    p_uu: f64,
    p_cross: f64,
    p_ll: f64,
}

impl OutcomeProbabilities {
    /// Validates range and unit sum within [`PROB_SUM_TOL`], then clamps
    /// rounding dust into [0, 1].
    pub fn new(p_uu: f64, p_cross: f64, p_ll: f64) -> Result<Self, MeasureError> {
        let ps = [p_uu, p_cross, p_ll];
        let mut sum = 0.0;
        for p in ps {
            if !p.is_finite() || !(-PROB_SUM_TOL..=1.0 + PROB_SUM_TOL).contains(&p) {
                return Err(MeasureError::InvalidProbabilities { sum: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(MeasureError::InvalidProbabilities { sum });
        }
        Ok(Self {
            p_uu: p_uu.clamp(0.0, 1.0),
            p_cross: p_cross.clamp(0.0, 1.0),
            p_ll: p_ll.clamp(0.0, 1.0),
        })
    }

    pub fn p_uu(&self) -> f64 {
        self.p_uu
    }

    pub fn p_cross(&self) -> f64 {
        self.p_cross
    }

    pub fn p_ll(&self) -> f64 {
        self.p_ll
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p_uu, self.p_cross, self.p_ll]
    }
}

/// Raw coincidence counts; `n_ul` has the upper-arm photon first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountTable {
    pub n_uu: u64,
    pub n_ul: u64,
    pub n_lu: u64,
    pub n_ll: u64,
}

impl CountTable {
    pub fn total(&self) -> u64 {
        self.n_uu + self.n_ul + self.n_lu + self.n_ll
    }
}

/// Ideal outcome probabilities of one configuration.
pub fn outcome_probabilities(
    state: &QutritState,
    config: MeasurementConfig,
) -> OutcomeProbabilities {
    let amps = state.amps();
    let after_plate = match plate_jones(config.plate) {
        Some(j) => induced_qutrit_map(&j).apply(&amps),
        None => amps,
    };
    let out = match config.basis {
        Basis::HV => after_plate,
        Basis::Diag45 => to_diagonal_basis(&after_plate),
    };
    OutcomeProbabilities::new(out[0].norm_sqr(), out[1].norm_sqr(), out[2].norm_sqr())
        .expect("a unitary map preserves the probability sum")
}

/// Draws a multinomial count table over the four ordered detector pairs
/// (uu, ul, lu, ll), where the cross class splits evenly. Deterministic in
/// `seed`; the draw is a chain of conditional binomials.
pub fn sample_counts(probs: &OutcomeProbabilities, n_tot: u64, seed: u64) -> CountTable {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let class_p = [
        probs.p_uu(),
        0.5 * probs.p_cross(),
        0.5 * probs.p_cross(),
        probs.p_ll(),
    ];
    let mut counts = [0u64; 4];
    let mut left_n = n_tot;
    let mut left_p = 1.0f64;
    for k in 0..3 {
        if left_n == 0 {
            break;
        }
        let q = if left_p > 0.0 {
            (class_p[k] / left_p).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = if q >= 1.0 {
            left_n
        } else {
            Binomial::new(left_n, q)
                .expect("conditional probability lies in [0, 1]")
                .sample(&mut rng)
        };
        counts[k] = draw;
        left_n -= draw;
        left_p -= class_p[k];
    }
    counts[3] = left_n;
    CountTable {
        n_uu: counts[0],
        n_ul: counts[1],
        n_lu: counts[2],
        n_ll: counts[3],
    }
}

/// Relative frequencies of a count table.
pub fn estimate_probs(counts: &CountTable) -> Result<OutcomeProbabilities, MeasureError> {
    let n = counts.total();
    if n == 0 {
        return Err(MeasureError::EmptyCounts);
    }
    let n = n as f64;
    OutcomeProbabilities::new(
        counts.n_uu as f64 / n,
        (counts.n_ul + counts.n_lu) as f64 / n,
        counts.n_ll as f64 / n,
    )
}

/// Count tables for all five configurations. Configuration `k` uses the
/// derived seed stream `k`, so tables are independent but reproducible.
pub fn sample_plan(
    state: &QutritState,
    n_per_config: u64,
    seed: u64,
) -> Result<BTreeMap<ConfigId, CountTable>, MeasureError> {
    if n_per_config == 0 {
        return Err(MeasureError::EmptyCounts);
    }
    let mut out = BTreeMap::new();
    for id in ConfigId::ALL {
        let p = outcome_probabilities(state, id.config());
        out.insert(
            id,
            sample_counts(&p, n_per_config, derive_seed(seed, id.index())),
        );
    }
    Ok(out)
}

/// Outcome probabilities for all five configurations: exact when
/// `n_per_config` is `None`, frequencies of a sampled run otherwise.
pub fn run_plan(
    state: &QutritState,
    n_per_config: Option<u64>,
    seed: u64,
) -> Result<BTreeMap<ConfigId, OutcomeProbabilities>, MeasureError> {
    match n_per_config {
        None => Ok(ConfigId::ALL
            .into_iter()
            .map(|id| (id, outcome_probabilities(state, id.config())))
            .collect()),
        Some(n) => {
            let mut out = BTreeMap::new();
            for (id, counts) in sample_plan(state, n, seed)? {
                out.insert(id, estimate_probs(&counts)?);
            }
            Ok(out)
        }
    }
}
