//! Polarization qutrit states of a collinear photon pair.
//!
//! A frequency-degenerate photon pair sharing one spatial mode has three
//! polarization levels, spanned by the number states |2_H>, |1_H 1_V> and
//! |2_V>. A pure state is an amplitude triple (c1, c2, c3) with
//! |c1|^2 + |c2|^2 + |c3|^2 = 1.
//!
//! Global phase carries no physics. Every [`QutritState`] is therefore kept
//! in a fixed gauge: the anchor amplitude (c2 when its magnitude is at least
//! [`GAUGE_EPS`], otherwise c3, otherwise c1) is made real and non-negative.
//! Two descriptions of the same ray become identical triples, so states can
//! be compared component by component.

use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Magnitude below which an amplitude cannot serve as the gauge anchor.
pub const GAUGE_EPS: f64 = 1e-12;

/// Norm below which an amplitude triple counts as the zero vector.
pub const ZERO_NORM_EPS: f64 = 1e-15;

/// Slack allowed in weight triples handed to [`QutritState::assemble`].
pub const ASSEMBLE_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// The amplitude triple has numerically vanishing length.
    #[error("amplitude vector has vanishing norm")]
    ZeroVector,
    /// An amplitude or weight is NaN or infinite.
    #[error("non-finite amplitude or weight")]
    NonFinite,
    /// Weights passed to `assemble` do not form a probability triple.
    #[error("weights sum to {sum}, expected 1 within {ASSEMBLE_SUM_TOL:e}")]
    BadProbabilitySum { sum: f64 },
}

/// Wraps an angle to the half-open interval (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut r = theta % TAU;
    if r > PI {
        r -= TAU;
    } else if r <= -PI {
        r += TAU;
    }
    r
}

/// The two free phases of a state written as
/// (|c1| e^{i phi1}, |c2|, |c3| e^{i phi3}), plus their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    pub phi1: f64,
    pub phi3: f64,
    /// phi1 - phi3, wrapped to (-pi, pi].
    pub delta: f64,
}

impl PhasePair {
    pub fn new(phi1: f64, phi3: f64) -> Self {
        let phi1 = wrap_angle(phi1);
        let phi3 = wrap_angle(phi3);
        Self {
            phi1,
            phi3,
            delta: wrap_angle(phi1 - phi3),
        }
    }
}

/// Families the random state generator can draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Haar-like generic draw: six independent standard normals.
    Any,
    /// c2 forced to zero.
    NoC2,
    /// c3 forced to -c1 (the family whose phase system degenerates).
    SpecialC1MinusC3,
}

/// Scales an amplitude triple to unit norm. Leaves the gauge alone.
pub fn normalize(amps: [Complex64; 3]) -> Result<[Complex64; 3], StateError> {
    let mut n2 = 0.0;
    for a in &amps {
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(StateError::NonFinite);
        }
        n2 += a.norm_sqr();
    }
    let n = n2.sqrt();
    if !n.is_finite() {
        return Err(StateError::NonFinite);
    }
    if n < ZERO_NORM_EPS {
        return Err(StateError::ZeroVector);
    }
    Ok(amps.map(|a| a / n))
}

/// Removes the global phase: multiplies by the unit complex number that makes
/// the anchor amplitude real and non-negative.
///
/// Already-canonical triples are returned unchanged bit for bit, so the map
/// is exactly idempotent.
pub fn canonicalize(amps: [Complex64; 3]) -> [Complex64; 3] {
    let anchor = if amps[1].norm() >= GAUGE_EPS {
        1
    } else if amps[2].norm() >= GAUGE_EPS {
        2
    } else {
        0
    };
    let a = amps[anchor];
    if a.im == 0.0 && a.re >= 0.0 {
        return amps;
    }
    let m = a.norm();
    if m == 0.0 {
        return amps;
    }
    let phase = a.conj() / m;
    let mut out = amps.map(|z| z * phase);
    // The anchor is exactly real by construction; write it as such so that
    // rounding in the complex product cannot leave a stray imaginary dust.
    out[anchor] = Complex64::new(m, 0.0);
    out
}

/// A normalized, gauge-fixed polarization qutrit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritState {
    amps: [Complex64; 3],
}

impl QutritState {
    /// Builds a state from raw amplitudes, normalizing and gauge-fixing.
    pub fn new(c1: Complex64, c2: Complex64, c3: Complex64) -> Result<Self, StateError> {
        let amps = normalize([c1, c2, c3])?;
        Ok(Self {
            amps: canonicalize(amps),
        })
    }

    pub fn c1(&self) -> Complex64 {
        self.amps[0]
    }

    pub fn c2(&self) -> Complex64 {
        self.amps[1]
    }

    pub fn c3(&self) -> Complex64 {
        self.amps[2]
    }

    pub fn amps(&self) -> [Complex64; 3] {
        self.amps
    }

    /// Occupation probabilities (|c1|^2, |c2|^2, |c3|^2).
    pub fn probabilities(&self) -> [f64; 3] {
        self.amps.map(|a| a.norm_sqr())
    }

    /// Arguments of c1 and c3 in the fixed gauge.
    pub fn phases(&self) -> PhasePair {
        PhasePair::new(self.amps[0].arg(), self.amps[2].arg())
    }

    /// Squared overlap |<self|other>|^2. One exactly when both describe the
    /// same ray, gauge-independent by construction.
    pub fn fidelity(&self, other: &QutritState) -> f64 {
        let mut ov = Complex64::new(0.0, 0.0);
        for k in 0..3 {
            ov += self.amps[k].conj() * other.amps[k];
        }
        ov.norm_sqr()
    }

    /// Rebuilds a state from measured weights and recovered phases.
    ///
    /// `w_hh`, `w_hv_tot`, `w_vv` are the occupations of |2_H>, |1_H 1_V>,
    /// |2_V>; they must sum to one within [`ASSEMBLE_SUM_TOL`]. Tiny negative
    /// weights (rounding dust from subtractions) are clamped to zero.
    pub fn assemble(
        w_hh: f64,
        w_hv_tot: f64,
        w_vv: f64,
        phases: &PhasePair,
    ) -> Result<Self, StateError> {
        let ws = [w_hh, w_hv_tot, w_vv];
        let mut sum = 0.0;
        for w in ws {
            if !w.is_finite() {
                return Err(StateError::NonFinite);
            }
            if w < -ASSEMBLE_SUM_TOL {
                return Err(StateError::BadProbabilitySum { sum: w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > ASSEMBLE_SUM_TOL {
            return Err(StateError::BadProbabilitySum { sum });
        }
        let c1 = Complex64::from_polar(w_hh.max(0.0).sqrt(), phases.phi1);
        let c2 = Complex64::new(w_hv_tot.max(0.0).sqrt(), 0.0);
        let c3 = Complex64::from_polar(w_vv.max(0.0).sqrt(), phases.phi3);
        Self::new(c1, c2, c3)
    }

    /// Deterministic pseudo-random state: six standard normals seeded by
    /// `seed`, then the constraint applied, then normalize + gauge-fix.
    pub fn random(seed: u64, constraint: Constraint) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g: [f64; 6] = core::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let mut c = [
            Complex64::new(g[0], g[1]),
            Complex64::new(g[2], g[3]),
            Complex64::new(g[4], g[5]),
        ];
        match constraint {
            Constraint::Any => {}
            Constraint::NoC2 => c[1] = Complex64::new(0.0, 0.0),
            Constraint::SpecialC1MinusC3 => c[2] = -c[0],
        }
        Self::new(c[0], c[1], c[2]).expect("normal draws have nonzero norm")
    }
}
