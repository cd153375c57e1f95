//! Recovery of the qutrit from the five measured probability triples.
//!
//! The solve runs in the fixed gauge of [`crate::state`]: c2 real and
//! non-negative, so the unknowns are the weights (w_hh, w_hv_tot, w_vv) and
//! the two phases (phi1, phi3).
//!
//! * Step 1: configuration A reads the weights directly.
//! * Steps 2/3: the cross classes of B and C give cos and sin of
//!   delta = phi1 - phi3 through the interference of c1 with c3.
//! * Step 4: configurations B and D give the real and imaginary parts of
//!   c1 + c3 relative to c2, a 2x2 linear system in (cos phi1, sin phi1)
//!   whose determinant is D = w_hh + w_vv + 2 sqrt(w_hh w_vv) cos delta.
//! * Step 5: on the family c3 = -c1 that determinant vanishes identically
//!   and the system says nothing. C and D are then re-read as direct
//!   probes: both expose sin phi1 through the plate-induced imbalance
//!   between their extreme classes.
//!
//! Branches, chosen in this order from the measured weights alone:
//! tiny w_hv_tot and tiny w_hh * w_vv leave nothing but magnitudes
//! ([`Branch::MagnitudesOnlyDegenerate`]); tiny w_hv_tot alone reduces the
//! state to two levels whose single phase is delta ([`Branch::C2Zero`]);
//! tiny w_hh * w_vv with interference present keeps the generic equations
//! for the one surviving phase ([`Branch::Generic`]); a vanishing
//! determinant switches to the direct probes
//! ([`Branch::SpecialC1MinusC3`]); anything else is the full linear solve
//! ([`Branch::Generic`]).
//!
//! On the special family the five configurations determine only sin phi1:
//! the two states with phi1 and pi - phi1 produce identical statistics in
//! every configuration used here. Step 5 returns the solution with
//! cos phi1 >= 0. Callers needing the other sign must add a measurement
//! outside this plan.

use alloc::collections::BTreeMap;

use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::measure::{ConfigId, OutcomeProbabilities};
use crate::state::{wrap_angle, PhasePair, QutritState};

/// Weights (or their product) at or below this are degenerate: the affected
/// interference term is considered unmeasurable and its branch is taken.
pub const DEGEN_EPS: f64 = 1e-6;

/// Step-4 determinants at or below this route to the special-family solve.
pub const DET_EPS: f64 = 1e-6;

/// Probe-disagreement ceiling for exact probability input.
pub const RESID_MAX_IDEAL: f64 = 1e-3;

/// Overshoots beyond 1 + CLAMP_DUST set the `clamped` flag; smaller ones are
/// silently clamped as rounding dust.
pub const CLAMP_DUST: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    /// The plan lacks a configuration this branch needs.
    #[error("configuration {0} is required but absent")]
    MissingConfig(ConfigId),
    /// An interference scale is numerically dead, the solve would divide by it.
    #[error("interference scale {scale:e} is degenerate")]
    DegenerateMagnitudes { scale: f64 },
    /// The step-4 system has no usable determinant and the input does not
    /// look like the special family either.
    #[error("phase system is singular (determinant {determinant:e})")]
    SingularSystem { determinant: f64 },
    /// Redundant probes disagree beyond the residual ceiling.
    #[error("probes disagree: residual {residual:e} exceeds limit {limit:e}")]
    InconsistentInput { residual: f64, limit: f64 },
}

/// Occupation weights read off configuration A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnitudes {
    pub w_hh: f64,
    pub w_hv_tot: f64,
    pub w_vv: f64,
}

impl Magnitudes {
    /// Determinant of the step-4 system, |c1 + c3|^2 in disguise.
    pub fn determinant(&self, delta: f64) -> f64 {
        self.w_hh + self.w_vv + 2.0 * (self.w_hh * self.w_vv).sqrt() * delta.cos()
    }
}

/// Step 1: configuration A measures the three weights directly.
pub fn step1_magnitudes(a: &OutcomeProbabilities) -> Magnitudes {
    Magnitudes {
        w_hh: a.p_uu(),
        w_hv_tot: a.p_cross(),
        w_vv: a.p_ll(),
    }
}

/// Result of the delta solve (steps 2 and 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSolve {
    /// phi1 - phi3, wrapped to (-pi, pi].
    pub delta: f64,
    pub a_cos: f64,
    pub a_sin: f64,
    /// |a_cos^2 + a_sin^2 - 1| before clamping.
    pub residual: f64,
    pub clamped: bool,
}

/// Steps 2/3: the cross classes of configurations B and C read cos delta
/// and sin delta. Requires both outer weights to be alive.
pub fn step23_delta(
    a: &OutcomeProbabilities,
    b: &OutcomeProbabilities,
    c: &OutcomeProbabilities,
) -> Result<DeltaSolve, ReconstructError> {
    let w = step1_magnitudes(a);
    let product = w.w_hh * w.w_vv;
    if product <= DEGEN_EPS * DEGEN_EPS {
        return Err(ReconstructError::DegenerateMagnitudes { scale: product });
    }
    let denom = 2.0 * product.sqrt();
    let raw_cos = (w.w_hh + w.w_vv - 2.0 * b.p_cross()) / denom;
    let raw_sin = (w.w_hh + w.w_vv - 2.0 * c.p_cross()) / denom;
    let clamped = raw_cos.abs() > 1.0 + CLAMP_DUST || raw_sin.abs() > 1.0 + CLAMP_DUST;
    let a_cos = raw_cos.clamp(-1.0, 1.0);
    let a_sin = raw_sin.clamp(-1.0, 1.0);
    let residual = (raw_cos * raw_cos + raw_sin * raw_sin - 1.0).abs();
    let sign = if a_sin >= 0.0 { 1.0 } else { -1.0 };
    Ok(DeltaSolve {
        delta: wrap_angle(a_cos.acos() * sign),
        a_cos,
        a_sin,
        residual,
        clamped,
    })
}

/// Result of the generic phase solve (step 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSolve {
    pub phi1: f64,
    /// |cos^2 + sin^2 - 1| of the recovered phi1 components.
    pub residual: f64,
}

/// Step 4: with delta known, configurations B and D give Re(c1 + c3) and
/// Im(c1 + c3) against the real c2, and a 2x2 rotation-like system yields
/// phi1. Singular exactly when c3 = -c1.
pub fn step4_phase(
    w: &Magnitudes,
    delta: f64,
    b: &OutcomeProbabilities,
    d: &OutcomeProbabilities,
) -> Result<PhaseSolve, ReconstructError> {
    if w.w_hv_tot <= DEGEN_EPS {
        return Err(ReconstructError::DegenerateMagnitudes { scale: w.w_hv_tot });
    }
    let det = w.determinant(delta);
    if det <= DET_EPS {
        return Err(ReconstructError::SingularSystem { determinant: det });
    }
    let sq = (0.5 * w.w_hv_tot).sqrt();
    let f_re = (b.p_uu() - b.p_ll()) / (2.0 * sq);
    let f_im = d.p_cross() / sq - sq - det / (4.0 * sq);
    let (sin_d, cos_d) = delta.sin_cos();
    let p = w.w_hh.sqrt() + w.w_vv.sqrt() * cos_d;
    let q = w.w_vv.sqrt() * sin_d;
    let cos1 = (p * f_re - q * f_im) / det;
    let sin1 = (q * f_re + p * f_im) / det;
    let residual = (cos1 * cos1 + sin1 * sin1 - 1.0).abs();
    Ok(PhaseSolve {
        phi1: sin1.atan2(cos1),
        residual,
    })
}

/// Result of the special-family solve (step 5).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialSolve {
    /// Solution with cos phi1 >= 0; the sign of cos phi1 is unobservable here.
    pub phi1: f64,
    pub phi3: f64,
    /// |sin^2 - sin^2| disagreement of the two probes.
    pub residual: f64,
    pub clamped: bool,
}

/// Step 5: on the family c3 = -c1 the extreme classes of the two plate
/// configurations each read sin phi1 directly. `eighth_at0_diag` is the
/// probability triple of configuration C, `eighth_at45_hv` that of D.
/// (The plate-at-zero HV configuration E is diagonal in its analyzer basis
/// and cannot see any phase, so it takes no part in the solve.)
///
/// On this family both probes carry the same sine, so the residual is the
/// deviation of sin^2 (from one probe) plus its complement (from the other)
/// from 1. Returns the phi1 with non-negative cosine; see the module notes
/// on why the other sign cannot be told apart.
pub fn step5_special(
    w: &Magnitudes,
    eighth_at0_diag: &OutcomeProbabilities,
    eighth_at45_hv: &OutcomeProbabilities,
    resid_limit: f64,
) -> Result<SpecialSolve, ReconstructError> {
    let t = w.w_hv_tot;
    if w.w_hh * t <= DEGEN_EPS * DEGEN_EPS {
        // No interference scale left: any phase pair describes the ray.
        // (0, pi) is the gauge the antisymmetric family settles to.
        return Ok(SpecialSolve {
            phi1: 0.0,
            phi3: PI,
            residual: 0.0,
            clamped: false,
        });
    }
    // On the family w_hh and w_vv estimate the same weight; average them.
    let scale = (0.5 * (w.w_hh + w.w_vv) * t).sqrt();
    let s1 = 0.5 * (eighth_at0_diag.p_uu() - eighth_at0_diag.p_ll()) / scale;
    let s2 = 0.5 * (eighth_at45_hv.p_ll() - eighth_at45_hv.p_uu()) / scale;
    let residual = (s1 * s1 - s2 * s2).abs();
    if residual > resid_limit {
        return Err(ReconstructError::InconsistentInput {
            residual,
            limit: resid_limit,
        });
    }
    let clamped = s1.abs() > 1.0 + CLAMP_DUST || s2.abs() > 1.0 + CLAMP_DUST;
    let s = 0.5 * (s1.clamp(-1.0, 1.0) + s2.clamp(-1.0, 1.0));
    let c = (1.0 - s * s).max(0.0).sqrt();
    let phi1 = s.atan2(c);
    Ok(SpecialSolve {
        phi1,
        phi3: wrap_angle(phi1 - PI),
        residual,
        clamped,
    })
}

/// Which solve path produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Generic,
    C2Zero,
    SpecialC1MinusC3,
    MagnitudesOnlyDegenerate,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Generic => "Generic",
            Branch::C2Zero => "C2Zero",
            Branch::SpecialC1MinusC3 => "SpecialC1MinusC3",
            Branch::MagnitudesOnlyDegenerate => "MagnitudesOnlyDegenerate",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Measured probability triples plus how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolInput {
    probs: BTreeMap<ConfigId, OutcomeProbabilities>,
    n_per_config: Option<u64>,
}

impl ProtocolInput {
    /// Exact probabilities (no shot noise).
    pub fn ideal(probs: BTreeMap<ConfigId, OutcomeProbabilities>) -> Self {
        Self {
            probs,
            n_per_config: None,
        }
    }

    /// Frequencies estimated from `n_per_config` coincidences per
    /// configuration. Zero counts fall back to the exact-input tolerance.
    pub fn sampled(probs: BTreeMap<ConfigId, OutcomeProbabilities>, n_per_config: u64) -> Self {
        Self {
            probs,
            n_per_config: (n_per_config > 0).then_some(n_per_config),
        }
    }

    pub fn probs(&self) -> &BTreeMap<ConfigId, OutcomeProbabilities> {
        &self.probs
    }

    pub fn n_per_config(&self) -> Option<u64> {
        self.n_per_config
    }

    /// Probe-disagreement ceiling: [`RESID_MAX_IDEAL`] for exact input,
    /// twenty binomial standard errors for counted input.
    pub fn resid_limit(&self) -> f64 {
        match self.n_per_config {
            None => RESID_MAX_IDEAL,
            Some(n) => 20.0 / (n as f64).sqrt(),
        }
    }

    fn require(&self, id: ConfigId) -> Result<&OutcomeProbabilities, ReconstructError> {
        self.probs
            .get(&id)
            .ok_or(ReconstructError::MissingConfig(id))
    }
}

/// Everything the solve can say about one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    pub state: QutritState,
    /// phi1 - phi3 as measured (0 when no phase was measurable).
    pub delta: f64,
    pub branch: Branch,
    /// Step-4 determinant at the reported delta, for all branches.
    pub determinant: f64,
    /// Largest probe disagreement across the steps that ran.
    pub residual: f64,
    /// True when some probe overshot its range beyond rounding dust.
    pub clamped: bool,
}

struct OneSided {
    phi: f64,
    hh_side: bool,
    residual: f64,
}

/// Generic equations read for a single surviving outer component; the
/// sqrt(w_hh w_vv) interference terms are below the degeneracy floor by
/// construction and are dropped.
fn one_sided_phase(w: &Magnitudes, b: &OutcomeProbabilities, d: &OutcomeProbabilities) -> OneSided {
    let sq = (0.5 * w.w_hv_tot).sqrt();
    let f_re = (b.p_uu() - b.p_ll()) / (2.0 * sq);
    let f_im = d.p_cross() / sq - sq - (w.w_hh + w.w_vv) / (4.0 * sq);
    let hh_side = w.w_hh >= w.w_vv;
    let w_surv = w.w_hh.max(w.w_vv);
    OneSided {
        phi: f_im.atan2(f_re),
        hh_side,
        residual: ((f_re * f_re + f_im * f_im) / w_surv - 1.0).abs(),
    }
}

/// Full pipeline: weights, delta, then the phase branch the weights call for.
///
/// Configurations A and B are always required; C, D, E only when the branch
/// reached needs them (the special branch insists on the complete plan).
pub fn reconstruct(input: &ProtocolInput) -> Result<ReconstructionReport, ReconstructError> {
    let a = input.require(ConfigId::A)?;
    let b = input.require(ConfigId::B)?;
    let w = step1_magnitudes(a);
    let limit = input.resid_limit();
    let t = w.w_hv_tot;
    let product = w.w_hh * w.w_vv;
    let floor = DEGEN_EPS * DEGEN_EPS;

    let (branch, phases, delta, residual, clamped) = if t <= DEGEN_EPS && product <= floor {
        (
            Branch::MagnitudesOnlyDegenerate,
            PhasePair::new(0.0, 0.0),
            0.0,
            0.0,
            false,
        )
    } else if t <= DEGEN_EPS {
        let c = input.require(ConfigId::C)?;
        let ds = step23_delta(a, b, c)?;
        // Two live levels only; their single relative phase is delta, and
        // the gauge puts it on c1.
        (
            Branch::C2Zero,
            PhasePair::new(ds.delta, 0.0),
            ds.delta,
            ds.residual,
            ds.clamped,
        )
    } else if product <= floor {
        let w_surv = w.w_hh.max(w.w_vv);
        if w_surv <= DEGEN_EPS {
            (
                Branch::MagnitudesOnlyDegenerate,
                PhasePair::new(0.0, 0.0),
                0.0,
                0.0,
                false,
            )
        } else {
            let d = input.require(ConfigId::D)?;
            let os = one_sided_phase(&w, b, d);
            let phases = if os.hh_side {
                PhasePair::new(os.phi, 0.0)
            } else {
                PhasePair::new(0.0, os.phi)
            };
            (Branch::Generic, phases, phases.delta, os.residual, false)
        }
    } else {
        let c = input.require(ConfigId::C)?;
        let ds = step23_delta(a, b, c)?;
        let det = w.determinant(ds.delta);
        if det <= DET_EPS {
            let d = input.require(ConfigId::D)?;
            // E carries no phase information (its plate is diagonal in the
            // analyzer basis), but the special branch only trusts input
            // that ran the complete plan.
            input.require(ConfigId::E)?;
            let ss = step5_special(&w, c, d, limit)?;
            (
                Branch::SpecialC1MinusC3,
                PhasePair::new(ss.phi1, ss.phi3),
                wrap_angle(ss.phi1 - ss.phi3),
                ds.residual.max(ss.residual),
                ds.clamped || ss.clamped,
            )
        } else {
            let d = input.require(ConfigId::D)?;
            let ps = step4_phase(&w, ds.delta, b, d)?;
            (
                Branch::Generic,
                PhasePair::new(ps.phi1, wrap_angle(ps.phi1 - ds.delta)),
                ds.delta,
                ds.residual.max(ps.residual),
                ds.clamped,
            )
        }
    };

    if residual > limit {
        return Err(ReconstructError::InconsistentInput { residual, limit });
    }
    let state = QutritState::assemble(w.w_hh, w.w_hv_tot, w.w_vv, &phases)
        .expect("validated outcome probabilities sum to one");
    Ok(ReconstructionReport {
        state,
        delta,
        branch,
        determinant: w.determinant(delta),
        residual,
        clamped,
    })
}
