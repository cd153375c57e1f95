//! Shared fixtures for the formula and acceptance targets.
//!
//! Each [`FormulaCheck`] pins one re-derived inversion formula against the
//! brute-force oracle and, next to it, evaluates a near-miss variant of the
//! same formula (dropped normalization, wrong trig entry, halved cross term,
//! misread weight convention). The derived form must track the oracle to
//! rounding; every variant must miss it by a wide margin. The variants are
//! the plausible derivation slips for this system, kept here so a regression
//! toward any of them is caught by name.
#![allow(dead_code)]

use std::f64::consts::PI;

use biphoton_core::oracle::config_probabilities;
use biphoton_core::reconstruct::{step1_magnitudes, step23_delta};
use biphoton_core::{
    wrap_angle, Analyzer, ConfigId, OutcomeProbabilities, PhasePair, QutritState,
    TwoPhotonAmplitude,
};

pub struct FormulaCheck {
    pub name: &'static str,
    /// |re-derived form - oracle| on the fixture state.
    pub derived_dev: f64,
    /// |near-miss variant - oracle| on the same state.
    pub variant_dev: f64,
}

/// Generic fixture: weights (1/4, 1/4, 1/2), phi1 = pi/3, phi3 = -pi/3,
/// so delta = 2pi/3 and every cross term is materially nonzero.
pub fn generic_point() -> QutritState {
    QutritState::assemble(0.25, 0.25, 0.5, &PhasePair::new(PI / 3.0, -PI / 3.0))
        .expect("weights sum to one")
}

/// Special-family fixture: c3 = -c1, weights (0.3, 0.4, 0.3), phi1 = pi/5,
/// where sin and cos are both nonzero and distinct.
pub fn special_point() -> QutritState {
    QutritState::assemble(0.3, 0.4, 0.3, &PhasePair::new(PI / 5.0, PI / 5.0 - PI))
        .expect("weights sum to one")
}

pub fn oracle_probs(state: &QutritState, id: ConfigId) -> OutcomeProbabilities {
    let (uu, cross, ll) = config_probabilities(state, id.config());
    OutcomeProbabilities::new(uu, cross, ll).expect("oracle emits a distribution")
}

/// The generic sine solution is the Cramer minor with a sine lower-left
/// entry, divided by the system determinant. The variant swaps the entry for
/// a cosine and keeps the bare minor.
pub fn check_sine_solution() -> FormulaCheck {
    let s = generic_point();
    let a = oracle_probs(&s, ConfigId::A);
    let b = oracle_probs(&s, ConfigId::B);
    let c = oracle_probs(&s, ConfigId::C);
    let d = oracle_probs(&s, ConfigId::D);
    let w = step1_magnitudes(&a);
    let delta = step23_delta(&a, &b, &c).expect("outer weights alive").delta;

    let det = w.determinant(delta);
    let sq = (0.5 * w.w_hv_tot).sqrt();
    let f_re = (b.p_uu() - b.p_ll()) / (2.0 * sq);
    let f_im = d.p_cross() / sq - sq - det / (4.0 * sq);
    let (sin_d, cos_d) = delta.sin_cos();
    let p = w.w_hh.sqrt() + w.w_vv.sqrt() * cos_d;
    let q = w.w_vv.sqrt() * sin_d;

    let derived = (q * f_re + p * f_im) / det;
    let variant = w.w_vv.sqrt() * cos_d * f_re + p * f_im;
    let truth = (PI / 3.0).sin();
    FormulaCheck {
        name: "generic sine solve: unit normalization and sine entry",
        derived_dev: (derived - truth).abs(),
        variant_dev: (variant - truth).abs(),
    }
}

/// delta is phi1 - phi3: rebuilding phi3 as phi1 - delta lands on the truth,
/// the opposite sign convention does not.
pub fn check_delta_convention() -> FormulaCheck {
    let s = generic_point();
    let a = oracle_probs(&s, ConfigId::A);
    let b = oracle_probs(&s, ConfigId::B);
    let c = oracle_probs(&s, ConfigId::C);
    let delta = step23_delta(&a, &b, &c).expect("outer weights alive").delta;

    let truth = s.phases();
    let derived = wrap_angle(truth.phi1 - delta);
    let variant = wrap_angle(truth.phi1 + delta);
    FormulaCheck {
        name: "delta convention: phi1 minus phi3",
        derived_dev: wrap_angle(derived - truth.phi3).abs(),
        variant_dev: wrap_angle(variant - truth.phi3).abs(),
    }
}

/// The phase-system determinant is w_hh + w_vv + 2 sqrt(w_hh w_vv) cos delta.
/// Dropping the factor two breaks the whole phase solve, including the
/// imaginary-part extraction that subtracts the determinant.
pub fn check_determinant_factor() -> FormulaCheck {
    let s = generic_point();
    let a = oracle_probs(&s, ConfigId::A);
    let b = oracle_probs(&s, ConfigId::B);
    let c = oracle_probs(&s, ConfigId::C);
    let d = oracle_probs(&s, ConfigId::D);
    let w = step1_magnitudes(&a);
    let delta = step23_delta(&a, &b, &c).expect("outer weights alive").delta;
    let (sin_d, cos_d) = delta.sin_cos();
    let p = w.w_hh.sqrt() + w.w_vv.sqrt() * cos_d;
    let q = w.w_vv.sqrt() * sin_d;
    let sq = (0.5 * w.w_hv_tot).sqrt();
    let f_re = (b.p_uu() - b.p_ll()) / (2.0 * sq);

    let solve = |det: f64| {
        let f_im = d.p_cross() / sq - sq - det / (4.0 * sq);
        let cos1 = (p * f_re - q * f_im) / det;
        let sin1 = (q * f_re + p * f_im) / det;
        (cos1, sin1)
    };
    let dev = |pair: (f64, f64)| {
        let (cos1, sin1) = pair;
        let truth = PI / 3.0;
        (cos1 - truth.cos()).abs().max((sin1 - truth.sin()).abs())
    };
    let cross = (w.w_hh * w.w_vv).sqrt() * cos_d;
    FormulaCheck {
        name: "phase-system determinant: factor two on the cross term",
        derived_dev: dev(solve(w.w_hh + w.w_vv + 2.0 * cross)),
        variant_dev: dev(solve(w.w_hh + w.w_vv + cross)),
    }
}

/// On the c3 = -c1 family the extreme class of the plate-at-zero diagonal
/// configuration carries the cross term +sqrt(w_hh w_hv_tot) sin phi1. The
/// variant couples the two outer weights instead, with the opposite sign.
pub fn check_special_sum_probe() -> FormulaCheck {
    let s = special_point();
    let a = oracle_probs(&s, ConfigId::A);
    let c = oracle_probs(&s, ConfigId::C);
    let w = step1_magnitudes(&a);
    let outer = 0.5 * (w.w_hh + w.w_vv);
    let measured_cross = c.p_uu() - 0.5 * (outer + w.w_hv_tot);

    let sin1 = (PI / 5.0).sin();
    let derived = (outer * w.w_hv_tot).sqrt() * sin1;
    let variant = -(w.w_hh * w.w_vv / 2.0).sqrt() * sin1;
    FormulaCheck {
        name: "special sum probe: cross term couples outer and middle weights",
        derived_dev: (measured_cross - derived).abs(),
        variant_dev: (measured_cross - variant).abs(),
    }
}

/// The plate-at-45 extreme class on the same family reads minus the sine,
/// not plus the cosine that a naive |c1 + c2/2|^2 expansion suggests.
pub fn check_special_difference_probe() -> FormulaCheck {
    let s = special_point();
    let a = oracle_probs(&s, ConfigId::A);
    let d = oracle_probs(&s, ConfigId::D);
    let w = step1_magnitudes(&a);
    let outer = 0.5 * (w.w_hh + w.w_vv);
    let measured_cross = d.p_uu() - (outer + 0.25 * w.w_hv_tot);

    let scale = (outer * w.w_hv_tot).sqrt();
    let derived = -scale * (PI / 5.0).sin();
    let variant = scale * (PI / 5.0).cos();
    FormulaCheck {
        name: "special difference probe: sine cross term, negative",
        derived_dev: (measured_cross - derived).abs(),
        variant_dev: (measured_cross - variant).abs(),
    }
}

/// |c2|^2 is the whole cross class, i.e. twice either ordered pair; reading
/// it as twice the class total double-counts.
pub fn check_cross_weight_convention() -> FormulaCheck {
    let s = special_point();
    let amp = TwoPhotonAmplitude::embed(&s);
    let p_hv = amp.projection_probability(Analyzer::Deg0, Analyzer::Deg90);
    let p_vh = amp.projection_probability(Analyzer::Deg90, Analyzer::Deg0);

    let truth = s.c2().norm_sqr();
    let derived_dev = (2.0 * p_hv - truth).abs().max((p_hv - p_vh).abs());
    let variant_dev = (2.0 * (p_hv + p_vh) - truth).abs();
    FormulaCheck {
        name: "cross weight: c2 squared spans both ordered pairs",
        derived_dev,
        variant_dev,
    }
}

pub fn all_formula_checks() -> Vec<FormulaCheck> {
    vec![
        check_sine_solution(),
        check_delta_convention(),
        check_determinant_factor(),
        check_special_sum_probe(),
        check_special_difference_probe(),
        check_cross_weight_convention(),
    ]
}
