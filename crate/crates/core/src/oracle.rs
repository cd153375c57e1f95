//! Brute-force reference model of the photon pair.
//!
//! Everything here works on the raw symmetric two-photon amplitude a_xy
//! (x, y in {H, V}) and projects it onto explicit analyzer vectors, with no
//! three-level shortcuts. The closed forms in [`crate::measure`] and
//! [`crate::reconstruct`] are tested against this module; it deliberately
//! shares no code with [`crate::optics::induced_qutrit_map`] or
//! [`crate::optics::to_diagonal_basis`].

// Small dense arrays: indexed loops mirror the math.
#![allow(clippy::needless_range_loop)]

use core::f64::consts::SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::measure::{Basis, MeasurementConfig};
use crate::optics::JonesMatrix;
use crate::state::QutritState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// Analyzer angles are restricted to 0, 45, 90 and 135 degrees.
    #[error("unsupported analyzer angle {degrees} degrees")]
    BadSetting { degrees: f64 },
}

/// Linear polarization analyzer in front of one detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analyzer {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Analyzer {
    /// Accepts exactly the four supported angles, with a hair of float slack.
    pub fn from_degrees(degrees: f64) -> Result<Self, OracleError> {
        for (ang, which) in [
            (0.0, Analyzer::Deg0),
            (45.0, Analyzer::Deg45),
            (90.0, Analyzer::Deg90),
            (135.0, Analyzer::Deg135),
        ] {
            if (degrees - ang).abs() < 1e-9 {
                return Ok(which);
            }
        }
        Err(OracleError::BadSetting { degrees })
    }

    /// Transmission axis as an (H, V) amplitude pair.
    pub fn vector(self) -> [Complex64; 2] {
        let r = 1.0 / SQRT_2;
        let v = match self {
            Analyzer::Deg0 => [1.0, 0.0],
            Analyzer::Deg45 => [r, r],
            Analyzer::Deg90 => [0.0, 1.0],
            Analyzer::Deg135 => [-r, r],
        };
        [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)]
    }
}

/// Symmetric amplitude a_xy of the pair; a_HV = a_VH always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAmplitude {
    a: [[Complex64; 2]; 2],
}

impl TwoPhotonAmplitude {
    /// Unfolds qutrit amplitudes into the two-photon array. The 1/sqrt(2)
    /// on the middle level keeps the Frobenius norm at one.
    pub fn embed(state: &QutritState) -> Self {
        let [c1, c2, c3] = state.amps();
        let m = c2 / SQRT_2;
        Self {
            a: [[c1, m], [m, c3]],
        }
    }

    /// Folds back to qutrit amplitudes.
    pub fn extract(&self) -> [Complex64; 3] {
        [self.a[0][0], self.a[0][1] * SQRT_2, self.a[1][1]]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.a
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// Both photons traverse the same plate: a' = J a J^T, written as the
    /// explicit double sum.
    pub fn transform(&self, j: &JonesMatrix) -> Self {
        let m = j.entries();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                for u in 0..2 {
                    for v in 0..2 {
                        out[x][y] += m[x][u] * m[y][v] * self.a[u][v];
                    }
                }
            }
        }
        Self { a: out }
    }

    /// Probability that the photon meeting `upper` passes it while the other
    /// photon passes `lower`: the squared projection onto the product vector.
    pub fn projection_probability(&self, upper: Analyzer, lower: Analyzer) -> f64 {
        let u = upper.vector();
        let l = lower.vector();
        let mut amp = Complex64::new(0.0, 0.0);
        for x in 0..2 {
            for y in 0..2 {
                amp += u[x].conj() * l[y].conj() * self.a[x][y];
            }
        }
        amp.norm_sqr()
    }

    /// The three coincidence classes of a polarizing splitter in `basis`:
    /// both photons in the upper arm, one per arm (both orders summed),
    /// both in the lower arm.
    pub fn class_probabilities(&self, basis: Basis) -> (f64, f64, f64) {
        let (up, lo) = match basis {
            Basis::HV => (Analyzer::Deg0, Analyzer::Deg90),
            Basis::Diag45 => (Analyzer::Deg45, Analyzer::Deg135),
        };
        let p_uu = self.projection_probability(up, up);
        let p_cross = self.projection_probability(up, lo) + self.projection_probability(lo, up);
        let p_ll = self.projection_probability(lo, lo);
        (p_uu, p_cross, p_ll)
    }
}

/// Full independent prediction for one protocol configuration.
pub fn config_probabilities(state: &QutritState, config: MeasurementConfig) -> (f64, f64, f64) {
    let mut amp = TwoPhotonAmplitude::embed(state);
    if let Some(j) = crate::measure::plate_jones(config.plate) {
        amp = amp.transform(&j);
    }
    amp.class_probabilities(config.basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{outcome_probabilities, ConfigId};
    use crate::state::Constraint;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_PI_4;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state(c1: Complex64, c2: Complex64, c3: Complex64) -> QutritState {
        QutritState::new(c1, c2, c3).unwrap()
    }

    #[test]
    fn embed_is_symmetric_unit_norm_and_invertible() {
        let s = QutritState::random(3, Constraint::Any);
        let a = TwoPhotonAmplitude::embed(&s);
        let e = a.entries();
        assert_eq!(e[0][1], e[1][0]);
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
        let back = a.extract();
        let orig = s.amps();
        for k in 0..3 {
            assert!((back[k] - orig[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn analyzer_angles_parse_strictly() {
        assert_eq!(Analyzer::from_degrees(45.0).unwrap(), Analyzer::Deg45);
        assert_eq!(Analyzer::from_degrees(135.0).unwrap(), Analyzer::Deg135);
        assert!(matches!(
            Analyzer::from_degrees(30.0),
            Err(OracleError::BadSetting { .. })
        ));
    }

    #[test]
    fn textbook_projections_come_out_right() {
        // |2_H>: both photons pass a horizontal analyzer pair.
        let s = state(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let a = TwoPhotonAmplitude::embed(&s);
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg0, Analyzer::Deg0),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg45, Analyzer::Deg45),
            0.25,
            epsilon = 1e-15
        );

        // |1_H 1_V>: each ordered (0, 90) projection carries 1/2, and the
        // (45, 45) projection carries 1/2 as well.
        let s = state(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let a = TwoPhotonAmplitude::embed(&s);
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg0, Analyzer::Deg90),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg90, Analyzer::Deg0),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg45, Analyzer::Deg45),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            a.projection_probability(Analyzer::Deg0, Analyzer::Deg0),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn plate_at_zero_only_dephases_the_levels() {
        let s = QutritState::random(9, Constraint::Any);
        let j = crate::optics::jones(0.0, FRAC_PI_4);
        let out = TwoPhotonAmplitude::embed(&s).transform(&j).extract();
        let [c1, c2, c3] = s.amps();
        let sqrt_i = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((out[0] - c1).norm() < 1e-14);
        assert!((out[1] - c2 * sqrt_i).norm() < 1e-14);
        assert!((out[2] - c3 * Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn transforms_compose_like_matrix_products() {
        let s = QutritState::random(21, Constraint::Any);
        let j1 = crate::optics::jones(0.3, 1.2);
        let j2 = crate::optics::jones(-0.7, 0.4);
        let a = TwoPhotonAmplitude::embed(&s);
        let seq = a.transform(&j1).transform(&j2).entries();
        let prod = a.transform(&(j2 * j1)).entries();
        for x in 0..2 {
            for y in 0..2 {
                assert!((seq[x][y] - prod[x][y]).norm() < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn prop_ordered_pairs_exhaust_the_ensemble(seed in any::<u64>()) {
            let s = QutritState::random(seed, Constraint::Any);
            let a = TwoPhotonAmplitude::embed(&s);
            for basis in [Basis::HV, Basis::Diag45] {
                let (p_uu, p_cross, p_ll) = a.class_probabilities(basis);
                prop_assert!((p_uu + p_cross + p_ll - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn prop_oracle_agrees_with_the_closed_forms(seed in any::<u64>()) {
            let s = QutritState::random(seed, Constraint::Any);
            for id in ConfigId::ALL {
                let (p_uu, p_cross, p_ll) = config_probabilities(&s, id.config());
                let fast = outcome_probabilities(&s, id.config());
                prop_assert!((p_uu - fast.p_uu()).abs() < 1e-12);
                prop_assert!((p_cross - fast.p_cross()).abs() < 1e-12);
                prop_assert!((p_ll - fast.p_ll()).abs() < 1e-12);
            }
        }
    }
}
