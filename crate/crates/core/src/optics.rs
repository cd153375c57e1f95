//! Jones calculus for the plates and basis changes used by the coincidence
//! protocol, and its lift from one photon to the photon pair.
//!
//! Conventions, all load-bearing:
//!
//! * A retarder with slow axis at angle `alpha` from horizontal and
//!   retardance `phi` is `R(alpha) diag(1, e^{i phi}) R(-alpha)` with `R` the
//!   usual real rotation. Its determinant is `e^{i phi}`.
//! * The eighth-wave plate has `phi = pi/4`; `sqrt(i)` below always means
//!   the principal value `e^{i pi/4}`.
//! * The diagonal basis is `|45> = (|H> + |V>)/sqrt(2)` and
//!   `|135> = (-|H> + |V>)/sqrt(2)`.
//!
//! A single-photon map `J` acts on the pair's three-level space through the
//! symmetric square: if `J = [[a, b], [c, d]]` then the amplitudes over
//! (|2_H>, |1_H 1_V>, |2_V>) transform by [`induced_qutrit_map`].

// Small dense matrices: indexed loops mirror the math.
#![allow(clippy::needless_range_loop)]

use core::ops::Mul;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

/// Largest deviation from `J^dagger J = 1` tolerated by [`JonesMatrix::new`].
pub const UNITARITY_EPS: f64 = 1e-12;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    /// The supplied 2x2 matrix is not unitary within [`UNITARITY_EPS`].
    #[error("matrix is not unitary (worst defect {defect:e})")]
    NonUnitary { defect: f64 },
}

/// A unitary single-photon polarization transform in the (H, V) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    m: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    /// Validates unitarity; the entry layout is `m[row][col]`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self, OpticsError> {
        let mut defect = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut g = Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    g += m[k][i].conj() * m[k][j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((g - want).norm());
            }
        }
        if defect > UNITARITY_EPS {
            return Err(OpticsError::NonUnitary { defect });
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
        }
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn determinant(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    /// `self * rhs` applies `rhs` first. Products of unitaries stay unitary,
    /// so no revalidation happens here.
    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    m[i][j] += self.m[i][k] * rhs.m[k][j];
                }
            }
        }
        JonesMatrix { m }
    }
}

/// Retarder with axis angle `alpha` and retardance `phi`:
/// `R(alpha) diag(1, e^{i phi}) R(-alpha)`, written out entrywise.
pub fn jones(alpha: f64, phi: f64) -> JonesMatrix {
    let (s, c) = alpha.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let one = Complex64::new(1.0, 0.0);
    let off = (one - e) * (s * c);
    JonesMatrix {
        m: [
            [one * (c * c) + e * (s * s), off],
            [off, e * (c * c) + one * (s * s)],
        ],
    }
}

/// Basis change from (H, V) to (45, 135): rows are the new bra vectors.
pub fn diag45_rotation() -> JonesMatrix {
    let p = Complex64::new(1.0 / SQRT_2, 0.0);
    let n = Complex64::new(-1.0 / SQRT_2, 0.0);
    JonesMatrix {
        m: [[p, p], [n, p]],
    }
}

/// Applies a Jones matrix to a single-photon amplitude pair.
pub fn apply_single(j: &JonesMatrix, v: [Complex64; 2]) -> [Complex64; 2] {
    let m = j.m;
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// The action of a single-photon unitary on the pair's three-level space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritMap {
    t: [[Complex64; 3]; 3],
}

impl QutritMap {
    pub fn identity() -> Self {
        let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (k, row) in t.iter_mut().enumerate() {
            row[k] = Complex64::new(1.0, 0.0);
        }
        Self { t }
    }

    pub fn rows(&self) -> [[Complex64; 3]; 3] {
        self.t
    }

    pub fn apply(&self, c: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (o, row) in out.iter_mut().zip(self.t.iter()) {
            for k in 0..3 {
                *o += row[k] * c[k];
            }
        }
        out
    }
}

impl Mul for QutritMap {
    type Output = QutritMap;

    fn mul(self, rhs: QutritMap) -> QutritMap {
        let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t[i][j] += self.t[i][k] * rhs.t[k][j];
                }
            }
        }
        QutritMap { t }
    }
}

/// Symmetric square of `J = [[a, b], [c, d]]`: the unitary the pair sees.
///
/// Column order is (|2_H>, |1_H 1_V>, |2_V>); the sqrt(2) factors keep the
/// two-photon normalization, so the result is again unitary.
pub fn induced_qutrit_map(j: &JonesMatrix) -> QutritMap {
    let [[a, b], [c, d]] = j.m;
    let r2 = Complex64::new(SQRT_2, 0.0);
    QutritMap {
        t: [
            [a * a, r2 * a * b, b * b],
            [r2 * a * c, a * d + b * c, r2 * b * d],
            [c * c, r2 * c * d, d * d],
        ],
    }
}

/// Amplitudes of the pair state over (|2_45>, |1_45 1_135>, |2_135>).
///
/// Identical to `induced_qutrit_map(&diag45_rotation()).apply(c)`, spelled
/// out because the protocol algebra leans on these three combinations.
pub fn to_diagonal_basis(c: &[Complex64; 3]) -> [Complex64; 3] {
    let half = 0.5 * (c[0] + c[2]);
    let over2 = c[1] / SQRT_2;
    [half + over2, (c[2] - c[0]) / SQRT_2, half - over2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_c_close(a: Complex64, b: Complex64, eps: f64) {
        assert!(
            (a - b).norm() <= eps,
            "complex mismatch: {a} vs {b} (eps {eps})"
        );
    }

    #[test]
    fn eighth_wave_at_zero_is_diagonal() {
        let j = jones(0.0, FRAC_PI_4).entries();
        let sqrt_i = Complex64::from_polar(1.0, FRAC_PI_4);
        assert_c_close(j[0][0], c(1.0, 0.0), 1e-15);
        assert_c_close(j[0][1], c(0.0, 0.0), 1e-15);
        assert_c_close(j[1][0], c(0.0, 0.0), 1e-15);
        assert_c_close(j[1][1], sqrt_i, 1e-15);
    }

    #[test]
    fn eighth_wave_at_45_mixes_symmetrically() {
        let j = jones(FRAC_PI_4, FRAC_PI_4).entries();
        let sqrt_i = Complex64::from_polar(1.0, FRAC_PI_4);
        let diag = (c(1.0, 0.0) + sqrt_i) / 2.0;
        let off = (c(1.0, 0.0) - sqrt_i) / 2.0;
        assert_c_close(j[0][0], diag, 1e-15);
        assert_c_close(j[1][1], diag, 1e-15);
        assert_c_close(j[0][1], off, 1e-15);
        assert_c_close(j[1][0], off, 1e-15);
    }

    #[test]
    fn half_wave_at_any_angle_flips_v() {
        // phi = pi gives the classic [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
        let a = 0.3;
        let j = jones(a, PI).entries();
        assert_c_close(j[0][0], c((2.0 * a).cos(), 0.0), 1e-14);
        assert_c_close(j[0][1], c((2.0 * a).sin(), 0.0), 1e-14);
        assert_c_close(j[1][1], c(-(2.0 * a).cos(), 0.0), 1e-14);
    }

    #[test]
    fn retarder_determinant_is_the_retardance_phase() {
        for k in 0..24 {
            let alpha = -PI + 0.27 * k as f64;
            let phi = -PI + 0.26 * k as f64;
            let det = jones(alpha, phi).determinant();
            assert_c_close(det, Complex64::from_polar(1.0, phi), 1e-13);
        }
    }

    #[test]
    fn constructor_rejects_non_unitary_input() {
        let bad = [[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            JonesMatrix::new(bad),
            Err(OpticsError::NonUnitary { .. })
        ));
        assert!(JonesMatrix::new(jones(0.4, 1.1).entries()).is_ok());
    }

    #[test]
    fn induced_map_of_eighth_wave_at_zero_is_phase_diagonal() {
        let t = induced_qutrit_map(&jones(0.0, FRAC_PI_4)).rows();
        assert_c_close(t[0][0], c(1.0, 0.0), 1e-15);
        assert_c_close(t[1][1], Complex64::from_polar(1.0, FRAC_PI_4), 1e-15);
        assert_c_close(t[2][2], Complex64::from_polar(1.0, FRAC_PI_2), 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_c_close(t[i][j], c(0.0, 0.0), 1e-15);
                }
            }
        }
    }

    #[test]
    fn diagonal_basis_matches_its_matrix_form() {
        let map = induced_qutrit_map(&diag45_rotation());
        for k in 0..3 {
            let mut e = [c(0.0, 0.0); 3];
            e[k] = c(1.0, 0.0);
            let via_map = map.apply(&e);
            let via_fn = to_diagonal_basis(&e);
            for i in 0..3 {
                assert_c_close(via_map[i], via_fn[i], 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_basis_twice_reverses_and_negates_the_middle() {
        let v = [c(0.3, 0.1), c(-0.5, 0.4), c(0.2, -0.6)];
        let w = to_diagonal_basis(&to_diagonal_basis(&v));
        assert_c_close(w[0], v[2], 1e-15);
        assert_c_close(w[1], -v[1], 1e-15);
        assert_c_close(w[2], v[0], 1e-15);
    }

    fn map_defect(t: &QutritMap) -> f64 {
        let rows = t.rows();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut g = c(0.0, 0.0);
                for k in 0..3 {
                    g += rows[k][i].conj() * rows[k][j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).norm());
            }
        }
        worst
    }

    proptest! {
        #[test]
        fn prop_retarders_are_unitary(alpha in -PI..PI, phi in -PI..PI) {
            prop_assert!(JonesMatrix::new(jones(alpha, phi).entries()).is_ok());
        }

        #[test]
        fn prop_induced_map_is_unitary(alpha in -PI..PI, phi in -PI..PI) {
            let t = induced_qutrit_map(&jones(alpha, phi));
            prop_assert!(map_defect(&t) < 1e-12);
        }

        #[test]
        fn prop_inducing_respects_composition(
            a1 in -PI..PI, p1 in -PI..PI,
            a2 in -PI..PI, p2 in -PI..PI,
        ) {
            let j1 = jones(a1, p1);
            let j2 = jones(a2, p2);
            let lhs = induced_qutrit_map(&(j1 * j2)).rows();
            let rhs = (induced_qutrit_map(&j1) * induced_qutrit_map(&j2)).rows();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((lhs[i][j] - rhs[i][j]).norm() < 1e-12);
                }
            }
        }
    }
}
