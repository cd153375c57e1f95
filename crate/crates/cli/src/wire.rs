//! JSON and CSV wire types. Every float is serialized with 17 significant
//! digits so a written file reparses to the identical bit pattern.

use std::collections::BTreeMap;
use std::str::FromStr;

use biphoton_core::bootstrap::{BootstrapSummary, ParamStats};
use biphoton_core::{CountTable, OutcomeProbabilities, QutritState, ReconstructionReport};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An f64 that serializes as a 17-significant-digit JSON number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serde_json::Number::from_str(&fmt17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(F17)
    }
}

fn pair(z: Complex64) -> [F17; 2] {
    [F17(z.re), F17(z.im)]
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub c1: [F17; 2],
    pub c2: [F17; 2],
    pub c3: [F17; 2],
}

impl StateJson {
    pub fn from_state(state: &QutritState) -> Self {
        Self {
            c1: pair(state.c1()),
            c2: pair(state.c2()),
            c3: pair(state.c3()),
        }
    }

    pub fn to_state(&self) -> Result<QutritState, biphoton_core::StateError> {
        let z = |p: &[F17; 2]| Complex64::new(p[0].0, p[1].0);
        QutritState::new(z(&self.c1), z(&self.c2), z(&self.c3))
    }
}

/// One measured configuration: exactly one of `counts` (a sampled run,
/// upper-arm outcome first in the mixed classes) or `probs`
/// (p_uu, p_cross, p_ll) is present.
#[derive(Debug, Serialize, Deserialize)]
pub struct PlanEntryJson {
    pub config: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<[u64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probs: Option<[F17; 3]>,
}

impl PlanEntryJson {
    pub fn from_counts(config: &str, t: &CountTable) -> Self {
        Self {
            config: config.to_owned(),
            counts: Some([t.n_uu, t.n_ul, t.n_lu, t.n_ll]),
            probs: None,
        }
    }

    pub fn from_probs(config: &str, p: &OutcomeProbabilities) -> Self {
        Self {
            config: config.to_owned(),
            counts: None,
            probs: Some(p.as_array().map(F17)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatJson {
    pub point: F17,
    pub std_err: F17,
    pub lo: F17,
    pub hi: F17,
}

impl StatJson {
    fn from_stats(s: &ParamStats) -> Self {
        Self {
            point: F17(s.point),
            std_err: F17(s.std_err),
            lo: F17(s.lo),
            hi: F17(s.hi),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BootstrapJson {
    pub resamples: u32,
    pub failures: u32,
    pub w_hh: StatJson,
    pub w_hv_tot: StatJson,
    pub w_vv: StatJson,
    pub delta: StatJson,
    pub phi1: StatJson,
    pub phi3: StatJson,
}

impl BootstrapJson {
    pub fn from_summary(s: &BootstrapSummary) -> Self {
        Self {
            resamples: s.resamples,
            failures: s.failures,
            w_hh: StatJson::from_stats(&s.w_hh),
            w_hv_tot: StatJson::from_stats(&s.w_hv_tot),
            w_vv: StatJson::from_stats(&s.w_vv),
            delta: StatJson::from_stats(&s.delta),
            phi1: StatJson::from_stats(&s.phi1),
            phi3: StatJson::from_stats(&s.phi3),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub state: StateJson,
    pub delta: F17,
    pub branch: String,
    pub determinant: F17,
    pub residual: F17,
    pub clamped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_vs_truth: Option<F17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapJson>,
}

impl ReportJson {
    pub fn from_report(report: &ReconstructionReport) -> Self {
        Self {
            state: StateJson::from_state(&report.state),
            delta: F17(report.delta),
            branch: report.branch.as_str().to_owned(),
            determinant: F17(report.determinant),
            residual: F17(report.residual),
            clamped: report.clamped,
            fidelity_vs_truth: None,
            bootstrap: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RoundtripJson {
    pub trials: u32,
    /// 0 means ideal probabilities.
    pub n_per_config: u64,
    pub failures: u32,
    pub min_fidelity: F17,
    pub median_fidelity: F17,
    pub mean_fidelity: F17,
    pub branches: BTreeMap<String, u32>,
}
