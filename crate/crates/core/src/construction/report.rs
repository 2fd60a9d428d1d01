//! Serializable records of a construction run.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::interval::IntervalJson;
use crate::linalg::{Completion, CompletionNormCheck, MatrixJson, NormCertificate, NormMethod};
use crate::num;
use crate::surd::SurdJson;
use crate::walk::LdpcStats;

use super::schedule::InductionCheck;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormJson {
    pub method: NormMethod,
    pub squared_upper: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squared_lower: Option<String>,
    pub value_upper: String,
}

impl From<&NormCertificate> for NormJson {
    fn from(c: &NormCertificate) -> Self {
        NormJson {
            method: c.method,
            squared_upper: num::fmt_rational(&c.squared_upper),
            squared_lower: c.squared_lower.as_ref().map(num::fmt_rational),
            value_upper: num::fmt_rational(&c.value_upper),
        }
    }
}

impl NormJson {
    pub fn to_certificate(&self) -> Result<NormCertificate> {
        Ok(NormCertificate {
            method: self.method,
            squared_upper: num::parse_rational(&self.squared_upper)?,
            squared_lower: self.squared_lower.as_deref().map(num::parse_rational).transpose()?,
            value_upper: num::parse_rational(&self.value_upper)?,
        })
    }
}

/// How a sampled matrix was completed to full row rank, with the norm
/// comparison `||B||^2 <= 1 + ||A||^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionJson {
    pub rank: usize,
    pub unit_rows: Vec<usize>,
    pub a_squared_lower: String,
    pub b_squared_upper: String,
    pub numeric_pass: bool,
    pub structural_pass: bool,
}

impl CompletionJson {
    pub fn new(c: &Completion, check: &CompletionNormCheck) -> Self {
        CompletionJson {
            rank: c.rank,
            unit_rows: c.unit_rows.clone(),
            a_squared_lower: num::fmt_rational(&check.a_squared_lower),
            b_squared_upper: num::fmt_rational(&check.b_squared_upper),
            numeric_pass: check.numeric_pass,
            structural_pass: check.structural_pass,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixSource {
    Override,
    Sampled,
}

/// Per-level record of an inductive step `K = K1 + T K2^0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub depth: usize,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub s: usize,
    pub source: MatrixSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub b: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<LdpcStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionJson>,
    pub norm_b: NormJson,
    /// Minimum squared norm over the kernel lattice; absent when `m = n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortest_kernel_vector_sq: Option<String>,
    pub k1_inradius_certified: bool,
    pub ratio_k1: SurdJson,
    pub ratio_k2: SurdJson,
    pub ratio_total: SurdJson,
    pub inner_ratio: SurdJson,
    /// `2 (n - m) / sqrt(s)`
    pub ratio_k1_bound: SurdJson,
    /// inner ratio times the certified upper bound on `||B||`
    pub ratio_k2_bound: SurdJson,
    pub recursive_bound: SurdJson,
    pub volume: SurdJson,
    pub trivial_bound_2n: usize,
    /// The step's body was discarded for the Voronoi cell because its ratio
    /// exceeded `2n`.
    pub fallback_to_base: bool,
}

/// A Voronoi-cell level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseLevel {
    pub depth: usize,
    pub n: usize,
    pub facets: usize,
    pub ratio: SurdJson,
    pub volume: SurdJson,
    pub covolume: SurdJson,
    /// `K` contains the ball of radius `1/2`.
    pub half_ball_certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Level {
    Base(BaseLevel),
    Step(Box<LevelTrace>),
}

impl Level {
    pub fn depth(&self) -> usize {
        match self {
            Level::Base(b) => b.depth,
            Level::Step(t) => t.depth,
        }
    }
}

/// One entry of the arithmetic-only dimension chain `n -> m -> ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    pub predicted_bound: IntervalJson,
    pub trivial_bound_2n: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub lo_exclusive: u64,
    pub hi: u64,
    pub points: usize,
    pub holds: usize,
    pub regime_ok: usize,
    pub failures: Vec<u64>,
}

impl ScanSummary {
    pub fn new(lo_exclusive: u64, hi: u64, checks: &[InductionCheck]) -> Self {
        ScanSummary {
            lo_exclusive,
            hi,
            points: checks.len(),
            holds: checks.iter().filter(|c| c.holds).count(),
            regime_ok: checks.iter().filter(|c| c.regime_ok).count(),
            failures: checks.iter().filter(|c| !c.holds).map(|c| c.n).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalJson {
    /// Exact ratio when the body was materialized or is known in closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<SurdJson>,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    pub ratio_interval: IntervalJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<SurdJson>,
    pub covolume: String,
    pub isoperimetric_lb: IntervalJson,
    pub trivial_bound_2n: u64,
    pub within_trivial_bound: bool,
    pub predicted_bound: IntervalJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub kappa: String,
    pub epsilon: String,
    pub seed: u64,
    pub dim_cap: usize,
    pub max_depth: usize,
    pub max_tries: u64,
    pub min_recursion_n: String,
    pub override_levels: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Materialized,
    BoundOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub version: String,
    pub n: u64,
    pub mode: Mode,
    pub config: ConfigJson,
    pub seeds: Vec<u64>,
    pub levels: Vec<Level>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<ScheduleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induction_scan: Option<ScanSummary>,
    #[serde(rename = "final")]
    pub final_: FinalJson,
    pub notes: Vec<String>,
}

impl ConstructionReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
