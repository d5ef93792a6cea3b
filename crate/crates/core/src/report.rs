//! The combined analysis report written by `qwalk analyze`.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::decompose::{decompose_bands, Decomposition, DecompositionDoc};
use crate::error::Result;
use crate::intertwine::{commutant_report, CommutantReport};
use crate::realize::{verdict_from_bands, RealizabilityVerdict, VerdictDoc};
use crate::spectral::{sample_bands, BandSet};
use crate::walkspec::WalkSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "qwalk",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BandRow {
    pub degree: usize,
    pub multiplicity: usize,
    pub winding: i64,
    /// `m` with period `2πd/m`; absent for constant bands.
    pub min_period: Option<usize>,
    pub constant: bool,
    pub decay_rate: f64,
}

#[derive(Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    /// SHA-256 of the canonical JSON form of the walk.
    pub spec_digest: String,
    pub grid_size: usize,
    pub n: usize,
    pub bandwidth: usize,
    pub commutator_norm: f64,
    pub monodromy_cycle_type: Vec<usize>,
    pub bands: Vec<BandRow>,
    pub decomposition: DecompositionDoc,
    pub commutant: CommutantReport,
    pub realizability: VerdictDoc,
}

pub fn spec_digest(spec: &WalkSpec) -> String {
    format!("{:x}", Sha256::digest(spec.to_json().as_bytes()))
}

pub fn band_rows(bands: &BandSet) -> Vec<BandRow> {
    bands
        .bands
        .iter()
        .map(|b| BandRow {
            degree: b.degree,
            multiplicity: b.multiplicity,
            winding: b.winding,
            min_period: b.min_period().ok(),
            constant: b.is_constant,
            decay_rate: b.decay_rate,
        })
        .collect()
}

/// Everything `analyze` computes, kept for callers that need more than
/// the serialized report.
pub struct Analysis {
    pub decomposition: Decomposition,
    pub verdict: RealizabilityVerdict,
    pub commutant: CommutantReport,
    pub commutator_norm: f64,
}

impl Analysis {
    pub fn report(&self) -> AnalysisReport {
        let spec = &self.decomposition.spec;
        let bands = &self.decomposition.bands;
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            spec_digest: spec_digest(spec),
            grid_size: bands.grid_size,
            n: spec.n(),
            bandwidth: spec.bandwidth(),
            commutator_norm: self.commutator_norm,
            monodromy_cycle_type: bands.monodromy.cycle_type(),
            bands: band_rows(bands),
            decomposition: self.decomposition.doc(),
            commutant: self.commutant.clone(),
            realizability: self.verdict.doc(),
        }
    }
}

pub fn analyze(spec: &WalkSpec, grid_size: usize) -> Result<Analysis> {
    let bands = sample_bands(spec, grid_size)?;
    let verdict = verdict_from_bands(spec, &bands)?;
    let decomposition = decompose_bands(spec, bands)?;
    let commutant = commutant_report(&decomposition);
    Ok(Analysis {
        decomposition,
        verdict,
        commutant,
        commutator_norm: spec.commutator_norm(),
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
