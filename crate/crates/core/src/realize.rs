//! Continuous-time realizability: a walk embeds in a one-parameter group
//! of uniform walks exactly when every band has winding zero.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::BandState;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::spectral::{self, BandSet};
use crate::walkspec::WalkSpec;

/// A continuous logarithm `h` of one band, `exp(ih) = λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub band_index: usize,
    pub degree: usize,
    pub grid_size: usize,
    /// `h(k̃_j)` on the cover samples.
    pub h: Vec<f64>,
}

impl Witness {
    /// Lines `k,h` over the covering torus.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,h\n");
        for (j, h) in self.h.iter().enumerate() {
            let k = std::f64::consts::TAU * j as f64 / self.grid_size as f64;
            let _ = writeln!(out, "{k},{h}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityVerdict {
    pub realizable: bool,
    /// `(band index, winding)`.
    pub band_windings: Vec<(usize, i64)>,
    pub band_degrees: Vec<usize>,
    pub det_winding: i64,
    pub witness: Option<Vec<Witness>>,
}

#[derive(Serialize)]
struct BandDoc {
    degree: usize,
    winding: i64,
}

#[derive(Serialize)]
pub struct VerdictDoc {
    realizable: bool,
    det_winding: i64,
    bands: Vec<BandDoc>,
}

impl RealizabilityVerdict {
    pub fn doc(&self) -> VerdictDoc {
        VerdictDoc {
            realizable: self.realizable,
            det_winding: self.det_winding,
            bands: self
                .band_degrees
                .iter()
                .zip(&self.band_windings)
                .map(|(&degree, &(_, winding))| BandDoc { degree, winding })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).expect("verdict serializes")
    }
}

/// Unwrapped argument starting from the principal value at the first sample.
fn unwrap_arg(samples: &[C64]) -> Vec<f64> {
    let mut h = Vec::with_capacity(samples.len());
    let mut prev = samples[0].arg();
    h.push(prev);
    for w in samples.windows(2) {
        prev += (w[1] / w[0]).arg();
        h.push(prev);
    }
    h
}

pub fn is_ct_realizable(spec: &WalkSpec, grid_size: usize) -> Result<RealizabilityVerdict> {
    let bands = spectral::sample_bands(spec, grid_size)?;
    verdict_from_bands(spec, &bands)
}

pub fn verdict_from_bands(spec: &WalkSpec, bands: &BandSet) -> Result<RealizabilityVerdict> {
    let det_winding = spectral::det_winding_with(spec, bands)?;
    let band_windings: Vec<(usize, i64)> = bands.bands.iter().map(|b| b.winding).enumerate().collect();
    let realizable = band_windings.iter().all(|(_, w)| *w == 0);
    let witness = if realizable {
        let mut ws = Vec::new();
        for (i, b) in bands.bands.iter().enumerate() {
            let h = unwrap_arg(&b.samples);
            let closure = (b.samples[0] / b.samples[b.len() - 1]).arg() + h[h.len() - 1] - h[0];
            let fit = h
                .iter()
                .zip(&b.samples)
                .map(|(&h, l)| (C64::from_polar(1.0, h) - l / l.norm()).norm())
                .fold(0.0, f64::max);
            if closure.abs() > 1e-6 || fit > 1e-9 {
                return Err(Error::Internal(format!(
                    "logarithm of band {i} does not close (gap {closure:.3e}, fit {fit:.3e})"
                )));
            }
            ws.push(Witness {
                band_index: i,
                degree: b.degree,
                grid_size: b.grid_size,
                h,
            });
        }
        Some(ws)
    } else {
        None
    };
    Ok(RealizabilityVerdict {
        realizable,
        band_windings,
        band_degrees: bands.bands.iter().map(|b| b.degree).collect(),
        det_winding,
        witness,
    })
}

/// `U^{(t)} = M[exp(ith)]` applied to a state in band coordinates.
pub fn witness_step(verdict: &RealizabilityVerdict, t: f64, state: &BandState) -> Result<BandState> {
    let ws = verdict.witness.as_ref().ok_or(Error::NotRealizable)?;
    if ws.len() != state.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: ws.len(),
            found: state.coords.len(),
        });
    }
    let coords = ws
        .iter()
        .zip(&state.coords)
        .map(|(w, copies)| {
            copies
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&w.h)
                        .map(|(z, &h)| z * C64::from_polar(1.0, t * h))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(BandState {
        grid_size: state.grid_size,
        coords,
    })
}
