//! Uniform intertwiners between decomposed walks.
//!
//! Between two prime model walks of the same rate `r` the intertwiners are
//! `M[ρ] ∘ T_α`, where `T_α f(k) = f(k + α)` and `λ₂(k) = λ₁(k + α)`. In
//! position space on `ℓ₂(rZ)` this is convolution by `ρ̂` after the phase
//! `e^{iαx}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::Serialize;

use crate::decompose::{Decomposition, RateDoc, Summand};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::spectral::Band;

/// Coefficients below this are not used to recover or test a translation.
pub const MATCH_COEFF_TOL: f64 = 1e-8;
/// Largest pointwise deviation accepted for a translation.
pub const MATCH_TOL: f64 = 1e-7;
/// Coefficients below this are dropped when assembling banded matrices.
pub const MATRIX_COEFF_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TranslationMatch {
    /// `α ∈ [0, 2π/r)` with `λ₂(k) = λ₁(k + α)`.
    pub alpha: Option<f64>,
    /// Max of `|λ₂(k) − λ₁(k + α)|` for the best candidate.
    pub residual: f64,
}

impl TranslationMatch {
    fn none() -> Self {
        TranslationMatch {
            alpha: None,
            residual: f64::INFINITY,
        }
    }
}

fn sup_distance(a: &FourierSeries, b: &FourierSeries) -> f64 {
    let span = (a.hi().max(b.hi()) - a.lo().min(b.lo()) + 1) as usize;
    let count = (2 * span).next_power_of_two().max(64);
    a.sample(count)
        .iter()
        .zip(b.sample(count))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Finds `α` with `s2(k) = s1(k + α)` for two series on the same torus.
pub fn match_series(s1: &FourierSeries, s2: &FourierSeries) -> TranslationMatch {
    if (s1.omega() - s2.omega()).abs() > 1e-12 * s1.omega() {
        return TranslationMatch::none();
    }
    let omega = s1.omega();
    let period = s1.period();
    // The pivot is the largest non-constant coefficient of s1; c2_j = c1_j e^{ijωα}.
    let pivot = s1
        .significant(MATCH_COEFF_TOL)
        .into_iter()
        .filter(|(j, _)| *j != 0)
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.abs().cmp(&a.0.abs())));
    let Some((j, c1)) = pivot else {
        return TranslationMatch::none();
    };
    let c2 = s2.coeff(j);
    if c2.norm() < MATCH_COEFF_TOL {
        return TranslationMatch::none();
    }
    let phase = (c2 / c1).arg();
    let mut best = TranslationMatch::none();
    for q in 0..j.unsigned_abs() as i64 {
        let raw = (phase + std::f64::consts::TAU * q as f64) / (j as f64 * omega);
        let mut alpha = raw.rem_euclid(period);
        if alpha >= period {
            alpha = 0.0;
        }
        let residual = sup_distance(&s1.translated(alpha), s2);
        if residual < best.residual {
            best = TranslationMatch {
                alpha: Some(alpha),
                residual,
            };
        }
    }
    if best.residual > MATCH_TOL {
        best.alpha = None;
    }
    best
}

/// Translation between two non-constant bands after refinement to their
/// prime tori. Bands of different rates never match.
pub fn find_translation(b1: &Band, b2: &Band) -> TranslationMatch {
    if b1.is_constant || b2.is_constant {
        return TranslationMatch::none();
    }
    let (Ok(m1), Ok(m2)) = (b1.min_period(), b2.min_period()) else {
        return TranslationMatch::none();
    };
    let r1 = Rational64::new(m1 as i64, b1.degree as i64);
    let r2 = Rational64::new(m2 as i64, b2.degree as i64);
    if r1 != r2 {
        return TranslationMatch::none();
    }
    match_series(&b1.fourier.compressed(m1), &b2.fourier.compressed(m2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntertwinerSpace {
    Zero { reason: ZeroReason },
    /// `{M[ρ] ∘ T_α}` on `ℓ₂(rZ)`.
    ModelTranslation { rate: RateDoc, alpha: f64 },
    /// Both sides are the same constant walk; every uniform operator
    /// intertwines.
    BandAlgebra { alpha: [f64; 2] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroReason {
    ConstantVsPrime,
    DistinctConstants,
    RateMismatch,
    NoTranslation,
}

impl IntertwinerSpace {
    pub fn is_zero(&self) -> bool {
        matches!(self, IntertwinerSpace::Zero { .. })
    }
}

pub fn intertwiner_space(w1: &Summand<'_>, w2: &Summand<'_>) -> IntertwinerSpace {
    use IntertwinerSpace::*;
    match (w1, w2) {
        (Summand::Constant(_), Summand::Prime(_)) | (Summand::Prime(_), Summand::Constant(_)) => {
            Zero {
                reason: ZeroReason::ConstantVsPrime,
            }
        }
        (Summand::Constant(a), Summand::Constant(b)) => {
            if (a.alpha - b.alpha).norm() < 1e-9 {
                BandAlgebra {
                    alpha: [a.alpha.re, a.alpha.im],
                }
            } else {
                Zero {
                    reason: ZeroReason::DistinctConstants,
                }
            }
        }
        (Summand::Prime(p), Summand::Prime(q)) => {
            if p.rate != q.rate {
                return Zero {
                    reason: ZeroReason::RateMismatch,
                };
            }
            match match_series(&p.series, &q.series).alpha {
                Some(alpha) => ModelTranslation {
                    rate: p.rate.into(),
                    alpha,
                },
                None => Zero {
                    reason: ZeroReason::NoTranslation,
                },
            }
        }
    }
}

/// Pairwise classification of the summands of two decompositions.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwinerReport {
    /// `entries[i][j]` pairs summand `i` of the first walk with summand `j`
    /// of the second.
    pub entries: Vec<Vec<IntertwinerSpace>>,
    pub nonzero: bool,
}

impl IntertwinerReport {
    pub fn count(&self, pred: impl Fn(&IntertwinerSpace) -> bool) -> usize {
        self.entries.iter().flatten().filter(|e| pred(e)).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("intertwiner report serializes")
    }
}

pub fn classify(d1: &Decomposition, d2: &Decomposition) -> IntertwinerReport {
    let s2 = d2.summands();
    let entries: Vec<Vec<IntertwinerSpace>> = d1
        .summands()
        .iter()
        .map(|a| s2.iter().map(|b| intertwiner_space(a, b)).collect())
        .collect();
    let nonzero = entries.iter().flatten().any(|e| !e.is_zero());
    IntertwinerReport { entries, nonzero }
}

/// Indices `p` of the sites `rp` covered by a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub start: i64,
    pub len: usize,
}

impl Window {
    pub fn new(start: i64, len: usize) -> Self {
        Window { start, len }
    }

    fn contains(&self, p: i64) -> bool {
        p >= self.start && p < self.start + self.len as i64
    }
}

/// Largest `|j|` with a coefficient above [`MATRIX_COEFF_TOL`].
pub fn series_bandwidth(s: &FourierSeries) -> usize {
    s.significant(MATRIX_COEFF_TOL)
        .iter()
        .map(|(j, _)| j.unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

/// `M[λ]` on a window of `ℓ₂(rZ)`: entry `(p, q)` is `c_{p−q}`.
pub fn model_walk_matrix(s: &FourierSeries, window: Window) -> CMatrix {
    convolution(s, window, |_| C64::new(1.0, 0.0))
}

fn convolution(s: &FourierSeries, window: Window, col_phase: impl Fn(i64) -> C64) -> CMatrix {
    let mut m = CMatrix::zeros(window.len, window.len);
    let coeffs = s.significant(MATRIX_COEFF_TOL);
    for qi in 0..window.len {
        let q = window.start + qi as i64;
        let phase = col_phase(q);
        for &(j, c) in &coeffs {
            let p = q + j;
            if window.contains(p) {
                m[((p - window.start) as usize, qi)] = c * phase;
            }
        }
    }
    m
}

/// A truncated intertwiner `F M[ρ] F⁻¹ ∘ e^{iαD_r}`.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub window: Window,
    pub rate: f64,
    pub alpha: f64,
    pub matrix: CMatrix,
    bandwidth: usize,
}

/// Builds the intertwiner for the walk with band `lambda` (a series on the
/// prime torus, `ω = r`), translation `alpha` and multiplier `rho`.
pub fn build_intertwiner(
    lambda: &FourierSeries,
    alpha: f64,
    rho: &FourierSeries,
    window: Window,
) -> Result<Intertwiner> {
    let r = lambda.omega();
    if (rho.omega() - r).abs() > 1e-12 * r {
        return Err(Error::InvalidArgument(format!(
            "multiplier lives on a torus of frequency {}, the walk on {r}",
            rho.omega()
        )));
    }
    let margin = series_bandwidth(lambda) + series_bandwidth(rho);
    if window.len <= 2 * margin {
        return Err(Error::TruncationTooSmall {
            len: window.len,
            margin,
        });
    }
    let matrix = convolution(rho, window, |q| C64::from_polar(1.0, alpha * r * q as f64));
    Ok(Intertwiner {
        window,
        rate: r,
        alpha,
        matrix,
        bandwidth: series_bandwidth(rho),
    })
}

impl Intertwiner {
    /// `‖V U₁ − U₂ V‖` on the rows and columns at least
    /// `bandwidth(U) + bandwidth(V)` away from the window edges.
    pub fn residual(&self, u1: &FourierSeries, u2: &FourierSeries) -> Result<f64> {
        let margin = self.bandwidth + series_bandwidth(u1).max(series_bandwidth(u2));
        if self.window.len <= 2 * margin {
            return Err(Error::TruncationTooSmall {
                len: self.window.len,
                margin,
            });
        }
        let a = model_walk_matrix(u1, self.window);
        let b = model_walk_matrix(u2, self.window);
        let diff = &self.matrix * a - b * &self.matrix;
        let inner = self.window.len - 2 * margin;
        let block = diff.view((margin, margin), (inner, inner)).into_owned();
        Ok(linalg::spectral_norm(&block))
    }

    /// Fraction of the column-`q` mass of `p_q = Σ_p |V_{p,q}|² δ_{p/q}`
    /// lying in `(1 − δ, 1 + δ)`.
    pub fn column_concentration(&self, q: i64, delta: f64) -> Result<f64> {
        if !self.window.contains(q) || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "column {q} is zero or outside the window"
            )));
        }
        let col = self.matrix.column((q - self.window.start) as usize);
        let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return Ok(0.0);
        }
        let inside: f64 = col
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let ratio = (self.window.start + *i as i64) as f64 / q as f64;
                (ratio - 1.0).abs() < delta
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        Ok(inside / total)
    }

    /// Nonzero entries as `row,col,re,im` lines, indices being lattice
    /// indices `p` of the sites `rp`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for q in 0..self.window.len {
            for p in 0..self.window.len {
                let z = self.matrix[(p, q)];
                if z != ZERO {
                    let _ = writeln!(
                        out,
                        "{},{},{:e},{:e}",
                        self.window.start + p as i64,
                        self.window.start + q as i64,
                        z.re,
                        z.im
                    );
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommutantSummand {
    /// `C(T_{2π/r}) ⊗ M_μ(C)`.
    Torus { rate: RateDoc, size: usize },
    /// Uniform Roe algebra of `Z` tensored with `M_ν(C)`.
    BandAlgebra { alpha: [f64; 2], size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutantReport {
    pub summands: Vec<CommutantSummand>,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut i = i;
    while parent[i] != root {
        let next = parent[i];
        parent[i] = root;
        i = next;
    }
    root
}

pub fn commutant_report(dec: &Decomposition) -> CommutantReport {
    let primes = &dec.primes;
    let mut parent: Vec<usize> = (0..primes.len()).collect();
    for i in 0..primes.len() {
        for j in i + 1..primes.len() {
            if primes[i].rate == primes[j].rate
                && find(&mut parent, i) != find(&mut parent, j)
                && match_series(&primes[i].series, &primes[j].series).alpha.is_some()
            {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[b] = a;
            }
        }
    }
    let mut groups: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, p) in primes.iter().enumerate() {
        *groups.entry(find(&mut parent, i)).or_default() += p.multiplicity;
    }
    let mut summands: Vec<CommutantSummand> = groups
        .into_iter()
        .map(|(root, size)| CommutantSummand::Torus {
            rate: primes[root].rate.into(),
            size,
        })
        .collect();
    let mut constants: Vec<(C64, usize)> = Vec::new();
    for c in &dec.constants {
        match constants.iter_mut().find(|(a, _)| (a - c.alpha).norm() < 1e-9) {
            Some(entry) => entry.1 += c.multiplicity,
            None => constants.push((c.alpha, c.multiplicity)),
        }
    }
    summands.extend(constants.into_iter().map(|(a, size)| CommutantSummand::BandAlgebra {
        alpha: [a.re, a.im],
        size,
    }));
    CommutantReport { summands }
}
