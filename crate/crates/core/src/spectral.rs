//! Eigenvalue bands of the symbol `Û(k)` around the torus.
//!
//! Eigenpairs are computed on a uniform grid and tracked continuously: every
//! step predicts each sheet's next value by quadratic extrapolation and
//! matches predictions to eigenvalues with an optimal assignment. Steps whose
//! matching is ambiguous are bisected up to four times. Going once around the
//! torus permutes the sheets; the cycles of that permutation are the bands,
//! each living on a covering torus `T_{2πd}`.
//!
//! Eigenvectors at degenerate points are resolved by first-order
//! perturbation (splitting of `−iÛ′Û*` on the eigenspace); persistent
//! degeneracies are aligned to the previous frame by a polar factor.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::linalg::{self, CMatrix, CVector, UnitaryEigen, C64};
use crate::walkspec::WalkSpec;

pub const DEFAULT_GRID: usize = 2048;

/// Eigenvalues closer than this are interchangeable during matching.
const TIE_TOL: f64 = 1e-9;
/// Eigenvalues closer than this share an eigenspace for section resolution.
const CLUSTER_TOL: f64 = 1e-7;
/// Tracked bands this close everywhere are merged into one with multiplicity.
const MERGE_TOL: f64 = 1e-9;
const CONSTANT_TOL: f64 = 1e-9;
/// Fourier coefficients below this are treated as zero for period detection.
const PERIOD_COEFF_TOL: f64 = 1e-9;
const MAX_REFINE: usize = 4;
/// Largest grid [`sample_bands`] refines to.
pub const MAX_GRID: usize = 1 << 16;
/// Fourier tail below which a band counts as resolved by its grid.
pub const TAIL_TOL: f64 = 1e-12;
/// A match is accepted when the predicted value is at least this many times
/// closer to its partner than to any distinct competitor.
const CONFIDENCE_RATIO: f64 = 4.0;

/// One eigenvalue function on its covering torus `T_{2πd}`.
#[derive(Clone, Debug)]
pub struct Band {
    /// Covering degree `d`.
    pub degree: usize,
    /// Number of coincident copies.
    pub multiplicity: usize,
    /// Grid points per `2π`.
    pub grid_size: usize,
    /// `λ(k̃_j)` at `k̃_j = 2πj/grid_size`, `j < degree·grid_size`.
    pub samples: Vec<C64>,
    /// One continuous eigenvector section per copy, aligned with `samples`.
    pub sections: Vec<Vec<CVector>>,
    /// Series in `e^{i n k̃ / d}`.
    pub fourier: FourierSeries,
    pub winding: i64,
    pub is_constant: bool,
    /// Estimated geometric decay of the Fourier coefficients.
    pub decay_rate: f64,
    /// Max error of the significant-coefficient series at the samples.
    pub reconstruction_error: f64,
    min_period: Option<usize>,
}

impl Band {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Length of the covering torus, `2πd`.
    pub fn torus_length(&self) -> f64 {
        TAU * self.degree as f64
    }

    pub fn k_at(&self, j: usize) -> f64 {
        TAU * j as f64 / self.grid_size as f64
    }

    /// Largest `m` with `λ(k̃ + 2πd/m) = λ(k̃)`.
    pub fn min_period(&self) -> Result<usize> {
        self.min_period.ok_or(Error::ConstantBand)
    }

    /// Whether the coefficients in the top quarter of the frequency range
    /// are below [`TAIL_TOL`], so the series is accurate between samples.
    pub fn is_resolved(&self) -> bool {
        let cut = (3 * self.len() / 8) as i64;
        self.fourier.iter().all(|(n, c)| n.abs() <= cut || c.norm() < TAIL_TOL)
    }

    pub fn value(&self, k: f64) -> C64 {
        self.fourier.eval(k)
    }

    /// Group velocity `Re[λ′/(iλ)]` at the samples.
    pub fn velocities(&self) -> Vec<f64> {
        if self.is_constant {
            return vec![0.0; self.samples.len()];
        }
        let d = self.fourier.derivative().sample(self.samples.len());
        d.iter()
            .zip(&self.samples)
            .map(|(dl, l)| (dl / (C64::i() * l)).re)
            .collect()
    }
}

/// Sheet permutation induced by continuing eigenvalues from `k = 0` to `2π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monodromy {
    /// `permutation[a]` is the sheet that sheet `a` continues into.
    pub permutation: Vec<usize>,
}

impl Monodromy {
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles_of(&self.permutation)
    }

    /// Cycle lengths, ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }
}

#[derive(Clone, Debug)]
pub struct BandSet {
    pub bands: Vec<Band>,
    pub n: usize,
    pub grid_size: usize,
    pub monodromy: Monodromy,
}

impl BandSet {
    /// `Σ degree · multiplicity`, which must equal `n`.
    pub fn fiber_count(&self) -> usize {
        self.bands.iter().map(|b| b.degree * b.multiplicity).sum()
    }

    /// Multiset of band values over `k`, one entry per sheet and copy.
    pub fn values_at(&self, k: f64) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.n);
        for b in &self.bands {
            for sheet in 0..b.degree {
                let v = b.value(k + TAU * sheet as f64);
                out.extend(std::iter::repeat_n(v, b.multiplicity));
            }
        }
        out
    }

    /// Winding of `det Û` predicted by the bands: `Σ μ·w`.
    pub fn summed_winding(&self) -> i64 {
        self.bands.iter().map(|b| b.multiplicity as i64 * b.winding).sum()
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 64 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size must be a power of two >= 64, got {grid_size}"
        )));
    }
    Ok(())
}

struct Fiber {
    k: f64,
    eig: UnitaryEigen,
}

fn fiber(spec: &WalkSpec, k: f64) -> Fiber {
    Fiber {
        k,
        eig: linalg::unitary_eigen(&spec.symbol_at(k).matrix),
    }
}

/// Number of numerically coincident eigenvalue pairs and the smallest gap
/// among the rest. Persistent coincidences (multiplicities) add the same
/// count at every point, so minimizing the count avoids accidental crossings.
fn separation(values: &[C64]) -> (usize, f64) {
    let mut ties = 0;
    let mut best = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = (values[i] - values[j]).norm();
            if d > 1e-7 {
                best = best.min(d);
            } else {
                ties += 1;
            }
        }
    }
    (ties, best)
}

fn extrapolate(hist: &[(f64, C64)], k: f64) -> C64 {
    // Lagrange through the last (up to three) nodes.
    let nodes = &hist[hist.len().saturating_sub(3)..];
    let mut acc = C64::new(0.0, 0.0);
    for (i, &(ki, vi)) in nodes.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(kj, _)) in nodes.iter().enumerate() {
            if i != j {
                w *= (k - kj) / (ki - kj);
            }
        }
        acc += vi * w;
    }
    acc
}

/// Raw result of following the sheets once around the torus.
struct Tracking {
    grid: usize,
    /// Grid index where tracking starts.
    start: usize,
    /// `values[a][s]`, `s ∈ 0..=grid`, at `k = k_start + s·h`.
    values: Vec<Vec<C64>>,
    /// Eigen index at each step, `idx[a][s]`.
    idx: Vec<Vec<usize>>,
    fibers: Vec<Fiber>,
}

struct Tracker<'a> {
    spec: &'a WalkSpec,
    hist: Vec<Vec<(f64, C64)>>,
}

impl Tracker<'_> {
    fn step_to(&mut self, target: &Fiber, depth: usize) -> Result<Vec<usize>> {
        let n = self.hist.len();
        let vals = &target.eig.values;
        let preds: Vec<C64> = self.hist.iter().map(|h| extrapolate(h, target.k)).collect();
        let cost: Vec<Vec<f64>> = preds
            .iter()
            .map(|p| vals.iter().map(|v| (p - v).norm_sqr()).collect())
            .collect();
        let assign = linalg::min_cost_assignment(&cost);
        let confident = (0..n).all(|a| {
            let chosen = vals[assign[a]];
            let d = (preds[a] - chosen).norm();
            let competitor = vals
                .iter()
                .filter(|v| (**v - chosen).norm() > TIE_TOL)
                .map(|v| (preds[a] - v).norm())
                .fold(f64::INFINITY, f64::min);
            d * CONFIDENCE_RATIO <= competitor
        });
        if !confident {
            let k_last = self.hist[0].last().unwrap().0;
            if depth >= MAX_REFINE {
                return Err(Error::UnresolvedCrossing {
                    k_lo: k_last.rem_euclid(TAU),
                    k_hi: k_last.rem_euclid(TAU) + (target.k - k_last),
                });
            }
            let mid = fiber(self.spec, 0.5 * (k_last + target.k));
            self.step_to(&mid, depth + 1)?;
            return self.step_to(target, depth + 1);
        }
        for (a, h) in self.hist.iter_mut().enumerate() {
            h.push((target.k, vals[assign[a]]));
            if h.len() > 3 {
                h.remove(0);
            }
        }
        Ok(assign)
    }
}

fn track(spec: &WalkSpec, grid: usize) -> Result<Tracking> {
    check_grid(grid)?;
    let n = spec.n();
    let h = TAU / grid as f64;
    let fibers: Vec<Fiber> = (0..grid).map(|i| fiber(spec, i as f64 * h)).collect();
    let start = (0..grid)
        .max_by(|&a, &b| {
            let (ta, sa) = separation(&fibers[a].eig.values);
            let (tb, sb) = separation(&fibers[b].eig.values);
            tb.cmp(&ta).then(sa.total_cmp(&sb)).then(b.cmp(&a))
        })
        .unwrap();
    let k0 = start as f64 * h;
    let mut values = vec![Vec::with_capacity(grid + 1); n];
    let mut idx = vec![Vec::with_capacity(grid + 1); n];
    for a in 0..n {
        values[a].push(fibers[start].eig.values[a]);
        idx[a].push(a);
    }
    let mut tracker = Tracker {
        spec,
        hist: (0..n).map(|a| vec![(k0, fibers[start].eig.values[a])]).collect(),
    };
    for s in 1..=grid {
        let f = &fibers[(start + s) % grid];
        // Same eigen-decomposition, unwrapped k.
        let target = Fiber {
            k: k0 + s as f64 * h,
            eig: f.eig.clone(),
        };
        let assign = tracker.step_to(&target, 0)?;
        for a in 0..n {
            values[a].push(target.eig.values[assign[a]]);
            idx[a].push(assign[a]);
        }
    }
    Ok(Tracking {
        grid,
        start,
        values,
        idx,
        fibers,
    })
}

fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for a in 0..perm.len() {
        if seen[a] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut b = a;
        while !seen[b] {
            seen[b] = true;
            cyc.push(b);
            b = perm[b];
        }
        out.push(cyc);
    }
    out
}

fn sheets_equal(t: &Tracking, a: usize, b: usize) -> bool {
    t.values[a]
        .iter()
        .zip(&t.values[b])
        .all(|(x, y)| (x - y).norm() < MERGE_TOL)
}

/// Monodromy with cycles of identical sheets split into shorter cycles.
fn sheet_permutation(t: &Tracking) -> Vec<usize> {
    let n = t.values.len();
    let grid = t.grid;
    let mut perm = vec![0; n];
    for a in 0..n {
        let end = t.idx[a][grid];
        perm[a] = (0..n).find(|&b| t.idx[b][0] == end).expect("assignment is a bijection");
    }
    // Exactly coincident sheets can be linked arbitrarily; a cycle whose
    // sheets repeat with period d' < d is really d/d' cycles of length d'.
    let mut out = perm.clone();
    for cyc in cycles_of(&perm) {
        let d = cyc.len();
        let split = (1..d)
            .filter(|dp| d % dp == 0)
            .find(|&dp| (0..d).all(|i| sheets_equal(t, cyc[i], cyc[(i + dp) % d])));
        if let Some(dp) = split {
            for block in 0..d / dp {
                for i in 0..dp {
                    let a = cyc[block * dp + i];
                    out[a] = cyc[block * dp + (i + 1) % dp];
                }
            }
        }
    }
    out
}

/// Eigenvector of every sheet at every step `s < grid`.
fn resolve_sections(spec: &WalkSpec, t: &Tracking) -> Vec<Vec<CVector>> {
    let n = t.values.len();
    let grid = t.grid;
    let h = TAU / grid as f64;
    let mut out: Vec<Vec<CVector>> = vec![Vec::with_capacity(grid); n];
    for s in 0..grid {
        let f = &t.fibers[(t.start + s) % grid];
        // Group sheets whose values coincide at this point.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            let va = t.values[a][s];
            match groups.iter_mut().find(|g| (t.values[g[0]][s] - va).norm() < CLUSTER_TOL) {
                Some(g) => g.push(a),
                None => groups.push(vec![a]),
            }
        }
        let mut vecs: Vec<Option<CVector>> = vec![None; n];
        for g in groups {
            if g.len() == 1 {
                vecs[g[0]] = Some(f.eig.vectors[t.idx[g[0]][s]].clone());
                continue;
            }
            let q = CMatrix::from_columns(
                &g.iter().map(|&a| f.eig.vectors[t.idx[a][s]].clone()).collect::<Vec<_>>(),
            );
            let sym = spec.symbol_at(f.k).matrix;
            let gen = spec.symbol_derivative(f.k) * sym.adjoint() * C64::new(0.0, -1.0);
            let split = q.adjoint() * gen * &q;
            let (eta, y) = linalg::hermitian_eigen(&split);
            // Finite-difference velocity of each sheet.
            let vel: Vec<f64> = g
                .iter()
                .map(|&a| {
                    let (lo, hi, span) = if s == 0 { (0, 1, h) } else { (s - 1, s + 1, 2.0 * h) };
                    (t.values[a][hi] / t.values[a][lo]).arg() / span
                })
                .collect();
            let cost: Vec<Vec<f64>> = vel
                .iter()
                .map(|v| eta.iter().map(|e| (v - e).powi(2)).collect())
                .collect();
            let assign = linalg::min_cost_assignment(&cost);
            // Slots with (first-order) degenerate velocities are aligned to
            // the previous frame.
            let mut done = vec![false; g.len()];
            for i in 0..g.len() {
                if done[i] {
                    continue;
                }
                let members: Vec<usize> = (0..g.len())
                    .filter(|&j| !done[j] && (eta[assign[j]] - eta[assign[i]]).abs() < 1e-6)
                    .collect();
                let basis = CMatrix::from_columns(
                    &members.iter().map(|&j| &q * &y[assign[j]]).collect::<Vec<_>>(),
                );
                let frame = if s > 0 && members.len() > 1 {
                    let prev = CMatrix::from_columns(
                        &members.iter().map(|&j| out[g[j]][s - 1].clone()).collect::<Vec<_>>(),
                    );
                    &basis * linalg::polar_unitary(&(basis.adjoint() * prev))
                } else {
                    basis
                };
                for (col, &j) in members.iter().enumerate() {
                    vecs[g[j]] = Some(frame.column(col).into_owned());
                    done[j] = true;
                }
            }
        }
        for a in 0..n {
            let mut v = vecs[a].take().expect("every sheet resolved");
            let norm = v.norm();
            v /= C64::new(norm, 0.0);
            out[a].push(v);
        }
    }
    out
}

/// Unwrapped argument increments of a closed loop of samples, divided by 2π.
fn raw_winding(samples: &[C64]) -> (f64, f64) {
    let m = samples.len();
    let mut total = 0.0;
    let mut worst = 0.0_f64;
    for j in 0..m {
        let step = (samples[(j + 1) % m] / samples[j]).arg();
        worst = worst.max(step.abs());
        total += step;
    }
    (total / TAU, worst)
}

/// Winding number of a closed loop in `T`, refining once by interpolating
/// the Fourier series on a doubled grid when increments are too coarse.
pub fn loop_winding(samples: &[C64], series: Option<&FourierSeries>) -> Result<i64> {
    let (mut raw, worst) = raw_winding(samples);
    if worst > std::f64::consts::FRAC_PI_2 || (raw - raw.round()).abs() > 1e-6 {
        if let Some(s) = series {
            let fine = s.sample(2 * samples.len());
            raw = raw_winding(&fine).0;
        }
    }
    if (raw - raw.round()).abs() > 1e-6 {
        return Err(Error::NonIntegerWinding { raw });
    }
    Ok(raw.round() as i64)
}

/// Winding number of a band as a loop `T_{2πd} → T`.
pub fn winding_number(band: &Band) -> Result<i64> {
    loop_winding(&band.samples, Some(&band.fourier))
}

/// Minimal period of a band, as `m` with period `2πd/m`.
pub fn minimal_period(band: &Band) -> Result<usize> {
    band.min_period()
}

fn detect_period(spec: &WalkSpec, samples: &[C64], fourier: &FourierSeries, grid: usize, degree: usize) -> Result<usize> {
    let support: Vec<i64> = fourier
        .significant(PERIOD_COEFF_TOL)
        .into_iter()
        .map(|(n, _)| n)
        .filter(|&n| n != 0)
        .collect();
    let m = support
        .iter()
        .fold(0i64, |g, &n| num_integer::gcd(g, n))
        .unsigned_abs() as usize;
    if m == 0 {
        return Err(Error::ConstantBand);
    }
    if m == 1 {
        return Ok(1);
    }
    // Cross-check against the symbol: λ(k̃) must lie in the spectrum of
    // Û(k̃ + 2πd/m).
    let shift = TAU * degree as f64 / m as f64;
    let stride = (samples.len() / 64).max(1);
    for j in (0..samples.len()).step_by(stride) {
        let k = TAU * j as f64 / grid as f64 + shift;
        let eig = linalg::unitary_eigen(&spec.symbol_at(k).matrix);
        let err = eig
            .values
            .iter()
            .map(|v| (v - samples[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if err > 1e-8 {
            return Err(Error::Internal(format!(
                "period 2π·{degree}/{m} detected from Fourier support fails in k-space ({err:.2e})"
            )));
        }
    }
    Ok(m)
}

/// Lexicographic key used to pick a canonical starting sheet and band order.
fn band_key(samples: &[C64], grid: usize, offset: usize) -> Vec<f64> {
    let m = samples.len();
    (0..8)
        .map(|q| linalg::arg_0_2pi(samples[(offset + q * grid / 8) % m]))
        .collect()
}

fn key_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-7 {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

fn rotate<T: Clone>(v: &[T], by: usize) -> Vec<T> {
    let m = v.len();
    (0..m).map(|j| v[(j + by) % m].clone()).collect()
}

fn fix_gauge(section: &mut [CVector]) {
    if section.is_empty() {
        return;
    }
    let first = &mut section[0];
    let (imax, _) = first
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    let p = first[imax];
    *first *= p.conj() / p.norm();
    for j in 1..section.len() {
        let ov = linalg::inner(&section[j], &section[j - 1]);
        if ov.norm() > 0.0 {
            let ph = ov / ov.norm();
            section[j] *= ph;
        }
    }
}

fn build_band(
    spec: &WalkSpec,
    grid: usize,
    degree: usize,
    samples: Vec<C64>,
    sections: Vec<Vec<CVector>>,
) -> Result<Band> {
    let fourier = FourierSeries::from_samples(&samples, 1.0 / degree as f64);
    let is_constant = samples.iter().all(|v| (v - samples[0]).norm() < CONSTANT_TOL);
    let sig = fourier.trimmed(1e-14);
    let recon = sig.sample(samples.len());
    let reconstruction_error = recon
        .iter()
        .zip(&samples)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let decay_rate = fourier.decay_rate(1e-13);
    let winding = if is_constant {
        0
    } else {
        loop_winding(&samples, Some(&fourier))?
    };
    let min_period = if is_constant {
        None
    } else {
        Some(detect_period(spec, &samples, &fourier, grid, degree)?)
    };
    Ok(Band {
        degree,
        multiplicity: sections.len(),
        grid_size: grid,
        samples,
        sections,
        fourier,
        winding,
        is_constant,
        decay_rate,
        reconstruction_error,
        min_period,
    })
}

/// Tracks all eigenvalue bands of `Û` on a grid of `grid_size` points per 2π.
///
/// The grid is doubled, up to [`MAX_GRID`], until the Fourier series of
/// every band has decayed to [`TAIL_TOL`] in the top quarter of its
/// frequency range; `grid_size` of the result is the grid actually used.
pub fn sample_bands(spec: &WalkSpec, grid_size: usize) -> Result<BandSet> {
    check_grid(grid_size)?;
    let mut grid = grid_size;
    loop {
        let set = sample_bands_fixed(spec, grid)?;
        if grid >= MAX_GRID || set.bands.iter().all(|b| b.is_resolved()) {
            return Ok(set);
        }
        grid *= 2;
    }
}

fn sample_bands_fixed(spec: &WalkSpec, grid_size: usize) -> Result<BandSet> {
    let t = track(spec, grid_size)?;
    let grid = t.grid;
    let perm = sheet_permutation(&t);
    let sections = resolve_sections(spec, &t);

    // Assemble each cycle into samples on its cover, indexed from k̃ = 0.
    let mut raw: Vec<(usize, Vec<C64>, Vec<CVector>)> = Vec::new();
    for cyc in cycles_of(&perm) {
        let d = cyc.len();
        let mut vals = Vec::with_capacity(d * grid);
        let mut secs = Vec::with_capacity(d * grid);
        for &a in &cyc {
            vals.extend_from_slice(&t.values[a][..grid]);
            secs.extend_from_slice(&sections[a]);
        }
        // Sequence index s ↔ k̃ = k_start + s·h; rotate so index 0 is k̃ = 0.
        let total = d * grid;
        let shift = (total - t.start) % total;
        let vals = rotate(&vals, shift);
        let secs = rotate(&secs, shift);
        // Canonical starting sheet.
        let best = (0..d)
            .min_by(|&x, &y| key_cmp(&band_key(&vals, grid, x * grid), &band_key(&vals, grid, y * grid)))
            .unwrap();
        raw.push((d, rotate(&vals, best * grid), rotate(&secs, best * grid)));
    }

    // Merge coincident bands into multiplicities.
    let mut merged: Vec<(usize, Vec<C64>, Vec<Vec<CVector>>)> = Vec::new();
    for (d, vals, secs) in raw {
        let mut placed = false;
        for (md, mvals, msecs) in merged.iter_mut() {
            if *md != d {
                continue;
            }
            let rot = (0..d).find(|r| {
                vals.iter()
                    .enumerate()
                    .all(|(j, v)| (v - mvals[(j + r * grid) % (d * grid)]).norm() < MERGE_TOL)
            });
            if let Some(r) = rot {
                let back = (d * grid - r * grid) % (d * grid);
                msecs.push(rotate(&secs, back));
                placed = true;
                break;
            }
        }
        if !placed {
            merged.push((d, vals, vec![secs]));
        }
    }

    let mut bands = Vec::with_capacity(merged.len());
    for (d, vals, mut secs) in merged {
        for s in secs.iter_mut() {
            fix_gauge(s);
        }
        bands.push(build_band(spec, grid, d, vals, secs)?);
    }
    bands.sort_by(|a, b| {
        b.is_constant
            .cmp(&a.is_constant)
            .then(a.degree.cmp(&b.degree))
            .then_with(|| key_cmp(&band_key(&a.samples, grid, 0), &band_key(&b.samples, grid, 0)))
    });

    let set = BandSet {
        n: spec.n(),
        grid_size: grid,
        monodromy: Monodromy { permutation: perm },
        bands,
    };
    if set.fiber_count() != set.n {
        return Err(Error::Internal(format!(
            "fiber count {} differs from n = {}",
            set.fiber_count(),
            set.n
        )));
    }
    Ok(set)
}

/// Sheet permutation from continuation around `T_{2π}`.
pub fn monodromy(spec: &WalkSpec, grid_size: usize) -> Result<Monodromy> {
    let t = track(spec, grid_size)?;
    Ok(Monodromy {
        permutation: sheet_permutation(&t),
    })
}

/// Winding number of `k ↦ det Û(k)`, cross-checked against the summed band
/// windings.
pub fn det_winding(spec: &WalkSpec, grid_size: usize) -> Result<i64> {
    let bands = sample_bands(spec, grid_size)?;
    det_winding_with(spec, &bands)
}

pub fn det_winding_with(spec: &WalkSpec, bands: &BandSet) -> Result<i64> {
    let w = direct_det_winding(spec, bands.grid_size)?;
    let from_bands = bands.summed_winding();
    if w != from_bands {
        return Err(Error::InconsistentWinding {
            det: w,
            bands: from_bands,
        });
    }
    Ok(w)
}

fn direct_det_winding(spec: &WalkSpec, grid: usize) -> Result<i64> {
    let dets = |g: usize| -> Vec<C64> {
        (0..g)
            .map(|i| linalg::determinant(&spec.symbol_at(TAU * i as f64 / g as f64).matrix))
            .collect()
    };
    let (raw, worst) = raw_winding(&dets(grid));
    let raw = if worst > std::f64::consts::FRAC_PI_2 {
        raw_winding(&dets(4 * grid)).0
    } else {
        raw
    };
    if (raw - raw.round()).abs() > 1e-6 {
        return Err(Error::NonIntegerWinding { raw });
    }
    Ok(raw.round() as i64)
}
