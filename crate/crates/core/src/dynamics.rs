//! Time evolution on finitely supported states, rescaled position
//! distributions and the weak-limit law from band velocities.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::Decomposition;
use crate::error::{Error, Result};
use crate::fourier::fft_inverse;
use crate::linalg::{CVector, C64, ZERO};
use crate::spectral::BandSet;
use crate::walkspec::WalkSpec;

pub const MEM_CAP_ENV: &str = "QWALK_MEM_CAP_MB";
pub const DEFAULT_MEM_CAP_MB: u64 = 2048;
pub const DEFAULT_BINS: usize = 401;
/// Number of limit-law moments reported.
pub const MOMENT_COUNT: usize = 8;
/// Half-width of the exclusion zone around atoms in [`kolmogorov_distance`].
pub const ATOM_WINDOW: f64 = 0.02;

/// Amplitudes on the sites `x_min..=x_max`, `n` components per site.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n: usize,
    x_min: i64,
    amplitudes: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    site: i64,
    vector: Vec<[f64; 2]>,
}

impl State {
    pub fn new(n: usize, x_min: i64, amplitudes: Vec<C64>) -> Result<Self> {
        if n == 0 || amplitudes.is_empty() || amplitudes.len() % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes do not fill whole sites of {n} components",
                amplitudes.len()
            )));
        }
        Ok(State { n, x_min, amplitudes })
    }

    /// `δ_site ⊗ e_component`.
    pub fn delta(n: usize, site: i64, component: usize) -> Result<Self> {
        if component >= n {
            return Err(Error::InvalidArgument(format!(
                "component {component} out of range for n={n}"
            )));
        }
        let mut a = vec![ZERO; n];
        a[component] = C64::new(1.0, 0.0);
        State::new(n, site, a)
    }

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (i64, Vec<C64>)>) -> Result<Self> {
        let entries: Vec<(i64, Vec<C64>)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::InvalidArgument("state has no entries".into()));
        }
        let lo = entries.iter().map(|e| e.0).min().unwrap();
        let hi = entries.iter().map(|e| e.0).max().unwrap();
        let mut amps = vec![ZERO; (hi - lo + 1) as usize * n];
        for (x, v) in entries {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            let off = (x - lo) as usize * n;
            for (slot, z) in amps[off..off + n].iter_mut().zip(v) {
                *slot += z;
            }
        }
        State::new(n, lo, amps)
    }

    /// Named initial states: `e1`..`en` (`δ₀ ⊗ e_j`), `uniform`
    /// (`δ₀ ⊗ (1,…,1)/√n`) and `random` (seeded, sites −2..=2).
    pub fn builtin(name: &str, n: usize, seed: u64) -> Result<Self> {
        if name == "uniform" {
            let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
            return State::new(n, 0, vec![a; n]);
        }
        if name == "random" {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amps: Vec<C64> = (0..5 * n)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            return Ok(State::new(n, -2, amps)?.normalized());
        }
        if let Some(j) = name.strip_prefix('e').and_then(|s| s.parse::<usize>().ok()) {
            if j >= 1 {
                return State::delta(n, 0, j - 1);
            }
        }
        Err(Error::InvalidArgument(format!("unknown built-in state '{name}'")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(text)?;
        let n = doc
            .entries
            .first()
            .map(|e| e.vector.len())
            .ok_or_else(|| Error::InvalidArgument("state has no entries".into()))?;
        let state = State::from_entries(
            n,
            doc.entries.into_iter().map(|e| {
                (e.site, e.vector.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            }),
        )?;
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!("state has norm {norm}, expected 1")));
        }
        Ok(state.normalized())
    }

    pub fn to_json(&self) -> String {
        let entries = (self.x_min..=self.x_max())
            .filter(|&x| self.block(x).iter().any(|z| *z != ZERO))
            .map(|x| EntryDoc {
                site: x,
                vector: self.block(x).iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        serde_json::to_string_pretty(&StateDoc { entries }).expect("state serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.sites() as i64 - 1
    }

    pub fn sites(&self) -> usize {
        self.amplitudes.len() / self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitudes at site `x`; zero outside the window.
    pub fn block(&self, x: i64) -> &[C64] {
        static ZEROS: [C64; 64] = [ZERO; 64];
        if x < self.x_min || x > self.x_max() {
            return &ZEROS[..self.n.min(64)];
        }
        let off = (x - self.x_min) as usize * self.n;
        &self.amplitudes[off..off + self.n]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let s = self.norm();
        if s > 0.0 {
            self.amplitudes.iter_mut().for_each(|z| *z /= s);
        }
        self
    }

    /// Largest entrywise difference, windows padded with zeros.
    pub fn distance(&self, other: &State) -> f64 {
        let lo = self.x_min.min(other.x_min);
        let hi = self.x_max().max(other.x_max());
        (lo..=hi)
            .flat_map(|x| {
                let (a, b) = (self.block(x), other.block(x));
                (0..self.n.max(other.n)).map(move |c| {
                    let za = a.get(c).copied().unwrap_or(ZERO);
                    let zb = b.get(c).copied().unwrap_or(ZERO);
                    (za - zb).norm()
                })
            })
            .fold(0.0, f64::max)
    }

    /// `ξ̂(k) = Σ_x e^{ixk} ξ_x`.
    pub fn momentum(&self, k: f64) -> CVector {
        let mut v = CVector::zeros(self.n);
        for x in self.x_min..=self.x_max() {
            let ph = C64::from_polar(1.0, x as f64 * k);
            for (c, z) in self.block(x).iter().enumerate() {
                v[c] += ph * z;
            }
        }
        v
    }

    /// `ξ̂(2πj/grid)` for `j < grid`, exact for any window size.
    pub fn momentum_grid(&self, grid: usize) -> Vec<CVector> {
        let mut out = vec![CVector::zeros(self.n); grid];
        for c in 0..self.n {
            let mut bins = vec![ZERO; grid];
            for x in self.x_min..=self.x_max() {
                bins[x.rem_euclid(grid as i64) as usize] += self.block(x)[c];
            }
            for (j, z) in fft_inverse(&bins).into_iter().enumerate() {
                out[j][c] = z;
            }
        }
        out
    }

    /// `(x, ‖ξ_x‖²)` over the window.
    pub fn site_masses(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.amplitudes
            .chunks(self.n)
            .enumerate()
            .map(|(i, b)| (self.x_min + i as i64, b.iter().map(|z| z.norm_sqr()).sum()))
    }
}

fn mem_cap_mb() -> u64 {
    std::env::var(MEM_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MEM_CAP_MB)
}

/// `Uᵗξ`, with the memory cap taken from `QWALK_MEM_CAP_MB`.
pub fn evolve(spec: &WalkSpec, state: &State, steps: usize) -> Result<State> {
    evolve_with_cap(spec, state, steps, mem_cap_mb())
}

/// `(U*)ᵗξ`.
pub fn evolve_adjoint(spec: &WalkSpec, state: &State, steps: usize) -> Result<State> {
    evolve(&spec.adjoint(), state, steps)
}

pub fn evolve_with_cap(spec: &WalkSpec, state: &State, steps: usize, cap_mb: u64) -> Result<State> {
    let n = spec.n();
    if state.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.n,
        });
    }
    let b = spec.bandwidth();
    let pad = b * steps;
    let sites = state.sites() + 2 * pad;
    let bytes = (sites as u64) * (n as u64) * 16 * 2;
    let needed_mb = bytes.div_ceil(1 << 20);
    if needed_mb > cap_mb {
        return Err(Error::MemoryCap { needed_mb, cap_mb });
    }
    let terms: Vec<(i64, Vec<C64>)> = spec
        .terms()
        .iter()
        .map(|(&j, a)| (j, (0..n * n).map(|i| a[(i / n, i % n)]).collect()))
        .collect();
    let mut cur = vec![ZERO; sites * n];
    cur[pad * n..(pad + state.sites()) * n].copy_from_slice(&state.amplitudes);
    let mut next = vec![ZERO; sites * n];
    let (mut lo, mut hi) = (pad, pad + state.sites() - 1);
    for _ in 0..steps {
        next[(lo - b) * n..(hi + b + 1) * n].fill(ZERO);
        for y in lo..=hi {
            let psi = &cur[y * n..(y + 1) * n];
            if psi.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (j, a) in &terms {
                let t = (y as i64 + j) as usize;
                let out = &mut next[t * n..(t + 1) * n];
                for (r, slot) in out.iter_mut().enumerate() {
                    let row = &a[r * n..(r + 1) * n];
                    *slot += row.iter().zip(psi).map(|(x, y)| x * y).sum::<C64>();
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        lo -= b;
        hi += b;
    }
    State::new(n, state.x_min - pad as i64, cur)
}

/// `p_t`: the mass of each site, read at `x/t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSnapshot {
    pub t: u64,
    pub x_min: i64,
    pub masses: Vec<f64>,
}

impl DistributionSnapshot {
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses.iter().enumerate().map(|(i, &m)| (self.x_min + i as i64, m))
    }

    /// `(x/t, mass)` pairs.
    pub fn rescaled(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let t = self.t as f64;
        self.iter().map(move |(x, m)| (x as f64 / t, m))
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass with `|x/t| > l`.
    pub fn mass_outside(&self, l: f64) -> f64 {
        self.rescaled().filter(|(v, _)| v.abs() > l).map(|(_, m)| m).sum()
    }

    /// Mass with `|x/t| < eps`.
    pub fn mass_near_zero(&self, eps: f64) -> f64 {
        self.rescaled().filter(|(v, _)| v.abs() < eps).map(|(_, m)| m).sum()
    }

    /// Nonzero sites as `t,x,x_over_t,mass` lines.
    pub fn to_csv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str("t,x,x_over_t,mass\n");
        }
        for (x, m) in self.iter().filter(|(_, m)| *m > 0.0) {
            let _ = writeln!(out, "{},{},{},{:e}", self.t, x, x as f64 / self.t as f64, m);
        }
        out
    }
}

pub fn position_distribution(state: &State, t: u64) -> Result<DistributionSnapshot> {
    if t == 0 {
        return Err(Error::InvalidArgument("position distribution needs t >= 1".into()));
    }
    Ok(DistributionSnapshot {
        t,
        x_min: state.x_min,
        masses: state.site_masses().map(|(_, m)| m).collect(),
    })
}

/// `Σ_x (x/t)^m p_t(x)`.
pub fn empirical_moment(snapshot: &DistributionSnapshot, m: u32) -> f64 {
    snapshot.rescaled().map(|(v, p)| v.powi(m as i32) * p).sum()
}

/// `⟨(D/t)^m ψ, ψ⟩` evaluated on the amplitudes.
pub fn amplitude_moment(state: &State, t: u64, m: u32) -> f64 {
    let mut v: Vec<C64> = state.amplitudes.clone();
    for _ in 0..m {
        for (i, z) in v.iter_mut().enumerate() {
            let x = state.x_min + (i / state.n) as i64;
            *z *= x as f64 / t as f64;
        }
    }
    v.iter().zip(&state.amplitudes).map(|(a, b)| a * b.conj()).sum::<C64>().re
}

/// Coordinates `⟨v_ι(k̃), ξ̂(k̃)⟩` of a state along each band section,
/// indexed `[band][copy][cover sample]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandState {
    pub grid_size: usize,
    pub coords: Vec<Vec<Vec<C64>>>,
}

impl BandState {
    /// Largest entrywise difference.
    pub fn distance(&self, other: &BandState) -> f64 {
        self.coords
            .iter()
            .flatten()
            .flatten()
            .zip(other.coords.iter().flatten().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn band_coordinates(bands: &BandSet, state: &State) -> Result<BandState> {
    if state.n != bands.n {
        return Err(Error::DimensionMismatch {
            expected: bands.n,
            found: state.n,
        });
    }
    let grid = bands.grid_size;
    let hat = state.momentum_grid(grid);
    let coords = bands
        .bands
        .iter()
        .map(|b| {
            if b.sections.len() != b.multiplicity || b.sections.iter().any(|s| s.len() != b.len()) {
                return Err(Error::MissingSections);
            }
            Ok(b.sections
                .iter()
                .map(|sec| sec.iter().enumerate().map(|(j, v)| v.dotc(&hat[j % grid])).collect())
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(BandState {
        grid_size: grid,
        coords,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub velocity: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.masses.len() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.masses.len()).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }
}

/// Weak limit of the rescaled position distributions.
#[derive(Clone, Debug, Serialize)]
pub struct LimitLaw {
    pub atoms: Vec<Atom>,
    pub histogram: Histogram,
    /// Moments of order `1..=MOMENT_COUNT`.
    pub moments: Vec<f64>,
    /// Weighted velocity samples of the continuous part, sorted.
    #[serde(skip)]
    samples: Vec<(f64, f64)>,
}

impl LimitLaw {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.samples.iter().map(|s| s.1).sum::<f64>()
    }

    /// Moment of order `m` from the exact samples.
    pub fn moment(&self, m: u32) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.velocity.powi(m as i32) * a.mass).sum();
        a + self.samples.iter().map(|(v, w)| v.powi(m as i32) * w).sum::<f64>()
    }

    /// `P(V ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let a: f64 = self.atoms.iter().filter(|a| a.velocity <= x).map(|a| a.mass).sum();
        let idx = self.samples.partition_point(|s| s.0 <= x);
        a + self.samples[..idx].iter().map(|s| s.1).sum::<f64>()
    }

    pub fn max_speed(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.1 > 0.0)
            .map(|s| s.0.abs())
            .chain(self.atoms.iter().map(|a| a.velocity.abs()))
            .fold(0.0, f64::max)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("limit law serializes")
    }
}

/// Limit law of `Uᵗξ/t` from the band velocities, with the histogram over
/// `±(‖[D,U]‖ + 0.05)`.
pub fn limit_law(dec: &Decomposition, initial: &State, bins: usize) -> Result<LimitLaw> {
    let half = dec.spec.commutator_norm() + 0.05;
    limit_law_in(dec, initial, bins, half)
}

/// [`limit_law`] with an explicit histogram half-width.
pub fn limit_law_in(dec: &Decomposition, initial: &State, bins: usize, half: f64) -> Result<LimitLaw> {
    if bins == 0 {
        return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
    }
    let coords = band_coordinates(&dec.bands, initial)?;
    let grid = dec.bands.grid_size as f64;
    let mut atom = 0.0;
    let mut samples = Vec::new();
    for (b, copies) in dec.bands.bands.iter().zip(&coords.coords) {
        let weights = copies.iter().flat_map(|c| c.iter().map(|z| z.norm_sqr() / grid));
        if b.is_constant {
            atom += weights.sum::<f64>();
        } else {
            let vel = b.velocities();
            for (i, w) in weights.enumerate() {
                samples.push((vel[i % vel.len()], w));
            }
        }
    }
    let total = atom + samples.iter().map(|s| s.1).sum::<f64>();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("initial state is zero".into()));
    }
    atom /= total;
    samples.iter_mut().for_each(|s| s.1 /= total);
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut masses = vec![0.0; bins];
    let width = 2.0 * half / bins as f64;
    for &(v, w) in &samples {
        let i = ((v + half) / width).floor().clamp(0.0, (bins - 1) as f64) as usize;
        masses[i] += w;
    }
    let atoms = if atom > 0.0 {
        vec![Atom {
            velocity: 0.0,
            mass: atom,
        }]
    } else {
        Vec::new()
    };
    let mut law = LimitLaw {
        atoms,
        histogram: Histogram {
            lo: -half,
            hi: half,
            masses,
        },
        moments: Vec::new(),
        samples,
    };
    law.moments = (1..=MOMENT_COUNT as u32).map(|m| law.moment(m)).collect();
    Ok(law)
}

/// `sup_x |F_t(x) − F(x)|` between the rescaled distribution and the limit
/// law, taken over all jump points of either CDF except those within
/// `atom_window` of an atom. Atoms are thereby compared through the
/// cumulative mass on both sides of them.
pub fn kolmogorov_distance(snapshot: &DistributionSnapshot, law: &LimitLaw, atom_window: f64) -> f64 {
    let mut events: Vec<(f64, f64)> = snapshot
        .rescaled()
        .filter(|(_, m)| *m > 0.0)
        .map(|(v, m)| (v, m))
        .chain(law.samples.iter().map(|&(v, w)| (v, -w)))
        .chain(law.atoms.iter().map(|a| (a.velocity, -a.mass)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let excluded = |x: f64| law.atoms.iter().any(|a| (x - a.velocity).abs() <= atom_window);
    let mut diff = 0.0f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            diff += events[i].1;
            i += 1;
        }
        if !excluded(x) {
            best = best.max(diff.abs());
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallisticReport {
    pub l: f64,
    pub commutator_norm: f64,
    /// `(t, p_t mass outside [−L, L])`.
    pub checkpoints: Vec<(u64, f64)>,
    pub passed: bool,
}

/// Mass outside `[−L, L]` at `t_max/4`, `t_max/2` and `t_max`.
pub fn ballistic_bound_check(spec: &WalkSpec, initial: &State, l: f64, t_max: u64) -> Result<BallisticReport> {
    let cn = spec.commutator_norm();
    if l <= cn {
        return Err(Error::InvalidTest(format!(
            "bound L={l} does not exceed the commutator norm {cn}"
        )));
    }
    if t_max < 4 {
        return Err(Error::InvalidArgument("t_max must be at least 4".into()));
    }
    let mut state = initial.clone();
    let mut t = 0;
    let mut checkpoints = Vec::new();
    for target in [t_max / 4, t_max / 2, t_max] {
        state = evolve(spec, &state, (target - t) as usize)?;
        t = target;
        checkpoints.push((t, position_distribution(&state, t)?.mass_outside(l)));
    }
    let passed = checkpoints.last().unwrap().1 < 1e-3;
    Ok(BallisticReport {
        l,
        commutator_norm: cn,
        checkpoints,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::fixtures;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn free_walk_shifts() {
        let s = evolve(&fixtures::free(), &State::delta(1, 0, 0).unwrap(), 5).unwrap();
        assert_eq!((s.x_min(), s.x_max()), (-5, 5));
        assert_eq!(s.distance(&State::delta(1, 5, 0).unwrap()), 0.0);
        let snap = position_distribution(&s, 5).unwrap();
        assert_eq!(empirical_moment(&snap, 1), 1.0);
        assert_eq!(snap.to_csv(true), "t,x,x_over_t,mass\n5,5,1,1e0\n");
    }

    #[test]
    fn constant_walk_phases() {
        let alpha = C64::from_polar(1.0, 0.3);
        let spec = fixtures::constant(alpha, 2);
        let xi = State::builtin("random", 2, 7).unwrap();
        let s = evolve(&spec, &xi, 4).unwrap();
        let expected = State::new(2, -2, xi.amplitudes().iter().map(|z| z * alpha.powi(4)).collect()).unwrap();
        assert!(s.distance(&expected) < 1e-14);
        assert!(position_distribution(&s, 4).unwrap().mass_near_zero(0.6) > 1.0 - 1e-12);
    }

    #[test]
    fn grover4_one_step() {
        let s = evolve(&fixtures::grover4(), &State::delta(4, 0, 0).unwrap(), 1).unwrap();
        let want = [(-3, 0, -0.5), (-1, 1, 0.5), (1, 2, 0.5), (3, 3, 0.5)];
        let mut expected = State::new(4, -3, vec![ZERO; 28]).unwrap();
        for (x, comp, v) in want {
            expected.amplitudes[(x + 3) as usize * 4 + comp] = c(v);
        }
        assert!(s.distance(&expected) < 1e-15, "{s:?}");
    }

    #[test]
    fn adjoint_undoes_evolution() {
        let spec = fixtures::grover3();
        let xi = State::builtin("random", 3, 1).unwrap();
        let fwd = evolve(&spec, &xi, 30).unwrap();
        assert!((fwd.norm() - 1.0).abs() < 1e-12);
        let back = evolve_adjoint(&spec, &fwd, 30).unwrap();
        assert!(back.distance(&xi) < 1e-12);
    }

    #[test]
    fn memory_cap() {
        let e = evolve_with_cap(&fixtures::grover4(), &State::delta(4, 0, 0).unwrap(), 100_000, 1);
        assert!(matches!(e, Err(Error::MemoryCap { .. })));
    }

    #[test]
    fn moments_agree() {
        let spec = fixtures::coined(0.5).unwrap();
        let s = evolve(&spec, &State::builtin("uniform", 2, 0).unwrap(), 40).unwrap();
        let snap = position_distribution(&s, 40).unwrap();
        assert_eq!(empirical_moment(&snap, 0), snap.total());
        for m in 0..=6 {
            assert!((empirical_moment(&snap, m) - amplitude_moment(&s, 40, m)).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_grid_matches_direct_sum() {
        let xi = State::builtin("random", 2, 3).unwrap();
        let g = xi.momentum_grid(64);
        for j in [0, 5, 63] {
            let k = std::f64::consts::TAU * j as f64 / 64.0;
            assert!((&g[j] - xi.momentum(k)).norm() < 1e-13);
        }
    }

    #[test]
    fn state_json_round_trip() {
        let xi = State::builtin("random", 3, 9).unwrap();
        let back = State::from_json(&xi.to_json()).unwrap();
        assert!(back.distance(&xi) < 1e-15);
        assert!(State::from_json(r#"{"entries":[{"site":0,"vector":[[2,0]]}]}"#).is_err());
        assert!(State::builtin("e0", 2, 0).is_err());
        assert!(State::builtin("e3", 2, 0).is_err());
    }

    #[test]
    fn limit_laws() {
        let free = decompose(&fixtures::free(), 128).unwrap();
        let law = limit_law(&free, &State::delta(1, 0, 0).unwrap(), DEFAULT_BINS).unwrap();
        assert!(law.atoms.is_empty());
        assert!((law.moment(1) - 1.0).abs() < 1e-12);
        assert!((law.cdf(0.999) - 0.0).abs() < 1e-12 && (law.cdf(1.001) - 1.0).abs() < 1e-12);
        let cst = decompose(&fixtures::identity(2), 64).unwrap();
        let law = limit_law(&cst, &State::builtin("uniform", 2, 0).unwrap(), DEFAULT_BINS).unwrap();
        assert_eq!(law.atoms.len(), 1);
        assert!((law.atoms[0].mass - 1.0).abs() < 1e-12);
        assert!(law.histogram.masses.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn grover3_localizes() {
        let dec = decompose(&fixtures::grover3(), 256).unwrap();
        let law = limit_law(&dec, &State::delta(3, 0, 1).unwrap(), DEFAULT_BINS).unwrap();
        assert!((law.total_mass() - 1.0).abs() < 1e-9);
        assert!(law.atoms[0].mass > 0.0);
        let hist: f64 = law.histogram.masses.iter().sum();
        assert!((hist + law.atoms[0].mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ballistic_bounds() {
        let r = ballistic_bound_check(&fixtures::free(), &State::delta(1, 0, 0).unwrap(), 1.5, 40).unwrap();
        assert!(r.passed && r.checkpoints.iter().all(|c| c.1 == 0.0));
        let e = ballistic_bound_check(&fixtures::free(), &State::delta(1, 0, 0).unwrap(), 0.5, 40);
        assert!(matches!(e, Err(Error::InvalidTest(_))));
    }
}
