//! Splitting a walk into constant walks and prime model walks.
//!
//! A non-constant band of covering degree `d` whose Fourier support lies in
//! `mZ` (index units of `T_{2πd}`) is `m` copies of a prime model walk of
//! rate `m/d`. Constant bands become constant walks. The degree-of-freedom
//! identity `n = Σ ν + Σ μ/r` is checked in exact rationals.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::linalg::{CMatrix, C64};
use crate::spectral::{self, BandSet};
use crate::walkspec::WalkSpec;

/// `ℓ₂(rZ)` walk of `M[λ]` with `λ` prime on `T_{2π/r}`.
#[derive(Clone, Debug)]
pub struct PrimeModelWalk {
    pub rate: Rational64,
    pub multiplicity: usize,
    /// Winding of `λ` on its own torus `T_{2π/r}`.
    pub winding: i64,
    /// Index of the source band in the decomposition's band set.
    pub band_index: usize,
    /// `λ` as a series in `e^{i j r k}`.
    pub series: FourierSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantWalk {
    pub alpha: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub primes: Vec<PrimeModelWalk>,
    pub constants: Vec<ConstantWalk>,
    pub source_n: usize,
    /// Set when some band needed a nontrivial period refinement, so the
    /// similarity no longer respects the original lattice.
    pub homogeneity_broken: bool,
    /// Bands with their eigenvector sections.
    pub bands: BandSet,
    /// The decomposed walk.
    pub spec: WalkSpec,
}

/// One direct summand of a decomposition.
#[derive(Clone, Debug)]
pub enum Summand<'a> {
    Constant(&'a ConstantWalk),
    Prime(&'a PrimeModelWalk),
}

/// A rate as it appears in JSON output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RateDoc {
    pub num: i64,
    pub den: i64,
}

impl From<Rational64> for RateDoc {
    fn from(r: Rational64) -> Self {
        RateDoc {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

#[derive(Serialize)]
struct ConstantDoc {
    alpha: [f64; 2],
    mult: usize,
}

#[derive(Serialize)]
struct PrimeDoc {
    rate: RateDoc,
    mult: usize,
    winding: i64,
}

#[derive(Serialize)]
pub struct DecompositionDoc {
    constants: Vec<ConstantDoc>,
    primes: Vec<PrimeDoc>,
}

impl Decomposition {
    /// `Σ ν + Σ μ/r` in exact arithmetic.
    pub fn degree_of_freedom(&self) -> Rational64 {
        let c: i64 = self.constants.iter().map(|c| c.multiplicity as i64).sum();
        self.primes
            .iter()
            .fold(Rational64::from_integer(c), |acc, p| {
                acc + Rational64::from_integer(p.multiplicity as i64) / p.rate
            })
    }

    pub fn summands(&self) -> Vec<Summand<'_>> {
        self.constants
            .iter()
            .map(Summand::Constant)
            .chain(self.primes.iter().map(Summand::Prime))
            .collect()
    }

    pub fn doc(&self) -> DecompositionDoc {
        DecompositionDoc {
            constants: self
                .constants
                .iter()
                .map(|c| ConstantDoc {
                    alpha: [c.alpha.re, c.alpha.im],
                    mult: c.multiplicity,
                })
                .collect(),
            primes: self
                .primes
                .iter()
                .map(|p| PrimeDoc {
                    rate: p.rate.into(),
                    mult: p.multiplicity,
                    winding: p.winding,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).expect("decomposition serializes")
    }

    /// Rebuilds a walk on `ℓ₂(Z) ⊗ Cⁿ` from the decomposition: constants as
    /// diagonal phases, each prime rendered on its covering torus as a
    /// `d`-component block walk. Only trigonometric-polynomial bands give a
    /// finite, exactly unitary result; others fail the unitarity check.
    pub fn synthesize(&self) -> Result<WalkSpec> {
        let mut blocks: Vec<WalkSpec> = Vec::new();
        for c in &self.constants {
            for _ in 0..c.multiplicity {
                blocks.push(WalkSpec::new(1, [(0, CMatrix::from_element(1, 1, c.alpha))])?);
            }
        }
        for p in &self.primes {
            // Back to the cover T_{2πd}: r = m/d.
            let d = *p.rate.denom() as usize;
            let m = *p.rate.numer() as usize;
            let block = render_cover(&p.series, m, d)?;
            for _ in 0..p.multiplicity / m {
                blocks.push(block.clone());
            }
        }
        let mut it = blocks.into_iter();
        let first = it.next().ok_or(Error::Empty)?;
        it.try_fold(first, |acc, b| acc.direct_sum(&b))
    }
}

/// Block walk on `ℓ₂(Z) ⊗ C^d` whose symbol's eigenvalues are
/// `{λ(k + 2πa) : a < d}`, from a prime series in `e^{ijrk}` with `r = m/d`.
fn render_cover(series: &FourierSeries, m: usize, d: usize) -> Result<WalkSpec> {
    let mut terms: std::collections::BTreeMap<i64, CMatrix> = Default::default();
    for (j, c) in series.significant(1e-13) {
        // Frequency j·m/d: a shift by n/d on (1/d)Z with n = j·m.
        let n = j * m as i64;
        for a in 0..d as i64 {
            let target = (a + n).rem_euclid(d as i64) as usize;
            let shift = (a + n).div_euclid(d as i64);
            let entry = terms.entry(shift).or_insert_with(|| CMatrix::zeros(d, d));
            entry[(target, a as usize)] += c;
        }
    }
    WalkSpec::new(d, terms)
}

pub fn decompose(spec: &WalkSpec, grid_size: usize) -> Result<Decomposition> {
    let bands = spectral::sample_bands(spec, grid_size)?;
    decompose_bands(spec, bands)
}

/// Decomposes using bands already sampled from `spec`.
pub fn decompose_bands(spec: &WalkSpec, bands: BandSet) -> Result<Decomposition> {
    let mut primes = Vec::new();
    let mut constants: Vec<ConstantWalk> = Vec::new();
    let mut homogeneity_broken = false;
    for (i, b) in bands.bands.iter().enumerate() {
        if b.is_constant {
            if b.degree != 1 {
                return Err(Error::Internal(format!(
                    "constant band with covering degree {} was not split into copies",
                    b.degree
                )));
            }
            let alpha = b.samples[0] / b.samples[0].norm();
            let nu = b.degree * b.multiplicity;
            match constants.iter_mut().find(|c| (c.alpha - alpha).norm() < 1e-9) {
                Some(c) => c.multiplicity += nu,
                None => constants.push(ConstantWalk {
                    alpha,
                    multiplicity: nu,
                }),
            }
            continue;
        }
        let m = b.min_period()?;
        if m > 1 {
            homogeneity_broken = true;
        }
        if b.winding % m as i64 != 0 {
            return Err(Error::Internal(format!(
                "winding {} of a band with period divisor {m} is not divisible",
                b.winding
            )));
        }
        primes.push(PrimeModelWalk {
            rate: Rational64::new(m as i64, b.degree as i64),
            multiplicity: b.multiplicity * m,
            winding: b.winding / m as i64,
            band_index: i,
            series: b.fourier.trimmed(1e-15).compressed(m),
        });
    }
    let dec = Decomposition {
        primes,
        constants,
        source_n: bands.n,
        homogeneity_broken,
        bands,
        spec: spec.clone(),
    };
    if dec.degree_of_freedom() != Rational64::from_integer(dec.source_n as i64) {
        return Err(Error::Internal(format!(
            "degree-of-freedom identity fails: {} != {}",
            dec.degree_of_freedom(),
            dec.source_n
        )));
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn grover3() {
        let d = decompose(&fixtures::grover3(), 256).unwrap();
        assert_eq!(d.constants.len(), 1);
        assert!((d.constants[0].alpha - C64::new(1.0, 0.0)).norm() < 1e-9);
        assert_eq!(d.constants[0].multiplicity, 1);
        assert_eq!(d.primes.len(), 1);
        assert_eq!(d.primes[0].rate, Rational64::new(1, 2));
        assert_eq!(d.primes[0].multiplicity, 1);
        assert!(!d.homogeneity_broken);
    }

    #[test]
    fn cube_root() {
        let d = decompose(&fixtures::cube_root(), 256).unwrap();
        assert!(d.constants.is_empty());
        assert_eq!(d.primes.len(), 1);
        assert_eq!(d.primes[0].rate, Rational64::new(2, 3));
        assert_eq!(d.primes[0].multiplicity, 2);
        assert_eq!(d.degree_of_freedom(), Rational64::from_integer(3));
        assert!(d.homogeneity_broken);
        // c_{2/3} on T_{3π} is the first character of the prime torus.
        let s = &d.primes[0].series;
        assert!((s.coeff(1) - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(d.primes[0].winding, 1);
    }

    #[test]
    fn grover4() {
        let d = decompose(&fixtures::grover4(), 256).unwrap();
        let mut alphas: Vec<f64> = d.constants.iter().map(|c| c.alpha.re).collect();
        alphas.sort_by(f64::total_cmp);
        assert!((alphas[0] + 1.0).abs() < 1e-9 && (alphas[1] - 1.0).abs() < 1e-9);
        assert_eq!(d.primes.len(), 2);
        for p in &d.primes {
            assert_eq!((p.rate, p.multiplicity), (Rational64::from_integer(1), 1));
        }
    }

    #[test]
    fn identity_and_amplification() {
        let d = decompose(&fixtures::identity(2), 64).unwrap();
        assert_eq!(d.constants, vec![ConstantWalk { alpha: C64::new(1.0, 0.0), multiplicity: 2 }]);
        let base = decompose(&fixtures::grover3(), 128).unwrap();
        let amp = decompose(&fixtures::grover3().amplify(2).unwrap(), 128).unwrap();
        assert_eq!(amp.constants[0].multiplicity, 2 * base.constants[0].multiplicity);
        assert_eq!(amp.primes.len(), base.primes.len());
        assert_eq!(amp.primes[0].multiplicity, 2 * base.primes[0].multiplicity);
        assert_eq!(amp.primes[0].rate, base.primes[0].rate);
    }

    #[test]
    fn synthesized_cube_root_is_the_original() {
        let d = decompose(&fixtures::cube_root(), 128).unwrap();
        let w = d.synthesize().unwrap();
        let orig = fixtures::cube_root();
        assert_eq!(w.terms().keys().collect::<Vec<_>>(), orig.terms().keys().collect::<Vec<_>>());
        for (j, a) in orig.terms() {
            assert!((&w.terms()[j] - a).norm() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let d = decompose(&fixtures::cube_root(), 64).unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["primes"][0]["rate"]["num"], 2);
        assert_eq!(v["primes"][0]["rate"]["den"], 3);
        assert_eq!(v["primes"][0]["mult"], 2);
        assert!(v["constants"].as_array().unwrap().is_empty());
    }
}
