//! Homogeneous walks `U = Σ_j S^j ⊗ A_j` on `ℓ₂(Z) ⊗ Cⁿ`.
//!
//! `S` is the bilateral shift `δ_x ↦ δ_{x+1}` and the position observable is
//! the diagonal `δ_x ↦ x δ_x`. The Fourier symbol uses the convention
//! `S^j ↦ e^{ijk}`, so `Û(k) = Σ_j e^{ijk} A_j`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Entrywise tolerance on the coefficient identities `Σ_j A_{j+m} A_j^* = δ_{m0} I`.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct WalkSpec {
    n: usize,
    terms: BTreeMap<i64, CMatrix>,
}

/// The symbol `Û(k)` at one point of the torus.
#[derive(Clone, Debug)]
pub struct SymbolMatrix {
    pub k: f64,
    pub matrix: CMatrix,
}

impl SymbolMatrix {
    /// `‖Û Û* − I‖₂`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let d = &self.matrix * self.matrix.adjoint() - CMatrix::identity(n, n);
        linalg::spectral_norm(&d)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WalkDoc {
    n: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    shift: i64,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl WalkSpec {
    /// Builds and validates a walk from `(shift, matrix)` pairs.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (i64, CMatrix)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("n must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (shift, m) in terms {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape {
                    shift,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    n,
                });
            }
            if map.contains_key(&shift) {
                return Err(Error::DuplicateShift(shift));
            }
            map.insert(shift, m);
        }
        map.retain(|_, m: &mut CMatrix| m.iter().any(|z| *z != ZERO));
        if map.is_empty() {
            return Err(Error::Empty);
        }
        let spec = WalkSpec { n, terms: map };
        spec.check_unitarity()?;
        Ok(spec)
    }

    /// Parses the JSON walk document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WalkDoc =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let n = doc.n;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let rows = t.matrix.len();
            if rows != n || t.matrix.iter().any(|r| r.len() != n) {
                let cols = t.matrix.iter().map(|r| r.len()).max().unwrap_or(0);
                return Err(Error::Shape {
                    shift: t.shift,
                    rows,
                    cols,
                    n,
                });
            }
            let m = CMatrix::from_fn(n, n, |i, j| C64::new(t.matrix[i][j][0], t.matrix[i][j][1]));
            terms.push((t.shift, m));
        }
        WalkSpec::new(n, terms)
    }

    pub fn to_json(&self) -> String {
        let doc = WalkDoc {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(&shift, m)| TermDoc {
                    shift,
                    matrix: (0..self.n)
                        .map(|i| (0..self.n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("walk serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<i64, CMatrix> {
        &self.terms
    }

    pub fn bandwidth(&self) -> usize {
        self.terms.keys().map(|j| j.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Largest entrywise residual over all coefficient identities, with the
    /// offset `m` where it occurs.
    pub fn unitarity_residual(&self) -> (i64, f64) {
        let n = self.n;
        let lo = *self.terms.keys().next().unwrap();
        let hi = *self.terms.keys().next_back().unwrap();
        let span = hi - lo;
        let mut worst = (0, 0.0);
        for m in -span..=span {
            let mut acc = CMatrix::zeros(n, n);
            for (&j, a) in &self.terms {
                if let Some(b) = self.terms.get(&(j + m)) {
                    acc += b * a.adjoint();
                }
            }
            if m == 0 {
                acc -= CMatrix::identity(n, n);
            }
            let r = linalg::max_abs_entry(&acc);
            if r > worst.1 {
                worst = (m, r);
            }
        }
        worst
    }

    fn check_unitarity(&self) -> Result<()> {
        let (offset, residual) = self.unitarity_residual();
        if residual > UNITARITY_TOL || !residual.is_finite() {
            return Err(Error::NotUnitary { offset, residual });
        }
        Ok(())
    }

    pub fn symbol_at(&self, k: f64) -> SymbolMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (&j, a) in &self.terms {
            m += a * C64::from_polar(1.0, j as f64 * k);
        }
        SymbolMatrix { k, matrix: m }
    }

    /// `Û′(k) = Σ_j i j e^{ijk} A_j`.
    pub fn symbol_derivative(&self, k: f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (&j, a) in &self.terms {
            m += a * (C64::i() * j as f64 * C64::from_polar(1.0, j as f64 * k));
        }
        m
    }

    /// `‖[D ⊗ id, U]‖ = max_k ‖Σ_j j e^{ijk} A_j‖`.
    ///
    /// Local maxima of a grid scan are polished by golden-section search; the
    /// grid is doubled until the maximum moves by less than 1e-9.
    pub fn commutator_norm(&self) -> f64 {
        let f = |k: f64| {
            let mut m = CMatrix::zeros(self.n, self.n);
            for (&j, a) in &self.terms {
                m += a * (j as f64 * C64::from_polar(1.0, j as f64 * k));
            }
            linalg::spectral_norm(&m)
        };
        let mut grid = 256usize;
        let mut prev = scan_max(&f, grid);
        loop {
            grid *= 2;
            let cur = scan_max(&f, grid);
            if (cur - prev).abs() <= 1e-9 || grid >= 1 << 15 {
                return cur.max(prev);
            }
            prev = cur;
        }
    }

    /// `U* = Σ_j S^{-j} ⊗ A_j^*`.
    pub fn adjoint(&self) -> WalkSpec {
        WalkSpec {
            n: self.n,
            terms: self.terms.iter().map(|(&j, a)| (-j, a.adjoint())).collect(),
        }
    }

    /// Amplification `U ⊗ I_m`.
    pub fn amplify(&self, m: usize) -> Result<WalkSpec> {
        let id = CMatrix::identity(m, m);
        WalkSpec::new(
            self.n * m,
            self.terms.iter().map(|(&j, a)| (j, linalg::kron(a, &id))),
        )
    }

    /// Direct sum `U ⊕ V` on `ℓ₂(Z) ⊗ (C^{n₁} ⊕ C^{n₂})`.
    pub fn direct_sum(&self, other: &WalkSpec) -> Result<WalkSpec> {
        let n = self.n + other.n;
        let mut shifts: Vec<i64> = self.terms.keys().chain(other.terms.keys()).cloned().collect();
        shifts.sort_unstable();
        shifts.dedup();
        let terms = shifts.into_iter().map(|j| {
            let mut m = CMatrix::zeros(n, n);
            if let Some(a) = self.terms.get(&j) {
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a);
            }
            if let Some(b) = other.terms.get(&j) {
                m.view_mut((self.n, self.n), (other.n, other.n)).copy_from(b);
            }
            (j, m)
        });
        WalkSpec::new(n, terms)
    }
}

fn scan_max(f: &impl Fn(f64) -> f64, grid: usize) -> f64 {
    let h = TAU / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|i| f(i as f64 * h)).collect();
    let mut best = vals.iter().cloned().fold(0.0, f64::max);
    for i in 0..grid {
        let l = vals[(i + grid - 1) % grid];
        let r = vals[(i + 1) % grid];
        if vals[i] >= l && vals[i] >= r {
            let k = i as f64 * h;
            best = best.max(golden_max(f, k - h, k + h));
        }
    }
    best
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}
