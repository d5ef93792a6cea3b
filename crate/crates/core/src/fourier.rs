//! Trigonometric series on a torus of length `2π/ω`.

use rustfft::FftPlanner;

use crate::linalg::{C64, ZERO};

/// `f(k) = Σ_n c_n e^{i n ω k}` with coefficients stored for
/// `n ∈ [lo, lo + len)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    omega: f64,
    lo: i64,
    coeffs: Vec<C64>,
}

pub fn fft_forward(samples: &[C64]) -> Vec<C64> {
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

pub fn fft_inverse(spectrum: &[C64]) -> Vec<C64> {
    let mut buf = spectrum.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

impl FourierSeries {
    /// Coefficients of uniformly spaced samples `f(j·L/M)`, `L = 2π/ω`.
    pub fn from_samples(samples: &[C64], omega: f64) -> Self {
        let m = samples.len();
        let spec = fft_forward(samples);
        let half = (m / 2) as i64;
        let lo = -half;
        let scale = 1.0 / m as f64;
        let coeffs = (0..m as i64)
            .map(|i| {
                let n = lo + i;
                spec[n.rem_euclid(m as i64) as usize] * scale
            })
            .collect();
        FourierSeries { omega, lo, coeffs }
    }

    pub fn from_coefficients(omega: f64, lo: i64, coeffs: Vec<C64>) -> Self {
        FourierSeries { omega, lo, coeffs }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Torus length `2π/ω`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, n: i64) -> C64 {
        let i = n - self.lo;
        if i < 0 || i >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| (self.lo + i as i64, c))
    }

    /// Coefficients with modulus above `tol`.
    pub fn significant(&self, tol: f64) -> Vec<(i64, C64)> {
        self.iter().filter(|(_, c)| c.norm() > tol).collect()
    }

    /// Drops the tails below `tol`; the result covers the smallest index range
    /// containing every coefficient above `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let sig = self.significant(tol);
        if sig.is_empty() {
            return FourierSeries { omega: self.omega, lo: 0, coeffs: vec![self.coeff(0)] };
        }
        let lo = sig.first().unwrap().0.min(0);
        let hi = sig.last().unwrap().0.max(0);
        let coeffs = (lo..=hi).map(|n| self.coeff(n)).collect();
        FourierSeries { omega: self.omega, lo, coeffs }
    }

    pub fn eval(&self, k: f64) -> C64 {
        self.iter()
            .filter(|(_, c)| *c != ZERO)
            .map(|(n, c)| c * C64::from_polar(1.0, n as f64 * self.omega * k))
            .sum()
    }

    /// `f′`, coefficient-wise multiplication by `i n ω`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .iter()
            .map(|(n, c)| c * C64::new(0.0, n as f64 * self.omega))
            .collect();
        FourierSeries { omega: self.omega, lo: self.lo, coeffs }
    }

    /// `k ↦ f(k + α)`.
    pub fn translated(&self, alpha: f64) -> Self {
        let coeffs = self
            .iter()
            .map(|(n, c)| c * C64::from_polar(1.0, n as f64 * self.omega * alpha))
            .collect();
        FourierSeries { omega: self.omega, lo: self.lo, coeffs }
    }

    /// Reinterprets a series supported on `mZ` as a series on the torus that
    /// is `m` times shorter: `c'_j = c_{jm}`, `ω' = mω`.
    pub fn compressed(&self, m: usize) -> Self {
        let m = m as i64;
        let lo = self.lo.div_euclid(m);
        let hi = self.hi().div_euclid(m);
        let coeffs = (lo..=hi).map(|j| self.coeff(j * m)).collect();
        FourierSeries { omega: self.omega * m as f64, lo, coeffs }
    }

    /// Values at `j·L/count`, `j < count`, by folding the coefficients onto
    /// `count` bins and one inverse FFT. Exact when the coefficient range is
    /// shorter than `count`.
    pub fn sample(&self, count: usize) -> Vec<C64> {
        let mut bins = vec![ZERO; count];
        for (n, c) in self.iter() {
            bins[n.rem_euclid(count as i64) as usize] += c;
        }
        fft_inverse(&bins)
    }

    /// Least-squares fit of `log|c_n| ≈ a + |n| log ρ` over coefficients above
    /// `floor`. Returns `ρ`, or 0 when fewer than two coefficients qualify.
    pub fn decay_rate(&self, floor: f64) -> f64 {
        let mut by_order: std::collections::BTreeMap<u64, f64> = Default::default();
        for (n, c) in self.iter() {
            let e = by_order.entry(n.unsigned_abs()).or_insert(0.0);
            *e = e.max(c.norm());
        }
        let pts: Vec<(f64, f64)> = by_order
            .into_iter()
            .filter(|(_, a)| *a > floor)
            .map(|(n, a)| (n as f64, a.ln()))
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let len = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return 0.0;
        }
        (sxy / sxx).exp()
    }
}
