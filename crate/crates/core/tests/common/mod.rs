#![allow(dead_code)]

use qwalk_core::fixtures::shift_coin;
use qwalk_core::linalg::{CMatrix, C64};
use qwalk_core::WalkSpec;
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-distributed unitary from the QR factorization of a complex
/// Gaussian matrix, with the phases of `R`'s diagonal divided out.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random `diag(S^{a_i}) · C` with `n ≤ max_n` and `|a_i| ≤ max_shift`.
pub fn random_shift_coin(rng: &mut impl Rng, max_n: usize, max_shift: i64) -> (Vec<i64>, WalkSpec) {
    let n = rng.random_range(1..=max_n);
    let shifts: Vec<i64> = (0..n).map(|_| rng.random_range(-max_shift..=max_shift)).collect();
    let coin = haar_unitary(n, rng);
    let spec = shift_coin(&shifts, &coin).expect("shift-coin walks are unitary");
    (shifts, spec)
}
