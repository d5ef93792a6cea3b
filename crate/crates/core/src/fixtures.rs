//! Built-in walks used by the CLI, the tests and the acceptance suite.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::walkspec::WalkSpec;

fn real(n: usize, rows: &[&[f64]]) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0))
}

/// `diag(S^{a_1}, …, S^{a_n}) · C` for a coin `C`.
pub fn shift_coin(shifts: &[i64], coin: &CMatrix) -> Result<WalkSpec> {
    let n = coin.nrows();
    if shifts.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: shifts.len(),
        });
    }
    let mut distinct: Vec<i64> = shifts.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let terms = distinct.into_iter().map(|j| {
        let mut a = CMatrix::zeros(n, n);
        for (row, &s) in shifts.iter().enumerate() {
            if s == j {
                a.row_mut(row).copy_from(&coin.row(row));
            }
        }
        (j, a)
    });
    WalkSpec::new(n, terms)
}

fn grover_coin(n: usize) -> CMatrix {
    let off = 2.0 / n as f64;
    CMatrix::from_fn(n, n, |i, j| C64::new(if i == j { off - 1.0 } else { off }, 0.0))
}

pub fn free() -> WalkSpec {
    WalkSpec::new(1, [(1, CMatrix::identity(1, 1))]).expect("free walk")
}

pub fn identity(n: usize) -> WalkSpec {
    WalkSpec::new(n, [(0, CMatrix::identity(n, n))]).expect("identity walk")
}

/// Constant walk `α·I_n`.
pub fn constant(alpha: C64, n: usize) -> WalkSpec {
    let alpha = alpha / alpha.norm();
    WalkSpec::new(n, [(0, CMatrix::identity(n, n) * alpha)]).expect("constant walk")
}

/// 4-state Grover walk `diag(S⁻³, S⁻¹, S, S³) · G₄`.
pub fn grover4() -> WalkSpec {
    shift_coin(&[-3, -1, 1, 3], &grover_coin(4)).expect("grover4")
}

/// 3-state Grover walk `diag(S⁻¹, 1, S) · G₃`.
pub fn grover3() -> WalkSpec {
    shift_coin(&[-1, 0, 1], &grover_coin(3)).expect("grover3")
}

/// Two-band walk whose symbol carries exactly the two non-constant bands of
/// the 4-state Grover walk.
pub fn grover4_subwalk() -> WalkSpec {
    let h = 0.5;
    WalkSpec::new(
        2,
        [
            (3, real(2, &[&[-h, 0.0], &[0.0, 0.0]])),
            (1, real(2, &[&[-h, h], &[h, 0.0]])),
            (-1, real(2, &[&[0.0, -h], &[-h, -h]])),
            (-3, real(2, &[&[0.0, 0.0], &[0.0, -h]])),
        ],
    )
    .expect("grover4 subwalk")
}

/// Two-dimensional walk carrying the doubly covered band of the 3-state
/// Grover walk.
pub fn grover3_subwalk() -> WalkSpec {
    let t = 1.0 / 3.0;
    let s = 2f64.sqrt() * t;
    let c = |re: f64, im: f64| C64::new(re, im);
    WalkSpec::new(
        2,
        [
            (0, CMatrix::from_row_slice(2, 2, &[c(-2.0 * t, 0.0), c(0.0, -s), c(0.0, -s), c(-2.0 * t, 0.0)])),
            (1, CMatrix::from_row_slice(2, 2, &[c(-t, 0.0), ZERO, c(0.0, s), ZERO])),
            (-1, CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, s), ZERO, c(-t, 0.0)])),
        ],
    )
    .expect("grover3 subwalk")
}

/// `[[0, S, 0], [0, 0, S], [1, 0, 0]]`, whose single band is a cube root.
pub fn cube_root() -> WalkSpec {
    WalkSpec::new(
        3,
        [
            (1, real(3, &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]])),
            (0, real(3, &[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]])),
        ],
    )
    .expect("cube root walk")
}

/// `[[r S⁻¹, −√(1−r²) S⁻¹], [√(1−r²) S, r S]]` for `0 < r < 1`.
pub fn coined(r: f64) -> Result<WalkSpec> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("coined walk needs 0 < r < 1, got {r}")));
    }
    let s = (1.0 - r * r).sqrt();
    WalkSpec::new(
        2,
        [
            (-1, real(2, &[&[r, -s], &[0.0, 0.0]])),
            (1, real(2, &[&[0.0, 0.0], &[s, r]])),
        ],
    )
}

/// `[[r S, −b S], [b̄, r]]` with `r² + |b|² = 1`; `det Û(k) = e^{ik}`.
pub fn det_winding(r: f64, b: C64) -> Result<WalkSpec> {
    if ((r * r + b.norm_sqr()) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "det_winding walk needs r² + |b|² = 1, got {}",
            r * r + b.norm_sqr()
        )));
    }
    let rr = C64::new(r, 0.0);
    WalkSpec::new(
        2,
        [
            (1, CMatrix::from_row_slice(2, 2, &[rr, -b, ZERO, ZERO])),
            (0, CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, b.conj(), rr])),
        ],
    )
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "free",
    "identity2",
    "constant:<phase>",
    "grover3",
    "grover4",
    "grover3_subwalk",
    "grover4_subwalk",
    "cube_root",
    "coined:<r>",
    "det_winding:<r>:<b>",
];

/// Resolves a built-in fixture such as `grover4`, `coined:0.5` or
/// `det_winding:0.6:0.8`.
pub fn by_name(name: &str) -> Result<WalkSpec> {
    let mut parts = name.split(':');
    let head = parts.next().unwrap_or_default();
    let args: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad fixture parameter '{p}' in '{name}'")))
        })
        .collect::<Result<_>>()?;
    let arity = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("fixture '{head}' takes {k} parameter(s)")))
        }
    };
    match head {
        "free" => arity(0).map(|_| free()),
        "identity2" => arity(0).map(|_| identity(2)),
        "constant" => arity(1).map(|_| constant(C64::from_polar(1.0, args[0]), 1)),
        "grover3" => arity(0).map(|_| grover3()),
        "grover4" => arity(0).map(|_| grover4()),
        "grover3_subwalk" => arity(0).map(|_| grover3_subwalk()),
        "grover4_subwalk" => arity(0).map(|_| grover4_subwalk()),
        "cube_root" => arity(0).map(|_| cube_root()),
        "coined" => arity(1).and_then(|_| coined(args[0])),
        "det_winding" => arity(2).and_then(|_| det_winding(args[0], C64::new(args[1], 0.0))),
        _ => Err(Error::InvalidArgument(format!(
            "unknown fixture '{name}'; known: {}",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_are_unitary() {
        for name in [
            "free",
            "identity2",
            "constant:0.3",
            "grover3",
            "grover4",
            "grover3_subwalk",
            "grover4_subwalk",
            "cube_root",
            "coined:0.5",
            "det_winding:0.6:0.8",
        ] {
            let w = by_name(name).unwrap();
            assert!(w.unitarity_residual().1 < 1e-15, "{name}");
        }
    }

    #[test]
    fn grover4_one_step_from_first_component() {
        // U(δ₀⊗e₁): the coin gives (−1,1,1,1)/2, then component c moves by its shift.
        let g = grover4();
        let shifts = [-3i64, -1, 1, 3];
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (c, (&s, &e)) in shifts.iter().zip(&expect).enumerate() {
            let a = &g.terms()[&s];
            assert!((a[(c, 0)] - C64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn subwalk_traces_match_grover_factors() {
        for k in [0.1, 0.7, 2.3] {
            let w4 = grover4_subwalk().symbol_at(k).matrix;
            let tr4 = w4.trace();
            assert!((tr4 + C64::new(k.cos() + (3.0 * k).cos(), 0.0)).norm() < 1e-14);
            assert!((w4.determinant() - C64::new(1.0, 0.0)).norm() < 1e-14);
            let w3 = grover3_subwalk().symbol_at(k).matrix;
            assert!((w3.trace() + C64::new((4.0 + 2.0 * k.cos()) / 3.0, 0.0)).norm() < 1e-14);
            assert!((w3.determinant() - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn unknown_fixture_is_rejected() {
        assert!(by_name("nope").is_err());
        assert!(by_name("coined").is_err());
        assert!(by_name("coined:1.5").is_err());
    }
}
