//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use qwalk_core::decompose::decompose;
use qwalk_core::dynamics::{
    band_coordinates, empirical_moment, evolve, kolmogorov_distance, limit_law, position_distribution, State,
    ATOM_WINDOW, DEFAULT_BINS,
};
use qwalk_core::fourier::FourierSeries;
use qwalk_core::intertwine::{self, build_intertwiner, classify, match_series, IntertwinerSpace, Window};
use qwalk_core::linalg::{self, C64};
use qwalk_core::realize::{is_ct_realizable, verdict_from_bands, witness_step};
use qwalk_core::spectral::{self, sample_bands, Band};
use qwalk_core::{fixtures, WalkSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run<T: std::fmt::Debug, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure!(elapsed < limit, "took {:.1?}, limit {:.0?}", elapsed, limit);
    Ok(())
}

/// Max over the cover grid of `|band − f|`, allowing any relabelling of the
/// starting sheet.
fn sup_error(b: &Band, f: impl Fn(f64) -> C64) -> f64 {
    (0..b.degree)
        .map(|s| {
            (0..b.len())
                .map(|j| (b.samples[j] - f(b.k_at(j) + TAU * s as f64)).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn grover4_lambda(sign: f64) -> impl Fn(f64) -> C64 {
    move |k: f64| {
        let re = -(k.cos() + (3.0 * k).cos()) / 2.0;
        let im = -sign * k.sin() * (1.0 + 4.0 * k.cos().powi(4)).sqrt();
        C64::new(re, im)
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let spec = fixtures::grover4();
    let bands = run(sample_bands(&spec, 2048))?;
    let verdict = run(verdict_from_bands(&spec, &bands))?;
    let elapsed = start.elapsed();
    let constants: Vec<&Band> = bands.bands.iter().filter(|b| b.is_constant).collect();
    ensure!(constants.len() == 2, "expected two constant bands, got {}", constants.len());
    let mut values: Vec<f64> = constants.iter().map(|b| b.samples[0].re).collect();
    values.sort_by(f64::total_cmp);
    ensure!(
        (values[0] + 1.0).abs() < 1e-8 && (values[1] - 1.0).abs() < 1e-8,
        "constants {values:?}"
    );
    let moving: Vec<&Band> = bands.bands.iter().filter(|b| !b.is_constant).collect();
    ensure!(moving.len() == 2, "expected two non-constant bands");
    let mut worst: f64 = 0.0;
    for (sign, winding) in [(1.0, 1), (-1.0, -1)] {
        let (err, b) = moving
            .iter()
            .map(|b| (sup_error(b, grover4_lambda(sign)), b))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        ensure!(err < 1e-8, "closed form with sign {sign} off by {err:.2e}");
        ensure!(b.winding == winding, "band with sign {sign} has winding {}", b.winding);
        worst = worst.max(err);
    }
    ensure!(constants.iter().all(|b| b.winding == 0), "constant band winds");
    ensure!(!verdict.realizable, "reported realizable");
    ensure!(verdict.det_winding == 0, "det winding {}", verdict.det_winding);
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("closed-form error {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_2() -> Check {
    let spec = fixtures::grover3();
    let bands = run(sample_bands(&spec, 2048))?;
    ensure!(bands.monodromy.cycle_type() == vec![1, 2], "cycle type {:?}", bands.monodromy.cycle_type());
    let cover = bands.bands.iter().find(|b| b.degree == 2).ok_or("no doubly covered band")?;
    let lambda2 = |k: f64| {
        C64::new(
            -(2.0 + k.cos()) / 3.0,
            -(k / 2.0).sin() * (10.0 + 2.0 * k.cos()).sqrt() / 3.0,
        )
    };
    let err = sup_error(cover, lambda2);
    ensure!(err < 1e-8, "closed form off by {err:.2e}");
    ensure!(cover.winding == 0, "winding {}", cover.winding);
    let verdict = run(verdict_from_bands(&spec, &bands))?;
    ensure!(verdict.realizable, "reported not realizable");
    let xi = run(State::builtin("random", 3, 0))?;
    let coords = run(band_coordinates(&bands, &xi))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (s, t) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let two = run(witness_step(&verdict, s, &run(witness_step(&verdict, t, &coords))?))?;
        let one = run(witness_step(&verdict, s + t, &coords))?;
        worst = worst.max(two.distance(&one));
    }
    ensure!(worst < 1e-9, "group law residual {worst:.2e}");
    Ok(format!("closed-form error {err:.1e}, group law residual {worst:.1e}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let spec = fixtures::cube_root();
    let mono = run(spectral::monodromy(&spec, 2048))?;
    ensure!(mono.cycle_type() == vec![3], "cycle type {:?}", mono.cycle_type());
    let dec = run(decompose(&spec, 2048))?;
    let elapsed = start.elapsed();
    ensure!(dec.constants.is_empty(), "unexpected constants");
    ensure!(dec.primes.len() == 1, "{} distinct primes", dec.primes.len());
    let p = &dec.primes[0];
    ensure!(
        p.rate == Rational64::new(2, 3) && p.multiplicity == 2,
        "prime rate {} multiplicity {}",
        p.rate,
        p.multiplicity
    );
    let dof = dec.degree_of_freedom();
    ensure!(dof == Rational64::from_integer(3), "degree of freedom {dof}");
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("2 primes of rate 2/3, 3 = 2·(2/3)⁻¹, {elapsed:.2?}"))
}

fn criterion_4() -> Check {
    let spec = run(fixtures::det_winding(0.6, C64::new(0.8, 0.0)))?;
    let v = run(is_ct_realizable(&spec, 2048))?;
    ensure!(v.det_winding == 1, "det winding {}", v.det_winding);
    ensure!(!v.realizable, "reported realizable");
    Ok("det winding 1, not realizable".into())
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let spec = run(fixtures::coined(0.5))?;
    let dec = run(decompose(&spec, 2048))?;
    let v = run(verdict_from_bands(&spec, &dec.bands))?;
    ensure!(
        v.band_windings.len() == 2 && v.band_windings.iter().all(|w| w.1 == 0),
        "windings {:?}",
        v.band_windings
    );
    ensure!(v.realizable, "reported not realizable");
    let xi = run(State::builtin("uniform", 2, 0))?;
    let law = run(limit_law(&dec, &xi, DEFAULT_BINS))?;
    let state = run(evolve(&spec, &xi, 400))?;
    let snap = run(position_distribution(&state, 400))?;
    let mut worst: f64 = 0.0;
    for m in 1..=4 {
        let d = (empirical_moment(&snap, m) - law.moment(m)).abs();
        worst = worst.max(d);
    }
    ensure!(worst < 0.05, "moment deviation {worst:.3}");
    let outside = snap.mass_outside(0.55);
    ensure!(outside < 1e-3, "mass outside the cone {outside:.2e}");
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("moment deviation {worst:.4}, outside mass {outside:.1e}, {elapsed:.2?}"))
}

fn criterion_6() -> Check {
    let spec = fixtures::grover4();
    let dec = run(decompose(&spec, 2048))?;
    let xi = run(State::builtin("e1", 4, 0))?;
    let law = run(limit_law(&dec, &xi, DEFAULT_BINS))?;
    let snap = run(position_distribution(&run(evolve(&spec, &xi, 400))?, 400))?;
    let ks = kolmogorov_distance(&snap, &law, ATOM_WINDOW);
    ensure!(ks < 0.03, "Kolmogorov distance {ks:.4}");
    Ok(format!("Kolmogorov distance {ks:.4}"))
}

fn criterion_7() -> Check {
    let spec = fixtures::grover3();
    let dec = run(decompose(&spec, 2048))?;
    let xi = run(State::builtin("e2", 3, 0))?;
    let law = run(limit_law(&dec, &xi, DEFAULT_BINS))?;
    let atom = law.atoms.iter().find(|a| a.velocity == 0.0).map_or(0.0, |a| a.mass);
    // Independent quadrature of the projection onto the constant band.
    let constant = dec.bands.bands.iter().find(|b| b.is_constant).ok_or("no constant band")?;
    let quad: f64 = (0..2048)
        .map(|j| {
            let k = TAU * j as f64 / 2048.0;
            let v = &constant.sections[0][j];
            linalg::inner(v, &xi.momentum(k)).norm_sqr() / 2048.0
        })
        .sum();
    ensure!((quad - atom).abs() < 1e-9, "atom {atom} vs quadrature {quad}");
    let snap = run(position_distribution(&run(evolve(&spec, &xi, 400))?, 400))?;
    let near = snap.mass_near_zero(0.02);
    ensure!(atom > 0.0, "no atom at 0");
    ensure!((near - atom).abs() < 0.03, "mass near 0 {near:.4} vs atom {atom:.4}");
    Ok(format!("mass near 0 {near:.4}, atom {atom:.4}"))
}

fn criterion_8() -> Check {
    let g4 = run(decompose(&fixtures::grover4(), 2048))?;
    let w4 = run(decompose(&fixtures::grover4_subwalk(), 2048))?;
    let r = classify(&g4, &w4);
    let translations = r.count(|e| matches!(e, IntertwinerSpace::ModelTranslation { .. }));
    ensure!(r.nonzero && translations == 2, "grover4 vs sub-walk: {translations} translations");
    let w3 = run(decompose(&fixtures::grover3_subwalk(), 2048))?;
    ensure!(!classify(&w3, &w4).nonzero, "sub-walks intertwine");
    let c3 = run(decompose(&run(fixtures::coined(0.3))?, 2048))?;
    let c7 = run(decompose(&run(fixtures::coined(0.7))?, 2048))?;
    ensure!(!classify(&c3, &c7).nonzero, "coined walks intertwine");

    let g3 = run(decompose(&fixtures::grover3(), 2048))?;
    let prime = &g3.primes[0];
    let band = &g3.bands.bands[prime.band_index];
    let shifted: Vec<C64> = (0..band.len()).map(|j| band.value(band.k_at(j) + 0.7)).collect();
    let u2 = FourierSeries::from_samples(&shifted, band.fourier.omega()).compressed(band.min_period().unwrap());
    let m = match_series(&prime.series, &u2);
    let alpha = m.alpha.ok_or("no translation to the shifted band")?;
    ensure!((alpha - 0.7).abs() < 1e-7, "alpha {alpha}");
    let one = FourierSeries::from_coefficients(prime.series.omega(), 0, vec![C64::new(1.0, 0.0)]);
    let v = run(build_intertwiner(&prime.series, alpha, &one, Window::new(0, 256)))?;
    let residual = run(v.residual(&prime.series, &u2))?;
    ensure!(residual < 1e-6, "interior residual {residual:.2e}");
    let conc = run(v.column_concentration(200, 0.1))?;
    ensure!(conc >= 0.95, "column concentration {conc}");
    Ok(format!(
        "2 translations; alpha error {:.1e}, residual {residual:.1e}, bandwidth {}",
        (alpha - 0.7).abs(),
        intertwine::series_bandwidth(&prime.series)
    ))
}

fn random_walk_checks(spec: &WalkSpec, shifts: &[i64], rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (_, res) = spec.unitarity_residual();
    ensure!(res <= 1e-12, "unitarity residual {res:.2e}");
    let bands = run(sample_bands(spec, 256))?;
    ensure!(bands.fiber_count() == spec.n(), "fiber count {}", bands.fiber_count());
    for _ in 0..32 {
        let k: f64 = rng.random_range(0.0..TAU);
        let mut got = bands.values_at(k);
        let mut want = linalg::unitary_eigen(&spec.symbol_at(k).matrix).values;
        let key = |z: &C64| linalg::arg_0_2pi(*z);
        got.sort_by(|a, b| key(a).total_cmp(&key(b)));
        want.sort_by(|a, b| key(a).total_cmp(&key(b)));
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        ensure!(err < 1e-8, "band values off the spectrum by {err:.2e} at k={k}");
    }
    // det Û(k) = det C · e^{i Σ a_j k}.
    let det = run(spectral::det_winding_with(spec, &bands))?;
    ensure!(det == shifts.iter().sum::<i64>(), "det winding {det}, shifts {shifts:?}");
    ensure!(bands.summed_winding() == det, "summed winding {}", bands.summed_winding());
    let fine = run(sample_bands(spec, 512))?;
    let signature = |b: &qwalk_core::BandSet| {
        let mut s: Vec<(usize, usize, i64, bool)> =
            b.bands.iter().map(|b| (b.degree, b.multiplicity, b.winding, b.is_constant)).collect();
        s.sort_unstable();
        s
    };
    ensure!(signature(&bands) == signature(&fine), "grid doubling changed the bands");
    let xi = run(State::builtin("random", spec.n(), rng.random()))?;
    let out = run(evolve(spec, &xi, 100))?;
    let drift = (out.norm() - 1.0).abs();
    ensure!(drift < 1e-10, "norm drift {drift:.2e}");
    Ok(())
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for i in 0..200 {
        let (shifts, spec) = common::random_shift_coin(&mut rng, 4, 3);
        random_walk_checks(&spec, &shifts, &mut rng).map_err(|e| format!("walk {i} (shifts {shifts:?}): {e}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!("200 walks, {elapsed:.2?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("4-state Grover bands, windings, verdict", criterion_1),
        ("3-state Grover monodromy, band, witness", criterion_2),
        ("cube-root walk prime refinement", criterion_3),
        ("det-winding walk", criterion_4),
        ("coined walk moments and cone", criterion_5),
        ("similarity invariance of the limit law", criterion_6),
        ("3-state Grover localization", criterion_7),
        ("intertwiner suite", criterion_8),
        ("random shift-coin property suite", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
