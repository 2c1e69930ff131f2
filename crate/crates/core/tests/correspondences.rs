use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susyflow::calculus::{DiffConfig, FieldCandidate};
use susyflow::correspondences::*;
use susyflow::{Complex, Error, GeneratorSet};

type Deriv = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

fn ctx() -> Arc<GeneratorSet> {
    GeneratorSet::new::<&str>(&[]).unwrap()
}

fn cfg() -> DiffConfig {
    DiffConfig::default()
}

/// `φ = A sin(k(x − ct))` with `c = ±1`, a travelling Born-Infeld wave.
fn travelling(amp: f64, k: f64, c: f64) -> FieldCandidate {
    let g = move |n: i32| -> Deriv {
        Arc::new(move |x: f64, t: f64| {
            let a = k * (x - c * t);
            let v = [a.sin(), a.cos(), -a.sin(), -a.cos()][(n % 4) as usize];
            amp * k.powi(n) * v
        })
    };
    let dv = |i: u8, j: u8| -> ((u8, u8), Deriv) {
        let base = g((i + j) as i32);
        let s = (-c).powi(j as i32);
        ((i, j), Arc::new(move |x, t| s * base(x, t)))
    };
    let f0 = g(0);
    real_field_with(
        "travelling",
        &ctx(),
        move |x, t| f0(x, t),
        vec![dv(1, 0), dv(0, 1), dv(2, 0), dv(1, 1), dv(0, 2), dv(3, 0), dv(2, 1), dv(1, 2), dv(0, 3)],
    )
}

fn poly(terms: &[((u32, u32), f64)]) -> FieldCandidate {
    let c = ctx();
    FieldCandidate::polynomial("poly", &c, terms.iter().map(|&(e, v)| (e, c.scalar(v))).collect())
}

/// `u = x²/(2s) − αt³/6 − βt²/2`, `s = αt + β`, a Monge-Ampère solution
/// whose Riemann pair depends on both variables.
fn ma_family(al: f64, be: f64) -> FieldCandidate {
    let s = move |t: f64| al * t + be;
    let v: Vec<((u8, u8), Deriv)> = vec![
        ((1, 0), Arc::new(move |x, t| x / s(t))),
        ((0, 1), Arc::new(move |x, t| -al * x * x / (2.0 * s(t).powi(2)) - al * t * t / 2.0 - be * t)),
        ((2, 0), Arc::new(move |_, t| 1.0 / s(t))),
        ((1, 1), Arc::new(move |x, t| -al * x / s(t).powi(2))),
        ((0, 2), Arc::new(move |x, t| al * al * x * x / s(t).powi(3) - s(t))),
        ((3, 0), Arc::new(|_, _| 0.0)),
        ((2, 1), Arc::new(move |_, t| -al / s(t).powi(2))),
        ((1, 2), Arc::new(move |x, t| 2.0 * al * al * x / s(t).powi(3))),
        ((0, 3), Arc::new(move |x, t| -3.0 * al.powi(3) * x * x / s(t).powi(4) - al)),
    ];
    real_field_with(
        "ma-family",
        &ctx(),
        move |x, t| x * x / (2.0 * s(t)) - al * t.powi(3) / 6.0 - be * t * t / 2.0,
        v,
    )
}

fn grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            out.push((-1.0 + 0.5 * i as f64, -0.4 + 0.2 * j as f64));
        }
    }
    out
}

#[test]
fn born_infeld_examples() {
    for phi in [travelling(1.0, 1.0, 1.0), travelling(0.7, 2.3, -1.0)] {
        for p in grid() {
            assert!(born_infeld_residual(&phi, p, &cfg()).unwrap().abs() < 1e-12);
            assert!(born_infeld_residual(&phi.clone().without_derivatives(), p, &cfg()).unwrap().abs() < 1e-8);
        }
    }
    let lin = poly(&[((1, 0), 0.3), ((0, 1), -1.7)]);
    assert_eq!(born_infeld_residual(&lin, (0.2, 0.5), &cfg()).unwrap(), 0.0);
    let sq = poly(&[((2, 0), 1.0)]);
    assert!((born_infeld_residual(&sq, (0.4, 0.1), &cfg()).unwrap() + 2.0).abs() < 1e-14);
}

#[test]
fn riemann_pair_examples() {
    let diag = poly(&[((1, 0), 1.0), ((0, 1), -1.0)]);
    let (rp, rm) = riemann_from_phi(&diag, (0.3, 0.2), &cfg()).unwrap();
    assert!(rp.abs() < 1e-15 && (rm + 1.0).abs() < 1e-15);
    assert_eq!(riemann_from_phi(&poly(&[]), (0.0, 0.0), &cfg()).unwrap(), (1.0, -1.0));
    assert!(matches!(riemann_from_gradient(0.0, 2.0), Err(Error::Domain(_))));
}

#[test]
fn born_infeld_waves_satisfy_riemann_system() {
    for phi in [travelling(1.0, 1.0, 1.0), travelling(0.7, 2.3, -1.0), travelling(1.8, 0.6, 1.0)] {
        let pair = riemann_pair_from_phi(&phi, &cfg());
        for p in grid() {
            let (a, b) = riemann_residual(&pair, p, &cfg()).unwrap();
            assert!(a.abs() < 1e-8 && b.abs() < 1e-8, "{p:?}: {a} {b}");
        }
    }
}

#[test]
fn riemann_residual_controls() {
    let c = ctx();
    let constant = RiemannPair { plus: poly(&[((0, 0), 0.4)]), minus: poly(&[((0, 0), -2.0)]) };
    assert_eq!(riemann_residual(&constant, (0.1, 0.2), &cfg()).unwrap(), (0.0, 0.0));
    let b = 0.6;
    let simple = RiemannPair {
        plus: real_field("g", &c, move |x, t| Ok((x + b * t).tanh())),
        minus: poly(&[((0, 0), b)]),
    };
    let r = riemann_residual(&simple, (0.3, -0.2), &cfg()).unwrap();
    assert!(r.0.abs() < 1e-9 && r.1.abs() < 1e-12, "{r:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let random = RiemannPair {
        plus: poly(&[((1, 0), coeffs[0]), ((0, 1), coeffs[1]), ((1, 1), coeffs[2])]),
        minus: poly(&[((2, 0), coeffs[3]), ((0, 1), coeffs[4]), ((0, 0), coeffs[5])]),
    };
    let r = riemann_residual(&random, (0.5, 0.5), &cfg()).unwrap();
    assert!(r.0.abs() + r.1.abs() > 1e-2, "{r:?}");
}

#[test]
fn monge_ampere_examples() {
    let hyper = poly(&[((2, 0), 0.5), ((0, 2), -0.5)]);
    let mixed = poly(&[((1, 1), 1.0)]);
    let sq = poly(&[((2, 0), 1.0)]);
    let p = (0.3, -0.7);
    assert_eq!(monge_ampere_residual(&hyper, p, &cfg()).unwrap(), 0.0);
    assert_eq!(monge_ampere_residual(&mixed, p, &cfg()).unwrap(), 0.0);
    assert_eq!(monge_ampere_residual(&sq, p, &cfg()).unwrap(), 1.0);
    for p in grid() {
        assert!(monge_ampere_residual(&ma_family(0.8, 2.0), p, &cfg()).unwrap().abs() < 1e-12);
    }
}

#[test]
fn roundtrip_examples() {
    let hyper = poly(&[((2, 0), 0.5), ((0, 2), -0.5)]);
    let rt = ma_riemann_roundtrip(&hyper, (0.2, 0.1), &cfg()).unwrap();
    assert_eq!(rt.riemann, (1.0, -1.0));
    assert_eq!(rt.recovered, [1.0, 0.0, -1.0]);
    assert_eq!(rt.roundtrip_error, 0.0);

    let sheared = poly(&[((1, 1), 1.0), ((2, 0), 0.5)]);
    let rt = ma_riemann_roundtrip(&sheared, (0.2, 0.1), &cfg()).unwrap();
    assert_eq!(rt.riemann, (2.0, 0.0));
    assert_eq!(rt.recovered, [1.0, 1.0, 0.0]);
    assert!(matches!(hessian_from_riemann(0.5, 0.5), Err(Error::Domain(_))));
    assert!(matches!(riemann_from_hessian(0.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn monge_ampere_family_closes_the_web() {
    for (al, be) in [(0.8, 2.0), (-0.5, 1.5), (1.3, 3.0)] {
        let u = ma_family(al, be);
        for p in grid() {
            let rt = ma_riemann_roundtrip(&u, p, &cfg()).unwrap();
            assert!(rt.roundtrip_error < 1e-12, "{rt:?}");
            assert!(rt.riemann_residual.0.abs() < 1e-8 && rt.riemann_residual.1.abs() < 1e-8, "{rt:?}");
            assert!(rt.riemann.0 - rt.riemann.1 > 0.0);
            let ch = chaplygin_check(&u, p, &cfg()).unwrap();
            assert!(ch.conservation.0.abs() < 1e-8 && ch.conservation.1.abs() < 1e-8, "{ch:?}");
            assert!(ch.riemann.0.abs() < 1e-8 && ch.riemann.1.abs() < 1e-8, "{ch:?}");
            assert!(ch.utt_relation.abs() < 1e-12, "{ch:?}");
        }
    }
}

#[test]
fn non_solution_breaks_the_utt_relation() {
    let u = poly(&[((2, 0), 1.0), ((0, 2), 0.5), ((1, 1), 0.2)]);
    let ch = chaplygin_check(&u, (0.1, 0.1), &cfg()).unwrap();
    let ma = monge_ampere_residual(&u, (0.1, 0.1), &cfg()).unwrap();
    // utt − (uxt² − 1)/uxx = MA/uxx.
    assert!((ch.utt_relation - ma / 2.0).abs() < 1e-14, "{ch:?}");
}

#[test]
fn chaplygin_examples() {
    let pair = RiemannPair { plus: poly(&[]), minus: poly(&[((0, 0), -1.0)]) };
    let (u, v) = chaplygin_from_riemann(&pair);
    assert_eq!(u.eval(0.0, 0.0).unwrap().body(), Complex::new(-0.5, 0.0));
    assert_eq!(v.eval(0.0, 0.0).unwrap().body(), Complex::new(2.0, 0.0));
    assert_eq!(chaplygin_residual(&u, &v, (0.4, 0.2), &cfg()).unwrap(), (0.0, 0.0));

    let hyper = poly(&[((2, 0), 0.5), ((0, 2), -0.5)]);
    let ch = chaplygin_check(&hyper, (0.3, 0.3), &cfg()).unwrap();
    assert_eq!((ch.u, ch.v), (0.0, 1.0));
    assert_eq!(ch.utt_relation, 0.0);

    let b = -0.4;
    let simple = RiemannPair {
        plus: real_field("g", &ctx(), move |x, t| Ok(1.0 + 0.3 * (x + b * t).sin())),
        minus: poly(&[((0, 0), b)]),
    };
    let (u, v) = chaplygin_from_riemann(&simple);
    for p in grid() {
        let r = chaplygin_residual(&u, &v, p, &cfg()).unwrap();
        assert!(r.0.abs() < 1e-8 && r.1.abs() < 1e-8, "{p:?}: {r:?}");
    }
    assert!(matches!(chaplygin_residual(&u, &poly(&[]), (0.0, 0.0), &cfg()), Err(Error::Domain(_))));
}

#[test]
fn half_legendre_examples() {
    let cfg = cfg();
    let wave = HalfLegendre::new(poly(&[((2, 0), 0.5), ((0, 2), -0.5)]), (-3.0, 3.0), (-2.0, 2.0), cfg).unwrap();
    let (z, y) = (0.7, -0.3);
    assert!((wave.invert(z, y).unwrap() - z).abs() < 1e-15);
    assert!((wave.transform(z, y).unwrap() + 0.5 * (z * z + y * y)).abs() < 1e-14);
    assert!(wave.wave_residual((z, y)).unwrap().abs() < 1e-8);

    let control = HalfLegendre::new(poly(&[((2, 0), 0.5)]), (-3.0, 3.0), (-2.0, 2.0), cfg).unwrap();
    assert!((control.wave_residual((z, y)).unwrap() - 1.0).abs() < 1e-8);

    let flat = HalfLegendre::new(poly(&[((1, 1), 1.0)]), (-1.0, 1.0), (-1.0, 1.0), cfg);
    assert!(matches!(flat, Err(Error::Invertibility(_))));
    let folded = HalfLegendre::new(poly(&[((3, 0), 1.0)]), (-1.0, 1.0), (-1.0, 1.0), cfg);
    assert!(matches!(folded, Err(Error::Invertibility(_))));
    assert!(matches!(wave.invert(10.0, 0.0), Err(Error::Invertibility(_))));
}

#[test]
fn half_legendre_linearizes_the_monge_ampere_family() {
    let hl = HalfLegendre::new(ma_family(0.8, 2.0), (-2.0, 2.0), (-0.5, 0.5), cfg()).unwrap();
    for (z, y) in [(0.1, 0.0), (-0.3, 0.2), (0.4, -0.3), (0.0, 0.35)] {
        let r = hl.wave_residual((z, y)).unwrap();
        assert!(r.abs() < 1e-7, "({z}, {y}): {r}");
    }
    // A cubic perturbation leaves Monge-Ampère and the wave equation together.
    let off = HalfLegendre::new(poly(&[((2, 0), 0.5), ((0, 2), -0.5), ((3, 0), 0.05)]), (-1.0, 1.0), (-1.0, 1.0), cfg()).unwrap();
    let r = off.wave_residual((0.2, 0.1)).unwrap();
    assert!(r.abs() > 1e-3, "{r}");
}

#[test]
fn bianchi_corrected_reading_is_a_hessian_on_solutions() {
    for phi in [travelling(1.0, 1.0, 1.0), travelling(0.7, 2.3, -1.0)] {
        for p in grid() {
            let rep = bianchi_check(&phi, p, &cfg()).unwrap();
            assert!(rep.monge_ampere.abs() < 1e-14, "{rep:?}");
            assert!(rep.integrability.0.abs() < 1e-8 && rep.integrability.1.abs() < 1e-8, "{rep:?}");
            assert!(rep.riemann_gap < 1e-14, "{rep:?}");
            assert!(rep.duplicate_utt_conflict.abs() >= 2.0 - 1e-12, "{rep:?}");
        }
    }
}

#[test]
fn bianchi_integrability_tracks_born_infeld() {
    // Off-shell the triple still solves Monge-Ampère pointwise, but its
    // integrability defects are φt·BI/D³ and φx·BI/D³.
    let phi = poly(&[((2, 0), 0.2), ((1, 1), 0.3), ((0, 1), 0.1), ((0, 3), 0.05)]);
    let p = (0.4, 0.3);
    let rep = bianchi_check(&phi, p, &cfg()).unwrap();
    let bi = born_infeld_residual(&phi, p, &cfg()).unwrap();
    let (px, pt) = (2.0 * 0.2 * p.0 + 0.3 * p.1, 0.3 * p.0 + 0.1 + 3.0 * 0.05 * p.1 * p.1);
    let d3 = (1.0 - pt * pt + px * px).powf(1.5);
    assert!(rep.monge_ampere.abs() < 1e-14);
    assert!(bi.abs() > 1e-2);
    assert!((rep.integrability.0 - pt * bi / d3).abs() < 1e-8, "{rep:?}");
    assert!((rep.integrability.1 - px * bi / d3).abs() < 1e-8, "{rep:?}");
}

#[test]
fn duplicate_utt_reading_never_closes() {
    // With D² = 1 − φt² + φx² the two utt values differ by −(D + 1/D), whose
    // size is at least 2 wherever D is real.
    let phi = travelling(1.0, 1.0, 1.0);
    let rep = bianchi_check(&phi, (0.1, 0.2), &cfg()).unwrap();
    assert!((rep.duplicate_utt_conflict + 2.0).abs() < 1e-14, "{rep:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = 0;
    for _ in 0..200 {
        let (px, pt) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(h) = bianchi_hessian(px, pt) else { continue };
        let s = (1.0 - pt * pt + px * px).sqrt();
        let conflict = h[2] - h[0];
        assert!((conflict + s + 1.0 / s).abs() < 1e-12 * (s + 1.0 / s));
        assert!(conflict.abs() >= 2.0 - 1e-12);
        seen += 1;
    }
    assert!(seen > 50);
}

#[test]
fn wick_rotation_maps_minimal_surface_to_minus_born_infeld() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let mut r = || rng.gen_range(-2.0..2.0);
        let j = TaylorData { px: r(), pt: r(), pxx: r(), pxt: r(), ptt: r() };
        let a = wick_audit(&j);
        assert!(a.term_defect < 1e-13, "{a:?}");
        assert!((a.minimal_surface.0 + a.born_infeld).abs() < 1e-12 && a.minimal_surface.1.abs() < 1e-12, "{a:?}");
    }
    let j = taylor_data(&travelling(1.0, 1.0, 1.0), (0.2, 0.3), &cfg()).unwrap();
    assert!(wick_audit(&j).born_infeld.abs() < 1e-14);
}

#[test]
fn library_builders_match_local_ones() {
    let cfg = cfg();
    let pairs = [
        (travelling_wave(0.7, 2.3, -1.0), travelling(0.7, 2.3, -1.0)),
        (monge_ampere_family(0.8, 2.0), ma_family(0.8, 2.0)),
    ];
    for (a, b) in pairs {
        for p in grid() {
            for idx in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (0, 3)] {
                let va = susyflow::calculus::partial(&a, p, idx, &cfg).unwrap().value;
                let vb = susyflow::calculus::partial(&b, p, idx, &cfg).unwrap().value;
                assert!((&va - &vb).max_abs() < 1e-14, "{idx:?}");
            }
        }
    }
    let hyper = monge_ampere_family(0.0, 1.0);
    assert!((hyper.eval(0.6, 0.2).unwrap().body().re - (0.36 - 0.04) / 2.0).abs() < 1e-15);
}
