//! Seeded random superfields and parameters for the property checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susyflow::calculus::FieldCandidate;
use susyflow::superfield::{superspace, Epsilon, SuperField, SusyParams};
use susyflow::{GeneratorSet, GrassmannNumber};

/// Independent stream `stream` of the run seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// θ plus four odd constants.
pub fn context() -> Arc<GeneratorSet> {
    superspace(&["eta1", "eta2", "eta3", "eta4"]).expect("fixed names are valid")
}

fn coeff(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(-1.0..1.0)
}

/// Real body plus two products of odd constants.
pub fn even_constant(g: &Arc<GeneratorSet>, r: &mut ChaCha8Rng) -> GrassmannNumber {
    let mut v = g.scalar(coeff(r));
    for _ in 0..2 {
        let (i, j) = (r.gen_range(1..5), r.gen_range(1..5));
        v = &v + &(&g.generator(i) * &g.generator(j)).scale(0.3 * coeff(r));
    }
    v
}

/// Combination of the four odd constants and one triple product.
pub fn odd_constant(g: &Arc<GeneratorSet>, r: &mut ChaCha8Rng) -> GrassmannNumber {
    let mut v = g.zero();
    for i in 1..5 {
        v = &v + &g.generator(i).scale(coeff(r));
    }
    &v + &g.monomial(&[1, 2, 3]).scale(0.2 * coeff(r))
}

/// Polynomial of total degree 4 with random even or odd coefficients.
pub fn polynomial(g: &Arc<GeneratorSet>, r: &mut ChaCha8Rng, odd: bool, label: &str) -> FieldCandidate {
    let terms = (0..=4u32)
        .flat_map(|p| (0..=4 - p).map(move |q| (p, q)))
        .map(|pq| {
            let c = if odd { odd_constant(g, r) } else { even_constant(g, r) };
            (pq, c.scale(0.5))
        })
        .collect();
    FieldCandidate::polynomial(label, g, terms)
}

/// Odd superfield `ψ + θφ` with random polynomial components.
pub fn superfield(g: &Arc<GeneratorSet>, r: &mut ChaCha8Rng) -> (FieldCandidate, FieldCandidate, SuperField) {
    let phi = polynomial(g, r, false, "phi");
    let psi = polynomial(g, r, true, "psi");
    let sf = SuperField::from_components(phi.clone(), psi.clone()).expect("grades are consistent");
    (phi, psi, sf)
}

/// Point of `[lo, hi]²`.
pub fn point(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> (f64, f64) {
    (r.gen_range(lo..hi), r.gen_range(lo..hi))
}

/// `(a, b, c, d)` drawn from `[−2, 2]`.
pub fn susy_params(r: &mut ChaCha8Rng, eps: Epsilon) -> SusyParams {
    let mut v = || r.gen_range(-2.0..2.0);
    SusyParams::new(v(), v(), v(), v(), eps)
}

/// Magnitude in `[0.5, 2)` with a random sign.
pub fn nonzero(r: &mut ChaCha8Rng) -> f64 {
    let v: f64 = r.gen_range(0.5..2.0);
    if r.gen_bool(0.5) {
        v
    } else {
        -v
    }
}
