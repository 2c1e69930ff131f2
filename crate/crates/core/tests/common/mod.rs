#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use susyflow::calculus::FieldCandidate;
use susyflow::superfield::{superspace, SuperField};
use susyflow::{Complex, GeneratorSet, GrassmannNumber};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// θ plus four odd constants.
pub fn ctx() -> Arc<GeneratorSet> {
    superspace(&["eta1", "eta2", "eta3", "eta4"]).unwrap()
}

fn coeff(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

/// Random even constant: real body plus a few products of two odd constants.
pub fn even_constant(g: &Arc<GeneratorSet>, rng: &mut ChaCha8Rng) -> GrassmannNumber {
    let mut v = g.scalar(coeff(rng));
    for _ in 0..2 {
        let (i, j) = (rng.gen_range(1..5), rng.gen_range(1..5));
        v = &v + &(&g.generator(i) * &g.generator(j)).scale(0.3 * coeff(rng));
    }
    v
}

/// Random odd constant: a combination of single odd constants and one triple.
pub fn odd_constant(g: &Arc<GeneratorSet>, rng: &mut ChaCha8Rng) -> GrassmannNumber {
    let mut v = g.zero();
    for i in 1..5 {
        v = &v + &g.generator(i).scale(coeff(rng));
    }
    &v + &g.monomial(&[1, 2, 3]).scale(0.2 * coeff(rng))
}

fn monomials(max_degree: u32) -> Vec<(u32, u32)> {
    (0..=max_degree).flat_map(|p| (0..=max_degree - p).map(move |q| (p, q))).collect()
}

pub fn random_polynomial(g: &Arc<GeneratorSet>, rng: &mut ChaCha8Rng, odd: bool, label: &str) -> FieldCandidate {
    let terms = monomials(4)
        .into_iter()
        .map(|pq| {
            let c = if odd { odd_constant(g, rng) } else { even_constant(g, rng) };
            (pq, c.scale(0.5))
        })
        .collect();
    FieldCandidate::polynomial(label, g, terms)
}

pub fn random_superfield(g: &Arc<GeneratorSet>, rng: &mut ChaCha8Rng) -> (FieldCandidate, FieldCandidate, SuperField) {
    let phi = random_polynomial(g, rng, false, "phi");
    let psi = random_polynomial(g, rng, true, "psi");
    let sf = SuperField::from_components(phi.clone(), psi.clone()).unwrap();
    (phi, psi, sf)
}

pub fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}
