//! Finite exterior algebra over an ordered list of anticommuting generators.
//!
//! Elements are stored as a sparse map from generator subsets (bitmasks) to
//! complex coefficients. A subset always denotes the product of its
//! generators in ascending index order; any reordering sign is folded into
//! the coefficient at construction, so equality is plain map equality.
//!
//! Derivatives with respect to a generator act from the left.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Bitmask over generator indices.
pub type Mask = u16;

pub const MAX_GENERATORS: usize = 16;

const SCRATCH_A: &str = "__dual_a";
const SCRATCH_B: &str = "__dual_b";

/// Ordered, uniquely named generators shared by every number of one
/// computation context.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    names: Vec<String>,
}

impl GeneratorSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        if names.len() > MAX_GENERATORS {
            return Err(Error::GeneratorSet(format!(
                "{} generators requested, capacity is {MAX_GENERATORS}",
                names.len()
            )));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::GeneratorSet("empty generator label".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::GeneratorSet(format!("duplicate generator `{n}`")));
            }
        }
        Ok(Arc::new(Self { names }))
    }

    /// The context with no generators; compatible with every other context.
    pub fn empty() -> Arc<Self> {
        Arc::new(Self { names: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// New context with `extra` appended. Numbers of `self` embed into it
    /// unchanged.
    pub fn extend<S: AsRef<str>>(&self, extra: &[S]) -> Result<Arc<Self>> {
        let mut all = self.names.clone();
        all.extend(extra.iter().map(|s| s.as_ref().to_owned()));
        Self::new(&all)
    }

    fn is_prefix_of(&self, other: &Self) -> bool {
        self.names.len() <= other.names.len() && other.names[..self.names.len()] == self.names[..]
    }

    pub fn scalar(self: &Arc<Self>, c: impl Into<Complex>) -> GrassmannNumber {
        GrassmannNumber::from_terms(self.clone(), [(0, c.into())])
    }

    pub fn zero(self: &Arc<Self>) -> GrassmannNumber {
        GrassmannNumber {
            ctx: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(self: &Arc<Self>) -> GrassmannNumber {
        self.scalar(1.0)
    }

    /// The generator with the given index.
    ///
    /// Panics if `index` is out of range.
    pub fn generator(self: &Arc<Self>, index: usize) -> GrassmannNumber {
        assert!(index < self.len(), "generator index {index} out of range");
        GrassmannNumber::from_terms(self.clone(), [(1 << index, Complex::new(1.0, 0.0))])
    }

    pub fn named(self: &Arc<Self>, name: &str) -> Result<GrassmannNumber> {
        self.index_of(name)
            .map(|i| self.generator(i))
            .ok_or_else(|| Error::GeneratorSet(format!("no generator named `{name}`")))
    }

    /// Product of the listed generators in the given order, with the
    /// reordering sign folded in. Repeated indices give zero.
    pub fn monomial(self: &Arc<Self>, indices: &[usize]) -> GrassmannNumber {
        indices
            .iter()
            .fold(self.one(), |acc, &i| &acc * &self.generator(i))
    }

    fn describe(&self) -> String {
        self.names.join(", ")
    }
}

/// Smallest context containing both, when one extends the other.
fn join(a: &Arc<GeneratorSet>, b: &Arc<GeneratorSet>) -> Result<Arc<GeneratorSet>> {
    if Arc::ptr_eq(a, b) || a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::ContextMismatch {
            left: a.describe(),
            right: b.describe(),
        })
    }
}

/// Sign of the permutation that sorts the concatenation of the index lists of
/// `a` then `b`; assumes disjoint masks.
pub(crate) fn reorder_sign(a: Mask, b: Mask) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 15 { 0 } else { a & !((1u16 << (j + 1)) - 1) };
        swaps += above.count_ones();
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_degree(degree: u32) -> Self {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of a product of pure elements; `Mixed` is absorbing.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

/// Element of the exterior algebra over a [`GeneratorSet`].
#[derive(Clone, PartialEq)]
pub struct GrassmannNumber {
    ctx: Arc<GeneratorSet>,
    terms: BTreeMap<Mask, Complex>,
}

impl GrassmannNumber {
    pub fn from_terms<I>(ctx: Arc<GeneratorSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Mask, Complex)>,
    {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            debug_assert!(
                ctx.len() >= MAX_GENERATORS || m >> ctx.len() == 0,
                "mask {m:#b} outside context"
            );
            *map.entry(m).or_insert(Complex::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex::new(0.0, 0.0));
        Self { ctx, terms: map }
    }

    pub fn context(&self) -> &Arc<GeneratorSet> {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, Complex)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mask: Mask) -> Complex {
        self.terms.get(&mask).copied().unwrap_or_default()
    }

    pub fn body(&self) -> Complex {
        self.coeff(0)
    }

    pub fn soul(&self) -> GrassmannNumber {
        self.filter(|m| m != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude; zero for the zero element.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn even_part(&self) -> GrassmannNumber {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> GrassmannNumber {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    /// Negates the odd part; the sign picked up when an odd element is moved
    /// past this one.
    pub fn grade_involution(&self) -> GrassmannNumber {
        self.map_terms(|m, c| if m.count_ones() % 2 == 1 { -c } else { c })
    }

    fn filter(&self, keep: impl Fn(Mask) -> bool) -> GrassmannNumber {
        Self {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    fn map_terms(&self, f: impl Fn(Mask, Complex) -> Complex) -> GrassmannNumber {
        Self::from_terms(self.ctx.clone(), self.terms.iter().map(|(m, c)| (*m, f(*m, *c))))
    }

    pub fn scale(&self, k: impl Into<Complex>) -> GrassmannNumber {
        let k = k.into();
        self.map_terms(|_, c| c * k)
    }

    pub fn conj(&self) -> GrassmannNumber {
        self.map_terms(|_, c| c.conj())
    }

    /// Re-express in another context that extends (or equals) this one's
    /// generators in use.
    pub fn in_context(&self, ctx: &Arc<GeneratorSet>) -> Result<GrassmannNumber> {
        let used = self.terms.keys().fold(0u16, |acc, m| acc | m);
        let fits = (used as u32) >> ctx.len() == 0 || ctx.len() >= MAX_GENERATORS;
        let names_agree = self
            .ctx
            .names()
            .iter()
            .zip(ctx.names())
            .all(|(a, b)| a == b);
        if !fits || !names_agree {
            return Err(Error::ContextMismatch {
                left: self.ctx.describe(),
                right: ctx.describe(),
            });
        }
        Ok(Self {
            ctx: ctx.clone(),
            terms: self.terms.clone(),
        })
    }

    pub fn try_add(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        let ctx = join(&self.ctx, &other.ctx)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(*m).or_insert(Complex::new(0.0, 0.0)) += c;
        }
        terms.retain(|_, c| *c != Complex::new(0.0, 0.0));
        Ok(Self { ctx, terms })
    }

    pub fn try_sub(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        let ctx = join(&self.ctx, &other.ctx)?;
        let mut terms: BTreeMap<Mask, Complex> = BTreeMap::new();
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca * cb * reorder_sign(ma, mb);
                *terms.entry(ma | mb).or_insert(Complex::new(0.0, 0.0)) += c;
            }
        }
        terms.retain(|_, c| *c != Complex::new(0.0, 0.0));
        Ok(Self { ctx, terms })
    }

    /// Left derivative with respect to generator `index`.
    pub fn left_derivative(&self, index: usize) -> GrassmannNumber {
        let bit: Mask = 1 << index;
        let below = bit - 1;
        Self::from_terms(
            self.ctx.clone(),
            self.terms.iter().filter(|(m, _)| *m & bit != 0).map(|(m, c)| {
                let sign = if (m & below).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                (m & !bit, c * sign)
            }),
        )
    }

    /// Splits `self = a + g·b` for generator `g = index`; `b` is the left
    /// derivative and `a` is free of `g`.
    pub fn split_generator(&self, index: usize) -> (GrassmannNumber, GrassmannNumber) {
        let bit: Mask = 1 << index;
        (self.filter(|m| m & bit == 0), self.left_derivative(index))
    }

    /// Multiplicative inverse; the body must be nonzero.
    pub fn inverse(&self) -> Result<GrassmannNumber> {
        let b = self.body();
        if b == Complex::new(0.0, 0.0) {
            return Err(Error::Domain("inverse of an element with zero body".into()));
        }
        // (b + N)^-1 = b^-1 · Σ (-N/b)^k
        let step = self.soul().scale(-1.0 / b);
        Ok(nilpotent_series(&step, |_| Complex::new(1.0, 0.0)).scale(1.0 / b))
    }

    pub fn try_div(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        self.try_mul(&other.inverse()?)
    }

    pub fn exp(&self) -> GrassmannNumber {
        let eb = self.body().exp();
        let mut fact = 1.0;
        nilpotent_series(&self.soul(), |k| {
            if k > 0 {
                fact *= k as f64;
            }
            Complex::new(1.0 / fact, 0.0)
        })
        .scale(eb)
    }

    /// Principal logarithm; the body must be nonzero.
    pub fn ln(&self) -> Result<GrassmannNumber> {
        let b = self.body();
        if b == Complex::new(0.0, 0.0) {
            return Err(Error::Domain("logarithm of an element with zero body".into()));
        }
        let x = self.soul().scale(1.0 / b);
        let series = nilpotent_series(&x, |k| {
            if k == 0 {
                Complex::new(0.0, 0.0)
            } else {
                let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                Complex::new(s / k as f64, 0.0)
            }
        });
        Ok(&series + &self.ctx.scalar(b.ln()))
    }

    /// `self^p` on the principal branch; the body must be nonzero.
    pub fn powc(&self, p: impl Into<Complex>) -> Result<GrassmannNumber> {
        let p = p.into();
        let b = self.body();
        if b == Complex::new(0.0, 0.0) {
            return Err(Error::Domain("power of an element with zero body".into()));
        }
        // (b + N)^p = b^p (1 + N/b)^p, binomial series
        let x = self.soul().scale(1.0 / b);
        let mut coef = Complex::new(1.0, 0.0);
        let series = nilpotent_series(&x, |k| {
            if k > 0 {
                coef = coef * (p - (k as f64 - 1.0)) / k as f64;
            }
            coef
        });
        Ok(series.scale(b.powc(p)))
    }

    pub fn sqrt(&self) -> Result<GrassmannNumber> {
        self.powc(0.5)
    }

    /// `f(self)` for an analytic `f` given its Taylor coefficients
    /// `f^(k)(body)/k!` at the body.
    pub fn apply_analytic(&self, taylor: impl FnMut(usize) -> Complex) -> GrassmannNumber {
        nilpotent_series(&self.soul(), taylor)
    }

    pub fn approx_eq(&self, other: &GrassmannNumber, tol: f64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.max_abs() <= tol,
            Err(_) => false,
        }
    }
}

/// Σ_k c_k N^k for nilpotent `n`; stops once the power vanishes.
fn nilpotent_series(n: &GrassmannNumber, mut coeff: impl FnMut(usize) -> Complex) -> GrassmannNumber {
    let mut power = n.ctx.one();
    let mut sum = power.scale(coeff(0));
    for k in 1..=MAX_GENERATORS {
        power = &power * n;
        if power.is_zero() {
            break;
        }
        sum = &sum + &power.scale(coeff(k));
    }
    sum
}

impl fmt::Debug for GrassmannNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GrassmannNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({c})")?;
            }
            let mut rest = *m;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                write!(f, "·{}", self.ctx.names()[i])?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&GrassmannNumber> for &GrassmannNumber {
            type Output = GrassmannNumber;
            /// Panics on incompatible contexts; the `try_` form reports them.
            fn $method(self, rhs: &GrassmannNumber) -> GrassmannNumber {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<GrassmannNumber> for GrassmannNumber {
            type Output = GrassmannNumber;
            fn $method(self, rhs: GrassmannNumber) -> GrassmannNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&GrassmannNumber> for GrassmannNumber {
            type Output = GrassmannNumber;
            fn $method(self, rhs: &GrassmannNumber) -> GrassmannNumber {
                (&self).$method(rhs)
            }
        }
        impl $tr<GrassmannNumber> for &GrassmannNumber {
            type Output = GrassmannNumber;
            fn $method(self, rhs: GrassmannNumber) -> GrassmannNumber {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn neg(self) -> GrassmannNumber {
        self.scale(-1.0)
    }
}

impl Neg for GrassmannNumber {
    type Output = GrassmannNumber;
    fn neg(self) -> GrassmannNumber {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, k: f64) -> GrassmannNumber {
        self.scale(k)
    }
}

impl Mul<f64> for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, k: f64) -> GrassmannNumber {
        self.scale(k)
    }
}

impl Mul<Complex> for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, k: Complex) -> GrassmannNumber {
        self.scale(k)
    }
}

impl Mul<Complex> for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, k: Complex) -> GrassmannNumber {
        self.scale(k)
    }
}

impl Add<Complex> for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn add(self, k: Complex) -> GrassmannNumber {
        self + &self.ctx.scalar(k)
    }
}

impl Add<f64> for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn add(self, k: f64) -> GrassmannNumber {
        self + &self.ctx.scalar(k)
    }
}

impl Sub<f64> for &GrassmannNumber {
    type Output = GrassmannNumber;
    fn sub(self, k: f64) -> GrassmannNumber {
        self - &self.ctx.scalar(k)
    }
}

/// Solves `relation(ω) = 0` for an even unknown `ω`.
///
/// The body is found by Newton iteration from `seed`; the nilpotent layers
/// are then fixed by Newton steps in the algebra, each of which raises the
/// minimal degree of the remaining error, so the iteration terminates after
/// at most `capacity / 2` steps. Derivatives of the relation are obtained
/// exactly by evaluating it at `ω + δ` where `δ` is the product of two
/// scratch generators (`δ² = 0`), so the context needs two free slots.
pub fn solve_implicit<F>(ctx: &Arc<GeneratorSet>, relation: F, seed: f64) -> Result<GrassmannNumber>
where
    F: Fn(&GrassmannNumber) -> Result<GrassmannNumber>,
{
    let ext = ctx.extend(&[SCRATCH_A, SCRATCH_B])?;
    let a = ctx.len();
    let dual_mask: Mask = (1 << a) | (1 << (a + 1));
    let delta = ext.monomial(&[a, a + 1]);

    // value and exact derivative of the relation at `w`
    let eval = |w: &GrassmannNumber| -> Result<(GrassmannNumber, GrassmannNumber)> {
        let r = relation(&(w + &delta))?;
        let r = r.in_context(&ext)?;
        let mut value = Vec::new();
        let mut deriv = Vec::new();
        for (m, c) in r.terms() {
            if m & dual_mask == 0 {
                value.push((m, c));
            } else if m & dual_mask == dual_mask {
                deriv.push((m & !dual_mask, c));
            } else {
                return Err(Error::Parity(
                    "relation is not an even function of the unknown".into(),
                ));
            }
        }
        Ok((
            GrassmannNumber::from_terms(ext.clone(), value),
            GrassmannNumber::from_terms(ext.clone(), deriv),
        ))
    };

    // body
    let mut b = Complex::new(seed, 0.0);
    let mut converged = false;
    for _ in 0..200 {
        let (v, d) = eval(&ext.scalar(b))?;
        let fb = v.body();
        let db = d.body();
        if !fb.is_finite() || !db.is_finite() {
            break;
        }
        if db.norm() < 1e-300 {
            return Err(Error::SingularLinearization { at: b.re });
        }
        let step = fb / db;
        b -= step;
        if step.norm() <= 4.0 * f64::EPSILON * b.norm().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoRoot { seed });
    }
    let (_, d) = eval(&ext.scalar(b))?;
    if d.body().norm() < 1e-12 {
        return Err(Error::SingularLinearization { at: b.re });
    }

    // nilpotent layers
    let mut w = ext.scalar(b);
    for _ in 0..=MAX_GENERATORS {
        let (v, d) = eval(&w)?;
        let correction = v.soul().try_div(&d)?;
        if correction.is_zero() {
            break;
        }
        w = &w - &correction;
    }
    let w = GrassmannNumber::from_terms(ctx.clone(), w.terms());
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<GeneratorSet> {
        GeneratorSet::new(&["eta1", "eta2", "eta3"]).unwrap()
    }

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn add_examples() {
        let g = ctx();
        let e1 = g.generator(0);
        let e2 = g.generator(1);
        assert_eq!(&e1 + &e1, e1.scale(2.0));
        let e12 = &e1 * &e2;
        let sum = &(&g.one() + &e12) + &g.scalar(-1.0);
        assert_eq!(sum, e12);
        let both = &e1 + &e2;
        assert_eq!(both.num_terms(), 2);
    }

    #[test]
    fn mul_examples() {
        let g = ctx();
        let e1 = g.generator(0);
        let e2 = g.generator(1);
        assert!((&e1 * &e1).is_zero());
        assert_eq!(&e2 * &e1, -(&e1 * &e2));
        let one = g.one();
        let lhs = &(&(&one + &e1) * &(&one + &e2)) * &(&one - &(&e1 * &e2));
        assert_eq!(lhs, &(&one + &e1) + &e2);
    }

    #[test]
    fn parity_examples() {
        let g = ctx();
        let e1 = g.generator(0);
        let e12 = g.monomial(&[0, 1]);
        assert_eq!((&g.one() + &e12).parity(), Parity::Even);
        assert_eq!(e1.parity(), Parity::Odd);
        assert_eq!((&g.one() + &e1).parity(), Parity::Mixed);
        assert_eq!(Parity::Odd.product(Parity::Odd), Parity::Even);
        assert_eq!(Parity::Even.product(Parity::Odd), Parity::Odd);
    }

    #[test]
    fn mismatched_contexts_are_rejected() {
        let a = GeneratorSet::new(&["a", "b"]).unwrap();
        let b = GeneratorSet::new(&["b", "a"]).unwrap();
        let err = a.generator(0).try_add(&b.generator(0)).unwrap_err();
        assert!(matches!(err, Error::ContextMismatch { .. }));
        assert!(a.generator(0).try_mul(&b.generator(1)).is_err());
    }

    #[test]
    fn prefix_contexts_combine() {
        let a = GeneratorSet::new(&["a"]).unwrap();
        let ab = a.extend(&["b"]).unwrap();
        let p = a.generator(0).try_mul(&ab.generator(1)).unwrap();
        assert_eq!(p, ab.monomial(&[0, 1]));
        let s = GeneratorSet::empty().scalar(2.0).try_add(&a.generator(0)).unwrap();
        assert_eq!(s.body(), c(2.0));
    }

    #[test]
    fn duplicate_and_oversized_sets_fail() {
        assert!(GeneratorSet::new(&["a", "a"]).is_err());
        let many: Vec<String> = (0..17).map(|i| format!("g{i}")).collect();
        assert!(GeneratorSet::new(&many).is_err());
        let sixteen: Vec<String> = (0..16).map(|i| format!("g{i}")).collect();
        let g = GeneratorSet::new(&sixteen).unwrap();
        let top = g.monomial(&(0..16).collect::<Vec<_>>());
        assert_eq!(top.num_terms(), 1);
    }

    #[test]
    fn left_derivative_sign() {
        let g = ctx();
        // d/d eta2 (eta1 eta2) = -eta1
        let e12 = g.monomial(&[0, 1]);
        assert_eq!(e12.left_derivative(1), -g.generator(0));
        assert_eq!(e12.left_derivative(0), g.generator(1));
        let (a, b) = (&g.generator(2) + &e12).split_generator(0);
        assert_eq!(a, g.generator(2));
        assert_eq!(b, g.generator(1));
    }

    #[test]
    fn inverse_exp_ln() {
        let g = ctx();
        let x = &g.scalar(2.0) + &g.monomial(&[0, 1]).scale(3.0);
        let inv = x.inverse().unwrap();
        assert!((&x * &inv).approx_eq(&g.one(), 1e-15));
        let l = x.ln().unwrap();
        assert!(l.exp().approx_eq(&x, 1e-14));
        let r = x.sqrt().unwrap();
        assert!((&r * &r).approx_eq(&x, 1e-14));
        assert!(g.generator(0).inverse().is_err());
    }

    #[test]
    fn solve_affine_relation() {
        let g = ctx();
        let e12 = g.monomial(&[0, 1]);
        let w = solve_implicit(&g, |w| Ok(&(w - &g.scalar(2.0)) - &e12), 0.0).unwrap();
        assert_eq!(w, &g.scalar(2.0) + &e12);
    }

    #[test]
    fn solve_transcendental_relation_body_only() {
        let g = ctx();
        let e12 = g.monomial(&[0, 1]);
        let rel = |w: &GrassmannNumber, y: f64, c1: f64| -> Result<GrassmannNumber> {
            let w2 = w * w;
            let lhs = &(&w2 * &w.ln()?).scale(4.0) - &(&e12 * &w2).scale(4.0 * y);
            let lhs = &(&lhs + &(&w2 * &w2)) + &g.scalar(-1.0);
            Ok(&lhs - &(&e12 * &w2).scale(4.0 * c1))
        };
        let w = solve_implicit(&g, |w| rel(w, 0.0, 0.0), 0.7).unwrap();
        assert_eq!(w, g.one());
        let w = solve_implicit(&g, |w| rel(w, 1.0, 0.0), 0.7).unwrap();
        assert!(rel(&w, 1.0, 0.0).unwrap().max_abs() <= 1e-15);
        assert!(w.coeff(0b011).norm() > 0.1);
    }

    #[test]
    fn solve_reports_failures() {
        let g = ctx();
        let err = solve_implicit(&g, |w| Ok(&(w * w) + &g.one()), 0.5).unwrap_err();
        assert!(matches!(err, Error::NoRoot { .. } | Error::SingularLinearization { .. }));
        let err = solve_implicit(&g, |w| Ok(w * w), 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularLinearization { .. }));
    }
}
