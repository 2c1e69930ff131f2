//! Numerical differentiation of Grassmann-valued fields on the plane.
//!
//! A [`FieldCandidate`] is a closure `(x, y) -> GrassmannNumber` plus an
//! optional table of closed-form partial derivatives. [`partial`] prefers a
//! registered derivative and otherwise differences the closest registered
//! lower derivative with nested central stencils, refined by Richardson
//! extrapolation over the step sequence `h, 2h, 4h, ...`. All arithmetic is
//! coefficient-wise in the Grassmann algebra.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grassmann::{Complex, GeneratorSet, GrassmannNumber, Parity};

/// Derivative multi-index `(i, j)` for `∂x^i ∂y^j`.
pub type MultiIndex = (u8, u8);

pub const MAX_ORDER: u8 = 3;

pub type EvalFn = Arc<dyn Fn(f64, f64) -> Result<GrassmannNumber> + Send + Sync>;

/// Step, extrapolation depth and tolerance for finite differences.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DiffConfig {
    pub h: f64,
    pub levels: usize,
    pub tol: f64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self { h: 1e-3, levels: 2, tol: 1e-6 }
    }
}

impl DiffConfig {
    pub fn new(h: f64, levels: usize, tol: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {h}")));
        }
        if levels < 1 {
            return Err(Error::Config("at least one Richardson level is required".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { h, levels, tol })
    }
}

/// Evaluatable field with optional closed-form derivatives.
#[derive(Clone)]
pub struct FieldCandidate {
    label: String,
    ctx: Arc<GeneratorSet>,
    eval: EvalFn,
    derivs: BTreeMap<MultiIndex, EvalFn>,
}

impl fmt::Debug for FieldCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCandidate")
            .field("label", &self.label)
            .field("derivs", &self.derivs.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// A derivative value with its finite-difference error estimate (zero when
/// the value came from a registered closed form).
#[derive(Debug, Clone)]
pub struct Derivative {
    pub value: GrassmannNumber,
    pub error: f64,
}

impl FieldCandidate {
    pub fn new<F>(label: impl Into<String>, ctx: &Arc<GeneratorSet>, eval: F) -> Self
    where
        F: Fn(f64, f64) -> Result<GrassmannNumber> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            ctx: ctx.clone(),
            eval: Arc::new(eval),
            derivs: BTreeMap::new(),
        }
    }

    /// Body-only field from a complex-valued function.
    pub fn scalar<F>(label: impl Into<String>, ctx: &Arc<GeneratorSet>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex + Send + Sync + 'static,
    {
        let c = ctx.clone();
        Self::new(label, ctx, move |x, y| Ok(c.scalar(f(x, y))))
    }

    pub fn constant(label: impl Into<String>, value: GrassmannNumber) -> Self {
        let ctx = value.context().clone();
        let zero = ctx.zero();
        let v = value.clone();
        let mut out = Self::new(label, &ctx, move |_, _| Ok(v.clone()));
        for idx in all_indices().filter(|&i| i != (0, 0)) {
            let z = zero.clone();
            out = out.with_derivative(idx, move |_, _| Ok(z.clone()));
        }
        out
    }

    pub fn zero(label: impl Into<String>, ctx: &Arc<GeneratorSet>) -> Self {
        Self::constant(label, ctx.zero())
    }

    /// Polynomial `Σ c_k x^{p_k} y^{q_k}` with every derivative up to order 3
    /// registered exactly.
    pub fn polynomial(
        label: impl Into<String>,
        ctx: &Arc<GeneratorSet>,
        terms: Vec<((u32, u32), GrassmannNumber)>,
    ) -> Self {
        let terms = Arc::new(terms);
        let mk = |idx: MultiIndex| {
            let terms = terms.clone();
            let ctx = ctx.clone();
            move |x: f64, y: f64| -> Result<GrassmannNumber> {
                let mut acc = ctx.zero();
                for ((p, q), c) in terms.iter() {
                    let (i, j) = (idx.0 as u32, idx.1 as u32);
                    if i > *p || j > *q {
                        continue;
                    }
                    let k = falling(*p, i) * falling(*q, j) * x.powi((p - i) as i32) * y.powi((q - j) as i32);
                    acc = acc.try_add(&c.scale(k))?;
                }
                Ok(acc)
            }
        };
        let mut out = Self::new(label, ctx, mk((0, 0)));
        for idx in all_indices().filter(|&i| i != (0, 0)) {
            out = out.with_derivative(idx, mk(idx));
        }
        out
    }

    pub fn with_derivative<F>(mut self, idx: MultiIndex, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<GrassmannNumber> + Send + Sync + 'static,
    {
        assert!(idx.0 + idx.1 <= MAX_ORDER && idx != (0, 0), "bad derivative index {idx:?}");
        self.derivs.insert(idx, Arc::new(f));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Drops all registered derivatives, forcing finite differences.
    pub fn without_derivatives(mut self) -> Self {
        self.derivs.clear();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn context(&self) -> &Arc<GeneratorSet> {
        &self.ctx
    }

    pub fn registered(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.derivs.keys().copied()
    }

    pub fn has_derivative(&self, idx: MultiIndex) -> bool {
        idx == (0, 0) || self.derivs.contains_key(&idx)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<GrassmannNumber> {
        self.eval_index((0, 0), x, y)
    }

    fn eval_index(&self, idx: MultiIndex, x: f64, y: f64) -> Result<GrassmannNumber> {
        let f = if idx == (0, 0) { &self.eval } else { &self.derivs[&idx] };
        let v = f(x, y).map_err(|e| self.stencil_error(x, y, e.to_string()))?;
        if v.terms().any(|(_, c)| !c.is_finite()) {
            return Err(self.stencil_error(x, y, "non-finite value".into()));
        }
        Ok(v)
    }

    fn stencil_error(&self, x: f64, y: f64, reason: String) -> Error {
        Error::Stencil { label: self.label.clone(), x, y, reason }
    }

    /// `self + other`; derivatives registered on both sides carry over.
    pub fn try_add(&self, other: &FieldCandidate) -> Result<FieldCandidate> {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let label = format!("({} + {})", self.label, other.label);
        // probe context compatibility once
        self.ctx.zero().try_add(&other.ctx.zero())?;
        let ctx = if self.ctx.len() >= other.ctx.len() { &self.ctx } else { &other.ctx };
        let mut out = Self::new(label, ctx, move |x, y| a(x, y)?.try_add(&b(x, y)?));
        for (idx, fa) in &self.derivs {
            if let Some(fb) = other.derivs.get(idx) {
                let (fa, fb) = (fa.clone(), fb.clone());
                out = out.with_derivative(*idx, move |x, y| fa(x, y)?.try_add(&fb(x, y)?));
            }
        }
        Ok(out)
    }

    /// `alpha · self` for a constant Grassmann `alpha` multiplied from the left.
    pub fn scale_left(&self, alpha: &GrassmannNumber) -> Result<FieldCandidate> {
        self.ctx.zero().try_add(&alpha.context().zero())?;
        let ctx = if self.ctx.len() >= alpha.context().len() { self.ctx.clone() } else { alpha.context().clone() };
        let wrap = |f: EvalFn| {
            let a = alpha.clone();
            move |x: f64, y: f64| a.try_mul(&f(x, y)?)
        };
        let mut out = Self::new(format!("{}·{}", alpha, self.label), &ctx, wrap(self.eval.clone()));
        for (idx, f) in &self.derivs {
            out = out.with_derivative(*idx, wrap(f.clone()));
        }
        Ok(out)
    }

    /// Samples the parity of the values at seeded points in `[-1, 1]²`
    /// (skipping points outside the domain) and checks it against `expected`.
    /// A body-only requirement can be added with `body_only`.
    pub fn check_parity(&self, expected: Parity, body_only: bool, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = 0;
        for _ in 0..64 {
            let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let Ok(v) = self.eval(x, y) else { continue };
            seen += 1;
            let p = v.parity();
            if v.is_zero() {
                continue;
            }
            if p != expected {
                return Err(Error::Parity(format!(
                    "`{}` has {p:?} value at ({x}, {y}), expected {expected:?}",
                    self.label
                )));
            }
            if body_only && !v.soul().is_zero() {
                return Err(Error::Parity(format!(
                    "`{}` has a nilpotent part at ({x}, {y})",
                    self.label
                )));
            }
            if seen >= 8 {
                break;
            }
        }
        Ok(())
    }
}

/// The field `∂x^i ∂y^j f` as a candidate of its own. Every derivative of the
/// result up to total order 3 is served by [`partial`] on `f` at the combined
/// index, so registered closed forms of `f` stay exact and nothing is
/// differenced twice.
pub fn derivative_field(f: &FieldCandidate, idx: MultiIndex, cfg: &DiffConfig) -> Result<FieldCandidate> {
    check_order(idx)?;
    if idx == (0, 0) {
        return Ok(f.clone());
    }
    let mk = |extra: MultiIndex| {
        let f = f.clone();
        let cfg = *cfg;
        let total = (idx.0 + extra.0, idx.1 + extra.1);
        move |x: f64, y: f64| -> Result<GrassmannNumber> {
            check_order(total)?;
            Ok(partial(&f, (x, y), total, &cfg)?.value)
        }
    };
    let label = format!("d{}{}({})", "x".repeat(idx.0 as usize), "y".repeat(idx.1 as usize), f.label);
    let mut out = FieldCandidate::new(label, &f.ctx, mk((0, 0)));
    for extra in all_indices().filter(|&e| e != (0, 0) && e.0 + e.1 + idx.0 + idx.1 <= MAX_ORDER) {
        out = out.with_derivative(extra, mk(extra));
    }
    Ok(out)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|t| (n - t) as f64).product()
}

/// Every multi-index of total order at most 3.
pub fn all_indices() -> impl Iterator<Item = MultiIndex> {
    (0..=MAX_ORDER).flat_map(|i| (0..=MAX_ORDER - i).map(move |j| (i, j)))
}

fn check_order(idx: MultiIndex) -> Result<()> {
    if idx.0 + idx.1 > MAX_ORDER {
        Err(Error::OrderTooHigh { i: idx.0, j: idx.1 })
    } else {
        Ok(())
    }
}

/// One-dimensional central stencil `(offset multiples of h, weight)` for the
/// given derivative order, before division by `h^order`.
fn stencil(order: u8) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        _ => unreachable!("order checked by caller"),
    }
}

/// Plain nested central difference at step `h`, without extrapolation.
pub fn central_difference(
    f: &FieldCandidate,
    base: MultiIndex,
    point: (f64, f64),
    idx: MultiIndex,
    h: f64,
) -> Result<GrassmannNumber> {
    check_order((base.0 + idx.0, base.1 + idx.1))?;
    let mut acc = f.ctx.zero();
    for &(ox, wx) in stencil(idx.0) {
        for &(oy, wy) in stencil(idx.1) {
            let v = f.eval_index(base, point.0 + ox * h, point.1 + oy * h)?;
            acc = acc.try_add(&v.scale(wx * wy))?;
        }
    }
    Ok(acc.scale(1.0 / h.powi((idx.0 + idx.1) as i32)))
}

/// Richardson-extrapolated difference of registered derivative `base` in the
/// direction `idx`, over steps `h·2^k`, `k = 0..=levels`.
pub fn richardson(
    f: &FieldCandidate,
    base: MultiIndex,
    point: (f64, f64),
    idx: MultiIndex,
    h: f64,
    levels: usize,
) -> Result<Derivative> {
    let mut row: Vec<GrassmannNumber> = (0..=levels)
        .map(|k| central_difference(f, base, point, idx, h * (1u32 << k) as f64))
        .collect::<Result<_>>()?;
    let mut error = f64::INFINITY;
    let mut factor = 1.0;
    for _ in 0..levels {
        factor *= 4.0;
        let next: Vec<GrassmannNumber> = row
            .windows(2)
            .map(|w| (&w[0].scale(factor) - &w[1]).scale(1.0 / (factor - 1.0)))
            .collect();
        error = (&next[0] - &row[0]).max_abs();
        row = next;
    }
    if levels == 0 {
        error = 0.0;
    }
    Ok(Derivative { value: row.swap_remove(0), error })
}

/// `∂x^i ∂y^j f` at `point`.
///
/// Uses the registered derivative when present; otherwise differences the
/// highest registered derivative below the request (the field itself at
/// worst) and attaches the Richardson error estimate.
pub fn partial(f: &FieldCandidate, point: (f64, f64), idx: MultiIndex, cfg: &DiffConfig) -> Result<Derivative> {
    check_order(idx)?;
    if f.has_derivative(idx) {
        return Ok(Derivative { value: f.eval_index(idx, point.0, point.1)?, error: 0.0 });
    }
    let base = f
        .registered()
        .filter(|b| b.0 <= idx.0 && b.1 <= idx.1)
        .max_by_key(|b| (b.0 + b.1, b.0))
        .unwrap_or((0, 0));
    richardson(f, base, point, (idx.0 - base.0, idx.1 - base.1), cfg.h, cfg.levels)
}

/// All partial derivatives up to `max_order` at one point.
#[derive(Debug, Clone)]
pub struct Jet {
    values: BTreeMap<MultiIndex, GrassmannNumber>,
    pub error: f64,
}

impl Jet {
    pub fn at(f: &FieldCandidate, point: (f64, f64), max_order: u8, cfg: &DiffConfig) -> Result<Jet> {
        check_order((max_order, 0))?;
        let mut values = BTreeMap::new();
        let mut error: f64 = 0.0;
        for idx in all_indices().filter(|i| i.0 + i.1 <= max_order) {
            let d = partial(f, point, idx, cfg)?;
            error = error.max(d.error);
            values.insert(idx, d.value);
        }
        Ok(Jet { values, error })
    }

    /// Panics if `idx` exceeds the order the jet was built with.
    pub fn d(&self, i: u8, j: u8) -> &GrassmannNumber {
        self.values
            .get(&(i, j))
            .unwrap_or_else(|| panic!("jet has no entry for ({i}, {j})"))
    }

    pub fn value(&self) -> &GrassmannNumber {
        self.d(0, 0)
    }
}

/// Checks every registered derivative against a first-order difference of
/// its predecessor at seeded probe points inside `region`. Points where the
/// field cannot be evaluated are skipped.
pub fn validate(
    f: &FieldCandidate,
    region: ((f64, f64), (f64, f64)),
    probes: usize,
    seed: u64,
    cfg: &DiffConfig,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registered: Vec<MultiIndex> = f.registered().collect();
    let mut done = 0;
    let mut attempts = 0;
    while done < probes && attempts < probes * 20 {
        attempts += 1;
        let p = (
            rng.gen_range(region.0 .0..=region.0 .1),
            rng.gen_range(region.1 .0..=region.1 .1),
        );
        let mut ok = true;
        let mut checks = Vec::new();
        for &idx in &registered {
            let (pred, dir) = if idx.0 > 0 && f.has_derivative((idx.0 - 1, idx.1)) {
                ((idx.0 - 1, idx.1), (1, 0))
            } else if idx.1 > 0 && f.has_derivative((idx.0, idx.1 - 1)) {
                ((idx.0, idx.1 - 1), (0, 1))
            } else {
                ((0, 0), idx)
            };
            let exact = match f.eval_index(idx, p.0, p.1) {
                Ok(v) => v,
                Err(_) => {
                    ok = false;
                    break;
                }
            };
            match richardson(f, pred, p, dir, cfg.h, cfg.levels) {
                Ok(fd) => checks.push((idx, exact, fd.value)),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        done += 1;
        for (idx, exact, fd) in checks {
            let diff = (&exact - &fd).max_abs();
            if diff > cfg.tol * exact.max_abs().max(1.0) {
                return Err(Error::DerivativeMismatch {
                    label: f.label.clone(),
                    index: idx,
                    discrepancy: diff,
                });
            }
        }
    }
    Ok(())
}
