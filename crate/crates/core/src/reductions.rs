//! Symmetry reductions: invariants, the substitution back to the plane
//! ("lift"), the reduced ODE residuals, the decoupling condition of the
//! dilation row, the first-order ω-equations of the non-splitting rows and
//! the combined equation of the three-parameter row.
//!
//! Every reducible row writes the fields as
//! `φ = α(x,y)·F(ξ) + β(x,y)` and `ψ = γ(x,y)·Λ(ξ) + τ(x,y)`
//! with elementary `α, β, γ, ξ` and a polynomial fermionic tail `τ`, so the
//! lifted derivatives follow from the chain rule and the one-dimensional jets
//! of `F` and `Λ`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{partial, DiffConfig, FieldCandidate, MultiIndex};
use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSet, GrassmannNumber, Parity};
use crate::pde::{classical_residual, susy_special_bosonic, susy_special_fermionic, ClassicalField};
use crate::superfield::Epsilon;

/// Row labels. Classical rows carry a `classical-` prefix; the rows of the
/// supersymmetric classification use `L` and `script-L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubalgebraId {
    ClassicalL1,
    ClassicalL2,
    ClassicalL3,
    ClassicalL4,
    ClassicalL5,
    ClassicalL6,
    ClassicalL7,
    ClassicalDilation,
    ClassicalTranslation,
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    L10,
    L11,
    L12,
    ScriptL2,
    ScriptL3,
    ScriptL4,
    ScriptL5,
    ScriptL6,
    ScriptL7,
    ScriptL8,
}

use SubalgebraId as Id;

impl SubalgebraId {
    pub const ALL: [SubalgebraId; 28] = [
        Id::ClassicalL1,
        Id::ClassicalL2,
        Id::ClassicalL3,
        Id::ClassicalL4,
        Id::ClassicalL5,
        Id::ClassicalL6,
        Id::ClassicalL7,
        Id::ClassicalDilation,
        Id::ClassicalTranslation,
        Id::L1,
        Id::L2,
        Id::L3,
        Id::L4,
        Id::L5,
        Id::L6,
        Id::L7,
        Id::L8,
        Id::L9,
        Id::L10,
        Id::L11,
        Id::L12,
        Id::ScriptL2,
        Id::ScriptL3,
        Id::ScriptL4,
        Id::ScriptL5,
        Id::ScriptL6,
        Id::ScriptL7,
        Id::ScriptL8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Id::ClassicalL1 => "classical-L1",
            Id::ClassicalL2 => "classical-L2",
            Id::ClassicalL3 => "classical-L3,m",
            Id::ClassicalL4 => "classical-L4",
            Id::ClassicalL5 => "classical-L5",
            Id::ClassicalL6 => "classical-L6,a",
            Id::ClassicalL7 => "classical-L7,mu",
            Id::ClassicalDilation => "classical-dilation",
            Id::ClassicalTranslation => "classical-translation",
            Id::L1 => "L1",
            Id::L2 => "L2",
            Id::L3 => "L3",
            Id::L4 => "L4,m",
            Id::L5 => "L5",
            Id::L6 => "L6,m",
            Id::L7 => "L7,m",
            Id::L8 => "L8,m,n",
            Id::L9 => "L9",
            Id::L10 => "L10",
            Id::L11 => "L11",
            Id::L12 => "L12,k",
            Id::ScriptL2 => "script-L2",
            Id::ScriptL3 => "script-L3",
            Id::ScriptL4 => "script-L4,m",
            Id::ScriptL5 => "script-L5",
            Id::ScriptL6 => "script-L6,m",
            Id::ScriptL7 => "script-L7,m",
            Id::ScriptL8 => "script-L8,m,n",
        }
    }

    pub fn is_classical(self) -> bool {
        self <= Id::ClassicalTranslation
    }

    /// Rows whose generator moves no independent variable give no reduction.
    pub fn is_reducible(self) -> bool {
        !matches!(self, Id::ClassicalL1 | Id::L5 | Id::L9 | Id::L10 | Id::L11 | Id::L12 | Id::ScriptL5)
    }

    pub fn is_non_splitting(self) -> bool {
        self >= Id::ScriptL2
    }

    /// Rows built on the rotation exist only for `ε = +1`.
    pub fn needs_rotation(self) -> bool {
        matches!(self, Id::ClassicalL5 | Id::ClassicalL6 | Id::ClassicalL7)
    }
}

impl fmt::Display for SubalgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubalgebraId {
    type Err = Error;

    /// Accepts the printed labels with or without their parameter suffixes,
    /// e.g. `L4,m`, `L4`, `script-L6,m`.
    fn from_str(s: &str) -> Result<Self> {
        let head = |n: &str| n.split(',').next().unwrap_or(n).to_string();
        let want = head(s.trim());
        Id::ALL
            .into_iter()
            .find(|id| head(id.name()) == want)
            .ok_or_else(|| Error::UnknownEntry(format!("no subalgebra `{s}`")))
    }
}

/// A row plus its parameters. Unused parameters are ignored.
#[derive(Debug, Clone)]
pub struct SubalgebraSpec {
    pub id: SubalgebraId,
    pub eps: Epsilon,
    pub m: f64,
    pub n: f64,
    /// Rotation weight of the classical spiral row.
    pub a: f64,
    /// φ-shift weight of the classical rotation row.
    pub mu: f64,
    pub k: f64,
    /// φ-translation coefficient `c` of `m t1 + n t2 + c t3`.
    pub c: f64,
    pub eta1: GrassmannNumber,
    pub eta2: GrassmannNumber,
}

impl SubalgebraSpec {
    pub fn new(id: SubalgebraId, eps: Epsilon, ctx: &Arc<GeneratorSet>) -> Self {
        Self { id, eps, m: 1.0, n: 1.0, a: 1.0, mu: 1.0, k: 1.0, c: 0.0, eta1: ctx.zero(), eta2: ctx.zero() }
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn with_n(mut self, n: f64) -> Self {
        self.n = n;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_etas(mut self, eta1: GrassmannNumber, eta2: GrassmannNumber) -> Self {
        self.eta1 = eta1;
        self.eta2 = eta2;
        self
    }

    /// Parameter constraints of the row.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::ParamConstraint(format!("{}: {what}", self.id)));
        if self.id.needs_rotation() && self.eps != Epsilon::Plus {
            return fail("the rotation is a symmetry only for epsilon = +1");
        }
        let needs_m = matches!(
            self.id,
            Id::ClassicalL3 | Id::L4 | Id::L6 | Id::L7 | Id::L8 | Id::ScriptL4 | Id::ScriptL6 | Id::ScriptL7 | Id::ScriptL8
        );
        if needs_m && self.m == 0.0 {
            return fail("m must be nonzero");
        }
        if matches!(self.id, Id::L8 | Id::ScriptL8) && self.n == 0.0 {
            return fail("n must be nonzero");
        }
        if self.id == Id::ClassicalL6 && self.a == 0.0 {
            return fail("a must be nonzero");
        }
        if self.id == Id::L12 && self.k == 0.0 {
            return fail("k must be nonzero");
        }
        if self.id == Id::ClassicalTranslation && self.m == 0.0 && self.n == 0.0 {
            return fail("a pure phi-translation has no invariant solution");
        }
        for e in [&self.eta1, &self.eta2] {
            if !e.is_zero() && e.parity() != Parity::Odd {
                return fail("eta1 and eta2 must be odd constants");
            }
        }
        if ![self.m, self.n, self.a, self.mu, self.k, self.c].iter().all(|v| v.is_finite()) {
            return fail("parameters must be finite");
        }
        Ok(())
    }

    fn reducible(&self) -> Result<()> {
        self.validate()?;
        if !self.id.is_reducible() {
            return Err(Error::NotReducible(format!(
                "{} moves no independent variable, so no invariant solution exists",
                self.id
            )));
        }
        Ok(())
    }
}

/// Value and derivatives up to order 2 of a real function of `(x, y)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Self { v, ..Default::default() }
    }

    /// `c0 + cx·x + cy·y` at the point.
    pub fn linear(c0: f64, cx: f64, cy: f64, x: f64, y: f64) -> Self {
        Self { v: c0 + cx * x + cy * y, x: cx, y: cy, ..Default::default() }
    }

    fn first(&self, i: usize) -> f64 {
        [self.x, self.y][i]
    }

    fn second(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            _ => self.xy,
        }
    }
}

/// `(ξ, α, β, γ)` at one point.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub xi: Jet2,
    pub alpha: Jet2,
    pub beta: Jet2,
    pub gamma: Jet2,
}

const CHART_EPS: f64 = 1e-12;

fn chart(ok: bool, id: SubalgebraId, x: f64, y: f64, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("{id}: ({x}, {y}) is outside the chart ({what})")))
    }
}

/// Row geometry at `(x, y)`.
pub fn geometry(spec: &SubalgebraSpec, x: f64, y: f64) -> Result<Geometry> {
    spec.reducible()?;
    let one = Jet2::constant(1.0);
    let zero = Jet2::constant(0.0);
    let (m, n) = (spec.m, spec.n);
    let r2 = x * x + y * y;
    let r = r2.sqrt();
    let lin = |cx: f64, cy: f64| Jet2::linear(0.0, cx, cy, x, y);
    let simple = |xi: Jet2, beta: Jet2| Geometry { xi, alpha: one, beta, gamma: one };
    let g = match spec.id {
        Id::ClassicalL2 | Id::L2 | Id::ScriptL2 => simple(lin(0.0, 1.0), zero),
        Id::L3 | Id::ScriptL3 => simple(lin(1.0, 0.0), zero),
        Id::ClassicalL3 => simple(lin(0.0, 1.0), lin(1.0 / m, 0.0)),
        Id::L4 | Id::ScriptL4 => simple(lin(-m, 1.0), zero),
        Id::L6 => Geometry { xi: lin(0.0, 1.0), alpha: Jet2::constant(1.0 / m), beta: lin(1.0 / m, 0.0), gamma: one },
        Id::L7 => Geometry { xi: lin(1.0, 0.0), alpha: Jet2::constant(1.0 / m), beta: lin(0.0, 1.0 / m), gamma: one },
        Id::ScriptL6 => simple(lin(0.0, 1.0), lin(1.0 / m, 0.0)),
        Id::ScriptL7 => simple(lin(1.0, 0.0), lin(0.0, 1.0 / m)),
        Id::L8 | Id::ScriptL8 => simple(lin(1.0, -m / n), lin(0.0, 1.0 / n)),
        Id::ClassicalTranslation => {
            let kappa = spec.c / (m * m + n * n);
            simple(lin(n, -m), lin(kappa * m, kappa * n))
        }
        Id::ClassicalL4 | Id::ClassicalDilation | Id::L1 => {
            chart(y.abs() > CHART_EPS, spec.id, x, y, "y = 0")?;
            let xi = Jet2 { v: x / y, x: 1.0 / y, y: -x / (y * y), xx: 0.0, xy: -1.0 / (y * y), yy: 2.0 * x / (y * y * y) };
            let gamma = if spec.id == Id::L1 {
                chart(y > 0.0, spec.id, x, y, "y > 0 for y^{3/2}")?;
                let s = y.sqrt();
                Jet2 { v: y * s, x: 0.0, y: 1.5 * s, xx: 0.0, xy: 0.0, yy: 0.75 / s }
            } else {
                one
            };
            Geometry { xi, alpha: lin(0.0, 1.0), beta: zero, gamma }
        }
        Id::ClassicalL5 => simple(Jet2 { v: r2, x: 2.0 * x, y: 2.0 * y, xx: 2.0, xy: 0.0, yy: 2.0 }, zero),
        Id::ClassicalL6 => {
            chart(x.abs() > CHART_EPS, spec.id, x, y, "x = 0 for arctan(y/x)")?;
            let a = spec.a;
            let r4 = r2 * r2;
            let xi = Jet2 {
                v: (y / x).atan() - a * r.ln(),
                x: (-y - a * x) / r2,
                y: (x - a * y) / r2,
                xx: (a * (x * x - y * y) + 2.0 * x * y) / r4,
                xy: (y * y - x * x + 2.0 * a * x * y) / r4,
                yy: (a * (y * y - x * x) - 2.0 * x * y) / r4,
            };
            let r3 = r2 * r;
            let alpha = Jet2 { v: r, x: x / r, y: y / r, xx: y * y / r3, xy: -x * y / r3, yy: x * x / r3 };
            Geometry { xi, alpha, beta: zero, gamma: one }
        }
        Id::ClassicalL7 => {
            chart(x.abs() > CHART_EPS, spec.id, x, y, "x = 0 where arcsin(y/r) is not smooth")?;
            let (mu, s, ax) = (spec.mu, x.signum(), x.abs());
            let r4 = r2 * r2;
            let beta = Jet2 {
                v: mu * (y / r).asin(),
                x: -mu * s * y / r2,
                y: mu * ax / r2,
                xx: 2.0 * mu * s * x * y / r4,
                xy: mu * s * (y * y - x * x) / r4,
                yy: -2.0 * mu * ax * y / r4,
            };
            simple(Jet2 { v: r2, x: 2.0 * x, y: 2.0 * y, xx: 2.0, xy: 0.0, yy: 2.0 }, beta)
        }
        Id::ClassicalL1 | Id::L5 | Id::L9 | Id::L10 | Id::L11 | Id::L12 | Id::ScriptL5 => unreachable!("checked by reducible"),
    };
    Ok(g)
}

/// The invariant ξ at `point`.
pub fn symmetry_variable(spec: &SubalgebraSpec, point: (f64, f64)) -> Result<f64> {
    Ok(geometry(spec, point.0, point.1)?.xi.v)
}

/// Polynomial fermionic tail `τ` of the non-splitting rows, as
/// `((p, q), coefficient)` terms of `x^p y^q`.
pub fn tail_terms(spec: &SubalgebraSpec) -> Vec<((u32, u32), GrassmannNumber)> {
    let (e1, e2, m, n) = (&spec.eta1, &spec.eta2, spec.m, spec.n);
    match spec.id {
        Id::ScriptL2 => vec![((2, 0), e1.scale(0.5)), ((1, 1), e2.clone())],
        Id::ScriptL3 => vec![((1, 1), e1.clone()), ((0, 2), e2.scale(0.5))],
        Id::ScriptL4 => vec![((2, 0), e1.scale(0.5)), ((2, 0), e2.scale(-0.5 * m)), ((1, 1), e2.clone())],
        Id::ScriptL6 => vec![((2, 0), e1.scale(0.5 / m)), ((1, 1), e2.scale(1.0 / m))],
        Id::ScriptL7 => vec![((1, 1), e1.scale(1.0 / m)), ((0, 2), e2.scale(0.5 / m))],
        Id::ScriptL8 => vec![
            ((1, 1), e1.scale(1.0 / n)),
            ((0, 2), e1.scale(-m / (2.0 * n * n))),
            ((0, 2), e2.scale(0.5 / n)),
        ],
        _ => vec![],
    }
}

/// `[value, first, second]` derivative jet of a profile at one ξ.
pub type Jet1 = [GrassmannNumber; 3];
pub type Profile = Arc<dyn Fn(f64) -> Result<Jet1> + Send + Sync>;

/// Profile whose derivatives are taken by Richardson-extrapolated central
/// differences of `f`.
pub fn profile_from_fn<F>(ctx: &Arc<GeneratorSet>, f: F, cfg: DiffConfig) -> Profile
where
    F: Fn(f64) -> Result<GrassmannNumber> + Send + Sync + 'static,
{
    let field = FieldCandidate::new("profile", ctx, move |x, _| f(x));
    Arc::new(move |xi| {
        Ok([
            field.eval(xi, 0.0)?,
            partial(&field, (xi, 0.0), (1, 0), &cfg)?.value,
            partial(&field, (xi, 0.0), (2, 0), &cfg)?.value,
        ])
    })
}

/// Profile with closed-form value, first and second derivative.
pub fn profile_exact<F>(f: F) -> Profile
where
    F: Fn(f64) -> Result<Jet1> + Send + Sync + 'static,
{
    Arc::new(f)
}

/// `Σ c_k ξ^k`.
pub fn profile_polynomial(coeffs: Vec<GrassmannNumber>) -> Profile {
    Arc::new(move |xi| {
        let ctx = coeffs.first().map(|c| c.context().clone()).unwrap_or_else(GeneratorSet::empty);
        let mut out = [ctx.zero(), ctx.zero(), ctx.zero()];
        for (k, c) in coeffs.iter().enumerate() {
            let k = k as i32;
            out[0] = &out[0] + &c.scale(xi.powi(k));
            if k >= 1 {
                out[1] = &out[1] + &c.scale(k as f64 * xi.powi(k - 1));
            }
            if k >= 2 {
                out[2] = &out[2] + &c.scale((k * (k - 1)) as f64 * xi.powi(k - 2));
            }
        }
        Ok(out)
    })
}

pub fn profile_zero(ctx: &Arc<GeneratorSet>) -> Profile {
    let z = ctx.zero();
    Arc::new(move |_| Ok([z.clone(), z.clone(), z.clone()]))
}

/// `c · g(ξ)` for a constant Grassmann `c` multiplied from the left.
pub fn profile_times(c: GrassmannNumber, g: Profile) -> Profile {
    Arc::new(move |xi| {
        let j = g(xi)?;
        Ok([c.try_mul(&j[0])?, c.try_mul(&j[1])?, c.try_mul(&j[2])?])
    })
}

/// The reduced unknowns `F(ξ)` (even) and `Λ(ξ)` (odd).
#[derive(Clone)]
pub struct ReducedCandidate {
    pub label: String,
    ctx: Arc<GeneratorSet>,
    f: Profile,
    lambda: Profile,
}

impl fmt::Debug for ReducedCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedCandidate").field("label", &self.label).finish()
    }
}

impl ReducedCandidate {
    pub fn new(label: impl Into<String>, ctx: &Arc<GeneratorSet>, f: Profile, lambda: Profile) -> Self {
        Self { label: label.into(), ctx: ctx.clone(), f, lambda }
    }

    /// `Λ = 0`.
    pub fn classical(label: impl Into<String>, ctx: &Arc<GeneratorSet>, f: Profile) -> Self {
        Self::new(label, ctx, f, profile_zero(ctx))
    }

    pub fn context(&self) -> &Arc<GeneratorSet> {
        &self.ctx
    }

    pub fn f(&self, xi: f64) -> Result<Jet1> {
        (self.f)(xi)
    }

    pub fn lambda(&self, xi: f64) -> Result<Jet1> {
        (self.lambda)(xi)
    }

    /// Parities of `F` and `Λ` at the given samples.
    pub fn check_parity(&self, xis: &[f64]) -> Result<()> {
        for &xi in xis {
            let (f, l) = (self.f(xi)?, self.lambda(xi)?);
            for v in &f {
                if !v.is_zero() && v.parity() != Parity::Even {
                    return Err(Error::Parity(format!("F of `{}` is not even at ξ = {xi}", self.label)));
                }
            }
            for v in &l {
                if !v.is_zero() && v.parity() != Parity::Odd {
                    return Err(Error::Parity(format!("Λ of `{}` is not odd at ξ = {xi}", self.label)));
                }
            }
        }
        Ok(())
    }

    /// Largest discrepancy between the registered first and second
    /// derivatives and differences of the lower ones, over `xis`.
    pub fn derivative_defect(&self, xis: &[f64], cfg: &DiffConfig) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for prof in [&self.f, &self.lambda] {
            for k in 0..2 {
                let p = prof.clone();
                let field = FieldCandidate::new("jet", &self.ctx, move |x, _| Ok(p(x)?[k].clone()));
                for &xi in xis {
                    let fd = partial(&field, (xi, 0.0), (1, 0), cfg)?.value;
                    let exact = prof(xi)?[k + 1].clone();
                    worst = worst.max((&fd - &exact).max_abs() / exact.max_abs().max(1.0));
                }
            }
        }
        Ok(worst)
    }
}

fn in_ctx(jet: Jet1, ctx: &Arc<GeneratorSet>) -> Result<Jet1> {
    let [a, b, c] = jet;
    Ok([a.in_context(ctx)?, b.in_context(ctx)?, c.in_context(ctx)?])
}

fn join_ctx(a: &Arc<GeneratorSet>, b: &Arc<GeneratorSet>) -> Result<Arc<GeneratorSet>> {
    a.zero().try_add(&b.zero())?;
    Ok(if a.len() >= b.len() { a.clone() } else { b.clone() })
}

fn chain(g: &Jet2, xi: &Jet2, jet: &Jet1, shift: &Jet2, idx: MultiIndex) -> Result<GrassmannNumber> {
    let [f, f1, f2] = jet;
    let v = match idx {
        (0, 0) => &f.scale(g.v) + shift.v,
        (1, 0) | (0, 1) => {
            let i = idx.1 as usize;
            &(&f.scale(g.first(i)) + &f1.scale(g.v * xi.first(i))) + shift.first(i)
        }
        (2, 0) | (1, 1) | (0, 2) => {
            let (i, j) = match idx {
                (2, 0) => (0, 0),
                (1, 1) => (0, 1),
                _ => (1, 1),
            };
            let c1 = g.first(i) * xi.first(j) + g.first(j) * xi.first(i) + g.v * xi.second(i, j);
            let sum = &(&f.scale(g.second(i, j)) + &f1.scale(c1)) + &f2.scale(g.v * xi.first(i) * xi.first(j));
            &sum + shift.second(i, j)
        }
        _ => return Err(Error::OrderTooHigh { i: idx.0, j: idx.1 }),
    };
    Ok(v)
}

const LIFT_INDICES: [MultiIndex; 5] = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Substitutes the row's change of variables: returns `(φ, ψ)` on the plane
/// with first and second derivatives registered through the chain rule.
pub fn lift(spec: &SubalgebraSpec, rc: &ReducedCandidate) -> Result<(FieldCandidate, FieldCandidate)> {
    spec.reducible()?;
    let ctx = join_ctx(&join_ctx(&rc.ctx, spec.eta1.context())?, spec.eta2.context())?;
    let mk = |use_lambda: bool, idx: MultiIndex| {
        let (spec, rc) = (spec.clone(), rc.clone());
        move |x: f64, y: f64| -> Result<GrassmannNumber> {
            let g = geometry(&spec, x, y)?;
            if use_lambda {
                chain(&g.gamma, &g.xi, &rc.lambda(g.xi.v)?, &Jet2::default(), idx)
            } else {
                chain(&g.alpha, &g.xi, &rc.f(g.xi.v)?, &g.beta, idx)
            }
        }
    };
    let label = format!("{}[{}]", spec.id, rc.label);
    let mut phi = FieldCandidate::new(format!("phi {label}"), &ctx, mk(false, (0, 0)));
    let mut psi = FieldCandidate::new(format!("psi {label}"), &ctx, mk(true, (0, 0)));
    for idx in LIFT_INDICES {
        phi = phi.with_derivative(idx, mk(false, idx));
        psi = psi.with_derivative(idx, mk(true, idx));
    }
    let tail = tail_terms(spec);
    if !tail.is_empty() {
        psi = psi.try_add(&FieldCandidate::polynomial("tail", &ctx, tail))?.with_label(format!("psi {label}"));
    }
    Ok((phi, psi))
}

/// Reduced residuals; the fermionic part is absent for classical rows.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub bosonic: GrassmannNumber,
    pub fermionic: Option<GrassmannNumber>,
}

impl Reduced {
    pub fn max_abs(&self) -> f64 {
        self.bosonic.max_abs().max(self.fermionic.as_ref().map_or(0.0, |f| f.max_abs()))
    }
}

/// Bracket of the dilation rows:
/// `(1+ξ²) − ε(1+εξ²)²F'² + 2ξ(1+εξ²)FF' − εξ²F²`.
pub fn dilation_bracket(f: &GrassmannNumber, f1: &GrassmannNumber, xi: f64, e: f64) -> GrassmannNumber {
    let q = 1.0 + e * xi * xi;
    let ctx = f.context();
    &(&(&ctx.scalar(1.0 + xi * xi) - &(f1 * f1).scale(e * q * q)) + &(f * f1).scale(2.0 * xi * q)) - &(f * f).scale(e * xi * xi)
}

/// Coefficient `B(F')` of the three-parameter rows.
pub fn l8_bracket(f1: &GrassmannNumber, m: f64, n: f64, e: f64) -> GrassmannNumber {
    let (n2, n4) = (n * n, n.powi(4));
    let q = 1.0 + e * m * m / n2;
    let ctx = f1.context();
    &(&(f1 * f1).scale(-e * q * q) + &f1.scale(2.0 * m / n2 + 2.0 * e * m.powi(3) / n4)) + &ctx.scalar(1.0 + m * m / n2 - e * m * m / n4)
}

/// The printed reduced equations of the row at `xi`.
pub fn reduced_residual(spec: &SubalgebraSpec, rc: &ReducedCandidate, xi: f64) -> Result<Reduced> {
    spec.reducible()?;
    let ctx = join_ctx(&join_ctx(&rc.ctx, spec.eta1.context())?, spec.eta2.context())?;
    let [f, f1, f2] = in_ctx(rc.f(xi)?, &ctx)?;
    let [l, l1, l2] = in_ctx(rc.lambda(xi)?, &ctx)?;
    let (h1, h2) = (spec.eta1.in_context(&ctx)?, spec.eta2.in_context(&ctx)?);
    let e = spec.eps.value();
    let (m, n) = (spec.m, spec.n);
    let s = |v: f64| ctx.scalar(v);
    let sq = |v: &GrassmannNumber| v * v;
    let translation_form = |c: f64, target: &GrassmannNumber| &target.scale(c) - &(&sq(&f1) * target).scale(e);
    let classical = |b: GrassmannNumber| Ok(Reduced { bosonic: b, fermionic: None });
    let pair = |b: GrassmannNumber, f: GrassmannNumber| Ok(Reduced { bosonic: b, fermionic: Some(f) });
    match spec.id {
        Id::ClassicalL2 | Id::ClassicalL3 => classical(translation_form(1.0, &f2)),
        Id::ClassicalL4 | Id::ClassicalDilation => classical(&dilation_bracket(&f, &f1, xi, e) * &f2),
        Id::ClassicalL5 => {
            let v = &(&(&f1 + &f2.scale(xi)) - &(&sq(&f1) * &f1).scale(2.0 * xi)) - &(&sq(&f1) * &f2).scale(4.0 * xi * xi);
            classical(v)
        }
        Id::ClassicalL6 => {
            let a = spec.a;
            let a2 = 1.0 + a * a;
            let terms = [
                (&(&f * &f1) * &f2).scale(-2.0 * a * a2),
                (&sq(&f1) * &f2).scale(a2 * a2),
                (&sq(&f) * &f2).scale(a * a),
                f2.scale(-a2),
                (&sq(&f1) * &f1).scale(-a * a2),
                (&f * &sq(&f1)).scale(1.0 + 2.0 * a * a),
                (&sq(&f) * &f1).scale(-a),
                f1.scale(2.0 * a),
                -&f,
            ];
            classical(terms.iter().fold(ctx.zero(), |acc, t| &acc + t))
        }
        Id::ClassicalL7 => {
            let mu2 = spec.mu * spec.mu;
            let terms = [
                f1.scale(mu2),
                f1.scale(2.0 * xi),
                (&sq(&f1) * &f1).scale(-4.0 * xi * xi),
                f2.scale(2.0 * xi * xi),
                (&sq(&f1) * &f2).scale(-8.0 * xi.powi(3)),
            ];
            classical(terms.iter().fold(ctx.zero(), |acc, t| &acc + t))
        }
        Id::ClassicalTranslation => {
            let kappa = spec.c / (m * m + n * n);
            let px = &f1.scale(n) + kappa * m;
            let py = &f1.scale(-m) + kappa * n;
            let coeff = &(&(&s(n * n) - &sq(&px).scale(e * n * n)) + &(&px * &py).scale(2.0 * m * n)) + &(&s(m * m) - &sq(&py).scale(e * m * m));
            classical(&coeff * &f2)
        }
        Id::L1 => {
            let k = dilation_bracket(&f, &f1, xi, e);
            let a = &f - &f1.scale(xi);
            let q = 1.0 + e * xi * xi;
            let lam = &(&(&l * &l1).scale(0.75 * e) - &(&l * &l2).scale(1.5 * e * xi)) + &(&l1 * &l2).scale(q);
            let bos = &(&k * &f2) + &(&a * &lam);
            let fer_terms = [
                &k * &l2,
                (&sq(&f1) * &l1).scale(xi * q),
                (&(&f * &f1) * &l1).scale(-e * (2.0 * xi * xi + e)),
                (&sq(&f) * &l1).scale(e * xi),
                l1.scale(-xi),
                (&sq(&f1) * &l).scale(-0.75 * e * xi * xi),
                (&(&f * &f1) * &l).scale(1.5 * e * xi),
                (&sq(&f) * &l).scale(-0.75 * e),
                l.scale(0.75),
            ];
            pair(bos, fer_terms.iter().fold(ctx.zero(), |acc, t| &acc + t))
        }
        Id::L2 | Id::L3 => pair(translation_form(1.0, &f2), translation_form(1.0, &l2)),
        Id::L4 => {
            let c = (m * m + e).powi(2);
            let form = |t: &GrassmannNumber| &t.scale(m * m + 1.0) - &(&sq(&f1) * t).scale(e * c);
            pair(form(&f2), form(&l2))
        }
        Id::L6 | Id::L7 => pair(translation_form(m * m, &f2), translation_form(m * m, &l2)),
        Id::L8 => {
            let b = l8_bracket(&f1, m, n, e);
            pair(&b * &f2, &b * &l2)
        }
        Id::ScriptL2 => {
            let bos = &(&(&(&f1 * &h2) * &l2).scale(-2.0 * e) - &(&(&f1 * &h1) * &h2).scale(2.0)) + &translation_form(1.0, &f2);
            pair(bos, &translation_form(1.0, &l2) + &h1)
        }
        Id::ScriptL3 => pair(&(&s(1.0) - &sq(&f1).scale(e)) * &f2, &translation_form(1.0, &l2) + &h2),
        Id::ScriptL4 => {
            let q = (1.0 + e * m * m).powi(2);
            let base = |t: &GrassmannNumber| &t.scale(1.0 + m * m) - &(&sq(&f1) * t).scale(e * q);
            let inner = &(&(&h1.scale(m) - &h2.scale(e)) * &l2) + &(&h2 * &h1);
            let bos = &base(&f2) + &(&f1 * &inner).scale(2.0);
            let c2 = &(&h2.scale(2.0) - &h1.scale(e * m)) + &h2.scale(e * m * m);
            let fer = &(&base(&l2) + &(&c2 * &sq(&f1)).scale(m)) + &(&h1 - &h2.scale(m));
            pair(bos, fer)
        }
        Id::ScriptL6 => {
            let bos = &(&translation_form(1.0, &f2) - &(&(&h1 * &h2) * &f1).scale(2.0 / (m * m))) - &(&(&h2 * &f1) * &l2).scale(2.0 * e / m);
            let fer = &(&translation_form(1.0, &l2) - &(&h2 * &f1).scale(2.0 / (m * m))) - &h1.scale(e / m.powi(3) * (1.0 - e * m * m));
            pair(bos, fer)
        }
        Id::ScriptL7 => {
            let bos = &(&translation_form(1.0, &f2) + &(&h1 * &l2).scale(2.0 / (m * m))) - &(&h1 * &h2).scale(2.0 * e / m.powi(3));
            let fer = &(&translation_form(1.0, &l2) - &(&h1 * &f1).scale(2.0 / (m * m))) - &h2.scale(e / m.powi(3) * (1.0 - e * m * m));
            pair(bos, fer)
        }
        Id::ScriptL8 => {
            let b = l8_bracket(&f1, m, n, e);
            let (n2, n3, n4) = (n * n, n.powi(3), n.powi(4));
            let one_m = &s(1.0) - &f1.scale(m);
            let c = &h1 - &h2.scale(e * m / n);
            let bos = &(&(&b * &f2) + &(&(&c * &one_m) * &l2).scale(2.0 / n2)) - &(&(&one_m * &h1) * &h2).scale(2.0 * e / n3);
            let k1 = &(&(&f1.scale(-2.0 * e * m * m / n4 - 2.0 / n2) + &sq(&f1).scale(2.0 * m / n2 + e * m.powi(3) / n4)) - m / n2) + e * m / n4;
            let k2 = &(&s(1.0 / n - e / n3) + &f1.scale(2.0 * e * m / n3)) - &sq(&f1).scale(e * m * m / n3);
            let fer = &(&(&b * &l2) + &(&k1 * &h1)) + &(&k2 * &h2);
            pair(bos, fer)
        }
        Id::ClassicalL1 | Id::L5 | Id::L9 | Id::L10 | Id::L11 | Id::L12 | Id::ScriptL5 => unreachable!("checked by reducible"),
    }
}

/// Factored form `(c − εF'²)·(second derivative)` for the rows that factor,
/// `None` otherwise. Compared with [`reduced_residual`] as a transcription
/// check.
pub fn factored_residual(spec: &SubalgebraSpec, rc: &ReducedCandidate, xi: f64) -> Result<Option<Reduced>> {
    spec.reducible()?;
    let c = match spec.id {
        Id::ClassicalL2 | Id::ClassicalL3 | Id::L2 | Id::L3 => 1.0,
        Id::L6 | Id::L7 => spec.m * spec.m,
        _ => return Ok(None),
    };
    let [_, f1, f2] = rc.f(xi)?;
    let [_, _, l2] = rc.lambda(xi)?;
    let k = &f1.context().scalar(c) - &(&f1 * &f1).scale(spec.eps.value());
    let fermionic = (!spec.id.is_classical()).then(|| &k * &l2);
    Ok(Some(Reduced { bosonic: &k * &f2, fermionic }))
}

/// `(full residual) = factor · (reduced residual)` for the lifted fields, as
/// `(bosonic factor, fermionic factor)`.
pub fn lift_factor(spec: &SubalgebraSpec, point: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = point;
    let m = spec.m;
    Ok(match spec.id {
        Id::ClassicalL4 | Id::ClassicalDilation => (1.0 / y, 0.0),
        Id::ClassicalL5 => (4.0, 0.0),
        Id::ClassicalL6 => (-1.0 / (x * x + y * y).sqrt(), 0.0),
        Id::ClassicalL7 => (2.0 / (x * x + y * y), 0.0),
        Id::L1 => (1.0 / y, 1.0 / y.sqrt()),
        Id::L6 | Id::L7 => (1.0 / m.powi(3), 1.0 / (m * m)),
        _ => (1.0, 1.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub row: String,
    /// Largest full-equation residual of the lifted fields.
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Largest `|full − factor·reduced|`, the transcription cross-check.
    pub max_consistency: f64,
    pub points: usize,
    pub excluded: usize,
}

/// Lifts `rc` and evaluates the full equations (classical, or the
/// `a = b = c = d = 0` component system) on the chart-admissible part of
/// `points`, together with the reduced residual at the projected ξ.
pub fn lift_verify(spec: &SubalgebraSpec, rc: &ReducedCandidate, points: &[(f64, f64)], cfg: &DiffConfig) -> Result<LiftReport> {
    let (phi, psi) = lift(spec, rc)?;
    let mut rep = LiftReport {
        row: spec.id.to_string(),
        max_residual: 0.0,
        mean_residual: 0.0,
        max_consistency: 0.0,
        points: 0,
        excluded: 0,
    };
    let mut sum = 0.0;
    for &pt in points {
        let g = match geometry(spec, pt.0, pt.1) {
            Ok(g) => g,
            Err(Error::Domain(_)) => {
                rep.excluded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let red = reduced_residual(spec, rc, g.xi.v)?;
        let (lb, lf) = lift_factor(spec, pt)?;
        let (res, cons) = if spec.id.is_classical() {
            let full = classical_residual(&ClassicalField::new(phi.clone())?, spec.eps, pt, cfg)?;
            let gap = (full - red.bosonic.body() * lb).norm();
            (full.norm(), gap)
        } else {
            let b = susy_special_bosonic(&phi, &psi, spec.eps, pt, cfg)?.value;
            let f = susy_special_fermionic(&phi, &psi, spec.eps, pt, cfg)?.value;
            let rf = red.fermionic.clone().expect("supersymmetric rows have two equations");
            let gap = (&b - &red.bosonic.scale(lb)).max_abs().max((&f - &rf.scale(lf)).max_abs());
            (b.max_abs().max(f.max_abs()), gap)
        };
        rep.max_residual = rep.max_residual.max(res);
        rep.max_consistency = rep.max_consistency.max(cons);
        sum += res;
        rep.points += 1;
    }
    if rep.points > 0 {
        rep.mean_residual = sum / rep.points as f64;
    }
    Ok(rep)
}

/// `(¾εΛΛ' − (3/2)εξΛΛ'' + (1+εξ²)Λ'Λ'')(F − ξF')`.
pub fn decoupling_condition(rc: &ReducedCandidate, xi: f64, eps: Epsilon) -> Result<GrassmannNumber> {
    let e = eps.value();
    let [f, f1, _] = rc.f(xi)?;
    let [l, l1, l2] = rc.lambda(xi)?;
    let lam = &(&(&l * &l1).scale(0.75 * e) - &(&l * &l2).scale(1.5 * e * xi)) + &(&l1 * &l2).scale(1.0 + e * xi * xi);
    lam.try_mul(&(&f - &f1.scale(xi)))
}

/// Non-splitting rows with a first-order equation in `ω = F'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaFamily {
    ScriptL2,
    ScriptL4,
    ScriptL6,
    ScriptL7,
}

impl OmegaFamily {
    pub fn row(self) -> SubalgebraId {
        match self {
            OmegaFamily::ScriptL2 => Id::ScriptL2,
            OmegaFamily::ScriptL4 => Id::ScriptL4,
            OmegaFamily::ScriptL6 => Id::ScriptL6,
            OmegaFamily::ScriptL7 => Id::ScriptL7,
        }
    }
}

/// The printed first-order equation, or the one obtained by eliminating
/// `Λ''` between the two reduced equations of the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaForm {
    Printed,
    Eliminated,
}

#[derive(Debug, Clone)]
pub struct OmegaParams {
    pub eps: Epsilon,
    pub m: f64,
    pub n: f64,
    pub eta1: GrassmannNumber,
    pub eta2: GrassmannNumber,
}

/// `[ω, ω']` at one value of the reduction variable.
pub type OmegaCandidate = Arc<dyn Fn(f64) -> Result<[GrassmannNumber; 2]> + Send + Sync>;

/// Left-hand side of the first-order ω-equation of `family` at `t`.
pub fn omega_residual(family: OmegaFamily, omega: &OmegaCandidate, t: f64, p: &OmegaParams, form: OmegaForm) -> Result<GrassmannNumber> {
    let [w, w1] = omega(t)?;
    omega_residual_at(family, &w, &w1, p, form)
}

/// [`omega_residual`] for given `ω` and `ω'`.
pub fn omega_residual_at(
    family: OmegaFamily,
    w: &GrassmannNumber,
    w1: &GrassmannNumber,
    p: &OmegaParams,
    form: OmegaForm,
) -> Result<GrassmannNumber> {
    if matches!(family, OmegaFamily::ScriptL4 | OmegaFamily::ScriptL6 | OmegaFamily::ScriptL7) && p.m == 0.0 {
        return Err(Error::ParamConstraint("m must be nonzero".into()));
    }
    let ctx = join_ctx(&join_ctx(w.context(), p.eta1.context())?, p.eta2.context())?;
    let (w, w1) = (w.in_context(&ctx)?, w1.in_context(&ctx)?);
    let (h1, h2) = (p.eta1.in_context(&ctx)?, p.eta2.in_context(&ctx)?);
    let (e, d, m) = (p.eps.value(), p.eps.delta(), p.m);
    let w2 = &w * &w;
    let w3 = &w2 * &w;
    let hh = &h1 * &h2;
    let one = ctx.one();
    let fc1 = &one - &w2.scale(e);
    match form {
        OmegaForm::Printed => Ok(match family {
            OmegaFamily::ScriptL2 => &(&(&(&fc1 * &fc1) * &w1) - &(&hh * &w3).scale(2.0)) + &(&w * &hh).scale(4.0 * d),
            OmegaFamily::ScriptL4 => {
                let (q1, q2) = (1.0 + m * m, (1.0 + e * m * m).powi(2));
                let terms = [
                    w1.scale(e * q1 * q1),
                    (&w2 * &w1).scale(-2.0 * q1 * q2),
                    (&(&w2 * &w2) * &w1).scale(e * q2 * q2),
                    (&hh * &w3).scale(2.0 * (1.0 - m * m)),
                    (&w * &hh).scale(-4.0 * d),
                ];
                terms.iter().fold(ctx.zero(), |acc, t| &acc + t)
            }
            OmegaFamily::ScriptL6 => {
                let a = &(&(&fc1 * &fc1) * &w1) + &(&hh * &w3).scale(2.0 * e / (m * m));
                &a + &(&hh * &w).scale(2.0 / m.powi(4) * (1.0 - 2.0 * m * m * d))
            }
            OmegaFamily::ScriptL7 => {
                let inner = &(&w2.scale(m * m) + e) - 2.0 * m * m * d;
                &(&(&fc1 * &fc1) * &w1) + &(&hh * &inner).scale(2.0 / m.powi(5))
            }
        }),
        OmegaForm::Eliminated => {
            let (fc, rest) = match family {
                OmegaFamily::ScriptL2 => (fc1.clone(), h1.clone()),
                OmegaFamily::ScriptL4 => {
                    let fc = &ctx.scalar(1.0 + m * m) - &w2.scale(e * (1.0 + e * m * m).powi(2));
                    let c2 = &(&h2.scale(2.0) - &h1.scale(e * m)) + &h2.scale(e * m * m);
                    (fc, &(&c2 * &w2).scale(m) + &(&h1 - &h2.scale(m)))
                }
                OmegaFamily::ScriptL6 => (fc1.clone(), &(&h2 * &w).scale(-2.0 / (m * m)) - &h1.scale(e / m.powi(3) * (1.0 - e * m * m))),
                OmegaFamily::ScriptL7 => (fc1.clone(), &(&h1 * &w).scale(-2.0 / (m * m)) - &h2.scale(e / m.powi(3) * (1.0 - e * m * m))),
            };
            let l2 = -&rest.try_mul(&fc.inverse()?)?;
            let bos = match family {
                OmegaFamily::ScriptL2 => {
                    &(&(&(&w * &h2) * &l2).scale(-2.0 * e) - &(&(&w * &h1) * &h2).scale(2.0)) + &(&fc1 * &w1)
                }
                OmegaFamily::ScriptL4 => {
                    let base = &w1.scale(1.0 + m * m) - &(&w2 * &w1).scale(e * (1.0 + e * m * m).powi(2));
                    let inner = &(&(&h1.scale(m) - &h2.scale(e)) * &l2) + &(&h2 * &h1);
                    &base + &(&w * &inner).scale(2.0)
                }
                OmegaFamily::ScriptL6 => {
                    &(&(&fc1 * &w1) - &(&hh * &w).scale(2.0 / (m * m))) - &(&(&h2 * &w) * &l2).scale(2.0 * e / m)
                }
                OmegaFamily::ScriptL7 => &(&(&fc1 * &w1) + &(&h1 * &l2).scale(2.0 / (m * m))) - &hh.scale(2.0 * e / m.powi(3)),
            };
            let norm = if family == OmegaFamily::ScriptL4 { e } else { 1.0 };
            Ok((&bos * &fc).scale(norm))
        }
    }
}

/// Combined equation of the three-parameter non-splitting row, in `F'` and
/// `F''`. The eliminated form is scaled by `n⁸` to match the printed one.
pub fn combined_residual_l8(f: &Jet1, p: &OmegaParams, form: OmegaForm) -> Result<GrassmannNumber> {
    let (m, n) = (p.m, p.n);
    if m == 0.0 || n == 0.0 {
        return Err(Error::ParamConstraint("m and n must be nonzero".into()));
    }
    let ctx = join_ctx(&join_ctx(f[1].context(), p.eta1.context())?, p.eta2.context())?;
    let (w, w1) = (f[1].in_context(&ctx)?, f[2].in_context(&ctx)?);
    let (h1, h2) = (p.eta1.in_context(&ctx)?, p.eta2.in_context(&ctx)?);
    let (e, d) = (p.eps.value(), p.eps.delta());
    let hh = &h1 * &h2;
    let pw = |k: i32| (0..k).fold(ctx.one(), |acc, _| &acc * &w);
    match form {
        OmegaForm::Printed => {
            let (m2, n2) = (m * m, n * n);
            let (n4, m4) = (n2 * n2, m2 * m2);
            let c4 = (m2 + e * n2).powi(4);
            let c3 = -4.0 * e * m * (n2 + e * m2).powi(3);
            let c2 = 6.0 * m2 * (m2 + e * n2).powi(2) - 2.0 * e * n2 * (n4 + e * m4) * (n2 + e * m2) - 4.0 * m2 * n4 * (n2 + m2) * d;
            let c1 = 4.0 * m * (n2 * (n4 + e * m4) - e * m2 * (n2 + e * m2) + 2.0 * m2 * n4 * d);
            let c0 = (m2 * (1.0 - e * n2) - e * n4).powi(2);
            let poly = [c0, c1, c2, c3, c4].iter().enumerate().fold(ctx.zero(), |acc, (k, c)| &acc + &pw(k as i32).scale(*c));
            let n3 = n.powi(3);
            let n5 = n.powi(5);
            let e3 = -2.0 * e * m * n3 * (m2 + e * n2);
            let e2 = 2.0 * n3 * (n2 + 3.0 * e * m2);
            let e1 = 4.0 * m * n5 * d - 6.0 * e * m * n3;
            let e0 = 2.0 * e * n3 - 4.0 * n5 * d;
            let eta_poly = [e0, e1, e2, e3].iter().enumerate().fold(ctx.zero(), |acc, (k, c)| &acc + &pw(k as i32).scale(*c));
            Ok(&(&poly * &w1) + &(&eta_poly * &hh))
        }
        OmegaForm::Eliminated => {
            let b = l8_bracket(&w, m, n, e);
            let (n2, n3, n4) = (n * n, n.powi(3), n.powi(4));
            let k1 = &(&(&w.scale(-2.0 * e * m * m / n4 - 2.0 / n2) + &(&w * &w).scale(2.0 * m / n2 + e * m.powi(3) / n4)) - m / n2) + e * m / n4;
            let k2 = &(&ctx.scalar(1.0 / n - e / n3) + &w.scale(2.0 * e * m / n3)) - &(&w * &w).scale(e * m * m / n3);
            let rest = &(&k1 * &h1) + &(&k2 * &h2);
            let l2 = -&rest.try_mul(&b.inverse()?)?;
            let one_m = &ctx.one() - &w.scale(m);
            let c = &h1 - &h2.scale(e * m / n);
            let bos = &(&(&b * &w1) + &(&(&c * &one_m) * &l2).scale(2.0 / n2)) - &(&(&one_m * &h1) * &h2).scale(2.0 * e / n3);
            Ok((&bos * &b).scale(n.powi(8)))
        }
    }
}

/// The two slopes `F' = (m ± n√(ε(m²+n²)))/(m² + εn²)` that make the
/// bracket of the three-parameter row vanish.
pub fn l8_slopes(m: f64, n: f64, eps: Epsilon) -> Result<[crate::Complex; 2]> {
    let e = eps.value();
    let den = m * m + e * n * n;
    if den == 0.0 {
        return Err(Error::ParamConstraint("m² + εn² must be nonzero".into()));
    }
    let root = crate::Complex::new(e * (m * m + n * n), 0.0).sqrt() * n;
    Ok([(root + m) / den, (-root + m) / den])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superfield::superspace;

    fn ctx() -> Arc<GeneratorSet> {
        superspace(&["eta1", "eta2", "E1", "E2"]).unwrap()
    }

    #[test]
    fn ids_parse() {
        assert_eq!("L4,m".parse::<SubalgebraId>().unwrap(), Id::L4);
        assert_eq!("script-L6,m".parse::<SubalgebraId>().unwrap(), Id::ScriptL6);
        assert_eq!("L8".parse::<SubalgebraId>().unwrap(), Id::L8);
        assert!("L13".parse::<SubalgebraId>().is_err());
        for id in Id::ALL {
            assert_eq!(id.name().parse::<SubalgebraId>().unwrap(), id);
        }
    }

    #[test]
    fn symmetry_variable_examples() {
        let g = ctx();
        let l1 = SubalgebraSpec::new(Id::L1, Epsilon::Plus, &g);
        assert_eq!(symmetry_variable(&l1, (2.0, 1.0)).unwrap(), 2.0);
        let l4 = SubalgebraSpec::new(Id::L4, Epsilon::Plus, &g).with_m(3.0);
        assert_eq!(symmetry_variable(&l4, (1.0, 5.0)).unwrap(), 2.0);
        let l5 = SubalgebraSpec::new(Id::ClassicalL5, Epsilon::Plus, &g);
        assert_eq!(symmetry_variable(&l5, (3.0, 4.0)).unwrap(), 25.0);
        assert!(matches!(symmetry_variable(&l1, (2.0, 0.0)), Err(Error::Domain(_))));
        let bad = SubalgebraSpec::new(Id::ClassicalL5, Epsilon::Minus, &g);
        assert!(matches!(symmetry_variable(&bad, (1.0, 1.0)), Err(Error::ParamConstraint(_))));
        let none = SubalgebraSpec::new(Id::L9, Epsilon::Plus, &g);
        assert!(matches!(symmetry_variable(&none, (1.0, 1.0)), Err(Error::NotReducible(_))));
    }

    #[test]
    fn lift_examples() {
        let g = ctx();
        let rc = ReducedCandidate::classical("xi", &g, profile_polynomial(vec![g.zero(), g.one()]));
        let (phi, psi) = lift(&SubalgebraSpec::new(Id::L1, Epsilon::Plus, &g), &rc).unwrap();
        assert!(phi.eval(0.7, 1.3).unwrap().approx_eq(&g.scalar(0.7), 1e-15));
        assert!(psi.eval(0.7, 1.3).unwrap().is_zero());

        let (e1, e2) = (g.generator(1), g.generator(2));
        let spec = SubalgebraSpec::new(Id::ScriptL2, Epsilon::Plus, &g).with_etas(e1.clone(), e2.clone());
        let zero = ReducedCandidate::classical("0", &g, profile_zero(&g));
        let (_, psi) = lift(&spec, &zero).unwrap();
        let want = &e1.scale(0.5 * 0.4 * 0.4) + &e2.scale(0.4 * 0.9);
        assert!(psi.eval(0.4, 0.9).unwrap().approx_eq(&want, 1e-15));

        let spec = SubalgebraSpec::new(Id::L8, Epsilon::Plus, &g).with_m(2.0).with_n(4.0);
        let (phi, _) = lift(&spec, &zero).unwrap();
        assert!(phi.eval(0.4, 0.9).unwrap().approx_eq(&g.scalar(0.9 / 4.0), 1e-15));
    }

    #[test]
    fn decoupling_examples() {
        let g = ctx();
        let e1 = g.generator(3);
        let sin = profile_exact({
            let g = g.clone();
            move |x| Ok([g.scalar(x.sin()), g.scalar(x.cos()), g.scalar(-x.sin())])
        });
        let single = ReducedCandidate::new("E1 sin", &g, sin.clone(), profile_times(e1.clone(), sin.clone()));
        assert!(decoupling_condition(&single, 0.7, Epsilon::Plus).unwrap().is_zero());
        let lin = ReducedCandidate::new("xi", &g, profile_polynomial(vec![g.zero(), g.one()]), profile_times(e1.clone(), sin.clone()));
        assert!(decoupling_condition(&lin, 0.7, Epsilon::Minus).unwrap().is_zero());
        let exp = profile_exact({
            let g = g.clone();
            move |x| Ok([g.scalar(x.exp()), g.scalar(x.exp()), g.scalar(x.exp())])
        });
        let two = {
            let (a, b) = (profile_times(g.generator(3), sin.clone()), profile_times(g.generator(4), exp));
            let lam: Profile = Arc::new(move |x| {
                let (p, q) = (a(x)?, b(x)?);
                Ok([&p[0] + &q[0], &p[1] + &q[1], &p[2] + &q[2]])
            });
            ReducedCandidate::new("two", &g, sin, lam)
        };
        assert!(decoupling_condition(&two, 0.7, Epsilon::Plus).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn l8_slope_kills_bracket() {
        let g = ctx();
        for eps in Epsilon::both() {
            for s in l8_slopes(1.5, 0.7, eps).unwrap() {
                let w = g.scalar(s);
                let b = l8_bracket(&w, 1.5, 0.7, eps.value());
                assert!(b.max_abs() < 1e-12, "{b}");
            }
        }
    }
}
