//! The web of equivalent descriptions of planar Born-Infeld dynamics:
//! Riemann invariants, the hyperbolic Monge-Ampère equation with its Bianchi
//! and inverse relations, the half-Legendre transform to the wave equation
//! and the Chaplygin gas.
//!
//! Fields are real-valued [`FieldCandidate`]s whose second coordinate is the
//! time `t` (or `y` for the half-Legendre plane). Every map is checked as a
//! residual at a point, and derived fields are built as closures over the
//! source field so that registered closed forms are differenced only once.

use std::sync::Arc;

use crate::calculus::{partial, DiffConfig, FieldCandidate};
use crate::grassmann::{GeneratorSet, GrassmannNumber};
use crate::{Complex, Error, Result};

/// Imaginary or nilpotent content above this (relative) level makes a value
/// non-real.
const REAL_TOL: f64 = 1e-10;

fn real(v: &GrassmannNumber) -> Result<f64> {
    let b = v.body();
    let scale = 1.0 + b.re.abs();
    if b.im.abs() > REAL_TOL * scale || v.soul().max_abs() > REAL_TOL * scale {
        return Err(Error::Domain(format!("field value {v} is not real")));
    }
    Ok(b.re)
}

fn d(f: &FieldCandidate, point: (f64, f64), idx: (u8, u8), cfg: &DiffConfig) -> Result<f64> {
    real(&partial(f, point, idx, cfg)?.value)
}

/// Real field from a closure.
pub fn real_field<F>(label: impl Into<String>, ctx: &Arc<GeneratorSet>, f: F) -> FieldCandidate
where
    F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
{
    let c = ctx.clone();
    FieldCandidate::new(label, ctx, move |x, y| Ok(c.scalar(f(x, y)?)))
}

/// Real field with closed-form derivatives, given as `(index, function)`.
pub fn real_field_with<F>(
    label: impl Into<String>,
    ctx: &Arc<GeneratorSet>,
    f: F,
    derivs: Vec<((u8, u8), Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>)>,
) -> FieldCandidate
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    let mut out = real_field(label, ctx, move |x, y| Ok(f(x, y)));
    for (idx, g) in derivs {
        let c = ctx.clone();
        out = out.with_derivative(idx, move |x, y| Ok(c.scalar(g(x, y))));
    }
    out
}

type RealFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Context with no odd generators, for purely real fields.
pub fn real_context() -> Arc<GeneratorSet> {
    GeneratorSet::new::<&str>(&[]).expect("the empty context is valid")
}

/// `φ = A sin(k(x − ct))` with `c = ±1`, a Born-Infeld travelling wave, with
/// every derivative up to third order registered.
pub fn travelling_wave(amp: f64, k: f64, c: f64) -> FieldCandidate {
    let g = move |n: i32| -> RealFn {
        Arc::new(move |x: f64, t: f64| {
            let a = k * (x - c * t);
            let v = [a.sin(), a.cos(), -a.sin(), -a.cos()][n.rem_euclid(4) as usize];
            amp * k.powi(n) * v
        })
    };
    let dv = |i: u8, j: u8| -> ((u8, u8), RealFn) {
        let base = g((i + j) as i32);
        let s = (-c).powi(j as i32);
        ((i, j), Arc::new(move |x, t| s * base(x, t)))
    };
    let f0 = g(0);
    real_field_with(
        format!("{amp} sin({k}(x - {c} t))"),
        &real_context(),
        move |x, t| f0(x, t),
        vec![dv(1, 0), dv(0, 1), dv(2, 0), dv(1, 1), dv(0, 2), dv(3, 0), dv(2, 1), dv(1, 2), dv(0, 3)],
    )
}

/// `u = x²/(2s) − αt³/6 − βt²/2` with `s = αt + β`, a Monge-Ampère solution
/// whose Riemann pair depends on both variables. `α = 0, β = 1` gives
/// `(x² − t²)/2`.
pub fn monge_ampere_family(al: f64, be: f64) -> FieldCandidate {
    let s = move |t: f64| al * t + be;
    let v: Vec<((u8, u8), RealFn)> = vec![
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
        format!("monge-ampere alpha={al} beta={be}"),
        &real_context(),
        move |x, t| x * x / (2.0 * s(t)) - al * t.powi(3) / 6.0 - be * t * t / 2.0,
        v,
    )
}

/// `(1+φx²)φtt − 2φxφtφxt − (1−φt²)φxx`.
pub fn born_infeld_residual(phi: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<f64> {
    let g = |idx| d(phi, point, idx, cfg);
    let (px, pt, pxx, pxt, ptt) = (g((1, 0))?, g((0, 1))?, g((2, 0))?, g((1, 1))?, g((0, 2))?);
    Ok((1.0 + px * px) * ptt - 2.0 * px * pt * pxt - (1.0 - pt * pt) * pxx)
}

/// Pair of Riemann invariants as fields over `(x, t)`.
#[derive(Clone, Debug)]
pub struct RiemannPair {
    pub plus: FieldCandidate,
    pub minus: FieldCandidate,
}

impl RiemannPair {
    pub fn at(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        Ok((real(&self.plus.eval(point.0, point.1)?)?, real(&self.minus.eval(point.0, point.1)?)?))
    }
}

/// `R± = ±√(1+φx²−φt²)/(1+φx²) + φxφt/(1+φx²)` from first derivatives.
pub fn riemann_from_gradient(px: f64, pt: f64) -> Result<(f64, f64)> {
    let rad = 1.0 + px * px - pt * pt;
    if rad < 0.0 {
        return Err(Error::Domain(format!("1 + φx² − φt² = {rad} is negative")));
    }
    let (q, m) = (1.0 + px * px, px * pt);
    Ok(((rad.sqrt() + m) / q, (m - rad.sqrt()) / q))
}

/// Riemann invariants of `φ` at a point.
pub fn riemann_from_phi(phi: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<(f64, f64)> {
    riemann_from_gradient(d(phi, point, (1, 0), cfg)?, d(phi, point, (0, 1), cfg)?)
}

/// Riemann invariants of `φ` as fields.
pub fn riemann_pair_from_phi(phi: &FieldCandidate, cfg: &DiffConfig) -> RiemannPair {
    let mk = |plus: bool| {
        let ctx = phi.context().clone();
        let (phi, cfg) = (phi.clone(), *cfg);
        real_field(if plus { "R+" } else { "R-" }, &ctx, move |x, t| {
            let r = riemann_from_phi(&phi, (x, t), &cfg)?;
            Ok(if plus { r.0 } else { r.1 })
        })
    };
    RiemannPair { plus: mk(true), minus: mk(false) }
}

/// `(R⁺t − R⁻R⁺x, R⁻t − R⁺R⁻x)`.
pub fn riemann_residual(pair: &RiemannPair, point: (f64, f64), cfg: &DiffConfig) -> Result<(f64, f64)> {
    let (rp, rm) = pair.at(point)?;
    let (p, m) = (&pair.plus, &pair.minus);
    Ok((
        d(p, point, (0, 1), cfg)? - rm * d(p, point, (1, 0), cfg)?,
        d(m, point, (0, 1), cfg)? - rp * d(m, point, (1, 0), cfg)?,
    ))
}

/// `uxx·utt − uxt² + 1`.
pub fn monge_ampere_residual(u: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<f64> {
    let [uxx, uxt, utt] = hessian(u, point, cfg)?;
    Ok(uxx * utt - uxt * uxt + 1.0)
}

/// `[uxx, uxt, utt]` at a point.
pub fn hessian(u: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<[f64; 3]> {
    Ok([d(u, point, (2, 0), cfg)?, d(u, point, (1, 1), cfg)?, d(u, point, (0, 2), cfg)?])
}

/// `R± = (uxt ± 1)/uxx`.
pub fn riemann_from_hessian(uxx: f64, uxt: f64) -> Result<(f64, f64)> {
    if uxx == 0.0 {
        return Err(Error::Domain("uxx vanishes".into()));
    }
    Ok(((uxt + 1.0) / uxx, (uxt - 1.0) / uxx))
}

/// `[uxx, uxt, utt] = [2, R⁺+R⁻, 2R⁺R⁻]/(R⁺−R⁻)`.
pub fn hessian_from_riemann(rp: f64, rm: f64) -> Result<[f64; 3]> {
    let gap = rp - rm;
    if gap == 0.0 {
        return Err(Error::Domain(format!("R+ = R- = {rp}")));
    }
    Ok([2.0 / gap, (rp + rm) / gap, 2.0 * rp * rm / gap])
}

/// Riemann invariants of a Monge-Ampère potential as fields.
pub fn riemann_pair_from_potential(u: &FieldCandidate, cfg: &DiffConfig) -> RiemannPair {
    let mk = |plus: bool| {
        let ctx = u.context().clone();
        let (u, cfg) = (u.clone(), *cfg);
        real_field(if plus { "R+" } else { "R-" }, &ctx, move |x, t| {
            let [uxx, uxt, _] = hessian(&u, (x, t), &cfg)?;
            let r = riemann_from_hessian(uxx, uxt)?;
            Ok(if plus { r.0 } else { r.1 })
        })
    };
    RiemannPair { plus: mk(true), minus: mk(false) }
}

/// Forward and inverse passes between a potential and its Riemann pair.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RoundTrip {
    pub hessian: [f64; 3],
    pub riemann: (f64, f64),
    pub recovered: [f64; 3],
    /// Largest component of `recovered − hessian`, absolute.
    pub roundtrip_error: f64,
    pub monge_ampere: f64,
    pub riemann_residual: (f64, f64),
}

pub fn ma_riemann_roundtrip(u: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<RoundTrip> {
    let h = hessian(u, point, cfg)?;
    let riemann = riemann_from_hessian(h[0], h[1])?;
    let recovered = hessian_from_riemann(riemann.0, riemann.1)?;
    let roundtrip_error = h.iter().zip(&recovered).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(RoundTrip {
        hessian: h,
        riemann,
        recovered,
        roundtrip_error,
        monge_ampere: monge_ampere_residual(u, point, cfg)?,
        riemann_residual: riemann_residual(&riemann_pair_from_potential(u, cfg), point, cfg)?,
    })
}

/// Second derivatives of the Monge-Ampère potential attached to a
/// Born-Infeld field, `[uxx, uxt, utt]`. The expression `(φx²+1)/√(1−φt²+φx²)`
/// fills the `uxx` slot, which agrees with `uxx = 2/(R⁺−R⁻)`. The competing
/// reading that assigns it to `utt` a second time is measured by
/// [`BianchiReport::duplicate_utt_conflict`].
pub fn bianchi_hessian(px: f64, pt: f64) -> Result<[f64; 3]> {
    let rad = 1.0 - pt * pt + px * px;
    if rad <= 0.0 {
        return Err(Error::Domain(format!("1 − φt² + φx² = {rad} is not positive")));
    }
    let s = rad.sqrt();
    Ok([(px * px + 1.0) / s, px * pt / s, (pt * pt - 1.0) / s])
}

/// Both readings of the Bianchi display at a point.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BianchiReport {
    /// `[uxx, uxt, utt]` with the third slot read as `uxx`.
    pub hessian: [f64; 3],
    /// Monge-Ampère residual of that triple.
    pub monge_ampere: f64,
    /// Integrability `((uxx)t − (uxt)x, (uxt)t − (utt)x)` of the triple,
    /// which vanishes only on Born-Infeld solutions.
    pub integrability: (f64, f64),
    /// Largest gap between the Riemann pair of the triple and that of `φ`.
    pub riemann_gap: f64,
    /// Gap between the two `utt` values when the third expression is also
    /// read as `utt`.
    pub duplicate_utt_conflict: f64,
}

pub fn bianchi_check(phi: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<BianchiReport> {
    let (px, pt) = (d(phi, point, (1, 0), cfg)?, d(phi, point, (0, 1), cfg)?);
    let h = bianchi_hessian(px, pt)?;
    let slot = |k: usize| {
        let ctx = phi.context().clone();
        let (phi, cfg) = (phi.clone(), *cfg);
        real_field(format!("bianchi{k}"), &ctx, move |x, t| {
            let g = |idx| d(&phi, (x, t), idx, &cfg);
            Ok(bianchi_hessian(g((1, 0))?, g((0, 1))?)?[k])
        })
    };
    let (uxx, uxt, utt) = (slot(0), slot(1), slot(2));
    let integrability = (
        d(&uxx, point, (0, 1), cfg)? - d(&uxt, point, (1, 0), cfg)?,
        d(&uxt, point, (0, 1), cfg)? - d(&utt, point, (1, 0), cfg)?,
    );
    let from_h = riemann_from_hessian(h[0], h[1])?;
    let from_phi = riemann_from_gradient(px, pt)?;
    let s = (1.0 - pt * pt + px * px).sqrt();
    Ok(BianchiReport {
        hessian: h,
        monge_ampere: h[0] * h[2] - h[1] * h[1] + 1.0,
        integrability,
        riemann_gap: (from_h.0 - from_phi.0).abs().max((from_h.1 - from_phi.1).abs()),
        duplicate_utt_conflict: (pt * pt - 1.0) / s - (px * px + 1.0) / s,
    })
}

/// Half-Legendre transform `ũ(z, y) = u − s·us` with `z = us(s, y)`, built
/// over a patch `s ∈ [s0, s1]` on which `uss` keeps one sign.
#[derive(Clone)]
pub struct HalfLegendre {
    u: FieldCandidate,
    s_range: (f64, f64),
    cfg: DiffConfig,
}

impl HalfLegendre {
    /// Samples `uss` on a grid over the patch and refuses it when the sign
    /// changes or the value vanishes.
    pub fn new(u: FieldCandidate, s_range: (f64, f64), y_range: (f64, f64), cfg: DiffConfig) -> Result<Self> {
        if !(s_range.0 < s_range.1) {
            return Err(Error::Config(format!("empty s-range {s_range:?}")));
        }
        let n = 16;
        let mut sign = 0.0;
        for i in 0..=n {
            for j in 0..=n / 2 {
                let s = s_range.0 + (s_range.1 - s_range.0) * i as f64 / n as f64;
                let y = y_range.0 + (y_range.1 - y_range.0) * j as f64 / (n / 2) as f64;
                let uss = d(&u, (s, y), (2, 0), &cfg)?;
                if uss.abs() < 1e-12 || (sign != 0.0 && uss.signum() != sign) {
                    return Err(Error::Invertibility(format!("uss = {uss} at ({s}, {y}); z = us is not monotone")));
                }
                sign = uss.signum();
            }
        }
        Ok(Self { u, s_range, cfg })
    }

    /// Solves `us(s, y) = z` for `s` by Newton steps kept inside a shrinking
    /// bracket, bisecting whenever a step would leave it.
    pub fn invert(&self, z: f64, y: f64) -> Result<f64> {
        let g = |s: f64| -> Result<f64> { Ok(d(&self.u, (s, y), (1, 0), &self.cfg)? - z) };
        let (mut a, mut b) = self.s_range;
        let (ga, gb) = (g(a)?, g(b)?);
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        if ga.signum() == gb.signum() {
            return Err(Error::Invertibility(format!("z = {z} lies outside us([{a}, {b}], {y})")));
        }
        let rising = gb > 0.0;
        let mut s = 0.5 * (a + b);
        for _ in 0..200 {
            let gs = g(s)?;
            if gs == 0.0 {
                return Ok(s);
            }
            if (gs > 0.0) == rising {
                b = s;
            } else {
                a = s;
            }
            let slope = d(&self.u, (s, y), (2, 0), &self.cfg)?;
            let newton = s - gs / slope;
            let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - s).abs() <= 1e-15 * (1.0 + s.abs()) || b - a <= 1e-15 * (1.0 + s.abs()) {
                return Ok(next);
            }
            s = next;
        }
        Err(Error::Invertibility(format!("inversion of us = {z} at y = {y} did not converge")))
    }

    pub fn transform(&self, z: f64, y: f64) -> Result<f64> {
        let s = self.invert(z, y)?;
        let u = real(&self.u.eval(s, y)?)?;
        Ok(u - s * d(&self.u, (s, y), (1, 0), &self.cfg)?)
    }

    /// `ũ` as a field over `(z, y)`, with no registered derivatives.
    pub fn field(&self) -> FieldCandidate {
        let me = self.clone();
        real_field(format!("legendre({})", self.u.label()), self.u.context(), move |z, y| me.transform(z, y))
    }

    /// `ũyy − ũzz` at `(z, y)`.
    pub fn wave_residual(&self, point: (f64, f64)) -> Result<f64> {
        let f = self.field();
        Ok(d(&f, point, (0, 2), &self.cfg)? - d(&f, point, (2, 0), &self.cfg)?)
    }
}

/// `(Ut − ½(U² − V⁻²)x, Vt − (UV)x)`.
pub fn chaplygin_residual(u: &FieldCandidate, v: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<(f64, f64)> {
    let uu = real(&u.eval(point.0, point.1)?)?;
    let vv = real(&v.eval(point.0, point.1)?)?;
    if vv == 0.0 {
        return Err(Error::Domain("V vanishes".into()));
    }
    let (ux, ut) = (d(u, point, (1, 0), cfg)?, d(u, point, (0, 1), cfg)?);
    let (vx, vt) = (d(v, point, (1, 0), cfg)?, d(v, point, (0, 1), cfg)?);
    Ok((ut - uu * ux - vx / vv.powi(3), vt - ux * vv - uu * vx))
}

/// Chaplygin fields `U = uxt/uxx`, `V = uxx` of a potential.
pub fn chaplygin_from_potential(u: &FieldCandidate, cfg: &DiffConfig) -> (FieldCandidate, FieldCandidate) {
    let mk = |which: usize| {
        let ctx = u.context().clone();
        let (u, cfg) = (u.clone(), *cfg);
        real_field(if which == 0 { "U" } else { "V" }, &ctx, move |x, t| {
            let [uxx, uxt, _] = hessian(&u, (x, t), &cfg)?;
            if uxx == 0.0 {
                return Err(Error::Domain("uxx vanishes".into()));
            }
            Ok(if which == 0 { uxt / uxx } else { uxx })
        })
    };
    (mk(0), mk(1))
}

/// Chaplygin fields `U = (R⁺+R⁻)/2`, `V = 2/(R⁺−R⁻)` of a Riemann pair.
pub fn chaplygin_from_riemann(pair: &RiemannPair) -> (FieldCandidate, FieldCandidate) {
    let mk = |which: usize| {
        let ctx = pair.plus.context().clone();
        let pair = pair.clone();
        real_field(if which == 0 { "U" } else { "V" }, &ctx, move |x, t| {
            let (rp, rm) = pair.at((x, t))?;
            if rp == rm {
                return Err(Error::Domain(format!("R+ = R- = {rp}")));
            }
            Ok(if which == 0 { 0.5 * (rp + rm) } else { 2.0 / (rp - rm) })
        })
    };
    (mk(0), mk(1))
}

/// Riemann pair `R± = U ± 1/V`.
pub fn riemann_from_chaplygin(u: &FieldCandidate, v: &FieldCandidate) -> RiemannPair {
    let mk = |sign: f64| {
        let ctx = u.context().clone();
        let (u, v) = (u.clone(), v.clone());
        real_field(if sign > 0.0 { "R+" } else { "R-" }, &ctx, move |x, t| {
            let (uu, vv) = (real(&u.eval(x, t)?)?, real(&v.eval(x, t)?)?);
            if vv == 0.0 {
                return Err(Error::Domain("V vanishes".into()));
            }
            Ok(uu + sign / vv)
        })
    };
    RiemannPair { plus: mk(1.0), minus: mk(-1.0) }
}

/// Chaplygin audit of a Monge-Ampère potential.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ChaplyginReport {
    pub u: f64,
    pub v: f64,
    pub conservation: (f64, f64),
    /// Riemann residual of `R± = U ± 1/V`.
    pub riemann: (f64, f64),
    /// `utt − (U²V − 1/V)`.
    pub utt_relation: f64,
}

pub fn chaplygin_check(u: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<ChaplyginReport> {
    let (uf, vf) = chaplygin_from_potential(u, cfg);
    let (uu, vv) = (real(&uf.eval(point.0, point.1)?)?, real(&vf.eval(point.0, point.1)?)?);
    let utt = d(u, point, (0, 2), cfg)?;
    Ok(ChaplyginReport {
        u: uu,
        v: vv,
        conservation: chaplygin_residual(&uf, &vf, point, cfg)?,
        riemann: riemann_residual(&riemann_from_chaplygin(&uf, &vf), point, cfg)?,
        utt_relation: utt - (uu * uu * vv - 1.0 / vv),
    })
}

/// Second-order Taylor data of a field at a point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TaylorData {
    pub px: f64,
    pub pt: f64,
    pub pxx: f64,
    pub pxt: f64,
    pub ptt: f64,
}

/// Terms of `(1+φy²)φxx − 2φxφyφxy + (1+φx²)φyy`, expanded.
pub const MINIMAL_SURFACE_TERMS: [&str; 5] = ["φxx", "φy²φxx", "−2φxφyφxy", "φyy", "φx²φyy"];
/// Terms of `(1+φx²)φtt − 2φxφtφxt − (1−φt²)φxx`, expanded.
pub const BORN_INFELD_TERMS: [&str; 5] = ["φtt", "φx²φtt", "−2φxφtφxt", "−φxx", "φt²φxx"];
/// `(minimal-surface term, Born-Infeld term, sign)` under `y = it`.
pub const WICK_SIGN_MAP: [(usize, usize, f64); 5] = [(0, 3, -1.0), (1, 4, -1.0), (2, 2, -1.0), (3, 0, -1.0), (4, 1, -1.0)];

fn minimal_surface_terms(px: Complex, py: Complex, pxx: Complex, pxy: Complex, pyy: Complex) -> [Complex; 5] {
    [pxx, py * py * pxx, -2.0 * px * py * pxy, pyy, px * px * pyy]
}

fn born_infeld_terms(j: &TaylorData) -> [f64; 5] {
    [j.ptt, j.px * j.px * j.ptt, -2.0 * j.px * j.pt * j.pxt, -j.pxx, j.pt * j.pt * j.pxx]
}

/// Wick rotation applied to Taylor data.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WickAudit {
    /// Largest `|T_ms − sign·T_bi|` over the term map.
    pub term_defect: f64,
    pub minimal_surface: (f64, f64),
    pub born_infeld: f64,
}

/// Substitutes `φy = −iφt`, `φxy = −iφxt`, `φyy = −φtt` into the
/// minimal-surface operator and compares it term by term with Born-Infeld.
pub fn wick_audit(j: &TaylorData) -> WickAudit {
    let i = Complex::new(0.0, 1.0);
    let r = |v: f64| Complex::new(v, 0.0);
    let ms = minimal_surface_terms(r(j.px), -i * j.pt, r(j.pxx), -i * j.pxt, r(-j.ptt));
    let bi = born_infeld_terms(j);
    let term_defect = WICK_SIGN_MAP.iter().map(|&(m, b, s)| (ms[m] - s * bi[b]).norm()).fold(0.0, f64::max);
    let total: Complex = ms.iter().sum();
    WickAudit { term_defect, minimal_surface: (total.re, total.im), born_infeld: bi.iter().sum() }
}

/// Taylor data of a field at a point.
pub fn taylor_data(phi: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<TaylorData> {
    let g = |idx| d(phi, point, idx, cfg);
    Ok(TaylorData { px: g((1, 0))?, pt: g((0, 1))?, pxx: g((2, 0))?, pxt: g((1, 1))?, ptt: g((0, 2))? })
}
