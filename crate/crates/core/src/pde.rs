//! Residuals of the classical flow equation and of the two component
//! equations of its supersymmetric extension.
//!
//! The component equations are stored as term tables: each [`Term`] holds a
//! numeric coefficient, a power of ε, one of the couplings `a, b, c, d` and the
//! ordered list of field derivatives it multiplies. Products are taken left to
//! right in the listed order, which matters once two odd factors appear.
//! The `a = b = c = d = 0` system is additionally written out by hand in
//! [`susy_special_bosonic`] and [`susy_special_fermionic`] so it can be
//! cross-checked against the tables.

use serde::Serialize;

use crate::calculus::{partial, DiffConfig, FieldCandidate, MultiIndex};
use crate::error::{Error, Result};
use crate::grassmann::{Complex, GrassmannNumber, Parity};
use crate::superfield::{Epsilon, SusyParams};

/// Which component a factor differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comp {
    Phi,
    Psi,
}

/// Coupling multiplying a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coupling {
    One,
    A,
    B,
    C,
    D,
}

impl Coupling {
    fn value(self, p: &SusyParams) -> f64 {
        match self {
            Coupling::One => 1.0,
            Coupling::A => p.a,
            Coupling::B => p.b,
            Coupling::C => p.c,
            Coupling::D => p.d,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Term {
    pub coeff: f64,
    pub eps_power: u8,
    pub coupling: Coupling,
    pub factors: &'static [(Comp, MultiIndex)],
}

impl Term {
    pub fn weight(&self, p: &SusyParams) -> f64 {
        self.coeff * p.eps.value().powi(self.eps_power as i32) * self.coupling.value(p)
    }
}

const fn t(coeff: f64, eps_power: u8, coupling: Coupling, factors: &'static [(Comp, MultiIndex)]) -> Term {
    Term { coeff, eps_power, coupling, factors }
}

use Comp::{Phi as F, Psi as S};
use Coupling::{One, A, B, C, D};

/// θ-coefficient equation, printed order.
pub const BOSONIC_TERMS: &[Term] = &[
    t(1.0, 0, One, &[(F, (2, 0))]),
    t(-1.0, 1, One, &[(F, (1, 0)), (F, (1, 0)), (F, (2, 0))]),
    t(1.0, 1, A, &[(F, (2, 0)), (S, (1, 0)), (S, (2, 0))]),
    t(1.0, 1, A, &[(F, (1, 0)), (S, (1, 0)), (S, (3, 0))]),
    t(-2.0, 0, One, &[(F, (1, 0)), (F, (0, 1)), (F, (1, 1))]),
    t(2.0, 0, B, &[(F, (1, 1)), (S, (1, 0)), (S, (1, 1))]),
    t(2.0, 0, B, &[(F, (0, 1)), (S, (1, 0)), (S, (2, 1))]),
    t(2.0, 0, C, &[(F, (1, 1)), (S, (0, 1)), (S, (2, 0))]),
    t(2.0, 0, C, &[(F, (1, 0)), (S, (0, 1)), (S, (2, 1))]),
    t(-2.0, 0, One, &[(F, (0, 1)), (S, (2, 0)), (S, (1, 1))]),
    t(2.0, 0, B, &[(F, (0, 1)), (S, (2, 0)), (S, (1, 1))]),
    t(2.0, 0, C, &[(F, (0, 1)), (S, (2, 0)), (S, (1, 1))]),
    t(1.0, 0, One, &[(F, (0, 2))]),
    t(-1.0, 1, One, &[(F, (0, 1)), (F, (0, 1)), (F, (0, 2))]),
    t(1.0, 1, D, &[(F, (0, 1)), (S, (0, 1)), (S, (1, 2))]),
    t(1.0, 1, D, &[(F, (0, 2)), (S, (0, 1)), (S, (1, 1))]),
    t(-2.0, 1, One, &[(F, (0, 1)), (S, (1, 1)), (S, (0, 2))]),
    t(2.0, 1, D, &[(F, (0, 1)), (S, (1, 1)), (S, (0, 2))]),
];

/// θ-free equation, printed order.
pub const FERMIONIC_TERMS: &[Term] = &[
    t(1.0, 0, One, &[(S, (2, 0))]),
    t(-1.0, 1, A, &[(F, (1, 0)), (F, (2, 0)), (S, (1, 0))]),
    t(-1.0, 1, One, &[(F, (1, 0)), (F, (1, 0)), (S, (2, 0))]),
    t(1.0, 1, A, &[(F, (1, 0)), (F, (1, 0)), (S, (2, 0))]),
    t(-2.0, 0, B, &[(F, (0, 1)), (F, (1, 1)), (S, (1, 0))]),
    t(-2.0, 0, C, &[(F, (1, 0)), (F, (1, 1)), (S, (0, 1))]),
    t(-2.0, 0, One, &[(F, (1, 0)), (F, (0, 1)), (S, (1, 1))]),
    t(2.0, 0, B, &[(F, (1, 0)), (F, (0, 1)), (S, (1, 1))]),
    t(2.0, 0, C, &[(F, (1, 0)), (F, (0, 1)), (S, (1, 1))]),
    t(1.0, 0, One, &[(S, (0, 2))]),
    t(-1.0, 1, D, &[(F, (0, 1)), (F, (0, 2)), (S, (0, 1))]),
    t(-1.0, 1, One, &[(F, (0, 1)), (F, (0, 1)), (S, (0, 2))]),
    t(1.0, 1, D, &[(F, (0, 1)), (F, (0, 1)), (S, (0, 2))]),
];

/// A residual value with the largest finite-difference error estimate that
/// went into it.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualSample {
    pub point: (f64, f64),
    #[serde(serialize_with = "ser_gn")]
    pub value: GrassmannNumber,
    pub fd_error_estimate: f64,
}

fn ser_gn<S: serde::Serializer>(g: &GrassmannNumber, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&g.to_string())
}

/// A purely bosonic field: even, without nilpotent part.
#[derive(Debug, Clone)]
pub struct ClassicalField {
    phi: FieldCandidate,
}

impl ClassicalField {
    pub fn new(phi: FieldCandidate) -> Result<Self> {
        phi.check_parity(Parity::Even, true, 17)?;
        Ok(Self { phi })
    }

    pub fn field(&self) -> &FieldCandidate {
        &self.phi
    }
}

struct Derivs<'a> {
    f: &'a FieldCandidate,
    point: (f64, f64),
    cfg: &'a DiffConfig,
    cache: std::collections::BTreeMap<MultiIndex, GrassmannNumber>,
    error: f64,
}

impl<'a> Derivs<'a> {
    fn new(f: &'a FieldCandidate, point: (f64, f64), cfg: &'a DiffConfig) -> Self {
        Self { f, point, cfg, cache: Default::default(), error: 0.0 }
    }

    fn get(&mut self, idx: MultiIndex) -> Result<GrassmannNumber> {
        if let Some(v) = self.cache.get(&idx) {
            return Ok(v.clone());
        }
        let d = partial(self.f, self.point, idx, self.cfg)?;
        self.error = self.error.max(d.error);
        self.cache.insert(idx, d.value.clone());
        Ok(d.value)
    }
}

/// `(1 − εφ_x²)φ_xx − 2φ_xφ_yφ_xy + (1 − εφ_y²)φ_yy`.
pub fn classical_residual(phi: &ClassicalField, eps: Epsilon, point: (f64, f64), cfg: &DiffConfig) -> Result<Complex> {
    let mut d = Derivs::new(&phi.phi, point, cfg);
    let mut v = |i| d.get(i).map(|g| g.body());
    let (px, py, pxx, pxy, pyy) = (v((1, 0))?, v((0, 1))?, v((2, 0))?, v((1, 1))?, v((0, 2))?);
    let e = eps.value();
    Ok((1.0 - e * px * px) * pxx - 2.0 * px * py * pxy + (1.0 - e * py * py) * pyy)
}

fn check_components(phi: &FieldCandidate, psi: &FieldCandidate) -> Result<()> {
    phi.check_parity(Parity::Even, false, 19)?;
    psi.check_parity(Parity::Odd, false, 23)?;
    Ok(())
}

/// Evaluates a term table at `point`.
pub fn eval_terms(
    terms: &[Term],
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    p: &SusyParams,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<ResidualSample> {
    let mut dphi = Derivs::new(phi, point, cfg);
    let mut dpsi = Derivs::new(psi, point, cfg);
    let ctx = if phi.context().len() >= psi.context().len() { phi.context() } else { psi.context() };
    let mut acc = ctx.zero();
    for term in terms {
        let w = term.weight(p);
        if w == 0.0 {
            continue;
        }
        let mut prod = ctx.scalar(w);
        for &(comp, idx) in term.factors {
            let v = match comp {
                Comp::Phi => dphi.get(idx)?,
                Comp::Psi => dpsi.get(idx)?,
            };
            prod = prod.try_mul(&v)?;
        }
        acc = acc.try_add(&prod)?;
    }
    Ok(ResidualSample { point, value: acc, fd_error_estimate: dphi.error.max(dpsi.error) })
}

/// θ-coefficient component equation for general `(a, b, c, d, ε)`.
pub fn susy_residual_bosonic(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    p: &SusyParams,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<ResidualSample> {
    check_components(phi, psi)?;
    eval_terms(BOSONIC_TERMS, phi, psi, p, point, cfg)
}

/// θ-free component equation for general `(a, b, c, d, ε)`.
pub fn susy_residual_fermionic(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    p: &SusyParams,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<ResidualSample> {
    check_components(phi, psi)?;
    eval_terms(FERMIONIC_TERMS, phi, psi, p, point, cfg)
}

struct Components {
    px: GrassmannNumber,
    py: GrassmannNumber,
    pxx: GrassmannNumber,
    pxy: GrassmannNumber,
    pyy: GrassmannNumber,
    sxx: GrassmannNumber,
    sxy: GrassmannNumber,
    syy: GrassmannNumber,
    error: f64,
}

fn components(phi: &FieldCandidate, psi: &FieldCandidate, point: (f64, f64), cfg: &DiffConfig) -> Result<Components> {
    check_components(phi, psi)?;
    let mut f = Derivs::new(phi, point, cfg);
    let mut s = Derivs::new(psi, point, cfg);
    Ok(Components {
        px: f.get((1, 0))?,
        py: f.get((0, 1))?,
        pxx: f.get((2, 0))?,
        pxy: f.get((1, 1))?,
        pyy: f.get((0, 2))?,
        sxx: s.get((2, 0))?,
        sxy: s.get((1, 1))?,
        syy: s.get((0, 2))?,
        error: f.error.max(s.error),
    })
}

/// `φxx − εφx²φxx − 2φxφyφxy − 2φyψxxψxy + φyy − εφy²φyy − 2εφyψxyψyy`.
pub fn susy_special_bosonic(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    eps: Epsilon,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<ResidualSample> {
    let c = components(phi, psi, point, cfg)?;
    let e = eps.value();
    let v = &c.pxx - &(&(&c.px * &c.px) * &c.pxx).scale(e);
    let v = &v - &(&(&c.px * &c.py) * &c.pxy).scale(2.0);
    let v = &v - &(&(&c.py * &c.sxx) * &c.sxy).scale(2.0);
    let v = &v + &c.pyy;
    let v = &v - &(&(&c.py * &c.py) * &c.pyy).scale(e);
    let v = &v - &(&(&c.py * &c.sxy) * &c.syy).scale(2.0 * e);
    Ok(ResidualSample { point, value: v, fd_error_estimate: c.error })
}

/// `ψxx − εφx²ψxx − 2φxφyψxy + ψyy − εφy²ψyy`.
pub fn susy_special_fermionic(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    eps: Epsilon,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<ResidualSample> {
    let c = components(phi, psi, point, cfg)?;
    let e = eps.value();
    let v = &c.sxx - &(&(&c.px * &c.px) * &c.sxx).scale(e);
    let v = &v - &(&(&c.px * &c.py) * &c.sxy).scale(2.0);
    let v = &v + &c.syy;
    let v = &v - &(&(&c.py * &c.py) * &c.syy).scale(e);
    Ok(ResidualSample { point, value: v, fd_error_estimate: c.error })
}

/// Both component residuals, via the hand-written system when the couplings
/// vanish and via the term tables otherwise.
pub fn susy_residuals(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    p: &SusyParams,
    point: (f64, f64),
    cfg: &DiffConfig,
) -> Result<(ResidualSample, ResidualSample)> {
    if p.is_special() {
        Ok((
            susy_special_bosonic(phi, psi, p.eps, point, cfg)?,
            susy_special_fermionic(phi, psi, p.eps, point, cfg)?,
        ))
    } else {
        Ok((
            susy_residual_bosonic(phi, psi, p, point, cfg)?,
            susy_residual_fermionic(phi, psi, p, point, cfg)?,
        ))
    }
}

/// Rejects a field whose value at `point` is not of the given parity.
pub fn require_parity(f: &FieldCandidate, expected: Parity, point: (f64, f64)) -> Result<()> {
    let v = f.eval(point.0, point.1)?;
    if !v.is_zero() && v.parity() != expected {
        return Err(Error::Parity(format!("`{}` is {:?} at {point:?}", f.label(), v.parity())));
    }
    Ok(())
}
