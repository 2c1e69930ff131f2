//! Superfields `Φ = A + θB` over the plane, the operators `D = ∂θ + θ∂x` and
//! `H = ∂θ − θ∂x`, and the general four-parameter superfield equation.
//!
//! The odd coordinate θ is generator 0 of the shared [`GeneratorSet`] and is
//! named `"theta"`. Component fields must not depend on it. Derivatives with
//! respect to θ act from the left, so `∂θ(θB) = B` for either parity of `B`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::{derivative_field, partial, DiffConfig, FieldCandidate, MultiIndex};
use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSet, GrassmannNumber, Parity};

pub const THETA: &str = "theta";

/// Sign selecting the Gaussian flow (`+1`) or the liquid-statics variant (`−1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Epsilon {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Epsilon::Plus)
        } else if v == -1.0 {
            Ok(Epsilon::Minus)
        } else {
            Err(Error::Config(format!("epsilon must be +1 or -1, got {v}")))
        }
    }

    /// `δ_{ε,1}`.
    pub fn delta(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => 0.0,
        }
    }

    pub fn both() -> [Epsilon; 2] {
        [Epsilon::Plus, Epsilon::Minus]
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
        })
    }
}

/// Coupling parameters of the supersymmetric extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub eps: Epsilon,
}

impl SusyParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, eps: Epsilon) -> Self {
        Self { a, b, c, d, eps }
    }

    /// `a = b = c = d = 0`, the case with the full superalgebra.
    pub fn special(eps: Epsilon) -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, eps)
    }

    pub fn is_special(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }
}

/// Generator set with θ at index 0 followed by `names`.
pub fn superspace(names: &[&str]) -> Result<Arc<GeneratorSet>> {
    let mut all = vec![THETA];
    all.extend_from_slice(names);
    GeneratorSet::new(&all)
}

fn theta_index(ctx: &GeneratorSet) -> Result<usize> {
    match ctx.index_of(THETA) {
        Some(0) => Ok(0),
        _ => Err(Error::GeneratorSet(format!(
            "superfields need `{THETA}` as generator 0 of the context"
        ))),
    }
}

/// `Φ = A + θB`. The grade of Φ is the parity of `A`; `B` has the other one.
#[derive(Debug, Clone)]
pub struct SuperField {
    a: FieldCandidate,
    b: FieldCandidate,
    grade: Parity,
}

impl SuperField {
    /// Builds `Φ = A + θB`, checking at sampled points that `A` has parity
    /// `grade`, `B` the opposite one, and that neither involves θ.
    pub fn new(a: FieldCandidate, b: FieldCandidate, grade: Parity) -> Result<Self> {
        if grade == Parity::Mixed {
            return Err(Error::Parity("a superfield must be even or odd".into()));
        }
        let ctx = if a.context().len() >= b.context().len() { a.context() } else { b.context() };
        theta_index(ctx)?;
        a.context().zero().try_add(&b.context().zero())?;
        let other = grade.product(Parity::Odd);
        a.check_parity(grade, false, 11)?;
        b.check_parity(other, false, 13)?;
        for f in [&a, &b] {
            for (x, y) in [(0.31, 0.57), (-0.42, 0.83), (0.77, -0.29)] {
                if let Ok(v) = f.eval(x, y) {
                    if v.terms().any(|(m, _)| m & 1 != 0) {
                        return Err(Error::Parity(format!("component `{}` depends on {THETA}", f.label())));
                    }
                }
            }
        }
        Ok(Self { a, b, grade })
    }

    /// The canonical odd superfield `ψ + θφ` with fermionic `ψ` and bosonic `φ`.
    pub fn from_components(phi: FieldCandidate, psi: FieldCandidate) -> Result<Self> {
        Self::new(psi, phi, Parity::Odd)
    }

    pub fn theta_free(&self) -> &FieldCandidate {
        &self.a
    }

    pub fn theta_part(&self) -> &FieldCandidate {
        &self.b
    }

    pub fn grade(&self) -> Parity {
        self.grade
    }

    pub fn context(&self) -> &Arc<GeneratorSet> {
        if self.a.context().len() >= self.b.context().len() {
            self.a.context()
        } else {
            self.b.context()
        }
    }

    /// `∂x^i ∂y^j Φ` evaluated at `point`, as a single Grassmann number.
    pub fn value_at(&self, point: (f64, f64), idx: MultiIndex, cfg: &DiffConfig) -> Result<GrassmannNumber> {
        let a = partial(&self.a, point, idx, cfg)?.value;
        let b = partial(&self.b, point, idx, cfg)?.value;
        let theta = self.context().generator(0);
        a.try_add(&theta.try_mul(&b)?)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<GrassmannNumber> {
        self.value_at((x, y), (0, 0), &DiffConfig::default())
    }

    /// Componentwise `∂x^i ∂y^j` as a new superfield.
    pub fn derivative(&self, idx: MultiIndex, cfg: &DiffConfig) -> Result<SuperField> {
        Ok(Self {
            a: derivative_field(&self.a, idx, cfg)?,
            b: derivative_field(&self.b, idx, cfg)?,
            grade: self.grade,
        })
    }

    fn raw(a: FieldCandidate, b: FieldCandidate, grade: Parity) -> Self {
        Self { a, b, grade }
    }
}

fn flip(p: Parity) -> Parity {
    p.product(Parity::Odd)
}

/// `D(A + θB) = B + θA_x`.
pub fn apply_d(phi: &SuperField, cfg: &DiffConfig) -> Result<SuperField> {
    let ax = derivative_field(&phi.a, (1, 0), cfg)?;
    Ok(SuperField::raw(phi.b.clone(), ax, flip(phi.grade)))
}

/// `H(A + θB) = B − θA_x`.
pub fn apply_h(phi: &SuperField, cfg: &DiffConfig) -> Result<SuperField> {
    let minus = phi.context().scalar(-1.0);
    let ax = derivative_field(&phi.a, (1, 0), cfg)?.scale_left(&minus)?;
    Ok(SuperField::raw(phi.b.clone(), ax, flip(phi.grade)))
}

/// Which finite transformation to apply in [`susy_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformSign {
    /// `Φ ↦ Φ + ηHΦ`, components `(A + ηB, B + ηA_x)`. This equals
    /// `Φ(x − ηθ, θ + η)` and commutes with `D`.
    Flow,
    /// Components `(A + ηB, B − ηA_x)`, i.e. `Φ + ηDΦ`.
    Opposite,
}

/// Finite supersymmetry transformation with an odd constant `eta`.
pub fn susy_transform(phi: &SuperField, eta: &GrassmannNumber, sign: TransformSign, cfg: &DiffConfig) -> Result<SuperField> {
    if eta.parity() != Parity::Odd {
        return Err(Error::Parity("the transformation parameter must be odd".into()));
    }
    if eta.terms().any(|(m, _)| m & 1 != 0) {
        return Err(Error::Parity(format!("the transformation parameter may not involve {THETA}")));
    }
    let s = match sign {
        TransformSign::Flow => 1.0,
        TransformSign::Opposite => -1.0,
    };
    let a = phi.a.try_add(&phi.b.scale_left(eta)?)?;
    let ax = derivative_field(&phi.a, (1, 0), cfg)?;
    let b = phi.b.try_add(&ax.scale_left(&eta.scale(s))?)?;
    Ok(SuperField::raw(a, b, phi.grade))
}

/// Left-hand side of the general superfield equation at `point`:
///
/// `D⁴Φ − εa D²Φ D³Φ D⁵Φ − ε(1−a)(D³Φ)² D⁴Φ − 2b D²Φ (DΦ)_y (D³Φ)_y
///  − 2c D³Φ Φ_y (D³Φ)_y − 2(1−b−c) D³Φ (DΦ)_y (D²Φ)_y + Φ_yy
///  − εd Φ_y (DΦ)_y (DΦ)_yy − ε(1−d)((DΦ)_y)² Φ_yy`.
///
/// Every `D` power is built by [`apply_d`], so this path shares nothing with
/// the component evaluators in [`crate::pde`].
pub fn superfield_residual(phi: &SuperField, p: &SusyParams, point: (f64, f64), cfg: &DiffConfig) -> Result<GrassmannNumber> {
    let mut powers = vec![phi.clone()];
    for k in 0..5 {
        let next = apply_d(&powers[k], cfg)?;
        powers.push(next);
    }
    let at = |k: usize, idx: MultiIndex| powers[k].value_at(point, idx, cfg);
    let (d2, d3, d4, d5) = (at(2, (0, 0))?, at(3, (0, 0))?, at(4, (0, 0))?, at(5, (0, 0))?);
    let (phi_y, phi_yy) = (at(0, (0, 1))?, at(0, (0, 2))?);
    let (d1_y, d1_yy) = (at(1, (0, 1))?, at(1, (0, 2))?);
    let (d2_y, d3_y) = (at(2, (0, 1))?, at(3, (0, 1))?);
    let e = p.eps.value();
    let prod = |fs: [&GrassmannNumber; 3]| -> Result<GrassmannNumber> { fs[0].try_mul(fs[1])?.try_mul(fs[2]) };
    let terms = [
        (1.0, None),
        (-e * p.a, Some(prod([&d2, &d3, &d5])?)),
        (-e * (1.0 - p.a), Some(prod([&d3, &d3, &d4])?)),
        (-2.0 * p.b, Some(prod([&d2, &d1_y, &d3_y])?)),
        (-2.0 * p.c, Some(prod([&d3, &phi_y, &d3_y])?)),
        (-2.0 * (1.0 - p.b - p.c), Some(prod([&d3, &d1_y, &d2_y])?)),
        (1.0, Some(phi_yy.clone())),
        (-e * p.d, Some(prod([&phi_y, &d1_y, &d1_yy])?)),
        (-e * (1.0 - p.d), Some(prod([&d1_y, &d1_y, &phi_yy])?)),
    ];
    let mut acc = d4.clone();
    for (k, t) in terms.into_iter().skip(1) {
        acc = acc.try_add(&t.expect("non-leading terms carry a product").scale(k))?;
    }
    Ok(acc)
}

/// Splits a residual `R = F + θB` into `(B, F)`, i.e. the bosonic
/// (θ-coefficient) and fermionic (θ-free) component residuals.
pub fn split_residual(r: &GrassmannNumber) -> Result<(GrassmannNumber, GrassmannNumber)> {
    theta_index(r.context())?;
    let (free, coeff) = r.split_generator(0);
    Ok((coeff, free))
}

/// Maximum discrepancies between the two component parts of the superfield
/// residual and the component evaluators, over a set of points.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecomposeReport {
    pub bosonic: f64,
    pub fermionic: f64,
    pub points: usize,
}

impl DecomposeReport {
    pub fn max(&self) -> f64 {
        self.bosonic.max(self.fermionic)
    }
}

/// Compares the θ-part and θ-free part of [`superfield_residual`] with
/// [`crate::pde::susy_residual_bosonic`] and
/// [`crate::pde::susy_residual_fermionic`] on `points`.
pub fn decompose_check(phi: &SuperField, p: &SusyParams, points: &[(f64, f64)], cfg: &DiffConfig) -> Result<DecomposeReport> {
    if phi.grade != Parity::Odd {
        return Err(Error::Parity("the field equation is posed for odd superfields".into()));
    }
    let mut rep = DecomposeReport { bosonic: 0.0, fermionic: 0.0, points: 0 };
    for &pt in points {
        let (bos, fer) = split_residual(&superfield_residual(phi, p, pt, cfg)?)?;
        let pb = crate::pde::susy_residual_bosonic(&phi.b, &phi.a, p, pt, cfg)?;
        let pf = crate::pde::susy_residual_fermionic(&phi.b, &phi.a, p, pt, cfg)?;
        rep.bosonic = rep.bosonic.max((&bos - &pb.value).max_abs());
        rep.fermionic = rep.fermionic.max((&fer - &pf.value).max_abs());
        rep.points += 1;
    }
    Ok(rep)
}
