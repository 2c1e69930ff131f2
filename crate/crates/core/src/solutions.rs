//! Catalog of closed-form solutions.
//!
//! Each entry builds either a reduced pair `(F, Λ)` attached to a row of the
//! reduction tables, a first-order `ω` candidate, or a plane field. Every
//! entry carries its own residual check; [`serve`] refuses an entry marked
//! exact whose check fails, while entries marked verbatim-suspect are served
//! together with their (failing) report.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{partial, DiffConfig, FieldCandidate};
use crate::error::{Error, Result};
use crate::grassmann::{solve_implicit, Complex, GeneratorSet, GrassmannNumber};
use crate::pde::ClassicalField;
use crate::reductions::{
    l8_slopes, lift, lift_verify, omega_residual, reduced_residual, symmetry_variable, OmegaCandidate, OmegaFamily,
    OmegaForm, OmegaParams, Profile, ReducedCandidate, SubalgebraId, SubalgebraSpec,
};
use crate::specfun::{ellip_f_minus_e, integrate, lambert_w, Branch};
use crate::superfield::{superspace, Epsilon, SusyParams};
use crate::symmetry::{
    classical_generators, invariance_sweep, susy_generators, ActionParam, Algebra, Equation, FiniteAction,
};

/// Names of the odd constants shared by every entry, after `theta`.
pub const ODD_CONSTANTS: [&str; 5] = ["eta1", "eta2", "E1", "K1", "K2"];

/// Context `theta, eta1, eta2, E1, K1, K2` used by the catalog.
pub fn catalog_context() -> Arc<GeneratorSet> {
    superspace(&ODD_CONSTANTS).expect("fixed names are valid")
}

fn odd(ctx: &Arc<GeneratorSet>, name: &str) -> Result<GrassmannNumber> {
    ctx.named(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Exact,
    VerbatimSuspect,
}

/// Static description of an entry.
#[derive(Debug, Clone, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub anchor: &'static str,
    pub row: Option<&'static str>,
    /// Parameter names with their defaults.
    pub params: &'static [(&'static str, f64)],
    pub domain: &'static str,
    pub classification: Classification,
}

const fn entry(
    id: &'static str,
    anchor: &'static str,
    row: Option<&'static str>,
    params: &'static [(&'static str, f64)],
    domain: &'static str,
    classification: Classification,
) -> EntryInfo {
    EntryInfo { id, anchor, row, params, domain, classification }
}

use Classification::{Exact, VerbatimSuspect};

pub const CATALOG: &[EntryInfo] = &[
    entry("kink", "kink-type density profile F = sqrt(1+xi^2)(±arctan xi + C1)", Some("classical-dilation"), &[("C1", 0.3), ("sign", 1.0)], "eps = +1; y > 0", Exact),
    entry("linear", "linear profile F = C1 xi + C2", Some("classical-dilation"), &[("C1", 0.7), ("C2", -0.4), ("eps", 1.0)], "either eps; y != 0", Exact),
    entry("elliptic", "elliptic-integral profile of the eps = -1 dilation row", Some("classical-dilation"), &[("C1", 0.8), ("sign", 1.0)], "eps = -1; |x/y| < 1 - margin, y > 0", Exact),
    entry("lambert", "Lambert-function slope of the rotation-invariant row", Some("classical-L5"), &[("C1", 0.3), ("k", 0.0), ("sign", 1.0)], "eps = +1; xi in [0.1, 5]", Exact),
    entry("kink-lambda", "fermionic partner of the kink with one odd constant", Some("L1"), &[("C1", 0.4), ("sign", 1.0)], "eps = +1; y > 0", Exact),
    entry("linear-lambda", "3/2-power ratio partner of the linear profile", Some("L1"), &[("C1", 1.3), ("C2", 0.4)], "eps = +1; y > 0", Exact),
    entry("elliptic-lambda", "log-derivative partner of the elliptic profile", Some("L1"), &[("C1", 0.6), ("sign", 1.0)], "eps = -1; |xi| < 1 - margin", Exact),
    entry("elliptic-lambda-printed", "printed exponential-integral partner of the elliptic profile", Some("L1"), &[("C1", 0.6), ("sign", 1.0), ("reading", 0.0)], "eps = -1; |xi| < 1 - margin", VerbatimSuspect),
    entry("hyperbolic-lambda", "sinh/cosh partner of the linear profile", Some("L1"), &[("C1", 0.7), ("C2", 0.3), ("C3", 0.5), ("C4", 1.2), ("xi0", 1.2)], "eps = -1; g(xi) > 0, y > 0", Exact),
    entry("density-kink", "Gaussian density and velocity of the kink", Some("classical-dilation"), &[("C1", 0.0)], "eps = +1; y > 0", Exact),
    entry("travelling-linear", "linear travelling wave in y - m x", Some("L4,m"), &[("C1", 0.6), ("C2", 0.2), ("m", 0.5), ("eps", 1.0)], "either eps", Exact),
    entry("travelling-fixed-slope", "fixed-slope wave with arbitrary fermionic profile", Some("L4,m"), &[("C2", 0.2), ("m", 0.5), ("sign", 1.0), ("eps", 1.0), ("psi", 0.0)], "either eps; m^2 != -eps", Exact),
    entry("L2-fixed-slope", "slope ±1/sqrt(eps) in y with arbitrary fermionic profile", Some("L2"), &[("C2", 0.1), ("sign", 1.0), ("eps", -1.0), ("psi", 0.0)], "either eps", Exact),
    entry("L3-fixed-slope", "slope ±1/sqrt(eps) in x with arbitrary fermionic profile", Some("L3"), &[("C2", 0.1), ("sign", 1.0), ("eps", -1.0), ("psi", 0.0)], "either eps", Exact),
    entry("L6-fixed-slope", "slope ±m/sqrt(eps) in y with arbitrary fermionic profile", Some("L6,m"), &[("C2", 0.1), ("m", 1.5), ("sign", 1.0), ("eps", 1.0), ("psi", 0.0)], "either eps", Exact),
    entry("L7-fixed-slope", "slope ±m/sqrt(eps) in x with arbitrary fermionic profile", Some("L7,m"), &[("C2", 0.1), ("m", 1.5), ("sign", 1.0), ("eps", 1.0), ("psi", 0.0)], "either eps", Exact),
    entry("L8-fixed-slope", "propagation wave in x - (m/n) y with arbitrary fermionic profile", Some("L8,m,n"), &[("C2", 0.1), ("m", 1.2), ("n", 0.7), ("sign", 1.0), ("eps", 1.0), ("psi", 0.0)], "either eps", Exact),
    entry("quadratic", "quadratic fermionic field of the non-splitting x-row", Some("script-L3"), &[("C1", 0.5), ("C2", 0.2), ("eps", 1.0)], "either eps; eps C1^2 != 1", Exact),
    entry("script-L3-fixed-slope", "slope ±sqrt(eps) with eta2 = 0 and arbitrary fermionic profile", Some("script-L3"), &[("C2", 0.1), ("sign", 1.0), ("eps", -1.0), ("psi", 0.0)], "either eps; eta2 = 0", Exact),
    entry("transcendental-omega", "implicit slope of the non-splitting y-row", Some("script-L2"), &[("C1", 0.4)], "eps = -1; y in [-2, 2]", Exact),
];

pub fn info(id: &str) -> Result<&'static EntryInfo> {
    CATALOG.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// Named numeric parameters, falling back to the entry defaults.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Params(pub BTreeMap<String, f64>);

impl Params {
    /// Parses `name=value` pairs separated by commas.
    pub fn parse(s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected name=value, got `{part}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("`{v}` is not a number")))?;
            map.insert(k.trim().to_string(), v);
        }
        Ok(Self(map))
    }

    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.0.insert(name.to_string(), v);
        self
    }

    fn resolve(&self, info: &EntryInfo) -> Result<BTreeMap<&'static str, f64>> {
        for k in self.0.keys() {
            if !info.params.iter().any(|(n, _)| n == k) {
                return Err(Error::Config(format!("`{}` has no parameter `{k}`", info.id)));
            }
        }
        Ok(info.params.iter().map(|&(n, d)| (n, self.0.get(n).copied().unwrap_or(d))).collect())
    }
}

fn sign_of(v: f64) -> Result<f64> {
    match v {
        s if s == 1.0 || s == -1.0 => Ok(s),
        s => Err(Error::ParamConstraint(format!("sign must be +1 or -1, got {s}"))),
    }
}

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

fn jet_scalar(ctx: &Arc<GeneratorSet>, v: [Complex; 3]) -> [GrassmannNumber; 3] {
    v.map(|z| ctx.scalar(z))
}

fn jet_times(k: &GrassmannNumber, v: [Complex; 3]) -> [GrassmannNumber; 3] {
    v.map(|z| k.scale(z))
}

/// Kink profile `√(1+ξ²)(s·arctan ξ + C₁)` with exact derivatives.
pub fn kink_f(xi: f64, c1: f64, s: f64) -> [Complex; 3] {
    let q = 1.0 + xi * xi;
    let b = s * xi.atan() + c1;
    let r = q.sqrt();
    [c(r * b), c(xi / r * b + s / r), c(b / (q * r))]
}

/// `E₁`-coefficient of the kink partner,
/// `(1+ξ²)^{3/4}(s·arctan ξ + C₁)^{3/4} exp(−(s·¾C₁ + ⅜ arctan ξ) arctan ξ)`.
pub fn kink_lambda(xi: f64, c1: f64, s: f64) -> [Complex; 3] {
    let q = 1.0 + xi * xi;
    let a = xi.atan();
    let b = c(s * a + c1);
    let g = 0.75 * q.ln() + 0.75 * b.ln() - (s * 0.75 * c1 + 0.375 * a) * a;
    let n = s * 0.75 * c1 + 0.75 * a;
    let g1 = 1.5 * xi / q + 0.75 * s / (q * b) - n / q;
    let g2 = 1.5 * (1.0 - xi * xi) / (q * q) - 0.75 * s * (2.0 * xi * b + s) / (q * q * b * b) - (0.75 - 2.0 * xi * n) / (q * q);
    let v = g.exp();
    [v, v * g1, v * (g2 + g1 * g1)]
}

/// Where `s·arctan ξ + C₁` vanishes, the branch point of the kink partner.
pub fn kink_lambda_branch_points(c1: f64, s: f64) -> Vec<f64> {
    if (c1 * s).abs() < FRAC_PI_2 {
        vec![-(c1 * s).tan()]
    } else {
        Vec::new()
    }
}

/// Real zeros of `N` and `D` in the linear-profile partner.
pub fn linear_lambda_branch_points(c1: f64, c2: f64) -> Vec<f64> {
    let (a, b, k) = (c2 * c2 - 1.0, -2.0 * c1 * c2, c1 * c1 - 1.0);
    let mut out = Vec::new();
    let disc = b * b - 4.0 * a * k;
    if a != 0.0 && disc >= 0.0 {
        out.push((-b + disc.sqrt()) / (2.0 * a));
        out.push((-b - disc.sqrt()) / (2.0 * a));
    } else if a == 0.0 && b != 0.0 {
        out.push(-k / b);
    }
    let r2 = c1 * c1 + c2 * c2 - 1.0;
    if r2 >= 0.0 && c2 * c2 != 1.0 {
        out.push(-(c1 * c2 + r2.sqrt()) / (1.0 - c2 * c2));
    }
    out
}

/// `E₁`-coefficient of the linear-profile partner,
/// `N^{3/2} / D^{3/2}` with `N = (C₂²−1)ξ² − 2C₁C₂ξ + (C₁²−1)` and
/// `D = (1−C₂²)ξ + C₁C₂ + √(C₁²+C₂²−1)`, principal powers.
pub fn linear_lambda(xi: f64, c1: f64, c2: f64) -> [Complex; 3] {
    let root = c(c1 * c1 + c2 * c2 - 1.0).sqrt();
    let n = c((c2 * c2 - 1.0) * xi * xi - 2.0 * c1 * c2 * xi + (c1 * c1 - 1.0));
    let n1 = 2.0 * (c2 * c2 - 1.0) * xi - 2.0 * c1 * c2;
    let n2 = 2.0 * (c2 * c2 - 1.0);
    let d = (1.0 - c2 * c2) * xi + c1 * c2 + root;
    let d1 = 1.0 - c2 * c2;
    let g = 1.5 * (n.ln() - d.ln());
    let g1 = 1.5 * (n1 / n - d1 / d);
    let g2 = 1.5 * (n2 / n - n1 * n1 / (n * n) + d1 * d1 / (d * d));
    let v = g.exp();
    [v, v * g1, v * (g2 + g1 * g1)]
}

/// Elliptic profile of the `ε = −1` dilation row and its exact first
/// derivative:
/// `C₁√(ξ−1)√(ξ+1) + s·√(−1−ξ²)/(1+ξ²)·(ξ + ξ³ + √(1−ξ²)√(1+ξ²)(F(ξ,i) − E(ξ,i)))`.
pub fn elliptic_f(xi: f64, c1: f64, s: f64) -> Result<[Complex; 2]> {
    let z = c(xi);
    let i = Complex::new(0.0, 1.0);
    let (sm, sp) = ((z - 1.0).sqrt(), (z + 1.0).sqrt());
    let a = sm * sp;
    let a1 = 0.5 * (sp / sm + sm / sp);
    let q = 1.0 + xi * xi;
    let m1 = c(-q).sqrt();
    let (p, r) = (c(1.0 - xi * xi).sqrt(), c(q).sqrt());
    let d = ellip_f_minus_e(z, i)?;
    let b = m1 / q;
    let b1 = -xi / (m1 * q) - 2.0 * xi * m1 / (q * q);
    let cc = z + z * z * z + p * r * d;
    let cc1 = 1.0 + 2.0 * xi * xi + (-xi * r / p + xi * p / r) * d;
    Ok([c1 * a + s * b * cc, c1 * a1 + s * (b1 * cc + b * cc1)])
}

fn difference<Fun>(f: Fun, xi: f64, cfg: &DiffConfig) -> Result<Complex>
where
    Fun: Fn(f64) -> Result<Complex> + Send + Sync + 'static,
{
    let g = GeneratorSet::empty();
    let field = FieldCandidate::new("d/dxi", &g, {
        let g = g.clone();
        move |x, _| Ok(g.scalar(f(x)?))
    });
    Ok(partial(&field, (xi, 0.0), (1, 0), cfg)?.value.body())
}

fn elliptic_profile(ctx: &Arc<GeneratorSet>, c1: f64, s: f64, cfg: DiffConfig) -> Profile {
    let ctx = ctx.clone();
    Arc::new(move |xi| {
        let [f, f1] = elliptic_f(xi, c1, s)?;
        let f2 = difference(move |t| Ok(elliptic_f(t, c1, s)?[1]), xi, &cfg)?;
        Ok(jet_scalar(&ctx, [f, f1, f2]))
    })
}

/// `Λ'/Λ` forced by the fermionic dilation equation when the bracket of the
/// elliptic profile vanishes: `−¾(1 + (ξF' − F)²) / Q₁` with
/// `Q₁ = ξ(1−ξ²)F'² + (2ξ²−1)FF' − ξF² − ξ`.
pub fn elliptic_lambda_log_derivative(xi: f64, c1: f64, s: f64) -> Result<Complex> {
    let [f, f1] = elliptic_f(xi, c1, s)?;
    let q1 = xi * (1.0 - xi * xi) * f1 * f1 + (2.0 * xi * xi - 1.0) * f * f1 - xi * f * f - xi;
    let q0 = 0.75 * (1.0 + (xi * f1 - f) * (xi * f1 - f));
    if q1.norm() < 1e-12 {
        return Err(Error::Domain(format!("first-order coefficient vanishes at xi = {xi}")));
    }
    Ok(-q0 / q1)
}

/// `Λ'/Λ` as printed (the integrand of the exponent times ¾), with the stray
/// plane coordinate read as `ξ` (`reading = 0`) or dropped (`reading = 1`).
pub fn elliptic_lambda_printed_log_derivative(xi: f64, c1: f64, reading: u8) -> Result<Complex> {
    let t = c(xi);
    let i = Complex::new(0.0, 1.0);
    let d = ellip_f_minus_e(t, i)?;
    let q = 1.0 + xi * xi;
    let sq1 = c(-q).sqrt();
    let sqa = (t - 1.0).sqrt() * (t + 1.0).sqrt();
    let sqb = ((-t - 1.0) * (t - 1.0)).sqrt();
    let poly = 2.0 * xi.powi(10) + 6.0 * xi.powi(8) + 4.0 * xi.powi(6) - 4.0 * xi.powi(4) - 6.0 * xi * xi - 2.0;
    let num = c1 * d * poly + sq1 * q.powf(3.5) * sqa * sqb * (1.0 + c1 * c1 + xi * xi + d * d);
    let stray = match reading {
        0 => c(xi),
        1 => c(0.0),
        r => return Err(Error::ParamConstraint(format!("reading must be 0 or 1, got {r}"))),
    };
    let den = (xi - 1.0) * (xi + 1.0) * (-d * sq1 * sqa * q.powi(4) + c1 * q.powf(4.5) * sqb + stray * sq1 * q.powf(3.5) * sqa * sqb);
    Ok(0.75 * num / den)
}

/// Profile normalised so that `Λ(ξ) = E₁` at every sample, from a
/// log-derivative `r`: `[E₁, E₁·r, E₁·(r² + r')]`. The fermionic equations are
/// linear in `Λ`, so their residual is the true residual divided by the
/// scalar factor of `Λ(ξ)`.
fn log_derivative_profile<R>(e1: GrassmannNumber, r: R, cfg: DiffConfig) -> Profile
where
    R: Fn(f64) -> Result<Complex> + Send + Sync + Clone + 'static,
{
    Arc::new(move |xi| {
        let v = r(xi)?;
        let v1 = difference(r.clone(), xi, &cfg)?;
        Ok(jet_times(&e1, [c(1.0), v, v * v + v1]))
    })
}

/// `g(ξ)` of the hyperbolic partner.
pub fn hyperbolic_g(xi: f64, c1: f64, c2: f64) -> f64 {
    3.0 * c1 * c1 * c2 * c2 - c2 * c2 - c1 * c1 - 1.0
        + 6.0 * c1 * c2 * xi
        + 6.0 * c2.powi(3) * c1 * xi
        + 6.0 * c2 * c2 * xi * xi
        + 3.0 * c2.powi(4) * xi * xi
        + 3.0 * xi * xi
}

/// Hyperbolic partner `√g (C₃ sinh I + C₄ cosh I)` of the linear profile with
/// `I = ∫_{ξ₀}^{ξ} 3√q (1+C₂²)² / (2√(1+C₂²) g)` and
/// `q = 1 + C₁² + 2C₁C₂ξ + (1+C₂²)ξ²`.
pub fn hyperbolic_lambda(xi: f64, k: [f64; 5]) -> Result<[Complex; 3]> {
    let [c1, c2, c3, c4, xi0] = k;
    let s2 = 1.0 + c2 * c2;
    let quad = |t: f64| 1.0 + c1 * c1 + 2.0 * c1 * c2 * t + s2 * t * t;
    let h = |t: f64| 3.0 * quad(t).sqrt() * s2 * s2 / (2.0 * s2.sqrt() * hyperbolic_g(t, c1, c2));
    let g = hyperbolic_g(xi, c1, c2);
    if g <= 0.0 || hyperbolic_g(xi0, c1, c2) <= 0.0 {
        return Err(Error::Domain(format!("g must be positive on [{xi0}, {xi}]")));
    }
    let (lo, hi) = if xi0 <= xi { (xi0, xi) } else { (xi, xi0) };
    if (lo..=hi).contains(&roots_of_g(c1, c2).0) || (lo..=hi).contains(&roots_of_g(c1, c2).1) {
        return Err(Error::Domain(format!("g vanishes between {xi0} and {xi}")));
    }
    let (val, _) = integrate(|t| c(h(t)), xi0, xi, 1e-12)?;
    let i = val.re;
    let g1 = 6.0 * c1 * c2 + 6.0 * c2.powi(3) * c1 + 2.0 * (6.0 * c2 * c2 + 3.0 * c2.powi(4) + 3.0) * xi;
    let g2 = 2.0 * (6.0 * c2 * c2 + 3.0 * c2.powi(4) + 3.0);
    let (q, q1) = (quad(xi), 2.0 * c1 * c2 + 2.0 * s2 * xi);
    let hv = h(xi);
    let h1 = hv * (q1 / (2.0 * q) - g1 / g);
    let u = g.sqrt();
    let u1 = g1 / (2.0 * u);
    let u2 = g2 / (2.0 * u) - g1 * g1 / (4.0 * u * u * u);
    let sh = c3 * i.sinh() + c4 * i.cosh();
    let ch = c3 * i.cosh() + c4 * i.sinh();
    Ok([
        c(u * sh),
        c(u1 * sh + u * hv * ch),
        c(u2 * sh + 2.0 * u1 * hv * ch + u * h1 * ch + u * hv * hv * sh),
    ])
}

fn roots_of_g(c1: f64, c2: f64) -> (f64, f64) {
    let s2 = 1.0 + c2 * c2;
    let (a, b) = (3.0 * s2 * s2, 6.0 * c1 * c2 * s2);
    let c0 = 3.0 * c1 * c1 * c2 * c2 - c2 * c2 - c1 * c1 - 1.0;
    let disc = (b * b - 4.0 * a * c0).max(0.0).sqrt();
    ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
}

/// Left-hand side of the second-order `Λ`-equation of the linear profile,
/// `(1+C₁²+2C₁C₂ξ+ξ²+C₂²ξ²)Λ'' + (−C₂²ξ − ξ − C₁C₂)Λ' + ¾(1+C₂²)Λ`.
pub fn linear_profile_lambda_equation(xi: f64, c1: f64, c2: f64, lam: &[GrassmannNumber; 3]) -> GrassmannNumber {
    let a = 1.0 + c1 * c1 + 2.0 * c1 * c2 * xi + xi * xi + c2 * c2 * xi * xi;
    let b = -c2 * c2 * xi - xi - c1 * c2;
    &(&lam[2].scale(a) + &lam[1].scale(b)) + &lam[0].scale(0.75 * (1.0 + c2 * c2))
}

/// Lambert slope `φ_ξ = s·(i/2)√(W_k(−4C₁²/ξ)/ξ)` and its derivative.
pub fn lambert_slope(xi: f64, c1: f64, branch: Branch, s: f64) -> Result<[Complex; 2]> {
    if xi <= 0.0 {
        return Err(Error::Domain(format!("Lambert slope needs xi > 0, got {xi}")));
    }
    let w = lambert_w(c(-4.0 * c1 * c1 / xi), branch)?;
    let u = w / xi;
    let u1 = -(w / (xi * xi)) * (2.0 + w) / (1.0 + w);
    let v = s * Complex::new(0.0, 0.5) * u.sqrt();
    Ok([v, v * u1 / (2.0 * u)])
}

/// Scalar shapes for the fermionic functions left arbitrary by a family:
/// `0` a sech bump, `1` a tanh kink, `2` a periodic wave `sin 2ξ`.
pub fn free_profile(kind: u8, xi: f64) -> Result<[Complex; 3]> {
    let (s, t) = (1.0 / xi.cosh(), xi.tanh());
    match kind {
        0 => Ok([c(s), c(-s * t), c(s * t * t - s * s * s)]),
        1 => Ok([c(t), c(s * s), c(-2.0 * s * s * t)]),
        2 => Ok([c((2.0 * xi).sin()), c(2.0 * (2.0 * xi).cos()), c(-4.0 * (2.0 * xi).sin())]),
        k => Err(Error::ParamConstraint(format!("psi must be 0, 1 or 2, got {k}"))),
    }
}

fn linear_jet(a: Complex, b: Complex) -> impl Fn(f64) -> [Complex; 3] {
    move |xi| [a * xi + b, a, c(0.0)]
}

/// The transcendental relation `4ω² ln ω − 4η₁η₂ω²y + ω⁴ − 1 − 4C₁η₁η₂ω²`.
pub fn transcendental_relation(w: &GrassmannNumber, y: f64, c1: f64, hh: &GrassmannNumber) -> Result<GrassmannNumber> {
    let w2 = w.try_mul(w)?;
    let hw2 = hh.in_context(w.context())?.try_mul(&w2)?;
    let lnw = w.ln()?;
    Ok(&(&(&(&w2.try_mul(&lnw)?.scale(4.0) - &hw2.scale(4.0 * y)) + &w2.try_mul(&w2)?) - 1.0) - &hw2.scale(4.0 * c1))
}

/// `ω(y)` solved from the transcendental relation (body 1) and `ω'` from
/// implicit differentiation.
pub fn transcendental_omega(ctx: &Arc<GeneratorSet>, y: f64, c1: f64) -> Result<[GrassmannNumber; 2]> {
    let hh = odd(ctx, "eta1")?.try_mul(&odd(ctx, "eta2")?)?;
    let w = solve_implicit(ctx, |w| transcendental_relation(w, y, c1, &hh), 1.0)?;
    let w2 = &w * &w;
    let r_y = (&hh * &w2).scale(-4.0);
    let r_w = &(&(&(&(&w * &w.ln()?).scale(8.0) + &w.scale(4.0)) - &(&hh * &w).scale(8.0 * y)) + &(&w2 * &w).scale(4.0)) - &(&hh * &w).scale(8.0 * c1);
    let w1 = -&r_y.try_mul(&r_w.inverse()?)?;
    Ok([w, w1])
}

/// A built entry.
#[derive(Clone)]
pub enum Built {
    /// Reduced pair attached to a row. `liftable` is false when the profile
    /// only carries the derivatives the reduced equations need (first-order
    /// and log-derivative entries).
    Reduced {
        spec: SubalgebraSpec,
        rc: ReducedCandidate,
        liftable: bool,
        xi_range: (f64, f64),
        plane: PlaneDomain,
        /// Branch points of the profiles inside `xi_range`; checks stay
        /// [`SINGULAR_MARGIN`] away from them.
        singular: Vec<f64>,
    },
    /// First-order `ω` candidate of a non-splitting row.
    Omega {
        family: OmegaFamily,
        omega: OmegaCandidate,
        params: OmegaParams,
        range: (f64, f64),
    },
    /// Density and velocity of the kink field.
    Density { phi: ClassicalField, c1: f64 },
}

/// Where lifted checks sample the plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum PlaneDomain {
    /// `x = ξ·y` with `ξ` and `y` in the given ranges.
    Dilation { y: (f64, f64) },
    Rectangle { x: (f64, f64), y: (f64, f64) },
}

#[derive(Clone)]
pub struct Instance {
    pub info: &'static EntryInfo,
    pub params: BTreeMap<&'static str, f64>,
    pub ctx: Arc<GeneratorSet>,
    pub built: Built,
}

fn eps_of(v: f64) -> Result<Epsilon> {
    Epsilon::from_value(v)
}

/// Distance in `ξ` that checks keep from a recorded branch point.
pub const SINGULAR_MARGIN: f64 = 0.08;

fn with_singular(b: Built, points: Vec<f64>) -> Built {
    match b {
        Built::Reduced { spec, rc, liftable, xi_range, plane, .. } => Built::Reduced { spec, rc, liftable, xi_range, plane, singular: points },
        other => other,
    }
}

fn clear_of(singular: &[f64], xi: f64) -> bool {
    singular.iter().all(|s| (xi - s).abs() >= SINGULAR_MARGIN)
}

/// Builds entry `id` with `params`, without running its check.
pub fn build(id: &str, params: &Params, cfg: &DiffConfig) -> Result<Instance> {
    let info = info(id)?;
    let p = params.resolve(info)?;
    let ctx = catalog_context();
    let g = |n: &str| p[n];
    let e1 = odd(&ctx, "E1")?;
    let (k1, k2) = (odd(&ctx, "K1")?, odd(&ctx, "K2")?);
    let (h1, h2) = (odd(&ctx, "eta1")?, odd(&ctx, "eta2")?);
    let cfg = *cfg;
    let plus = Epsilon::Plus;
    let minus = Epsilon::Minus;
    let upper = PlaneDomain::Dilation { y: (0.5, 1.5) };
    let rect = PlaneDomain::Rectangle { x: (-1.5, 1.5), y: (-1.5, 1.5) };
    let scalar_profile = |f: Box<dyn Fn(f64) -> Result<[Complex; 3]> + Send + Sync>| -> Profile {
        let ctx = ctx.clone();
        Arc::new(move |xi| Ok(jet_scalar(&ctx, f(xi)?)))
    };
    let odd_profile = |k: GrassmannNumber, f: Box<dyn Fn(f64) -> Result<[Complex; 3]> + Send + Sync>| -> Profile {
        Arc::new(move |xi| Ok(jet_times(&k, f(xi)?)))
    };
    let reduced = |spec: SubalgebraSpec, f: Profile, l: Profile, liftable: bool, xi_range: (f64, f64), plane: PlaneDomain| Built::Reduced {
        rc: ReducedCandidate::new(info.id, &ctx, f, l),
        spec,
        liftable,
        xi_range,
        plane,
        singular: Vec::new(),
    };
    let spec = |row: SubalgebraId, eps: Epsilon| SubalgebraSpec::new(row, eps, &ctx);
    let zero = crate::reductions::profile_zero(&ctx);
    let built = match info.id {
        "kink" => {
            let (c1, s) = (g("C1"), sign_of(g("sign"))?);
            let f = scalar_profile(Box::new(move |xi| Ok(kink_f(xi, c1, s))));
            reduced(spec(SubalgebraId::ClassicalDilation, plus), f, zero, true, (-3.0, 3.0), upper)
        }
        "linear" => {
            let (c1, c2) = (g("C1"), g("C2"));
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(c(c1), c(c2))(xi))));
            reduced(spec(SubalgebraId::ClassicalDilation, eps_of(g("eps"))?), f, zero, true, (-3.0, 3.0), upper)
        }
        "elliptic" => {
            let f = elliptic_profile(&ctx, g("C1"), sign_of(g("sign"))?, cfg);
            reduced(spec(SubalgebraId::ClassicalDilation, minus), f, zero, true, (-0.9, 0.9), upper)
        }
        "lambert" => {
            let (c1, s) = (g("C1"), sign_of(g("sign"))?);
            let branch = match g("k") {
                0.0 => Branch::Principal,
                -1.0 => Branch::Lower,
                k => return Err(Error::ParamConstraint(format!("k must be 0 or -1, got {k}"))),
            };
            // The reduced equation of this row involves only F' and F''; the
            // value slot is not tracked.
            let f = scalar_profile(Box::new(move |xi| {
                let [w, w1] = lambert_slope(xi, c1, branch, s)?;
                Ok([c(0.0), w, w1])
            }));
            reduced(spec(SubalgebraId::ClassicalL5, plus), f, zero, false, (0.1, 5.0), rect)
        }
        "kink-lambda" => {
            let (c1, s) = (g("C1"), sign_of(g("sign"))?);
            let f = scalar_profile(Box::new(move |xi| Ok(kink_f(xi, c1, s))));
            let l = odd_profile(e1, Box::new(move |xi| Ok(kink_lambda(xi, c1, s))));
            with_singular(reduced(spec(SubalgebraId::L1, plus), f, l, true, (-3.0, 3.0), upper), kink_lambda_branch_points(c1, s))
        }
        "linear-lambda" => {
            let (c1, c2) = (g("C1"), g("C2"));
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(c(c1), c(c2))(xi))));
            let l = odd_profile(e1, Box::new(move |xi| Ok(linear_lambda(xi, c1, c2))));
            with_singular(reduced(spec(SubalgebraId::L1, plus), f, l, true, (-2.0, 2.0), upper), linear_lambda_branch_points(c1, c2))
        }
        "elliptic-lambda" | "elliptic-lambda-printed" => {
            let (c1, s) = (g("C1"), sign_of(g("sign"))?);
            let f = elliptic_profile(&ctx, c1, s, cfg);
            let l = if info.id == "elliptic-lambda" {
                log_derivative_profile(e1, move |xi| elliptic_lambda_log_derivative(xi, c1, s), cfg)
            } else {
                let reading = g("reading") as u8;
                log_derivative_profile(e1, move |xi| elliptic_lambda_printed_log_derivative(xi, c1, reading), cfg)
            };
            reduced(spec(SubalgebraId::L1, minus), f, l, false, (-0.9, 0.9), upper)
        }
        "hyperbolic-lambda" => {
            let k = [g("C1"), g("C2"), g("C3"), g("C4"), g("xi0")];
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(c(k[0]), c(k[1]))(xi))));
            let l = odd_profile(e1, Box::new(move |xi| hyperbolic_lambda(xi, k)));
            let lo = k[4].max(roots_of_g(k[0], k[1]).1 + 0.05);
            reduced(spec(SubalgebraId::L1, minus), f, l, true, (lo, lo + 2.0), upper)
        }
        "density-kink" => {
            let c1 = g("C1");
            let f = scalar_profile(Box::new(move |xi| Ok(kink_f(xi, c1, 1.0))));
            let rc = ReducedCandidate::classical("kink", &ctx, f);
            let (phi, _) = lift(&spec(SubalgebraId::ClassicalDilation, plus), &rc)?;
            Built::Density { phi: ClassicalField::new(phi)?, c1 }
        }
        "travelling-linear" => {
            let (c1, c2) = (g("C1"), g("C2"));
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(c(c1), c(c2))(xi))));
            let l: Profile = Arc::new(move |xi| Ok([&k1.scale(xi) + &k2, k1.clone(), k1.scale(0.0)]));
            reduced(spec(SubalgebraId::L4, eps_of(g("eps"))?).with_m(g("m")), f, l, true, (-2.0, 2.0), rect)
        }
        "travelling-fixed-slope" => {
            let (m, e) = (g("m"), g("eps"));
            let den = (m * m + e).powi(2);
            if den == 0.0 {
                return Err(Error::ParamConstraint("m^2 + eps must be nonzero".into()));
            }
            let slope = sign_of(g("sign"))? * c(e * (m * m + 1.0) / den).sqrt();
            let c2 = g("C2");
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(slope, c(c2))(xi))));
            let kind = g("psi") as u8;
            free_profile(kind, 0.0)?;
            let l = odd_profile(e1, Box::new(move |xi| free_profile(kind, xi)));
            reduced(spec(SubalgebraId::L4, eps_of(e)?).with_m(m), f, l, true, (-2.0, 2.0), rect)
        }
        "L2-fixed-slope" | "L3-fixed-slope" | "L6-fixed-slope" | "L7-fixed-slope" => {
            let row: SubalgebraId = info.row.expect("row entries have a row").parse()?;
            let m = p.get("m").copied().unwrap_or(1.0);
            let e = g("eps");
            let slope = sign_of(g("sign"))? * m / c(e).sqrt();
            let c2 = g("C2");
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(slope, c(c2))(xi))));
            let kind = g("psi") as u8;
            free_profile(kind, 0.0)?;
            let l = odd_profile(e1, Box::new(move |xi| free_profile(kind, xi)));
            reduced(spec(row, eps_of(e)?).with_m(m), f, l, true, (-2.0, 2.0), rect)
        }
        "L8-fixed-slope" => {
            let (m, n, eps) = (g("m"), g("n"), eps_of(g("eps"))?);
            let [a, b] = l8_slopes(m, n, eps)?;
            let slope = if sign_of(g("sign"))? > 0.0 { a } else { b };
            let c2 = g("C2");
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(slope, c(c2))(xi))));
            let kind = g("psi") as u8;
            free_profile(kind, 0.0)?;
            let l = odd_profile(e1, Box::new(move |xi| free_profile(kind, xi)));
            reduced(spec(SubalgebraId::L8, eps).with_m(m).with_n(n), f, l, true, (-2.0, 2.0), rect)
        }
        "quadratic" => {
            let (c1, c2, e) = (g("C1"), g("C2"), g("eps"));
            let den = 1.0 - e * c1 * c1;
            if den == 0.0 {
                return Err(Error::ParamConstraint("eps C1^2 must differ from 1".into()));
            }
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(c(c1), c(c2))(xi))));
            let q = h2.scale(-0.5 / den);
            let l: Profile = Arc::new(move |xi| {
                Ok([&(&q.scale(xi * xi) + &k1.scale(xi)) + &k2, &q.scale(2.0 * xi) + &k1, q.scale(2.0)])
            });
            let sp = spec(SubalgebraId::ScriptL3, eps_of(e)?).with_etas(h1, h2);
            reduced(sp, f, l, true, (-2.0, 2.0), rect)
        }
        "script-L3-fixed-slope" => {
            let e = g("eps");
            let slope = sign_of(g("sign"))? * c(e).sqrt();
            let c2 = g("C2");
            let f = scalar_profile(Box::new(move |xi| Ok(linear_jet(slope, c(c2))(xi))));
            let kind = g("psi") as u8;
            free_profile(kind, 0.0)?;
            let l = odd_profile(e1, Box::new(move |xi| free_profile(kind, xi)));
            let sp = spec(SubalgebraId::ScriptL3, eps_of(e)?).with_etas(h1, ctx.zero());
            reduced(sp, f, l, true, (-2.0, 2.0), rect)
        }
        "transcendental-omega" => {
            let c1 = g("C1");
            let ctx2 = ctx.clone();
            let omega: OmegaCandidate = Arc::new(move |y| transcendental_omega(&ctx2, y, c1));
            Built::Omega {
                family: OmegaFamily::ScriptL2,
                omega,
                params: OmegaParams { eps: minus, m: 1.0, n: 1.0, eta1: h1, eta2: h2 },
                range: (-2.0, 2.0),
            }
        }
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    Ok(Instance { info, params: p, ctx, built })
}

/// Result of an entry's own residual check.
#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub id: String,
    pub classification: Classification,
    /// Largest reduced (or first-order) residual over the ξ samples.
    pub reduced_max: f64,
    /// Largest full-equation residual of the lifted fields, when liftable.
    pub lifted_max: Option<f64>,
    /// Mean over every reduced and lifted sample.
    pub mean_residual: f64,
    pub samples: usize,
    pub excluded: usize,
    pub tol: f64,
    pub passed: bool,
}

impl GateReport {
    pub fn worst(&self) -> f64 {
        self.reduced_max.max(self.lifted_max.unwrap_or(0.0))
    }
}

/// `n` evenly spaced points of `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n × n` plane samples of an entry's domain.
pub fn plane_grid(plane: PlaneDomain, xi_range: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    match plane {
        PlaneDomain::Dilation { y } => linspace(xi_range.0, xi_range.1, n)
            .into_iter()
            .flat_map(|xi| linspace(y.0, y.1, n).into_iter().map(move |yv| (xi * yv, yv)))
            .collect(),
        PlaneDomain::Rectangle { x, y } => linspace(x.0, x.1, n)
            .into_iter()
            .flat_map(|xv| linspace(y.0, y.1, n).into_iter().map(move |yv| (xv, yv)))
            .collect(),
    }
}

/// Runs the entry's residual check: the reduced equations on `n` ξ-samples
/// and, for liftable entries, the full equations on an `n × n` plane grid
/// restricted to the entry's ξ-range.
pub fn check(inst: &Instance, n: usize, tol: f64, cfg: &DiffConfig) -> Result<GateReport> {
    let mut rep = GateReport {
        id: inst.info.id.to_string(),
        classification: inst.info.classification,
        reduced_max: 0.0,
        lifted_max: None,
        mean_residual: 0.0,
        samples: 0,
        excluded: 0,
        tol,
        passed: false,
    };
    let (mut sum, mut count) = (0.0, 0usize);
    match &inst.built {
        Built::Reduced { spec, rc, liftable, xi_range, plane, singular } => {
            for xi in linspace(xi_range.0, xi_range.1, n) {
                if !clear_of(singular, xi) {
                    rep.excluded += 1;
                    continue;
                }
                match reduced_residual(spec, rc, xi) {
                    Ok(r) => {
                        rep.reduced_max = rep.reduced_max.max(r.max_abs());
                        sum += r.max_abs();
                        count += 1;
                        rep.samples += 1;
                    }
                    Err(Error::Domain(_) | Error::SingularPath { .. }) => rep.excluded += 1,
                    Err(e) => return Err(e),
                }
            }
            if *liftable {
                let inside = |pt: &(f64, f64)| {
                    symmetry_variable(spec, *pt)
                        .is_ok_and(|xi| xi >= xi_range.0 - 1e-12 && xi <= xi_range.1 + 1e-12 && clear_of(singular, xi))
                };
                let pts: Vec<_> = plane_grid(*plane, *xi_range, n).into_iter().filter(inside).collect();
                let lr = lift_verify(spec, rc, &pts, cfg)?;
                rep.lifted_max = Some(lr.max_residual);
                rep.excluded += lr.excluded;
                sum += lr.mean_residual * lr.points as f64;
                count += lr.points;
            }
        }
        Built::Omega { family, omega, params, range } => {
            for t in linspace(range.0, range.1, n) {
                let r = omega_residual(*family, omega, t, params, OmegaForm::Printed)?.max_abs();
                rep.reduced_max = rep.reduced_max.max(r);
                sum += r;
                count += 1;
                rep.samples += 1;
            }
        }
        Built::Density { phi, c1 } => {
            for (x, y) in plane_grid(PlaneDomain::Dilation { y: (0.5, 1.5) }, (-3.0, 3.0), n) {
                let (rho, u, v) = density_and_velocity(phi, (x, y), cfg)?;
                let (pr, pu, pv) = printed_kink_density(x, y, *c1);
                let r = (rho - pr).abs().max((u - pu).abs()).max((v - pv).abs());
                rep.reduced_max = rep.reduced_max.max(r);
                sum += r;
                count += 1;
                rep.samples += 1;
            }
        }
    }
    if count > 0 {
        rep.mean_residual = sum / count as f64;
    }
    rep.passed = rep.worst() <= tol && rep.samples > 0;
    Ok(rep)
}

/// Real group parameters of [`symmetry_check`]; the ψ-shifts use the same
/// values times the odd constant `K2`.
pub const GROUP_PARAMS: [f64; 5] = [-0.3, -0.15, 0.1, 0.2, 0.35];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryStatus {
    Pass,
    Fail,
    /// An action outside the symmetry algebra broke the solution, as expected.
    XfailConfirmed,
    /// An action outside the symmetry algebra happened to preserve it.
    XfailNotObserved,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryEntry {
    pub generator: &'static str,
    pub action: &'static str,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub points: usize,
    pub status: SymmetryStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub id: String,
    pub equation: String,
    pub entries: Vec<SymmetryEntry>,
}

impl SymmetryReport {
    /// Every expected symmetry preserved the solution.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != SymmetryStatus::Fail)
    }

    pub fn entry(&self, generator: &str) -> Option<&SymmetryEntry> {
        self.entries.iter().find(|e| e.generator == generator)
    }
}

/// Generators acting on solutions of a row, with a flag for those expected
/// to fail: the rotation is applied to `ε = −1` classical solutions as a
/// control.
fn applicable(classical: bool, eps: Epsilon) -> Vec<(&'static str, FiniteAction, bool)> {
    let (algebra, names): (Algebra, Vec<&'static str>) = if classical {
        (Algebra::Classical, classical_generators(eps).iter().map(|g| static_name(&g.label)).collect())
    } else {
        (Algebra::Susy, susy_generators().iter().map(|g| static_name(&g.label)).collect())
    };
    let mut out: Vec<_> = names
        .into_iter()
        .map(|n| (n, FiniteAction::for_generator(algebra, n).expect("every generator has an action"), false))
        .collect();
    if classical && eps == Epsilon::Minus {
        out.push(("M", FiniteAction::Rotation, true));
    }
    out
}

fn static_name(label: &str) -> &'static str {
    ["S", "M", "T1", "T2", "T3", "P1", "P2", "Z", "Y", "Q1", "Q2"]
        .into_iter()
        .find(|n| *n == label)
        .expect("generator labels are fixed")
}

/// Applies every applicable finite action, at each of [`GROUP_PARAMS`], to a
/// plane solution and checks the image against the same equation on an
/// `n × n` grid. Points whose preimage leaves the entry's chart are dropped
/// per action. Returns `None` for entries that are not plane solutions.
pub fn symmetry_check(inst: &Instance, n: usize, tol: f64, cfg: &DiffConfig) -> Result<Option<SymmetryReport>> {
    type Inside = Box<dyn Fn(f64, f64) -> bool>;
    let (phi, psi, classical, eps, inside, grid): (_, _, _, _, Inside, _) = match &inst.built {
        Built::Reduced { spec, rc, liftable: true, xi_range, plane, singular } => {
            let (phi, psi) = lift(spec, rc)?;
            let (sp, r, sing) = (spec.clone(), *xi_range, singular.clone());
            let inside = move |x: f64, y: f64| {
                symmetry_variable(&sp, (x, y)).is_ok_and(|xi| xi >= r.0 && xi <= r.1 && clear_of(&sing, xi))
            };
            (phi, psi, spec.id.is_classical(), spec.eps, Box::new(inside), plane_grid(*plane, *xi_range, n))
        }
        Built::Density { phi, .. } => {
            let zero = FieldCandidate::zero("0", &inst.ctx);
            let grid = plane_grid(PlaneDomain::Dilation { y: (0.5, 1.5) }, (-3.0, 3.0), n);
            (phi.field().clone(), zero, true, Epsilon::Plus, Box::new(|_, y| y > 0.2 && y < 2.0), grid)
        }
        _ => return Ok(None),
    };
    sweep(inst, phi, psi, classical, eps, inside, grid, tol, cfg).map(Some)
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    inst: &Instance,
    phi: FieldCandidate,
    psi: FieldCandidate,
    classical: bool,
    eps: Epsilon,
    inside: Box<dyn Fn(f64, f64) -> bool>,
    grid: Vec<(f64, f64)>,
    tol: f64,
    cfg: &DiffConfig,
) -> Result<SymmetryReport> {
    let eq = if classical { Equation::Classical(eps) } else { Equation::Susy(SusyParams::special(eps)) };
    let base: Vec<_> = grid.into_iter().filter(|p| inside(p.0, p.1)).collect();
    let k2 = odd(&inst.ctx, "K2")?;
    let zero = inst.ctx.zero();
    let mut entries = Vec::new();
    for (generator, action, expect_fail) in applicable(classical, eps) {
        let params: Vec<ActionParam> = if action.odd_parameter() {
            GROUP_PARAMS.iter().map(|&t| ActionParam::Odd(k2.scale(t))).collect()
        } else {
            GROUP_PARAMS.iter().map(|&t| ActionParam::Real(t)).collect()
        };
        let pts: Vec<(f64, f64)> = base
            .iter()
            .copied()
            .filter(|&(x, y)| {
                action.odd_parameter()
                    || GROUP_PARAMS.iter().all(|&t| {
                        action
                            .map_point(&ActionParam::Real(-t), x, y, &zero, &zero)
                            .is_ok_and(|(x0, y0, _, _)| inside(x0, y0))
                    })
            })
            .collect();
        let (max_residual, mean_residual, error) = if pts.is_empty() {
            (0.0, 0.0, Some("no grid point keeps its preimage inside the chart".to_string()))
        } else {
            match invariance_sweep(&phi, &psi, eq, &[action], &params, &pts, tol, cfg) {
                Ok(r) => (r.entries[0].max_residual, r.entries[0].mean_residual, r.entries[0].error.clone()),
                Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
            }
        };
        let ok = error.is_none() && max_residual <= tol;
        let status = match (expect_fail, ok) {
            (false, true) => SymmetryStatus::Pass,
            (false, false) => SymmetryStatus::Fail,
            (true, false) if error.is_none() => SymmetryStatus::XfailConfirmed,
            (true, false) => SymmetryStatus::Fail,
            (true, true) => SymmetryStatus::XfailNotObserved,
        };
        entries.push(SymmetryEntry {
            generator,
            action: action.label(),
            max_residual,
            mean_residual,
            points: pts.len(),
            status,
            error,
        });
    }
    let equation = match eq {
        Equation::Classical(e) => format!("classical eps={}", e.value()),
        Equation::Susy(p) => format!("susy a=b=c=d=0 eps={}", p.eps.value()),
    };
    Ok(SymmetryReport { id: inst.info.id.to_string(), equation, entries })
}

/// Builds and checks an entry. Exact entries that fail their check are
/// refused; verbatim-suspect entries are returned with their report.
pub fn serve(id: &str, params: &Params, n: usize, tol: f64, cfg: &DiffConfig) -> Result<(Instance, GateReport)> {
    let inst = build(id, params, cfg)?;
    let rep = check(&inst, n, tol, cfg)?;
    if !rep.passed && inst.info.classification == Classification::Exact {
        return Err(Error::GateFailed { id: id.to_string(), residual: rep.worst(), tol });
    }
    Ok((inst, rep))
}

/// `(ρ, u, v) = (e^{−u²−v²}, Re φ_x, Re φ_y)`.
pub fn density_and_velocity(phi: &ClassicalField, point: (f64, f64), cfg: &DiffConfig) -> Result<(f64, f64, f64)> {
    let u = partial(phi.field(), point, (1, 0), cfg)?.value.body().re;
    let v = partial(phi.field(), point, (0, 1), cfg)?.value.body().re;
    Ok(((-u * u - v * v).exp(), u, v))
}

/// Printed density and velocity of the kink for `y > 0`.
pub fn printed_kink_density(x: f64, y: f64, c1: f64) -> (f64, f64, f64) {
    let r = (x * x + y * y).sqrt();
    let b = (x / y).atan() + c1;
    ((-(1.0 + b * b)).exp(), x / r * b + y / r, y / r * b - x / r)
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub c1: f64,
    /// Density approached along rays hugging the positive x-axis from above.
    pub limit_positive_x: f64,
    /// Density approached along rays hugging the negative x-axis from above.
    pub limit_negative_x: f64,
    pub expected_positive_x: f64,
    pub expected_negative_x: f64,
    pub limit_error: f64,
    /// Largest `|ρ(r₁, θ) − ρ(r₂, θ)|` over the sampled angles and radii.
    pub angular_spread: f64,
}

/// Compares the kink density near the x-axis with `e^{−(1+(±π/2+C₁)²)}` and
/// checks that it depends on the polar angle only.
pub fn kink_asymptotics_check(c1: f64, cfg: &DiffConfig) -> Result<AsymptoticsReport> {
    let inst = build("density-kink", &Params::default().with("C1", c1), cfg)?;
    let Built::Density { phi, .. } = &inst.built else { unreachable!("density entry") };
    let at = |r: f64, th: f64| density_and_velocity(phi, (r * th.cos(), r * th.sin()), cfg).map(|d| d.0);
    let delta = 1e-9;
    let (pos, neg) = (at(1.0, delta)?, at(1.0, std::f64::consts::PI - delta)?);
    let expected = |a: f64| (-(1.0 + (a + c1) * (a + c1))).exp();
    let (ep, en) = (expected(FRAC_PI_2), expected(-FRAC_PI_2));
    let mut spread: f64 = 0.0;
    for th in linspace(0.2, 2.9, 10) {
        let base = at(1.0, th)?;
        for r in [0.3, 2.0, 7.5] {
            spread = spread.max((at(r, th)? - base).abs());
        }
    }
    Ok(AsymptoticsReport {
        c1,
        limit_positive_x: pos,
        limit_negative_x: neg,
        expected_positive_x: ep,
        expected_negative_x: en,
        limit_error: (pos - ep).abs().max((neg - en).abs()),
        angular_spread: spread,
    })
}
