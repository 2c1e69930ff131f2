//! Point-symmetry generators, their brackets and the commutation tables, plus
//! closed-form finite actions on solutions.
//!
//! Generator coefficients are polynomials in `(x, y, φ, ψ)`. Every generator
//! in both tables has real coefficients and is at most linear in the odd
//! variable ψ, so the coefficient ring is modeled as real polynomials with the
//! rule ψ² = 0. Brackets are the ordinary `X(Yʲ) − Y(Xʲ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{all_indices, partial, DiffConfig, FieldCandidate, MultiIndex};
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannNumber, Parity};
use crate::pde::{classical_residual, susy_residuals, ClassicalField};
use crate::superfield::{Epsilon, SusyParams};

/// Exponents of `(x, y, φ, ψ)`.
pub type Exponents = [u8; 4];

/// Canonical sparse polynomial: sorted monomials, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(BTreeMap<Exponents, f64>);

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, [0, 0, 0, 0])
    }

    pub fn monomial(c: f64, e: Exponents) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(1.0, e)
    }

    fn add_term(&mut self, e: Exponents, c: f64) {
        if e[3] > 1 {
            return;
        }
        let v = self.0.entry(e).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.0.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u8 {
        self.0.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &f64)> {
        self.0.iter()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.0 {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.0 {
            out.add_term(*e, c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn diff(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.0 {
            if e[var] > 0 {
                let mut f = *e;
                f[var] -= 1;
                out.add_term(f, c * e[var] as f64);
            }
        }
        out
    }

    pub fn eval(&self, v: [f64; 4]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * (0..4).map(|i| v[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }
}

const VARS: [&str; 4] = ["x", "y", "phi", "psi"];

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(e, c)| {
                let mut s = format!("{c}");
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("·{}", VARS[i])),
                        _ => s.push_str(&format!("·{}^{k}", VARS[i])),
                    }
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Vector field `ξ¹∂x + ξ²∂y + ξ³∂φ + ξ⁴∂ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryGenerator {
    pub label: String,
    pub coeffs: [Poly; 4],
}

impl SymmetryGenerator {
    pub fn new(label: impl Into<String>, coeffs: [Poly; 4]) -> Self {
        Self { label: label.into(), coeffs }
    }

    pub fn zero() -> Self {
        Self::new("0", Default::default())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = std::array::from_fn(|i| self.coeffs[i].add(&other.coeffs[i]));
        Self::new(format!("{} + {}", self.label, other.label), coeffs)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(format!("{k}·{}", self.label), std::array::from_fn(|i| self.coeffs[i].scale(k)))
    }

    /// Applies the field as a derivation to a polynomial.
    pub fn apply(&self, p: &Poly) -> Poly {
        (0..4).fold(Poly::zero(), |acc, i| acc.add(&self.coeffs[i].mul(&p.diff(i))))
    }

    /// Same coefficients, labels ignored.
    pub fn same_field(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Display for SymmetryGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..4)
            .filter(|&i| !self.coeffs[i].is_zero())
            .map(|i| format!("({})∂{}", self.coeffs[i], VARS[i]))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `[X, Y]ʲ = X(Yʲ) − Y(Xʲ)`.
pub fn bracket(x: &SymmetryGenerator, y: &SymmetryGenerator) -> SymmetryGenerator {
    let coeffs = std::array::from_fn(|j| x.apply(&y.coeffs[j]).add(&y.apply(&x.coeffs[j]).scale(-1.0)));
    SymmetryGenerator::new(format!("[{}, {}]", x.label, y.label), coeffs)
}

fn field(label: &str, terms: [Poly; 4]) -> SymmetryGenerator {
    SymmetryGenerator::new(label, terms)
}

fn v(i: usize) -> Poly {
    Poly::var(i)
}

fn one() -> Poly {
    Poly::constant(1.0)
}

fn z() -> Poly {
    Poly::zero()
}

/// Generators of the classical algebra. With `ε = +1` these are
/// `S, M, T1, T2, T3`; with `ε = −1` the rotation is absent.
pub fn classical_generators(eps: Epsilon) -> Vec<SymmetryGenerator> {
    let mut out = vec![field("S", [v(0), v(1), v(2), z()])];
    if eps == Epsilon::Plus {
        out.push(field("M", [v(1).scale(-1.0), v(0), z(), z()]));
    }
    out.push(field("T1", [one(), z(), z(), z()]));
    out.push(field("T2", [z(), one(), z(), z()]));
    out.push(field("T3", [z(), z(), one(), z()]));
    out
}

/// `S, P1, P2, Z, Y, Q1, Q2` of the supersymmetric system.
pub fn susy_generators() -> Vec<SymmetryGenerator> {
    vec![
        field("S", [v(0), v(1), v(2), v(3).scale(1.5)]),
        field("P1", [one(), z(), z(), z()]),
        field("P2", [z(), one(), z(), z()]),
        field("Z", [z(), z(), one(), z()]),
        field("Y", [z(), z(), z(), one()]),
        field("Q1", [z(), z(), z(), v(0)]),
        field("Q2", [z(), z(), z(), v(1)]),
    ]
}

/// Which commutation table to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algebra {
    Classical,
    Susy,
}

type Cell = &'static [(f64, &'static str)];

const CLASSICAL_TABLE: [[Cell; 5]; 5] = [
    [&[], &[], &[(-1.0, "T1")], &[(-1.0, "T2")], &[(-1.0, "T3")]],
    [&[], &[], &[(-1.0, "T2")], &[(1.0, "T1")], &[]],
    [&[(1.0, "T1")], &[(1.0, "T2")], &[], &[], &[]],
    [&[(1.0, "T2")], &[(-1.0, "T1")], &[], &[], &[]],
    [&[(1.0, "T3")], &[], &[], &[], &[]],
];

const SUSY_TABLE: [[Cell; 7]; 7] = [
    [&[], &[(-1.0, "P1")], &[(-1.0, "P2")], &[(-1.0, "Z")], &[(-1.5, "Y")], &[(-0.5, "Q1")], &[(-0.5, "Q2")]],
    [&[(1.0, "P1")], &[], &[], &[], &[], &[(1.0, "Y")], &[]],
    [&[(1.0, "P2")], &[], &[], &[], &[], &[], &[(1.0, "Y")]],
    [&[(1.0, "Z")], &[], &[], &[], &[], &[], &[]],
    [&[(1.5, "Y")], &[], &[], &[], &[], &[], &[]],
    [&[(0.5, "Q1")], &[(-1.0, "Y")], &[], &[], &[], &[], &[]],
    [&[(0.5, "Q2")], &[], &[(-1.0, "Y")], &[], &[], &[], &[]],
];

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub row: String,
    pub col: String,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub algebra: Algebra,
    pub cells: Vec<TableCell>,
    pub matched: usize,
    pub total: usize,
    /// Whether every printed cell is minus its transpose.
    pub printed_antisymmetric: bool,
}

impl TableReport {
    pub fn all_match(&self) -> bool {
        self.matched == self.total && self.printed_antisymmetric
    }
}

fn combination(cell: Cell, basis: &[SymmetryGenerator]) -> SymmetryGenerator {
    cell.iter().fold(SymmetryGenerator::zero(), |acc, (k, name)| {
        let g = basis.iter().find(|g| g.label == *name).expect("table names a basis element");
        acc.add(&g.scale(*k))
    })
}

fn describe(cell: Cell) -> String {
    if cell.is_empty() {
        return "0".into();
    }
    cell.iter().map(|(k, n)| format!("{k}·{n}")).collect::<Vec<_>>().join(" + ")
}

/// Compares every printed cell with the computed bracket, by exact
/// polynomial equality.
pub fn verify_table(algebra: Algebra) -> TableReport {
    let (basis, rows): (Vec<SymmetryGenerator>, Vec<Vec<Cell>>) = match algebra {
        Algebra::Classical => (classical_generators(Epsilon::Plus), CLASSICAL_TABLE.iter().map(|r| r.to_vec()).collect()),
        Algebra::Susy => (susy_generators(), SUSY_TABLE.iter().map(|r| r.to_vec()).collect()),
    };
    let mut cells = Vec::new();
    for (i, gi) in basis.iter().enumerate() {
        for (j, gj) in basis.iter().enumerate() {
            let computed = bracket(gi, gj);
            let expected = combination(rows[i][j], &basis);
            cells.push(TableCell {
                row: gi.label.clone(),
                col: gj.label.clone(),
                expected: describe(rows[i][j]),
                computed: computed.to_string(),
                matches: computed.same_field(&expected),
            });
        }
    }
    let n = basis.len();
    let printed_antisymmetric = (0..n).all(|i| {
        (0..n).all(|j| {
            let a = combination(rows[i][j], &basis);
            let b = combination(rows[j][i], &basis).scale(-1.0);
            a.same_field(&b)
        })
    });
    let matched = cells.iter().filter(|c| c.matches).count();
    TableReport { algebra, total: cells.len(), matched, cells, printed_antisymmetric }
}

/// Largest Jacobi defect `[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]` over all triples,
/// measured as the number of nonzero results.
pub fn jacobi_violations(basis: &[SymmetryGenerator]) -> usize {
    let mut bad = 0;
    for a in basis {
        for b in basis {
            for c in basis {
                let s = bracket(&bracket(a, b), c).add(&bracket(&bracket(b, c), a)).add(&bracket(&bracket(c, a), b));
                if !s.is_zero() {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// Coefficients expressing `g` in `span`, or `None` if `g` is not in the span.
/// Uses Gaussian elimination on the monomial coefficients and then checks the
/// reconstruction exactly.
pub fn span_coefficients(g: &SymmetryGenerator, span: &[SymmetryGenerator]) -> Option<Vec<f64>> {
    let mut keys: Vec<(usize, Exponents)> = Vec::new();
    for s in span.iter().chain(std::iter::once(g)) {
        for (i, p) in s.coeffs.iter().enumerate() {
            for (e, _) in p.terms() {
                if !keys.contains(&(i, *e)) {
                    keys.push((i, *e));
                }
            }
        }
    }
    let coeff = |s: &SymmetryGenerator, (i, e): (usize, Exponents)| s.coeffs[i].0.get(&e).copied().unwrap_or(0.0);
    let n = span.len();
    let mut rows: Vec<Vec<f64>> = keys
        .iter()
        .map(|&k| {
            let mut r: Vec<f64> = span.iter().map(|s| coeff(s, k)).collect();
            r.push(coeff(g, k));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for col in 0..n {
        let Some(p) = (r0..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[p][col].abs() < 1e-12 {
            continue;
        }
        rows.swap(r0, p);
        let piv = rows[r0][col];
        for k in col..=n {
            rows[r0][k] /= piv;
        }
        for r in 0..rows.len() {
            if r != r0 && rows[r][col] != 0.0 {
                let f = rows[r][col];
                for k in col..=n {
                    rows[r][k] -= f * rows[r0][k];
                }
            }
        }
        pivots.push(col);
        r0 += 1;
    }
    let mut sol = vec![0.0; n];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = rows[r][n];
    }
    let recon = span.iter().zip(&sol).fold(SymmetryGenerator::zero(), |acc, (s, k)| acc.add(&s.scale(*k)));
    recon.same_field(g).then_some(sol)
}

/// Derived algebra `[g, g]` as the list of nonzero brackets.
pub fn derived(basis: &[SymmetryGenerator]) -> Vec<SymmetryGenerator> {
    let mut out = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let c = bracket(a, b);
            if !c.is_zero() {
                out.push(c);
            }
        }
    }
    out
}

/// Group parameter of a finite action.
#[derive(Debug, Clone)]
pub enum ActionParam {
    Real(f64),
    Odd(GrassmannNumber),
}

/// Affine description of a finite action; see [`FiniteAction::act`].
struct Affine {
    m: [[f64; 2]; 2],
    c: [f64; 2],
    phi_scale: f64,
    phi_shift: f64,
    psi_scale: f64,
    psi_shift: [GrassmannNumber; 3],
}

/// `∂xⁱ∂yʲ` of `f(M·x + c)` as `Σ w·(∂₁ᵃ∂₂ᵇ f)`, expanding
/// `(m₀₀∂₁ + m₁₀∂₂)ⁱ(m₀₁∂₁ + m₁₁∂₂)ʲ`.
fn chain_terms(m: [[f64; 2]; 2], idx: MultiIndex) -> Vec<(MultiIndex, f64)> {
    let mut poly: BTreeMap<MultiIndex, f64> = BTreeMap::from([((0, 0), 1.0)]);
    let factors = std::iter::repeat_n((m[0][0], m[1][0]), idx.0 as usize).chain(std::iter::repeat_n((m[0][1], m[1][1]), idx.1 as usize));
    for (p, q) in factors {
        let mut next = BTreeMap::new();
        for (&(a, b), &w) in &poly {
            for (k, (da, db)) in [(p, (1, 0)), (q, (0, 1))] {
                if k != 0.0 {
                    *next.entry((a + da, b + db)).or_insert(0.0) += w * k;
                }
            }
        }
        poly = next;
    }
    poly.into_iter().collect()
}

/// Closed-form one-parameter groups of the listed generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiniteAction {
    TranslateX,
    TranslateY,
    ShiftPhi,
    /// `x, y, φ` scale by `e^t`, ψ by `e^{wt}` with the given weight in halves.
    Dilation { psi_weight_halves: i8 },
    Rotation,
    ShiftPsi,
    ShiftPsiX,
    ShiftPsiY,
}

impl FiniteAction {
    pub fn label(&self) -> &'static str {
        match self {
            FiniteAction::TranslateX => "translate-x",
            FiniteAction::TranslateY => "translate-y",
            FiniteAction::ShiftPhi => "shift-phi",
            FiniteAction::Dilation { .. } => "dilation",
            FiniteAction::Rotation => "rotation",
            FiniteAction::ShiftPsi => "shift-psi",
            FiniteAction::ShiftPsiX => "shift-psi-x",
            FiniteAction::ShiftPsiY => "shift-psi-y",
        }
    }

    /// The action generated by a named generator of `algebra`.
    pub fn for_generator(algebra: Algebra, name: &str) -> Result<Self> {
        Ok(match name {
            "S" if algebra == Algebra::Classical => FiniteAction::Dilation { psi_weight_halves: 0 },
            "T1" | "P1" => FiniteAction::TranslateX,
            "T2" | "P2" => FiniteAction::TranslateY,
            "T3" | "Z" => FiniteAction::ShiftPhi,
            "S" => FiniteAction::Dilation { psi_weight_halves: 3 },
            "M" => FiniteAction::Rotation,
            "Y" => FiniteAction::ShiftPsi,
            "Q1" => FiniteAction::ShiftPsiX,
            "Q2" => FiniteAction::ShiftPsiY,
            other => return Err(Error::UnknownEntry(format!("no finite action for generator `{other}`"))),
        })
    }

    pub fn odd_parameter(&self) -> bool {
        matches!(self, FiniteAction::ShiftPsi | FiniteAction::ShiftPsiX | FiniteAction::ShiftPsiY)
    }

    fn real(&self, t: &ActionParam) -> Result<f64> {
        match (t, self.odd_parameter()) {
            (ActionParam::Real(t), false) => Ok(*t),
            _ => Err(Error::Parity(format!("`{}` needs a real group parameter", self.label()))),
        }
    }

    fn odd(&self, t: &ActionParam) -> Result<GrassmannNumber> {
        match (t, self.odd_parameter()) {
            (ActionParam::Odd(e), true) if e.parity() == Parity::Odd || e.is_zero() => Ok(e.clone()),
            _ => Err(Error::Parity(format!("`{}` needs an odd group parameter", self.label()))),
        }
    }

    /// Image of the point `(x, y, φ, ψ)`.
    pub fn map_point(
        &self,
        t: &ActionParam,
        x: f64,
        y: f64,
        phi: &GrassmannNumber,
        psi: &GrassmannNumber,
    ) -> Result<(f64, f64, GrassmannNumber, GrassmannNumber)> {
        Ok(match self {
            FiniteAction::TranslateX => (x + self.real(t)?, y, phi.clone(), psi.clone()),
            FiniteAction::TranslateY => (x, y + self.real(t)?, phi.clone(), psi.clone()),
            FiniteAction::ShiftPhi => (x, y, phi + self.real(t)?, psi.clone()),
            FiniteAction::Dilation { psi_weight_halves } => {
                let t = self.real(t)?;
                let k = t.exp();
                (k * x, k * y, phi.scale(k), psi.scale((t * *psi_weight_halves as f64 / 2.0).exp()))
            }
            FiniteAction::Rotation => {
                let t = self.real(t)?;
                let (s, c) = t.sin_cos();
                (c * x - s * y, s * x + c * y, phi.clone(), psi.clone())
            }
            FiniteAction::ShiftPsi => (x, y, phi.clone(), psi.try_add(&self.odd(t)?)?),
            FiniteAction::ShiftPsiX => (x, y, phi.clone(), psi.try_add(&self.odd(t)?.scale(x))?),
            FiniteAction::ShiftPsiY => (x, y, phi.clone(), psi.try_add(&self.odd(t)?.scale(y))?),
        })
    }

    /// The action as `x₀ = M·x + c` for the preimage of a point, with
    /// `φ' = a_φ·φ(x₀) + b_φ` and `ψ' = a_ψ·ψ(x₀) + β₀ + β₁x + β₂y`.
    fn affine(&self, t: &ActionParam, ctx: &Arc<crate::GeneratorSet>) -> Result<Affine> {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let mut a = Affine { m: id, c: [0.0; 2], phi_scale: 1.0, phi_shift: 0.0, psi_scale: 1.0, psi_shift: [ctx.zero(), ctx.zero(), ctx.zero()] };
        match self {
            FiniteAction::TranslateX => a.c[0] = -self.real(t)?,
            FiniteAction::TranslateY => a.c[1] = -self.real(t)?,
            FiniteAction::ShiftPhi => a.phi_shift = self.real(t)?,
            FiniteAction::Dilation { psi_weight_halves } => {
                let t = self.real(t)?;
                let k = t.exp();
                a.m = [[1.0 / k, 0.0], [0.0, 1.0 / k]];
                a.phi_scale = k;
                a.psi_scale = (t * *psi_weight_halves as f64 / 2.0).exp();
            }
            FiniteAction::Rotation => {
                let (sn, cs) = self.real(t)?.sin_cos();
                a.m = [[cs, sn], [-sn, cs]];
            }
            FiniteAction::ShiftPsi => a.psi_shift[0] = self.odd(t)?,
            FiniteAction::ShiftPsiX => a.psi_shift[1] = self.odd(t)?,
            FiniteAction::ShiftPsiY => a.psi_shift[2] = self.odd(t)?,
        }
        Ok(a)
    }

    /// Transformed solution: the graph of `(φ, ψ)` mapped pointwise, read
    /// back as functions of the new coordinates. Derivatives of the image up
    /// to order 3 are registered by the chain rule from derivatives of the
    /// source at the preimage, so the image is never differenced directly.
    pub fn act(
        &self,
        phi: &FieldCandidate,
        psi: &FieldCandidate,
        t: &ActionParam,
        cfg: &DiffConfig,
    ) -> Result<(FieldCandidate, FieldCandidate)> {
        let ctx = if phi.context().len() >= psi.context().len() { phi.context() } else { psi.context() };
        let a = Arc::new(self.affine(t, ctx)?);
        let image = |f: &FieldCandidate, scale: f64, shift: [GrassmannNumber; 3]| -> FieldCandidate {
            let mk = |idx: MultiIndex| {
                let (f, a, shift, cfg) = (f.clone(), a.clone(), shift.clone(), *cfg);
                move |x: f64, y: f64| -> Result<GrassmannNumber> {
                    let x0 = a.m[0][0] * x + a.m[0][1] * y + a.c[0];
                    let y0 = a.m[1][0] * x + a.m[1][1] * y + a.c[1];
                    let mut acc = f.context().zero();
                    for ((i, j), w) in chain_terms(a.m, idx) {
                        let d = if (i, j) == (0, 0) { f.eval(x0, y0)? } else { partial(&f, (x0, y0), (i, j), &cfg)?.value };
                        acc = acc.try_add(&d.scale(w * scale))?;
                    }
                    let extra = match idx {
                        (0, 0) => shift[0].try_add(&shift[1].scale(x))?.try_add(&shift[2].scale(y))?,
                        (1, 0) => shift[1].clone(),
                        (0, 1) => shift[2].clone(),
                        _ => return Ok(acc),
                    };
                    acc.try_add(&extra)
                }
            };
            let mut out = FieldCandidate::new(format!("{}({})", self.label(), f.label()), f.context(), mk((0, 0)));
            for idx in all_indices().filter(|&i| i != (0, 0)) {
                out = out.with_derivative(idx, mk(idx));
            }
            out
        };
        let z = ctx.zero();
        let phi_shift = [ctx.scalar(a.phi_shift), z.clone(), z];
        Ok((image(phi, a.phi_scale, phi_shift), image(psi, a.psi_scale, a.psi_shift.clone())))
    }

    /// Largest discrepancy between the t-derivative of the action at `t = 0`
    /// and the generator coefficients, over a few sample points.
    pub fn derivative_defect(&self, generator: &SymmetryGenerator, ctx: &Arc<crate::GeneratorSet>) -> Result<f64> {
        let samples = [(0.3, -0.7, 0.4, 0.9), (-1.1, 0.5, -0.2, 0.35), (0.8, 1.3, 1.7, -0.6)];
        let mut worst: f64 = 0.0;
        for (x, y, p, s) in samples {
            let phi = ctx.scalar(p);
            let vars = [x, y, p, s];
            if self.odd_parameter() {
                // ψ-shift by an odd constant η: the η-coefficient of ψ' − ψ
                let eta_idx = ctx.len().checked_sub(1).ok_or_else(|| Error::GeneratorSet("need one odd constant".into()))?;
                let eta = ctx.generator(eta_idx);
                let psi = ctx.zero();
                let (x1, y1, p1, s1) = self.map_point(&ActionParam::Odd(eta), x, y, &phi, &psi)?;
                let ds = s1.left_derivative(eta_idx);
                let got = [x1 - x, y1 - y, (&p1 - &phi).max_abs(), ds.body().re];
                for (j, g) in got.iter().enumerate() {
                    worst = worst.max((g - generator.coeffs[j].eval([x, y, p, 0.0])).abs());
                }
            } else {
                let psi = ctx.scalar(s);
                let h = 1e-4;
                let at = |t: f64| self.map_point(&ActionParam::Real(t), x, y, &phi, &psi);
                let (a1, a2, a3, a4) = (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?);
                let d = |f: fn(&(f64, f64, GrassmannNumber, GrassmannNumber)) -> f64| {
                    (8.0 * (f(&a1) - f(&a2)) - (f(&a3) - f(&a4))) / (12.0 * h)
                };
                let got = [d(|a| a.0), d(|a| a.1), d(|a| a.2.body().re), d(|a| a.3.body().re)];
                for (j, g) in got.iter().enumerate() {
                    worst = worst.max((g - generator.coeffs[j].eval(vars)).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Which equation a sweep checks.
#[derive(Debug, Clone, Copy)]
pub enum Equation {
    Classical(Epsilon),
    Susy(SusyParams),
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceEntry {
    pub action: &'static str,
    pub max_residual: f64,
    /// Mean over every parameter value and point.
    pub mean_residual: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub base_residual: f64,
    pub entries: Vec<InvarianceEntry>,
}

impl InvarianceReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, label: &str) -> Option<&InvarianceEntry> {
        self.entries.iter().find(|e| e.action == label)
    }
}

fn residual_at(eq: Equation, phi: &FieldCandidate, psi: &FieldCandidate, pt: (f64, f64), cfg: &DiffConfig) -> Result<f64> {
    match eq {
        Equation::Classical(eps) => Ok(classical_residual(&ClassicalField::new(phi.clone())?, eps, pt, cfg)?.norm()),
        Equation::Susy(p) => {
            let (b, f) = susy_residuals(phi, psi, &p, pt, cfg)?;
            Ok(b.value.max_abs().max(f.value.max_abs()))
        }
    }
}

/// Largest and summed residual over `points`.
fn residuals(eq: Equation, phi: &FieldCandidate, psi: &FieldCandidate, points: &[(f64, f64)], cfg: &DiffConfig) -> Result<(f64, f64)> {
    points.iter().try_fold((0.0f64, 0.0), |(m, s), &pt| {
        let r = residual_at(eq, phi, psi, pt, cfg)?;
        Ok((m.max(r), s + r))
    })
}

/// Applies each action with several parameter values and records the largest
/// residual of the transformed solution over `points`. The untransformed
/// solution must itself pass, otherwise the sweep is refused.
pub fn invariance_sweep(
    phi: &FieldCandidate,
    psi: &FieldCandidate,
    eq: Equation,
    actions: &[FiniteAction],
    params: &[ActionParam],
    points: &[(f64, f64)],
    tol: f64,
    cfg: &DiffConfig,
) -> Result<InvarianceReport> {
    let (base, _) = residuals(eq, phi, psi, points, cfg)?;
    if base > tol {
        return Err(Error::Config(format!("the input is not a solution (residual {base:e})")));
    }
    let mut entries = Vec::new();
    for action in actions {
        let (mut worst, mut sum, mut count) = (0.0f64, 0.0, 0usize);
        let mut error = None;
        for t in params.iter().filter(|t| matches!(t, ActionParam::Odd(_)) == action.odd_parameter()) {
            match action.act(phi, psi, t, cfg).and_then(|(p, s)| residuals(eq, &p, &s, points, cfg)) {
                Ok((m, s)) => {
                    worst = worst.max(m);
                    sum += s;
                    count += points.len();
                }
                Err(e) => {
                    error = Some(e.to_string());
                    break;
                }
            }
        }
        let mean_residual = if count > 0 { sum / count as f64 } else { 0.0 };
        entries.push(InvarianceEntry {
            action: action.label(),
            max_residual: worst,
            mean_residual,
            pass: error.is_none() && worst <= tol,
            error,
        });
    }
    Ok(InvarianceReport { base_residual: base, entries })
}
