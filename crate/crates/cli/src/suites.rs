//! Suite runners. Each suite is a list of independent jobs, run in parallel
//! and collected in order, so reports do not depend on scheduling.

use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use susyflow::calculus::{DiffConfig, FieldCandidate};
use susyflow::correspondences::*;
use susyflow::pde::{susy_special_bosonic, susy_special_fermionic};
use susyflow::reductions::*;
use susyflow::solutions::{self, build, check, symmetry_check, Built, Classification, Instance, Params, SymmetryStatus, CATALOG};
use susyflow::superfield::*;
use susyflow::symmetry::{classical_generators, jacobi_violations, susy_generators, verify_table, Algebra};
use susyflow::{Error, GeneratorSet};

use crate::config::{RunConfig, Suite};
use crate::report::{Check, CheckSpec, Stats, Status, SuiteReport};
use crate::sample;
use crate::{CliError, CliResult};

type Job<'a> = Box<dyn FnOnce() -> Vec<Check> + Send + 'a>;

fn run_jobs(jobs: Vec<Job<'_>>) -> Vec<Check> {
    jobs.into_par_iter().map(|j| j()).collect::<Vec<_>>().into_iter().flatten().collect()
}

fn job<'a, F: FnOnce() -> Vec<Check> + Send + 'a>(f: F) -> Job<'a> {
    Box::new(f)
}

/// Records one sample, counting chart and inversion failures as exclusions.
fn sample_into(stats: &mut Stats, r: susyflow::Result<f64>) -> Result<(), String> {
    match r {
        Ok(v) => {
            stats.push(v);
            Ok(())
        }
        Err(Error::Domain(_) | Error::Invertibility(_) | Error::SingularPath { .. }) => {
            stats.excluded += 1;
            Ok(())
        }
        Err(e) => Err(e.to_string()),
    }
}

fn sign_tag(e: Epsilon) -> &'static str {
    match e {
        Epsilon::Plus => "eps+1",
        Epsilon::Minus => "eps-1",
    }
}

/// Subalgebra rows and catalog entries named by `--id`. An empty selection
/// means everything; names that are neither are a configuration error.
pub struct Selection {
    pub rows: Vec<SubalgebraId>,
    pub entries: Vec<&'static str>,
}

impl Selection {
    pub fn from_ids(ids: &[String]) -> CliResult<Self> {
        let mut sel = Selection { rows: Vec::new(), entries: Vec::new() };
        for id in ids {
            if let Ok(e) = solutions::info(id) {
                sel.entries.push(e.id);
            } else if let Ok(r) = SubalgebraId::from_str(id) {
                sel.rows.push(r);
            } else {
                return Err(CliError::Config(format!("`{id}` is neither a subalgebra row nor a catalog entry")));
            }
        }
        Ok(sel)
    }

    fn row(&self, r: SubalgebraId) -> bool {
        self.rows.is_empty() || self.rows.contains(&r)
    }

    fn entry(&self, id: &str) -> bool {
        self.entries.is_empty() || self.entries.contains(&id)
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> CliResult<SuiteReport> {
    let sel = Selection::from_ids(&cfg.ids)?;
    let checks = match suite {
        Suite::Tables => tables(),
        Suite::Superfield => superfield(cfg),
        Suite::Susy => susy(cfg),
        Suite::Classical => classical(cfg, &sel),
        Suite::Reductions => reductions(cfg, &sel),
        Suite::Solutions => solutions_suite(cfg, &sel),
        Suite::Correspondences => correspondences(cfg),
        Suite::All => return Err(CliError::Config("`all` expands to the individual suites".into())),
    };
    Ok(SuiteReport::new(suite, checks))
}

// ---------------------------------------------------------------- tables

fn tables() -> Vec<Check> {
    let mut out = Vec::new();
    for (algebra, tag, anchor) in [
        (Algebra::Classical, "classical", "commutator table of the classical symmetry algebra"),
        (Algebra::Susy, "susy", "commutator table of the supersymmetric symmetry algebra"),
    ] {
        let rep = verify_table(algebra);
        for cell in rep.cells {
            let mut stats = Stats::default();
            stats.push(if cell.matches { 0.0 } else { 1.0 });
            let mut c = CheckSpec::new(format!("tables.{tag}.{}.{}", cell.row, cell.col), anchor, 0.0)
                .rule("exact polynomial equality")
                .finish(&stats, None);
            c.detail = Some(serde_json::json!({ "expected": cell.expected, "computed": cell.computed }));
            out.push(c);
        }
    }
    out
}

fn jacobi_check(id: String, anchor: &str, violations: usize) -> Check {
    let mut stats = Stats::default();
    stats.push(violations as f64);
    CheckSpec::new(id, anchor, 0.0).rule("number of generator triples with a nonzero Jacobi sum").finish(&stats, None)
}

// ------------------------------------------------------------ superfield

fn superfield(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tol.min(1e-8);
    let (lo, hi) = (cfg.grid.x.lo, cfg.grid.x.hi);
    let cases: [(&str, &str, u64); 3] = [
        ("superfield.d-squared", "D² equals the x-derivative on random polynomial superfields", 1),
        ("superfield.h-squared", "H² equals minus the x-derivative on random polynomial superfields", 2),
        ("superfield.anticommutator", "HD + DH vanishes on random polynomial superfields", 3),
    ];
    let jobs = cases
        .into_iter()
        .map(|(id, anchor, stream)| {
            job(move || {
                let c = CheckSpec::new(id, anchor, tol).run(|stats| {
                    let g = sample::context();
                    let d = cfg.diff;
                    let mut r = sample::rng(cfg.seed, stream);
                    for _ in 0..cfg.samples {
                        let (_, _, sf) = sample::superfield(&g, &mut r);
                        let pt = sample::point(&mut r, lo, hi);
                        let v = (|| -> susyflow::Result<f64> {
                            let dx = sf.value_at(pt, (1, 0), &d)?;
                            Ok(match stream {
                                1 => (&apply_d(&apply_d(&sf, &d)?, &d)?.value_at(pt, (0, 0), &d)? - &dx).max_abs(),
                                2 => (&apply_h(&apply_h(&sf, &d)?, &d)?.value_at(pt, (0, 0), &d)? + &dx).max_abs(),
                                _ => {
                                    let hd = apply_h(&apply_d(&sf, &d)?, &d)?.value_at(pt, (0, 0), &d)?;
                                    let dh = apply_d(&apply_h(&sf, &d)?, &d)?.value_at(pt, (0, 0), &d)?;
                                    (&hd + &dh).max_abs()
                                }
                            })
                        })();
                        sample_into(stats, v)?;
                    }
                    Ok(())
                });
                vec![c]
            })
        })
        .collect();
    run_jobs(jobs)
}

// ------------------------------------------------------------------ susy

fn susy(cfg: &RunConfig) -> Vec<Check> {
    let signs = cfg.signs();
    let (lo, hi) = (cfg.grid.x.lo, cfg.grid.x.hi);
    let mut jobs: Vec<Job> = Vec::new();
    let mut pr = sample::rng(cfg.seed, 10);
    for k in 0..5usize {
        let eps = signs[k % signs.len()];
        let p = match (k, cfg.params) {
            (0, Some([a, b, c, d])) => SusyParams::new(a, b, c, d, eps),
            _ => sample::susy_params(&mut pr, eps),
        };
        let anchor = format!(
            "θ-part and θ-free part of the superfield equation against the component equations (a={:.4}, b={:.4}, c={:.4}, d={:.4}, eps={})",
            p.a,
            p.b,
            p.c,
            p.d,
            eps.value()
        );
        jobs.push(job(move || {
            let c = CheckSpec::new(format!("susy.theta-decomposition.{k}"), anchor, cfg.tol).run(|stats| {
                let g = sample::context();
                let mut r = sample::rng(cfg.seed, 11 + k as u64);
                for _ in 0..cfg.samples {
                    let (_, _, sf) = sample::superfield(&g, &mut r);
                    let pt = sample::point(&mut r, lo, hi);
                    sample_into(stats, decompose_check(&sf, &p, &[pt], &cfg.diff).map(|d| d.max()))?;
                }
                Ok(())
            });
            vec![c]
        }));
    }
    for eps in signs.iter().copied() {
        jobs.push(job(move || {
            let anchor = "superfield equation with a = b = c = d = 0 against the special component system";
            let c = CheckSpec::new(format!("susy.special-system.{}", sign_tag(eps)), anchor, cfg.tol).run(|stats| {
                let g = sample::context();
                let mut r = sample::rng(cfg.seed, 20 + (eps.value() > 0.0) as u64);
                let p = SusyParams::special(eps);
                for _ in 0..cfg.samples {
                    let (phi, psi, sf) = sample::superfield(&g, &mut r);
                    let pt = sample::point(&mut r, lo, hi);
                    let v = (|| -> susyflow::Result<f64> {
                        let (bos, fer) = split_residual(&superfield_residual(&sf, &p, pt, &cfg.diff)?)?;
                        let sb = susy_special_bosonic(&phi, &psi, eps, pt, &cfg.diff)?.value;
                        let sfm = susy_special_fermionic(&phi, &psi, eps, pt, &cfg.diff)?.value;
                        Ok((&bos - &sb).max_abs().max((&fer - &sfm).max_abs()))
                    })();
                    sample_into(stats, v)?;
                }
                Ok(())
            });
            vec![c]
        }));
    }
    jobs.push(job(|| {
        vec![jacobi_check("susy.jacobi".into(), "Jacobi identity of the supersymmetric algebra", jacobi_violations(&susy_generators()))]
    }));
    run_jobs(jobs)
}

// ----------------------------------------------------------- catalog use

/// Entry parameters from `--set`, `--m`, `--n` and a sign, keeping only the
/// names the entry declares.
fn entry_params(cfg: &RunConfig, id: &str, eps: Option<Epsilon>) -> Params {
    let info = solutions::info(id).expect("catalog ids are fixed");
    let has = |n: &str| info.params.iter().any(|(k, _)| *k == n);
    let mut p = Params::default();
    for (k, v) in &cfg.set {
        if has(k) {
            p = p.with(k, *v);
        }
    }
    if let (Some(e), true) = (eps, has("eps")) {
        p = p.with("eps", e.value());
    }
    if let (Some(m), true) = (cfg.m, has("m")) {
        p = p.with("m", m);
    }
    if let (Some(n), true) = (cfg.n, has("n")) {
        p = p.with("n", n);
    }
    p
}

fn instance_sign(inst: &Instance) -> Epsilon {
    match &inst.built {
        Built::Reduced { spec, .. } => spec.eps,
        Built::Omega { params, .. } => params.eps,
        Built::Density { .. } => Epsilon::Plus,
    }
}

/// Gate check of one catalog instance.
fn gate(cfg: &RunConfig, check_id: String, inst: &Instance, expect_fail: bool) -> Check {
    let n = cfg.grid.x.n.max(cfg.grid.y.n);
    let spec = CheckSpec::new(check_id, inst.info.anchor, cfg.tol).expect_fail(expect_fail).rule(inst.info.domain);
    match check(inst, n, cfg.tol, &cfg.diff) {
        Ok(rep) => {
            let stats = Stats { max: rep.worst(), sum: rep.mean_residual * rep.samples as f64, n: rep.samples, excluded: rep.excluded };
            let mut c = spec.finish(&stats, None);
            c.detail = Some(serde_json::json!({
                "params": inst.params,
                "reduced_max": rep.reduced_max,
                "lifted_max": rep.lifted_max,
            }));
            c
        }
        Err(e) => spec.finish(&Stats::default(), Some(e.to_string())),
    }
}

fn built_gate(cfg: &RunConfig, check_id: String, id: &str, params: &Params, expect_fail: bool) -> Check {
    match build(id, params, &cfg.diff) {
        Ok(inst) => gate(cfg, check_id, &inst, expect_fail),
        Err(e) => {
            let info = solutions::info(id).expect("catalog ids are fixed");
            CheckSpec::new(check_id, info.anchor, cfg.tol).rule(info.domain).finish(&Stats::default(), Some(e.to_string()))
        }
    }
}

// ------------------------------------------------------------- classical

fn classical(cfg: &RunConfig, sel: &Selection) -> Vec<Check> {
    let mut jobs: Vec<Job> = Vec::new();
    let cases: [(&str, &str, Epsilon); 5] = [
        ("kink", "classical.kink", Epsilon::Plus),
        ("linear", "classical.linear.eps+1", Epsilon::Plus),
        ("linear", "classical.linear.eps-1", Epsilon::Minus),
        ("elliptic", "classical.elliptic", Epsilon::Minus),
        ("lambert", "classical.lambert", Epsilon::Plus),
    ];
    for (id, check_id, eps) in cases {
        if !cfg.wants_sign(eps) || !sel.entry(id) {
            continue;
        }
        jobs.push(job(move || vec![built_gate(cfg, check_id.into(), id, &entry_params(cfg, id, Some(eps)), false)]));
    }
    if cfg.wants_sign(Epsilon::Plus) && sel.entry("lambert") {
        jobs.push(job(move || vec![lambert_reduced(cfg)]));
    }
    for eps in cfg.signs() {
        jobs.push(job(move || {
            let anchor = format!("Jacobi identity of the classical algebra, eps = {}", eps.value());
            vec![jacobi_check(format!("classical.jacobi.{}", sign_tag(eps)), &anchor, jacobi_violations(&classical_generators(eps)))]
        }));
    }
    run_jobs(jobs)
}

/// Reduced residual of the Lambert entry on 200 points of `ξ ∈ [0.1, 5]`.
fn lambert_reduced(cfg: &RunConfig) -> Check {
    let spec = CheckSpec::new("classical.lambert.reduced", "reduced equation of the Lambert-function slope", cfg.tol.min(1e-8))
        .rule("xi in [0.1, 5]");
    spec.run(|stats| {
        let inst = build("lambert", &entry_params(cfg, "lambert", None), &cfg.diff).map_err(|e| e.to_string())?;
        let Built::Reduced { spec, rc, .. } = &inst.built else { return Err("the Lambert entry is not a reduced pair".into()) };
        for xi in solutions::linspace(0.1, 5.0, 200) {
            sample_into(stats, reduced_residual(spec, rc, xi).map(|r| r.max_abs()))?;
        }
        Ok(())
    })
}

// ------------------------------------------------------------ reductions

fn trig_exp(a: susyflow::GrassmannNumber, b: susyflow::GrassmannNumber, c: susyflow::GrassmannNumber, k: f64, p: f64, q: f64) -> Profile {
    profile_exact(move |x| {
        let (s, co, ex) = ((k * x + p).sin(), (k * x + p).cos(), (q * x).exp());
        Ok([
            &(&a + &b.scale(s)) + &c.scale(ex),
            &b.scale(k * co) + &c.scale(q * ex),
            &b.scale(-k * k * s) + &c.scale(q * q * ex),
        ])
    })
}

fn random_candidate(g: &Arc<GeneratorSet>, r: &mut rand_chacha::ChaCha8Rng, classical: bool) -> ReducedCandidate {
    let mut k = || r.gen_range(0.3..1.2);
    let (k1, p1, q1, k2, p2, q2) = (k(), k(), k() * 0.5, k(), k(), k() * 0.5);
    if classical {
        let mut body = || g.scalar(r.gen_range(-1.0..1.0));
        let (a, b, c) = (body(), body(), body());
        return ReducedCandidate::classical("random", g, trig_exp(a, b.scale(0.6), c.scale(0.2), k1, p1, q1));
    }
    let f = trig_exp(sample::even_constant(g, r), sample::even_constant(g, r).scale(0.6), sample::even_constant(g, r).scale(0.2), k1, p1, q1);
    let l = trig_exp(sample::odd_constant(g, r), sample::odd_constant(g, r), sample::odd_constant(g, r).scale(0.3), k2, p2, q2);
    ReducedCandidate::new("random", g, f, l)
}

fn row_spec(cfg: &RunConfig, id: SubalgebraId, eps: Epsilon, g: &Arc<GeneratorSet>, r: &mut rand_chacha::ChaCha8Rng) -> SubalgebraSpec {
    let (m, n) = (cfg.m.unwrap_or_else(|| sample::nonzero(r)), cfg.n.unwrap_or_else(|| sample::nonzero(r)));
    let (a, mu, c) = (sample::nonzero(r), sample::nonzero(r), sample::nonzero(r));
    SubalgebraSpec::new(id, eps, g)
        .with_m(m)
        .with_n(n)
        .with_a(a)
        .with_mu(mu)
        .with_c(c)
        .with_etas(g.generator(1), g.generator(2))
}

fn chart_point(r: &mut rand_chacha::ChaCha8Rng) -> (f64, f64) {
    let x: f64 = r.gen_range(0.2..1.5);
    (if r.gen_bool(0.5) { x } else { -x }, r.gen_range(0.2..1.5))
}

fn omega_family(id: SubalgebraId) -> Option<OmegaFamily> {
    [OmegaFamily::ScriptL2, OmegaFamily::ScriptL4, OmegaFamily::ScriptL6, OmegaFamily::ScriptL7]
        .into_iter()
        .find(|f| f.row() == id)
}

fn reductions(cfg: &RunConfig, sel: &Selection) -> Vec<Check> {
    let mut jobs: Vec<Job> = Vec::new();
    for (ri, id) in SubalgebraId::ALL.into_iter().enumerate() {
        if !id.is_reducible() || !sel.row(id) {
            continue;
        }
        for eps in cfg.signs() {
            if eps == Epsilon::Minus && id.needs_rotation() {
                continue;
            }
            let stream = 100 + 2 * ri as u64 + (eps == Epsilon::Plus) as u64;
            let base = format!("reductions.{}.{}", id.name(), sign_tag(eps));
            jobs.push(job(move || row_checks(cfg, id, eps, stream, base)));
            for e in CATALOG.iter().filter(|e| e.row.and_then(|r| SubalgebraId::from_str(r).ok()) == Some(id)) {
                if !sel.entry(e.id) && !sel.entries.is_empty() {
                    continue;
                }
                let check_id = format!("reductions.{}.{}.{}", id.name(), sign_tag(eps), e.id);
                jobs.push(job(move || {
                    let params = entry_params(cfg, e.id, Some(eps));
                    match build(e.id, &params, &cfg.diff) {
                        Ok(inst) if instance_sign(&inst) != eps => vec![],
                        Ok(inst) => vec![gate(cfg, check_id, &inst, e.classification == Classification::VerbatimSuspect)],
                        Err(err) => vec![CheckSpec::new(check_id, e.anchor, cfg.tol).finish(&Stats::default(), Some(err.to_string()))],
                    }
                }));
            }
        }
    }
    run_jobs(jobs)
}

/// Transcription and algebra checks of one row with random candidates.
fn row_checks(cfg: &RunConfig, id: SubalgebraId, eps: Epsilon, stream: u64, base: String) -> Vec<Check> {
    let g = sample::context();
    let mut r = sample::rng(cfg.seed, stream);
    let mut out = Vec::new();
    let anchor = format!("lifted residual equals lift factor times reduced residual, row {}", id.name());
    out.push(
        CheckSpec::new(format!("{base}.lift-consistency"), anchor, 1e-9)
            .rule("points off the chart of the reduction variable; gap relative to max(1, residual)")
            .run(|stats| {
                for _ in 0..4 {
                    let spec = row_spec(cfg, id, eps, &g, &mut r);
                    let rc = random_candidate(&g, &mut r, id.is_classical());
                    let pts: Vec<_> = (0..8).map(|_| chart_point(&mut r)).collect();
                    let rep = lift_verify(&spec, &rc, &pts, &cfg.diff).map_err(|e| e.to_string())?;
                    stats.excluded += rep.excluded;
                    if rep.points > 0 {
                        stats.push(rep.max_consistency / rep.max_residual.max(1.0));
                    }
                }
                Ok(())
            }),
    );
    let spec = row_spec(cfg, id, eps, &g, &mut r);
    let rc = random_candidate(&g, &mut r, id.is_classical());
    let xis: Vec<f64> = (0..5).map(|_| r.gen_range(-2.0..2.0)).collect();
    if matches!(factored_residual(&spec, &rc, xis[0]), Ok(Some(_))) {
        let anchor = format!("factored reduced equations against the expanded ones, row {}", id.name());
        out.push(CheckSpec::new(format!("{base}.factored"), anchor, 1e-12).run(|stats| {
            for &xi in &xis {
                let v = (|| -> susyflow::Result<f64> {
                    let fact = factored_residual(&spec, &rc, xi)?.ok_or_else(|| Error::Domain("no factored form".into()))?;
                    let full = reduced_residual(&spec, &rc, xi)?;
                    let mut d = (&fact.bosonic - &full.bosonic).max_abs();
                    if let (Some(a), Some(b)) = (&fact.fermionic, &full.fermionic) {
                        d = d.max((a - b).max_abs());
                    }
                    Ok(d)
                })();
                sample_into(stats, v)?;
            }
            Ok(())
        }));
    }
    if let Some(fam) = omega_family(id) {
        let suspect = eps == Epsilon::Plus && matches!(fam, OmegaFamily::ScriptL2 | OmegaFamily::ScriptL4);
        let anchor = format!("stated first-order ω-equation against the elimination of Λ'', row {}", id.name());
        out.push(
            CheckSpec::new(format!("{base}.omega-stated"), anchor, 1e-10)
                .expect_fail(suspect)
                .rule("none")
                .run(|stats| {
                    for _ in 0..20 {
                        let m = cfg.m.unwrap_or_else(|| r.gen_range(0.4..2.0));
                        let p = OmegaParams { eps, m, n: 1.0, eta1: g.generator(1), eta2: g.generator(2) };
                        let w = g.scalar(r.gen_range(-0.6..0.6));
                        let w1 = g.scalar(r.gen_range(-2.0..2.0));
                        let v = (|| -> susyflow::Result<f64> {
                            let a = omega_residual_at(fam, &w, &w1, &p, OmegaForm::Printed)?;
                            let b = omega_residual_at(fam, &w, &w1, &p, OmegaForm::Eliminated)?;
                            Ok((&a - &b).max_abs())
                        })();
                        sample_into(stats, v)?;
                    }
                    Ok(())
                }),
        );
    }
    if id == SubalgebraId::ScriptL8 {
        let anchor = "stated three-parameter equation against the elimination of Λ''";
        out.push(CheckSpec::new(format!("{base}.combined-stated"), anchor, 1e-10).run(|stats| {
            for _ in 0..30 {
                let m = cfg.m.unwrap_or_else(|| r.gen_range(0.4..2.0));
                let n = cfg.n.unwrap_or_else(|| r.gen_range(0.4..2.0));
                let p = OmegaParams { eps, m, n, eta1: g.generator(1), eta2: g.generator(2) };
                let jet = [g.zero(), g.scalar(r.gen_range(-0.5..0.5)), g.scalar(r.gen_range(-2.0..2.0))];
                let v = (|| -> susyflow::Result<f64> {
                    let a = combined_residual_l8(&jet, &p, OmegaForm::Printed)?;
                    let b = combined_residual_l8(&jet, &p, OmegaForm::Eliminated)?;
                    Ok((&a - &b).max_abs() / a.max_abs().max(1.0))
                })();
                sample_into(stats, v)?;
            }
            Ok(())
        }));
    }
    out
}

// ------------------------------------------------------------- solutions

fn solutions_suite(cfg: &RunConfig, sel: &Selection) -> Vec<Check> {
    let mut jobs: Vec<Job> = Vec::new();
    let single = if cfg.epsilon.len() == 1 { Some(cfg.signs()[0]) } else { None };
    for e in CATALOG.iter().filter(|e| sel.entry(e.id)) {
        let has = |n: &str| e.params.iter().any(|(k, _)| *k == n);
        let base = entry_params(cfg, e.id, single);
        let mut variants: Vec<(String, Params, bool)> = Vec::new();
        if has("reading") {
            for reading in [0.0, 1.0] {
                for sign in [1.0, -1.0] {
                    let id = format!("solutions.{}.reading{}.sign{:+}", e.id, reading, sign);
                    variants.push((id, base.clone().with("reading", reading).with("sign", sign), true));
                }
            }
        } else if has("psi") && !cfg.set.contains_key("psi") {
            for psi in [0.0, 1.0, 2.0] {
                variants.push((format!("solutions.{}.psi{}", e.id, psi), base.clone().with("psi", psi), false));
            }
        } else {
            variants.push((format!("solutions.{}", e.id), base.clone(), e.classification == Classification::VerbatimSuspect));
        }
        for (check_id, params, expect_fail) in variants {
            jobs.push(job(move || match build(e.id, &params, &cfg.diff) {
                Ok(inst) if !cfg.wants_sign(instance_sign(&inst)) => vec![],
                Ok(inst) => vec![gate(cfg, check_id, &inst, expect_fail)],
                Err(err) => vec![CheckSpec::new(check_id, e.anchor, cfg.tol).finish(&Stats::default(), Some(err.to_string()))],
            }));
        }
        if e.classification == Classification::Exact {
            jobs.push(job(move || symmetry_checks(cfg, e.id, base)));
        }
    }
    if sel.entry("density-kink") && cfg.wants_sign(Epsilon::Plus) {
        jobs.push(job(move || vec![asymptotics(cfg)]));
    }
    run_jobs(jobs)
}

fn symmetry_checks(cfg: &RunConfig, id: &'static str, params: Params) -> Vec<Check> {
    let inst = match build(id, &params, &cfg.diff) {
        Ok(i) if cfg.wants_sign(instance_sign(&i)) => i,
        Ok(_) => return vec![],
        Err(e) => {
            let spec = CheckSpec::new(format!("solutions.symmetry.{id}"), "finite symmetry actions", cfg.tol);
            return vec![spec.finish(&Stats::default(), Some(e.to_string()))];
        }
    };
    let rep = match symmetry_check(&inst, cfg.symmetry_points, cfg.tol, &cfg.diff) {
        Ok(Some(r)) => r,
        Ok(None) => return vec![],
        Err(e) => {
            let spec = CheckSpec::new(format!("solutions.symmetry.{id}"), "finite symmetry actions", cfg.tol);
            return vec![spec.finish(&Stats::default(), Some(e.to_string()))];
        }
    };
    rep.entries
        .iter()
        .map(|s| {
            let expect_fail = matches!(s.status, SymmetryStatus::XfailConfirmed | SymmetryStatus::XfailNotObserved);
            let anchor = format!("{} action of {} on the {} solution ({})", s.action, s.generator, id, rep.equation);
            let stats = Stats { max: s.max_residual, sum: s.mean_residual * s.points as f64, n: s.points, excluded: 0 };
            CheckSpec::new(format!("solutions.symmetry.{id}.{}", s.generator), anchor, cfg.tol)
                .expect_fail(expect_fail)
                .rule("grid points whose preimage leaves the chart, per action")
                .finish(&stats, s.error.clone())
        })
        .collect()
}

fn asymptotics(cfg: &RunConfig) -> Check {
    let c1 = cfg.set.get("C1").copied().unwrap_or(0.0);
    CheckSpec::new("solutions.density-kink.asymptotics", "kink density limits along the x-axis and dependence on the polar angle only", cfg.tol)
        .rule("rays at angular distance 1e-9 from the axis")
        .run(|stats| {
            let rep = solutions::kink_asymptotics_check(c1, &cfg.diff).map_err(|e| e.to_string())?;
            stats.push(rep.limit_error);
            stats.push(rep.angular_spread);
            Ok(())
        })
}

// ------------------------------------------------------- correspondences

/// Born-Infeld travelling waves used by the correspondence suite.
pub const WAVES: [(f64, f64, f64); 3] = [(1.0, 1.0, 1.0), (0.7, 2.3, -1.0), (1.8, 0.6, 1.0)];

/// Monge-Ampère potentials `(α, β)` of [`monge_ampere_family`]; `(0, 1)` is
/// `(x² − t²)/2`.
pub const POTENTIALS: [(f64, f64); 4] = [(0.0, 1.0), (0.8, 2.0), (-0.5, 1.5), (1.3, 3.0)];

fn correspondences(cfg: &RunConfig) -> Vec<Check> {
    let mut jobs: Vec<Job> = Vec::new();
    for (k, &(amp, wn, c)) in WAVES.iter().enumerate() {
        jobs.push(job(move || wave_checks(cfg, k, amp, wn, c)));
    }
    for &(al, be) in POTENTIALS.iter() {
        jobs.push(job(move || potential_checks(cfg, al, be)));
        jobs.push(job(move || vec![half_legendre_check(cfg, al, be)]));
    }
    jobs.push(job(move || vec![wick_random(cfg)]));
    run_jobs(jobs)
}

fn grid_check<F>(cfg: &RunConfig, id: String, anchor: String, rule: &str, expect_fail: bool, f: F) -> Check
where
    F: Fn((f64, f64)) -> susyflow::Result<f64>,
{
    CheckSpec::new(id, anchor, cfg.tol).rule(rule).expect_fail(expect_fail).run(|stats| {
        for p in cfg.grid.points() {
            sample_into(stats, f(p))?;
        }
        Ok(())
    })
}

fn wave_checks(cfg: &RunConfig, k: usize, amp: f64, wn: f64, c: f64) -> Vec<Check> {
    let phi = travelling_wave(amp, wn, c);
    let d = &cfg.diff;
    let name = format!("correspondences.wave{k}");
    let what = format!("φ = {amp} sin({wn}(x − ({c})t))");
    let pair = riemann_pair_from_phi(&phi, d);
    let (u, v) = chaplygin_from_riemann(&pair);
    let none = "none; points where a map leaves its domain are excluded";
    vec![
        grid_check(cfg, format!("{name}.born-infeld"), format!("Born-Infeld equation for {what}"), none, false, |p| {
            born_infeld_residual(&phi, p, d)
        }),
        grid_check(cfg, format!("{name}.riemann"), format!("Riemann system for the invariants of {what}"), none, false, |p| {
            riemann_residual(&pair, p, d).map(|(a, b)| a.abs().max(b.abs()))
        }),
        grid_check(cfg, format!("{name}.chaplygin"), format!("Chaplygin gas for U, V built from the invariants of {what}"), none, false, |p| {
            chaplygin_residual(&u, &v, p, d).map(|(a, b)| a.abs().max(b.abs()))
        }),
        grid_check(cfg, format!("{name}.bianchi-monge-ampere"), format!("Monge-Ampère equation for the Hessian built from {what}"), none, false, |p| {
            bianchi_check(&phi, p, d).map(|r| r.monge_ampere)
        }),
        grid_check(cfg, format!("{name}.bianchi-integrability"), format!("integrability of the Hessian built from {what}"), none, false, |p| {
            bianchi_check(&phi, p, d).map(|r| r.integrability.0.abs().max(r.integrability.1.abs()))
        }),
        grid_check(cfg, format!("{name}.bianchi-riemann"), format!("invariants of the Hessian against those of {what}"), none, false, |p| {
            bianchi_check(&phi, p, d).map(|r| r.riemann_gap)
        }),
        grid_check(
            cfg,
            format!("{name}.bianchi-duplicate-utt"),
            format!("reading with u_tt in both outer slots, for {what}"),
            none,
            true,
            |p| bianchi_check(&phi, p, d).map(|r| r.duplicate_utt_conflict),
        ),
        grid_check(cfg, format!("{name}.wick"), format!("Wick-rotated minimal-surface terms against Born-Infeld for {what}"), none, false, |p| {
            taylor_data(&phi, p, d).map(|j| {
                let a = wick_audit(&j);
                a.term_defect.max((a.minimal_surface.0 + a.born_infeld).abs()).max(a.minimal_surface.1.abs()).max(a.born_infeld.abs())
            })
        }),
    ]
}

fn potential_name(al: f64, be: f64) -> (String, String) {
    if al == 0.0 && be == 1.0 {
        ("correspondences.hyperbolic".into(), "u = (x² − t²)/2".into())
    } else {
        (format!("correspondences.family-a{al}-b{be}"), format!("u = x²/(2(αt+β)) − αt³/6 − βt²/2 with α = {al}, β = {be}"))
    }
}

fn potential_checks(cfg: &RunConfig, al: f64, be: f64) -> Vec<Check> {
    let u = monge_ampere_family(al, be);
    let d = &cfg.diff;
    let (name, what) = potential_name(al, be);
    let margin = cfg.margin.max(1e-3);
    let rule = format!("points with alpha t + beta < {margin}");
    let guard = |p: (f64, f64)| -> susyflow::Result<()> {
        if al * p.1 + be < margin {
            return Err(Error::Domain("alpha t + beta below the margin".into()));
        }
        Ok(())
    };
    vec![
        grid_check(cfg, format!("{name}.monge-ampere"), format!("Monge-Ampère equation for {what}"), &rule, false, |p| {
            guard(p)?;
            monge_ampere_residual(&u, p, d)
        }),
        grid_check(cfg, format!("{name}.roundtrip"), format!("Hessian to invariants and back for {what}"), &rule, false, |p| {
            guard(p)?;
            ma_riemann_roundtrip(&u, p, d).map(|r| r.roundtrip_error)
        }),
        grid_check(cfg, format!("{name}.riemann"), format!("Riemann system for the invariants of {what}"), &rule, false, |p| {
            guard(p)?;
            ma_riemann_roundtrip(&u, p, d).map(|r| r.riemann_residual.0.abs().max(r.riemann_residual.1.abs()))
        }),
        grid_check(cfg, format!("{name}.chaplygin"), format!("Chaplygin gas for U = u_xt/u_xx, V = u_xx of {what}"), &rule, false, |p| {
            guard(p)?;
            chaplygin_check(&u, p, d).map(|r| r.conservation.0.abs().max(r.conservation.1.abs()))
        }),
        grid_check(cfg, format!("{name}.chaplygin-riemann"), format!("invariants U ± 1/V of {what}"), &rule, false, |p| {
            guard(p)?;
            chaplygin_check(&u, p, d).map(|r| r.riemann.0.abs().max(r.riemann.1.abs()))
        }),
        grid_check(cfg, format!("{name}.utt-relation"), format!("u_tt = U²V − 1/V for {what}"), &rule, false, |p| {
            guard(p)?;
            chaplygin_check(&u, p, d).map(|r| r.utt_relation)
        }),
    ]
}

fn half_legendre_check(cfg: &RunConfig, al: f64, be: f64) -> Check {
    let (name, what) = potential_name(al, be);
    // The transform is sampled on a patch a quarter wider than the grid, and
    // points whose stencil neighbourhood leaves the image of s -> u_s are
    // excluded.
    let widen = |lo: f64, hi: f64| (lo - 0.25 * (hi - lo), hi + 0.25 * (hi - lo));
    let (xr, yr) = (widen(cfg.grid.x.lo, cfg.grid.x.hi), widen(cfg.grid.y.lo, cfg.grid.y.hi));
    const REACH: f64 = 0.01;
    CheckSpec::new(format!("{name}.half-legendre"), format!("wave equation for the half-Legendre transform of {what}"), cfg.tol)
        .rule(format!("(z, y) within {REACH} of the edge of the image of s -> u_s"))
        .run(|stats| {
            if (0..=16).any(|i| al * (yr.0 + (yr.1 - yr.0) * i as f64 / 16.0) + be <= cfg.margin.max(1e-3)) {
                return Err("alpha t + beta leaves the patch".into());
            }
            let hl = HalfLegendre::new(monge_ampere_family(al, be), xr, yr, cfg.diff).map_err(|e| e.to_string())?;
            for (z, y) in cfg.grid.points() {
                let clear = [(-REACH, -REACH), (REACH, -REACH), (-REACH, REACH), (REACH, REACH)]
                    .iter()
                    .all(|(a, b)| hl.invert(z + a, y + b).is_ok());
                if clear {
                    sample_into(stats, hl.wave_residual((z, y)))?;
                } else {
                    stats.excluded += 1;
                }
            }
            Ok(())
        })
}

fn wick_random(cfg: &RunConfig) -> Check {
    CheckSpec::new("correspondences.wick.term-map", "Wick rotation y = it maps each minimal-surface term to minus a Born-Infeld term", cfg.tol)
        .run(|stats| {
            let mut r = sample::rng(cfg.seed, 40);
            for _ in 0..cfg.samples {
                let mut v = || r.gen_range(-2.0..2.0);
                let j = TaylorData { px: v(), pt: v(), pxx: v(), pxt: v(), ptt: v() };
                let a = wick_audit(&j);
                stats.push(a.term_defect.max((a.minimal_surface.0 + a.born_infeld).abs()).max(a.minimal_surface.1.abs()));
            }
            Ok(())
        })
}

/// Residual of a lifted catalog entry at one point, or `None` when the point
/// is off its chart or within `margin` of `y = 0`.
pub fn lifted_residual(inst: &Instance, fields: &(FieldCandidate, FieldCandidate), p: (f64, f64), margin: f64, d: &DiffConfig) -> Option<f64> {
    let Built::Reduced { spec, xi_range, singular, .. } = &inst.built else { return None };
    if p.1.abs() < margin {
        return None;
    }
    let xi = symmetry_variable(spec, p).ok()?;
    if xi < xi_range.0 || xi > xi_range.1 || singular.iter().any(|s| (xi - s).abs() < solutions::SINGULAR_MARGIN) {
        return None;
    }
    let (phi, psi) = fields;
    let r = if spec.id.is_classical() {
        susyflow::pde::classical_residual(&susyflow::pde::ClassicalField::new(phi.clone()).ok()?, spec.eps, p, d).map(|z| z.norm())
    } else {
        let b = susy_special_bosonic(phi, psi, spec.eps, p, d);
        let f = susy_special_fermionic(phi, psi, spec.eps, p, d);
        b.and_then(|b| f.map(|f| b.value.max_abs().max(f.value.max_abs())))
    };
    r.ok()
}

/// Whether any check in `checks` failed.
pub fn any_failed(checks: &[Check]) -> bool {
    checks.iter().any(|c| !matches!(c.status, Status::Pass | Status::XfailConfirmed))
}
