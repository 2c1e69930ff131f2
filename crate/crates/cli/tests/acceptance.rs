//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::Rng;
use susyflow::calculus::DiffConfig;
use susyflow::grassmann::{GeneratorSet, GrassmannNumber};
use susyflow::reductions::reduced_residual;
use susyflow::solutions::{self, build, check, symmetry_check, Built, Classification, Params, SymmetryStatus, CATALOG, GROUP_PARAMS};
use susyflow::specfun::{ellip_e, ellip_f, lambert_w, Branch};
use susyflow::superfield::{apply_d, apply_h, decompose_check, Epsilon};
use susyflow::symmetry::{classical_generators, jacobi_violations, susy_generators, verify_table, Algebra};
use susyflow_cli::config::{RunConfig, Suite};
use susyflow_cli::report::Status;
use susyflow_cli::sample;

/// Residual tolerance shared by the field-level criteria.
const TOL: f64 = 1e-6;
/// Operator identities without registered derivatives.
const OPERATOR_TOL: f64 = 1e-8;
/// Lambert reduced-equation residual.
const LAMBERT_REDUCED_TOL: f64 = 1e-8;
/// Algebraic zero of the implicit ω entry, up to rounding.
const OMEGA_TOL: f64 = 1e-12;
/// Relative round-trip error of Lambert W.
const LAMBERT_TOL: f64 = 1e-12;
/// Elliptic integrals against the Carlson-form oracle.
const ELLIPTIC_TOL: f64 = 1e-9;
/// Grid size of the plane criteria.
const GRID: usize = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

// 1 ---------------------------------------------------------------------

/// Sign of `e_a e_b` by counting the transpositions that sort the
/// concatenated index lists; zero when they share a generator.
fn oracle_product(a: u16, b: u16) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let swaps: u32 = (0..16).filter(|j| b >> j & 1 == 1).map(|j| (a >> (j + 1)).count_ones()).sum();
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn basis(g: &Arc<GeneratorSet>, m: u16) -> GrassmannNumber {
    GrassmannNumber::from_terms(g.clone(), [(m, C::new(1.0, 0.0))])
}

fn grassmann_oracle() -> Outcome {
    let start = Instant::now();
    let g = GeneratorSet::new(&["g1", "g2", "g3", "g4", "g5", "g6"]).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for a in 0u16..64 {
        for b in 0u16..64 {
            let p = &basis(&g, a) * &basis(&g, b);
            let s = oracle_product(a, b);
            let want = if s == 0 { g.zero() } else { basis(&g, a | b).scale(s as f64) };
            ensure(p.approx_eq(&want, 0.0), format!("e{a:06b} e{b:06b}: {p} vs {want}"))?;
            pairs += 1;
        }
    }
    // Bilinear extension on random dense elements.
    let mut r = sample::rng(1, 0);
    for _ in 0..20 {
        let x: Vec<f64> = (0..64).map(|_| r.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..64).map(|_| r.gen_range(-1.0..1.0)).collect();
        let gx = GrassmannNumber::from_terms(g.clone(), (0..64u16).map(|m| (m, C::new(x[m as usize], 0.0))));
        let gy = GrassmannNumber::from_terms(g.clone(), (0..64u16).map(|m| (m, C::new(y[m as usize], 0.0))));
        let mut want = [0.0f64; 64];
        for a in 0..64u16 {
            for b in 0..64u16 {
                want[(a | b) as usize] += oracle_product(a, b) as f64 * x[a as usize] * y[b as usize];
            }
        }
        let got = &gx * &gy;
        let gap = (0..64u16).map(|m| (got.coeff(m) - C::new(want[m as usize], 0.0)).norm()).fold(0.0, f64::max);
        ensure(gap < 1e-12, format!("dense product off by {gap:e}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("took {secs:.2}s"))?;
    Ok(format!("{pairs} monomial pairs exact, 20 dense products, {secs:.2}s"))
}

// 2 ---------------------------------------------------------------------

fn operator_identities() -> Outcome {
    let g = sample::context();
    let cfg = DiffConfig::default();
    let mut r = sample::rng(2, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (_, _, sf) = sample::superfield(&g, &mut r);
        let pt = sample::point(&mut r, -1.0, 1.0);
        let run = || -> susyflow::Result<f64> {
            let dx = sf.value_at(pt, (1, 0), &cfg)?;
            let dd = apply_d(&apply_d(&sf, &cfg)?, &cfg)?.value_at(pt, (0, 0), &cfg)?;
            let hh = apply_h(&apply_h(&sf, &cfg)?, &cfg)?.value_at(pt, (0, 0), &cfg)?;
            let hd = apply_h(&apply_d(&sf, &cfg)?, &cfg)?.value_at(pt, (0, 0), &cfg)?;
            let dh = apply_d(&apply_h(&sf, &cfg)?, &cfg)?.value_at(pt, (0, 0), &cfg)?;
            Ok((&dd - &dx).max_abs().max((&hh + &dx).max_abs()).max((&hd + &dh).max_abs()))
        };
        worst = worst.max(run().map_err(|e| e.to_string())?);
    }
    ensure(worst <= OPERATOR_TOL, format!("worst {worst:e}"))?;
    let exact = if worst == 0.0 { "exact" } else { "within tolerance" };
    Ok(format!("D², H², HD + DH on 100 polynomial superfields: {exact} (worst {worst:e})"))
}

// 3 ---------------------------------------------------------------------

fn table_fidelity() -> Outcome {
    let start = Instant::now();
    let c = verify_table(Algebra::Classical);
    let s = verify_table(Algebra::Susy);
    let jac = [
        jacobi_violations(&classical_generators(Epsilon::Plus)),
        jacobi_violations(&classical_generators(Epsilon::Minus)),
        jacobi_violations(&susy_generators()),
    ];
    let secs = start.elapsed().as_secs_f64();
    ensure(c.total == 25 && s.total == 49, format!("cell counts {} and {}", c.total, s.total))?;
    ensure(c.all_match() && s.all_match(), format!("matched {}/25 and {}/49", c.matched, s.matched))?;
    ensure(jac == [0, 0, 0], format!("Jacobi violations {jac:?}"))?;
    ensure(secs < 1.0, format!("took {secs:.3}s"))?;
    Ok(format!("{} + {} cells exact, Jacobi exact, {secs:.3}s", c.matched, s.matched))
}

// 4 ---------------------------------------------------------------------

fn theta_decomposition() -> Outcome {
    let g = sample::context();
    let cfg = DiffConfig::default();
    let mut r = sample::rng(4, 0);
    let tuples: Vec<_> = (0..5)
        .map(|k| sample::susy_params(&mut r, if k % 2 == 0 { Epsilon::Plus } else { Epsilon::Minus }))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (_, _, sf) = sample::superfield(&g, &mut r);
        let pt = sample::point(&mut r, -1.0, 1.0);
        for p in &tuples {
            worst = worst.max(decompose_check(&sf, p, &[pt], &cfg).map_err(|e| e.to_string())?.max());
        }
    }
    ensure(worst <= TOL, format!("worst {worst:e}"))?;
    Ok(format!("50 fields × 5 tuples, worst {worst:e}"))
}

// 5 ---------------------------------------------------------------------

fn classical_suite() -> Outcome {
    let cfg = DiffConfig::default();
    let mut parts = Vec::new();
    for (id, eps) in [("kink", 1.0), ("linear", 1.0), ("linear", -1.0), ("elliptic", -1.0)] {
        let p = if id == "linear" { Params::default().with("eps", eps) } else { Params::default() };
        let inst = build(id, &p, &cfg).map_err(|e| e.to_string())?;
        let rep = check(&inst, GRID, TOL, &cfg).map_err(|e| e.to_string())?;
        let lifted = rep.lifted_max.ok_or(format!("{id} has no lifted residual"))?;
        ensure(rep.passed && lifted <= TOL, format!("{id} eps={eps}: {rep:?}"))?;
        parts.push(format!("{id}({eps:+}) {lifted:.1e}"));
    }
    let inst = build("lambert", &Params::default(), &cfg).map_err(|e| e.to_string())?;
    let Built::Reduced { spec, rc, .. } = &inst.built else { return Err("lambert is not a reduced entry".into()) };
    let mut worst: f64 = 0.0;
    for xi in solutions::linspace(0.1, 5.0, 1000) {
        worst = worst.max(reduced_residual(spec, rc, xi).map_err(|e| e.to_string())?.max_abs());
    }
    ensure(worst <= LAMBERT_REDUCED_TOL, format!("lambert reduced {worst:e}"))?;
    parts.push(format!("lambert reduced {worst:.1e}"));
    Ok(format!("{GRID}×{GRID} grids: {}", parts.join(", ")))
}

// 6 ---------------------------------------------------------------------

fn catalog_suite() -> Outcome {
    let cfg = DiffConfig::default();
    let (mut exact, mut suspect) = (0, 0);
    let mut worst: f64 = 0.0;
    for e in CATALOG {
        let has = |n: &str| e.params.iter().any(|(k, _)| *k == n);
        let variants: Vec<Params> = if has("psi") {
            [0.0, 1.0, 2.0].iter().map(|&v| Params::default().with("psi", v)).collect()
        } else if has("reading") {
            [(0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0)]
                .iter()
                .map(|&(rd, s)| Params::default().with("reading", rd).with("sign", s))
                .collect()
        } else {
            vec![Params::default()]
        };
        for p in variants {
            let inst = build(e.id, &p, &cfg).map_err(|err| format!("{}: {err}", e.id))?;
            let rep = check(&inst, GRID, TOL, &cfg).map_err(|err| format!("{}: {err}", e.id))?;
            match e.classification {
                Classification::Exact => {
                    ensure(rep.passed, format!("{} {:?}: {rep:?}", e.id, p))?;
                    if e.id == "transcendental-omega" {
                        ensure(rep.worst() <= OMEGA_TOL, format!("ω residual {:e}", rep.worst()))?;
                    }
                    worst = worst.max(rep.worst());
                    exact += 1;
                }
                Classification::VerbatimSuspect => {
                    ensure(rep.samples > 0 && rep.worst().is_finite(), format!("{} {:?} produced no report", e.id, p))?;
                    suspect += 1;
                }
            }
        }
    }
    ensure(exact >= 24 && suspect == 4, format!("{exact} exact runs, {suspect} suspect variants"))?;
    Ok(format!("{exact} exact runs pass (worst {worst:e}), {suspect} verbatim-suspect variants reported"))
}

// 7 ---------------------------------------------------------------------

fn symmetry_invariance() -> Outcome {
    let cfg = DiffConfig::default();
    ensure(GROUP_PARAMS.len() == 5, "five group parameters".into())?;
    let (mut swept, mut actions) = (0, 0);
    let mut rotation_control = false;
    let mut worst: f64 = 0.0;
    for e in CATALOG.iter().filter(|e| e.classification == Classification::Exact) {
        let inst = build(e.id, &Params::default(), &cfg).map_err(|err| err.to_string())?;
        let Some(rep) = symmetry_check(&inst, 6, TOL, &cfg).map_err(|err| err.to_string())? else { continue };
        swept += 1;
        for s in &rep.entries {
            match s.status {
                SymmetryStatus::Pass => worst = worst.max(s.max_residual),
                SymmetryStatus::XfailConfirmed => rotation_control |= e.id == "elliptic" && s.generator == "M",
                _ => return Err(format!("{} {}: {s:?}", e.id, s.generator)),
            }
            actions += 1;
        }
    }
    ensure(swept >= 15, format!("only {swept} entries swept"))?;
    ensure(rotation_control, "rotation of the elliptic solution was not confirmed as a non-symmetry".into())?;
    Ok(format!("{swept} solutions, {actions} actions × 5 parameters, worst {worst:e}; rotation on eps = -1 xfail-confirmed"))
}

// 8 ---------------------------------------------------------------------

fn correspondence_web() -> Outcome {
    let cfg = RunConfig { suites: vec![Suite::Correspondences], fixed_clock: true, ..RunConfig::default() };
    let report = susyflow_cli::run(&cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut xfail = 0;
    for c in report.checks() {
        match c.status {
            Status::Pass => worst = worst.max(c.max_residual),
            Status::XfailConfirmed => xfail += 1,
            _ => return Err(format!("{}: {:?} {:e} {:?}", c.id, c.status, c.max_residual, c.error)),
        }
    }
    ensure(worst <= TOL, format!("worst {worst:e}"))?;
    Ok(format!("{} maps close (worst {worst:e}); duplicate-u_tt reading confirmed open on {xfail} waves", report.summary.pass))
}

// 9 ---------------------------------------------------------------------

/// Carlson `R_F` by duplication; arguments in the open right half plane.
fn carlson_rf(mut x: C, mut y: C, mut z: C) -> C {
    for _ in 0..40 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
    }
    let a = (x + y + z) / 3.0;
    let (dx, dy, dz) = (1.0 - x / a, 1.0 - y / a, 1.0 - z / a);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - e2 * e3 * 3.0 / 44.0) / a.sqrt()
}

/// Carlson `R_D` by duplication.
fn carlson_rd(mut x: C, mut y: C, mut z: C) -> C {
    let (mut sum, mut fac) = (C::new(0.0, 0.0), 1.0);
    for _ in 0..40 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
    }
    let a = (x + y + 3.0 * z) / 5.0;
    let (dx, dy) = ((a - x) / a, (a - y) / a);
    let dz = -(dx + dy) / 3.0;
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    let series = 1.0 + ed * (-3.0 / 14.0 + ed * 9.0 / 88.0 - dz * ee * 9.0 / 52.0) + dz * (ee / 6.0 + dz * (-ec * 9.0 / 22.0 + dz * ea * 3.0 / 26.0));
    3.0 * sum + fac * series / (a * a.sqrt())
}

fn special_functions() -> Outcome {
    let mut r = sample::rng(9, 0);
    let mut lw: f64 = 0.0;
    for branch in [Branch::Principal, Branch::Lower] {
        for _ in 0..1000 {
            let z = C::from_polar(10f64.powf(r.gen_range(-3.0..3.0)), r.gen_range(-PI..PI));
            let w = lambert_w(z, branch).map_err(|e| e.to_string())?;
            lw = lw.max((w * w.exp() - z).norm() / z.norm());
        }
    }
    ensure(lw <= LAMBERT_TOL, format!("Lambert relative round trip {lw:e}"))?;
    let mut el: f64 = 0.0;
    let mut samples: Vec<(C, C)> = vec![(C::new(0.5, 0.2), C::new(0.0, 1.0)), (C::new(0.7, 0.0), C::new(0.0, 1.0))];
    while samples.len() < 100 {
        let z = C::from_polar(r.gen_range(0.05..0.8), r.gen_range(-PI..PI));
        let k = C::from_polar(r.gen_range(0.0..1.0), r.gen_range(-PI..PI));
        samples.push((z, k));
    }
    for (z, k) in samples {
        let (x, y) = (1.0 - z * z, 1.0 - k * k * z * z);
        let one = C::new(1.0, 0.0);
        let f_ref = z * carlson_rf(x, y, one);
        let e_ref = f_ref - k * k * z * z * z / 3.0 * carlson_rd(x, y, one);
        let f = ellip_f(z, k).map_err(|e| e.to_string())?;
        let e = ellip_e(z, k).map_err(|e| e.to_string())?;
        el = el.max((f - f_ref).norm()).max((e - e_ref).norm());
    }
    ensure(el <= ELLIPTIC_TOL, format!("elliptic integrals off by {el:e}"))?;
    Ok(format!("Lambert W 2 × 1000 points, worst relative {lw:e}; F and E on 100 (z, k) incl. k = i, worst {el:e}"))
}

// 10 --------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_susyflow"))
            .args(["verify", "all", "--seed", "7", "--fixed-clock", "--report"])
            .arg(&path)
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), format!("exit status {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], "reports differ".into())?;
    Ok(format!("two `verify all` runs byte-identical ({} bytes)", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Grassmann oracle equivalence", grassmann_oracle),
        ("operator identities", operator_identities),
        ("table fidelity", table_fidelity),
        ("theta decomposition", theta_decomposition),
        ("classical solution suite", classical_suite),
        ("supersymmetric catalog suite", catalog_suite),
        ("symmetry invariance", symmetry_invariance),
        ("correspondence web", correspondence_web),
        ("special functions", special_functions),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, text) = match outcome {
            Ok(t) => ("PASS", t),
            Err(t) => {
                failed += 1;
                ("FAIL", t)
            }
        };
        println!("criterion {:>2} {tag} {name}: {text}", k + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
