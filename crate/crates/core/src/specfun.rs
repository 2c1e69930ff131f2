//! Lambert W and incomplete elliptic integrals with complex arguments.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::grassmann::Complex;

/// Branch index of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Branch {
    /// `k = 0`, analytic at the origin.
    Principal,
    /// `k = -1`, real on `[-1/e, 0)`.
    Lower,
}

impl Branch {
    pub fn index(self) -> i32 {
        match self {
            Branch::Principal => 0,
            Branch::Lower => -1,
        }
    }
}

const INV_E: f64 = 1.0 / E;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Starting point for Halley's iteration on branch `k`.
fn lambert_seed(z: Complex, branch: Branch) -> Complex {
    let near_branch_point = (z + INV_E).norm() < 0.3;
    match branch {
        Branch::Principal => {
            if (z + INV_E).norm() < 1.0 {
                let p = (2.0 * (E * z + 1.0)).sqrt();
                -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
            } else if z.norm() < 3.0 {
                let l = (1.0 + z).ln();
                l * (1.0 - (1.0 + l).ln() / (2.0 + l))
            } else {
                let l1 = z.ln();
                l1 - l1.ln()
            }
        }
        Branch::Lower => {
            if near_branch_point && z.im >= 0.0 {
                let p = -(2.0 * (E * z + 1.0)).sqrt();
                -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
            } else {
                let l1 = z.ln() - c(0.0, 2.0 * PI);
                l1 - l1.ln()
            }
        }
    }
}

/// Lambert W on branch 0 or -1: the `w` with `w·e^w = z`.
///
/// Real `z` on the cut of the lower branch takes the value reached from the
/// upper half plane, so `W₋₁(x)` is the complex conjugate of `W₀(x)` for real
/// `x < -1/e` and real on `[-1/e, 0)`.
pub fn lambert_w(z: Complex, branch: Branch) -> Result<Complex> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("Lambert W of non-finite argument {z}")));
    }
    if z == c(0.0, 0.0) {
        return match branch {
            Branch::Principal => Ok(c(0.0, 0.0)),
            Branch::Lower => Err(Error::Domain("W₋₁ is unbounded at 0".into())),
        };
    }
    // a signed zero imaginary part would select the value below the cut
    let z = if z.im == 0.0 { c(z.re, 0.0) } else { z };
    if (z + INV_E).norm() < 1e-15 {
        return Ok(c(-1.0, 0.0));
    }
    let halley = |w: Complex| {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
    };
    let mut w = lambert_seed(z, branch);
    for _ in 0..100 {
        let step = halley(w);
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.norm() <= 1e-14 * w.norm().max(1.0) {
            // cubic convergence: one more step lands at roundoff level
            let last = halley(w);
            return Ok(if last.is_finite() { w - last } else { w });
        }
    }
    Err(Error::Domain(format!(
        "Lambert W iteration did not converge at {z} on branch {}",
        branch.index()
    )))
}

/// Real-valued Lambert W. Branch 0 needs `x ≥ -1/e`, branch -1 needs
/// `-1/e ≤ x < 0`.
pub fn lambert_w_real(x: f64, branch: Branch) -> Result<f64> {
    let slack = 4.0 * f64::EPSILON;
    if x < -INV_E - slack {
        return Err(Error::Domain(format!("real Lambert W undefined below -1/e, got {x}")));
    }
    if branch == Branch::Lower && x >= 0.0 {
        return Err(Error::Domain(format!("real branch -1 needs x < 0, got {x}")));
    }
    let x = x.max(-INV_E);
    Ok(lambert_w(c(x, 0.0), branch)?.re)
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod quadrature of a complex-valued integrand over a
/// real interval. Returns the integral and the accumulated error estimate.
pub fn integrate<F: Fn(f64) -> Complex>(f: F, a: f64, b: f64, tol: f64) -> Result<(Complex, f64)> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: Complex = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { tol, estimate: f64::INFINITY });
        }
        if err <= tol.max(1e-15 * total.norm()) {
            return Ok((total, err));
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { tol, estimate: err });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            return Err(Error::Quadrature { tol, estimate: err });
        }
        let (v1, e1) = gk15(&f, lo, m);
        let (v2, e2) = gk15(&f, m, hi);
        parts.push((lo, m, v1, e1));
        parts.push((m, hi, v2, e2));
    }
}

const ELLIPTIC_TOL: f64 = 1e-13;

/// Rejects straight paths `[0, z]` passing through `±1` or `±1/k`.
fn check_path(z: Complex, k: Complex) -> Result<()> {
    let mut points = vec![c(1.0, 0.0), c(-1.0, 0.0)];
    if k.norm() > 0.0 {
        points.push(1.0 / k);
        points.push(-1.0 / k);
    }
    let len2 = z.norm_sqr();
    for p in points {
        // distance from p to the segment [0, z]
        let t = if len2 == 0.0 {
            0.0
        } else {
            ((p * z.conj()).re / len2).clamp(0.0, 1.0)
        };
        if (z * t - p).norm() <= 1e-12 * p.norm().max(1.0) {
            return Err(Error::SingularPath { point: format!("{p}") });
        }
    }
    Ok(())
}

/// Incomplete elliptic integral of the first kind,
/// `∫₀^z dα / (√(1−α²) √(1−k²α²))` along the straight path, principal roots.
pub fn ellip_f(z: Complex, k: Complex) -> Result<Complex> {
    if z == c(0.0, 0.0) {
        return Ok(z);
    }
    check_path(z, k)?;
    let k2 = k * k;
    let (v, _) = integrate(
        |t| {
            let a = z * t;
            z / ((1.0 - a * a).sqrt() * (1.0 - k2 * a * a).sqrt())
        },
        0.0,
        1.0,
        ELLIPTIC_TOL,
    )?;
    Ok(v)
}

/// Incomplete elliptic integral of the second kind,
/// `∫₀^z √(1−k²α²) / √(1−α²) dα` along the straight path, principal roots.
pub fn ellip_e(z: Complex, k: Complex) -> Result<Complex> {
    if z == c(0.0, 0.0) {
        return Ok(z);
    }
    check_path(z, k)?;
    let k2 = k * k;
    let (v, _) = integrate(
        |t| {
            let a = z * t;
            z * (1.0 - k2 * a * a).sqrt() / (1.0 - a * a).sqrt()
        },
        0.0,
        1.0,
        ELLIPTIC_TOL,
    )?;
    Ok(v)
}

/// `F(z,k) − E(z,k)` as one integral, `∫₀^z k²α² / (√(1−α²) √(1−k²α²)) dα`.
pub fn ellip_f_minus_e(z: Complex, k: Complex) -> Result<Complex> {
    if z == c(0.0, 0.0) {
        return Ok(z);
    }
    check_path(z, k)?;
    let k2 = k * k;
    let (v, _) = integrate(
        |t| {
            let a = z * t;
            z * k2 * a * a / ((1.0 - a * a).sqrt() * (1.0 - k2 * a * a).sqrt())
        },
        0.0,
        1.0,
        ELLIPTIC_TOL,
    )?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w(c(0.0, 0.0), Branch::Principal).unwrap(), c(0.0, 0.0));
        let w = lambert_w(c(E, 0.0), Branch::Principal).unwrap();
        assert!((w - 1.0).norm() < 1e-14);
        // Newton on w e^w - 1 from 0.5
        let mut omega: f64 = 0.5;
        for _ in 0..50 {
            omega -= (omega * omega.exp() - 1.0) / (omega.exp() * (omega + 1.0));
        }
        let w = lambert_w_real(1.0, Branch::Principal).unwrap();
        assert!((w - omega).abs() < 1e-14);
        assert!((w - 0.567_143_290_4).abs() < 1e-10);
    }

    #[test]
    fn lambert_real_branches() {
        let w = lambert_w_real(-0.2, Branch::Lower).unwrap();
        assert!(w < -1.0);
        assert!((w * w.exp() + 0.2).abs() < 1e-15);
        let w0 = lambert_w_real(-0.2, Branch::Principal).unwrap();
        assert!(w0 > -1.0);
        assert!((lambert_w_real(-INV_E, Branch::Lower).unwrap() + 1.0).abs() < 1e-7);
        assert!(lambert_w_real(-0.5, Branch::Principal).is_err());
        assert!(lambert_w_real(-0.5, Branch::Lower).is_err());
        assert!(lambert_w_real(0.5, Branch::Lower).is_err());
    }

    #[test]
    fn lambert_below_branch_point_is_conjugate_pair() {
        let z = c(-1.44, 0.0);
        let w0 = lambert_w(z, Branch::Principal).unwrap();
        let w1 = lambert_w(z, Branch::Lower).unwrap();
        assert!(w0.im > 0.0);
        assert!((w1 - w0.conj()).norm() < 1e-13);
        for w in [w0, w1] {
            assert!((w * w.exp() - z).norm() < 1e-13);
        }
    }

    #[test]
    fn elliptic_examples() {
        let i = c(0.0, 1.0);
        assert_eq!(ellip_f(c(0.0, 0.0), i).unwrap(), c(0.0, 0.0));
        assert_eq!(ellip_e(c(0.0, 0.0), c(0.3, 0.1)).unwrap(), c(0.0, 0.0));
        let asin = 0.5f64.asin();
        assert!((ellip_f(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - asin).norm() < 1e-12);
        assert!((ellip_e(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - asin).norm() < 1e-12);
        let f = ellip_f(c(0.5, 0.0), i).unwrap();
        let e = ellip_e(c(0.5, 0.0), i).unwrap();
        assert!((f - 0.5032).norm() < 1e-3);
        assert!((e - 0.5448).norm() < 1e-3);
        assert!((f.re - 0.503_209_443_177_331).abs() < 1e-12);
        assert!((e.re - 0.545_451_456_083_449).abs() < 1e-12);
    }

    #[test]
    fn elliptic_singular_path() {
        let i = c(0.0, 1.0);
        assert!(matches!(ellip_f(c(1.0, 0.0), i), Err(Error::SingularPath { .. })));
        assert!(matches!(ellip_e(c(2.0, 0.0), c(0.5, 0.0)), Err(Error::SingularPath { .. })));
        assert!(matches!(ellip_f(c(0.0, 2.0), i), Err(Error::SingularPath { .. })));
    }
}
