//! Root sets of the squared speed, the largest safe Bernstein-ellipse
//! parameter, the density bound on that ellipse, and interpolant degree
//! selection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Smallest interpolant degree ever used. Keeps tiny budgets from
/// producing degenerate series and costs nothing at plan scale.
pub const K_MIN: usize = 8;

const MAX_ITERATIONS: usize = 200;
/// Residual at which a root stops being updated. Tight enough that
/// simple roots are polished to machine precision; multiple-root
/// clusters reach it too because the polynomial is flat there.
const FREEZE_TOL: f64 = 1e-13;
/// Residual every root must reach for the run to count as converged.
const RESIDUAL_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-14;
/// Roots with relative imaginary part at or below this are real.
const REAL_SNAP_TOL: f64 = 1e-9;
/// Distance to `[-1, 1]` below which a root makes the speed
/// non-analytic on the interval for every practical purpose.
const INTERVAL_TOL: f64 = 1e-12;
/// Uniform grid resolution on `[0, pi]` for the ellipse-boundary scan.
const BOUNDARY_GRID: usize = 2048;

/// All complex roots of `p`, with multiplicity, by Aberth–Ehrlich
/// simultaneous iteration.
///
/// Exact zero coefficients at the bottom are factored out first, the
/// remaining roots start on a Cauchy-bound circle with an asymmetric
/// phase, and conjugate pairs of the real polynomial are mirrored
/// exactly after convergence. Residuals are measured against
/// `sum|a_j| * max(1,|z|)^deg`.
pub fn complex_roots(p: &Poly) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::ZeroPoly);
    }
    let mut coeffs = p.coeffs().to_vec();
    let mut roots = Vec::with_capacity(p.degree());
    while coeffs.len() > 1 && coeffs[0] == 0.0 {
        roots.push(Complex64::new(0.0, 0.0));
        coeffs.remove(0);
    }
    let m = coeffs.len() - 1;
    if m == 0 {
        return Ok(sorted(roots));
    }
    if m == 1 {
        roots.push(Complex64::new(-coeffs[0] / coeffs[1], 0.0));
        return Ok(sorted(roots));
    }

    // Balance the coefficients by working on q(w) = p(s w) with s the
    // geometric mean of the root magnitudes. Sectioned curves produce
    // speed polynomials whose coefficients span many orders of
    // magnitude; without this the outer roots come back as noise.
    let scale = {
        let s = (coeffs[0].abs() / coeffs[m].abs()).powf(1.0 / m as f64);
        if s.is_finite() && s > 1e-12 {
            s
        } else {
            1.0
        }
    };
    let coeffs: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * scale.powi(j as i32))
        .collect();

    let coeff_sum: f64 = coeffs.iter().map(|a| a.abs()).sum();
    let mut z: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64 + 0.4))
        .collect();

    let mut done = false;
    for _ in 0..MAX_ITERATIONS {
        let mut all_small = true;
        let mut max_step = 0.0f64;
        for j in 0..m {
            let (pv, pd) = horner_pair(&coeffs, z[j]);
            let scale = coeff_sum * z[j].norm().max(1.0).powi(m as i32);
            if pv.norm() <= FREEZE_TOL * scale {
                continue;
            }
            all_small = false;
            let ratio = if pd.norm() > 0.0 {
                pv / pd
            } else {
                // flat spot: nudge off it and try again next sweep
                z[j] += Complex64::new(2e-8, 1e-8);
                continue;
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for i in 0..m {
                if i != j {
                    let d = z[j] - z[i];
                    if d.norm() > 1e-300 {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() > 1e-300 { ratio / denom } else { ratio };
            z[j] -= step;
            max_step = max_step.max(step.norm() / z[j].norm().max(1.0));
        }
        if all_small || max_step <= STEP_TOL {
            done = true;
            break;
        }
    }
    let acceptable = z.iter().all(|&zj| {
        horner_pair(&coeffs, zj).0.norm()
            <= RESIDUAL_TOL * coeff_sum * zj.norm().max(1.0).powi(m as i32)
    });
    if !done || !acceptable {
        return Err(Error::NoConvergence(MAX_ITERATIONS));
    }
    roots.extend(pair_conjugates(z.into_iter().map(|w| w * scale).collect()));
    Ok(sorted(roots))
}

fn horner_pair(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(*coeffs.last().unwrap(), 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in coeffs[..coeffs.len() - 1].iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// Snap near-real roots onto the axis and mirror genuine conjugate
/// partners so pairs are exact. Roots without a close partner are kept
/// verbatim; inventing symmetry for them would move a root, and a moved
/// root can land on the interval.
fn pair_conjugates(mut z: Vec<Complex64>) -> Vec<Complex64> {
    for r in &mut z {
        if r.im.abs() <= REAL_SNAP_TOL * r.re.abs().max(1.0) {
            r.im = 0.0;
        }
    }
    let mut out: Vec<Complex64> = z.iter().copied().filter(|r| r.im == 0.0).collect();
    let upper: Vec<Complex64> = z.iter().copied().filter(|r| r.im > 0.0).collect();
    let mut lower: Vec<Complex64> = z.iter().copied().filter(|r| r.im < 0.0).collect();
    for zu in upper {
        let partner = lower
            .iter()
            .enumerate()
            .map(|(i, zl)| (i, (zu - zl.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match partner {
            Some((i, gap)) if gap <= 1e-6 * (1.0 + zu.norm()) => {
                let zl = lower.swap_remove(i);
                let mean = 0.5 * (zu + zl.conj());
                out.push(mean);
                out.push(mean.conj());
            }
            _ => out.push(zu),
        }
    }
    out.extend(lower);
    out
}

fn sorted(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn distance_to_interval(z: Complex64) -> f64 {
    let dx = (z.re.abs() - 1.0).max(0.0);
    dx.hypot(z.im)
}

/// Largest ellipse parameter whose open Bernstein ellipse avoids every
/// root: the minimum over roots of
/// `(|z+1| + |z-1| + sqrt((|z+1|+|z-1|)^2 - 4)) / 2`.
///
/// An empty root set puts no constraint and returns infinity.
pub fn rho_star(roots: &[Complex64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &z in roots {
        let dist = distance_to_interval(z);
        if dist <= INTERVAL_TOL {
            return Err(Error::RootOnInterval { dist });
        }
        let s = (z + 1.0).norm() + (z - 1.0).norm();
        let rho = 0.5 * (s + (s * s - 4.0).max(0.0).sqrt());
        best = best.min(rho);
    }
    Ok(best)
}

/// Maximum of `sqrt(|speed_sq(z)|) / normalizer` over the boundary of
/// the Bernstein ellipse `E_rho`.
///
/// By conjugate symmetry only the upper half `theta in [0, pi]` is
/// scanned: a uniform grid locates the best cell and golden-section
/// refinement polishes it to 1e-10 in theta. The endpoints of the grid
/// sit on the real axis, so the result always dominates the values
/// there.
pub fn ellipse_sup(speed_sq: &Poly, rho: f64, normalizer: f64) -> Result<f64> {
    assert!(rho > 1.0 && rho.is_finite(), "ellipse parameter must exceed 1");
    assert!(normalizer > 0.0);
    let a = 0.5 * (rho + 1.0 / rho);
    let b = 0.5 * (rho - 1.0 / rho);
    let modulus_sq = |theta: f64| {
        let z = Complex64::new(a * theta.cos(), b * theta.sin());
        speed_sq.eval_complex(z).norm()
    };

    let step = PI / BOUNDARY_GRID as f64;
    let mut best_j = 0;
    let mut best = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for j in 0..=BOUNDARY_GRID {
        let g = modulus_sq(j as f64 * step);
        low = low.min(g);
        if g > best {
            best = g;
            best_j = j;
        }
    }
    let lo = (best_j.saturating_sub(1)) as f64 * step;
    let hi = ((best_j + 1).min(BOUNDARY_GRID)) as f64 * step;
    let refined = golden_max(&modulus_sq, lo, hi, 1e-10);
    let peak = best.max(refined);

    if low < 1e-14 * speed_sq.coeff_abs_sum() {
        return Err(Error::RootInside { rho });
    }
    Ok(peak.sqrt() / normalizer)
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Lower bound `1 + 1/(e d C)` on the safe ellipse parameter of a
/// degree-`d` curve with finite sampling condition `C`.
pub fn rho_lower_bound(d: usize, condition: f64) -> f64 {
    debug_assert!(d >= 1 && condition >= 1.0);
    if condition.is_infinite() {
        return 1.0;
    }
    1.0 + 1.0 / (E * d as f64 * condition)
}

/// Interpolant degree guaranteeing `16 M rho^-k / (rho - 1) <= 2^-(1+ell)`,
/// never below [`K_MIN`].
///
/// An infinite `rho` means the density is a constant, which any degree
/// reproduces exactly. The closing loop re-checks the inequality in
/// floating point so the certificate holds verbatim.
pub fn choose_degree(ell: u32, m: f64, rho: f64) -> usize {
    if !rho.is_finite() {
        return K_MIN;
    }
    debug_assert!(rho > 1.0 && m > 0.0);
    let raw = (5.0 + ell as f64 + m.log2() - (rho - 1.0).log2()) / rho.log2();
    let mut k = if raw > K_MIN as f64 { raw.ceil() as usize } else { K_MIN };
    let budget = 0.5f64.powi(1 + ell as i32);
    while 16.0 * m * rho.powf(-(k as f64)) / (rho - 1.0) > budget {
        k += 1;
    }
    k
}

/// Degree the plain selection rule `5 + ell + ceil((log2 M -
/// log2(rho-1)) / log2 rho)` would pick; logged for comparison only,
/// since it underestimates for `rho < 2`.
pub fn uncertified_degree(ell: u32, m: f64, rho: f64) -> Option<i64> {
    if !rho.is_finite() {
        return None;
    }
    Some(5 + ell as i64 + ((m.log2() - (rho - 1.0).log2()) / rho.log2()).ceil() as i64)
}

/// Per-piece analyticity summary stored in plan files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityReport {
    /// Roots of the squared speed, with multiplicity.
    #[serde(with = "complex_pairs")]
    pub roots: Vec<Complex64>,
    /// Safe ellipse parameter; `null` in JSON encodes the unbounded
    /// (constant-speed) case.
    #[serde(with = "inf_as_null")]
    pub rho_star: f64,
    /// Bound on the normalized speed over the ellipse boundary.
    pub ellipse_sup: f64,
    /// Interpolant degree actually used.
    pub degree: usize,
    /// Uncertified textbook degree, for diagnostics.
    pub uncertified_degree: Option<i64>,
    /// Approximate arc length of the piece in its local frame.
    pub normalizer: f64,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() { Some(*v) } else { None }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
