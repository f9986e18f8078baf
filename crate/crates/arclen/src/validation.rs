//! Independent oracles and estimators for checking a plan against the
//! exact arc-length law.
//!
//! Everything here evaluates the exact square-root speed through
//! adaptive quadrature; none of it goes through the Chebyshev series it
//! is judging.

use serde::{Deserialize, Serialize};

use crate::analyticity::rho_lower_bound;
use crate::chebyshev::{clenshaw_eval, derivative_series, sup_norm_estimate};
use crate::curve::{condition_number, speed_squared, Curve};
use crate::quad;
use crate::sampler::SamplerPlan;

fn speed_of(curve: &Curve) -> impl Fn(f64) -> f64 {
    let sq = speed_squared(curve);
    move |t: f64| sq.eval(t).max(0.0).sqrt()
}

/// Exact-speed CDF values at ascending points, computed by one
/// incremental quadrature sweep.
fn cdf_at_sorted_points(curve: &Curve, points: &[f64]) -> Vec<f64> {
    let speed = speed_of(curve);
    let total = quad::integrate(&speed, -1.0, 1.0, quad::DEFAULT_TOL);
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    let mut prev = -1.0;
    for &p in points {
        let x = p.clamp(-1.0, 1.0);
        acc += quad::integrate(&speed, prev, x, quad::DEFAULT_TOL);
        prev = x;
        out.push((acc / total).clamp(0.0, 1.0));
    }
    out
}

/// Normalized arc-length CDF of the exact speed at `t`, by adaptive
/// quadrature. This is the reference the sampler is measured against.
pub fn reference_cdf(curve: &Curve, t: f64) -> f64 {
    let speed = speed_of(curve);
    let total = quad::integrate(&speed, -1.0, 1.0, quad::DEFAULT_TOL);
    let part = quad::integrate(&speed, -1.0, t.clamp(-1.0, 1.0), quad::DEFAULT_TOL);
    (part / total).clamp(0.0, 1.0)
}

/// Total variation between the empirical sample law and the exact law,
/// restricted to `bins` equal-width bins of `[-1, 1]`. A lower bound on
/// the true TV distance.
pub fn binned_tv(samples: &[f64], curve: &Curve, bins: usize) -> f64 {
    assert!(bins >= 2, "need at least two bins");
    assert!(!samples.is_empty(), "need samples");
    let mut counts = vec![0u64; bins];
    for &s in samples {
        let idx = (((s + 1.0) * 0.5 * bins as f64) as i64).clamp(0, bins as i64 - 1);
        counts[idx as usize] += 1;
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|b| -1.0 + 2.0 * b as f64 / bins as f64)
        .collect();
    let cdf = cdf_at_sorted_points(curve, &edges);
    let n = samples.len() as f64;
    0.5 * counts
        .iter()
        .enumerate()
        .map(|(b, &c)| (c as f64 / n - (cdf[b + 1] - cdf[b])).abs())
        .sum::<f64>()
}

/// Kolmogorov–Smirnov statistic of the samples against the exact
/// arc-length CDF.
pub fn ks_statistic(samples: &[f64], curve: &Curve) -> f64 {
    assert!(!samples.is_empty(), "need samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cdf = cdf_at_sorted_points(curve, &sorted);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &f) in cdf.iter().enumerate() {
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// The plan's composite density at a global parameter `t`: the owning
/// piece's local density scaled by `probability / half_width`.
pub fn plan_density(plan: &SamplerPlan, t: f64) -> f64 {
    let pieces = plan.pieces();
    let idx = pieces
        .iter()
        .position(|p| t <= p.interval()[1])
        .unwrap_or(pieces.len() - 1);
    let piece = &pieces[idx];
    let [a, b] = piece.interval();
    let half = 0.5 * (b - a);
    let x = ((t - 0.5 * (a + b)) / half).clamp(-1.0, 1.0);
    clenshaw_eval(piece.density(), x) * piece.probability() / half
}

/// `L1` distance between the plan's composite density and the exact
/// normalized speed, integrated piece by piece.
pub fn l1_density_error(plan: &SamplerPlan, curve: &Curve) -> f64 {
    let speed = speed_of(curve);
    let total = quad::integrate(&speed, -1.0, 1.0, quad::DEFAULT_TOL);
    plan.pieces()
        .iter()
        .map(|piece| {
            let [a, b] = piece.interval();
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let f = |t: f64| {
                let x = ((t - mid) / half).clamp(-1.0, 1.0);
                let approx = clenshaw_eval(piece.density(), x) * piece.probability() / half;
                (approx - speed(t) / total).abs()
            };
            quad::integrate(&f, a, b, quad::DEFAULT_TOL)
        })
        .sum()
}

/// One itemized certificate check.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheck {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
}

/// Evaluate every certificate backing the plan's TV budget:
/// the measured `L1` density error against `2^-(1+ell)`, the per-piece
/// bisection quantization budget, the ellipse-parameter lower bound,
/// and CDF monotonicity.
pub fn check_certificates(plan: &SamplerPlan, curve: &Curve) -> Vec<CertificateCheck> {
    let budget = 0.5f64.powi(1 + plan.ell() as i32);
    let mut checks = Vec::new();

    let l1 = l1_density_error(plan, curve);
    checks.push(CertificateCheck {
        name: "l1_density_error".to_string(),
        passed: l1 <= budget,
        observed: l1,
        bound: budget,
    });

    for (i, piece) in plan.pieces().iter().enumerate() {
        let sup = sup_norm_estimate(&derivative_series(piece.density())).grid_max;
        let observed = 0.5f64.powi(piece.bisect_depth() as i32 - 1) * sup;
        checks.push(CertificateCheck {
            name: format!("bisection_budget_piece_{i}"),
            passed: observed <= budget,
            observed,
            bound: budget,
        });
    }

    for (i, (piece, report)) in plan.pieces().iter().zip(plan.reports()).enumerate() {
        let [a, b] = piece.interval();
        let (passed, bound) = match curve
            .section(a, b)
            .and_then(|sec| condition_number(&sec).map(|c| (sec.degree(), c)))
        {
            Ok((d, cond)) => {
                let bound = rho_lower_bound(d.max(1), cond.condition);
                (report.rho_star > bound, bound)
            }
            Err(_) => (false, f64::NAN),
        };
        checks.push(CertificateCheck {
            name: format!("rho_lower_bound_piece_{i}"),
            passed,
            observed: report.rho_star,
            bound,
        });
    }

    for (i, piece) in plan.pieces().iter().enumerate() {
        let n = 10 * (piece.density().degree() + 1);
        let mut worst: f64 = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for j in 0..n {
            let x = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            let c = clenshaw_eval(piece.cdf(), x);
            if j > 0 {
                worst = worst.max(prev - c);
            }
            prev = c;
        }
        checks.push(CertificateCheck {
            name: format!("cdf_monotone_piece_{i}"),
            passed: worst <= 1e-10,
            observed: worst,
            bound: 1e-10,
        });
    }

    checks
}

/// Summary emitted by the `validate` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TVReport {
    /// Quadrature estimate of the density `L1` error.
    pub l1_density_error: f64,
    /// Empirical TV against the oracle on equal-width bins.
    pub binned_tv: f64,
    /// Kolmogorov–Smirnov statistic against the oracle CDF.
    pub ks_stat: f64,
    /// Certified budget `2^-ell`.
    pub budget: f64,
    pub sample_count: usize,
    pub bins: usize,
}

/// Assemble a [`TVReport`] from drawn parameter samples.
pub fn tv_report(
    plan: &SamplerPlan,
    curve: &Curve,
    samples: &[f64],
    bins: usize,
) -> TVReport {
    TVReport {
        l1_density_error: l1_density_error(plan, curve),
        binned_tv: binned_tv(samples, curve, bins),
        ks_stat: ks_statistic(samples, curve),
        budget: 0.5f64.powi(plan.ell() as i32),
        sample_count: samples.len(),
        bins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rng::{ChaChaSource, RandomSource};
    use crate::sampler::build_plan;

    fn poly(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.to_vec())
    }

    fn line() -> Curve {
        Curve::canonical(vec![poly(&[0.0, 1.0]), Poly::zero()]).unwrap()
    }

    fn parabola() -> Curve {
        Curve::canonical(vec![poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0])]).unwrap()
    }

    #[test]
    fn reference_cdf_examples() {
        assert!((reference_cdf(&line(), 0.0) - 0.5).abs() < 1e-12);
        // even integrand: half the mass sits left of 0
        assert!((reference_cdf(&parabola(), 0.0) - 0.5).abs() < 1e-10);
        assert!((reference_cdf(&parabola(), 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_cdf_is_monotone_and_normalized() {
        let c = parabola();
        let grid: Vec<f64> = (0..=1000).map(|j| -1.0 + 0.002 * j as f64).collect();
        let cdf = cdf_at_sorted_points(&c, &grid);
        assert!(cdf.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((cdf.last().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn binned_tv_degenerate_cases() {
        let c = line();
        // every sample in one of two bins, uniform model
        assert!((binned_tv(&vec![-0.7; 100], &c, 2) - 0.5).abs() < 1e-12);
        // one sample per bin matches the model exactly
        assert!(binned_tv(&[-0.5, 0.5], &c, 2) < 1e-12);
    }

    #[test]
    fn binned_tv_of_oracle_samples_is_noise_level() {
        // invert a dense tabulation of the exact CDF, then check the
        // multinomial fluctuation bound 3 sqrt(B / 4N)
        let c = parabola();
        let m = 4096usize;
        let grid: Vec<f64> = (0..=m).map(|j| -1.0 + 2.0 * j as f64 / m as f64).collect();
        let cdf = cdf_at_sorted_points(&c, &grid);

        let n = 1_000_000usize;
        let bins = 256usize;
        let mut rng = ChaChaSource::seeded(2024);
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                let u = rng.next_unit();
                let idx = cdf.partition_point(|&f| f <= u).min(m);
                let (f0, f1) = (cdf[idx - 1], cdf[idx]);
                let frac = if f1 > f0 { (u - f0) / (f1 - f0) } else { 0.5 };
                grid[idx - 1] + frac * (grid[idx] - grid[idx - 1])
            })
            .collect();
        let tv = binned_tv(&samples, &c, bins);
        let slack = 3.0 * (bins as f64 / (4.0 * n as f64)).sqrt();
        assert!(tv <= slack, "oracle-sample TV {tv:.4} above noise bound {slack:.4}");
    }

    #[test]
    fn ks_statistic_examples() {
        let c = line();
        // single sample at the exact median
        assert!((ks_statistic(&[0.0], &c) - 0.5).abs() < 1e-12);
        // everything collapsed to the left endpoint
        assert!((ks_statistic(&vec![-1.0; 10], &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_of_uniform_stream() {
        let c = line();
        let mut rng = ChaChaSource::seeded(77);
        let samples: Vec<f64> = (0..1_000_000).map(|_| 2.0 * rng.next_unit() - 1.0).collect();
        let ks = ks_statistic(&samples, &c);
        assert!(ks <= 0.002, "uniform KS statistic {ks:.5}");
    }

    #[test]
    fn l1_density_error_examples() {
        let line_plan = build_plan(&line(), 4, 0).unwrap();
        assert!(l1_density_error(&line_plan, &line()) <= 1e-10);

        let p4 = build_plan(&parabola(), 4, 0).unwrap();
        assert!(l1_density_error(&p4, &parabola()) <= 0.5f64.powi(5));

        let p10 = build_plan(&parabola(), 10, 0).unwrap();
        assert!(l1_density_error(&p10, &parabola()) <= 0.5f64.powi(11));
    }

    #[test]
    fn certificates_pass_for_built_plans() {
        for (curve, ell) in [(line(), 4u32), (parabola(), 7u32)] {
            let plan = build_plan(&curve, ell, 0).unwrap();
            let checks = check_certificates(&plan, &curve);
            for c in &checks {
                assert!(c.passed, "{} failed: {:.3e} vs {:.3e}", c.name, c.observed, c.bound);
            }
        }
    }

    #[test]
    fn corrupted_depth_fails_the_bisection_certificate() {
        let c = parabola();
        let mut plan = build_plan(&c, 7, 0).unwrap();
        let depth = plan.pieces[0].bisect_depth;
        plan.pieces[0].bisect_depth = depth.saturating_sub(5).max(1);
        let checks = check_certificates(&plan, &c);
        let bisect = checks
            .iter()
            .find(|ch| ch.name == "bisection_budget_piece_0")
            .unwrap();
        assert!(!bisect.passed);
    }

    #[test]
    fn piecewise_l1_respects_length_times_sup() {
        // |piece L1| <= piece length * grid sup of the gap
        let c = parabola();
        let plan = build_plan(&c, 4, 2).unwrap();
        let speed = speed_of(&c);
        let total = quad::integrate(&speed, -1.0, 1.0, quad::DEFAULT_TOL);
        for piece in plan.pieces() {
            let [a, b] = piece.interval();
            let f = |t: f64| (plan_density(&plan, t) - speed(t) / total).abs();
            let l1 = quad::integrate(&f, a, b, quad::DEFAULT_TOL);
            let mut sup: f64 = 0.0;
            for j in 0..=2000 {
                let t = a + (b - a) * j as f64 / 2000.0;
                sup = sup.max(f(t));
            }
            assert!(l1 <= (b - a) * sup + 1e-9);
        }
    }

    #[test]
    fn binned_tv_below_l1_plus_noise_for_plan_samples() {
        let c = parabola();
        let plan = build_plan(&c, 7, 0).unwrap();
        let n = 400_000usize;
        let bins = 128usize;
        let mut rng = ChaChaSource::seeded(31);
        let samples: Vec<f64> = (0..n)
            .map(|_| crate::sampler::draw_parameter(&plan, &mut rng))
            .collect();
        let tv = binned_tv(&samples, &c, bins);
        let l1 = l1_density_error(&plan, &c);
        let slack = 3.0 * (bins as f64 / (4.0 * n as f64)).sqrt();
        assert!(tv <= l1 + slack, "tv {tv:.4} > l1 {l1:.2e} + slack {slack:.4}");
        // tightness of the certified budget, for the record
        println!(
            "binned_tv / budget = {:.3e}",
            tv / 0.5f64.powi(plan.ell() as i32)
        );
    }
}
