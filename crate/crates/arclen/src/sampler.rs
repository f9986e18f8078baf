//! Offline plan construction and the online bisection sampler.
//!
//! A plan partitions `[-1, 1]`, carries one normalized Chebyshev
//! density and CDF per piece (each on its own local `[-1, 1]` frame),
//! and pins the bisection depth that keeps the quantization error
//! inside the piece budget `2^-(1+ell)`. Drawing is two uniforms plus
//! `bisect_depth` Clenshaw evaluations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analyticity::{
    choose_degree, complex_roots, ellipse_sup, rho_star, uncertified_degree,
    AnalyticityReport, K_MIN,
};
use crate::chebyshev::{
    antiderivative, clenshaw_eval, definite_integral, derivative_series, interpolate,
    sup_norm_estimate, ChebSeries,
};
use crate::curve::{condition_number, speed_squared, Curve};
use crate::error::{Error, Result};
use crate::quad;
use crate::rng::RandomSource;

/// Breakpoints closer than this (to each other or to the endpoints)
/// collapse into one.
const DEDUP_TOL: f64 = 1e-9;
/// Largest tolerated dip of the density interpolant below zero.
const DENSITY_DIP_TOL: f64 = -1e-9;
const CDF_ENDPOINT_TOL: f64 = 1e-10;
const CDF_MONOTONE_TOL: f64 = 1e-10;
/// Degree doublings allowed while repairing a negative density dip.
const MAX_DOUBLINGS: usize = 6;

/// Interior breakpoints for partitioning `[-1, 1]`: the real parts of
/// the given roots that fall strictly inside, united with `splits - 1`
/// uniform interior points when `splits > 0`, sorted and deduplicated.
pub fn split_points(roots: &[Complex64], splits: u32) -> Vec<f64> {
    let mut pts: Vec<f64> = roots
        .iter()
        .map(|z| z.re)
        .filter(|re| re.abs() < 1.0 - DEDUP_TOL)
        .collect();
    for i in 1..splits {
        pts.push(-1.0 + 2.0 * i as f64 / splits as f64);
    }
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|&q| p - q > DEDUP_TOL) {
            out.push(p);
        }
    }
    out
}

/// One subinterval of a plan, with its density and CDF expressed on the
/// piece's local `[-1, 1]` frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanPiece {
    pub(crate) interval: [f64; 2],
    #[serde(rename = "density_coeffs")]
    pub(crate) density: ChebSeries,
    #[serde(rename = "cdf_coeffs")]
    pub(crate) cdf: ChebSeries,
    pub(crate) probability: f64,
    pub(crate) bisect_depth: u32,
}

impl PlanPiece {
    pub fn interval(&self) -> [f64; 2] {
        self.interval
    }

    pub fn density(&self) -> &ChebSeries {
        &self.density
    }

    pub fn cdf(&self) -> &ChebSeries {
        &self.cdf
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn bisect_depth(&self) -> u32 {
        self.bisect_depth
    }
}

/// The immutable offline artifact: curve, partition, per-piece series
/// and the analyticity data that justified them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerPlan {
    pub(crate) ell: u32,
    pub(crate) curve: Curve,
    pub(crate) pieces: Vec<PlanPiece>,
    pub(crate) report: Vec<AnalyticityReport>,
}

impl SamplerPlan {
    /// Error exponent: the certified total-variation budget is `2^-ell`.
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn pieces(&self) -> &[PlanPiece] {
        &self.pieces
    }

    pub fn reports(&self) -> &[AnalyticityReport] {
        &self.report
    }

    /// Largest interpolant degree over the pieces.
    pub fn max_degree(&self) -> usize {
        self.report.iter().map(|r| r.degree).max().unwrap_or(0)
    }

    /// Structural checks for deserialized plans. Certificate-level
    /// checks live in the validation module; this only rejects plans
    /// the sampler cannot run on.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidPlan(msg.to_string()));
        if self.ell == 0 {
            return fail("ell must be at least 1");
        }
        if self.pieces.is_empty() {
            return fail("no pieces");
        }
        if self.report.len() != self.pieces.len() {
            return fail("piece/report length mismatch");
        }
        let mut prev = -1.0;
        let mut total = 0.0;
        for p in &self.pieces {
            let [a, b] = p.interval;
            if !(a < b) || (a - prev).abs() > 1e-9 {
                return fail("intervals do not partition [-1, 1]");
            }
            if !p.probability.is_finite() || !(0.0..=1.0 + 1e-9).contains(&p.probability) {
                return fail("piece probability out of range");
            }
            if p.bisect_depth == 0 {
                return fail("bisection depth must be positive");
            }
            total += p.probability;
            prev = b;
        }
        if (prev - 1.0).abs() > 1e-9 {
            return fail("intervals do not reach 1");
        }
        if (total - 1.0).abs() > 1e-6 {
            return fail("piece probabilities do not sum to 1");
        }
        Ok(())
    }
}

/// Build the offline plan for a canonical curve with error budget
/// `2^-ell`.
///
/// `splits = 0` keeps the whole interval as one piece. `splits >= 1`
/// partitions at the real parts of the squared-speed roots together
/// with `splits - 1` uniform interior points, which shrinks per-piece
/// interpolant degrees considerably on curves with roots near the
/// interval.
///
/// Per piece: the squared speed of the rescaled section, its root set,
/// the safe ellipse parameter, the normalized-speed bound on that
/// ellipse and the resulting interpolant degree; then the unnormalized
/// speed is interpolated, normalized by its own integral (interpolation
/// is linear, so this equals interpolating the normalized speed), the
/// CDF is its pinned antiderivative, and a dense grid guards positivity
/// and monotonicity, doubling the degree on failure.
pub fn build_plan(curve: &Curve, ell: u32, splits: u32) -> Result<SamplerPlan> {
    if !curve.is_canonical() {
        let [a, b] = curve.domain();
        return Err(Error::DomainNotCanonical { a, b });
    }
    condition_number(curve)?;

    let breakpoints = if splits == 0 {
        Vec::new()
    } else {
        let sq = speed_squared(curve);
        let roots = if sq.degree() == 0 { Vec::new() } else { complex_roots(&sq)? };
        split_points(&roots, splits)
    };
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(-1.0);
    edges.extend(breakpoints);
    edges.push(1.0);

    let mut pieces = Vec::new();
    let mut reports = Vec::new();
    let mut weights = Vec::new();
    for w in edges.windows(2) {
        let (piece, report, weight) = build_piece(curve, w[0], w[1], ell)?;
        pieces.push(piece);
        reports.push(report);
        weights.push(weight);
    }
    let total: f64 = weights.iter().sum();
    for (piece, w) in pieces.iter_mut().zip(&weights) {
        piece.probability = w / total;
    }
    Ok(SamplerPlan { ell, curve: curve.clone(), pieces, report: reports })
}

/// Returns the piece, its report, and its unnormalized mass
/// (local integral times half-width).
fn build_piece(
    curve: &Curve,
    a: f64,
    b: f64,
    ell: u32,
) -> Result<(PlanPiece, AnalyticityReport, f64)> {
    let local = curve.section(a, b)?;
    let sq = speed_squared(&local);
    let roots = if sq.degree() == 0 { Vec::new() } else { complex_roots(&sq)? };
    let rho = rho_star(&roots)?;
    let speed = |x: f64| sq.eval(x).max(0.0).sqrt();
    let normalizer = quad::integrate(&speed, -1.0, 1.0, quad::DEFAULT_TOL);

    let (sup_bound, k0, k_plain) = if rho.is_finite() {
        // Roots sit exactly on the extremal ellipse; pull the boundary a
        // hair inside so the scan cannot land on one. The degree is
        // chosen with the same shrunken parameter, so the certificate
        // still matches the ellipse the bound was measured on.
        let rho_in = 1.0 + (rho - 1.0) * (1.0 - 1e-9);
        let m = ellipse_sup(&sq, rho_in, normalizer)?;
        (m, choose_degree(ell, m, rho_in), uncertified_degree(ell, m, rho_in))
    } else {
        // constant speed: the normalized density is exactly 1/2
        (0.5, K_MIN, None)
    };

    let mut k = k0;
    let mut chosen = None;
    for _ in 0..=MAX_DOUBLINGS {
        let raw = interpolate(&speed, k)?;
        let mass = definite_integral(&raw);
        if mass > 0.0 {
            let density = raw.scaled(1.0 / mass);
            let cdf = antiderivative(&density);
            if piece_admissible(&density, &cdf) {
                chosen = Some((density, cdf, mass));
                break;
            }
        }
        k *= 2;
    }
    let Some((density, cdf, mass)) = chosen else {
        return Err(Error::PositivityFailure { retries: MAX_DOUBLINGS });
    };

    let sup_deriv = sup_norm_estimate(&derivative_series(&density)).grid_max;
    let report = AnalyticityReport {
        roots,
        rho_star: rho,
        ellipse_sup: sup_bound,
        degree: density.degree(),
        uncertified_degree: k_plain,
        normalizer,
    };
    let piece = PlanPiece {
        interval: [a, b],
        density,
        cdf,
        probability: 0.0, // filled in once all masses are known
        bisect_depth: bisect_depth(ell, sup_deriv),
    };
    Ok((piece, report, mass * 0.5 * (b - a)))
}

/// Density nonnegative (within tolerance) and CDF monotone with pinned
/// endpoints, on a grid of `10 (k+1)` points.
fn piece_admissible(density: &ChebSeries, cdf: &ChebSeries) -> bool {
    let n = 10 * (density.degree() + 1);
    let mut prev = f64::NEG_INFINITY;
    for j in 0..n {
        let x = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
        if clenshaw_eval(density, x) < DENSITY_DIP_TOL {
            return false;
        }
        let c = clenshaw_eval(cdf, x);
        if c < prev - CDF_MONOTONE_TOL {
            return false;
        }
        prev = c;
    }
    clenshaw_eval(cdf, -1.0).abs() <= CDF_ENDPOINT_TOL
        && (clenshaw_eval(cdf, 1.0) - 1.0).abs() <= CDF_ENDPOINT_TOL
}

/// Bisection depth that certifies `2^(1-depth) * sup|density'| <=
/// 2^-(1+ell)`, re-checked in floating point.
fn bisect_depth(ell: u32, sup_deriv: f64) -> u32 {
    let base = 1 + ell;
    let mut depth = if sup_deriv > 0.0 {
        let needed = 2 + ell as i64 + sup_deriv.log2().ceil() as i64;
        (base as i64).max(needed) as u32
    } else {
        base
    };
    let budget = 0.5f64.powi(1 + ell as i32);
    while 0.5f64.powi(depth as i32 - 1) * sup_deriv > budget {
        depth += 1;
    }
    depth
}

/// Draw from a piece's local density by `bisect_depth` bisection steps
/// on `u - cdf`, then a uniform pick inside the final bracket.
///
/// The update keeps the sign change inside the bracket: when the
/// midpoint sign matches the left sign the solution lies to the right,
/// so the left endpoint advances. A zero midpoint sign counts as left.
pub fn bisection_draw<R: RandomSource + ?Sized>(piece: &PlanPiece, rng: &mut R) -> f64 {
    let u = rng.next_unit();
    let mut lo = -1.0f64;
    let mut hi = 1.0f64;
    for _ in 0..piece.bisect_depth {
        let mid = 0.5 * (lo + hi);
        if u - clenshaw_eval(&piece.cdf, mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + rng.next_unit() * (hi - lo)
}

/// Draw a parameter `t in [-1, 1]`: pick a piece by inverse CDF over
/// the piece probabilities (ties to the lower index), sample inside it,
/// and map the local coordinate back to the global subinterval.
pub fn draw_parameter<R: RandomSource + ?Sized>(plan: &SamplerPlan, rng: &mut R) -> f64 {
    let u = rng.next_unit();
    let mut index = plan.pieces.len() - 1;
    let mut cumulative = 0.0;
    for (i, piece) in plan.pieces.iter().enumerate() {
        cumulative += piece.probability;
        if u <= cumulative {
            index = i;
            break;
        }
    }
    let piece = &plan.pieces[index];
    let x = bisection_draw(piece, rng);
    let [a, b] = piece.interval;
    0.5 * (a + b) + 0.5 * (b - a) * x
}

/// Draw a point on the curve, arc-length uniform up to the plan's
/// certified budget.
pub fn sample_point<R: RandomSource + ?Sized>(plan: &SamplerPlan, rng: &mut R) -> Vec<f64> {
    plan.curve.point_at(draw_parameter(plan, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rng::{ChaChaSource, ScriptedSource};

    fn poly(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.to_vec())
    }

    fn line() -> Curve {
        Curve::canonical(vec![poly(&[0.0, 1.0]), Poly::zero()]).unwrap()
    }

    fn parabola() -> Curve {
        Curve::canonical(vec![poly(&[0.0, 1.0]), poly(&[0.0, 0.0, 1.0])]).unwrap()
    }

    fn cubic_loop() -> Curve {
        Curve::canonical(vec![poly(&[0.0, -2.0, 0.0, 3.0]), poly(&[0.0, 0.0, 2.0])])
            .unwrap()
    }

    fn uniform_piece(depth: u32) -> PlanPiece {
        let density = ChebSeries::new(vec![1.0]); // constant 1/2
        let cdf = antiderivative(&density); // exactly (x+1)/2
        PlanPiece {
            interval: [-1.0, 1.0],
            density,
            cdf,
            probability: 1.0,
            bisect_depth: depth,
        }
    }

    #[test]
    fn split_points_examples() {
        let pair = [Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5)];
        assert_eq!(split_points(&pair, 0), vec![0.0]);

        assert_eq!(split_points(&[], 4), vec![-0.5, 0.0, 0.5]);

        let roots = [
            Complex64::new(0.3, 0.1),
            Complex64::new(0.3, -0.1),
            Complex64::new(2.0, 1.0),
        ];
        assert_eq!(split_points(&roots, 0), vec![0.3]);
    }

    #[test]
    fn line_plan_is_a_single_uniform_piece() {
        let plan = build_plan(&line(), 4, 0).unwrap();
        assert_eq!(plan.pieces().len(), 1);
        let piece = &plan.pieces()[0];
        assert_eq!(piece.probability(), 1.0);
        assert_eq!(piece.bisect_depth(), 5); // 1 + ell, flat density
        for j in 0..=10 {
            let x = -1.0 + 0.2 * j as f64;
            assert!((clenshaw_eval(piece.density(), x) - 0.5).abs() < 1e-12);
            assert!((clenshaw_eval(piece.cdf(), x) - 0.5 * (x + 1.0)).abs() < 1e-12);
        }
        assert_eq!(plan.reports()[0].rho_star, f64::INFINITY);
        assert!((plan.reports()[0].normalizer - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parabola_plan_single_piece_with_golden_rho() {
        let plan = build_plan(&parabola(), 4, 0).unwrap();
        assert_eq!(plan.pieces().len(), 1);
        let golden = 0.5 * (1.0 + 5.0f64.sqrt());
        assert!((plan.reports()[0].rho_star - golden).abs() < 1e-9);
        // even density: the CDF at the symmetry point is exactly 1/2
        assert!((clenshaw_eval(plan.pieces()[0].cdf(), 0.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn cubic_loop_plan_degree_matches_reported_scale() {
        let plan = build_plan(&cubic_loop(), 4, 0).unwrap();
        assert_eq!(plan.pieces().len(), 1);
        let k = plan.reports()[0].degree;
        assert!((20..=70).contains(&k), "degree {k} outside the expected band");
    }

    #[test]
    fn vanishing_speed_propagates() {
        let cusp =
            Curve::canonical(vec![poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0])]).unwrap();
        assert!(matches!(
            build_plan(&cusp, 4, 0),
            Err(Error::VanishingSpeed { .. })
        ));
    }

    #[test]
    fn bisection_uniform_examples() {
        // exact inverse of u = 0.25 is -0.5
        let piece = uniform_piece(20);
        let mut rng = ScriptedSource::new(vec![0.25, 0.0]);
        let x = bisection_draw(&piece, &mut rng);
        assert!((x + 0.5).abs() <= 2.0 * 0.5f64.powi(20));

        // one hand-worked step: midpoint CDF 0.5 > u, bracket [-1, 0]
        let piece = uniform_piece(1);
        let mut rng = ScriptedSource::new(vec![0.3, 0.5]);
        assert_eq!(bisection_draw(&piece, &mut rng), -0.5);
    }

    #[test]
    fn bisection_brackets_parabola_median() {
        let plan = build_plan(&parabola(), 4, 0).unwrap();
        let piece = &plan.pieces()[0];
        let mut rng = ScriptedSource::new(vec![0.5, 0.77]);
        let x = bisection_draw(piece, &mut rng);
        let width = 2.0 * 0.5f64.powi(piece.bisect_depth() as i32);
        assert!(x.abs() <= width, "median draw {x} strays beyond {width}");
    }

    #[test]
    fn bisection_keeps_the_sign_change_bracketed() {
        let plan = build_plan(&cubic_loop(), 7, 0).unwrap();
        let piece = &plan.pieces()[0];
        let mut rng = ChaChaSource::seeded(9);
        for _ in 0..200 {
            let u = rng.next_unit();
            let mut lo = -1.0f64;
            let mut hi = 1.0f64;
            for _ in 0..piece.bisect_depth() {
                let mid = 0.5 * (lo + hi);
                if u - clenshaw_eval(piece.cdf(), mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                // invariant: sign(u - cdf(lo)) >= 0 >= sign(u - cdf(hi))
                assert!(u - clenshaw_eval(piece.cdf(), lo) >= 0.0);
                assert!(u - clenshaw_eval(piece.cdf(), hi) < 0.0);
            }
        }
    }

    #[test]
    fn single_piece_draw_reduces_to_bisection() {
        let plan = build_plan(&parabola(), 4, 0).unwrap();
        let mut direct = ScriptedSource::new(vec![0.37, 0.81]);
        let x = bisection_draw(&plan.pieces()[0], &mut direct);
        let mut staged = ScriptedSource::new(vec![0.99, 0.37, 0.81]);
        let t = draw_parameter(&plan, &mut staged);
        assert_eq!(t, x); // identity interval map
    }

    #[test]
    fn piece_selection_uses_cumulative_probabilities() {
        let plan = build_plan(&line(), 4, 2).unwrap();
        assert_eq!(plan.pieces().len(), 2);
        assert!((plan.pieces()[0].probability() - 0.5).abs() < 1e-12);
        // u = 0.7 falls past the first piece's mass
        let mut rng = ScriptedSource::new(vec![0.7, 0.5, 0.5]);
        let t = draw_parameter(&plan, &mut rng);
        assert!((0.0..=1.0).contains(&t));
        // a tie at the boundary stays with the lower index
        let mut rng = ScriptedSource::new(vec![0.5, 0.5, 0.5]);
        let t = draw_parameter(&plan, &mut rng);
        assert!((-1.0..=0.0).contains(&t));
    }

    #[test]
    fn piece_frequencies_match_probabilities() {
        let plan = build_plan(&parabola(), 4, 4).unwrap();
        let n = 1_000_000usize;
        let mut rng = ChaChaSource::seeded(123);
        let mut counts = vec![0usize; plan.pieces().len()];
        for _ in 0..n {
            let t = draw_parameter(&plan, &mut rng);
            let idx = plan
                .pieces()
                .iter()
                .position(|p| t <= p.interval()[1])
                .unwrap_or(plan.pieces().len() - 1);
            counts[idx] += 1;
        }
        for (count, piece) in counts.iter().zip(plan.pieces()) {
            let p = piece.probability();
            let dev = (*count as f64 / n as f64 - p).abs();
            assert!(
                dev <= 4.0 * (p / n as f64).sqrt(),
                "piece frequency off by {dev:.2e} for p = {p:.4}"
            );
        }
    }

    #[test]
    fn sample_point_stays_on_the_line() {
        let plan = build_plan(&line(), 4, 0).unwrap();
        let mut rng = ChaChaSource::seeded(5);
        for _ in 0..100 {
            let p = sample_point(&plan, &mut rng);
            assert_eq!(p.len(), 2);
            assert!((-1.0..=1.0).contains(&p[0]));
            assert_eq!(p[1], 0.0);
        }
    }

    #[test]
    fn plan_validates_and_rejects_corruption() {
        let mut plan = build_plan(&parabola(), 4, 2).unwrap();
        plan.validate().unwrap();
        plan.pieces[0].bisect_depth = 0;
        assert!(matches!(plan.validate(), Err(Error::InvalidPlan(_))));
    }
}
