//! Chebyshev interpolation and series calculus on `[-1, 1]`.
//!
//! A series stores coefficients `(c_0, ..., c_k)` and represents
//! `c_0/2 + sum_{a>=1} c_a T_a(x)` with `T_a(x) = cos(a arccos x)`.
//! Interpolation matches the target at the `k+1` zeros of `T_{k+1}`,
//! which keeps the node values `cos(a*theta_i)` exact; the binomial
//! closed form of `T_a` is never used.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A finite Chebyshev expansion on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Chebyshev series needs c_0");
        ChebSeries { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree bound `k` of the represented polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Series scaled by a constant factor.
    pub fn scaled(&self, factor: f64) -> ChebSeries {
        ChebSeries::new(self.coeffs.iter().map(|c| c * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for ChebSeries {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(ChebSeries::new(coeffs))
    }
}

impl From<ChebSeries> for Vec<f64> {
    fn from(s: ChebSeries) -> Vec<f64> {
        s.coeffs
    }
}

/// The `k` zeros of `T_k`, in decreasing order:
/// `cos((1+2a)pi/(2k))` for `a = 0..k`.
///
/// Mirrored around the midpoint so the set is exactly symmetric about 0
/// (with 0 itself exact for odd `k`).
pub fn cheb_nodes(k: usize) -> Vec<f64> {
    assert!(k >= 1);
    let mut nodes = vec![0.0; k];
    for a in 0..k / 2 {
        let theta = (1 + 2 * a) as f64 * PI / (2 * k) as f64;
        let v = theta.cos();
        nodes[a] = v;
        nodes[k - 1 - a] = -v;
    }
    // middle node of an odd count is exactly 0
    nodes
}

/// Angles `theta_i` with `zeta_{i,k} = cos(theta_i)`.
fn node_angles(k: usize) -> Vec<f64> {
    (0..k)
        .map(|a| (1 + 2 * a) as f64 * PI / (2 * k) as f64)
        .collect()
}

/// Degree-`k` Chebyshev interpolant of `f`, matching it at the `k+1`
/// zeros of `T_{k+1}`:
/// `c_a = 2/(k+1) * sum_i f(zeta_i) cos(a theta_i)`.
///
/// Exact (to rounding) whenever `f` is a polynomial of degree at most
/// `k`. Cost is `O(k^2)`; at the degrees produced here that is cheaper
/// than setting up a transform.
pub fn interpolate<F: Fn(f64) -> f64>(f: F, k: usize) -> Result<ChebSeries> {
    let n = k + 1;
    let nodes = cheb_nodes(n);
    let angles = node_angles(n);
    let mut values = Vec::with_capacity(n);
    for &x in &nodes {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { node: x, value: v });
        }
        values.push(v);
    }
    let scale = 2.0 / n as f64;
    let coeffs = (0..n)
        .map(|a| {
            scale
                * values
                    .iter()
                    .zip(&angles)
                    .map(|(v, theta)| v * (a as f64 * theta).cos())
                    .sum::<f64>()
        })
        .collect();
    Ok(ChebSeries::new(coeffs))
}

/// Evaluate a series by the Clenshaw backward recurrence
/// `B_a = 2x B_{a+1} - B_{a+2} + c_a`, value `(B_0 - B_2)/2`.
pub fn clenshaw_eval(s: &ChebSeries, x: f64) -> f64 {
    let c = s.coeffs();
    let two_x = 2.0 * x;
    let mut b1 = 0.0; // B_{a+1}
    let mut b2 = 0.0; // B_{a+2}
    for &ca in c.iter().rev() {
        let b0 = two_x * b1 - b2 + ca;
        b2 = b1;
        b1 = b0;
    }
    // b1 = B_0, b2 = B_1; B_2 = 2x B_1 - B_0 + c_0 undone:
    0.5 * (b1 - (two_x * b2 - b1 + c[0]))
}

/// Antiderivative with the constant pinned so `P(-1) = 0`, i.e. the
/// series of `x -> integral_{-1}^{x} s`.
///
/// Interior coefficients follow `pc_a = (c_{a-1} - c_{a+1})/(2a)`, with
/// the two top coefficients closing the recurrence.
pub fn antiderivative(s: &ChebSeries) -> ChebSeries {
    let c = s.coeffs();
    let k = s.degree();
    let mut pc = vec![0.0; k + 2];
    for a in 1..=k + 1 {
        let lower = c[a - 1];
        let upper = if a + 1 <= k { c[a + 1] } else { 0.0 };
        pc[a] = (lower - upper) / (2.0 * a as f64);
    }
    // P(-1) = pc_0/2 + sum (-1)^a pc_a = 0.
    let mut at_minus_one = 0.0;
    for (a, &p) in pc.iter().enumerate().skip(1) {
        at_minus_one += if a % 2 == 0 { p } else { -p };
    }
    pc[0] = -2.0 * at_minus_one;
    ChebSeries::new(pc)
}

/// `integral_{-1}^{1}` of the represented polynomial:
/// `c_0 - sum_{a even >= 2} 2 c_a / (a^2 - 1)`.
pub fn definite_integral(s: &ChebSeries) -> f64 {
    let c = s.coeffs();
    let mut total = c[0];
    let mut a = 2;
    while a <= s.degree() {
        total -= 2.0 * c[a] / ((a * a - 1) as f64);
        a += 2;
    }
    total
}

/// Exact derivative of the represented polynomial, as a series of
/// degree `k-1`, by the backward recurrence
/// `d_{a-1} = d_{a+1} + 2a c_a` with `d_k = d_{k+1} = 0`.
pub fn derivative_series(s: &ChebSeries) -> ChebSeries {
    let c = s.coeffs();
    let k = s.degree();
    if k == 0 {
        return ChebSeries::new(vec![0.0]);
    }
    let mut d = vec![0.0; k + 2];
    for a in (1..=k).rev() {
        d[a - 1] = d[a + 1] + 2.0 * a as f64 * c[a];
    }
    d.truncate(k);
    ChebSeries::new(d)
}

/// A grid lower estimate of the sup-norm together with the certified
/// coefficient-sum upper bound.
#[derive(Debug, Clone, Copy)]
pub struct SupNormEstimate {
    /// Max of `|s(x)|` over a Chebyshev-extrema grid of `8(k+1)+1`
    /// points (which includes both endpoints); never exceeds the true
    /// sup-norm.
    pub grid_max: f64,
    /// `|c_0|/2 + sum_{a>=1} |c_a|`; never below the true sup-norm.
    pub coeff_bound: f64,
}

/// Estimate `max_{[-1,1]} |s|` from below (dense grid) and above
/// (coefficient sum).
pub fn sup_norm_estimate(s: &ChebSeries) -> SupNormEstimate {
    let m = 8 * (s.degree() + 1);
    let mut grid_max: f64 = 0.0;
    for j in 0..=m {
        let x = (j as f64 * PI / m as f64).cos();
        grid_max = grid_max.max(clenshaw_eval(s, x).abs());
    }
    let c = s.coeffs();
    let coeff_bound = 0.5 * c[0].abs() + c[1..].iter().map(|a| a.abs()).sum::<f64>();
    SupNormEstimate { grid_max, coeff_bound }
}
