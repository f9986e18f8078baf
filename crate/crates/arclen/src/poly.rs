//! Real polynomials in the monomial basis.
//!
//! Coefficients are stored in ascending degree. The representation is
//! canonical: trailing coefficients that are true zeros are trimmed, so
//! the stored length pins the degree. The zero polynomial is the single
//! coefficient `0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Trailing coefficients at or below this magnitude are trimmed as true
/// zeros. Kept extremely small on purpose: the degree drives interpolant
/// selection and must never change through rounding noise.
const TRIM_EPS: f64 = 1e-300;

/// A univariate real polynomial `a_0 + a_1 T + ... + a_m T^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Build a polynomial from ascending-degree coefficients,
    /// normalizing to canonical form.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|a| a.abs() <= TRIM_EPS) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Sum of absolute coefficient values `sum_j |a_j|`.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|a| a.abs()).sum()
    }

    /// Evaluate at a real point by Horner's scheme.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &a in self.coeffs.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Evaluate at a complex point by Horner's scheme.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// Termwise derivative; the derivative of a constant is the zero
    /// polynomial.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &a)| j as f64 * a)
            .collect();
        Poly::new(d)
    }

    /// Product of two polynomials (coefficient convolution).
    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, &b) in other.coeffs.iter().enumerate() {
            out[i] += b;
        }
        Poly::new(out)
    }

    /// Compose with the affine map `T -> alpha + beta T`, expanding
    /// `(alpha + beta T)^j` by exact binomial coefficients and
    /// accumulating each output coefficient with compensated summation.
    /// Binomials stay exact in f64 for the degrees handled here.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Poly {
        let m = self.degree();
        let mut sums = vec![KahanSum::default(); m + 1];
        // Row of binomial coefficients C(j, i), updated in place per j.
        let mut binom = vec![0.0f64; m + 1];
        binom[0] = 1.0;
        for (j, &aj) in self.coeffs.iter().enumerate() {
            if j > 0 {
                for i in (1..=j).rev() {
                    binom[i] += binom[i - 1];
                }
            }
            if aj == 0.0 {
                continue;
            }
            // a_j * C(j, i) * alpha^(j-i) * beta^i contributes to T^i.
            let mut alpha_pow = 1.0; // alpha^(j-i) built from i = j down
            for i in (0..=j).rev() {
                sums[i].add(aj * binom[i] * alpha_pow * beta.powi(i as i32));
                alpha_pow *= alpha;
            }
        }
        Poly::new(sums.into_iter().map(|s| s.value()).collect())
    }
}

impl TryFrom<Vec<f64>> for Poly {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Error> {
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Poly::new(coeffs))
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Vec<f64> {
        p.coeffs
    }
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}
