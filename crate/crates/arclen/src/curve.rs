//! Parametric polynomial curves and their sampling condition number.

use serde::{Deserialize, Serialize};

use crate::analyticity::complex_roots;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// `min_speed <= REL_SPEED_TOL * coeff_norm` counts as vanishing speed:
/// below that the condition number exceeds any practically certifiable
/// budget.
const REL_SPEED_TOL: f64 = 1e-9;

/// Roots of the speed-squared derivative with relative imaginary part
/// at or below this are taken as real critical points.
const REAL_SNAP_TOL: f64 = 1e-9;

/// A polynomial curve `t -> (p_1(t), ..., p_n(t))` over a closed
/// parameter interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct Curve {
    components: Vec<Poly>,
    domain: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    domain: [f64; 2],
    components: Vec<Poly>,
}

impl TryFrom<RawCurve> for Curve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        Curve::new(raw.components, raw.domain[0], raw.domain[1])
    }
}

impl From<Curve> for RawCurve {
    fn from(c: Curve) -> RawCurve {
        RawCurve { domain: c.domain, components: c.components }
    }
}

impl Curve {
    pub fn new(components: Vec<Poly>, a: f64, b: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::NoComponents);
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        if a >= b {
            return Err(Error::EmptyDomain { a, b });
        }
        Ok(Curve { components, domain: [a, b] })
    }

    /// Curve on the canonical domain `[-1, 1]`.
    pub fn canonical(components: Vec<Poly>) -> Result<Self> {
        Curve::new(components, -1.0, 1.0)
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    /// Curve degree: the maximum component degree.
    pub fn degree(&self) -> usize {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn domain(&self) -> [f64; 2] {
        self.domain
    }

    pub fn is_canonical(&self) -> bool {
        self.domain == [-1.0, 1.0]
    }

    /// Evaluate the point `gamma(t)`.
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(t)).collect()
    }

    /// Reparametrize onto `[-1, 1]`: returns `t -> gamma(a + (b-a)(t+1)/2)`.
    /// The image set and the arc-length law of the sampled point are
    /// unchanged.
    pub fn rescale_to_unit(&self) -> Result<Curve> {
        let [a, b] = self.domain;
        if a >= b {
            return Err(Error::EmptyDomain { a, b });
        }
        let alpha = 0.5 * (a + b);
        let beta = 0.5 * (b - a);
        let components = self
            .components
            .iter()
            .map(|p| p.compose_affine(alpha, beta))
            .collect();
        Curve::new(components, -1.0, 1.0)
    }

    /// Restrict a canonical curve to `[a, b]` and rescale the section
    /// back onto `[-1, 1]`.
    pub fn section(&self, a: f64, b: f64) -> Result<Curve> {
        Curve::new(self.components.clone(), a, b)?.rescale_to_unit()
    }
}

/// Squared speed `|gamma'(t)|^2`: the sum of squared component
/// derivatives, a polynomial of degree at most `2(d-1)`.
///
/// Per-coefficient addends are summed in a canonical order, so the
/// result is bit-identical under any permutation of the components.
pub fn speed_squared(curve: &Curve) -> Poly {
    let squares: Vec<Poly> = curve
        .components()
        .iter()
        .map(|p| {
            let d = p.derivative();
            d.mul(&d)
        })
        .collect();
    let len = squares.iter().map(|p| p.coeffs().len()).max().unwrap_or(1);
    let mut out = vec![0.0; len];
    let mut addends: Vec<f64> = Vec::with_capacity(squares.len());
    for (j, slot) in out.iter_mut().enumerate() {
        addends.clear();
        addends.extend(squares.iter().filter_map(|p| p.coeffs().get(j)));
        addends.sort_by(f64::total_cmp);
        *slot = addends.iter().sum();
    }
    Poly::new(out)
}

/// Weighted coefficient norm `sum_i sum_j j*|gamma_{i,j}|`, the
/// numerator of the sampling condition number.
pub fn weighted_coeff_norm(curve: &Curve) -> f64 {
    curve
        .components()
        .iter()
        .map(|p| {
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(j, a)| j as f64 * a.abs())
                .sum::<f64>()
        })
        .sum()
}

/// Condition data for sampling a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionData {
    /// `|gamma'|_0`, the weighted coefficient norm.
    pub coeff_norm: f64,
    /// `inf_t |gamma'(t)|_2` over the canonical domain.
    pub min_speed: f64,
    /// `coeff_norm / min_speed`, at least 1.
    pub condition: f64,
}

/// Compute the sampling condition number of a canonical curve.
///
/// The minimum speed is taken over the real critical points of the
/// squared speed inside `[-1, 1]` together with both endpoints; this is
/// exact for polynomial speeds. Curves whose speed drops below the
/// certifiable threshold are rejected.
pub fn condition_number(curve: &Curve) -> Result<ConditionData> {
    if !curve.is_canonical() {
        let [a, b] = curve.domain();
        return Err(Error::DomainNotCanonical { a, b });
    }
    let coeff_norm = weighted_coeff_norm(curve);
    let sq = speed_squared(curve);
    let sq_deriv = sq.derivative();

    let mut min_sq = sq.eval(-1.0).min(sq.eval(1.0));
    if !sq_deriv.is_zero() && sq_deriv.degree() >= 1 {
        for z in complex_roots(&sq_deriv)? {
            if z.im.abs() <= REAL_SNAP_TOL * z.re.abs().max(1.0)
                && (-1.0..=1.0).contains(&z.re)
            {
                min_sq = min_sq.min(sq.eval(z.re));
            }
        }
    }
    let min_speed = min_sq.max(0.0).sqrt();

    if min_speed <= REL_SPEED_TOL * coeff_norm || min_speed == 0.0 {
        return Err(Error::VanishingSpeed { min_speed, coeff_norm });
    }
    Ok(ConditionData {
        coeff_norm,
        min_speed,
        condition: coeff_norm / min_speed,
    })
}
