//! Scalar distributions used as model ingredients (the mixing law G, the
//! conditioning margin F, the product-limit factor H).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// A distribution function on [0, infinity).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cdf {
    /// Uniform on (0, 1).
    Uniform01,
    /// Pareto with tail P(X > x) = x^{-index} on [1, infinity).
    Pareto { index: f64 },
    /// Exponential with the given rate.
    Exp { rate: f64 },
    /// Point mass at a single location.
    PointMass { at: f64 },
}

impl Cdf {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Cdf::Uniform01 => x.clamp(0.0, 1.0),
            Cdf::Pareto { index } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-index)
                }
            }
            Cdf::Exp { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x).exp()
                }
            }
            Cdf::PointMass { at } => {
                if x >= at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Left-continuous quantile, u in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        match *self {
            Cdf::Uniform01 => u,
            Cdf::Pareto { index } => (1.0 - u).powf(-1.0 / index),
            Cdf::Exp { rate } => -(1.0 - u).ln() / rate,
            Cdf::PointMass { at } => at,
        }
    }

    /// Atoms as (location, mass) pairs.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match *self {
            Cdf::PointMass { at } => vec![(at, 1.0)],
            _ => Vec::new(),
        }
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms().is_empty()
    }

    /// Lebesgue density at x, for the absolutely continuous variants.
    pub fn density(&self, x: f64) -> Option<f64> {
        match *self {
            Cdf::Uniform01 => Some(if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 }),
            Cdf::Pareto { index } => Some(if x >= 1.0 {
                index * x.powf(-index - 1.0)
            } else {
                0.0
            }),
            Cdf::Exp { rate } => Some(if x > 0.0 { rate * (-rate * x).exp() } else { 0.0 }),
            Cdf::PointMass { .. } => None,
        }
    }

    /// Mean truncated at T: E[X 1_{X <= T}] + contributions of atoms <= T.
    /// Computed as int_0^T (1 - F) ds - T(1 - F(T)) + ... in the simple
    /// closed forms available per variant; used by the finiteness probe.
    pub fn survival_integral(&self, t: f64) -> f64 {
        // int_0^t (1 - F(s)) ds, which increases to the mean.
        match *self {
            Cdf::Uniform01 => {
                let c = t.min(1.0);
                c - c * c / 2.0
            }
            Cdf::Pareto { index } => {
                if t <= 1.0 {
                    t
                } else if (index - 1.0).abs() < 1e-12 {
                    1.0 + t.ln()
                } else {
                    1.0 + (t.powf(1.0 - index) - 1.0) / (1.0 - index)
                }
            }
            Cdf::Exp { rate } => (1.0 - (-rate * t).exp()) / rate,
            Cdf::PointMass { at } => t.min(at),
        }
    }

    /// int_0^b F(s) ds to the given tolerance. The integrand is a bounded
    /// monotone function, so plain adaptive Simpson applies.
    pub fn integral_of_cdf(&self, b: f64, tol: f64) -> Result<f64> {
        if b < 0.0 {
            return Err(Error::InvalidInput(format!("negative upper limit {b}")));
        }
        if b == 0.0 {
            return Ok(0.0);
        }
        match *self {
            // Closed forms keep downstream homogeneity identities exact.
            Cdf::Uniform01 => Ok(if b <= 1.0 { b * b / 2.0 } else { b - 0.5 }),
            Cdf::PointMass { at } => Ok((b - at).max(0.0)),
            _ => quad::integrate(|s| self.cdf(s), 0.0, b, tol),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pareto_quantile_tail() {
        let g = Cdf::Pareto { index: 2.0 };
        let x = g.quantile(0.99);
        assert_abs_diff_eq!(1.0 - g.cdf(x), 0.01, epsilon = 1e-12);
    }

    #[test]
    fn survival_integral_converges_iff_first_moment() {
        let u = Cdf::Uniform01;
        assert_abs_diff_eq!(u.survival_integral(100.0), 0.5, epsilon = 1e-12);
        let p = Cdf::Pareto { index: 0.5 };
        assert!(p.survival_integral(1e8) > 1e3); // diverges like 2 sqrt(T)
    }

    #[test]
    fn integral_of_uniform_cdf() {
        let u = Cdf::Uniform01;
        assert_abs_diff_eq!(u.integral_of_cdf(0.5, 1e-10).unwrap(), 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(u.integral_of_cdf(2.0, 1e-10).unwrap(), 1.5, epsilon = 1e-14);
    }
}
