//! Tail (limit) measures on the cones, evaluated on the canonical rectangle
//! algebra.
//!
//! Every measure is represented as a sum of components:
//!
//! * a smooth part, given by its joint survival function
//!   J(x, y) = m((x, inf] x (y, inf]);
//! * line masses carried by the axes or by a monotone graph u = g(v)
//!   (diagonals, rays, parabolas), each with a continuous radial tail;
//! * optionally an empirical part (scaled sample points with weight 1/k).
//!
//! This decomposition makes evaluation on arbitrary open/closed interval
//! products exact, which is what the band-partition gluing needs.

use std::sync::Arc;

use crate::cones::{ConeId, ConeRect, GenRect};
use crate::error::{Error, Result};

pub(crate) type Surv = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;
pub(crate) type Tail = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub(crate) type Mono = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Component {
    /// Absolutely continuous part with joint survival J.
    Smooth { survival: Surv },
    /// Mass on the horizontal axis {(s, 0)}; tail(s) = mass of {param > s}.
    XAxis { tail: Tail },
    /// Mass on the vertical axis {(0, s)}.
    YAxis { tail: Tail },
    /// Mass on the graph {(g(s), s)} of a strictly increasing g with
    /// g(0) = 0, stored through its inverse v_of_u = g^{-1};
    /// tail(s) = mass of points with v-parameter above s.
    Graph { v_of_u: Mono, tail: Tail },
    /// Point mass 1/k at each stored (already scaled) sample point.
    Empirical { pts: Arc<Vec<(f64, f64)>>, weight: f64 },
}

/// A limit measure: an evaluator of canonical rectangles plus metadata.
///
/// `scaling` records the prelimit normalization exponents (p, q), meaning
/// the measure arises as the limit of t P[(X/t^p, Y/t^q) in .].
/// `hom_order` is Some(a) when the measure satisfies m(cB) = c^{-a} m(B)
/// under isotropic dilation; mixed-exponent display forms carry None.
#[derive(Clone)]
pub struct TailMeasure {
    pub cone: ConeId,
    pub scaling: (f64, f64),
    pub hom_order: Option<f64>,
    pub label: String,
    pub(crate) components: Vec<Component>,
}

impl std::fmt::Debug for TailMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TailMeasure")
            .field("cone", &self.cone)
            .field("scaling", &self.scaling)
            .field("hom_order", &self.hom_order)
            .field("label", &self.label)
            .field("components", &self.components.len())
            .finish()
    }
}

impl TailMeasure {
    pub(crate) fn new(
        cone: ConeId,
        scaling: (f64, f64),
        hom_order: Option<f64>,
        label: impl Into<String>,
        components: Vec<Component>,
    ) -> Self {
        TailMeasure { cone, scaling, hom_order, label: label.into(), components }
    }

    /// Empirical tail measure: (1/k) times the point mass of pre-scaled
    /// sample points. Evaluates exactly on any rectangle.
    pub fn empirical(
        cone: ConeId,
        scaling: (f64, f64),
        scaled_points: Vec<(f64, f64)>,
        k: usize,
    ) -> Self {
        TailMeasure::new(
            cone,
            scaling,
            None,
            format!("empirical(k={k})"),
            vec![Component::Empirical {
                pts: Arc::new(scaled_points),
                weight: 1.0 / k as f64,
            }],
        )
    }

    /// Measure of a canonical rectangle. The rectangle must be a subset of
    /// the measure's cone.
    pub fn eval(&self, rect: &ConeRect) -> Result<f64> {
        if !rect.lies_in(self.cone) {
            return Err(Error::RectOutsideCone {
                rect: rect.to_string(),
                cone: self.cone.to_string(),
            });
        }
        let mut total = 0.0;
        for piece in rect.pieces() {
            total += self.eval_gen(&piece)?;
        }
        Ok(total)
    }

    /// Measure of a generalized rectangle (used by the gluing path, which
    /// intersects canonical rectangles with the epsilon bands).
    pub(crate) fn eval_gen(&self, g: &GenRect) -> Result<f64> {
        if g.u.is_empty() || g.v.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for comp in &self.components {
            total += comp.eval_gen(g)?;
        }
        if !total.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{} is not finite on the requested rectangle",
                self.label
            )));
        }
        Ok(total)
    }
}

impl Component {
    fn eval_gen(&self, g: &GenRect) -> Result<f64> {
        match self {
            Component::Smooth { survival } => {
                let j = |a: f64, b: f64| -> Result<f64> {
                    if a.is_infinite() || b.is_infinite() {
                        return Ok(0.0);
                    }
                    survival(a, b)
                };
                let v = j(g.u.lo, g.v.lo)? - j(g.u.hi, g.v.lo)? - j(g.u.lo, g.v.hi)?
                    + j(g.u.hi, g.v.hi)?;
                // Inclusion-exclusion of a monotone corner function can go
                // epsilon-negative through rounding.
                Ok(v.max(0.0))
            }
            Component::XAxis { tail } => {
                if !g.v.contains_zero() {
                    return Ok(0.0);
                }
                Ok(tail_over(tail, g.u.lo, g.u.hi))
            }
            Component::YAxis { tail } => {
                if !g.u.contains_zero() {
                    return Ok(0.0);
                }
                Ok(tail_over(tail, g.v.lo, g.v.hi))
            }
            Component::Graph { v_of_u, tail } => {
                // Parameter interval: v-range intersected with the preimage
                // of the u-range. The tails are continuous, so endpoint
                // openness cannot carry mass.
                let lo = g.v.lo.max(map_endpoint(v_of_u, g.u.lo));
                let hi = g.v.hi.min(map_endpoint(v_of_u, g.u.hi));
                if !(lo < hi) {
                    return Ok(0.0);
                }
                Ok(tail_over(tail, lo, hi))
            }
            Component::Empirical { pts, weight } => {
                let count = pts.iter().filter(|&&p| g.contains_point(p)).count();
                Ok(count as f64 * weight)
            }
        }
    }
}

fn map_endpoint(f: &Mono, s: f64) -> f64 {
    if s.is_infinite() {
        f64::INFINITY
    } else {
        f(s)
    }
}

fn tail_over(tail: &Tail, lo: f64, hi: f64) -> f64 {
    if !(lo < hi) {
        return 0.0;
    }
    let a = tail(lo);
    let b = if hi.is_infinite() { 0.0 } else { tail(hi) };
    (a - b).max(0.0)
}

/// |m(cB) - c^{-a} m(B)| for the measure's homogeneity order a.
pub fn check_homogeneity(m: &TailMeasure, c: f64, rect: &ConeRect) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("scale factor {c} must be positive")));
    }
    let order = m
        .hom_order
        .ok_or_else(|| Error::InvalidInput(format!("{} has no isotropic homogeneity order", m.label)))?;
    let scaled = m.eval(&rect.scale(c))?;
    let base = m.eval(rect)?;
    Ok((scaled - c.powf(-order) * base).abs())
}

/// Outcome of the product-factorization probe on upper rectangles.
#[derive(Clone, Debug)]
pub struct ProductTestReport {
    pub is_product: bool,
    /// Largest relative cross-factorization defect over the grid pairs.
    pub defect: f64,
}

/// Tests whether m([0,x] x (y,inf]) factorizes as G(x) h(y); a measure
/// satisfying the conditional non-degeneracy conditions on the upper strip
/// never does once it is standard (homogeneous of order one).
pub fn product_test(
    m: &TailMeasure,
    xs: &[f64],
    ys: &[f64],
    rel_tol: f64,
) -> Result<ProductTestReport> {
    if xs.len() < 2 || ys.len() < 2 {
        return Err(Error::InvalidInput("product test needs >= 2 grid points per axis".into()));
    }
    let mut vals = vec![vec![0.0; ys.len()]; xs.len()];
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            vals[i][j] = m.eval(&ConeRect::upper(x, y)?)?;
        }
    }
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..xs.len() {
        for i2 in (i + 1)..xs.len() {
            for j in 0..ys.len() {
                for j2 in (j + 1)..ys.len() {
                    let lhs = vals[i][j] * vals[i2][j2];
                    let rhs = vals[i][j2] * vals[i2][j];
                    defect = defect.max((lhs - rhs).abs());
                    scale = scale.max(lhs.abs()).max(rhs.abs());
                }
            }
        }
    }
    let rel = if scale > 0.0 { defect / scale } else { 0.0 };
    Ok(ProductTestReport { is_product: rel <= rel_tol, defect: rel })
}

/// The conditional law H(x) = m([0,x] x (1,inf]) / m([0,inf] x (1,inf]).
#[derive(Clone)]
pub struct ConditionalLaw {
    measure: TailMeasure,
    normalizer: f64,
}

impl ConditionalLaw {
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let v = self.measure.eval(&ConeRect::Upper { x, y: 1.0 })?;
        Ok((v / self.normalizer).clamp(0.0, 1.0))
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }
}

/// Extract the conditional law from an upper-strip measure. Fails when the
/// strip mass above level one is zero or infinite.
pub fn conditional_h(m: &TailMeasure) -> Result<ConditionalLaw> {
    let z = m.eval(&ConeRect::Upper { x: f64::INFINITY, y: 1.0 })?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::BadNormalizer(z));
    }
    Ok(ConditionalLaw { measure: m.clone(), normalizer: z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::samplers::ModelVariant;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empirical_measure_counts_exactly() {
        let pts = vec![(0.5, 2.0), (3.0, 0.5), (2.0, 2.0), (0.1, 0.1)];
        let m = TailMeasure::empirical(ConeId::Full, (1.0, 1.0), pts, 2);
        let v = m.eval(&ConeRect::Compl { x: 1.0, y: 1.0 }).unwrap();
        // three of four points exceed the unit box; weight 1/2 each
        assert_abs_diff_eq!(v, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn rect_outside_cone_rejected() {
        let m = catalog::make_measure(&ModelVariant::Ex51, ConeId::UpperStrip).unwrap();
        let err = m.eval(&ConeRect::Right { x: 1.0, y: 1.0 }).unwrap_err();
        assert!(matches!(err, Error::RectOutsideCone { .. }));
    }

    #[test]
    fn homogeneity_identity_at_c_equal_one() {
        let m = catalog::diagonal_measure(ConeId::UpperStrip);
        let r = ConeRect::upper(2.0, 1.0).unwrap();
        assert_eq!(check_homogeneity(&m, 1.0, &r).unwrap(), 0.0);
    }
}
