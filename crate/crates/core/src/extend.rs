//! Extension of a conditional limit to a joint limit on the full cone:
//! the norming-ratio classification, the angular construction, and the
//! tail-equivalence probe.

use serde::Serialize;

use crate::angular::AngularSpec;
use crate::cones::ConeRect;
use crate::dist::Cdf;
use crate::error::{Error, Result};
use crate::estimate::tail_measure_estimate;
use crate::limits::TailMeasure;
use crate::samplers::{ModelVariant, SampleBatch};
use crate::standardize::NormFns;

/// Limit class of chi(t)/alpha(t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtensionClass {
    Zero,
    Finite(f64),
    Infinite,
}

/// Classify lim chi(t)/alpha(t) over the grid. The extension to a joint
/// limit is available for `Finite` and `Infinite`; `Zero` falls outside
/// the sufficient condition and no extension claim is made.
pub fn extension_condition(
    chi: &NormFns,
    alpha: &NormFns,
    t_grid: &[f64],
) -> Result<ExtensionClass> {
    if t_grid.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 grid points".into()));
    }
    let (tmin, tmax) = (t_grid[0], t_grid[t_grid.len() - 1]);
    if tmax / tmin < 1e3 {
        return Err(Error::InvalidInput("ratio grid must span >= 3 decades".into()));
    }
    let ratios: Vec<f64> = t_grid
        .iter()
        .map(|&t| (chi.scale)(t) / (alpha.scale)(t))
        .collect();
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::NonConvergentRatio);
    }
    // successive growth factors over the tail of the grid
    let n = ratios.len();
    let tail: Vec<f64> = (n.saturating_sub(4)..n - 1)
        .map(|j| ratios[j + 1] / ratios[j])
        .collect();
    let qmin = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let qmax = tail.iter().copied().fold(0.0_f64, f64::max);
    if qmin > 1.05 {
        return Ok(ExtensionClass::Infinite);
    }
    if qmax < 0.95 {
        return Ok(ExtensionClass::Zero);
    }
    if qmax <= 1.05 && qmin >= 0.95 {
        // Aitken acceleration of the ratio sequence for the constant
        let (a, b, c) = (ratios[n - 3], ratios[n - 2], ratios[n - 1]);
        let denom = (c - b) - (b - a);
        let m = if denom.abs() > 1e-12 * (1.0 + c.abs()) {
            c - (c - b) * (c - b) / denom
        } else {
            c
        };
        if m > 0.0 && m.is_finite() {
            return Ok(ExtensionClass::Finite(m));
        }
        return Ok(ExtensionClass::Zero);
    }
    Err(Error::NonConvergentRatio)
}

/// The angular extension: a sampler on the full cone whose limit measure
/// restricts to the strip measure S induces. Rejects infinite S, the
/// direction in which the equivalence fails.
pub fn mevt_extension(s: AngularSpec) -> Result<(ModelVariant, TailMeasure)> {
    let measure = s.to_measure();
    if !measure.finite_total {
        return Err(Error::InfiniteAngularMeasure(format!(
            "{}: a tail-equivalent full-cone vector exists iff the strip angular measure is finite",
            measure.label
        )));
    }
    let variant = ModelVariant::FromAngular { s };
    let full = crate::catalog::from_angular_measure(measure, crate::cones::ConeId::Full)?;
    Ok((variant, full))
}

/// Numeric first-moment probe: int (1+s) G(ds) < infinity, tested by
/// truncating the survival integral at growing cutoffs.
pub fn angular_finiteness(g: &Cdf) -> bool {
    let i1 = g.survival_integral(1e6);
    let i2 = g.survival_integral(1e8);
    (i2 - i1).abs() <= 1e-3 * (1.0 + i1.abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct TailEquivalence {
    pub c_hat: f64,
    pub per_rect: Vec<(String, f64)>,
    pub skipped: Vec<String>,
    /// Coefficient of variation of the per-rect ratios.
    pub cv: f64,
    pub pass: bool,
}

/// Ratio of tail estimates between two batches over a rectangle family;
/// tail equivalence means the ratios agree on a common constant.
pub fn tail_equivalence_check(
    b1: &SampleBatch,
    b2: &SampleBatch,
    rects: &[ConeRect],
    k: usize,
) -> Result<TailEquivalence> {
    if b1.len() != b2.len() {
        return Err(Error::InvalidInput("batches must have the same size".into()));
    }
    let mut per_rect = Vec::new();
    let mut skipped = Vec::new();
    for rect in rects {
        let e1 = tail_measure_estimate(b1, k, (1.0, 1.0), rect)?;
        let e2 = tail_measure_estimate(b2, k, (1.0, 1.0), rect)?;
        if e2.value <= 0.0 || e1.value <= 0.0 {
            skipped.push(rect.to_string());
            continue;
        }
        per_rect.push((rect.to_string(), e1.value / e2.value));
    }
    if per_rect.len() < 2 {
        return Err(Error::InvalidInput(
            "tail equivalence needs at least two rectangles with mass".into(),
        ));
    }
    let mean = per_rect.iter().map(|(_, r)| r).sum::<f64>() / per_rect.len() as f64;
    let var = per_rect
        .iter()
        .map(|(_, r)| (r - mean) * (r - mean))
        .sum::<f64>()
        / per_rect.len() as f64;
    let cv = var.sqrt() / mean;
    Ok(TailEquivalence { c_hat: mean, per_rect, skipped, cv, pass: cv <= 0.1 })
}
