//! Seeded generative models for every example in the catalog plus the
//! angular construction used by the extension machinery.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::angular::AngularSpec;
use crate::dist::Cdf;
use crate::error::{Error, Result};
use crate::rng::{counter_uniform, Stream};

/// Model families with their parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelVariant {
    /// (X, X^2 min Z^2) with X, Z iid standard Pareto.
    Ex51,
    /// (X, X min Z) with X ~ Pareto(rho), Z ~ Pareto(1 - rho), 0 < rho < 1.
    Ex52 { rho: f64 },
    /// (R xi, R) with R standard Pareto and xi ~ G independent.
    Ex53 { g: Cdf },
    /// (R0 Theta0, R0 (1 - Theta0)), Theta0 drawn from the normalized
    /// angular measure (extended by zero mass at 1) and R0 a standard
    /// Pareto variable scaled by the total angular mass, so the limit
    /// measure restricted to the strip cone is exactly the one S induces.
    FromAngular { s: AngularSpec },
    /// X ~ H independent of a standard Pareto Y*; the product-limit model.
    ProductLimit { h: Cdf },
    /// (X, X) with X standard Pareto.
    DiagonalPareto,
}

impl ModelVariant {
    pub fn name(&self) -> String {
        match self {
            ModelVariant::Ex51 => "ex51".into(),
            ModelVariant::Ex52 { rho } => format!("ex52(rho={rho})"),
            ModelVariant::Ex53 { g } => format!("ex53({g:?})"),
            ModelVariant::FromAngular { s } => format!("from_angular({s:?})"),
            ModelVariant::ProductLimit { h } => format!("product_limit({h:?})"),
            ModelVariant::DiagonalPareto => "diagonal".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ModelVariant::Ex52 { rho } => {
                if !(*rho > 0.0 && *rho < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "ex52 needs 0 < rho < 1, got {rho}"
                    )));
                }
            }
            ModelVariant::FromAngular { s } => {
                let m = s.to_measure();
                if !m.finite_total {
                    return Err(Error::InfiniteAngularMeasure(format!(
                        "cannot sample from {}: only finite angular measures extend to the full cone",
                        m.label
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// A model plus its seed; everything a batch needs to be reproduced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: ModelVariant,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(variant: ModelVariant, seed: u64) -> Self {
        ModelSpec { variant, seed }
    }
}

/// Equal-length coordinate vectors of i.i.d. draws.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub model: ModelSpec,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Coordinatewise transform, e.g. the per-cone standardization maps.
    pub fn transform(&self, f: impl Fn(f64, f64) -> (f64, f64)) -> SampleBatch {
        let mut xs = Vec::with_capacity(self.len());
        let mut ys = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let (x, y) = f(self.xs[i], self.ys[i]);
            xs.push(x);
            ys.push(y);
        }
        SampleBatch { xs, ys, model: self.model.clone() }
    }

    /// Two-column CSV with header `x,y`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y")?;
        for i in 0..self.len() {
            writeln!(w, "{},{}", self.xs[i], self.ys[i])?;
        }
        Ok(())
    }
}

/// Standard Pareto inverse transform: u in (0,1) -> u^{-1/a}, so that
/// P(result > x) = x^{-a} for x >= 1.
pub fn pareto_inverse(u: f64, index: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidInput(format!("pareto_inverse needs u in (0,1), got {u}")));
    }
    if !(index > 0.0) {
        return Err(Error::InvalidInput(format!("pareto index must be positive, got {index}")));
    }
    Ok(u.powf(-1.0 / index))
}

fn pareto_draw(seed: u64, stream: Stream, i: u64, index: f64) -> f64 {
    counter_uniform(seed, stream, i).powf(-1.0 / index)
}

/// Inverse-cdf table for a normalized angular measure; mixes atoms and
/// density mass on a fixed grid.
struct AngularSampler {
    /// (cumulative mass, theta) knots, cumulative normalized to [0, 1].
    knots: Vec<(f64, f64)>,
    total: f64,
}

const TABLE_POINTS: usize = 10_000;

impl AngularSampler {
    fn build(spec: AngularSpec) -> Result<Self> {
        let m = spec.to_measure();
        let total = m.total()?;
        if !(total > 0.0) {
            return Err(Error::InvalidInput("angular measure has zero mass".into()));
        }
        let mut atoms = m.atoms.clone();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Theta breakpoints: the density grid plus every atom location.
        let (lo, hi) = m.density_support;
        let have_density = m.density.is_some() && hi > lo;
        let mut breaks: Vec<f64> = Vec::new();
        if have_density {
            for j in 0..=TABLE_POINTS {
                breaks.push(lo + (hi - lo) * j as f64 / TABLE_POINTS as f64);
            }
        }
        for &(theta, _) in &atoms {
            breaks.push(theta);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        let mut cum = 0.0;
        let mut prev: Option<f64> = None;
        for &theta in &breaks {
            if let Some(p) = prev {
                if have_density {
                    let a = p.max(lo);
                    let b = theta.min(hi);
                    if b > a {
                        // Only the last segment can touch the singular end.
                        cum += if m.singular_at_one && b >= hi {
                            let dd = m
                                .density_delta
                                .as_ref()
                                .expect("singular measures carry a distance form");
                            crate::quad::integrate_singular_distance(|d| dd(d), b - a, 1e-10)?
                        } else {
                            let f = |w: f64| (m.density.as_ref().unwrap())(w);
                            crate::quad::integrate(f, a, b, 1e-10)?
                        };
                    }
                }
            }
            knots.push((cum, theta));
            if let Ok(idx) = atoms.binary_search_by(|probe| probe.0.total_cmp(&theta)) {
                cum += atoms[idx].1;
                knots.push((cum, theta));
            }
            prev = Some(theta);
        }
        if !(cum > 0.0) {
            return Err(Error::InvalidInput("angular sampler accumulated no mass".into()));
        }
        for knot in &mut knots {
            knot.0 /= cum;
        }
        knots.dedup();
        Ok(AngularSampler { knots, total })
    }

    fn quantile(&self, u: f64) -> f64 {
        // Binary search over cumulative knots; linear interpolation inside
        // continuous segments, exact plateau for atoms.
        let mut lo = 0usize;
        let mut hi = self.knots.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid].0 < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (c0, t0) = self.knots[lo];
        let (c1, t1) = self.knots[hi];
        if c1 <= c0 {
            return t1;
        }
        t0 + (t1 - t0) * ((u - c0) / (c1 - c0)).clamp(0.0, 1.0)
    }
}

/// Draw n i.i.d. pairs from the model. Identical (model, seed, n) triples
/// produce bit-identical batches; chunked generation would too, since every
/// draw is indexed.
pub fn sample(model: &ModelSpec, n: usize) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput("need n >= 1 samples".into()));
    }
    model.variant.validate()?;
    let seed = model.seed;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    match &model.variant {
        ModelVariant::Ex51 => {
            for i in 0..n as u64 {
                let x = pareto_draw(seed, Stream::X, i, 1.0);
                let z = pareto_draw(seed, Stream::Z, i, 1.0);
                xs.push(x);
                ys.push((x * x).min(z * z));
            }
        }
        ModelVariant::Ex52 { rho } => {
            for i in 0..n as u64 {
                let x = pareto_draw(seed, Stream::X, i, *rho);
                let z = pareto_draw(seed, Stream::Z, i, 1.0 - rho);
                xs.push(x);
                ys.push(x.min(z));
            }
        }
        ModelVariant::Ex53 { g } => {
            for i in 0..n as u64 {
                let r = pareto_draw(seed, Stream::R, i, 1.0);
                let xi = g.quantile(counter_uniform(seed, Stream::Xi, i));
                xs.push(r * xi);
                ys.push(r);
            }
        }
        ModelVariant::FromAngular { s } => {
            let sampler = AngularSampler::build(*s)?;
            for i in 0..n as u64 {
                let theta = sampler.quantile(counter_uniform(seed, Stream::Theta, i));
                let r = sampler.total * pareto_draw(seed, Stream::R, i, 1.0);
                xs.push(r * theta);
                ys.push(r * (1.0 - theta));
            }
        }
        ModelVariant::ProductLimit { h } => {
            for i in 0..n as u64 {
                xs.push(h.quantile(counter_uniform(seed, Stream::X, i)));
                ys.push(pareto_draw(seed, Stream::R, i, 1.0));
            }
        }
        ModelVariant::DiagonalPareto => {
            for i in 0..n as u64 {
                let x = pareto_draw(seed, Stream::X, i, 1.0);
                xs.push(x);
                ys.push(x);
            }
        }
    }
    Ok(SampleBatch { xs, ys, model: model.clone() })
}

/// Hill estimator of the tail index from the top k order statistics.
pub fn hill_index(values: &[f64], k: usize) -> Result<f64> {
    if k < 2 || k >= values.len() {
        return Err(Error::KOutOfRange { k, n: values.len() });
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let pivot = sorted[k];
    let mean_log: f64 =
        sorted[..k].iter().map(|v| (v / pivot).ln()).sum::<f64>() / k as f64;
    if mean_log <= 0.0 {
        return Err(Error::InvalidInput("degenerate Hill statistic".into()));
    }
    Ok(1.0 / mean_log)
}
