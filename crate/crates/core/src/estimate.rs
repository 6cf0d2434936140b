//! Empirical counterparts of the catalog limits: tail-measure estimation on
//! rectangles, the min-characterization function, and density-limit checks.

use serde::Serialize;

use crate::cones::ConeRect;
use crate::error::{Error, Result};
use crate::samplers::SampleBatch;

/// A tail estimate with a binomial standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailEstimate {
    pub value: f64,
    pub stderr: f64,
    pub k: usize,
    pub scaling: (f64, f64),
}

impl TailEstimate {
    pub(crate) fn from_count(count: usize, k: usize, n: usize, scaling: (f64, f64)) -> Self {
        let p_hat = count as f64 / n as f64;
        let stderr = (p_hat * (1.0 - p_hat) * n as f64).sqrt() / k as f64;
        TailEstimate { value: count as f64 / k as f64, stderr, k, scaling }
    }
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 10 || k > n / 10 {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// Default number of exceedances when the caller does not pin one.
pub fn default_k(n: usize) -> usize {
    ((n as f64).powf(0.6) as usize).clamp(10, n / 10)
}

/// Empirical tail measure of a rectangle:
/// (1/k) #{ i : (x_i / t^p, y_i / t^q) in r } with t = n/k.
pub fn tail_measure_estimate(
    batch: &SampleBatch,
    k: usize,
    exps: (f64, f64),
    rect: &ConeRect,
) -> Result<TailEstimate> {
    let n = batch.len();
    check_k(k, n)?;
    let t = n as f64 / k as f64;
    let (sx, sy) = (t.powf(exps.0), t.powf(exps.1));
    let count = (0..n)
        .filter(|&i| rect.contains_point((batch.xs[i] / sx, batch.ys[i] / sy)))
        .count();
    Ok(TailEstimate::from_count(count, k, n, exps))
}

/// Estimate of c(a) = y * lim t P(min(a X, Y)/t > y); `a = inf` drops the
/// first coordinate from the minimum.
pub fn c_function_estimate(
    batch: &SampleBatch,
    a: f64,
    y: f64,
    k: usize,
) -> Result<TailEstimate> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("min coefficient must be positive, got {a}")));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidInput(format!("level y must be positive, got {y}")));
    }
    let n = batch.len();
    check_k(k, n)?;
    let t = n as f64 / k as f64;
    let threshold = t * y;
    let count = (0..n)
        .filter(|&i| {
            let m = if a.is_infinite() {
                batch.ys[i]
            } else {
                (a * batch.xs[i]).min(batch.ys[i])
            };
            m > threshold
        })
        .count();
    let mut est = TailEstimate::from_count(count, k, n, (1.0, 1.0));
    est.value *= y;
    est.stderr *= y;
    Ok(est)
}

type Density1 = std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Density2 = std::sync::Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Analytic density model with its expected scaled limits.
#[derive(Clone)]
pub struct DensityModel {
    pub joint: Density2,
    pub marginal_x: Density1,
    pub marginal_y: Density1,
    /// Expected limit of t^3 f(tx, ty).
    pub limit_g: Density2,
    /// Expected limits of t^2 f_X(tx) and t^2 f_Y(ty).
    pub limit_gx: Density1,
    pub limit_gy: Density1,
    pub label: String,
}

/// Residuals of the density convergences at the largest grid scale:
/// max |t^3 f(tx, ty) - g(x, y)| over the points, plus the marginal
/// residuals |t^2 f_X(tx) - g_X(x)| and |t^2 f_Y(ty) - g_Y(y)|.
#[derive(Clone, Debug, Serialize)]
pub struct DensityResiduals {
    pub joint: f64,
    pub marginal_x: f64,
    pub marginal_y: f64,
    pub t: f64,
}

pub fn density_limit_check(
    model: &DensityModel,
    t_grid: &[f64],
    points: &[(f64, f64)],
) -> Result<DensityResiduals> {
    let &t = t_grid
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .ok_or_else(|| Error::InvalidInput("empty t grid".into()))?;
    if !(t > 0.0) {
        return Err(Error::InvalidInput("t grid must be positive".into()));
    }
    let mut joint: f64 = 0.0;
    let mut mx: f64 = 0.0;
    let mut my: f64 = 0.0;
    for &(x, y) in points {
        let scaled = t * t * t * (model.joint)(t * x, t * y);
        joint = joint.max((scaled - (model.limit_g)(x, y)).abs());
        mx = mx.max((t * t * (model.marginal_x)(t * x) - (model.limit_gx)(x)).abs());
        my = my.max((t * t * (model.marginal_y)(t * y) - (model.limit_gy)(y)).abs());
    }
    Ok(DensityResiduals { joint, marginal_x: mx, marginal_y: my, t })
}

/// Density triple of the scale mixture (R xi, R) with xi uniform on (0,1):
/// f(x, y) = y^{-3} on {y >= 1, 0 < x < y}, f_X(x) = max(1, x)^{-2}/2,
/// f_Y(y) = y^{-2} on [1, inf). The scaled joint equals its limit exactly
/// once ty > 1, and both marginals match their limits exactly as well
/// (the X-limit carries the factor E[xi] = 1/2).
pub fn ex53_uniform_density_model() -> DensityModel {
    DensityModel {
        joint: std::sync::Arc::new(|x: f64, y: f64| {
            if y >= 1.0 && x > 0.0 && x < y {
                y.powi(-3)
            } else {
                0.0
            }
        }),
        marginal_x: std::sync::Arc::new(|x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                0.5 * x.max(1.0).powi(-2)
            }
        }),
        marginal_y: std::sync::Arc::new(|y: f64| if y >= 1.0 { y.powi(-2) } else { 0.0 }),
        limit_g: std::sync::Arc::new(|x: f64, y: f64| {
            if x > 0.0 && x < y {
                y.powi(-3)
            } else {
                0.0
            }
        }),
        limit_gx: std::sync::Arc::new(|x: f64| 0.5 * x.powi(-2)),
        limit_gy: std::sync::Arc::new(|y: f64| y.powi(-2)),
        label: "ex53-uniform".into(),
    }
}

/// Independent standard Pareto pair. The marginals are standard, but the
/// scaled joint density is x^{-2} y^{-2} / t: under the common scaling the
/// interior mass escapes and the joint limit is zero, the density-level
/// face of asymptotic independence. The residual at scale t is exactly
/// (xy)^{-2}/t on the grid.
pub fn independent_pareto_density_model() -> DensityModel {
    let pareto = |s: f64| if s >= 1.0 { s.powi(-2) } else { 0.0 };
    DensityModel {
        joint: std::sync::Arc::new(move |x: f64, y: f64| pareto(x) * pareto(y)),
        marginal_x: std::sync::Arc::new(pareto),
        marginal_y: std::sync::Arc::new(pareto),
        limit_g: std::sync::Arc::new(|_, _| 0.0),
        limit_gx: std::sync::Arc::new(|x: f64| x.powi(-2)),
        limit_gy: std::sync::Arc::new(|y: f64| y.powi(-2)),
        label: "independent-pareto".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{sample, ModelSpec, ModelVariant};
    use approx::assert_abs_diff_eq;

    #[test]
    fn k_bounds_enforced() {
        let b = sample(&ModelSpec::new(ModelVariant::DiagonalPareto, 1), 1000).unwrap();
        let r = ConeRect::upper(1.0, 1.0).unwrap();
        assert!(tail_measure_estimate(&b, 5, (1.0, 1.0), &r).is_err());
        assert!(tail_measure_estimate(&b, 500, (1.0, 1.0), &r).is_err());
        assert!(tail_measure_estimate(&b, 50, (1.0, 1.0), &r).is_ok());
    }

    #[test]
    fn estimates_are_permutation_invariant() {
        let b = sample(&ModelSpec::new(ModelVariant::Ex51, 12), 10_000).unwrap();
        let r = ConeRect::upper(2.0, 1.0).unwrap();
        let e1 = tail_measure_estimate(&b, 100, (0.5, 1.0), &r).unwrap();
        let mut rev = b.clone();
        rev.xs.reverse();
        rev.ys.reverse();
        let e2 = tail_measure_estimate(&rev, 100, (0.5, 1.0), &r).unwrap();
        assert_eq!(e1.value, e2.value);
    }

    #[test]
    fn diagonal_exact_tail() {
        // For (X, X) the prelimit is exact: t P(X <= tx, X > ty) = 1/y - 1/x.
        let n = 200_000;
        let k = default_k(n);
        let b = sample(&ModelSpec::new(ModelVariant::DiagonalPareto, 4), n).unwrap();
        let r = ConeRect::upper(4.0, 1.0).unwrap();
        let est = tail_measure_estimate(&b, k, (1.0, 1.0), &r).unwrap();
        assert_abs_diff_eq!(est.value, 0.75, epsilon = 5.0 * est.stderr.max(0.01));
    }

    #[test]
    fn scaling_mismatch_drives_interior_mass_to_zero() {
        // Common scaling (t, t) sees no interior mass for the
        // quartic-minimum model.
        let n = 1_000_000;
        let b = sample(&ModelSpec::new(ModelVariant::Ex51, 9), n).unwrap();
        let r = ConeRect::joint_exceed(1.0, 1.0).unwrap();
        let est = tail_measure_estimate(&b, 1000, (1.0, 1.0), &r).unwrap();
        assert!(est.value < 0.06, "interior estimate {}", est.value);
    }

    #[test]
    fn density_residuals_vanish_for_exact_models() {
        let model = ex53_uniform_density_model();
        // Joint residual is exactly zero for ty > 1 and 0 < x < y.
        let pts = [(0.5, 1.0), (0.25, 2.0), (1.0, 3.0)];
        let res = density_limit_check(&model, &[10.0, 100.0], &pts).unwrap();
        assert_abs_diff_eq!(res.joint, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(res.marginal_x, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(res.marginal_y, 0.0, epsilon = 1e-14);

        let ind = independent_pareto_density_model();
        let res2 = density_limit_check(&ind, &[50.0], &pts).unwrap();
        // scaled joint mass escapes like (xy)^{-2}/t; worst grid point
        // here is (0.5, 1.0) with 4/t
        assert_abs_diff_eq!(res2.joint, 4.0 / 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res2.marginal_x, 0.0, epsilon = 1e-14);
        let res3 = density_limit_check(&ind, &[50.0, 5000.0], &pts).unwrap();
        assert_abs_diff_eq!(res3.joint, 4.0 / 5000.0, epsilon = 1e-12);
    }
}
