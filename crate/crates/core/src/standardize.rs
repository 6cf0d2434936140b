//! Regime classification of norming pairs and the constructive
//! standardizing transformations between the conditional model and
//! standard regular variation on the upper strip cone.

use std::sync::Arc;

use crate::cones::ConeRect;
use crate::dist::Cdf;
use crate::error::{Error, Result};
use crate::limits::TailMeasure;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scaling/centering pair with its margin index.
#[derive(Clone)]
pub struct NormFns {
    pub scale: ScalarFn,
    pub center: ScalarFn,
    pub margin_index: f64,
}

impl NormFns {
    pub fn new(
        scale: impl Fn(f64) -> f64 + Send + Sync + 'static,
        center: impl Fn(f64) -> f64 + Send + Sync + 'static,
        margin_index: f64,
    ) -> Self {
        NormFns { scale: Arc::new(scale), center: Arc::new(center), margin_index }
    }

    /// scale = t^a, center = 0.
    pub fn power(a: f64) -> Self {
        NormFns::new(move |t: f64| t.powf(a), |_| 0.0, a)
    }
}

/// Scaling regime: psi1(c) = c^rho and psi2(c) = k (c^rho - 1)/rho
/// (k log c when rho = 0).
#[derive(Clone, Debug, PartialEq)]
pub struct PsiClass {
    pub rho: f64,
    pub k: f64,
    /// Largest deviation of the measured psi values from the fitted model.
    pub residual: f64,
}

impl PsiClass {
    /// (psi1, psi2) = (1, 0): the product regime where no marginal
    /// standardizer exists.
    pub fn is_product_obstruction(&self) -> bool {
        self.rho == 0.0 && self.k == 0.0
    }

    pub fn psi2(&self, c: f64) -> f64 {
        if self.rho == 0.0 {
            self.k * c.ln()
        } else {
            self.k * (c.powf(self.rho) - 1.0) / self.rho
        }
    }
}

fn aitken(seq: &[f64]) -> f64 {
    let n = seq.len();
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom.abs() < 1e-12 * (1.0 + c.abs()) {
        return c;
    }
    let ext = c - d2 * d2 / denom;
    if ext.is_finite() {
        ext
    } else {
        c
    }
}

fn lagrange_at(zs: &[f64], ss: &[f64], z0: f64) -> f64 {
    let mut out = 0.0;
    for i in 0..zs.len() {
        let mut w = 1.0;
        for j in 0..zs.len() {
            if i != j {
                w *= (z0 - zs[j]) / (zs[i] - zs[j]);
            }
        }
        out += w * ss[i];
    }
    out
}

/// Limit of a sequence indexed by a geometric t grid. Two error models are
/// fitted on the last three points -- geometric decay (Aitken is exact
/// there) and a polynomial in 1/ln t (three-point Richardson) -- and the
/// one that back-predicts the fourth-from-last point better wins.
fn extrapolate(seq: &[f64], t_grid: &[f64]) -> f64 {
    let n = seq.len();
    if n < 3 {
        return seq[n - 1];
    }
    let d1 = seq[n - 2] - seq[n - 3];
    let d2 = seq[n - 1] - seq[n - 2];
    if d2.abs() < 1e-12 * (1.0 + seq[n - 1].abs()) {
        return seq[n - 1];
    }
    let ait = aitken(seq);
    if n < 4 {
        return ait;
    }
    let z: Vec<f64> = (n - 3..n).map(|j| 1.0 / t_grid[j].ln()).collect();
    let s = &seq[n - 3..n];
    let rich = lagrange_at(&z, s, 0.0);
    if !rich.is_finite() {
        return ait;
    }
    let actual = seq[n - 4];
    // geometric backcast: previous difference = d1 / q with q = d2/d1
    let res_geo = if d1.abs() > 0.0 && (d2 / d1).abs() > 1e-12 {
        (actual - (seq[n - 3] - d1 / (d2 / d1))).abs()
    } else {
        f64::INFINITY
    };
    let res_rich = (actual - lagrange_at(&z, s, 1.0 / t_grid[n - 4].ln())).abs();
    if res_rich < res_geo {
        rich
    } else {
        ait
    }
}

fn limit_with_check(seq: &[f64], t_grid: &[f64], what: &str) -> Result<f64> {
    let n = seq.len();
    if n < 3 {
        return Err(Error::ClassificationFailure(format!("{what}: grid too short")));
    }
    let last = seq[n - 1];
    let prev = seq[n - 2];
    if !last.is_finite() || !prev.is_finite() {
        return Err(Error::ClassificationFailure(format!("{what}: non-finite ratios")));
    }
    if (last - prev).abs() > 0.02 * (1.0 + last.abs()) {
        return Err(Error::ClassificationFailure(format!(
            "{what}: ratios still moving at the top of the grid ({prev} -> {last})"
        )));
    }
    Ok(extrapolate(seq, t_grid))
}

/// Default classification grids: t over six decades, c a small spread.
pub fn default_t_grid() -> Vec<f64> {
    (0..=12).map(|j| 10f64.powf(2.0 + 0.5 * j as f64)).collect()
}

pub fn default_c_grid() -> Vec<f64> {
    vec![0.25, 0.5, 2.0, 4.0, 8.0]
}

/// Fit (rho, k) from the limits of scale(tc)/scale(t) and
/// (center(tc) - center(t))/scale(t) over the grids.
pub fn psi_classify(f: &NormFns, t_grid: &[f64], c_grid: &[f64]) -> Result<PsiClass> {
    let (tmin, tmax) = match (
        t_grid.iter().copied().reduce(f64::min),
        t_grid.iter().copied().reduce(f64::max),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("empty t grid".into())),
    };
    if tmax / tmin < 1e3 {
        return Err(Error::InvalidInput("psi classification needs >= 3 decades of t".into()));
    }
    let mut psi1 = Vec::with_capacity(c_grid.len());
    let mut psi2 = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        if !(c > 0.0) || c == 1.0 {
            return Err(Error::InvalidInput("c grid must be positive and avoid 1".into()));
        }
        let ratios: Vec<f64> = t_grid
            .iter()
            .map(|&t| (f.scale)(t * c) / (f.scale)(t))
            .collect();
        psi1.push(limit_with_check(&ratios, t_grid, "psi1")?);
        let diffs: Vec<f64> = t_grid
            .iter()
            .map(|&t| ((f.center)(t * c) - (f.center)(t)) / (f.scale)(t))
            .collect();
        psi2.push(limit_with_check(&diffs, t_grid, "psi2")?);
    }
    // rho from log-log regression of psi1 through the origin.
    let mut num = 0.0;
    let mut den = 0.0;
    for (&c, &p1) in c_grid.iter().zip(&psi1) {
        if !(p1 > 0.0) {
            return Err(Error::ClassificationFailure("psi1 not positive".into()));
        }
        num += c.ln() * p1.ln();
        den += c.ln() * c.ln();
    }
    let mut rho = num / den;
    // Log-type convergence leaves O(1/ln t) residue even after
    // extrapolation, so snap small fitted exponents to zero.
    if rho.abs() < 0.01 {
        rho = 0.0;
    }
    // k from regression of psi2 on the regime shape.
    let shape = |c: f64| {
        if rho == 0.0 {
            c.ln()
        } else {
            (c.powf(rho) - 1.0) / rho
        }
    };
    let mut knum = 0.0;
    let mut kden = 0.0;
    for (&c, &p2) in c_grid.iter().zip(&psi2) {
        knum += shape(c) * p2;
        kden += shape(c) * shape(c);
    }
    let mut k = knum / kden;
    if k.abs() < 0.01 {
        k = 0.0;
    }
    let klass = PsiClass { rho, k, residual: 0.0 };
    let mut residual: f64 = 0.0;
    for (&c, (&p1, &p2)) in c_grid.iter().zip(psi1.iter().zip(&psi2)) {
        residual = residual.max((p1 - c.powf(rho)).abs());
        residual = residual.max((p2 - klass.psi2(c)).abs());
    }
    Ok(PsiClass { residual, ..klass })
}

// ---------------------------------------------------------------------------
// Monotone functions with numeric inverses.
// ---------------------------------------------------------------------------

/// A strictly monotone function with a numeric generalized inverse in the
/// left-continuous convention: for increasing f,
/// inverse(w) = inf { y : f(y) >= w }.
#[derive(Clone)]
pub struct MonotoneFn {
    forward: ScalarFn,
    pub domain: (f64, f64),
    pub increasing: bool,
}

impl MonotoneFn {
    pub fn new(forward: ScalarFn, domain: (f64, f64), increasing: bool) -> Self {
        MonotoneFn { forward, domain, increasing }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.forward)(x)
    }

    /// Bisection in log-space (the domains here are positive). The search
    /// interval expands beyond the nominal domain so inverses of grid-built
    /// functions extrapolate consistently with `eval`.
    pub fn inverse(&self, w: f64) -> f64 {
        let (mut lo, mut hi) = self.domain;
        lo = lo.max(1e-300);
        let target_reached = |y: f64| {
            if self.increasing {
                self.eval(y) >= w
            } else {
                self.eval(y) <= w
            }
        };
        // expand outward until the target is bracketed
        let mut guard = 0;
        while !target_reached(hi) && guard < 2000 {
            hi *= 2.0;
            guard += 1;
        }
        while target_reached(lo) && guard < 4000 {
            lo *= 0.5;
            guard += 1;
            if lo < 1e-300 {
                break;
            }
        }
        let mut llo = lo.ln();
        let mut lhi = hi.ln();
        for _ in 0..100 {
            let mid = 0.5 * (llo + lhi);
            if target_reached(mid.exp()) {
                lhi = mid;
            } else {
                llo = mid;
            }
        }
        lhi.exp()
    }
}

/// How asymptotic equivalence is measured in `monotone_equivalent`.
pub enum EquivMode {
    /// f_tilde(t)/f(t) -> 1 (regular variation).
    RatioToOne,
    /// (f_tilde(t) - f(t))/aux(t) -> 0 (Pi-variation).
    PiRemainder { aux: ScalarFn },
}

const EQUIV_GRID_POINTS: usize = 481;

/// Strictly monotone asymptotic equivalent of f, built as the running
/// extremum over a geometric grid with interpolation between knots
/// (log-log for positive ratio-mode functions, value-vs-log-t otherwise).
pub fn monotone_equivalent(
    f: &ScalarFn,
    increasing: bool,
    mode: EquivMode,
    domain: (f64, f64),
) -> Result<MonotoneFn> {
    let (lo, hi) = domain;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("bad domain ({lo}, {hi})")));
    }
    let llo = lo.ln();
    let lhi = hi.ln();
    let mut log_t = Vec::with_capacity(EQUIV_GRID_POINTS);
    let mut vals = Vec::with_capacity(EQUIV_GRID_POINTS);
    for j in 0..EQUIV_GRID_POINTS {
        let lt = llo + (lhi - llo) * j as f64 / (EQUIV_GRID_POINTS - 1) as f64;
        let t = lt.exp();
        let raw = f(t);
        if !raw.is_finite() {
            return Err(Error::NotMonotoneEquivalent(format!("f({t}) not finite")));
        }
        let constrained = if let Some(&prev) = vals.last() {
            let bump = 1e-12 * (1.0 + f64::abs(prev));
            if increasing {
                raw.max(prev + bump)
            } else {
                raw.min(prev - bump)
            }
        } else {
            raw
        };
        log_t.push(lt);
        vals.push(constrained);
    }
    // Equivalence check: the deviation on the top decade must be small or
    // clearly shrinking relative to mid-grid.
    let dev_at = |j: usize| -> f64 {
        let t = log_t[j].exp();
        match &mode {
            EquivMode::RatioToOne => (vals[j] / f(t) - 1.0).abs(),
            EquivMode::PiRemainder { aux } => ((vals[j] - f(t)) / aux(t)).abs(),
        }
    };
    let tail_dev = (EQUIV_GRID_POINTS * 2 / 3..EQUIV_GRID_POINTS)
        .map(dev_at)
        .fold(0.0_f64, f64::max);
    let mid_dev = (EQUIV_GRID_POINTS / 3..EQUIV_GRID_POINTS * 2 / 3)
        .map(dev_at)
        .fold(0.0_f64, f64::max);
    if tail_dev > 0.01 && tail_dev > 0.7 * mid_dev {
        return Err(Error::NotMonotoneEquivalent(format!(
            "deviation not converging (mid {mid_dev:.3e}, tail {tail_dev:.3e})"
        )));
    }
    let loglog = matches!(mode, EquivMode::RatioToOne) && vals.iter().all(|&v| v > 0.0);
    let stored: Vec<f64> = if loglog { vals.iter().map(|v| v.ln()).collect() } else { vals };
    let forward: ScalarFn = Arc::new(move |t: f64| {
        let lt = t.max(1e-300).ln();
        let n = log_t.len();
        // segment index with linear extension beyond the ends
        let j = match log_t.binary_search_by(|probe| probe.total_cmp(&lt)) {
            Ok(j) => j.min(n - 2),
            Err(0) => 0,
            Err(j) if j >= n => n - 2,
            Err(j) => j - 1,
        };
        let w = (lt - log_t[j]) / (log_t[j + 1] - log_t[j]);
        let val = stored[j] + w * (stored[j + 1] - stored[j]);
        if loglog {
            val.exp()
        } else {
            val
        }
    });
    Ok(MonotoneFn::new(forward, domain, increasing))
}

// ---------------------------------------------------------------------------
// Marginal standardization.
// ---------------------------------------------------------------------------

/// The standardizer y -> 1/(1 - F(y)), so that the transformed variable is
/// standard Pareto-tailed. Requires a continuous, strictly increasing tail.
pub fn marginal_standardizer(f: &Cdf) -> Result<MonotoneFn> {
    if f.has_atoms() {
        return Err(Error::AtomsInTail);
    }
    let cdf = *f;
    let forward: ScalarFn = Arc::new(move |y: f64| 1.0 / (1.0 - cdf.cdf(y)));
    let domain = match f {
        Cdf::Uniform01 => (1e-12, 1.0 - 1e-12),
        Cdf::Pareto { .. } => (1.0, 1e12),
        Cdf::Exp { rate } => (1e-12, 40.0 / rate),
        Cdf::PointMass { .. } => unreachable!(),
    };
    Ok(MonotoneFn::new(forward, domain, true))
}

/// The extreme-value margin map h(y) = (1 + gamma y)^{1/gamma}, read as
/// e^y at gamma = 0. Defined on {1 + gamma y > 0}.
pub fn ev_margin_transform(gamma: f64, y: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(y.exp());
    }
    let base = 1.0 + gamma * y;
    if !(base > 0.0) {
        return Err(Error::InvalidInput(format!(
            "point {y} outside the gamma = {gamma} margin domain"
        )));
    }
    Ok(base.powf(1.0 / gamma))
}

// ---------------------------------------------------------------------------
// The lambda construction.
// ---------------------------------------------------------------------------

/// Which constructive case produced the transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaCase {
    /// rho > 0, psi2 = 0: lambda is the monotone equivalent of the scale.
    PosRhoScale,
    /// rho > 0, k > 0: lambda is the monotone equivalent of the center.
    PosRhoCenter,
    /// rho = 0, k > 0, center unbounded.
    PiPlusInfinite,
    /// rho = 0, k > 0, center converging to a finite endpoint B; lambda is
    /// the reciprocal device 1/(B - center~) with rebuilt normings.
    PiPlusFinite,
    /// rho = 0, k < 0 (the reciprocal regime, handled via a decreasing
    /// equivalent and verified empirically).
    PiMinus,
    /// rho < 0, psi2 = 0: lambda = B - scale~ with B the center limit.
    NegRhoScale,
    /// rho < 0, k < 0: lambda is the (decreasing) center equivalent.
    NegRhoCenter,
}

/// A standardizing transformation together with the norming pair it is to
/// be used with and its predicted transformed limit.
#[derive(Clone)]
pub struct LambdaTransform {
    pub lambda: MonotoneFn,
    pub scale: ScalarFn,
    pub center: ScalarFn,
    pub case: LambdaCase,
    rho: f64,
    k: f64,
}

impl std::fmt::Debug for LambdaTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LambdaTransform")
            .field("case", &self.case)
            .field("rho", &self.rho)
            .field("k", &self.k)
            .finish()
    }
}

impl LambdaTransform {
    /// Predicted value of the transformed limit
    /// lim t P( (lambda(X*) - center(t))/scale(t) <= x, Y*/t > y )
    /// expressed through the standard strip measure mu**.
    pub fn predicted(&self, mu_star: &TailMeasure, x: f64, y: f64) -> Result<f64> {
        let (rho, k) = (self.rho, self.k);
        match self.case {
            LambdaCase::PosRhoScale => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                mu_star.eval(&ConeRect::upper(x.powf(1.0 / rho), y)?)
            }
            LambdaCase::PosRhoCenter => {
                let inner = 1.0 + rho * x / k;
                if inner <= 0.0 {
                    return Ok(0.0);
                }
                mu_star.eval(&ConeRect::upper(inner.powf(1.0 / rho), y)?)
            }
            LambdaCase::PiPlusInfinite | LambdaCase::PiPlusFinite => {
                mu_star.eval(&ConeRect::upper((x / k).exp(), y)?)
            }
            LambdaCase::PiMinus => {
                // decreasing lambda flips the event to a lower bound on X*
                mu_star.eval(&ConeRect::joint_exceed((x / k).exp(), y)?)
            }
            LambdaCase::NegRhoScale => {
                if x >= 0.0 {
                    return mu_star.eval(&ConeRect::upper(f64::INFINITY, y)?);
                }
                mu_star.eval(&ConeRect::upper((-x).powf(1.0 / rho), y)?)
            }
            LambdaCase::NegRhoCenter => {
                let inner = 1.0 + rho * x / k;
                if inner <= 0.0 {
                    return mu_star.eval(&ConeRect::upper(f64::INFINITY, y)?);
                }
                mu_star.eval(&ConeRect::joint_exceed(inner.powf(1.0 / rho), y)?)
            }
        }
    }
}

/// Estimate of the finite center limit B for the rho < 0 cases, where
/// (B - center(t))/scale(t) -> 0 justifies the convergence check
/// |center(t2) - center(t1)| < tol * scale(t1) on the top of the grid.
fn center_limit(norm: &NormFns, t_hi: f64) -> Result<f64> {
    let t1 = t_hi / 10.0;
    let t2 = t_hi;
    let b1 = (norm.center)(t1);
    let b2 = (norm.center)(t2);
    let tol = 1e-2;
    if (b2 - b1).abs() >= tol * (norm.scale)(t1).max(1e-12) && (b2 - b1).abs() >= 1e-9 {
        return Err(Error::ClassificationFailure(format!(
            "center has no finite limit: moved {} at the top of the grid",
            b2 - b1
        )));
    }
    Ok(b2)
}

/// Finite endpoint of a slowly-varying center in the Pi regime, where the
/// gap B - center(t) itself decays like 1/log t: the two-point Richardson
/// step in 1/log t recovers B exactly for that shape and is harmless for
/// faster decay.
fn pi_center_limit(norm: &NormFns, t_hi: f64) -> f64 {
    let b2 = (norm.center)(t_hi);
    let b1 = (norm.center)(t_hi / 10.0);
    b2 + (b2 - b1) * (t_hi / 10.0).ln() / 10f64.ln()
}

fn center_is_bounded(norm: &NormFns, t_hi: f64) -> bool {
    let b1 = (norm.center)(t_hi / 10.0);
    let b2 = (norm.center)(t_hi);
    (b2 - b1).abs() <= 0.01 * (1.0 + b2.abs())
}

// Starts above one because Pi-regime centers like 1/ln t blow up there;
// evaluation below the domain extrapolates the first grid segment.
const LAMBDA_DOMAIN: (f64, f64) = (1.5, 1e10);

/// Build the standardizing transformation for the classified regime.
/// Fails with the product obstruction when (psi1, psi2) = (1, 0).
pub fn build_lambda(norm: &NormFns, klass: &PsiClass) -> Result<LambdaTransform> {
    if klass.is_product_obstruction() {
        return Err(Error::ProductObstruction);
    }
    let rho = klass.rho;
    let k = klass.k;
    let scale = norm.scale.clone();
    let center = norm.center.clone();
    if rho > 0.0 {
        if k == 0.0 {
            let lambda =
                monotone_equivalent(&scale, true, EquivMode::RatioToOne, LAMBDA_DOMAIN)?;
            Ok(LambdaTransform {
                lambda,
                scale,
                center,
                case: LambdaCase::PosRhoScale,
                rho,
                k,
            })
        } else {
            let lambda =
                monotone_equivalent(&center, true, EquivMode::RatioToOne, LAMBDA_DOMAIN)?;
            Ok(LambdaTransform {
                lambda,
                scale,
                center,
                case: LambdaCase::PosRhoCenter,
                rho,
                k,
            })
        }
    } else if rho == 0.0 {
        if k > 0.0 {
            if center_is_bounded(norm, LAMBDA_DOMAIN.1) {
                // finite endpoint: beta* = 1/(B - center~) with normings
                // scale* = scale/(B - center~)^2, center* = beta*.
                let b = pi_center_limit(norm, LAMBDA_DOMAIN.1);
                let tilde = monotone_equivalent(
                    &center,
                    true,
                    EquivMode::PiRemainder { aux: scale.clone() },
                    LAMBDA_DOMAIN,
                )?;
                let tilde2 = tilde.clone();
                let lambda_fn: ScalarFn =
                    Arc::new(move |t: f64| 1.0 / (b - tilde.eval(t)).max(1e-300));
                let lambda = MonotoneFn::new(lambda_fn.clone(), LAMBDA_DOMAIN, true);
                let scale_star: ScalarFn = Arc::new(move |t: f64| {
                    let gap = (b - tilde2.eval(t)).max(1e-300);
                    scale(t) / (gap * gap)
                });
                Ok(LambdaTransform {
                    lambda,
                    scale: scale_star,
                    center: lambda_fn,
                    case: LambdaCase::PiPlusFinite,
                    rho,
                    k,
                })
            } else {
                let lambda = monotone_equivalent(
                    &center,
                    true,
                    EquivMode::PiRemainder { aux: scale.clone() },
                    LAMBDA_DOMAIN,
                )?;
                Ok(LambdaTransform {
                    lambda,
                    scale,
                    center,
                    case: LambdaCase::PiPlusInfinite,
                    rho,
                    k,
                })
            }
        } else {
            let lambda = monotone_equivalent(
                &center,
                false,
                EquivMode::PiRemainder { aux: scale.clone() },
                LAMBDA_DOMAIN,
            )?;
            Ok(LambdaTransform { lambda, scale, center, case: LambdaCase::PiMinus, rho, k })
        }
    } else {
        // rho < 0
        if k == 0.0 {
            let b = center_limit(norm, LAMBDA_DOMAIN.1)?;
            let tilde =
                monotone_equivalent(&scale, false, EquivMode::RatioToOne, LAMBDA_DOMAIN)?;
            let lambda_fn: ScalarFn = Arc::new(move |t: f64| b - tilde.eval(t));
            let lambda = MonotoneFn::new(lambda_fn, LAMBDA_DOMAIN, true);
            Ok(LambdaTransform {
                lambda,
                scale,
                center,
                case: LambdaCase::NegRhoScale,
                rho,
                k,
            })
        } else {
            let lambda =
                monotone_equivalent(&center, false, EquivMode::RatioToOne, LAMBDA_DOMAIN)?;
            Ok(LambdaTransform {
                lambda,
                scale,
                center,
                case: LambdaCase::NegRhoCenter,
                rho,
                k,
            })
        }
    }
}

/// One candidate's verdict in the obstruction stress test.
#[derive(Clone, Debug)]
pub struct ObstructionOutcome {
    pub label: String,
    /// Largest variation of the empirical strip limit across the x grid.
    pub row_spread: f64,
    /// Relative cross-factorization defect of the empirical grid.
    pub product_defect: f64,
    pub degenerate: bool,
    pub product: bool,
}

/// Empirical restatement of the product obstruction: for a product-limit
/// pair, every monotone marginal candidate f yields an empirical strip
/// limit of (f(X)/t, Y*/t) that is either degenerate in x or factorizes;
/// never both non-degenerate and non-product.
pub fn obstruction_stress(
    batch: &crate::samplers::SampleBatch,
    candidates: &[(String, ScalarFn)],
    k: usize,
    xs: &[f64],
    ys: &[f64],
) -> Result<Vec<ObstructionOutcome>> {
    let mut out = Vec::with_capacity(candidates.len());
    for (label, f) in candidates {
        let transformed = batch.transform(|x, y| (f(x), y));
        let mut grid = vec![vec![0.0; ys.len()]; xs.len()];
        let mut max_stderr: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let est = crate::estimate::tail_measure_estimate(
                    &transformed,
                    k,
                    (1.0, 1.0),
                    &ConeRect::upper(x, y)?,
                )?;
                grid[i][j] = est.value;
                max_stderr = max_stderr.max(est.stderr);
            }
        }
        let mut row_spread: f64 = 0.0;
        for j in 0..ys.len() {
            let col: Vec<f64> = (0..xs.len()).map(|i| grid[i][j]).collect();
            let hi = col.iter().copied().fold(f64::MIN, f64::max);
            let lo = col.iter().copied().fold(f64::MAX, f64::min);
            row_spread = row_spread.max(hi - lo);
        }
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..xs.len() {
            for i2 in (i + 1)..xs.len() {
                for j in 0..ys.len() {
                    for j2 in (j + 1)..ys.len() {
                        let lhs = grid[i][j] * grid[i2][j2];
                        let rhs = grid[i][j2] * grid[i2][j];
                        defect = defect.max((lhs - rhs).abs());
                        scale = scale.max(lhs.abs()).max(rhs.abs());
                    }
                }
            }
        }
        let product_defect = if scale > 0.0 { defect / scale } else { 0.0 };
        out.push(ObstructionOutcome {
            label: label.clone(),
            row_spread,
            product_defect,
            degenerate: row_spread <= (5.0 * max_stderr).max(0.03),
            product: product_defect <= 0.1,
        });
    }
    Ok(out)
}

/// The coordinate-change standardization for product limits:
/// X* = (X - center(Y*)) Y* / scale(Y*).
pub fn remark_standardize(xs: &[f64], ystars: &[f64], norm: &NormFns) -> Result<Vec<f64>> {
    if xs.len() != ystars.len() {
        return Err(Error::InvalidInput("coordinate vectors differ in length".into()));
    }
    Ok(xs
        .iter()
        .zip(ystars)
        .map(|(&x, &y)| (x - (norm.center)(y)) * y / (norm.scale)(y))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn classify_pure_power() {
        let f = NormFns::power(0.5);
        let klass = psi_classify(&f, &default_t_grid(), &default_c_grid()).unwrap();
        assert_abs_diff_eq!(klass.rho, 0.5, epsilon = 1e-9);
        assert_eq!(klass.k, 0.0);
        assert!(klass.residual < 1e-3);
    }

    #[test]
    fn classify_log_center() {
        let f = NormFns::new(|_| 1.0, |t: f64| t.ln(), 0.0);
        let klass = psi_classify(&f, &default_t_grid(), &default_c_grid()).unwrap();
        assert_eq!(klass.rho, 0.0);
        assert_abs_diff_eq!(klass.k, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn classify_linear_pair() {
        let f = NormFns::new(|t| t, |t| 2.0 * t, 1.0);
        let klass = psi_classify(&f, &default_t_grid(), &default_c_grid()).unwrap();
        assert_abs_diff_eq!(klass.rho, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(klass.k, 2.0, epsilon = 1e-9);
        assert!(klass.residual < 1e-3);
    }

    #[test]
    fn classify_rejects_oscillation() {
        let f = NormFns::new(|t: f64| t.sqrt() * (2.0 + t.ln().sin()), |_| 0.0, 0.5);
        assert!(psi_classify(&f, &default_t_grid(), &default_c_grid()).is_err());
    }

    #[test]
    fn standardizers_match_closed_forms() {
        let p = marginal_standardizer(&Cdf::Pareto { index: 1.0 }).unwrap();
        assert_abs_diff_eq!(p.eval(7.0), 7.0, epsilon = 1e-12);
        let rho = marginal_standardizer(&Cdf::Pareto { index: 2.0 }).unwrap();
        assert_abs_diff_eq!(rho.eval(3.0), 9.0, epsilon = 1e-12);
        let e = marginal_standardizer(&Cdf::Exp { rate: 1.0 }).unwrap();
        assert_abs_diff_eq!(e.eval(2.0), 2.0_f64.exp(), epsilon = 1e-12);
        assert!(marginal_standardizer(&Cdf::PointMass { at: 1.0 }).is_err());
    }

    #[test]
    fn margin_transform_values() {
        assert_abs_diff_eq!(ev_margin_transform(1.0, 1.0).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev_margin_transform(0.0, 0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev_margin_transform(0.5, 2.0).unwrap(), 4.0, epsilon = 1e-12);
        assert!(ev_margin_transform(-1.0, 2.0).is_err());
    }

    #[test]
    fn monotone_equivalent_of_damped_oscillation() {
        let f: ScalarFn =
            Arc::new(|t: f64| t.sqrt() * (2.0 + t.ln().sin() / t.ln().max(1.5)));
        let m = monotone_equivalent(&f, true, EquivMode::RatioToOne, (10.0, 1e9)).unwrap();
        // strictly increasing on a probe grid
        let mut prev = m.eval(10.0);
        for j in 1..200 {
            let t = 10.0 * 10f64.powf(8.0 * j as f64 / 199.0);
            let v = m.eval(t);
            assert!(v > prev);
            prev = v;
        }
        // asymptotic ratio near one at the top
        let ratio = m.eval(5e8) / f(5e8);
        assert!((ratio - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn monotone_equivalent_keeps_exact_monotone_inputs() {
        let f: ScalarFn = Arc::new(|t: f64| t.powf(0.7));
        let m = monotone_equivalent(&f, true, EquivMode::RatioToOne, (1.0, 1e9)).unwrap();
        for &t in &[2.0, 100.0, 1e6] {
            assert_abs_diff_eq!(m.eval(t), f(t), epsilon = 1e-6 * f(t));
        }
        // inverse round trip
        for &t in &[5.0, 1e3, 1e7] {
            let w = m.eval(t);
            assert_abs_diff_eq!(m.inverse(w), t, epsilon = 1e-6 * t);
        }
    }

    #[test]
    fn monotone_equivalent_pi_remainder() {
        let f: ScalarFn = Arc::new(|t: f64| t.ln() + t.sin() / t);
        let aux: ScalarFn = Arc::new(|_| 1.0);
        let m = monotone_equivalent(&f, true, EquivMode::PiRemainder { aux }, (10.0, 1e9))
            .unwrap();
        let dev = (m.eval(1e8) - f(1e8)).abs();
        assert!(dev < 1e-3, "dev {dev}");
    }

    #[test]
    fn monotone_equivalent_rejects_undamped_oscillation() {
        let f: ScalarFn = Arc::new(|t: f64| t.sqrt() * (2.0 + t.ln().sin()));
        assert!(monotone_equivalent(&f, true, EquivMode::RatioToOne, (10.0, 1e9)).is_err());
    }

    #[test]
    fn obstruction_regime_refused() {
        let klass = PsiClass { rho: 0.0, k: 0.0, residual: 0.0 };
        let norm = NormFns::new(|_| 1.0, |_| 0.0, 0.0);
        assert!(matches!(
            build_lambda(&norm, &klass).unwrap_err(),
            Error::ProductObstruction
        ));
    }

    #[test]
    fn lambda_cases_choose_expected_shapes() {
        // rho > 0, k = 0
        let norm = NormFns::power(0.5);
        let klass = psi_classify(&norm, &default_t_grid(), &default_c_grid()).unwrap();
        let lt = build_lambda(&norm, &klass).unwrap();
        assert_eq!(lt.case, LambdaCase::PosRhoScale);
        assert_abs_diff_eq!(lt.lambda.eval(100.0), 10.0, epsilon = 1e-3);

        // rho > 0, k != 0
        let norm2 = NormFns::new(|t: f64| t.sqrt(), |t: f64| 2.0 * t.sqrt(), 0.5);
        let klass2 = psi_classify(&norm2, &default_t_grid(), &default_c_grid()).unwrap();
        let lt2 = build_lambda(&norm2, &klass2).unwrap();
        assert_eq!(lt2.case, LambdaCase::PosRhoCenter);

        // rho = 0, k = 1, unbounded center
        let norm3 = NormFns::new(|_| 1.0, |t: f64| t.ln(), 0.0);
        let klass3 = psi_classify(&norm3, &default_t_grid(), &default_c_grid()).unwrap();
        let lt3 = build_lambda(&norm3, &klass3).unwrap();
        assert_eq!(lt3.case, LambdaCase::PiPlusInfinite);

        // rho = 0, k = 1, finite endpoint
        let norm4 = NormFns::new(
            |t: f64| 1.0 / (t.ln() * t.ln()),
            |t: f64| 2.0 - 1.0 / t.ln(),
            0.0,
        );
        let klass4 = psi_classify(&norm4, &default_t_grid(), &default_c_grid()).unwrap();
        assert_eq!(klass4.rho, 0.0);
        assert_abs_diff_eq!(klass4.k, 1.0, epsilon = 0.05);
        let lt4 = build_lambda(&norm4, &klass4).unwrap();
        assert_eq!(lt4.case, LambdaCase::PiPlusFinite);

        // rho = 0, k < 0
        let norm7 = NormFns::new(|_| 1.0, |t: f64| -t.ln(), 0.0);
        let klass7 = psi_classify(&norm7, &default_t_grid(), &default_c_grid()).unwrap();
        assert_abs_diff_eq!(klass7.k, -1.0, epsilon = 1e-6);
        let lt7 = build_lambda(&norm7, &klass7).unwrap();
        assert_eq!(lt7.case, LambdaCase::PiMinus);
        assert!(lt7.lambda.eval(100.0) > lt7.lambda.eval(10_000.0));

        // rho < 0, k = 0
        let norm5 = NormFns::new(|t: f64| t.powf(-0.5), |_| 5.0, -0.5);
        let klass5 = psi_classify(&norm5, &default_t_grid(), &default_c_grid()).unwrap();
        let lt5 = build_lambda(&norm5, &klass5).unwrap();
        assert_eq!(lt5.case, LambdaCase::NegRhoScale);
        // lambda = 5 - t^{-1/2} is increasing
        assert!(lt5.lambda.eval(100.0) < lt5.lambda.eval(10_000.0));

        // rho < 0, k < 0
        let norm6 = NormFns::new(|t: f64| 1.0 / t, |t: f64| 3.0 + 2.0 / t, -1.0);
        let klass6 = psi_classify(&norm6, &default_t_grid(), &default_c_grid()).unwrap();
        assert_abs_diff_eq!(klass6.rho, -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(klass6.k, -2.0, epsilon = 1e-6);
        let lt6 = build_lambda(&norm6, &klass6).unwrap();
        assert_eq!(lt6.case, LambdaCase::NegRhoCenter);
        // decreasing equivalent
        assert!(lt6.lambda.eval(100.0) > lt6.lambda.eval(10_000.0));
    }

    #[test]
    fn remark_standardize_reduces_to_product() {
        let norm = NormFns::new(|_| 1.0, |_| 0.0, 0.0);
        let xs = vec![0.2, 0.5];
        let ys = vec![10.0, 4.0];
        let out = remark_standardize(&xs, &ys, &norm).unwrap();
        assert_eq!(out, vec![2.0, 2.0]);
    }
}
