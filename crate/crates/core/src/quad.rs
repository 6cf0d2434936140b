//! Adaptive Simpson quadrature, with a substitution wrapper for integrable
//! endpoint singularities.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        if !delta.is_finite() {
            return Err(Error::DivergentIntegral(format!(
                "non-finite refinement on [{a}, {b}]"
            )));
        }
        return Ok(left + right + delta / 15.0);
    }
    if (b - a) < 1e-15 * (a.abs() + b.abs() + 1.0) {
        // The interval has collapsed to machine resolution while the panel
        // still carries unconverged mass: a non-integrable singularity.
        return Err(Error::DivergentIntegral(format!(
            "interval collapsed with unconverged mass near {a}"
        )));
    }
    if depth == 0 {
        return Err(Error::DivergentIntegral(format!(
            "adaptive Simpson depth exhausted on [{a}, {b}]"
        )));
    }
    let hl = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let hr = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(hl + hr)
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
///
/// The integrand must be finite on the closed interval; use
/// [`integrate_right_singular`] when it blows up at the right endpoint.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    if !fa.is_finite() || !fb.is_finite() || !fm.is_finite() {
        return Err(Error::DivergentIntegral(
            "integrand not finite at a node; use a singular rule".into(),
        ));
    }
    let whole = simpson(fa, fm, fb, b - a);
    adapt(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integral over [a, b] with 0 < a < b of an integrand with power-law
/// behavior towards a, via the substitution d = e^s which flattens any
/// d^{-p} factor into a smooth exponential.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a > 0.0 && a < b) || !b.is_finite() {
        return Err(Error::InvalidInput(format!("bad log-rule interval [{a}, {b}]")));
    }
    integrate(|s: f64| { let d = s.exp(); f(d) * d }, a.ln(), b.ln(), tol)
}

/// Integral over (0, len] of an integrand given in distance form, with an
/// integrable power singularity at distance zero: f(d) ~ C d^{-p}, p < 1.
///
/// Working in the distance coordinate avoids the catastrophic cancellation
/// of evaluating 1 - w near a singular endpoint at 1. The substitution
/// d = len v^2 turns the singular factor into v^{1-2p}, bounded for
/// p <= 1/2 (the case arising from angular densities like (1-w)^{-3/2}
/// integrated against the weight 1-w).
pub fn integrate_singular_distance<F: Fn(f64) -> f64>(
    f: F,
    len: f64,
    tol: f64,
) -> Result<f64> {
    if len == 0.0 {
        return Ok(0.0);
    }
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::InvalidInput(format!("bad interval length {len}")));
    }
    let g = |v: f64| f(len * v * v) * 2.0 * len * v;
    // v = 0 maps to the singularity; use a deep probe for the node value,
    // which is exact for p = 1/2 (constant transform) and ~0 for p < 1/2.
    let g0 = {
        let probe = g(1e-10);
        if probe.is_finite() {
            probe
        } else {
            0.0
        }
    };
    let gb = g(1.0);
    let gm = g(0.5);
    if !gb.is_finite() || !gm.is_finite() {
        return Err(Error::DivergentIntegral(
            "transformed integrand not finite".into(),
        ));
    }
    let whole = simpson(g0, gm, gb, 1.0);
    adapt(&g, 0.0, 1.0, g0, gm, gb, whole, tol, MAX_DEPTH)
}
