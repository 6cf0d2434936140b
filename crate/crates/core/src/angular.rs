//! Angular (spectral) measures on [0, 1) for the L1 norm, and the maps
//! between them and upper-strip tail measures.
//!
//! The polar decomposition used throughout is (r, theta) = (x+y, x/(x+y)),
//! so theta = 1 is the (removed) horizontal axis of the upper strip cone
//! and angular measures there need not be finite. A measure S induces a
//! valid conditional law exactly when int_0^1 (1-w) S(dw) = 1.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dist::Cdf;
use crate::error::{Error, Result};
use crate::estimate::TailEstimate;
use crate::quad;
use crate::samplers::SampleBatch;

/// Mass of the strip-cone angular measure of the quartic-minimum model at
/// theta = 1/2, as the normalization identity and the diagonal-mass
/// computation both give it. The published table lists 2 - sqrt(3) instead;
/// verification reports carry both values.
pub const EX51_UPPER_ATOM_BALANCED: f64 = 1.0;

/// The atom mass printed in the source table for the same model.
pub fn ex51_upper_atom_printed() -> f64 {
    2.0 - 3.0_f64.sqrt()
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Integration weights against an angular measure, available both as a
/// function of the angle w and of the distance d = 1 - w so that singular
/// integrals near one never form the difference 1 - w in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    One,
    W,
    OneMinusW,
}

impl Weight {
    #[inline]
    pub fn of_w(self, w: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::W => w,
            Weight::OneMinusW => 1.0 - w,
        }
    }

    #[inline]
    pub fn of_distance(self, d: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::W => 1.0 - d,
            Weight::OneMinusW => d,
        }
    }
}

/// Named angular measures, the serializable handle used by samplers and
/// the command line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AngularSpec {
    /// S(dw) = 2 dw on (0, 1).
    Uniform2,
    /// S(dw) = dw / (1 - w); infinite total mass, normalized conditional law.
    InvOneMinus,
    /// Two unit atoms at 0 and 1/2 (a toy mixed example).
    AtomPair,
    /// The continuous part of the quartic-minimum model's strip measure:
    /// (1/4) w^{-3/2} (1-w)^{-3/2} on (1/2, 1).
    Ex51UpperCont,
    /// Atom + continuous part of the same measure, the atom carrying the
    /// mass implied by the normalization identity.
    Ex51UpperFull,
    /// S([0, eta]) = int_{s <= eta/(1-eta)} (1+s) G(ds) for the scale
    /// mixture model (R xi, R).
    FromCdf(Cdf),
}

impl AngularSpec {
    pub fn to_measure(self) -> AngularMeasure {
        match self {
            AngularSpec::Uniform2 => {
                AngularMeasure::from_density(Arc::new(|_| 2.0), (0.0, 1.0), "uniform2")
            }
            AngularSpec::InvOneMinus => AngularMeasure::from_singular_density(
                Arc::new(|d: f64| 1.0 / d),
                0.0,
                "inv_one_minus",
            ),
            AngularSpec::AtomPair => {
                AngularMeasure::from_atoms(vec![(0.0, 1.0), (0.5, 1.0)], "atom_pair")
            }
            AngularSpec::Ex51UpperCont => AngularMeasure::from_singular_density(
                Arc::new(|d: f64| 0.25 * (1.0 - d).powf(-1.5) * d.powf(-1.5)),
                0.5,
                "ex51_upper_cont",
            ),
            AngularSpec::Ex51UpperFull => {
                let mut m = AngularSpec::Ex51UpperCont.to_measure();
                m.atoms.push((0.5, EX51_UPPER_ATOM_BALANCED));
                m.label = "ex51_upper_full".into();
                m
            }
            AngularSpec::FromCdf(g) => AngularMeasure::from_mixing_cdf(g),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let spec = match name {
            "uniform2" => AngularSpec::Uniform2,
            "inv1mw" | "inv-one-minus" => AngularSpec::InvOneMinus,
            "atom-pair" => AngularSpec::AtomPair,
            "ex51-upper-cont" => AngularSpec::Ex51UpperCont,
            "ex51-upper" => AngularSpec::Ex51UpperFull,
            "ex53-uniform" => AngularSpec::FromCdf(Cdf::Uniform01),
            "ex53-point1" => AngularSpec::FromCdf(Cdf::PointMass { at: 1.0 }),
            "ex53-pareto-half" => AngularSpec::FromCdf(Cdf::Pareto { index: 0.5 }),
            other => {
                return Err(Error::InvalidInput(format!("unknown angular measure '{other}'")))
            }
        };
        Ok(spec)
    }
}

/// Atoms plus a density on a sub-interval of (0, 1).
#[derive(Clone)]
pub struct AngularMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub(crate) density: Option<Density>,
    /// The same density as a function of the distance d = 1 - w, carried
    /// for measures whose density blows up at one.
    pub(crate) density_delta: Option<Density>,
    pub density_support: (f64, f64),
    /// Density blows up at the right end of its support (which is then 1).
    pub singular_at_one: bool,
    pub finite_total: bool,
    pub label: String,
}

impl AngularMeasure {
    /// Density given in angle form; only for densities finite up to the
    /// right end of their support.
    pub fn from_density(density: Density, support: (f64, f64), label: &str) -> Self {
        let mut m = AngularMeasure {
            atoms: Vec::new(),
            density: Some(density),
            density_delta: None,
            density_support: support,
            singular_at_one: false,
            finite_total: false,
            label: label.into(),
        };
        m.finite_total = m.probe_finite();
        m
    }

    /// Density with a power blow-up at one, given in distance form
    /// d |-> density(1 - d); the angle form is derived.
    pub fn from_singular_density(
        density_delta: Density,
        support_lo: f64,
        label: &str,
    ) -> Self {
        let dd = density_delta.clone();
        let density: Density = Arc::new(move |w: f64| dd(1.0 - w));
        let mut m = AngularMeasure {
            atoms: Vec::new(),
            density: Some(density),
            density_delta: Some(density_delta),
            density_support: (support_lo, 1.0),
            singular_at_one: true,
            finite_total: false,
            label: label.into(),
        };
        m.finite_total = m.probe_finite();
        m
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>, label: &str) -> Self {
        for (i, &(theta, mass)) in atoms.iter().enumerate() {
            assert!((0.0..1.0).contains(&theta), "atom location {theta} outside [0,1)");
            assert!(mass > 0.0, "atom mass must be positive");
            assert!(
                atoms[..i].iter().all(|&(t, _)| t != theta),
                "duplicate atom location {theta}"
            );
        }
        AngularMeasure {
            atoms,
            density: None,
            density_delta: None,
            density_support: (0.0, 0.0),
            singular_at_one: false,
            finite_total: true,
            label: label.into(),
        }
    }

    /// Angular measure of the scale mixture (R xi, R) with xi ~ G:
    /// atoms of G at c map to atoms at c/(1+c) with mass (1+c) G({c});
    /// a density g of G maps to g(w/(1-w)) (1-w)^{-3}.
    pub fn from_mixing_cdf(g: Cdf) -> Self {
        let atoms = g
            .atoms()
            .into_iter()
            .map(|(c, m)| (c / (1.0 + c), (1.0 + c) * m))
            .collect::<Vec<_>>();
        let label = format!("angular({g:?})");
        match g {
            Cdf::PointMass { .. } => {
                let mut m = AngularMeasure::from_atoms(atoms, "");
                m.label = label;
                m
            }
            Cdf::Uniform01 => {
                let mut m = AngularMeasure::from_density(
                    Arc::new(|w: f64| (1.0 - w).powi(-3)),
                    (0.0, 0.5),
                    "",
                );
                m.label = label;
                m
            }
            _ => {
                // support reaches the singular end at one
                let lo = match g {
                    Cdf::Pareto { .. } => 0.5,
                    _ => 0.0,
                };
                let mut m = AngularMeasure::from_singular_density(
                    Arc::new(move |d: f64| {
                        let s = (1.0 - d) / d;
                        g.density(s).unwrap_or(0.0) * d.powi(-3)
                    }),
                    lo,
                    "",
                );
                m.label = label;
                m
            }
        }
    }

    fn probe_finite(&self) -> bool {
        self.weighted_density_integral(Weight::One, 1.0, 1e-7).is_ok()
    }

    /// Integral of weight * density over [support_lo, min(eta, support_hi)],
    /// routed through the distance-form rule when the range touches a
    /// singular endpoint.
    fn weighted_density_integral(&self, weight: Weight, eta: f64, tol: f64) -> Result<f64> {
        let Some(density) = &self.density else {
            return Ok(0.0);
        };
        let (lo, hi) = self.density_support;
        let b = eta.min(hi);
        if b <= lo {
            return Ok(0.0);
        }
        if self.singular_at_one {
            let dd = self
                .density_delta
                .as_ref()
                .expect("singular measures carry a distance-form density");
            let g = |d: f64| weight.of_distance(d) * dd(d);
            if b >= hi {
                return quad::integrate_singular_distance(g, hi - lo, tol);
            }
            // range stops short of the singular end: integrate in the
            // distance coordinate with the log rule, which tolerates the
            // large dynamic range as d approaches zero
            return quad::integrate_log(g, hi - b, hi - lo, tol);
        }
        quad::integrate(|w| weight.of_w(w) * density(w), lo, b, tol)
    }

    /// Integral of the weight against the measure over [0, eta].
    /// Atoms at locations <= eta are included with full mass.
    pub fn integrate_weighted(&self, weight: Weight, eta: f64, tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for &(theta, mass) in &self.atoms {
            if theta <= eta {
                total += weight.of_w(theta) * mass;
            }
        }
        total += self.weighted_density_integral(weight, eta, tol)?;
        Ok(total)
    }

    /// S([0, eta]). Total-mass queries (eta >= 1) are rejected for infinite
    /// measures; sub-unit eta always succeeds.
    pub fn mass_upto(&self, eta: f64) -> Result<f64> {
        if eta >= 1.0 && !self.finite_total {
            return Err(Error::InfiniteAngularMeasure(self.label.clone()));
        }
        self.integrate_weighted(Weight::One, eta, 1e-9)
    }

    /// Total mass S([0, 1)).
    pub fn total(&self) -> Result<f64> {
        self.mass_upto(1.0)
    }
}

/// |int_0^1 (1 - w) S(dw) - 1|, the defect in the identity that makes the
/// induced conditional law a probability distribution.
pub fn normalization_defect(s: &AngularMeasure) -> Result<f64> {
    let integral = s.integrate_weighted(Weight::OneMinusW, 1.0, 1e-10)?;
    Ok((integral - 1.0).abs())
}

/// Reconstruction of the strip measure from its angular measure:
/// mu([0,x] x (y,inf]) = y^{-1} int_0^p (1-w) S(dw) - x^{-1} int_0^p w S(dw)
/// with p = x/(x+y). `x = inf` returns the analytic limit
/// y^{-1} int_0^1 (1-w) S(dw).
pub fn mu_from_s(s: &AngularMeasure, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidInput(format!(
            "mu_from_s needs x > 0 and finite y > 0; got ({x}, {y})"
        )));
    }
    if x.is_infinite() {
        let total = s.integrate_weighted(Weight::OneMinusW, 1.0, 1e-10)?;
        return Ok(total / y);
    }
    let p = x / (x + y);
    let a = s.integrate_weighted(Weight::OneMinusW, p, 1e-10)?;
    let b = s.integrate_weighted(Weight::W, p, 1e-10)?;
    Ok((a / y - b / x).max(0.0))
}

/// The conditional law H**(x) = mu**([0,x] x (1,inf]) induced by S, valid
/// only when the normalization identity holds.
pub fn h_star(s: &AngularMeasure, x: f64) -> Result<f64> {
    h_star_with_tol(s, x, 1e-8)
}

pub fn h_star_with_tol(s: &AngularMeasure, x: f64, tol: f64) -> Result<f64> {
    let defect = normalization_defect(s)?;
    if defect > tol {
        return Err(Error::UnnormalizedAngular { defect });
    }
    mu_from_s(s, x, 1.0)
}

/// (x, y) -> (x + y, x / (x + y)).
pub fn polar(p: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = p;
    if x < 0.0 || y < 0.0 {
        return Err(Error::InvalidInput(format!("polar needs a nonnegative point, got {p:?}")));
    }
    let r = x + y;
    if !(r > 0.0) {
        return Err(Error::InvalidInput("polar undefined at the origin".into()));
    }
    Ok((r, x / r))
}

/// (r, theta) -> (r theta, r (1 - theta)).
pub fn unpolar(r: f64, theta: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidInput(format!("angle {theta} outside [0, 1]")));
    }
    Ok((r * theta, r * (1.0 - theta)))
}

/// Empirical angular mass above the radial threshold at the measure scaling:
/// (1/k) #{ i : (x_i/t^p + y_i/t^q) > 1, theta_i in [lo, hi] } with t = n/k.
///
/// Consistent for S([lo, hi] intersect [0,1)) whenever the scaled pair is
/// standard regularly varying on the strip cone with angular measure S.
pub fn empirical_angular_mass(
    batch: &SampleBatch,
    k: usize,
    exps: (f64, f64),
    theta_lo: f64,
    theta_hi: f64,
) -> Result<TailEstimate> {
    let n = batch.len();
    if k < 10 || k > n / 10 {
        return Err(Error::KOutOfRange { k, n });
    }
    if !(0.0..=1.0).contains(&theta_lo) || !(0.0..=1.0).contains(&theta_hi) || theta_lo > theta_hi
    {
        return Err(Error::InvalidInput(format!(
            "bad angular window [{theta_lo}, {theta_hi}]"
        )));
    }
    let t = n as f64 / k as f64;
    let (sx, sy) = (t.powf(exps.0), t.powf(exps.1));
    let mut count = 0usize;
    for i in 0..n {
        let u = batch.xs[i] / sx;
        let v = batch.ys[i] / sy;
        let r = u + v;
        if r > 1.0 {
            let theta = u / r;
            if theta >= theta_lo && theta <= theta_hi {
                count += 1;
            }
        }
    }
    Ok(TailEstimate::from_count(count, k, n, exps))
}

/// S([0, eta]) estimated from sample points; see `empirical_angular_mass`.
pub fn s_from_mu_empirical(
    batch: &SampleBatch,
    k: usize,
    exps: (f64, f64),
    eta: f64,
) -> Result<TailEstimate> {
    empirical_angular_mass(batch, k, exps, 0.0, eta)
}
