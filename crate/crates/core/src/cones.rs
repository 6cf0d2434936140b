//! The four cones of the compactified quadrant, the canonical rectangle
//! algebra on them, and the band-partition gluing of a strip-cone measure
//! pair into a measure on the punctured quadrant.
//!
//! Conventions: points live in [0, inf]^2 with `f64::INFINITY` as the
//! compactified endpoint. Boundary openness is tracked explicitly per
//! rectangle side; all set computations here are symbolic on intervals,
//! never numeric sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::TailMeasure;

/// One of the four cones.
///
/// * `Full`: [0,inf]^2 minus the origin.
/// * `Interior`: (0,inf] x (0,inf].
/// * `UpperStrip`: [0,inf] x (0,inf] (horizontal axis removed).
/// * `RightStrip`: (0,inf] x [0,inf] (vertical axis removed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeId {
    Full,
    Interior,
    UpperStrip,
    RightStrip,
}

impl ConeId {
    pub fn contains(self, p: (f64, f64)) -> bool {
        let (x, y) = p;
        if x < 0.0 || y < 0.0 || x.is_nan() || y.is_nan() {
            return false;
        }
        match self {
            ConeId::Full => x > 0.0 || y > 0.0,
            ConeId::Interior => x > 0.0 && y > 0.0,
            ConeId::UpperStrip => y > 0.0,
            ConeId::RightStrip => x > 0.0,
        }
    }
}

impl std::fmt::Display for ConeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConeId::Full => "full",
            ConeId::Interior => "interior",
            ConeId::UpperStrip => "upper",
            ConeId::RightStrip => "right",
        };
        write!(f, "{s}")
    }
}

/// A canonical corner set; the only sets measures are evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConeRect {
    /// [0, x] x (y, inf], y > 0.
    Upper { x: f64, y: f64 },
    /// (x, inf] x [0, y], x > 0.
    Right { x: f64, y: f64 },
    /// (x, inf] x (y, inf], x > 0 and y > 0.
    JointExceed { x: f64, y: f64 },
    /// ([0, x] x [0, y])^c within [0, inf]^2, max(x, y) > 0.
    Compl { x: f64, y: f64 },
}

impl ConeRect {
    pub fn upper(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0) || !(y > 0.0) {
            return Err(Error::InvalidRect(format!(
                "Upper needs x >= 0, y > 0; got ({x}, {y})"
            )));
        }
        Ok(ConeRect::Upper { x, y })
    }

    pub fn right(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0) || !(y >= 0.0) {
            return Err(Error::InvalidRect(format!(
                "Right needs x > 0, y >= 0; got ({x}, {y})"
            )));
        }
        Ok(ConeRect::Right { x, y })
    }

    pub fn joint_exceed(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::InvalidRect(format!(
                "JointExceed needs x > 0, y > 0; got ({x}, {y})"
            )));
        }
        Ok(ConeRect::JointExceed { x, y })
    }

    pub fn compl(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0) || !(y >= 0.0) || !(x.max(y) > 0.0) {
            return Err(Error::InvalidRect(format!(
                "Compl needs x, y >= 0 with max(x, y) > 0; got ({x}, {y})"
            )));
        }
        Ok(ConeRect::Compl { x, y })
    }

    pub fn corner(&self) -> (f64, f64) {
        match *self {
            ConeRect::Upper { x, y }
            | ConeRect::Right { x, y }
            | ConeRect::JointExceed { x, y }
            | ConeRect::Compl { x, y } => (x, y),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConeRect::Upper { .. } => "upper_rect",
            ConeRect::Right { .. } => "right_rect",
            ConeRect::JointExceed { .. } => "joint_exceed",
            ConeRect::Compl { .. } => "compl_rect",
        }
    }

    /// Dilation by c > 0; preserves the kind.
    pub fn scale(&self, c: f64) -> Self {
        assert!(c > 0.0, "scale factor must be positive");
        match *self {
            ConeRect::Upper { x, y } => ConeRect::Upper { x: c * x, y: c * y },
            ConeRect::Right { x, y } => ConeRect::Right { x: c * x, y: c * y },
            ConeRect::JointExceed { x, y } => ConeRect::JointExceed { x: c * x, y: c * y },
            ConeRect::Compl { x, y } => ConeRect::Compl { x: c * x, y: c * y },
        }
    }

    pub fn contains_point(&self, p: (f64, f64)) -> bool {
        let (u, v) = p;
        if u < 0.0 || v < 0.0 || u.is_nan() || v.is_nan() {
            return false;
        }
        match *self {
            ConeRect::Upper { x, y } => u <= x && v > y,
            ConeRect::Right { x, y } => u > x && v <= y,
            ConeRect::JointExceed { x, y } => u > x && v > y,
            ConeRect::Compl { x, y } => u > x || v > y,
        }
    }

    /// Whether the rectangle is a subset of the cone.
    pub fn lies_in(&self, cone: ConeId) -> bool {
        match (self, cone) {
            (_, ConeId::Full) => true,
            (ConeRect::JointExceed { .. }, _) => true,
            (ConeRect::Upper { .. }, ConeId::UpperStrip) => true,
            (ConeRect::Right { .. }, ConeId::RightStrip) => true,
            _ => false,
        }
    }

    /// Euclidean distance from the origin to the closure of the set.
    pub fn distance_to_origin(&self) -> f64 {
        match *self {
            ConeRect::Upper { y, .. } => y,
            ConeRect::Right { x, .. } => x,
            ConeRect::JointExceed { x, y } => x.hypot(y),
            ConeRect::Compl { x, y } => x.min(y),
        }
    }

    /// Decomposition into disjoint generalized rectangles.
    pub(crate) fn pieces(&self) -> Vec<GenRect> {
        match *self {
            ConeRect::Upper { x, y } => vec![GenRect {
                u: Iv::closed(0.0, x),
                v: Iv::left_open(y, f64::INFINITY),
            }],
            ConeRect::Right { x, y } => vec![GenRect {
                u: Iv::left_open(x, f64::INFINITY),
                v: Iv::closed(0.0, y),
            }],
            ConeRect::JointExceed { x, y } => vec![GenRect {
                u: Iv::left_open(x, f64::INFINITY),
                v: Iv::left_open(y, f64::INFINITY),
            }],
            ConeRect::Compl { x, y } => vec![
                GenRect {
                    u: Iv::left_open(x, f64::INFINITY),
                    v: Iv::closed(0.0, f64::INFINITY),
                },
                GenRect {
                    u: Iv::closed(0.0, x),
                    v: Iv::left_open(y, f64::INFINITY),
                },
            ],
        }
    }
}

impl std::fmt::Display for ConeRect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (x, y) = self.corner();
        write!(f, "{}({x}, {y})", self.kind_name())
    }
}

/// One-dimensional interval with per-endpoint openness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Iv {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Iv {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Iv { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn left_open(lo: f64, hi: f64) -> Self {
        Iv { lo, hi, lo_open: true, hi_open: false }
    }

    pub fn right_open(lo: f64, hi: f64) -> Self {
        Iv { lo, hi, lo_open: false, hi_open: true }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains_zero(&self) -> bool {
        self.lo == 0.0 && !self.lo_open && !self.is_empty()
    }

    pub fn contains(&self, s: f64) -> bool {
        if s < self.lo || s > self.hi {
            return false;
        }
        if s == self.lo && self.lo_open {
            return false;
        }
        if s == self.hi && self.hi_open {
            return false;
        }
        true
    }

    pub fn intersect(&self, other: &Iv) -> Option<Iv> {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        let iv = Iv { lo, hi, lo_open, hi_open };
        if iv.is_empty() {
            None
        } else {
            Some(iv)
        }
    }
}

/// Product of two intervals; the unit of all symbolic set arithmetic here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct GenRect {
    pub u: Iv,
    pub v: Iv,
}

impl GenRect {
    pub fn intersect(&self, other: &GenRect) -> Option<GenRect> {
        let u = self.u.intersect(&other.u)?;
        let v = self.v.intersect(&other.v)?;
        Some(GenRect { u, v })
    }

    pub fn contains_point(&self, p: (f64, f64)) -> bool {
        self.u.contains(p.0) && self.v.contains(p.1)
    }
}

/// The epsilon band partition from the gluing construction:
/// B1 = [0, eps) x [eps, inf] handled by the upper-strip measure and
/// B2 = [eps, inf] x [0, inf] handled by the right-strip measure.
#[derive(Clone, Copy, Debug)]
pub struct GluePartition {
    pub epsilon: f64,
}

impl GluePartition {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "glue epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(GluePartition { epsilon })
    }

    pub(crate) fn b1(&self) -> GenRect {
        GenRect {
            u: Iv::right_open(0.0, self.epsilon),
            v: Iv::closed(self.epsilon, f64::INFINITY),
        }
    }

    pub(crate) fn b2(&self) -> GenRect {
        GenRect {
            u: Iv::closed(self.epsilon, f64::INFINITY),
            v: Iv::closed(0.0, f64::INFINITY),
        }
    }

    /// B1 and B2 cover everything except [0, eps)^2, so they cover any set
    /// at distance > eps * sqrt(2) from the origin.
    pub fn covers_point(&self, p: (f64, f64)) -> bool {
        self.b1().contains_point(p) || self.b2().contains_point(p)
    }
}

/// Grid row of a consistency check.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyRow {
    pub rect: String,
    pub mu: f64,
    pub nu: f64,
    pub diff: f64,
}

/// Result of comparing two measures on interior rectangles.
#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub rows: Vec<ConsistencyRow>,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare mu and nu on a grid of joint-exceedance rectangles, where any
/// common vague limit must agree.
pub fn consistency_check(
    mu: &TailMeasure,
    nu: &TailMeasure,
    grid: &[ConeRect],
    tol: f64,
) -> Result<ConsistencyReport> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut max_defect: f64 = 0.0;
    for rect in grid {
        if !matches!(rect, ConeRect::JointExceed { .. }) {
            return Err(Error::InvalidInput(format!(
                "consistency grid must consist of joint-exceedance rects, got {rect}"
            )));
        }
        let a = mu.eval(rect)?;
        let b = nu.eval(rect)?;
        let diff = (a - b).abs();
        max_defect = max_defect.max(diff);
        rows.push(ConsistencyRow { rect: rect.to_string(), mu: a, nu: b, diff });
    }
    Ok(ConsistencyReport { rows, max_defect, tol, pass: max_defect <= tol })
}

/// Default interior grid used by `glue` for its consistency precheck.
pub fn default_interior_grid() -> Vec<ConeRect> {
    let pts = [0.5, 1.0, 2.0];
    let mut grid = Vec::new();
    for &x in &pts {
        for &y in &pts {
            grid.push(ConeRect::JointExceed { x, y });
        }
    }
    grid
}

/// Value of the glued measure on A, computed as
/// mu(A intersect B1) + nu(A intersect B2) for the given band split.
///
/// Requires eps < d(0, A)/sqrt(2) so that the bands cover A, and requires
/// mu and nu to agree on the interior cone (checked on a default grid with
/// tolerance `consistency_tol`). The returned value is independent of eps.
pub fn glue(
    mu: &TailMeasure,
    nu: &TailMeasure,
    rect: &ConeRect,
    eps: f64,
    consistency_tol: f64,
) -> Result<f64> {
    if mu.cone != ConeId::UpperStrip {
        return Err(Error::InvalidInput(format!(
            "glue expects mu on the upper strip cone, got {}",
            mu.cone
        )));
    }
    if nu.cone != ConeId::RightStrip {
        return Err(Error::InvalidInput(format!(
            "glue expects nu on the right strip cone, got {}",
            nu.cone
        )));
    }
    let limit = rect.distance_to_origin() / std::f64::consts::SQRT_2;
    if !(eps > 0.0) || eps >= limit {
        return Err(Error::EpsTooLarge { eps, limit });
    }
    let check = consistency_check(mu, nu, &default_interior_grid(), consistency_tol)?;
    if !check.pass {
        return Err(Error::InconsistentMeasures { defect: check.max_defect });
    }
    let part = GluePartition::new(eps)?;
    let mut total = 0.0;
    for piece in rect.pieces() {
        if let Some(r) = piece.intersect(&part.b1()) {
            total += mu.eval_gen(&r)?;
        }
        if let Some(r) = piece.intersect(&part.b2()) {
            total += nu.eval_gen(&r)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_follows_cone_definitions() {
        assert!(!ConeId::Interior.contains((0.0, 1.0)));
        assert!(ConeId::UpperStrip.contains((0.0, 1.0)));
        assert!(!ConeId::Full.contains((0.0, 0.0)));
        assert!(ConeId::Full.contains((0.0, 0.5)));
        assert!(ConeId::RightStrip.contains((2.0, 0.0)));
        assert!(!ConeId::RightStrip.contains((0.0, 2.0)));
        assert!(ConeId::Interior.contains((f64::INFINITY, 1.0)));
    }

    #[test]
    fn strip_intersection_and_union_identities() {
        let pts = [
            (0.0, 0.0),
            (0.0, 1.0),
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, f64::INFINITY),
            (f64::INFINITY, 0.0),
            (3.5, 0.2),
        ];
        for p in pts {
            let upper = ConeId::UpperStrip.contains(p);
            let right = ConeId::RightStrip.contains(p);
            assert_eq!(ConeId::Interior.contains(p), upper && right, "{p:?}");
            assert_eq!(ConeId::Full.contains(p), upper || right, "{p:?}");
        }
    }

    #[test]
    fn rect_distances() {
        assert_eq!(
            ConeRect::joint_exceed(1.0, 1.0).unwrap().distance_to_origin(),
            2.0_f64.sqrt()
        );
        assert_eq!(ConeRect::upper(3.0, 2.0).unwrap().distance_to_origin(), 2.0);
        assert_eq!(ConeRect::compl(1.0, 2.0).unwrap().distance_to_origin(), 1.0);
        assert_eq!(ConeRect::right(0.5, 9.0).unwrap().distance_to_origin(), 0.5);
    }

    #[test]
    fn invalid_rects_rejected() {
        assert!(ConeRect::upper(1.0, 0.0).is_err());
        assert!(ConeRect::right(0.0, 1.0).is_err());
        assert!(ConeRect::joint_exceed(1.0, 0.0).is_err());
        assert!(ConeRect::compl(0.0, 0.0).is_err());
    }

    #[test]
    fn scaling_preserves_kind_and_scales_distance() {
        let r = ConeRect::joint_exceed(1.0, 2.0).unwrap();
        let s = r.scale(3.0);
        assert_eq!(s.kind_name(), "joint_exceed");
        assert!((s.distance_to_origin() - 3.0 * r.distance_to_origin()).abs() < 1e-12);
    }

    #[test]
    fn band_partition_covers_far_sets() {
        let part = GluePartition::new(0.3).unwrap();
        let rect = ConeRect::compl(1.0, 2.0).unwrap();
        // Sample points of the rect; all must be covered since
        // d(0, rect) = 1 > 0.3 * sqrt(2).
        for &p in &[(1.5, 0.0), (0.0, 2.5), (2.0, 3.0), (1.01, 1.0)] {
            assert!(rect.contains_point(p));
            assert!(part.covers_point(p), "{p:?}");
        }
        // The uncovered corner square lies below eps * sqrt(2).
        assert!(!part.covers_point((0.1, 0.1)));
    }

    #[test]
    fn interval_intersection_tracks_openness() {
        let a = Iv::closed(0.0, 2.0);
        let b = Iv::right_open(0.0, 1.0);
        let c = a.intersect(&b).unwrap();
        assert!(c.contains_zero());
        assert!(!c.contains(1.0));
        assert!(c.contains(0.999));
        let d = Iv::left_open(2.0, 3.0);
        assert!(a.intersect(&d).is_none());
    }

    #[test]
    fn compl_rect_pieces_are_disjoint_and_cover() {
        let rect = ConeRect::compl(1.0, 2.0).unwrap();
        let pieces = rect.pieces();
        assert_eq!(pieces.len(), 2);
        for &p in &[(1.5, 0.5), (0.5, 2.5), (1.5, 2.5), (0.0, 3.0), (2.0, 0.0)] {
            let inside = rect.contains_point(p);
            let count = pieces.iter().filter(|g| g.contains_point(p)).count();
            assert_eq!(count, usize::from(inside), "{p:?}");
        }
    }
}
