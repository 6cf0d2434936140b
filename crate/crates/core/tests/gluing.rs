//! Integration tests for the band-partition gluing: epsilon invariance,
//! additivity, restriction, consistency gating, and agreement with Monte
//! Carlo on the full cone.

use extremal_core::catalog;
use extremal_core::cones::{consistency_check, default_interior_grid, glue};
use extremal_core::estimate::{default_k, tail_measure_estimate};
use extremal_core::samplers::{sample, ModelSpec, ModelVariant};
use extremal_core::{ConeId, ConeRect, Error, TailMeasure};

const TOL_CONSISTENCY: f64 = 1e-8;

fn diag_pair() -> (TailMeasure, TailMeasure) {
    (
        catalog::diagonal_measure(ConeId::UpperStrip),
        catalog::diagonal_measure(ConeId::RightStrip),
    )
}

fn angular_pair() -> (TailMeasure, TailMeasure) {
    let s = extremal_core::angular::AngularSpec::Uniform2;
    (
        catalog::from_angular_measure(s.to_measure(), ConeId::UpperStrip).unwrap(),
        catalog::from_angular_measure(s.to_measure(), ConeId::RightStrip).unwrap(),
    )
}

#[test]
fn diagonal_glue_matches_min_tail() {
    // For (X, X) the full-cone measure of ([0,x] x [0,y])^c is (x min y)^{-1}.
    let (mu, nu) = diag_pair();
    let rect = ConeRect::compl(2.0, 3.0).unwrap();
    let v = glue(&mu, &nu, &rect, 0.1, TOL_CONSISTENCY).unwrap();
    assert!((v - 0.5).abs() < 1e-12, "glued value {v}");
}

#[test]
fn glue_is_epsilon_invariant() {
    let (mu, nu) = diag_pair();
    for &(x, y) in &[(2.0, 3.0), (1.0, 1.0), (0.5, 4.0)] {
        let rect = ConeRect::compl(x, y).unwrap();
        let lim = rect.distance_to_origin() / 2.0_f64.sqrt();
        let v1 = glue(&mu, &nu, &rect, 0.9 * lim, TOL_CONSISTENCY).unwrap();
        let v2 = glue(&mu, &nu, &rect, 0.2 * lim, TOL_CONSISTENCY).unwrap();
        assert!((v1 - v2).abs() <= 1e-12, "eps variance {} at ({x},{y})", v1 - v2);
    }
    let (mu, nu) = angular_pair();
    let rect = ConeRect::compl(1.0, 1.0).unwrap();
    let v1 = glue(&mu, &nu, &rect, 0.5, TOL_CONSISTENCY).unwrap();
    let v2 = glue(&mu, &nu, &rect, 0.17, TOL_CONSISTENCY).unwrap();
    assert!((v1 - v2).abs() <= 1e-10, "eps variance {}", v1 - v2);
}

#[test]
fn glue_rejects_large_epsilon() {
    let (mu, nu) = diag_pair();
    let rect = ConeRect::compl(1.0, 2.0).unwrap();
    // d(0, A)/sqrt(2) = 1/sqrt(2) ~ 0.707
    let err = glue(&mu, &nu, &rect, 0.71, TOL_CONSISTENCY).unwrap_err();
    assert!(matches!(err, Error::EpsTooLarge { .. }));
}

#[test]
fn glue_restriction_recovers_each_side() {
    let (mu, nu) = angular_pair();
    // A inside the upper strip: glued value equals mu(A) exactly.
    let a = ConeRect::upper(2.0, 1.0).unwrap();
    let glued = glue(&mu, &nu, &a, 0.3, TOL_CONSISTENCY).unwrap();
    let direct = mu.eval(&a).unwrap();
    assert!((glued - direct).abs() <= 1e-12, "restriction defect {}", glued - direct);
    // and inside the right strip: equals nu(A).
    let b = ConeRect::right(1.0, 2.0).unwrap();
    let glued = glue(&mu, &nu, &b, 0.3, TOL_CONSISTENCY).unwrap();
    let direct = nu.eval(&b).unwrap();
    assert!((glued - direct).abs() <= 1e-12);
}

#[test]
fn glue_is_additive_over_canonical_partitions() {
    // Compl(x, y) = Right(x, inf) disjoint-union Upper(x, y).
    let (mu, nu) = diag_pair();
    for &(x, y) in &[(2.0, 3.0), (1.5, 1.5), (3.0, 1.0)] {
        let whole = glue(&mu, &nu, &ConeRect::compl(x, y).unwrap(), 0.2, TOL_CONSISTENCY)
            .unwrap();
        let right = glue(
            &mu,
            &nu,
            &ConeRect::right(x, f64::INFINITY).unwrap(),
            0.2,
            TOL_CONSISTENCY,
        )
        .unwrap();
        let upper =
            glue(&mu, &nu, &ConeRect::upper(x, y).unwrap(), 0.2, TOL_CONSISTENCY).unwrap();
        assert!(
            (whole - right - upper).abs() <= 1e-12,
            "additivity defect {} at ({x},{y})",
            whole - right - upper
        );
    }
}

#[test]
fn interior_rects_are_common_ground() {
    // Any rect inside the interior cone gets the same value from mu, nu,
    // and the glued measure.
    let (mu, nu) = angular_pair();
    let a = ConeRect::joint_exceed(0.8, 1.3).unwrap();
    let m = mu.eval(&a).unwrap();
    let n = nu.eval(&a).unwrap();
    let g = glue(&mu, &nu, &a, 0.4, TOL_CONSISTENCY).unwrap();
    assert!((m - n).abs() <= 1e-10);
    assert!((g - m).abs() <= 1e-10);
}

#[test]
fn inconsistent_strip_pair_is_refused() {
    // The quartic-minimum model's two standardized strip measures disagree
    // on the interior (the scalings genuinely differ per cone), so the
    // gluing must refuse them.
    let mu = catalog::ex51_upper_std();
    let nu = catalog::ex51_right_std();
    let report =
        consistency_check(&mu, &nu, &default_interior_grid(), TOL_CONSISTENCY).unwrap();
    assert!(!report.pass);
    assert!(report.max_defect > 0.3, "defect {}", report.max_defect);
    let err = glue(&mu, &nu, &ConeRect::compl(1.0, 1.0).unwrap(), 0.3, TOL_CONSISTENCY)
        .unwrap_err();
    match err {
        Error::InconsistentMeasures { defect } => assert!(defect > 0.3),
        other => panic!("expected inconsistency, got {other}"),
    }
}

#[test]
fn consistency_passes_for_identical_and_twin_empirical_measures() {
    let (mu, nu) = diag_pair();
    let report =
        consistency_check(&mu, &nu, &default_interior_grid(), TOL_CONSISTENCY).unwrap();
    assert!(report.pass);
    assert_eq!(report.max_defect, 0.0);

    // Two seeds of the same model: defect within 3 combined standard errors.
    let n = 200_000;
    let k = default_k(n);
    let t = n as f64 / k as f64;
    let grid = default_interior_grid();
    let mut worst_ratio: f64 = 0.0;
    let b1 = sample(&ModelSpec::new(ModelVariant::DiagonalPareto, 101), n).unwrap();
    let b2 = sample(&ModelSpec::new(ModelVariant::DiagonalPareto, 202), n).unwrap();
    let scaled =
        |b: &extremal_core::SampleBatch| b.xs.iter().zip(&b.ys).map(|(&x, &y)| (x / t, y / t)).collect();
    let e1 = TailMeasure::empirical(ConeId::UpperStrip, (1.0, 1.0), scaled(&b1), k);
    let e2 = TailMeasure::empirical(ConeId::RightStrip, (1.0, 1.0), scaled(&b2), k);
    let rep = consistency_check(&e1, &e2, &grid, 1.0).unwrap();
    for rect in &grid {
        let s1 = tail_measure_estimate(&b1, k, (1.0, 1.0), rect).unwrap();
        let s2 = tail_measure_estimate(&b2, k, (1.0, 1.0), rect).unwrap();
        let combined = (s1.stderr * s1.stderr + s2.stderr * s2.stderr).sqrt().max(1e-9);
        let diff = (s1.value - s2.value).abs();
        worst_ratio = worst_ratio.max(diff / combined);
    }
    assert!(worst_ratio <= 3.0, "worst defect {worst_ratio} standard errors");
    assert!(rep.max_defect < 0.1);
}

#[test]
fn glued_angular_measure_matches_monte_carlo() {
    let (mu, nu) = angular_pair();
    let spec = ModelSpec::new(
        ModelVariant::FromAngular { s: extremal_core::angular::AngularSpec::Uniform2 },
        31,
    );
    let n = 1_000_000;
    let k = default_k(n);
    let batch = sample(&spec, n).unwrap();
    for &(x, y) in &[(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (2.0, 2.0)] {
        let rect = ConeRect::compl(x, y).unwrap();
        let glued = glue(&mu, &nu, &rect, 0.3 * x.min(y), TOL_CONSISTENCY).unwrap();
        let est = tail_measure_estimate(&batch, k, (1.0, 1.0), &rect).unwrap();
        let tol = (4.0 * est.stderr).max(0.03);
        assert!(
            (glued - est.value).abs() <= tol,
            "glue {} vs MC {} at ({x},{y})",
            glued,
            est.value
        );
    }
}
