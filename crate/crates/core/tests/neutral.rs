mod common;

use common::shooting;
use stripstab::neutral::{self, Branch};
use stripstab::{orrsomm, Error, ShearProfile, SpectralDiscretization};

fn grid(n: usize) -> SpectralDiscretization {
    SpectralDiscretization::new(n).unwrap()
}

#[test]
fn growth_rate_crosses_zero_once_along_alpha() {
    let disc = grid(128);
    let p = ShearProfile::poiseuille();
    let nu = 8e-5;
    let path: Vec<(f64, f64)> = (0..=50).map(|k| (1.8 + 0.01 * k as f64, nu)).collect();
    let forward = neutral::track_eigenvalue(&p, &path, &disc).unwrap();
    // the unstable band near the nose is bounded by the lower and upper branches
    let crossings: Vec<f64> = forward
        .windows(2)
        .zip(&path)
        .filter(|(w, _)| w[0].lambda.re * w[1].lambda.re < 0.0)
        .map(|(_, a)| a.0)
        .collect();
    assert_eq!(crossings.len(), 2, "{crossings:?}");
    assert!(forward[0].lambda.re < 0.0 && forward[50].lambda.re < 0.0);
    assert!(crossings[0] < 2.04 && crossings[1] > 2.04, "{crossings:?}");
    for k in [0, 17, 33, 50] {
        let dense = orrsomm::leading_eigen(&p, path[k].0, nu, &disc, None).unwrap();
        assert!((dense.lambda - forward[k].lambda).norm() < 1e-9, "alpha {}", path[k].0);
    }
    let reversed: Vec<(f64, f64)> = path.iter().rev().copied().collect();
    let backward = neutral::track_eigenvalue(&p, &reversed, &disc).unwrap();
    for (f, b) in forward.iter().zip(backward.iter().rev()) {
        assert!((f.lambda - b.lambda).norm() < 1e-9, "{} vs {}", f.lambda, b.lambda);
    }
}

#[test]
fn marginal_wavenumber_in_bracket() {
    let disc = grid(128);
    let p = ShearProfile::poiseuille();
    let np = neutral::find_alpha_plus(&p, 8e-5, (1.9, 2.2), &disc).unwrap();
    assert!(np.alpha_plus > 2.1 && np.alpha_plus < 2.2, "{}", np.alpha_plus);
    assert!(np.lambda.re.abs() < 1e-9);
    assert!(np.d_re_lambda_d_nu < 0.0 && np.d_re_lambda_d_alpha < 0.0);
    // lambda = -i alpha c, so the crossing frequency is -alpha c_r
    let c = orrsomm::wave_speed(np.alpha_plus, np.lambda);
    assert!((np.omega_plus + np.alpha_plus * c.re).abs() < 1e-9);
    assert!(np.omega_plus < 0.0);

    // dense sign scan at a spacing of 1e-3 around the root
    let below = orrsomm::leading_eigen(&p, np.alpha_plus - 1e-3, 8e-5, &disc, None).unwrap();
    let above = orrsomm::leading_eigen(&p, np.alpha_plus + 1e-3, 8e-5, &disc, None).unwrap();
    assert!(below.lambda.re > 0.0 && above.lambda.re < 0.0);

    let (nu_shoot, _) = shooting::neutral_nu(np.alpha_plus, 8e-5, c).expect("shooting converges");
    assert!((nu_shoot - 8e-5).abs() < 1e-6 * 8e-5, "{nu_shoot:e}");

    let again = neutral::find_alpha_plus(&p, 8e-5, (np.alpha_plus - 0.02, np.alpha_plus + 0.03), &disc).unwrap();
    assert!((again.alpha_plus - np.alpha_plus).abs() < 1e-8);
}

#[test]
fn stable_viscosity_has_no_bracket() {
    let err = neutral::find_alpha_plus(&ShearProfile::poiseuille(), 1e-2, (1.9, 2.2), &grid(64)).unwrap_err();
    assert!(matches!(err, Error::Bracket { .. }), "{err}");
}

#[test]
fn upper_branch_traced_without_failures() {
    let disc = grid(128);
    let p = ShearProfile::poiseuille();
    let curve = neutral::trace_neutral_curve(&p, (2e-5, 8.5e-5), 12, Branch::Upper, &disc).unwrap();
    assert!(curve.failures.is_empty(), "{:?}", curve.failures);
    assert_eq!(curve.points.len(), 12);
    // a single hump: the upper wavenumber rises away from the nose, then falls
    let steps: Vec<f64> = curve.points.windows(2).map(|w| w[1].alpha_plus - w[0].alpha_plus).collect();
    let turns = steps.windows(2).filter(|d| d[0] * d[1] < 0.0).count();
    assert_eq!(turns, 1, "{steps:?}");
    assert!(steps.iter().all(|d| d.abs() < 0.1), "{steps:?}");
    for q in &curve.points {
        assert!(q.lambda.re.abs() < 1e-9 && q.d_re_lambda_d_alpha < 0.0);
    }
    let lower = neutral::trace_neutral_curve(&p, (2e-5, 2e-5), 1, Branch::Lower, &disc).unwrap();
    assert!(lower.points[0].alpha_plus < curve.points[0].alpha_plus);
}

#[test]
fn range_above_critical_is_empty() {
    let curve =
        neutral::trace_neutral_curve(&ShearProfile::poiseuille(), (1e-4, 2e-4), 3, Branch::Upper, &grid(96)).unwrap();
    assert!(curve.points.is_empty());
}

#[test]
fn couette_audit_finds_no_neutral_point() {
    let report = neutral::audit_h(&ShearProfile::couette(), 8e-5, &grid(96), 1).unwrap();
    assert!(report.neutral.is_none());
    assert!(!report.passed);
    assert!(report.below.iter().chain(&report.above).all(|s| s.unstable_count == 0));
}

#[test]
fn audit_is_reproducible() {
    let disc = grid(96);
    let p = ShearProfile::poiseuille();
    let a = neutral::audit_h(&p, 8e-5, &disc, 5).unwrap();
    let b = neutral::audit_h(&p, 8e-5, &disc, 5).unwrap();
    assert!(a.passed);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
