use num_complex::Complex64;
use stripstab::{greenfn, orrsomm, ShearProfile, SpectralDiscretization};

fn unstable_count(alpha: f64, nu: f64, n: usize) -> usize {
    let disc = SpectralDiscretization::new(n).unwrap();
    orrsomm::spectrum(&ShearProfile::poiseuille(), alpha, nu, &disc)
        .unwrap()
        .iter()
        .filter(|p| p.lambda.re > 0.0)
        .count()
}

#[test]
fn negative_wavenumber_gives_conjugate_spectrum() {
    let disc = SpectralDiscretization::new(96).unwrap();
    let p = ShearProfile::poiseuille();
    let plus = orrsomm::spectrum(&p, 2.0, 5e-5, &disc).unwrap();
    let minus = orrsomm::spectrum(&p, -2.0, 5e-5, &disc).unwrap();
    assert_eq!(plus.len(), minus.len());
    for e in plus.iter().take(20) {
        let target = e.lambda.conj();
        let nearest = minus
            .iter()
            .map(|m| (m.lambda - target).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-10 * e.lambda.norm().max(1.0), "{} unmatched ({nearest:e})", e.lambda);
    }
}

#[test]
fn one_unstable_mode_at_both_resolutions() {
    assert_eq!(unstable_count(2.0, 5e-5, 128), 1);
    assert_eq!(unstable_count(2.0, 5e-5, 192), 1);
}

#[test]
fn large_viscosity_is_stable_at_both_resolutions() {
    assert_eq!(unstable_count(2.0, 1e-2, 64), 0);
    assert_eq!(unstable_count(2.0, 1e-2, 128), 0);
}

#[test]
fn continuation_guess_converges_quickly() {
    let disc = SpectralDiscretization::new(128).unwrap();
    let p = ShearProfile::poiseuille();
    let nu = 8e-5;
    let start = orrsomm::leading_eigen(&p, 2.0, nu, &disc, None).unwrap();
    let pencil = orrsomm::assemble(&p, 2.0, nu * (1.0 + 1e-3), &disc).unwrap();
    let (lambda, _, iterations) = pencil.refine(start.lambda, &start.psi).unwrap();
    assert!(iterations <= 5, "{iterations} iterations");
    let dense = orrsomm::leading_eigen(&p, 2.0, nu * (1.0 + 1e-3), &disc, None).unwrap();
    assert!((lambda - dense.lambda).norm() < 1e-10, "{lambda} vs {}", dense.lambda);
}

#[test]
fn near_critical_pair_is_accurate_and_isolated() {
    let disc = SpectralDiscretization::new(128).unwrap();
    let e = orrsomm::leading_eigen(&ShearProfile::poiseuille(), 2.04, 8.66e-5, &disc, None).unwrap();
    assert!(e.residual < 1e-10, "residual {:e}", e.residual);
    assert!(e.gap > 0.0);
    assert!(e.lambda.re.abs() < 1e-4);
    assert!(e.wall_defect(&disc) < 1e-8);
    let mid = disc.len() / 2;
    assert!((disc.nodes()[mid] - 0.5).abs() < 1e-15);
    let dpsi = disc.diff(1, &e.psi);
    assert!(dpsi[mid].norm() < 1e-6, "psi'(1/2) = {:e}", dpsi[mid].norm());
}

#[test]
fn zero_wavenumber_is_dissipative() {
    let disc = SpectralDiscretization::new(64).unwrap();
    let e = orrsomm::leading_eigen(&ShearProfile::poiseuille(), 0.0, 1e-3, &disc, None).unwrap();
    assert!(e.lambda.re < 0.0, "{}", e.lambda);
}

#[test]
fn leading_eigenvalue_is_resolved() {
    let p = ShearProfile::poiseuille();
    let a = orrsomm::leading_eigen(&p, 2.0, 5e-5, &SpectralDiscretization::new(128).unwrap(), None).unwrap();
    let b = orrsomm::leading_eigen(&p, 2.0, 5e-5, &SpectralDiscretization::new(192).unwrap(), None).unwrap();
    assert!((a.lambda - b.lambda).norm() < 1e-8, "{} vs {}", a.lambda, b.lambda);
}

#[test]
fn resolvent_respects_the_fitted_bound() {
    let disc = SpectralDiscretization::new(128).unwrap();
    let p = ShearProfile::poiseuille();
    let (alpha, nu) = (2.0, 1e-4);
    let samples = greenfn::imaginary_axis_samples(1e2, 1e4, 9);
    let report = greenfn::verify_resolvent_bound(&p, alpha, nu, &samples, &disc, 3).unwrap();
    let pencil = orrsomm::assemble(&p, alpha, nu, &disc).unwrap();
    let f = greenfn::random_smooth_forcing(&disc, 17);
    for lambda in [Complex64::new(0.0, 1e3), Complex64::new(0.0, -1e3)] {
        let psi = orrsomm::solve_resolvent(&pencil, lambda, &f).unwrap();
        let bound = 2.0 * report.constant * disc.l2_norm(&f) / lambda.norm();
        assert!(disc.l2_norm(&psi) <= bound, "{} > {bound}", disc.l2_norm(&psi));
    }
}
