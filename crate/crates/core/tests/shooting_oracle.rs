mod common;

use common::shooting;
use num_complex::Complex64;
use stripstab::{orrsomm, ShearProfile, SpectralDiscretization};

#[test]
fn collocation_matches_shooting_at_benchmark_point() {
    let c_shoot = shooting::wave_speed(2.0, 5e-5, Complex64::new(0.24, 0.0)).expect("secant converges");
    let disc = SpectralDiscretization::new(128).unwrap();
    let lead = orrsomm::leading_eigen(&ShearProfile::poiseuille(), 2.0, 5e-5, &disc, None).unwrap();
    eprintln!("shooting c = {c_shoot}, collocation c = {}", lead.c);
    assert!((lead.c - c_shoot).norm() < 1e-7, "{} vs {c_shoot}", lead.c);
}

#[test]
fn critical_point_matches_shooting() {
    let (nu_s, alpha_s) = shooting::critical_point(2.0, 8.5e-5, Complex64::new(0.26, 0.0)).expect("nose found");
    let disc = SpectralDiscretization::new(128).unwrap();
    let cp = stripstab::neutral::find_critical_point(&ShearProfile::poiseuille(), 8e-5, &disc).unwrap();
    eprintln!("shooting nu = {nu_s:e}, alpha = {alpha_s}; collocation nu = {:e}, alpha = {}", cp.nu, cp.alpha);
    assert!((cp.nu - nu_s).abs() < 1e-6 * nu_s);
    assert!((cp.alpha - alpha_s).abs() < 1e-3 * alpha_s);
}
