//! Independent Orr-Sommerfeld solver for plane Poiseuille flow by shooting.
//!
//! Integrates `psi'''' = 2 a^2 psi'' - a^4 psi + (i a / nu) [(U - c)(psi'' - a^2 psi) - U'' psi]`
//! with `U = 4y(1-y)` from the wall `y = 0` to the centreline with RK4, carrying
//! the two solutions with `psi = psi' = 0` at the wall and re-orthonormalizing
//! them after every step. Even modes satisfy `psi' = psi''' = 0` at `y = 1/2`.
//! Shares no code with the collocation solver.

use num_complex::Complex64;

type State = [Complex64; 4];

const STEPS: usize = 12_000;

fn rhs(alpha: f64, nu: f64, c: Complex64, y: f64, z: &State) -> State {
    let u = 4.0 * y * (1.0 - y);
    let upp = -8.0;
    let a2 = alpha * alpha;
    let lap = z[2] - a2 * z[0];
    let coupling = Complex64::new(0.0, alpha / nu) * ((u - c) * lap - upp * z[0]);
    [z[1], z[2], z[3], 2.0 * a2 * z[2] - a2 * a2 * z[0] + coupling]
}

fn rk4(alpha: f64, nu: f64, c: Complex64, y: f64, h: f64, z: &State) -> State {
    let add = |a: &State, b: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + b[i] * s) };
    let k1 = rhs(alpha, nu, c, y, z);
    let k2 = rhs(alpha, nu, c, y + h / 2.0, &add(z, &k1, h / 2.0));
    let k3 = rhs(alpha, nu, c, y + h / 2.0, &add(z, &k2, h / 2.0));
    let k4 = rhs(alpha, nu, c, y + h, &add(z, &k3, h));
    std::array::from_fn(|i| z[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
}

fn orthonormalize(a: &mut State, b: &mut State) {
    let na = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().for_each(|v| *v /= na);
    let proj: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    b.iter_mut().zip(a.iter()).for_each(|(y, x)| *y -= proj * x);
    let nb = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    b.iter_mut().for_each(|v| *v /= nb);
}

/// Centreline determinant whose zeros are the even eigenvalues `c`.
pub fn dispersion(alpha: f64, nu: f64, c: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut a: State = [zero, zero, one, zero];
    let mut b: State = [zero, zero, zero, one];
    let h = 0.5 / STEPS as f64;
    for k in 0..STEPS {
        let y = k as f64 * h;
        a = rk4(alpha, nu, c, y, h, &a);
        b = rk4(alpha, nu, c, y, h, &b);
        orthonormalize(&mut a, &mut b);
    }
    a[1] * b[3] - b[1] * a[3]
}

/// Secant iteration on the dispersion relation from the guess `c0`.
pub fn wave_speed(alpha: f64, nu: f64, c0: Complex64) -> Option<Complex64> {
    let mut x0 = c0;
    let mut x1 = c0 * 1.001 + Complex64::new(0.0, 1e-4);
    let mut f0 = dispersion(alpha, nu, x0);
    for _ in 0..40 {
        let f1 = dispersion(alpha, nu, x1);
        let step = f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 -= step;
        if step.norm() < 1e-12 {
            return Some(x1);
        }
    }
    None
}

/// Viscosity at which the mode near `c0` is neutral for wavenumber `alpha`.
pub fn neutral_nu(alpha: f64, nu0: f64, c0: Complex64) -> Option<(f64, Complex64)> {
    let mut c = wave_speed(alpha, nu0, c0)?;
    let (mut n0, mut g0) = (nu0, c.im);
    let mut n1 = nu0 * 1.01;
    for _ in 0..40 {
        c = wave_speed(alpha, n1, c)?;
        let g1 = c.im;
        let step = g1 * (n1 - n0) / (g1 - g0);
        n0 = n1;
        g0 = g1;
        n1 -= step;
        if step.abs() < 1e-12 * n1 {
            return Some((n1, c));
        }
    }
    None
}

/// Nose of the neutral curve: largest neutral viscosity over `alpha`, by
/// successive parabolic fits of `nu(alpha)`.
pub fn critical_point(alpha0: f64, nu0: f64, c0: Complex64) -> Option<(f64, f64)> {
    let (mut alpha, mut nu, mut c) = (alpha0, nu0, c0);
    let mut spread = 0.05;
    for _ in 0..4 {
        let mut pts = Vec::new();
        for a in [alpha - spread, alpha, alpha + spread] {
            let (n, cc) = neutral_nu(a, nu, c)?;
            pts.push((a, n));
            c = cc;
        }
        let (fm, f0, fp) = (pts[0].1, pts[1].1, pts[2].1);
        let curv = fp - 2.0 * f0 + fm;
        let shift = -spread * (fp - fm) / (2.0 * curv);
        alpha += shift;
        nu = f0 - (fp - fm) * (fp - fm) / (8.0 * curv);
        spread /= 4.0;
    }
    Some((nu, alpha))
}
