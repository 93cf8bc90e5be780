//! Green function of the approximate Orr-Sommerfeld equation
//!
//! ```text
//! -eps psi'''' - c~ psi'' + alpha^2 c psi = f,   eps = nu / (i alpha),   c~ = c - 2 eps alpha^2
//! ```
//!
//! and the Neumann series that turns it into the full resolvent. Dividing the
//! alpha-scaled Orr-Sommerfeld operator by `alpha` gives exactly the left side
//! above minus `K(psi) = -U psi'' + alpha^2 U psi + U'' psi + eps alpha^4 psi`,
//! so the resolvent is `psi = sum_j psi_j` with `psi_1 = G0 * (f / alpha)` and
//! `psi_{j+1} = G0 * K(psi_j)`.
//!
//! The image ansatz `G_int(x, y) = a [e^{-mu_f |x-y|} + e^{-mu_f |x-(1-y)|}] + ...`
//! answers the symmetric source pair `delta_x + delta_{1-x}`. The same
//! construction with a minus sign answers `delta_x - delta_{1-x}`; half their
//! sum is the Green function of a single source, which is what the
//! convolution uses.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::linalg::{self, czero, CMat};
use crate::orrsomm;
use crate::profiles::ShearProfile;
use crate::specgrid::{clenshaw_curtis_panel, SpectralDiscretization};

pub const MAX_TERMS: usize = 200;
pub const TRUNCATION_TOL: f64 = 1e-12;
pub const STALL_RATIO: f64 = 0.9;
const STALL_STEPS: usize = 3;
const ROOT_SPLIT_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-10;
/// Geometric refinement levels around each kink of the kernel (out to 64 decay lengths).
const LAYER_LEVELS: i32 = 6;
const MIN_PANEL_POINTS: usize = 32;

/// Parity of the source pair `delta_x +- delta_{1-x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Which one-sided limit to take when the field point sits on a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Below => -1.0,
            Side::Above => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GreenApprox {
    pub alpha: f64,
    pub nu: f64,
    pub c: Complex64,
    pub epsilon: Complex64,
    pub c_tilde: Complex64,
    pub mu_s: Complex64,
    pub mu_f: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

fn branch(z: Complex64) -> Complex64 {
    let mu = z.sqrt();
    if mu.re == 0.0 && mu.im < 0.0 {
        -mu
    } else {
        mu
    }
}

/// Slow and fast roots of `-eps mu^4 - c~ mu^2 + alpha^2 c = 0` with `Re mu >= 0`.
pub fn characteristic_roots(alpha: f64, c: Complex64, nu: f64) -> Result<(Complex64, Complex64)> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::Precondition(format!("characteristic roots need alpha != 0, got {alpha}")));
    }
    if !(nu > 0.0) {
        return Err(Error::Precondition(format!("viscosity must be positive, got {nu}")));
    }
    let eps = Complex64::new(0.0, -nu / alpha);
    let a2 = alpha * alpha;
    let ct = c - 2.0 * eps * a2;
    // roots z = mu^2 of eps z^2 + c~ z - alpha^2 c = 0, computed without cancellation
    let mut s = (ct * ct + 4.0 * eps * a2 * c).sqrt();
    if (ct.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(ct + s) / 2.0;
    if q.norm() == 0.0 {
        return Err(Error::DegenerateRoots { gap: 0.0 });
    }
    let z_big = q / eps;
    let z_small = -a2 * c / q;
    let (mut mu_s, mut mu_f) = (branch(z_small), branch(z_big));
    if mu_s.norm() > mu_f.norm() {
        std::mem::swap(&mut mu_s, &mut mu_f);
    }
    let gap = (mu_f - mu_s).norm();
    if gap < ROOT_SPLIT_TOL * mu_f.norm() || mu_s.norm() == 0.0 {
        return Err(Error::DegenerateRoots { gap });
    }
    Ok((mu_s, mu_f))
}

fn expo(mu: Complex64, t: f64) -> Complex64 {
    (-mu * t).exp()
}

impl GreenApprox {
    /// Builds the approximate Green function at `lambda = -i alpha c`.
    pub fn new(alpha: f64, c: Complex64, nu: f64) -> Result<Self> {
        let (mu_s, mu_f) = characteristic_roots(alpha, c, nu)?;
        let eps = Complex64::new(0.0, -nu / alpha);
        let c_tilde = c - 2.0 * eps * alpha * alpha;
        let split = mu_f * mu_f - mu_s * mu_s;
        let a = 1.0 / (2.0 * eps * mu_f * split);
        let b = -1.0 / (2.0 * eps * mu_s * split);
        let ga = Self {
            alpha,
            nu,
            c,
            epsilon: eps,
            c_tilde,
            mu_s,
            mu_f,
            a,
            b,
        };
        let (v1, v2) = ga.vieta_defects();
        let (j1, j2) = ga.jump_defects();
        let worst = v1.max(v2).max(j1).max(j2);
        if !(worst < IDENTITY_TOL) {
            return Err(Error::DegenerateRoots { gap: (mu_f - mu_s).norm() });
        }
        Ok(ga)
    }

    pub fn from_lambda(alpha: f64, lambda: Complex64, nu: f64) -> Result<Self> {
        Self::new(alpha, orrsomm::wave_speed(alpha, lambda), nu)
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(0.0, -self.alpha) * self.c
    }

    /// Relative defects of `mu_s^2 + mu_f^2 = -c~/eps` and `mu_s^2 mu_f^2 = -alpha^2 c / eps`.
    pub fn vieta_defects(&self) -> (f64, f64) {
        let (s2, f2) = (self.mu_s * self.mu_s, self.mu_f * self.mu_f);
        let sum = -self.c_tilde / self.epsilon;
        let prod = -self.alpha * self.alpha * self.c / self.epsilon;
        ((s2 + f2 - sum).norm() / sum.norm(), (s2 * f2 - prod).norm() / prod.norm())
    }

    /// Relative defects of `mu_f a + mu_s b = 0` and `mu_f^3 a + mu_s^3 b = 1/(2 eps)`.
    pub fn jump_defects(&self) -> (f64, f64) {
        let fa = self.mu_f * self.a;
        let first = (fa + self.mu_s * self.b).norm() / fa.norm();
        let target = 1.0 / (2.0 * self.epsilon);
        let third = self.mu_f.powi(3) * self.a + self.mu_s.powi(3) * self.b;
        (first, (third - target).norm() / target.norm())
    }

    /// Width of the fast layer, `1 / Re mu_f`.
    pub fn layer_width(&self) -> f64 {
        1.0 / self.mu_f.re.max(f64::MIN_POSITIVE)
    }

    /// `d^order/dy^order` of `e^{-mu |y - center|}`.
    fn kink_term(mu: Complex64, center: f64, y: f64, order: u32, side: Side) -> Complex64 {
        let s = if y > center {
            1.0
        } else if y < center {
            -1.0
        } else {
            side.sign()
        };
        (-mu * s).powu(order) * expo(mu, (y - center).abs())
    }

    /// `d^order/dy^order` of `e^{-mu y} + p e^{-mu (1 - y)}`.
    fn wall_term(mu: Complex64, p: f64, y: f64, order: u32) -> Complex64 {
        (-mu).powu(order) * expo(mu, y) + p * mu.powu(order) * expo(mu, 1.0 - y)
    }

    /// `d^order/dy^order G_int(x, y)` for the given source parity.
    pub fn interior_derivative(&self, parity: Parity, x: f64, y: f64, order: u32, side: Side) -> Complex64 {
        let p = parity.sign();
        let mut g = czero();
        for (coef, mu) in [(self.a, self.mu_f), (self.b, self.mu_s)] {
            g += coef
                * (Self::kink_term(mu, x, y, order, side) + p * Self::kink_term(mu, 1.0 - x, y, order, side));
        }
        g
    }

    /// The interior Green function (symmetric image ansatz).
    pub fn interior_green(&self, x: f64, y: f64) -> Complex64 {
        self.interior_derivative(Parity::Even, x, y, 0, Side::Above)
    }

    /// `(a'(x), b'(x))` cancelling the interior function and its slope at `y = 0`.
    pub fn boundary_coefficients(&self, parity: Parity, x: f64) -> Result<(Complex64, Complex64)> {
        let p = parity.sign();
        let g0 = self.interior_derivative(parity, x, 0.0, 0, Side::Above);
        let g1 = self.interior_derivative(parity, x, 0.0, 1, Side::Above);
        let (ff, fs) = (Self::wall_term(self.mu_f, p, 0.0, 0), Self::wall_term(self.mu_s, p, 0.0, 0));
        let (df, ds) = (Self::wall_term(self.mu_f, p, 0.0, 1), Self::wall_term(self.mu_s, p, 0.0, 1));
        let det = ff * ds - fs * df;
        let scale = (ff * ds).norm() + (fs * df).norm();
        if !(det.norm() > 1e-14 * scale) {
            return Err(Error::BoundarySolve { x });
        }
        let a_p = (-g0 * ds + g1 * fs) / det;
        let b_p = (-ff * g1 + df * g0) / det;
        Ok((a_p, b_p))
    }

    pub fn boundary_derivative(&self, parity: Parity, x: f64, y: f64, order: u32) -> Result<Complex64> {
        let p = parity.sign();
        let (a_p, b_p) = self.boundary_coefficients(parity, x)?;
        Ok(a_p * Self::wall_term(self.mu_f, p, y, order) + b_p * Self::wall_term(self.mu_s, p, y, order))
    }

    /// The boundary-layer Green function paired with [`Self::interior_green`].
    pub fn boundary_green(&self, x: f64, y: f64) -> Result<Complex64> {
        self.boundary_derivative(Parity::Even, x, y, 0)
    }

    /// `G0 = G_int + G_b` for the given source parity.
    pub fn total_derivative(&self, parity: Parity, x: f64, y: f64, order: u32, side: Side) -> Result<Complex64> {
        Ok(self.interior_derivative(parity, x, y, order, side) + self.boundary_derivative(parity, x, y, order)?)
    }

    /// Green function of a single source `delta_x`, the average of both parities.
    pub fn kernel(&self, x: f64, y: f64, order: u32, side: Side) -> Result<Complex64> {
        let mut g = self.a * Self::kink_term(self.mu_f, x, y, order, side)
            + self.b * Self::kink_term(self.mu_s, x, y, order, side);
        for parity in [Parity::Even, Parity::Odd] {
            g += 0.5 * self.boundary_derivative(parity, x, y, order)?;
        }
        Ok(g)
    }

    /// Panel breakpoints on [0, 1] refined geometrically around each kink.
    fn breakpoints(&self, kinks: &[f64]) -> Vec<f64> {
        let w = self.layer_width();
        let mut pts = vec![0.0, 1.0];
        for &k in kinks {
            pts.push(k);
            for level in 0..=LAYER_LEVELS {
                let d = w * 2f64.powi(level);
                pts.push(k - d);
                pts.push(k + d);
            }
        }
        let mut pts: Vec<f64> = pts.into_iter().filter(|p| (0.0..=1.0).contains(p)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }

    /// Quadrature nodes and weights on [0, 1] fitted to the kernel's kinks and to
    /// polynomials of degree `degree` on the Chebyshev grid.
    fn quadrature(&self, kinks: &[f64], degree: usize) -> (Vec<f64>, Vec<f64>) {
        let theta = |y: f64| (1.0 - 2.0 * y).clamp(-1.0, 1.0).acos();
        let bp = self.breakpoints(kinks);
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for pair in bp.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let span = (theta(hi) - theta(lo)).abs() / PI;
            let m = MIN_PANEL_POINTS + (1.5 * degree as f64 * span).ceil() as usize;
            let (x, w) = clenshaw_curtis_panel(lo, hi, m);
            xs.extend(x);
            ws.extend(w);
        }
        (xs, ws)
    }

    /// `sum_j |d^k G(x, .)|_{L1}` for `k = 0, 1, 2` of the interior or boundary part
    /// (symmetric ansatz), by panel quadrature in the field variable.
    pub fn derivative_integrals(&self, x: f64, part: GreenPart) -> Result<f64> {
        let (ys, ws) = self.quadrature(&[0.0, x, 1.0 - x, 1.0], 0);
        let mut total = 0.0;
        for (y, w) in ys.iter().zip(&ws) {
            for order in 0..=2 {
                let v = match part {
                    GreenPart::Interior => self.interior_derivative(Parity::Even, x, *y, order, Side::Above),
                    GreenPart::Boundary => self.boundary_derivative(Parity::Even, x, *y, order)?,
                };
                total += w * v.norm();
            }
        }
        Ok(total)
    }

    /// Matrix `C` with `(C f)_i = int_0^1 G(x, y_i) f(x) dx`, `f` given by its
    /// values on the nodes.
    pub fn convolution_matrix(&self, disc: &SpectralDiscretization) -> Result<CMat> {
        let n = disc.len();
        let nodes = disc.nodes();
        let rows: Vec<Result<Vec<Complex64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let y = nodes[i];
                let mut row = vec![czero(); n];
                if i == 0 || i == n - 1 {
                    // G vanishes identically on the walls
                    return Ok(row);
                }
                let (xs, ws) = self.quadrature(&[0.0, y, 1.0], disc.n());
                for (x, w) in xs.iter().zip(&ws) {
                    let g = self.kernel(*x, y, 0, Side::Above)? * *w;
                    let l = disc.interpolation_row(*x);
                    for (r, lj) in row.iter_mut().zip(&l) {
                        *r += g * *lj;
                    }
                }
                Ok(row)
            })
            .collect();
        let mut c = CMat::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row?.into_iter().enumerate() {
                c[(i, j)] = v;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenPart {
    Interior,
    Boundary,
}

/// Outcome of the Neumann series.
#[derive(Debug, Clone)]
pub struct NeumannSeries {
    pub psi: Vec<Complex64>,
    /// Number of terms `psi_j` summed.
    pub iterations: usize,
    /// Largest observed `||psi_{j+1}|| / ||psi_j||`.
    pub max_ratio: f64,
}

/// `K(psi) = -U psi'' + alpha^2 U psi + U'' psi + eps alpha^4 psi`.
fn coupling(
    ga: &GreenApprox,
    u: &[f64],
    upp: &[f64],
    disc: &SpectralDiscretization,
    psi: &[Complex64],
) -> Vec<Complex64> {
    let a2 = ga.alpha * ga.alpha;
    let d2 = disc.diff(2, psi);
    let e4 = ga.epsilon * a2 * a2;
    (0..psi.len())
        .map(|i| -u[i] * d2[i] + (a2 * u[i] + upp[i]) * psi[i] + e4 * psi[i])
        .collect()
}

/// Sums the Neumann series for `(A - lambda M) psi = f` with `lambda = -i alpha c`,
/// `f` being the right-hand side of the alpha-scaled Orr-Sommerfeld equation.
pub fn neumann_series(
    profile: &ShearProfile,
    alpha: f64,
    c: Complex64,
    nu: f64,
    f: &[Complex64],
    disc: &SpectralDiscretization,
) -> Result<NeumannSeries> {
    if f.len() != disc.len() {
        return Err(Error::Shape {
            expected: disc.len(),
            got: f.len(),
        });
    }
    let ga = GreenApprox::new(alpha, c, nu)?;
    if f.iter().all(|v| *v == czero()) {
        return Ok(NeumannSeries {
            psi: vec![czero(); f.len()],
            iterations: 1,
            max_ratio: 0.0,
        });
    }
    let conv = ga.convolution_matrix(disc)?;
    let (u, upp) = profile.sample(disc.nodes());
    let g: Vec<Complex64> = f.iter().map(|v| v / alpha).collect();
    let first = linalg::matvec(&conv, &g);
    let first_norm = disc.l2_norm(&first);
    let mut sum = first.clone();
    let mut prev = first;
    let mut prev_norm = first_norm;
    let mut stalled = 0;
    let mut max_ratio: f64 = 0.0;
    for term in 2..=MAX_TERMS {
        let next = linalg::matvec(&conv, &coupling(&ga, &u, &upp, disc, &prev));
        let norm = disc.l2_norm(&next);
        let ratio = norm / prev_norm;
        max_ratio = max_ratio.max(ratio);
        linalg::axpy(Complex64::new(1.0, 0.0), &next, &mut sum);
        if norm < TRUNCATION_TOL * first_norm {
            return Ok(NeumannSeries {
                psi: sum,
                iterations: term,
                max_ratio,
            });
        }
        if ratio >= STALL_RATIO {
            stalled += 1;
            if stalled == STALL_STEPS {
                return Err(Error::NoContraction { ratio });
            }
        } else {
            stalled = 0;
        }
        prev = next;
        prev_norm = norm;
    }
    Err(Error::NoContraction { ratio: max_ratio })
}

/// Resolvent by the Green-function iteration; returns `(psi, terms summed)`.
pub fn resolvent_via_iteration(
    profile: &ShearProfile,
    alpha: f64,
    c: Complex64,
    nu: f64,
    f: &[Complex64],
    disc: &SpectralDiscretization,
) -> Result<(Vec<Complex64>, usize)> {
    let s = neumann_series(profile, alpha, c, nu, f, disc)?;
    Ok((s.psi, s.iterations))
}

/// One sample of the resolvent sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundSample {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub lambda_abs: f64,
    /// `||psi||_{L2} / ||f||_{L2}`.
    pub quotient: f64,
    /// `(||psi|| + ||psi'|| + ||psi''||) / ||f||`.
    pub h2_quotient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Fitted exponent of `||psi|| / ||f||` against `|lambda|`.
    pub slope: f64,
    /// Prefactor of that fit.
    pub constant: f64,
    /// Fitted exponent of the H2 quotient.
    pub h2_slope: f64,
    pub h2_constant: f64,
    pub samples: Vec<BoundSample>,
    /// Samples skipped because they fell on the spectrum.
    pub skipped: Vec<Complex64>,
}

/// Random smooth forcing with unit L2 norm: a Chebyshev series of low degree
/// with decaying random complex coefficients.
pub fn random_smooth_forcing(disc: &SpectralDiscretization, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Complex64> = (0..8)
        .map(|k| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (k as f64 + 1.0))
        .collect();
    let f: Vec<Complex64> = disc
        .nodes()
        .iter()
        .map(|&y| {
            let t = (1.0 - 2.0 * y).clamp(-1.0, 1.0).acos();
            coeffs.iter().enumerate().map(|(k, a)| a * (k as f64 * t).cos()).sum()
        })
        .collect();
    let norm = disc.l2_norm(&f);
    f.into_iter().map(|v| v / norm).collect()
}

/// Dense resolvent solves along `lambda_samples`, fitted as power laws in `|lambda|`.
pub fn verify_resolvent_bound(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    lambda_samples: &[Complex64],
    disc: &SpectralDiscretization,
    seed: u64,
) -> Result<BoundReport> {
    let pencil = orrsomm::assemble(profile, alpha, nu, disc)?;
    let f = random_smooth_forcing(disc, seed);
    let fnorm = disc.l2_norm(&f);
    let outcomes: Vec<(Complex64, Result<BoundSample>)> = lambda_samples
        .par_iter()
        .map(|&lambda| {
            let sample = orrsomm::solve_resolvent(&pencil, lambda, &f).map(|psi| {
                let d1 = disc.diff(1, &psi);
                let d2 = disc.diff(2, &psi);
                let q = disc.l2_norm(&psi) / fnorm;
                BoundSample {
                    lambda_re: lambda.re,
                    lambda_im: lambda.im,
                    lambda_abs: lambda.norm(),
                    quotient: q,
                    h2_quotient: q + (disc.l2_norm(&d1) + disc.l2_norm(&d2)) / fnorm,
                }
            });
            (lambda, sample)
        })
        .collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for (lambda, outcome) in outcomes {
        match outcome {
            Ok(s) => samples.push(s),
            Err(Error::ResolventAtEigenvalue { .. }) => {
                log::warn!("resolvent sample {lambda} lies on the spectrum, skipped");
                skipped.push(lambda);
            }
            Err(e) => return Err(e),
        }
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.lambda_abs).collect();
    let too_few = || Error::FitDomain {
        points: samples.len(),
        decades: decades(&xs),
    };
    let q = fit::loglog(&xs, &samples.iter().map(|s| s.quotient).collect::<Vec<_>>()).ok_or_else(too_few)?;
    let h = fit::loglog(&xs, &samples.iter().map(|s| s.h2_quotient).collect::<Vec<_>>()).ok_or_else(too_few)?;
    Ok(BoundReport {
        slope: q.slope,
        constant: q.constant(),
        h2_slope: h.slope,
        h2_constant: h.constant(),
        samples,
        skipped,
    })
}

pub(crate) fn decades(xs: &[f64]) -> f64 {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(0.0, f64::max);
    if lo > 0.0 && hi > lo {
        (hi / lo).log10()
    } else {
        0.0
    }
}

/// `samples` values of `i omega` log-spaced in `[lo, hi]`.
pub fn imaginary_axis_samples(lo: f64, hi: f64, samples: usize) -> Vec<Complex64> {
    let samples = samples.max(2);
    (0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            Complex64::new(0.0, lo * (hi / lo).powf(t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ga(lambda_abs: f64) -> GreenApprox {
        GreenApprox::from_lambda(2.0, Complex64::new(0.0, lambda_abs), 1e-4).unwrap()
    }

    #[test]
    fn roots_satisfy_identities() {
        let g = GreenApprox::new(2.0, Complex64::new(0.0, 10.0), 1e-4).unwrap();
        let (v1, v2) = g.vieta_defects();
        let (j1, j2) = g.jump_defects();
        assert!(v1 < 1e-12 && v2 < 1e-12, "{v1:e} {v2:e}");
        assert!(j1 < 1e-12 && j2 < 1e-12, "{j1:e} {j2:e}");
        assert!(g.mu_f.norm() >= g.mu_s.norm());
        assert!(g.mu_f.re >= 0.0 && g.mu_s.re >= 0.0);
    }

    #[test]
    fn zero_alpha_is_rejected() {
        assert!(matches!(
            characteristic_roots(0.0, Complex64::new(1.0, 0.0), 1e-3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_wave_speed_is_degenerate() {
        assert!(matches!(
            characteristic_roots(1.0, Complex64::new(0.0, 0.0), 1e-3),
            Err(Error::DegenerateRoots { .. })
        ));
    }

    #[test]
    fn third_derivative_jump() {
        let g = ga(1e3);
        let x = 0.37;
        let up = g.interior_derivative(Parity::Even, x, x, 3, Side::Above);
        let down = g.interior_derivative(Parity::Even, x, x, 3, Side::Below);
        let target = -1.0 / g.epsilon;
        assert!(((up - down) - target).norm() / target.norm() < 1e-9);
        for order in 0..3 {
            let up = g.interior_derivative(Parity::Even, x, x, order, Side::Above);
            let down = g.interior_derivative(Parity::Even, x, x, order, Side::Below);
            assert!((up - down).norm() < 1e-13 * up.norm().max(1.0));
        }
    }

    #[test]
    fn total_green_meets_wall_conditions() {
        for lam in [1e2, 1e3, 1e4] {
            let g = ga(lam);
            for parity in [Parity::Even, Parity::Odd] {
                for x in [0.01, 0.2, 0.5, 0.83] {
                    for wall in [0.0, 1.0] {
                        let v = g.total_derivative(parity, x, wall, 0, Side::Above).unwrap();
                        let d = g.total_derivative(parity, x, wall, 1, Side::Above).unwrap();
                        assert!(v.norm() + d.norm() < 1e-10, "{lam} {parity:?} {x} {wall}");
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_pair_gives_symmetric_field() {
        let g = ga(1e3);
        for y in [0.1, 0.3, 0.45] {
            let lo = g.total_derivative(Parity::Even, 0.27, y, 0, Side::Above).unwrap();
            let hi = g.total_derivative(Parity::Even, 0.27, 1.0 - y, 0, Side::Above).unwrap();
            assert!((lo - hi).norm() < 1e-12 * lo.norm().max(1e-300));
        }
    }

    #[test]
    fn convolution_solves_approximate_equation() {
        let disc = SpectralDiscretization::new(64).unwrap();
        let g = GreenApprox::new(2.0, Complex64::new(0.5, 3.0), 1e-2).unwrap();
        let conv = g.convolution_matrix(&disc).unwrap();
        let f = disc.sample(|y| Complex64::new((3.0 * y).sin(), y * y));
        let psi = linalg::matvec(&conv, &f);
        let d2 = disc.diff(2, &psi);
        let d4 = disc.diff(4, &psi);
        let a2 = g.alpha * g.alpha;
        let mut num: f64 = 0.0;
        for i in 2..disc.len() - 2 {
            let lhs = -g.epsilon * d4[i] - g.c_tilde * d2[i] + a2 * g.c * psi[i];
            num = num.max((lhs - f[i]).norm());
        }
        assert!(num < 1e-8, "residual {num:e}");
        let dpsi = disc.diff(1, &psi);
        let n = disc.n();
        assert!(psi[0].norm() + psi[n].norm() < 1e-14);
        assert!(dpsi[0].norm() + dpsi[n].norm() < 1e-9);
    }

    #[test]
    fn zero_forcing_needs_one_term() {
        let disc = SpectralDiscretization::new(32).unwrap();
        let f = vec![czero(); disc.len()];
        let (psi, it) = resolvent_via_iteration(
            &ShearProfile::poiseuille(),
            2.0,
            Complex64::new(-500.0, 0.0),
            1e-4,
            &f,
            &disc,
        )
        .unwrap();
        assert_eq!(it, 1);
        assert!(psi.iter().all(|v| *v == czero()));
    }
}
