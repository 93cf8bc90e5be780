//! Orr-Sommerfeld pencil in growth-rate form.
//!
//! For a normal mode `grad_perp(exp(i alpha x + lambda t) psi(y))` the
//! alpha-scaled Orr-Sommerfeld equation reads `A psi = lambda M psi` with
//!
//! ```text
//! A = alpha U (D^2 - alpha^2) - alpha U'' + i nu (D^2 - alpha^2)^2
//! M = i (D^2 - alpha^2)
//! ```
//!
//! and `lambda = -i alpha c`. `Re(lambda) > 0` is unstable throughout the
//! crate. Clamped walls are imposed by replacing the first and last two rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, czero, CMat, Lu};
use crate::profiles::ShearProfile;
use crate::specgrid::SpectralDiscretization;

/// Relative eigenvalue drift allowed between resolutions N and ceil(3N/2).
pub const SPURIOUS_DRIFT_TOL: f64 = 1e-6;
/// Largest admissible share of Chebyshev energy in the top third of modes.
pub const SPURIOUS_TAIL_TOL: f64 = 0.01;
pub const MAX_INVERSE_ITERATIONS: usize = 50;
/// Iteration cap for the fine-grid confirmation of a candidate eigenvalue.
pub const CONFIRM_ITERATIONS: usize = 8;
/// Scaled residual at which Rayleigh-quotient iteration stops.
pub const CONVERGED_RESIDUAL: f64 = 1e-14;
/// Pivot ratio below which a shifted pencil is treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-17;

#[derive(Debug, Clone)]
pub struct OrrSommerfeldPencil<'d> {
    pub alpha: f64,
    pub nu: f64,
    /// Row-equilibrated `A` (every row has unit max-norm).
    a: CMat,
    /// `M` with the same row scaling as `a`.
    m: CMat,
    /// `row_scale[i]` multiplies row `i` of the operator form.
    row_scale: Vec<f64>,
    disc: &'d SpectralDiscretization,
}

/// One (right) eigenpair of the pencil.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub alpha: f64,
    pub nu: f64,
    pub lambda: Complex64,
    /// Wave speed, `lambda = -i alpha c` (undefined at alpha = 0, stored as NaN).
    pub c: Complex64,
    /// Stream function on the collocation nodes: max |psi| = 1, real positive
    /// at the max-modulus node.
    pub psi: Vec<Complex64>,
    /// `||A psi - lambda M psi||_2 / (||A||_F ||psi||_2)`.
    pub residual: f64,
    /// Distance to the nearest other finite eigenvalue of the same pencil.
    pub gap: f64,
}

impl EigenPair {
    pub fn growth_rate(&self) -> f64 {
        self.lambda.re
    }

    /// `max(|psi(0)|, |psi'(0)|, |psi(1)|, |psi'(1)|)`.
    pub fn wall_defect(&self, disc: &SpectralDiscretization) -> f64 {
        let dpsi = disc.diff(1, &self.psi);
        let n = self.psi.len() - 1;
        [self.psi[0], self.psi[n], dpsi[0], dpsi[n]]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

pub fn wave_speed(alpha: f64, lambda: Complex64) -> Complex64 {
    if alpha == 0.0 {
        Complex64::new(f64::NAN, f64::NAN)
    } else {
        // lambda = -i alpha c  =>  c = i lambda / alpha
        Complex64::i() * lambda / alpha
    }
}

/// Normalizes to max |psi| = 1 with the max-modulus entry real positive.
pub fn normalize(psi: &mut [Complex64]) {
    let mut k = 0;
    let mut best = -1.0;
    for (i, v) in psi.iter().enumerate() {
        let m = v.norm();
        if m > best {
            best = m;
            k = i;
        }
    }
    if best > 0.0 {
        let s = psi[k];
        for v in psi.iter_mut() {
            *v /= s;
        }
        psi[k] = Complex64::new(1.0, 0.0);
    }
}

/// Builds the pencil for `(alpha, nu)` on the given discretization.
pub fn assemble<'d>(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    disc: &'d SpectralDiscretization,
) -> Result<OrrSommerfeldPencil<'d>> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Precondition(format!("viscosity must be positive, got {nu}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Precondition(format!("alpha must be finite, got {alpha}")));
    }
    let n = disc.len();
    let (u, upp) = profile.sample(disc.nodes());
    let d1 = disc.d1();
    let d2 = disc.d2();
    let d4 = disc.d4();
    let a2 = alpha * alpha;
    let iu = Complex64::i();

    let mut a = CMat::zeros(n, n);
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let lap = d2[(i, j)] - a2 * delta;
            let bilap = d4[(i, j)] - 2.0 * a2 * d2[(i, j)] + a2 * a2 * delta;
            a[(i, j)] = Complex64::new(alpha * u[i] * lap - alpha * upp[i] * delta, nu * bilap);
            m[(i, j)] = iu * lap;
        }
    }

    for j in 0..n {
        for &r in &[0, 1, n - 2, n - 1] {
            a[(r, j)] = czero();
            m[(r, j)] = czero();
        }
        a[(1, j)] = Complex64::new(d1[(0, j)], 0.0);
        a[(n - 2, j)] = Complex64::new(d1[(n - 1, j)], 0.0);
    }
    a[(0, 0)] = Complex64::new(1.0, 0.0);
    a[(n - 1, n - 1)] = Complex64::new(1.0, 0.0);

    // Row equilibration. The fourth-derivative rows near the walls are many
    // orders of magnitude larger than those at mid-channel; without scaling,
    // normwise backward errors swamp the mid-channel rows.
    let row_scale: Vec<f64> = (0..n)
        .map(|i| {
            let mx = (0..n).map(|j| a[(i, j)].norm()).fold(0.0, f64::max);
            if mx > 0.0 {
                1.0 / mx
            } else {
                1.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= row_scale[i];
            m[(i, j)] *= row_scale[i];
        }
    }

    Ok(OrrSommerfeldPencil {
        alpha,
        nu,
        a,
        m,
        row_scale,
        disc,
    })
}

impl<'d> OrrSommerfeldPencil<'d> {
    /// Row-equilibrated `A`; row `i` equals `row_scale[i]` times the operator row.
    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn m(&self) -> &CMat {
        &self.m
    }

    pub fn row_scale(&self) -> &[f64] {
        &self.row_scale
    }

    /// `A` in operator form (rows unscaled).
    pub fn operator_a(&self) -> CMat {
        CMat::from_fn(self.size(), self.size(), |i, j| self.a[(i, j)] / self.row_scale[i])
    }

    pub fn operator_m(&self) -> CMat {
        CMat::from_fn(self.size(), self.size(), |i, j| self.m[(i, j)] / self.row_scale[i])
    }

    /// Maps an operator-form right-hand side to the equilibrated rows.
    pub fn scale_rhs(&self, f: &[Complex64]) -> Vec<Complex64> {
        f.iter().zip(&self.row_scale).map(|(v, s)| v * *s).collect()
    }

    pub fn disc(&self) -> &'d SpectralDiscretization {
        self.disc
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// `epsilon = nu / (i alpha)`, the coefficient with which the operator
    /// divided by `alpha` reads `-epsilon psi'''' - (c - 2 epsilon alpha^2) psi'' + ...`.
    pub fn epsilon(&self) -> Option<Complex64> {
        (self.alpha != 0.0).then(|| Complex64::new(0.0, -self.nu / self.alpha))
    }

    /// Exact derivative of `A` with respect to `nu` (boundary rows vanish),
    /// with the same row scaling as [`Self::a`].
    pub fn d_nu(&self) -> CMat {
        let n = self.size();
        let a2 = self.alpha * self.alpha;
        let d2 = self.disc.d2();
        let d4 = self.disc.d4();
        CMat::from_fn(n, n, |i, j| {
            if i < 2 || i >= n - 2 {
                return czero();
            }
            let delta = if i == j { 1.0 } else { 0.0 };
            Complex64::new(0.0, d4[(i, j)] - 2.0 * a2 * d2[(i, j)] + a2 * a2 * delta)
                * self.row_scale[i]
        })
    }

    pub fn boundary_rows(&self) -> [usize; 4] {
        let n = self.size();
        [0, 1, n - 2, n - 1]
    }

    /// `||A psi - lambda M psi|| / (||A||_F ||psi||)`.
    pub fn residual(&self, lambda: Complex64, psi: &[Complex64]) -> f64 {
        let ap = linalg::matvec(&self.a, psi);
        let mp = linalg::matvec(&self.m, psi);
        let r: Vec<Complex64> = ap.iter().zip(&mp).map(|(a, m)| a - lambda * m).collect();
        linalg::norm2(&r) / (linalg::frobenius(&self.a) * linalg::norm2(psi))
    }

    /// Operator-form rows with the wall rows lifted to the interior magnitude.
    /// QZ converges reliably on this form, while full row equilibration makes
    /// it stall at large N.
    fn qz_form(&self) -> (CMat, CMat) {
        let n = self.size();
        let interior = (2..n - 2).map(|i| 1.0 / self.row_scale[i]).fold(0.0, f64::max);
        let factor = |i: usize| {
            if i < 2 || i >= n - 2 {
                interior
            } else {
                1.0 / self.row_scale[i]
            }
        };
        (
            CMat::from_fn(n, n, |i, j| self.a[(i, j)] * factor(i)),
            CMat::from_fn(n, n, |i, j| self.m[(i, j)] * factor(i)),
        )
    }

    /// All finite generalized eigenvalues with eigenvectors, unfiltered.
    pub fn raw_spectrum(&self) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
        let (a, m) = self.qz_form();
        let ge = linalg::generalized_eigen(&a, &m)?;
        let n = self.size();
        let scale_a = linalg::frobenius(&a);
        let scale_m = linalg::frobenius(&m);
        let mut out = Vec::new();
        for k in 0..n {
            let (al, be) = (ge.alpha[k], ge.beta[k]);
            // infinite eigenvalues from the zeroed boundary rows of M
            if be.norm() * scale_a <= 1e-12 * al.norm() * scale_m || be.norm() == 0.0 {
                continue;
            }
            let lambda = al / be;
            if !lambda.re.is_finite() || !lambda.im.is_finite() {
                continue;
            }
            let mut v: Vec<Complex64> = (0..n).map(|i| ge.vectors[(i, k)]).collect();
            normalize(&mut v);
            out.push((lambda, v));
        }
        Ok(out)
    }

    /// Rayleigh-quotient iteration from `(lambda0, psi0)`.
    pub fn refine(&self, lambda0: Complex64, psi0: &[Complex64]) -> Result<(Complex64, Vec<Complex64>, usize)> {
        self.refine_limited(lambda0, psi0, MAX_INVERSE_ITERATIONS)
    }

    fn refine_limited(
        &self,
        lambda0: Complex64,
        psi0: &[Complex64],
        max_iterations: usize,
    ) -> Result<(Complex64, Vec<Complex64>, usize)> {
        let mut lambda = lambda0;
        let mut psi = psi0.to_vec();
        normalize(&mut psi);
        let mut res = self.residual(lambda, &psi);
        for it in 1..=max_iterations {
            let shift = nudge(lambda);
            let lu = Lu::new(&linalg::shifted(&self.a, &self.m, shift));
            let rhs = linalg::matvec(&self.m, &psi);
            let mut w = lu.solve(&rhs);
            if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Continuation {
                    iterations: it,
                    residual: res,
                });
            }
            normalize(&mut w);
            let ap = linalg::matvec(&self.a, &w);
            let mp = linalg::matvec(&self.m, &w);
            let mm = linalg::dot(&mp, &mp);
            if mm.norm() == 0.0 {
                return Err(Error::Continuation {
                    iterations: it,
                    residual: res,
                });
            }
            lambda = linalg::dot(&mp, &ap) / mm;
            psi = w;
            res = self.residual(lambda, &psi);
            if res < CONVERGED_RESIDUAL {
                // one more sweep at the converged shift pins the vector
                let lu = Lu::new(&linalg::shifted(&self.a, &self.m, nudge(lambda)));
                let mut w = lu.solve(&linalg::matvec(&self.m, &psi));
                normalize(&mut w);
                let ap = linalg::matvec(&self.a, &w);
                let mp = linalg::matvec(&self.m, &w);
                lambda = linalg::dot(&mp, &ap) / linalg::dot(&mp, &mp);
                return Ok((lambda, w, it));
            }
        }
        Err(Error::Continuation {
            iterations: max_iterations,
            residual: res,
        })
    }

    fn pair(&self, lambda: Complex64, psi: Vec<Complex64>, gap: f64) -> EigenPair {
        let residual = self.residual(lambda, &psi);
        EigenPair {
            alpha: self.alpha,
            nu: self.nu,
            lambda,
            c: wave_speed(self.alpha, lambda),
            psi,
            residual,
            gap,
        }
    }
}

/// Tiny relative perturbation keeping the shifted pencil numerically nonsingular.
fn nudge(lambda: Complex64) -> Complex64 {
    lambda + Complex64::new(1e-13, 1e-13) * lambda.norm().max(1.0)
}

/// Filtered spectrum, sorted by decreasing `Re(lambda)`.
///
/// An eigenvalue is retained when its eigenvector keeps less than 1% of its
/// Chebyshev energy in the top third of coefficients and, after refinement,
/// it reappears within a relative `1e-6` at resolution `ceil(3N/2)` (the
/// interpolated eigenvector seeds Rayleigh-quotient iteration on the fine grid).
pub fn eigen_spectrum(pencil: &OrrSommerfeldPencil<'_>) -> Result<Vec<EigenPair>> {
    eigen_spectrum_with(pencil, None)
}

/// Spurious-mode filter state: the fine pencil and the interpolation onto its grid.
struct Filter<'a, 'd> {
    pencil: &'a OrrSommerfeldPencil<'d>,
    fine_disc: SpectralDiscretization,
    profile: &'a ShearProfile,
    raw: Vec<(Complex64, Vec<Complex64>)>,
}

impl<'a, 'd> Filter<'a, 'd> {
    fn new(pencil: &'a OrrSommerfeldPencil<'d>, profile: Option<&'a ShearProfile>) -> Result<Self> {
        let profile = profile.ok_or_else(|| {
            Error::Precondition("the spurious-mode filter needs the profile to refine the grid".into())
        })?;
        let fine_disc = SpectralDiscretization::new((3 * pencil.disc().n()).div_ceil(2))?;
        let raw = pencil.raw_spectrum()?;
        Ok(Self {
            pencil,
            fine_disc,
            profile,
            raw,
        })
    }

    /// Indices of raw eigenvalues passing the tail test, by decreasing real part.
    fn candidates(&self) -> Vec<usize> {
        let disc = self.pencil.disc();
        let mut idx: Vec<usize> = (0..self.raw.len())
            .filter(|&k| disc.tail_energy_fraction(&self.raw[k].1) < SPURIOUS_TAIL_TOL)
            .collect();
        idx.sort_by(|&i, &j| self.raw[j].0.re.total_cmp(&self.raw[i].0.re));
        idx
    }

    fn gap(&self, idx: usize) -> f64 {
        let lambda0 = self.raw[idx].0;
        self.raw
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, (o, _))| (o - lambda0).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn accept(&self, fine: &OrrSommerfeldPencil<'_>, interp: &CMat, idx: usize) -> Option<EigenPair> {
        let disc = self.pencil.disc();
        let (lambda0, psi0) = &self.raw[idx];
        let (lambda, psi, _) = self.pencil.refine(*lambda0, psi0).ok()?;
        if disc.tail_energy_fraction(&psi) >= SPURIOUS_TAIL_TOL {
            return None;
        }
        let start = linalg::matvec(interp, &psi);
        let (lambda_fine, _, _) = fine.refine_limited(lambda, &start, CONFIRM_ITERATIONS).ok()?;
        if (lambda_fine - lambda).norm() >= SPURIOUS_DRIFT_TOL * lambda.norm().max(1.0) {
            return None;
        }
        Some(self.pencil.pair(lambda, psi, self.gap(idx)))
    }

    fn interpolation(&self) -> CMat {
        let disc = self.pencil.disc();
        CMat::from_fn(self.fine_disc.len(), disc.len(), |i, j| {
            Complex64::new(disc.interpolation_row(self.fine_disc.nodes()[i])[j], 0.0)
        })
    }

    fn all(&self) -> Result<Vec<EigenPair>> {
        let fine = assemble(self.profile, self.pencil.alpha, self.pencil.nu, &self.fine_disc)?;
        let interp = self.interpolation();
        let mut kept: Vec<EigenPair> = self
            .candidates()
            .into_par_iter()
            .filter_map(|idx| self.accept(&fine, &interp, idx))
            .collect();
        kept.sort_by(|a, b| b.lambda.re.total_cmp(&a.lambda.re));
        Ok(kept)
    }

    /// Accepted pair with the largest real part, examining candidates lazily.
    fn leading(&self) -> Result<Option<EigenPair>> {
        let fine = assemble(self.profile, self.pencil.alpha, self.pencil.nu, &self.fine_disc)?;
        let interp = self.interpolation();
        let mut best: Option<EigenPair> = None;
        for idx in self.candidates() {
            if let Some(b) = &best {
                // refinement moves eigenvalues far less than this margin
                if self.raw[idx].0.re < b.lambda.re - 1e-6 * b.lambda.norm().max(1.0) {
                    break;
                }
            }
            if let Some(p) = self.accept(&fine, &interp, idx) {
                if best.as_ref().is_none_or(|b| p.lambda.re > b.lambda.re) {
                    best = Some(p);
                }
            }
        }
        Ok(best)
    }
}

/// Same as [`eigen_spectrum`], with the profile used to assemble the fine pencil.
pub fn eigen_spectrum_with(
    pencil: &OrrSommerfeldPencil<'_>,
    profile: Option<&ShearProfile>,
) -> Result<Vec<EigenPair>> {
    Filter::new(pencil, profile)?.all()
}

/// Dense solve for all filtered eigenpairs at `(alpha, nu)`.
pub fn spectrum(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    disc: &SpectralDiscretization,
) -> Result<Vec<EigenPair>> {
    let pencil = assemble(profile, alpha, nu, disc)?;
    eigen_spectrum_with(&pencil, Some(profile))
}

/// The least stable eigenpair. With a guess, Rayleigh-quotient iteration from
/// the guess (continuation); otherwise the top of the filtered dense spectrum.
pub fn leading_eigen(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    disc: &SpectralDiscretization,
    guess: Option<&EigenPair>,
) -> Result<EigenPair> {
    let pencil = assemble(profile, alpha, nu, disc)?;
    match guess {
        Some(g) => {
            if g.psi.len() != disc.len() {
                return Err(Error::Shape {
                    expected: disc.len(),
                    got: g.psi.len(),
                });
            }
            let (lambda, psi, _) = pencil.refine(g.lambda, &g.psi)?;
            // the neighbour distance can shrink by at most the two displacements
            let gap = (g.gap - 2.0 * (lambda - g.lambda).norm()).max(0.0);
            Ok(pencil.pair(lambda, psi, gap))
        }
        None => {
            let best = Filter::new(&pencil, Some(profile))?.leading()?;
            best.ok_or_else(|| Error::Eigensolver {
                msg: "no eigenvalue survived the spurious-mode filter".into(),
                size: pencil.size(),
                norm_a: linalg::frobenius(&pencil.a),
                norm_m: linalg::frobenius(&pencil.m),
            })
        }
    }
}

/// Solves `(A - lambda M) psi = f` with homogeneous wall conditions; the
/// boundary entries of `f` are ignored.
pub fn solve_resolvent(
    pencil: &OrrSommerfeldPencil<'_>,
    lambda: Complex64,
    f: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = pencil.size();
    if f.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: f.len(),
        });
    }
    let op = linalg::shifted(&pencil.a, &pencil.m, lambda);
    let lu = Lu::new(&op);
    let mut rhs = pencil.scale_rhs(f);
    for r in pencil.boundary_rows() {
        rhs[r] = czero();
    }
    let psi = lu.solve(&rhs);
    let finite = psi.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    if lu.pivot_ratio < SINGULAR_PIVOT_RATIO || !finite {
        return Err(Error::ResolventAtEigenvalue {
            re: lambda.re,
            im: lambda.im,
            pivot_ratio: lu.pivot_ratio,
        });
    }
    // one step of iterative refinement
    let r: Vec<Complex64> = linalg::matvec(&op, &psi)
        .iter()
        .zip(&rhs)
        .map(|(a, b)| b - a)
        .collect();
    let corr = lu.solve(&r);
    Ok(psi.iter().zip(&corr).map(|(a, b)| a + b).collect())
}

/// Relative residual of a resolvent solve, `||(A - lambda M) psi - f|| / ||f||`
/// measured on interior rows.
pub fn resolvent_residual(
    pencil: &OrrSommerfeldPencil<'_>,
    lambda: Complex64,
    psi: &[Complex64],
    f: &[Complex64],
) -> f64 {
    let op = linalg::shifted(&pencil.operator_a(), &pencil.operator_m(), lambda);
    let lhs = linalg::matvec(&op, psi);
    let n = pencil.size();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 2..n - 2 {
        num += (lhs[i] - f[i]).norm_sqr();
        den += f[i].norm_sqr();
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
