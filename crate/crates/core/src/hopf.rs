//! Normal-form coefficients at a neutral point: the linear coefficient `c1`
//! from the adjoint (cross-checked by finite differences) and the Landau
//! coefficient `c3` from the second-harmonic and mean-flow corrections.
//!
//! Disturbances are stream functions `Phi` with velocity `(Phi_y, -Phi_x)`.
//! Written for one Fourier mode `e^{ikx}` the perturbation equation reads
//! `M_k psi_t = A_k psi - i N_k`, where `N_k` is the `e^{ikx}` component of the
//! Jacobian `N(f, g) = f_y (Delta g)_x - f_x (Delta g)_y`. The expansion is
//! `Phi = A e^{iax} psi1 + |A|^2 phi0 + A^2 e^{2iax} psi2 + c.c. + ...` with
//! `dA/dt = lambda A + c3 A |A|^2`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Lu};
use crate::neutral::NeutralPoint;
use crate::orrsomm::{self, EigenPair, OrrSommerfeldPencil};
use crate::profiles::ShearProfile;
use crate::specgrid::SpectralDiscretization;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const ADJOINT_RESIDUAL_TOL: f64 = 1e-10;
/// Above this `||psi_adj|| ||M psi1|| / |<psi_adj, M psi1>|` the eigenvalue is
/// treated as defective.
pub const MAX_NORMALIZATION_CONDITION: f64 = 1e12;
pub const RESONANCE_CONDITION: f64 = 1e12;
/// Relative disagreement between adjoint and finite-difference `c1` that
/// aborts the computation.
pub const C1_INCONSISTENCY: f64 = 1e-2;
/// Relative steps in `nu` for the centered differences.
pub const FD_STEPS: [f64; 2] = [1e-3, 5e-4];
const ADJOINT_ITERATIONS: usize = 8;
/// Largest allowed `|lambda - neutral.lambda|` when re-solving for the critical mode.
const MODE_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanFlowGauge {
    /// Mean pressure gradient held fixed; the flux may change.
    #[default]
    Pressure,
    /// Flux held fixed; the mean pressure gradient may change.
    Flux,
}

impl FromStr for MeanFlowGauge {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pressure" => Ok(Self::Pressure),
            "flux" => Ok(Self::Flux),
            other => Err(Error::Config(format!("unknown gauge `{other}` (expected pressure or flux)"))),
        }
    }
}

impl fmt::Display for MeanFlowGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pressure => "pressure",
            Self::Flux => "flux",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Supercritical,
    Subcritical,
    Degenerate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Supercritical => "supercritical",
            Self::Subcritical => "subcritical",
            Self::Degenerate => "degenerate",
        })
    }
}

/// Left eigenvector in operator-row form, normalized so `psi^H M psi1 = 1`.
#[derive(Debug, Clone)]
pub struct Adjoint {
    pub psi: Vec<Complex64>,
    /// The same left eigenvector before normalization; independent of `psi1`.
    pub raw: Vec<Complex64>,
    /// `||(A - lambda M)^H y|| / (||A||_F ||y||)` on the equilibrated pencil.
    pub residual: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct C1Estimate {
    pub c1: Complex64,
    /// Richardson extrapolation of the two centered differences.
    pub c1_fd: Complex64,
    /// `|D(h) - D(h/2)| / |c1|`, the spread of the raw differences.
    pub fd_spread: f64,
}

#[derive(Debug, Clone)]
pub struct SecondHarmonic {
    pub psi: Vec<Complex64>,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Debug, Clone)]
pub struct MeanFlow {
    pub phi0: Vec<f64>,
    /// Mean velocity correction `phi0'`.
    pub u0: Vec<f64>,
    /// `phi0'''`.
    pub d3: Vec<f64>,
    /// Perturbation of the mean pressure gradient, `nu phi0''' - <uv>'`.
    pub pressure_gradient: f64,
    /// `nu phi0'''' = forcing`.
    pub forcing: Vec<f64>,
    /// Largest `|Im F0| / max |F0|` before the real part was taken.
    pub forcing_imag: f64,
    /// The x-averaged product `<u v>` per `|A|^2`.
    pub reynolds_stress: Vec<f64>,
}

/// Everything entering `c3` on one grid.
#[derive(Debug, Clone)]
pub struct CubicTerms {
    pub c3: Complex64,
    pub lambda: Complex64,
    pub psi1: Vec<Complex64>,
    pub adjoint: Adjoint,
    pub second: SecondHarmonic,
    pub mean: MeanFlow,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfCoefficients {
    pub neutral: NeutralPoint,
    pub n: usize,
    pub gauge: MeanFlowGauge,
    pub nodes: Vec<f64>,
    pub psi1: Vec<Complex64>,
    pub psi_adj: Vec<Complex64>,
    pub adjoint_condition: f64,
    pub c1: Complex64,
    pub c1_fd: Complex64,
    pub psi2: Vec<Complex64>,
    pub phi0: Vec<f64>,
    pub c3: Complex64,
    /// `c3` recomputed on `ceil(3N/2)` nodes, in the same amplitude gauge.
    pub c3_fine: Complex64,
    pub c3_error_bar: f64,
    pub classification: Classification,
}

impl HopfCoefficients {
    pub fn omega_plus(&self) -> f64 {
        self.neutral.omega_plus
    }

    pub fn alpha_plus(&self) -> f64 {
        self.neutral.alpha_plus
    }

    /// `(omega, c1, c3)` multiplied by `alpha_plus`, the convention in which
    /// the operator is scaled by the wavenumber.
    pub fn scaled_by_alpha(&self) -> (f64, Complex64, Complex64) {
        let a = self.alpha_plus();
        (self.omega_plus() * a, self.c1 * a, self.c3 * a)
    }
}

fn checked_shape(expected: usize, v: &[Complex64]) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Shape {
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

fn unscale(pencil: &OrrSommerfeldPencil<'_>, v: &[Complex64]) -> Vec<Complex64> {
    v.iter().zip(pencil.row_scale()).map(|(x, s)| x / *s).collect()
}

/// Left eigenvector of the pencil at the simple eigenvalue `lambda` with
/// right eigenvector `psi1`.
pub fn adjoint_eigen(pencil: &OrrSommerfeldPencil<'_>, lambda: Complex64, psi1: &[Complex64]) -> Result<Adjoint> {
    let n = pencil.size();
    checked_shape(n, psi1)?;
    let a = pencil.a();
    let m = pencil.m();
    let norm_a = linalg::frobenius(a);
    let sigma = lambda + Complex64::new(1e-10 * lambda.norm().max(1.0), 0.0);
    let lu = Lu::new(&linalg::shifted(a, m, sigma));
    let mh = m.adjoint().to_owned();
    let op_h = linalg::shifted(a, m, lambda).adjoint().to_owned();

    let mut y: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0, 0.1 * ((i % 5) as f64)))
        .collect();
    let mut residual = f64::INFINITY;
    for _ in 0..ADJOINT_ITERATIONS {
        let rhs = linalg::matvec(&mh, &y);
        y = lu.solve_adjoint(&rhs);
        let ny = linalg::norm2(&y);
        if !ny.is_finite() || ny == 0.0 {
            return Err(Error::AdjointDegenerate("inverse iteration broke down".into()));
        }
        linalg::scale(&mut y, Complex64::new(1.0 / ny, 0.0));
        residual = linalg::norm2(&linalg::matvec(&op_h, &y)) / norm_a;
        if residual < 1e-3 * ADJOINT_RESIDUAL_TOL {
            break;
        }
    }
    if residual > ADJOINT_RESIDUAL_TOL {
        return Err(Error::AdjointDegenerate(format!(
            "left eigenvector residual {residual:.3e} above {ADJOINT_RESIDUAL_TOL:.0e}"
        )));
    }

    // operator form: y_op^H A_op = y^H A
    let raw: Vec<Complex64> = y.iter().zip(pencil.row_scale()).map(|(v, s)| v * *s).collect();
    let mut psi = raw.clone();
    let m_psi1 = linalg::matvec(&pencil.operator_m(), psi1);
    let pairing = linalg::dot(&psi, &m_psi1);
    let condition = linalg::norm2(&psi) * linalg::norm2(&m_psi1) / pairing.norm();
    if !(condition < MAX_NORMALIZATION_CONDITION) {
        return Err(Error::AdjointDegenerate(format!(
            "normalization condition {condition:.3e}; the eigenvalue is not simple"
        )));
    }
    let s = pairing.conj();
    for v in psi.iter_mut() {
        *v /= s;
    }
    Ok(Adjoint {
        psi,
        raw,
        residual,
        condition,
    })
}

/// `c1 = <psi_adj, (dA/dnu) psi1> / <psi_adj, M psi1>`.
pub fn c1_adjoint(pencil: &OrrSommerfeldPencil<'_>, lambda: Complex64, psi1: &[Complex64]) -> Result<Complex64> {
    let adj = adjoint_eigen(pencil, lambda, psi1)?;
    Ok(c1_with(pencil, &adj, psi1))
}

/// The operators act on the adjoint, so `psi1` enters only through two inner
/// products and the quotient is invariant under rephasing to rounding.
fn c1_with(pencil: &OrrSommerfeldPencil<'_>, adj: &Adjoint, psi1: &[Complex64]) -> Complex64 {
    let w_nu = linalg::matvec(&pencil.d_nu().adjoint().to_owned(), &unscale(pencil, &adj.raw));
    let w_m = linalg::matvec(&pencil.operator_m().adjoint().to_owned(), &adj.raw);
    linalg::dot(&w_nu, psi1) / linalg::dot(&w_m, psi1)
}

/// The critical eigenpair at `(alpha_plus, nu)`, checked against the
/// eigenvalue stored in the neutral point.
pub fn critical_mode(profile: &ShearProfile, neutral: &NeutralPoint, disc: &SpectralDiscretization) -> Result<EigenPair> {
    let pair = orrsomm::leading_eigen(profile, neutral.alpha_plus, neutral.nu, disc, None)?;
    let drift = (pair.lambda - neutral.lambda).norm();
    if drift > MODE_MATCH_TOL * neutral.lambda.norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "leading eigenvalue {} at the neutral point differs from the recorded {} by {drift:.3e}",
            pair.lambda, neutral.lambda
        )));
    }
    Ok(pair)
}

/// Adjoint `c1` and its Richardson-extrapolated finite-difference check.
pub fn compute_c1(profile: &ShearProfile, neutral: &NeutralPoint, disc: &SpectralDiscretization) -> Result<C1Estimate> {
    let pair = critical_mode(profile, neutral, disc)?;
    let pencil = orrsomm::assemble(profile, neutral.alpha_plus, neutral.nu, disc)?;
    let c1 = c1_adjoint(&pencil, pair.lambda, &pair.psi)?;
    c1_cross_check(profile, neutral, disc, &pair, c1)
}

fn c1_cross_check(
    profile: &ShearProfile,
    neutral: &NeutralPoint,
    disc: &SpectralDiscretization,
    pair: &EigenPair,
    c1: Complex64,
) -> Result<C1Estimate> {
    let alpha = neutral.alpha_plus;
    let nu = neutral.nu;
    let diff = |rel: f64| -> Result<Complex64> {
        let h = rel * nu;
        let up = orrsomm::leading_eigen(profile, alpha, nu + h, disc, Some(pair))?;
        let down = orrsomm::leading_eigen(profile, alpha, nu - h, disc, Some(pair))?;
        Ok((up.lambda - down.lambda) / (2.0 * h))
    };
    let d_h = diff(FD_STEPS[0])?;
    let d_half = diff(FD_STEPS[1])?;
    // centered differences err like h^2; the steps differ by a factor two
    let c1_fd = (4.0 * d_half - d_h) / 3.0;
    let scale = c1.norm();
    let rel = (c1 - c1_fd).norm() / scale;
    if !(rel <= C1_INCONSISTENCY) {
        return Err(Error::Inconsistency {
            adjoint: c1.to_string(),
            fd: c1_fd.to_string(),
            rel,
        });
    }
    Ok(C1Estimate {
        c1,
        c1_fd,
        fd_spread: (d_h - d_half).norm() / scale,
    })
}

/// `L_k f = f'' - k^2 f` together with its first derivative.
fn laplacian(disc: &SpectralDiscretization, k: f64, f: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let d2 = disc.diff(2, f);
    let lf: Vec<Complex64> = d2.iter().zip(f).map(|(a, b)| a - k * k * b).collect();
    let dlf = disc.diff(1, &lf);
    (lf, dlf)
}

/// `e^{2iax}` component of `N(Phi, Phi)` per `A^2`.
fn self_interaction(disc: &SpectralDiscretization, alpha: f64, psi1: &[Complex64]) -> Vec<Complex64> {
    let ia = Complex64::new(0.0, alpha);
    let d1 = disc.diff(1, psi1);
    let (l, dl) = laplacian(disc, alpha, psi1);
    (0..psi1.len())
        .map(|j| ia * (d1[j] * l[j] - psi1[j] * dl[j]))
        .collect()
}

/// Second harmonic: `(A_{2a} - 2 lambda M_{2a}) psi2 = i N_2` with clamped walls.
pub fn second_harmonic_solve(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    lambda: Complex64,
    psi1: &[Complex64],
    disc: &SpectralDiscretization,
) -> Result<SecondHarmonic> {
    checked_shape(disc.len(), psi1)?;
    let pencil = orrsomm::assemble(profile, 2.0 * alpha, nu, disc)?;
    let shift = 2.0 * lambda;
    let mut f: Vec<Complex64> = self_interaction(disc, alpha, psi1)
        .into_iter()
        .map(|v| Complex64::i() * v)
        .collect();
    for r in pencil.boundary_rows() {
        f[r] = linalg::czero();
    }
    let op = linalg::shifted(pencil.a(), pencil.m(), shift);
    let lu = Lu::new(&op);
    let condition = linalg::condition_estimate(&op, &lu);
    if !(condition < RESONANCE_CONDITION) {
        return Err(Error::Resonance { cond: condition });
    }
    let rhs = pencil.scale_rhs(&f);
    let psi = refined_solve(&op, &lu, &rhs);
    let residual = orrsomm::resolvent_residual(&pencil, shift, &psi, &f);
    Ok(SecondHarmonic {
        psi,
        residual,
        condition,
    })
}

fn refined_solve(op: &CMat, lu: &Lu, rhs: &[Complex64]) -> Vec<Complex64> {
    let x = lu.solve(rhs);
    let r: Vec<Complex64> = linalg::matvec(op, &x).iter().zip(rhs).map(|(a, b)| b - a).collect();
    let dx = lu.solve(&r);
    x.iter().zip(&dx).map(|(a, b)| a + b).collect()
}

/// `<u v>` per `|A|^2` for the mode `psi1 e^{iax}`.
pub fn reynolds_stress(disc: &SpectralDiscretization, alpha: f64, psi1: &[Complex64]) -> Vec<f64> {
    let d1 = disc.diff(1, psi1);
    (0..psi1.len())
        .map(|j| {
            let z = d1[j] * psi1[j].conj();
            // i a (z - conj z) = -2 a Im z
            -2.0 * alpha * z.im
        })
        .collect()
}

/// Mean-flow correction `nu phi0'''' = F0`, `F0` the zero-wavenumber part of
/// `N(Phi, Phi)` per `|A|^2`. Since `F0 = <uv>''`, the mean velocity
/// `u0 = phi0'` obeys `nu u0' = <uv> + a + b y` with `b` the perturbation of
/// the mean pressure gradient, and is obtained by spectral integration.
/// Both gauges fix `phi0(0) = u0(0) = u0(1) = 0`; the pressure gauge sets
/// `b = 0`, the flux gauge `phi0(1) = 0`.
pub fn mean_flow_solve(
    alpha: f64,
    nu: f64,
    psi1: &[Complex64],
    disc: &SpectralDiscretization,
    gauge: MeanFlowGauge,
) -> Result<MeanFlow> {
    let n = disc.len();
    checked_shape(n, psi1)?;
    if !(nu > 0.0) {
        return Err(Error::Precondition(format!("viscosity must be positive, got {nu}")));
    }
    let ia = Complex64::new(0.0, alpha);
    let d1 = disc.diff(1, psi1);
    let (l, dl) = laplacian(disc, alpha, psi1);
    // N(e^{iax} psi1, e^{-iax} conj psi1) + N(e^{-iax} conj psi1, e^{iax} psi1)
    let raw: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = -ia * d1[j] * l[j].conj() - ia * psi1[j] * dl[j].conj();
            t + t.conj()
        })
        .collect();
    let fmax = raw.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut forcing_imag = raw.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if fmax > 0.0 {
        forcing_imag /= fmax;
    }
    let forcing: Vec<f64> = raw.iter().map(|v| v.re).collect();

    let stress = reynolds_stress(disc, alpha, psi1);
    let s_int = disc.cumulative_integral(&stress);
    let s1 = s_int[n - 1];
    let (a, b) = match gauge {
        MeanFlowGauge::Pressure => (-s1, 0.0),
        MeanFlowGauge::Flux => {
            let i1 = disc.integrate(&s_int);
            let b = 6.0 * (2.0 * i1 - s1);
            (-s1 - 0.5 * b, b)
        }
    };
    let y = disc.nodes();
    let u0: Vec<f64> = (0..n)
        .map(|j| (s_int[j] + a * y[j] + 0.5 * b * y[j] * y[j]) / nu)
        .collect();
    let phi0 = disc.cumulative_integral(&u0);
    let dstress = disc.diff_real(1, &stress);
    let d3: Vec<f64> = dstress.iter().map(|v| (v + b) / nu).collect();
    Ok(MeanFlow {
        phi0,
        u0,
        d3,
        pressure_gradient: b,
        forcing,
        forcing_imag,
        reynolds_stress: stress,
    })
}

/// `e^{iax} |A|^2 A` component of `N(Phi, Phi)` given the corrections.
fn cubic_interaction(
    disc: &SpectralDiscretization,
    alpha: f64,
    psi1: &[Complex64],
    psi2: &[Complex64],
    mean: &MeanFlow,
) -> Vec<Complex64> {
    let n = psi1.len();
    let ia = Complex64::new(0.0, alpha);
    let conj: Vec<Complex64> = psi1.iter().map(|v| v.conj()).collect();
    let (l1, _) = laplacian(disc, alpha, psi1);
    let dconj = disc.diff(1, &conj);
    let (lc, dlc) = laplacian(disc, alpha, &conj);
    let d2 = disc.diff(1, psi2);
    let (l2, dl2) = laplacian(disc, 2.0 * alpha, psi2);
    (0..n)
        .map(|j| {
            // N(psi1 e^{iax}, phi0) + N(phi0, psi1 e^{iax})
            let mean_part = -ia * psi1[j] * mean.d3[j] + ia * mean.u0[j] * l1[j];
            // N(conj psi1 e^{-iax}, psi2 e^{2iax}) + N(psi2 e^{2iax}, conj psi1 e^{-iax})
            let harmonic = 2.0 * ia * dconj[j] * l2[j] + ia * conj[j] * dl2[j]
                - ia * d2[j] * lc[j]
                - 2.0 * ia * psi2[j] * dlc[j];
            mean_part + harmonic
        })
        .collect()
}

/// `c3` on one grid from the critical eigenpair `(lambda, psi1)`.
pub fn cubic_terms(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    lambda: Complex64,
    psi1: &[Complex64],
    disc: &SpectralDiscretization,
    gauge: MeanFlowGauge,
) -> Result<CubicTerms> {
    let pencil = orrsomm::assemble(profile, alpha, nu, disc)?;
    checked_shape(pencil.size(), psi1)?;
    let adjoint = adjoint_eigen(&pencil, lambda, psi1)?;
    let second = second_harmonic_solve(profile, alpha, nu, lambda, psi1, disc)?;
    let mean = mean_flow_solve(alpha, nu, psi1, disc, gauge)?;
    let mut r3: Vec<Complex64> = cubic_interaction(disc, alpha, psi1, &second.psi, &mean)
        .into_iter()
        .map(|v| -Complex64::i() * v)
        .collect();
    for r in pencil.boundary_rows() {
        r3[r] = linalg::czero();
    }
    let m = linalg::matvec(&pencil.operator_m(), psi1);
    let c3 = linalg::dot(&adjoint.psi, &r3) / linalg::dot(&adjoint.psi, &m);
    Ok(CubicTerms {
        c3,
        lambda,
        psi1: psi1.to_vec(),
        adjoint,
        second,
        mean,
    })
}

/// Interpolates `psi` onto `fine`, refines the eigenpair there and fixes the
/// amplitude gauge by least-squares matching to the interpolant.
pub fn transfer_mode(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    lambda: Complex64,
    psi: &[Complex64],
    coarse: &SpectralDiscretization,
    fine: &SpectralDiscretization,
) -> Result<(Complex64, Vec<Complex64>)> {
    let interp: Vec<Complex64> = fine.nodes().iter().map(|&y| coarse.interpolate(psi, y)).collect();
    let pencil = orrsomm::assemble(profile, alpha, nu, fine)?;
    let (lam, mut v, _) = pencil.refine(lambda, &interp)?;
    let s = linalg::dot(&v, &interp) / linalg::dot(&v, &v);
    linalg::scale(&mut v, s);
    Ok((lam, v))
}

pub fn fine_size(n: usize) -> usize {
    (3 * n).div_ceil(2)
}

/// Supercritical iff `Re c3 < -error_bar`, subcritical iff `Re c3 > error_bar`.
pub fn classify(c1: Complex64, c3: Complex64, error_bar: f64) -> Result<Classification> {
    if !(c1.re < 0.0) {
        return Err(Error::Precondition(format!(
            "Re c1 = {} is not negative; the neutral point is outside the Hopf regime",
            c1.re
        )));
    }
    Ok(if c3.re < -error_bar {
        Classification::Supercritical
    } else if c3.re > error_bar {
        Classification::Subcritical
    } else {
        Classification::Degenerate
    })
}

/// Full coefficient set at a neutral point.
pub fn compute_hopf(
    profile: &ShearProfile,
    neutral: &NeutralPoint,
    disc: &SpectralDiscretization,
    gauge: MeanFlowGauge,
) -> Result<HopfCoefficients> {
    let alpha = neutral.alpha_plus;
    let nu = neutral.nu;
    let pair = critical_mode(profile, neutral, disc)?;
    let pencil = orrsomm::assemble(profile, alpha, nu, disc)?;
    let adjoint = adjoint_eigen(&pencil, pair.lambda, &pair.psi)?;
    let c1 = c1_with(&pencil, &adjoint, &pair.psi);
    let est = c1_cross_check(profile, neutral, disc, &pair, c1)?;

    let coarse = cubic_terms(profile, alpha, nu, pair.lambda, &pair.psi, disc, gauge)?;
    let fine_disc = SpectralDiscretization::new(fine_size(disc.n()))?;
    let (lam_f, psi_f) = transfer_mode(profile, alpha, nu, pair.lambda, &pair.psi, disc, &fine_disc)?;
    let fine = cubic_terms(profile, alpha, nu, lam_f, &psi_f, &fine_disc, gauge)?;
    let error_bar = (coarse.c3 - fine.c3).norm();
    let classification = classify(c1, coarse.c3, error_bar)?;

    Ok(HopfCoefficients {
        neutral: neutral.clone(),
        n: disc.n(),
        gauge,
        nodes: disc.nodes().to_vec(),
        psi1: pair.psi,
        psi_adj: adjoint.psi,
        adjoint_condition: adjoint.condition,
        c1: est.c1,
        c1_fd: est.c1_fd,
        psi2: coarse.second.psi,
        phi0: coarse.mean.phi0,
        c3: coarse.c3,
        c3_fine: fine.c3,
        c3_error_bar: error_bar,
        classification,
    })
}
