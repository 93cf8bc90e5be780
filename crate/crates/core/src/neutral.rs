//! Continuation of the leading eigenvalue in `(alpha, nu)`, the marginal
//! curve, and the numerical audit of the spectral assumption.
//!
//! Instability means `Re(lambda) > 0` everywhere in this module.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::greenfn::decades;
use crate::linalg::{self, CMat, Lu};
use crate::orrsomm::{self, EigenPair};
use crate::profiles::ShearProfile;
use crate::specgrid::SpectralDiscretization;

pub const MAX_HALVINGS: usize = 8;
/// Minimum `|<psi_prev, psi_next>| / (|psi_prev| |psi_next|)` for a continuation step.
pub const BRANCH_OVERLAP: f64 = 0.9;
pub const NEUTRAL_TOL: f64 = 1e-9;
const ROOT_TARGET: f64 = 1e-11;
const MAX_ROOT_ITERATIONS: usize = 80;
pub const ALPHA_STEP: f64 = 1e-4;
pub const NU_REL_STEP: f64 = 1e-3;
const BRACKET_SCAN: usize = 8;
const PEAK_STEP: f64 = 1e-3;
const PEAK_TOL: f64 = 1e-8;
const SCAN_ALPHA: (f64, f64, usize) = (0.2, 4.0, 39);
/// Gap-to-residual ratio required for simplicity.
pub const SIMPLE_GAP_RATIO: f64 = 1e3;
pub const SIMPLE_ANGLE: f64 = 1e-6;
/// `|Re(lambda)|` below which an eigenvalue counts as neutral in the audit.
pub const AUDIT_NEUTRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    /// Exponent of the small-viscosity power law `alpha ~ C nu^p`.
    pub fn target_exponent(self) -> f64 {
        match self {
            Branch::Upper => 1.0 / 7.0,
            Branch::Lower => 1.0 / 3.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Branch::Upper),
            "lower" => Ok(Branch::Lower),
            other => Err(Error::Config(format!("unknown branch `{other}` (expected upper or lower)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeutralPoint {
    pub nu: f64,
    pub alpha_plus: f64,
    /// `lambda(alpha_plus, nu) = i omega_plus`.
    pub omega_plus: f64,
    pub lambda: Complex64,
    pub d_re_lambda_d_nu: f64,
    pub d_re_lambda_d_alpha: f64,
    pub d_lambda_d_nu: Complex64,
    pub d_lambda_d_alpha: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub nu: f64,
    pub alpha: f64,
    pub omega: f64,
    pub lambda: Complex64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeutralCurve {
    pub branch: Branch,
    pub points: Vec<NeutralPoint>,
    /// `(nu, reason)` for samples without a neutral point.
    pub failures: Vec<(f64, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub branch: Branch,
    pub exponent: f64,
    pub constant: f64,
    pub r_squared: f64,
    pub target_exponent: f64,
    pub points: usize,
}

fn overlap(u: &[Complex64], v: &[Complex64]) -> f64 {
    linalg::dot(u, v).norm() / (linalg::norm2(u) * linalg::norm2(v))
}

/// One continuation step that must stay on the branch of `prev`.
fn follow(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    disc: &SpectralDiscretization,
    prev: &EigenPair,
) -> Result<EigenPair> {
    let next = orrsomm::leading_eigen(profile, alpha, nu, disc, Some(prev))?;
    let ov = overlap(&prev.psi, &next.psi);
    if ov < BRANCH_OVERLAP {
        return Err(Error::Continuation {
            iterations: 0,
            residual: 1.0 - ov,
        });
    }
    Ok(next)
}

/// Moves `prev` to `(alpha, nu)`, halving the step on failure.
fn step_to(
    profile: &ShearProfile,
    prev: &EigenPair,
    target: (f64, f64),
    disc: &SpectralDiscretization,
) -> Result<EigenPair> {
    let start = (prev.alpha, prev.nu);
    let mut cur = prev.clone();
    let mut done: f64 = 0.0;
    let mut step: f64 = 1.0;
    let mut halvings = 0;
    while done < 1.0 {
        let t = (done + step).min(1.0);
        let alpha = start.0 + t * (target.0 - start.0);
        let nu = start.1 + t * (target.1 - start.1);
        match follow(profile, alpha, nu, disc, &cur) {
            Ok(p) => {
                cur = p;
                done = t;
            }
            Err(_) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::BranchLost {
                        alpha: cur.alpha,
                        nu: cur.nu,
                        halvings: MAX_HALVINGS,
                    });
                }
                step /= 2.0;
            }
        }
    }
    Ok(cur)
}

/// Follows the leading eigenvalue of the first point along `path`.
pub fn track_eigenvalue(
    profile: &ShearProfile,
    path: &[(f64, f64)],
    disc: &SpectralDiscretization,
) -> Result<Vec<EigenPair>> {
    let Some(&(a0, n0)) = path.first() else {
        return Ok(Vec::new());
    };
    for w in path.windows(2) {
        if w[0].0 * w[1].0 <= 0.0 {
            return Err(Error::Precondition(format!(
                "continuation path crosses alpha = 0 between {} and {}",
                w[0].0, w[1].0
            )));
        }
    }
    let mut out = vec![orrsomm::leading_eigen(profile, a0, n0, disc, None)?];
    for &target in &path[1..] {
        let next = step_to(profile, out.last().expect("non-empty"), target, disc)?;
        out.push(next);
    }
    Ok(out)
}

fn dense_leading(profile: &ShearProfile, alpha: f64, nu: f64, disc: &SpectralDiscretization) -> Result<EigenPair> {
    orrsomm::leading_eigen(profile, alpha, nu, disc, None)
}

/// Leading eigenpairs at each `alpha`, computed independently.
pub fn scan_alpha(
    profile: &ShearProfile,
    nu: f64,
    alphas: &[f64],
    disc: &SpectralDiscretization,
) -> Vec<Result<EigenPair>> {
    alphas
        .par_iter()
        .map(|&a| dense_leading(profile, a, nu, disc))
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Locates the marginal wavenumber inside `bracket` at fixed `nu`.
///
/// The bracket must show a sign change of the leading growth rate; a dense
/// scan inside it rejects brackets holding several crossings. The root is
/// polished by regula falsi (Illinois variant) on the tracked crossing mode.
pub fn find_alpha_plus(
    profile: &ShearProfile,
    nu: f64,
    bracket: (f64, f64),
    disc: &SpectralDiscretization,
) -> Result<NeutralPoint> {
    let (lo, hi) = bracket;
    if !(lo < hi) || lo * hi <= 0.0 {
        return Err(Error::Precondition(format!(
            "bracket ({lo}, {hi}) must be ordered and must not contain alpha = 0"
        )));
    }
    let alphas = linspace(lo, hi, BRACKET_SCAN);
    let scan: Vec<EigenPair> = scan_alpha(profile, nu, &alphas, disc)
        .into_iter()
        .collect::<Result<_>>()?;
    let re: Vec<f64> = scan.iter().map(|p| p.lambda.re).collect();
    let (first, last) = (re[0], re[re.len() - 1]);
    if first * last >= 0.0 {
        return Err(Error::Bracket {
            alpha_lo: lo,
            alpha_hi: hi,
            re_lo: first,
            re_hi: last,
        });
    }
    let crossings: Vec<usize> = (0..re.len() - 1).filter(|&k| re[k] * re[k + 1] <= 0.0).collect();
    if crossings.len() > 1 {
        return Err(Error::Ambiguity {
            crossings: crossings
                .iter()
                .map(|&k| alphas[k] - re[k] * (alphas[k + 1] - alphas[k]) / (re[k + 1] - re[k]))
                .collect(),
        });
    }
    let k = crossings[0];
    // follow the unstable side's mode across the cell
    let (pos, neg_alpha) = if re[k] > 0.0 {
        (scan[k].clone(), alphas[k + 1])
    } else {
        (scan[k + 1].clone(), alphas[k])
    };
    let neg = step_to(profile, &pos, (neg_alpha, nu), disc)?;
    let root = regula_falsi(profile, nu, disc, pos, neg)?;

    // the tracked mode must be the leading one at the root
    let check = dense_leading(profile, root.alpha, nu, disc)?;
    if (check.lambda - root.lambda).norm() > 1e-8 * root.lambda.norm().max(1.0) {
        return Err(Error::Ambiguity {
            crossings: vec![root.alpha],
        });
    }
    neutral_point(profile, nu, disc, &root)
}

fn regula_falsi(
    profile: &ShearProfile,
    nu: f64,
    disc: &SpectralDiscretization,
    mut a: EigenPair,
    mut b: EigenPair,
) -> Result<EigenPair> {
    let mut fa = a.lambda.re;
    let mut fb = b.lambda.re;
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { a.clone() } else { b.clone() };
    for _ in 0..MAX_ROOT_ITERATIONS {
        if best.lambda.re.abs() < ROOT_TARGET {
            return Ok(best);
        }
        let mut x = (a.alpha * fb - b.alpha * fa) / (fb - fa);
        let width = (b.alpha - a.alpha).abs();
        if !x.is_finite() || (x - a.alpha).abs() < 1e-3 * width || (x - b.alpha).abs() < 1e-3 * width {
            x = 0.5 * (a.alpha + b.alpha);
        }
        let seed = if (x - a.alpha).abs() < (x - b.alpha).abs() { &a } else { &b };
        let p = step_to(profile, seed, (x, nu), disc)?;
        let fx = p.lambda.re;
        if fx.abs() < best.lambda.re.abs() {
            best = p.clone();
        }
        if fx * fb > 0.0 {
            b = p;
            fb = fx;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        } else {
            a = p;
            fa = fx;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        }
        if (a.alpha - b.alpha).abs() < 1e-14 * a.alpha.abs() {
            break;
        }
    }
    if best.lambda.re.abs() < NEUTRAL_TOL {
        Ok(best)
    } else {
        Err(Error::Continuation {
            iterations: MAX_ROOT_ITERATIONS,
            residual: best.lambda.re.abs(),
        })
    }
}

fn neutral_point(
    profile: &ShearProfile,
    nu: f64,
    disc: &SpectralDiscretization,
    root: &EigenPair,
) -> Result<NeutralPoint> {
    let alpha = root.alpha;
    let da = ALPHA_STEP * alpha.signum();
    let dn = NU_REL_STEP * nu;
    let ap = follow(profile, alpha + da, nu, disc, root)?;
    let am = follow(profile, alpha - da, nu, disc, root)?;
    let np = follow(profile, alpha, nu + dn, disc, root)?;
    let nm = follow(profile, alpha, nu - dn, disc, root)?;
    let d_alpha = (ap.lambda - am.lambda) / (2.0 * da);
    let d_nu = (np.lambda - nm.lambda) / (2.0 * dn);
    Ok(NeutralPoint {
        nu,
        alpha_plus: alpha,
        omega_plus: root.lambda.im,
        lambda: root.lambda,
        d_re_lambda_d_nu: d_nu.re,
        d_re_lambda_d_alpha: d_alpha.re,
        d_lambda_d_nu: d_nu,
        d_lambda_d_alpha: d_alpha,
    })
}

/// Maximizes `Re(lambda)` over `alpha` at fixed `nu` by Newton steps on the
/// centered-difference derivative, starting from `start`.
pub fn growth_peak(
    profile: &ShearProfile,
    nu: f64,
    disc: &SpectralDiscretization,
    start: &EigenPair,
) -> Result<EigenPair> {
    let mut cur = if start.nu == nu {
        start.clone()
    } else {
        step_to(profile, start, (start.alpha, nu), disc)?
    };
    let h = PEAK_STEP;
    for _ in 0..40 {
        let plus = follow(profile, cur.alpha + h, nu, disc, &cur)?;
        let minus = follow(profile, cur.alpha - h, nu, disc, &cur)?;
        let g = (plus.lambda.re - minus.lambda.re) / (2.0 * h);
        let g2 = (plus.lambda.re - 2.0 * cur.lambda.re + minus.lambda.re) / (h * h);
        let mut step = if g2 < 0.0 { -g / g2 } else { 0.05 * g.signum() };
        step = step.clamp(-0.2, 0.2);
        let target = (cur.alpha + step).clamp(SCAN_ALPHA.0, SCAN_ALPHA.1);
        if target == cur.alpha {
            return Ok(cur);
        }
        cur = step_to(profile, &cur, (target, nu), disc)?;
        if step.abs() < PEAK_TOL {
            return Ok(cur);
        }
    }
    Ok(cur)
}

/// Coarse scan plus Newton refinement of the most unstable wavenumber.
fn peak_from_scan(profile: &ShearProfile, nu: f64, disc: &SpectralDiscretization) -> Result<EigenPair> {
    let (lo, hi, n) = SCAN_ALPHA;
    let alphas = linspace(lo, hi, n - 1);
    let best = scan_alpha(profile, nu, &alphas, disc)
        .into_iter()
        .filter_map(|r| r.ok())
        .max_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re))
        .ok_or_else(|| Error::Eigensolver {
            msg: "no eigenvalue found on the wavenumber scan".into(),
            size: disc.len(),
            norm_a: f64::NAN,
            norm_m: f64::NAN,
        })?;
    growth_peak(profile, nu, disc, &best)
}

/// Expands from the growth peak until the requested branch is bracketed.
fn branch_bracket(
    profile: &ShearProfile,
    nu: f64,
    disc: &SpectralDiscretization,
    peak: &EigenPair,
    branch: Branch,
) -> Result<(f64, f64)> {
    let dir = match branch {
        Branch::Upper => 1.0,
        Branch::Lower => -1.0,
    };
    let mut d = 0.05;
    let mut prev = peak.clone();
    for _ in 0..8 {
        let a = peak.alpha + dir * d;
        if a <= 0.0 {
            break;
        }
        let p = dense_leading(profile, a, nu, disc)?;
        if p.lambda.re < 0.0 {
            let inner = prev.alpha;
            return Ok(if dir > 0.0 { (inner, a) } else { (a, inner) });
        }
        prev = p;
        d *= 2.0;
    }
    Err(Error::Bracket {
        alpha_lo: peak.alpha,
        alpha_hi: peak.alpha + dir * d,
        re_lo: peak.lambda.re,
        re_hi: prev.lambda.re,
    })
}

/// Neutral point on the given branch at `nu`, searching from scratch.
pub fn locate_neutral(
    profile: &ShearProfile,
    nu: f64,
    branch: Branch,
    disc: &SpectralDiscretization,
) -> Result<Option<NeutralPoint>> {
    let peak = peak_from_scan(profile, nu, disc)?;
    if peak.lambda.re <= 0.0 {
        return Ok(None);
    }
    let bracket = branch_bracket(profile, nu, disc, &peak, branch)?;
    find_alpha_plus(profile, nu, bracket, disc).map(Some)
}

/// Nose of the neutral curve: the smallest-growth point where
/// `max_alpha Re(lambda)` vanishes, found by a secant iteration in `nu`.
pub fn find_critical_point(
    profile: &ShearProfile,
    nu_guess: f64,
    disc: &SpectralDiscretization,
) -> Result<CriticalPoint> {
    let mut peak = peak_from_scan(profile, nu_guess, disc)?;
    let mut nu0 = nu_guess;
    let mut g0 = peak.lambda.re;
    let mut nu1 = nu_guess * 1.02;
    peak = growth_peak(profile, nu1, disc, &peak)?;
    let mut g1 = peak.lambda.re;
    for it in 1..=60 {
        if g1.abs() < ROOT_TARGET {
            return Ok(CriticalPoint {
                nu: nu1,
                alpha: peak.alpha,
                omega: peak.lambda.im,
                lambda: peak.lambda,
                iterations: it,
            });
        }
        let mut nu2 = nu1 - g1 * (nu1 - nu0) / (g1 - g0);
        if !nu2.is_finite() || nu2 <= 0.0 {
            nu2 = 0.5 * nu1;
        }
        // keep steps moderate so the continuation stays on the branch
        nu2 = nu2.clamp(0.7 * nu1, 1.3 * nu1);
        nu0 = nu1;
        g0 = g1;
        nu1 = nu2;
        peak = growth_peak(profile, nu1, disc, &peak)?;
        g1 = peak.lambda.re;
    }
    Err(Error::Continuation {
        iterations: 60,
        residual: g1.abs(),
    })
}

/// Neutral curve over log-spaced viscosities; per-point failures are recorded.
pub fn trace_neutral_curve(
    profile: &ShearProfile,
    nu_range: (f64, f64),
    points: usize,
    branch: Branch,
    disc: &SpectralDiscretization,
) -> Result<NeutralCurve> {
    let (nu_min, nu_max) = nu_range;
    if !(nu_min > 0.0) || !(nu_max >= nu_min) {
        return Err(Error::Precondition(format!("invalid viscosity range ({nu_min}, {nu_max})")));
    }
    let nus: Vec<f64> = if points <= 1 {
        vec![nu_min]
    } else {
        (0..points)
            .map(|k| nu_min * (nu_max / nu_min).powf(k as f64 / (points - 1) as f64))
            .collect()
    };
    let mut curve = NeutralCurve {
        branch,
        points: Vec::new(),
        failures: Vec::new(),
    };
    let mut peak: Option<EigenPair> = None;
    for &nu in &nus {
        let attempt = (|| -> Result<Option<NeutralPoint>> {
            let p = match &peak {
                Some(prev) => growth_peak(profile, nu, disc, prev).or_else(|_| peak_from_scan(profile, nu, disc))?,
                None => peak_from_scan(profile, nu, disc)?,
            };
            peak = Some(p.clone());
            if p.lambda.re <= 0.0 {
                return Ok(None);
            }
            let bracket = branch_bracket(profile, nu, disc, &p, branch)?;
            find_alpha_plus(profile, nu, bracket, disc).map(Some)
        })();
        match attempt {
            Ok(Some(np)) => curve.points.push(np),
            Ok(None) => curve.failures.push((nu, "no unstable wavenumber".into())),
            Err(e) => {
                log::warn!("neutral point at nu = {nu:e} failed: {e}");
                curve.failures.push((nu, e.to_string()));
            }
        }
    }
    Ok(curve)
}

/// Least-squares fit `alpha = C nu^p`; needs at least six points over a decade.
pub fn fit_scaling(curve: &[NeutralPoint], branch: Branch) -> Result<ScalingFit> {
    let nus: Vec<f64> = curve.iter().map(|p| p.nu).collect();
    let span = decades(&nus);
    if curve.len() < 6 || span < 1.0 {
        return Err(Error::FitDomain {
            points: curve.len(),
            decades: span,
        });
    }
    let alphas: Vec<f64> = curve.iter().map(|p| p.alpha_plus.abs()).collect();
    let f = fit::loglog(&nus, &alphas).ok_or(Error::FitDomain {
        points: curve.len(),
        decades: span,
    })?;
    Ok(ScalingFit {
        branch,
        exponent: f.slope,
        constant: f.constant(),
        r_squared: f.r_squared,
        target_exponent: branch.target_exponent(),
        points: curve.len(),
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub gap: f64,
    pub residual: f64,
    /// Angle between the limits of inverse iteration from two random starts.
    pub angle: f64,
    pub simple: bool,
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Gap-to-residual test plus agreement of inverse iteration from two random starts.
pub fn simplicity_test(a: &CMat, m: &CMat, lambda: Complex64, residual: f64, gap: f64, seed: u64) -> SimplicityReport {
    let shift = lambda + Complex64::new(1e-13, 1e-13) * lambda.norm().max(1.0);
    let lu = Lu::new(&linalg::shifted(a, m, shift));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut limits = Vec::with_capacity(2);
    for _ in 0..2 {
        let mut v = random_vector(a.nrows(), &mut rng);
        for _ in 0..6 {
            v = lu.solve(&linalg::matvec(m, &v));
            let n = linalg::norm2(&v);
            linalg::scale(&mut v, Complex64::new(1.0 / n, 0.0));
        }
        limits.push(v);
    }
    let (u, v) = (&limits[0], &limits[1]);
    let ip = linalg::dot(v, u);
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    let angle = u
        .iter()
        .zip(v)
        .map(|(x, y)| (x - y * phase).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let angle = if angle.is_finite() { angle } else { f64::INFINITY };
    SimplicityReport {
        gap,
        residual,
        angle,
        simple: gap > SIMPLE_GAP_RATIO * residual && angle < SIMPLE_ANGLE,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditSample {
    pub alpha: f64,
    pub unstable_count: usize,
    pub max_re_lambda: f64,
    pub simple: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HAuditReport {
    pub nu: f64,
    pub neutral: Option<NeutralPoint>,
    /// Largest unstable count over the samples below `alpha_plus`.
    pub unstable_count_below: usize,
    pub simple: bool,
    pub stable_above: bool,
    /// `d Re(lambda) / d nu` at the neutral point; negative means transversal crossing.
    pub transversality: Option<f64>,
    /// Eigenvalues with `|Re(lambda)| < 1e-6` at `alpha_plus`.
    pub neutral_count: usize,
    pub spectral_gap_sigma: Option<f64>,
    pub below: Vec<AuditSample>,
    pub above: Vec<AuditSample>,
    pub notes: Vec<String>,
    pub passed: bool,
}

fn sample(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    disc: &SpectralDiscretization,
    seed: u64,
    check_simple: bool,
) -> Result<(AuditSample, Vec<EigenPair>)> {
    let pencil = orrsomm::assemble(profile, alpha, nu, disc)?;
    let spec = orrsomm::eigen_spectrum_with(&pencil, Some(profile))?;
    let unstable_count = spec.iter().filter(|p| p.lambda.re > 0.0).count();
    let max_re_lambda = spec.first().map_or(f64::NEG_INFINITY, |p| p.lambda.re);
    let simple = check_simple.then(|| {
        spec.first().is_some_and(|p| {
            simplicity_test(pencil.a(), pencil.m(), p.lambda, p.residual, p.gap, seed).simple
        })
    });
    Ok((
        AuditSample {
            alpha,
            unstable_count,
            max_re_lambda,
            simple,
        },
        spec,
    ))
}

/// Sampled check of the spectral assumption at `nu`. Failing sub-checks are
/// reported as flags, not errors. The sampling is finite: evidence, not proof.
pub fn audit_h(profile: &ShearProfile, nu: f64, disc: &SpectralDiscretization, seed: u64) -> Result<HAuditReport> {
    let mut notes = vec![
        "convention: instability means Re(lambda) > 0; audited as Re(lambda) < 0 above alpha_plus and d Re(lambda)/d nu < 0 at alpha_plus".to_string(),
        "finite sampling plan: 5 wavenumbers in (alpha_plus - 0.1, alpha_plus), 5 in (alpha_plus, alpha_plus + 0.5], plus 2 and 4 alpha_plus".to_string(),
    ];
    let Some(np) = locate_neutral(profile, nu, Branch::Upper, disc)? else {
        notes.push("no unstable eigenvalue on the sampled wavenumber window; no neutral point".into());
        return Ok(HAuditReport {
            nu,
            neutral: None,
            unstable_count_below: 0,
            simple: false,
            stable_above: true,
            transversality: None,
            neutral_count: 0,
            spectral_gap_sigma: None,
            below: Vec::new(),
            above: Vec::new(),
            notes,
            passed: false,
        });
    };
    let a = np.alpha_plus;
    let below_alphas: Vec<f64> = (1..=5).map(|k| a - 0.1 * (k as f64 - 0.5) / 5.0).collect();
    let mut above_alphas: Vec<f64> = (1..=5).map(|k| a + 0.1 * k as f64).collect();
    above_alphas.extend([2.0 * a, 4.0 * a]);

    let below: Vec<AuditSample> = below_alphas
        .par_iter()
        .map(|&al| sample(profile, al, nu, disc, seed, true).map(|s| s.0))
        .collect::<Result<_>>()?;
    let above: Vec<AuditSample> = above_alphas
        .par_iter()
        .map(|&al| sample(profile, al, nu, disc, seed, false).map(|s| s.0))
        .collect::<Result<_>>()?;
    let (_, spec) = sample(profile, a, nu, disc, seed, false)?;

    let neutral: Vec<&EigenPair> = spec.iter().filter(|p| p.lambda.re.abs() < AUDIT_NEUTRAL_TOL).collect();
    let critical = spec
        .iter()
        .min_by(|x, y| (x.lambda - np.lambda).norm().total_cmp(&(y.lambda - np.lambda).norm()));
    let sigma = critical.map(|c| {
        -spec
            .iter()
            .filter(|p| !std::ptr::eq(*p, c))
            .map(|p| p.lambda.re)
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let pencil = orrsomm::assemble(profile, a, nu, disc)?;
    let simple_at = critical.is_some_and(|c| simplicity_test(pencil.a(), pencil.m(), c.lambda, c.residual, c.gap, seed).simple);

    let unstable_count_below = below.iter().map(|s| s.unstable_count).max().unwrap_or(0);
    let all_one = below.iter().all(|s| s.unstable_count == 1);
    let simple = simple_at && below.iter().all(|s| s.simple == Some(true));
    let stable_above = above.iter().all(|s| s.max_re_lambda < 0.0);
    let transversal = np.d_re_lambda_d_nu < 0.0;
    let passed = all_one && simple && stable_above && neutral.len() == 1 && transversal && sigma.is_some_and(|s| s > 0.0);
    Ok(HAuditReport {
        nu,
        transversality: Some(np.d_re_lambda_d_nu),
        neutral: Some(np),
        unstable_count_below,
        simple,
        stable_above,
        neutral_count: neutral.len(),
        spectral_gap_sigma: sigma,
        below,
        above,
        notes,
        passed,
    })
}
