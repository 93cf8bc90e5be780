//! Base shear profiles `U(y) = (U_s(y), 0)` on the strip.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the wall value `U_s(0) = 0`, the one hard requirement.
pub const WALL_TOL: f64 = 1e-12;
pub const SLOPE_TOL: f64 = 1e-8;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const CURVATURE_TOL: f64 = 1e-10;
const CHECK_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    BuiltinPoiseuille,
    BuiltinTanhSymmetric,
    Tabulated,
    /// User-supplied closed form (tests, Couette, ...).
    Custom,
}

type Evaluator = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Poiseuille,
    TanhSymmetric { beta: f64 },
    Spline(Arc<CubicSpline>),
    Custom(Evaluator),
}

/// Immutable base flow with its first two derivatives.
#[derive(Clone)]
pub struct ShearProfile {
    name: String,
    kind: ProfileKind,
    repr: Repr,
}

impl fmt::Debug for ShearProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearProfile")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl ShearProfile {
    /// Plane Poiseuille flow `U_s = 4 y (1 - y)`.
    pub fn poiseuille() -> Self {
        Self {
            name: "poiseuille".into(),
            kind: ProfileKind::BuiltinPoiseuille,
            repr: Repr::Poiseuille,
        }
    }

    /// `tanh(beta y) tanh(beta (1 - y)) / tanh^2(beta / 2)`.
    pub fn tanh_symmetric(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Profile(format!("tanh profile needs beta > 0, got {beta}")));
        }
        Ok(Self {
            name: format!("tanh-symmetric(beta={beta})"),
            kind: ProfileKind::BuiltinTanhSymmetric,
            repr: Repr::TanhSymmetric { beta },
        })
    }

    /// Plane Couette flow `U_s = y`. Not symmetric and `U_s(1) != 0`; kept as
    /// a negative control.
    pub fn couette() -> Self {
        Self {
            name: "couette".into(),
            kind: ProfileKind::Custom,
            repr: Repr::Custom(Arc::new(|y| (y, 1.0, 0.0))),
        }
    }

    /// Profile from a closed form returning `(U, U', U'')`.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        let profile = Self {
            name: name.into(),
            kind: ProfileKind::Custom,
            repr: Repr::Custom(Arc::new(f)),
        };
        profile.check_wall_value()?;
        Ok(profile)
    }

    /// Not-a-knot cubic spline through `(y_i, U_i)`; the samples must span [0, 1].
    pub fn tabulated(name: impl Into<String>, y: &[f64], u: &[f64]) -> Result<Self> {
        let spline = CubicSpline::not_a_knot(y, u)?;
        if spline.x[0].abs() > 1e-12 || (spline.x[spline.x.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::Profile(format!(
                "tabulated profile must span [0, 1], got [{}, {}]",
                spline.x[0],
                spline.x[spline.x.len() - 1]
            )));
        }
        let profile = Self {
            name: name.into(),
            kind: ProfileKind::Tabulated,
            repr: Repr::Spline(Arc::new(spline)),
        };
        profile.check_wall_value()?;
        Ok(profile)
    }

    /// Reads a two-column CSV (`y, U`, header optional).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Config(format!("cannot read profile {}: {e}", path.display())))?;
        let mut ys = Vec::new();
        let mut us = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Profile(format!("line {}: expected columns y, U", line + 1)));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(y), Ok(u)) => {
                    ys.push(y);
                    us.push(u);
                }
                _ if line == 0 => continue, // header
                _ => {
                    return Err(Error::Profile(format!(
                        "line {}: cannot parse `{}`",
                        line + 1,
                        rec.iter().collect::<Vec<_>>().join(",")
                    )))
                }
            }
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "tabulated".into());
        Self::tabulated(name, &ys, &us)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `(U_s, U_s', U_s'')` at `y`.
    pub fn eval(&self, y: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(y));
        }
        Ok(self.eval_unchecked(y))
    }

    pub(crate) fn eval_unchecked(&self, y: f64) -> (f64, f64, f64) {
        match &self.repr {
            Repr::Poiseuille => (4.0 * y * (1.0 - y), 4.0 - 8.0 * y, -8.0),
            Repr::TanhSymmetric { beta } => tanh_symmetric(*beta, y),
            Repr::Spline(s) => s.eval(y),
            Repr::Custom(f) => f(y),
        }
    }

    /// Samples `(U, U'')` on a set of nodes.
    pub fn sample(&self, nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
        nodes
            .iter()
            .map(|&y| {
                let (u, _, upp) = self.eval_unchecked(y);
                (u, upp)
            })
            .unzip()
    }

    fn check_wall_value(&self) -> Result<()> {
        let (u0, _, _) = self.eval_unchecked(0.0);
        if u0.abs() > WALL_TOL || !u0.is_finite() {
            return Err(Error::Profile(format!(
                "{}: U_s(0) = {u0:e}, the wall condition U_s(0) = 0 is required",
                self.name
            )));
        }
        Ok(())
    }

    /// Symmetry, wall and curvature checks on a 256-point grid. Violations
    /// other than `U_s(0) != 0` are reported as warnings.
    pub fn check_admissibility(&self) -> Result<AdmissibilityReport> {
        self.check_wall_value()?;
        let grid: Vec<f64> = (0..CHECK_POINTS)
            .map(|i| i as f64 / (CHECK_POINTS - 1) as f64)
            .collect();
        let mut symmetric = true;
        let mut all_neg = true;
        let mut all_pos = true;
        for &y in &grid {
            let (u, _, upp) = self.eval_unchecked(y);
            let (ur, _, _) = self.eval_unchecked(1.0 - y);
            if !(u.is_finite() && upp.is_finite()) {
                return Err(Error::Profile(format!("{}: non-finite value at y = {y}", self.name)));
            }
            if (u - ur).abs() >= SYMMETRY_TOL {
                symmetric = false;
            }
            if upp > -CURVATURE_TOL {
                all_neg = false;
            }
            if upp < CURVATURE_TOL {
                all_pos = false;
            }
        }
        let (u0, up0, _) = self.eval_unchecked(0.0);
        let (u1, _, _) = self.eval_unchecked(1.0);
        let wall_conditions = u0.abs() < WALL_TOL && u1.abs() < WALL_TOL && up0.abs() > SLOPE_TOL;
        let concavity = if all_neg {
            Concavity::Concave
        } else if all_pos {
            Concavity::Convex
        } else {
            Concavity::Neither
        };

        let mut warnings = Vec::new();
        if !symmetric {
            warnings.push(format!(
                "{} is not symmetric about y = 1/2; the bifurcation theory assumes symmetry",
                self.name
            ));
        }
        if !wall_conditions {
            warnings.push(format!(
                "{}: wall conditions U_s(0) = U_s(1) = 0, U_s'(0) != 0 not all met (U_s(1) = {u1:e}, U_s'(0) = {up0:e})",
                self.name
            ));
        }
        if concavity == Concavity::Neither {
            warnings.push(format!(
                "{}: U_s'' changes sign; neither convex nor concave",
                self.name
            ));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(AdmissibilityReport {
            symmetric,
            wall_conditions,
            concavity,
            warnings,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Concavity {
    Concave,
    Convex,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub symmetric: bool,
    pub wall_conditions: bool,
    pub concavity: Concavity,
    pub warnings: Vec<String>,
}

fn tanh_symmetric(beta: f64, y: f64) -> (f64, f64, f64) {
    let norm = (0.5 * beta).tanh().powi(2);
    let f = (beta * y).tanh();
    let g = (beta * (1.0 - y)).tanh();
    let sf = 1.0 - f * f;
    let sg = 1.0 - g * g;
    let fp = beta * sf;
    let gp = -beta * sg;
    let fpp = -2.0 * beta * beta * f * sf;
    let gpp = -2.0 * beta * beta * g * sg;
    (
        f * g / norm,
        (fp * g + f * gp) / norm,
        (fpp * g + 2.0 * fp * gp + f * gpp) / norm,
    )
}

/// Not-a-knot cubic spline, stored as knot values and second derivatives.
#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn not_a_knot(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::Shape {
                expected: n,
                got: y.len(),
            });
        }
        if n < 4 {
            return Err(Error::Profile("tabulated profile needs at least 4 samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Profile("tabulated y values must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // unknowns: second derivatives m_0..m_{n-1}
        let mut a = Mat::<f64>::zeros(n, n);
        let mut rhs = Mat::<f64>::zeros(n, 1);
        // third-derivative continuity at x_1 and x_{n-2}
        a[(0, 0)] = -h[1];
        a[(0, 1)] = h[0] + h[1];
        a[(0, 2)] = -h[0];
        for i in 1..n - 1 {
            a[(i, i - 1)] = h[i - 1];
            a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
            a[(i, i + 1)] = h[i];
            rhs[(i, 0)] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        a[(n - 1, n - 3)] = -h[n - 2];
        a[(n - 1, n - 2)] = h[n - 3] + h[n - 2];
        a[(n - 1, n - 1)] = -h[n - 3];
        let sol = a.partial_piv_lu().solve(&rhs);
        let m: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Profile("spline system is singular".into()));
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        let k = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        let (mk, mk1) = (self.m[k], self.m[k + 1]);
        let (yk, yk1) = (self.y[k], self.y[k + 1]);
        let val = a * yk + b * yk1 + ((a * a * a - a) * mk + (b * b * b - b) * mk1) * h * h / 6.0;
        let der = (yk1 - yk) / h + ((1.0 - 3.0 * a * a) * mk + (3.0 * b * b - 1.0) * mk1) * h / 6.0;
        let sec = a * mk + b * mk1;
        (val, der, sec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn poiseuille_values() {
        let p = ShearProfile::poiseuille();
        assert_eq!(p.eval(0.5).unwrap(), (1.0, 0.0, -8.0));
        assert_eq!(p.eval(0.0).unwrap(), (0.0, 4.0, -8.0));
        assert!(matches!(p.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_reproduces_parabola() {
        let y: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let u: Vec<f64> = y.iter().map(|y| 4.0 * y * (1.0 - y)).collect();
        let p = ShearProfile::tabulated("parabola", &y, &u).unwrap();
        let (v, d, s) = p.eval(0.3).unwrap();
        assert!((v - 0.84).abs() < 1e-8);
        assert!((d - 1.6).abs() < 1e-8);
        assert!((s + 8.0).abs() < 1e-8);
    }

    #[test]
    fn tabulated_requires_wall_value() {
        let y: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let u: Vec<f64> = y.iter().map(|y| 1.0 + y).collect();
        assert!(matches!(
            ShearProfile::tabulated("shifted", &y, &u),
            Err(Error::Profile(_))
        ));
    }

    #[test]
    fn poiseuille_is_admissible_and_concave() {
        let r = ShearProfile::poiseuille().check_admissibility().unwrap();
        assert!(r.symmetric && r.wall_conditions);
        assert_eq!(r.concavity, Concavity::Concave);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn couette_warns() {
        let r = ShearProfile::couette().check_admissibility().unwrap();
        assert!(!r.symmetric);
        assert!(!r.wall_conditions);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn tanh_profile_is_concave() {
        // every term of U'' = f''g + 2f'g' + fg'' is negative on (0, 1)
        let p = ShearProfile::tanh_symmetric(10.0).unwrap();
        let r = p.check_admissibility().unwrap();
        assert!(r.symmetric && r.wall_conditions);
        assert_eq!(r.concavity, Concavity::Concave);
    }

    #[test]
    fn inflected_profile_is_neither() {
        let p = ShearProfile::custom("two-sines", |y| {
            (
                (PI * y).sin() + 0.5 * (3.0 * PI * y).sin(),
                PI * (PI * y).cos() + 1.5 * PI * (3.0 * PI * y).cos(),
                -PI * PI * (PI * y).sin() - 4.5 * PI * PI * (3.0 * PI * y).sin(),
            )
        })
        .unwrap();
        let r = p.check_admissibility().unwrap();
        assert_eq!(r.concavity, Concavity::Neither);
        assert!(r.symmetric);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let y: Vec<f64> = (0..201).map(|i| i as f64 / 200.0).collect();
        let u: Vec<f64> = y.iter().map(|&t| (PI * t).sin() * (1.0 + 0.2 * t * (1.0 - t))).collect();
        let profiles = [
            ShearProfile::poiseuille(),
            ShearProfile::tanh_symmetric(10.0).unwrap(),
            ShearProfile::tabulated("sampled", &y, &u).unwrap(),
        ];
        let h = 1e-5;
        for p in &profiles {
            for i in 1..40 {
                let t = 0.05 + 0.9 * i as f64 / 40.0;
                let (_, d, s) = p.eval(t).unwrap();
                let (um, dm, _) = p.eval(t - h).unwrap();
                let (up, dp, _) = p.eval(t + h).unwrap();
                let fd1 = (up - um) / (2.0 * h);
                let fd2 = (dp - dm) / (2.0 * h);
                assert!((fd1 - d).abs() <= 1e-6 * d.abs().max(1.0), "{}: U' at {t}", p.name());
                assert!((fd2 - s).abs() <= 1e-6 * s.abs().max(1.0), "{}: U'' at {t}", p.name());
            }
        }
    }

    #[test]
    fn reflection_invariance() {
        for p in [ShearProfile::poiseuille(), ShearProfile::tanh_symmetric(10.0).unwrap()] {
            for i in 0..=50 {
                let y = i as f64 / 50.0;
                let (u, d, s) = p.eval(y).unwrap();
                let (ur, dr, sr) = p.eval(1.0 - y).unwrap();
                assert!((u - ur).abs() < 1e-10);
                assert!((d + dr).abs() < 1e-10 * d.abs().max(1.0));
                assert!((s - sr).abs() < 1e-10 * s.abs().max(1.0));
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        let mut text = String::from("y,U\n");
        for i in 0..=40 {
            let y = i as f64 / 40.0;
            text.push_str(&format!("{y},{}\n", 4.0 * y * (1.0 - y)));
        }
        std::fs::write(&path, text).unwrap();
        let p = ShearProfile::from_csv(&path).unwrap();
        assert_eq!(p.kind(), ProfileKind::Tabulated);
        assert!((p.eval(0.25).unwrap().0 - 0.75).abs() < 1e-12);
        assert!(ShearProfile::from_csv(dir.path().join("missing.csv")).is_err());
    }
}
