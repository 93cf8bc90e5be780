//! Stuart-Landau amplitude equation `dA/dt = i omega A + c1 mu A + c3 A |A|^2`
//! and the travelling roll it describes.

use crate::error::{Error, Result};
use crate::hopf::HopfCoefficients;
use crate::profiles::ShearProfile;
use crate::specgrid::SpectralDiscretization;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Safety factor in the step-size bound `dt < DT_FACTOR / max rate`.
pub const DT_FACTOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub omega: f64,
    pub c1: Complex64,
    pub c3: Complex64,
}

impl From<&HopfCoefficients> for NormalForm {
    fn from(h: &HopfCoefficients) -> Self {
        Self {
            omega: h.omega_plus(),
            c1: h.c1,
            c3: h.c3,
        }
    }
}

impl NormalForm {
    pub fn rhs(&self, mu: f64, a: Complex64) -> Complex64 {
        a * (Complex64::new(0.0, self.omega) + self.c1 * mu + self.c3 * a.norm_sqr())
    }

    /// The same equation run backwards in time; repelling cycles become attracting.
    pub fn time_reversed(&self) -> Self {
        Self {
            omega: -self.omega,
            c1: -self.c1,
            c3: -self.c3,
        }
    }

    /// Largest admissible step for a trajectory starting at `a0`.
    pub fn max_dt(&self, mu: f64, a0: Complex64) -> f64 {
        let rate = self
            .omega
            .abs()
            .max((self.c1 * mu).norm())
            .max(self.c3.norm() * a0.norm_sqr());
        if rate == 0.0 {
            f64::INFINITY
        } else {
            DT_FACTOR / rate
        }
    }

    /// Exact `|A(t)|` from the radial equation `r' = Re(c1) mu r + Re(c3) r^3`.
    pub fn radial_solution(&self, mu: f64, r0: f64, t: f64) -> f64 {
        let a = self.c1.re * mu;
        let b = self.c3.re;
        if r0 == 0.0 {
            return 0.0;
        }
        let s0 = r0 * r0;
        // s = r^2 obeys s' = 2 a s + 2 b s^2
        let inv = if a == 0.0 {
            1.0 / s0 - 2.0 * b * t
        } else {
            -b / a + (1.0 / s0 + b / a) * (-2.0 * a * t).exp()
        };
        (1.0 / inv).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub t: f64,
    pub a: Complex64,
}

fn rk4_step(nf: &NormalForm, mu: f64, a: Complex64, h: f64) -> Complex64 {
    let k1 = nf.rhs(mu, a);
    let k2 = nf.rhs(mu, a + 0.5 * h * k1);
    let k3 = nf.rhs(mu, a + 0.5 * h * k2);
    let k4 = nf.rhs(mu, a + h * k3);
    a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Classical RK4 from `t = 0` to `t_final`, recording every step.
pub fn integrate(nf: &NormalForm, mu: f64, a0: Complex64, t_final: f64, dt: f64) -> Result<Vec<AmplitudeState>> {
    integrate_sampled(nf, mu, a0, t_final, dt, 1)
}

/// As [`integrate`] but recording every `every`-th step (and the final state).
pub fn integrate_sampled(
    nf: &NormalForm,
    mu: f64,
    a0: Complex64,
    t_final: f64,
    dt: f64,
    every: usize,
) -> Result<Vec<AmplitudeState>> {
    let limit = nf.max_dt(mu, a0);
    if !(dt > 0.0) || !(dt < limit) {
        return Err(Error::Stability { dt, limit });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::Precondition(format!("final time must be finite and non-negative, got {t_final}")));
    }
    let every = every.max(1);
    let steps = (t_final / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps / every + 2);
    let mut a = a0;
    let mut t = 0.0;
    out.push(AmplitudeState { t, a });
    for k in 1..=steps {
        let h = (t_final - t).min(dt);
        a = rk4_step(nf, mu, a, h);
        t = if k == steps { t_final } else { k as f64 * dt };
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Precondition(format!("amplitude blew up at t = {t}")));
        }
        if k % every == 0 || k == steps {
            out.push(AmplitudeState { t, a });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    pub radius: f64,
    pub frequency: f64,
    /// Attracting iff `Re c3 < 0`.
    pub stable: bool,
}

/// Periodic orbit `A = radius e^{i frequency t}` of the normal form, if any.
pub fn limit_cycle(nf: &NormalForm, mu: f64) -> Result<Option<LimitCycle>> {
    if !(nf.c1.re < 0.0) {
        return Err(Error::Precondition(format!("Re c1 = {} is not negative", nf.c1.re)));
    }
    if nf.c3.re == 0.0 {
        return Err(Error::Degenerate("Re c3 = 0".into()));
    }
    let radicand = -nf.c1.re * mu / nf.c3.re;
    if !(radicand > 0.0) {
        return Ok(None);
    }
    let radius = radicand.sqrt();
    Ok(Some(LimitCycle {
        radius,
        frequency: nf.omega + nf.c1.im * mu + nf.c3.im * radicand,
        stable: nf.c3.re < 0.0,
    }))
}

/// Leading-order roll `u = U(y) + 2 r Re[e^{i(w t + a x)} (psi', -i a psi)]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollField {
    pub alpha: f64,
    pub mu: f64,
    pub radius: f64,
    /// Cycle frequency `w`; the pattern moves with speed `-w / alpha`.
    pub frequency: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    /// `u[k][i][j]` at `(t[k], y[i], x[j])`.
    pub u: Vec<Vec<Vec<f64>>>,
    pub v: Vec<Vec<Vec<f64>>>,
    base: Vec<f64>,
    psi: Vec<Complex64>,
    dpsi: Vec<Complex64>,
}

/// Samples the roll over one spatial period (`nx + 1` columns, both ends
/// included) and one temporal period (`nt` samples).
pub fn reconstruct_roll(
    hopf: &HopfCoefficients,
    profile: &ShearProfile,
    mu: f64,
    nx: usize,
    nt: usize,
) -> Result<RollField> {
    let nf = NormalForm::from(hopf);
    let cycle = limit_cycle(&nf, mu)?.ok_or_else(|| {
        Error::Reconstruction(format!(
            "no limit cycle at mu = {mu} (Re c1 = {:.4e}, Re c3 = {:.4e})",
            nf.c1.re, nf.c3.re
        ))
    })?;
    if nx < 4 || nt == 0 {
        return Err(Error::Config(format!("roll grid needs nx >= 4 and nt >= 1, got {nx} x {nt}")));
    }
    let disc = SpectralDiscretization::new(hopf.n)?;
    if hopf.psi1.len() != disc.len() {
        return Err(Error::Shape {
            expected: disc.len(),
            got: hopf.psi1.len(),
        });
    }
    let alpha = hopf.alpha_plus();
    let period_x = 2.0 * PI / alpha;
    let x: Vec<f64> = (0..=nx).map(|j| period_x * j as f64 / nx as f64).collect();
    let period_t = if cycle.frequency != 0.0 {
        2.0 * PI / cycle.frequency.abs()
    } else {
        1.0
    };
    let t: Vec<f64> = (0..nt).map(|k| period_t * k as f64 / nt as f64).collect();
    let (base, _) = profile.sample(disc.nodes());
    let mut field = RollField {
        alpha,
        mu,
        radius: cycle.radius,
        frequency: cycle.frequency,
        x,
        y: disc.nodes().to_vec(),
        t,
        u: Vec::new(),
        v: Vec::new(),
        base,
        psi: hopf.psi1.clone(),
        dpsi: disc.diff(1, &hopf.psi1),
    };
    let (u, v): (Vec<_>, Vec<_>) = field
        .t
        .iter()
        .map(|&tk| {
            let mut uk = Vec::with_capacity(field.y.len());
            let mut vk = Vec::with_capacity(field.y.len());
            for i in 0..field.y.len() {
                let (ur, vr): (Vec<f64>, Vec<f64>) = field.x.iter().map(|&xj| field.evaluate(tk, xj, i)).unzip();
                uk.push(ur);
                vk.push(vr);
            }
            (uk, vk)
        })
        .unzip();
    field.u = u;
    field.v = v;
    Ok(field)
}

impl RollField {
    /// `(u, v)` at time `t`, abscissa `x` and the `i`-th collocation node.
    pub fn evaluate(&self, t: f64, x: f64, i: usize) -> (f64, f64) {
        let phase = Complex64::from_polar(1.0, self.frequency * t + self.alpha * x);
        let amp = 2.0 * self.radius;
        let u = self.base[i] + amp * (phase * self.dpsi[i]).re;
        let v = amp * (phase * Complex64::new(0.0, -self.alpha) * self.psi[i]).re;
        (u, v)
    }

    /// Phase speed of the pattern.
    pub fn speed(&self) -> f64 {
        -self.frequency / self.alpha
    }

    /// Largest `|field(t + delta, x) - field(t, x - speed delta)|` over the grid.
    pub fn travel_defect(&self, delta: f64) -> f64 {
        let shift = -self.speed() * delta;
        let mut worst: f64 = 0.0;
        for &tk in &self.t {
            for i in 0..self.y.len() {
                for &xj in &self.x {
                    let (u1, v1) = self.evaluate(tk + delta, xj, i);
                    let (u2, v2) = self.evaluate(tk, xj + shift, i);
                    worst = worst.max((u1 - u2).abs()).max((v1 - v2).abs());
                }
            }
        }
        worst
    }

    /// Largest `|u_x + v_y|`, spectral in x (FFT over one period) and
    /// collocation in y.
    pub fn divergence_defect(&self) -> f64 {
        let nx = self.x.len() - 1;
        let disc = match SpectralDiscretization::new(self.y.len() - 1) {
            Ok(d) => d,
            Err(_) => return f64::INFINITY,
        };
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(nx);
        let inv = planner.plan_fft_inverse(nx);
        let mut worst: f64 = 0.0;
        for k in 0..self.t.len() {
            let mut ux = vec![vec![0.0; nx]; self.y.len()];
            for (i, row) in self.u[k].iter().enumerate() {
                let mut buf: Vec<Complex64> = row[..nx].iter().map(|v| Complex64::new(*v, 0.0)).collect();
                fwd.process(&mut buf);
                for (m, c) in buf.iter_mut().enumerate() {
                    let wave = if m <= nx / 2 { m as f64 } else { m as f64 - nx as f64 };
                    let wave = if nx % 2 == 0 && m == nx / 2 { 0.0 } else { wave };
                    *c *= Complex64::new(0.0, wave * self.alpha) / nx as f64;
                }
                inv.process(&mut buf);
                for (j, c) in buf.iter().enumerate() {
                    ux[i][j] = c.re;
                }
            }
            for j in 0..nx {
                let col: Vec<f64> = self.v[k].iter().map(|row| row[j]).collect();
                let vy = disc.diff_real(1, &col);
                for i in 0..self.y.len() {
                    worst = worst.max((ux[i][j] + vy[i]).abs());
                }
            }
        }
        worst
    }

    /// Largest `|v|` on the walls.
    pub fn wall_defect(&self) -> f64 {
        let last = self.y.len() - 1;
        self.v
            .iter()
            .flat_map(|vk| vk[0].iter().chain(vk[last].iter()))
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Largest `|u - U|` and `|v|` over all samples.
    pub fn max_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.t.len() {
            for i in 0..self.y.len() {
                for j in 0..self.x.len() {
                    worst = worst
                        .max((self.u[k][i][j] - self.base[i]).abs())
                        .max(self.v[k][i][j].abs());
                }
            }
        }
        worst
    }

    /// Largest mismatch between the first and last columns.
    pub fn periodicity_defect(&self) -> f64 {
        let last = self.x.len() - 1;
        let mut worst: f64 = 0.0;
        for k in 0..self.t.len() {
            for i in 0..self.y.len() {
                worst = worst
                    .max((self.u[k][i][0] - self.u[k][i][last]).abs())
                    .max((self.v[k][i][0] - self.v[k][i][last]).abs());
            }
        }
        worst
    }
}
