//! Chebyshev collocation on [0, 1].
//!
//! Nodes are the Chebyshev–Gauss–Lobatto points `x_k = cos(k pi / N)` mapped
//! affinely by `y = (1 - x) / 2`, so they come out ascending with `y_0 = 0`
//! and `y_N = 1` exactly. Differentiation matrices follow the Weideman–Reddy
//! construction: node differences from trigonometric identities, the
//! flipping trick for the lower half, and the negative-sum rule on the
//! diagonal, then the recursion for higher orders.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone)]
pub struct SpectralDiscretization {
    n: usize,
    nodes: Vec<f64>,
    d: [Mat<f64>; 4],
    weights: Vec<f64>,
    bary: Vec<f64>,
}

impl SpectralDiscretization {
    /// Builds the discretization with `n + 1` nodes (polynomial degree `n`).
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Config(format!(
                "discretization needs N >= {MIN_NODES}, got {n}"
            )));
        }
        let dx = chebyshev_diff_matrices(n, 4);
        let mut d: Vec<Mat<f64>> = Vec::with_capacity(4);
        for (order, m) in dx.into_iter().enumerate() {
            // d/dy = -2 d/dx under y = (1 - x) / 2
            let scale = (-2.0f64).powi(order as i32 + 1);
            d.push(Mat::from_fn(n + 1, n + 1, |i, j| scale * m[(i, j)]));
        }
        let nodes: Vec<f64> = (0..=n)
            .map(|k| {
                let x = (PI * (n as f64 - 2.0 * k as f64) / (2.0 * n as f64)).sin();
                0.5 * (1.0 - x)
            })
            .collect();
        let mut nodes = nodes;
        nodes[0] = 0.0;
        nodes[n] = 1.0;
        if n % 2 == 0 {
            nodes[n / 2] = 0.5;
        }
        let weights = clenshaw_curtis(n).into_iter().map(|w| 0.5 * w).collect();
        let bary = (0..=n)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        let [d1, d2, d3, d4]: [Mat<f64>; 4] = d.try_into().expect("four matrices");
        Ok(Self {
            n,
            nodes,
            d: [d1, d2, d3, d4],
            weights,
            bary,
        })
    }

    /// Polynomial degree N; there are N + 1 nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Differentiation matrix of order 1..=4.
    pub fn d(&self, order: usize) -> &Mat<f64> {
        assert!((1..=4).contains(&order), "derivative order {order} not in 1..=4");
        &self.d[order - 1]
    }

    pub fn d1(&self) -> &Mat<f64> {
        &self.d[0]
    }

    pub fn d2(&self) -> &Mat<f64> {
        &self.d[1]
    }

    pub fn d3(&self) -> &Mat<f64> {
        &self.d[2]
    }

    pub fn d4(&self) -> &Mat<f64> {
        &self.d[3]
    }

    /// Applies the derivative of the given order to a complex grid function.
    pub fn diff(&self, order: usize, f: &[Complex64]) -> Vec<Complex64> {
        let d = self.d(order);
        let n = self.len();
        assert_eq!(f.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, fj) in f.iter().enumerate() {
                    acc += *fj * d[(i, j)];
                }
                acc
            })
            .collect()
    }

    pub fn diff_real(&self, order: usize, f: &[f64]) -> Vec<f64> {
        let d = self.d(order);
        let n = self.len();
        assert_eq!(f.len(), n);
        (0..n)
            .map(|i| f.iter().enumerate().map(|(j, fj)| d[(i, j)] * fj).sum())
            .collect()
    }

    /// Discrete L2(0,1) pairing `sum_j w_j conj(f_j) g_j`.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        self.check_len(f.len())?;
        self.check_len(g.len())?;
        Ok(self
            .weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| a.conj() * b * *w)
            .sum())
    }

    pub fn l2_norm(&self, f: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// Samples a closed-form function on the nodes.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().map(|&y| f(y)).collect()
    }

    /// Barycentric interpolation of grid data at an arbitrary point of [0, 1].
    pub fn interpolate(&self, f: &[Complex64], y: f64) -> Complex64 {
        let row = self.interpolation_row(y);
        row.iter().zip(f).map(|(l, v)| *v * *l).sum()
    }

    /// Lagrange basis values `l_j(y)` at one point.
    pub fn interpolation_row(&self, y: f64) -> Vec<f64> {
        let mut row = vec![0.0; self.len()];
        for (j, &yj) in self.nodes.iter().enumerate() {
            if (y - yj).abs() < 1e-15 {
                row[j] = 1.0;
                return row;
            }
        }
        let mut denom = 0.0;
        for (j, &yj) in self.nodes.iter().enumerate() {
            let t = self.bary[j] / (y - yj);
            row[j] = t;
            denom += t;
        }
        for v in &mut row {
            *v /= denom;
        }
        row
    }

    /// Chebyshev coefficients `a_k` of the interpolant, `f = sum a_k T_k(x)`.
    pub fn chebyshev_coefficients(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let nf = n as f64;
        (0..=n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, fj) in f.iter().enumerate() {
                    let c = if j == 0 || j == n { 0.5 } else { 1.0 };
                    acc += *fj * (c * (PI * (k * j % (2 * n)) as f64 / nf).cos());
                }
                let ck = if k == 0 || k == n { 1.0 / nf } else { 2.0 / nf };
                acc * ck
            })
            .collect()
    }

    /// `F(y) = int_0^y f`, exact for the interpolating polynomial.
    pub fn cumulative_integral(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let fc: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let mut a: Vec<f64> = self.chebyshev_coefficients(&fc).iter().map(|c| c.re).collect();
        a.extend([0.0, 0.0]);
        // antiderivative in x: b_1 = a_0 - a_2 / 2, b_k = (a_{k-1} - a_{k+1}) / 2k
        let mut b = vec![0.0; n + 2];
        b[1] = a[0] - 0.5 * a[2];
        for k in 2..=n + 1 {
            b[k] = (a[k - 1] - a[k + 1]) / (2.0 * k as f64);
        }
        let at_one: f64 = b.iter().sum();
        let nf = n as f64;
        (0..=n)
            .map(|j| {
                let g: f64 = b
                    .iter()
                    .enumerate()
                    .map(|(k, bk)| bk * (PI * ((k * j) % (2 * n)) as f64 / nf).cos())
                    .sum();
                // dy = -dx / 2 and y = 0 sits at x = 1
                0.5 * (at_one - g)
            })
            .collect()
    }

    /// Fraction of coefficient energy in the top third of the Chebyshev spectrum.
    pub fn tail_energy_fraction(&self, f: &[Complex64]) -> f64 {
        let a = self.chebyshev_coefficients(f);
        let total: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let start = (2 * self.len()).div_ceil(3);
        a[start..].iter().map(|c| c.norm_sqr()).sum::<f64>() / total
    }
}

/// Chebyshev–Gauss–Lobatto differentiation matrices of orders 1..=m on [-1, 1]
/// for the nodes `x_k = cos(k pi / n)`.
fn chebyshev_diff_matrices(n: usize, m: usize) -> Vec<Mat<f64>> {
    let np = n + 1;
    let nf = n as f64;
    let th: Vec<f64> = (0..np).map(|k| k as f64 * PI / nf).collect();
    let half = np / 2;
    let upper = np.div_ceil(2);

    // x_i - x_j via 2 sin((th_j + th_i)/2) sin((th_j - th_i)/2); lower half by flipping
    let mut dx = Mat::<f64>::zeros(np, np);
    for i in 0..np {
        for j in 0..np {
            dx[(i, j)] = 2.0 * ((th[j] + th[i]) / 2.0).sin() * ((th[j] - th[i]) / 2.0).sin();
        }
    }
    let top = dx.clone();
    for i in half..np {
        debug_assert!(np - 1 - i < upper);
        for j in 0..np {
            dx[(i, j)] = -top[(np - 1 - i, np - 1 - j)];
        }
    }
    for i in 0..np {
        dx[(i, i)] = 1.0;
    }

    let mut c = Mat::<f64>::zeros(np, np);
    for i in 0..np {
        for j in 0..np {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let ci = if i == 0 || i == n { 2.0 } else { 1.0 };
            let cj = if j == 0 || j == n { 2.0 } else { 1.0 };
            c[(i, j)] = sign * ci / cj;
        }
    }

    let z = Mat::from_fn(np, np, |i, j| if i == j { 0.0 } else { 1.0 / dx[(i, j)] });

    let mut out = Vec::with_capacity(m);
    let mut d = Mat::<f64>::identity(np, np);
    for ell in 1..=m {
        let l = ell as f64;
        let mut next = Mat::<f64>::zeros(np, np);
        for i in 0..np {
            let dii = d[(i, i)];
            let mut row_sum = 0.0;
            for j in 0..np {
                if i != j {
                    let v = l * z[(i, j)] * (c[(i, j)] * dii - d[(i, j)]);
                    next[(i, j)] = v;
                    row_sum += v;
                }
            }
            next[(i, i)] = -row_sum;
        }
        d = next;
        out.push(d.clone());
    }
    out
}

/// Clenshaw–Curtis weights on [-1, 1] for the nodes `cos(k pi / n)`.
fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let theta: Vec<f64> = (0..=n).map(|k| PI * k as f64 / nf).collect();
    let mut w = vec![0.0; n + 1];
    let mut v = vec![1.0; n.saturating_sub(1)];
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (idx, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta[idx + 1]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (idx, vi) in v.iter_mut().enumerate() {
            *vi -= (nf * theta[idx + 1]).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (idx, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta[idx + 1]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (idx, vi) in v.iter().enumerate() {
        w[idx + 1] = 2.0 * vi / nf;
    }
    w
}

/// Clenshaw–Curtis rule mapped to `[a, b]`: returns (points, weights).
pub fn clenshaw_curtis_panel(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let half = 0.5 * (b - a);
    let pts = (0..=n)
        .map(|k| {
            let x = (PI * k as f64 / n as f64).cos();
            a + half * (1.0 - x)
        })
        .collect();
    let w = clenshaw_curtis(n).into_iter().map(|w| w * half).collect();
    (pts, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rejects_small_n() {
        assert!(matches!(SpectralDiscretization::new(15), Err(Error::Config(_))));
        assert!(SpectralDiscretization::new(16).is_ok());
    }

    #[test]
    fn nodes_sorted_with_exact_endpoints() {
        let disc = SpectralDiscretization::new(33).unwrap();
        let y = disc.nodes();
        assert_eq!(y[0], 0.0);
        assert_eq!(y[33], 1.0);
        assert!(y.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn d1_of_sine() {
        let disc = SpectralDiscretization::new(64).unwrap();
        let f = disc.sample(|y| c((PI * y).sin()));
        let df = disc.diff(1, &f);
        let err = disc
            .nodes()
            .iter()
            .zip(&df)
            .map(|(y, d)| (d.re - PI * (PI * y).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err = {err:e}");
    }

    #[test]
    fn cumulative_integral_of_polynomial_and_exponential() {
        let g = SpectralDiscretization::new(24).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|y| 3.0 * y * y).collect();
        for (fy, y) in g.cumulative_integral(&f).iter().zip(g.nodes()) {
            assert!((fy - y.powi(3)).abs() < 1e-14);
        }
        let e: Vec<f64> = g.nodes().iter().map(|y| (2.0 * y).exp()).collect();
        for (fy, y) in g.cumulative_integral(&e).iter().zip(g.nodes()) {
            assert!((fy - 0.5 * ((2.0 * y).exp() - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn d4_of_quartic_is_24() {
        // fourth derivatives lose roughly N^8 eps to round-off
        let disc = SpectralDiscretization::new(32).unwrap();
        let f = disc.sample(|y| c(y * y * (1.0 - y) * (1.0 - y)));
        let err = disc
            .diff(4, &f)
            .iter()
            .map(|d| (d.re - 24.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "err = {err:e}");
    }

    #[test]
    fn d1_annihilates_constants() {
        for n in [16, 64, 128] {
            let disc = SpectralDiscretization::new(n).unwrap();
            let ones = vec![1.0; n + 1];
            let err = disc.diff_real(1, &ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(err < 1e-12 * (n * n) as f64, "n = {n}: {err:e}");
        }
    }

    #[test]
    fn higher_orders_match_products() {
        let disc = SpectralDiscretization::new(48).unwrap();
        let d1 = disc.d1();
        let d2 = disc.d2();
        let prod = d1 * d1;
        let rel = (&prod - d2).norm_l2() / d2.norm_l2();
        assert!(rel < 1e-10, "D2 vs D1^2: {rel:e}");
        let prod4 = d2 * d2;
        let rel4 = (&prod4 - disc.d4()).norm_l2() / disc.d4().norm_l2();
        assert!(rel4 < 1e-10, "D4 vs D2^2: {rel4:e}");
    }

    #[test]
    fn quadrature_weights() {
        let disc = SpectralDiscretization::new(32).unwrap();
        let total: f64 = disc.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        let f: Vec<f64> = disc.nodes().iter().map(|y| 6.0 * y * (1.0 - y)).collect();
        assert!((disc.integrate(&f) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_products() {
        let disc = SpectralDiscretization::new(64).unwrap();
        let one = vec![c(1.0); 65];
        assert!((disc.inner_product(&one, &one).unwrap() - 1.0).norm() < 1e-13);
        let e = disc.sample(|y| Complex64::from_polar(1.0, 2.0 * PI * y));
        assert!((disc.inner_product(&e, &e).unwrap() - 1.0).norm() < 1e-12);
        let s = disc.sample(|y| c((PI * y).sin()));
        assert!((disc.inner_product(&s, &s).unwrap() - 0.5).norm() < 1e-12);
        assert!(matches!(
            disc.inner_product(&s[..10], &s),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn spectral_convergence_of_d1() {
        // exp(sin(3 pi y)) is entire: the error must fall faster than any power
        let f = |y: f64| (3.0 * PI * y).sin().exp();
        let df = |y: f64| 3.0 * PI * (3.0 * PI * y).cos() * f(y);
        let errs: Vec<f64> = [32usize, 64, 96]
            .iter()
            .map(|&n| {
                let disc = SpectralDiscretization::new(n).unwrap();
                let v: Vec<f64> = disc.nodes().iter().map(|&y| f(y)).collect();
                disc.diff_real(1, &v)
                    .iter()
                    .zip(disc.nodes())
                    .map(|(d, &y)| (d - df(y)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        // algebraic p-th order would give err ratio (3/2)^p and (2)^p; demand far more
        assert!(errs[0] / errs[1] > 1e3, "{errs:?}");
        assert!(errs[1] < 1e-9, "{errs:?}");
    }

    #[test]
    fn polynomial_quadrature_stable_under_refinement() {
        let poly = |y: f64| 1.0 + y - 3.0 * y.powi(3) + 0.5 * y.powi(8);
        let q = |n: usize| {
            let disc = SpectralDiscretization::new(n).unwrap();
            let v: Vec<f64> = disc.nodes().iter().map(|&y| poly(y)).collect();
            disc.integrate(&v)
        };
        assert!((q(20) - q(40)).abs() < 1e-13);
    }

    #[test]
    fn interpolation_reproduces_smooth_functions() {
        let disc = SpectralDiscretization::new(40).unwrap();
        let f = disc.sample(|y| c((2.0 * y).exp()));
        for y in [0.0, 0.013, 0.5, 0.77, 1.0] {
            assert!((disc.interpolate(&f, y).re - (2.0 * y).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_coefficients_of_t2() {
        let disc = SpectralDiscretization::new(20).unwrap();
        // y = (1 - x)/2, T_2(x) = 2x^2 - 1 with x = 1 - 2y
        let f = disc.sample(|y| {
            let x = 1.0 - 2.0 * y;
            c(2.0 * x * x - 1.0)
        });
        let a = disc.chebyshev_coefficients(&f);
        assert!((a[2].re - 1.0).abs() < 1e-13);
        assert!(a.iter().enumerate().filter(|(k, _)| *k != 2).all(|(_, v)| v.norm() < 1e-13));
        assert!(disc.tail_energy_fraction(&f) < 1e-20);
    }

    #[test]
    fn panel_rule_integrates_exp() {
        let (p, w) = clenshaw_curtis_panel(0.2, 0.7, 24);
        let s: f64 = p.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((s - (0.7f64.exp() - 0.2f64.exp())).abs() < 1e-14);
    }
}
