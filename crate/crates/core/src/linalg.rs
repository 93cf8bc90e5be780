//! Thin wrappers over faer for the dense complex algebra used throughout.

use faer::linalg::solvers::{PartialPivLu, Solve, SolveCore};
use faer::{Conj, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn matvec(a: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), x.len());
    let mut out = vec![czero(); a.nrows()];
    for (j, xj) in x.iter().enumerate() {
        if *xj == czero() {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * xj;
        }
    }
    out
}

/// `y^H x` (Euclidean, no quadrature weights).
pub fn dot(y: &[Complex64], x: &[Complex64]) -> Complex64 {
    y.iter().zip(x).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(x: &mut [Complex64], s: Complex64) {
    for v in x {
        *v *= s;
    }
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

/// `a - shift * b`.
pub fn shifted(a: &CMat, b: &CMat, shift: Complex64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - shift * b[(i, j)])
}

/// LU factorization with a cheap singularity diagnostic.
pub struct Lu {
    lu: PartialPivLu<Complex64>,
    /// min |u_ii| / max |u_ii|
    pub pivot_ratio: f64,
}

impl Lu {
    pub fn new(a: &CMat) -> Self {
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..u.nrows() {
            let v = u[(i, i)].norm();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
        Self { lu, pivot_ratio }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut rhs = CMat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut rhs = CMat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu
            .solve_transpose_in_place_with_conj(Conj::Yes, rhs.as_mut());
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    /// Estimate of `||A^{-1}||_2` by power iteration on `(A^H A)^{-1}`.
    pub fn inverse_norm_estimate(&self, n: usize) -> f64 {
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.1))
            .collect();
        let mut est = 0.0;
        for _ in 0..6 {
            let nx = norm2(&x);
            scale(&mut x, Complex64::new(1.0 / nx, 0.0));
            let y = self.solve(&x);
            est = norm2(&y);
            x = self.solve_adjoint(&y);
            if !est.is_finite() {
                return f64::INFINITY;
            }
        }
        est
    }
}

/// `||A||_F ||A^{-1}||_2`, a cheap upper estimate of the 2-norm condition number.
pub fn condition_estimate(a: &CMat, lu: &Lu) -> f64 {
    frobenius(a) * lu.inverse_norm_estimate(a.nrows())
}

/// Generalized eigenvalues `alpha_i / beta_i` and right eigenvectors of `(a, b)`.
pub struct GenEig {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub vectors: CMat,
}

pub fn generalized_eigen(a: &CMat, b: &CMat) -> Result<GenEig> {
    let gev = a.generalized_eigen(b).map_err(|e| Error::Eigensolver {
        msg: format!("{e:?}"),
        size: a.nrows(),
        norm_a: frobenius(a),
        norm_m: frobenius(b),
    })?;
    let n = a.nrows();
    let sa = gev.S_a();
    let sb = gev.S_b();
    let alpha = (0..n).map(|i| sa[i]).collect();
    let beta = (0..n).map(|i| sb[i]).collect();
    Ok(GenEig {
        alpha,
        beta,
        vectors: gev.U().to_owned(),
    })
}
