//! Dense linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::cmp::Ordering;

pub type C64 = Complex64;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<C64>;

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-entry deviation accepted for `U U^dagger = I`.
    pub unitarity: f64,
    /// Max-entry deviation accepted for `S beta S^T = beta`.
    pub symplectic: f64,
    /// Lower bound accepted for the minimum eigenvalue of `cov + i beta`.
    pub physicality: f64,
    /// Relative rank threshold (fraction of the largest eigenvalue).
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unitarity: 1e-10, symplectic: 1e-9, physicality: -1e-9, rank: 1e-10 }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The symplectic form `beta = [[0, I], [-I, 0]]` in xxpp ordering.
pub fn symplectic_form(n: usize) -> RMat {
    let mut b = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        b[(i, n + i)] = 1.0;
        b[(n + i, i)] = -1.0;
    }
    b
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.norm()))
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Lift a complex matrix `A + iB` to the real block form `[[A, B], [-B, A]]`.
pub fn complex_to_real_block(u: &CMat) -> RMat {
    let n = u.nrows();
    let mut o = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            o[(i, j)] = z.re;
            o[(i, n + j)] = z.im;
            o[(n + i, j)] = -z.im;
            o[(n + i, n + j)] = z.re;
        }
    }
    o
}

/// Inverse of [`complex_to_real_block`], reading the top row of blocks.
pub fn real_block_to_complex(o: &RMat) -> CMat {
    let n = o.nrows() / 2;
    CMat::from_fn(n, n, |i, j| c(o[(i, j)], o[(i, n + j)]))
}

fn lex_real(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return y.partial_cmp(x).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// Eigen-decomposition of a real symmetric matrix with eigenvalues in
/// descending order; eigenvectors are the columns of the returned matrix.
/// Ties are broken by lexicographic comparison of eigenvector entries.
pub fn sym_eigen_desc(m: &RMat) -> (RVec, RMat) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = m.nrows();
    let mut vecs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_sign_real(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    vecs.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-12 * scale {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        } else {
            lex_real(&a.1, &b.1)
        }
    });
    let vals = RVec::from_iterator(n, vecs.iter().map(|x| x.0));
    let mut out = RMat::zeros(n, n);
    for (k, (_, v)) in vecs.iter().enumerate() {
        for i in 0..n {
            out[(i, k)] = v[i];
        }
    }
    (vals, out)
}

fn fix_sign_real(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if let Some(x) = v.iter().find(|x| x.abs() >= 0.5 * max) {
        if *x < 0.0 {
            v.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

/// Rotate a complex vector so its first large entry is real and positive.
pub fn fix_phase(v: &mut CVec) {
    let max = v.iter().fold(0.0_f64, |a, x| a.max(x.norm()));
    if max == 0.0 {
        return;
    }
    if let Some(x) = v.iter().find(|x| x.norm() >= 0.5 * max).copied() {
        let ph = x.conj() / x.norm();
        v.iter_mut().for_each(|y| *y *= ph);
    }
}

/// Eigen-decomposition of a complex Hermitian matrix, eigenvalues descending,
/// eigenvector phases fixed by [`fix_phase`].
pub fn herm_eigen_desc(m: &CMat) -> (RVec, CMat) {
    let n = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut vecs: Vec<(f64, CVec)> = (0..n)
        .map(|k| {
            let mut v: CVec = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    vecs.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-12 * scale {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        } else {
            let ra: Vec<f64> = a.1.iter().map(|z| z.re).collect();
            let rb: Vec<f64> = b.1.iter().map(|z| z.re).collect();
            lex_real(&ra, &rb)
        }
    });
    let vals = RVec::from_iterator(n, vecs.iter().map(|x| x.0));
    let mut out = CMat::zeros(n, n);
    for (k, (_, v)) in vecs.iter().enumerate() {
        out.set_column(k, v);
    }
    (vals, out)
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &RMat) -> f64 {
    symmetrize(m).symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &x| a.min(x))
}

/// Smallest eigenvalue of a complex Hermitian matrix.
pub fn min_eigenvalue_c(m: &CMat) -> f64 {
    hermitize(m).symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &x| a.min(x))
}

/// Apply `f` to the spectrum of a real symmetric matrix.
pub fn sym_fn(m: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let eig = symmetrize(m).symmetric_eigen();
    let d = RMat::from_diagonal(&eig.eigenvalues.map(f));
    symmetrize(&(&eig.eigenvectors * d * eig.eigenvectors.transpose()))
}

/// Principal square root of a real symmetric positive semidefinite matrix.
pub fn sqrt_psd(m: &RMat) -> RMat {
    sym_fn(m, |x| x.max(0.0).sqrt())
}

/// Inverse of a real symmetric matrix through its spectrum.
pub fn sym_inverse(m: &RMat) -> RMat {
    sym_fn(m, |x| 1.0 / x)
}

/// Determinant of a real symmetric positive definite matrix via Cholesky.
pub fn sym_det(m: &RMat) -> f64 {
    match symmetrize(m).cholesky() {
        Some(ch) => ch.l().diagonal().iter().map(|x| x * x).product(),
        None => m.determinant(),
    }
}

pub fn kron(a: &RMat, b: &RMat) -> RMat {
    a.kronecker(b)
}

pub fn cnorm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `sum_k conj(a_k) b_k`.
pub fn cdot(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Real quadrature directions `(v_X, v_P)` of the mode with amplitude
/// vector `g`, so that `X_g = v_X . q` and `P_g = v_P . q`.
pub fn quadrature_directions(g: &CVec) -> (RVec, RVec) {
    let n = g.len();
    let mut vx = RVec::zeros(2 * n);
    let mut vp = RVec::zeros(2 * n);
    for m in 0..n {
        vx[m] = g[m].re;
        vx[n + m] = g[m].im;
        vp[m] = -g[m].im;
        vp[n + m] = g[m].re;
    }
    (vx, vp)
}

/// Direction of the rotated quadrature `X_phi = cos(phi) X_g + sin(phi) P_g`.
pub fn quadrature_direction(g: &CVec, phi: f64) -> RVec {
    let (vx, vp) = quadrature_directions(g);
    vx * phi.cos() + vp * phi.sin()
}
