//! Random instances used by property tests, sweeps and Monte-Carlo checks.

use crate::gaussian::{GaussianState, SymplecticMap};
use crate::linalg::{c, complex_to_real_block, CMat, CVec, RMat, RVec};
use crate::modal::{validate_unitary, ModeMap};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(normal(rng), normal(rng)))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    let v = complex_vector(rng, n);
    let norm = crate::linalg::cnorm(&v);
    v / c(norm, 0.0)
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ModeMap {
    let z = CMat::from_fn(n, n, |_, _| c(normal(rng), normal(rng)));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    validate_unitary(&q).expect("QR factor is unitary")
}

/// Random complex symmetric matrix.
pub fn complex_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| c(normal(rng), normal(rng)));
    (&a + a.transpose()) * c(0.5, 0.0)
}

/// Random real symmetric matrix with standard-normal entries.
pub fn real_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| normal(rng));
    (&a + a.transpose()) * 0.5
}

/// Random symplectic map `O1 K O2` with squeezing factors in `[1, max_sigma]`.
pub fn symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, max_sigma: f64) -> SymplecticMap {
    let o1 = complex_to_real_block(haar_unitary(rng, n).matrix());
    let o2 = complex_to_real_block(haar_unitary(rng, n).matrix());
    let sig: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..max_sigma.ln())).map(f64::exp).collect();
    let k = squeezer_matrix(&sig);
    SymplecticMap::new_unchecked(o1 * k * o2)
}

pub fn squeezer_matrix(sigmas: &[f64]) -> RMat {
    let n = sigmas.len();
    let mut d = RVec::zeros(2 * n);
    for (i, s) in sigmas.iter().enumerate() {
        d[i] = *s;
        d[n + i] = 1.0 / s;
    }
    RMat::from_diagonal(&d)
}

/// Random physical state: thermal factors in `[1, max_kappa]` dressed by a
/// random symplectic map, plus a random mean.
pub fn gaussian_state<R: Rng + ?Sized>(rng: &mut R, n: usize, max_sigma: f64, max_kappa: f64) -> GaussianState {
    let kappas: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..max_kappa)).collect();
    let s = symplectic(rng, n, max_sigma);
    let mut d = RVec::zeros(2 * n);
    for (i, k) in kappas.iter().enumerate() {
        d[i] = *k;
        d[n + i] = *k;
    }
    let cov = s.matrix() * RMat::from_diagonal(&d) * s.matrix().transpose();
    let mean = RVec::from_fn(2 * n, |_, _| normal(rng));
    GaussianState::new(mean, crate::linalg::symmetrize(&cov)).expect("constructed state is physical")
}
