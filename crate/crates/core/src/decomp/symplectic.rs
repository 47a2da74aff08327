use crate::error::{Error, Result};
use crate::gaussian::{check_physical, wigner_eval, GaussianState, SymplecticMap};
use crate::io;
use crate::linalg::{
    c, herm_eigen_desc, max_abs, min_eigenvalue, sqrt_psd, sym_eigen_desc, sym_fn, symmetrize,
    symplectic_form, CMat, RMat, RVec,
};
use crate::modal::{unitary_to_orthogonal, QuadratureBasisMap};
use crate::random::{normal, squeezer_matrix};
use rand::Rng;
use serde::Serialize;

/// `S' cov S'^T = diag(kappa, kappa)` with `kappa` ascending.
#[derive(Debug, Clone, Serialize)]
pub struct WilliamsonFactors {
    pub s_prime: SymplecticMap,
    pub kappas: Vec<f64>,
}

impl WilliamsonFactors {
    pub fn diagonal(&self) -> RMat {
        let n = self.kappas.len();
        RMat::from_diagonal(&RVec::from_fn(2 * n, |i, _| self.kappas[i % n]))
    }
}

pub fn williamson(cov: &RMat) -> Result<WilliamsonFactors> {
    if cov.nrows() != cov.ncols() || cov.nrows() % 2 != 0 {
        return Err(Error::NotSquare { rows: cov.nrows(), cols: cov.ncols() });
    }
    let n = cov.nrows() / 2;
    let min = min_eigenvalue(cov);
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let g = symmetrize(cov);
    let half = sqrt_psd(&g);
    let inv_half = sym_fn(&g, |x| 1.0 / x.sqrt());
    let omega = &half * symplectic_form(n) * &half;
    let i_omega: CMat = omega.map(|x| c(0.0, x));
    let (vals, vecs) = herm_eigen_desc(&i_omega);
    // The first N eigenvalues are the +kappa branch; reverse for ascending order.
    let mut r = RMat::zeros(2 * n, 2 * n);
    let mut kappas = Vec::with_capacity(n);
    let s2 = std::f64::consts::SQRT_2;
    for j in 0..n {
        let k = n - 1 - j;
        kappas.push(vals[k]);
        for i in 0..2 * n {
            let w = vecs[(i, k)];
            r[(i, j)] = s2 * w.im;
            r[(i, n + j)] = s2 * w.re;
        }
    }
    let d_half = RMat::from_diagonal(&RVec::from_fn(2 * n, |i, _| kappas[i % n].sqrt()));
    let s_prime = d_half * r.transpose() * inv_half;
    let s_prime = SymplecticMap::with_tolerance(s_prime, 1e-7)
        .map_err(|e| Error::NoConvergence { reason: format!("Williamson transform: {e}") })?;
    Ok(WilliamsonFactors { s_prime, kappas })
}

/// `S = O1 diag(sigma, 1/sigma) O2` with `sigma >= 1` descending.
#[derive(Debug, Clone, Serialize)]
pub struct BlochMessiahFactors {
    pub o1: QuadratureBasisMap,
    pub k: Vec<f64>,
    pub o2: QuadratureBasisMap,
}

impl BlochMessiahFactors {
    pub fn squeezer(&self) -> RMat {
        squeezer_matrix(&self.k)
    }

    pub fn reconstruct(&self) -> RMat {
        self.o1.matrix() * self.squeezer() * self.o2.matrix()
    }
}

/// Bloch-Messiah reduction via the Takagi factorization of the complex
/// symmetric matrix `A + iB` read off `(S S^T - (S S^T)^-1) / 2 = [[A, B], [B, -A]]`.
pub fn bloch_messiah(s: &SymplecticMap) -> Result<BlochMessiahFactors> {
    let n = s.n_modes();
    let b = symplectic_form(n);
    let m = symmetrize(&(s.matrix() * s.matrix().transpose()));
    let m_inv = symmetrize(&-(&b * &m * &b));
    let h = (&m - &m_inv) * 0.5;
    let cm = CMat::from_fn(n, n, |i, j| c(h[(i, j)], h[(i, n + j)]));
    let cm = (&cm + cm.transpose()) * c(0.5, 0.0);
    let t = super::takagi(&cm)?;
    let o1 = unitary_to_orthogonal(&crate::modal::ModeMap::with_tolerance(t.u.matrix().transpose(), 1e-8)?);
    let k: Vec<f64> = t.lambdas.iter().map(|&l| (0.5 * l.asinh()).exp()).collect();
    let k_inv = squeezer_matrix(&k.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
    let o2 = k_inv * o1.matrix().transpose() * s.matrix();
    let o2 = QuadratureBasisMap::from_matrix(o2, 1e-6)
        .map_err(|e| Error::NoConvergence { reason: format!("Bloch-Messiah right factor: {e}") })?;
    Ok(BlochMessiahFactors { o1, k, o2 })
}

/// `cov = O1 diag(sigma^2, sigma^-2) O1^T + gamma_c` with `gamma_c >= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicSeparation {
    pub o1: QuadratureBasisMap,
    pub k: Vec<f64>,
    #[serde(with = "io::rmat")]
    pub gamma_c: RMat,
}

impl IntrinsicSeparation {
    /// The pure squeezed part `O1 K^2 O1^T`.
    pub fn gamma_s(&self) -> RMat {
        let k = squeezer_matrix(&self.k);
        symmetrize(&(self.o1.matrix() * &k * &k * self.o1.matrix().transpose()))
    }
}

/// Split a covariance into a pure squeezed part and a classical noise part
/// through Williamson followed by Bloch-Messiah of the inverse transform.
pub fn intrinsic_separation(cov: &RMat) -> Result<IntrinsicSeparation> {
    let p = check_physical(cov)?;
    if !p.is_ok() {
        return Err(Error::NotPhysical { min_eigenvalue: p.min_eigenvalue() });
    }
    let w = williamson(cov)?;
    let s = w.s_prime.inverse();
    let bm = bloch_messiah(&s)?;
    let k = squeezer_matrix(&bm.k);
    let gamma_s = symmetrize(&(bm.o1.matrix() * &k * &k * bm.o1.matrix().transpose()));
    let gamma_c = symmetrize(&(symmetrize(cov) - gamma_s));
    let min = min_eigenvalue(&gamma_c);
    let scale = max_abs(cov).max(1.0);
    if min < -1e-8 * scale {
        return Err(Error::NoConvergence { reason: format!("classical part has eigenvalue {min:.3e}") });
    }
    Ok(IntrinsicSeparation { o1: bm.o1, k: bm.k, gamma_c })
}

/// One phase-space point of the Monte-Carlo convolution check.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloPoint {
    pub q: Vec<f64>,
    pub exact: f64,
    pub estimate: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub points: Vec<MonteCarloPoint>,
    pub samples: usize,
}

impl MonteCarloReport {
    /// True iff every estimate lies within `k` standard errors of the exact value.
    pub fn within(&self, k: f64) -> bool {
        self.points.iter().all(|p| (p.estimate - p.exact).abs() <= k * p.std_err.max(1e-300))
    }
}

/// Check `W_G(q) = E_y[W_s(q - y)]` with `y ~ N(mean, gamma_c)` at the given points.
pub fn separation_monte_carlo<R: Rng + ?Sized>(
    st: &GaussianState,
    sep: &IntrinsicSeparation,
    points: &[RVec],
    samples: usize,
    rng: &mut R,
) -> Result<MonteCarloReport> {
    let d = st.cov().nrows();
    let gamma_s = sep.gamma_s();
    let inv: Vec<f64> = crate::linalg::sym_inverse(&gamma_s).iter().copied().collect();
    let norm_s = 1.0
        / ((2.0 * std::f64::consts::PI).powi((d / 2) as i32) * crate::linalg::sym_det(&gamma_s).sqrt());
    let (vals, vecs) = sym_eigen_desc(&sep.gamma_c);
    let root = vecs * RMat::from_diagonal(&vals.map(|x| x.max(0.0).sqrt()));
    let mut draws = vec![0.0; samples * d];
    let mut xi = vec![0.0; d];
    for s in 0..samples {
        xi.iter_mut().for_each(|x| *x = normal(rng));
        for i in 0..d {
            draws[s * d + i] = st.mean()[i] + (0..d).map(|j| root[(i, j)] * xi[j]).sum::<f64>();
        }
    }
    let mut out = Vec::with_capacity(points.len());
    let mut z = vec![0.0; d];
    for q in points {
        let (mut s1, mut s2) = (0.0, 0.0);
        for y in draws.chunks_exact(d) {
            for i in 0..d {
                z[i] = q[i] - y[i];
            }
            let mut quad = 0.0;
            for j in 0..d {
                let col = &inv[j * d..(j + 1) * d];
                quad += z[j] * col.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            }
            let v = norm_s * (-0.5 * quad).exp();
            s1 += v;
            s2 += v * v;
        }
        let m = s1 / samples as f64;
        let var = (s2 / samples as f64 - m * m).max(0.0);
        out.push(MonteCarloPoint {
            q: q.iter().copied().collect(),
            exact: wigner_eval(st, q)?,
            estimate: m,
            std_err: (var / samples as f64).sqrt(),
        });
    }
    Ok(MonteCarloReport { points: out, samples })
}
