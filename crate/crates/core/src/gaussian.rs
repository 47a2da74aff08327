//! Gaussian states in xxpp quadrature ordering with vacuum variance 1.
//!
//! Quadratures are `X = a^dagger + a` and `P = i(a^dagger - a)`, so a coherent
//! amplitude `alpha` has mean `(2 Re alpha, 2 Im alpha)` and `[X, P] = 2i`.

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{
    c, hermitize, max_abs, max_abs_c, min_eigenvalue, min_eigenvalue_c, sym_det,
    symmetrize, symplectic_form, to_complex, CMat, CVec, RMat, RVec, C64,
};
use crate::modal::{ModeMap, QuadratureBasisMap};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PHYSICALITY_TOL: f64 = -1e-9;
pub const SYMPLECTIC_TOL: f64 = 1e-9;

/// Mean quadrature vector and covariance matrix of a physical Gaussian state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianStateRaw", into = "GaussianStateRaw")]
pub struct GaussianState {
    mean: RVec,
    cov: RMat,
}

#[derive(Serialize, Deserialize)]
struct GaussianStateRaw {
    n_modes: usize,
    #[serde(with = "io::rvec")]
    mean: RVec,
    #[serde(with = "io::rmat")]
    cov: RMat,
}

impl TryFrom<GaussianStateRaw> for GaussianState {
    type Error = Error;
    fn try_from(r: GaussianStateRaw) -> Result<Self> {
        if r.cov.nrows() != 2 * r.n_modes {
            return Err(Error::DimensionMismatch { expected: 2 * r.n_modes, found: r.cov.nrows() });
        }
        GaussianState::new(r.mean, r.cov)
    }
}

impl From<GaussianState> for GaussianStateRaw {
    fn from(s: GaussianState) -> Self {
        GaussianStateRaw { n_modes: s.n_modes(), mean: s.mean, cov: s.cov }
    }
}

impl GaussianState {
    /// Validates symmetry and the Heisenberg inequality at the default tolerance.
    pub fn new(mean: RVec, cov: RMat) -> Result<Self> {
        Self::with_tolerance(mean, cov, PHYSICALITY_TOL)
    }

    pub fn with_tolerance(mean: RVec, cov: RMat, physicality: f64) -> Result<Self> {
        if cov.nrows() != cov.ncols() {
            return Err(Error::NotSquare { rows: cov.nrows(), cols: cov.ncols() });
        }
        if cov.nrows() % 2 != 0 || cov.nrows() == 0 {
            return Err(Error::InvalidParam { name: "cov".into(), reason: "dimension must be even and nonzero".into() });
        }
        if mean.len() != cov.nrows() {
            return Err(Error::DimensionMismatch { expected: cov.nrows(), found: mean.len() });
        }
        let thr = physicality * cov_scale(&cov);
        match check_physical(&cov)? {
            Physicality::Ok { min_eigenvalue } | Physicality::Violation { min_eigenvalue }
                if min_eigenvalue >= thr =>
            {
                Ok(GaussianState { mean, cov: symmetrize(&cov) })
            }
            Physicality::Ok { min_eigenvalue } | Physicality::Violation { min_eigenvalue } => {
                Err(Error::NotPhysical { min_eigenvalue })
            }
        }
    }

    pub fn vacuum(n: usize) -> Self {
        GaussianState { mean: RVec::zeros(2 * n), cov: RMat::identity(2 * n, 2 * n) }
    }

    pub fn coherent(alphas: &[C64]) -> Self {
        let n = alphas.len();
        let mut mean = RVec::zeros(2 * n);
        for (i, a) in alphas.iter().enumerate() {
            mean[i] = 2.0 * a.re;
            mean[n + i] = 2.0 * a.im;
        }
        GaussianState { mean, cov: RMat::identity(2 * n, 2 * n) }
    }

    /// Product of squeezers with `var X_i = sigma_i^2`, `var P_i = sigma_i^-2`.
    pub fn squeezed(sigmas: &[f64]) -> Result<Self> {
        let n = sigmas.len();
        let mut d = RVec::zeros(2 * n);
        for (i, &s) in sigmas.iter().enumerate() {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidParam { name: "sigma".into(), reason: format!("need sigma > 0, got {s}") });
            }
            d[i] = s * s;
            d[n + i] = 1.0 / (s * s);
        }
        Ok(GaussianState { mean: RVec::zeros(2 * n), cov: RMat::from_diagonal(&d) })
    }

    pub fn thermal(kappas: &[f64]) -> Result<Self> {
        let n = kappas.len();
        let mut d = RVec::zeros(2 * n);
        for (i, &k) in kappas.iter().enumerate() {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::InvalidParam { name: "kappa".into(), reason: format!("need kappa >= 1, got {k}") });
            }
            d[i] = k;
            d[n + i] = k;
        }
        Ok(GaussianState { mean: RVec::zeros(2 * n), cov: RMat::from_diagonal(&d) })
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &RVec {
        &self.mean
    }

    pub fn cov(&self) -> &RMat {
        &self.cov
    }

    /// Tensor product, with the modes of `self` first.
    pub fn direct_sum(&self, other: &GaussianState) -> GaussianState {
        let (n, m) = (self.n_modes(), other.n_modes());
        let t = n + m;
        let mut mean = RVec::zeros(2 * t);
        let mut cov = RMat::zeros(2 * t, 2 * t);
        let idx_a = |i: usize| if i < n { i } else { t + i - n };
        let idx_b = |i: usize| if i < m { n + i } else { t + n + i - m };
        for i in 0..2 * n {
            mean[idx_a(i)] = self.mean[i];
            for j in 0..2 * n {
                cov[(idx_a(i), idx_a(j))] = self.cov[(i, j)];
            }
        }
        for i in 0..2 * m {
            mean[idx_b(i)] = other.mean[i];
            for j in 0..2 * m {
                cov[(idx_b(i), idx_b(j))] = other.cov[(i, j)];
            }
        }
        GaussianState { mean, cov }
    }

    /// Reduced state of the listed modes.
    pub fn reduce(&self, modes: &[usize]) -> Result<GaussianState> {
        let n = self.n_modes();
        if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n_modes: n });
        }
        let k = modes.len();
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|m| m + n)).collect();
        let mean = RVec::from_fn(2 * k, |i, _| self.mean[idx[i]]);
        let cov = RMat::from_fn(2 * k, 2 * k, |i, j| self.cov[(idx[i], idx[j])]);
        Ok(GaussianState { mean, cov })
    }

    pub(crate) fn from_parts_unchecked(mean: RVec, cov: RMat) -> GaussianState {
        GaussianState { mean, cov: symmetrize(&cov) }
    }
}

/// Named standard states with per-mode parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardState {
    Vacuum(usize),
    Coherent(Vec<C64>),
    Squeezed(Vec<f64>),
    Thermal(Vec<f64>),
}

pub fn standard_state(kind: &StandardState) -> Result<GaussianState> {
    match kind {
        StandardState::Vacuum(n) => Ok(GaussianState::vacuum(*n)),
        StandardState::Coherent(a) => Ok(GaussianState::coherent(a)),
        StandardState::Squeezed(s) => GaussianState::squeezed(s),
        StandardState::Thermal(k) => GaussianState::thermal(k),
    }
}

/// Outcome of the Heisenberg-inequality test `cov + i beta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Physicality {
    Ok { min_eigenvalue: f64 },
    Violation { min_eigenvalue: f64 },
}

impl Physicality {
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Physicality::Ok { min_eigenvalue } | Physicality::Violation { min_eigenvalue } => *min_eigenvalue,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Physicality::Ok { .. })
    }
}

/// Eigenvalues of `cov + i beta` carry rounding error of order
/// `eps * max|cov|`, so tolerances are scaled by this factor.
fn cov_scale(cov: &RMat) -> f64 {
    cov.iter().fold(1.0_f64, |a, x| a.max(x.abs()))
}

pub fn check_physical(cov: &RMat) -> Result<Physicality> {
    if cov.nrows() != cov.ncols() {
        return Err(Error::NotSquare { rows: cov.nrows(), cols: cov.ncols() });
    }
    if cov.nrows() % 2 != 0 {
        return Err(Error::InvalidParam { name: "cov".into(), reason: "dimension must be even".into() });
    }
    let dev = max_abs(&(cov - cov.transpose()));
    if dev > SYMMETRY_TOL * cov.iter().fold(1.0_f64, |a, x| a.max(x.abs())) {
        return Err(Error::NotSymmetric { deviation: dev });
    }
    let n = cov.nrows() / 2;
    let h = to_complex(&symmetrize(cov)) + symplectic_form(n).map(|x| c(0.0, x));
    let min_eigenvalue = min_eigenvalue_c(&h);
    Ok(if min_eigenvalue >= PHYSICALITY_TOL * cov_scale(cov) {
        Physicality::Ok { min_eigenvalue }
    } else {
        Physicality::Violation { min_eigenvalue }
    })
}

/// Real `2N x 2N` matrix with `S beta S^T = beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymplecticMapRaw", into = "SymplecticMapRaw")]
pub struct SymplecticMap {
    matrix: RMat,
}

#[derive(Serialize, Deserialize)]
struct SymplecticMapRaw {
    #[serde(with = "io::rmat")]
    matrix: RMat,
}

impl TryFrom<SymplecticMapRaw> for SymplecticMap {
    type Error = Error;
    fn try_from(r: SymplecticMapRaw) -> Result<Self> {
        validate_symplectic(&r.matrix)
    }
}

impl From<SymplecticMap> for SymplecticMapRaw {
    fn from(s: SymplecticMap) -> Self {
        SymplecticMapRaw { matrix: s.matrix }
    }
}

impl SymplecticMap {
    pub fn identity(n: usize) -> Self {
        SymplecticMap { matrix: RMat::identity(2 * n, 2 * n) }
    }

    pub fn with_tolerance(matrix: RMat, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(Error::InvalidParam { name: "matrix".into(), reason: "dimension must be even and nonzero".into() });
        }
        let b = symplectic_form(matrix.nrows() / 2);
        let dev = max_abs(&(&matrix * &b * matrix.transpose() - &b));
        if dev < tol {
            Ok(SymplecticMap { matrix })
        } else {
            Err(Error::NotSymplectic { deviation: dev })
        }
    }

    pub(crate) fn new_unchecked(matrix: RMat) -> Self {
        SymplecticMap { matrix }
    }

    /// Single-mode squeezers `X_i -> sigma_i X_i`, `P_i -> P_i / sigma_i`.
    pub fn squeezer(sigmas: &[f64]) -> Result<Self> {
        if let Some(&s) = sigmas.iter().find(|&&s| !(s > 0.0)) {
            return Err(Error::InvalidParam { name: "sigma".into(), reason: format!("need sigma > 0, got {s}") });
        }
        Ok(SymplecticMap { matrix: crate::random::squeezer_matrix(sigmas) })
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn compose(&self, other: &SymplecticMap) -> Result<SymplecticMap> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::DimensionMismatch { expected: self.n_modes(), found: other.n_modes() });
        }
        Ok(SymplecticMap { matrix: &self.matrix * &other.matrix })
    }

    /// `S^-1 = -beta S^T beta`.
    pub fn inverse(&self) -> SymplecticMap {
        let b = symplectic_form(self.n_modes());
        SymplecticMap { matrix: -(&b * self.matrix.transpose() * &b) }
    }
}

impl From<&QuadratureBasisMap> for SymplecticMap {
    fn from(o: &QuadratureBasisMap) -> Self {
        SymplecticMap { matrix: o.matrix().clone() }
    }
}

pub fn validate_symplectic(matrix: &RMat) -> Result<SymplecticMap> {
    SymplecticMap::with_tolerance(matrix.clone(), SYMPLECTIC_TOL)
}

/// `cov' = S cov S^T`, `mean' = S mean`.
pub fn apply_symplectic(s: &SymplecticMap, st: &GaussianState) -> Result<GaussianState> {
    if s.n_modes() != st.n_modes() {
        return Err(Error::DimensionMismatch { expected: st.n_modes(), found: s.n_modes() });
    }
    let cov = symmetrize(&(s.matrix() * st.cov() * s.matrix().transpose()));
    Ok(GaussianState { mean: s.matrix() * st.mean(), cov })
}

fn require_invertible(cov: &RMat) -> Result<()> {
    let m = min_eigenvalue(cov);
    if m <= 1e-12 {
        return Err(Error::SingularCovariance { min_eigenvalue: m });
    }
    Ok(())
}

/// Normalized Gaussian Wigner function
/// `exp(-(q - mu)^T cov^-1 (q - mu) / 2) / ((2 pi)^N sqrt(det cov))`.
pub fn wigner_eval(st: &GaussianState, q: &RVec) -> Result<f64> {
    if q.len() != st.cov.nrows() {
        return Err(Error::DimensionMismatch { expected: st.cov.nrows(), found: q.len() });
    }
    require_invertible(&st.cov)?;
    let ch = st.cov.clone().cholesky().ok_or(Error::SingularCovariance { min_eigenvalue: min_eigenvalue(&st.cov) })?;
    let d = q - &st.mean;
    let quad = d.dot(&ch.solve(&d));
    let det: f64 = ch.l().diagonal().iter().map(|x| x * x).product();
    let n = st.n_modes() as i32;
    Ok((-0.5 * quad).exp() / ((2.0 * PI).powi(n) * det.sqrt()))
}

/// `P = (det cov)^(-1/2)`.
pub fn purity(st: &GaussianState) -> Result<f64> {
    require_invertible(&st.cov)?;
    Ok(1.0 / sym_det(&st.cov).sqrt())
}

/// Complex Hermitian positive semidefinite `<a_m^dagger a_n>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoherencyRaw", into = "CoherencyRaw")]
pub struct CoherencyMatrix {
    matrix: CMat,
}

#[derive(Serialize, Deserialize)]
struct CoherencyRaw {
    #[serde(with = "io::cmat")]
    matrix: CMat,
}

impl TryFrom<CoherencyRaw> for CoherencyMatrix {
    type Error = Error;
    fn try_from(r: CoherencyRaw) -> Result<Self> {
        CoherencyMatrix::new(r.matrix)
    }
}

impl From<CoherencyMatrix> for CoherencyRaw {
    fn from(c: CoherencyMatrix) -> Self {
        CoherencyRaw { matrix: c.matrix }
    }
}

impl CoherencyMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let dev = max_abs_c(&(&matrix - matrix.adjoint()));
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let m = hermitize(&matrix);
        let min = min_eigenvalue_c(&m);
        if min < -1e-9 {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(CoherencyMatrix { matrix: m })
    }

    pub fn zeros(n: usize) -> Self {
        CoherencyMatrix { matrix: CMat::zeros(n, n) }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0)))))
    }

    /// Multimode coherent state with amplitudes `alpha`: `conj(alpha) alpha^T`.
    pub fn coherent(alpha: &CVec) -> Self {
        CoherencyMatrix { matrix: alpha.map(|z| z.conj()) * alpha.transpose() }
    }

    /// Single photon in the mode with amplitudes `c` on the basis (unit norm).
    pub fn single_photon(coeffs: &CVec) -> Self {
        Self::coherent(coeffs)
    }

    /// Fock product state `|n_1, n_2, ...>`.
    pub fn fock_product(ns: &[u32]) -> Self {
        let d: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        Self::from_real_diagonal(&d).expect("occupations are non-negative")
    }

    /// Statistical mixture `sum p_k C_k`.
    pub fn mixture(parts: &[(f64, CoherencyMatrix)]) -> Result<Self> {
        let n = parts.first().map_or(0, |p| p.1.dim());
        let mut m = CMat::zeros(n, n);
        for (p, cm) in parts {
            if cm.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: cm.dim() });
            }
            m += &cm.matrix * c(*p, 0.0);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The same field described on the basis of `v`: `V C V^dagger`.
    pub fn in_basis(&self, v: &ModeMap) -> Result<CoherencyMatrix> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        Ok(CoherencyMatrix { matrix: hermitize(&(v.matrix() * &self.matrix * v.matrix().adjoint())) })
    }
}

/// Coherency matrix of a Gaussian state:
/// `1/4 [Gxx + Gpp + i(Gxp - Gxp^T) - 2I] + conj(abar) abar^T` with
/// `abar = (<X> + i <P>) / 2`.
pub fn cov_to_coherency(st: &GaussianState) -> CoherencyMatrix {
    let n = st.n_modes();
    let g = &st.cov;
    let abar = CVec::from_fn(n, |m, _| c(st.mean[m], st.mean[n + m]) * 0.5);
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { 2.0 } else { 0.0 };
            let re = g[(i, j)] + g[(n + i, n + j)] - diag;
            let im = g[(i, n + j)] - g[(j, n + i)];
            m[(i, j)] = c(re, im) * 0.25 + abar[i].conj() * abar[j];
        }
    }
    CoherencyMatrix { matrix: hermitize(&m) }
}

pub fn total_photon_number(c: &CoherencyMatrix) -> f64 {
    c.matrix.trace().re
}
