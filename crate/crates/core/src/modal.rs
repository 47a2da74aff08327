//! Modal Hilbert-space algebra: unitary mode maps, sampled mode functions and
//! the lift of a mode map to quadrature space.
//!
//! A [`ModeMap`] `U` describes a new orthonormal basis `g_n = sum_m U[n][m] f_m`
//! of the old basis `f_m`; its rows are the new modal vectors. Annihilation
//! operators transform as `a = U^T b`, so the amplitudes `c` of a field on the
//! old basis become `conj(U) c` on the new one.

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{c, cdot, cnorm, complex_to_real_block, max_abs, max_abs_c, CMat, CVec, RMat, C64};
use serde::{Deserialize, Serialize};

pub const UNITARITY_TOL: f64 = 1e-10;

/// Complex unitary `N x N` matrix whose rows are modal vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModeMapRaw", into = "ModeMapRaw")]
pub struct ModeMap {
    matrix: CMat,
}

#[derive(Serialize, Deserialize)]
struct ModeMapRaw {
    #[serde(with = "io::cmat")]
    matrix: CMat,
}

impl TryFrom<ModeMapRaw> for ModeMap {
    type Error = Error;
    fn try_from(r: ModeMapRaw) -> Result<Self> {
        validate_unitary(&r.matrix)
    }
}

impl From<ModeMap> for ModeMapRaw {
    fn from(m: ModeMap) -> Self {
        ModeMapRaw { matrix: m.matrix }
    }
}

impl ModeMap {
    pub fn identity(n: usize) -> Self {
        ModeMap { matrix: CMat::identity(n, n) }
    }

    /// Validate with a caller-chosen max-entry tolerance.
    pub fn with_tolerance(matrix: CMat, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidParam { name: "dim".into(), reason: "must be >= 1".into() });
        }
        let n = matrix.nrows();
        let dev = max_abs_c(&(&matrix * matrix.adjoint() - CMat::identity(n, n)));
        if dev < tol {
            Ok(ModeMap { matrix })
        } else {
            Err(Error::NotUnitary { deviation: dev })
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The `n`-th modal vector (row `n`).
    pub fn mode(&self, n: usize) -> CVec {
        self.matrix.row(n).transpose()
    }

    /// Product `self * other`.
    pub fn compose(&self, other: &ModeMap) -> Result<ModeMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(ModeMap { matrix: &self.matrix * &other.matrix })
    }

    pub fn adjoint(&self) -> ModeMap {
        ModeMap { matrix: self.matrix.adjoint() }
    }

    /// Block-diagonal direct sum of two mode maps.
    pub fn direct_sum(&self, other: &ModeMap) -> ModeMap {
        let (n, m) = (self.dim(), other.dim());
        let mut out = CMat::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        out.view_mut((n, n), (m, m)).copy_from(&other.matrix);
        ModeMap { matrix: out }
    }
}

/// Accept `matrix` as a [`ModeMap`] iff `max |U U^dagger - I| < 1e-10`.
pub fn validate_unitary(matrix: &CMat) -> Result<ModeMap> {
    ModeMap::with_tolerance(matrix.clone(), UNITARITY_TOL)
}

/// Unit-norm complex envelope sampled on a uniform one-dimensional grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModeFunctionRaw", into = "ModeFunctionRaw")]
pub struct ModeFunction {
    samples: Vec<C64>,
    grid_step: f64,
}

#[derive(Serialize, Deserialize)]
struct ModeFunctionRaw {
    grid_step: f64,
    samples: Vec<[f64; 2]>,
}

impl TryFrom<ModeFunctionRaw> for ModeFunction {
    type Error = Error;
    fn try_from(r: ModeFunctionRaw) -> Result<Self> {
        ModeFunction::new(r.samples.iter().map(|p| c(p[0], p[1])).collect(), r.grid_step)
    }
}

impl From<ModeFunction> for ModeFunctionRaw {
    fn from(f: ModeFunction) -> Self {
        ModeFunctionRaw {
            grid_step: f.grid_step,
            samples: f.samples.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn sampled_norm(samples: &[C64], step: f64) -> f64 {
    (samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * step).sqrt()
}

impl ModeFunction {
    /// Accepts samples whose discrete norm is 1 within 1e-10.
    pub fn new(samples: Vec<C64>, grid_step: f64) -> Result<Self> {
        if !(grid_step > 0.0) {
            return Err(Error::InvalidParam { name: "grid_step".into(), reason: "must be > 0".into() });
        }
        let norm = sampled_norm(&samples, grid_step);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(ModeFunction { samples, grid_step })
    }

    /// Rescales the samples to unit discrete norm.
    pub fn normalized(samples: Vec<C64>, grid_step: f64) -> Result<Self> {
        if !(grid_step > 0.0) {
            return Err(Error::InvalidParam { name: "grid_step".into(), reason: "must be > 0".into() });
        }
        let norm = sampled_norm(&samples, grid_step);
        if norm < 1e-300 {
            return Err(Error::ZeroVector { norm });
        }
        Ok(ModeFunction { samples: samples.into_iter().map(|z| z / norm).collect(), grid_step })
    }

    /// Sampled Hermite-Gauss function of order `n` with waist `w` (the
    /// standard deviation of `|HG_0|^2`), centred at `center`, on the grid
    /// `start + k * step` for `k < points`.
    pub fn hermite_gauss(n: usize, w: f64, center: f64, start: f64, step: f64, points: usize) -> Result<Self> {
        let samples = (0..points)
            .map(|k| c(hermite_gauss_value(n, w, start + k as f64 * step - center), 0.0))
            .collect();
        ModeFunction::normalized(samples, step)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Continuum Hermite-Gauss function `HG_n(x)` with `int |HG_n|^2 dx = 1` and
/// `<x^2> = (2n + 1) w^2`.
pub fn hermite_gauss_value(n: usize, w: f64, x: f64) -> f64 {
    let xi = x / (std::f64::consts::SQRT_2 * w);
    let scale = (std::f64::consts::SQRT_2 * w).sqrt();
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * xi * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur / scale
}

/// Discrete inner product `sum conj(f_k) g_k * step`.
pub fn mode_overlap(f: &ModeFunction, g: &ModeFunction) -> Result<C64> {
    if f.len() != g.len() || (f.grid_step - g.grid_step).abs() > 1e-15 * f.grid_step.abs() {
        return Err(Error::GridMismatch);
    }
    let s: C64 = f.samples.iter().zip(&g.samples).map(|(a, b)| a.conj() * b).sum();
    Ok(s * f.grid_step)
}

/// Amplitudes of a field on the new basis given its amplitudes `coeffs` on the
/// old one: `conj(U) coeffs`.
pub fn apply_basis_change(u: &ModeMap, coeffs: &CVec) -> Result<CVec> {
    if coeffs.len() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: coeffs.len() });
    }
    Ok(u.matrix.map(|z| z.conj()) * coeffs)
}

/// Real orthogonal symplectic `2N x 2N` image `[[Re U, Im U], [-Im U, Re U]]`
/// of a mode map, acting on xxpp quadratures as `q' = O q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadratureBasisMapRaw", into = "QuadratureBasisMapRaw")]
pub struct QuadratureBasisMap {
    matrix: RMat,
}

#[derive(Serialize, Deserialize)]
struct QuadratureBasisMapRaw {
    #[serde(with = "io::rmat")]
    matrix: RMat,
}

impl TryFrom<QuadratureBasisMapRaw> for QuadratureBasisMap {
    type Error = Error;
    fn try_from(r: QuadratureBasisMapRaw) -> Result<Self> {
        QuadratureBasisMap::from_matrix(r.matrix, 1e-10)
    }
}

impl From<QuadratureBasisMap> for QuadratureBasisMapRaw {
    fn from(m: QuadratureBasisMap) -> Self {
        QuadratureBasisMapRaw { matrix: m.matrix }
    }
}

impl QuadratureBasisMap {
    pub fn identity(n: usize) -> Self {
        QuadratureBasisMap { matrix: RMat::identity(2 * n, 2 * n) }
    }

    /// Accepts an orthogonal matrix with the `[[A, B], [-B, A]]` block form.
    pub fn from_matrix(matrix: RMat, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(Error::InvalidParam { name: "matrix".into(), reason: "dimension must be even".into() });
        }
        let d = matrix.nrows();
        let dev = max_abs(&(&matrix * matrix.transpose() - RMat::identity(d, d)));
        if dev > tol {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        let n = d / 2;
        let a = matrix.view((0, 0), (n, n));
        let b = matrix.view((0, n), (n, n));
        let block_dev = max_abs(&(a - matrix.view((n, n), (n, n))))
            .max(max_abs(&(b + matrix.view((n, 0), (n, n)))));
        if block_dev > tol {
            return Err(Error::NotSymplectic { deviation: block_dev });
        }
        Ok(QuadratureBasisMap { matrix })
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn transpose(&self) -> QuadratureBasisMap {
        QuadratureBasisMap { matrix: self.matrix.transpose() }
    }

    /// The mode map this matrix is the image of.
    pub fn to_mode_map(&self) -> ModeMap {
        ModeMap { matrix: crate::linalg::real_block_to_complex(&self.matrix) }
    }
}

pub fn unitary_to_orthogonal(u: &ModeMap) -> QuadratureBasisMap {
    QuadratureBasisMap { matrix: complex_to_real_block(&u.matrix) }
}

/// Complete `f` to an orthonormal basis whose first vector is `f / |f|`.
///
/// The remaining rows come from modified Gram-Schmidt over the canonical
/// vectors `e_1, e_2, ...`, skipping candidates with residual norm below 1e-8.
pub fn extend_to_basis(f: &CVec) -> Result<ModeMap> {
    let norm = cnorm(f);
    if norm <= 1e-12 {
        return Err(Error::ZeroVector { norm });
    }
    let n = f.len();
    let mut basis: Vec<CVec> = vec![f / c(norm, 0.0)];
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[k] = c(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let p = cdot(b, &v);
                v -= b * p;
            }
        }
        let r = cnorm(&v);
        if r >= 1e-8 {
            basis.push(v / c(r, 0.0));
        }
    }
    let mut m = CMat::zeros(n, n);
    for (i, b) in basis.iter().enumerate() {
        for j in 0..n {
            m[(i, j)] = b[j];
        }
    }
    validate_unitary(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symplectic_form;
    use crate::random::haar_unitary;
    use rand::SeedableRng;

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(7)
    }

    #[test]
    fn validate_examples() {
        assert!(validate_unitary(&CMat::identity(3, 3)).is_ok());
        let h = 1.0 / 2f64.sqrt();
        let bs = CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]);
        assert!(validate_unitary(&bs).is_ok());
        let bad = CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(h, 0.)]);
        assert!(matches!(validate_unitary(&bad), Err(Error::NotUnitary { .. })));
        assert!(matches!(validate_unitary(&CMat::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn overlap_examples() {
        let f0 = ModeFunction::hermite_gauss(0, 1.0, 0.0, -15.0, 0.01, 3001).unwrap();
        let f1 = ModeFunction::hermite_gauss(1, 1.0, 0.0, -15.0, 0.01, 3001).unwrap();
        assert!((mode_overlap(&f0, &f0).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(mode_overlap(&f0, &f1).unwrap().norm() < 1e-6);
        let short = ModeFunction::hermite_gauss(0, 1.0, 0.0, -15.0, 0.01, 3000).unwrap();
        assert_eq!(mode_overlap(&f0, &short), Err(Error::GridMismatch));
    }

    #[test]
    fn shifted_overlap_matches_refined_grid() {
        let coarse = |step: f64| {
            let pts = (30.0 / step) as usize + 1;
            let a = ModeFunction::hermite_gauss(0, 1.0, 0.0, -15.0, step, pts).unwrap();
            let b = ModeFunction::hermite_gauss(0, 1.0, 1.0, -15.0, step, pts).unwrap();
            mode_overlap(&a, &b).unwrap().re
        };
        let v = coarse(0.02);
        assert!((v - coarse(0.01)).abs() < 1e-6);
        assert!((v - (-1.0f64 / 8.0).exp()).abs() < 1e-6);
    }

    #[test]
    fn basis_change_examples() {
        let c0 = CVec::from_vec(vec![c(0.3, 0.1), c(-0.2, 0.5)]);
        assert_eq!(apply_basis_change(&ModeMap::identity(2), &c0).unwrap(), c0);
        let h = 1.0 / 2f64.sqrt();
        let bs = validate_unitary(&CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])).unwrap();
        let out = apply_basis_change(&bs, &CVec::from_vec(vec![c(1., 0.), c(0., 0.)])).unwrap();
        assert!((out[0] - c(h, 0.)).norm() < 1e-15 && (out[1] - c(h, 0.)).norm() < 1e-15);
        assert!(matches!(apply_basis_change(&bs, &CVec::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn orthogonal_lift_examples() {
        assert_eq!(unitary_to_orthogonal(&ModeMap::identity(2)).matrix(), &RMat::identity(4, 4));
        let iu = validate_unitary(&(CMat::identity(2, 2) * c(0.0, 1.0))).unwrap();
        assert!(max_abs(&(unitary_to_orthogonal(&iu).matrix() - symplectic_form(2))) < 1e-15);
        let u = haar_unitary(&mut rng(), 3);
        let o = unitary_to_orthogonal(&u);
        let b = symplectic_form(3);
        assert!(max_abs(&(o.matrix() * &b * o.matrix().transpose() - &b)) < 1e-12);
    }

    #[test]
    fn extend_examples() {
        let e = extend_to_basis(&CVec::from_vec(vec![c(1., 0.), c(0., 0.), c(0., 0.)])).unwrap();
        assert!(max_abs_c(&(e.matrix() - CMat::identity(3, 3))) < 1e-15);
        let h = 1.0 / 2f64.sqrt();
        let e2 = extend_to_basis(&CVec::from_vec(vec![c(h, 0.), c(h, 0.)])).unwrap();
        let second = e2.mode(1);
        assert!((second[0] + second[1]).norm() < 1e-12 && (second[0].norm() - h).abs() < 1e-12);
        assert!(matches!(extend_to_basis(&CVec::zeros(2)), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn extend_then_change_gives_first_canonical_vector() {
        let mut r = rng();
        let f = crate::random::complex_vector(&mut r, 5);
        let u = extend_to_basis(&f).unwrap();
        let out = apply_basis_change(&u, &f).unwrap();
        assert!((out[0] - c(cnorm(&f), 0.0)).norm() < 1e-12);
        assert!(out.iter().skip(1).all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn json_roundtrip() {
        let u = haar_unitary(&mut rng(), 2);
        let s = serde_json::to_string(&u).unwrap();
        let back: ModeMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
        let f = ModeFunction::hermite_gauss(1, 1.0, 0.0, -5.0, 0.5, 21).unwrap();
        let back: ModeFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
