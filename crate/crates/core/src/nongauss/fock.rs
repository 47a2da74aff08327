//! Brute-force number-basis representation of (de-)Gaussified states with at
//! most two modes. Used as a verification oracle.

use super::PhotonOp;
use super::PhaseSpaceFunction;
use crate::decomp::{bloch_messiah, williamson};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{c, cnorm, real_block_to_complex, CMat, CVec, RMat, RVec, C64};
use crate::modal::QuadratureBasisMap;
use std::f64::consts::PI;

/// A Gaussian base state followed by a sequence of photon operations.
#[derive(Debug, Clone)]
pub struct FockSpec {
    pub base: GaussianState,
    pub ops: Vec<(PhotonOp, CVec)>,
}

/// Truncated density matrix; for two modes the index is `n1 * cutoff + n2`.
#[derive(Debug, Clone)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    rho: CMat,
    captured_trace: f64,
}

/// Working space: `dim` levels per mode, density matrix over `dim^n_modes`.
struct Work {
    n: usize,
    dim: usize,
    rho: CMat,
}

impl Work {
    fn left_local(&self, l: &CMat, mode: usize, x: &CMat) -> CMat {
        left_local(self.n, self.dim, l, mode, x)
    }

    /// `rho -> L rho L^dagger` computed as `L (L rho)^dagger`.
    fn conjugate_local(&mut self, l: &CMat, mode: usize) {
        let lr = self.left_local(l, mode, &self.rho);
        self.rho = hermitian_part(&self.left_local(l, mode, &lr.adjoint()));
    }

    fn conjugate_passive(&mut self, u: &Passive) {
        let ur = u.left(&self.rho);
        self.rho = hermitian_part(&u.left(&ur.adjoint()));
    }

    fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

/// `(L on mode j) * X` for a `dim x dim` single-mode matrix `L` acting on a
/// space of `n` modes with `dim` levels each.
fn left_local(n: usize, dim: usize, l: &CMat, mode: usize, x: &CMat) -> CMat {
    if n == 1 {
        return l * x;
    }
    let d = dim;
    let cols = x.ncols();
    let mut out = CMat::zeros(x.nrows(), cols);
    for a in 0..d {
        for b in 0..d {
            let row = a * d + b;
            for k in 0..d {
                let (coef, src) = if mode == 0 { (l[(a, k)], k * d + b) } else { (l[(b, k)], a * d + k) };
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..cols {
                    out[(row, col)] += coef * x[(src, col)];
                }
            }
        }
    }
    out
}

/// Block-diagonal passive unitary: one block per total photon number.
struct Passive {
    blocks: Vec<(Vec<usize>, CMat)>,
}

impl Passive {
    fn left(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(x.nrows(), x.ncols());
        for (idx, u) in &self.blocks {
            let sub = CMat::from_fn(idx.len(), x.ncols(), |i, j| x[(idx[i], j)]);
            let prod = u * sub;
            for (i, &r) in idx.iter().enumerate() {
                out.row_mut(r).copy_from(&prod.row(i));
            }
        }
        out
    }
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn lowering(d: usize) -> CMat {
    let mut a = CMat::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// `exp(-i H)` for Hermitian `H`, truncated to the leading `keep` levels.
fn exp_minus_i(h: &CMat, keep: usize) -> CMat {
    let u = (h * c(0.0, -1.0)).exp();
    u.view((0, 0), (keep, keep)).into_owned()
}

/// Single-mode operator with `U^dag X U = sigma X`, `U^dag P U = P / sigma`:
/// `exp(zeta/2 (a^dag^2 - a^2))`, `zeta = ln sigma`.
fn squeezer(sigma: f64, keep: usize, pad: usize) -> CMat {
    let d = keep + pad;
    let z = sigma.ln();
    let mut h = CMat::zeros(d, d);
    for n in 0..d.saturating_sub(2) {
        let v = 0.5 * z * (((n + 1) * (n + 2)) as f64).sqrt();
        h[(n + 2, n)] = c(0.0, v);
        h[(n, n + 2)] = c(0.0, -v);
    }
    exp_minus_i(&h, keep)
}

/// `D(alpha) = exp(alpha a^dag - conj(alpha) a)`.
fn displacement(alpha: C64, keep: usize, pad: usize) -> CMat {
    let d = keep + pad;
    let mut h = CMat::zeros(d, d);
    let i = c(0.0, 1.0);
    for n in 0..d - 1 {
        let s = ((n + 1) as f64).sqrt();
        h[(n + 1, n)] = i * alpha * s;
        h[(n, n + 1)] = -i * alpha.conj() * s;
    }
    exp_minus_i(&h, keep)
}

/// Fock-space unitary with `U^dag q U = O q` for a passive quadrature map.
/// On annihilation operators this is `a -> (A - iB) a` with
/// `O = [[A, B], [-B, A]]`; the generator `sum h_kl a_k^dag a_l` has
/// `h = i log(A - iB)` and is block diagonal in total photon number.
fn passive(o: &QuadratureBasisMap, n: usize, dim: usize) -> Passive {
    let m = real_block_to_complex(o.matrix()).map(|z| z.conj());
    let schur = m.clone().schur();
    let (q, t) = schur.unpack();
    let h = &q * CMat::from_diagonal(&CVec::from_fn(n, |k, _| c(-t[(k, k)].arg(), 0.0))) * q.adjoint();
    if n == 1 {
        let theta = h[(0, 0)].re;
        let blocks = (0..dim).map(|k| (vec![k], CMat::from_element(1, 1, C64::from_polar(1.0, -theta * k as f64)))).collect();
        return Passive { blocks };
    }
    let mut blocks = Vec::with_capacity(2 * dim - 1);
    for total in 0..(2 * dim - 1) {
        let states: Vec<(usize, usize)> = (0..dim).filter(|&a| total >= a && total - a < dim).map(|a| (a, total - a)).collect();
        let k = states.len();
        let mut hb = CMat::zeros(k, k);
        for (col, &(a, b)) in states.iter().enumerate() {
            let occ = [a, b];
            for (row, &(a2, b2)) in states.iter().enumerate() {
                let occ2 = [a2, b2];
                let mut v = c(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        // <occ2| a_i^dag a_j |occ>
                        if i == j {
                            if occ2 == occ {
                                v += h[(i, i)] * occ[i] as f64;
                            }
                        } else if occ[j] >= 1 {
                            let mut moved = occ;
                            moved[j] -= 1;
                            moved[i] += 1;
                            if moved == occ2 {
                                v += h[(i, j)] * ((occ[j] * (occ[i] + 1)) as f64).sqrt();
                            }
                        }
                    }
                }
                hb[(row, col)] = v;
            }
        }
        blocks.push((states.iter().map(|&(a, b)| a * dim + b).collect(), exp_minus_i(&hb, k)));
    }
    Passive { blocks }
}

fn thermal_populations(kappa: f64, dim: usize) -> Vec<f64> {
    let nbar = ((kappa - 1.0) / 2.0).max(0.0);
    if nbar == 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return p;
    }
    let r = nbar / (nbar + 1.0);
    (0..dim).map(|k| r.powi(k as i32) / (nbar + 1.0)).collect()
}

/// Builds the number-basis density matrix of `spec` truncated to `cutoff`
/// levels per mode.
pub fn fock_oracle(spec: &FockSpec, cutoff: usize) -> Result<FockState> {
    let n = spec.base.n_modes();
    if n > 2 {
        return Err(Error::TooManyModes { n_modes: n });
    }
    if cutoff < 10 {
        return Err(Error::CutoffTooSmall { cutoff, reason: "cutoff must be at least 10".into() });
    }
    for (_, g) in &spec.ops {
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
        let norm = cnorm(g);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
    }
    let (dim, pad) = if n == 1 { ((2 * cutoff).max(cutoff + 40), 60) } else { (cutoff + 10, 40) };
    let w = williamson(spec.base.cov())?;
    let s = w.s_prime.inverse();
    let bm = bloch_messiah(&s)?;

    let pops: Vec<Vec<f64>> = w.kappas.iter().map(|&k| thermal_populations(k, dim)).collect();
    let size = dim.pow(n as u32);
    let diag = RVec::from_fn(size, |idx, _| if n == 1 { pops[0][idx] } else { pops[0][idx / dim] * pops[1][idx % dim] });
    let mut work = Work { n, dim, rho: CMat::from_diagonal(&diag.map(|x| c(x, 0.0))) };

    work.conjugate_passive(&passive(&bm.o2, n, dim));
    for (j, &sigma) in bm.k.iter().enumerate() {
        if (sigma - 1.0).abs() > 1e-14 {
            work.conjugate_local(&squeezer(sigma, dim, pad), j);
        }
    }
    work.conjugate_passive(&passive(&bm.o1, n, dim));
    let mean = spec.base.mean();
    for j in 0..n {
        let alpha = c(mean[j] / 2.0, mean[n + j] / 2.0);
        if alpha.norm() > 0.0 {
            work.conjugate_local(&displacement(alpha, dim, pad), j);
        }
    }

    let a = lowering(dim);
    let a_dag = a.adjoint();
    for (op, g) in &spec.ops {
        // b_g = sum conj(g_m) a_m
        let apply = |x: &CMat| -> CMat {
            let mut acc = CMat::zeros(x.nrows(), x.ncols());
            for m in 0..n {
                let (coef, l) = match op {
                    PhotonOp::Subtract => (g[m].conj(), &a),
                    PhotonOp::Add => (g[m], &a_dag),
                };
                if coef.norm() > 0.0 {
                    acc += work.left_local(l, m, x) * coef;
                }
            }
            acc
        };
        let br = apply(&work.rho);
        let next = hermitian_part(&apply(&br.adjoint()));
        let tr = next.trace().re;
        if !(tr > 1e-14) {
            return Err(Error::VacuumSubtraction { denominator: tr });
        }
        work.rho = next / c(tr, 0.0);
    }

    let full = work.trace();
    let keep: Vec<usize> = (0..size)
        .filter(|&idx| if n == 1 { idx < cutoff } else { idx / dim < cutoff && idx % dim < cutoff })
        .collect();
    let k = keep.len();
    let rho = CMat::from_fn(k, k, |i, j| work.rho[(keep[i], keep[j])]);
    let captured = rho.trace().re / full;
    if captured < 1.0 - 1e-6 {
        return Err(Error::CutoffTooSmall { cutoff, reason: format!("captured trace {captured:.9}") });
    }
    let tr = rho.trace().re;
    Ok(FockState { n_modes: n, cutoff, rho: rho / c(tr, 0.0), captured_trace: captured })
}

/// `f_n^(k)(x) = sqrt(n!/(n+k)!) x^(k/2) e^(-x/2) L_n^(k)(x)` for `n < len`,
/// via the normalized three-term recurrence.
fn laguerre_functions(k: usize, x: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    let kf = k as f64;
    let pref = if x > 0.0 {
        (0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_factorial(k)).exp()
    } else if k == 0 {
        1.0
    } else {
        0.0
    };
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = pref;
    for n in 0..len.saturating_sub(1) {
        let nf = n as f64;
        let next = ((2.0 * nf + kf + 1.0 - x) * cur - (nf * (nf + kf)).sqrt() * prev) / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        out[n + 1] = pref * cur;
    }
    out
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// `W_{|m><n|}(x, p)` for all `m, n < d`, with `alpha = (x + ip)/2`.
fn wigner_table(x: f64, p: f64, d: usize) -> CMat {
    let alpha = c(x / 2.0, p / 2.0);
    let r = 4.0 * alpha.norm_sqr();
    let theta = alpha.arg();
    let mut t = CMat::zeros(d, d);
    let base = 1.0 / (2.0 * PI);
    for k in 0..d {
        let f = laguerre_functions(k, r, d - k);
        let ph = C64::from_polar(1.0, -(k as f64) * theta);
        for nn in 0..(d - k) {
            let sign = if nn % 2 == 0 { 1.0 } else { -1.0 };
            let v = ph * (base * sign * f[nn]);
            t[(nn + k, nn)] = v;
            t[(nn, nn + k)] = v.conj();
        }
    }
    t
}

impl FockState {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn density_matrix(&self) -> &CMat {
        &self.rho
    }

    /// Trace retained by the truncation before renormalization.
    pub fn captured_trace(&self) -> f64 {
        self.captured_trace
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    fn occupations(&self, idx: usize) -> (usize, usize) {
        if self.n_modes == 1 {
            (idx, 0)
        } else {
            (idx / self.cutoff, idx % self.cutoff)
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.rho.nrows())
            .map(|i| {
                let (a, b) = self.occupations(i);
                self.rho[(i, i)].re * (a + b) as f64
            })
            .sum()
    }

    /// Partial trace onto one mode.
    pub fn reduced(&self, mode: usize) -> Result<FockState> {
        if mode >= self.n_modes {
            return Err(Error::IndexOutOfRange { index: mode, n_modes: self.n_modes });
        }
        if self.n_modes == 1 {
            return Ok(self.clone());
        }
        let d = self.cutoff;
        let mut r = CMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut s = c(0.0, 0.0);
                for k in 0..d {
                    s += if mode == 0 { self.rho[(a * d + k, b * d + k)] } else { self.rho[(k * d + a, k * d + b)] };
                }
                r[(a, b)] = s;
            }
        }
        Ok(FockState { n_modes: 1, cutoff: d, rho: r, captured_trace: self.captured_trace })
    }

    /// `Tr(rho L)` for an operator built from single-mode factors.
    fn expect(&self, ops: &[(usize, CMat)]) -> C64 {
        let mut x = self.rho.clone();
        for (mode, l) in ops.iter().rev() {
            x = left_local(self.n_modes, self.cutoff, l, *mode, &x);
        }
        x.trace()
    }

    /// Quadrature means in xxpp order.
    pub fn mean(&self) -> RVec {
        let n = self.n_modes;
        let a = lowering(self.cutoff);
        let mut m = RVec::zeros(2 * n);
        for j in 0..n {
            let e = self.expect(&[(j, a.clone())]);
            m[j] = 2.0 * e.re;
            m[n + j] = 2.0 * e.im;
        }
        m
    }

    /// Symmetrized quadrature covariance from second moments of `a`, `a^dag`.
    pub fn covariance(&self) -> RMat {
        let n = self.n_modes;
        let a = lowering(self.cutoff);
        let ad = a.adjoint();
        let mean = self.mean();
        let mut g = RMat::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let aa = self.expect(&[(j, a.clone()), (k, a.clone())]);
                let dn = self.expect(&[(j, ad.clone()), (k, a.clone())]);
                let delta = if j == k { 1.0 } else { 0.0 };
                g[(j, k)] = 2.0 * aa.re + 2.0 * dn.re + delta - mean[j] * mean[k];
                g[(n + j, n + k)] = -2.0 * aa.re + 2.0 * dn.re + delta - mean[n + j] * mean[n + k];
                let xp = 2.0 * aa.im + 2.0 * dn.im - mean[j] * mean[n + k];
                g[(j, n + k)] = xp;
                g[(n + k, j)] = xp;
            }
        }
        g
    }

    /// Exact Wigner function at `q` (xxpp order).
    pub fn wigner(&self, q: &[f64]) -> Result<f64> {
        let n = self.n_modes;
        if q.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: q.len() });
        }
        let d = self.cutoff;
        if n == 1 {
            let t = wigner_table(q[0], q[1], d);
            let mut s = c(0.0, 0.0);
            for m in 0..d {
                for k in 0..d {
                    s += self.rho[(m, k)] * t[(m, k)];
                }
            }
            return Ok(s.re);
        }
        let t1 = wigner_table(q[0], q[2], d);
        let t2 = wigner_table(q[1], q[3], d);
        let mut s = c(0.0, 0.0);
        for m1 in 0..d {
            for m2 in 0..d {
                let row = m1 * d + m2;
                for n1 in 0..d {
                    let w1 = t1[(m1, n1)];
                    for n2 in 0..d {
                        s += self.rho[(row, n1 * d + n2)] * w1 * t2[(m2, n2)];
                    }
                }
            }
        }
        Ok(s.re)
    }
}

impl PhaseSpaceFunction for FockState {
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn value(&self, q: &[f64]) -> f64 {
        self.wigner(q).unwrap_or(f64::NAN)
    }
}
