//! Measurement models: homodyne projections, covariance reconstruction from a
//! series of homodyne settings, multiplexed-homodyne emulation and
//! Hong-Ou-Mandel coincidences.

use crate::error::{Error, Result};
use crate::gaussian::{total_photon_number, CoherencyMatrix, GaussianState};
use crate::linalg::{c, cnorm, max_abs, quadrature_direction, symmetrize, CMat, CVec, RMat, C64};
use crate::modal::ModeMap;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

fn normalize_lo(lo: &CVec) -> Result<CVec> {
    let n = cnorm(lo);
    if n < 1e-12 {
        return Err(Error::ZeroLO);
    }
    let dev = (n - 1.0).abs();
    if dev > 1e-6 {
        return Err(Error::NotNormalized { norm: n });
    }
    if dev > 1e-15 {
        log::warn!("local oscillator norm {n} renormalized");
    }
    Ok(lo / c(n, 0.0))
}

/// Variance of `X_phi` in the mode `lo`: `v^T cov v` with
/// `v = cos(phi) (Re g, Im g) + sin(phi) (-Im g, Re g)`.
pub fn homodyne_variance(st: &GaussianState, lo: &CVec, phi: f64) -> Result<f64> {
    if lo.len() != st.n_modes() {
        return Err(Error::DimensionMismatch { expected: st.n_modes(), found: lo.len() });
    }
    let g = normalize_lo(lo)?;
    let v = quadrature_direction(&g, phi);
    Ok(v.dot(&(st.cov() * &v)))
}

/// One local-oscillator setting of the reconstruction schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomodyneSetting {
    /// `single:n`, `sum:n:m` or `isum:n:m` (0-based mode indices).
    pub id: String,
    #[serde(with = "crate::io::cvec")]
    pub lo: CVec,
    pub phi: f64,
}

/// The fixed schedule of `N(2N + 1)` settings: each basis mode at
/// `phi = 0, pi/2, pi/4`, each pair `(f_n + f_m)/sqrt2` at `0, pi/2` and
/// each pair `(f_n + i f_m)/sqrt2` at `0, pi/2`.
pub fn homodyne_schedule(n: usize) -> Vec<HomodyneSetting> {
    let unit = |k: usize| {
        let mut v = CVec::zeros(n);
        v[k] = c(1.0, 0.0);
        v
    };
    let mut out = Vec::with_capacity(n * (2 * n + 1));
    for k in 0..n {
        for phi in [0.0, FRAC_PI_2, FRAC_PI_4] {
            out.push(HomodyneSetting { id: format!("single:{k}"), lo: unit(k), phi });
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let mut s = CVec::zeros(n);
            s[a] = c(FRAC_1_SQRT_2, 0.0);
            s[b] = c(FRAC_1_SQRT_2, 0.0);
            let mut is = s.clone();
            is[b] = c(0.0, FRAC_1_SQRT_2);
            for phi in [0.0, FRAC_PI_2] {
                out.push(HomodyneSetting { id: format!("sum:{a}:{b}"), lo: s.clone(), phi });
            }
            for phi in [0.0, FRAC_PI_2] {
                out.push(HomodyneSetting { id: format!("isum:{a}:{b}"), lo: is.clone(), phi });
            }
        }
    }
    out
}

/// Assembles the covariance from the variances of [`homodyne_schedule`],
/// calling the oracle once per setting in schedule order.
pub fn reconstruct_covariance<F>(mut oracle: F, n: usize) -> Result<RMat>
where
    F: FnMut(&HomodyneSetting) -> std::result::Result<f64, String>,
{
    if n == 0 {
        return Err(Error::InvalidParam { name: "basis_dim".into(), reason: "need N >= 1".into() });
    }
    let sched = homodyne_schedule(n);
    let mut vals = Vec::with_capacity(sched.len());
    for s in &sched {
        let v = oracle(s).map_err(|reason| Error::OracleFailure { setting: format!("{}@{}", s.id, s.phi), reason })?;
        if !v.is_finite() {
            return Err(Error::OracleFailure { setting: format!("{}@{}", s.id, s.phi), reason: format!("non-finite variance {v}") });
        }
        vals.push(v);
    }
    let mut g = RMat::zeros(2 * n, 2 * n);
    let mut it = vals.into_iter();
    let mut next = || it.next().expect("schedule length");
    for k in 0..n {
        let (x, p, d) = (next(), next(), next());
        g[(k, k)] = x;
        g[(n + k, n + k)] = p;
        g[(k, n + k)] = (2.0 * d - x - p) / 2.0;
        g[(n + k, k)] = g[(k, n + k)];
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let (sx, sp, ix, ip) = (next(), next(), next(), next());
            let (xa, xb, pa, pb) = (g[(a, a)], g[(b, b)], g[(n + a, n + a)], g[(n + b, n + b)]);
            let set = |g: &mut RMat, i: usize, j: usize, v: f64| {
                g[(i, j)] = v;
                g[(j, i)] = v;
            };
            set(&mut g, a, b, (2.0 * sx - xa - xb) / 2.0);
            set(&mut g, n + a, n + b, (2.0 * sp - pa - pb) / 2.0);
            // (X_a + P_b)/sqrt2 and (P_a - X_b)/sqrt2
            set(&mut g, a, n + b, (2.0 * ix - xa - pb) / 2.0);
            set(&mut g, b, n + a, (xb + pa - 2.0 * ip) / 2.0);
        }
    }
    Ok(symmetrize(&g))
}

/// Outcome of the multiplexed-homodyne emulation test
/// `U_target = O diag(e^{i psi}) U_b`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MphdResult {
    Feasible {
        #[serde(with = "crate::io::rmat")]
        o: RMat,
        #[serde(with = "crate::io::cvec")]
        delta: CVec,
        secondary: SecondaryCheck,
    },
    Infeasible {
        /// First column whose entries do not share a phase modulo pi.
        column: usize,
        phase_residual: f64,
        secondary: SecondaryCheck,
    },
}

impl MphdResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, MphdResult::Feasible { .. })
    }
}

/// Off-diagonal size of `M^T M`, `M = U_target U_b^dagger`, which is diagonal
/// whenever the factorization exists.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecondaryCheck {
    pub offdiag: f64,
    pub diagonal: bool,
    /// Whether the secondary assertion agrees with the column-phase test.
    pub agrees: bool,
}

pub fn mphd_emulate(u_b: &ModeMap, u_target: &ModeMap) -> Result<MphdResult> {
    if u_b.dim() != u_target.dim() {
        return Err(Error::DimensionMismatch { expected: u_b.dim(), found: u_target.dim() });
    }
    let n = u_b.dim();
    let m = u_target.matrix() * u_b.matrix().adjoint();
    let mtm = m.transpose() * &m;
    let offdiag = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| mtm[(i, j)].norm())
        .fold(0.0, f64::max);
    let diagonal = offdiag < 1e-8;
    let mut delta = CVec::zeros(n);
    let mut o = RMat::zeros(n, n);
    for j in 0..n {
        let (imax, _) = (0..n).map(|i| (i, m[(i, j)].norm())).fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        let ph = C64::from_polar(1.0, m[(imax, j)].arg());
        let mut resid: f64 = 0.0;
        for i in 0..n {
            let z = m[(i, j)] * ph.conj();
            resid = resid.max(z.im.abs());
            o[(i, j)] = z.re;
        }
        if resid > 1e-8 {
            let secondary = SecondaryCheck { offdiag, diagonal, agrees: !diagonal };
            if diagonal {
                log::warn!("mphd: secondary condition holds but column {j} has mixed phases");
            }
            return Ok(MphdResult::Infeasible { column: j, phase_residual: resid, secondary });
        }
        delta[j] = ph;
    }
    let orth = max_abs(&(o.transpose() * &o - RMat::identity(n, n)));
    if orth > 1e-8 {
        return Err(Error::NotOrthogonal { deviation: orth });
    }
    let secondary = SecondaryCheck { offdiag, diagonal, agrees: diagonal };
    if !diagonal {
        log::warn!("mphd: factorization found but M^T M is not diagonal ({offdiag:e})");
    }
    Ok(MphdResult::Feasible { o, delta, secondary })
}

fn check_overlap(o: C64) -> Result<f64> {
    let m = o.norm();
    if !(m <= 1.0 + 1e-9) {
        return Err(Error::OverlapOutOfRange { modulus: m });
    }
    Ok(m.min(1.0))
}

/// Normalized coincidence rate `(1 - |o|^2 cos 2phi)/2` for two single photons.
pub fn hom_single_photon(overlap: C64, phi: f64) -> Result<f64> {
    let m = check_overlap(overlap)?;
    Ok((0.5 * (1.0 - m * m * (2.0 * phi).cos())).clamp(0.0, 1.0))
}

/// Coincidence rate for a twin-photon Schmidt state with weights `p` and
/// overlaps `O_ij = <g_A^i | g_B^j>`.
pub fn hom_schmidt(p: &[f64], overlaps: &CMat) -> Result<f64> {
    let s = p.len();
    if overlaps.nrows() != s || overlaps.ncols() != s {
        return Err(Error::DimensionMismatch { expected: s, found: overlaps.nrows() });
    }
    let total: f64 = p.iter().sum();
    if p.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotAProbability { sum: total });
    }
    let mut acc = c(0.0, 0.0);
    for i in 0..s {
        for j in 0..s {
            acc += (p[i] * p[j]).sqrt() * overlaps[(i, j)] * overlaps[(j, i)].conj();
        }
    }
    Ok((0.5 * (1.0 - acc.re)).clamp(0.0, 1.0))
}

/// Coincidence rate `(1 - |o|^2 cos 2psi)/2` for two coherent states with
/// relative phase `psi`.
pub fn hom_coherent(overlap: C64, psi: f64) -> Result<f64> {
    let m = check_overlap(overlap)?;
    Ok((0.5 * (1.0 - m * m * (2.0 * psi).cos())).clamp(0.0, 1.0))
}

/// Brute-force coincidence probability for one photon per input arm with
/// mode overlap `o` and delay phase `phi`. Each arm carries a two-dimensional
/// internal space, so the output amplitudes live in the four-dimensional
/// one-photon-per-arm space. The beamsplitter outputs are
/// `c_A = (a + e^{i phi} b)/sqrt2`, `c_B = (a - e^{-i phi} b)/sqrt2`.
pub fn hom_two_photon_oracle(overlap: C64, phi: f64) -> Result<f64> {
    let m = check_overlap(overlap)?;
    let g_a = [c(1.0, 0.0), c(0.0, 0.0)];
    let g_b = [overlap, c((1.0 - m * m).max(0.0).sqrt(), 0.0)];
    let e = C64::from_polar(1.0, phi);
    let mut prob = 0.0;
    for k in 0..2 {
        for l in 0..2 {
            // <0| c_{A,k} c_{B,l} a^dag_{gA} b^dag_{gB} |0>: only a_l b_k and b_k a_l survive.
            let amp = 0.5 * (e * g_b[k] * g_a[l] - e.conj() * g_a[k] * g_b[l]);
            prob += amp.norm_sqr();
        }
    }
    Ok(prob)
}

/// Total photon number seen by a bucket detector.
pub fn bucket_photon_count(c: &CoherencyMatrix) -> f64 {
    total_photon_number(c)
}
