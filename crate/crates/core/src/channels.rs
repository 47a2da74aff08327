//! Phase-insensitive Gaussian channels, Duan-type entanglement tests and the
//! quantum pulse gate.

use crate::error::{Error, Result};
use crate::gaussian::{apply_symplectic, cov_to_coherency, CoherencyMatrix, GaussianState, SymplecticMap};
use crate::linalg::{c, cnorm, CMat, CVec, RMat};
use crate::modal::{extend_to_basis, unitary_to_orthogonal, ModeMap};
use serde::Serialize;

/// Loss (`P < 1`) or phase-insensitive gain (`P > 1`) with environment modes
/// of variance `kappa_env`: `cov' = P cov + |P - 1| kappa_env I`, `mean' = sqrt(P) mean`.
pub fn gaussian_channel(st: &GaussianState, p: f64, kappa_env: f64) -> Result<GaussianState> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidGain { gain: p });
    }
    if !(kappa_env >= 1.0) {
        return Err(Error::InvalidParam { name: "kappa_env".into(), reason: "need kappa_env >= 1".into() });
    }
    let d = st.cov().nrows();
    let cov = st.cov() * p + RMat::identity(d, d) * ((p - 1.0).abs() * kappa_env);
    Ok(GaussianState::from_parts_unchecked(st.mean() * p.sqrt(), cov))
}

/// The same channel seen on the coherency matrix.
pub fn gaussian_channel_coherency(st: &GaussianState, p: f64, kappa_env: f64) -> Result<CoherencyMatrix> {
    Ok(cov_to_coherency(&gaussian_channel(st, p, kappa_env)?))
}

/// Which pair of joint quadratures enters the Duan-Mancini product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DuanSign {
    /// `(X_i + X_j)/sqrt2` and `(P_i - P_j)/sqrt2`.
    Plus,
    /// `(X_i - X_j)/sqrt2` and `(P_i + P_j)/sqrt2`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuanResult {
    pub x_variance: f64,
    pub p_variance: f64,
    pub product: f64,
    pub entangled: bool,
}

pub fn duan_mancini(st: &GaussianState, i: usize, j: usize, sign: DuanSign) -> Result<DuanResult> {
    let n = st.n_modes();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n_modes: n });
        }
    }
    if i == j {
        return Err(Error::InvalidParam { name: "j".into(), reason: "modes must differ".into() });
    }
    let g = st.cov();
    let s = match sign {
        DuanSign::Plus => 1.0,
        DuanSign::Minus => -1.0,
    };
    let vx = 0.5 * (g[(i, i)] + g[(j, j)] + 2.0 * s * g[(i, j)]);
    let (pi, pj) = (n + i, n + j);
    let vp = 0.5 * (g[(pi, pi)] + g[(pj, pj)] - 2.0 * s * g[(pi, pj)]);
    let product = vx * vp;
    Ok(DuanResult { x_variance: vx, p_variance: vp, product, entangled: product < 1.0 - 1e-12 })
}

/// Mode map of the pulse gate on `N + 1` modes (ancilla last): the target
/// mode and the ancilla mix as `b_t' = cos(mu) b_t + i sin(mu) b_a`,
/// `b_a' = i sin(mu) b_t + cos(mu) b_a`, everything orthogonal to the
/// target is untouched.
pub fn pulse_gate_map(target_mode: &CVec, mu: f64) -> Result<ModeMap> {
    let norm = cnorm(target_mode);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let n = target_mode.len();
    let u = extend_to_basis(target_mode)?.direct_sum(&ModeMap::identity(1));
    let mut t = CMat::identity(n + 1, n + 1);
    t[(0, 0)] = c(mu.cos(), 0.0);
    t[(n, n)] = c(mu.cos(), 0.0);
    t[(0, n)] = c(0.0, mu.sin());
    t[(n, 0)] = c(0.0, mu.sin());
    // Heisenberg action on the old-basis annihilation operators.
    let heis = u.matrix().transpose() * t * u.matrix().map(|z| z.conj());
    ModeMap::with_tolerance(heis, 1e-10)
}

/// Quadrature-space symplectic matrix of the pulse gate.
pub fn pulse_gate_symplectic(target_mode: &CVec, mu: f64) -> Result<SymplecticMap> {
    let m = pulse_gate_map(target_mode, mu)?;
    let conj = ModeMap::with_tolerance(m.matrix().map(|z| z.conj()), 1e-10)?;
    crate::gaussian::validate_symplectic(unitary_to_orthogonal(&conj).matrix())
}

pub fn pulse_gate(st: &GaussianState, target_mode: &CVec, ancilla_init: &GaussianState, mu: f64) -> Result<GaussianState> {
    if target_mode.len() != st.n_modes() {
        return Err(Error::DimensionMismatch { expected: st.n_modes(), found: target_mode.len() });
    }
    if ancilla_init.n_modes() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: ancilla_init.n_modes() });
    }
    let s = pulse_gate_symplectic(target_mode, mu)?;
    apply_symplectic(&s, &st.direct_sum(ancilla_init))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::total_photon_number;
    use crate::linalg::{max_abs, min_eigenvalue};
    use crate::random;
    use crate::sources::epr_state;
    use nalgebra::DVector;
    use rand::SeedableRng;

    #[test]
    fn channel_examples() {
        let mut r = rand::rngs::StdRng::seed_from_u64(2);
        let st = random::gaussian_state(&mut r, 2, 2.0, 2.0);
        let same = gaussian_channel(&st, 1.0, 1.0).unwrap();
        assert!(max_abs(&(same.cov() - st.cov())) < 1e-15);
        let perfect = GaussianState::with_tolerance(DVector::zeros(2), RMat::from_diagonal(&DVector::from_vec(vec![1e12, 1e-12])), -1e-3).unwrap();
        let out = gaussian_channel(&perfect, 2.0, 1.0).unwrap();
        assert!((out.cov()[(1, 1)] - 1.0).abs() < 1e-11);
        let sq = GaussianState::squeezed(&[2.0]).unwrap();
        let lossy = gaussian_channel(&sq, 0.5, 1.0).unwrap();
        assert!((lossy.cov()[(1, 1)] - 0.625).abs() < 1e-15);
        assert!(matches!(gaussian_channel(&sq, 0.0, 1.0), Err(Error::InvalidGain { .. })));
    }

    #[test]
    fn loss_semigroup_and_amplifier_noise() {
        let mut r = rand::rngs::StdRng::seed_from_u64(3);
        let st = random::gaussian_state(&mut r, 2, 2.0, 2.0);
        let a = gaussian_channel(&gaussian_channel(&st, 0.7, 1.0).unwrap(), 0.4, 1.0).unwrap();
        let b = gaussian_channel(&st, 0.28, 1.0).unwrap();
        assert!(max_abs(&(a.cov() - b.cov())) < 1e-12);
        let amp = gaussian_channel(&st, 1.05, 1.0).unwrap();
        assert!(min_eigenvalue(&(amp.cov() - st.cov())) > -1e-12);
    }

    #[test]
    fn coherency_form_is_consistent() {
        let st = GaussianState::coherent(&[c(1.0, 0.5)]);
        let out = gaussian_channel_coherency(&st, 0.5, 1.0).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.5 * 1.25).abs() < 1e-14);
        let th = GaussianState::thermal(&[3.0]).unwrap();
        let amp = gaussian_channel_coherency(&th, 2.0, 1.0).unwrap();
        // <n> = (kappa - 1)/2 -> P <n> + (P - 1)(<n> + 1) = 2 + 2
        assert!((amp.matrix()[(0, 0)].re - (2.0 * 1.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn duan_examples() {
        let v = duan_mancini(&GaussianState::vacuum(2), 0, 1, DuanSign::Plus).unwrap();
        assert!((v.product - 1.0).abs() < 1e-15 && !v.entangled);
        let epr = epr_state(0.25).unwrap();
        let d = duan_mancini(&epr, 0, 1, DuanSign::Plus).unwrap();
        assert!((d.product - 0.0625).abs() < 1e-14 && d.entangled);
        let strong = epr_state(1e-8).unwrap();
        for p in [1.5, 1.9, 2.1, 2.5] {
            let out = gaussian_channel(&strong, p, 1.0).unwrap();
            let d = duan_mancini(&out, 0, 1, DuanSign::Plus).unwrap();
            assert!((d.product - (p - 1.0f64).powi(2)).abs() < 1e-7);
            assert_eq!(d.entangled, p < 2.0);
        }
        assert!(matches!(duan_mancini(&epr, 0, 2, DuanSign::Plus), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn duan_monotone_under_loss() {
        let epr = epr_state(0.25).unwrap();
        let mut prev = 0.0;
        for k in 0..=20 {
            let p = 1.0 - k as f64 / 20.0 * 0.99;
            let d = duan_mancini(&gaussian_channel(&epr, p, 1.0).unwrap(), 0, 1, DuanSign::Plus).unwrap();
            assert!(d.product >= prev - 1e-15);
            prev = d.product;
        }
    }

    fn e1(n: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v[0] = c(1.0, 0.0);
        v
    }

    #[test]
    fn pulse_gate_identity_and_swap() {
        let st = GaussianState::squeezed(&[2.0, 1.5]).unwrap();
        let vac = GaussianState::vacuum(1);
        let same = pulse_gate(&st, &e1(2), &vac, 0.0).unwrap();
        assert!(max_abs(&(same.cov() - st.direct_sum(&vac).cov())) < 1e-14);
        let swapped = pulse_gate(&st, &e1(2), &vac, std::f64::consts::FRAC_PI_2).unwrap();
        let anc = swapped.reduce(&[2]).unwrap();
        let (vals, _) = crate::linalg::sym_eigen_desc(anc.cov());
        assert!((vals[0] - 4.0).abs() < 1e-12 && (vals[1] - 0.25).abs() < 1e-12);
        let first = swapped.reduce(&[0]).unwrap();
        assert!(max_abs(&(first.cov() - RMat::identity(2, 2))) < 1e-12);
        let second = swapped.reduce(&[1]).unwrap();
        assert!(max_abs(&(second.cov() - st.reduce(&[1]).unwrap().cov())) < 1e-12);
    }

    #[test]
    fn pulse_gate_half_mixing() {
        let st = GaussianState::squeezed(&[2.0]).unwrap();
        let out = pulse_gate(&st, &e1(1), &GaussianState::vacuum(1), std::f64::consts::FRAC_PI_4).unwrap();
        assert!((out.cov()[(0, 0)] - 2.5).abs() < 1e-12);
        let sq = GaussianState::squeezed(&[0.5]).unwrap();
        let out = pulse_gate(&sq, &e1(1), &GaussianState::vacuum(1), std::f64::consts::FRAC_PI_4).unwrap();
        assert!((out.cov()[(0, 0)] - 0.625).abs() < 1e-12);
        assert!((out.cov()[(3, 3)] - 0.625).abs() < 1e-12);
    }

    #[test]
    fn pulse_gate_selective_and_conserving() {
        let mut r = rand::rngs::StdRng::seed_from_u64(4);
        let g = random::unit_vector(&mut r, 3);
        let s = pulse_gate_symplectic(&g, 0.9).unwrap();
        assert!(crate::gaussian::validate_symplectic(s.matrix()).is_ok());
        let st = random::gaussian_state(&mut r, 3, 2.0, 2.0);
        let out = pulse_gate(&st, &g, &GaussianState::vacuum(1), std::f64::consts::FRAC_PI_2).unwrap();
        let before = total_photon_number(&cov_to_coherency(&st));
        let after = total_photon_number(&cov_to_coherency(&out));
        assert!((before - after).abs() < 1e-10);
        assert!(matches!(pulse_gate_map(&(g * c(2.0, 0.0)), 0.3), Err(Error::NotNormalized { .. })));
    }
}
