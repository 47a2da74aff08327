//! Source models: parametric down-conversion supermodes, twin-photon
//! amplitudes, SPOPO squeezing spectra and cluster states.

use crate::decomp::{takagi, TakagiFactors};
use crate::error::{Error, Result};
use crate::gaussian::{apply_symplectic, GaussianState, SymplecticMap};
use crate::io;
use crate::linalg::{c, max_abs, max_abs_c, sym_fn, symmetrize, CMat, RMat, RVec};
use crate::modal::{unitary_to_orthogonal, validate_unitary, ModeMap};
use crate::random::squeezer_matrix;
use serde::{Deserialize, Serialize};

/// Complex symmetric matrix of pairwise down-conversion amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointRaw", into = "JointRaw")]
pub struct JointTwoPhotonMatrix {
    g: CMat,
}

#[derive(Serialize, Deserialize)]
struct JointRaw {
    #[serde(with = "io::cmat")]
    g: CMat,
}

impl TryFrom<JointRaw> for JointTwoPhotonMatrix {
    type Error = Error;
    fn try_from(r: JointRaw) -> Result<Self> {
        JointTwoPhotonMatrix::new(r.g)
    }
}

impl From<JointTwoPhotonMatrix> for JointRaw {
    fn from(j: JointTwoPhotonMatrix) -> Self {
        JointRaw { g: j.g }
    }
}

impl JointTwoPhotonMatrix {
    pub fn new(g: CMat) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::NotSquare { rows: g.nrows(), cols: g.ncols() });
        }
        let dev = max_abs_c(&(&g - g.transpose()));
        if dev >= 1e-10 {
            return Err(Error::NotSymmetricComplex { deviation: dev });
        }
        Ok(JointTwoPhotonMatrix { g })
    }

    /// Full matrix `[[0, G_si], [G_si^T, 0]]` over signal then idler modes.
    pub fn from_signal_idler(g_si: &CMat) -> Self {
        let (n, m) = (g_si.nrows(), g_si.ncols());
        let mut g = CMat::zeros(n + m, n + m);
        g.view_mut((0, n), (n, m)).copy_from(g_si);
        g.view_mut((n, 0), (m, n)).copy_from(&g_si.transpose());
        JointTwoPhotonMatrix { g }
    }

    pub fn matrix(&self) -> &CMat {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// Output of the down-conversion source model.
#[derive(Debug, Clone, Serialize)]
pub struct PdcOutput {
    pub state: GaussianState,
    /// Rows are the supermodes.
    pub supermodes: ModeMap,
    pub lambdas: Vec<f64>,
    /// Map taking vacuum to `state`.
    pub symplectic: SymplecticMap,
}

/// Independent squeezers `sigma_i = exp(gain * lambda_i)` on the Takagi
/// supermodes of `G`, written back on the input basis.
pub fn pdc_supermodes(g: &JointTwoPhotonMatrix, gain: f64) -> Result<PdcOutput> {
    if !(gain >= 0.0) {
        return Err(Error::InvalidParam { name: "gain".into(), reason: format!("need gain >= 0, got {gain}") });
    }
    let TakagiFactors { u, lambdas } = takagi(g.matrix())?;
    let o = unitary_to_orthogonal(&u);
    let sig: Vec<f64> = lambdas.iter().map(|l| (gain * l).exp()).collect();
    let s = SymplecticMap::with_tolerance(o.matrix().transpose() * squeezer_matrix(&sig), 1e-8)?;
    let state = apply_symplectic(&s, &GaussianState::vacuum(g.dim()))?;
    Ok(PdcOutput { state, supermodes: u, lambdas, symplectic: s })
}

/// First-order twin-photon state: vacuum amplitude 1 plus pair amplitudes.
#[derive(Debug, Clone, Serialize)]
pub struct TwinPhotonAmplitudes {
    pub vacuum: f64,
    /// Amplitude of `|1: f_l> |1: f_l'>` at `(l, l')`.
    #[serde(with = "io::cmat")]
    pub pairs: CMat,
}

/// Pair amplitudes `-i (L / hbar c) G` in the weak-pump regime, unnormalized.
pub fn twin_photon_amplitudes(g: &JointTwoPhotonMatrix, l_over_hbar_c: f64) -> TwinPhotonAmplitudes {
    TwinPhotonAmplitudes { vacuum: 1.0, pairs: g.matrix() * c(0.0, -l_over_hbar_c) }
}

/// Squeezed-quadrature variances `((l_1 - r|l_i|) / (l_1 + r|l_i|))^2` of a
/// synchronously pumped OPO below threshold.
pub fn spopo_squeezing(lambdas: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidPumpRatio { r });
    }
    let l1 = lambdas.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x));
    if !(l1 > 0.0) {
        return Err(Error::InvalidParam { name: "lambdas".into(), reason: "need lambda_1 > 0".into() });
    }
    Ok(lambdas
        .iter()
        .map(|l| {
            let x = r * l.abs();
            ((l1 - x) / (l1 + x)).powi(2)
        })
        .collect())
}

/// Two-mode EPR state: mode a squeezed in X and mode b in P with variance
/// `s`, then mixed on a real balanced beamsplitter. Both `(X1 + X2)/sqrt2`
/// and `(P1 - P2)/sqrt2` have variance `s`.
pub fn epr_state(s: f64) -> Result<GaussianState> {
    if !(s > 0.0) {
        return Err(Error::InvalidParam { name: "s".into(), reason: "need s > 0".into() });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs = validate_unitary(&CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]))?;
    let sq = GaussianState::new(RVec::zeros(4), RMat::from_diagonal(&RVec::from_vec(vec![s, 1.0 / s, 1.0 / s, s])))?;
    apply_symplectic(&SymplecticMap::from(&unitary_to_orthogonal(&bs)), &sq)
}

/// Real symmetric weighted adjacency matrix of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AdjRaw", into = "AdjRaw")]
pub struct AdjacencyMatrix {
    v: RMat,
}

#[derive(Serialize, Deserialize)]
struct AdjRaw {
    #[serde(with = "io::rmat")]
    v: RMat,
}

impl TryFrom<AdjRaw> for AdjacencyMatrix {
    type Error = Error;
    fn try_from(r: AdjRaw) -> Result<Self> {
        AdjacencyMatrix::new(r.v)
    }
}

impl From<AdjacencyMatrix> for AdjRaw {
    fn from(a: AdjacencyMatrix) -> Self {
        AdjRaw { v: a.v }
    }
}

impl AdjacencyMatrix {
    pub fn new(v: RMat) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::NotSquare { rows: v.nrows(), cols: v.ncols() });
        }
        let dev = max_abs(&(&v - v.transpose()));
        if dev > 1e-12 {
            return Err(Error::NotSymmetric { deviation: dev });
        }
        Ok(AdjacencyMatrix { v })
    }

    /// Unweighted path graph on `n` nodes.
    pub fn chain(n: usize) -> Self {
        let mut v = RMat::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            v[(i, i + 1)] = 1.0;
            v[(i + 1, i)] = 1.0;
        }
        AdjacencyMatrix { v }
    }

    pub fn matrix(&self) -> &RMat {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }
}

/// `U = (V + iI)(I + V^2)^(-1/2)`, which satisfies `Re U - V Im U = 0`.
pub fn cluster_unitary(v: &AdjacencyMatrix) -> ModeMap {
    let n = v.dim();
    let vm = v.matrix();
    let s = sym_fn(&(RMat::identity(n, n) + vm * vm), |x| 1.0 / x.sqrt());
    let re = vm * &s;
    let u = CMat::from_fn(n, n, |i, j| c(re[(i, j)], s[(i, j)]));
    ModeMap::with_tolerance(u, 1e-10).expect("cluster unitary is unitary")
}

/// `max |Re U - V Im U|`.
pub fn cluster_condition_residual(v: &AdjacencyMatrix, u: &ModeMap) -> f64 {
    let re = u.matrix().map(|z| z.re);
    let im = u.matrix().map(|z| z.im);
    max_abs(&(re - v.matrix() * im))
}

fn check_sigmas(v: &AdjacencyMatrix, sigmas: &[f64]) -> Result<()> {
    if sigmas.len() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: sigmas.len() });
    }
    if let Some(&s) = sigmas.iter().find(|&&s| !(s > 1.0)) {
        return Err(Error::InvalidSqueezing { sigma: s });
    }
    Ok(())
}

/// Cluster state from the controlled-Z network: quadratures
/// `[[I, 0], [V, I]] K q_vac` with P-squeezed inputs (`var P_i = sigma_i^-2`).
pub fn cluster_state(v: &AdjacencyMatrix, sigmas: &[f64]) -> Result<GaussianState> {
    check_sigmas(v, sigmas)?;
    let n = v.dim();
    let mut m = RMat::identity(2 * n, 2 * n);
    m.view_mut((n, 0), (n, n)).copy_from(v.matrix());
    let k = squeezer_matrix(sigmas);
    let cov = symmetrize(&(&m * &k * &k * m.transpose()));
    GaussianState::new(RVec::zeros(2 * n), cov)
}

/// Cluster state built by the passive map `unitary_to_orthogonal(cluster_unitary(V))`
/// acting on X-squeezed inputs (`var X_i = sigma_i^-2`).
pub fn cluster_state_passive(v: &AdjacencyMatrix, sigmas: &[f64]) -> Result<GaussianState> {
    check_sigmas(v, sigmas)?;
    let inv: Vec<f64> = sigmas.iter().map(|s| 1.0 / s).collect();
    let input = GaussianState::squeezed(&inv)?;
    let o = unitary_to_orthogonal(&cluster_unitary(v));
    apply_symplectic(&SymplecticMap::from(&o), &input)
}

/// Covariance of the nullifiers `P - V X`.
pub fn nullifier_covariance(st: &GaussianState, v: &AdjacencyMatrix) -> Result<RMat> {
    let n = v.dim();
    if st.n_modes() != n {
        return Err(Error::DimensionMismatch { expected: n, found: st.n_modes() });
    }
    let mut nm = RMat::zeros(n, 2 * n);
    nm.view_mut((0, 0), (n, n)).copy_from(&-v.matrix());
    nm.view_mut((0, n), (n, n)).copy_from(&RMat::identity(n, n));
    Ok(symmetrize(&(&nm * st.cov() * nm.transpose())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{duan_mancini, gaussian_channel, DuanSign};
    use crate::decomp::{bloch_messiah, schmidt, schmidt_number, williamson};
    use crate::gaussian::purity;
    use crate::random;
    use rand::SeedableRng;

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(17)
    }

    fn pair(g: f64) -> JointTwoPhotonMatrix {
        JointTwoPhotonMatrix::new(CMat::from_row_slice(2, 2, &[c(0., 0.), c(g, 0.), c(g, 0.), c(0., 0.)])).unwrap()
    }

    #[test]
    fn zero_coupling_gives_vacuum() {
        let out = pdc_supermodes(&JointTwoPhotonMatrix::new(CMat::zeros(3, 3)).unwrap(), 1.0).unwrap();
        assert!(max_abs(&(out.state.cov() - RMat::identity(6, 6))) < 1e-14);
    }

    #[test]
    fn pair_coupling_gives_epr() {
        let out = pdc_supermodes(&pair(1.0), 0.5).unwrap();
        assert!((out.lambdas[0] - 1.0).abs() < 1e-12 && (out.lambdas[1] - 1.0).abs() < 1e-12);
        let s = (-1.0f64).exp();
        let d = duan_mancini(&out.state, 0, 1, DuanSign::Minus).unwrap();
        assert!((d.x_variance - s).abs() < 1e-12 && (d.p_variance - s).abs() < 1e-12);
        assert!(d.entangled);
        let epr = epr_state(s).unwrap();
        let e = duan_mancini(&epr, 0, 1, DuanSign::Plus).unwrap();
        assert!((e.product - s * s).abs() < 1e-12);
    }

    #[test]
    fn random_pdc_is_pure_with_expected_squeezing() {
        let mut r = rng();
        let g = JointTwoPhotonMatrix::new(random::complex_symmetric(&mut r, 4)).unwrap();
        let out = pdc_supermodes(&g, 0.3).unwrap();
        let w = williamson(out.state.cov()).unwrap();
        assert!(w.kappas.iter().all(|k| (k - 1.0).abs() < 1e-8));
        assert!((purity(&out.state).unwrap() - 1.0).abs() < 1e-8);
        let bm = bloch_messiah(&out.symplectic).unwrap();
        for (s, l) in bm.k.iter().zip(&out.lambdas) {
            assert!((s - (0.3 * l).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn signal_idler_spectrum_is_doubly_degenerate() {
        let mut r = rng();
        let g_si = CMat::from_fn(3, 3, |_, _| c(random::normal(&mut r), random::normal(&mut r)));
        let t = takagi(JointTwoPhotonMatrix::from_signal_idler(&g_si).matrix()).unwrap();
        for k in 0..3 {
            assert!((t.lambdas[2 * k] - t.lambdas[2 * k + 1]).abs() < 1e-8);
        }
    }

    #[test]
    fn twin_amplitudes() {
        let z = twin_photon_amplitudes(&JointTwoPhotonMatrix::new(CMat::zeros(2, 2)).unwrap(), 0.1);
        assert_eq!(z.vacuum, 1.0);
        assert!(max_abs_c(&z.pairs) == 0.0);
        let t = twin_photon_amplitudes(&pair(0.8), 0.1);
        assert!((t.pairs[(0, 1)] - c(0.0, -0.08)).norm() < 1e-15);
        let mut r = rng();
        let g_si = CMat::from_fn(4, 2, |_, _| c(random::normal(&mut r), 0.0)) * CMat::from_fn(2, 4, |_, _| c(random::normal(&mut r), random::normal(&mut r)));
        let full = JointTwoPhotonMatrix::from_signal_idler(&g_si);
        let amp = twin_photon_amplitudes(&full, 0.3);
        let block = amp.pairs.view((0, 4), (4, 4)).into_owned();
        assert_eq!(schmidt_number(&schmidt(&block).unwrap(), 1e-10), schmidt_number(&schmidt(&g_si).unwrap(), 1e-10));
    }

    #[test]
    fn spopo_examples() {
        assert_eq!(spopo_squeezing(&[1.0, 0.5], 0.0).unwrap(), vec![1.0, 1.0]);
        let v = spopo_squeezing(&[1.0, 0.5, 0.0], 0.999).unwrap();
        assert!((v[0] - 2.5e-7).abs() < 1e-9);
        assert!((v[1] - 0.1114).abs() < 1e-4);
        assert_eq!(v[2], 1.0);
        assert!(matches!(spopo_squeezing(&[1.0], 1.0), Err(Error::InvalidPumpRatio { .. })));
        assert!(matches!(spopo_squeezing(&[1.0], -0.1), Err(Error::InvalidPumpRatio { .. })));
        let mut prev = 1.0;
        for k in 1..100 {
            let x = spopo_squeezing(&[1.0, 0.3], k as f64 / 100.0).unwrap()[1];
            assert!(x > 0.0 && x < prev);
            prev = x;
        }
    }

    #[test]
    fn cluster_unitary_examples() {
        let z = cluster_unitary(&AdjacencyMatrix::new(RMat::zeros(3, 3)).unwrap());
        assert!(max_abs_c(&(z.matrix() - CMat::identity(3, 3) * c(0.0, 1.0))) < 1e-15);
        let v = AdjacencyMatrix::chain(2);
        let u = cluster_unitary(&v);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = CMat::from_row_slice(2, 2, &[c(0., h), c(h, 0.), c(h, 0.), c(0., h)]);
        assert!(max_abs_c(&(u.matrix() - expect)) < 1e-12);
        assert!(cluster_condition_residual(&v, &u) < 1e-12);
        let mut r = rng();
        let rv = AdjacencyMatrix::new(random::real_symmetric(&mut r, 6)).unwrap();
        let ru = cluster_unitary(&rv);
        assert!(validate_unitary(ru.matrix()).is_ok());
        assert!(cluster_condition_residual(&rv, &ru) < 1e-10);
    }

    #[test]
    fn cluster_nullifiers() {
        let prod = cluster_state(&AdjacencyMatrix::new(RMat::zeros(2, 2)).unwrap(), &[2.0, 3.0]).unwrap();
        assert_eq!(prod, GaussianState::squeezed(&[2.0, 3.0]).unwrap());
        let v = AdjacencyMatrix::chain(2);
        let st = cluster_state(&v, &[3.0, 3.0]).unwrap();
        let nc = nullifier_covariance(&st, &v).unwrap();
        assert!(max_abs(&(nc - RMat::identity(2, 2) / 9.0)) < 1e-14);
        let chain = AdjacencyMatrix::chain(4);
        let s10 = 10f64.sqrt();
        let st = cluster_state(&chain, &[s10; 4]).unwrap();
        let nc = nullifier_covariance(&st, &chain).unwrap();
        assert!(max_abs(&(nc - RMat::identity(4, 4) * 0.1)) < 1e-10);
        assert!(matches!(cluster_state(&chain, &[1.0; 4]), Err(Error::InvalidSqueezing { .. })));
        let vac = nullifier_covariance(&GaussianState::vacuum(2), &AdjacencyMatrix::new(RMat::zeros(2, 2)).unwrap()).unwrap();
        assert_eq!(vac, RMat::identity(2, 2));
    }

    #[test]
    fn nullifiers_after_loss() {
        let mut r = rng();
        let v = AdjacencyMatrix::new(random::real_symmetric(&mut r, 3)).unwrap();
        let sig = [2.0, 2.5, 3.0];
        let lossy = gaussian_channel(&cluster_state(&v, &sig).unwrap(), 0.5, 1.0).unwrap();
        let nc = nullifier_covariance(&lossy, &v).unwrap();
        let d = RMat::from_diagonal(&RVec::from_iterator(3, sig.iter().map(|s| 0.5 / (s * s))));
        let expect = d + (RMat::identity(3, 3) + v.matrix() * v.matrix()) * 0.5;
        assert!(max_abs(&(nc - expect)) < 1e-12);
    }

    #[test]
    fn passive_route_nullifiers() {
        let mut r = rng();
        let v = AdjacencyMatrix::new(random::real_symmetric(&mut r, 4)).unwrap();
        let sig = [2.0, 3.0, 1.5, 4.0];
        let st = cluster_state_passive(&v, &sig).unwrap();
        let nc = nullifier_covariance(&st, &v).unwrap();
        let root = sym_fn(&(RMat::identity(4, 4) + v.matrix() * v.matrix()), f64::sqrt);
        let d = RMat::from_diagonal(&RVec::from_iterator(4, sig.iter().map(|s| 1.0 / (s * s))));
        assert!(max_abs(&(nc - &root * d * &root)) < 1e-8);
    }
}
