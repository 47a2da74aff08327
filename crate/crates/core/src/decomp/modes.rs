use crate::error::{Error, Result};
use crate::gaussian::CoherencyMatrix;
use crate::linalg::{herm_eigen_desc, CVec};
use crate::modal::ModeMap;
use serde::Serialize;

/// `V C V^dagger = diag(eigenvalues)`; rows of `V` are the principal modes.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalModes {
    pub v: ModeMap,
    pub eigenvalues: Vec<f64>,
    pub mode_count: usize,
}

pub fn numerical_rank(eigenvalues: &[f64], rel_tol: f64) -> usize {
    let max = eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x));
    if max <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&x| x > rel_tol * max).count()
}

pub fn principal_modes(c: &CoherencyMatrix, rel_tol: f64) -> PrincipalModes {
    let (vals, vecs) = herm_eigen_desc(c.matrix());
    let eigenvalues: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
    let v = ModeMap::with_tolerance(vecs.adjoint(), 1e-8).expect("Hermitian eigenvectors are unitary");
    let mode_count = numerical_rank(&eigenvalues, rel_tol);
    PrincipalModes { v, eigenvalues, mode_count }
}

/// `(Tr C)^2 / Tr(C^2)`.
pub fn effective_mode_number(c: &CoherencyMatrix) -> Result<f64> {
    let tr = c.matrix().trace().re;
    if tr.abs() < 1e-300 {
        return Err(Error::ZeroTrace);
    }
    let tr2: f64 = c.matrix().iter().map(|z| z.norm_sqr()).sum();
    Ok(tr * tr / tr2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "single_mode", rename_all = "snake_case")]
pub enum SingleModeTest {
    Yes {
        #[serde(with = "crate::io::cvec")]
        mode: CVec,
    },
    No { rank: usize },
}

/// Rank-one test of the coherency matrix; on success also returns the mode.
pub fn is_intrinsic_single_mode(c: &CoherencyMatrix, rel_tol: f64) -> SingleModeTest {
    let pm = principal_modes(c, rel_tol);
    if pm.mode_count == 1 {
        SingleModeTest::Yes { mode: pm.v.mode(0) }
    } else {
        SingleModeTest::No { rank: pm.mode_count }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cdot, cnorm, max_abs_c, to_complex, CMat, RMat};
    use crate::random;
    use rand::SeedableRng;

    #[test]
    fn coherent_mixture_eigenvalues() {
        let p = [0.2, 0.5, 0.3];
        let a = [1.5, 0.7, 2.0];
        let parts: Vec<(f64, CoherencyMatrix)> = (0..3)
            .map(|m| {
                let mut v = CVec::zeros(3);
                v[m] = c(a[m], 0.0);
                (p[m], CoherencyMatrix::coherent(&v))
            })
            .collect();
        let cm = CoherencyMatrix::mixture(&parts).unwrap();
        let pm = principal_modes(&cm, 1e-10);
        let mut expect: Vec<f64> = (0..3).map(|m| p[m] * a[m] * a[m]).collect();
        expect.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (x, y) in pm.eigenvalues.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn single_photon_is_single_mode() {
        let mut r = rand::rngs::StdRng::seed_from_u64(5);
        let cv = random::unit_vector(&mut r, 4);
        let cm = CoherencyMatrix::single_photon(&cv);
        let pm = principal_modes(&cm, 1e-10);
        assert_eq!(pm.mode_count, 1);
        assert!((pm.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((cdot(&pm.v.mode(0), &cv).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multimode_coherent_principal_mode_is_amplitude_direction() {
        let alpha = CVec::from_vec(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 2.0)]);
        match is_intrinsic_single_mode(&CoherencyMatrix::coherent(&alpha), 1e-10) {
            SingleModeTest::Yes { mode } => {
                assert!((cdot(&mode, &alpha).norm() - cnorm(&alpha)).abs() < 1e-12);
            }
            other => panic!("expected single mode, got {other:?}"),
        }
    }

    #[test]
    fn hom_state_and_mixture_are_two_mode() {
        let hom = CoherencyMatrix::fock_product(&[1, 1]);
        assert_eq!(is_intrinsic_single_mode(&hom, 1e-10), SingleModeTest::No { rank: 2 });
        let e1 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let mix = CoherencyMatrix::mixture(&[
            (0.5, CoherencyMatrix::coherent(&(e1 * c(1.2, 0.0)))),
            (0.5, CoherencyMatrix::coherent(&(e2 * c(0.0, 0.8)))),
        ])
        .unwrap();
        assert_eq!(is_intrinsic_single_mode(&mix, 1e-10), SingleModeTest::No { rank: 2 });
    }

    #[test]
    fn effective_number_examples() {
        let eff = |d: &[f64]| effective_mode_number(&CoherencyMatrix::from_real_diagonal(d).unwrap()).unwrap();
        assert!((eff(&[3.0, 3.0]) - 2.0).abs() < 1e-15);
        assert!((eff(&[3.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((eff(&[4.0, 1.0, 0.0]) - 25.0 / 17.0).abs() < 1e-12);
        assert_eq!(effective_mode_number(&CoherencyMatrix::zeros(2)), Err(Error::ZeroTrace));
    }

    #[test]
    fn rank_two_construct_then_recover() {
        let mut r = rand::rngs::StdRng::seed_from_u64(9);
        let u = random::haar_unitary(&mut r, 4);
        let n = [3.0, 1.25];
        let mut m = CMat::zeros(4, 4);
        for k in 0..2 {
            let v = u.mode(k);
            m += &v * v.adjoint() * c(n[k], 0.0);
        }
        // Rows of V diagonalize V C V^dagger, so the k-th principal mode is conj(v_k).
        let pm = principal_modes(&CoherencyMatrix::new(m.clone()).unwrap(), 1e-10);
        assert_eq!(pm.mode_count, 2);
        for k in 0..2 {
            assert!((pm.eigenvalues[k] - n[k]).abs() < 1e-8);
            let vk = u.mode(k).map(|z| z.conj());
            assert!((cdot(&pm.v.mode(k), &vk).norm() - 1.0).abs() < 1e-8);
        }
        let d = pm.v.matrix() * &m * pm.v.matrix().adjoint();
        let expect = to_complex(&RMat::from_diagonal(&nalgebra::DVector::from_vec(pm.eigenvalues.clone())));
        assert!(max_abs_c(&(d - expect)) < 1e-10);
    }
}
