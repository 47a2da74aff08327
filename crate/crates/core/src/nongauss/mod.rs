//! Mode-selective single-photon addition and subtraction on zero-mean
//! Gaussian states, their Wigner functions and Wigner log-negativity, with a
//! truncated Fock-basis oracle for cross-checks.

mod fock;
mod negativity;

pub use fock::{fock_oracle, FockSpec, FockState};
pub use negativity::{wigner_log_negativity, GaussianWigner, GridSpec, LogNegativity, PhaseSpaceFunction};

use crate::error::{Error, Result};
use crate::gaussian::{check_physical, GaussianState};
use crate::io;
use crate::linalg::{cnorm, min_eigenvalue, symmetrize, CVec, RMat};
use crate::modal::{extend_to_basis, unitary_to_orthogonal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonOp {
    Add,
    Subtract,
}

/// Gaussian state with one photon added to or subtracted from mode `g`.
#[derive(Debug, Clone, Serialize)]
pub struct PhotonOpState {
    #[serde(with = "io::rmat")]
    pub base_cov: RMat,
    #[serde(with = "io::rmat")]
    pub a: RMat,
    pub sign: PhotonOp,
    #[serde(with = "io::cvec")]
    pub mode: CVec,
    #[serde(skip)]
    eval: Evaluator,
}

/// Flattened data for fast pointwise evaluation.
#[derive(Debug, Clone, Default)]
struct Evaluator {
    dim: usize,
    gamma_inv: Vec<f64>,
    b: Vec<f64>,
    trace: f64,
    norm: f64,
}

impl Evaluator {
    fn quad(m: &[f64], q: &[f64], d: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            let row = &m[i * d..(i + 1) * d];
            let mut t = 0.0;
            for j in 0..d {
                t += row[j] * q[j];
            }
            s += q[i] * t;
        }
        s
    }

    fn value(&self, q: &[f64]) -> f64 {
        let d = self.dim;
        let g = Self::quad(&self.gamma_inv, q, d);
        let b = Self::quad(&self.b, q, d);
        0.5 * (b - self.trace + 2.0) * self.norm * (-0.5 * g).exp()
    }
}

/// Projector onto the quadrature plane of mode `g`.
pub fn mode_projector(g: &CVec) -> Result<RMat> {
    let o = unitary_to_orthogonal(&extend_to_basis(g)?);
    let n = g.len();
    let rx = o.matrix().row(0).transpose();
    let rp = o.matrix().row(n).transpose();
    Ok(&rx * rx.transpose() + &rp * rp.transpose())
}

/// `A = 2 (G +- I) P_g (G +- I) / Tr[(G +- I) P_g]`.
pub fn photon_operation(st: &GaussianState, g: &CVec, sign: PhotonOp) -> Result<PhotonOpState> {
    let n = st.n_modes();
    if g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.len() });
    }
    let norm = cnorm(g);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    let mean_max = st.mean().amax();
    if mean_max > 1e-12 {
        return Err(Error::NonzeroMean { max_abs: mean_max });
    }
    let p = check_physical(st.cov())?;
    if !p.is_ok() {
        return Err(Error::NotPhysical { min_eigenvalue: p.min_eigenvalue() });
    }
    let pg = mode_projector(g)?;
    let s = match sign {
        PhotonOp::Add => 1.0,
        PhotonOp::Subtract => -1.0,
    };
    let shifted = st.cov() + RMat::identity(2 * n, 2 * n) * s;
    let denom = (&shifted * &pg).trace();
    if denom.abs() <= 1e-10 {
        return Err(Error::VacuumSubtraction { denominator: denom });
    }
    let a = symmetrize(&(&shifted * &pg * &shifted * (2.0 / denom)));
    let eval = evaluator(st.cov(), &a)?;
    Ok(PhotonOpState { base_cov: st.cov().clone(), a, sign, mode: g.clone(), eval })
}

fn evaluator(cov: &RMat, a: &RMat) -> Result<Evaluator> {
    let m = min_eigenvalue(cov);
    if m <= 1e-12 {
        return Err(Error::SingularCovariance { min_eigenvalue: m });
    }
    let ch = cov.clone().cholesky().ok_or(Error::SingularCovariance { min_eigenvalue: m })?;
    let gi = symmetrize(&ch.inverse());
    let b = symmetrize(&(&gi * a * &gi));
    let det: f64 = ch.l().diagonal().iter().map(|x| x * x).product();
    let d = cov.nrows();
    Ok(Evaluator {
        dim: d,
        gamma_inv: gi.transpose().as_slice().to_vec(),
        b: b.transpose().as_slice().to_vec(),
        trace: (&gi * a).trace(),
        norm: 1.0 / ((2.0 * PI).powi((d / 2) as i32) * det.sqrt()),
    })
}

impl PhotonOpState {
    pub fn n_modes(&self) -> usize {
        self.base_cov.nrows() / 2
    }

    /// `Tr(G^-1 A)`.
    pub fn trace_term(&self) -> f64 {
        self.eval.trace
    }
}

/// `W = 1/2 [q^T G^-1 A G^-1 q - Tr(G^-1 A) + 2] W_G(q)`.
pub fn wigner_eval_nongauss(p: &PhotonOpState, q: &[f64]) -> Result<f64> {
    if q.len() != p.eval.dim {
        return Err(Error::DimensionMismatch { expected: p.eval.dim, found: q.len() });
    }
    Ok(p.eval.value(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginSign {
    pub sign: Sign,
    /// `2 - Tr(G^-1 A)`, proportional to the Wigner value at the origin.
    pub value: f64,
}

pub fn wigner_origin_sign(p: &PhotonOpState) -> OriginSign {
    let value = 2.0 - p.eval.trace;
    let sign = if value.abs() < 1e-12 {
        Sign::Zero
    } else if value < 0.0 {
        Sign::Negative
    } else {
        Sign::Positive
    };
    OriginSign { sign, value }
}
