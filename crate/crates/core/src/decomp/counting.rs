use crate::error::{Error, Result};
use crate::gaussian::CoherencyMatrix;
use crate::linalg::{c, CMat};
use crate::modal::hermite_gauss_value;
use serde::Serialize;

/// Second moments of an equal-weight mixture of the first `p` Hermite-Gauss
/// modes (unit waist) and the beam-quality factors derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct M2Count {
    pub delta_x2: f64,
    pub delta_k2: f64,
    /// `2 Delta x Delta k`.
    pub m_squared: f64,
    /// `sqrt(2 Delta x Delta k)`.
    pub m: f64,
}

fn m2_from_moments(x2: f64, k2: f64) -> M2Count {
    let m_squared = 2.0 * (x2 * k2).sqrt();
    M2Count { delta_x2: x2, delta_k2: k2, m_squared, m: m_squared.sqrt() }
}

/// Closed form: `<x^2>_n = (2n + 1) w^2`, `<k^2>_n = (2n + 1) / (4 w^2)`,
/// averaged with weight `1/p`.
pub fn m2_mode_count(p: usize) -> Result<M2Count> {
    if p == 0 {
        return Err(Error::InvalidParam { name: "p".into(), reason: "need p >= 1".into() });
    }
    let sum: f64 = (0..p).map(|n| 2.0 * n as f64 + 1.0).sum();
    let x2 = sum / p as f64;
    Ok(m2_from_moments(x2, x2 / 4.0))
}

/// Same moments by trapezoidal quadrature of sampled Hermite-Gauss functions,
/// with `<k^2>` taken from `int |dh/dx|^2 dx`.
pub fn m2_mode_count_numeric(p: usize, half_width: f64, step: f64) -> Result<M2Count> {
    if p == 0 {
        return Err(Error::InvalidParam { name: "p".into(), reason: "need p >= 1".into() });
    }
    let pts = (2.0 * half_width / step).round() as usize + 1;
    let (mut x2, mut k2) = (0.0, 0.0);
    for n in 0..p {
        for i in 0..pts {
            let x = -half_width + i as f64 * step;
            let h = hermite_gauss_value(n, 1.0, x);
            let d = (hermite_gauss_value(n, 1.0, x + 1e-5) - hermite_gauss_value(n, 1.0, x - 1e-5)) / 2e-5;
            x2 += x * x * h * h * step;
            k2 += d * d * step;
        }
    }
    Ok(m2_from_moments(x2 / p as f64, k2 / p as f64))
}

/// Coherency matrix of the normalized biphoton `sum_kl g_kl a_k^dagger b_l^dagger |0>`
/// over the `2N` modes `(a_1..a_N, b_1..b_N)`.
pub fn biphoton_coherency(g_si: &CMat) -> Result<CoherencyMatrix> {
    let (na, nb) = (g_si.nrows(), g_si.ncols());
    let norm2: f64 = g_si.iter().map(|z| z.norm_sqr()).sum();
    if norm2 <= 0.0 {
        return Err(Error::ZeroVector { norm: 0.0 });
    }
    let mut m = CMat::zeros(na + nb, na + nb);
    for k in 0..na {
        for k2 in 0..na {
            let s: num_complex::Complex64 = (0..nb).map(|l| g_si[(k, l)].conj() * g_si[(k2, l)]).sum();
            m[(k, k2)] = s / c(norm2, 0.0);
        }
    }
    for l in 0..nb {
        for l2 in 0..nb {
            let s: num_complex::Complex64 = (0..na).map(|k| g_si[(k, l)].conj() * g_si[(k, l2)]).sum();
            m[(na + l, na + l2)] = s / c(norm2, 0.0);
        }
    }
    CoherencyMatrix::new(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtModeCount {
    /// `2S`.
    pub modes: usize,
    /// Rank of the explicitly built biphoton coherency matrix.
    pub coherency_rank: usize,
}

/// Mode count `2S` of a biphoton with `S` Schmidt terms, checked against the
/// coherency rank of an explicit state with geometric Schmidt weights on
/// rotated (non-canonical) signal and idler bases.
pub fn schmidt_mode_count(s: usize) -> Result<SchmidtModeCount> {
    if s == 0 {
        return Err(Error::InvalidParam { name: "S".into(), reason: "need S >= 1".into() });
    }
    let n = s + 2;
    let dft = CMat::from_fn(n, n, |i, j| {
        let ph = 2.0 * std::f64::consts::PI * (i * j) as f64 / n as f64;
        c(ph.cos(), ph.sin()) / (n as f64).sqrt()
    });
    let mut d = CMat::zeros(n, n);
    for k in 0..s {
        d[(k, k)] = c(0.6f64.powi(k as i32), 0.0);
    }
    let g = dft.transpose() * d * dft.adjoint();
    let coh = biphoton_coherency(&g)?;
    let rank = super::principal_modes(&coh, 1e-10).mode_count;
    Ok(SchmidtModeCount { modes: 2 * s, coherency_rank: rank })
}
