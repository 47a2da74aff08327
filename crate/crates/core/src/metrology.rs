//! Quantum Cramer-Rao bounds for single-parameter estimation with Gaussian
//! probes: detection mode by finite differences and the bound
//! `a0 Delta_det / (2 sqrt N)`.

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{c, cnorm, min_eigenvalue, quadrature_direction, symmetrize, CVec, RMat, RVec};
use crate::modal::{extend_to_basis, hermite_gauss_value, unitary_to_orthogonal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

type FieldFn = dyn Fn(f64) -> CVec + Send + Sync;

/// Mean field `a -> sqrt(N) u_mean(a)` expressed on a fixed mode basis.
#[derive(Clone)]
pub struct ParameterizedField {
    name: String,
    n_photons: f64,
    scale: f64,
    f: Arc<FieldFn>,
}

impl std::fmt::Debug for ParameterizedField {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ParameterizedField").field("name", &self.name).field("n_photons", &self.n_photons).finish()
    }
}

impl ParameterizedField {
    /// `scale` is the natural parameter scale used for the default step.
    pub fn new(name: &str, n_photons: f64, scale: f64, f: impl Fn(f64) -> CVec + Send + Sync + 'static) -> Result<Self> {
        if !(n_photons > 0.0) || !n_photons.is_finite() {
            return Err(Error::InvalidParam { name: "n_photons".into(), reason: format!("need N > 0, got {n_photons}") });
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidParam { name: "scale".into(), reason: "need scale > 0".into() });
        }
        let norm2 = cnorm(&f(0.0)).powi(2);
        if (norm2 / n_photons - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam { name: "evaluate".into(), reason: format!("|u(0)|^2 = {norm2}, expected {n_photons}") });
        }
        Ok(ParameterizedField { name: name.into(), n_photons, scale, f: Arc::new(f) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_photons(&self) -> f64 {
        self.n_photons
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n_modes(&self) -> usize {
        (self.f)(0.0).len()
    }

    pub fn evaluate(&self, a: f64) -> CVec {
        (self.f)(a)
    }

    /// Mid-fringe Mach-Zehnder on the output modes `(f1, f2)`:
    /// `u(a) = sin(pi/4 + a/2) f1 + cos(pi/4 + a/2) f2`.
    pub fn mach_zehnder(n_photons: f64) -> Result<Self> {
        let s = n_photons.sqrt();
        Self::new("mz", n_photons, 1.0, move |a| {
            let t = FRAC_PI_4 + 0.5 * a;
            CVec::from_vec(vec![c(s * t.sin(), 0.0), c(s * t.cos(), 0.0)])
        })
    }

    /// Single mode with a phase: `u(a) = e^{ia} f`.
    pub fn phase(n_photons: f64) -> Result<Self> {
        let s = n_photons.sqrt();
        Self::new("phase", n_photons, 1.0, move |a| CVec::from_element(1, c(s * a.cos(), s * a.sin())))
    }

    /// Gaussian beam of waist `w` displaced by `a`, sampled on `points`
    /// points over `[-half_width, half_width]`; each sample carries the
    /// square root of the grid step so that vector inner products are mode
    /// overlaps.
    pub fn transverse_displacement(n_photons: f64, w: f64, half_width: f64, points: usize) -> Result<Self> {
        if points < 2 || !(half_width > 0.0) || !(w > 0.0) {
            return Err(Error::InvalidParam { name: "grid".into(), reason: "need points >= 2, half_width > 0, w > 0".into() });
        }
        let step = 2.0 * half_width / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| -half_width + i as f64 * step).collect();
        let norm: f64 = xs.iter().map(|&x| hermite_gauss_value(0, w, x).powi(2) * step).sum::<f64>().sqrt();
        let k = n_photons.sqrt() * step.sqrt() / norm;
        Self::new("displacement", n_photons, w, move |a| {
            CVec::from_iterator(xs.len(), xs.iter().map(|&x| c(k * hermite_gauss_value(0, w, x - a), 0.0)))
        })
    }

    /// Field built from a named builtin model; `mz`, `phase` or `displacement`.
    pub fn builtin(kind: BuiltinModel, n_photons: f64) -> Result<Self> {
        match kind {
            BuiltinModel::Mz => Self::mach_zehnder(n_photons),
            BuiltinModel::Phase => Self::phase(n_photons),
            BuiltinModel::Displacement => Self::transverse_displacement(n_photons, 1.0, 6.0, 241),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinModel {
    Mz,
    Phase,
    Displacement,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionMode {
    #[serde(with = "crate::io::cvec")]
    pub u_det: CVec,
    pub a0: f64,
}

fn central_difference(model: &ParameterizedField, h: f64) -> CVec {
    let s = model.n_photons.sqrt();
    (model.evaluate(h) - model.evaluate(-h)) / c(2.0 * h * s, 0.0)
}

/// `u_det` proportional to the derivative of the normalized mean mode at
/// `a = 0`, and `a0 = 1 / |derivative|`. The step is checked against a
/// halved step and the two estimates are Richardson-extrapolated.
pub fn detection_mode(model: &ParameterizedField, h: f64) -> Result<DetectionMode> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParam { name: "h".into(), reason: "need h > 0".into() });
    }
    let d1 = central_difference(model, h);
    let d2 = central_difference(model, 0.5 * h);
    let n1 = cnorm(&d1);
    let n2 = cnorm(&d2);
    if n1 <= 1e-12 || n2 <= 1e-12 {
        return Err(Error::FlatModel);
    }
    let diff = cnorm(&(&d1 / c(n1, 0.0) - &d2 / c(n2, 0.0)));
    if diff >= 1e-6 {
        return Err(Error::StepTooLarge { change: diff });
    }
    let d = (&d2 * c(4.0, 0.0) - d1) / c(3.0, 0.0);
    let n = cnorm(&d);
    Ok(DetectionMode { u_det: &d / c(n, 0.0), a0: 1.0 / n })
}

/// `h = 1e-5 * model scale`.
pub fn default_step(model: &ParameterizedField) -> f64 {
    1e-5 * model.scale
}

#[derive(Debug, Clone, Serialize)]
pub struct QcrBound {
    pub bound: f64,
    pub delta_det: f64,
    pub a0: f64,
    pub quadrature_phase: f64,
    #[serde(with = "crate::io::cvec")]
    pub u_det: CVec,
}

fn inverse_cov(cov: &RMat) -> Result<RMat> {
    let m = min_eigenvalue(cov);
    let ch = cov.clone().cholesky().ok_or(Error::SingularCovariance { min_eigenvalue: m })?;
    if m <= 1e-12 {
        return Err(Error::SingularCovariance { min_eigenvalue: m });
    }
    Ok(symmetrize(&ch.inverse()))
}

/// Phase maximizing `v(phi)^T G^-1 v(phi)`: a 180-point scan over `[0, pi)`
/// then golden-section refinement to 1e-8.
pub fn optimal_quadrature_phase(gamma_inv: &RMat, u_det: &CVec) -> f64 {
    let f = |phi: f64| {
        let v = quadrature_direction(u_det, phi);
        v.dot(&(gamma_inv * &v))
    };
    let n = 180;
    let step = PI / n as f64;
    let best = (0..n).map(|k| k as f64 * step).fold((0.0, f64::NEG_INFINITY), |acc, p| {
        let v = f(p);
        if v > acc.1 {
            (p, v)
        } else {
            acc
        }
    });
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-8 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    (0.5 * (lo + hi)).rem_euclid(PI)
}

/// `a0 Delta_det / (2 sqrt N)` with `Delta_det = (v^T G^-1 v)^(-1/2)` along the
/// quadrature `cos(phi) X + sin(phi) P` of the detection mode. `None` selects
/// the phase minimizing the bound.
pub fn qcr_bound(model: &ParameterizedField, cov: &RMat, quadrature_phase: Option<f64>) -> Result<QcrBound> {
    let n = model.n_modes();
    if cov.nrows() != 2 * n || cov.ncols() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: cov.nrows() });
    }
    let p = crate::gaussian::check_physical(cov)?;
    if !p.is_ok() {
        return Err(Error::NotPhysical { min_eigenvalue: p.min_eigenvalue() });
    }
    let dm = detection_mode(model, default_step(model))?;
    let gi = inverse_cov(cov)?;
    let phi = quadrature_phase.unwrap_or_else(|| optimal_quadrature_phase(&gi, &dm.u_det));
    let v = quadrature_direction(&dm.u_det, phi);
    let delta_det = 1.0 / v.dot(&(&gi * &v)).sqrt();
    Ok(QcrBound { bound: dm.a0 * delta_det / (2.0 * model.n_photons.sqrt()), delta_det, a0: dm.a0, quadrature_phase: phi, u_det: dm.u_det })
}

/// Vacuum everywhere except mode `g`, whose quadrature
/// `cos(phi) X_g + sin(phi) P_g` has variance `var` (and the conjugate `1/var`).
pub fn squeezed_in_mode(g: &CVec, var: f64, phi: f64) -> Result<GaussianState> {
    if !(var > 0.0) {
        return Err(Error::InvalidParam { name: "var".into(), reason: "need var > 0".into() });
    }
    let n = g.len();
    let rotated = g * crate::linalg::C64::from_polar(1.0, phi);
    let o = unitary_to_orthogonal(&extend_to_basis(&rotated)?);
    let mut d = RVec::from_element(2 * n, 1.0);
    d[0] = var;
    d[n] = 1.0 / var;
    let cov = symmetrize(&(o.matrix().transpose() * RMat::from_diagonal(&d) * o.matrix()));
    GaussianState::new(RVec::zeros(2 * n), cov)
}

/// How the squeezed-vacuum photons enter the estimate under a fixed total
/// photon budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// The bound itself: `a0 e^{-r} / (2 sqrt(N_mean))`.
    Qcr,
    /// Intensity-difference readout, where the squeezed vacuum adds its own
    /// photon noise: `a0 sqrt(N_mean e^{-2r} + sinh^2 r) / (2 N_mean)`.
    IntensityDifference,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergySplit {
    pub n_total: f64,
    pub n_mean: f64,
    pub n_squeeze: f64,
    /// Variance of the squeezed quadrature, `e^{-2r}`.
    pub squeezed_variance: f64,
    pub bound: f64,
}

fn budget_bound(a0: f64, n_total: f64, n_s: f64, readout: Readout) -> f64 {
    let n_m = n_total - n_s;
    let em = (n_s + 1.0).sqrt() - n_s.sqrt();
    match readout {
        Readout::Qcr => a0 * em / (2.0 * n_m.sqrt()),
        Readout::IntensityDifference => a0 * (n_m * em * em + n_s).sqrt() / (2.0 * n_m),
    }
}

/// Best split of `n_total` photons between the mean field and a squeezed
/// vacuum in the detection mode, found by golden-section search in
/// `ln(n_squeeze)`.
pub fn energy_constrained_bound(a0: f64, n_total: f64, readout: Readout) -> Result<EnergySplit> {
    if !(n_total > 1.0) || !n_total.is_finite() {
        return Err(Error::InvalidParam { name: "n_total".into(), reason: "need N > 1".into() });
    }
    let f = |t: f64| budget_bound(a0, n_total, t.exp(), readout);
    let (mut lo, mut hi) = ((1e-9f64).ln(), (n_total * (1.0 - 1e-9)).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let n_s = (0.5 * (lo + hi)).exp();
    let em = (n_s + 1.0).sqrt() - n_s.sqrt();
    Ok(EnergySplit { n_total, n_mean: n_total - n_s, n_squeeze: n_s, squeezed_variance: em * em, bound: budget_bound(a0, n_total, n_s, readout) })
}

/// Least-squares slope of `ln(bound)` against `ln(N)` over the given budgets.
pub fn scaling_exponent(a0: f64, budgets: &[f64], readout: Readout) -> Result<f64> {
    if budgets.len() < 2 {
        return Err(Error::InvalidParam { name: "budgets".into(), reason: "need at least two budgets".into() });
    }
    let pts: Vec<(f64, f64)> = budgets
        .iter()
        .map(|&n| energy_constrained_bound(a0, n, readout).map(|s| (n.ln(), s.bound.ln())))
        .collect::<Result<_>>()?;
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
