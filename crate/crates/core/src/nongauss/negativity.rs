use super::{evaluator, Evaluator, PhotonOpState};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::RMat;
use serde::Serialize;

/// A real phase-space quasi-probability that can be sampled pointwise.
pub trait PhaseSpaceFunction: Sync {
    fn n_modes(&self) -> usize;
    /// `q` in xxpp order.
    fn value(&self, q: &[f64]) -> f64;
}

impl PhaseSpaceFunction for PhotonOpState {
    fn n_modes(&self) -> usize {
        self.eval.dim / 2
    }
    fn value(&self, q: &[f64]) -> f64 {
        self.eval.value(q)
    }
}

/// Gaussian Wigner function with its inverse covariance cached.
#[derive(Debug, Clone)]
pub struct GaussianWigner {
    mean: Vec<f64>,
    eval: Evaluator,
}

impl GaussianWigner {
    pub fn new(st: &GaussianState) -> Result<Self> {
        let d = st.cov().nrows();
        Ok(GaussianWigner { mean: st.mean().as_slice().to_vec(), eval: evaluator(st.cov(), &RMat::zeros(d, d))? })
    }
}

impl PhaseSpaceFunction for GaussianWigner {
    fn n_modes(&self) -> usize {
        self.eval.dim / 2
    }
    fn value(&self, q: &[f64]) -> f64 {
        let mut buf = [0.0; 4];
        let d = self.eval.dim;
        let shifted: Vec<f64>;
        let x: &[f64] = if d <= 4 {
            for i in 0..d {
                buf[i] = q[i] - self.mean[i];
            }
            &buf[..d]
        } else {
            shifted = q.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
            &shifted
        };
        self.eval.value(x)
    }
}

/// Square integration box `[-half_width, half_width]^(2N)`; `step` is the mean
/// node spacing of the composite four-point Gauss-Legendre rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn default_for(n_modes: usize) -> Self {
        if n_modes <= 1 {
            GridSpec { half_width: 8.0, step: 0.05 }
        } else {
            GridSpec { half_width: 6.0, step: 0.15 }
        }
    }

    fn nodes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(self.half_width > 0.0 && self.step > 0.0) || !self.half_width.is_finite() {
            return Err(Error::InvalidParam { name: "grid".into(), reason: "half_width and step must be positive".into() });
        }
        const X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        const W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let panels = ((2.0 * self.half_width) / (4.0 * self.step)).round().max(1.0) as usize;
        let width = 2.0 * self.half_width / panels as f64;
        let mut xs = Vec::with_capacity(4 * panels);
        let mut ws = Vec::with_capacity(4 * panels);
        for p in 0..panels {
            let mid = -self.half_width + (p as f64 + 0.5) * width;
            for k in 0..4 {
                xs.push(mid + 0.5 * width * X[k]);
                ws.push(0.5 * width * W[k]);
            }
        }
        Ok((xs, ws))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNegativity {
    /// `max(0, ln of the integral of |W|)`.
    pub value: f64,
    pub integral_abs: f64,
    pub integral: f64,
    /// Mass of `|W|` in the outermost panel shell, used as the tail estimate.
    pub tail_estimate: f64,
}

/// `ln` of the grid integral of `|W|` for one or two modes.
pub fn wigner_log_negativity(w: &dyn PhaseSpaceFunction, grid: &GridSpec) -> Result<LogNegativity> {
    let n = w.n_modes();
    if n == 0 || n > 2 {
        return Err(Error::TooManyModes { n_modes: n });
    }
    let (xs, ws) = grid.nodes()?;
    let m = xs.len();
    let edge = |i: usize| i < 4 || i >= m - 4;
    let (abs, plain, tail) = if n == 1 {
        let mut acc = (0.0, 0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                let v = w.value(&[xs[i], xs[j]]) * ws[i] * ws[j];
                acc.0 += v.abs();
                acc.1 += v;
                if edge(i) || edge(j) {
                    acc.2 += v.abs();
                }
            }
        }
        acc
    } else {
        let threads = std::thread::available_parallelism().map(|t| t.get()).unwrap_or(1).min(m);
        let chunk = m.div_ceil(threads);
        let parts: Vec<(f64, f64, f64)> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let (xs, ws) = (&xs, &ws);
                    s.spawn(move || {
                        let mut acc = (0.0, 0.0, 0.0);
                        for a in (t * chunk)..((t + 1) * chunk).min(m) {
                            for b in 0..m {
                                for cc in 0..m {
                                    for dd in 0..m {
                                        // q = (x1, x2, p1, p2)
                                        let v = w.value(&[xs[a], xs[b], xs[cc], xs[dd]]) * ws[a] * ws[b] * ws[cc] * ws[dd];
                                        acc.0 += v.abs();
                                        acc.1 += v;
                                        if edge(a) || edge(b) || edge(cc) || edge(dd) {
                                            acc.2 += v.abs();
                                        }
                                    }
                                }
                            }
                        }
                        acc
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("integration worker")).collect()
        });
        parts.into_iter().fold((0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
    };
    if tail > 1e-4 {
        return Err(Error::GridTooCoarse { tail_mass: tail });
    }
    Ok(LogNegativity { value: abs.ln().max(0.0), integral_abs: abs, integral: plain, tail_estimate: tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::apply_symplectic;
    use crate::linalg::c;
    use crate::nongauss::{photon_operation, PhotonOp};
    use crate::linalg::CVec;
    use crate::{GaussianState, SymplecticMap};

    fn e1() -> CVec {
        CVec::from_vec(vec![c(1.0, 0.0)])
    }

    #[test]
    fn gaussian_states_have_zero_negativity() {
        let g = GridSpec::default_for(1);
        for st in [GaussianState::vacuum(1), GaussianState::squeezed(&[1.6]).unwrap(), GaussianState::thermal(&[2.0]).unwrap()] {
            let r = wigner_log_negativity(&GaussianWigner::new(&st).unwrap(), &g).unwrap();
            assert!(r.value < 1e-3 && (r.integral - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn single_photon_value_and_normalization() {
        let add = photon_operation(&GaussianState::vacuum(1), &e1(), PhotonOp::Add).unwrap();
        let r = wigner_log_negativity(&add, &GridSpec::default_for(1)).unwrap();
        let exact = (4.0 * (-0.5f64).exp() - 1.0).ln();
        assert!((r.value - exact).abs() < 1e-3, "{} vs {exact}", r.value);
        assert!((r.integral - 1.0).abs() < 1e-3);
        let sq = GaussianState::squeezed(&[1.5]).unwrap();
        let sub = photon_operation(&sq, &e1(), PhotonOp::Subtract).unwrap();
        assert!((wigner_log_negativity(&sub, &GridSpec::default_for(1)).unwrap().integral - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rotation_invariance() {
        let sq = GaussianState::squeezed(&[1.5]).unwrap();
        let rot = |t: f64| crate::modal::validate_unitary(&nalgebra::DMatrix::from_element(1, 1, crate::linalg::C64::from_polar(1.0, t))).unwrap();
        let o = crate::modal::unitary_to_orthogonal(&rot(0.7));
        let sq_r = apply_symplectic(&SymplecticMap::from(&o), &sq).unwrap();
        let a = photon_operation(&sq, &e1(), PhotonOp::Subtract).unwrap();
        let b = photon_operation(&sq_r, &rot(0.7).mode(0), PhotonOp::Subtract).unwrap();
        let g = GridSpec::default_for(1);
        let la = wigner_log_negativity(&a, &g).unwrap().value;
        let lb = wigner_log_negativity(&b, &g).unwrap().value;
        assert!(la > 0.01 && (la - lb).abs() < 1e-3);
    }

    #[test]
    fn errors() {
        let three = GaussianWigner::new(&GaussianState::vacuum(3)).unwrap();
        assert!(matches!(wigner_log_negativity(&three, &GridSpec::default_for(3)), Err(Error::TooManyModes { .. })));
        let wide = GaussianWigner::new(&GaussianState::squeezed(&[3.0]).unwrap()).unwrap();
        assert!(matches!(wigner_log_negativity(&wide, &GridSpec { half_width: 8.0, step: 0.05 }), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn two_mode_default_grid() {
        let g = CVec::from_vec(vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.0, std::f64::consts::FRAC_1_SQRT_2)]);
        let add = photon_operation(&GaussianState::vacuum(2), &g, PhotonOp::Add).unwrap();
        let r = wigner_log_negativity(&add, &GridSpec::default_for(2)).unwrap();
        let exact = (4.0 * (-0.5f64).exp() - 1.0).ln();
        assert!((r.value - exact).abs() < 1e-3, "{}", r.value);
    }
}
