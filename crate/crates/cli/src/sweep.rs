use crate::args::{RangeArgs, ReadoutArg, SweepCommand};
use crate::failure::Failure;
use crate::input::parse_complex_arg;
use crate::render::{Cell, Output, Table};
use mmqo::channels::{duan_mancini, gaussian_channel, DuanSign};
use mmqo::detection::hom_single_photon;
use mmqo::metrology::{energy_constrained_bound, Readout};
use mmqo::sources::{epr_state, spopo_squeezing};
use mmqo::Error;
use rayon::prelude::*;

const MAX_POINTS: usize = 1_000_000;

/// Parameter values `from + k * step` up to `to` (inclusive within 1e-9 of a step).
pub fn grid(r: &RangeArgs) -> Result<Vec<f64>, Error> {
    let bad = |reason: String| Error::BadRange { reason };
    if !(r.from.is_finite() && r.to.is_finite() && r.step.is_finite()) {
        return Err(bad("range bounds and step must be finite".into()));
    }
    if !(r.step > 0.0) {
        return Err(bad(format!("step must be positive, got {}", r.step)));
    }
    if r.to < r.from {
        return Err(bad(format!("--to {} is below --from {}", r.to, r.from)));
    }
    let span = (r.to - r.from) / r.step;
    if span + 1.0 > MAX_POINTS as f64 {
        return Err(bad(format!("more than {MAX_POINTS} points")));
    }
    let count = (span + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| r.from + k as f64 * r.step).collect())
}

fn evaluate<F>(xs: &[f64], f: F) -> Result<Vec<Vec<Cell>>, Error>
where
    F: Fn(f64) -> Result<Vec<Cell>, Error> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

pub fn run(cmd: &SweepCommand) -> Result<Output, Failure> {
    let (header, rows) = match cmd {
        SweepCommand::Gain { range, squeeze_var, env_kappa } => {
            let st = epr_state(*squeeze_var)?;
            let rows = evaluate(&grid(range)?, |p| {
                let d = duan_mancini(&gaussian_channel(&st, p, *env_kappa)?, 0, 1, DuanSign::Plus)?;
                Ok(vec![Cell::Num(p), Cell::Num(d.x_variance), Cell::Num(d.p_variance), Cell::Num(d.product), Cell::Bool(d.entangled)])
            })?;
            (vec!["gain", "x_variance", "p_variance", "product", "entangled"].into_iter().map(String::from).collect(), rows)
        }
        SweepCommand::Spopo { range, lambdas } => {
            let rows = evaluate(&grid(range)?, |r| {
                let v = spopo_squeezing(lambdas, r)?;
                Ok(std::iter::once(Cell::Num(r)).chain(v.into_iter().map(Cell::Num)).collect())
            })?;
            let header = std::iter::once("r".to_string()).chain((0..lambdas.len()).map(|i| format!("dx2_{i}"))).collect();
            (header, rows)
        }
        SweepCommand::Hom { range, overlap } => {
            let o = parse_complex_arg("overlap", overlap)?;
            let rows = evaluate(&grid(range)?, |phi| Ok(vec![Cell::Num(phi), Cell::Num(hom_single_photon(o, phi)?)]))?;
            (vec!["phi".to_string(), "g2".to_string()], rows)
        }
        SweepCommand::Energy { range, readout, a0, log10 } => {
            let readout = match readout {
                ReadoutArg::Qcr => Readout::Qcr,
                ReadoutArg::IntensityDifference => Readout::IntensityDifference,
            };
            let rows = evaluate(&grid(range)?, |x| {
                let n = if *log10 { 10f64.powf(x) } else { x };
                let s = energy_constrained_bound(*a0, n, readout)?;
                Ok(vec![Cell::Num(s.n_total), Cell::Num(s.n_mean), Cell::Num(s.n_squeeze), Cell::Num(s.squeezed_variance), Cell::Num(s.bound)])
            })?;
            (vec!["n_total", "n_mean", "n_squeeze", "squeezed_variance", "bound"].into_iter().map(String::from).collect(), rows)
        }
    };
    log::info!("sweep produced {} rows", rows.len());
    Ok(Output::Table(Table { header, rows }))
}
