use crate::args::{ChannelArgs, ClusterArgs, DecomposeArgs, DegaussArgs, DetectCommand, MetrologyArgs, ModelArg, SignArg, SourceCommand};
use crate::failure::Failure;
use crate::input::{load_adjacency, load_joint, load_state, load_table, parse_complex_arg, parse_mode_arg};
use crate::render::{Cell, Output, Table};
use mmqo::channels::gaussian_channel;
use mmqo::decomp::{
    bloch_messiah, effective_mode_number, intrinsic_separation, principal_modes, separation_monte_carlo, williamson,
};
use mmqo::detection::{hom_coherent, hom_single_photon, homodyne_schedule, homodyne_variance, reconstruct_covariance};
use mmqo::gaussian::{cov_to_coherency, purity, total_photon_number};
use mmqo::linalg::RMat;
use mmqo::metrology::{qcr_bound, squeezed_in_mode, BuiltinModel, ParameterizedField};
use mmqo::nongauss::{photon_operation, wigner_eval_nongauss, wigner_log_negativity, wigner_origin_sign, GridSpec, PhotonOp};
use mmqo::sources::{
    cluster_condition_residual, cluster_state, cluster_state_passive, cluster_unitary, nullifier_covariance, pdc_supermodes,
    spopo_squeezing, AdjacencyMatrix,
};
use mmqo::GaussianState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

/// Settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub tolerance: Option<f64>,
    pub rank_tol: f64,
    pub seed: u64,
}

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("library types serialize to JSON")
}

fn diagonal(m: &RMat) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

/// Squeezing factor `sigma` with `sigma^-2 = 10^(-dB/10)`.
fn sigma_from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn decompose(ctx: Ctx, a: &DecomposeArgs) -> Result<Output, Failure> {
    let st = load_state(&a.input, ctx.tolerance)?;
    let w = williamson(st.cov())?;
    let bm = bloch_messiah(&w.s_prime.inverse())?;
    let sep = intrinsic_separation(st.cov())?;
    let coh = cov_to_coherency(&st);
    let pm = principal_modes(&coh, ctx.rank_tol);
    let mut out = json!({
        "n_modes": st.n_modes(),
        "purity": purity(&st)?,
        "photon_number": total_photon_number(&coh),
        "effective_mode_number": effective_mode_number(&coh).ok(),
        "williamson": value(&w),
        "bloch_messiah": value(&bm),
        "intrinsic_separation": value(&sep),
        "principal_modes": value(&pm),
    });
    if a.mc_samples > 0 {
        let d = 2 * st.n_modes();
        let mut points = vec![st.mean().clone()];
        for i in 0..d {
            let mut q = st.mean().clone();
            q[i] += 0.5;
            points.push(q);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let report = separation_monte_carlo(&st, &sep, &points, a.mc_samples, &mut rng)?;
        out["monte_carlo"] = json!({ "seed": ctx.seed, "within_4_sigma": report.within(4.0), "report": value(&report) });
    }
    Ok(Output::Json(out))
}

pub fn source(ctx: Ctx, cmd: &SourceCommand) -> Result<Output, Failure> {
    match cmd {
        SourceCommand::Pdc { input, gain } => {
            let g = load_joint(input)?;
            let out = pdc_supermodes(&g, *gain)?;
            let db: Vec<f64> = out.lambdas.iter().map(|l| 20.0 * gain * l / std::f64::consts::LN_10).collect();
            let coh = cov_to_coherency(&out.state);
            Ok(Output::Json(json!({
                "state": value(&out.state),
                "lambdas": out.lambdas,
                "supermodes": value(&out.supermodes),
                "symplectic": value(&out.symplectic),
                "summary": {
                    "squeezing_db": db,
                    "kappas": williamson(out.state.cov())?.kappas,
                    "photon_number": total_photon_number(&coh),
                    "mode_count": principal_modes(&coh, ctx.rank_tol).mode_count,
                },
            })))
        }
        SourceCommand::Spopo { lambdas, r } => {
            let v = spopo_squeezing(lambdas, *r)?;
            let rows = lambdas
                .iter()
                .zip(&v)
                .enumerate()
                .map(|(i, (l, x))| vec![Cell::Int(i as i64), Cell::Num(*l), Cell::Num(*x)])
                .collect();
            Ok(Output::Table(Table { header: vec!["mode".into(), "lambda".into(), "dx2".into()], rows }))
        }
        SourceCommand::Cluster { input, squeeze_db, passive } => {
            let v = load_adjacency(input)?;
            let sig = vec![sigma_from_db(*squeeze_db); v.dim()];
            let st = if *passive { cluster_state_passive(&v, &sig)? } else { cluster_state(&v, &sig)? };
            let nc = nullifier_covariance(&st, &v)?;
            Ok(Output::Json(json!({
                "state": value(&st),
                "nullifier_variances": diagonal(&nc),
                "nullifier_covariance": mmqo::io::rmat_rows(&nc),
            })))
        }
    }
}

pub fn channel(ctx: Ctx, a: &ChannelArgs) -> Result<Output, Failure> {
    let st = load_state(&a.input, ctx.tolerance)?;
    Ok(Output::Json(value(&gaussian_channel(&st, a.gain, a.env_kappa)?)))
}

pub fn detect(ctx: Ctx, cmd: &DetectCommand) -> Result<Output, Failure> {
    match cmd {
        DetectCommand::Homodyne { input, lo, phi } => {
            let st = load_state(input, ctx.tolerance)?;
            let lo = parse_mode_arg("lo", lo)?;
            Ok(Output::Json(json!({ "variance": homodyne_variance(&st, &lo, *phi)? })))
        }
        DetectCommand::Schedule { input, modes } => {
            let st = input.as_deref().map(|p| load_state(p, ctx.tolerance)).transpose()?;
            let n = match (&st, modes) {
                (Some(s), Some(m)) if s.n_modes() != *m => {
                    return Err(mmqo::Error::DimensionMismatch { expected: *m, found: s.n_modes() }.into())
                }
                (Some(s), _) => s.n_modes(),
                (None, Some(m)) => *m,
                (None, None) => unreachable!("clap requires --modes without --in"),
            };
            let mut entries = Vec::new();
            for s in homodyne_schedule(n) {
                let variance = match &st {
                    Some(state) => Some(homodyne_variance(state, &s.lo, s.phi)?),
                    None => None,
                };
                entries.push(json!({ "lo": s.id, "phi": s.phi, "variance": variance, "lo_vector": mmqo::io::cvec_pairs(&s.lo) }));
            }
            Ok(Output::Json(json!({ "n_modes": n, "entries": entries })))
        }
        DetectCommand::Reconstruct { input } => {
            let table = load_table(input)?;
            let cov = reconstruct_covariance(
                |s| table.lookup(&s.id, s.phi).ok_or_else(|| format!("no variance for ({}, {})", s.id, s.phi)),
                table.n_modes,
            )?;
            Ok(Output::Json(json!({ "n_modes": table.n_modes, "cov": mmqo::io::rmat_rows(&cov) })))
        }
        DetectCommand::Hom { overlap, phi, coherent } => {
            let o = parse_complex_arg("overlap", overlap)?;
            let g2 = if *coherent { hom_coherent(o, *phi)? } else { hom_single_photon(o, *phi)? };
            Ok(Output::Json(json!({ "g2": g2 })))
        }
    }
}

pub fn degauss(ctx: Ctx, a: &DegaussArgs) -> Result<Output, Failure> {
    let st = load_state(&a.input, ctx.tolerance)?;
    let g = parse_mode_arg("mode", &a.mode)?;
    let sign = match a.sign {
        SignArg::Add => PhotonOp::Add,
        SignArg::Subtract => PhotonOp::Subtract,
    };
    let p = photon_operation(&st, &g, sign)?;
    let origin = vec![0.0; 2 * st.n_modes()];
    let mut out = json!({
        "value_at_origin": wigner_eval_nongauss(&p, &origin)?,
        "origin_sign": value(&wigner_origin_sign(&p)),
    });
    if a.negativity {
        let mut grid = GridSpec::default_for(st.n_modes());
        grid.half_width = a.half_width.unwrap_or(grid.half_width);
        grid.step = a.step.unwrap_or(grid.step);
        out["log_negativity"] = value(&wigner_log_negativity(&p, &grid)?);
        out["grid"] = value(&grid);
    }
    Ok(Output::Json(out))
}

pub fn metrology(_ctx: Ctx, a: &MetrologyArgs) -> Result<Output, Failure> {
    let kind = match a.model {
        ModelArg::Mz => BuiltinModel::Mz,
        ModelArg::Phase => BuiltinModel::Phase,
        ModelArg::Displacement => BuiltinModel::Displacement,
    };
    let model = ParameterizedField::builtin(kind, a.photons)?;
    let n = model.n_modes();
    let coherent = qcr_bound(&model, &RMat::identity(2 * n, 2 * n), a.quadrature_phase)?;
    let state = if a.squeeze_db == 0.0 {
        GaussianState::vacuum(n)
    } else {
        squeezed_in_mode(&coherent.u_det, 10f64.powf(-a.squeeze_db / 10.0), 0.0)?
    };
    let b = qcr_bound(&model, state.cov(), a.quadrature_phase)?;
    Ok(Output::Json(json!({
        "model": model.name(),
        "n_photons": model.n_photons(),
        "squeeze_db": a.squeeze_db,
        "coherent_bound": coherent.bound,
        "bound": value(&b),
        "improvement": coherent.bound / b.bound,
    })))
}

fn nullifier_variances(st: &GaussianState, v: &AdjacencyMatrix) -> Result<Vec<f64>, Failure> {
    Ok(diagonal(&nullifier_covariance(st, v)?))
}

pub fn cluster(_ctx: Ctx, a: &ClusterArgs) -> Result<Output, Failure> {
    let v = load_adjacency(&a.input)?;
    let u = cluster_unitary(&v);
    let sig = vec![sigma_from_db(a.squeeze_db); v.dim()];
    let cz = cluster_state(&v, &sig)?;
    let passive = cluster_state_passive(&v, &sig)?;
    Ok(Output::Json(json!({
        "unitary": value(&u),
        "condition_residual": cluster_condition_residual(&v, &u),
        "nullifier_variances": {
            "controlled_z": nullifier_variances(&cz, &v)?,
            "passive": nullifier_variances(&passive, &v)?,
        },
    })))
}
