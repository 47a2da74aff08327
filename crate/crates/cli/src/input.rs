use crate::failure::Failure;
use mmqo::io::{parse_cmat, parse_cvec};
use mmqo::linalg::{CVec, RMat, RVec};
use mmqo::sources::{AdjacencyMatrix, JointTwoPhotonMatrix};
use mmqo::GaussianState;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::Path;

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::usage("InputUnreadable", format!("cannot read {}: {e}", path.display()), json!({ "path": path.display().to_string() }))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::usage("InvalidJson", format!("{}: {e}", path.display()), json!({ "path": path.display().to_string() }))
    })
}

fn invalid(path: &Path, what: &str, e: impl std::fmt::Display) -> Failure {
    Failure::usage("InvalidInput", format!("{}: not a valid {what}: {e}", path.display()), json!({ "path": path.display().to_string() }))
}

fn field<'a>(v: &'a Value, name: &str, path: &Path, what: &str) -> Result<&'a Value, Failure> {
    v.get(name).ok_or_else(|| invalid(path, what, format!("missing field `{name}`")))
}

fn real_matrix(rows: Vec<Vec<f64>>, path: &Path, what: &str) -> Result<RMat, Failure> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(invalid(path, what, "rows have different lengths"));
    }
    Ok(RMat::from_fn(n, m, |i, j| rows[i][j]))
}

#[derive(Deserialize)]
struct StateFile {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

/// A `GaussianState` file `{n_modes, mean, cov}`. With `tolerance` set, the
/// Heisenberg inequality may be violated by up to that amount.
pub fn load_state(path: &Path, tolerance: Option<f64>) -> Result<GaussianState, Failure> {
    let what = "Gaussian state";
    let raw: StateFile = serde_json::from_value(read_json(path)?).map_err(|e| invalid(path, what, e))?;
    let cov = real_matrix(raw.cov, path, what)?;
    if cov.nrows() != 2 * raw.n_modes || raw.mean.len() != 2 * raw.n_modes {
        return Err(mmqo::Error::DimensionMismatch { expected: 2 * raw.n_modes, found: cov.nrows().max(raw.mean.len()) }.into());
    }
    let mean = RVec::from_vec(raw.mean);
    let st = match tolerance {
        Some(t) => GaussianState::with_tolerance(mean, cov, -t.abs())?,
        None => GaussianState::new(mean, cov)?,
    };
    log::debug!("loaded {}-mode state from {}", st.n_modes(), path.display());
    Ok(st)
}

/// A `JointTwoPhotonMatrix` file `{g}` with real or `[re, im]` entries.
pub fn load_joint(path: &Path) -> Result<JointTwoPhotonMatrix, Failure> {
    let v = read_json(path)?;
    let what = "joint two-photon matrix";
    let g = parse_cmat(field(&v, "g", path, what)?).map_err(|e| invalid(path, what, e))?;
    Ok(JointTwoPhotonMatrix::new(g)?)
}

/// An `AdjacencyMatrix` file `{v}`.
pub fn load_adjacency(path: &Path) -> Result<AdjacencyMatrix, Failure> {
    let v = read_json(path)?;
    let what = "adjacency matrix";
    let rows: Vec<Vec<f64>> = serde_json::from_value(field(&v, "v", path, what)?.clone()).map_err(|e| invalid(path, what, e))?;
    Ok(AdjacencyMatrix::new(real_matrix(rows, path, what)?)?)
}

#[derive(Debug, Clone, Deserialize)]
pub struct TableEntry {
    pub lo: String,
    pub phi: f64,
    pub variance: f64,
}

/// Measured homodyne variances keyed by `(lo, phi)`.
#[derive(Debug, Clone, Deserialize)]
pub struct HomodyneTable {
    pub n_modes: usize,
    pub entries: Vec<TableEntry>,
}

impl HomodyneTable {
    pub fn lookup(&self, lo: &str, phi: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.lo == lo && (e.phi - phi).abs() < 1e-9).map(|e| e.variance)
    }
}

pub fn load_table(path: &Path) -> Result<HomodyneTable, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| invalid(path, "homodyne table", e))
}

/// A mode vector passed inline as JSON.
pub fn parse_mode_arg(flag: &str, text: &str) -> Result<CVec, Failure> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Failure::usage("InvalidArgument", format!("--{flag}: {e}"), json!({ "flag": flag })))?;
    parse_cvec(&v).map_err(|e| Failure::usage("InvalidArgument", format!("--{flag}: {e}"), json!({ "flag": flag })))
}

/// A complex number written as `re` or `re,im`.
pub fn parse_complex_arg(flag: &str, text: &str) -> Result<mmqo::linalg::C64, Failure> {
    let bad = || Failure::usage("InvalidArgument", format!("--{flag}: expected `re` or `re,im`, got `{text}`"), json!({ "flag": flag }));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(mmqo::linalg::c(num(re)?, 0.0)),
        [re, im] => Ok(mmqo::linalg::c(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}
