use crate::error::{Error, Result};
use crate::linalg::{c, cdot, cnorm, max_abs_c, sym_eigen_desc, CMat, CVec, RMat};
use crate::modal::ModeMap;
use serde::Serialize;

/// `U G U^T = diag(lambdas)` with `lambdas >= 0` descending.
#[derive(Debug, Clone, Serialize)]
pub struct TakagiFactors {
    pub u: ModeMap,
    pub lambdas: Vec<f64>,
}

/// Autonne-Takagi factorization of a complex symmetric matrix.
///
/// The real symmetric matrix `H = [[A, B], [B, -A]]` built from `G = A + iB`
/// has spectrum `{+lambda, -lambda}`; an eigenvector `(x, y)` of `+lambda`
/// gives `q = x + iy` with `G conj(q) = lambda q`. Vectors are accepted in
/// descending order after complex Gram-Schmidt against those already kept,
/// which settles degenerate and null eigenspaces (where `(x, y)` and
/// `(-y, x)` describe the same complex direction).
pub fn takagi(g: &CMat) -> Result<TakagiFactors> {
    if g.nrows() != g.ncols() {
        return Err(Error::NotSquare { rows: g.nrows(), cols: g.ncols() });
    }
    let dev = max_abs_c(&(g - g.transpose()));
    if dev >= 1e-10 {
        return Err(Error::NotSymmetricComplex { deviation: dev });
    }
    let n = g.nrows();
    let mut h = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = (g[(i, j)] + g[(j, i)]) * 0.5;
            h[(i, j)] = z.re;
            h[(i, n + j)] = z.im;
            h[(n + i, j)] = z.im;
            h[(n + i, n + j)] = -z.re;
        }
    }
    let (vals, vecs) = sym_eigen_desc(&h);
    let mut kept: Vec<CVec> = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for k in 0..2 * n {
        if kept.len() == n {
            break;
        }
        let mut q = CVec::from_fn(n, |i, _| c(vecs[(i, k)], vecs[(n + i, k)]));
        let orig = cnorm(&q);
        for _ in 0..2 {
            for p in &kept {
                let proj = cdot(p, &q);
                q -= p * proj;
            }
        }
        let r = cnorm(&q);
        if r < 0.5 * orig {
            continue;
        }
        q /= c(r, 0.0);
        // Restore the Takagi phase: lambda = q^dagger G conj(q) must be real.
        let gq = g * q.map(|z| z.conj());
        let lam = cdot(&q, &gq);
        if lam.norm() > 1e-300 {
            let ph = (lam / lam.norm()).sqrt();
            q *= ph;
        }
        lambdas.push(vals[k].max(0.0));
        kept.push(q);
    }
    let mut u = CMat::zeros(n, n);
    for (row, q) in kept.iter().enumerate() {
        for j in 0..n {
            u[(row, j)] = q[j].conj();
        }
    }
    for (row, lam) in lambdas.iter_mut().enumerate() {
        let ur = u.row(row).transpose();
        *lam = (ur.transpose() * g * &ur)[(0, 0)].re.max(0.0);
    }
    let u = ModeMap::with_tolerance(u, 1e-8)?;
    Ok(TakagiFactors { u, lambdas })
}

/// Signal-idler factorization `U_s G_si U_i^T = diag(lambdas)`.
#[derive(Debug, Clone, Serialize)]
pub struct SchmidtFactors {
    pub u_s: ModeMap,
    pub u_i: ModeMap,
    pub lambdas: Vec<f64>,
}

pub fn schmidt(g_si: &CMat) -> Result<SchmidtFactors> {
    if g_si.nrows() != g_si.ncols() {
        return Err(Error::NotSquare { rows: g_si.nrows(), cols: g_si.ncols() });
    }
    let n = g_si.nrows();
    let svd = g_si.clone().svd(true, true);
    let w = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let mut u_s = CMat::zeros(n, n);
    let mut u_i = CMat::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        for j in 0..n {
            u_s[(row, j)] = w[(j, k)].conj();
            u_i[(row, j)] = vt[(k, j)].conj();
        }
    }
    let lambdas = order.iter().map(|&k| svd.singular_values[k]).collect();
    Ok(SchmidtFactors {
        u_s: ModeMap::with_tolerance(u_s, 1e-8)?,
        u_i: ModeMap::with_tolerance(u_i, 1e-8)?,
        lambdas,
    })
}

/// Number of Schmidt coefficients above `rel_tol * lambda_max`.
pub fn schmidt_number(f: &SchmidtFactors, rel_tol: f64) -> usize {
    let max = f.lambdas.first().copied().unwrap_or(0.0);
    f.lambdas.iter().filter(|&&l| l > rel_tol * max && l > 0.0).count()
}
