//! JSON encodings of dense matrices and vectors.
//!
//! Complex entries are `[re, im]` pairs; matrices are row-major arrays of rows.

use crate::linalg::{c, CMat, CVec, RMat, RVec};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn rows_to_rmat<E: serde::de::Error>(rows: Vec<Vec<f64>>) -> Result<RMat, E> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(E::custom("ragged matrix rows"));
    }
    Ok(RMat::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows_to_cmat<E: serde::de::Error>(rows: Vec<Vec<[f64; 2]>>) -> Result<CMat, E> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(E::custom("ragged matrix rows"));
    }
    Ok(CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn rmat_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn cmat_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn cvec_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn cvec_from_pairs(p: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(p.len(), p.iter().map(|x| c(x[0], x[1])))
}

pub mod rmat {
    use super::*;
    pub fn serialize<S: Serializer>(m: &RMat, s: S) -> Result<S::Ok, S::Error> {
        rmat_rows(m).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMat, D::Error> {
        rows_to_rmat(Vec::<Vec<f64>>::deserialize(d)?)
    }
}

pub mod cmat {
    use super::*;
    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        cmat_rows(m).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        rows_to_cmat(Vec::<Vec<[f64; 2]>>::deserialize(d)?)
    }
}

pub mod rvec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &RVec, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RVec, D::Error> {
        Ok(RVec::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

pub mod cvec {
    use super::*;
    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        cvec_pairs(v).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        Ok(cvec_from_pairs(&Vec::<[f64; 2]>::deserialize(d)?))
    }
}

/// Parse a complex vector given either as `[[re, im], ...]` or as plain reals.
pub fn parse_cvec(v: &serde_json::Value) -> Result<CVec, serde_json::Error> {
    if let Ok(p) = Vec::<[f64; 2]>::deserialize(v) {
        return Ok(cvec_from_pairs(&p));
    }
    let r = Vec::<f64>::deserialize(v).map_err(|_| {
        serde_json::Error::custom("expected an array of numbers or of [re, im] pairs")
    })?;
    Ok(CVec::from_iterator(r.len(), r.iter().map(|&x| c(x, 0.0))))
}

/// Parse a complex matrix given either with `[re, im]` entries or plain reals.
pub fn parse_cmat(v: &serde_json::Value) -> Result<CMat, serde_json::Error> {
    if let Ok(rows) = Vec::<Vec<[f64; 2]>>::deserialize(v) {
        return rows_to_cmat(rows);
    }
    let rows = Vec::<Vec<f64>>::deserialize(v).map_err(|_| {
        serde_json::Error::custom("expected a matrix of numbers or of [re, im] pairs")
    })?;
    Ok(rows_to_rmat::<serde_json::Error>(rows)?.map(|x| c(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_real_and_complex_vectors() {
        let a: serde_json::Value = serde_json::from_str("[1, 0.5]").unwrap();
        let b: serde_json::Value = serde_json::from_str("[[1, 0], [0, 2]]").unwrap();
        assert_eq!(parse_cvec(&a).unwrap()[1], c(0.5, 0.0));
        assert_eq!(parse_cvec(&b).unwrap()[1], c(0.0, 2.0));
    }

    #[test]
    fn ragged_matrix_rejected() {
        let v: serde_json::Value = serde_json::from_str("[[1, 2], [3]]").unwrap();
        assert!(parse_cmat(&v).is_err());
    }
}
