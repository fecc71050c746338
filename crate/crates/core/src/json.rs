//! JSON encodings shared by every report: a complex scalar is `[re, im]`, a
//! vector is a list of scalars and a matrix is
//! `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major order.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{CMat, CVec, C64};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

pub mod cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        let data: Vec<[f64; 2]> = v.iter().map(pair).collect();
        data.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        let data = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVec::from_iterator(
            data.len(),
            data.iter().map(|p| C64::new(p[0], p[1])),
        ))
    }
}

pub mod cvec_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[CVec], s: S) -> Result<S::Ok, S::Error> {
        let data: Vec<Vec<[f64; 2]>> = v.iter().map(|x| x.iter().map(pair).collect()).collect();
        data.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVec>, D::Error> {
        let data = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(data
            .into_iter()
            .map(|x| CVec::from_iterator(x.len(), x.iter().map(|p| C64::new(p[0], p[1]))))
            .collect())
    }
}

pub mod opt_cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<CVec>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|x| x.iter().map(pair).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CVec>, D::Error> {
        let data = Option::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(data.map(|x| CVec::from_iterator(x.len(), x.iter().map(|p| C64::new(p[0], p[1])))))
    }
}

pub mod opt_cvec_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<CVec>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|vs| {
                vs.iter()
                    .map(|x| x.iter().map(pair).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<CVec>>, D::Error> {
        let data = Option::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        Ok(data.map(|vs| {
            vs.into_iter()
                .map(|x| CVec::from_iterator(x.len(), x.iter().map(|p| C64::new(p[0], p[1]))))
                .collect()
        }))
    }
}

pub mod cmat {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(pair(&m[(i, j)]));
            }
        }
        MatrixJson { rows, cols, data }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.rows * raw.cols != raw.data.len() {
            return Err(D::Error::custom(format!(
                "matrix data has {} entries, expected {}x{}",
                raw.data.len(),
                raw.rows,
                raw.cols
            )));
        }
        Ok(CMat::from_fn(raw.rows, raw.cols, |i, j| {
            let p = raw.data[i * raw.cols + j];
            C64::new(p[0], p[1])
        }))
    }
}

/// Serializable wrapper for a bare matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix(#[serde(with = "cmat")] pub CMat);

/// Serializable wrapper for a bare vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(#[serde(with = "cvec")] pub CVec);
