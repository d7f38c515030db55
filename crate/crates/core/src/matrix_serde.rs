//! Serde adapters for dense matrices.
//!
//! Matrices are written as `{"rows": r, "cols": c, "data": [...]}` with
//! `data` in row-major order. Non-finite entries become `null` and read
//! back as NaN.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Repr {
    rows: usize,
    cols: usize,
    data: Vec<Option<f64>>,
}

fn to_repr(m: &DMatrix<f64>) -> Repr {
    let mut data = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            data.push(v.is_finite().then_some(v));
        }
    }
    Repr {
        rows: m.nrows(),
        cols: m.ncols(),
        data,
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<DMatrix<f64>, E> {
    if r.rows * r.cols != r.data.len() {
        return Err(E::custom(format!(
            "matrix declared {}x{} but has {} entries",
            r.rows,
            r.cols,
            r.data.len()
        )));
    }
    let vals: Vec<f64> = r.data.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    Ok(DMatrix::from_row_slice(r.rows, r.cols, &vals))
}

pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    to_repr(m).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
    from_repr(Repr::deserialize(d)?)
}

/// `Vec<DMatrix<f64>>` in the same layout.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[DMatrix<f64>], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = ms.iter().map(to_repr).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DMatrix<f64>>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(from_repr::<D::Error>)
            .collect()
    }
}

/// A single float that serializes as `null` when not finite.
pub mod nan_as_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Wrap {
        #[serde(with = "super")]
        m: DMatrix<f64>,
    }

    #[test]
    fn row_major_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 0.1]);
        let s = serde_json::to_string(&Wrap { m: m.clone() }).unwrap();
        assert_eq!(s, r#"{"m":{"rows":2,"cols":3,"data":[1.0,2.0,3.0,4.0,5.0,0.1]}}"#);
        let back: Wrap = serde_json::from_str(&s).unwrap();
        assert_eq!(back.m, m);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let bad = r#"{"m":{"rows":2,"cols":2,"data":[1.0]}}"#;
        assert!(serde_json::from_str::<Wrap>(bad).is_err());
    }
}
