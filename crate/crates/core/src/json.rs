//! Serde helpers for exact scalars. Rationals travel as strings (`"3/4"`),
//! with plain JSON integers accepted on input.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};
use serde_json::Value;

use crate::arith::{format_rational, parse_rational, Rational};
use crate::linalg::Matrix;

pub mod bigint {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    use super::*;

    /// Integers that fit in 64 bits are written as JSON numbers, larger ones as strings.
    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        if let Some(v) = n.to_i64() {
            s.serialize_i64(v)
        } else if let Some(v) = n.to_u64() {
            s.serialize_u64(v)
        } else {
            s.serialize_str(&n.to_string())
        }
    }

    pub fn from_value(v: &Value) -> Result<BigInt, String> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigInt::from(i))
                } else if let Some(u) = n.as_u64() {
                    Ok(BigInt::from(u))
                } else {
                    Err(format!("expected an integer, got {n}"))
                }
            }
            Value::String(s) => s
                .trim()
                .parse()
                .map_err(|_| format!("expected an integer, got {s:?}")),
            other => Err(format!("expected an integer, got {other}")),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_value(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub fn rational_from_value(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(_) => bigint::from_value(v).map(Rational::from_integer),
        other => Err(format!("expected a rational string like \"3/4\", got {other}")),
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(a: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(a))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        rational_from_value(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod rational_vec {
    use serde::ser::SerializeSeq;

    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for a in v {
            seq.serialize_element(&format_rational(a))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<Value>::deserialize(d)?;
        raw.iter()
            .enumerate()
            .map(|(i, v)| rational_from_value(v).map_err(|e| D::Error::custom(format!("[{i}]: {e}"))))
            .collect()
    }
}

/// Matrices as arrays of rows. An empty array is the 0x0 matrix.
pub mod matrix {
    use serde::ser::SerializeSeq;

    use super::*;

    struct Row<'a>(&'a [Rational]);

    impl serde::Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            rational_vec::serialize(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(m: &Matrix<Rational>, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.rows()))?;
        for i in 0..m.rows() {
            seq.serialize_element(&Row(m.row(i)))?;
        }
        seq.end()
    }

    pub fn from_value(v: &Value) -> Result<Matrix<Rational>, String> {
        let rows = v.as_array().ok_or("expected an array of rows")?;
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| format!("row {i} is not an array"))?;
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, x)| rational_from_value(x).map_err(|e| format!("[{i}][{j}]: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(parsed);
        }
        if let Some(first) = out.first() {
            if out.iter().any(|r| r.len() != first.len()) {
                return Err("rows have different lengths".into());
            }
        }
        Ok(Matrix::from_rows(out))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix<Rational>, D::Error> {
        from_value(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Matrices that may legitimately have zero rows but nonzero column count
/// are encoded with explicit shape.
pub mod shaped_matrix {
    use serde::Serialize;

    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Shaped {
        rows: usize,
        cols: usize,
        #[serde(with = "super::matrix")]
        entries: Matrix<Rational>,
    }

    pub fn serialize<S: Serializer>(m: &Matrix<Rational>, s: S) -> Result<S::Ok, S::Error> {
        Shaped { rows: m.rows(), cols: m.cols(), entries: m.clone() }.serialize(s)
    }

    pub fn from_value(v: &Value) -> Result<Matrix<Rational>, String> {
        if v.is_array() {
            return matrix::from_value(v);
        }
        let obj = v.as_object().ok_or("expected a matrix")?;
        let dim = |k: &str| {
            obj.get(k)
                .and_then(Value::as_u64)
                .map(|n| n as usize)
                .ok_or_else(|| format!("missing {k:?}"))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let m = match obj.get("entries") {
            Some(e) => matrix::from_value(e)?,
            None => Matrix::zeros(rows, cols),
        };
        if m.rows() == 0 && m.cols() == 0 {
            return Ok(Matrix::zeros(rows, cols));
        }
        if (m.rows(), m.cols()) != (rows, cols) {
            return Err(format!("entries are {}x{}, declared {rows}x{cols}", m.rows(), m.cols()));
        }
        Ok(m)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix<Rational>, D::Error> {
        from_value(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    use super::*;
    use crate::arith::{int, rat};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "rational")]
        a: Rational,
        #[serde(with = "matrix")]
        m: Matrix<Rational>,
    }

    #[test]
    fn rationals_round_trip_and_accept_integers() {
        let h = Holder { a: rat(-3, 4), m: Matrix::from_rows(vec![vec![int(1), rat(1, 2)]]) };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"a":"-3/4","m":[["1","1/2"]]}"#);
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap(), h);
        let loose: Holder = serde_json::from_str(r#"{"a":7,"m":[[2,"6/4"]]}"#).unwrap();
        assert_eq!(loose.a, int(7));
        assert_eq!(loose.m[(0, 1)], rat(3, 2));
        assert!(serde_json::from_str::<Holder>(r#"{"a":0.5,"m":[]}"#).is_err());
    }
}
