//! Serde adapters that carry big integers and rationals as decimal strings.
//!
//! Rationals are written as `"p/q"` (or `"p"` when the denominator is one)
//! so that exact values survive a round trip through JSON.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let den = BigInt::from_str(den).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(D::Error::custom)
    }
}

pub mod integer {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let raw = String::deserialize(d)?;
        BigInt::from_str(raw.trim()).map_err(D::Error::custom)
    }
}

pub mod integer_array {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer, const N: usize>(v: &[BigInt; N], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(N))?;
        for n in v {
            seq.serialize_element(&n.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[BigInt; N], D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let parsed = raw
            .iter()
            .map(|r| BigInt::from_str(r.trim()).map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        parsed
            .try_into()
            .map_err(|v: Vec<BigInt>| D::Error::custom(format!("expected {N} integers, got {}", v.len())))
    }
}

pub mod integer_matrix2 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[BigInt; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[String; 2]> = m.iter().map(|r| [r[0].to_string(), r[1].to_string()]).collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[BigInt; 2]; 2], D::Error> {
        let rows = <[[String; 2]; 2]>::deserialize(d)?;
        let p = |x: &String| BigInt::from_str(x.trim()).map_err(D::Error::custom);
        Ok([[p(&rows[0][0])?, p(&rows[0][1])?], [p(&rows[1][0])?, p(&rows[1][1])?]])
    }
}

pub mod integer_matrix32 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[BigInt; 2]; 3], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[String; 2]> = m.iter().map(|r| [r[0].to_string(), r[1].to_string()]).collect();
        serde::Serialize::serialize(&rows, s)
    }
}

pub mod rational_array3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational; 3], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|q| q.to_string()).collect();
        serde::Serialize::serialize(&strs, s)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|q| q.to_string()).collect();
        serde::Serialize::serialize(&strs, s)
    }
}
