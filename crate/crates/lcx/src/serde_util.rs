//! Serde helpers mapping non-finite floats to the "inf"/"-inf" string
//! sentinels used across the JSON interfaces.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serializer};

pub fn f64_to_json(v: f64) -> serde_json::Value {
    if v == f64::INFINITY {
        serde_json::Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        serde_json::Value::String("-inf".into())
    } else {
        serde_json::json!(v)
    }
}

pub fn f64_from_json(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => match s.as_str() {
            "inf" | "+inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

/// `#[serde(with = "ext_f64")]` for possibly-infinite scalars.
pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        f64_from_json(&v).ok_or_else(|| DeError::custom("expected number or \"inf\"/\"-inf\""))
    }
}

/// `#[serde(with = "ext_f64_vec")]` for vectors of possibly-infinite floats.
pub mod ext_f64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| f64_to_json(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let vals = Vec::<serde_json::Value>::deserialize(d)?;
        vals.iter()
            .map(|v| {
                f64_from_json(v).ok_or_else(|| DeError::custom("expected number or \"inf\"/\"-inf\""))
            })
            .collect()
    }
}
