//! JSON serialization of ring elements.
//!
//! Schema:
//! ```json
//! {"terms": [{"coeff": "-3/4", "x": 0, "jet": {"0": 1, "1": 1}}, ...]}
//! ```
//! Terms are emitted in canonical order and coefficients as exact rational
//! strings, so serialization is deterministic and round-trips bit-exactly.

use std::str::FromStr;

use serde_json::{json, Map, Value};

use super::poly::{DiffPoly, Monomial};
use super::{Rat, RingError};

/// Serialize a polynomial to its canonical JSON form.
pub fn poly_to_json(p: &DiffPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| {
            let jet: Map<String, Value> = m
                .jet()
                .iter()
                .map(|(&k, &e)| (k.to_string(), json!(e)))
                .collect();
            json!({
                "coeff": c.to_string(),
                "x": m.xdeg(),
                "jet": Value::Object(jet),
            })
        })
        .collect();
    json!({ "terms": terms })
}

/// Deserialize a polynomial from its JSON form, validating every field.
pub fn poly_from_json(value: &Value) -> Result<DiffPoly, RingError> {
    let terms = value
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| RingError::Malformed("missing \"terms\" array".into()))?;
    let mut out = DiffPoly::zero();
    for t in terms {
        let coeff_str = t
            .get("coeff")
            .and_then(Value::as_str)
            .ok_or_else(|| RingError::Malformed("term missing string \"coeff\"".into()))?;
        let coeff = Rat::from_str(coeff_str)
            .map_err(|e| RingError::Malformed(format!("bad coefficient {coeff_str:?}: {e}")))?;
        let xdeg = match t.get("x") {
            None => 0,
            Some(v) => v
                .as_i64()
                .ok_or_else(|| RingError::Malformed("\"x\" must be an integer".into()))?,
        };
        let mut jet_entries = Vec::new();
        if let Some(jet) = t.get("jet") {
            let obj = jet
                .as_object()
                .ok_or_else(|| RingError::Malformed("\"jet\" must be an object".into()))?;
            for (k, e) in obj {
                let order: u32 = k
                    .parse()
                    .map_err(|_| RingError::Malformed(format!("bad jet order key {k:?}")))?;
                let exp = e
                    .as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| {
                        RingError::Malformed(format!("bad jet exponent for order {k}"))
                    })?;
                if exp == 0 {
                    return Err(RingError::Malformed(format!(
                        "zero exponent for jet order {k}"
                    )));
                }
                jet_entries.push((order, exp));
            }
        }
        out.add_term(Monomial::new(xdeg, jet_entries), coeff);
    }
    Ok(out)
}
